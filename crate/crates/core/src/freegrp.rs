//! Free reduction: the stack reference algorithm, the reduction by
//! equivalence classes of positions, and the embedding into F₂.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FLetter {
    pub gen: usize,
    pub sign: i8,
}

impl FLetter {
    pub fn new(gen: usize, sign: i8) -> Self {
        debug_assert!(sign == 1 || sign == -1);
        Self { gen, sign }
    }

    pub fn pos(gen: usize) -> Self {
        Self { gen, sign: 1 }
    }

    pub fn neg(gen: usize) -> Self {
        Self { gen, sign: -1 }
    }

    pub fn inverse(self) -> Self {
        Self { gen: self.gen, sign: -self.sign }
    }
}

impl fmt::Display for FLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sign > 0 {
            write!(f, "x{}", self.gen)
        } else {
            write!(f, "x{}^-1", self.gen)
        }
    }
}

pub type FWord = Vec<FLetter>;

pub fn invert(w: &[FLetter]) -> FWord {
    w.iter().rev().map(|l| l.inverse()).collect()
}

/// Reference free reduction with a stack.
pub fn free_reduce_stack(w: &[FLetter]) -> FWord {
    let mut stack: FWord = Vec::with_capacity(w.len());
    for &l in w {
        if stack.last() == Some(&l.inverse()) {
            stack.pop();
        } else {
            stack.push(l);
        }
    }
    stack
}

pub fn is_trivial(w: &[FLetter]) -> bool {
    free_reduce_stack(w).is_empty()
}

/// The partition of positions into classes of `≈_F` together with the
/// partial involution on classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeClasses {
    /// Class index of every position.
    pub class_of: Vec<usize>,
    /// Members of each class in ascending order.
    pub members: Vec<Vec<usize>>,
    /// Inverse class, if some position is paired with a member.
    pub inverse: Vec<Option<usize>>,
}

impl FreeClasses {
    /// Builds the classes: `i ≈ j` when `w_i = w_j` and `w_{i+1} ⋯ w_j`
    /// freely reduces to 1; `i` is paired with `j > i` when `w_j = w̄_i` and
    /// `w_{i+1} ⋯ w_{j-1}` reduces to 1.
    pub fn new(w: &[FLetter]) -> Self {
        let n = w.len();
        let mut uf = UnionFind::new(n);
        let mut partner: Vec<Option<usize>> = vec![None; n];
        let mut stack: Vec<FLetter> = Vec::with_capacity(n);
        for i in 0..n {
            stack.clear();
            for j in i + 1..n {
                if stack.is_empty() && w[j] == w[i].inverse() {
                    partner[i].get_or_insert(j);
                    partner[j].get_or_insert(i);
                }
                if stack.last() == Some(&w[j].inverse()) {
                    stack.pop();
                } else {
                    stack.push(w[j]);
                }
                if stack.is_empty() && w[j] == w[i] {
                    uf.union(i, j);
                }
            }
        }
        let mut class_id = vec![usize::MAX; n];
        let mut class_of = vec![0; n];
        let mut members: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            let root = uf.find(i);
            if class_id[root] == usize::MAX {
                class_id[root] = members.len();
                members.push(Vec::new());
            }
            class_of[i] = class_id[root];
            members[class_id[root]].push(i);
        }
        let mut inverse = vec![None; members.len()];
        for i in 0..n {
            if let Some(j) = partner[i] {
                inverse[class_of[i]] = Some(class_of[j]);
            }
        }
        Self { class_of, members, inverse }
    }

    fn inverse_len(&self, c: usize) -> usize {
        self.inverse[c].map_or(0, |d| self.members[d].len())
    }

    /// Positions that survive free reduction: for every class with one more
    /// member than its inverse, the largest member.
    pub fn survivors(&self) -> Vec<usize> {
        let mut keep: Vec<usize> = (0..self.members.len())
            .filter(|&c| self.members[c].len() == self.inverse_len(c) + 1)
            .map(|c| *self.members[c].last().expect("classes are nonempty"))
            .collect();
        keep.sort_unstable();
        keep
    }

    /// Checks that members of a class and its inverse alternate in
    /// ascending order and that their sizes differ by at most one.
    pub fn check_invariants(&self) -> Result<(), String> {
        for c in 0..self.members.len() {
            let Some(d) = self.inverse[c] else {
                if self.members[c].len() != 1 {
                    return Err(format!("class {c} has no inverse but {} members", self.members[c].len()));
                }
                continue;
            };
            if self.inverse[d] != Some(c) || c == d {
                return Err(format!("classes {c} and {d} are not mutually inverse"));
            }
            let (x, y) = (&self.members[c], &self.members[d]);
            if x.len().abs_diff(y.len()) > 1 {
                return Err(format!("classes {c} and {d} differ in size by more than one"));
            }
            let mut merged: Vec<(usize, bool)> = x.iter().map(|&i| (i, true)).chain(y.iter().map(|&i| (i, false))).collect();
            merged.sort_unstable();
            if merged.windows(2).any(|p| p[0].1 == p[1].1) {
                return Err(format!("classes {c} and {d} do not alternate"));
            }
        }
        Ok(())
    }
}

/// Free reduction by classes; agrees with [`free_reduce_stack`].
pub fn free_reduce_classes(w: &[FLetter]) -> FWord {
    FreeClasses::new(w).survivors().into_iter().map(|i| w[i]).collect()
}

/// Maps `(j, ±)` to `b^j a^{±1} b^{−j}` with `a` = generator 0 and `b` = 1.
pub fn embed_f2(w: &[FLetter]) -> FWord {
    let mut out = Vec::new();
    for l in w {
        out.extend(std::iter::repeat_n(FLetter::pos(1), l.gen));
        out.push(FLetter::new(0, l.sign));
        out.extend(std::iter::repeat_n(FLetter::neg(1), l.gen));
    }
    out
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // keep the smaller index as root so class numbering follows positions
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

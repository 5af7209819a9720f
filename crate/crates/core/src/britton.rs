//! Britton reduction for GBS words: exact interval exponents `k_{i,j}`,
//! the coloring of edge positions, the word problem, and reduced and
//! cyclically reduced normal forms.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::arith::ExactRational;
use crate::freegrp::{embed_f2, is_trivial, FLetter, FWord, FreeClasses};
use crate::gog::{GFactorization, GbsGraph, Orientation, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BrittonError {
    #[error("interval ({i}, {j}) out of range for a word with {n} edges")]
    OutOfRange { i: usize, j: usize, n: usize },
    #[error(transparent)]
    Word(#[from] WordError),
}

/// The ratios `P_ν = ∏_{μ≤ν} α_μ/β_μ` over the shared denominator `∏ β_μ`,
/// together with prefix sums of `k_ν·P_ν`, so that every `k_{i,j}` is one
/// subtraction and one (implicit) division away.
#[derive(Debug, Clone)]
pub struct PrefixRatios {
    /// `q[ν] = P_ν · ∏_{μ≤n} β_μ`, an integer.
    q: Vec<BigInt>,
    denom: BigInt,
    /// `sums[j] = Σ_{ν<j} k_ν q[ν]`.
    sums: Vec<BigInt>,
}

impl PrefixRatios {
    pub fn new(f: &GFactorization, graph: &GbsGraph) -> Self {
        let n = f.len();
        let mut alpha_prefix = Vec::with_capacity(n + 1);
        alpha_prefix.push(BigInt::one());
        for i in 1..=n {
            let next = &alpha_prefix[i - 1] * graph.alpha(f.edge(i));
            alpha_prefix.push(next);
        }
        let mut beta_suffix = vec![BigInt::one(); n + 1];
        for i in (0..n).rev() {
            beta_suffix[i] = &beta_suffix[i + 1] * graph.beta(f.edge(i + 1));
        }
        let q: Vec<BigInt> = alpha_prefix.iter().zip(&beta_suffix).map(|(a, b)| a * b).collect();
        let mut sums = Vec::with_capacity(n + 2);
        sums.push(BigInt::zero());
        for (nu, qn) in q.iter().enumerate() {
            let next = &sums[nu] + f.exponent(nu) * qn;
            sums.push(next);
        }
        let denom = beta_suffix.swap_remove(0);
        Self { q, denom, sums }
    }

    pub fn len(&self) -> usize {
        self.q.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `P_ν` as an exact rational.
    pub fn ratio(&self, nu: usize) -> ExactRational {
        ExactRational::new(self.q[nu].clone(), self.denom.clone()).expect("labels are nonzero")
    }

    fn numerator(&self, i: usize, j: usize) -> BigInt {
        &self.sums[j + 1] - &self.sums[i]
    }

    /// `k_{i,j}` for `0 ≤ i ≤ j ≤ n`.
    pub fn k(&self, i: usize, j: usize) -> ExactRational {
        ExactRational::new(self.numerator(i, j), self.q[i].clone()).expect("labels are nonzero")
    }

    /// `k_{i,j}` when it is an integer.
    pub fn k_integer(&self, i: usize, j: usize) -> Option<BigInt> {
        let (quot, rem) = self.numerator(i, j).div_rem(&self.q[i]);
        rem.is_zero().then_some(quot)
    }

    /// Whether `k_{i,j}` is an integer multiple of `m`.
    pub fn k_multiple_of(&self, i: usize, j: usize, m: &BigInt) -> bool {
        self.numerator(i, j).is_multiple_of(&(&self.q[i] * m))
    }
}

fn check_range(f: &GFactorization, i: usize, j: usize) -> Result<(), BrittonError> {
    if i <= j && j <= f.len() {
        Ok(())
    } else {
        Err(BrittonError::OutOfRange { i, j, n: f.len() })
    }
}

/// `k_{i,j} = Σ_{ν=i}^{j} k_ν ∏_{μ=i+1}^{ν} α_μ/β_μ`.
pub fn k_interval(f: &GFactorization, graph: &GbsGraph, i: usize, j: usize) -> Result<ExactRational, BrittonError> {
    check_range(f, i, j)?;
    Ok(PrefixRatios::new(f, graph).k(i, j))
}

/// Signed count of each oriented edge among `y_{i+1} ⋯ y_j`.
pub fn rho(f: &GFactorization, i: usize, j: usize, d: &Orientation) -> Result<Vec<i64>, BrittonError> {
    check_range(f, i, j)?;
    let mut out = vec![0; d.len()];
    for t in i + 1..=j {
        let (slot, sign) = d.slot(f.edge(t));
        out[slot] += sign;
    }
    Ok(out)
}

/// `i ∼_C j`: the edges are mutually inverse, the enclosed edges cancel in
/// `ρ`, and the enclosed exponent is a multiple of `β` of the earlier edge.
pub fn sim_c(f: &GFactorization, graph: &GbsGraph, i: usize, j: usize) -> Result<bool, BrittonError> {
    let n = f.len();
    if i == 0 || j == 0 || i > n || j > n || i == j {
        return Err(BrittonError::OutOfRange { i, j, n });
    }
    let (i, j) = (i.min(j), i.max(j));
    let d = crate::gog::orientation(graph);
    let table = PrefixRatios::new(f, graph);
    Ok(sim_c_with(f, graph, &table, &d, i, j))
}

fn sim_c_with(f: &GFactorization, graph: &GbsGraph, table: &PrefixRatios, d: &Orientation, i: usize, j: usize) -> bool {
    let yi = f.edge(i);
    graph.inverse(yi) == f.edge(j)
        && rho(f, i, j - 1, d).map(|r| r.iter().all(|&c| c == 0)).unwrap_or(false)
        && table.k_multiple_of(i, j - 1, graph.beta(yi))
}

/// Neighbors under `∼_C` for every position `1..=n` (index 0 unused).
fn sim_c_adjacency(f: &GFactorization, graph: &GbsGraph, table: &PrefixRatios) -> Vec<Vec<usize>> {
    let n = f.len();
    let d = crate::gog::orientation(graph);
    // positions i grouped by ρ(y_1 ⋯ y_i); i ∼_C j needs equal prefixes at i and j-1
    let mut prefix = vec![0i64; d.len()];
    let mut buckets: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    let mut adj = vec![Vec::new(); n + 1];
    for j in 1..=n {
        // prefix currently holds ρ through j-1
        if let Some(candidates) = buckets.get(&prefix) {
            let yj = f.edge(j);
            for &i in candidates {
                let yi = f.edge(i);
                if graph.inverse(yi) == yj && table.k_multiple_of(i, j - 1, graph.beta(yi)) {
                    adj[i].push(j);
                    adj[j].push(i);
                }
            }
        }
        let (slot, sign) = d.slot(f.edge(j));
        prefix[slot] += sign;
        buckets.entry(prefix.clone()).or_default().push(j);
    }
    adj
}

/// The `≈`-classes of edge positions with their partial involution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorTable {
    /// Class of every position `1..=n`; index 0 is unused.
    pub class_of: Vec<usize>,
    /// Members of each class, ascending.
    pub classes: Vec<Vec<usize>>,
    /// Inverse class; `None` when the inverse class is empty.
    pub inverse: Vec<Option<usize>>,
    /// Smallest position in the class or its inverse.
    pub rep: Vec<usize>,
    /// `+1` when the representative lies in the class itself.
    pub sign: Vec<i8>,
}

impl ColorTable {
    pub fn len(&self) -> usize {
        self.class_of.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The color word `C(w) = [1] ⋯ [n]` over representatives.
    pub fn word(&self) -> FWord {
        (1..self.class_of.len())
            .map(|t| {
                let c = self.class_of[t];
                FLetter::new(self.rep[c], self.sign[c])
            })
            .collect()
    }
}

fn color_with(f: &GFactorization, graph: &GbsGraph, table: &PrefixRatios) -> ColorTable {
    let n = f.len();
    let adj = sim_c_adjacency(f, graph, table);
    // i ≈ j iff they share a ∼_C neighbor, so merge every neighborhood
    let mut parent: Vec<usize> = (0..=n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for l in 1..=n {
        if let Some((&first, rest)) = adj[l].split_first() {
            for &m in rest {
                let (a, b) = (find(&mut parent, first), find(&mut parent, m));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut class_of = vec![usize::MAX; n + 1];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut root_class: HashMap<usize, usize> = HashMap::new();
    for t in 1..=n {
        let root = find(&mut parent, t);
        let c = *root_class.entry(root).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        class_of[t] = c;
        classes[c].push(t);
    }
    let inverse: Vec<Option<usize>> = classes
        .iter()
        .map(|members| members.iter().find_map(|&t| adj[t].first().map(|&l| class_of[l])))
        .collect();
    let mut rep = vec![0; classes.len()];
    let mut sign = vec![1; classes.len()];
    for c in 0..classes.len() {
        let own = classes[c][0];
        match inverse[c] {
            Some(d) if classes[d][0] < own => {
                rep[c] = classes[d][0];
                sign[c] = -1;
            }
            _ => rep[c] = own,
        }
    }
    ColorTable { class_of, classes, inverse, rep, sign }
}

/// Computes the `≈`-classes and the color word `C(w)`.
pub fn color(f: &GFactorization, graph: &GbsGraph) -> (ColorTable, FWord) {
    let table = PrefixRatios::new(f, graph);
    let colors = color_with(f, graph, &table);
    let word = colors.word();
    (colors, word)
}

/// Decides `f = 1` in the GBS group: `k_{0,n} = 0` and `C(w)` is trivial.
pub fn word_problem(f: &GFactorization, graph: &GbsGraph) -> Result<bool, BrittonError> {
    f.require_closed(graph)?;
    Ok(is_trivial_path(f, graph))
}

fn is_trivial_path(f: &GFactorization, graph: &GbsGraph) -> bool {
    let table = PrefixRatios::new(f, graph);
    if !table.k(0, f.len()).is_zero() {
        return false;
    }
    is_trivial(&embed_f2(&color_with(f, graph, &table).word()))
}

/// Tests `f = g` for two factorizations with the same endpoints.
pub fn equal_in_group(f: &GFactorization, g: &GFactorization, graph: &GbsGraph) -> Result<bool, BrittonError> {
    let q = f.concat(&g.invert(graph), graph)?;
    word_problem(&q, graph)
}

/// The sub-word `a_i^{k_i} y_{i+1} ⋯ y_j a_j^{k_j}`.
pub fn slice(f: &GFactorization, graph: &GbsGraph, i: usize, j: usize) -> Result<GFactorization, BrittonError> {
    check_range(f, i, j)?;
    Ok(GFactorization {
        start: f.vertex_at(i, graph),
        k0: f.exponent(i).clone(),
        steps: f.steps[i..j].to_vec(),
    })
}

/// `k_{i,j}` when the slice `w_{i,j}` lies in the vertex group `⟨a_i⟩`.
pub fn vertex_group_exponent(
    f: &GFactorization,
    graph: &GbsGraph,
    i: usize,
    j: usize,
) -> Result<Option<BigInt>, BrittonError> {
    let s = slice(f, graph, i, j)?;
    let table = PrefixRatios::new(&s, graph);
    if !is_trivial(&color_with(&s, graph, &table).word()) {
        return Ok(None);
    }
    Ok(Some(table.k_integer(0, s.len()).expect("a slice in a vertex group has an integral exponent")))
}

/// Britton reduction via the color word: positions surviving free
/// reduction of `C(w)` keep their edges, and the exponents in between are
/// the corresponding `k_{i,j}`.
pub fn britton_reduce_fast(f: &GFactorization, graph: &GbsGraph) -> GFactorization {
    let table = PrefixRatios::new(f, graph);
    let word = color_with(f, graph, &table).word();
    let kept: Vec<usize> = FreeClasses::new(&word).survivors().into_iter().map(|p| p + 1).collect();
    let exp = |i: usize, j: usize| table.k_integer(i, j).expect("exponents between surviving edges are integral");
    let n = f.len();
    let Some(&first) = kept.first() else {
        return GFactorization::power(f.start, exp(0, n));
    };
    let mut steps = Vec::with_capacity(kept.len());
    for (r, &i) in kept.iter().enumerate() {
        let end = kept.get(r + 1).map_or(n, |&next| next - 1);
        steps.push((f.edge(i), exp(i, end)));
    }
    GFactorization { start: f.start, k0: exp(0, first - 1), steps }
}

fn redex_at(f: &GFactorization, graph: &GbsGraph, e: usize) -> bool {
    let y = f.edge(e);
    f.edge(e + 1) == graph.inverse(y) && f.exponent(e).is_multiple_of(graph.beta(y))
}

/// Reference reduction: repeatedly rewrites the leftmost `y a^{βt} ȳ` to
/// `a^{αt}`, merging neighbouring powers.
pub fn britton_reduce_naive(f: &GFactorization, graph: &GbsGraph) -> GFactorization {
    let mut w = f.clone();
    while let Some(e) = (1..w.len()).find(|&e| redex_at(&w, graph, e)) {
        let y = w.edge(e);
        let middle = w.exponent(e) / graph.beta(y) * graph.alpha(y);
        let after = w.exponent(e + 1).clone();
        w.steps.drain(e - 1..=e);
        let merged = middle + after;
        if e == 1 {
            w.k0 += merged;
        } else {
            w.steps[e - 2].1 += merged;
        }
    }
    w
}

/// True iff no edge rule applies.
pub fn is_britton_reduced(f: &GFactorization, graph: &GbsGraph) -> bool {
    (1..f.len()).all(|e| !redex_at(f, graph, e))
}

/// True iff every cyclic permutation is Britton-reduced.
pub fn is_cyclically_reduced(f: &GFactorization, graph: &GbsGraph) -> bool {
    let n = f.len();
    if n == 0 {
        return true;
    }
    let doubled = f.concat(f, graph).expect("closed word");
    is_britton_reduced(&doubled, graph)
}

pub type Reducer = fn(&GFactorization, &GbsGraph) -> GFactorization;

/// A cyclically reduced conjugate `r = c f c⁻¹` together with `c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicForm {
    pub word: GFactorization,
    pub conjugator: GFactorization,
}

/// Cyclic reduction with an explicit conjugator, using `reduce` for the
/// Britton steps. Hyperbolic results start with an edge (`k₀ = 0`).
pub fn cyclic_form_with(f: &GFactorization, graph: &GbsGraph, reduce: Reducer) -> Result<CyclicForm, BrittonError> {
    f.require_closed(graph)?;
    let g = reduce(f, graph);
    let n = g.len();
    if n == 0 {
        return Ok(CyclicForm { conjugator: GFactorization::identity(g.start), word: g });
    }
    let half = n / 2;
    // rotating by `half` conjugates by the inverse of the prefix
    let rotated = reduce(&g.rotate(half, graph), graph);
    let mut conjugator = g.prefix(half).invert(graph);
    if !rotated.has_edges() {
        return Ok(CyclicForm { word: rotated, conjugator });
    }
    // move the leading power to the end
    let shift = GFactorization::power(rotated.start, -&rotated.k0);
    let word = shift.concat(&rotated, graph)?.concat(&shift.invert(graph), graph)?;
    conjugator = shift.concat(&conjugator, graph)?;
    Ok(CyclicForm { word, conjugator })
}

pub fn cyclic_form(f: &GFactorization, graph: &GbsGraph) -> Result<CyclicForm, BrittonError> {
    cyclic_form_with(f, graph, britton_reduce_fast)
}

/// A cyclically Britton-reduced conjugate of a closed word.
pub fn cyclically_reduce(f: &GFactorization, graph: &GbsGraph) -> Result<GFactorization, BrittonError> {
    Ok(cyclic_form(f, graph)?.word)
}

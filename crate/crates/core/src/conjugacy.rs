//! Conjugacy in GBS groups: hyperbolic elements through a linear system
//! with congruence conditions, elliptic elements through the
//! Baumslag-Solitar formula or the commutative monoid engine.

use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::arith::{crt_solvable, crt_solve, ArithError, ExactRational};
use crate::britton::{
    britton_reduce_naive, cyclic_form, cyclic_form_with, word_problem, BrittonError, CyclicForm, Reducer,
};
use crate::commonoid::{congruent, gbs_to_monoid, CongResult, MonoidError};
use crate::gog::{EdgeId, GFactorization, GbsGraph, VertexId, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConjError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Britton(#[from] BrittonError),
    #[error(transparent)]
    Monoid(#[from] MonoidError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("BS labels must be nonzero")]
    ZeroLabel,
    #[error("inputs are not cyclically reduced hyperbolic words over the same path")]
    Precondition,
    #[error("conjugator failed verification")]
    WitnessRejected,
}

/// Verdict of a conjugacy query. A witness `z` satisfies `z v z⁻¹ = w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConjResult {
    Conjugate(Option<GFactorization>),
    NotConjugate,
    Unknown(String),
}

impl ConjResult {
    pub fn is_conjugate(&self) -> bool {
        matches!(self, ConjResult::Conjugate(_))
    }

    pub fn witness(&self) -> Option<&GFactorization> {
        match self {
            ConjResult::Conjugate(z) => z.as_ref(),
            _ => None,
        }
    }
}

/// Checks `z v z⁻¹ = w`.
pub fn verify_witness(z: &GFactorization, v: &GFactorization, w: &GFactorization, graph: &GbsGraph) -> bool {
    conjugation_word(z, v, w, graph).is_some_and(|q| word_problem(&q, graph).unwrap_or(false))
}

fn conjugation_word(z: &GFactorization, v: &GFactorization, w: &GFactorization, graph: &GbsGraph) -> Option<GFactorization> {
    z.concat(v, graph)
        .and_then(|q| q.concat(&z.invert(graph), graph))
        .and_then(|q| q.concat(&w.invert(graph), graph))
        .ok()
}

fn join(parts: &[&GFactorization], graph: &GbsGraph) -> GFactorization {
    let mut out = parts[0].clone();
    for p in &parts[1..] {
        out = out.concat(p, graph).expect("conjugator pieces line up");
    }
    out
}

/// Combines a conjugator between cyclic forms into one between the inputs.
fn lift_witness(cv: &CyclicForm, cw: &CyclicForm, z: &GFactorization, graph: &GbsGraph) -> GFactorization {
    join(&[&cw.conjugator.invert(graph), z, &cv.conjugator], graph)
}

/// Decides whether closed words `v` and `w` are conjugate. `bound` caps
/// the coordinates of the elliptic monoid search.
pub fn conjugate(
    v: &GFactorization,
    w: &GFactorization,
    graph: &GbsGraph,
    bound: Option<u64>,
) -> Result<ConjResult, ConjError> {
    v.require_closed(graph)?;
    w.require_closed(graph)?;
    let cv = cyclic_form(v, graph)?;
    let cw = cyclic_form(w, graph)?;
    let (rv, rw) = (&cv.word, &cw.word);
    let z = match (rv.len(), rw.len()) {
        (0, 0) => {
            let inner = match graph.as_baumslag_solitar() {
                Some((y, p, q)) => elliptic_bs_witness(p, q, &rv.k0, &rw.k0)?.map(|j| edge_power(graph, y, j)),
                None => match conj_elliptic(rv.start, &rv.k0, rw.start, &rw.k0, graph, bound)? {
                    ConjResult::Conjugate(z) => Some(z.expect("elliptic search returns a witness")),
                    other => return Ok(other),
                },
            };
            match inner {
                Some(z) => z,
                None => return Ok(ConjResult::NotConjugate),
            }
        }
        (n, m) if n == 0 || m == 0 || n != m => return Ok(ConjResult::NotConjugate),
        _ => match conj_hyperbolic(rv, rw, graph)? {
            Some((r, x)) => rotation_witness(rw, r, &x, graph),
            None => return Ok(ConjResult::NotConjugate),
        },
    };
    let z = lift_witness(&cv, &cw, &z, graph);
    if !verify_witness(&z, v, w, graph) {
        return Err(ConjError::WitnessRejected);
    }
    Ok(ConjResult::Conjugate(Some(z)))
}

/// `u · a^x` where `u` is the prefix of `w` through `r` steps: conjugates
/// `v` to `w` when `a^x v a^{−x}` equals the rotation of `w` by `r`.
fn rotation_witness(w: &GFactorization, r: usize, x: &BigInt, graph: &GbsGraph) -> GFactorization {
    let u = w.prefix(r);
    let end = u.end(graph);
    u.concat(&GFactorization::power(end, x.clone()), graph).expect("power at the end vertex")
}

/// `y^j` for `j ≥ 0`, `ȳ^{|j|}` otherwise.
fn edge_power(graph: &GbsGraph, y: EdgeId, j: i64) -> GFactorization {
    let letter = if j >= 0 { y } else { graph.inverse(y) };
    let start = graph.source(letter);
    GFactorization { start, k0: BigInt::zero(), steps: vec![(letter, BigInt::zero()); j.unsigned_abs() as usize] }
}

/// The linear system for `a^x v a^{−x} = w` with `v`, `w` over one path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HypSystem {
    /// `x` is determined; `xs[i]` is the edge group exponent at edge `i+1`.
    Unique { x: ExactRational, xs: Vec<ExactRational> },
    /// The closing identity fails.
    Inconsistent,
    /// Solutions are `x = z/M` with `z ≡ c_i mod d_i` for all congruences.
    Congruences { modulus: BigInt, congruences: Vec<(BigInt, BigInt)> },
}

impl HypSystem {
    /// The integer solution of least absolute value, if any.
    pub fn solve(&self) -> Option<BigInt> {
        match self {
            HypSystem::Inconsistent => None,
            HypSystem::Unique { x, xs } => {
                if xs.iter().all(ExactRational::is_integer) {
                    x.to_integer()
                } else {
                    None
                }
            }
            HypSystem::Congruences { modulus, congruences } => {
                let (r, m) = crt_solve(congruences)?;
                let lower = &r - &m;
                let z = if lower.abs() < r.abs() { lower } else { r };
                let (x, rem) = z.div_rem(modulus);
                debug_assert!(rem.is_zero());
                Some(x)
            }
        }
    }
}

fn same_path(v: &GFactorization, w: &GFactorization) -> bool {
    v.start == w.start && v.len() == w.len() && v.steps.iter().zip(&w.steps).all(|(a, b)| a.0 == b.0)
}

fn rational(n: &BigInt) -> ExactRational {
    ExactRational::from(n.clone())
}

fn ratio(a: &BigInt, b: &BigInt) -> ExactRational {
    ExactRational::new(a.clone(), b.clone()).expect("labels are nonzero")
}

/// Sets up `x_i = A_i x + B_i`, where `x_i` is the exponent of the edge
/// group element carried across edge `i`, and the closing equation.
pub fn hyperbolic_system(v: &GFactorization, w: &GFactorization, graph: &GbsGraph) -> Result<HypSystem, ConjError> {
    let n = v.len();
    if n == 0 || !same_path(v, w) || !v.k0.is_zero() || !w.k0.is_zero() {
        return Err(ConjError::Precondition);
    }
    let alpha = |i: usize| graph.alpha(v.edge(i));
    let beta = |i: usize| graph.beta(v.edge(i));
    let diff = |i: usize| rational(&(v.exponent(i) - w.exponent(i)));
    let mut a = vec![ratio(&BigInt::one(), alpha(1))];
    let mut b = vec![ExactRational::zero()];
    for i in 1..n {
        let inv_next = ratio(&BigInt::one(), alpha(i + 1));
        a.push(a[i - 1].clone() * rational(beta(i)) * inv_next.clone());
        b.push((diff(i) + rational(beta(i)) * b[i - 1].clone()) * inv_next);
    }
    let coefficient = ExactRational::one() - rational(beta(n)) * a[n - 1].clone();
    let rhs = diff(n) + rational(beta(n)) * b[n - 1].clone();
    if !coefficient.is_zero() {
        let x = ExactRational::new(rhs.num() * coefficient.den(), rhs.den() * coefficient.num()).expect("nonzero");
        let xs = a.iter().zip(&b).map(|(ai, bi)| ai.clone() * x.clone() + bi.clone()).collect();
        return Ok(HypSystem::Unique { x, xs });
    }
    if !rhs.is_zero() {
        return Ok(HypSystem::Inconsistent);
    }
    // x + B_i/A_i ∈ (1/A_i)ℤ for every i, and x ∈ ℤ
    let shifts: Vec<ExactRational> = a
        .iter()
        .zip(&b)
        .map(|(ai, bi)| ExactRational::zero() - bi.clone() * ai.recip().expect("A_i is nonzero"))
        .collect();
    let periods: Vec<ExactRational> = a.iter().map(|ai| ai.recip().expect("A_i is nonzero")).collect();
    let mut modulus = BigInt::one();
    for q in shifts.iter().chain(&periods) {
        modulus *= q.den().abs();
    }
    let scale = |q: &ExactRational| q.num() * &modulus / q.den();
    let mut congruences = vec![(BigInt::zero(), modulus.clone())];
    for (s, p) in shifts.iter().zip(&periods) {
        congruences.push((scale(s), scale(p).abs()));
    }
    let primes = graph.prime_set()?;
    if !crt_solvable(&congruences, &primes)? {
        return Ok(HypSystem::Inconsistent);
    }
    Ok(HypSystem::Congruences { modulus, congruences })
}

/// Finds `x` with `a^x v a^{−x} = w` for cyclically reduced hyperbolic
/// words with the same edge sequence.
pub fn solve_aligned(v: &GFactorization, w: &GFactorization, graph: &GbsGraph) -> Result<Option<BigInt>, ConjError> {
    Ok(hyperbolic_system(v, w, graph)?.solve())
}

/// Tries every rotation of `w` whose edge sequence matches `v`; returns
/// the first rotation `r` and `x` with `a^x v a^{−x} = rotate(w, r)`.
pub fn conj_hyperbolic(
    v: &GFactorization,
    w: &GFactorization,
    graph: &GbsGraph,
) -> Result<Option<(usize, BigInt)>, ConjError> {
    let n = v.len();
    if n == 0 || w.len() != n || !v.k0.is_zero() || !w.k0.is_zero() {
        return Err(ConjError::Precondition);
    }
    for r in 0..n {
        let wr = w.rotate(r, graph);
        if !same_path(v, &wr) {
            continue;
        }
        if let Some(x) = solve_aligned(v, &wr, graph)? {
            return Ok(Some((r, x)));
        }
    }
    Ok(None)
}

/// `a^k ∼ a^ℓ` in `BS(p, q) = ⟨a, y | y a^p y⁻¹ = a^q⟩`.
pub fn conj_elliptic_bs(p: &BigInt, q: &BigInt, k: &BigInt, l: &BigInt) -> Result<bool, ConjError> {
    Ok(elliptic_bs_witness(p, q, k, l)?.is_some())
}

/// The exponent `j` with `y^j a^k y^{−j} = a^ℓ`, if one exists.
pub fn elliptic_bs_witness(p: &BigInt, q: &BigInt, k: &BigInt, l: &BigInt) -> Result<Option<i64>, ConjError> {
    if p.is_zero() || q.is_zero() {
        return Err(ConjError::ZeroLabel);
    }
    if k == l {
        return Ok(Some(0));
    }
    if k.is_zero() || l.is_zero() {
        return Ok(None);
    }
    // k (q/p)^j = ℓ with k ∈ pℤ, ℓ ∈ qℤ for j > 0; swap roles for j < 0
    if let Some(j) = bs_search(p, q, k, l) {
        return Ok(Some(j));
    }
    Ok(bs_search(q, p, k, l).map(|j| -j))
}

fn bs_search(p: &BigInt, q: &BigInt, k: &BigInt, l: &BigInt) -> Option<i64> {
    if !k.is_multiple_of(p) || !l.is_multiple_of(q) {
        return None;
    }
    let (ap, aq) = (p.abs(), q.abs());
    let top = k.abs().max(l.abs());
    let limit: u64 = if ap == aq {
        2
    } else {
        // |j| ≤ log_{r} max(|k|, |ℓ|) + 1 with r = max(|q/p|, |p/q|)
        let (hi, lo) = if aq > ap { (&aq, &ap) } else { (&ap, &aq) };
        let r = (log2(hi) - log2(lo)).max(f64::MIN_POSITIVE);
        (log2(&top) / r).floor() as u64 + 1
    };
    let (mut lhs, mut rhs) = (k.clone(), l.clone());
    for j in 1..=limit {
        lhs *= q;
        rhs *= p;
        if lhs == rhs {
            return Some(j as i64);
        }
        // |k q^j| / |ℓ p^j| moves monotonically; stop once it passes 1
        if ap != aq && ((aq > ap && lhs.abs() > rhs.abs()) || (aq < ap && lhs.abs() < rhs.abs())) {
            return None;
        }
    }
    None
}

fn log2(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 52 {
        return (n.abs().iter_u64_digits().next().unwrap_or(0) as f64).log2();
    }
    let shift = bits - 52;
    let top = (n.abs() >> shift).iter_u64_digits().next().unwrap_or(0) as f64;
    top.log2() + shift as f64
}

/// `a^k ∼ b^ℓ` for vertices `a`, `b`, via the monoid of exponent vectors.
pub fn conj_elliptic(
    a: VertexId,
    k: &BigInt,
    b: VertexId,
    l: &BigInt,
    graph: &GbsGraph,
    bound: Option<u64>,
) -> Result<ConjResult, ConjError> {
    let v = GFactorization::power(a, k.clone());
    let w = GFactorization::power(b, l.clone());
    if k.is_zero() && l.is_zero() {
        // both are the identity; any path from b to a conjugates
        let path = crate::gog::spanning_tree(graph)
            .map(|t| t.path(graph, b, a))
            .unwrap_or_default();
        let steps = path.into_iter().map(|e| (e, BigInt::zero())).collect();
        return Ok(ConjResult::Conjugate(Some(GFactorization { start: b, k0: BigInt::zero(), steps })));
    }
    if k.is_zero() || l.is_zero() {
        return Ok(ConjResult::NotConjugate);
    }
    let gm = gbs_to_monoid(graph)?;
    let (rk, e) = gm.encode(a, k)?;
    let (rl, f) = gm.encode(b, l)?;
    if rk != rl {
        return Ok(ConjResult::NotConjugate);
    }
    match congruent(&e, &f, &gm.presentation, bound)? {
        CongResult::Congruent(path) => {
            let z = gm.conjugator(graph, a, &path);
            if !verify_witness(&z, &v, &w, graph) {
                return Err(ConjError::WitnessRejected);
            }
            Ok(ConjResult::Conjugate(Some(z)))
        }
        CongResult::NotCongruent => Ok(ConjResult::NotConjugate),
        CongResult::Unknown(reason) => Ok(ConjResult::Unknown(reason.to_string())),
    }
}

/// Outcome of the brute-force oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BruteOutcome {
    /// A conjugator, verified by naive reduction.
    Found(GFactorization),
    /// The whole finite search space was enumerated without success.
    Exhausted,
    /// Nothing found within the radius.
    Inconclusive,
}

fn naive_trivial(f: &GFactorization, graph: &GbsGraph) -> bool {
    britton_reduce_naive(f, graph).is_empty()
}

/// Brute-force conjugacy: hyperbolic inputs try every rotation and every
/// `x ∈ [−radius, radius]`; elliptic inputs search single-edge
/// conjugations over exponents bounded by `radius`.
pub fn conj_brute(
    v: &GFactorization,
    w: &GFactorization,
    graph: &GbsGraph,
    radius: u64,
) -> Result<BruteOutcome, ConjError> {
    v.require_closed(graph)?;
    w.require_closed(graph)?;
    let naive: Reducer = britton_reduce_naive;
    let cv = cyclic_form_with(v, graph, naive)?;
    let cw = cyclic_form_with(w, graph, naive)?;
    let found = match (cv.word.len(), cw.word.len()) {
        (0, 0) => match elliptic_orbit_search(&cv.word, &cw.word, graph, radius) {
            BruteOutcome::Found(z) => z,
            other => return Ok(other),
        },
        (n, m) if n == m => match hyperbolic_scan(&cv.word, &cw.word, graph, radius) {
            Some(z) => z,
            None => return Ok(BruteOutcome::Inconclusive),
        },
        _ => return Ok(BruteOutcome::Inconclusive),
    };
    let z = lift_witness(&cv, &cw, &found, graph);
    let q = conjugation_word(&z, v, w, graph).ok_or(ConjError::WitnessRejected)?;
    if !naive_trivial(&q, graph) {
        return Err(ConjError::WitnessRejected);
    }
    Ok(BruteOutcome::Found(z))
}

fn hyperbolic_scan(v: &GFactorization, w: &GFactorization, graph: &GbsGraph, radius: u64) -> Option<GFactorization> {
    let n = v.len();
    let radius = radius as i64;
    let path = reduced_path(v, graph);
    for r in 0..n {
        let wr = w.rotate(r, graph);
        // every rewriting rule cancels an adjacent pair in the edge path,
        // so a trivial word needs freely equal edge paths
        if path != reduced_path(&wr, graph) {
            continue;
        }
        // a^x v a^{−x} w_r⁻¹ with the two powers patched in per x
        let Ok(template) = v.concat(&wr.invert(graph), graph) else {
            continue;
        };
        for x in (0..=radius).flat_map(|t| if t == 0 { vec![0] } else { vec![t, -t] }) {
            let mut q = template.clone();
            q.k0 += x;
            q.steps[n - 1].1 -= x;
            if naive_trivial(&q, graph) {
                return Some(rotation_witness(w, r, &BigInt::from(x), graph));
            }
        }
    }
    None
}

fn reduced_path(f: &GFactorization, graph: &GbsGraph) -> Vec<EdgeId> {
    let mut out: Vec<EdgeId> = Vec::with_capacity(f.len());
    for &(e, _) in &f.steps {
        if out.last() == Some(&graph.inverse(e)) {
            out.pop();
        } else {
            out.push(e);
        }
    }
    out
}

/// States `(vertex, exponent)` reachable by `c ↦ y c ȳ` moves: from
/// `(τ(y), βt)` to `(ι(y), αt)`, conjugating by `y`.
type State = (VertexId, BigInt);

fn elliptic_orbit_search(v: &GFactorization, w: &GFactorization, graph: &GbsGraph, radius: u64) -> BruteOutcome {
    let target = (w.start, w.k0.clone());
    let start = (v.start, v.k0.clone());
    if start == target {
        return BruteOutcome::Found(GFactorization::identity(v.start));
    }
    let limit = BigInt::from(radius);
    let mut parent: HashMap<State, Option<(EdgeId, State)>> = HashMap::new();
    parent.insert(start.clone(), None);
    let mut queue = VecDeque::from([start]);
    let mut truncated = false;
    while let Some((u, k)) = queue.pop_front() {
        for y in graph.edge_ids().filter(|&y| graph.target(y) == u) {
            if !k.is_multiple_of(graph.beta(y)) {
                continue;
            }
            let next = (graph.source(y), &k / graph.beta(y) * graph.alpha(y));
            if next.1.abs() > limit {
                truncated = true;
                continue;
            }
            if parent.contains_key(&next) {
                continue;
            }
            parent.insert(next.clone(), Some((y, (u, k.clone()))));
            if next == target {
                // z = y_m ⋯ y_1, a path from the target vertex back to the start
                let mut z = GFactorization::identity(target.0);
                let mut at = target.clone();
                while let Some(Some((y, prev))) = parent.get(&at) {
                    z = z
                        .concat(&GFactorization { start: graph.source(*y), k0: BigInt::zero(), steps: vec![(*y, BigInt::zero())] }, graph)
                        .expect("edges chain");
                    at = prev.clone();
                }
                return BruteOutcome::Found(z);
            }
            queue.push_back(next);
        }
    }
    if truncated {
        BruteOutcome::Inconclusive
    } else {
        BruteOutcome::Exhausted
    }
}

/// All exponents `ℓ` with `a^k ∼ a^ℓ` reachable by single-edge
/// conjugations within `radius`, and whether the search was complete.
pub fn elliptic_orbit(graph: &GbsGraph, a: VertexId, k: &BigInt, radius: u64) -> (Vec<(VertexId, BigInt)>, bool) {
    let limit = BigInt::from(radius);
    let start = (a, k.clone());
    let mut seen = vec![start.clone()];
    let mut index: HashSet<State> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    let mut complete = true;
    while let Some((u, k)) = queue.pop_front() {
        for y in graph.edge_ids().filter(|&y| graph.target(y) == u) {
            if !k.is_multiple_of(graph.beta(y)) {
                continue;
            }
            let next = (graph.source(y), &k / graph.beta(y) * graph.alpha(y));
            if next.1.abs() > limit {
                complete = false;
                continue;
            }
            if index.insert(next.clone()) {
                seen.push(next.clone());
                queue.push_back(next);
            }
        }
    }
    (seen, complete)
}

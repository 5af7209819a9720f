//! Congruences of finitely presented commutative monoids, and the two
//! translations between monoid congruence and elliptic GBS conjugacy.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::arith::{factor_over, ArithError, FactoredInt, PrimeSet};
use crate::gog::{orientation, EdgeId, EdgeSpec, GFactorization, GbsGraph, GraphError, VertexId};

/// Exponent vector: prime part first, then (for GBS queries) vertex part.
pub type ExpVec = Vec<u64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonoidError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("malformed vector `{0}`")]
    Vector(String),
    #[error("not normalized: {0}")]
    Normalization(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Relations `r_i ~ s_i` over `ℕ^dim`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonPresentation {
    pub dim: usize,
    pub relations: Vec<(ExpVec, ExpVec)>,
}

pub fn parse_vector(text: &str) -> Result<ExpVec, MonoidError> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|s| {
            let s = s.trim();
            if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
                return Err(MonoidError::Vector(text.to_string()));
            }
            s.parse::<u64>().map_err(|_| MonoidError::Vector(text.to_string()))
        })
        .collect()
}

pub fn vector_to_string(v: &[u64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl MonPresentation {
    pub fn new(dim: usize, relations: Vec<(ExpVec, ExpVec)>) -> Result<Self, MonoidError> {
        for (r, s) in &relations {
            for side in [r, s] {
                if side.len() != dim {
                    return Err(MonoidError::DimensionMismatch { expected: dim, found: side.len() });
                }
            }
        }
        Ok(Self { dim, relations })
    }

    /// Parses `dim <m>` followed by `rel <r> ~ <s>` lines; `#` comments.
    pub fn parse(text: &str) -> Result<Self, MonoidError> {
        let mut dim = None;
        let mut relations = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let err = |msg: String| MonoidError::Parse { line, msg };
            if let Some(rest) = body.strip_prefix("dim") {
                if dim.is_some() {
                    return Err(err("duplicate `dim`".into()));
                }
                dim = Some(rest.trim().parse::<usize>().map_err(|_| err(format!("malformed dimension `{}`", rest.trim())))?);
            } else if let Some(rest) = body.strip_prefix("rel") {
                let m = dim.ok_or_else(|| err("`rel` before `dim`".into()))?;
                let (r, s) = rest.split_once('~').ok_or_else(|| err("expected `rel <r> ~ <s>`".into()))?;
                let (r, s) = (parse_vector(r).map_err(|e| err(e.to_string()))?, parse_vector(s).map_err(|e| err(e.to_string()))?);
                for side in [&r, &s] {
                    if side.len() != m {
                        return Err(err(format!("expected {m} entries, found {}", side.len())));
                    }
                }
                relations.push((r, s));
            } else {
                return Err(err(format!("unknown directive `{body}`")));
            }
        }
        let dim = dim.ok_or(MonoidError::Parse { line: 0, msg: "missing `dim`".into() })?;
        Self::new(dim, relations)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("dim {}\n", self.dim);
        for (r, s) in &self.relations {
            out.push_str(&format!("rel {} ~ {}\n", vector_to_string(r), vector_to_string(s)));
        }
        out
    }

    /// Sum of the 1-norms of all relation sides.
    pub fn total_norm(&self) -> u64 {
        self.relations.iter().map(|(r, s)| r.iter().chain(s).sum::<u64>()).sum()
    }

    pub fn default_bound(&self, e: &[u64], f: &[u64]) -> u64 {
        let top = e.iter().chain(f).copied().max().unwrap_or(0);
        top + 16 * (1 + self.total_norm())
    }
}

/// One relation application, repeated `times` times. Forward subtracts
/// `r` and adds `s`; backward subtracts `s` and adds `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Step {
    pub relation: usize,
    pub forward: bool,
    pub times: u64,
}

impl Step {
    fn inverse(self) -> Self {
        Self { forward: !self.forward, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnknownReason {
    /// Some state would exceed the coordinate bound.
    BoundReached,
    /// The search visited too many states.
    StateBudget,
    /// The closure was enumerated only modulo relations whose reduction
    /// could not be shown lossless.
    Incomplete,
}

impl fmt::Display for UnknownReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnknownReason::BoundReached => write!(f, "coordinate bound reached"),
            UnknownReason::StateBudget => write!(f, "state budget exhausted"),
            UnknownReason::Incomplete => write!(f, "closure not provably complete"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CongResult {
    Congruent(Vec<Step>),
    NotCongruent,
    Unknown(UnknownReason),
}

/// Applies `path` to `start`, checking that every subtraction fits.
pub fn replay(start: &[u64], path: &[Step], pres: &MonPresentation) -> Option<ExpVec> {
    let mut v = start.to_vec();
    for step in path {
        let (r, s) = pres.relations.get(step.relation)?;
        let (sub, add) = if step.forward { (r, s) } else { (s, r) };
        if step.times == 0 {
            continue;
        }
        for d in 0..v.len() {
            let (x, a, b) = (v[d] as i128, sub[d] as i128, add[d] as i128);
            let t = step.times as i128;
            // the tightest application is the first one or the last one
            let lowest = x.min(x + (t - 1) * (b - a));
            if lowest < a {
                return None;
            }
            v[d] = u64::try_from(x + t * (b - a)).ok()?;
        }
    }
    Some(v)
}

const MAX_STATES: usize = 1 << 18;

/// A relation `big ~ base` with `big = base + period·e_coord`.
#[derive(Debug, Clone)]
struct Periodic {
    relation: usize,
    coord: usize,
    period: u64,
    base: ExpVec,
    /// Direction that subtracts `big`.
    reducing_forward: bool,
}

struct Engine<'a> {
    pres: &'a MonPresentation,
    bound: u64,
    periodic: Vec<Periodic>,
    moves: Vec<usize>,
    /// Reduction along periodic relations might not be lossless.
    presentation_incomplete: bool,
}

#[derive(Default)]
struct Side {
    states: Vec<ExpVec>,
    parent: Vec<Option<(usize, Vec<Step>)>>,
    index: HashMap<ExpVec, usize>,
    frontier: Vec<usize>,
    cap_hit: bool,
    incomplete: bool,
    exhausted: bool,
}

impl Side {
    fn new(root: ExpVec) -> Self {
        let mut side = Side::default();
        side.index.insert(root.clone(), 0);
        side.states.push(root);
        side.parent.push(None);
        side.frontier.push(0);
        side
    }

    /// Steps from the root to state `i`.
    fn path_to(&self, mut i: usize) -> Vec<Step> {
        let mut chunks = Vec::new();
        while let Some((p, steps)) = &self.parent[i] {
            chunks.push(steps.clone());
            i = *p;
        }
        chunks.into_iter().rev().flatten().collect()
    }
}

fn fits(sub: &[u64], v: &[u64]) -> bool {
    sub.iter().zip(v).all(|(a, b)| a <= b)
}

fn invert_path(path: &[Step]) -> Vec<Step> {
    path.iter().rev().map(|s| s.inverse()).collect()
}

impl<'a> Engine<'a> {
    fn new(pres: &'a MonPresentation, bound: u64) -> Self {
        let mut periodic = Vec::new();
        let mut moves = Vec::new();
        for (j, (r, s)) in pres.relations.iter().enumerate() {
            if r == s {
                continue;
            }
            let diff: Vec<i128> = r.iter().zip(s).map(|(a, b)| *a as i128 - *b as i128).collect();
            let support: Vec<usize> = (0..diff.len()).filter(|&d| diff[d] != 0).collect();
            if let [coord] = support[..] {
                let (base, reducing_forward) = if diff[coord] > 0 { (s.clone(), true) } else { (r.clone(), false) };
                periodic.push(Periodic { relation: j, coord, period: diff[coord].unsigned_abs() as u64, base, reducing_forward });
            } else {
                moves.push(j);
            }
        }
        // a base touching another periodic coordinate breaks independence of the reductions
        let presentation_incomplete = periodic
            .iter()
            .any(|p| periodic.iter().any(|q| q.coord != p.coord && p.base[q.coord] > 0));
        Self { pres, bound, periodic, moves, presentation_incomplete }
    }

    /// The periodic relation used on `coord` at `v`: applicable ones with the
    /// smallest base entry on `coord`. Flags differing periods.
    fn periodic_at(&self, v: &[u64], coord: usize, incomplete: &mut bool) -> Option<&Periodic> {
        let mut chosen: Option<&Periodic> = None;
        for p in self.periodic.iter().filter(|p| p.coord == coord && fits(&p.base, v)) {
            match chosen {
                None => chosen = Some(p),
                Some(c) => {
                    if c.period != p.period {
                        *incomplete = true;
                    }
                    if p.base[coord] < c.base[coord] {
                        chosen = Some(p);
                    }
                }
            }
        }
        chosen
    }

    fn periodic_coords(&self) -> Vec<usize> {
        let mut coords: Vec<usize> = self.periodic.iter().map(|p| p.coord).collect();
        coords.sort_unstable();
        coords.dedup();
        coords
    }

    fn canonicalize(&self, v: &mut ExpVec, steps: &mut Vec<Step>, incomplete: &mut bool) {
        for coord in self.periodic_coords() {
            if let Some(p) = self.periodic_at(v, coord, incomplete) {
                let floor = p.base[coord];
                if v[coord] >= floor + p.period {
                    let times = (v[coord] - floor) / p.period;
                    v[coord] -= times * p.period;
                    steps.push(Step { relation: p.relation, forward: p.reducing_forward, times });
                }
            }
        }
    }

    fn canonical(&self, v: &[u64], incomplete: &mut bool) -> (ExpVec, Vec<Step>) {
        let mut v = v.to_vec();
        let mut steps = Vec::new();
        self.canonicalize(&mut v, &mut steps, incomplete);
        (v, steps)
    }

    /// All moves from a canonical state, each with its step sequence.
    fn successors(&self, z: &[u64], side: &mut Side) -> Vec<(ExpVec, Vec<Step>)> {
        let mut out = Vec::new();
        let coords = self.periodic_coords();
        let mut active: Vec<(usize, u64)> = Vec::new();
        for &coord in &coords {
            if let Some(p) = self.periodic_at(z, coord, &mut side.incomplete) {
                active.push((coord, p.period));
            }
        }
        for &j in &self.moves {
            let (r, s) = &self.pres.relations[j];
            for forward in [true, false] {
                let (sub, add) = if forward { (r, s) } else { (s, r) };
                let mut lifted = z.to_vec();
                let mut steps = Vec::new();
                let mut ok = true;
                for d in 0..lifted.len() {
                    if sub[d] <= lifted[d] {
                        continue;
                    }
                    let Some(p) = self.periodic_at(z, d, &mut side.incomplete) else {
                        ok = false;
                        break;
                    };
                    let times = (sub[d] - lifted[d]).div_ceil(p.period);
                    lifted[d] += times * p.period;
                    if lifted[d] > self.bound {
                        side.cap_hit = true;
                        ok = false;
                        break;
                    }
                    steps.push(Step { relation: p.relation, forward: !p.reducing_forward, times });
                }
                if !ok {
                    continue;
                }
                let next: ExpVec = lifted.iter().zip(sub).zip(add).map(|((v, a), b)| v - a + b).collect();
                if next.iter().any(|&x| x > self.bound) {
                    side.cap_hit = true;
                    continue;
                }
                // surplus periods on an active coordinate must stay absorbable
                for &(coord, period) in &active {
                    let absorbed = self
                        .periodic
                        .iter()
                        .any(|q| q.coord == coord && period % q.period == 0 && fits(&q.base, &next));
                    if !absorbed {
                        side.incomplete = true;
                    }
                }
                steps.push(Step { relation: j, forward, times: 1 });
                let mut next = next;
                self.canonicalize(&mut next, &mut steps, &mut side.incomplete);
                out.push((next, steps));
            }
        }
        out
    }

    fn definitive(&self, side: &Side) -> bool {
        !side.cap_hit && !side.incomplete && !self.presentation_incomplete
    }

    fn run(&self, e: &[u64], f: &[u64]) -> CongResult {
        if e == f {
            return CongResult::Congruent(Vec::new());
        }
        let mut flag = false;
        let (ce, init_e) = self.canonical(e, &mut flag);
        let (cf, init_f) = self.canonical(f, &mut flag);
        let join = |to_meet_e: Vec<Step>, from_meet_f: Vec<Step>| {
            let mut path = init_e.clone();
            path.extend(to_meet_e);
            path.extend(from_meet_f);
            path.extend(invert_path(&init_f));
            CongResult::Congruent(path)
        };
        if ce == cf {
            return join(Vec::new(), Vec::new());
        }
        let mut sides = [Side::new(ce), Side::new(cf)];
        sides[0].incomplete = flag;
        sides[1].incomplete = flag;
        loop {
            let total = sides[0].states.len() + sides[1].states.len();
            if total > MAX_STATES {
                return CongResult::Unknown(UnknownReason::StateBudget);
            }
            let pick = match (sides[0].exhausted, sides[1].exhausted) {
                (true, true) => {
                    let reason = if sides.iter().any(|s| s.cap_hit) {
                        UnknownReason::BoundReached
                    } else {
                        UnknownReason::Incomplete
                    };
                    return CongResult::Unknown(reason);
                }
                (true, false) => 1,
                (false, true) => 0,
                (false, false) => usize::from(sides[1].frontier.len() < sides[0].frontier.len()),
            };
            let other = 1 - pick;
            let frontier = std::mem::take(&mut sides[pick].frontier);
            let mut next_frontier = Vec::new();
            for idx in frontier {
                let z = sides[pick].states[idx].clone();
                let succ = self.successors(&z, &mut sides[pick]);
                for (state, steps) in succ {
                    if sides[pick].index.contains_key(&state) {
                        continue;
                    }
                    if let Some(&meet) = sides[other].index.get(&state) {
                        let mut here = sides[pick].path_to(idx);
                        here.extend(steps);
                        let there = sides[other].path_to(meet);
                        return if pick == 0 { join(here, invert_path(&there)) } else { join(there, invert_path(&here)) };
                    }
                    let new_idx = sides[pick].states.len();
                    sides[pick].index.insert(state.clone(), new_idx);
                    sides[pick].states.push(state);
                    sides[pick].parent.push(Some((idx, steps)));
                    next_frontier.push(new_idx);
                }
            }
            sides[pick].frontier = next_frontier;
            if sides[pick].frontier.is_empty() {
                if self.definitive(&sides[pick]) {
                    return CongResult::NotCongruent;
                }
                sides[pick].exhausted = true;
            }
        }
    }
}

/// Decides `e ~ f` by bidirectional search over the closure, with
/// coordinates capped at `bound` (a default is derived when absent).
pub fn congruent(e: &[u64], f: &[u64], pres: &MonPresentation, bound: Option<u64>) -> Result<CongResult, MonoidError> {
    for v in [e, f] {
        if v.len() != pres.dim {
            return Err(MonoidError::DimensionMismatch { expected: pres.dim, found: v.len() });
        }
    }
    let bound = bound.unwrap_or_else(|| pres.default_bound(e, f));
    Ok(Engine::new(pres, bound).run(e, f))
}

/// The monoid attached to a GBS graph: coordinates are `−1`, the primes of
/// all `α_y`, then one unit per vertex.
#[derive(Debug, Clone)]
pub struct GbsMonoid {
    pub presentation: MonPresentation,
    pub primes: PrimeSet,
    /// Edge behind each relation; `None` for the sign relations.
    pub edge_of_relation: Vec<Option<EdgeId>>,
}

impl GbsMonoid {
    pub fn vertex_coord(&self, v: VertexId) -> usize {
        self.primes.len() + v.0
    }

    /// `(residual, exponent vector)` of `a^k` for `k ≠ 0`.
    pub fn encode(&self, v: VertexId, k: &BigInt) -> Result<(BigInt, ExpVec), ArithError> {
        let FactoredInt { residual, exps } = factor_over(k, &self.primes)?;
        let mut vec = exps;
        vec.resize(self.presentation.dim, 0);
        vec[self.vertex_coord(v)] = 1;
        Ok((residual, vec))
    }

    /// The conjugator accumulated along a relation path, from the end state
    /// back to the start: each step conjugates by one edge letter.
    pub fn conjugator(&self, graph: &GbsGraph, start: VertexId, path: &[Step]) -> GFactorization {
        let mut z = GFactorization::identity(start);
        for step in path {
            let Some(y) = self.edge_of_relation[step.relation] else {
                continue;
            };
            // subtracting the α side moves a^{αt} at ι(y) to b^{βt} at τ(y) via ȳ
            let letter = if step.forward { graph.inverse(y) } else { y };
            for _ in 0..step.times {
                let hop = GFactorization { start: graph.source(letter), k0: BigInt::zero(), steps: vec![(letter, BigInt::zero())] };
                z = hop.concat(&z, graph).expect("relation path follows edges");
            }
        }
        z
    }
}

fn exps_of(k: &BigInt, primes: &PrimeSet) -> Result<Vec<u64>, ArithError> {
    let f = factor_over(k, primes)?;
    if !f.residual.is_one() {
        return Err(ArithError::ModulusOutsidePrimeSet(k.clone()));
    }
    Ok(f.exps)
}

/// One relation per inverse pair `(vec(α_y) + u_ι(y)) ~ (vec(β_y) + u_τ(y))`
/// and one sign relation `(2·u₋₁ + u_a) ~ u_a` per vertex.
pub fn gbs_to_monoid(graph: &GbsGraph) -> Result<GbsMonoid, MonoidError> {
    let report = graph.validate();
    if !report.is_valid() {
        return Err(GraphError::Invalid(report).into());
    }
    let primes = graph.prime_set()?;
    let m = primes.len();
    let dim = m + graph.vertex_count();
    let mut relations = Vec::new();
    let mut edge_of_relation = Vec::new();
    for &y in orientation(graph).members() {
        let mut r = exps_of(graph.alpha(y), &primes)?;
        let mut s = exps_of(graph.beta(y), &primes)?;
        r.resize(dim, 0);
        s.resize(dim, 0);
        r[m + graph.source(y).0] += 1;
        s[m + graph.target(y).0] += 1;
        relations.push((r, s));
        edge_of_relation.push(Some(y));
    }
    for v in graph.vertex_ids() {
        let mut r = vec![0; dim];
        r[0] = 2;
        r[m + v.0] = 1;
        let mut s = vec![0; dim];
        s[m + v.0] = 1;
        relations.push((r, s));
        edge_of_relation.push(None);
    }
    Ok(GbsMonoid { presentation: MonPresentation::new(dim, relations)?, primes, edge_of_relation })
}

/// The first `m` primes.
pub fn first_primes(m: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(m);
    let mut n = 2u64;
    while out.len() < m {
        if out.iter().all(|p| !n.is_multiple_of(*p)) {
            out.push(n);
        }
        n += 1;
    }
    out
}

fn check_normalized(v: &[u64], what: &str) -> Result<(), MonoidError> {
    if v.iter().any(|&x| x > 2) {
        return Err(MonoidError::Normalization(format!("{what} has an entry above 2")));
    }
    if v.iter().filter(|&&x| x != 0).count() > 4 {
        return Err(MonoidError::Normalization(format!("{what} has more than four nonzero entries")));
    }
    Ok(())
}

fn prime_power(primes: &[u64], v: &[u64]) -> BigInt {
    primes.iter().zip(v).fold(BigInt::one(), |acc, (p, e)| acc * BigInt::from(*p).pow(*e as u32))
}

/// A one-vertex GBS graph with an edge pair per relation
/// (`α = ∏ p^r`, `β = ∏ p^s`) and the query `a^k` vs `a^ℓ`.
pub fn monoid_to_gbs(
    pres: &MonPresentation,
    e: &[u64],
    f: &[u64],
) -> Result<(GbsGraph, GFactorization, GFactorization), MonoidError> {
    for v in [e, f] {
        if v.len() != pres.dim {
            return Err(MonoidError::DimensionMismatch { expected: pres.dim, found: v.len() });
        }
    }
    for (i, (r, s)) in pres.relations.iter().enumerate() {
        check_normalized(r, &format!("relation {} left side", i + 1))?;
        check_normalized(s, &format!("relation {} right side", i + 1))?;
    }
    check_normalized(e, "e")?;
    check_normalized(f, "f")?;
    let primes = first_primes(pres.dim);
    let mut edges = Vec::new();
    for (i, (r, s)) in pres.relations.iter().enumerate() {
        let (alpha, beta) = (prime_power(&primes, r), prime_power(&primes, s));
        let (y, yb) = (format!("y{}", i + 1), format!("Y{}", i + 1));
        edges.push(EdgeSpec {
            name: y.clone(),
            source: "a".into(),
            target: "a".into(),
            alpha: alpha.clone(),
            beta: beta.clone(),
            inverse: yb.clone(),
        });
        edges.push(EdgeSpec { name: yb, source: "a".into(), target: "a".into(), alpha: beta, beta: alpha, inverse: y });
    }
    let graph = GbsGraph::new(vec!["a".into()], edges)?;
    let a = VertexId(0);
    let k = GFactorization::power(a, prime_power(&primes, e));
    let l = GFactorization::power(a, prime_power(&primes, f));
    Ok((graph, k, l))
}

//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on
//! any failure.

use std::collections::HashSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use gbs::arith::{crt_solvable, PrimeSet};
use gbs::britton::{
    britton_reduce_fast, britton_reduce_naive, color, cyclic_form, cyclic_form_with, equal_in_group,
    is_britton_reduced, sim_c, word_problem,
};
use gbs::commonoid::{congruent, monoid_to_gbs, replay, CongResult, ExpVec, MonPresentation};
use gbs::conjugacy::{
    conj_brute, conj_elliptic, conj_elliptic_bs, conj_hyperbolic, conjugate, elliptic_orbit, verify_witness,
    BruteOutcome, ConjResult,
};
use gbs::freegrp::{free_reduce_classes, free_reduce_stack, FLetter, FreeClasses};
use gbs::gen::{random_conjugator, random_graph, random_hyperbolic, random_word, GenParams};
use gbs::gog::{parse_factorization, parse_graph, GFactorization, GbsGraph};
use num_bigint::{BigInt, RandBigInt};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn decided(r: &ConjResult) -> Option<bool> {
    match r {
        ConjResult::Conjugate(_) => Some(true),
        ConjResult::NotConjugate => Some(false),
        ConjResult::Unknown(_) => None,
    }
}

fn worked_example() -> Outcome {
    let start = Instant::now();
    let g = parse_graph("bs 2 3").unwrap();
    let w = parse_factorization("y a y a Y a^3 y a Y a Y y a^2 Y", &g).unwrap();
    let (table, cw) = color(&w, &g);
    let mut parts = table.classes.clone();
    parts.sort();
    check(parts == vec![vec![1, 7], vec![2], vec![3], vec![4], vec![5], vec![6, 8]], || format!("partition {parts:?}"))?;
    let pair = |i: usize| table.inverse[table.class_of[i]].map(|c| table.classes[c].clone());
    check(pair(1) == Some(vec![6, 8]) && pair(2) == Some(vec![5]) && pair(3) == Some(vec![4]), || "inverse classes".into())?;
    let expected: Vec<FLetter> = [(1, 1), (2, 1), (3, 1), (3, -1), (2, -1), (1, -1), (1, 1), (1, -1)]
        .into_iter()
        .map(|(c, s)| FLetter::new(c, s))
        .collect();
    check(cw == expected, || "color word".into())?;
    check(sim_c(&w, &g, 3, 4).unwrap() && !sim_c(&w, &g, 2, 3).unwrap(), || "sim_c".into())?;
    check(!word_problem(&w, &g).unwrap(), || "word problem".into())?;
    let fast = britton_reduce_fast(&w, &g);
    let naive = britton_reduce_naive(&w, &g);
    let a15 = GFactorization::power(w.start, BigInt::from(15));
    check(fast == a15 && naive == a15, || format!("reductions {} / {}", fast.display(&g), naive.display(&g)))?;
    let t = start.elapsed();
    check(t < Duration::from_secs(1), || format!("took {t:?}"))?;
    Ok(format!("partition, color word, sim_c, a^15 ({t:.2?})"))
}

fn corpus(seed: u64, count: usize) -> Vec<(GbsGraph, GFactorization)> {
    let mut rng = StdRng::seed_from_u64(seed);
    let params = GenParams::default();
    (0..count)
        .map(|_| {
            let g = random_graph(&mut rng, &params);
            let w = random_word(&mut rng, &g, &params);
            (g, w)
        })
        .collect()
}

fn word_problem_oracle() -> Outcome {
    let start = Instant::now();
    let mut trivial = 0;
    for (g, w) in corpus(1001, 10_000) {
        let expected = britton_reduce_naive(&w, &g).is_empty();
        check(word_problem(&w, &g).unwrap() == expected, || format!("{}\n{}", g.to_text(), w.display(&g)))?;
        trivial += usize::from(expected);
    }
    let t = start.elapsed();
    check(t < Duration::from_secs(120), || format!("took {t:?}"))?;
    Ok(format!("10000/10000 agree, {trivial} trivial ({t:.2?})"))
}

fn reduction_oracle() -> Outcome {
    let start = Instant::now();
    for (g, w) in corpus(1001, 10_000) {
        let fast = britton_reduce_fast(&w, &g);
        let naive = britton_reduce_naive(&w, &g);
        let shown = || format!("{}\n{}", g.to_text(), w.display(&g));
        check(is_britton_reduced(&fast, &g), shown)?;
        check(equal_in_group(&fast, &naive, &g).unwrap(), shown)?;
    }
    Ok(format!("10000/10000 reduced and equal ({:.2?})", start.elapsed()))
}

fn free_reduction() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(1004);
    for _ in 0..10_000 {
        let alphabet = rng.gen_range(1..=8);
        let len = rng.gen_range(0..=64);
        let w: Vec<FLetter> = (0..len)
            .map(|_| FLetter::new(rng.gen_range(0..alphabet), if rng.gen_bool(0.5) { 1 } else { -1 }))
            .collect();
        check(free_reduce_classes(&w) == free_reduce_stack(&w), || format!("{w:?}"))?;
        FreeClasses::new(&w).check_invariants().map_err(|e| format!("{e}: {w:?}"))?;
    }
    Ok(format!("10000/10000 identical, invariants hold ({:.2?})", start.elapsed()))
}

fn hyperbolic_params() -> GenParams {
    GenParams { max_len: 10, max_exp: 8, ..GenParams::default() }
}

/// `w` with the same edge sequence as a rotation of `v` and fresh exponents.
fn perturbed<R: Rng>(rng: &mut R, g: &GbsGraph, v: &GFactorization) -> GFactorization {
    let mut w = v.rotate(rng.gen_range(0..v.len()), g);
    w.k0 = BigInt::from(0);
    for step in &mut w.steps {
        if rng.gen_bool(0.5) {
            step.1 += rng.gen_range(-3i64..=3);
        }
    }
    cyclic_form(&w, g).unwrap().word
}

/// Compares solver and brute force on one pair; returns whether brute
/// force found a witness.
fn compare_hyperbolic(g: &GbsGraph, v: &GFactorization, w: &GFactorization, radius: u64) -> Result<bool, String> {
    let shown = || format!("{}\n{}\n{}", g.to_text(), v.display(g), w.display(g));
    let solver = conjugate(v, w, g, None).map_err(|e| format!("{e}: {}", shown()))?;
    if let Some(z) = solver.witness() {
        check(verify_witness(z, v, w, g), shown)?;
    }
    let brute = conj_brute(v, w, g, radius).map_err(|e| format!("{e}: {}", shown()))?;
    let found = matches!(brute, BruteOutcome::Found(_));
    if found {
        check(solver.is_conjugate(), shown)?;
    }
    // the solver's exponent on the brute-force cyclic forms is exact
    let naive = britton_reduce_naive;
    let cv = cyclic_form_with(v, g, naive).unwrap().word;
    let cw = cyclic_form_with(w, g, naive).unwrap().word;
    if cv.has_edges() && cv.len() == cw.len() {
        if let Some((_, x)) = conj_hyperbolic(&cv, &cw, g).map_err(|e| format!("{e}: {}", shown()))? {
            if x.magnitude() <= &radius.into() {
                check(found, shown)?;
            }
        }
    }
    Ok(found)
}

fn hyperbolic_conjugacy() -> Outcome {
    let start = Instant::now();
    let radius = 1000;
    let params = hyperbolic_params();
    let mut rng = StdRng::seed_from_u64(1005);
    let (mut random, mut random_found) = (0, 0);
    while random < 2000 {
        let g = random_graph(&mut rng, &params);
        let Some(v) = random_hyperbolic(&mut rng, &g, &params) else { continue };
        let w = if rng.gen_bool(0.5) {
            perturbed(&mut rng, &g, &v)
        } else {
            match random_hyperbolic(&mut rng, &g, &params) {
                Some(w) => w,
                None => continue,
            }
        };
        if !w.has_edges() {
            continue;
        }
        random_found += usize::from(compare_hyperbolic(&g, &v, &w, radius)?);
        random += 1;
    }
    let mut constructed = 0;
    while constructed < 2000 {
        let g = random_graph(&mut rng, &params);
        let Some(v) = random_hyperbolic(&mut rng, &g, &params) else { continue };
        let z = random_conjugator(&mut rng, &g, v.start, 6, params.max_exp);
        let w = z.concat(&v, &g).unwrap().concat(&z.invert(&g), &g).unwrap();
        let shown = || format!("{}\n{}\n{}", g.to_text(), v.display(&g), w.display(&g));
        let r = conjugate(&v, &w, &g, None).map_err(|e| format!("{e}: {}", shown()))?;
        check(r.witness().is_some_and(|z| verify_witness(z, &v, &w, &g)), shown)?;
        compare_hyperbolic(&g, &v, &w, radius)?;
        constructed += 1;
    }
    Ok(format!(
        "2000 random ({random_found} brute-force witnesses) and 2000 constructed pairs agree ({:.2?})",
        start.elapsed()
    ))
}

fn elliptic_bs() -> Outcome {
    let start = Instant::now();
    let radius = 1_000_000;
    let labels: Vec<i64> = (-4..=4).filter(|&x| x != 0).collect();
    let mut total = 0u64;
    let mut conj_pairs = 0u64;
    for &p in &labels {
        for &q in &labels {
            let g = GbsGraph::baumslag_solitar(p.into(), q.into());
            let a = g.vertex_ids().next().unwrap();
            let (pb, qb) = (BigInt::from(p), BigInt::from(q));
            for k in -200i64..=200 {
                // the chain search from a^k, shared by every ℓ
                let (orbit, _) = elliptic_orbit(&g, a, &BigInt::from(k), radius);
                let reach: HashSet<BigInt> = orbit.into_iter().map(|(_, e)| e).collect();
                for l in -200i64..=200 {
                    let lb = BigInt::from(l);
                    let fast = conj_elliptic_bs(&pb, &qb, &BigInt::from(k), &lb).unwrap();
                    let brute = reach.contains(&lb);
                    check(fast == brute, || format!("BS({p},{q}) k={k} l={l}: formula {fast}, chain search {brute}"))?;
                    total += 1;
                    conj_pairs += u64::from(fast);
                }
            }
        }
    }
    Ok(format!("{total}/{total} agree, {conj_pairs} conjugate ({:.2?})", start.elapsed()))
}

fn crt() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(1007);
    let primes = PrimeSet::new(vec![2.into(), 3.into(), 5.into()]).unwrap();
    let mut solvable = 0;
    let mut done = 0;
    while done < 5000 {
        let count = rng.gen_range(1..=6);
        let moduli: Vec<i64> = (0..count)
            .map(|_| 2i64.pow(rng.gen_range(0..=6)) * 3i64.pow(rng.gen_range(0..=4)) * 5i64.pow(rng.gen_range(0..=3)))
            .collect();
        let lcm = moduli.iter().fold(1i64, |acc, &d| num_integer::lcm(acc, d));
        if lcm > 1_000_000 {
            continue;
        }
        let system: Vec<(i64, i64)> = moduli
            .iter()
            .map(|&d| (rng.gen_range(-2 * d..=2 * d), if rng.gen_bool(0.5) { d } else { -d }))
            .collect();
        let big: Vec<(BigInt, BigInt)> = system.iter().map(|&(c, d)| (c.into(), d.into())).collect();
        let fast = crt_solvable(&big, &primes).unwrap();
        // scan one full period, stepping through the first congruence class
        let (c0, d0) = (system[0].0, system[0].1.abs());
        let brute = (0..lcm / d0)
            .map(|t| c0.rem_euclid(d0) + t * d0)
            .any(|x| system.iter().all(|&(c, d)| (x - c).rem_euclid(d.abs()) == 0));
        check(fast == brute, || format!("{system:?}: fast {fast}, scan {brute}"))?;
        solvable += usize::from(brute);
        done += 1;
    }
    Ok(format!("5000/5000 agree, {solvable} solvable ({:.2?})", start.elapsed()))
}

fn vector<R: Rng>(rng: &mut R, m: usize, max: u64) -> ExpVec {
    (0..m).map(|_| rng.gen_range(0..=max)).collect()
}

fn presentation<R: Rng>(rng: &mut R) -> MonPresentation {
    let m = rng.gen_range(1..=3);
    let n = rng.gen_range(0..=3);
    let relations = (0..n).map(|_| (vector(rng, m, 2), vector(rng, m, 2))).collect();
    MonPresentation::new(m, relations).unwrap()
}

fn round_trips() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(1008);
    let mut both = 0;
    for _ in 0..200 {
        let p = presentation(&mut rng);
        let e = vector(&mut rng, p.dim, 2);
        let f = vector(&mut rng, p.dim, 2);
        let (graph, k, l) = monoid_to_gbs(&p, &e, &f).unwrap();
        let mon = match congruent(&e, &f, &p, None).unwrap() {
            CongResult::Congruent(_) => Some(true),
            CongResult::NotCongruent => Some(false),
            CongResult::Unknown(_) => None,
        };
        let grp = decided(&conjugate(&k, &l, &graph, None).unwrap());
        if let (Some(a), Some(b)) = (mon, grp) {
            check(a == b, || format!("{}{e:?} {f:?}: monoid {a}, group {b}", p.to_text()))?;
            both += 1;
        }
    }
    let params = GenParams { max_vertices: 3, max_edge_pairs: 3, max_label: 4, ..GenParams::default() };
    let mut brute_decided = 0;
    for _ in 0..200 {
        let g = random_graph(&mut rng, &params);
        let vs: Vec<_> = g.vertex_ids().collect();
        let (a, b) = (vs[rng.gen_range(0..vs.len())], vs[rng.gen_range(0..vs.len())]);
        let k = BigInt::from(rng.gen_range(-30i64..=30));
        let l = BigInt::from(rng.gen_range(-30i64..=30));
        let v = GFactorization::power(a, k.clone());
        let w = GFactorization::power(b, l.clone());
        let solver = conj_elliptic(a, &k, b, &l, &g, None).unwrap();
        if let Some(z) = solver.witness() {
            check(verify_witness(z, &v, &w, &g), || format!("{}\n{k} {l}", g.to_text()))?;
        }
        let brute = match conj_brute(&v, &w, &g, 1_000_000).unwrap() {
            BruteOutcome::Found(_) => Some(true),
            BruteOutcome::Exhausted => Some(false),
            BruteOutcome::Inconclusive => None,
        };
        if let Some(b) = brute {
            brute_decided += 1;
            if let Some(s) = decided(&solver) {
                check(s == b, || format!("{}\n{k} {l}: solver {s}, brute force {b}", g.to_text()))?;
            }
        }
    }
    Ok(format!(
        "{both}/200 presentations decided by both, {brute_decided}/200 elliptic pairs decided by brute force ({:.2?})",
        start.elapsed()
    ))
}

fn peak_rss_mib() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kib: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kib / 1024)
}

fn scale() -> Outcome {
    let g = parse_graph("bs 2 3").unwrap();
    let a = g.vertex_ids().next().unwrap();
    let y = g.edge_by_name("y").unwrap();
    let ybar = g.inverse(y);
    let mut rng = StdRng::seed_from_u64(1009);
    let mut report = Vec::new();
    for (n, bits) in [(1000usize, 256u64), (100, 4096)] {
        let steps: Vec<_> = (0..n)
            .map(|_| (if rng.gen_bool(0.5) { y } else { ybar }, rng.gen_bigint(bits)))
            .collect();
        let random = GFactorization { start: a, k0: rng.gen_bigint(bits), steps };
        // u·u⁻¹ is trivial and makes every edge pair interact
        let half = GFactorization { start: a, k0: random.k0.clone(), steps: random.steps[..n / 2].to_vec() };
        let trivial = half.concat(&half.invert(&g), &g).unwrap();
        for (word, expected) in [(&random, None), (&trivial, Some(true))] {
            let start = Instant::now();
            let answer = word_problem(word, &g).unwrap();
            let t = start.elapsed();
            check(t < Duration::from_secs(30), || format!("n={n}, {bits}-bit: took {t:?}"))?;
            if let Some(e) = expected {
                check(answer == e, || format!("n={n}, {bits}-bit: wrong answer"))?;
            }
            report.push(format!("n={n}/{bits}-bit {t:.2?}"));
        }
    }
    let rss = peak_rss_mib();
    if let Some(mib) = rss {
        check(mib < 2048, || format!("peak memory {mib} MiB"))?;
    }
    Ok(format!("{}; peak memory {} MiB", report.join(", "), rss.map_or("?".into(), |m| m.to_string())))
}

fn translation_invariance() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(1010);
    let mut checked = 0;
    let mut tries = 0;
    while checked < 100 {
        tries += 1;
        check(tries < 100_000, || "too few congruent instances".into())?;
        let p = presentation(&mut rng);
        let e = vector(&mut rng, p.dim, 3);
        let f = vector(&mut rng, p.dim, 3);
        let bound = p.default_bound(&e, &f);
        let CongResult::Congruent(path) = congruent(&e, &f, &p, Some(bound)).unwrap() else { continue };
        let g = vector(&mut rng, p.dim, 5);
        let shift = |v: &[u64]| v.iter().zip(&g).map(|(a, b)| a + b).collect::<ExpVec>();
        let (eg, fg) = (shift(&e), shift(&f));
        let raised = bound + g.iter().copied().max().unwrap_or(0);
        let shown = || format!("{}{e:?} {f:?} + {g:?}", p.to_text());
        check(matches!(congruent(&eg, &fg, &p, Some(raised)).unwrap(), CongResult::Congruent(_)), shown)?;
        check(replay(&eg, &path, &p).as_ref() == Some(&fg), shown)?;
        checked += 1;
    }
    Ok(format!("100/100 translated witnesses replay ({:.2?})", start.elapsed()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("worked BS(2,3) example", worked_example),
        ("word problem vs naive oracle", word_problem_oracle),
        ("fast vs naive Britton reduction", reduction_oracle),
        ("free reduction by classes", free_reduction),
        ("hyperbolic conjugacy vs brute force", hyperbolic_conjugacy),
        ("elliptic BS formula vs chain search", elliptic_bs),
        ("CRT solvability vs scan", crt),
        ("monoid and GBS round trips", round_trips),
        ("scale and performance", scale),
        ("translation invariance", translation_invariance),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

use gbs::britton::{britton_reduce_fast, britton_reduce_naive, cyclic_form_with};
use gbs::conjugacy::{
    conj_brute, conj_elliptic, conj_elliptic_bs, conj_hyperbolic, conjugate, verify_witness, BruteOutcome, ConjResult,
};
use gbs::gen::{random_conjugator, random_graph, random_hyperbolic, random_word, GenParams};
use gbs::gog::{GFactorization, GbsGraph};
use num_bigint::BigInt;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn small() -> GenParams {
    GenParams { max_len: 8, max_exp: 6, ..GenParams::default() }
}

fn conjugated<R: Rng>(rng: &mut R, g: &GbsGraph, v: &GFactorization) -> GFactorization {
    let z = random_conjugator(rng, g, v.start, 6, 6);
    let w = z.concat(v, g).unwrap().concat(&z.invert(g), g).unwrap();
    britton_reduce_fast(&w, g)
}

fn decided(r: &ConjResult) -> Option<bool> {
    match r {
        ConjResult::Conjugate(_) => Some(true),
        ConjResult::NotConjugate => Some(false),
        ConjResult::Unknown(_) => None,
    }
}

#[test]
fn constructed_conjugates_are_found_with_verified_witnesses() {
    let mut rng = StdRng::seed_from_u64(21);
    for _ in 0..400 {
        let g = random_graph(&mut rng, &small());
        let v = random_word(&mut rng, &g, &small());
        let w = conjugated(&mut rng, &g, &v);
        let r = conjugate(&v, &w, &g, None).unwrap();
        match &r {
            ConjResult::Conjugate(Some(z)) => assert!(verify_witness(z, &v, &w, &g)),
            ConjResult::Unknown(m) => assert!(!cyclic_form_with(&v, &g, britton_reduce_naive).unwrap().word.has_edges(), "{m}"),
            other => panic!("{other:?}\n{}\n{}\n{}", g.to_text(), v.display(&g), w.display(&g)),
        }
    }
}

#[test]
fn verdicts_are_symmetric_and_invariant() {
    let mut rng = StdRng::seed_from_u64(22);
    for _ in 0..300 {
        let g = random_graph(&mut rng, &small());
        let v = random_word(&mut rng, &g, &small());
        let w = if rng.gen_bool(0.5) { conjugated(&mut rng, &g, &v) } else { random_word(&mut rng, &g, &small()) };
        let base = decided(&conjugate(&v, &w, &g, None).unwrap());
        let back = decided(&conjugate(&w, &v, &g, None).unwrap());
        if let (Some(a), Some(b)) = (base, back) {
            assert_eq!(a, b, "{}\n{}\n{}", g.to_text(), v.display(&g), w.display(&g));
        }
        let r = rng.gen_range(0..=v.len());
        let rotated = v.rotate(r, &g);
        let moved = conjugated(&mut rng, &g, &v);
        for other in [rotated, moved] {
            if let (Some(a), Some(b)) = (base, decided(&conjugate(&other, &w, &g, None).unwrap())) {
                assert_eq!(a, b, "{}\n{}\n{}", g.to_text(), other.display(&g), w.display(&g));
            }
        }
    }
}

#[test]
fn hyperbolic_verdicts_agree_with_brute_force() {
    let mut rng = StdRng::seed_from_u64(23);
    let radius = 200;
    let mut found = 0;
    for i in 0..300 {
        let g = random_graph(&mut rng, &small());
        let Some(v) = random_hyperbolic(&mut rng, &g, &small()) else { continue };
        let w = if i % 2 == 0 {
            conjugated(&mut rng, &g, &v)
        } else {
            match random_hyperbolic(&mut rng, &g, &small()) {
                Some(w) => w,
                None => continue,
            }
        };
        let solver = conjugate(&v, &w, &g, None).unwrap();
        let brute = conj_brute(&v, &w, &g, radius).unwrap();
        if let BruteOutcome::Found(z) = &brute {
            found += 1;
            assert!(verify_witness(z, &v, &w, &g));
            assert!(solver.is_conjugate(), "{}\n{}\n{}", g.to_text(), v.display(&g), w.display(&g));
        }
        let cv = cyclic_form_with(&v, &g, britton_reduce_naive).unwrap().word;
        let cw = cyclic_form_with(&w, &g, britton_reduce_naive).unwrap().word;
        if cv.len() == cw.len() && cv.has_edges() {
            if let Some((_, x)) = conj_hyperbolic(&cv, &cw, &g).unwrap() {
                if x.magnitude() <= &radius.into() {
                    assert!(matches!(brute, BruteOutcome::Found(_)), "{}\n{}\n{}", g.to_text(), v.display(&g), w.display(&g));
                }
            }
        }
    }
    assert!(found > 50, "only {found} brute-force witnesses");
}

#[test]
fn bs_formula_agrees_with_orbit_search() {
    for p in [-3i64, -2, 2, 3, 4] {
        for q in [-4i64, -1, 1, 2, 3] {
            let g = GbsGraph::baumslag_solitar(p.into(), q.into());
            let a = g.vertex_ids().next().unwrap();
            for k in -40i64..=40 {
                for l in [-27i64, -9, -4, 0, 1, 6, 8, 12, 27, 36] {
                    let fast = conj_elliptic_bs(&p.into(), &q.into(), &k.into(), &l.into()).unwrap();
                    let v = GFactorization::power(a, BigInt::from(k));
                    let w = GFactorization::power(a, BigInt::from(l));
                    match conj_brute(&v, &w, &g, 100_000).unwrap() {
                        BruteOutcome::Found(_) => assert!(fast, "BS({p},{q}) {k} {l}"),
                        BruteOutcome::Exhausted => assert!(!fast, "BS({p},{q}) {k} {l}"),
                        BruteOutcome::Inconclusive => {}
                    }
                }
            }
        }
    }
}

#[test]
fn monoid_elliptic_agrees_with_orbit_search() {
    let mut rng = StdRng::seed_from_u64(24);
    let params = GenParams { max_vertices: 3, max_edge_pairs: 3, max_label: 4, ..GenParams::default() };
    let mut decided_count = 0;
    for _ in 0..200 {
        let g = random_graph(&mut rng, &params);
        let vs: Vec<_> = g.vertex_ids().collect();
        let (a, b) = (vs[rng.gen_range(0..vs.len())], vs[rng.gen_range(0..vs.len())]);
        let k = BigInt::from(rng.gen_range(-24i64..=24));
        let l = BigInt::from(rng.gen_range(-24i64..=24));
        let v = GFactorization::power(a, k.clone());
        let w = GFactorization::power(b, l.clone());
        let solver = conj_elliptic(a, &k, b, &l, &g, None).unwrap();
        let brute = conj_brute(&v, &w, &g, 100_000).unwrap();
        match (&brute, decided(&solver)) {
            (BruteOutcome::Found(_), Some(s)) => {
                assert!(s, "{}\n{k} {l}", g.to_text());
                decided_count += 1;
            }
            (BruteOutcome::Exhausted, Some(s)) => {
                assert!(!s, "{}\n{k} {l}", g.to_text());
                decided_count += 1;
            }
            _ => {}
        }
        if let ConjResult::Conjugate(Some(z)) = &solver {
            assert!(verify_witness(z, &v, &w, &g));
        }
    }
    assert!(decided_count > 100, "only {decided_count} decided");
}

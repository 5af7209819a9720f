//! Seeded oracle cross-checks with an optional timing report.

use std::time::{Duration, Instant};

use clap::Args;
use gbs::britton::{britton_reduce_fast, britton_reduce_naive, equal_in_group, is_britton_reduced, word_problem};
use gbs::conjugacy::{conj_brute, conjugate, verify_witness, BruteOutcome, ConjResult};
use gbs::gen::{random_conjugator, random_graph, random_word, GenParams};
use rand::rngs::StdRng;
use rand::SeedableRng;

const BRUTE_RADIUS: u64 = 100;

#[derive(Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, default_value_t = 4)]
    max_vertices: usize,
    /// Maximum number of edge pairs.
    #[arg(long, default_value_t = 6)]
    max_edges: usize,
    #[arg(long, default_value_t = 5)]
    max_label: i64,
    #[arg(long, default_value_t = 8)]
    max_exp: i64,
    #[arg(long, default_value_t = 14)]
    max_len: usize,
    /// Append timing percentiles; these vary between runs.
    #[arg(long)]
    timing: bool,
}

#[derive(Default)]
struct Tally {
    agree: usize,
    undecided: usize,
    times: Vec<Duration>,
}

impl Tally {
    fn line(&self, name: &str, count: usize) -> String {
        let mut s = format!("{name}: {}/{count} agree", self.agree);
        if self.undecided > 0 {
            s.push_str(&format!(", {} undecided", self.undecided));
        }
        s
    }

    fn percentiles(&mut self, name: &str) -> String {
        self.times.sort_unstable();
        let pick = |q: f64| {
            let i = ((self.times.len() as f64 - 1.0) * q).round() as usize;
            self.times.get(i).copied().unwrap_or_default()
        };
        format!("{name} time: p50 {:.1?}, p90 {:.1?}, max {:.1?}", pick(0.5), pick(0.9), pick(1.0))
    }
}

fn timed<T>(times: &mut Vec<Duration>, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    times.push(start.elapsed());
    out
}

/// Runs the cross-checks and prints the report; exit code 1 on any
/// disagreement.
pub fn run(args: &BenchArgs) -> u8 {
    let params = GenParams {
        max_vertices: args.max_vertices.max(1),
        max_edge_pairs: args.max_edges.max(1),
        max_label: args.max_label.max(1),
        max_len: args.max_len,
        max_exp: args.max_exp.max(0),
    };
    let mut rng = StdRng::seed_from_u64(args.seed);
    let (mut wp, mut red, mut conj) = (Tally::default(), Tally::default(), Tally::default());
    for _ in 0..args.count {
        let g = random_graph(&mut rng, &params);
        let w = random_word(&mut rng, &g, &params);

        let naive = britton_reduce_naive(&w, &g);
        let fast_wp = timed(&mut wp.times, || word_problem(&w, &g));
        wp.agree += usize::from(fast_wp == Ok(naive.is_empty()));

        let fast = timed(&mut red.times, || britton_reduce_fast(&w, &g));
        red.agree += usize::from(is_britton_reduced(&fast, &g) && equal_in_group(&fast, &naive, &g) == Ok(true));

        let z = random_conjugator(&mut rng, &g, w.start, 4, params.max_exp);
        let v = z.concat(&w, &g).and_then(|p| p.concat(&z.invert(&g), &g)).expect("conjugator ends at the base");
        let verdict = timed(&mut conj.times, || conjugate(&v, &w, &g, None));
        match verdict {
            Ok(ConjResult::Conjugate(Some(c))) if verify_witness(&c, &v, &w, &g) => conj.agree += 1,
            Ok(ConjResult::Unknown(_)) => {
                // undecided is acceptable only where brute force cannot decide either
                match conj_brute(&v, &w, &g, BRUTE_RADIUS) {
                    Ok(BruteOutcome::Found(_)) => {}
                    _ => conj.undecided += 1,
                }
            }
            _ => {}
        }
    }
    let n = args.count;
    println!("seed: {}", args.seed);
    println!("instances: {n}");
    println!("{}", wp.line("word problem", n));
    println!("{}", red.line("reduction", n));
    println!("{}", conj.line("conjugacy", n));
    if args.timing {
        println!("{}", wp.percentiles("word problem"));
        println!("{}", red.percentiles("reduction"));
        println!("{}", conj.percentiles("conjugacy"));
    }
    let ok = wp.agree == n && red.agree == n && conj.agree + conj.undecided == n;
    if ok {
        0
    } else {
        1
    }
}

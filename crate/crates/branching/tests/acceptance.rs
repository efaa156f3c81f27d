//! One PASS/FAIL line per acceptance criterion.
//!
//! Criteria listed in `KNOWN_FAILURES` fail for reasons recorded in the decisions
//! ledger; any other failure makes this binary exit nonzero.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use branching::chains::{
    ballot_chain, constant_up_chain, edge_ratios, ergodic_ratios, fib_walk, motzkin_chain, root_return_marginal,
    verify_centrality, AuxWalk, BallotChain, ChainModel, FibWalk, MotzkinChain, TreeWalk,
};
use branching::fusscat::{
    bracket_dim, bracket_dim_derooted, bracket_level, bracket_level_derooted, critical_point, g_eval,
    increment_mean, lln_limit, power_coeff_by_convolution, raney,
};
use branching::graphs::{
    bsharp_graph, bsharp_witness, fc_tree, graphs_isomorphic_up_to, motzkin_graph, pascalize, semi_pascal, EndSpec,
    LeveledGraph, Word,
};
use branching::montecarlo::{empirical_return_probability, lln_experiment, recurrence_probe, su2_moment};
use branching::paths::{
    catalan, count_ballot, count_motzkin, enumerate_paths, motzkin_number, LatticePoint, StepSet,
};
use branching::{Algebraic, CountInt, Rational, Scalar};
use num_bigint::BigUint;

const KNOWN_FAILURES: [u32; 2] = [6, 11];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn q(a: i64, b: i64) -> Rational {
    Rational::new(a.into(), b.into())
}

/// Path count by walking every path one step at a time.
fn brute_count(len: u64, from: i64, to: i64, steps: &[i64]) -> u64 {
    if len == 0 {
        return u64::from(from == to);
    }
    if (from - to).unsigned_abs() > len {
        return 0;
    }
    steps
        .iter()
        .filter(|&&d| from + d >= 0)
        .map(|&d| brute_count(len - 1, from + d, to, steps))
        .sum()
}

fn criterion_1() -> Outcome {
    let mut checked = 0;
    for len in 0..=12u64 {
        for b in 0..=12u64 {
            for d in 0..=12u64 {
                let (from, to) = (LatticePoint::new(3, b), LatticePoint::new(3 + len, d));
                let ballot = count_ballot(from, to).unwrap();
                let motz = count_motzkin(from, to).unwrap();
                if ballot != brute_count(len, b as i64, d as i64, &[1, -1]).into()
                    || motz != brute_count(len, b as i64, d as i64, &[1, 0, -1]).into()
                {
                    return outcome(false, format!("mismatch at ({},{b}) -> ({},{d})", 3, 3 + len));
                }
                if len <= 8 {
                    let listed = enumerate_paths(from, to, StepSet::Motzkin, 1 << 16).unwrap().len();
                    if BigUint::from(listed) != motz {
                        return outcome(false, format!("enumeration mismatch at b={b}, d={d}, len={len}"));
                    }
                }
                checked += 1;
            }
        }
    }
    outcome(true, format!("{checked} endpoint pairs, both step sets"))
}

fn criterion_2() -> Outcome {
    let sp = semi_pascal(12).dim_square_sums();
    let mz = motzkin_graph(12).dim_square_sums();
    let ok_sp = sp.iter().enumerate().all(|(n, s)| *s == catalan(n as u64));
    let ok_mz = mz.iter().enumerate().all(|(n, s)| *s == motzkin_number(2 * n as u64));
    outcome(ok_sp && ok_mz, format!("levels 0..=12: semi-Pascal {ok_sp}, Motzkin {ok_mz}"))
}

fn words_up_to(start: Word, max_len: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let mut stack = vec![start];
    while let Some(w) = stack.pop() {
        if w.len() < max_len {
            stack.extend(w.children());
        }
        out.push(w);
    }
    out
}

fn dim_at(g: &LeveledGraph, dims: &[Vec<CountInt>], level: usize, key: &str) -> CountInt {
    g.index_of(level, key).map(|i| dims[level][i].clone()).unwrap_or_default()
}

fn criterion_3() -> Outcome {
    let mut checked = 0;
    for s in [2u32, 3] {
        for derooted in [false, true] {
            let g = pascalize(&fc_tree(s, derooted, 16).unwrap()).unwrap();
            let dims = g.dims_from_root();
            let start = if derooted { Word::root(s).children().remove(0) } else { Word::root(s) };
            for w in words_up_to(start, 6) {
                for n in 0..=8u64 {
                    let (level, dim) = if derooted {
                        (bracket_level_derooted(n, w.len()), bracket_dim_derooted(s, n, &w))
                    } else {
                        (bracket_level(n, w.len()), bracket_dim(s, n, &w))
                    };
                    let Ok(dim) = dim else { continue };
                    let oracle = dim_at(&g, &dims, level as usize, &w.key());
                    if dim != oracle {
                        return outcome(
                            false,
                            format!("s={s} derooted={derooted} w={} n={n}: {dim} vs {oracle}", w.key()),
                        );
                    }
                    checked += 1;
                }
            }
        }
    }
    outcome(true, format!("{checked} (s, w, n) cases"))
}

fn criterion_4() -> Outcome {
    for s in [2u32, 3] {
        for l in 1..=4u64 {
            for n in 0..=30u64 {
                let closed = raney(s, l, n).unwrap();
                let conv = power_coeff_by_convolution(s, l, n).unwrap();
                if closed != conv {
                    return outcome(false, format!("s={s} l={l} n={n}: {closed} vs {conv}"));
                }
            }
        }
    }
    outcome(true, "s in {2,3}, l <= 4, n <= 30")
}

fn criterion_5() -> Outcome {
    let mut worst = 0.0f64;
    for s in [2u32, 3] {
        let crit: f64 = critical_point(s);
        for i in 0..1000 {
            let z = crit * i as f64 / 999.0;
            worst = worst.max(g_eval::<f64>(s, z).unwrap().residual.abs());
        }
    }
    let g2 = g_eval::<f64>(2, 4.0 / 27.0).unwrap().value;
    let g3 = g_eval::<f64>(3, 27.0 / 256.0).unwrap().value;
    let pass = worst <= 1e-12 && (g2 - 1.5).abs() <= 1e-9 && (g3 - 4.0 / 3.0).abs() <= 1e-9;
    outcome(pass, format!("max residual {worst:.1e}, G2(4/27) = {g2}, G3(27/256) = {g3}"))
}

fn exact_central<S: Scalar>(chain: &ChainModel<S>) -> bool {
    let r = verify_centrality(chain, 10, 0.0);
    r.pass && r.exact && r.max_spread == 0.0
}

fn criterion_6() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for l in [q(1, 2), q(3, 5), q(3, 4), q(1, 1)] {
        if !exact_central(&ballot_chain(l.clone(), 10).unwrap()) {
            pass = false;
            notes.push(format!("ballot {l} not central"));
        }
    }
    let grid = [(q(0, 1), q(0, 1)), (q(1, 2), q(0, 1)), (q(1, 1), q(0, 1)), (q(1, 3), q(1, 3)), (q(1, 2), q(1, 2))];
    let mut motz_ok = 0;
    for (l1, l2) in grid {
        match motzkin_chain(l1.clone(), l2.clone(), 10) {
            Ok(c) if exact_central(&c) => motz_ok += 1,
            Ok(_) => notes.push(format!("motzkin ({l1},{l2}) not central")),
            Err(e) => notes.push(format!("motzkin ({l1},{l2}): {e}")),
        }
    }
    if motz_ok < 5 {
        pass = false;
    }
    let ends = [EndSpec::top_ray(2), EndSpec::parse(2, "2:12").unwrap()];
    for end in &ends {
        for (num, den) in [(0, 1), (1, 20), (4, 27)] {
            let eta = q(num, den);
            let ok = if num == 1 {
                exact_central(&fib_walk(end, Algebraic::rational(eta), false, 10).unwrap())
            } else {
                exact_central(&fib_walk(end, eta, false, 10).unwrap())
            };
            if !ok {
                pass = false;
                notes.push(format!("fib {} eta={num}/{den} not central", end.describe()));
            }
        }
    }
    let control = verify_centrality(&constant_up_chain(q(7, 10), 10).unwrap(), 10, 0.0);
    if control.pass {
        pass = false;
        notes.push("control chain passed".into());
    }
    notes.insert(0, format!("ballot 4/4, motzkin {motz_ok}/5, fib ends 6/6 unless noted, control fails"));
    outcome(pass, notes.join("; "))
}

fn max_crossing_deviation(walk: &dyn TreeWalk<f64>, depth: usize, skip_root: bool) -> f64 {
    let eta = *walk.eta();
    let start = walk.start().len();
    let mut worst = 0.0f64;
    let mut stack = vec![walk.start()];
    while let Some(v) = stack.pop() {
        if v.len() >= depth + start {
            continue;
        }
        for (w, p) in walk.moves(&v).unwrap() {
            if w.len() < v.len() {
                continue;
            }
            if !(skip_root && v.len() == start) {
                let back = walk.moves(&w).unwrap().into_iter().find(|(x, _)| *x == v).unwrap().1;
                worst = worst.max((p * back - eta).abs());
            }
            stack.push(w);
        }
    }
    worst
}

fn criterion_7() -> Outcome {
    let mut worst = 0.0f64;
    for end in [EndSpec::top_ray(2), EndSpec::parse(2, "2:12").unwrap()] {
        for eta in [0.05, 0.1, 4.0 / 27.0] {
            for derooted in [false, true] {
                let walk = FibWalk::new(end.clone(), eta, derooted, 22).unwrap();
                worst = worst.max(max_crossing_deviation(&walk, 20, false));
            }
        }
    }
    let mut aux_worst = 0.0f64;
    for eta in [0.05, 0.1, 4.0 / 27.0] {
        aux_worst = aux_worst.max(max_crossing_deviation(&AuxWalk::new(2, eta).unwrap(), 20, true));
    }
    outcome(
        worst <= 1e-12 && aux_worst <= 1e-12,
        format!("depth 20: fib max deviation {worst:.1e}, aux (off the root) {aux_worst:.1e}"),
    )
}

fn criterion_8() -> Outcome {
    let p = pascalize(&fc_tree(2, true, 12).unwrap()).unwrap();
    let b = bsharp_graph(12);
    let r = graphs_isomorphic_up_to(&p, &b, 12, Some(&bsharp_witness));
    let sizes_ok = r.level_sizes.0[..5] == [1, 2, 4, 7, 12];
    outcome(r.isomorphic && sizes_ok, format!("levels <= 12, sizes {:?}", r.level_sizes.0))
}

fn criterion_9() -> Outcome {
    let grid = [0.1, 0.25, 0.4];
    let mut worst = 0.0f64;
    for &l1 in &grid {
        for &l2 in &grid {
            for n in 0..=8u32 {
                let m = su2_moment(l1, l2, n, 32).unwrap().value;
                let v = root_return_marginal(&l1, &l2, n as usize).unwrap();
                worst = worst.max((m - v).abs());
            }
        }
    }
    // on the curve the chain exists, so compare with its own level marginals too
    let (a, b) = (4.0 / 7.0, 1.0 / 7.0);
    let chain = MotzkinChain::new(a, b, 8).unwrap();
    for n in 0..=8u32 {
        let m = su2_moment(a, b, n, 32).unwrap().value;
        worst = worst.max((m - chain.marginal(n as usize, 0)).abs());
    }
    outcome(worst <= 1e-6, format!("3x3 grid and (4/7,1/7), n <= 8: max difference {worst:.1e}"))
}

fn criterion_10() -> Outcome {
    let end = EndSpec::top_ray(2);
    let mut worst = 0.0f64;
    for (i, eta) in [0.1, 4.0 / 27.0].into_iter().enumerate() {
        for n in 1..=4u64 {
            let r = empirical_return_probability(&end, eta, n, 100_000, 10 + 4 * i as u64 + n).unwrap();
            worst = worst.max(r.sigmas());
        }
    }
    outcome(worst <= 3.0, format!("largest deviation {worst:.2} sigma over 8 cases"))
}

fn criterion_11() -> Outcome {
    let end = EndSpec::top_ray(2);
    let a = lln_experiment(&end, 0.1, 200, 10_000, 11).unwrap();
    let f = lln_limit(0.1).unwrap();
    let rel = (a.mean - f).abs() / f;
    let inc = increment_mean(2, 1, 0.1).unwrap();
    let rel_inc = (a.mean - inc).abs() / inc;
    let crit = lln_experiment(&end, 4.0 / 27.0, 400, 10_000, 12).unwrap();
    let grows = crit.mean > crit.half_mean;
    outcome(
        rel <= 0.05 && grows,
        format!(
            "eta=0.1: mean {:.4} vs 4 eta G'/G = {f:.4} (off by {:.1}%), vs 2 eta G'/G = {inc:.4} (off by {:.2}%); \
             eta=4/27: k=200 mean {:.3}, k=400 mean {:.3}",
            a.mean,
            100.0 * rel,
            100.0 * rel_inc,
            crit.half_mean,
            crit.mean
        ),
    )
}

fn criterion_12() -> Outcome {
    let g = semi_pascal(0);
    let rule = g.rule().as_ref();
    let depth = 2000usize;
    let lambdas = [0.6, 0.75, 0.9];
    let edges = [((1, 1), (2, 2)), ((2, 2), (3, 1)), ((3, 1), (4, 2)), ((4, 2), (5, 3)), ((3, 3), (4, 4))];
    let keys: Vec<(String, String)> =
        edges.iter().map(|&((m, a), (_, b))| (format!("({m},{a})"), format!("({},{b})", m + 1))).collect();
    let pairs: Vec<_> = edges
        .iter()
        .zip(&keys)
        .map(|(&((m, _), _), (v, w))| ((m, v.as_str()), (m + 1, w.as_str())))
        .collect();
    let mut worst = 0.0f64;
    for lambda in lambdas {
        // the tail ends at height about (2 lambda - 1) depth
        let mut h = ((2.0 * lambda - 1.0) * depth as f64).round() as usize;
        if h % 2 != depth % 2 {
            h += 1;
        }
        let omega = format!("({depth},{h})");
        let ratios = edge_ratios(rule, (depth, &omega), &pairs).unwrap();
        let chain = BallotChain::new(lambda).unwrap();
        for (&((_, a), (_, b)), r) in edges.iter().zip(ratios) {
            let up = chain.p_up(a);
            let p = if b > a { up } else { 1.0 - up };
            worst = worst.max((r - p).abs());
        }
    }
    // the multi-tail entry point agrees on one edge
    let tails: Vec<Vec<(usize, String)>> = [(1000, "(1000,500)"), (2000, "(2000,1000)")]
        .iter()
        .map(|(n, k)| vec![(*n, k.to_string())])
        .collect();
    let seq = ergodic_ratios(rule, (1, "(1,1)"), (2, "(2,2)"), &tails).unwrap();
    let p = BallotChain::new(0.75).unwrap().p_up(1);
    worst = worst.max((seq[1][0] - p).abs());
    outcome(worst <= 1e-3, format!("lambda in {{0.6, 0.75, 0.9}}, 5 edges, depth 2000: max error {worst:.1e}"))
}

fn criterion_13() -> Outcome {
    let fib = FibWalk::new(EndSpec::top_ray(2), 0.1, false, 10_002).unwrap();
    let aux = AuxWalk::new(2, 0.1).unwrap();
    let f = recurrence_probe(&fib, &[1000, 10_000], 1000, 13).unwrap();
    let a = recurrence_probe(&aux, &[1000, 10_000], 1000, 14).unwrap();
    outcome(
        f.growing_fraction < 0.5 && a.growing_fraction > 0.5,
        format!(
            "fraction still returning after 10^3: fib {:.3}, aux {:.3}; mean returns fib {:?}, aux {:?}",
            f.growing_fraction, a.growing_fraction, f.mean_returns, a.mean_returns
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Outcome, Duration); 13] = [
        (1, "counting oracles", criterion_1, Duration::from_secs(10)),
        (2, "dimension square sums", criterion_2, Duration::from_secs(5)),
        (3, "bracket formulas", criterion_3, Duration::MAX),
        (4, "power coefficients", criterion_4, Duration::MAX),
        (5, "generating function", criterion_5, Duration::MAX),
        (6, "centrality", criterion_6, Duration::MAX),
        (7, "crossing identity", criterion_7, Duration::MAX),
        (8, "B# isomorphism", criterion_8, Duration::MAX),
        (9, "SU(2) moments", criterion_9, Duration::MAX),
        (10, "return probabilities", criterion_10, Duration::from_secs(60)),
        (11, "exit-time LLN", criterion_11, Duration::from_secs(120)),
        (12, "ergodic ratios", criterion_12, Duration::from_secs(10)),
        (13, "transience vs recurrence", criterion_13, Duration::MAX),
    ];
    let mut unexpected = Vec::new();
    for (id, name, run, budget) in criteria {
        let t = Instant::now();
        let mut o = run();
        let took = t.elapsed();
        if took > budget {
            o.pass = false;
            o.detail.push_str(&format!("; over the {}s budget", budget.as_secs()));
        }
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {tag} {name} ({:.1}s): {}", took.as_secs_f64(), o.detail);
        if !o.pass && !KNOWN_FAILURES.contains(&id) {
            unexpected.push(id);
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}

//! Acceptance suite: one pass/fail line per criterion, non-zero exit on failure.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{battery_instance, build};
use expander_ec::inner::{list_decodable_by_search, min_union_support};
use expander_ec::list::{build_inner_lists, find_heavy_edges, heavy_postcondition_holds};
use expander_ec::rational::{from_int, ratio};
use expander_ec::unique::{effective_epsilon, max_guaranteed_erasures};
use expander_ec::{
    affine_equal, list_decode_fast, list_decode_slow, make_code, unique_decode, BipartiteGraph, BitVector,
    DecodeFailure, DecoderParams, ErasurePattern, Rational, RegularGraph, RowBasis, SplitMix64, UniqueResult,
};

const BATTERY_SEED: u64 = 0x5EED_0001;
const ORACLE_INSTANCES: u64 = 600;
const ORACLE_TIME_LIMIT: Duration = Duration::from_secs(300);
const S_CAP: usize = 12;
const UNIQUE_PATTERNS: u64 = 1000;
const UNIQUE_ERASURES: usize = 6;
const TUPLE_SEARCH_DIM_CAP: usize = 5;
const REGIME_INSTANCES: u64 = 240;
const FUZZ_INSTANCES: u64 = 200;
const SCALING_SIZES: [usize; 4] = [1024, 2048, 4096, 8192];
const SCALING_DEGREE: usize = 8;
const SCALING_ERASURE_RATE: f64 = 0.01;
const SCALING_REPEATS: usize = 5;
const SCALING_MAX_RATIO: f64 = 2.0;
const SCALING_TIME_LIMIT: Duration = Duration::from_secs(60);

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

/// Every completed fast decode equals the oracle list; failures are only
/// reported when the oracle list is empty.
fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let (mut completed, mut stuck, mut empty) = (0, 0, 0);
    for i in 0..ORACLE_INSTANCES {
        let inst = battery_instance(BATTERY_SEED, i);
        let params = DecoderParams::new(inst.r, inst.epsilon).unwrap().with_threads(1);
        let oracle = inst.code.oracle_list_decode(&inst.z).unwrap();
        if !oracle.contains(&inst.sent) {
            return Err(format!("oracle misses the sent word on {}", inst.label));
        }
        match list_decode_fast(&inst.code, &inst.z, &params).0 {
            Ok(desc) => {
                completed += 1;
                if !affine_equal(&desc.to_space(), &oracle) {
                    return Err(format!("DIFFER on {}", inst.label));
                }
            }
            Err(DecodeFailure::Stuck) => stuck += 1,
            Err(DecodeFailure::EmptyList | DecodeFailure::Inconsistent) => {
                empty += 1;
                if !oracle.is_empty() {
                    return Err(format!("spurious empty list on {}", inst.label));
                }
            }
            Err(other) => return Err(format!("{other} on {}", inst.label)),
        }
    }
    let elapsed = start.elapsed();
    if elapsed > ORACLE_TIME_LIMIT {
        return Err(format!("took {elapsed:?}, limit {ORACLE_TIME_LIMIT:?}"));
    }
    Ok(format!(
        "{ORACLE_INSTANCES} instances: {completed} completed and equal, {stuck} stuck, {empty} empty; {:.1}s",
        elapsed.as_secs_f64()
    ))
}

fn flagship() -> Outcome {
    let code = build(BipartiteGraph::complete_bipartite(3), "parity:3");
    let z = code.erase(&BitVector::zeros(9), &ErasurePattern::Explicit(vec![0, 1, 3, 4]), 0);
    let mut w = BitVector::zeros(9);
    for e in [0, 1, 3, 4] {
        w.set(e, true);
    }
    let expected = vec![BitVector::zeros(9), w];
    let params = DecoderParams::new(2, ratio(1, 2)).unwrap();
    let fast = list_decode_fast(&code, &z, &params)
        .0
        .map_err(|e| format!("fast: {e}"))?;
    let mut elems = fast.to_space().enumerate();
    elems.sort();
    if fast.dimension() != 1 || elems != expected {
        return Err(format!("fast returned a = {} with {:?}", fast.dimension(), elems));
    }
    let slow = list_decode_slow(&code, &z, &params)
        .0
        .map_err(|e| format!("slow: {e}"))?;
    if slow != expected {
        return Err(format!("slow returned {slow:?}"));
    }
    Ok(format!(
        "z = {z}: a = 1, list {{{}, {}}} from both decoders",
        expected[0], expected[1]
    ))
}

fn slow_fast_agreement() -> Outcome {
    let (mut compared, mut skipped) = (0, 0);
    for i in 0..ORACLE_INSTANCES {
        let inst = battery_instance(BATTERY_SEED, i);
        let params = DecoderParams::new(inst.r, inst.epsilon).unwrap().with_s_cap(S_CAP);
        let (fast, report) = list_decode_fast(&inst.code, &inst.z, &params);
        if report.s_actual.is_none_or(|s| s > S_CAP) {
            skipped += 1;
            continue;
        }
        let slow = list_decode_slow(&inst.code, &inst.z, &params).0;
        let fast_set = match fast {
            Ok(desc) => {
                let mut v = desc.to_space().enumerate();
                v.sort();
                Some(v)
            }
            Err(DecodeFailure::EmptyList) => Some(Vec::new()),
            Err(_) => None,
        };
        match (fast_set, slow) {
            (Some(f), Ok(s)) => {
                compared += 1;
                if f != s {
                    return Err(format!(
                        "sets differ on {}: fast {} vs slow {}",
                        inst.label,
                        f.len(),
                        s.len()
                    ));
                }
            }
            _ => skipped += 1,
        }
    }
    Ok(format!(
        "{compared} instances with s <= {S_CAP} agree; {skipped} not comparable"
    ))
}

fn unique_guarantee() -> Outcome {
    let code = build(
        BipartiteGraph::double_cover(&RegularGraph::complete(8).unwrap()),
        "hamming74",
    );
    let lambda = Rational::from_integer(1);
    let guarantee = max_guaranteed_erasures(&code, &ratio(1, 10), &lambda);
    if guarantee.count != UNIQUE_ERASURES || !guarantee.hypothesis {
        return Err(format!("guarantee computed as {guarantee:?}"));
    }
    let eps = effective_epsilon(&code, UNIQUE_ERASURES, &lambda);
    let n = code.block_length() as f64;
    let round_cap = 10.0 * n.ln() / expander_ec::rational::to_f64(&eps);
    let zero = BitVector::zeros(code.block_length());
    let mut max_rounds = 0;
    for seed in 0..UNIQUE_PATTERNS {
        let z = code.erase(&zero, &ErasurePattern::Count(UNIQUE_ERASURES), seed);
        let UniqueResult::Decoded { codeword, schedule } = unique_decode(&code, &z) else {
            return Err(format!("pattern {seed} did not complete"));
        };
        if !codeword.is_zero() {
            return Err(format!("pattern {seed} decoded to a nonzero word"));
        }
        if !schedule.frontier_decays(&eps) {
            return Err(format!(
                "frontier {:?} does not decay on pattern {seed}",
                schedule.frontier_sizes
            ));
        }
        if schedule.inner_invocations > schedule.frontier_sizes.iter().sum::<usize>()
            || schedule.rounds.len() as f64 > round_cap
        {
            return Err(format!("work bound violated on pattern {seed}"));
        }
        max_rounds = max_rounds.max(schedule.rounds.len());
    }
    Ok(format!(
        "{UNIQUE_PATTERNS} patterns of {UNIQUE_ERASURES} erasures decode to zero; decay holds at eps = {eps}; max rounds {max_rounds}"
    ))
}

/// Smallest union of supports over `r` independent codewords.
fn tuple_search_weight(words: &[BitVector], r: usize) -> usize {
    #[derive(Clone, Default)]
    struct Span(Option<RowBasis>);
    min_union_support(
        words,
        r,
        |w: &BitVector| w.count_ones(),
        |a: &BitVector, b: &BitVector| a.or(b),
        |s: &mut Span, w: &BitVector| s.0.get_or_insert_with(|| RowBasis::new(w.len())).insert(w.clone()),
    )
}

fn generalized_distances() -> Outcome {
    let hamming = make_code(&"hamming74".parse().unwrap(), 0).unwrap();
    let words: Vec<BitVector> = hamming.codewords().filter(|w| !w.is_zero()).collect();
    let brute: Vec<usize> = (1..=4).map(|r| tuple_search_weight(&words, r)).collect();
    if brute != [3, 5, 6, 7] {
        return Err(format!("hamming74 tuple search gives {brute:?}"));
    }
    let got: Vec<Rational> = (1..=4).map(|r| hamming.generalized_distance(r).unwrap()).collect();
    let want: Vec<Rational> = [3, 5, 6, 7].iter().map(|&w| ratio(w, 7)).collect();
    if got != want {
        return Err(format!("hamming74 hierarchy {got:?}"));
    }
    let parity = make_code(&"parity:3".parse().unwrap(), 0).unwrap();
    if parity.generalized_distance(2).unwrap() != ratio(1, 1) {
        return Err("parity:3 second generalized distance is not 1".into());
    }
    let mut specs: Vec<String> = (3..=8)
        .flat_map(|d| [format!("parity:{d}"), format!("repetition:{d}")])
        .collect();
    specs.push("hamming74".into());
    let mut checks = 0;
    for spec in &specs {
        let code = make_code(&spec.parse().unwrap(), 0).unwrap();
        let words: Vec<BitVector> = code.codewords().filter(|w| !w.is_zero()).collect();
        for r in 1..=code.dimension() {
            let weight = code.generalized_weight(r).unwrap();
            if code.dimension() <= TUPLE_SEARCH_DIM_CAP && tuple_search_weight(&words, r) != weight {
                return Err(format!("{spec}: r = {r}: support search and tuple search disagree"));
            }
            for e in 0..=code.length() {
                let decodable = list_decodable_by_search(&code, e, 1u64 << (r - 1), 0);
                if decodable != (weight > e) {
                    return Err(format!(
                        "{spec}: r = {r}, e = {e}: search says {decodable}, delta_r*d = {weight}"
                    ));
                }
                checks += 1;
            }
        }
    }
    Ok(format!(
        "hamming74 (3,5,6,7)/7, parity:3 delta_2 = 1, {checks} exhaustive iff-checks over {} codes",
        specs.len()
    ))
}

fn lemma_two_distance() -> Outcome {
    let epsilon = ratio(1, 100);
    let mut lines = Vec::new();
    for (n, spec, expected) in [(3, "parity:3", ratio(2, 3)), (7, "hamming74", ratio(15, 49))] {
        let code = build(BipartiteGraph::complete_bipartite(n), spec);
        let inner = code.inner();
        let delta = inner.min_distance();
        let delta2 = inner.generalized_distance(2).unwrap();
        let base = delta * delta2.min(delta * Rational::from_integer(2));
        let bound = (Rational::from_integer(1) - epsilon) * base;
        let hypothesis = Rational::from_integer(0) <= delta2 * delta * delta * epsilon * epsilon / from_int(16);
        let got = code.generalized_distance(2).unwrap();
        if !hypothesis || got < bound {
            return Err(format!("K_{{{n},{n}}}+{spec}: delta_2(C) = {got} < bound {bound}"));
        }
        if got != expected {
            return Err(format!("K_{{{n},{n}}}+{spec}: delta_2(C) = {got}, expected {expected}"));
        }
        if spec == "parity:3" && got != base {
            return Err(format!("parity case is not tight: {got} vs {base}"));
        }
        lines.push(format!("K_{{{n},{n}}}+{spec}: {got} >= {bound}"));
    }
    Ok(lines.join("; ") + "; parity case equals the eps -> 0 bound")
}

/// `K_{n,n}` instances (λ = 0) within the erasure budget.
fn regime_bounds() -> Outcome {
    let cases = [
        (3, "parity:3"),
        (4, "parity:4"),
        (5, "parity:5"),
        (7, "hamming74"),
        (8, "parity:8"),
        (6, "repetition:6"),
    ];
    let epsilons = [ratio(1, 2), ratio(1, 4), ratio(1, 10)];
    let mut rng = SplitMix64::new(BATTERY_SEED ^ 7);
    let (mut runs, mut completed) = (0, 0);
    for i in 0..REGIME_INSTANCES {
        let (n, spec) = cases[i as usize % cases.len()];
        let code = build(BipartiteGraph::complete_bipartite(n), spec);
        let r = 1 + rng.index(code.inner().dimension().min(3));
        let params = DecoderParams::new(r, epsilons[rng.index(3)])
            .unwrap()
            .with_lambda(Rational::from_integer(0));
        let budget = params.erasure_budget(&code).unwrap().floor().to_integer() as usize;
        let basis = code.kernel_basis().unwrap();
        let sent = code.sample_codeword(&basis, rng.next_u64());
        let z = code.erase(&sent, &ErasurePattern::Count(rng.index(budget + 1)), rng.next_u64());
        let (result, report) = list_decode_fast(&code, &z, &params);
        runs += 1;
        let Some(bounds) = report.bounds else {
            return Err(format!("no bound checks recorded for K_{{{n},{n}}}+{spec}"));
        };
        if !bounds.all_hold() {
            return Err(format!("bounds {bounds:?} violated on K_{{{n},{n}}}+{spec} r={r}"));
        }
        if let Ok(desc) = result {
            completed += 1;
            if !affine_equal(&desc.to_space(), &code.oracle_list_decode(&z).unwrap()) {
                return Err(format!("DIFFER on K_{{{n},{n}}}+{spec}"));
            }
        }
    }
    Ok(format!(
        "{runs} in-regime runs ({completed} completed): class sizes, class count, |E(B')| and a within bounds"
    ))
}

fn heavy_edge_fuzz() -> Outcome {
    let mut rng = SplitMix64::new(BATTERY_SEED ^ 8);
    let (mut pruned_runs, mut pruned_edges) = (0, 0);
    for i in 0..FUZZ_INSTANCES {
        // Odd instances use long repetition codes, where τ ≥ 1, with local
        // keys scrambled so that light classes exist and must be pruned.
        let scramble = i % 2 == 1;
        let (code, r, eps) = if scramble {
            let d = 16 + rng.index(9);
            let n = d + 2 + rng.index(12);
            let n = if n * d % 2 == 1 { n + 1 } else { n };
            let g = RegularGraph::random_regular(n, d, rng.next_u64()).unwrap();
            (
                build(BipartiteGraph::double_cover(&g), &format!("repetition:{d}")),
                1,
                ratio(99, 100),
            )
        } else {
            let inst = battery_instance(BATTERY_SEED ^ 8, i);
            (inst.code, inst.r, inst.epsilon)
        };
        let params = DecoderParams::new(r, eps).unwrap();
        let n_edges = code.block_length();
        let z = code.erase(
            &BitVector::zeros(n_edges),
            &ErasurePattern::Count(rng.index(n_edges / 2 + 1)),
            rng.next_u64(),
        );
        let mut bank = build_inner_lists(&code, &z, &params).map_err(|e| format!("bank: {e}"))?;
        if scramble {
            let alphabet = 2 + rng.index(6) as u64;
            for list in bank.lists.iter_mut().flatten() {
                if rng.next_bool() {
                    list.keys.iter_mut().for_each(|k| *k = rng.below(alphabet));
                }
            }
        }
        let heavy = find_heavy_edges(&code, &bank, &params);
        if !heavy_postcondition_holds(&code, &bank, &heavy, &params) {
            return Err(format!("postcondition fails on instance {i}"));
        }
        let untouched = (0..n_edges)
            .filter(|&e| {
                let (l, r) = code.graph().endpoints(e);
                !bank.bad[l] && !bank.bad[r]
            })
            .count();
        if heavy.count < untouched {
            pruned_runs += 1;
            pruned_edges += untouched - heavy.count;
        }
    }
    Ok(format!(
        "{FUZZ_INSTANCES} instances, 0 violations; {pruned_runs} runs pruned {pruned_edges} edges from light classes"
    ))
}

fn scaling() -> Outcome {
    let start = Instant::now();
    let mut per_edge = Vec::new();
    for (i, &n) in SCALING_SIZES.iter().enumerate() {
        let g = RegularGraph::random_regular(n, SCALING_DEGREE, 100 + i as u64).map_err(|e| e.to_string())?;
        let code = build(BipartiteGraph::double_cover(&g), &format!("parity:{SCALING_DEGREE}"));
        let zero = BitVector::zeros(code.block_length());
        let z = code.erase(&zero, &ErasurePattern::Rate(SCALING_ERASURE_RATE), 200 + i as u64);
        let params = DecoderParams::new(1, ratio(1, 2)).unwrap();
        let _ = list_decode_fast(&code, &z, &params);
        let mut best = f64::INFINITY;
        for _ in 0..SCALING_REPEATS {
            let t = Instant::now();
            let (result, _) = list_decode_fast(&code, &z, &params);
            let secs = t.elapsed().as_secs_f64();
            let desc = result.map_err(|e| format!("n = {n}: {e}"))?;
            if !desc.to_space().contains(&zero) {
                return Err(format!("n = {n}: list misses the sent word"));
            }
            best = best.min(secs);
        }
        per_edge.push(best / code.block_length() as f64);
    }
    let elapsed = start.elapsed();
    let hi = per_edge.iter().cloned().fold(0.0, f64::max);
    let lo = per_edge.iter().cloned().fold(f64::INFINITY, f64::min);
    let ratio = hi / lo;
    let detail: Vec<String> = SCALING_SIZES
        .iter()
        .zip(&per_edge)
        .map(|(n, t)| format!("n={n}: {:.0} ns/edge", t * 1e9))
        .collect();
    if ratio > SCALING_MAX_RATIO || elapsed > SCALING_TIME_LIMIT {
        return Err(format!(
            "{}; spread {ratio:.2}x; total {:.1}s",
            detail.join(", "),
            elapsed.as_secs_f64()
        ));
    }
    Ok(format!(
        "{}; spread {ratio:.2}x; total {:.1}s",
        detail.join(", "),
        elapsed.as_secs_f64()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("oracle equivalence", oracle_equivalence),
        ("flagship 2x2 square", flagship),
        ("slow/fast agreement", slow_fast_agreement),
        ("unique-decode guarantee", unique_guarantee),
        ("generalized distances", generalized_distances),
        ("second generalized distance bound", lemma_two_distance),
        ("in-regime structural bounds", regime_bounds),
        ("heavy-edge postcondition fuzz", heavy_edge_fuzz),
        ("linear scaling", scaling),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] {}. {name}: {detail} ({secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {}. {name}: {detail} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

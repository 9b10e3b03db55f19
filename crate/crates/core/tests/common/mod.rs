//! Randomized instance battery shared by the integration suites.

#![allow(dead_code)]

use expander_ec::rational::ratio;
use expander_ec::{
    make_code, BipartiteGraph, BitVector, ErasurePattern, ExpanderCode, Rational, ReceivedWord, RegularGraph,
    SplitMix64,
};

pub struct Instance {
    pub label: String,
    pub code: ExpanderCode,
    pub sent: BitVector,
    pub z: ReceivedWord,
    pub r: usize,
    pub epsilon: Rational,
}

pub fn build(graph: BipartiteGraph, spec: &str) -> ExpanderCode {
    ExpanderCode::build(graph, make_code(&spec.parse().unwrap(), 0).unwrap()).unwrap()
}

/// Double covers of `K_5..K_9`, random regular graphs with `n ≤ 32` and
/// `d ∈ {3, 4, 5, 7}`, and `K_{3,3}`, `K_{4,4}`.
fn random_graph(rng: &mut SplitMix64) -> (String, BipartiteGraph) {
    match rng.index(3) {
        0 => {
            let n = 5 + rng.index(5);
            (
                format!("cover(K_{n})"),
                BipartiteGraph::double_cover(&RegularGraph::complete(n).unwrap()),
            )
        }
        1 => {
            let d = [3, 4, 5, 7][rng.index(4)];
            let n = loop {
                let n = d + 1 + rng.index(32 - d);
                if (n * d).is_multiple_of(2) {
                    break n;
                }
            };
            let seed = rng.next_u64();
            let g = RegularGraph::random_regular(n, d, seed).unwrap();
            (format!("cover(rr({n},{d},{seed}))"), BipartiteGraph::double_cover(&g))
        }
        _ => {
            let n = 3 + rng.index(2);
            (format!("K_{{{n},{n}}}"), BipartiteGraph::complete_bipartite(n))
        }
    }
}

fn random_inner(rng: &mut SplitMix64, d: usize) -> String {
    match rng.index(if d == 7 { 3 } else { 2 }) {
        0 => format!("parity:{d}"),
        1 => format!("repetition:{d}"),
        _ => "hamming74".to_string(),
    }
}

const EPSILONS: [(i128, i128); 4] = [(1, 2), (1, 4), (1, 10), (3, 4)];

/// Instance `i` of the battery; deterministic in `(seed, i)`.
pub fn battery_instance(seed: u64, i: u64) -> Instance {
    let mut rng = SplitMix64::new(seed ^ i.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let (gname, graph) = random_graph(&mut rng);
    let spec = random_inner(&mut rng, graph.d());
    let code = build(graph, &spec);
    let basis = code.kernel_basis().unwrap();
    let sent = code.sample_codeword(&basis, rng.next_u64());
    let n = code.block_length();
    // Half the draws concentrate on light patterns, where decoding completes.
    let cap = if rng.next_bool() { n / 2 } else { n / 6 };
    let count = rng.index(cap + 1);
    let z = code.erase(&sent, &ErasurePattern::Count(count), rng.next_u64());
    let k0 = code.inner().dimension();
    let r = 1 + rng.index(k0.min(3));
    let (num, den) = EPSILONS[rng.index(EPSILONS.len())];
    Instance {
        label: format!("{gname}+{spec} e={count} r={r} eps={num}/{den}"),
        code,
        sent,
        z,
        r,
        epsilon: ratio(num, den),
    }
}

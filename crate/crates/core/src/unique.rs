//! Iterative erasure unique decoding.
//!
//! Vertices are processed in alternating half-rounds: `P_0` holds the right
//! vertices touching an unlabeled edge, `P_1` the left ones, and round `t`
//! solves every vertex of `P_{t−1}` that sees more than `(1 − δ)d` labeled
//! edges. A vertex that cannot be solved hands the far endpoints of its
//! unlabeled edges to `P_t`. Since every `P_t` lies on one side of the graph,
//! no two vertices of a round share an edge.
//!
//! The propagation engine is generic over the label type so the fast list
//! decoder can run the same schedule on affine forms instead of bits.

use std::collections::HashMap;

use crate::code::{ExpanderCode, ReceivedWord};
use crate::gf2::BitVector;
use crate::inner::Completion;
use crate::rational::{from_int, Rational};

/// A value that can be summed over GF(2).
pub trait Label: Clone {
    fn add_assign(&mut self, other: &Self);
    fn is_zero(&self) -> bool;
}

impl Label for bool {
    fn add_assign(&mut self, other: &Self) {
        *self ^= *other;
    }

    fn is_zero(&self) -> bool {
        !*self
    }
}

/// An affine form: coefficients followed by a constant bit.
impl Label for BitVector {
    fn add_assign(&mut self, other: &Self) {
        self.xor_assign(other);
    }

    fn is_zero(&self) -> bool {
        BitVector::is_zero(self)
    }
}

/// Order in which the vertices of a round are visited.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Order {
    #[default]
    Ascending,
    Descending,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Round {
    pub t: usize,
    /// `(edge, solving vertex)` for every edge labeled in this round.
    pub labeled: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScheduleStatus {
    Complete,
    /// No vertex of the surviving frontier meets the threshold.
    Stuck {
        frontier: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeSchedule {
    /// Number of edges labeled before the first round.
    pub initial: usize,
    pub rounds: Vec<Round>,
    /// `|P_0|, |P_1|, …` as each set was formed.
    pub frontier_sizes: Vec<usize>,
    /// Vertices handed to the inner decoder.
    pub inner_invocations: usize,
    pub status: ScheduleStatus,
}

impl DecodeSchedule {
    pub fn is_complete(&self) -> bool {
        self.status == ScheduleStatus::Complete
    }

    pub fn newly_labeled(&self) -> usize {
        self.rounds.iter().map(|r| r.labeled.len()).sum()
    }

    /// `|P_{t+1}|·(1+ε)² ≤ |P_t|` for every `t ≥ 2`.
    pub fn frontier_decays(&self, epsilon: &Rational) -> bool {
        let factor = (Rational::from_integer(1) + epsilon) * (Rational::from_integer(1) + epsilon);
        self.frontier_sizes
            .windows(2)
            .skip(2)
            .all(|w| from_int(w[1]) * factor <= from_int(w[0]))
    }
}

/// A local check failed: the labels cannot extend to a codeword.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Conflict {
    pub vertex: usize,
}

/// Runs the round schedule on `labels`, filling every edge it can.
///
/// With `enforce_checks`, a vertex whose labels violate an inner parity check
/// aborts the run; otherwise such checks are left for the caller.
pub fn propagate<T: Label>(
    code: &ExpanderCode,
    labels: &mut [Option<T>],
    enforce_checks: bool,
    order: Order,
) -> Result<DecodeSchedule, Conflict> {
    let graph = code.graph();
    let n = graph.n();
    let inner = code.inner();
    let threshold = inner.min_weight();
    let mut completions: HashMap<u64, Option<Completion>> = HashMap::new();

    let initial = labels.iter().filter(|l| l.is_some()).count();
    let mut stamp = vec![0usize; code.vertex_count()];
    let touches_unlabeled = |x: usize, labels: &[Option<T>]| code.local_edges(x).iter().any(|&e| labels[e].is_none());
    let p0: Vec<usize> = (n..2 * n).filter(|&x| touches_unlabeled(x, labels)).collect();
    let mut cur: Vec<usize> = (0..n).filter(|&x| touches_unlabeled(x, labels)).collect();
    let mut frontier_sizes = vec![p0.len(), cur.len()];
    let mut rounds = Vec::new();
    let mut inner_invocations = 0;
    let mut idle = 0;
    let mut t = 2;

    loop {
        let mut round = Round { t, labeled: Vec::new() };
        if cur.is_empty() {
            rounds.push(round);
            break;
        }
        if order == Order::Descending {
            cur.reverse();
        }
        let mut next = Vec::new();
        let mut solved_any = false;
        for &v in &cur {
            let edges = code.local_edges(v);
            let unknown = edges
                .iter()
                .enumerate()
                .filter(|(_, &e)| labels[e].is_none())
                .fold(0u64, |m, (s, _)| m | (1 << s));
            let completion = if (unknown.count_ones() as usize) < threshold {
                completions
                    .entry(unknown)
                    .or_insert_with(|| inner.completion(unknown))
                    .as_ref()
            } else {
                None
            };
            match completion {
                Some(rule) => {
                    inner_invocations += 1;
                    solved_any = true;
                    let sum = |mask: u64| -> Option<T> {
                        let mut acc: Option<T> = None;
                        for s in (0..edges.len()).filter(|&s| (mask >> s) & 1 == 1) {
                            let l = labels[edges[s]].as_ref().expect("known slot");
                            match acc.as_mut() {
                                Some(a) => a.add_assign(l),
                                None => acc = Some(l.clone()),
                            }
                        }
                        acc
                    };
                    if enforce_checks && rule.checks.iter().any(|&c| sum(c).is_some_and(|x| !x.is_zero())) {
                        return Err(Conflict { vertex: v });
                    }
                    let values: Vec<(usize, Option<T>)> = rule.solved.iter().map(|&(p, m)| (p, sum(m))).collect();
                    for (p, value) in values {
                        let e = edges[p];
                        labels[e] = Some(value.unwrap_or_else(|| zero_like(labels, edges)));
                        round.labeled.push((e, v));
                    }
                }
                None => {
                    for &e in edges {
                        if labels[e].is_none() {
                            let u = graph.other_end(e, v);
                            if stamp[u] != t {
                                stamp[u] = t;
                                next.push(u);
                            }
                        }
                    }
                }
            }
        }
        next.sort_unstable();
        frontier_sizes.push(next.len());
        rounds.push(round);
        idle = if solved_any { 0 } else { idle + 1 };
        if idle >= 2 && !next.is_empty() {
            return Ok(DecodeSchedule {
                initial,
                rounds,
                frontier_sizes,
                inner_invocations,
                status: ScheduleStatus::Stuck { frontier: next },
            });
        }
        cur = next;
        t += 1;
    }
    Ok(DecodeSchedule {
        initial,
        rounds,
        frontier_sizes,
        inner_invocations,
        status: ScheduleStatus::Complete,
    })
}

/// Zero of the label type, shaped like a label already present at the vertex.
fn zero_like<T: Label>(labels: &[Option<T>], edges: &[usize]) -> T {
    let mut z = edges
        .iter()
        .find_map(|&e| labels[e].clone())
        .expect("a solved vertex has a labeled edge or no unknowns");
    let copy = z.clone();
    z.add_assign(&copy);
    z
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UniqueResult {
    Decoded {
        codeword: BitVector,
        schedule: DecodeSchedule,
    },
    Stuck {
        schedule: DecodeSchedule,
    },
    Inconsistent,
}

impl UniqueResult {
    pub fn codeword(&self) -> Option<&BitVector> {
        match self {
            UniqueResult::Decoded { codeword, .. } => Some(codeword),
            _ => None,
        }
    }

    pub fn schedule(&self) -> Option<&DecodeSchedule> {
        match self {
            UniqueResult::Decoded { schedule, .. } | UniqueResult::Stuck { schedule } => Some(schedule),
            UniqueResult::Inconsistent => None,
        }
    }

    pub fn status_name(&self) -> &'static str {
        match self {
            UniqueResult::Decoded { .. } => "complete",
            UniqueResult::Stuck { .. } => "stuck",
            UniqueResult::Inconsistent => "inconsistent",
        }
    }
}

pub fn unique_decode(code: &ExpanderCode, z: &ReceivedWord) -> UniqueResult {
    unique_decode_ordered(code, z, Order::Ascending)
}

pub fn unique_decode_ordered(code: &ExpanderCode, z: &ReceivedWord, order: Order) -> UniqueResult {
    let mut labels: Vec<Option<bool>> = (0..z.len()).map(|e| z.symbol(e)).collect();
    finish_concrete(code, &mut labels, order)
}

/// Propagates concrete labels and checks the result is a codeword.
pub(crate) fn finish_concrete(code: &ExpanderCode, labels: &mut [Option<bool>], order: Order) -> UniqueResult {
    let schedule = match propagate(code, labels, true, order) {
        Ok(s) => s,
        Err(_) => return UniqueResult::Inconsistent,
    };
    if !schedule.is_complete() {
        return UniqueResult::Stuck { schedule };
    }
    let codeword = BitVector::from_bools(labels.iter().map(|l| l.expect("complete schedule labels every edge")));
    // Vertices never visited by the schedule have not been checked yet.
    if !code.is_codeword(&codeword).unwrap_or(false) {
        return UniqueResult::Inconsistent;
    }
    UniqueResult::Decoded { codeword, schedule }
}

/// Erasure budget under which unique decoding is guaranteed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Guarantee {
    /// `floor((1 − ε)·δ·(δ − λ/d)·N)`, or 0 when negative.
    pub count: usize,
    /// Whether `λ/d < δ/2`.
    pub hypothesis: bool,
}

pub fn max_guaranteed_erasures(code: &ExpanderCode, epsilon: &Rational, lambda: &Rational) -> Guarantee {
    let d = from_int(code.graph().d());
    let delta = code.inner().min_distance();
    let one = Rational::from_integer(1);
    let value = (one - epsilon) * delta * (delta - lambda / d) * from_int(code.block_length());
    let count = if value <= Rational::from_integer(0) {
        0
    } else {
        value.floor().to_integer() as usize
    };
    Guarantee {
        count,
        hypothesis: lambda / d < delta / Rational::from_integer(2),
    }
}

/// The `ε` for which `erasures = (1 − ε)·δ·(δ − λ/d)·N`.
pub fn effective_epsilon(code: &ExpanderCode, erasures: usize, lambda: &Rational) -> Rational {
    let d = from_int(code.graph().d());
    let delta = code.inner().min_distance();
    let capacity = delta * (delta - lambda / d) * from_int(code.block_length());
    Rational::from_integer(1) - from_int(erasures) / capacity
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::ErasurePattern;
    use crate::graph::{BipartiteGraph, RegularGraph};
    use crate::inner::make_code;
    use crate::rational::ratio;

    fn build(g: BipartiteGraph, spec: &str) -> ExpanderCode {
        ExpanderCode::build(g, make_code(&spec.parse().unwrap(), 0).unwrap()).unwrap()
    }

    fn cover(n: usize) -> BipartiteGraph {
        BipartiteGraph::double_cover(&RegularGraph::complete(n).unwrap())
    }

    #[test]
    fn no_erasures_returns_input() {
        let code = build(cover(5), "parity:4");
        let basis = code.kernel_basis().unwrap();
        let c = code.sample_codeword(&basis, 3);
        let res = unique_decode(&code, &ReceivedWord::from_codeword(&c));
        assert_eq!(res.codeword(), Some(&c));
        assert_eq!(res.schedule().unwrap().rounds.len(), 1);
    }

    #[test]
    fn everything_erased_is_stuck() {
        let code = build(cover(5), "parity:4");
        let z = code.erase(&BitVector::zeros(20), &ErasurePattern::Count(20), 0);
        assert!(matches!(unique_decode(&code, &z), UniqueResult::Stuck { .. }));
    }

    #[test]
    fn single_erasure_in_one_round() {
        let code = build(cover(4), "parity:3");
        for e in 0..12 {
            let z = code.erase(&BitVector::zeros(12), &ErasurePattern::Explicit(vec![e]), 0);
            let res = unique_decode(&code, &z);
            assert_eq!(res.codeword(), Some(&BitVector::zeros(12)));
            let s = res.schedule().unwrap();
            assert_eq!(s.newly_labeled(), 1);
            assert_eq!(s.rounds[0].labeled.len(), 1);
        }
    }

    #[test]
    fn inconsistent_input_is_reported() {
        let code = build(cover(4), "parity:3");
        let mut w = BitVector::zeros(12);
        w.set(0, true);
        assert_eq!(
            unique_decode(&code, &ReceivedWord::from_codeword(&w)),
            UniqueResult::Inconsistent
        );
    }

    #[test]
    fn guarantee_examples() {
        let code = build(cover(8), "hamming74");
        let g = max_guaranteed_erasures(&code, &ratio(1, 10), &ratio(1, 1));
        assert_eq!(
            g,
            Guarantee {
                count: 6,
                hypothesis: true
            }
        );
        assert_eq!(max_guaranteed_erasures(&code, &ratio(1, 1), &ratio(1, 1)).count, 0);
        let code = build(BipartiteGraph::complete_bipartite(3), "parity:3");
        let g = max_guaranteed_erasures(&code, &ratio(0, 1), &ratio(0, 1));
        assert_eq!(
            g,
            Guarantee {
                count: 4,
                hypothesis: true
            }
        );
    }

    #[test]
    fn decodes_within_guarantee_and_frontier_decays() {
        let code = build(cover(8), "hamming74");
        let lambda = ratio(1, 1);
        let basis = code.kernel_basis().unwrap();
        for seed in 0..200 {
            let c = code.sample_codeword(&basis, seed);
            let z = code.erase(&c, &ErasurePattern::Count(6), seed);
            let res = unique_decode(&code, &z);
            assert_eq!(res.codeword(), Some(&c));
            let s = res.schedule().unwrap();
            assert!(s.frontier_decays(&effective_epsilon(&code, 6, &lambda)));
            assert!(s.inner_invocations <= s.frontier_sizes.iter().sum());
        }
    }

    #[test]
    fn agrees_with_oracle_and_order() {
        for seed in 0..60u64 {
            let code = build(
                BipartiteGraph::double_cover(&RegularGraph::random_regular(10, 4, seed).unwrap()),
                "parity:4",
            );
            let basis = code.kernel_basis().unwrap();
            let c = code.sample_codeword(&basis, seed);
            let z = code.erase(&c, &ErasurePattern::Count((seed % 15) as usize), seed);
            let a = unique_decode(&code, &z);
            let b = unique_decode_ordered(&code, &z, Order::Descending);
            assert_eq!(a.codeword(), b.codeword());
            assert_eq!(a.status_name(), b.status_name());
            if let Some(w) = a.codeword() {
                let oracle = code.oracle_list_decode(&z).unwrap();
                assert_eq!(oracle.dim(), Some(0));
                assert!(oracle.contains(w));
            }
        }
    }
}

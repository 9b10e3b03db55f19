//! List decoding from erasures.
//!
//! The pipeline list-decodes the inner code at every vertex with few erasures,
//! prunes edges whose local equivalence classes are small, groups the rest
//! into global classes whose labels are fixed by one representative each, and
//! then completes the labeling with local and global unique decoding. The slow
//! decoder tries every assignment to the representatives; the fast decoder
//! carries the representatives as unknowns and solves one small linear system.

mod bank;
mod classes;
mod fast;
mod labeling;
mod slow;

use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::code::ExpanderCode;
use crate::error::CodeError;
use crate::rational::{self, from_int, pow2, Rational};

pub use bank::{build_inner_lists, InnerListBank, LocalList};
pub use classes::{b_prime, find_heavy_edges, global_classes, heavy_postcondition_holds, GlobalClasses, HeavyEdges};
pub use fast::{find_candidates, list_decode_fast, CandidateSystem};
pub use labeling::Labeling;
pub use slow::list_decode_slow;

pub const DEFAULT_S_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct DecoderParams {
    /// List-size exponent.
    pub r: usize,
    pub epsilon: Rational,
    /// Largest class count the slow decoder will enumerate.
    pub s_cap: usize,
    /// Certified `λ` of the graph, if known.
    pub lambda: Option<Rational>,
    /// Worker threads for the slow decoder.
    pub threads: usize,
}

impl DecoderParams {
    pub fn new(r: usize, epsilon: Rational) -> Result<Self, CodeError> {
        if r == 0 {
            return Err(CodeError::InvalidParams("r must be at least 1".into()));
        }
        if epsilon <= Rational::from_integer(0) || epsilon >= Rational::from_integer(1) {
            return Err(CodeError::InvalidParams(format!(
                "epsilon must lie in (0, 1), got {}",
                rational::format(&epsilon)
            )));
        }
        if r > 40 {
            return Err(CodeError::InvalidParams("r is too large".into()));
        }
        Ok(Self {
            r,
            epsilon,
            s_cap: DEFAULT_S_CAP,
            lambda: None,
            threads: threads_from_env(),
        })
    }

    pub fn with_lambda(mut self, lambda: Rational) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn with_s_cap(mut self, cap: usize) -> Self {
        self.s_cap = cap;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads.max(1);
        self
    }

    /// `ε²δ²·d / 2^{r+3}`.
    pub fn tau_heavy(&self, code: &ExpanderCode) -> Rational {
        let delta = code.inner().min_distance();
        self.epsilon * self.epsilon * delta * delta * from_int(code.graph().d()) / pow2(self.r as u32 + 3)
    }

    /// `2^{2r+7} / (ε⁴δ⁴)`.
    pub fn s_bound(&self, code: &ExpanderCode) -> Rational {
        let ed = self.epsilon * code.inner().min_distance();
        pow2(2 * self.r as u32 + 7) / (ed * ed * ed * ed)
    }

    /// `ε⁴δ⁴·N / 2^{2r+7}`.
    pub fn min_class_size(&self, code: &ExpanderCode) -> Rational {
        from_int(code.block_length()) / self.s_bound(code)
    }

    /// `ε²δ² / 2^{r+4}`, the largest `λ/d` the guarantees cover.
    pub fn regime_threshold(&self, code: &ExpanderCode) -> Rational {
        let ed = self.epsilon * code.inner().min_distance();
        ed * ed / pow2(self.r as u32 + 4)
    }

    /// Whether `λ/d ≤ ε²δ²/2^{r+4}`; unknown without a certified `λ`.
    pub fn regime(&self, code: &ExpanderCode) -> Option<bool> {
        self.lambda
            .map(|l| l / from_int(code.graph().d()) <= self.regime_threshold(code))
    }

    /// `(1 − ε)·δ·δ_r·N`.
    pub fn erasure_budget(&self, code: &ExpanderCode) -> Result<Rational, CodeError> {
        let inner = code.inner();
        Ok((Rational::from_integer(1) - self.epsilon)
            * inner.min_distance()
            * inner.generalized_distance(self.r)?
            * from_int(code.block_length()))
    }

    /// `(1 − ε/4)·(δ − λ/d)·δ·N`, the bound on `|E(B′)|`.
    pub fn e_b_prime_bound(&self, code: &ExpanderCode) -> Option<Rational> {
        let delta = code.inner().min_distance();
        let d = from_int(code.graph().d());
        self.lambda.map(|l| {
            (Rational::from_integer(1) - self.epsilon / Rational::from_integer(4))
                * (delta - l / d)
                * delta
                * from_int(code.block_length())
        })
    }
}

fn threads_from_env() -> usize {
    std::env::var("EXPANDER_EC_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&t| t > 0)
        .unwrap_or(1)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeFailure {
    #[error("the labeling schedule cannot reach every edge")]
    Stuck,
    #[error("no codeword agrees with the received word")]
    EmptyList,
    #[error("the received word is not a corrupted codeword")]
    Inconsistent,
    #[error("{s} classes exceed the advice cap {cap}")]
    AdviceTooLarge { s: usize, cap: usize },
    #[error(transparent)]
    Code(#[from] CodeError),
}

impl DecodeFailure {
    pub fn status_name(&self) -> &'static str {
        match self {
            DecodeFailure::Stuck => "stuck",
            DecodeFailure::EmptyList => "empty_list",
            DecodeFailure::Inconsistent => "inconsistent",
            DecodeFailure::AdviceTooLarge { .. } => "advice_too_large",
            DecodeFailure::Code(_) => "error",
        }
    }
}

/// Structural bounds that hold for every run inside the regime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundChecks {
    pub class_sizes: bool,
    pub class_count: bool,
    pub e_b_prime: bool,
    pub list_dimension: Option<bool>,
}

impl BoundChecks {
    pub fn all_hold(&self) -> bool {
        self.class_sizes && self.class_count && self.e_b_prime && self.list_dimension.unwrap_or(true)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Timings {
    pub inner_lists_ms: f64,
    pub heavy_edges_ms: f64,
    pub classes_ms: f64,
    pub labeling_ms: f64,
    pub solve_ms: f64,
    pub total_ms: f64,
}

/// Machine-readable account of one decoding run. Rationals are `"num/den"`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecodeReport {
    pub algorithm: String,
    pub status: String,
    pub r: usize,
    pub epsilon: String,
    pub regime: Option<bool>,
    pub erasures: usize,
    pub erasure_budget: Option<String>,
    pub within_budget: Option<bool>,
    pub tau_heavy: String,
    pub s_bound: String,
    pub bad_vertices: usize,
    pub e_prime: usize,
    pub s_actual: Option<usize>,
    pub min_class_size: Option<usize>,
    pub b_prime: usize,
    pub e_b_prime: usize,
    pub first_stage_labeled: usize,
    pub ambiguous_ties: usize,
    pub frontier_sizes: Vec<usize>,
    pub a: Option<usize>,
    pub unrestricted_dimension: Option<usize>,
    pub list_size: Option<usize>,
    pub bounds: Option<BoundChecks>,
    pub timings: Timings,
}

impl DecodeReport {
    fn new(algorithm: &str, code: &ExpanderCode, erasures: usize, params: &DecoderParams) -> Self {
        let budget = params.erasure_budget(code).ok();
        Self {
            algorithm: algorithm.into(),
            status: "running".into(),
            r: params.r,
            epsilon: rational::format(&params.epsilon),
            regime: params.regime(code),
            erasures,
            within_budget: budget.map(|b| from_int(erasures) <= b),
            erasure_budget: budget.as_ref().map(rational::format),
            tau_heavy: rational::format(&params.tau_heavy(code)),
            s_bound: rational::format(&params.s_bound(code)),
            bad_vertices: 0,
            e_prime: 0,
            s_actual: None,
            min_class_size: None,
            b_prime: 0,
            e_b_prime: 0,
            first_stage_labeled: 0,
            ambiguous_ties: 0,
            frontier_sizes: Vec::new(),
            a: None,
            unrestricted_dimension: None,
            list_size: None,
            bounds: None,
            timings: Timings::default(),
        }
    }

    fn finish<T>(&mut self, result: &Result<T, DecodeFailure>, start: Instant) {
        self.status = match result {
            Ok(_) => "complete".into(),
            Err(f) => f.status_name().into(),
        };
        self.timings.total_ms = elapsed_ms(start);
    }
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Everything before the labeling stage, shared by both decoders.
#[derive(Debug, Clone)]
pub struct Structure {
    pub bank: InnerListBank,
    pub heavy: HeavyEdges,
    pub classes: GlobalClasses,
    pub b_prime: Vec<bool>,
}

impl Structure {
    pub fn s_actual(&self) -> usize {
        self.classes.representatives.len()
    }
}

/// Runs bank, heavy-edge and class stages, filling the report as it goes.
pub fn analyze_structure(
    code: &ExpanderCode,
    z: &crate::code::ReceivedWord,
    params: &DecoderParams,
    report: &mut DecodeReport,
) -> Result<Structure, DecodeFailure> {
    let t = Instant::now();
    let bank = build_inner_lists(code, z, params)?;
    report.timings.inner_lists_ms = elapsed_ms(t);
    report.bad_vertices = bank.bad_count();

    let t = Instant::now();
    let heavy = find_heavy_edges(code, &bank, params);
    report.timings.heavy_edges_ms = elapsed_ms(t);
    report.e_prime = heavy.count;

    let t = Instant::now();
    let classes = global_classes(code, &bank, &heavy);
    let bp = b_prime(code, &heavy);
    report.timings.classes_ms = elapsed_ms(t);
    report.s_actual = Some(classes.representatives.len());
    report.min_class_size = classes.sizes.iter().copied().min();
    report.b_prime = bp.iter().filter(|&&b| b).count();
    report.e_b_prime = (0..code.block_length())
        .filter(|&e| {
            let (l, r) = code.graph().endpoints(e);
            bp[l] && bp[r]
        })
        .count();

    if params.regime(code) == Some(true) {
        let min_size = params.min_class_size(code);
        report.bounds = Some(BoundChecks {
            class_sizes: classes.sizes.iter().all(|&s| from_int(s) >= min_size),
            class_count: from_int(classes.representatives.len()) <= params.s_bound(code),
            e_b_prime: params
                .e_b_prime_bound(code)
                .is_none_or(|b| from_int(report.e_b_prime) <= b),
            list_dimension: None,
        });
    }
    Ok(Structure {
        bank,
        heavy,
        classes,
        b_prime: bp,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::{make_code, BipartiteGraph};

    fn tensor() -> ExpanderCode {
        ExpanderCode::build(
            BipartiteGraph::complete_bipartite(3),
            make_code(&"parity:3".parse().unwrap(), 0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn thresholds() {
        let code = tensor();
        let p = DecoderParams::new(2, ratio(1, 2)).unwrap();
        assert_eq!(p.tau_heavy(&code), ratio(1, 96));
        // 2^11 / ((1/2)(2/3))^4 = 2048·81
        assert_eq!(p.s_bound(&code), ratio(2048 * 81, 1));
        assert_eq!(p.regime(&code), None);
        assert_eq!(p.clone().with_lambda(ratio(0, 1)).regime(&code), Some(true));
        assert_eq!(p.clone().with_lambda(ratio(1, 1)).regime(&code), Some(false));
        // (1/2)·(2/3)·1·9
        assert_eq!(p.erasure_budget(&code).unwrap(), ratio(3, 1));
    }

    #[test]
    fn invalid_params() {
        assert!(DecoderParams::new(0, ratio(1, 2)).is_err());
        assert!(DecoderParams::new(1, ratio(0, 1)).is_err());
        assert!(DecoderParams::new(1, ratio(1, 1)).is_err());
    }
}

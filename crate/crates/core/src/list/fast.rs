//! Linear-time list decoding: the labeling schedule is run once on affine
//! forms in the `s` class representatives, giving `c = A·x + b` for every list
//! element. The parity checks then cut `x` down to `Â·y + b̂`, and the list is
//! `{A·Â·y + A·b̂ + b}`.

use std::time::Instant;

use crate::code::{ExpanderCode, ListDescription, ReceivedWord};
use crate::gf2::{solve_affine, BitMatrix, BitVector, RowBasis};
use crate::unique::DecodeSchedule;

use super::labeling::label_from_advice;
use super::{analyze_structure, elapsed_ms, DecodeFailure, DecodeReport, DecoderParams, Structure};
use crate::rational::from_int;

#[derive(Debug, Clone)]
pub struct CandidateSystem {
    pub s: usize,
    /// Row `e` of `[A | b]`: coefficients on bits `0..s`, constant at bit `s`.
    pub forms: Vec<BitVector>,
    /// Kernel basis of `H·A`, one column per entry.
    pub a_hat: Vec<BitVector>,
    pub b_hat: BitVector,
    pub schedule: DecodeSchedule,
    pub first_stage: usize,
    pub ambiguous_ties: usize,
}

impl CandidateSystem {
    /// Dimension `a′` of the solution space of `H·A·x = H·b`.
    pub fn a_prime(&self) -> usize {
        self.a_hat.len()
    }

    /// `A·x + b`.
    pub fn evaluate(&self, x: &BitVector) -> BitVector {
        let ext = extend(x, self.s);
        BitVector::from_bools(self.forms.iter().map(|f| f.dot(&ext) ^ f.get(self.s)))
    }
}

/// `x` padded with a zero constant coordinate.
fn extend(x: &BitVector, s: usize) -> BitVector {
    let mut ext = BitVector::zeros(s + 1);
    for i in x.ones_iter() {
        ext.set(i, true);
    }
    ext
}

/// Builds `A`, `b` by running the schedule symbolically and solves the
/// parity-check system over the representatives.
pub fn find_candidates(
    code: &ExpanderCode,
    z: &ReceivedWord,
    structure: &Structure,
) -> Result<CandidateSystem, DecodeFailure> {
    let s = structure.s_actual();
    let constant = |v: bool| {
        let mut f = BitVector::zeros(s + 1);
        f.set(s, v);
        f
    };
    let advice = |class: usize, off: bool| {
        let mut f = constant(off);
        f.set(class, true);
        f
    };
    let labeling = label_from_advice(code, z, structure, advice, constant, false).expect("checks disabled");
    if !labeling.schedule.is_complete() {
        return Err(DecodeFailure::Stuck);
    }
    let forms: Vec<BitVector> = labeling
        .labels
        .into_iter()
        .map(|l| l.expect("complete schedule labels every edge"))
        .collect();

    let row_form = |row: usize| {
        let mut acc = BitVector::zeros(s + 1);
        for e in code.parity_row_support(row) {
            acc.xor_assign(&forms[e]);
        }
        acc
    };
    // Each check row reads `h·x = c` with `h` the coefficients and `c` the constant.
    let mut independent = RowBasis::new(s + 1);
    let mut j_rows = Vec::new();
    let mut j_rhs = Vec::new();
    for row in 0..code.parity_rows() {
        if independent.rank() == s {
            break;
        }
        let mut h = row_form(row);
        let c = h.get(s);
        h.set(s, false);
        if independent.insert(h.clone()) {
            j_rows.push(h.select(&(0..s).collect::<Vec<_>>()));
            j_rhs.push(c);
        }
    }
    let j = BitMatrix::from_rows(s, j_rows);
    let a_hat = j.kernel();
    let b_hat = solve_affine(&j, &BitVector::from_bools(j_rhs)).offset().clone();
    let b_ext = extend(&b_hat, s);
    for row in 0..code.parity_rows() {
        let f = row_form(row);
        if f.dot(&b_ext) != f.get(s) {
            return Err(DecodeFailure::EmptyList);
        }
    }
    Ok(CandidateSystem {
        s,
        forms,
        a_hat,
        b_hat,
        schedule: labeling.schedule,
        first_stage: labeling.first_stage,
        ambiguous_ties: labeling.ambiguous_ties,
    })
}

/// The whole list as `{L·x + ℓ}`, or the reason it could not be produced.
pub fn list_decode_fast(
    code: &ExpanderCode,
    z: &ReceivedWord,
    params: &DecoderParams,
) -> (Result<ListDescription, DecodeFailure>, DecodeReport) {
    let start = Instant::now();
    let mut report = DecodeReport::new("list-fast", code, z.erasure_count(), params);
    let result = run(code, z, params, &mut report);
    if let Ok(desc) = &result {
        report.a = Some(desc.dimension());
        if let Some(b) = report.bounds.as_mut() {
            b.list_dimension = Some(from_int(desc.dimension()) <= params.s_bound(code));
        }
    }
    report.finish(&result, start);
    (result, report)
}

fn run(
    code: &ExpanderCode,
    z: &ReceivedWord,
    params: &DecoderParams,
    report: &mut DecodeReport,
) -> Result<ListDescription, DecodeFailure> {
    let structure = analyze_structure(code, z, params, report)?;
    let t = Instant::now();
    let system = find_candidates(code, z, &structure);
    report.timings.labeling_ms = elapsed_ms(t);
    let system = system?;
    report.first_stage_labeled = system.first_stage;
    report.ambiguous_ties = system.ambiguous_ties;
    report.frontier_sizes = system.schedule.frontier_sizes.clone();

    let t = Instant::now();
    let s = system.s;
    let hat: Vec<BitVector> = system.a_hat.iter().map(|c| extend(c, s)).collect();
    let b_ext = extend(&system.b_hat, s);
    let a_prime = hat.len();
    let n = code.block_length();
    // Row `e` of `L = A·Â` and entry `e` of `ℓ = A·b̂ + b`.
    let l_rows: Vec<BitVector> = system
        .forms
        .iter()
        .map(|f| BitVector::from_bools(hat.iter().map(|c| f.dot(c))))
        .collect();
    let ell = BitVector::from_bools(system.forms.iter().map(|f| f.dot(&b_ext) ^ f.get(s)));
    let columns = |basis: &[BitVector]| -> Vec<BitVector> {
        basis
            .iter()
            .map(|y| BitVector::from_bools(l_rows.iter().map(|r| r.dot(y))))
            .collect()
    };
    let unit_basis: Vec<BitVector> = (0..a_prime).map(|i| BitVector::unit(a_prime, i)).collect();
    report.unrestricted_dimension = Some(ListDescription::new(ell.clone(), columns(&unit_basis)).dimension());

    // Keep only the members that agree with every unerased symbol.
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for e in (0..n).filter(|&e| !z.is_erased(e)) {
        let target = z.value(e) ^ ell.get(e);
        if l_rows[e].is_zero() {
            if target {
                report.timings.solve_ms = elapsed_ms(t);
                return Err(DecodeFailure::EmptyList);
            }
            continue;
        }
        rows.push(l_rows[e].clone());
        rhs.push(target);
    }
    let restricted = solve_affine(&BitMatrix::from_rows(a_prime, rows), &BitVector::from_bools(rhs));
    if restricted.is_empty() {
        report.timings.solve_ms = elapsed_ms(t);
        return Err(DecodeFailure::EmptyList);
    }
    let shift = restricted.offset();
    let mut offset = ell;
    for (i, col) in columns(&unit_basis).iter().enumerate() {
        if shift.get(i) {
            offset.xor_assign(col);
        }
    }
    let desc = ListDescription::new(offset, columns(&restricted.basis_columns()));
    report.timings.solve_ms = elapsed_ms(t);
    Ok(desc)
}

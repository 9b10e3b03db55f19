//! Exhaustive-advice list decoding: one concrete labeling per assignment to
//! the class representatives.

use std::collections::BTreeSet;
use std::time::Instant;

use crate::code::{ExpanderCode, ReceivedWord};
use crate::gf2::BitVector;

use super::labeling::label_from_advice;
use super::{analyze_structure, elapsed_ms, DecodeFailure, DecodeReport, DecoderParams, Structure};

/// Every codeword agreeing with `z`, sorted, or the reason none could be listed.
pub fn list_decode_slow(
    code: &ExpanderCode,
    z: &ReceivedWord,
    params: &DecoderParams,
) -> (Result<Vec<BitVector>, DecodeFailure>, DecodeReport) {
    let start = Instant::now();
    let mut report = DecodeReport::new("list-slow", code, z.erasure_count(), params);
    let result = run(code, z, params, &mut report);
    if let Ok(list) = &result {
        report.list_size = Some(list.len());
    }
    report.finish(&result, start);
    (result, report)
}

fn run(
    code: &ExpanderCode,
    z: &ReceivedWord,
    params: &DecoderParams,
    report: &mut DecodeReport,
) -> Result<Vec<BitVector>, DecodeFailure> {
    let structure = analyze_structure(code, z, params, report)?;
    let s = structure.s_actual();
    if s > params.s_cap || s >= 63 {
        return Err(DecodeFailure::AdviceTooLarge { s, cap: params.s_cap });
    }
    let t = Instant::now();
    // Which edges the schedule reaches does not depend on the advice, so one
    // unchecked pass decides whether any advice can complete.
    let dry = label_from_advice(code, z, &structure, |_, off| off, |v| v, false).expect("checks disabled");
    report.first_stage_labeled = dry.first_stage;
    report.ambiguous_ties = dry.ambiguous_ties;
    report.frontier_sizes = dry.schedule.frontier_sizes.clone();
    if !dry.schedule.is_complete() {
        report.timings.labeling_ms = elapsed_ms(t);
        return Err(DecodeFailure::Stuck);
    }

    let total = 1u64 << s;
    let threads = params.threads.clamp(1, 64) as u64;
    let words: BTreeSet<BitVector> = if threads == 1 {
        (0..total).filter_map(|a| candidate(code, z, &structure, a)).collect()
    } else {
        let chunk = total.div_ceil(threads);
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..threads)
                .map(|i| {
                    let structure = &structure;
                    scope.spawn(move || {
                        let lo = i * chunk;
                        let hi = ((i + 1) * chunk).min(total);
                        (lo..hi)
                            .filter_map(|a| candidate(code, z, structure, a))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("advice worker panicked"))
                .collect()
        })
    };
    report.timings.labeling_ms = elapsed_ms(t);
    Ok(words.into_iter().collect())
}

/// The codeword produced by advice bits `advice`, if it is consistent.
fn candidate(code: &ExpanderCode, z: &ReceivedWord, structure: &Structure, advice: u64) -> Option<BitVector> {
    let labeling = label_from_advice(
        code,
        z,
        structure,
        |class, off| ((advice >> class) & 1 == 1) ^ off,
        |v| v,
        true,
    )
    .ok()?;
    if !labeling.schedule.is_complete() {
        return None;
    }
    let word = BitVector::from_bools(labeling.labels.iter().map(|l| l.expect("complete labeling")));
    (code.is_codeword(&word).unwrap_or(false) && z.agrees_with(&word)).then_some(word)
}

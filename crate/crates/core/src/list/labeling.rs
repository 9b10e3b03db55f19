//! Completing a labeling from class advice. Shared by both list decoders: the
//! slow one labels with bits, the fast one with affine forms in the class
//! representatives.

use std::collections::HashMap;

use crate::code::{ExpanderCode, ReceivedWord};
use crate::inner::Completion;
use crate::unique::{propagate, Conflict, DecodeSchedule, Label, Order};

use super::Structure;

#[derive(Debug, Clone)]
pub struct Labeling<T> {
    pub labels: Vec<Option<T>>,
    /// Edges labeled by local decoding at vertices outside `B′`.
    pub first_stage: usize,
    /// Vertices outside `B′` whose local view did not determine their
    /// unknown edges; they are left to the global schedule.
    pub ambiguous_ties: usize,
    pub schedule: DecodeSchedule,
}

/// Labels `E′` from the advice, fixes every other unerased edge to `z`, decodes
/// locally at each vertex outside `B′` against that snapshot, and runs the
/// unique-decoding schedule on what remains.
pub fn label_from_advice<T: Label>(
    code: &ExpanderCode,
    z: &ReceivedWord,
    structure: &Structure,
    advice: impl Fn(usize, bool) -> T,
    constant: impl Fn(bool) -> T,
    enforce_checks: bool,
) -> Result<Labeling<T>, Conflict> {
    let classes = &structure.classes;
    let mut labels: Vec<Option<T>> = (0..code.block_length())
        .map(|e| match classes.class_of[e] {
            Some(c) => Some(advice(c, classes.offset[e])),
            None => z.symbol(e).map(&constant),
        })
        .collect();

    let inner = code.inner();
    let mut completions: HashMap<u64, Option<Completion>> = HashMap::new();
    let mut pending: Vec<(usize, T)> = Vec::new();
    let mut written: HashMap<usize, usize> = HashMap::new();
    let mut ambiguous_ties = 0;
    for x in (0..code.vertex_count()).filter(|&x| !structure.b_prime[x]) {
        let edges = code.local_edges(x);
        let unknown = edges
            .iter()
            .enumerate()
            .filter(|(_, &e)| labels[e].is_none())
            .fold(0u64, |m, (s, _)| m | (1 << s));
        if unknown == 0 {
            continue;
        }
        let Some(rule) = completions
            .entry(unknown)
            .or_insert_with(|| inner.completion(unknown))
            .as_ref()
        else {
            ambiguous_ties += 1;
            continue;
        };
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
        if enforce_checks && rule.checks.iter().any(|&c| sum(c).is_some_and(|v| !v.is_zero())) {
            return Err(Conflict { vertex: x });
        }
        for &(p, m) in &rule.solved {
            let value = sum(m).unwrap_or_else(|| constant(false));
            let e = edges[p];
            match written.get(&e) {
                Some(&i) => {
                    if enforce_checks {
                        let mut diff = pending[i].1.clone();
                        diff.add_assign(&value);
                        if !diff.is_zero() {
                            return Err(Conflict { vertex: x });
                        }
                    }
                }
                None => {
                    written.insert(e, pending.len());
                    pending.push((e, value));
                }
            }
        }
    }
    let first_stage = pending.len();
    for (e, value) in pending {
        labels[e] = Some(value);
    }
    let schedule = propagate(code, &mut labels, enforce_checks, Order::Ascending)?;
    Ok(Labeling {
        labels,
        first_stage,
        ambiguous_ties,
        schedule,
    })
}

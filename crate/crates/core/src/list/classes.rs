//! Heavy-edge pruning, global equivalence classes, and the vertex set `B′`.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use crate::code::ExpanderCode;

use super::{DecoderParams, InnerListBank};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeavyEdges {
    pub in_e_prime: Vec<bool>,
    pub count: usize,
}

/// Size of the local class of slot `slot` at `x`, counting surviving edges.
fn class_size(code: &ExpanderCode, bank: &InnerListBank, keep: &[bool], x: usize, slot: usize) -> usize {
    let key = bank.key(x, slot);
    code.local_edges(x)
        .iter()
        .enumerate()
        .filter(|&(s, &e)| keep[e] && bank.key(x, s) == key)
        .count()
}

/// Drops every edge at a bad vertex, then repeatedly drops the local class of
/// the smallest edge id whose class at either endpoint has at most `τ_heavy`
/// surviving edges.
pub fn find_heavy_edges(code: &ExpanderCode, bank: &InnerListBank, params: &DecoderParams) -> HeavyEdges {
    let graph = code.graph();
    let limit = params.tau_heavy(code).floor().to_integer().max(0) as usize;
    let n_edges = code.block_length();
    let mut keep: Vec<bool> = (0..n_edges)
        .map(|e| {
            let (l, r) = graph.endpoints(e);
            !bank.bad[l] && !bank.bad[r]
        })
        .collect();
    let mut heap: BinaryHeap<Reverse<usize>> = (0..n_edges).filter(|&e| keep[e]).map(Reverse).collect();
    while let Some(Reverse(e)) = heap.pop() {
        if !keep[e] {
            continue;
        }
        let (l, r) = graph.endpoints(e);
        let Some(x) = [l, r]
            .into_iter()
            .find(|&x| class_size(code, bank, &keep, x, graph.slot_of(e, x)) <= limit)
        else {
            continue;
        };
        let key = bank.key(x, graph.slot_of(e, x));
        for (s, &f) in code.local_edges(x).iter().enumerate() {
            if keep[f] && bank.key(x, s) == key {
                keep[f] = false;
                let u = graph.other_end(f, x);
                heap.extend(code.local_edges(u).iter().filter(|&&g| keep[g]).map(|&g| Reverse(g)));
            }
        }
    }
    let count = keep.iter().filter(|&&k| k).count();
    HeavyEdges {
        in_e_prime: keep,
        count,
    }
}

/// Every surviving edge sits in a local class of more than `τ_heavy`
/// surviving edges at both endpoints, and no edge at a bad vertex survives.
pub fn heavy_postcondition_holds(
    code: &ExpanderCode,
    bank: &InnerListBank,
    heavy: &HeavyEdges,
    params: &DecoderParams,
) -> bool {
    let tau = params.tau_heavy(code);
    let graph = code.graph();
    (0..code.block_length()).filter(|&e| heavy.in_e_prime[e]).all(|e| {
        let (l, r) = graph.endpoints(e);
        [l, r].into_iter().all(|x| {
            !bank.bad[x]
                && crate::rational::from_int(class_size(code, bank, &heavy.in_e_prime, x, graph.slot_of(e, x))) > tau
        })
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalClasses {
    /// Class index per edge of `E′`.
    pub class_of: Vec<Option<usize>>,
    /// `c_e = c_rep ⊕ offset[e]` for every list element `c`.
    pub offset: Vec<bool>,
    /// Minimum edge id of each class, in increasing order.
    pub representatives: Vec<usize>,
    pub sizes: Vec<usize>,
}

/// Connected components of `E′` under "share an endpoint and the same local
/// class there", found by breadth-first search from ascending edge ids.
pub fn global_classes(code: &ExpanderCode, bank: &InnerListBank, heavy: &HeavyEdges) -> GlobalClasses {
    let graph = code.graph();
    let n_edges = code.block_length();
    let mut class_of = vec![None; n_edges];
    let mut offset = vec![false; n_edges];
    let mut representatives = Vec::new();
    let mut sizes = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..n_edges {
        if !heavy.in_e_prime[start] || class_of[start].is_some() {
            continue;
        }
        let id = representatives.len();
        representatives.push(start);
        class_of[start] = Some(id);
        let mut size = 1;
        queue.push_back(start);
        while let Some(e) = queue.pop_front() {
            let (l, r) = graph.endpoints(e);
            for x in [l, r] {
                let slot = graph.slot_of(e, x);
                let key = bank.key(x, slot);
                let base = offset[e] ^ bank.offset(x, slot);
                for (s, &f) in code.local_edges(x).iter().enumerate() {
                    if heavy.in_e_prime[f] && class_of[f].is_none() && bank.key(x, s) == key {
                        class_of[f] = Some(id);
                        offset[f] = base ^ bank.offset(x, s);
                        size += 1;
                        queue.push_back(f);
                    }
                }
            }
        }
        sizes.push(size);
    }
    GlobalClasses {
        class_of,
        offset,
        representatives,
        sizes,
    }
}

/// Vertices with more than `δ·d` incident edges outside `E′`.
pub fn b_prime(code: &ExpanderCode, heavy: &HeavyEdges) -> Vec<bool> {
    let w = code.inner().min_weight();
    (0..code.vertex_count())
        .map(|x| code.local_edges(x).iter().filter(|&&e| !heavy.in_e_prime[e]).count() > w)
        .collect()
}

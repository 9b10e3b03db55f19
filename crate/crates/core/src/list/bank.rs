//! Inner list decoding at every vertex with few erasures.

use crate::code::{ExpanderCode, ReceivedWord};
use crate::gf2::{AffineSpace, BitVector};
use crate::inner::ErasedWord;

use super::{DecodeFailure, DecoderParams};

/// The canonical local list `L_v = {G_v·x + b_v}` at a good vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalList {
    pub space: AffineSpace,
    /// Row of `G_v` for each slot, packed into a word.
    pub keys: Vec<u64>,
    /// `b_v` as a mask over slots.
    pub offsets: u64,
}

impl LocalList {
    fn new(space: AffineSpace) -> Self {
        let d = space.ambient();
        let basis = space.basis();
        let keys = (0..d)
            .map(|i| {
                (0..basis.cols())
                    .filter(|&j| basis.get(i, j))
                    .fold(0u64, |k, j| k | (1 << j))
            })
            .collect();
        Self {
            offsets: space.offset().low_word(),
            keys,
            space,
        }
    }

    fn point(d: usize, word: u64) -> Self {
        Self {
            space: AffineSpace::point(BitVector::from_u64(d, word)),
            keys: vec![0; d],
            offsets: word,
        }
    }

    pub fn dimension(&self) -> usize {
        self.space.dim().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InnerListBank {
    pub bad: Vec<bool>,
    /// `None` exactly at bad vertices.
    pub lists: Vec<Option<LocalList>>,
}

impl InnerListBank {
    pub fn bad_count(&self) -> usize {
        self.bad.iter().filter(|&&b| b).count()
    }

    #[inline]
    pub fn key(&self, x: usize, slot: usize) -> u64 {
        self.lists[x].as_ref().map_or(0, |l| l.keys[slot])
    }

    #[inline]
    pub fn offset(&self, x: usize, slot: usize) -> bool {
        self.lists[x].as_ref().is_some_and(|l| (l.offsets >> slot) & 1 == 1)
    }
}

/// Marks vertices with more than `δ_r·d` erasures as bad and list-decodes the
/// inner code everywhere else.
pub fn build_inner_lists(
    code: &ExpanderCode,
    z: &ReceivedWord,
    params: &DecoderParams,
) -> Result<InnerListBank, DecodeFailure> {
    let inner = code.inner();
    let d = inner.length();
    let limit = inner.generalized_weight(params.r)?;
    let mut bad = Vec::with_capacity(code.vertex_count());
    let mut lists = Vec::with_capacity(code.vertex_count());
    for x in 0..code.vertex_count() {
        let edges = code.local_edges(x);
        let erased = edges
            .iter()
            .enumerate()
            .filter(|(_, &e)| z.is_erased(e))
            .fold(0u64, |m, (s, _)| m | (1 << s));
        if erased.count_ones() as usize > limit {
            bad.push(true);
            lists.push(None);
            continue;
        }
        let values = code.local_mask(z.values(), x);
        let list = if erased == 0 {
            if !inner.is_codeword_mask(values) {
                return Err(DecodeFailure::Inconsistent);
            }
            LocalList::point(d, values)
        } else {
            let word = ErasedWord::new(BitVector::from_u64(d, values), BitVector::from_u64(d, erased));
            let space = inner.list_decode(&word);
            if space.is_empty() {
                return Err(DecodeFailure::Inconsistent);
            }
            LocalList::new(space)
        };
        bad.push(false);
        lists.push(Some(list));
    }
    Ok(InnerListBank { bad, lists })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::ErasurePattern;
    use crate::graph::BipartiteGraph;
    use crate::inner::make_code;
    use crate::rational::ratio;

    fn tensor() -> ExpanderCode {
        ExpanderCode::build(
            BipartiteGraph::complete_bipartite(3),
            make_code(&"parity:3".parse().unwrap(), 0).unwrap(),
        )
        .unwrap()
    }

    fn params(r: usize) -> DecoderParams {
        DecoderParams::new(r, ratio(1, 2)).unwrap()
    }

    #[test]
    fn no_erasures_gives_points() {
        let code = tensor();
        let z = ReceivedWord::from_codeword(&BitVector::zeros(9));
        let bank = build_inner_lists(&code, &z, &params(2)).unwrap();
        assert_eq!(bank.bad_count(), 0);
        assert!(bank.lists.iter().all(|l| l.as_ref().unwrap().dimension() == 0));
    }

    #[test]
    fn all_erased_gives_all_bad() {
        let code = tensor();
        let z = code.erase(&BitVector::zeros(9), &ErasurePattern::Count(9), 0);
        let bank = build_inner_lists(&code, &z, &params(1)).unwrap();
        assert_eq!(bank.bad_count(), 6);
        // δ_2 = 1 for parity:3, so a fully erased vertex is not bad at r = 2.
        let bank = build_inner_lists(&code, &z, &params(2)).unwrap();
        assert_eq!(bank.bad_count(), 0);
        assert!(bank.lists.iter().all(|l| l.as_ref().unwrap().dimension() == 2));
    }

    #[test]
    fn square_instance() {
        let code = tensor();
        let z = code.erase(&BitVector::zeros(9), &ErasurePattern::Explicit(vec![0, 1, 3, 4]), 0);
        let bank = build_inner_lists(&code, &z, &params(2)).unwrap();
        assert_eq!(bank.bad_count(), 0);
        let dims: Vec<usize> = bank.lists.iter().map(|l| l.as_ref().unwrap().dimension()).collect();
        // Left vertices 0, 1, 2 then right vertices 3, 4, 5.
        assert_eq!(dims, vec![1, 1, 0, 1, 1, 0]);
        let l0 = bank.lists[0].as_ref().unwrap();
        assert_eq!(l0.keys, vec![1, 1, 0]);
        assert_eq!(l0.offsets, 0);
    }

    #[test]
    fn inconsistent_vertex() {
        let code = tensor();
        let z: ReceivedWord = "100?00000".parse().unwrap();
        assert_eq!(
            build_inner_lists(&code, &z, &params(1)),
            Err(DecodeFailure::Inconsistent)
        );
    }

    #[test]
    fn bank_matches_inner_list_decoding() {
        let code = tensor();
        for seed in 0..50 {
            let z = code.erase(&BitVector::zeros(9), &ErasurePattern::Count((seed % 7) as usize), seed);
            let bank = build_inner_lists(&code, &z, &params(1)).unwrap();
            for x in 0..6 {
                let edges = code.local_edges(x);
                let erased = edges.iter().filter(|&&e| z.is_erased(e)).count();
                assert_eq!(bank.bad[x], erased > 2);
                if let Some(l) = &bank.lists[x] {
                    let word = ErasedWord::new(
                        BitVector::zeros(3),
                        BitVector::from_bools(edges.iter().map(|&e| z.is_erased(e))),
                    );
                    assert!(crate::gf2::affine_equal(&l.space, &code.inner().list_decode(&word)));
                }
            }
        }
    }
}

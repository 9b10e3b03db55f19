//! Inner codes `C0 ⊆ F2^d`: construction, (generalized) distances and local
//! erasure decoding.
//!
//! Inner codes are short (`d ≤ 64`), so codewords are handled internally as
//! `u64` masks; the public surface speaks [`BitVector`] and [`AffineSpace`].

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::error::{CodeError, ParseError};
use crate::gf2::{solve_affine, AffineSpace, BitMatrix, BitVector};
use crate::rational::{ratio, Rational};
use crate::rng::SplitMix64;

/// Longest supported inner code.
pub const MAX_INNER_LENGTH: usize = 64;
/// Largest dimension for which the minimum distance is enumerated.
pub const MIN_DISTANCE_DIM_CAP: usize = 24;
/// Largest dimension for which `δ_r`, `r ≥ 2`, is enumerated.
pub const GENERALIZED_DISTANCE_DIM_CAP: usize = 16;
/// Codes up to this length get generalized weights by visiting every support.
pub const SUPPORT_SEARCH_LENGTH_CAP: usize = 16;

/// Recipe for an inner code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodeSpec {
    Repetition(usize),
    Parity(usize),
    Hamming74,
    Full(usize),
    Random { d: usize, k: usize },
    Generator(BitMatrix),
}

impl FromStr for CodeSpec {
    type Err = ParseError;

    /// `repetition:D`, `parity:D`, `hamming74`, `full:D`, `random:D:K`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |i: usize| -> Result<usize, ParseError> {
            parts
                .get(i)
                .ok_or_else(|| ParseError::new(format!("missing parameter in code spec {s:?}")))?
                .parse()
                .map_err(|_| ParseError::new(format!("bad number in code spec {s:?}")))
        };
        match parts[0] {
            "repetition" => Ok(CodeSpec::Repetition(num(1)?)),
            "parity" => Ok(CodeSpec::Parity(num(1)?)),
            "hamming74" => Ok(CodeSpec::Hamming74),
            "full" => Ok(CodeSpec::Full(num(1)?)),
            "random" => Ok(CodeSpec::Random { d: num(1)?, k: num(2)? }),
            other => Err(ParseError::new(format!("unknown code kind {other:?}"))),
        }
    }
}

impl fmt::Display for CodeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeSpec::Repetition(d) => write!(f, "repetition:{d}"),
            CodeSpec::Parity(d) => write!(f, "parity:{d}"),
            CodeSpec::Hamming74 => f.write_str("hamming74"),
            CodeSpec::Full(d) => write!(f, "full:{d}"),
            CodeSpec::Random { d, k } => write!(f, "random:{d}:{k}"),
            CodeSpec::Generator(g) => write!(f, "generator:{}x{}", g.rows(), g.cols()),
        }
    }
}

/// Builds an inner code. `seed` is only consulted by `Random`.
pub fn make_code(spec: &CodeSpec, seed: u64) -> Result<LinearCode, CodeError> {
    let rows: Vec<u64> = match *spec {
        CodeSpec::Repetition(d) => {
            check_length(d)?;
            vec![full_mask(d)]
        }
        CodeSpec::Parity(d) => {
            check_length(d)?;
            if d < 2 {
                return Err(CodeError::InvalidParams("parity code needs d >= 2".into()));
            }
            (0..d - 1).map(|i| 0b11u64 << i).collect()
        }
        CodeSpec::Hamming74 => {
            // Systematic [I4 | P].
            let p = [0b011u64, 0b110, 0b111, 0b101];
            (0..4).map(|i| (1u64 << i) | (p[i] << 4)).collect()
        }
        CodeSpec::Full(d) => {
            check_length(d)?;
            (0..d).map(|i| 1u64 << i).collect()
        }
        CodeSpec::Random { d, k } => {
            check_length(d)?;
            if k == 0 || k > d {
                return Err(CodeError::InvalidParams(format!("need 1 <= k <= d, got k={k}, d={d}")));
            }
            let mut rng = SplitMix64::new(seed);
            loop {
                let rows: Vec<u64> = (0..k).map(|_| rng.next_u64() & full_mask(d)).collect();
                if rank_u64(&rows) == k {
                    break rows;
                }
            }
        }
        CodeSpec::Generator(ref g) => {
            check_length(g.cols())?;
            g.row_vectors().iter().map(BitVector::low_word).collect()
        }
    };
    let d = match *spec {
        CodeSpec::Hamming74 => 7,
        CodeSpec::Repetition(d) | CodeSpec::Parity(d) | CodeSpec::Full(d) => d,
        CodeSpec::Random { d, .. } => d,
        CodeSpec::Generator(ref g) => g.cols(),
    };
    LinearCode::from_rows(d, rows)
}

fn check_length(d: usize) -> Result<(), CodeError> {
    if d == 0 || d > MAX_INNER_LENGTH {
        return Err(CodeError::InvalidParams(format!(
            "inner code length must be in 1..={MAX_INNER_LENGTH}, got {d}"
        )));
    }
    Ok(())
}

#[inline]
fn full_mask(d: usize) -> u64 {
    if d == 64 {
        u64::MAX
    } else {
        (1u64 << d) - 1
    }
}

#[inline]
fn parity(x: u64) -> bool {
    x.count_ones() & 1 == 1
}

/// Reduced xor basis of `u64` masks, pivot = lowest set bit.
#[derive(Debug, Clone, Default)]
struct MaskBasis {
    rows: Vec<u64>,
}

impl MaskBasis {
    fn reduce(&self, mut v: u64) -> u64 {
        for &r in &self.rows {
            let p = r & r.wrapping_neg();
            if v & p != 0 {
                v ^= r;
            }
        }
        v
    }

    fn insert(&mut self, v: u64) -> bool {
        let v = self.reduce(v);
        if v == 0 {
            return false;
        }
        let p = v & v.wrapping_neg();
        for r in &mut self.rows {
            if *r & p != 0 {
                *r ^= v;
            }
        }
        self.rows.push(v);
        true
    }
}

fn rank_u64(rows: &[u64]) -> usize {
    let mut b = MaskBasis::default();
    rows.iter().filter(|&&r| b.insert(r)).count()
}

/// A binary linear code of length `d ≤ 64`.
#[derive(Debug)]
pub struct LinearCode {
    d: usize,
    gen: Vec<u64>,
    par: Vec<u64>,
    generator: BitMatrix,
    parity: BitMatrix,
    min_weight: usize,
    /// `gdist[r-1]` caches the minimum support size of an `r`-dimensional subcode.
    gdist: Vec<OnceLock<usize>>,
}

impl Clone for LinearCode {
    fn clone(&self) -> Self {
        Self {
            d: self.d,
            gen: self.gen.clone(),
            par: self.par.clone(),
            generator: self.generator.clone(),
            parity: self.parity.clone(),
            min_weight: self.min_weight,
            gdist: self.gdist.clone(),
        }
    }
}

impl LinearCode {
    pub fn from_generator(g: &BitMatrix) -> Result<Self, CodeError> {
        make_code(&CodeSpec::Generator(g.clone()), 0)
    }

    fn from_rows(d: usize, gen: Vec<u64>) -> Result<Self, CodeError> {
        let k = gen.len();
        let rank = rank_u64(&gen);
        if rank < k || k == 0 {
            return Err(CodeError::RankDeficient { rank, rows: k });
        }
        if k > MIN_DISTANCE_DIM_CAP {
            return Err(CodeError::DimensionTooLarge {
                dim: k,
                cap: MIN_DISTANCE_DIM_CAP,
            });
        }
        let to_vec = |w: u64| BitVector::from_u64(d, w);
        let generator = BitMatrix::from_rows(d, gen.iter().map(|&w| to_vec(w)).collect());
        let par_vecs = generator.kernel();
        let par: Vec<u64> = par_vecs.iter().map(BitVector::low_word).collect();
        let parity = BitMatrix::from_rows(d, par_vecs);
        let min_weight = enumerate_masks(&gen).skip(1).map(u64::count_ones).min().unwrap_or(0) as usize;
        Ok(Self {
            d,
            gen,
            par,
            generator,
            parity,
            min_weight,
            gdist: (0..k).map(|_| OnceLock::new()).collect(),
        })
    }

    pub fn length(&self) -> usize {
        self.d
    }

    pub fn dimension(&self) -> usize {
        self.gen.len()
    }

    /// `k0 × d` generator matrix.
    pub fn generator(&self) -> &BitMatrix {
        &self.generator
    }

    /// `(d − k0) × d` parity-check matrix.
    pub fn parity(&self) -> &BitMatrix {
        &self.parity
    }

    /// Parity-check rows as masks over the `d` local positions.
    pub fn parity_masks(&self) -> &[u64] {
        &self.par
    }

    pub fn generator_masks(&self) -> &[u64] {
        &self.gen
    }

    pub fn rate(&self) -> Rational {
        ratio(self.dimension() as i128, self.d as i128)
    }

    /// Minimum Hamming weight of a nonzero codeword (`δ·d`).
    pub fn min_weight(&self) -> usize {
        self.min_weight
    }

    /// Relative minimum distance `δ`.
    pub fn min_distance(&self) -> Rational {
        ratio(self.min_weight as i128, self.d as i128)
    }

    /// Minimum support size of an `r`-dimensional subcode (`δ_r·d`).
    pub fn generalized_weight(&self, r: usize) -> Result<usize, CodeError> {
        let k = self.dimension();
        if r == 0 || r > k {
            return Err(CodeError::RankOutOfRange { r, k });
        }
        if r == 1 {
            return Ok(self.min_weight);
        }
        if self.d <= SUPPORT_SEARCH_LENGTH_CAP {
            return Ok(*self.gdist[r - 1].get_or_init(|| self.smallest_support(r)));
        }
        if k > GENERALIZED_DISTANCE_DIM_CAP {
            return Err(CodeError::DimensionTooLarge {
                dim: k,
                cap: GENERALIZED_DISTANCE_DIM_CAP,
            });
        }
        Ok(*self.gdist[r - 1].get_or_init(|| {
            let words: Vec<u64> = enumerate_masks(&self.gen).skip(1).collect();
            min_union_support(
                &words,
                r,
                |w| w.count_ones() as usize,
                |a, b| a | b,
                |b: &mut MaskBasis, w: &u64| b.insert(*w),
            )
        }))
    }

    /// Smallest `|S|` such that the codewords supported on `S` span `r`
    /// dimensions, found by visiting every `S`.
    fn smallest_support(&self, r: usize) -> usize {
        let k = self.dimension();
        let all = full_mask(self.d);
        (0u64..=all)
            .filter(|&s| {
                let outside: Vec<u64> = self.gen.iter().map(|g| g & !s & all).collect();
                k - rank_u64(&outside) >= r
            })
            .map(|s| s.count_ones() as usize)
            .min()
            .unwrap_or(self.d)
    }

    /// Relative `r`-th generalized distance `δ_r`.
    pub fn generalized_distance(&self, r: usize) -> Result<Rational, CodeError> {
        Ok(ratio(self.generalized_weight(r)? as i128, self.d as i128))
    }

    pub fn is_codeword(&self, w: &BitVector) -> bool {
        w.len() == self.d && self.is_codeword_mask(w.low_word())
    }

    pub fn is_codeword_mask(&self, w: u64) -> bool {
        self.par.iter().all(|&h| !parity(h & w))
    }

    /// Every codeword, starting from zero, in Gray-code order.
    pub fn codewords(&self) -> impl Iterator<Item = BitVector> + '_ {
        enumerate_masks(&self.gen).map(move |w| BitVector::from_u64(self.d, w))
    }

    pub fn codeword_masks(&self) -> impl Iterator<Item = u64> + '_ {
        enumerate_masks(&self.gen)
    }

    /// All codewords agreeing with `w` off its erasures, in canonical form.
    pub fn list_decode(&self, w: &ErasedWord) -> AffineSpace {
        assert_eq!(w.len(), self.d, "erased word length must equal code length");
        let k = self.dimension();
        let known: Vec<usize> = (0..self.d).filter(|&i| !w.is_erased(i)).collect();
        // Restrict Gᵀ to the unerased positions and solve for the message.
        let rows: Vec<BitVector> = known
            .iter()
            .map(|&i| BitVector::from_bools(self.gen.iter().map(|g| (g >> i) & 1 == 1)))
            .collect();
        let system = BitMatrix::from_rows(k, rows);
        let rhs = BitVector::from_bools(known.iter().map(|&i| w.value(i)));
        let messages = solve_affine(&system, &rhs);
        messages
            .map(&self.generator.transpose(), &BitVector::zeros(self.d))
            .canonical()
    }

    /// The unique consistent codeword, if there is exactly one.
    pub fn unique_decode(&self, w: &ErasedWord) -> UniqueOutcome {
        let space = self.list_decode(w);
        match space.dim() {
            None => UniqueOutcome::Inconsistent,
            Some(0) => UniqueOutcome::Unique(space.offset().clone()),
            Some(_) => UniqueOutcome::Ambiguous,
        }
    }

    /// How the symbols at `unknown` positions follow from the rest, if they are
    /// determined by them.
    pub fn completion(&self, unknown: u64) -> Option<Completion> {
        let mut rows: Vec<(u64, u64)> = self.par.iter().map(|&h| (h & unknown, h)).collect();
        let mut solved = Vec::new();
        let mut next = 0;
        let mut rest = unknown;
        while rest != 0 {
            let bit = rest & rest.wrapping_neg();
            rest ^= bit;
            let p = (next..rows.len()).find(|&i| rows[i].0 & bit != 0)?;
            rows.swap(next, p);
            let pivot = rows[next];
            for (i, row) in rows.iter_mut().enumerate() {
                if i != next && row.0 & bit != 0 {
                    row.0 ^= pivot.0;
                    row.1 ^= pivot.1;
                }
            }
            next += 1;
        }
        for &(u_part, full) in &rows[..next] {
            let pos = u_part.trailing_zeros() as usize;
            solved.push((pos, full & !unknown));
        }
        solved.sort_unstable_by_key(|&(p, _)| p);
        let checks = rows[next..].iter().map(|&(_, full)| full).filter(|&c| c != 0).collect();
        Some(Completion { solved, checks })
    }

    /// Largest list dimension over erasure patterns of size `e`, with every
    /// pattern visited when `d ≤ exhaustive_limit` and `samples` random ones
    /// otherwise. The list for a pattern `S` is a coset of the subcode
    /// supported on `S`.
    pub fn max_list_dim(&self, e: usize, exhaustive_limit: usize, samples: usize, seed: u64) -> usize {
        let k = self.dimension();
        let dim_for = |erased: u64| -> usize {
            let known = !erased & full_mask(self.d);
            k - rank_u64(&self.gen.iter().map(|g| g & known).collect::<Vec<_>>())
        };
        if self.d <= exhaustive_limit {
            (0u64..(1u64 << self.d))
                .filter(|m| m.count_ones() as usize == e)
                .map(dim_for)
                .max()
                .unwrap_or(0)
        } else {
            let mut rng = SplitMix64::new(seed);
            (0..samples)
                .map(|_| {
                    let s = rng.sample_subset(self.d, e);
                    dim_for(s.iter().fold(0u64, |m, &i| m | (1 << i)))
                })
                .max()
                .unwrap_or(0)
        }
    }
}

/// Erasure-list-decodability from `e` erasures with list size `list_cap`,
/// decided by inspecting erasure patterns directly.
pub fn list_decodable_by_search(code: &LinearCode, e: usize, list_cap: u64, seed: u64) -> bool {
    let dim = code.max_list_dim(e, 16, 4096, seed);
    (1u64 << dim) <= list_cap
}

/// Outcome of unique erasure decoding at one vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UniqueOutcome {
    Unique(BitVector),
    Ambiguous,
    Inconsistent,
}

/// Linear recovery rule for a fixed set of unknown positions: each unknown
/// symbol is the parity of the known symbols selected by its mask, and every
/// check mask must have even parity on a consistent word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Completion {
    pub solved: Vec<(usize, u64)>,
    pub checks: Vec<u64>,
}

impl Completion {
    /// Values for the unknown positions given the known symbols (bits of
    /// `known` at unknown positions are ignored). `None` if a check fails.
    pub fn apply(&self, known: u64) -> Option<Vec<(usize, bool)>> {
        if self.checks.iter().any(|&c| parity(c & known)) {
            return None;
        }
        Some(self.solved.iter().map(|&(p, m)| (p, parity(m & known))).collect())
    }
}

/// Gray-code walk over the span of `rows`, starting at zero.
fn enumerate_masks(rows: &[u64]) -> impl Iterator<Item = u64> + '_ {
    let k = rows.len();
    let mut cur = 0u64;
    (0u64..(1u64 << k)).map(move |i| {
        if i > 0 {
            cur ^= rows[i.trailing_zeros() as usize];
        }
        cur
    })
}

/// Minimum union-of-supports over `r` linearly independent words drawn from
/// `words` (which must contain every nonzero element of the code).
///
/// Depth-first over index-increasing tuples of words sorted by weight; a branch
/// is cut as soon as its partial union reaches the best value found.
pub fn min_union_support<W, B>(
    words: &[W],
    r: usize,
    weight: impl Fn(&W) -> usize,
    union: impl Fn(&W, &W) -> W,
    insert: impl Fn(&mut B, &W) -> bool,
) -> usize
where
    W: Clone,
    B: Clone + Default,
{
    let mut sorted: Vec<&W> = words.iter().collect();
    sorted.sort_by_key(|w| weight(w));
    let mut best = usize::MAX;

    struct Ctx<'a, W, B, F1, F2, F3> {
        sorted: Vec<&'a W>,
        r: usize,
        weight: F1,
        union: F2,
        insert: F3,
        _b: std::marker::PhantomData<B>,
    }

    fn dfs<W: Clone, B: Clone, F1, F2, F3>(
        ctx: &Ctx<'_, W, B, F1, F2, F3>,
        start: usize,
        depth: usize,
        acc: Option<&W>,
        basis: &B,
        best: &mut usize,
    ) where
        F1: Fn(&W) -> usize,
        F2: Fn(&W, &W) -> W,
        F3: Fn(&mut B, &W) -> bool,
    {
        for i in start..ctx.sorted.len() {
            let w = ctx.sorted[i];
            if (ctx.weight)(w) >= *best {
                break;
            }
            let merged = match acc {
                Some(a) => (ctx.union)(a, w),
                None => w.clone(),
            };
            let size = (ctx.weight)(&merged);
            if size >= *best {
                continue;
            }
            let mut next = basis.clone();
            if !(ctx.insert)(&mut next, w) {
                continue;
            }
            if depth + 1 == ctx.r {
                *best = size;
            } else {
                dfs(ctx, i + 1, depth + 1, Some(&merged), &next, best);
            }
        }
    }

    let ctx = Ctx {
        sorted,
        r,
        weight,
        union,
        insert,
        _b: std::marker::PhantomData::<B>,
    };
    dfs(&ctx, 0, 0, None, &B::default(), &mut best);
    best
}

/// A local word over `{0, 1, ⊥}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ErasedWord {
    values: BitVector,
    erased: BitVector,
}

impl ErasedWord {
    pub fn new(values: BitVector, erased: BitVector) -> Self {
        assert_eq!(values.len(), erased.len());
        let values = values.and(&erased.xor(&BitVector::ones(erased.len())));
        Self { values, erased }
    }

    pub fn from_codeword(c: &BitVector) -> Self {
        Self::new(c.clone(), BitVector::zeros(c.len()))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_erased(&self, i: usize) -> bool {
        self.erased.get(i)
    }

    /// Value at `i`; zero at erased positions.
    pub fn value(&self, i: usize) -> bool {
        self.values.get(i)
    }

    pub fn symbol(&self, i: usize) -> Option<bool> {
        (!self.is_erased(i)).then(|| self.value(i))
    }

    pub fn erasure_count(&self) -> usize {
        self.erased.count_ones()
    }

    pub fn erased_mask(&self) -> &BitVector {
        &self.erased
    }
}

impl fmt::Display for ErasedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            f.write_str(match self.symbol(i) {
                None => "?",
                Some(true) => "1",
                Some(false) => "0",
            })?;
        }
        Ok(())
    }
}

impl fmt::Debug for ErasedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ErasedWord({self})")
    }
}

impl FromStr for ErasedWord {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut values = Vec::new();
        let mut erased = Vec::new();
        for c in s.trim().chars() {
            let (v, e) = match c {
                '0' => (false, false),
                '1' => (true, false),
                '?' => (false, true),
                other => return Err(ParseError::new(format!("invalid symbol {other:?}"))),
            };
            values.push(v);
            erased.push(e);
        }
        Ok(Self::new(BitVector::from_bools(values), BitVector::from_bools(erased)))
    }
}

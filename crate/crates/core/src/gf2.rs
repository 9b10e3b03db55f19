//! Bit-packed GF(2) vectors, matrices and affine solution sets.
//!
//! Coordinates are packed 64 per `u64` word, little-endian within a word:
//! coordinate `i` lives at bit `i % 64` of word `i / 64`. Bits past the logical
//! length in the last word are always zero, so equality and hashing can work
//! on the raw words.

use std::fmt;
use std::str::FromStr;

use crate::error::ParseError;

const WORD_BITS: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

/// A vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self {
            len,
            words: vec![u64::MAX; words_for(len)],
        };
        v.clear_padding();
        v
    }

    /// The `i`-th standard basis vector.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut words = Vec::new();
        let mut len = 0;
        for b in bits {
            if len % WORD_BITS == 0 {
                words.push(0);
            }
            if b {
                words[len / WORD_BITS] |= 1 << (len % WORD_BITS);
            }
            len += 1;
        }
        Self { len, words }
    }

    /// Builds a vector from the low `len` bits of `value` (bit `i` is coordinate `i`).
    pub fn from_u64(len: usize, value: u64) -> Self {
        assert!(len <= WORD_BITS);
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = value;
            v.clear_padding();
        }
        v
    }

    /// Low 64 coordinates packed into a word.
    pub fn low_word(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "length mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn and(&self, other: &BitVector) -> BitVector {
        assert_eq!(self.len, other.len, "length mismatch in and");
        Self {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    pub fn or(&self, other: &BitVector) -> BitVector {
        assert_eq!(self.len, other.len, "length mismatch in or");
        Self {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect(),
        }
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in dot");
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() % 2 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Index of the lowest set coordinate.
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD_BITS + w.trailing_zeros() as usize)
    }

    /// Indices of set coordinates in increasing order.
    pub fn ones_iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let tz = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(wi * WORD_BITS + tz)
                }
            })
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Restriction to the given coordinates, in the given order.
    pub fn select(&self, coords: &[usize]) -> BitVector {
        BitVector::from_bools(coords.iter().map(|&c| self.get(c)))
    }

    /// Appends one coordinate.
    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(WORD_BITS) {
            self.words.push(0);
        }
        self.len += 1;
        let i = self.len - 1;
        self.set(i, bit);
    }

    fn clear_padding(&mut self) {
        let rem = self.len % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

/// Lexicographic in coordinate order, matching the string form.
impl Ord for BitVector {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        for (a, b) in self.words.iter().zip(&other.words) {
            let diff = a ^ b;
            if diff != 0 {
                let low = diff & diff.wrapping_neg();
                return if a & low == 0 {
                    std::cmp::Ordering::Less
                } else {
                    std::cmp::Ordering::Greater
                };
            }
        }
        self.len.cmp(&other.len)
    }
}

impl PartialOrd for BitVector {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl FromStr for BitVector {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(ParseError::new(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(BitVector::from_bools)
    }
}

/// A dense row-major matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BitVector>,
}

/// Output of [`BitMatrix::rref`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub reduced: BitMatrix,
    pub pivot_columns: Vec<usize>,
    pub rank: usize,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BitVector::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            data: (0..n).map(|i| BitVector::unit(n, i)).collect(),
        }
    }

    /// Builds a matrix from rows; every row must have length `cols`.
    pub fn from_rows(cols: usize, rows: Vec<BitVector>) -> Self {
        for r in &rows {
            assert_eq!(r.len(), cols, "row length does not match column count");
        }
        Self {
            rows: rows.len(),
            cols,
            data: rows,
        }
    }

    /// Builds a `rows × columns.len()` matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(rows: usize, columns: &[BitVector]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length does not match row count");
            for i in c.ones_iter() {
                m.data[i].set(j, true);
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r].get(c)
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.data[r].set(c, value);
    }

    pub fn row(&self, r: usize) -> &BitVector {
        &self.data[r]
    }

    pub fn row_vectors(&self) -> &[BitVector] {
        &self.data
    }

    pub fn into_rows(self) -> Vec<BitVector> {
        self.data
    }

    pub fn column(&self, c: usize) -> BitVector {
        BitVector::from_bools(self.data.iter().map(|r| r.get(c)))
    }

    pub fn columns(&self) -> Vec<BitVector> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for (i, row) in self.data.iter().enumerate() {
            for j in row.ones_iter() {
                t.data[j].set(i, true);
            }
        }
        t
    }

    /// `self · x`.
    pub fn mul_vec(&self, x: &BitVector) -> BitVector {
        assert_eq!(self.cols, x.len(), "dimension mismatch in mul_vec");
        BitVector::from_bools(self.data.iter().map(|r| r.dot(x)))
    }

    /// `self · other`.
    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in mul");
        let rows = self
            .data
            .iter()
            .map(|r| {
                let mut acc = BitVector::zeros(other.cols);
                for k in r.ones_iter() {
                    acc.xor_assign(&other.data[k]);
                }
                acc
            })
            .collect();
        BitMatrix {
            rows: self.rows,
            cols: other.cols,
            data: rows,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BitVector::is_zero)
    }

    /// Reduced row-echelon form by Gauss–Jordan elimination.
    pub fn rref(&self) -> Rref {
        let mut reduced = self.clone();
        let pivots = reduced.rref_in_place();
        Rref {
            rank: pivots.len(),
            pivot_columns: pivots,
            reduced,
        }
    }

    /// Row-reduces in place; returns pivot columns. Zero rows end up at the bottom.
    fn rref_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut next = 0;
        for col in 0..self.cols {
            if next == self.rows {
                break;
            }
            let Some(p) = (next..self.rows).find(|&r| self.data[r].get(col)) else {
                continue;
            };
            self.data.swap(next, p);
            let pivot_row = self.data[next].clone();
            for r in 0..self.rows {
                if r != next && self.data[r].get(col) {
                    self.data[r].xor_assign(&pivot_row);
                }
            }
            pivots.push(col);
            next += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Basis of `{x : self·x = 0}`, one vector per free column.
    pub fn kernel(&self) -> Vec<BitVector> {
        let Rref {
            reduced, pivot_columns, ..
        } = self.rref();
        kernel_from_rref(&reduced, &pivot_columns, self.cols)
    }
}

fn kernel_from_rref(reduced: &BitMatrix, pivots: &[usize], cols: usize) -> Vec<BitVector> {
    let mut is_pivot = vec![false; cols];
    for &p in pivots {
        is_pivot[p] = true;
    }
    (0..cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = BitVector::unit(cols, free);
            for (i, &p) in pivots.iter().enumerate() {
                if reduced.get(i, free) {
                    v.set(p, true);
                }
            }
            v
        })
        .collect()
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.data {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in &self.data {
            writeln!(f, "  {r}")?;
        }
        Ok(())
    }
}

impl FromStr for BitMatrix {
    type Err = ParseError;

    /// One row per non-empty line, characters `0`/`1`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let rows: Vec<BitVector> = s
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(str::parse)
            .collect::<Result<_, _>>()?;
        let cols = rows.first().map_or(0, BitVector::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(ParseError::new("rows have differing lengths"));
        }
        Ok(BitMatrix::from_rows(cols, rows))
    }
}

/// Incrementally maintained reduced basis of a row space.
///
/// Rows are kept fully reduced against each other, indexed by their pivot
/// (lowest set coordinate).
#[derive(Debug, Clone)]
pub struct RowBasis {
    width: usize,
    rows: Vec<BitVector>,
    pivots: Vec<usize>,
}

impl RowBasis {
    pub fn new(width: usize) -> Self {
        Self {
            width,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn from_vectors<'a, I: IntoIterator<Item = &'a BitVector>>(width: usize, vs: I) -> Self {
        let mut b = Self::new(width);
        for v in vs {
            b.insert(v.clone());
        }
        b
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the basis, clearing every pivot coordinate.
    pub fn reduce(&self, v: &mut BitVector) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v.get(p) {
                v.xor_assign(row);
            }
        }
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        let mut w = v.clone();
        self.reduce(&mut w);
        w.is_zero()
    }

    /// Adds `v` to the span. Returns false when `v` was already in it.
    pub fn insert(&mut self, mut v: BitVector) -> bool {
        assert_eq!(v.len(), self.width);
        self.reduce(&mut v);
        let Some(p) = v.first_one() else {
            return false;
        };
        for row in &mut self.rows {
            if row.get(p) {
                row.xor_assign(&v);
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, v);
        true
    }

    /// Reduced basis rows in increasing pivot order.
    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }
}

/// An affine subspace `{basis·x + offset}` of `F2^ambient`, or the empty set.
///
/// The basis is stored column-wise: an `ambient × dim` matrix whose columns are
/// linearly independent.
#[derive(Clone, PartialEq, Eq)]
pub struct AffineSpace {
    ambient: usize,
    basis: BitMatrix,
    offset: BitVector,
    empty: bool,
}

impl AffineSpace {
    pub fn empty(ambient: usize) -> Self {
        Self {
            ambient,
            basis: BitMatrix::zeros(ambient, 0),
            offset: BitVector::zeros(ambient),
            empty: true,
        }
    }

    pub fn point(offset: BitVector) -> Self {
        let ambient = offset.len();
        Self {
            ambient,
            basis: BitMatrix::zeros(ambient, 0),
            offset,
            empty: false,
        }
    }

    pub fn full(ambient: usize) -> Self {
        Self::from_columns(
            BitVector::zeros(ambient),
            (0..ambient).map(|i| BitVector::unit(ambient, i)).collect(),
        )
    }

    /// Builds `offset + span(columns)`, discarding dependent columns.
    pub fn from_columns(offset: BitVector, columns: Vec<BitVector>) -> Self {
        let ambient = offset.len();
        let mut seen = RowBasis::new(ambient);
        let independent: Vec<BitVector> = columns.into_iter().filter(|c| seen.insert(c.clone())).collect();
        Self {
            ambient,
            basis: BitMatrix::from_columns(ambient, &independent),
            offset,
            empty: false,
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }

    /// Dimension of the space; `None` for the empty set.
    pub fn dim(&self) -> Option<usize> {
        (!self.empty).then_some(self.basis.cols())
    }

    pub fn basis(&self) -> &BitMatrix {
        &self.basis
    }

    pub fn basis_columns(&self) -> Vec<BitVector> {
        self.basis.columns()
    }

    pub fn offset(&self) -> &BitVector {
        &self.offset
    }

    fn span(&self) -> RowBasis {
        RowBasis::from_vectors(self.ambient, self.basis_columns().iter())
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        !self.empty && self.span().contains(&v.xor(&self.offset))
    }

    /// Number of elements, if it fits in a `u128`.
    pub fn size(&self) -> u128 {
        match self.dim() {
            None => 0,
            Some(k) if k < 128 => 1u128 << k,
            Some(_) => u128::MAX,
        }
    }

    /// All elements, in Gray-code order. Only sensible for small dimension.
    pub fn enumerate(&self) -> Vec<BitVector> {
        let Some(k) = self.dim() else {
            return Vec::new();
        };
        assert!(k <= 24, "refusing to enumerate an affine space of dimension {k}");
        let cols = self.basis_columns();
        let mut cur = self.offset.clone();
        let mut out = Vec::with_capacity(1 << k);
        out.push(cur.clone());
        for i in 1u64..(1u64 << k) {
            cur.xor_assign(&cols[i.trailing_zeros() as usize]);
            out.push(cur.clone());
        }
        out
    }

    /// Canonical representative: reduced-echelon basis (pivot = lowest
    /// coordinate) and the lexicographically least offset, which is the unique
    /// element vanishing on every pivot coordinate.
    pub fn canonical(&self) -> AffineSpace {
        if self.empty {
            return self.clone();
        }
        let span = self.span();
        let mut offset = self.offset.clone();
        span.reduce(&mut offset);
        AffineSpace {
            ambient: self.ambient,
            basis: BitMatrix::from_columns(self.ambient, span.rows()),
            offset,
            empty: false,
        }
    }

    /// Image under `x ↦ M·x + shift` where `M` is `out × ambient`.
    pub fn map(&self, m: &BitMatrix, shift: &BitVector) -> AffineSpace {
        if self.empty {
            return AffineSpace::empty(m.rows());
        }
        let offset = m.mul_vec(&self.offset).xor(shift);
        let columns = self.basis_columns().iter().map(|c| m.mul_vec(c)).collect();
        AffineSpace::from_columns(offset, columns)
    }
}

impl fmt::Debug for AffineSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.empty {
            return write!(f, "AffineSpace(empty in F2^{})", self.ambient);
        }
        write!(f, "AffineSpace(offset {}, basis [", self.offset)?;
        for (i, c) in self.basis_columns().iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("])")
    }
}

/// Full solution set of `M·x = y`.
pub fn solve_affine(m: &BitMatrix, y: &BitVector) -> AffineSpace {
    assert_eq!(m.rows(), y.len(), "right-hand side length must equal row count");
    let cols = m.cols();
    // Augment with y as an extra column.
    let aug_rows: Vec<BitVector> = m
        .row_vectors()
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.push(y.get(i));
            row
        })
        .collect();
    let mut aug = BitMatrix::from_rows(cols + 1, aug_rows);
    let pivots = aug.rref_in_place();
    if pivots.last() == Some(&cols) {
        return AffineSpace::empty(cols);
    }
    let mut offset = BitVector::zeros(cols);
    for (i, &p) in pivots.iter().enumerate() {
        if aug.get(i, cols) {
            offset.set(p, true);
        }
    }
    let kernel = kernel_from_rref(&aug, &pivots, cols);
    AffineSpace {
        ambient: cols,
        basis: BitMatrix::from_columns(cols, &kernel),
        offset,
        empty: false,
    }
}

/// Set equality of two affine spaces with the same ambient dimension.
pub fn affine_equal(a: &AffineSpace, b: &AffineSpace) -> bool {
    assert_eq!(a.ambient(), b.ambient(), "ambient dimensions differ");
    match (a.dim(), b.dim()) {
        (None, None) => true,
        (Some(da), Some(db)) if da == db => {
            let span_a = a.span();
            let span_b = b.span();
            let shift = a.offset().xor(b.offset());
            span_a.contains(&shift)
                && span_b.contains(&shift)
                && b.basis_columns().iter().all(|c| span_a.contains(c))
                && a.basis_columns().iter().all(|c| span_b.contains(c))
        }
        _ => false,
    }
}

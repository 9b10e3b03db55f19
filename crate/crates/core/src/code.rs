//! The expander code `C(G, C0)`: edge labelings of a bipartite graph whose view
//! at every vertex is a codeword of the inner code.
//!
//! Parity-check rows are never stored densely. Row `r` belongs to vertex
//! `r / m` and inner check `r % m`, where `m = d − k0`; vertices are numbered
//! left side first (`0..n`), then right (`n..2n`).

use std::fmt;
use std::str::FromStr;

use crate::error::{CodeError, ParseError};
use crate::gf2::{solve_affine, AffineSpace, BitMatrix, BitVector, RowBasis};
use crate::graph::BipartiteGraph;
use crate::inner::{min_union_support, LinearCode};
use crate::rational::Rational;
use crate::rng::SplitMix64;

/// Largest block length for the dense oracle and kernel computations.
pub const ORACLE_CAP: usize = 4096;
/// Largest code dimension that [`ExpanderCode::enumerate_codewords`] walks.
pub const ENUMERATION_CAP: usize = 20;

#[derive(Debug, Clone)]
pub struct ExpanderCode {
    graph: BipartiteGraph,
    inner: LinearCode,
    /// `vertex_edges[x·d + s]` = global id of the edge at slot `s` of vertex `x`.
    vertex_edges: Vec<usize>,
}

impl ExpanderCode {
    pub fn build(graph: BipartiteGraph, inner: LinearCode) -> Result<Self, CodeError> {
        if inner.length() != graph.d() {
            return Err(CodeError::LengthMismatch {
                expected: graph.d(),
                got: inner.length(),
            });
        }
        let vertex_edges = (0..graph.vertex_count())
            .flat_map(|x| graph.incident(x).collect::<Vec<_>>())
            .collect();
        Ok(Self {
            graph,
            inner,
            vertex_edges,
        })
    }

    pub fn graph(&self) -> &BipartiteGraph {
        &self.graph
    }

    pub fn inner(&self) -> &LinearCode {
        &self.inner
    }

    /// Block length `N = n·d`.
    pub fn block_length(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    /// Edges at vertex `x` in slot order.
    #[inline]
    pub fn local_edges(&self, x: usize) -> &[usize] {
        let d = self.graph.d();
        &self.vertex_edges[x * d..(x + 1) * d]
    }

    /// Inner parity checks per vertex.
    pub fn checks_per_vertex(&self) -> usize {
        self.inner.length() - self.inner.dimension()
    }

    pub fn parity_rows(&self) -> usize {
        self.vertex_count() * self.checks_per_vertex()
    }

    /// Entry `(row, col)` of the parity-check matrix `H`, in O(1).
    pub fn parity_entry(&self, row: usize, col: usize) -> Result<bool, CodeError> {
        let rows = self.parity_rows();
        let n_cols = self.block_length();
        if row >= rows || col >= n_cols {
            return Err(CodeError::InvalidParams(format!(
                "parity entry ({row}, {col}) outside {rows}x{n_cols}"
            )));
        }
        let m = self.checks_per_vertex();
        let (x, j) = (row / m, row % m);
        let (l, r) = self.graph.endpoints(col);
        if x != l && x != r {
            return Ok(false);
        }
        let slot = self.graph.slot_of(col, x);
        Ok((self.inner.parity_masks()[j] >> slot) & 1 == 1)
    }

    /// Support (global edge ids) of parity row `row`.
    pub fn parity_row_support(&self, row: usize) -> impl Iterator<Item = usize> + '_ {
        let m = self.checks_per_vertex();
        let (x, j) = (row / m, row % m);
        let mask = self.inner.parity_masks()[j];
        let edges = self.local_edges(x);
        (0..self.graph.d())
            .filter(move |&s| (mask >> s) & 1 == 1)
            .map(move |s| edges[s])
    }

    /// Dense `H`; only for small codes.
    pub fn parity_matrix(&self) -> BitMatrix {
        let n_cols = self.block_length();
        let rows = (0..self.parity_rows())
            .map(|r| {
                let mut row = BitVector::zeros(n_cols);
                for e in self.parity_row_support(r) {
                    row.set(e, true);
                }
                row
            })
            .collect();
        BitMatrix::from_rows(n_cols, rows)
    }

    /// Local view of `y` at vertex `x` as a mask over slots.
    #[inline]
    pub fn local_mask(&self, y: &BitVector, x: usize) -> u64 {
        self.local_edges(x)
            .iter()
            .enumerate()
            .fold(0u64, |m, (s, &e)| if y.get(e) { m | (1 << s) } else { m })
    }

    pub fn is_codeword(&self, y: &BitVector) -> Result<bool, CodeError> {
        if y.len() != self.block_length() {
            return Err(CodeError::LengthMismatch {
                expected: self.block_length(),
                got: y.len(),
            });
        }
        Ok((0..self.vertex_count()).all(|x| self.inner.is_codeword_mask(self.local_mask(y, x))))
    }

    fn check_oracle_size(&self) -> Result<(), CodeError> {
        if self.block_length() > ORACLE_CAP {
            return Err(CodeError::DimensionTooLarge {
                dim: self.block_length(),
                cap: ORACLE_CAP,
            });
        }
        Ok(())
    }

    /// Basis of `C = Ker(H)` by dense elimination.
    pub fn kernel_basis(&self) -> Result<Vec<BitVector>, CodeError> {
        self.check_oracle_size()?;
        Ok(self.parity_matrix().kernel())
    }

    pub fn dimension(&self) -> Result<usize, CodeError> {
        Ok(self.kernel_basis()?.len())
    }

    /// Uniform codeword: a random combination of a kernel basis.
    pub fn sample_codeword(&self, basis: &[BitVector], seed: u64) -> BitVector {
        let mut rng = SplitMix64::new(seed);
        let mut c = BitVector::zeros(self.block_length());
        for b in basis {
            if rng.next_bool() {
                c.xor_assign(b);
            }
        }
        c
    }

    /// Every codeword, starting from zero, in Gray-code order.
    pub fn enumerate_codewords(&self) -> Result<Vec<BitVector>, CodeError> {
        let basis = self.kernel_basis()?;
        if basis.len() > ENUMERATION_CAP {
            return Err(CodeError::DimensionTooLarge {
                dim: basis.len(),
                cap: ENUMERATION_CAP,
            });
        }
        Ok(AffineSpace::from_columns(BitVector::zeros(self.block_length()), basis).enumerate())
    }

    /// `r`-th generalized Hamming weight of `C`, by search over all codewords.
    pub fn generalized_weight(&self, r: usize) -> Result<usize, CodeError> {
        let words: Vec<BitVector> = self
            .enumerate_codewords()?
            .into_iter()
            .filter(|w| !w.is_zero())
            .collect();
        let k = (words.len() + 1).trailing_zeros() as usize;
        if r == 0 || r > k {
            return Err(CodeError::RankOutOfRange { r, k });
        }
        #[derive(Clone, Default)]
        struct Span(Option<RowBasis>);
        Ok(min_union_support(
            &words,
            r,
            |w: &BitVector| w.count_ones(),
            |a: &BitVector, b: &BitVector| a.or(b),
            |s: &mut Span, w: &BitVector| s.0.get_or_insert_with(|| RowBasis::new(w.len())).insert(w.clone()),
        ))
    }

    /// `δ_r(C)` as a fraction of the block length.
    pub fn generalized_distance(&self, r: usize) -> Result<Rational, CodeError> {
        let w = self.generalized_weight(r)?;
        Ok(Rational::new(w as i128, self.block_length() as i128))
    }

    /// Ground-truth list decoding: solve `H·y = 0` over the erased coordinates
    /// with every unerased coordinate fixed to its received value.
    pub fn oracle_list_decode(&self, z: &ReceivedWord) -> Result<AffineSpace, CodeError> {
        self.check_oracle_size()?;
        let n_cols = self.block_length();
        if z.len() != n_cols {
            return Err(CodeError::LengthMismatch {
                expected: n_cols,
                got: z.len(),
            });
        }
        let unknowns: Vec<usize> = (0..n_cols).filter(|&e| z.is_erased(e)).collect();
        let mut column_of = vec![usize::MAX; n_cols];
        for (k, &e) in unknowns.iter().enumerate() {
            column_of[e] = k;
        }
        let mut rows = Vec::with_capacity(self.parity_rows());
        let mut rhs = Vec::with_capacity(self.parity_rows());
        for r in 0..self.parity_rows() {
            let mut row = BitVector::zeros(unknowns.len());
            let mut constant = false;
            for e in self.parity_row_support(r) {
                if z.is_erased(e) {
                    row.set(column_of[e], true);
                } else {
                    constant ^= z.value(e);
                }
            }
            rows.push(row);
            rhs.push(constant);
        }
        let system = BitMatrix::from_rows(unknowns.len(), rows);
        let solutions = solve_affine(&system, &BitVector::from_bools(rhs));
        if solutions.is_empty() {
            return Ok(AffineSpace::empty(n_cols));
        }
        let embed = |x: &BitVector, base: &BitVector| {
            let mut out = base.clone();
            for k in x.ones_iter() {
                out.flip(unknowns[k]);
            }
            out
        };
        let offset = embed(solutions.offset(), z.values());
        let zero = BitVector::zeros(n_cols);
        let columns = solutions.basis_columns().iter().map(|c| embed(c, &zero)).collect();
        Ok(AffineSpace::from_columns(offset, columns))
    }

    /// Erases `pattern` from `c`.
    pub fn erase(&self, c: &BitVector, pattern: &ErasurePattern, seed: u64) -> ReceivedWord {
        let n = self.block_length();
        assert_eq!(c.len(), n);
        let ids = pattern.resolve(n, seed);
        let mut erased = BitVector::zeros(n);
        for e in ids {
            erased.set(e, true);
        }
        ReceivedWord::new(c.clone(), erased)
    }
}

/// Which coordinates a channel erases.
#[derive(Debug, Clone, PartialEq)]
pub enum ErasurePattern {
    /// Exactly this many, uniformly chosen.
    Count(usize),
    /// `round(p·N)` coordinates, uniformly chosen.
    Rate(f64),
    Explicit(Vec<usize>),
}

impl ErasurePattern {
    pub fn resolve(&self, n: usize, seed: u64) -> Vec<usize> {
        match self {
            ErasurePattern::Count(k) => SplitMix64::new(seed).sample_subset(n, (*k).min(n)),
            ErasurePattern::Rate(p) => {
                let k = ((p.clamp(0.0, 1.0) * n as f64).round() as usize).min(n);
                SplitMix64::new(seed).sample_subset(n, k)
            }
            ErasurePattern::Explicit(ids) => {
                let mut ids: Vec<usize> = ids.iter().copied().filter(|&e| e < n).collect();
                ids.sort_unstable();
                ids.dedup();
                ids
            }
        }
    }
}

/// A received word over `{0, 1, ⊥}`, indexed by global edge id.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ReceivedWord {
    values: BitVector,
    erased: BitVector,
    erasures: usize,
}

impl ReceivedWord {
    /// Values at erased positions are cleared.
    pub fn new(values: BitVector, erased: BitVector) -> Self {
        assert_eq!(values.len(), erased.len());
        let mut values = values;
        for e in erased.ones_iter() {
            values.set(e, false);
        }
        let erasures = erased.count_ones();
        Self {
            values,
            erased,
            erasures,
        }
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

    #[inline]
    pub fn is_erased(&self, e: usize) -> bool {
        self.erased.get(e)
    }

    /// Value at `e`; zero at erasures.
    #[inline]
    pub fn value(&self, e: usize) -> bool {
        self.values.get(e)
    }

    pub fn symbol(&self, e: usize) -> Option<bool> {
        (!self.is_erased(e)).then(|| self.value(e))
    }

    pub fn values(&self) -> &BitVector {
        &self.values
    }

    pub fn erased_mask(&self) -> &BitVector {
        &self.erased
    }

    pub fn erasure_count(&self) -> usize {
        self.erasures
    }

    /// Whether `y` matches every unerased symbol.
    pub fn agrees_with(&self, y: &BitVector) -> bool {
        y.len() == self.len()
            && y.words()
                .iter()
                .zip(self.values.words())
                .zip(self.erased.words())
                .all(|((a, b), m)| (a ^ b) & !m == 0)
    }
}

impl fmt::Display for ReceivedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len())
            .map(|e| match self.symbol(e) {
                None => '?',
                Some(true) => '1',
                Some(false) => '0',
            })
            .collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for ReceivedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ReceivedWord({self})")
    }
}

impl FromStr for ReceivedWord {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut values = BitVector::zeros(0);
        let mut erased = BitVector::zeros(0);
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
        Ok(Self::new(values, erased))
    }
}

/// `{L·x + ℓ : x ∈ F2^a}` with independent columns of `L`.
#[derive(Clone, PartialEq, Eq)]
pub struct ListDescription {
    pub l: BitMatrix,
    pub ell: BitVector,
}

impl ListDescription {
    /// Column-reduces `columns` so the result has independent columns.
    pub fn new(ell: BitVector, columns: Vec<BitVector>) -> Self {
        let space = AffineSpace::from_columns(ell, columns).canonical();
        Self::from_space(&space).expect("non-empty space")
    }

    pub fn from_space(space: &AffineSpace) -> Option<Self> {
        if space.is_empty() {
            return None;
        }
        Some(Self {
            l: space.basis().clone(),
            ell: space.offset().clone(),
        })
    }

    pub fn dimension(&self) -> usize {
        self.l.cols()
    }

    pub fn block_length(&self) -> usize {
        self.ell.len()
    }

    pub fn to_space(&self) -> AffineSpace {
        AffineSpace::from_columns(self.ell.clone(), self.l.columns())
    }

    /// `list N a`, then `ℓ`, then one line per column of `L`.
    pub fn to_text(&self) -> String {
        let mut s = format!("list {} {}\n{}\n", self.block_length(), self.dimension(), self.ell);
        for c in self.l.columns() {
            s.push_str(&c.to_string());
            s.push('\n');
        }
        s
    }
}

impl fmt::Debug for ListDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ListDescription(N={}, a={})", self.block_length(), self.dimension())
    }
}

impl FromStr for ListDescription {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lines = s.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| ParseError::new("empty list file"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let ["list", n, a] = fields[..] else {
            return Err(ParseError::new(format!("bad list header {header:?}")));
        };
        let n: usize = n.parse().map_err(|_| ParseError::new("bad block length"))?;
        let a: usize = a.parse().map_err(|_| ParseError::new("bad dimension"))?;
        let ell: BitVector = lines
            .next()
            .ok_or_else(|| ParseError::new("missing offset line"))?
            .parse()?;
        let cols: Vec<BitVector> = lines.map(str::parse).collect::<Result<_, _>>()?;
        if ell.len() != n || cols.len() != a || cols.iter().any(|c| c.len() != n) {
            return Err(ParseError::new("list file dimensions do not match its header"));
        }
        Ok(Self {
            l: BitMatrix::from_columns(n, &cols),
            ell,
        })
    }
}

//! Dense GF(2) linear algebra on bit-packed row words.
//!
//! Matrices are stored row-major with 64 entries per word, so row addition
//! is a word-parallel XOR. Rank-style operations work on a private copy and
//! never mutate the input; every value here is safe to share across threads.

use std::fmt;

use thiserror::Error;

const WORD_BITS: usize = 64;

/// Cap on the number of syndromes held in memory during the
/// meet-in-the-middle stage of [`BinaryMatrix::min_distance`].
const MITM_CAP: u64 = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("minimum-distance search exceeded its budget (no codeword of weight <= {0} found)")]
    ExceedsBudget(usize),
    #[error("code contains no nonzero codeword")]
    EmptyCode,
}

/// A packed binary vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryVector {
    len: usize,
    bits: Vec<u64>,
}

impl BinaryVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            bits: vec![0; len.div_ceil(WORD_BITS)],
        }
    }

    /// Vector with ones exactly at the given positions.
    pub fn from_support(len: usize, support: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in support {
            v.set(i, true);
        }
        v
    }

    pub fn from_bools(entries: &[bool]) -> Self {
        let mut v = Self::zeros(entries.len());
        for (i, &b) in entries.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "index {i} out of range for length {}", self.len);
        (self.bits[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.bits[i / WORD_BITS] |= mask;
        } else {
            self.bits[i / WORD_BITS] &= !mask;
        }
    }

    /// Number of ones.
    pub fn weight(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn xor_assign(&mut self, other: &Self) {
        assert_eq!(self.len, other.len, "vector length mismatch");
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a ^= b;
        }
    }

    /// Indices of the nonzero entries, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.weight());
        for (wi, &w) in self.bits.iter().enumerate() {
            let mut bits = w;
            while bits != 0 {
                out.push(wi * WORD_BITS + bits.trailing_zeros() as usize);
                bits &= bits - 1;
            }
        }
        out
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.bits
    }
}

impl fmt::Debug for BinaryVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        Ok(())
    }
}

/// A dense bit-packed binary matrix over GF(2).
#[derive(Clone, PartialEq, Eq)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    bits: Vec<u64>,
}

impl BinaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = cols.div_ceil(WORD_BITS).max(1);
        Self {
            rows,
            cols,
            stride,
            bits: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Build from an entry predicate.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if f(r, c) {
                    m.set(r, c, true);
                }
            }
        }
        m
    }

    /// Build from rows of equal length.
    pub fn from_rows(rows: &[BinaryVector]) -> Result<Self, Gf2Error> {
        let cols = rows.first().map_or(0, BinaryVector::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Gf2Error::DimensionMismatch("rows of unequal length".into()));
        }
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            m.row_words_mut(i).copy_from_slice(r.words());
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range");
        (self.bits[r * self.stride + c / WORD_BITS] >> (c % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range");
        let mask = 1u64 << (c % WORD_BITS);
        let word = &mut self.bits[r * self.stride + c / WORD_BITS];
        if value {
            *word |= mask;
        } else {
            *word &= !mask;
        }
    }

    #[inline]
    pub(crate) fn row_words(&self, r: usize) -> &[u64] {
        &self.bits[r * self.stride..(r + 1) * self.stride]
    }

    fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.bits[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row(&self, r: usize) -> BinaryVector {
        BinaryVector {
            len: self.cols,
            bits: self.row_words(r).to_vec(),
        }
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row_words(r).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn row_weights(&self) -> Vec<usize> {
        (0..self.rows).map(|r| self.row_weight(r)).collect()
    }

    pub fn column_weights(&self) -> Vec<usize> {
        let mut weights = vec![0usize; self.cols];
        for r in 0..self.rows {
            for (wi, &w) in self.row_words(r).iter().enumerate() {
                let mut bits = w;
                while bits != 0 {
                    weights[wi * WORD_BITS + bits.trailing_zeros() as usize] += 1;
                    bits &= bits - 1;
                }
            }
        }
        weights
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for (wi, &w) in self.row_words(r).iter().enumerate() {
                let mut bits = w;
                while bits != 0 {
                    let c = wi * WORD_BITS + bits.trailing_zeros() as usize;
                    t.set(c, r, true);
                    bits &= bits - 1;
                }
            }
        }
        t
    }

    /// Matrix-vector product `M * v^T` as a column of parities.
    pub fn mul_vector(&self, v: &BinaryVector) -> Result<BinaryVector, Gf2Error> {
        if v.len() != self.cols {
            return Err(Gf2Error::DimensionMismatch(format!(
                "matrix has {} columns but vector has length {}",
                self.cols,
                v.len()
            )));
        }
        let mut out = BinaryVector::zeros(self.rows);
        for r in 0..self.rows {
            let parity = self
                .row_words(r)
                .iter()
                .zip(v.words())
                .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones());
            if parity & 1 == 1 {
                out.set(r, true);
            }
        }
        Ok(out)
    }

    /// Row rank over GF(2), computed on a working copy.
    pub fn rank(&self) -> usize {
        let mut work = self.bits.clone();
        Self::echelon_rank(&mut work, self.rows, self.cols, self.stride)
    }

    fn echelon_rank(words: &mut [u64], rows: usize, cols: usize, stride: usize) -> usize {
        let mut rank = 0;
        for col in 0..cols {
            if rank == rows {
                break;
            }
            let wi = col / WORD_BITS;
            let mask = 1u64 << (col % WORD_BITS);
            let Some(pivot) = (rank..rows).find(|&r| words[r * stride + wi] & mask != 0) else {
                continue;
            };
            if pivot != rank {
                for w in 0..stride {
                    words.swap(rank * stride + w, pivot * stride + w);
                }
            }
            for r in rank + 1..rows {
                if words[r * stride + wi] & mask != 0 {
                    for w in wi..stride {
                        words[r * stride + w] ^= words[rank * stride + w];
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// `M * M^T` (the Gram matrix over GF(2)).
    pub fn gram(&self) -> BinaryMatrix {
        let mut g = BinaryMatrix::zeros(self.rows, self.rows);
        for i in 0..self.rows {
            let ri = self.row_words(i);
            for j in i..self.rows {
                let parity = ri
                    .iter()
                    .zip(self.row_words(j))
                    .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones());
                if parity & 1 == 1 {
                    g.set(i, j, true);
                    g.set(j, i, true);
                }
            }
        }
        g
    }

    /// Rank of `M * M^T` over GF(2).
    pub fn gram_rank(&self) -> usize {
        self.gram().rank()
    }

    /// Basis of the right nullspace `{x : M x^T = 0}`.
    ///
    /// The basis has `cols - rank` vectors.
    pub fn nullspace_basis(&self) -> Vec<BinaryVector> {
        // Reduced echelon form with pivot bookkeeping, then one basis vector
        // per free column.
        let mut work = self.bits.clone();
        let (rows, cols, stride) = (self.rows, self.cols, self.stride);
        let mut pivot_cols = Vec::new();
        let mut rank = 0usize;
        for col in 0..cols {
            if rank == rows {
                break;
            }
            let wi = col / WORD_BITS;
            let mask = 1u64 << (col % WORD_BITS);
            let Some(pivot) = (rank..rows).find(|&r| work[r * stride + wi] & mask != 0) else {
                continue;
            };
            if pivot != rank {
                for w in 0..stride {
                    work.swap(rank * stride + w, pivot * stride + w);
                }
            }
            for r in 0..rows {
                if r != rank && work[r * stride + wi] & mask != 0 {
                    for w in 0..stride {
                        work[r * stride + w] ^= work[rank * stride + w];
                    }
                }
            }
            pivot_cols.push(col);
            rank += 1;
        }
        let mut is_pivot = vec![false; cols];
        for &c in &pivot_cols {
            is_pivot[c] = true;
        }
        let mut basis = Vec::with_capacity(cols - rank);
        for free in (0..cols).filter(|&c| !is_pivot[c]) {
            let mut v = BinaryVector::zeros(cols);
            v.set(free, true);
            let (fwi, fmask) = (free / WORD_BITS, 1u64 << (free % WORD_BITS));
            for (r, &pc) in pivot_cols.iter().enumerate() {
                if work[r * stride + fwi] & fmask != 0 {
                    v.set(pc, true);
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Weight of a smallest nonzero codeword of the code `{x : M x^T = 0}`.
    ///
    /// Uses full nullspace enumeration when the nullity is at most 24 and an
    /// increasing-weight support search (meet-in-the-middle on column
    /// syndromes) up to `budget` otherwise.
    pub fn min_distance(&self, budget: usize) -> Result<usize, Gf2Error> {
        self.min_weight_codeword(budget).map(|w| w.weight())
    }

    /// A smallest-weight nonzero codeword of `{x : M x^T = 0}`; see
    /// [`BinaryMatrix::min_distance`].
    pub fn min_weight_codeword(&self, budget: usize) -> Result<BinaryVector, Gf2Error> {
        let basis = self.nullspace_basis();
        if basis.is_empty() {
            return Err(Gf2Error::EmptyCode);
        }
        if basis.len() <= 24 {
            return Ok(Self::min_weight_by_enumeration(&basis));
        }
        self.min_weight_by_support_search(budget)
    }

    fn min_weight_by_enumeration(basis: &[BinaryVector]) -> BinaryVector {
        // Gray-code walk over all 2^t combinations: one XOR per step.
        let t = basis.len();
        let mut current = BinaryVector::zeros(basis[0].len());
        let mut best: Option<BinaryVector> = None;
        for i in 1u64..(1u64 << t) {
            current.xor_assign(&basis[i.trailing_zeros() as usize]);
            if best.as_ref().is_none_or(|b| current.weight() < b.weight()) {
                best = Some(current.clone());
            }
        }
        best.expect("at least one nonzero combination")
    }

    /// Increasing-weight codeword search. For each candidate weight `w`, the
    /// syndromes of all `floor(w/2)`-column subsets are tabulated and probed
    /// with the `ceil(w/2)`-column subsets; a syndrome collision on disjoint
    /// supports is a weight-`w` codeword. Scanning weights in ascending order
    /// guarantees the first hit is minimal.
    fn min_weight_by_support_search(&self, budget: usize) -> Result<BinaryVector, Gf2Error> {
        if self.rows > 128 {
            return Err(Gf2Error::ExceedsBudget(0));
        }
        let col_syndromes: Vec<u128> = {
            let t = self.transpose();
            (0..self.cols)
                .map(|c| {
                    let w = t.row_words(c);
                    (w[0] as u128) | ((w.get(1).copied().unwrap_or(0) as u128) << 64)
                })
                .collect()
        };
        let n = self.cols;
        for w in 1..=budget {
            let half = w / 2;
            let rest = w - half;
            if half > 8 || binomial(n as u64, half as u64) > MITM_CAP {
                return Err(Gf2Error::ExceedsBudget(w.saturating_sub(1)));
            }
            let mut table: Vec<(u128, PackedSupport)> = Vec::new();
            if half == 0 {
                table.push((0, PackedSupport::default()));
            } else {
                enumerate_subsets(n, half, &col_syndromes, &mut |s, subset| {
                    table.push((s, PackedSupport::pack(subset)));
                    true
                });
                table.sort_unstable_by_key(|&(s, _)| s);
                // Equal adjacent syndromes on disjoint supports are already a
                // codeword of weight 2*half <= w.
                for pair in table.windows(2) {
                    let ((s0, a), (s1, b)) = (pair[0], pair[1]);
                    if s0 == s1 && a.disjoint(&b) {
                        return Ok(self.combine_support(&a.unpack(), &b.unpack()));
                    }
                }
            }
            let mut found: Option<(Vec<usize>, Vec<usize>)> = None;
            enumerate_subsets(n, rest, &col_syndromes, &mut |s, subset| {
                let start = table.partition_point(|&(t, _)| t < s);
                for &(t, packed) in &table[start..] {
                    if t != s {
                        break;
                    }
                    let candidate = packed.unpack();
                    if candidate != subset && packed.disjoint_slice(subset) {
                        found = Some((candidate, subset.to_vec()));
                        return false;
                    }
                }
                true
            });
            if let Some((a, b)) = found {
                return Ok(self.combine_support(&a, &b));
            }
        }
        Err(Gf2Error::ExceedsBudget(budget))
    }

    fn combine_support(&self, a: &[usize], b: &[usize]) -> BinaryVector {
        let mut v = BinaryVector::zeros(self.cols);
        for &i in a.iter().chain(b) {
            v.set(i, true);
        }
        v
    }

    /// Horizontal block concatenation `[L | R]`.
    pub fn hconcat(&self, right: &BinaryMatrix) -> Result<BinaryMatrix, Gf2Error> {
        if self.rows != right.rows {
            return Err(Gf2Error::DimensionMismatch(format!(
                "hconcat row counts differ: {} vs {}",
                self.rows, right.rows
            )));
        }
        let mut out = BinaryMatrix::zeros(self.rows, self.cols + right.cols);
        for r in 0..self.rows {
            out.row_words_mut(r)[..self.stride].copy_from_slice(self.row_words(r));
            for (wi, &w) in right.row_words(r).iter().enumerate() {
                let mut bits = w;
                while bits != 0 {
                    let c = wi * WORD_BITS + bits.trailing_zeros() as usize;
                    out.set(r, self.cols + c, true);
                    bits &= bits - 1;
                }
            }
        }
        Ok(out)
    }

    /// Vertical block concatenation `[T; B]`.
    pub fn vconcat(&self, bottom: &BinaryMatrix) -> Result<BinaryMatrix, Gf2Error> {
        if self.cols != bottom.cols {
            return Err(Gf2Error::DimensionMismatch(format!(
                "vconcat column counts differ: {} vs {}",
                self.cols, bottom.cols
            )));
        }
        let mut out = BinaryMatrix::zeros(self.rows + bottom.rows, self.cols);
        out.bits[..self.bits.len()].copy_from_slice(&self.bits);
        out.bits[self.bits.len()..].copy_from_slice(&bottom.bits);
        Ok(out)
    }
}

impl fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinaryMatrix({}x{})", self.rows, self.cols)?;
        for r in 0..self.rows {
            for c in 0..self.cols {
                write!(f, "{}", u8::from(self.get(r, c)))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Up to eight column indices packed 16 bits apiece (stored as index + 1).
#[derive(Clone, Copy, Default, PartialEq, Eq)]
struct PackedSupport(u128);

impl PackedSupport {
    fn pack(subset: &[usize]) -> Self {
        debug_assert!(subset.len() <= 8);
        let mut packed = 0u128;
        for (slot, &i) in subset.iter().enumerate() {
            debug_assert!(i < 0xFFFF);
            packed |= ((i as u128) + 1) << (16 * slot);
        }
        Self(packed)
    }

    fn unpack(self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut bits = self.0;
        while bits & 0xFFFF != 0 {
            out.push((bits & 0xFFFF) as usize - 1);
            bits >>= 16;
        }
        out
    }

    fn contains(self, index: usize) -> bool {
        let needle = (index as u128) + 1;
        let mut bits = self.0;
        while bits & 0xFFFF != 0 {
            if bits & 0xFFFF == needle {
                return true;
            }
            bits >>= 16;
        }
        false
    }

    fn disjoint(self, other: &Self) -> bool {
        other.unpack().iter().all(|&i| !self.contains(i))
    }

    fn disjoint_slice(self, other: &[usize]) -> bool {
        other.iter().all(|&i| !self.contains(i))
    }
}

/// Binomial coefficient, saturating at `u64::MAX`.
pub(crate) fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u64;
    for i in 0..k {
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u64::MAX,
        };
    }
    acc
}

/// Visit all `k`-subsets of `0..n` in lexicographic order, passing the XOR of
/// the chosen column syndromes alongside the subset. The visitor returns
/// `false` to stop the enumeration.
fn enumerate_subsets(
    n: usize,
    k: usize,
    syndromes: &[u128],
    visit: &mut impl FnMut(u128, &[usize]) -> bool,
) {
    fn rec(
        start: usize,
        remaining: usize,
        acc: u128,
        n: usize,
        syndromes: &[u128],
        subset: &mut Vec<usize>,
        visit: &mut impl FnMut(u128, &[usize]) -> bool,
    ) -> bool {
        if remaining == 0 {
            return visit(acc, subset);
        }
        for i in start..=n - remaining {
            subset.push(i);
            let keep_going = rec(
                i + 1,
                remaining - 1,
                acc ^ syndromes[i],
                n,
                syndromes,
                subset,
                visit,
            );
            subset.pop();
            if !keep_going {
                return false;
            }
        }
        true
    }
    if k > n {
        return;
    }
    let mut subset = Vec::with_capacity(k);
    rec(0, k, 0, n, syndromes, &mut subset, visit);
}

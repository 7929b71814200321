//! Bit-exact linear algebra over GF(2).
//!
//! Vectors and matrix rows are packed into `u64` words. Bits beyond the
//! logical length are kept at zero so that word-level comparisons and
//! popcounts are exact.

use std::fmt;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

const WORD: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// A fixed-length vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// Builds a vector from 0/1 values. Any nonzero byte is a one.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = BitVector::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                v.set(i, true);
            }
        }
        v
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut words = Vec::new();
        let mut len = 0;
        for b in bits {
            if len % WORD == 0 {
                words.push(0);
            }
            if b {
                *words.last_mut().expect("pushed above") |= 1u64 << (len % WORD);
            }
            len += 1;
        }
        BitVector { len, words }
    }

    /// Vector with ones at the given positions.
    pub fn from_positions(len: usize, positions: &[usize]) -> Result<Self> {
        let mut v = BitVector::zeros(len);
        for &p in positions {
            if p >= len {
                return Err(Error::DimensionMismatch {
                    expected: len,
                    got: p + 1,
                });
            }
            v.flip(p);
        }
        Ok(v)
    }

    pub(crate) fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        words.resize(words_for(len), 0);
        let mut v = BitVector { len, words };
        v.clear_tail();
        v
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn xor(&self, other: &BitVector) -> Result<BitVector> {
        let mut out = self.clone();
        out.xor_assign(other)?;
        Ok(out)
    }

    pub fn xor_assign(&mut self, other: &BitVector) -> Result<()> {
        if self.len != other.len {
            return Err(Error::DimensionMismatch {
                expected: self.len,
                got: other.len,
            });
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(())
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVector) -> Result<bool> {
        if self.len != other.len {
            return Err(Error::DimensionMismatch {
                expected: self.len,
                got: other.len,
            });
        }
        Ok(dot_words(&self.words, &other.words))
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.words[i / WORD] >> (i % WORD) & 1 == 1)
    }

    pub fn to_bits(&self) -> Vec<u8> {
        self.iter().map(u8::from).collect()
    }

    /// Positions of the one bits, ascending.
    pub fn ones(&self) -> Vec<usize> {
        (0..self.len).filter(|&i| self.get(i)).collect()
    }

    /// First `len` bits as a new vector. Panics if `len` exceeds the length.
    pub fn truncated(&self, len: usize) -> BitVector {
        assert!(len <= self.len);
        BitVector::from_words(len, self.words[..words_for(len)].to_vec())
    }

    /// Copy extended with zeros to `len` bits.
    pub fn padded(&self, len: usize) -> BitVector {
        assert!(len >= self.len);
        BitVector::from_words(len, self.words.clone())
    }

    pub fn parse(s: &str) -> Result<BitVector> {
        let mut bits = Vec::with_capacity(s.len());
        for (col, c) in s.trim().chars().enumerate() {
            match c {
                '0' => bits.push(0),
                '1' => bits.push(1),
                other => {
                    return Err(Error::Parse {
                        line: 1,
                        msg: format!("unexpected character {other:?} at column {}", col + 1),
                    })
                }
            }
        }
        Ok(BitVector::from_bits(&bits))
    }
}

#[inline]
fn dot_words(a: &[u64], b: &[u64]) -> bool {
    let mut acc = 0u64;
    for (x, y) in a.iter().zip(b) {
        acc ^= x & y;
    }
    acc.count_ones() & 1 == 1
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

/// A bijection on `[0, n)`.
///
/// Applied to a vector, output position `j` takes input position `p[j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    indices: Vec<usize>,
}

impl Permutation {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        let n = indices.len();
        let mut seen = vec![false; n];
        for &i in &indices {
            if i >= n {
                return Err(Error::InvalidPermutation(format!(
                    "index {i} out of range for length {n}"
                )));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidPermutation(format!("index {i} repeated")));
            }
        }
        Ok(Permutation { indices })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            indices: (0..n).collect(),
        }
    }

    pub(crate) fn from_indices_unchecked(indices: Vec<usize>) -> Self {
        debug_assert!(Permutation::new(indices.clone()).is_ok());
        Permutation { indices }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn is_identity(&self) -> bool {
        self.indices.iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.indices.len()];
        for (j, &p) in self.indices.iter().enumerate() {
            inv[p] = j;
        }
        Permutation { indices: inv }
    }

    /// `out[j] = v[p[j]]`.
    pub fn apply(&self, v: &BitVector) -> Result<BitVector> {
        self.check_len(v.len())?;
        let mut out = BitVector::zeros(v.len());
        for (j, &p) in self.indices.iter().enumerate() {
            if v.get(p) {
                out.set(j, true);
            }
        }
        Ok(out)
    }

    /// `out[p[j]] = v[j]`, the inverse of [`Permutation::apply`].
    pub fn apply_inverse(&self, v: &BitVector) -> Result<BitVector> {
        self.check_len(v.len())?;
        let mut out = BitVector::zeros(v.len());
        for (j, &p) in self.indices.iter().enumerate() {
            if v.get(j) {
                out.set(p, true);
            }
        }
        Ok(out)
    }

    pub fn apply_slice<T: Copy>(&self, values: &[T]) -> Result<Vec<T>> {
        self.check_len(values.len())?;
        Ok(self.indices.iter().map(|&p| values[p]).collect())
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.indices.len() {
            return Err(Error::DimensionMismatch {
                expected: self.indices.len(),
                got: len,
            });
        }
        Ok(())
    }
}

/// A dense binary matrix, row-major with packed rows.
///
/// Matrices are immutable once built; transformations return new matrices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BinaryMatrix {
    fn zeroed(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        BinaryMatrix {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    fn check_shape(rows: usize, cols: usize) -> Result<()> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix { rows, cols });
        }
        Ok(())
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::check_shape(rows, cols)?;
        Ok(Self::zeroed(rows, cols))
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::from_fn(n, n, |i, j| i == j)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        Self::check_shape(rows, cols)?;
        let mut m = Self::zeroed(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if f(i, j) {
                    m.set(i, j);
                }
            }
        }
        Ok(m)
    }

    pub fn from_rows(rows: &[BitVector]) -> Result<Self> {
        let cols = rows.first().map_or(0, BitVector::len);
        Self::check_shape(rows.len(), cols)?;
        let mut m = Self::zeroed(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: r.len(),
                });
            }
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
    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.rows && j < self.cols);
        (self.data[i * self.stride + j / WORD] >> (j % WORD)) & 1 == 1
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize) {
        self.data[i * self.stride + j / WORD] |= 1u64 << (j % WORD);
    }

    #[inline]
    pub(crate) fn row_words(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    fn row_words_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.stride..(i + 1) * self.stride]
    }

    pub fn row(&self, i: usize) -> BitVector {
        BitVector::from_words(self.cols, self.row_words(i).to_vec())
    }

    pub fn column(&self, j: usize) -> BitVector {
        BitVector::from_bools((0..self.rows).map(|i| self.get(i, j)))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn transpose(&self) -> BinaryMatrix {
        let mut t = Self::zeroed(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    t.set(j, i);
                }
            }
        }
        t
    }

    /// Matrix-vector product `M · vᵀ`.
    pub fn mul_vec(&self, v: &BitVector) -> Result<BitVector> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: v.len(),
            });
        }
        let mut out = BitVector::zeros(self.rows);
        for i in 0..self.rows {
            if dot_words(self.row_words(i), v.words()) {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    /// Row-vector product `u · M`.
    pub fn vec_mul(&self, u: &BitVector) -> Result<BitVector> {
        if u.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                got: u.len(),
            });
        }
        let mut acc = vec![0u64; self.stride];
        for i in 0..self.rows {
            if u.get(i) {
                for (a, r) in acc.iter_mut().zip(self.row_words(i)) {
                    *a ^= r;
                }
            }
        }
        Ok(BitVector::from_words(self.cols, acc))
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &BinaryMatrix) -> Result<BinaryMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let rows: Vec<BitVector> = (0..self.rows)
            .map(|i| other.vec_mul(&self.row(i)))
            .collect::<Result<_>>()?;
        Self::from_rows(&rows)
    }

    /// Column j of the result is column `p[j]` of `self`.
    pub fn permute_columns(&self, p: &Permutation) -> Result<BinaryMatrix> {
        if p.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                got: p.len(),
            });
        }
        let mut out = Self::zeroed(self.rows, self.cols);
        for i in 0..self.rows {
            for (j, &src) in p.indices().iter().enumerate() {
                if self.get(i, src) {
                    out.set(i, j);
                }
            }
        }
        Ok(out)
    }

    /// Copy placed in the top-left corner of a larger zero matrix.
    pub fn embedded(&self, rows: usize, cols: usize) -> Result<BinaryMatrix> {
        if rows < self.rows || cols < self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.rows.max(self.cols),
                got: rows.min(cols),
            });
        }
        let mut out = Self::zeroed(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    out.set(i, j);
                }
            }
        }
        Ok(out)
    }

    /// Reduced row echelon form and the pivot column of each nonzero row.
    ///
    /// Pivots are taken as the first row with a one in the current column,
    /// scanning columns left to right.
    fn rref(&self) -> (BinaryMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| m.get(i, c)) else {
                continue;
            };
            if p != r {
                for w in 0..m.stride {
                    m.data.swap(p * m.stride + w, r * m.stride + w);
                }
            }
            let pivot_row = m.row_words(r).to_vec();
            for i in 0..m.rows {
                if i != r && m.get(i, c) {
                    for (a, b) in m.row_words_mut(i).iter_mut().zip(&pivot_row) {
                        *a ^= b;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// A full-rank `(n−k)×n` matrix whose rows span the null space of `self`.
    ///
    /// `self` must have full row rank. Every row of the result is orthogonal
    /// to every row of `self`.
    pub fn null_space(&self) -> Result<BinaryMatrix> {
        let (r, pivots) = self.rref();
        if pivots.len() < self.rows {
            return Err(Error::RankDeficient {
                rank: pivots.len(),
                rows: self.rows,
            });
        }
        let n = self.cols;
        let free: Vec<usize> = {
            let mut is_pivot = vec![false; n];
            for &p in &pivots {
                is_pivot[p] = true;
            }
            (0..n).filter(|&c| !is_pivot[c]).collect()
        };
        if free.is_empty() {
            return Err(Error::InvalidCode(
                "generator has rank n; the null space is trivial".into(),
            ));
        }
        let mut h = Self::zeroed(free.len(), n);
        for (row, &f) in free.iter().enumerate() {
            h.set(row, f);
            for (i, &p) in pivots.iter().enumerate() {
                if r.get(i, f) {
                    h.set(row, p);
                }
            }
        }
        Ok(h)
    }

    /// Per-column syndrome contributions, packed.
    pub fn column_table(&self) -> ColumnTable {
        ColumnTable::new(self)
    }

    /// Writes the text format: `rows cols`, then one 0/1 string per row.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {}", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(w, "{}", self.row(i))?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("text format is ASCII")
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<BinaryMatrix> {
        let mut lines = r
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| l.as_ref().map_or(true, |s| !s.trim().is_empty()));
        let (hline, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let header = header?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse {
                line: hline,
                msg: format!("bad header {header:?}: {e}"),
            })?;
        let [rows, cols] = dims[..] else {
            return Err(Error::Parse {
                line: hline,
                msg: format!("header must be `rows cols`, got {header:?}"),
            });
        };
        Self::check_shape(rows, cols).map_err(|e| Error::Parse {
            line: hline,
            msg: e.to_string(),
        })?;
        let mut out = Vec::with_capacity(rows);
        for (line, text) in lines {
            let text = text?;
            if out.len() == rows {
                return Err(Error::Parse {
                    line,
                    msg: format!("more than {rows} rows"),
                });
            }
            let v = BitVector::parse(&text).map_err(|e| match e {
                Error::Parse { msg, .. } => Error::Parse { line, msg },
                other => other,
            })?;
            if v.len() != cols {
                return Err(Error::Parse {
                    line,
                    msg: format!("row has {} columns, expected {cols}", v.len()),
                });
            }
            out.push(v);
        }
        if out.len() != rows {
            return Err(Error::Parse {
                line: hline,
                msg: format!("expected {rows} rows, found {}", out.len()),
            });
        }
        Self::from_rows(&out)
    }

    pub fn parse_text(s: &str) -> Result<BinaryMatrix> {
        Self::read_text(s.as_bytes())
    }
}

impl fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinaryMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {}", self.row(i))?;
        }
        Ok(())
    }
}

/// `H · vᵀ`.
pub fn mat_vec_mul(m: &BinaryMatrix, v: &BitVector) -> Result<BitVector> {
    m.mul_vec(v)
}

/// True iff `H · vᵀ = 0`.
pub fn is_codeword(h: &BinaryMatrix, v: &BitVector) -> Result<bool> {
    Ok(h.mul_vec(v)?.is_zero())
}

pub fn permute_columns(m: &BinaryMatrix, p: &Permutation) -> Result<BinaryMatrix> {
    m.permute_columns(p)
}

pub fn null_space(g: &BinaryMatrix) -> Result<BinaryMatrix> {
    g.null_space()
}

/// Columns of a parity-check matrix packed as syndrome words.
///
/// The syndrome of a vector is the XOR of the columns at its one positions,
/// which lets the decoder test a pattern with one XOR per flipped bit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnTable {
    rows: usize,
    words: usize,
    data: Vec<u64>,
}

impl ColumnTable {
    fn new(m: &BinaryMatrix) -> Self {
        let words = words_for(m.rows);
        let mut data = vec![0u64; m.cols * words];
        for i in 0..m.rows {
            for j in 0..m.cols {
                if m.get(i, j) {
                    data[j * words + i / WORD] |= 1u64 << (i % WORD);
                }
            }
        }
        ColumnTable {
            rows: m.rows,
            words,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.data.len() / self.words
    }

    /// Syndrome words per column.
    pub fn words(&self) -> usize {
        self.words
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[u64] {
        &self.data[j * self.words..(j + 1) * self.words]
    }

    /// Gathers the columns in permuted order, i.e. the table of `π(H)`.
    pub fn permuted(&self, p: &Permutation) -> ColumnTable {
        let mut data = Vec::with_capacity(self.data.len());
        for &src in p.indices() {
            data.extend_from_slice(self.column(src));
        }
        ColumnTable {
            rows: self.rows,
            words: self.words,
            data,
        }
    }

    /// Overwrites `self` with the permuted gather of `src`, reusing storage.
    pub fn permute_from(&mut self, src: &ColumnTable, p: &Permutation) {
        self.rows = src.rows;
        self.words = src.words;
        self.data.clear();
        for &j in p.indices() {
            self.data.extend_from_slice(src.column(j));
        }
    }

    /// Syndrome of `v`, packed into `out` (length [`ColumnTable::words`]).
    pub fn syndrome_into(&self, v: &BitVector, out: &mut [u64]) {
        out.fill(0);
        for (wi, &w) in v.words().iter().enumerate() {
            let mut bits = w;
            while bits != 0 {
                let j = wi * WORD + bits.trailing_zeros() as usize;
                bits &= bits - 1;
                for (o, c) in out.iter_mut().zip(self.column(j)) {
                    *o ^= c;
                }
            }
        }
    }
}

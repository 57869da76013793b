//! Linear algebra over GF(2).
//!
//! Matrices are stored sparse (sorted column lists per row) and converted to
//! bit-packed rows for elimination.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense bit vector packed into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec[{}]{:?}", self.len, self.ones())
    }
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_indices(len: usize, idx: &[usize]) -> Self {
        let mut v = BitVec::zeros(len);
        for &i in idx {
            v.flip(i);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = BitVec::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
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
        debug_assert!(i < self.len);
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, b: bool) {
        debug_assert!(i < self.len);
        if b {
            self.words[i >> 6] |= 1 << (i & 63);
        } else {
            self.words[i >> 6] &= !(1 << (i & 63));
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i >> 6] ^= 1 << (i & 63);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn or_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut v = self.clone();
        v.xor_assign(other);
        v
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn and_count(&self, other: &BitVec) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(k * 64 + t)
                }
            })
        })
    }

    pub fn ones(&self) -> Vec<usize> {
        self.iter_ones().collect()
    }
}

/// Binary matrix with strictly increasing column indices per row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseBinMatrix {
    nrows: usize,
    ncols: usize,
    rows: Vec<Vec<usize>>,
}

impl SparseBinMatrix {
    pub fn new(ncols: usize, rows: Vec<Vec<usize>>) -> Result<Self> {
        for (i, r) in rows.iter().enumerate() {
            if r.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Invalid(format!("row {i} is not strictly increasing")));
            }
            if r.last().is_some_and(|&c| c >= ncols) {
                return Err(Error::Invalid(format!("row {i} has a column out of range")));
            }
        }
        Ok(SparseBinMatrix {
            nrows: rows.len(),
            ncols,
            rows,
        })
    }

    /// Builds a matrix from unsorted rows; duplicate entries are an error.
    pub fn from_unsorted_rows(ncols: usize, mut rows: Vec<Vec<usize>>) -> Result<Self> {
        for r in &mut rows {
            r.sort_unstable();
        }
        Self::new(ncols, rows)
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseBinMatrix {
            nrows,
            ncols,
            rows: vec![Vec::new(); nrows],
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseBinMatrix {
            nrows: n,
            ncols: n,
            rows: (0..n).map(|i| vec![i]).collect(),
        }
    }

    pub fn from_dense(rows: &[Vec<u8>]) -> Result<Self> {
        let ncols = rows.first().map_or(0, |r| r.len());
        let sparse = rows
            .iter()
            .map(|r| {
                if r.len() != ncols {
                    return Err(Error::Dimension("ragged dense matrix".into()));
                }
                Ok(r.iter().enumerate().filter(|(_, &x)| x & 1 == 1).map(|(j, _)| j).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(ncols, sparse)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].binary_search(&j).is_ok()
    }

    /// Column supports (row indices, ascending).
    pub fn columns(&self) -> Vec<Vec<usize>> {
        let mut cols = vec![Vec::new(); self.ncols];
        for (i, r) in self.rows.iter().enumerate() {
            for &j in r {
                cols[j].push(i);
            }
        }
        cols
    }

    pub fn transpose(&self) -> SparseBinMatrix {
        SparseBinMatrix {
            nrows: self.ncols,
            ncols: self.nrows,
            rows: self.columns(),
        }
    }

    pub fn row_weights(&self) -> Vec<usize> {
        self.rows.iter().map(Vec::len).collect()
    }

    pub fn col_weights(&self) -> Vec<usize> {
        let mut w = vec![0; self.ncols];
        for r in &self.rows {
            for &j in r {
                w[j] += 1;
            }
        }
        w
    }

    pub fn max_col_weight(&self) -> usize {
        self.col_weights().into_iter().max().unwrap_or(0)
    }

    pub fn dense_rows(&self) -> Vec<BitVec> {
        self.rows
            .iter()
            .map(|r| BitVec::from_indices(self.ncols, r))
            .collect()
    }

    /// `M v` over GF(2).
    pub fn mul_vec(&self, v: &BitVec) -> Result<BitVec> {
        if v.len() != self.ncols {
            return Err(Error::Dimension(format!(
                "vector length {} vs {} columns",
                v.len(),
                self.ncols
            )));
        }
        let mut s = BitVec::zeros(self.nrows);
        for (i, r) in self.rows.iter().enumerate() {
            if r.iter().filter(|&&j| v.get(j)).count() & 1 == 1 {
                s.set(i, true);
            }
        }
        Ok(s)
    }

    /// Syndrome of the indicator vector of `support`.
    pub fn syndrome_of_support(&self, support: &[usize]) -> Result<BitVec> {
        let mut v = BitVec::zeros(self.ncols);
        for &j in support {
            if j >= self.ncols {
                return Err(Error::Dimension(format!("column {j} out of range")));
            }
            v.flip(j);
        }
        self.mul_vec(&v)
    }
}

/// Reduced row-echelon basis of a row space.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RowSpaceBasis {
    ncols: usize,
    rows: Vec<BitVec>,
    pivots: Vec<usize>,
}

impl RowSpaceBasis {
    pub fn from_matrix(m: &SparseBinMatrix) -> Self {
        Self::from_dense(m.ncols(), m.dense_rows())
    }

    pub fn from_dense(ncols: usize, mut rows: Vec<BitVec>) -> Self {
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..ncols {
            if r == rows.len() {
                break;
            }
            let Some(p) = (r..rows.len()).find(|&i| rows[i].get(col)) else {
                continue;
            };
            rows.swap(r, p);
            let (head, tail) = rows.split_at_mut(r);
            let (pivot, tail) = tail.split_first_mut().expect("pivot row exists");
            let pivot_row = &*pivot;
            for row in head.iter_mut().chain(tail.iter_mut()) {
                if row.get(col) {
                    row.xor_assign(pivot_row);
                }
            }
            pivots.push(col);
            r += 1;
        }
        rows.truncate(r);
        RowSpaceBasis { ncols, rows, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduces `v` against the basis in place; the result is zero iff `v`
    /// was in the row space.
    pub fn reduce(&self, v: &mut BitVec) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if v.get(p) {
                v.xor_assign(row);
            }
        }
    }

    pub fn contains(&self, v: &BitVec) -> Result<bool> {
        if v.len() != self.ncols {
            return Err(Error::Dimension(format!(
                "vector length {} vs row length {}",
                v.len(),
                self.ncols
            )));
        }
        if v.is_zero() {
            return Ok(true);
        }
        let mut w = v.clone();
        self.reduce(&mut w);
        Ok(w.is_zero())
    }
}

pub fn rank_gf2(m: &SparseBinMatrix) -> usize {
    RowSpaceBasis::from_matrix(m).rank()
}

/// Basis of `{x : M x = 0}`, one vector per non-pivot column.
pub fn kernel_basis(m: &SparseBinMatrix) -> Vec<BitVec> {
    kernel_from_basis(&RowSpaceBasis::from_matrix(m))
}

pub fn kernel_from_basis(b: &RowSpaceBasis) -> Vec<BitVec> {
    let n = b.ncols();
    let mut is_pivot = vec![false; n];
    for &p in b.pivots() {
        is_pivot[p] = true;
    }
    (0..n)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut x = BitVec::zeros(n);
            x.set(f, true);
            for (row, &p) in b.rows().iter().zip(b.pivots()) {
                if row.get(f) {
                    x.set(p, true);
                }
            }
            x
        })
        .collect()
}

pub fn in_row_space(b: &RowSpaceBasis, v: &BitVec) -> Result<bool> {
    b.contains(v)
}

/// True iff `A B^T = 0` over GF(2), i.e. every row pair overlaps evenly.
pub fn product_is_zero(a: &SparseBinMatrix, b: &SparseBinMatrix) -> Result<bool> {
    if a.ncols() != b.ncols() {
        return Err(Error::Dimension(format!(
            "A has {} columns, B has {}",
            a.ncols(),
            b.ncols()
        )));
    }
    let bcols = b.columns();
    let mut parity = vec![false; b.nrows()];
    let mut touched = Vec::new();
    for r in a.rows() {
        for &c in r {
            for &z in &bcols[c] {
                if !parity[z] {
                    touched.push(z);
                }
                parity[z] = !parity[z];
            }
        }
        let odd = touched.iter().any(|&z| parity[z]);
        for &z in &touched {
            parity[z] = false;
        }
        touched.clear();
        if odd {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Solution of `sum_j x_j col_j = target` over GF(2).
#[derive(Clone, Debug)]
pub struct ColumnSolution {
    /// Indices (into the column list) of a particular solution.
    pub particular: Vec<usize>,
    /// Basis of the null space, as index sets.
    pub nullspace: Vec<Vec<usize>>,
}

/// Incremental column-space solver: columns are added one at a time and
/// kept reduced, so prefix questions ("is the target in the span of the
/// first K columns?") are cheap.
#[derive(Clone, Debug)]
pub struct ColumnSolver {
    len: usize,
    // reduced columns with their pivot row and combination of input columns
    basis: Vec<(usize, BitVec, Vec<usize>)>,
    dependencies: Vec<Vec<usize>>,
    count: usize,
}

fn sym_diff(a: &mut Vec<usize>, b: &[usize]) {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    *a = out;
}

impl ColumnSolver {
    pub fn new(len: usize) -> Self {
        ColumnSolver {
            len,
            basis: Vec::new(),
            dependencies: Vec::new(),
            count: 0,
        }
    }

    pub fn column_count(&self) -> usize {
        self.count
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn nullity(&self) -> usize {
        self.dependencies.len()
    }

    fn reduce(&self, v: &mut BitVec, combo: &mut Vec<usize>) {
        for (p, col, c) in &self.basis {
            if v.get(*p) {
                v.xor_assign(col);
                sym_diff(combo, c);
            }
        }
    }

    pub fn push(&mut self, col: BitVec) {
        debug_assert_eq!(col.len(), self.len);
        let idx = self.count;
        self.count += 1;
        let mut v = col;
        let mut combo = vec![idx];
        self.reduce(&mut v, &mut combo);
        match v.first_one() {
            Some(p) => {
                // keep the basis fully reduced on its pivots
                for (_, bcol, bc) in &mut self.basis {
                    if bcol.get(p) {
                        bcol.xor_assign(&v);
                        sym_diff(bc, &combo);
                    }
                }
                self.basis.push((p, v, combo));
            }
            None => self.dependencies.push(combo),
        }
    }

    pub fn solve(&self, target: &BitVec) -> Option<ColumnSolution> {
        let mut v = target.clone();
        let mut combo = Vec::new();
        self.reduce(&mut v, &mut combo);
        v.is_zero().then(|| ColumnSolution {
            particular: combo,
            nullspace: self.dependencies.clone(),
        })
    }
}

/// Solves `H[:, cols] x = target`; returned indices refer to `cols`.
pub fn solve_on_columns(
    h_columns: &[Vec<usize>],
    nrows: usize,
    cols: &[usize],
    target: &BitVec,
) -> Option<ColumnSolution> {
    let mut s = ColumnSolver::new(nrows);
    for &c in cols {
        s.push(BitVec::from_indices(nrows, &h_columns[c]));
    }
    s.solve(target)
}

//! Two-branch multiplicative-coset base matrices.
//!
//! Columns are indexed by `(branch, t, h)` with `t` in F and `h` in M, rows by
//! `(i, r)` with `i < J` and `r` in F. Global coordinates are
//! `row = i*q + r` and `col = branch*q*m + t*m + index_of(h)`, where field
//! elements are enumerated by their integer encoding and M in ascending order.
//!
//! In `H_X`, column `(branch, t, h)` has ones at rows `(i, t + a_i h)`; in
//! `H_Z` at rows `(j, t + b_j h)`.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::binmat::SparseBinMatrix;
use crate::error::{Error, Result};
use crate::gf::{Elem, Field, FieldDescriptor, Subgroup};
use crate::Side;

/// Coefficient arrays `a`, `b` for both branches, plus the field and the
/// subgroup order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TwoBranchCoefficients {
    pub field: FieldDescriptor,
    pub m: u32,
    pub j: usize,
    pub a: [Vec<Elem>; 2],
    pub b: [Vec<Elem>; 2],
}

impl TwoBranchCoefficients {
    /// Checks shapes and ranges. Distinctness within a branch is left to the
    /// certificate checks so that they can report which difference vanishes.
    pub fn new(field: FieldDescriptor, m: u32, a: [Vec<Elem>; 2], b: [Vec<Elem>; 2]) -> Result<Self> {
        let j = a[0].len();
        if j == 0 {
            return Err(Error::InvalidCoefficients("column weight must be at least 1".into()));
        }
        if a.iter().chain(b.iter()).any(|v| v.len() != j) {
            return Err(Error::InvalidCoefficients("all four arrays must have length J".into()));
        }
        let q = field
            .p
            .checked_pow(field.e)
            .ok_or(Error::FieldTooLarge { p: field.p, e: field.e })?;
        if let Some(&x) = a.iter().chain(b.iter()).flatten().find(|&&x| x >= q) {
            return Err(Error::NotInField(x));
        }
        Ok(TwoBranchCoefficients { field, m, j, a, b })
    }

    /// Convenience constructor for prime fields.
    pub fn prime(p: u32, m: u32, a0: &[Elem], b0: &[Elem], a1: &[Elem], b1: &[Elem]) -> Result<Self> {
        Self::new(
            FieldDescriptor { p, e: 1, modulus: vec![0, 1] },
            m,
            [a0.to_vec(), a1.to_vec()],
            [b0.to_vec(), b1.to_vec()],
        )
    }

    pub fn q(&self) -> u32 {
        self.field.p.pow(self.field.e)
    }

    /// Row weight L = 2m.
    pub fn row_weight(&self) -> usize {
        2 * self.m as usize
    }

    pub fn distinct_within_branches(&self) -> bool {
        (0..2).all(|l| {
            let mut v: Vec<Elem> = self.a[l].iter().chain(&self.b[l]).copied().collect();
            v.sort_unstable();
            v.windows(2).all(|w| w[0] != w[1])
        })
    }

    pub fn setup(&self) -> Result<(Field, Subgroup)> {
        let f = Field::from_descriptor(&self.field)?;
        let s = Subgroup::of_order(&f, self.m)?;
        Ok((f, s))
    }
}

impl fmt::Display for TwoBranchCoefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: &[Elem]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(
            f,
            "F_{} m={} J={}: a0=({}) b0=({}) a1=({}) b1=({})",
            self.q(),
            self.m,
            self.j,
            show(&self.a[0]),
            show(&self.b[0]),
            show(&self.a[1]),
            show(&self.b[1])
        )
    }
}

/// Reason a coset certificate fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertificateFailure {
    /// `b_j - a_i = 0` in the given branch.
    CrossZeroDifference { branch: usize, i: usize, j: usize },
    /// `(b_j^0 - a_i^0) M != (b_j^1 - a_i^1) M`.
    CrossCosetMismatch { i: usize, j: usize },
    /// `a_i' - a_i = 0` (side X) or `b_j' - b_j = 0` (side Z) in a branch.
    SameTypeZeroDifference { side: Side, branch: usize, lo: usize, hi: usize },
    /// The two branches' same-type difference cosets coincide.
    SameTypeCosetOverlap { side: Side, lo: usize, hi: usize },
}

impl fmt::Display for CertificateFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertificateFailure::CrossZeroDifference { branch, i, j } => {
                write!(f, "b_{j} - a_{i} = 0 in branch {branch}")
            }
            CertificateFailure::CrossCosetMismatch { i, j } => {
                write!(f, "cosets of b_{j} - a_{i} differ between branches")
            }
            CertificateFailure::SameTypeZeroDifference { side, branch, lo, hi } => {
                write!(f, "{side:?}-side difference ({hi},{lo}) vanishes in branch {branch}")
            }
            CertificateFailure::SameTypeCosetOverlap { side, lo, hi } => {
                write!(f, "{side:?}-side difference cosets ({hi},{lo}) coincide across branches")
            }
        }
    }
}

fn orthogonality_certificate(
    f: &Field,
    s: &Subgroup,
    a: &[Vec<Elem>; 2],
    b: &[Vec<Elem>; 2],
) -> std::result::Result<(), CertificateFailure> {
    let j = a[0].len();
    for i in 0..j {
        for jj in 0..j {
            let d0 = f.sub(b[0][jj], a[0][i]);
            let d1 = f.sub(b[1][jj], a[1][i]);
            if d0 == 0 {
                return Err(CertificateFailure::CrossZeroDifference { branch: 0, i, j: jj });
            }
            if d1 == 0 {
                return Err(CertificateFailure::CrossZeroDifference { branch: 1, i, j: jj });
            }
            if s.coset_id(d0) != s.coset_id(d1) {
                return Err(CertificateFailure::CrossCosetMismatch { i, j: jj });
            }
        }
    }
    Ok(())
}

fn same_type_certificate(
    f: &Field,
    s: &Subgroup,
    side: Side,
    v: &[Vec<Elem>; 2],
) -> std::result::Result<(), CertificateFailure> {
    let j = v[0].len();
    for lo in 0..j {
        for hi in lo + 1..j {
            let d0 = f.sub(v[0][hi], v[0][lo]);
            let d1 = f.sub(v[1][hi], v[1][lo]);
            if d0 == 0 {
                return Err(CertificateFailure::SameTypeZeroDifference { side, branch: 0, lo, hi });
            }
            if d1 == 0 {
                return Err(CertificateFailure::SameTypeZeroDifference { side, branch: 1, lo, hi });
            }
            if s.coset_id(d0) == s.coset_id(d1) {
                return Err(CertificateFailure::SameTypeCosetOverlap { side, lo, hi });
            }
        }
    }
    Ok(())
}

/// Cross-type coset equality certificate: nonzero cross differences whose
/// M-cosets agree between the branches. Implies `H_X H_Z^T = 0`.
pub fn check_orthogonality_certificate(
    c: &TwoBranchCoefficients,
) -> Result<std::result::Result<(), CertificateFailure>> {
    let (f, s) = c.setup()?;
    Ok(orthogonality_certificate(&f, &s, &c.a, &c.b))
}

/// Same-type coset disjointness certificate for both the `a` and `b`
/// families. Implies no same-type 4-cycles.
pub fn check_4cycle_certificate(
    c: &TwoBranchCoefficients,
) -> Result<std::result::Result<(), CertificateFailure>> {
    let (f, s) = c.setup()?;
    Ok(same_type_certificate(&f, &s, Side::X, &c.a)
        .and_then(|_| same_type_certificate(&f, &s, Side::Z, &c.b)))
}

/// The base matrix pair with its coordinate maps.
#[derive(Clone, Debug)]
pub struct BasePair {
    pub coeffs: TwoBranchCoefficients,
    pub hx: SparseBinMatrix,
    pub hz: SparseBinMatrix,
    q: usize,
    m: usize,
    subgroup: Vec<Elem>,
}

impl BasePair {
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn j(&self) -> usize {
        self.coeffs.j
    }

    /// Number of columns, 2qm.
    pub fn n(&self) -> usize {
        2 * self.q * self.m
    }

    /// Enumeration of M used for the subgroup coordinate.
    pub fn subgroup_elements(&self) -> &[Elem] {
        &self.subgroup
    }

    pub fn column_index(&self, branch: usize, t: Elem, v: usize) -> usize {
        branch * self.q * self.m + t as usize * self.m + v
    }

    /// Inverse of [`Self::column_index`]: `(branch, t, subgroup index)`.
    pub fn column_coords(&self, c: usize) -> (usize, Elem, usize) {
        let qm = self.q * self.m;
        (c / qm, ((c % qm) / self.m) as Elem, c % self.m)
    }

    pub fn row_index(&self, group: usize, r: Elem) -> usize {
        group * self.q + r as usize
    }

    pub fn row_coords(&self, row: usize) -> (usize, Elem) {
        (row / self.q, (row % self.q) as Elem)
    }

    pub fn matrix(&self, side: Side) -> &SparseBinMatrix {
        match side {
            Side::X => &self.hx,
            Side::Z => &self.hz,
        }
    }
}

fn regular(h: &SparseBinMatrix, col_w: usize, row_w: usize) -> bool {
    h.col_weights().iter().all(|&w| w == col_w) && h.row_weights().iter().all(|&w| w == row_w)
}

/// Builds `(H_X, H_Z)` from the coefficients and re-verifies regularity.
pub fn build_base(c: &TwoBranchCoefficients) -> Result<BasePair> {
    let (f, s) = c.setup()?;
    let q = f.q() as usize;
    let m = s.order() as usize;
    let j = c.j;
    let n = 2 * q * m;
    let mut x_rows = vec![Vec::with_capacity(2 * m); j * q];
    let mut z_rows = vec![Vec::with_capacity(2 * m); j * q];
    for branch in 0..2 {
        for t in 0..q as Elem {
            for (v, &h) in s.elements().iter().enumerate() {
                let col = branch * q * m + t as usize * m + v;
                for i in 0..j {
                    let rx = f.add(t, f.mul(c.a[branch][i], h)) as usize;
                    let rz = f.add(t, f.mul(c.b[branch][i], h)) as usize;
                    x_rows[i * q + rx].push(col);
                    z_rows[i * q + rz].push(col);
                }
            }
        }
    }
    // columns are pushed in increasing order, but two incidences of one
    // column in a row would be a duplicate entry (J=... with a_i h = a_i' h)
    let hx = SparseBinMatrix::from_unsorted_rows(n, x_rows)
        .map_err(|_| Error::InvalidCoefficients("H_X has a repeated entry".into()))?;
    let hz = SparseBinMatrix::from_unsorted_rows(n, z_rows)
        .map_err(|_| Error::InvalidCoefficients("H_Z has a repeated entry".into()))?;
    if !regular(&hx, j, 2 * m) || !regular(&hz, j, 2 * m) {
        return Err(Error::Invalid("constructed base is not (J, 2m)-regular".into()));
    }
    Ok(BasePair {
        coeffs: c.clone(),
        hx,
        hz,
        q,
        m,
        subgroup: s.elements().to_vec(),
    })
}

/// Pairwise row intersection sizes of one matrix (or of two matrices), as a
/// sparse map from row pair to shared column list.
fn shared_columns(a: &SparseBinMatrix, b: &SparseBinMatrix) -> Vec<HashMap<usize, Vec<usize>>> {
    let bcols = b.columns();
    a.rows()
        .iter()
        .map(|r| {
            let mut m: HashMap<usize, Vec<usize>> = HashMap::new();
            for &c in r {
                for &z in &bcols[c] {
                    m.entry(z).or_default().push(c);
                }
            }
            m
        })
        .collect()
}

/// True iff no two distinct rows share two or more columns.
pub fn has_no_4cycles(h: &SparseBinMatrix) -> bool {
    let cols = h.columns();
    let mut count = vec![0u32; h.nrows()];
    for (r, row) in h.rows().iter().enumerate() {
        let mut touched = Vec::new();
        let mut bad = false;
        for &c in row {
            for &r2 in &cols[c] {
                if r2 != r {
                    count[r2] += 1;
                    if count[r2] == 1 {
                        touched.push(r2);
                    } else {
                        bad = true;
                    }
                }
            }
        }
        for r2 in touched {
            count[r2] = 0;
        }
        if bad {
            return false;
        }
    }
    true
}

/// Direct pairwise check that neither Tanner graph has a 4-cycle.
pub fn verify_4cycles_directly(b: &BasePair) -> bool {
    has_no_4cycles(&b.hx) && has_no_4cycles(&b.hz)
}

/// A simple 6-cycle `r0 - c0 - r1 - c1 - r2 - c2 - r0` with `r0 < r1 < r2`,
/// `c0` shared by rows r0,r1, `c1` by r1,r2 and `c2` by r2,r0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SixCycle {
    pub rows: [usize; 3],
    pub cols: [usize; 3],
}

impl SixCycle {
    /// Edges in cycle order: (r0,c0), (r1,c0), (r1,c1), (r2,c1), (r2,c2), (r0,c2).
    /// Even positions carry sign +1, odd positions -1 in the exponent sum.
    pub fn signed_edges(&self) -> [(usize, usize); 6] {
        let [r0, r1, r2] = self.rows;
        let [c0, c1, c2] = self.cols;
        [(r0, c0), (r1, c0), (r1, c1), (r2, c1), (r2, c2), (r0, c2)]
    }
}

/// All simple 6-cycles of the Tanner graph of `h`, each listed once.
pub fn six_cycles(h: &SparseBinMatrix) -> Vec<SixCycle> {
    let shared = shared_columns(h, h);
    let mut out = Vec::new();
    for r0 in 0..h.nrows() {
        let mut nbrs: Vec<usize> = shared[r0].keys().copied().filter(|&r| r > r0).collect();
        nbrs.sort_unstable();
        for (x, &r1) in nbrs.iter().enumerate() {
            for &r2 in &nbrs[x + 1..] {
                let Some(s12) = shared[r1].get(&r2) else { continue };
                let s01 = &shared[r0][&r1];
                let s20 = &shared[r0][&r2];
                for &c0 in s01 {
                    for &c1 in s12 {
                        for &c2 in s20 {
                            if c0 != c1 && c1 != c2 && c0 != c2 {
                                out.push(SixCycle {
                                    rows: [r0, r1, r2],
                                    cols: [c0, c1, c2],
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// `hist[k]` = number of (X-row, Z-row) pairs sharing exactly k columns.
pub fn overlap_histogram(hx: &SparseBinMatrix, hz: &SparseBinMatrix) -> Vec<usize> {
    let shared = shared_columns(hx, hz);
    let mut hist = vec![0usize; 1];
    let mut nonzero = 0;
    for m in &shared {
        for cols in m.values() {
            let k = cols.len();
            if hist.len() <= k {
                hist.resize(k + 1, 0);
            }
            hist[k] += 1;
            nonzero += 1;
        }
    }
    hist[0] = hx.nrows() * hz.nrows() - nonzero;
    hist
}

/// Same-type 6-cycles and cross-type overlaps of a base pair.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CycleCensus {
    pub n6_x: usize,
    pub n6_z: usize,
    /// Number of X-row/Z-row pairs sharing exactly two columns.
    pub n_xz2: usize,
    pub overlap_histogram: Vec<usize>,
    pub cycles_x: Vec<SixCycle>,
    pub cycles_z: Vec<SixCycle>,
}

impl CycleCensus {
    /// Every X/Z row pair shares 0 or 2 columns.
    pub fn overlaps_zero_or_two(&self) -> bool {
        self.overlap_histogram
            .iter()
            .enumerate()
            .all(|(k, &n)| n == 0 || k == 0 || k == 2)
    }

    pub fn cycles(&self, side: Side) -> &[SixCycle] {
        match side {
            Side::X => &self.cycles_x,
            Side::Z => &self.cycles_z,
        }
    }
}

pub fn census_of(hx: &SparseBinMatrix, hz: &SparseBinMatrix) -> CycleCensus {
    let cycles_x = six_cycles(hx);
    let cycles_z = six_cycles(hz);
    let hist = overlap_histogram(hx, hz);
    CycleCensus {
        n6_x: cycles_x.len(),
        n6_z: cycles_z.len(),
        n_xz2: hist.get(2).copied().unwrap_or(0),
        overlap_histogram: hist,
        cycles_x,
        cycles_z,
    }
}

pub fn census(b: &BasePair) -> CycleCensus {
    census_of(&b.hx, &b.hz)
}

/// Search mode for [`search_coefficients`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    /// Lexicographically least normalized candidate.
    FirstFound,
    /// Every normalized candidate.
    Exhaustive,
}

/// Necessary conditions for the certificates to be satisfiable.
pub fn check_feasibility(q: u32, m: u32, j: usize) -> Result<()> {
    if j == 0 {
        return Err(Error::Infeasible("J must be at least 1".into()));
    }
    if m == 0 || (q - 1) % m != 0 {
        return Err(Error::Infeasible(format!("m={m} does not divide q-1={}", q - 1)));
    }
    if (q as usize) < 2 * j {
        return Err(Error::Infeasible(format!("q={q} < 2J={}", 2 * j)));
    }
    if j >= 2 && (q - 1) / m < 2 {
        return Err(Error::Infeasible(format!(
            "J>=2 needs at least two nonzero cosets, (q-1)/m={}",
            (q - 1) / m
        )));
    }
    Ok(())
}

// Ordered tuples of `len` distinct elements from `pool`, in lexicographic order.
fn arrangements(pool: &[Elem], len: usize, prefix: &mut Vec<Elem>, out: &mut Vec<Vec<Elem>>) {
    if prefix.len() == len {
        out.push(prefix.clone());
        return;
    }
    for &x in pool {
        if !prefix.contains(&x) {
            prefix.push(x);
            arrangements(pool, len, prefix, out);
            prefix.pop();
        }
    }
}

fn ordered_tuples(pool: &[Elem], len: usize) -> Vec<Vec<Elem>> {
    let mut out = Vec::new();
    arrangements(pool, len, &mut Vec::with_capacity(len), &mut out);
    out
}

struct SearchCtx<'a> {
    f: &'a Field,
    s: &'a Subgroup,
    j: usize,
    desc: FieldDescriptor,
}

impl SearchCtx<'_> {
    // All candidates with the given branch-0 a-array, in lexicographic order.
    fn candidates_for(&self, a0: &[Elem], first_only: bool) -> Vec<TwoBranchCoefficients> {
        let f = self.f;
        let s = self.s;
        let j = self.j;
        let q = f.q();
        let mut out = Vec::new();
        let rest: Vec<Elem> = (0..q).filter(|x| !a0.contains(x)).collect();
        let nonzero: Vec<Elem> = (1..q).collect();
        let a1_tails = ordered_tuples(&nonzero, j - 1);
        for b0 in ordered_tuples(&rest, j) {
            if same_type_ok_single(f, &b0).is_none() {
                continue;
            }
            for tail in &a1_tails {
                let mut a1 = Vec::with_capacity(j);
                a1.push(0);
                a1.extend_from_slice(tail);
                // a-side disjointness needs only the a arrays
                if !a_side_disjoint(f, s, a0, &a1) {
                    continue;
                }
                // b1_j lies in the intersection of a1_i + (b0_j - a0_i) M
                let mut choices: Vec<Vec<Elem>> = Vec::with_capacity(j);
                for &b0j in &b0 {
                    let mut set: Option<Vec<Elem>> = None;
                    for i in 0..j {
                        let coset: Vec<Elem> = s
                            .coset(f, f.sub(b0j, a0[i]))
                            .into_iter()
                            .map(|d| f.add(a1[i], d))
                            .collect();
                        set = Some(match set {
                            None => {
                                let mut c = coset;
                                c.sort_unstable();
                                c
                            }
                            Some(prev) => prev.into_iter().filter(|x| coset.contains(x)).collect(),
                        });
                    }
                    choices.push(set.unwrap_or_default());
                }
                if choices.iter().any(Vec::is_empty) {
                    continue;
                }
                let mut idx = vec![0usize; j];
                loop {
                    let b1: Vec<Elem> = idx.iter().zip(&choices).map(|(&k, c)| c[k]).collect();
                    if b_side_ok(f, s, &b0, &b1, &a1) {
                        out.push(TwoBranchCoefficients {
                            field: self.desc.clone(),
                            m: s.order(),
                            j,
                            a: [a0.to_vec(), a1.clone()],
                            b: [b0.clone(), b1],
                        });
                        if first_only {
                            return out;
                        }
                    }
                    // odometer, last index fastest
                    let mut k = j;
                    loop {
                        if k == 0 {
                            break;
                        }
                        k -= 1;
                        idx[k] += 1;
                        if idx[k] < choices[k].len() {
                            break;
                        }
                        idx[k] = 0;
                        if k == 0 {
                            k = usize::MAX;
                            break;
                        }
                    }
                    if k == usize::MAX {
                        break;
                    }
                }
            }
        }
        out
    }
}

fn same_type_ok_single(_f: &Field, v: &[Elem]) -> Option<()> {
    let mut s = v.to_vec();
    s.sort_unstable();
    s.windows(2).all(|w| w[0] != w[1]).then_some(())
}

fn a_side_disjoint(f: &Field, s: &Subgroup, a0: &[Elem], a1: &[Elem]) -> bool {
    let j = a0.len();
    for lo in 0..j {
        for hi in lo + 1..j {
            let d0 = f.sub(a0[hi], a0[lo]);
            let d1 = f.sub(a1[hi], a1[lo]);
            if d0 == 0 || d1 == 0 || s.coset_id(d0) == s.coset_id(d1) {
                return false;
            }
        }
    }
    true
}

fn b_side_ok(f: &Field, s: &Subgroup, b0: &[Elem], b1: &[Elem], a1: &[Elem]) -> bool {
    if b1.iter().any(|x| a1.contains(x)) {
        return false;
    }
    a_side_disjoint(f, s, b0, b1)
}

/// Normalized exhaustive search (`a0_0 = a1_0 = 0`, `a0_1 = 1`) for
/// coefficients passing both coset certificates.
///
/// Returns an empty list when the normalized space holds no candidate;
/// violations of the necessary conditions are an [`Error::Infeasible`].
pub fn search_coefficients(f: &Field, m: u32, j: usize, mode: SearchMode) -> Result<Vec<TwoBranchCoefficients>> {
    check_feasibility(f.q(), m, j)?;
    let s = Subgroup::of_order(f, m)?;
    let ctx = SearchCtx {
        f,
        s: &s,
        j,
        desc: f.descriptor().clone(),
    };
    let a0_list: Vec<Vec<Elem>> = if j == 1 {
        vec![vec![0]]
    } else {
        let pool: Vec<Elem> = (2..f.q()).collect();
        ordered_tuples(&pool, j - 2)
            .into_iter()
            .map(|t| {
                let mut a0 = vec![0, 1];
                a0.extend(t);
                a0
            })
            .collect()
    };
    let first = mode == SearchMode::FirstFound;

    #[cfg(feature = "parallel")]
    let found: Vec<TwoBranchCoefficients> = {
        use rayon::prelude::*;
        if first {
            a0_list
                .par_iter()
                .find_map_first(|a0| ctx.candidates_for(a0, true).into_iter().next())
                .into_iter()
                .collect()
        } else {
            a0_list
                .par_iter()
                .map(|a0| ctx.candidates_for(a0, false))
                .collect::<Vec<_>>()
                .into_iter()
                .flatten()
                .collect()
        }
    };
    #[cfg(not(feature = "parallel"))]
    let found: Vec<TwoBranchCoefficients> = if first {
        a0_list
            .iter()
            .find_map(|a0| ctx.candidates_for(a0, true).into_iter().next())
            .into_iter()
            .collect()
    } else {
        a0_list.iter().flat_map(|a0| ctx.candidates_for(a0, false)).collect()
    };
    Ok(found)
}

/// Coefficient arrays for the bases tabulated with the construction
/// (`(J, L)`, field, arrays). F_9 entries use the encoding `x + 3y` for
/// `x + y*alpha` with `alpha^2 = -1`.
pub mod presets {
    use super::*;

    pub struct Preset {
        pub name: &'static str,
        pub p: u32,
        pub e: u32,
        pub m: u32,
        pub a0: &'static [Elem],
        pub b0: &'static [Elem],
        pub a1: &'static [Elem],
        pub b1: &'static [Elem],
    }

    impl Preset {
        pub fn coefficients(&self) -> TwoBranchCoefficients {
            let modulus = default_modulus_for(self.p, self.e);
            TwoBranchCoefficients::new(
                FieldDescriptor { p: self.p, e: self.e, modulus },
                self.m,
                [self.a0.to_vec(), self.a1.to_vec()],
                [self.b0.to_vec(), self.b1.to_vec()],
            )
            .expect("preset arrays are well-formed")
        }

        /// Column weight and row weight.
        pub fn jl(&self) -> (usize, usize) {
            (self.a0.len(), 2 * self.m as usize)
        }
    }

    fn default_modulus_for(p: u32, e: u32) -> Vec<u32> {
        crate::gf::default_modulus(p, e).expect("small field")
    }

    macro_rules! preset {
        ($name:expr, $p:expr, $e:expr, $m:expr, [$($a0:expr),*], [$($b0:expr),*], [$($a1:expr),*], [$($b1:expr),*]) => {
            Preset { name: $name, p: $p, e: $e, m: $m, a0: &[$($a0),*], b0: &[$($b0),*], a1: &[$($a1),*], b1: &[$($b1),*] }
        };
    }

    pub const ALL: &[Preset] = &[
        preset!("(3,6) F7", 7, 1, 3, [0, 1, 3], [2, 4, 5], [0, 3, 1], [4, 2, 5]),
        preset!("(3,8) F9", 3, 2, 4, [0, 1, 4], [2, 7, 5], [0, 4, 2], [3, 5, 8]),
        preset!("(3,10) F11", 11, 1, 5, [0, 1, 2], [3, 4, 5], [0, 2, 1], [4, 3, 5]),
        preset!("(3,10) F16", 2, 4, 5, [0, 1, 2], [7, 3, 6], [8, 13, 2], [11, 10, 6]),
        preset!("(3,12) F13", 13, 1, 6, [11, 6, 5], [12, 1, 9], [1, 4, 10], [2, 11, 7]),
        preset!("(3,14) F29", 29, 1, 7, [10, 25, 22], [24, 4, 14], [1, 25, 26], [18, 8, 14]),
        preset!("(3,16) F17", 17, 1, 8, [0, 1, 2], [3, 4, 5], [0, 3, 6], [5, 8, 11]),
        preset!("(3,18) F19", 19, 1, 9, [0, 1, 2], [3, 4, 5], [0, 2, 5], [10, 4, 7]),
        preset!("(3,20) F31", 31, 1, 10, [0, 1, 2], [3, 4, 5], [0, 5, 14], [6, 30, 20]),
        preset!("(3,30) F31", 31, 1, 15, [0, 1, 2], [3, 4, 5], [0, 3, 6], [11, 14, 4]),
        preset!("(4,8) F13", 13, 1, 4, [0, 1, 6, 5], [12, 9, 10, 7], [0, 10, 12, 2], [8, 9, 3, 4]),
        preset!("(4,10) F11", 11, 1, 5, [9, 8, 1, 4], [7, 3, 0, 6], [5, 10, 7, 3], [6, 9, 2, 0]),
        preset!("(4,12) F13", 13, 1, 6, [6, 4, 2, 8], [10, 11, 3, 0], [9, 8, 4, 0], [6, 1, 5, 11]),
        preset!("(4,14) F29", 29, 1, 7, [0, 1, 17, 13], [25, 5, 20, 10], [0, 28, 13, 15], [23, 5, 16, 12]),
        preset!("(4,16) F17", 17, 1, 8, [0, 1, 14, 10], [11, 13, 5, 9], [0, 6, 16, 13], [11, 1, 7, 4]),
        preset!("(4,18) F19", 19, 1, 9, [0, 1, 18, 17], [9, 12, 10, 11], [0, 12, 11, 8], [6, 10, 18, 7]),
        preset!("(4,20) F31", 31, 1, 10, [0, 1, 29, 27], [10, 8, 25, 7], [0, 26, 28, 14], [21, 2, 12, 19]),
        preset!("(4,22) F23", 23, 1, 11, [0, 1, 9, 22], [16, 7, 12, 21], [0, 22, 20, 12], [4, 7, 13, 10]),
        preset!("(4,24) F37", 37, 1, 12, [0, 1, 26, 17], [3, 12, 35, 14], [0, 7, 13, 18], [24, 21, 25, 11]),
        preset!("(4,26) F53", 53, 1, 13, [0, 1, 49, 2], [4, 20, 12, 11], [0, 11, 21, 51], [43, 31, 22, 4]),
        preset!("(4,28) F29", 29, 1, 14, [0, 1, 8, 24], [15, 11, 28, 17], [0, 26, 23, 12], [18, 8, 28, 19]),
        preset!("(4,30) F31", 31, 1, 15, [0, 1, 11, 6], [23, 19, 17, 14], [0, 17, 8, 10], [23, 2, 21, 20]),
        preset!("(5,10) F11", 11, 1, 5, [4, 3, 9, 6, 2], [1, 0, 10, 8, 5], [8, 6, 10, 2, 7], [4, 5, 3, 9, 1]),
    ];

    pub fn find(name: &str) -> Option<&'static Preset> {
        ALL.iter().find(|p| p.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binmat::product_is_zero;

    fn example1() -> TwoBranchCoefficients {
        TwoBranchCoefficients::prime(7, 3, &[0, 1, 3], &[2, 4, 5], &[0, 3, 1], &[4, 2, 5]).unwrap()
    }

    #[test]
    fn example1_column_001() {
        let b = build_base(&example1()).unwrap();
        assert_eq!((b.hx.nrows(), b.hx.ncols()), (21, 42));
        let c = b.column_index(0, 0, b.subgroup_elements().iter().position(|&h| h == 1).unwrap());
        assert_eq!(c, 0);
        let hx_col: Vec<usize> = (0..21).filter(|&r| b.hx.get(r, c)).collect();
        let hz_col: Vec<usize> = (0..21).filter(|&r| b.hz.get(r, c)).collect();
        assert_eq!(hx_col, vec![0, 8, 17]);
        assert_eq!(hz_col, vec![2, 11, 19]);
    }

    #[test]
    fn single_branch_degenerate() {
        let c = TwoBranchCoefficients::prime(7, 1, &[0], &[1], &[2], &[3]).unwrap();
        let b = build_base(&c).unwrap();
        assert!(b.hx.col_weights().iter().all(|&w| w == 1));
        assert!(b.hx.row_weights().iter().all(|&w| w == 2));
        let cen = census(&b);
        assert_eq!((cen.n6_x, cen.n6_z), (0, 0));
    }

    #[test]
    fn certificates_example1() {
        let c = example1();
        assert_eq!(check_orthogonality_certificate(&c).unwrap(), Ok(()));
        assert_eq!(check_4cycle_certificate(&c).unwrap(), Ok(()));
        let b = build_base(&c).unwrap();
        assert!(verify_4cycles_directly(&b));
        assert!(product_is_zero(&b.hx, &b.hz).unwrap());
    }

    #[test]
    fn certificate_failures() {
        let c = TwoBranchCoefficients::prime(7, 3, &[0, 1, 3], &[0, 4, 5], &[0, 3, 1], &[4, 2, 5]).unwrap();
        assert_eq!(
            check_orthogonality_certificate(&c).unwrap(),
            Err(CertificateFailure::CrossZeroDifference { branch: 0, i: 0, j: 0 })
        );
        let e = example1();
        let same = TwoBranchCoefficients::prime(7, 3, &e.a[0], &e.b[0], &e.a[0], &e.b[0]).unwrap();
        assert!(matches!(
            check_4cycle_certificate(&same).unwrap(),
            Err(CertificateFailure::SameTypeCosetOverlap { side: Side::X, .. })
        ));
    }

    #[test]
    fn direct_4cycle_check_on_all_ones() {
        let m = SparseBinMatrix::from_dense(&[vec![1, 1], vec![1, 1]]).unwrap();
        assert!(!has_no_4cycles(&m));
    }

    #[test]
    fn coordinates_roundtrip() {
        let b = build_base(&example1()).unwrap();
        for c in 0..b.n() {
            let (l, t, v) = b.column_coords(c);
            assert_eq!(b.column_index(l, t, v), c);
        }
    }

    #[test]
    fn feasibility_errors() {
        let f7 = Field::new(7, 1, None).unwrap();
        assert!(matches!(
            search_coefficients(&f7, 3, 4, SearchMode::FirstFound),
            Err(Error::Infeasible(_))
        ));
        assert!(matches!(
            search_coefficients(&f7, 6, 2, SearchMode::FirstFound),
            Err(Error::Infeasible(_))
        ));
        assert!(matches!(
            search_coefficients(&f7, 4, 2, SearchMode::FirstFound),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn first_found_is_least_exhaustive() {
        let f7 = Field::new(7, 1, None).unwrap();
        let all = search_coefficients(&f7, 3, 3, SearchMode::Exhaustive).unwrap();
        assert!(!all.is_empty());
        let first = search_coefficients(&f7, 3, 3, SearchMode::FirstFound).unwrap();
        let key = |c: &TwoBranchCoefficients| [c.a[0].clone(), c.b[0].clone(), c.a[1].clone(), c.b[1].clone()].concat();
        let least = all.iter().min_by_key(|c| key(c)).unwrap();
        assert_eq!(&first[0], least);
        let mut keys: Vec<_> = all.iter().map(key).collect();
        let sorted = {
            let mut k = keys.clone();
            k.sort();
            k
        };
        assert_eq!(keys, sorted);
        keys.dedup();
        assert_eq!(keys.len(), all.len());
    }
}

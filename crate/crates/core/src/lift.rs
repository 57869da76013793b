//! Circulant permutation (CPM) lifts of a base pair and the congruence
//! systems that govern their labels.
//!
//! Lifted check `(r, u)` is adjacent to lifted variable `(c, u + s(r, c))`,
//! at global row `r*P + u` and column `c*P + f`.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::base::{census, BasePair, SixCycle};
use crate::binmat::{product_is_zero, BitVec, RowSpaceBasis, SparseBinMatrix};
use crate::certify::CssCode;
use crate::error::{Error, Result};
use crate::zmod::{gcd, AffineSolutions, PrimeRowSpace};
use crate::Side;

/// Integer linear form over edge variables, reduced per modulus on use.
pub type IntForm = Vec<(usize, i64)>;

fn normalize(mut f: IntForm) -> IntForm {
    f.sort_unstable_by_key(|&(v, _)| v);
    let mut out: IntForm = Vec::with_capacity(f.len());
    for (v, c) in f {
        match out.last_mut() {
            Some((lv, lc)) if *lv == v => *lc += c,
            _ => out.push((v, c)),
        }
    }
    out.retain(|&(_, c)| c != 0);
    out
}

/// Form coefficients reduced into `[0, m)`.
pub fn reduce_form(f: &[(usize, i64)], m: u32) -> Vec<(usize, u32)> {
    f.iter()
        .map(|&(v, c)| (v, c.rem_euclid(m as i64) as u32))
        .filter(|&(_, c)| c != 0)
        .collect()
}

/// Value of an integer form at `x`, reduced mod `m`.
pub fn eval_form(f: &[(usize, i64)], x: &[u32], m: u32) -> u32 {
    let m = m as i64;
    f.iter()
        .map(|&(v, c)| (c.rem_euclid(m) * x[v] as i64) % m)
        .sum::<i64>()
        .rem_euclid(m) as u32
}

/// Numbering of base edges: X edges row by row, then Z edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeIndex {
    x_rows: Vec<Vec<usize>>,
    z_rows: Vec<Vec<usize>>,
    x_off: Vec<usize>,
    z_off: Vec<usize>,
    total: usize,
}

impl EdgeIndex {
    pub fn new(hx: &SparseBinMatrix, hz: &SparseBinMatrix) -> Self {
        let mut x_off = Vec::with_capacity(hx.nrows());
        let mut k = 0;
        for r in hx.rows() {
            x_off.push(k);
            k += r.len();
        }
        let mut z_off = Vec::with_capacity(hz.nrows());
        for r in hz.rows() {
            z_off.push(k);
            k += r.len();
        }
        EdgeIndex {
            x_rows: hx.rows().to_vec(),
            z_rows: hz.rows().to_vec(),
            x_off,
            z_off,
            total: k,
        }
    }

    pub fn of_base(b: &BasePair) -> Self {
        Self::new(&b.hx, &b.hz)
    }

    pub fn len(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn rows(&self, side: Side) -> &[Vec<usize>] {
        match side {
            Side::X => &self.x_rows,
            Side::Z => &self.z_rows,
        }
    }

    /// Variable id of edge `(r, c)`, if it is a base edge.
    pub fn var(&self, side: Side, r: usize, c: usize) -> Option<usize> {
        let (rows, off) = match side {
            Side::X => (&self.x_rows, &self.x_off),
            Side::Z => (&self.z_rows, &self.z_off),
        };
        rows.get(r)?.binary_search(&c).ok().map(|i| off[r] + i)
    }

    fn var_unchecked(&self, side: Side, r: usize, c: usize) -> usize {
        self.var(side, r, c).expect("edge exists")
    }

    /// Inverse of [`Self::var`].
    pub fn edge(&self, v: usize) -> (Side, usize, usize) {
        let (side, rows, off) = if self.z_off.first().is_some_and(|&z| v >= z) {
            (Side::Z, &self.z_rows, &self.z_off)
        } else {
            (Side::X, &self.x_rows, &self.x_off)
        };
        let r = off.partition_point(|&o| o <= v) - 1;
        (side, r, rows[r][v - off[r]])
    }
}

/// CPM exponents on every base edge, aligned with the base row supports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftLabels {
    pub p: u32,
    pub x: Vec<Vec<u32>>,
    pub z: Vec<Vec<u32>>,
}

impl LiftLabels {
    pub fn zeros(b: &BasePair, p: u32) -> Self {
        LiftLabels {
            p,
            x: b.hx.rows().iter().map(|r| vec![0; r.len()]).collect(),
            z: b.hz.rows().iter().map(|r| vec![0; r.len()]).collect(),
        }
    }

    pub fn from_vector(edges: &EdgeIndex, p: u32, s: &[u32]) -> Self {
        let mut k = 0;
        let mut take = |rows: &[Vec<usize>]| -> Vec<Vec<u32>> {
            rows.iter()
                .map(|r| {
                    let v = s[k..k + r.len()].to_vec();
                    k += r.len();
                    v
                })
                .collect()
        };
        let x = take(&edges.x_rows);
        let z = take(&edges.z_rows);
        LiftLabels { p, x, z }
    }

    pub fn to_vector(&self) -> Vec<u32> {
        self.x.iter().chain(&self.z).flatten().copied().collect()
    }

    pub fn side(&self, side: Side) -> &[Vec<u32>] {
        match side {
            Side::X => &self.x,
            Side::Z => &self.z,
        }
    }

    pub fn get(&self, edges: &EdgeIndex, side: Side, r: usize, c: usize) -> Option<u32> {
        let i = edges.rows(side).get(r)?.binary_search(&c).ok()?;
        Some(self.side(side)[r][i])
    }

    /// Checks shape against the base and range of values.
    pub fn validate(&self, b: &BasePair) -> Result<()> {
        let shape_ok = |h: &SparseBinMatrix, l: &[Vec<u32>]| {
            h.nrows() == l.len() && h.rows().iter().zip(l).all(|(r, v)| r.len() == v.len())
        };
        if self.p == 0 {
            return Err(Error::InvalidLift("P must be positive".into()));
        }
        if !shape_ok(&b.hx, &self.x) || !shape_ok(&b.hz, &self.z) {
            return Err(Error::InvalidLift("labels do not cover the base edges".into()));
        }
        if self.to_vector().iter().any(|&s| s >= self.p) {
            return Err(Error::InvalidLift("label outside [0, P)".into()));
        }
        Ok(())
    }
}

/// Lifts one matrix: entry `(r, c)` with label `s` becomes the CPM `Pi^s`.
pub fn lift_matrix(h: &SparseBinMatrix, labels: &[Vec<u32>], p: usize) -> SparseBinMatrix {
    let mut rows = Vec::with_capacity(h.nrows() * p);
    for (r, cols) in h.rows().iter().enumerate() {
        for u in 0..p {
            let mut row: Vec<usize> = cols
                .iter()
                .zip(&labels[r])
                .map(|(&c, &s)| c * p + (u + s as usize) % p)
                .collect();
            row.sort_unstable();
            rows.push(row);
        }
    }
    SparseBinMatrix::new(h.ncols() * p, rows).expect("lifted rows are well-formed")
}

pub fn lift_pair(b: &BasePair, labels: &LiftLabels) -> Result<(SparseBinMatrix, SparseBinMatrix)> {
    labels.validate(b)?;
    let p = labels.p as usize;
    Ok((lift_matrix(&b.hx, &labels.x, p), lift_matrix(&b.hz, &labels.z, p)))
}

/// Builds the lifted code. Fails with [`Error::NotOrthogonal`] if the
/// labels break a zero congruence.
pub fn build_lift(b: &BasePair, labels: &LiftLabels) -> Result<CssCode> {
    let (hx, hz) = lift_pair(b, labels)?;
    Ok(CssCode::new(hx, hz)?.with_circulant(labels.p as usize))
}

/// One row `+x(r,c0) - z(q,c0) - x(r,c1) + z(q,c1)` per X/Z row pair
/// sharing exactly two columns.
pub fn zero_constraints(b: &BasePair) -> Result<Vec<IntForm>> {
    zero_constraints_of(&b.hx, &b.hz)
}

pub fn zero_constraints_of(hx: &SparseBinMatrix, hz: &SparseBinMatrix) -> Result<Vec<IntForm>> {
    let edges = EdgeIndex::new(hx, hz);
    let zcols = hz.columns();
    let mut out = Vec::new();
    for (r, row) in hx.rows().iter().enumerate() {
        let mut shared: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for &c in row {
            for &q in &zcols[c] {
                shared.entry(q).or_default().push(c);
            }
        }
        for (q, cols) in shared {
            if cols.len() != 2 {
                return Err(Error::OverlapHypothesis {
                    x_row: r,
                    z_row: q,
                    shared: cols.len(),
                });
            }
            let (c0, c1) = (cols[0], cols[1]);
            out.push(vec![
                (edges.var_unchecked(Side::X, r, c0), 1),
                (edges.var_unchecked(Side::Z, q, c0), -1),
                (edges.var_unchecked(Side::X, r, c1), -1),
                (edges.var_unchecked(Side::Z, q, c1), 1),
            ]);
        }
    }
    Ok(out.into_iter().map(normalize).collect())
}

/// Signed exponent sum of a same-type 6-cycle as a form over edge variables.
pub fn sixcycle_form(edges: &EdgeIndex, side: Side, cyc: &SixCycle) -> IntForm {
    let f = cyc
        .signed_edges()
        .iter()
        .enumerate()
        .map(|(k, &(r, c))| (edges.var_unchecked(side, r, c), if k % 2 == 0 { 1 } else { -1 }))
        .collect();
    normalize(f)
}

/// One form per same-type base 6-cycle of the given side.
pub fn sixcycle_forms(b: &BasePair, side: Side) -> Vec<IntForm> {
    let edges = EdgeIndex::of_base(b);
    let cen = census(b);
    cen.cycles(side).iter().map(|c| sixcycle_form(&edges, side, c)).collect()
}

/// Subgroup `K = step * Z/P` of the lift coordinates; `(Z/P)/K = Z/step`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftSubgroup {
    pub p: u32,
    pub step: u32,
}

impl LiftSubgroup {
    pub fn new(p: u32, step: u32) -> Result<Self> {
        if step == 0 || p % step != 0 {
            return Err(Error::Invalid(format!("{step} does not divide {p}")));
        }
        Ok(LiftSubgroup { p, step })
    }

    /// Subgroup from an explicit element list such as `{0, 16, 32, 48}`.
    pub fn from_elements(p: u32, elems: &[u32]) -> Result<Self> {
        let step = elems.iter().fold(p, |g, &e| gcd(g as u64, e as u64) as u32);
        let k = Self::new(p, step)?;
        let mut want = k.elements();
        want.sort_unstable();
        let mut have = elems.to_vec();
        have.sort_unstable();
        have.dedup();
        if want != have {
            return Err(Error::Invalid(format!("{elems:?} is not a subgroup of Z/{p}")));
        }
        Ok(k)
    }

    pub fn elements(&self) -> Vec<u32> {
        (0..self.p / self.step).map(|i| i * self.step).collect()
    }

    pub fn order(&self) -> u32 {
        self.p / self.step
    }

    /// Size of the quotient `(Z/P)/K`.
    pub fn quotient(&self) -> u32 {
        self.step
    }
}

/// Lifted columns of `{(c, f_c + k) : c in T, k in K}`.
pub fn coset_support(t: &[usize], f: &[u32], k: &LiftSubgroup) -> Vec<usize> {
    let p = k.p as usize;
    let mut out: Vec<usize> = t
        .iter()
        .zip(f)
        .flat_map(|(&c, &fc)| k.elements().into_iter().map(move |e| c * p + (fc + e) as usize % p))
        .collect();
    out.sort_unstable();
    out
}

/// A family of base supports closed under the base symmetries.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportOrbit {
    pub supports: Vec<Vec<usize>>,
    pub k: LiftSubgroup,
    pub seeds: Vec<Vec<usize>>,
}

/// Image of a column under `t -> mu t + tau`, `h -> mu h`.
fn map_column(b: &BasePair, f: &crate::gf::Field, c: usize, mu: u32, tau: u32) -> usize {
    let (l, t, v) = b.column_coords(c);
    let h = b.subgroup_elements()[v];
    let t2 = f.add(f.mul(mu, t), tau);
    let h2 = f.mul(mu, h);
    let v2 = b
        .subgroup_elements()
        .iter()
        .position(|&x| x == h2)
        .expect("subgroup closed under multiplication");
    b.column_index(l, t2, v2)
}

/// Closes the seeds under translations of `t` by the field and joint scaling
/// of `(t, h)` by the subgroup. Every member is re-verified to lie in
/// `ker H_X` and outside `row(H_Z)`.
pub fn orbit_from_seeds(b: &BasePair, seeds: &[Vec<usize>], k: LiftSubgroup) -> Result<SupportOrbit> {
    let (f, _) = b.coeffs.setup()?;
    let mut set = BTreeSet::new();
    for s in seeds {
        if s.iter().any(|&c| c >= b.n()) {
            return Err(Error::SupportPrecondition(format!("seed {s:?} has a column outside the base")));
        }
        if !b.hx.syndrome_of_support(s)?.is_zero() {
            return Err(Error::SupportPrecondition(format!("seed {s:?} is not in ker H_X")));
        }
        for &mu in b.subgroup_elements() {
            for tau in 0..b.q() as u32 {
                let mut img: Vec<usize> = s.iter().map(|&c| map_column(b, &f, c, mu, tau)).collect();
                img.sort_unstable();
                set.insert(img);
            }
        }
    }
    let rows_z = RowSpaceBasis::from_matrix(&b.hz);
    for s in &set {
        if !b.hx.syndrome_of_support(s)?.is_zero() {
            return Err(Error::OrbitLeftKernel(s.clone()));
        }
        if rows_z.contains(&BitVec::from_indices(b.n(), s))? {
            return Err(Error::SupportPrecondition(format!("{s:?} lies in row(H_Z)")));
        }
    }
    Ok(SupportOrbit {
        supports: set.into_iter().collect(),
        k,
        seeds: seeds.to_vec(),
    })
}

/// Edge of the constraint graph of a support: X-row `row` meets the support
/// in exactly the columns `a < b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportEdge {
    pub row: usize,
    pub a: usize,
    pub b: usize,
}

/// Congruence analysis of one support under the lift-coordinate subgroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SupportAnalysis {
    /// Some X-row meets the support an odd number of times, so no lift of
    /// this pattern has zero syndrome for any labels.
    TriviallyExcluded { row: usize, count: usize },
    Forms(SupportForms),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportForms {
    pub support: Vec<usize>,
    /// Quotient modulus `|(Z/P)/K|`.
    pub modulus: u32,
    /// Fundamental-cycle forms; the pattern can close only if all vanish.
    pub forms: Vec<IntForm>,
    pub edges: Vec<SupportEdge>,
    /// Tree edges, and for each column its potential `f_c - f_root` as a form.
    pub tree: Vec<SupportEdge>,
    pub potentials: Vec<IntForm>,
    pub connected: bool,
}

impl SupportForms {
    /// The graph has no cycle, so nothing can exclude the pattern.
    pub fn is_tree(&self) -> bool {
        self.forms.is_empty()
    }

    /// Form of the shortest fundamental cycle.
    pub fn shortest(&self) -> Option<&IntForm> {
        self.forms.iter().min_by_key(|f| f.len())
    }

    /// True iff the labels put at least one cycle form off zero.
    pub fn excluded_by(&self, s: &[u32]) -> bool {
        self.forms.iter().any(|f| eval_form(f, s, self.modulus) != 0)
    }

    /// Representatives `f_c` (mod the quotient) making every row congruence
    /// hold, if the labels leave the pattern closable.
    pub fn closing_representatives(&self, s: &[u32]) -> Option<Vec<u32>> {
        if self.excluded_by(s) {
            return None;
        }
        Some(self.potentials.iter().map(|f| eval_form(f, s, self.modulus)).collect())
    }
}

/// Builds the row congruences `f_b - f_a = s(r,b) - s(r,a)` in `(Z/P)/K` for
/// a base support and reduces them to fundamental-cycle forms.
pub fn support_quotient_forms(b: &BasePair, t: &[usize], k: &LiftSubgroup) -> Result<SupportAnalysis> {
    let edges_ix = EdgeIndex::of_base(b);
    let mut t = t.to_vec();
    t.sort_unstable();
    t.dedup();
    let pos = |c: usize| t.binary_search(&c).ok();
    let cols = b.hx.columns();
    let mut meet: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for &c in &t {
        for &r in &cols[c] {
            meet.entry(r).or_default().push(c);
        }
    }
    let mut edges = Vec::new();
    for (&r, cs) in &meet {
        match cs.len() {
            2 => edges.push(SupportEdge { row: r, a: cs[0], b: cs[1] }),
            n if n % 2 == 1 => return Ok(SupportAnalysis::TriviallyExcluded { row: r, count: n }),
            n => {
                return Err(Error::SupportPrecondition(format!(
                    "X-row {r} meets the support in {n} columns"
                )))
            }
        }
    }
    let nv = t.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nv];
    for (i, e) in edges.iter().enumerate() {
        adj[pos(e.a).unwrap()].push(i);
        adj[pos(e.b).unwrap()].push(i);
    }
    // s(r, b) - s(r, a) for edge e, oriented from `from` to the other end
    let step = |e: &SupportEdge, from: usize| -> IntForm {
        let (x, y) = if from == e.a { (e.a, e.b) } else { (e.b, e.a) };
        vec![
            (edges_ix.var_unchecked(Side::X, e.row, y), 1),
            (edges_ix.var_unchecked(Side::X, e.row, x), -1),
        ]
    };
    let mut potentials: Vec<Option<IntForm>> = vec![None; nv];
    let mut tree_edge = vec![false; edges.len()];
    let mut tree = Vec::new();
    let mut components = 0;
    for root in 0..nv {
        if potentials[root].is_some() {
            continue;
        }
        components += 1;
        potentials[root] = Some(Vec::new());
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &ei in &adj[v] {
                let e = edges[ei];
                let other = if t[v] == e.a { e.b } else { e.a };
                let w = pos(other).unwrap();
                if potentials[w].is_none() {
                    let mut f = potentials[v].clone().unwrap();
                    f.extend(step(&e, t[v]));
                    potentials[w] = Some(normalize(f));
                    tree_edge[ei] = true;
                    tree.push(e);
                    queue.push_back(w);
                }
            }
        }
    }
    let potentials: Vec<IntForm> = potentials.into_iter().map(Option::unwrap).collect();
    let forms = edges
        .iter()
        .zip(&tree_edge)
        .filter(|(_, &te)| !te)
        .map(|(e, _)| {
            let (ia, ib) = (pos(e.a).unwrap(), pos(e.b).unwrap());
            // potential(a) + step(a -> b) - potential(b)
            let mut f = potentials[ia].clone();
            f.extend(step(e, e.a));
            f.extend(potentials[ib].iter().map(|&(v, c)| (v, -c)));
            normalize(f)
        })
        .collect();
    Ok(SupportAnalysis::Forms(SupportForms {
        support: t,
        modulus: k.quotient(),
        forms,
        edges,
        tree,
        potentials,
        connected: components <= 1,
    }))
}

/// Which family a nonzero constraint belongs to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FormTag {
    SixCycle { side: Side, cycle: SixCycle },
    Support { index: usize },
}

#[derive(Clone, Debug)]
pub struct NonzeroForm {
    pub terms: IntForm,
    pub modulus: u32,
    pub tag: FormTag,
}

/// Zero and nonzero congruences on the base-edge labels.
#[derive(Clone, Debug)]
pub struct CongruenceSystem {
    pub p: u32,
    pub edges: EdgeIndex,
    pub zero: Vec<IntForm>,
    pub nonzero: Vec<NonzeroForm>,
    /// Optional inhomogeneous constraints, such as those that make a chosen
    /// coset support close.
    pub pinned: Vec<PinnedForm>,
}

/// `terms(s) = target (mod modulus)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PinnedForm {
    pub terms: IntForm,
    pub modulus: u32,
    pub target: u32,
}

impl CongruenceSystem {
    pub fn empty(edges: EdgeIndex, p: u32) -> Self {
        CongruenceSystem {
            p,
            edges,
            zero: Vec::new(),
            nonzero: Vec::new(),
            pinned: Vec::new(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.edges.len()
    }
}

/// Assembles orthogonality rows, 6-cycle forms for both sides and, when an
/// orbit is given, one shortest-cycle quotient form per support.
pub fn assemble_system(b: &BasePair, p: u32, orbit: Option<&SupportOrbit>) -> Result<CongruenceSystem> {
    let edges = EdgeIndex::of_base(b);
    let zero = zero_constraints(b)?;
    let cen = census(b);
    let mut nonzero = Vec::new();
    for side in [Side::X, Side::Z] {
        for cyc in cen.cycles(side) {
            nonzero.push(NonzeroForm {
                terms: sixcycle_form(&edges, side, cyc),
                modulus: p,
                tag: FormTag::SixCycle { side, cycle: *cyc },
            });
        }
    }
    if let Some(o) = orbit {
        if o.k.p != p {
            return Err(Error::Invalid(format!("orbit subgroup lives in Z/{}, lift uses P={p}", o.k.p)));
        }
        for (index, t) in o.supports.iter().enumerate() {
            match support_quotient_forms(b, t, &o.k)? {
                SupportAnalysis::TriviallyExcluded { .. } => {}
                SupportAnalysis::Forms(sf) => {
                    let f = sf.shortest().ok_or_else(|| {
                        Error::SupportPrecondition(format!("support {t:?} has a tree constraint graph"))
                    })?;
                    nonzero.push(NonzeroForm {
                        terms: f.clone(),
                        modulus: sf.modulus,
                        tag: FormTag::Support { index },
                    });
                }
            }
        }
    }
    Ok(CongruenceSystem {
        p,
        edges,
        zero,
        nonzero,
        pinned: Vec::new(),
    })
}

/// Constraints under which the lifted coset support
/// `{(c, f_c + k) : (c, f_c) in anchors, k in K}` has zero syndrome against
/// the checks whose kernel holds `side` logicals (`H_Z` for X, `H_X` for Z):
/// for every check row meeting the base columns twice, in `a` and `b`,
/// `s(r,b) - s(r,a) = f_b - f_a (mod |(Z/P)/K|)`.
pub fn witness_constraints(b: &BasePair, side: Side, anchors: &[(usize, u32)], k: &LiftSubgroup) -> Result<Vec<PinnedForm>> {
    let edges = EdgeIndex::of_base(b);
    let check = side.other();
    let h = b.matrix(check);
    let d = k.quotient();
    let mut f = std::collections::BTreeMap::new();
    for &(c, fc) in anchors {
        if c >= b.n() || f.insert(c, fc).is_some() {
            return Err(Error::SupportPrecondition(format!("bad anchor column {c}")));
        }
    }
    let cols = h.columns();
    let mut meet: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for &c in f.keys() {
        for &r in &cols[c] {
            meet.entry(r).or_default().push(c);
        }
    }
    let mut out = Vec::new();
    for (r, cs) in meet {
        if cs.len() != 2 {
            return Err(Error::SupportPrecondition(format!(
                "{check}-row {r} meets the anchor columns {} times",
                cs.len()
            )));
        }
        let (a, bc) = (cs[0], cs[1]);
        let target = (f[&bc] as i64 - f[&a] as i64).rem_euclid(d as i64) as u32;
        out.push(PinnedForm {
            terms: vec![(edges.var_unchecked(check, r, bc), 1), (edges.var_unchecked(check, r, a), -1)],
            modulus: d,
            target,
        });
    }
    Ok(out)
}

/// Verdict per nonzero form of [`liftability_report`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Liftability {
    Avoidable,
    ForcedZero,
}

/// Primes used by the row-space screen.
pub const SCREEN_PRIMES: [u32; 2] = [2, 997];

/// Heuristic screen: a form is forced to zero iff it lies in the row space
/// of the zero constraints modulo every screening prime.
pub fn liftability_report(sys: &CongruenceSystem) -> Vec<Liftability> {
    let n = sys.nvars();
    let spaces: Vec<PrimeRowSpace> = SCREEN_PRIMES
        .iter()
        .map(|&q| {
            let rows: Vec<Vec<(usize, u32)>> = sys.zero.iter().map(|r| reduce_form(r, q)).collect();
            PrimeRowSpace::new(&rows, n, q)
        })
        .collect();
    sys.nonzero
        .iter()
        .map(|f| {
            let forced = SCREEN_PRIMES
                .iter()
                .zip(&spaces)
                .all(|(&q, sp)| sp.contains(&reduce_form(&f.terms, q)));
            if forced {
                Liftability::ForcedZero
            } else {
                Liftability::Avoidable
            }
        })
        .collect()
}

/// A constraint violated by a label vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Zero { index: usize, value: u32 },
    Pinned { index: usize, value: u32 },
    Nonzero { index: usize },
}

/// Direct evaluation of every constraint, independent of any search state.
pub fn check_labels(sys: &CongruenceSystem, s: &[u32]) -> Vec<Violation> {
    let mut v = Vec::new();
    for (index, r) in sys.zero.iter().enumerate() {
        let value = eval_form(r, s, sys.p);
        if value != 0 {
            v.push(Violation::Zero { index, value });
        }
    }
    for (index, pf) in sys.pinned.iter().enumerate() {
        let value = eval_form(&pf.terms, s, pf.modulus);
        if value != pf.target % pf.modulus {
            v.push(Violation::Pinned { index, value });
        }
    }
    for (index, f) in sys.nonzero.iter().enumerate() {
        if eval_form(&f.terms, s, f.modulus) == 0 {
            v.push(Violation::Nonzero { index });
        }
    }
    v
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveMode {
    /// Random points of the solution set, random nonzero values, restarts.
    Randomized,
    /// Depth-first over all achievable nonzero values, ascending.
    Complete,
}

#[derive(Clone, Copy, Debug)]
pub struct SolveBudget {
    pub restarts: usize,
    /// Pins per restart (randomized) or total search nodes (complete).
    pub node_limit: u64,
}

impl Default for SolveBudget {
    fn default() -> Self {
        SolveBudget {
            restarts: 64,
            node_limit: 1_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    Solved(LiftLabels),
    /// Complete search exhausted every branch.
    Unsat,
    BudgetExhausted,
}

// None if the pinned constraints are inconsistent with orthogonality.
fn orthogonal_solutions(sys: &CongruenceSystem) -> Option<AffineSolutions> {
    let mut st = AffineSolutions::full(sys.nvars(), sys.p);
    for r in &sys.zero {
        let ok = st.constrain(&reduce_form(r, sys.p), sys.p, 0);
        debug_assert!(ok, "homogeneous rows are always consistent");
    }
    for pf in &sys.pinned {
        if !st.constrain(&reduce_form(&pf.terms, pf.modulus), pf.modulus, pf.target % pf.modulus) {
            return None;
        }
    }
    Some(st)
}

fn randomize(st: &mut AffineSolutions, rng: &mut ChaCha8Rng) {
    let p = st.modulus();
    let t: Vec<u32> = (0..st.generator_count()).map(|_| rng.gen_range(0..p)).collect();
    st.shift(&t);
}

/// A uniformly random label vector satisfying all zero and pinned
/// constraints, if any exists.
pub fn random_orthogonal_labels(sys: &CongruenceSystem, seed: u64) -> Option<LiftLabels> {
    let mut st = orthogonal_solutions(sys)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    randomize(&mut st, &mut rng);
    Some(LiftLabels::from_vector(&sys.edges, sys.p, st.point()))
}

fn reduced_nonzero(sys: &CongruenceSystem) -> Vec<(Vec<(usize, u32)>, u32)> {
    sys.nonzero
        .iter()
        .map(|f| (reduce_form(&f.terms, f.modulus), f.modulus))
        .collect()
}

fn randomized_attempt(
    base: &AffineSolutions,
    forms: &[(Vec<(usize, u32)>, u32)],
    seed: u64,
    restart: usize,
    pin_limit: u64,
) -> Option<Vec<u32>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    let mut st = base.clone();
    randomize(&mut st, &mut rng);
    for _ in 0..pin_limit {
        // violated forms with their achievable steps; fewest options first
        let mut best: Vec<(usize, u32)> = Vec::new();
        let mut best_options = u32::MAX;
        for (j, (t, m)) in forms.iter().enumerate() {
            if crate::zmod::eval(t, st.point(), *m) != 0 {
                continue;
            }
            let (_, g) = st.range(t, *m);
            let options = *m / g - 1;
            if options == 0 {
                return None;
            }
            if options < best_options {
                best_options = options;
                best.clear();
            }
            if options == best_options {
                best.push((j, g));
            }
        }
        if best.is_empty() {
            return Some(st.point().to_vec());
        }
        let (j, g) = best[rng.gen_range(0..best.len())];
        let (t, m) = &forms[j];
        let u = g * rng.gen_range(1..*m / g);
        let ok = st.constrain(t, *m, u);
        debug_assert!(ok);
        randomize(&mut st, &mut rng);
    }
    None
}

enum Dfs {
    Found(Vec<u32>),
    Exhausted,
    OutOfBudget,
}

// Branches on the violated form with the fewest achievable nonzero values
// (lowest index on ties); a violated form that is constant prunes at once.
fn complete_dfs(st: &AffineSolutions, forms: &[(Vec<(usize, u32)>, u32)], nodes: &mut u64, limit: u64) -> Dfs {
    *nodes += 1;
    if *nodes > limit {
        return Dfs::OutOfBudget;
    }
    let mut pick: Option<(usize, u32, u32)> = None;
    for (j, (t, m)) in forms.iter().enumerate() {
        if crate::zmod::eval(t, st.point(), *m) != 0 {
            continue;
        }
        let (_, g) = st.range(t, *m);
        let options = *m / g - 1;
        if options == 0 {
            return Dfs::Exhausted;
        }
        if pick.is_none_or(|(_, _, o)| options < o) {
            pick = Some((j, g, options));
        }
    }
    let Some((j, g, _)) = pick else {
        return Dfs::Found(st.point().to_vec());
    };
    let (t, m) = &forms[j];
    for k in 1..*m / g {
        let mut next = st.clone();
        let ok = next.constrain(t, *m, k * g);
        debug_assert!(ok);
        match complete_dfs(&next, forms, nodes, limit) {
            Dfs::Exhausted => {}
            other => return other,
        }
    }
    Dfs::Exhausted
}

/// Searches for labels satisfying every zero and nonzero congruence. Any
/// returned labels have been re-verified by [`check_labels`].
pub fn solve_labels(sys: &CongruenceSystem, seed: u64, budget: SolveBudget, mode: SolveMode) -> SolveOutcome {
    let Some(base) = orthogonal_solutions(sys) else {
        return SolveOutcome::Unsat;
    };
    let forms = reduced_nonzero(sys);
    let found = match mode {
        SolveMode::Randomized => {
            #[cfg(feature = "parallel")]
            let r = {
                use rayon::prelude::*;
                (0..budget.restarts)
                    .into_par_iter()
                    .find_map_first(|i| randomized_attempt(&base, &forms, seed, i, budget.node_limit))
            };
            #[cfg(not(feature = "parallel"))]
            let r = (0..budget.restarts).find_map(|i| randomized_attempt(&base, &forms, seed, i, budget.node_limit));
            match r {
                Some(s) => s,
                None => return SolveOutcome::BudgetExhausted,
            }
        }
        SolveMode::Complete => {
            let mut nodes = 0;
            match complete_dfs(&base, &forms, &mut nodes, budget.node_limit) {
                Dfs::Found(s) => s,
                Dfs::Exhausted => return SolveOutcome::Unsat,
                Dfs::OutOfBudget => return SolveOutcome::BudgetExhausted,
            }
        }
    };
    let bad = check_labels(sys, &found);
    assert!(bad.is_empty(), "solver returned labels violating {bad:?}");
    SolveOutcome::Solved(LiftLabels::from_vector(&sys.edges, sys.p, &found))
}

/// Node of a Tanner graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TannerNode {
    Check(usize),
    Var(usize),
}

/// Shortest cycle of length at most `max_len` in the Tanner graph of `h`,
/// as the alternating node sequence, found by breadth-first search from
/// every vertex.
pub fn shortest_cycle(h: &SparseBinMatrix, max_len: usize) -> Option<Vec<TannerNode>> {
    let m = h.nrows();
    let n = h.ncols();
    let cols = h.columns();
    let total = m + n;
    // vertex ids: checks 0..m, variables m..m+n
    let nbrs = |v: usize| -> &[usize] {
        if v < m {
            h.row(v)
        } else {
            &cols[v - m]
        }
    };
    let id = |v: usize, of_check: bool| if of_check { v + m } else { v };
    let mut dist = vec![usize::MAX; total];
    let mut parent = vec![usize::MAX; total];
    let mut best: Option<(usize, Vec<usize>)> = None;
    for root in 0..total {
        let bound = best.as_ref().map_or(max_len, |(l, _)| l - 1);
        let mut touched = vec![root];
        dist[root] = 0;
        let mut queue = VecDeque::from([root]);
        'bfs: while let Some(u) = queue.pop_front() {
            if 2 * dist[u] + 1 > bound {
                break;
            }
            for &w0 in nbrs(u) {
                let w = id(w0, u < m);
                if w == parent[u] {
                    continue;
                }
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    touched.push(w);
                    queue.push_back(w);
                } else {
                    let len = dist[u] + dist[w] + 1;
                    if len <= bound && best.as_ref().is_none_or(|(l, _)| len < *l) {
                        let mut a = vec![u];
                        while *a.last().unwrap() != root {
                            a.push(parent[*a.last().unwrap()]);
                        }
                        let mut bpath = vec![w];
                        while *bpath.last().unwrap() != root {
                            bpath.push(parent[*bpath.last().unwrap()]);
                        }
                        bpath.pop();
                        a.reverse();
                        a.extend(bpath);
                        best = Some((len, a));
                        break 'bfs;
                    }
                }
            }
        }
        for v in touched {
            dist[v] = usize::MAX;
            parent[v] = usize::MAX;
        }
    }
    best.map(|(_, path)| {
        path.into_iter()
            .map(|v| if v < m { TannerNode::Check(v) } else { TannerNode::Var(v - m) })
            .collect()
    })
}

/// Girth if at most `max_len`, otherwise `None`.
pub fn girth_at_most(h: &SparseBinMatrix, max_len: usize) -> Option<usize> {
    shortest_cycle(h, max_len).map(|c| c.len())
}

/// Follows the lifted edges above a base 6-cycle from lifted check
/// `(r0, 0)` and reports whether the walk returns to its start.
pub fn lifted_walk_closes(lifted: &SparseBinMatrix, lifted_cols: &[Vec<usize>], p: usize, cyc: &SixCycle) -> bool {
    let [r0, r1, r2] = cyc.rows;
    let [c0, c1, c2] = cyc.cols;
    let start = r0 * p;
    let var_in = |row: usize, c: usize| *lifted.row(row).iter().find(|&&v| v / p == c).expect("block entry");
    let check_in = |var: usize, r: usize| *lifted_cols[var].iter().find(|&&q| q / p == r).expect("block entry");
    let v = var_in(start, c0);
    let q = check_in(v, r1);
    let v = var_in(q, c1);
    let q = check_in(v, r2);
    let v = var_in(q, c2);
    check_in(v, r0) == start
}

/// One verified condition of a lift certificate.
#[derive(Clone, Debug)]
pub struct CertLine {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct LiftCertificate {
    pub lines: Vec<CertLine>,
    pub n: usize,
    pub k: usize,
    pub rank_x: usize,
    pub rank_z: usize,
}

impl LiftCertificate {
    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.ok)
    }

    pub fn line(&self, name: &str) -> Option<&CertLine> {
        self.lines.iter().find(|l| l.name == name)
    }
}

impl fmt::Display for LiftCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.lines {
            writeln!(f, "{} {}: {}", if l.ok { "PASS" } else { "FAIL" }, l.name, l.detail)?;
        }
        Ok(())
    }
}

fn describe_cycle(c: &[TannerNode]) -> String {
    c.iter()
        .map(|n| match n {
            TannerNode::Check(r) => format!("r{r}"),
            TannerNode::Var(v) => format!("v{v}"),
        })
        .collect::<Vec<_>>()
        .join("-")
}

/// Rechecks a lift from scratch: lifted orthogonality and zero
/// congruences, nonzero 6-cycle sums together with a direct girth search,
/// exclusion of every orbit support, and the lifted ranks.
pub fn verify_lift(
    hx: &SparseBinMatrix,
    hz: &SparseBinMatrix,
    b: &BasePair,
    labels: &LiftLabels,
    orbit: Option<&SupportOrbit>,
) -> Result<LiftCertificate> {
    labels.validate(b)?;
    let edges = EdgeIndex::of_base(b);
    let s = labels.to_vector();
    let mut lines = Vec::new();
    let mut push = |name: &str, ok: bool, detail: String| {
        lines.push(CertLine {
            name: name.to_string(),
            ok,
            detail,
        })
    };

    let (ex, ez) = lift_pair(b, labels)?;
    push(
        "lift-matches-labels",
        &ex == hx && &ez == hz,
        format!("{}x{} lifted pair rebuilt from labels", hx.nrows(), hx.ncols()),
    );
    let orth = product_is_zero(hx, hz)?;
    push("orthogonality", orth, "H_X H_Z^T = 0 by pairwise row overlap parity".into());
    let zero = zero_constraints(b)?;
    let bad: Vec<usize> = (0..zero.len()).filter(|&i| eval_form(&zero[i], &s, labels.p) != 0).collect();
    push(
        "zero-congruences",
        bad.is_empty(),
        match bad.first() {
            None => format!("{} of {} hold", zero.len(), zero.len()),
            Some(&i) => {
                let (_, r, _) = edges.edge(zero[i][0].0);
                format!("{} violated, first at row {i} (X-row {r})", bad.len())
            }
        },
    );

    let cen = census(b);
    for side in [Side::X, Side::Z] {
        let cycles = cen.cycles(side);
        let closed: Vec<&SixCycle> = cycles
            .iter()
            .filter(|c| eval_form(&sixcycle_form(&edges, side, c), &s, labels.p) == 0)
            .collect();
        push(
            &format!("six-cycle-sums-{side}"),
            closed.is_empty(),
            match closed.first() {
                None => format!("all {} base 6-cycles have nonzero exponent sum", cycles.len()),
                Some(c) => format!("{} closed, first rows {:?} cols {:?}", closed.len(), c.rows, c.cols),
            },
        );
        let h = if side == Side::X { hx } else { hz };
        let short = shortest_cycle(h, 6);
        push(
            &format!("girth-{side}"),
            short.is_none(),
            match &short {
                None => "no cycle of length <= 6 (girth >= 8)".into(),
                Some(c) => format!("cycle of length {}: {}", c.len(), describe_cycle(c)),
            },
        );
    }

    if let Some(o) = orbit {
        let mut closable = Vec::new();
        for (i, t) in o.supports.iter().enumerate() {
            match support_quotient_forms(b, t, &o.k)? {
                SupportAnalysis::TriviallyExcluded { .. } => {}
                SupportAnalysis::Forms(sf) => {
                    if !sf.excluded_by(&s) {
                        closable.push(i);
                    }
                }
            }
        }
        push(
            "orbit-exclusion",
            closable.is_empty(),
            if closable.is_empty() {
                format!(
                    "all {} supports have a nonzero quotient form mod {}",
                    o.supports.len(),
                    o.k.quotient()
                )
            } else {
                format!("supports {closable:?} are closable")
            },
        );
    }

    let rank_x = RowSpaceBasis::from_matrix(hx).rank();
    let rank_z = RowSpaceBasis::from_matrix(hz).rank();
    let n = hx.ncols();
    let k = n - rank_x - rank_z;
    push(
        "parameters",
        true,
        format!("rank(H_X)={rank_x} rank(H_Z)={rank_z} [[{n},{k}]] rate {:.9}", k as f64 / n as f64),
    );
    Ok(LiftCertificate {
        lines,
        n,
        k,
        rank_x,
        rank_z,
    })
}

/// [`verify_lift`] on a code built by [`build_lift`].
pub fn verify_lift_code(
    code: &CssCode,
    b: &BasePair,
    labels: &LiftLabels,
    orbit: Option<&SupportOrbit>,
) -> Result<LiftCertificate> {
    verify_lift(&code.hx, &code.hz, b, labels, orbit)
}

/// Random label values for all edges, ignoring every constraint.
pub fn random_labels(b: &BasePair, p: u32, seed: u64) -> LiftLabels {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut l = LiftLabels::zeros(b, p);
    for v in l.x.iter_mut().chain(l.z.iter_mut()).flatten() {
        *v = rng.gen_range(0..p);
    }
    l
}

/// The (3,10) F16 base lifted 64-fold: the weight-16 seed supports, the
/// anchors of the two weight-32 witnesses, and the label solve that admits
/// both witnesses while excluding the orbit.
pub mod reference {
    use super::*;
    use crate::base::{build_base, presets};

    pub const BASE: &str = "(3,10) F16";
    pub const P: u32 = 64;
    /// Lift-coordinate step of the orbit subgroup K = {0, 32}.
    pub const ORBIT_STEP: u32 = 32;
    /// Step of the witness subgroup K = {0, 16, 32, 48}.
    pub const WITNESS_STEP: u32 = 16;
    pub const T0: [usize; 8] = [10, 25, 55, 60, 99, 104, 134, 149];
    pub const T1: [usize; 8] = [15, 20, 50, 65, 94, 109, 139, 144];
    pub const A_X: [(usize, u32); 8] = [(27, 12), (37, 3), (62, 1), (72, 5), (83, 2), (93, 6), (128, 5), (138, 12)];
    pub const A_Z: [(usize, u32); 8] = [(64, 7), (69, 3), (74, 12), (79, 8), (81, 7), (86, 7), (91, 14), (96, 4)];
    pub const LABEL_SEED: u64 = 1;

    pub fn base() -> Result<BasePair> {
        build_base(&presets::find(BASE).expect("preset").coefficients())
    }

    pub fn orbit(b: &BasePair) -> Result<SupportOrbit> {
        orbit_from_seeds(b, &[T0.to_vec(), T1.to_vec()], LiftSubgroup::new(P, ORBIT_STEP)?)
    }

    pub fn witness_subgroup() -> LiftSubgroup {
        LiftSubgroup::new(P, WITNESS_STEP).expect("16 divides 64")
    }

    pub fn anchors(side: Side) -> &'static [(usize, u32)] {
        match side {
            Side::X => &A_X,
            Side::Z => &A_Z,
        }
    }

    /// Lifted support `{P c + f + k}` of one witness.
    pub fn witness_support(side: Side) -> Vec<usize> {
        let a = anchors(side);
        let t: Vec<usize> = a.iter().map(|x| x.0).collect();
        let f: Vec<u32> = a.iter().map(|x| x.1).collect();
        coset_support(&t, &f, &witness_subgroup())
    }

    /// Orthogonality, 6-cycle and orbit constraints, plus the pins that
    /// close both witness supports.
    pub fn system(b: &BasePair, orbit: &SupportOrbit) -> Result<CongruenceSystem> {
        let mut sys = assemble_system(b, P, Some(orbit))?;
        for side in [Side::X, Side::Z] {
            sys.pinned.extend(witness_constraints(b, side, anchors(side), &witness_subgroup())?);
        }
        Ok(sys)
    }

    /// Base, orbit and solved labels of the reference lift.
    pub fn labels() -> Result<(BasePair, SupportOrbit, LiftLabels)> {
        let b = base()?;
        let o = orbit(&b)?;
        let sys = system(&b, &o)?;
        match solve_labels(&sys, LABEL_SEED, SolveBudget::default(), SolveMode::Randomized) {
            SolveOutcome::Solved(l) => Ok((b, o, l)),
            other => Err(Error::InvalidLift(format!("reference label solve: {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{build_base, presets};
    use crate::binmat::rank_gf2;

    fn f7() -> BasePair {
        build_base(&presets::find("(3,6) F7").unwrap().coefficients()).unwrap()
    }

    #[test]
    fn edge_index_roundtrip() {
        let b = f7();
        let e = EdgeIndex::of_base(&b);
        assert_eq!(e.len(), 2 * 21 * 6);
        for v in 0..e.len() {
            let (side, r, c) = e.edge(v);
            assert_eq!(e.var(side, r, c), Some(v));
        }
    }

    #[test]
    fn zero_labels_give_tensor_with_identity() {
        let b = f7();
        let l = LiftLabels::zeros(&b, 4);
        let code = build_lift(&b, &l).unwrap();
        assert_eq!((code.hx.nrows(), code.hx.ncols()), (84, 168));
        assert_eq!(code.rank_x(), 4 * rank_gf2(&b.hx));
        assert_eq!(code.k(), 4 * 10);
    }

    #[test]
    fn constraint_counts_f7() {
        let b = f7();
        assert_eq!(zero_constraints(&b).unwrap().len(), 189);
        assert_eq!(sixcycle_forms(&b, Side::X).len(), 168);
        let e = EdgeIndex::of_base(&b);
        let zero = vec![0; e.len()];
        assert!(sixcycle_forms(&b, Side::Z).iter().all(|f| eval_form(f, &zero, 8) == 0));
    }

    #[test]
    fn disjoint_supports_give_no_rows() {
        let hx = SparseBinMatrix::new(4, vec![vec![0, 1]]).unwrap();
        let hz = SparseBinMatrix::new(4, vec![vec![2, 3]]).unwrap();
        assert!(zero_constraints_of(&hx, &hz).unwrap().is_empty());
        let hz = SparseBinMatrix::new(4, vec![vec![1, 2]]).unwrap();
        assert!(matches!(
            zero_constraints_of(&hx, &hz),
            Err(Error::OverlapHypothesis { shared: 1, .. })
        ));
    }

    #[test]
    fn empty_system_accepts_zero_labels() {
        let b = f7();
        let sys = CongruenceSystem::empty(EdgeIndex::of_base(&b), 8);
        match solve_labels(&sys, 1, SolveBudget::default(), SolveMode::Complete) {
            SolveOutcome::Solved(l) => assert!(l.to_vector().iter().all(|&s| s == 0)),
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn forced_zero_form_is_unsat() {
        let b = f7();
        let mut sys = CongruenceSystem::empty(EdgeIndex::of_base(&b), 8);
        sys.zero.push(vec![(0, 1), (1, -1)]);
        sys.nonzero.push(NonzeroForm {
            terms: vec![(0, 2), (1, -2)],
            modulus: 8,
            tag: FormTag::Support { index: 0 },
        });
        assert_eq!(liftability_report(&sys), vec![Liftability::ForcedZero]);
        assert_eq!(
            solve_labels(&sys, 1, SolveBudget::default(), SolveMode::Complete),
            SolveOutcome::Unsat
        );
    }

    #[test]
    fn zero_labels_fail_girth_with_concrete_cycle() {
        let b = f7();
        let l = LiftLabels::zeros(&b, 8);
        let code = build_lift(&b, &l).unwrap();
        let cert = verify_lift_code(&code, &b, &l, None).unwrap();
        assert!(!cert.passed());
        let g = cert.line("girth-X").unwrap();
        assert!(!g.ok && g.detail.contains("length 6"), "{}", g.detail);
    }

    #[test]
    fn shortest_cycle_on_small_graphs() {
        let tree = SparseBinMatrix::new(3, vec![vec![0, 1], vec![1, 2]]).unwrap();
        assert!(shortest_cycle(&tree, 20).is_none());
        let square = SparseBinMatrix::new(2, vec![vec![0, 1], vec![0, 1]]).unwrap();
        assert_eq!(girth_at_most(&square, 20), Some(4));
        let hex = SparseBinMatrix::new(3, vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        let c = shortest_cycle(&hex, 20).unwrap();
        assert_eq!(c.len(), 6);
    }

    #[test]
    fn subgroup_elements() {
        let k = LiftSubgroup::from_elements(64, &[0, 16, 32, 48]).unwrap();
        assert_eq!((k.step, k.order(), k.quotient()), (16, 4, 16));
        assert!(LiftSubgroup::from_elements(64, &[0, 16]).is_err());
    }
}

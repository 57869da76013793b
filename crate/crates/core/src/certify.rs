//! CSS code parameters, certified distance bounds and logical witnesses.
//!
//! Lower bounds come from an exhaustive check-directed enumeration of small
//! kernel vectors; upper bounds from explicit logical representatives.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::binmat::{product_is_zero, BitVec, RowSpaceBasis, SparseBinMatrix};
use crate::error::{Error, Result};
use crate::Side;

/// Where a lower bound came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBound {
    pub d: usize,
    pub nodes: u64,
    pub seconds: f64,
}

/// A verified logical representative bounding one side's distance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpperBound {
    pub weight: usize,
    pub support: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DistanceBounds {
    pub lower: Option<LowerBound>,
    pub upper_x: Option<UpperBound>,
    pub upper_z: Option<UpperBound>,
}

impl DistanceBounds {
    /// `min(d_X, d_Z)` upper bound, if either side has a witness.
    pub fn upper(&self) -> Option<usize> {
        match (&self.upper_x, &self.upper_z) {
            (Some(a), Some(b)) => Some(a.weight.min(b.weight)),
            (Some(a), None) | (None, Some(a)) => Some(a.weight),
            (None, None) => None,
        }
    }
}

/// An orthogonal check-matrix pair with cached ranks and row spaces.
#[derive(Clone, Debug)]
pub struct CssCode {
    pub hx: SparseBinMatrix,
    pub hz: SparseBinMatrix,
    rows_x: RowSpaceBasis,
    rows_z: RowSpaceBasis,
    /// Circulant size when the pair is a quasi-cyclic lift.
    pub circulant: Option<usize>,
    pub bounds: DistanceBounds,
}

impl CssCode {
    /// Checks orthogonality and caches ranks and row-space bases.
    pub fn new(hx: SparseBinMatrix, hz: SparseBinMatrix) -> Result<Self> {
        if !product_is_zero(&hx, &hz)? {
            return Err(Error::NotOrthogonal);
        }
        let rows_x = RowSpaceBasis::from_matrix(&hx);
        let rows_z = RowSpaceBasis::from_matrix(&hz);
        Ok(CssCode {
            hx,
            hz,
            rows_x,
            rows_z,
            circulant: None,
            bounds: DistanceBounds::default(),
        })
    }

    pub fn with_circulant(mut self, p: usize) -> Self {
        self.circulant = Some(p);
        self
    }

    pub fn n(&self) -> usize {
        self.hx.ncols()
    }

    pub fn rank_x(&self) -> usize {
        self.rows_x.rank()
    }

    pub fn rank_z(&self) -> usize {
        self.rows_z.rank()
    }

    pub fn k(&self) -> usize {
        self.n() - self.rank_x() - self.rank_z()
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n() as f64
    }

    pub fn checks(&self, side: Side) -> &SparseBinMatrix {
        match side {
            Side::X => &self.hx,
            Side::Z => &self.hz,
        }
    }

    pub fn row_space(&self, side: Side) -> &RowSpaceBasis {
        match side {
            Side::X => &self.rows_x,
            Side::Z => &self.rows_z,
        }
    }

    /// Matrix whose kernel holds the logical candidates of `side`.
    pub fn logical_kernel_matrix(&self, side: Side) -> &SparseBinMatrix {
        self.checks(side.other())
    }

    /// True iff `v` is a nontrivial logical operator of the given type.
    pub fn is_logical(&self, side: Side, v: &BitVec) -> Result<bool> {
        Ok(self.logical_kernel_matrix(side).mul_vec(v)?.is_zero() && !self.row_space(side).contains(v)?)
    }

    pub fn params_string(&self) -> String {
        format!("[[{},{}]]", self.n(), self.k())
    }
}

/// Parameters of an orthogonal pair.
pub fn code_params(hx: SparseBinMatrix, hz: SparseBinMatrix) -> Result<CssCode> {
    CssCode::new(hx, hz)
}

/// Limits for the exhaustive searches; `None` means unlimited.
#[derive(Clone, Copy, Debug, Default)]
pub struct SearchBudget {
    pub time_limit: Option<Duration>,
    pub node_limit: Option<u64>,
}

impl SearchBudget {
    pub fn unlimited() -> Self {
        Self::default()
    }

    pub fn seconds(s: f64) -> Self {
        SearchBudget {
            time_limit: Some(Duration::from_secs_f64(s)),
            node_limit: None,
        }
    }
}

/// Result of a bounded-weight kernel search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KernelSearchOutcome {
    /// No nonzero kernel vector has weight below the target.
    NoneBelow,
    /// A minimum-weight kernel vector below the target.
    Found(Vec<usize>),
    /// Stopped early; nothing can be concluded.
    BudgetExhausted,
}

#[derive(Clone, Debug)]
pub struct KernelSearchReport {
    pub outcome: KernelSearchOutcome,
    pub nodes: u64,
    pub seconds: f64,
}

// wasm32 has no clock; there the start time is taken only when a time limit
// is set, so unlimited searches still run.
struct Clock {
    start: Option<std::time::Instant>,
    limit: Option<Duration>,
}

impl Clock {
    fn new(b: &SearchBudget) -> Self {
        Clock {
            start: (b.time_limit.is_some() || !cfg!(target_arch = "wasm32")).then(std::time::Instant::now),
            limit: b.time_limit,
        }
    }

    fn expired(&self) -> bool {
        match (self.start, self.limit) {
            (Some(s), Some(l)) => s.elapsed() > l,
            _ => false,
        }
    }

    fn seconds(&self) -> f64 {
        self.start.map(|s| s.elapsed().as_secs_f64()).unwrap_or(0.0)
    }
}

struct Shared<'a> {
    rows: &'a [Vec<usize>],
    cols: Vec<Vec<usize>>,
    jmax: usize,
    prune: bool,
    node_limit: Option<u64>,
    clock: Clock,
    nodes: AtomicU64,
    abort: AtomicBool,
}

enum Flow {
    Continue,
    Abort,
}

/// One worker's search state: chosen columns, exclusion counters and the
/// running syndrome with an indexable list of unsatisfied checks.
struct Walker<'s, 'a> {
    sh: &'s Shared<'a>,
    max_weight: usize,
    chosen: Vec<usize>,
    in_set: Vec<bool>,
    excluded: Vec<u32>,
    parity: Vec<bool>,
    unsat: Vec<usize>,
    unsat_pos: Vec<usize>,
    local_nodes: u64,
}

impl<'s, 'a> Walker<'s, 'a> {
    fn new(sh: &'s Shared<'a>, max_weight: usize, target: &[usize]) -> Self {
        let m = sh.rows.len();
        let mut w = Walker {
            sh,
            max_weight,
            chosen: Vec::new(),
            in_set: vec![false; sh.cols.len()],
            excluded: vec![0; sh.cols.len()],
            parity: vec![false; m],
            unsat: Vec::new(),
            unsat_pos: vec![usize::MAX; m],
            local_nodes: 0,
        };
        for &c in target {
            w.toggle_check(c);
        }
        w
    }

    fn toggle_check(&mut self, r: usize) {
        self.parity[r] = !self.parity[r];
        if self.parity[r] {
            self.unsat_pos[r] = self.unsat.len();
            self.unsat.push(r);
        } else {
            let p = self.unsat_pos[r];
            let last = self.unsat.pop().expect("nonempty");
            if last != r {
                self.unsat[p] = last;
                self.unsat_pos[last] = p;
            }
            self.unsat_pos[r] = usize::MAX;
        }
    }

    fn flip_column(&mut self, c: usize) {
        for i in 0..self.sh.cols[c].len() {
            let r = self.sh.cols[c][i];
            self.toggle_check(r);
        }
        self.in_set[c] = !self.in_set[c];
        if self.in_set[c] {
            self.chosen.push(c);
        } else {
            self.chosen.pop();
        }
    }

    fn free(&self, c: usize) -> bool {
        !self.in_set[c] && self.excluded[c] == 0
    }

    fn tick(&mut self) -> bool {
        self.local_nodes += 1;
        if self.local_nodes % 64 == 0 {
            let total = self.sh.nodes.fetch_add(64, Ordering::Relaxed) + 64;
            if self.sh.node_limit.is_some_and(|l| total > l) || self.sh.clock.expired() {
                self.sh.abort.store(true, Ordering::Relaxed);
            }
        }
        self.sh.abort.load(Ordering::Relaxed)
    }

    fn flush_nodes(&mut self) {
        self.sh.nodes.fetch_add(self.local_nodes % 64, Ordering::Relaxed);
        self.local_nodes = 0;
    }

    /// Explores all extensions of the current set; `report` sees every set
    /// whose syndrome reaches zero and may lower `max_weight`.
    fn dfs(&mut self, report: &mut dyn FnMut(&[usize]) -> Option<usize>) -> Flow {
        if self.tick() {
            return Flow::Abort;
        }
        if self.unsat.is_empty() {
            if let Some(new_max) = report(&self.chosen) {
                self.max_weight = self.max_weight.min(new_max);
            }
            return Flow::Continue;
        }
        let b = self.max_weight.saturating_sub(self.chosen.len());
        if b == 0 {
            return Flow::Continue;
        }
        if self.sh.prune && self.unsat.len() > b * self.sh.jmax {
            return Flow::Continue;
        }
        // branch on the unsatisfied check with the fewest free neighbours
        let mut best: Option<(usize, usize)> = None;
        for &r in &self.unsat {
            let cnt = self.sh.rows[r].iter().filter(|&&c| self.free(c)).count();
            if best.is_none_or(|(bc, br)| cnt < bc || (cnt == bc && r < br)) {
                best = Some((cnt, r));
            }
        }
        let (cnt, r) = best.expect("unsat nonempty");
        if cnt == 0 {
            return Flow::Continue;
        }
        let cands: Vec<usize> = self.sh.rows[r].iter().copied().filter(|&c| self.free(c)).collect();
        let mut flow = Flow::Continue;
        for (i, &c) in cands.iter().enumerate() {
            self.flip_column(c);
            let f = self.dfs(report);
            self.flip_column(c);
            self.excluded[c] += 1;
            if let Flow::Abort = f {
                flow = Flow::Abort;
                for &d in &cands[..=i] {
                    self.excluded[d] -= 1;
                }
                return flow;
            }
            if self.chosen.len() >= self.max_weight {
                for &d in &cands[..=i] {
                    self.excluded[d] -= 1;
                }
                return flow;
            }
        }
        for &c in &cands {
            self.excluded[c] -= 1;
        }
        flow
    }
}

/// Options shared by the kernel enumerations.
#[derive(Clone, Copy, Debug)]
pub struct EnumOptions {
    pub budget: SearchBudget,
    /// Disable only for testing; the verdicts do not depend on it.
    pub prune: bool,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions {
            budget: SearchBudget::unlimited(),
            prune: true,
        }
    }
}

fn shared<'a>(h: &'a SparseBinMatrix, opts: &EnumOptions) -> Shared<'a> {
    Shared {
        rows: h.rows(),
        cols: h.columns(),
        jmax: h.max_col_weight().max(1),
        prune: opts.prune,
        node_limit: opts.budget.node_limit,
        clock: Clock::new(&opts.budget),
        nodes: AtomicU64::new(0),
        abort: AtomicBool::new(false),
    }
}

/// Result of [`enumerate_kernel_below`].
#[derive(Clone, Debug)]
pub struct KernelEnumeration {
    /// Kernel vectors reported by the enumeration. Every nonzero kernel
    /// vector of weight below the target is a disjoint union of these.
    pub vectors: Vec<Vec<usize>>,
    pub complete: bool,
    pub nodes: u64,
    pub seconds: f64,
}

fn run_root(sh: &Shared<'_>, c1: usize, max_weight: usize, target: &[usize], out: &mut Vec<Vec<usize>>) -> bool {
    let mut w = Walker::new(sh, max_weight, target);
    for c in 0..c1 {
        w.excluded[c] = 1;
    }
    w.flip_column(c1);
    let mut report = |s: &[usize]| {
        let mut v = s.to_vec();
        v.sort_unstable();
        out.push(v);
        None
    };
    let flow = w.dfs(&mut report);
    w.flush_nodes();
    matches!(flow, Flow::Continue)
}

/// Enumerates kernel vectors of `h` with weight below `d`, rooted at their
/// smallest column. Returned vectors are sorted and unique.
pub fn enumerate_kernel_below(h: &SparseBinMatrix, d: usize, opts: &EnumOptions) -> KernelEnumeration {
    let sh = shared(h, opts);
    let n = h.ncols();
    if d <= 1 {
        return KernelEnumeration {
            vectors: Vec::new(),
            complete: true,
            nodes: 0,
            seconds: 0.0,
        };
    }
    let max_weight = d - 1;

    #[cfg(feature = "parallel")]
    let per_root: Vec<(Vec<Vec<usize>>, bool)> = {
        use rayon::prelude::*;
        (0..n)
            .into_par_iter()
            .map(|c1| {
                let mut out = Vec::new();
                let ok = run_root(&sh, c1, max_weight, &[], &mut out);
                (out, ok)
            })
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let per_root: Vec<(Vec<Vec<usize>>, bool)> = (0..n)
        .map(|c1| {
            let mut out = Vec::new();
            let ok = run_root(&sh, c1, max_weight, &[], &mut out);
            (out, ok)
        })
        .collect();

    let complete = per_root.iter().all(|(_, ok)| *ok) && !sh.abort.load(Ordering::Relaxed);
    let vectors = per_root.into_iter().flat_map(|(v, _)| v).collect();
    KernelEnumeration {
        vectors,
        complete,
        nodes: sh.nodes.load(Ordering::Relaxed),
        seconds: sh.clock.seconds(),
    }
}

/// Minimum-weight nonzero kernel vector of `h` below weight `d`.
pub fn min_kernel_weight_below(h: &SparseBinMatrix, d: usize, budget: SearchBudget) -> KernelSearchReport {
    min_kernel_weight_below_with(
        h,
        d,
        &EnumOptions {
            budget,
            prune: true,
        },
    )
}

pub fn min_kernel_weight_below_with(h: &SparseBinMatrix, d: usize, opts: &EnumOptions) -> KernelSearchReport {
    let sh = shared(h, opts);
    let mut best: Option<Vec<usize>> = None;
    let mut limit = d.saturating_sub(1);
    let mut aborted = false;
    for c1 in 0..h.ncols() {
        if limit == 0 {
            break;
        }
        let mut w = Walker::new(&sh, limit, &[]);
        for c in 0..c1 {
            w.excluded[c] = 1;
        }
        w.flip_column(c1);
        let mut report = |s: &[usize]| {
            if best.as_ref().is_none_or(|b| s.len() < b.len()) {
                let mut v = s.to_vec();
                v.sort_unstable();
                best = Some(v);
            }
            Some(s.len() - 1)
        };
        let flow = w.dfs(&mut report);
        let reached = w.max_weight;
        w.flush_nodes();
        limit = limit.min(reached);
        if let Flow::Abort = flow {
            aborted = true;
            break;
        }
    }
    let outcome = match (best, aborted) {
        (Some(v), false) => KernelSearchOutcome::Found(v),
        (None, false) => KernelSearchOutcome::NoneBelow,
        (_, true) => KernelSearchOutcome::BudgetExhausted,
    };
    KernelSearchReport {
        outcome,
        nodes: sh.nodes.load(Ordering::Relaxed),
        seconds: sh.clock.seconds(),
    }
}

/// All supports `x` with `H x = target` and weight at most `max_weight`
/// using only columns allowed by `allowed`, found by the same check-directed
/// enumeration. Stops after `limit` solutions; solutions are minimal in the
/// sense that no proper prefix of the search path already solved the target.
pub fn solve_syndrome_small(
    h_rows: &[Vec<usize>],
    h_cols: &[Vec<usize>],
    target: &[usize],
    allowed: &[bool],
    max_weight: usize,
    node_limit: u64,
    limit: usize,
) -> (Vec<Vec<usize>>, bool) {
    let sh = Shared {
        rows: h_rows,
        cols: h_cols.to_vec(),
        jmax: h_cols.iter().map(Vec::len).max().unwrap_or(1).max(1),
        prune: true,
        node_limit: Some(node_limit),
        clock: Clock {
            start: None,
            limit: None,
        },
        nodes: AtomicU64::new(0),
        abort: AtomicBool::new(false),
    };
    let mut w = Walker::new(&sh, max_weight, target);
    for (c, &ok) in allowed.iter().enumerate() {
        if !ok {
            w.excluded[c] = 1;
        }
    }
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut report = |s: &[usize]| {
        let mut v = s.to_vec();
        v.sort_unstable();
        out.push(v);
        if out.len() >= limit {
            Some(0)
        } else {
            None
        }
    };
    let flow = if target.is_empty() {
        Flow::Continue
    } else {
        w.dfs(&mut report)
    };
    (out, matches!(flow, Flow::Continue))
}

/// Verdict of [`certify_lower_bound`].
#[derive(Clone, Debug, PartialEq)]
pub enum LowerBoundVerdict {
    Accepted,
    /// A nontrivial logical of weight below the target, of minimum weight.
    Rejected { side: Side, support: Vec<usize> },
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct CertificationReport {
    pub target: usize,
    pub verdict: LowerBoundVerdict,
    pub nodes: u64,
    pub seconds: f64,
}

impl std::fmt::Display for CertificationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let v = match &self.verdict {
            LowerBoundVerdict::Accepted => "accepted".to_string(),
            LowerBoundVerdict::Rejected { side, support } => {
                format!("rejected {side}-logical weight {}", support.len())
            }
            LowerBoundVerdict::Inconclusive => "inconclusive (budget exhausted)".to_string(),
        };
        write!(
            f,
            "D {} verdict {} nodes {} seconds {:.3}",
            self.target, v, self.nodes, self.seconds
        )
    }
}

/// Accepts `d` iff every nonzero kernel vector of weight below `d` on either
/// side lies in the corresponding stabilizer row space. On acceptance the
/// code's lower bound is raised to `d`.
pub fn certify_lower_bound(code: &mut CssCode, d: usize, opts: &EnumOptions) -> CertificationReport {
    let report = check_lower_bound(code, d, opts);
    if report.verdict == LowerBoundVerdict::Accepted && code.bounds.lower.as_ref().is_none_or(|l| l.d < d) {
        code.bounds.lower = Some(LowerBound {
            d,
            nodes: report.nodes,
            seconds: report.seconds,
        });
    }
    report
}

/// [`certify_lower_bound`] without recording the result.
pub fn check_lower_bound(code: &CssCode, d: usize, opts: &EnumOptions) -> CertificationReport {
    let mut nodes = 0;
    let mut seconds = 0.0;
    let mut inconclusive = false;
    let mut worst: Option<(Side, Vec<usize>)> = None;
    for side in [Side::X, Side::Z] {
        let en = enumerate_kernel_below(code.logical_kernel_matrix(side), d, opts);
        nodes += en.nodes;
        seconds += en.seconds;
        if !en.complete {
            inconclusive = true;
            break;
        }
        let rows = code.row_space(side);
        for v in en.vectors {
            let bv = BitVec::from_indices(code.n(), &v);
            if !rows.contains(&bv).expect("lengths agree") && worst.as_ref().is_none_or(|(_, w)| v.len() < w.len()) {
                worst = Some((side, v));
            }
        }
    }
    let verdict = if inconclusive {
        LowerBoundVerdict::Inconclusive
    } else if let Some((side, support)) = worst {
        LowerBoundVerdict::Rejected { side, support }
    } else {
        LowerBoundVerdict::Accepted
    };
    CertificationReport {
        target: d,
        verdict,
        nodes,
        seconds,
    }
}

/// Outcome of [`verify_witness`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub side: Side,
    pub support: Vec<usize>,
    pub weight: usize,
    pub in_kernel: bool,
    pub in_row_space: bool,
}

impl WitnessReport {
    pub fn is_valid(&self) -> bool {
        self.in_kernel && !self.in_row_space
    }
}

/// Membership tests for a candidate logical support, without recording.
pub fn check_witness(code: &CssCode, side: Side, support: &[usize]) -> Result<WitnessReport> {
    let mut s = support.to_vec();
    s.sort_unstable();
    s.dedup();
    if let Some(&c) = s.iter().find(|&&c| c >= code.n()) {
        return Err(Error::Dimension(format!("support column {c} outside 0..{}", code.n())));
    }
    let v = BitVec::from_indices(code.n(), &s);
    let in_kernel = code.logical_kernel_matrix(side).mul_vec(&v)?.is_zero();
    let in_row_space = code.row_space(side).contains(&v)?;
    Ok(WitnessReport {
        side,
        weight: s.len(),
        support: s,
        in_kernel,
        in_row_space,
    })
}

/// Checks a witness and, when valid, tightens that side's upper bound.
pub fn verify_witness(code: &mut CssCode, side: Side, support: &[usize]) -> Result<WitnessReport> {
    let rep = check_witness(code, side, support)?;
    if rep.is_valid() {
        if let Some(l) = &code.bounds.lower {
            if l.d > rep.weight {
                return Err(Error::Invalid(format!(
                    "valid witness of weight {} contradicts certified lower bound {}",
                    rep.weight, l.d
                )));
            }
        }
        let slot = match side {
            Side::X => &mut code.bounds.upper_x,
            Side::Z => &mut code.bounds.upper_z,
        };
        if slot.as_ref().is_none_or(|u| rep.weight < u.weight) {
            *slot = Some(UpperBound {
                weight: rep.weight,
                support: rep.support.clone(),
            });
        }
    }
    Ok(rep)
}

//! Joint log-domain belief propagation for CSS syndrome decoding under
//! depolarizing noise, followed by a fixed ladder of local post-processing
//! rules.
//!
//! Each qubit carries a 4-ary error `E in {I, X, Y, Z}`. X-side checks see
//! `z(E) = [E in {Z, Y}]`, Z-side checks see `x(E) = [E in {X, Y}]`, and the
//! two binary views stay coupled through the joint prior.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::binmat::{BitVec, ColumnSolver, SparseBinMatrix};
use crate::certify::{solve_syndrome_small, CssCode};
use crate::error::{Error, Result};
use crate::Side;

/// Per-qubit prior `(1-p, p/3, p/3, p/3)` over `I, X, Y, Z`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepolarizingPrior {
    pub p: f64,
}

impl DepolarizingPrior {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&p) {
            return Err(Error::Invalid(format!("depolarizing probability {p} outside [0, 1)")));
        }
        Ok(DepolarizingPrior { p })
    }

    /// `[I, X, Y, Z]`.
    pub fn probabilities(&self) -> [f64; 4] {
        let e = self.p / 3.0;
        [1.0 - self.p, e, e, e]
    }

    // floored logs keep every message finite at p = 0
    fn logs(&self) -> [f64; 4] {
        self.probabilities().map(|x| x.max(1e-300).ln())
    }
}

/// Draws `(e_X, e_Z)` i.i.d. per qubit; `Y` sets both bits.
pub fn sample_error<R: Rng + ?Sized>(prior: &DepolarizingPrior, n: usize, rng: &mut R) -> (BitVec, BitVec) {
    let mut ex = BitVec::zeros(n);
    let mut ez = BitVec::zeros(n);
    let p = prior.p;
    for v in 0..n {
        let u: f64 = rng.gen();
        if u < p {
            match ((u / p) * 3.0) as usize {
                0 => ex.set(v, true),
                1 => {
                    ex.set(v, true);
                    ez.set(v, true)
                }
                _ => ez.set(v, true),
            }
        }
    }
    (ex, ez)
}

/// `s_X = H_X e_Z` and `s_Z = H_Z e_X`.
pub fn syndromes(code: &CssCode, ex: &BitVec, ez: &BitVec) -> Result<(BitVec, BitVec)> {
    Ok((code.hx.mul_vec(ez)?, code.hz.mul_vec(ex)?))
}

/// Post-processing rules in ladder order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    LocalSolve = 1,
    PrefixSearch = 2,
    DiagnosticPrefix = 3,
    FlipHistory = 4,
    PathClosure = 5,
    CommonColumn = 6,
    CoreRepair = 7,
    SmallResidual = 8,
}

impl Rule {
    pub const ALL: [Rule; 8] = [
        Rule::LocalSolve,
        Rule::PrefixSearch,
        Rule::DiagnosticPrefix,
        Rule::FlipHistory,
        Rule::PathClosure,
        Rule::CommonColumn,
        Rule::CoreRepair,
        Rule::SmallResidual,
    ];

    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn from_id(id: u8) -> Option<Rule> {
        Rule::ALL.get((id as usize).checked_sub(1)?).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Rule::LocalSolve => "local-solve",
            Rule::PrefixSearch => "prefix-search",
            Rule::DiagnosticPrefix => "diagnostic-prefix",
            Rule::FlipHistory => "flip-history",
            Rule::PathClosure => "path-closure",
            Rule::CommonColumn => "common-column",
            Rule::CoreRepair => "core-repair",
            Rule::SmallResidual => "small-residual",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Decoder parameters. Candidate caps have no canonical values; the
/// defaults below are what the test suite runs with.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecoderConfig {
    pub max_iters: usize,
    pub damping: f64,
    /// Retry once with zero damping when BP does not converge.
    pub fallback: bool,
    /// Start the retry from fresh messages rather than the last ones.
    pub fallback_cold: bool,
    pub clamp: f64,
    /// Enabled rules, bit `i-1` for rule `i`.
    pub rule_mask: u8,
    /// Local solve: candidates per unsatisfied check.
    pub local_cap_factor: usize,
    /// Local solve: keep neighbours whose |LLR| is at most this quantile of
    /// all |LLR| values.
    pub local_quantile: f64,
    pub prefix_cap: usize,
    /// Diagnostic prefix: prefix lengths probed past the boundary.
    pub diag_window: usize,
    /// Diagnostic prefix: enumerate all solutions when the null space has at
    /// most this dimension.
    pub diag_max_nullity: usize,
    pub history_cap: usize,
    /// Columns considered by the order-0 OSD fallback.
    pub osd_cap: usize,
    pub path_len: usize,
    pub path_cap: usize,
    pub template_max_weight: usize,
    pub template_node_limit: u64,
    pub beam_width: usize,
    pub w_max: usize,
    pub exact_node_limit: u64,
    /// Largest correction any rule may apply.
    pub accept_weight: usize,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig {
            max_iters: 1000,
            damping: 0.3,
            fallback: true,
            fallback_cold: true,
            clamp: 30.0,
            rule_mask: 0xff,
            local_cap_factor: 3,
            local_quantile: 1.0,
            prefix_cap: 512,
            diag_window: 8,
            diag_max_nullity: 12,
            history_cap: 256,
            osd_cap: 1024,
            path_len: 4,
            path_cap: 256,
            template_max_weight: 6,
            template_node_limit: 20_000,
            beam_width: 64,
            w_max: 6,
            exact_node_limit: 200_000,
            accept_weight: 16,
        }
    }
}

impl DecoderConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.damping) {
            return Err(Error::Invalid(format!("damping {} outside [0, 1)", self.damping)));
        }
        if self.max_iters == 0 {
            return Err(Error::Invalid("max_iters must be at least 1".into()));
        }
        if self.clamp <= 0.0 {
            return Err(Error::Invalid("clamp must be positive".into()));
        }
        Ok(())
    }

    pub fn rule_enabled(&self, r: Rule) -> bool {
        self.rule_mask & (1 << (r.id() - 1)) != 0
    }

    pub fn with_rules(mut self, rules: &[Rule]) -> Self {
        self.rule_mask = rules.iter().fold(0, |m, r| m | 1 << (r.id() - 1));
        self
    }

    fn rules_string(&self) -> String {
        Rule::ALL
            .iter()
            .filter(|r| self.rule_enabled(**r))
            .map(|r| r.id().to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// `key = value` lines, `#` comments.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| s.push_str(&format!("{k} = {v}\n"));
        kv("max_iters", self.max_iters.to_string());
        kv("damping", self.damping.to_string());
        kv("fallback", self.fallback.to_string());
        kv("fallback_cold", self.fallback_cold.to_string());
        kv("clamp", self.clamp.to_string());
        kv("rules", self.rules_string());
        kv("local_cap_factor", self.local_cap_factor.to_string());
        kv("local_quantile", self.local_quantile.to_string());
        kv("prefix_cap", self.prefix_cap.to_string());
        kv("diag_window", self.diag_window.to_string());
        kv("diag_max_nullity", self.diag_max_nullity.to_string());
        kv("history_cap", self.history_cap.to_string());
        kv("osd_cap", self.osd_cap.to_string());
        kv("path_len", self.path_len.to_string());
        kv("path_cap", self.path_cap.to_string());
        kv("template_max_weight", self.template_max_weight.to_string());
        kv("template_node_limit", self.template_node_limit.to_string());
        kv("beam_width", self.beam_width.to_string());
        kv("w_max", self.w_max.to_string());
        kv("exact_node_limit", self.exact_node_limit.to_string());
        kv("accept_weight", self.accept_weight.to_string());
        s
    }

    /// Parses the text format; absent keys keep their defaults.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut c = DecoderConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let perr = |msg: String| Error::Parse { line: i + 1, msg };
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| perr(format!("expected key = value, got {line:?}")))?;
            let (k, v) = (k.trim(), v.trim());
            fn num<T: FromStr>(v: &str, line: usize) -> Result<T> {
                v.parse().map_err(|_| Error::Parse {
                    line,
                    msg: format!("bad value {v:?}"),
                })
            }
            let l = i + 1;
            match k {
                "max_iters" => c.max_iters = num(v, l)?,
                "damping" => c.damping = num(v, l)?,
                "fallback" => c.fallback = num(v, l)?,
                "fallback_cold" => c.fallback_cold = num(v, l)?,
                "clamp" => c.clamp = num(v, l)?,
                "rules" => {
                    let mut mask = 0u8;
                    for t in v.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                        let r = num::<u8>(t, l)?;
                        let r = Rule::from_id(r).ok_or_else(|| perr(format!("unknown rule {t}")))?;
                        mask |= 1 << (r.id() - 1);
                    }
                    c.rule_mask = mask;
                }
                "local_cap_factor" => c.local_cap_factor = num(v, l)?,
                "local_quantile" => c.local_quantile = num(v, l)?,
                "prefix_cap" => c.prefix_cap = num(v, l)?,
                "diag_window" => c.diag_window = num(v, l)?,
                "diag_max_nullity" => c.diag_max_nullity = num(v, l)?,
                "history_cap" => c.history_cap = num(v, l)?,
                "osd_cap" => c.osd_cap = num(v, l)?,
                "path_len" => c.path_len = num(v, l)?,
                "path_cap" => c.path_cap = num(v, l)?,
                "template_max_weight" => c.template_max_weight = num(v, l)?,
                "template_node_limit" => c.template_node_limit = num(v, l)?,
                "beam_width" => c.beam_width = num(v, l)?,
                "w_max" => c.w_max = num(v, l)?,
                "exact_node_limit" => c.exact_node_limit = num(v, l)?,
                "accept_weight" => c.accept_weight = num(v, l)?,
                _ => return Err(perr(format!("unknown key {k:?}"))),
            }
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecodeStatus {
    BpConverged,
    PpCorrected(Rule),
    SyndromeFailure,
    LogicalFailure,
}

impl DecodeStatus {
    pub fn syndrome_valid(self) -> bool {
        matches!(self, DecodeStatus::BpConverged | DecodeStatus::PpCorrected(_) | DecodeStatus::LogicalFailure)
    }
}

impl fmt::Display for DecodeStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecodeStatus::BpConverged => f.write_str("bp-converged"),
            DecodeStatus::PpCorrected(r) => write!(f, "pp-corrected({})", r.id()),
            DecodeStatus::SyndromeFailure => f.write_str("syndrome-failure"),
            DecodeStatus::LogicalFailure => f.write_str("logical-failure"),
        }
    }
}

/// One rule attempt in the ladder.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleAttempt {
    pub side: Side,
    pub rule: Rule,
    pub success: bool,
    /// The flip-history rule fell back to OSD.
    pub osd: bool,
    pub weight: usize,
}

#[derive(Clone, Debug)]
pub struct DecodeOutcome {
    pub ex: BitVec,
    pub ez: BitVec,
    pub status: DecodeStatus,
    pub iterations: usize,
    /// Unsatisfied checks (X side + Z side) when BP stopped.
    pub residual_before_pp: usize,
    pub trace: Vec<RuleAttempt>,
    /// Which BP runs happened: damped, then possibly the zero-damping retry.
    pub used_fallback: bool,
    pub llr_x: Vec<f64>,
    pub llr_z: Vec<f64>,
}

impl DecodeOutcome {
    pub fn rules_fired(&self) -> Vec<Rule> {
        self.trace.iter().filter(|a| a.success).map(|a| a.rule).collect()
    }
}

/// Edge layout of one check matrix.
#[derive(Clone, Debug)]
struct SideGraph {
    h: SparseBinMatrix,
    cols: Vec<Vec<usize>>,
    /// edge ids of check r: `row_ptr[r]..row_ptr[r+1]`, edge -> variable
    row_ptr: Vec<usize>,
    edge_var: Vec<usize>,
    /// edge ids per variable
    var_edges: Vec<Vec<usize>>,
}

impl SideGraph {
    fn new(h: &SparseBinMatrix) -> Self {
        let mut row_ptr = vec![0];
        let mut edge_var = Vec::with_capacity(h.nnz());
        let mut var_edges = vec![Vec::new(); h.ncols()];
        for row in h.rows() {
            for &v in row {
                var_edges[v].push(edge_var.len());
                edge_var.push(v);
            }
            row_ptr.push(edge_var.len());
        }
        SideGraph {
            h: h.clone(),
            cols: h.columns(),
            row_ptr,
            edge_var,
            var_edges,
        }
    }

    fn nedges(&self) -> usize {
        self.edge_var.len()
    }
}

/// Messages of one BP run. `mu_*` are variable-to-check, `lam_*`
/// check-to-variable, all as `log P(bit=0)/P(bit=1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BpMessages {
    pub mu_x: Vec<f64>,
    pub lam_x: Vec<f64>,
    pub mu_z: Vec<f64>,
    pub lam_z: Vec<f64>,
}

impl BpMessages {
    pub fn max_abs_diff(&self, other: &BpMessages) -> f64 {
        let d = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        d(&self.mu_x, &other.mu_x)
            .max(d(&self.lam_x, &other.lam_x))
            .max(d(&self.mu_z, &other.mu_z))
            .max(d(&self.lam_z, &other.lam_z))
    }
}

/// Hard decisions and soft information left by BP.
#[derive(Clone, Debug)]
pub struct BpState {
    pub ex: BitVec,
    pub ez: BitVec,
    /// Marginal LLR of the x bit and z bit per qubit.
    pub llr_x: Vec<f64>,
    pub llr_z: Vec<f64>,
    /// Bits whose hard decision changed at some iteration.
    pub flipped_x: BitVec,
    pub flipped_z: BitVec,
    pub iterations: usize,
    pub converged: bool,
}

fn lae(a: f64, b: f64) -> f64 {
    a.max(b) + (-(a - b).abs()).exp().ln_1p()
}

/// Syndrome-2 repair templates keyed by the relative position of the two
/// unsatisfied checks under the circulant shift.
#[derive(Clone, Debug, Default)]
pub struct TemplateBank {
    period: usize,
    /// (row a block, row b block, shift of b minus shift of a) ->
    /// support as (column block, shift relative to a)
    entries: HashMap<(usize, usize, usize), Vec<(usize, usize)>>,
}

impl TemplateBank {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn key(&self, a: usize, b: usize) -> ((usize, usize, usize), usize) {
        let p = self.period;
        let (ra, ua, rb, ub) = (a / p, a % p, b / p, b % p);
        ((ra, rb, (ub + p - ua) % p), ua)
    }

    /// Adds a support whose syndrome is exactly the two checks `a < b`;
    /// keeps the lighter support on collisions.
    pub fn insert(&mut self, a: usize, b: usize, support: &[usize]) {
        let p = self.period;
        let (key, ua) = self.key(a, b);
        let rel: Vec<(usize, usize)> = support.iter().map(|&c| (c / p, (c % p + p - ua) % p)).collect();
        match self.entries.get(&key) {
            Some(old) if old.len() <= rel.len() => {}
            _ => {
                self.entries.insert(key, rel);
            }
        }
    }

    /// Stored core for the unsatisfied pair, translated into place.
    pub fn lookup(&self, a: usize, b: usize) -> Option<Vec<usize>> {
        if self.period == 0 {
            return None;
        }
        let p = self.period;
        let (key, ua) = self.key(a.min(b), a.max(b));
        self.entries
            .get(&key)
            .map(|rel| rel.iter().map(|&(c, f)| c * p + (f + ua) % p).collect())
    }

    /// Enumerates small connected supports whose syndrome has weight two,
    /// rooted at one column per circulant class (every column when the
    /// code is not circulant). Growth follows the odd checks, so each
    /// recorded support is an elementary trapping-set core.
    pub fn build(h: &SparseBinMatrix, period: Option<usize>, max_weight: usize, node_limit: u64) -> Self {
        let p = period.unwrap_or(1).max(1);
        let mut bank = TemplateBank {
            period: p,
            entries: HashMap::new(),
        };
        let cols = h.columns();
        let jmax = cols.iter().map(Vec::len).max().unwrap_or(1).max(1);
        let mut parity = vec![0u8; h.nrows()];
        for root in (0..h.ncols()).step_by(p) {
            let mut support = vec![root];
            for &r in &cols[root] {
                parity[r] ^= 1;
            }
            let mut g = Grow {
                h,
                cols: &cols,
                jmax,
                max_weight,
                node_limit,
                nodes: 0,
                seen: HashSet::new(),
            };
            g.run(&mut support, &mut parity, &mut bank);
            for &r in &cols[root] {
                parity[r] ^= 1;
            }
        }
        bank
    }
}

struct Grow<'a> {
    h: &'a SparseBinMatrix,
    cols: &'a [Vec<usize>],
    jmax: usize,
    max_weight: usize,
    node_limit: u64,
    nodes: u64,
    seen: HashSet<Vec<usize>>,
}

impl Grow<'_> {
    fn run(&mut self, support: &mut Vec<usize>, parity: &mut [u8], bank: &mut TemplateBank) {
        let mut key = support.clone();
        key.sort_unstable();
        if !self.seen.insert(key.clone()) {
            return;
        }
        self.nodes += 1;
        let mut odd: Vec<usize> = support
            .iter()
            .flat_map(|&v| self.cols[v].iter().copied())
            .filter(|&r| parity[r] == 1)
            .collect();
        odd.sort_unstable();
        odd.dedup();
        if odd.len() == 2 && support.len() > 1 {
            bank.insert(odd[0], odd[1], &key);
        }
        let left = self.max_weight - support.len();
        // each new column changes at most jmax parities; two may stay odd
        if left == 0 || odd.len() > 2 + self.jmax * left {
            return;
        }
        for &r in &odd {
            for &v in self.h.row(r) {
                if self.nodes > self.node_limit {
                    return;
                }
                if support.contains(&v) {
                    continue;
                }
                support.push(v);
                for &q in &self.cols[v] {
                    parity[q] ^= 1;
                }
                self.run(support, parity, bank);
                for &q in &self.cols[v] {
                    parity[q] ^= 1;
                }
                support.pop();
            }
        }
    }
}

/// A reusable decoder over one code. Immutable after construction, so one
/// instance can serve many threads.
pub struct Decoder {
    cfg: DecoderConfig,
    n: usize,
    gx: SideGraph,
    gz: SideGraph,
    templates: [TemplateBank; 2],
}

/// Index into per-side arrays: X checks first.
fn si(side: Side) -> usize {
    match side {
        Side::X => 0,
        Side::Z => 1,
    }
}

impl Decoder {
    pub fn new(code: &CssCode, cfg: DecoderConfig) -> Result<Self> {
        cfg.validate()?;
        let gx = SideGraph::new(&code.hx);
        let gz = SideGraph::new(&code.hz);
        let templates = if cfg.rule_enabled(Rule::CoreRepair) {
            let tb = |h: &SparseBinMatrix| {
                TemplateBank::build(h, code.circulant, cfg.template_max_weight, cfg.template_node_limit)
            };
            [tb(&code.hx), tb(&code.hz)]
        } else {
            Default::default()
        };
        Ok(Decoder {
            cfg,
            n: code.n(),
            gx,
            gz,
            templates,
        })
    }

    pub fn config(&self) -> &DecoderConfig {
        &self.cfg
    }

    pub fn templates(&self, side: Side) -> &TemplateBank {
        &self.templates[si(side)]
    }

    /// Replaces a template bank, e.g. with one built under other limits.
    pub fn set_templates(&mut self, side: Side, bank: TemplateBank) {
        self.templates[si(side)] = bank;
    }

    fn graph(&self, side: Side) -> &SideGraph {
        match side {
            Side::X => &self.gx,
            Side::Z => &self.gz,
        }
    }

    /// Initial messages: every variable sends its prior.
    pub fn initial_messages(&self, prior: &DepolarizingPrior) -> BpMessages {
        let lp = prior.logs();
        let c = self.cfg.clamp;
        // z bit: (I + X) vs (Z + Y); x bit: (I + Z) vs (X + Y)
        let mz = (lae(lp[0], lp[1]) - lae(lp[3], lp[2])).clamp(-c, c);
        let mx = (lae(lp[0], lp[3]) - lae(lp[1], lp[2])).clamp(-c, c);
        BpMessages {
            mu_x: vec![mz; self.gx.nedges()],
            lam_x: vec![0.0; self.gx.nedges()],
            mu_z: vec![mx; self.gz.nedges()],
            lam_z: vec![0.0; self.gz.nedges()],
        }
    }

    fn check_update(&self, g: &SideGraph, mu: &[f64], lam: &mut [f64], s: &BitVec) {
        let c = self.cfg.clamp;
        let mut t = Vec::new();
        let mut suffix = Vec::new();
        for r in 0..g.row_ptr.len() - 1 {
            let (a, b) = (g.row_ptr[r], g.row_ptr[r + 1]);
            t.clear();
            t.extend(mu[a..b].iter().map(|&m| (m * 0.5).tanh()));
            suffix.clear();
            suffix.resize(t.len() + 1, 1.0);
            for i in (0..t.len()).rev() {
                suffix[i] = suffix[i + 1] * t[i];
            }
            let sign = if s.get(r) { -1.0 } else { 1.0 };
            let mut prefix = 1.0;
            for i in 0..t.len() {
                let prod = (prefix * suffix[i + 1]).clamp(-1.0 + 1e-15, 1.0 - 1e-15);
                lam[a + i] = (sign * 2.0 * prod.atanh()).clamp(-c, c);
                prefix *= t[i];
            }
        }
    }

    // per-variable sums of incoming check messages: (A_x from Z-checks, A_z from X-checks)
    fn incoming(&self, m: &BpMessages) -> (Vec<f64>, Vec<f64>) {
        let sum = |g: &SideGraph, lam: &[f64]| -> Vec<f64> {
            g.var_edges.iter().map(|es| es.iter().map(|&e| lam[e]).sum()).collect()
        };
        (sum(&self.gz, &m.lam_z), sum(&self.gx, &m.lam_x))
    }

    /// One flooding iteration: checks, then variables with damping `gamma`
    /// on the variable-to-check messages.
    pub fn iterate(&self, m: &mut BpMessages, sx: &BitVec, sz: &BitVec, prior: &DepolarizingPrior, gamma: f64) {
        self.check_update(&self.gx, &m.mu_x, &mut m.lam_x, sx);
        self.check_update(&self.gz, &m.mu_z, &mut m.lam_z, sz);
        let lp = prior.logs();
        let c = self.cfg.clamp;
        let (ax, az) = self.incoming(m);
        // likelihood of bit value 1 relative to 0 is exp(-lambda)
        for v in 0..self.n {
            // toward X-checks (z bit): A_z minus own, plus g(A_x)
            let gz = lae(lp[0], lp[1] - ax[v]) - lae(lp[3], lp[2] - ax[v]);
            for &e in &self.gx.var_edges[v] {
                let new = (az[v] - m.lam_x[e] + gz).clamp(-c, c);
                m.mu_x[e] = (1.0 - gamma) * new + gamma * m.mu_x[e];
            }
            let gx = lae(lp[0], lp[3] - az[v]) - lae(lp[1], lp[2] - az[v]);
            for &e in &self.gz.var_edges[v] {
                let new = (ax[v] - m.lam_z[e] + gx).clamp(-c, c);
                m.mu_z[e] = (1.0 - gamma) * new + gamma * m.mu_z[e];
            }
        }
    }

    fn weights(lp: &[f64; 4], ax: f64, az: f64) -> [f64; 4] {
        [lp[0], lp[1] - ax, lp[2] - ax - az, lp[3] - az]
    }

    /// Hard decision: argmax over I, X, Y, Z of the full product, ties to
    /// the earlier letter.
    pub fn hard_decision(&self, m: &BpMessages, prior: &DepolarizingPrior) -> (BitVec, BitVec) {
        let lp = prior.logs();
        let (ax, az) = self.incoming(m);
        let mut ex = BitVec::zeros(self.n);
        let mut ez = BitVec::zeros(self.n);
        for v in 0..self.n {
            let w = Self::weights(&lp, ax[v], az[v]);
            let mut best = 0;
            for k in 1..4 {
                if w[k] > w[best] {
                    best = k;
                }
            }
            if best == 1 || best == 2 {
                ex.set(v, true);
            }
            if best == 2 || best == 3 {
                ez.set(v, true);
            }
        }
        (ex, ez)
    }

    /// Marginal LLRs `log P(bit=0)/P(bit=1)` of the x and z bits.
    pub fn marginal_llrs(&self, m: &BpMessages, prior: &DepolarizingPrior) -> (Vec<f64>, Vec<f64>) {
        let lp = prior.logs();
        let (ax, az) = self.incoming(m);
        (0..self.n)
            .map(|v| {
                let w = Self::weights(&lp, ax[v], az[v]);
                (lae(w[0], w[3]) - lae(w[1], w[2]), lae(w[0], w[1]) - lae(w[3], w[2]))
            })
            .unzip()
    }

    fn run_bp(&self, sx: &BitVec, sz: &BitVec, prior: &DepolarizingPrior, gamma: f64, start: Option<BpMessages>) -> (BpState, BpMessages) {
        let mut m = start.unwrap_or_else(|| self.initial_messages(prior));
        let (mut ex, mut ez) = self.hard_decision(&m, prior);
        let mut fx = BitVec::zeros(self.n);
        let mut fz = BitVec::zeros(self.n);
        let matches = |ex: &BitVec, ez: &BitVec| {
            self.gx.h.mul_vec(ez).map(|s| &s == sx).unwrap_or(false) && self.gz.h.mul_vec(ex).map(|s| &s == sz).unwrap_or(false)
        };
        let mut it = 0;
        let mut converged = matches(&ex, &ez);
        while !converged && it < self.cfg.max_iters {
            it += 1;
            self.iterate(&mut m, sx, sz, prior, gamma);
            let (nx, nz) = self.hard_decision(&m, prior);
            fx.or_assign(&ex.xor(&nx));
            fz.or_assign(&ez.xor(&nz));
            ex = nx;
            ez = nz;
            converged = matches(&ex, &ez);
        }
        let (lx, lz) = self.marginal_llrs(&m, prior);
        (
            BpState {
                ex,
                ez,
                llr_x: lx,
                llr_z: lz,
                flipped_x: fx,
                flipped_z: fz,
                iterations: it,
                converged,
            },
            m,
        )
    }

    /// Damped BP, then (if enabled and needed) one zero-damping retry. On
    /// double failure the run leaving fewer unsatisfied checks is kept.
    pub fn bp_decode(&self, sx: &BitVec, sz: &BitVec, prior: &DepolarizingPrior) -> Result<(BpState, bool)> {
        if sx.len() != self.gx.h.nrows() || sz.len() != self.gz.h.nrows() {
            return Err(Error::Dimension(format!(
                "syndrome lengths {}/{} for {}/{} checks",
                sx.len(),
                sz.len(),
                self.gx.h.nrows(),
                self.gz.h.nrows()
            )));
        }
        let (first, last) = self.run_bp(sx, sz, prior, self.cfg.damping, None);
        if first.converged || !self.cfg.fallback || self.cfg.damping == 0.0 {
            return Ok((first, false));
        }
        let start = (!self.cfg.fallback_cold).then_some(last);
        let (second, _) = self.run_bp(sx, sz, prior, 0.0, start);
        let total = first.iterations + second.iterations;
        if second.converged || self.unsatisfied(&second, sx, sz) <= self.unsatisfied(&first, sx, sz) {
            Ok((BpState { iterations: total, ..second }, true))
        } else {
            Ok((BpState { iterations: total, ..first }, true))
        }
    }

    fn residual(&self, side: Side, e: &BitVec, s: &BitVec) -> BitVec {
        self.graph(side).h.mul_vec(e).expect("length checked").xor(s)
    }

    fn unsatisfied(&self, st: &BpState, sx: &BitVec, sz: &BitVec) -> usize {
        self.residual(Side::X, &st.ez, sx).count_ones() + self.residual(Side::Z, &st.ex, sz).count_ones()
    }

    /// Full decode: BP with fallback, then the post-processing ladder.
    pub fn decode(&self, sx: &BitVec, sz: &BitVec, prior: &DepolarizingPrior) -> Result<DecodeOutcome> {
        let (st, used_fallback) = self.bp_decode(sx, sz, prior)?;
        let residual_before_pp = if st.converged { 0 } else { self.unsatisfied(&st, sx, sz) };
        let mut out = DecodeOutcome {
            ex: st.ex.clone(),
            ez: st.ez.clone(),
            status: DecodeStatus::BpConverged,
            iterations: st.iterations,
            residual_before_pp,
            trace: Vec::new(),
            used_fallback,
            llr_x: st.llr_x.clone(),
            llr_z: st.llr_z.clone(),
        };
        if st.converged {
            return Ok(out);
        }
        self.post_process(sx, sz, &st, &mut out);
        Ok(out)
    }

    /// Runs the ladder on each side with a nonzero residual, stopping at the
    /// first rule that cancels it. The status names the last rule needed.
    pub fn post_process(&self, sx: &BitVec, sz: &BitVec, st: &BpState, out: &mut DecodeOutcome) {
        let mut last_rule = None;
        for side in [Side::X, Side::Z] {
            // X checks correct the z component, Z checks the x component
            let (e, s, llr, flipped) = match side {
                Side::X => (&st.ez, sx, &st.llr_z, &st.flipped_z),
                Side::Z => (&st.ex, sz, &st.llr_x, &st.flipped_x),
            };
            let r = self.residual(side, e, s);
            if r.is_zero() {
                continue;
            }
            let ctx = RuleContext {
                dec: self,
                side,
                g: self.graph(side),
                residual: &r,
                unsat: r.ones(),
                llr,
                flipped,
            };
            let mut fixed = None;
            for rule in Rule::ALL {
                if !self.cfg.rule_enabled(rule) {
                    continue;
                }
                let (corr, osd) = ctx.apply(rule);
                let ok = corr
                    .as_ref()
                    .is_some_and(|c| c.len() <= self.cfg.accept_weight && ctx.cancels(c));
                out.trace.push(RuleAttempt {
                    side,
                    rule,
                    success: ok,
                    osd,
                    weight: corr.as_ref().map_or(0, Vec::len),
                });
                if ok {
                    fixed = Some((rule, corr.unwrap()));
                    break;
                }
            }
            match fixed {
                Some((rule, corr)) => {
                    let target = match side {
                        Side::X => &mut out.ez,
                        Side::Z => &mut out.ex,
                    };
                    for v in corr {
                        target.flip(v);
                    }
                    last_rule = last_rule.max(Some(rule));
                }
                None => {
                    out.status = DecodeStatus::SyndromeFailure;
                    return;
                }
            }
        }
        out.status = match last_rule {
            Some(r) => DecodeStatus::PpCorrected(r),
            None => DecodeStatus::BpConverged,
        };
    }
}

struct RuleContext<'a> {
    dec: &'a Decoder,
    side: Side,
    g: &'a SideGraph,
    residual: &'a BitVec,
    unsat: Vec<usize>,
    llr: &'a [f64],
    flipped: &'a BitVec,
}

impl RuleContext<'_> {
    fn cfg(&self) -> &DecoderConfig {
        &self.dec.cfg
    }

    fn cancels(&self, corr: &[usize]) -> bool {
        self.g.h.syndrome_of_support(corr).map(|s| &s == self.residual).unwrap_or(false)
    }

    // ascending |LLR|, ties by index
    fn by_suspicion(&self, mut vars: Vec<usize>) -> Vec<usize> {
        vars.sort_by(|&a, &b| self.llr[a].abs().total_cmp(&self.llr[b].abs()).then(a.cmp(&b)));
        vars
    }

    fn neighbours_of_unsat(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.unsat.iter().flat_map(|&r| self.g.h.row(r).iter().copied()).collect();
        set.into_iter().collect()
    }

    fn solve_on(&self, cands: &[usize]) -> Option<Vec<usize>> {
        let mut s = ColumnSolver::new(self.g.h.nrows());
        for &c in cands {
            s.push(BitVec::from_indices(self.g.h.nrows(), &self.g.cols[c]));
        }
        let sol = s.solve(self.residual)?;
        let mut v: Vec<usize> = sol.particular.iter().map(|&i| cands[i]).collect();
        v.sort_unstable();
        Some(v)
    }

    fn apply(&self, rule: Rule) -> (Option<Vec<usize>>, bool) {
        match rule {
            Rule::LocalSolve => (self.local_solve(), false),
            Rule::PrefixSearch => (self.prefix_search().map(|(_, v)| v), false),
            Rule::DiagnosticPrefix => (self.diagnostic_prefix(), false),
            Rule::FlipHistory => self.flip_history(),
            Rule::PathClosure => (self.path_closure(), false),
            Rule::CommonColumn => (self.common_column(), false),
            Rule::CoreRepair => (self.core_repair(), false),
            Rule::SmallResidual => (self.small_residual(), false),
        }
    }

    fn local_solve(&self) -> Option<Vec<usize>> {
        let mut abs: Vec<f64> = self.llr.iter().map(|x| x.abs()).collect();
        abs.sort_by(f64::total_cmp);
        let q = self.cfg().local_quantile.clamp(0.0, 1.0);
        let thr = abs[((abs.len() - 1) as f64 * q).round() as usize];
        let near: Vec<usize> = self.neighbours_of_unsat().into_iter().filter(|&v| self.llr[v].abs() <= thr).collect();
        let mut cands = self.by_suspicion(near);
        cands.truncate(self.cfg().local_cap_factor * self.unsat.len());
        self.solve_on(&cands)
    }

    fn suspicion_order(&self) -> Vec<usize> {
        let mut all = self.by_suspicion((0..self.llr.len()).collect());
        all.truncate(self.cfg().prefix_cap);
        all
    }

    // smallest K with the residual in the span of the K most suspicious
    // columns, by bisection
    fn prefix_search(&self) -> Option<(usize, Vec<usize>)> {
        let order = self.suspicion_order();
        if self.solve_on(&order).is_none() {
            return None;
        }
        let (mut lo, mut hi) = (0, order.len());
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.solve_on(&order[..mid]).is_some() {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        self.solve_on(&order[..hi]).map(|s| (hi, s))
    }

    // probes prefix lengths from the boundary upward; where the solution
    // set is small enough, enumerates it and keeps the lightest solution
    fn diagnostic_prefix(&self) -> Option<Vec<usize>> {
        let (k0, first) = self.prefix_search()?;
        let order = self.suspicion_order();
        let nrows = self.g.h.nrows();
        let mut best = first;
        let end = (k0 + self.cfg().diag_window).min(order.len());
        for k in k0..=end {
            let cands = &order[..k];
            let mut s = ColumnSolver::new(nrows);
            for &c in cands {
                s.push(BitVec::from_indices(nrows, &self.g.cols[c]));
            }
            let Some(sol) = s.solve(self.residual) else { continue };
            if sol.nullspace.len() > self.cfg().diag_max_nullity {
                break;
            }
            for mask in 0u64..(1u64 << sol.nullspace.len()) {
                let mut x: BTreeSet<usize> = sol.particular.iter().copied().collect();
                for (i, ns) in sol.nullspace.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        for &j in ns {
                            if !x.remove(&j) {
                                x.insert(j);
                            }
                        }
                    }
                }
                if x.len() < best.len() {
                    let mut v: Vec<usize> = x.into_iter().map(|i| cands[i]).collect();
                    v.sort_unstable();
                    best = v;
                }
            }
        }
        Some(best)
    }

    fn flip_history(&self) -> (Option<Vec<usize>>, bool) {
        let mut cands = self.by_suspicion(self.flipped.ones());
        cands.truncate(self.cfg().history_cap);
        if let Some(v) = self.solve_on(&cands) {
            return (Some(v), false);
        }
        (self.osd0(), true)
    }

    // order-0 OSD on the most suspicious columns: the first independent
    // columns form the information set, all others stay zero
    fn osd0(&self) -> Option<Vec<usize>> {
        let mut order = self.by_suspicion((0..self.llr.len()).collect());
        order.truncate(self.cfg().osd_cap);
        let nrows = self.g.h.nrows();
        let mut s = ColumnSolver::new(nrows);
        let mut basis = Vec::new();
        for &c in &order {
            let before = s.rank();
            s.push(BitVec::from_indices(nrows, &self.g.cols[c]));
            if s.rank() > before {
                basis.push(c);
            }
        }
        self.solve_on(&basis)
    }

    fn path_closure(&self) -> Option<Vec<usize>> {
        let h = &self.g.h;
        let unsat: BTreeSet<usize> = self.unsat.iter().copied().collect();
        let mut path_vars = BTreeSet::new();
        let max_hops = self.cfg().path_len / 2;
        for &u in &self.unsat {
            // BFS over checks; each hop is check - var - check
            let mut prev: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
            let mut dist = BTreeMap::from([(u, 0usize)]);
            let mut q = VecDeque::from([u]);
            while let Some(c) = q.pop_front() {
                if dist[&c] == max_hops {
                    continue;
                }
                for &v in h.row(c) {
                    for &c2 in &self.g.cols[v] {
                        if dist.contains_key(&c2) {
                            continue;
                        }
                        dist.insert(c2, dist[&c] + 1);
                        prev.insert(c2, (c, v));
                        q.push_back(c2);
                    }
                }
            }
            for &w in unsat.range(u + 1..) {
                let mut c = w;
                while let Some(&(p, v)) = prev.get(&c) {
                    path_vars.insert(v);
                    c = p;
                }
            }
        }
        if path_vars.is_empty() {
            return None;
        }
        // closure: every variable on a check touched by the paths
        let mut cands: BTreeSet<usize> = path_vars.clone();
        for &v in &path_vars {
            for &c in &self.g.cols[v] {
                cands.extend(h.row(c).iter().copied());
            }
        }
        let mut cands = self.by_suspicion(cands.into_iter().collect());
        cands.truncate(self.cfg().path_cap);
        self.solve_on(&cands)
    }

    fn common_column(&self) -> Option<Vec<usize>> {
        if self.unsat.len() != 3 {
            return None;
        }
        self.g.h.row(self.unsat[0]).iter().copied().find(|&v| self.g.cols[v] == self.unsat).map(|v| vec![v])
    }

    fn core_repair(&self) -> Option<Vec<usize>> {
        if self.unsat.len() != 2 {
            return None;
        }
        self.dec.templates[si(self.side)].lookup(self.unsat[0], self.unsat[1])
    }

    // variables adjacent to the residual checks and their check-neighbours
    fn neighbourhood2(&self) -> Vec<usize> {
        let d1 = self.neighbours_of_unsat();
        let mut set: BTreeSet<usize> = d1.iter().copied().collect();
        for &v in &d1 {
            for &c in &self.g.cols[v] {
                set.extend(self.g.h.row(c).iter().copied());
            }
        }
        set.into_iter().collect()
    }

    fn small_residual(&self) -> Option<Vec<usize>> {
        if !(1..=4).contains(&self.unsat.len()) {
            return None;
        }
        let cands = self.neighbourhood2();
        let mut allowed = vec![false; self.g.h.ncols()];
        for &v in &cands {
            allowed[v] = true;
        }
        let (sols, complete) = solve_syndrome_small(
            self.g.h.rows(),
            &self.g.cols,
            &self.unsat,
            &allowed,
            self.cfg().w_max,
            self.cfg().exact_node_limit,
            usize::MAX,
        );
        let cost = |s: &Vec<usize>| (s.len(), s.iter().map(|&v| self.llr[v].abs()).sum::<f64>());
        let best = sols.into_iter().min_by(|a, b| {
            let (ca, cb) = (cost(a), cost(b));
            ca.0.cmp(&cb.0).then(ca.1.total_cmp(&cb.1)).then(a.cmp(b))
        });
        if best.is_some() || complete {
            return best;
        }
        self.beam(&cands)
    }

    // beam search: grow supports one column at a time from the candidate
    // set, scoring by remaining residual weight then summed |LLR|
    fn beam(&self, cands: &[usize]) -> Option<Vec<usize>> {
        let width = self.cfg().beam_width.max(1);
        let mut beam: Vec<(Vec<usize>, BitVec)> = vec![(Vec::new(), self.residual.clone())];
        for _ in 0..self.cfg().w_max {
            let mut next: Vec<(usize, f64, Vec<usize>, BitVec)> = Vec::new();
            for (sup, res) in &beam {
                let odd: BTreeSet<usize> = res.ones().into_iter().collect();
                for &v in cands {
                    if sup.contains(&v) || !self.g.cols[v].iter().any(|c| odd.contains(c)) {
                        continue;
                    }
                    let mut r = res.clone();
                    for &c in &self.g.cols[v] {
                        r.flip(c);
                    }
                    let mut s = sup.clone();
                    s.push(v);
                    s.sort_unstable();
                    let cost = s.iter().map(|&x| self.llr[x].abs()).sum();
                    next.push((r.count_ones(), cost, s, r));
                }
            }
            next.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2)));
            next.dedup_by(|a, b| a.2 == b.2);
            if let Some(done) = next.iter().find(|x| x.0 == 0) {
                return Some(done.2.clone());
            }
            next.truncate(width);
            if next.is_empty() {
                return None;
            }
            beam = next.into_iter().map(|(_, _, s, r)| (s, r)).collect();
        }
        None
    }
}

/// Final verdict of one trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Success,
    LogicalFailure,
    SyndromeFailure,
}

/// Compares an estimate with the true error: syndromes first, then
/// row-space membership of each residual (degenerate corrections succeed).
pub fn classify_outcome(code: &CssCode, ex: &BitVec, ez: &BitVec, hex: &BitVec, hez: &BitVec) -> Result<Verdict> {
    let (sx, sz) = syndromes(code, ex, ez)?;
    let (tx, tz) = syndromes(code, hex, hez)?;
    if sx != tx || sz != tz {
        return Ok(Verdict::SyndromeFailure);
    }
    let rx = ex.xor(hex);
    let rz = ez.xor(hez);
    if !code.row_space(Side::X).contains(&rx)? || !code.row_space(Side::Z).contains(&rz)? {
        return Ok(Verdict::LogicalFailure);
    }
    Ok(Verdict::Success)
}

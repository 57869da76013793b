//! Monte Carlo frame-error-rate measurement and reference lines.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::certify::CssCode;
use crate::decode::{
    classify_outcome, sample_error, syndromes, DecodeStatus, Decoder, DecoderConfig, DepolarizingPrior, Rule, Verdict,
};
use crate::error::{Error, Result};
use crate::io::FailureDump;

/// Approximate BP density-evolution threshold of the regular (3,10)
/// ensemble, kept as a fixed reference value.
pub const P_DE_3_10: f64 = 0.0733;

/// Published deep FER point of the 64-fold lift: (p, FER, trials, failures).
/// A reference only; it is far beyond desk-scale trial counts.
pub const PUBLISHED_POINT: (f64, f64, u64, u64) = (0.058, 1.0e-7, 180_000_000, 18);

fn h2(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// Root of `1 - h2(p) - p log2(3) = R` on `(0, 3/4)` by bisection.
pub fn hashing_threshold(rate: f64) -> Result<f64> {
    if !(rate > 0.0 && rate < 1.0) {
        return Err(Error::Invalid(format!("rate {rate} outside (0, 1)")));
    }
    let f = |p: f64| 1.0 - h2(p) - p * 3f64.log2() - rate;
    let (mut lo, mut hi) = (0.0, 0.75);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Wilson score interval at 95%.
pub fn wilson_interval(failures: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054;
    let n = trials as f64;
    let f = failures as f64 / n;
    let denom = 1.0 + z * z / n;
    let center = (f + z * z / (2.0 * n)) / denom;
    let half = z / denom * (f * (1.0 - f) / n + z * z / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// SplitMix64 step, used to derive independent per-trial seeds.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trial `t` at point index `i`; depends on nothing else, so
/// results do not depend on how trials are scheduled.
pub fn trial_seed(master: u64, point: usize, trial: u64) -> u64 {
    splitmix64(splitmix64(master ^ splitmix64(point as u64)).wrapping_add(trial))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopRule {
    Trials(u64),
    /// Stop at the trial producing the `target`-th failure, or after
    /// `max_trials`.
    Failures { target: u64, max_trials: u64 },
}

impl StopRule {
    fn max_trials(&self) -> u64 {
        match *self {
            StopRule::Trials(t) => t,
            StopRule::Failures { max_trials, .. } => max_trials,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FerRecord {
    pub p: f64,
    pub trials: u64,
    /// Trials where BP alone (with its fallback) did not succeed.
    pub bp_failures: u64,
    /// Failures after post-processing; these define the FER.
    pub failures: u64,
    pub syndrome_failures: u64,
    pub logical_failures: u64,
    /// BP failures turned into successes, by the last rule that fired.
    pub rule_corrections: BTreeMap<Rule, u64>,
    pub fer: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seconds: f64,
    pub seed: u64,
}

impl FerRecord {
    fn new(p: f64, seed: u64) -> Self {
        FerRecord {
            p,
            trials: 0,
            bp_failures: 0,
            failures: 0,
            syndrome_failures: 0,
            logical_failures: 0,
            rule_corrections: BTreeMap::new(),
            fer: 0.0,
            ci_low: 0.0,
            ci_high: 1.0,
            seconds: 0.0,
            seed,
        }
    }

    fn finish(&mut self) {
        self.fer = if self.trials == 0 {
            0.0
        } else {
            self.failures as f64 / self.trials as f64
        };
        let (lo, hi) = wilson_interval(self.failures, self.trials);
        self.ci_low = lo;
        self.ci_high = hi;
    }

    /// `bp_failures - sum(rule_corrections) == failures`.
    pub fn accounting_holds(&self) -> bool {
        let corrected: u64 = self.rule_corrections.values().sum();
        self.bp_failures >= corrected && self.bp_failures - corrected == self.failures && self.failures <= self.bp_failures
    }
}

/// Result of one trial, before aggregation.
#[derive(Clone, Debug)]
pub struct TrialResult {
    pub seed: u64,
    pub verdict: Verdict,
    pub status: DecodeStatus,
    pub dump: Option<FailureDump>,
}

/// Samples, decodes and classifies one trial. Every syndrome-valid status
/// is rechecked against the input syndromes.
pub fn run_trial(code: &CssCode, dec: &Decoder, prior: &DepolarizingPrior, seed: u64, keep_dump: bool) -> Result<TrialResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (ex, ez) = sample_error(prior, code.n(), &mut rng);
    let (sx, sz) = syndromes(code, &ex, &ez)?;
    let out = dec.decode(&sx, &sz, prior)?;
    if matches!(out.status, DecodeStatus::BpConverged | DecodeStatus::PpCorrected(_)) {
        let (tx, tz) = syndromes(code, &out.ex, &out.ez)?;
        if tx != sx || tz != sz {
            return Err(Error::Invalid(format!("trial {seed}: {} estimate misses the syndrome", out.status)));
        }
    }
    let verdict = classify_outcome(code, &ex, &ez, &out.ex, &out.ez)?;
    let status = match (out.status, verdict) {
        (DecodeStatus::SyndromeFailure, _) => DecodeStatus::SyndromeFailure,
        (_, Verdict::LogicalFailure) => DecodeStatus::LogicalFailure,
        (s, _) => s,
    };
    let dump = (keep_dump && verdict != Verdict::Success).then(|| FailureDump {
        trial_seed: seed,
        p: prior.p,
        true_x: ex.ones(),
        true_z: ez.ones(),
        syndrome_x: sx.ones(),
        syndrome_z: sz.ones(),
        est_x: out.ex.ones(),
        est_z: out.ez.ones(),
        llr_x: out.llr_x.clone(),
        llr_z: out.llr_z.clone(),
        status,
        trace: out.trace.clone(),
    });
    Ok(TrialResult {
        seed,
        verdict,
        status,
        dump,
    })
}

fn absorb(rec: &mut FerRecord, t: &TrialResult) {
    rec.trials += 1;
    let bp_ok = t.status == DecodeStatus::BpConverged && t.verdict == Verdict::Success;
    if !bp_ok {
        rec.bp_failures += 1;
    }
    match t.verdict {
        Verdict::Success => {
            if let DecodeStatus::PpCorrected(r) = t.status {
                *rec.rule_corrections.entry(r).or_insert(0) += 1;
            }
        }
        Verdict::LogicalFailure => {
            rec.failures += 1;
            rec.logical_failures += 1;
        }
        Verdict::SyndromeFailure => {
            rec.failures += 1;
            rec.syndrome_failures += 1;
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct Checkpoint {
    seed: u64,
    points: Vec<f64>,
    stop: StopRule,
    config: String,
    done: Vec<FerRecord>,
    current: Option<FerRecord>,
}

/// Options of [`run_fer`].
#[derive(Clone, Debug, Default)]
pub struct FerOptions {
    pub checkpoint: Option<PathBuf>,
    /// Trials between checkpoint writes.
    pub checkpoint_every: u64,
    /// Directory receiving `failures.jsonl`.
    pub dump_dir: Option<PathBuf>,
    /// Trials decoded per parallel batch.
    pub batch: usize,
}

fn write_atomic(path: &Path, data: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, data)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

fn run_batch(code: &CssCode, dec: &Decoder, prior: &DepolarizingPrior, seeds: &[u64], dumps: bool) -> Result<Vec<TrialResult>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        seeds.par_iter().map(|&s| run_trial(code, dec, prior, s, dumps)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        seeds.iter().map(|&s| run_trial(code, dec, prior, s, dumps)).collect()
    }
}

/// Runs every point to its stop rule. Deterministic in `seed`: trial `t`
/// of point `i` always uses [`trial_seed`]`(seed, i, t)`, and a
/// failure-target run stops exactly at the target-th failure in trial
/// order, so batch size, thread count and resumption do not matter.
pub fn run_fer(code: &CssCode, points: &[f64], stop: StopRule, cfg: &DecoderConfig, seed: u64, opts: &FerOptions) -> Result<Vec<FerRecord>> {
    let dec = Decoder::new(code, cfg.clone())?;
    run_fer_with(code, &dec, points, stop, seed, opts)
}

/// [`run_fer`] with a prebuilt decoder.
pub fn run_fer_with(code: &CssCode, dec: &Decoder, points: &[f64], stop: StopRule, seed: u64, opts: &FerOptions) -> Result<Vec<FerRecord>> {
    let cfg_text = dec.config().to_text();
    let mut state = Checkpoint {
        seed,
        points: points.to_vec(),
        stop,
        config: cfg_text.clone(),
        done: Vec::new(),
        current: None,
    };
    if let Some(path) = &opts.checkpoint {
        if path.exists() {
            let old: Checkpoint = serde_json::from_str(&std::fs::read_to_string(path)?)
                .map_err(|e| Error::Parse { line: 0, msg: e.to_string() })?;
            if old.seed != seed || old.points != points || old.stop != stop || old.config != cfg_text {
                return Err(Error::Invalid(format!("checkpoint {} belongs to a different run", path.display())));
            }
            state = old;
        }
    }
    let mut dump_file = match &opts.dump_dir {
        Some(d) => {
            std::fs::create_dir_all(d)?;
            Some(std::fs::OpenOptions::new().create(true).append(true).open(d.join("failures.jsonl"))?)
        }
        None => None,
    };
    let batch = opts.batch.max(1);
    let every = if opts.checkpoint_every == 0 { u64::MAX } else { opts.checkpoint_every };
    for (i, &p) in points.iter().enumerate().skip(state.done.len()) {
        let prior = DepolarizingPrior::new(p)?;
        let mut rec = state.current.take().unwrap_or_else(|| FerRecord::new(p, seed));
        let clock = Instant::now();
        let base_seconds = rec.seconds;
        let mut since = 0;
        'point: while rec.trials < stop.max_trials() {
            if let StopRule::Failures { target, .. } = stop {
                if rec.failures >= target {
                    break;
                }
            }
            let n = (batch as u64).min(stop.max_trials() - rec.trials);
            let seeds: Vec<u64> = (rec.trials..rec.trials + n).map(|t| trial_seed(seed, i, t)).collect();
            for t in run_batch(code, dec, &prior, &seeds, dump_file.is_some())? {
                absorb(&mut rec, &t);
                if let (Some(f), Some(d)) = (dump_file.as_mut(), &t.dump) {
                    use std::io::Write;
                    writeln!(f, "{}", serde_json::to_string(d).expect("dump serializes"))?;
                }
                if let StopRule::Failures { target, .. } = stop {
                    if rec.failures >= target {
                        break 'point;
                    }
                }
            }
            since += n;
            if since >= every {
                since = 0;
                if let Some(path) = &opts.checkpoint {
                    rec.seconds = base_seconds + clock.elapsed().as_secs_f64();
                    state.current = Some(rec.clone());
                    write_atomic(path, &serde_json::to_string(&state).expect("checkpoint serializes"))?;
                    state.current = None;
                }
            }
        }
        rec.seconds = base_seconds + clock.elapsed().as_secs_f64();
        rec.finish();
        state.done.push(rec);
        if let Some(path) = &opts.checkpoint {
            write_atomic(path, &serde_json::to_string(&state).expect("checkpoint serializes"))?;
        }
    }
    Ok(state.done)
}

/// Reference values shown with FER data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceLines {
    pub p_hash: f64,
    pub p_de: f64,
    /// Published points kept for comparison: (p, FER).
    pub published_points: Vec<(f64, f64)>,
}

impl ReferenceLines {
    pub fn for_rate(rate: f64) -> Result<Self> {
        Ok(ReferenceLines {
            p_hash: hashing_threshold(rate)?,
            p_de: P_DE_3_10,
            published_points: vec![(PUBLISHED_POINT.0, PUBLISHED_POINT.1)],
        })
    }
}

/// Columnar plot data. Row kinds: `data p fer ci_low ci_high trials
/// failures`, `ref name p`, `published p fer`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlotData {
    pub rows: Vec<(f64, f64, f64, f64, u64, u64)>,
    pub refs: ReferenceLines,
}

pub fn emit_plot_data(records: &[FerRecord], refs: &ReferenceLines) -> String {
    let mut s = String::from("# kind p fer ci_low ci_high trials failures\n");
    for r in records {
        let _ = writeln!(s, "data {:e} {:e} {:e} {:e} {} {}", r.p, r.fer, r.ci_low, r.ci_high, r.trials, r.failures);
    }
    let _ = writeln!(s, "ref p_hash {:e}", refs.p_hash);
    let _ = writeln!(s, "ref p_de {:e}", refs.p_de);
    for (p, f) in &refs.published_points {
        let _ = writeln!(s, "published {p:e} {f:e}");
    }
    s
}

pub fn parse_plot_data(text: &str) -> Result<PlotData> {
    let mut rows = Vec::new();
    let mut refs = ReferenceLines {
        p_hash: f64::NAN,
        p_de: f64::NAN,
        published_points: Vec::new(),
    };
    for (i, line) in text.lines().enumerate() {
        let t: Vec<&str> = line.split_whitespace().collect();
        if t.is_empty() || t[0].starts_with('#') {
            continue;
        }
        let err = || Error::Parse {
            line: i + 1,
            msg: format!("bad plot row {line:?}"),
        };
        let f = |k: usize| t.get(k).and_then(|x| x.parse::<f64>().ok()).ok_or_else(err);
        let u = |k: usize| t.get(k).and_then(|x| x.parse::<u64>().ok()).ok_or_else(err);
        match (t[0], t.len()) {
            ("data", 7) => rows.push((f(1)?, f(2)?, f(3)?, f(4)?, u(5)?, u(6)?)),
            ("ref", 3) if t[1] == "p_hash" => refs.p_hash = f(2)?,
            ("ref", 3) if t[1] == "p_de" => refs.p_de = f(2)?,
            ("published", 3) => refs.published_points.push((f(1)?, f(2)?)),
            _ => return Err(err()),
        }
    }
    Ok(PlotData { rows, refs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hashing_bound_value() {
        let p = hashing_threshold(4108.0 / 10240.0).unwrap();
        assert!((p - 0.09403285).abs() < 1e-8, "{p}");
        assert!(hashing_threshold(0.999_999).unwrap() < 1e-3);
        assert!(hashing_threshold(1.0).is_err());
    }

    #[test]
    fn wilson_hand_values() {
        // 0 of 10: upper = z^2 / (n + z^2)
        let (lo, hi) = wilson_interval(0, 10);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.277_532).abs() < 1e-5, "{hi}");
        let (lo, hi) = wilson_interval(5, 10);
        assert!((lo - 0.236_593).abs() < 1e-5 && (hi - 0.763_407).abs() < 1e-5);
    }

    #[test]
    fn plot_data_roundtrip() {
        let refs = ReferenceLines::for_rate(0.4).unwrap();
        let text = emit_plot_data(&[], &refs);
        let back = parse_plot_data(&text).unwrap();
        assert!(back.rows.is_empty());
        assert_eq!(back.refs, refs);
        assert_eq!(back.refs.published_points, vec![(0.058, 1.0e-7)]);
    }
}

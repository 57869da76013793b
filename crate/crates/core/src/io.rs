//! Text file formats: base coefficients, alist matrices with their index
//! sidecar, code manifests, lift labels, orbits, witnesses and failure dumps.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::base::{BasePair, TwoBranchCoefficients};
use crate::binmat::SparseBinMatrix;
use crate::decode::{DecodeStatus, RuleAttempt};
use crate::error::{Error, Result};
use crate::gf::FieldDescriptor;
use crate::lift::{EdgeIndex, LiftLabels, LiftSubgroup};
use crate::Side;

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Non-empty lines with `#` comments removed, numbered from 1.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let t: Vec<&str> = l.split('#').next().unwrap_or("").split_whitespace().collect();
        (!t.is_empty()).then_some((i + 1, t))
    })
}

fn nums<T: std::str::FromStr>(line: usize, toks: &[&str]) -> Result<Vec<T>> {
    toks.iter()
        .map(|t| t.parse::<T>().map_err(|_| perr(line, format!("expected a number, got {t:?}"))))
        .collect()
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

// ---- base coefficients ----

/// ```text
/// field <p> <e> <modulus digits, constant term first>
/// m <M>
/// J <J>
/// a0 ...   b0 ...   a1 ...   b1 ...
/// ```
pub fn write_coefficients(c: &TwoBranchCoefficients) -> String {
    let mut s = String::from("# two-branch coset base coefficients\n");
    let _ = writeln!(s, "field {} {} {}", c.field.p, c.field.e, join(&c.field.modulus));
    let _ = writeln!(s, "m {}", c.m);
    let _ = writeln!(s, "J {}", c.j);
    for (name, v) in [("a0", &c.a[0]), ("b0", &c.b[0]), ("a1", &c.a[1]), ("b1", &c.b[1])] {
        let _ = writeln!(s, "{name} {}", join(v));
    }
    s
}

pub fn parse_coefficients(text: &str) -> Result<TwoBranchCoefficients> {
    let mut field = None;
    let (mut m, mut j) = (None, None);
    let mut arr: [Option<Vec<u32>>; 4] = Default::default();
    for (ln, t) in content_lines(text) {
        match t[0] {
            "field" => {
                let v: Vec<u32> = nums(ln, &t[1..])?;
                if v.len() < 3 {
                    return Err(perr(ln, "field needs p, e and the modulus digits"));
                }
                field = Some(FieldDescriptor {
                    p: v[0],
                    e: v[1],
                    modulus: v[2..].to_vec(),
                });
            }
            "m" => m = Some(nums::<u32>(ln, &t[1..])?.first().copied().ok_or_else(|| perr(ln, "m needs a value"))?),
            "J" => j = Some(nums::<usize>(ln, &t[1..])?.first().copied().ok_or_else(|| perr(ln, "J needs a value"))?),
            k @ ("a0" | "b0" | "a1" | "b1") => {
                let idx = ["a0", "b0", "a1", "b1"].iter().position(|x| *x == k).unwrap();
                arr[idx] = Some(nums(ln, &t[1..])?);
            }
            other => return Err(perr(ln, format!("unknown key {other:?}"))),
        }
    }
    let field = field.ok_or_else(|| perr(0, "missing field line"))?;
    let m = m.ok_or_else(|| perr(0, "missing m"))?;
    let [a0, b0, a1, b1] = arr.map(|x| x.unwrap_or_default());
    let c = TwoBranchCoefficients::new(field, m, [a0, a1], [b0, b1])?;
    if let Some(j) = j {
        if j != c.j {
            return Err(perr(0, format!("J = {j} but the arrays have length {}", c.j)));
        }
    }
    Ok(c)
}

// ---- alist ----

/// Row count and column count, maximum weights, weight lists, then the
/// 1-based support of every row followed by that of every column.
pub fn write_alist(h: &SparseBinMatrix) -> String {
    let cols = h.columns();
    let rw = h.row_weights();
    let cw: Vec<usize> = cols.iter().map(|c| c.len()).collect();
    let mut s = String::new();
    let _ = writeln!(s, "{} {}", h.nrows(), h.ncols());
    let _ = writeln!(s, "{} {}", rw.iter().max().unwrap_or(&0), cw.iter().max().unwrap_or(&0));
    let _ = writeln!(s, "{}", join(&rw));
    let _ = writeln!(s, "{}", join(&cw));
    for r in h.rows() {
        let one: Vec<usize> = r.iter().map(|c| c + 1).collect();
        let _ = writeln!(s, "{}", join(&one));
    }
    for c in &cols {
        let one: Vec<usize> = c.iter().map(|r| r + 1).collect();
        let _ = writeln!(s, "{}", join(&one));
    }
    s
}

/// Reads [`write_alist`] output; zero padding entries are skipped, and the
/// column lists must agree with the row lists.
pub fn parse_alist(text: &str) -> Result<SparseBinMatrix> {
    let lines: Vec<(usize, Vec<usize>)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| Ok((i + 1, nums::<usize>(i + 1, &l.split_whitespace().collect::<Vec<_>>())?)))
        .collect::<Result<Vec<_>>>()?;
    let mut it = lines.into_iter();
    let mut next = |what: &str| it.next().ok_or_else(|| perr(0, format!("alist ends before {what}")));
    let (ln, dims) = next("dimensions")?;
    if dims.len() != 2 {
        return Err(perr(ln, "first line must be `rows cols`"));
    }
    let (nr, nc) = (dims[0], dims[1]);
    next("maximum weights")?;
    let (ln, rw) = next("row weights")?;
    let (ln2, cw) = next("column weights")?;
    if rw.len() != nr || cw.len() != nc {
        return Err(perr(ln.max(ln2), "weight list lengths do not match the dimensions"));
    }
    let mut rows = Vec::with_capacity(nr);
    for (i, &w) in rw.iter().enumerate() {
        let (ln, v) = next("row lists")?;
        let r: Vec<usize> = v.into_iter().filter(|&x| x != 0).map(|x| x - 1).collect();
        if r.len() != w {
            return Err(perr(ln, format!("row {i} lists {} entries, weight says {w}", r.len())));
        }
        rows.push(r);
    }
    let h = SparseBinMatrix::from_unsorted_rows(nc, rows)?;
    let cols = h.columns();
    for (j, &w) in cw.iter().enumerate() {
        let (ln, v) = next("column lists")?;
        let mut c: Vec<usize> = v.into_iter().filter(|&x| x != 0).map(|x| x - 1).collect();
        c.sort_unstable();
        if c.len() != w || c != cols[j] {
            return Err(perr(ln, format!("column {j} disagrees with the row lists")));
        }
    }
    Ok(h)
}

/// Row and column coordinates of a base pair: `row <index> <i> <r>` and
/// `col <index> <branch> <t> <h>`.
pub fn write_sidecar(b: &BasePair) -> String {
    let mut s = String::from("# row index i r\n# col index branch t h\n");
    for row in 0..b.hx.nrows() {
        let (i, r) = b.row_coords(row);
        let _ = writeln!(s, "row {row} {i} {r}");
    }
    for c in 0..b.n() {
        let (l, t, v) = b.column_coords(c);
        let _ = writeln!(s, "col {c} {l} {t} {}", b.subgroup_elements()[v]);
    }
    s
}

// ---- code manifest ----

/// A CSS code stored as two alist files, optionally tied to the base and
/// labels it was lifted from. Paths are relative to the manifest.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CodeManifest {
    pub hx: PathBuf,
    pub hz: PathBuf,
    pub circulant: Option<usize>,
    pub base: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub orbit: Option<PathBuf>,
}

pub fn write_manifest(m: &CodeManifest) -> String {
    let mut s = String::from("# css code\n");
    let _ = writeln!(s, "hx {}", m.hx.display());
    let _ = writeln!(s, "hz {}", m.hz.display());
    if let Some(p) = m.circulant {
        let _ = writeln!(s, "circulant {p}");
    }
    for (k, v) in [("base", &m.base), ("labels", &m.labels), ("orbit", &m.orbit)] {
        if let Some(v) = v {
            let _ = writeln!(s, "{k} {}", v.display());
        }
    }
    s
}

pub fn parse_manifest(text: &str) -> Result<CodeManifest> {
    let mut m = CodeManifest::default();
    let (mut hx, mut hz) = (None, None);
    for (ln, t) in content_lines(text) {
        if t.len() != 2 {
            return Err(perr(ln, "expected `key value`"));
        }
        let v = PathBuf::from(t[1]);
        match t[0] {
            "hx" => hx = Some(v),
            "hz" => hz = Some(v),
            "circulant" => m.circulant = Some(nums::<usize>(ln, &t[1..])?[0]),
            "base" => m.base = Some(v),
            "labels" => m.labels = Some(v),
            "orbit" => m.orbit = Some(v),
            other => return Err(perr(ln, format!("unknown key {other:?}"))),
        }
    }
    m.hx = hx.ok_or_else(|| perr(0, "missing hx"))?;
    m.hz = hz.ok_or_else(|| perr(0, "missing hz"))?;
    Ok(m)
}

/// Resolves a manifest path against the manifest's own directory.
pub fn resolve(manifest: &Path, rel: &Path) -> PathBuf {
    if rel.is_absolute() {
        rel.to_path_buf()
    } else {
        manifest.parent().unwrap_or(Path::new(".")).join(rel)
    }
}

// ---- labels ----

/// `P <order>` followed by sorted `<side> <row> <col> <exponent>` lines.
pub fn write_labels(b: &BasePair, l: &LiftLabels) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "P {}", l.p);
    for side in [Side::X, Side::Z] {
        let h = b.matrix(side);
        for (r, vals) in l.side(side).iter().enumerate() {
            for (&c, &v) in h.row(r).iter().zip(vals) {
                let _ = writeln!(s, "{side} {r} {c} {v}");
            }
        }
    }
    s
}

/// Parses a label file against a base pair; every base edge must appear
/// exactly once.
pub fn parse_labels(b: &BasePair, text: &str) -> Result<LiftLabels> {
    let edges = EdgeIndex::of_base(b);
    let mut p = None;
    let mut vals: Vec<Option<u32>> = vec![None; edges.len()];
    for (ln, t) in content_lines(text) {
        if t[0] == "P" {
            p = Some(nums::<u32>(ln, &t[1..])?.first().copied().ok_or_else(|| perr(ln, "P needs a value"))?);
            continue;
        }
        if t.len() != 4 {
            return Err(perr(ln, "expected `side row col exponent`"));
        }
        let side: Side = t[0].parse().map_err(|_| perr(ln, format!("bad side {:?}", t[0])))?;
        let v: Vec<usize> = nums(ln, &t[1..])?;
        let idx = edges
            .var(side, v[0], v[1])
            .ok_or_else(|| perr(ln, format!("({}, {}) is not a {side}-edge of the base", v[0], v[1])))?;
        if vals[idx].replace(v[2] as u32).is_some() {
            return Err(perr(ln, "edge listed twice"));
        }
    }
    let p = p.ok_or_else(|| perr(0, "missing P line"))?;
    if let Some(i) = vals.iter().position(|v| v.is_none()) {
        let (side, r, c) = edges.edge(i);
        return Err(perr(0, format!("{side}-edge ({r}, {c}) has no label")));
    }
    let s: Vec<u32> = vals.into_iter().map(|v| v.unwrap()).collect();
    let l = LiftLabels::from_vector(&edges, p, &s);
    l.validate(b)?;
    Ok(l)
}

// ---- orbit ----

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitSpec {
    pub k: LiftSubgroup,
    pub seeds: Vec<Vec<usize>>,
}

/// `P <order>`, `K <elements>`, then one `seed <columns>` line per seed.
pub fn write_orbit(o: &OrbitSpec) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "P {}", o.k.p);
    let _ = writeln!(s, "K {}", join(&o.k.elements()));
    for seed in &o.seeds {
        let _ = writeln!(s, "seed {}", join(seed));
    }
    s
}

pub fn parse_orbit(text: &str) -> Result<OrbitSpec> {
    let (mut p, mut k) = (None, None);
    let mut seeds = Vec::new();
    for (ln, t) in content_lines(text) {
        match t[0] {
            "P" => p = nums::<u32>(ln, &t[1..])?.first().copied(),
            "K" => k = Some((ln, nums::<u32>(ln, &t[1..])?)),
            "seed" => seeds.push(nums::<usize>(ln, &t[1..])?),
            other => return Err(perr(ln, format!("unknown key {other:?}"))),
        }
    }
    let p = p.ok_or_else(|| perr(0, "missing P"))?;
    let (ln, k) = k.ok_or_else(|| perr(0, "missing K"))?;
    let k = LiftSubgroup::from_elements(p, &k).map_err(|e| perr(ln, e.to_string()))?;
    Ok(OrbitSpec { k, seeds })
}

// ---- witness ----

/// A logical support, given either explicitly or as coset anchors.
#[derive(Clone, Debug, PartialEq)]
pub enum WitnessSpec {
    Cosets {
        side: Side,
        k: LiftSubgroup,
        pairs: Vec<(usize, u32)>,
    },
    Support {
        side: Side,
        support: Vec<usize>,
    },
}

impl WitnessSpec {
    pub fn side(&self) -> Side {
        match self {
            WitnessSpec::Cosets { side, .. } | WitnessSpec::Support { side, .. } => *side,
        }
    }

    pub fn support(&self) -> Vec<usize> {
        match self {
            WitnessSpec::Cosets { k, pairs, .. } => {
                let t: Vec<usize> = pairs.iter().map(|x| x.0).collect();
                let f: Vec<u32> = pairs.iter().map(|x| x.1).collect();
                crate::lift::coset_support(&t, &f, k)
            }
            WitnessSpec::Support { support, .. } => support.clone(),
        }
    }
}

/// `side`, then either `P`, `K` and `pair c f` lines, or `support` lines.
pub fn write_witness(w: &WitnessSpec) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "side {}", w.side());
    match w {
        WitnessSpec::Cosets { k, pairs, .. } => {
            let _ = writeln!(s, "P {}", k.p);
            let _ = writeln!(s, "K {}", join(&k.elements()));
            for (c, f) in pairs {
                let _ = writeln!(s, "pair {c} {f}");
            }
        }
        WitnessSpec::Support { support, .. } => {
            let _ = writeln!(s, "weight {}", support.len());
            for chunk in support.chunks(16) {
                let _ = writeln!(s, "support {}", join(chunk));
            }
        }
    }
    s
}

pub fn parse_witness(text: &str) -> Result<WitnessSpec> {
    let (mut side, mut p, mut k) = (None, None, None);
    let mut pairs = Vec::new();
    let mut support = Vec::new();
    let mut weight = None;
    for (ln, t) in content_lines(text) {
        match t[0] {
            "side" => side = Some(t.get(1).ok_or_else(|| perr(ln, "side needs a value"))?.parse::<Side>()?),
            "P" => p = nums::<u32>(ln, &t[1..])?.first().copied(),
            "K" => k = Some((ln, nums::<u32>(ln, &t[1..])?)),
            "pair" => {
                let v: Vec<u32> = nums(ln, &t[1..])?;
                if v.len() != 2 {
                    return Err(perr(ln, "pair needs c and f"));
                }
                pairs.push((v[0] as usize, v[1]));
            }
            "support" => support.extend(nums::<usize>(ln, &t[1..])?),
            "weight" => weight = nums::<usize>(ln, &t[1..])?.first().copied(),
            other => return Err(perr(ln, format!("unknown key {other:?}"))),
        }
    }
    let side = side.ok_or_else(|| perr(0, "missing side"))?;
    if !pairs.is_empty() {
        let p = p.ok_or_else(|| perr(0, "coset witness needs P"))?;
        let (ln, k) = k.ok_or_else(|| perr(0, "coset witness needs K"))?;
        let k = LiftSubgroup::from_elements(p, &k).map_err(|e| perr(ln, e.to_string()))?;
        return Ok(WitnessSpec::Cosets { side, k, pairs });
    }
    if let Some(w) = weight {
        if w != support.len() {
            return Err(perr(0, format!("weight {w} but {} support entries", support.len())));
        }
    }
    Ok(WitnessSpec::Support { side, support })
}

// ---- failure dumps ----

/// One failed trial, as written to `failures.jsonl`. Index lists hold the
/// positions of ones.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailureDump {
    pub trial_seed: u64,
    pub p: f64,
    pub true_x: Vec<usize>,
    pub true_z: Vec<usize>,
    pub syndrome_x: Vec<usize>,
    pub syndrome_z: Vec<usize>,
    pub est_x: Vec<usize>,
    pub est_z: Vec<usize>,
    pub llr_x: Vec<f64>,
    pub llr_z: Vec<f64>,
    pub status: DecodeStatus,
    pub trace: Vec<RuleAttempt>,
}

pub fn parse_dumps(text: &str) -> Result<Vec<FailureDump>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| perr(i + 1, e.to_string())))
        .collect()
}

pub fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

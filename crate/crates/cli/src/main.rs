use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use coset_qldpc::base::{
    build_base, census, check_4cycle_certificate, check_orthogonality_certificate, search_coefficients,
    verify_4cycles_directly, BasePair, SearchMode, TwoBranchCoefficients,
};
use coset_qldpc::certify::{check_lower_bound, verify_witness, CssCode, EnumOptions, LowerBoundVerdict, SearchBudget};
use coset_qldpc::decode::{Decoder, DecoderConfig, DepolarizingPrior};
use coset_qldpc::gf::Field;
use coset_qldpc::harness::{emit_plot_data, run_fer_with, run_trial, FerOptions, ReferenceLines, StopRule};
use coset_qldpc::io::{self, CodeManifest, OrbitSpec, WitnessSpec};
use coset_qldpc::lift::{
    assemble_system, build_lift, liftability_report, orbit_from_seeds, solve_labels, verify_lift_code,
    witness_constraints, LiftLabels, Liftability, SolveBudget, SolveMode, SolveOutcome, SupportOrbit,
};
use coset_qldpc::replay::{extract_logical, Replay};

#[derive(Parser)]
#[command(name = "coset-qldpc", version, about = "Two-branch coset quantum LDPC codes")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Search certificate-valid coefficient arrays.
    SearchBase {
        /// Field as p^e, e.g. 7 or 2^4.
        #[arg(long)]
        field: String,
        #[arg(long)]
        m: u32,
        #[arg(long = "J")]
        j: usize,
        /// Every normalized candidate instead of the first.
        #[arg(long)]
        exhaustive: bool,
        /// Write candidates as coefficient files into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a base pair and export alist matrices, sidecar and manifest.
    BuildBase {
        #[arg(long)]
        coeffs: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Check both coset certificates, 4-cycles, parameters and the census.
    CertifyBase {
        #[arg(long)]
        coeffs: PathBuf,
        /// Also certify distance >= D and search a logical of weight D.
        #[arg(long)]
        distance: Option<usize>,
    },
    /// Solve lift labels and build the lifted code.
    Lift {
        /// Base coefficient file.
        #[arg(long)]
        base: PathBuf,
        #[arg(long = "P")]
        p: u32,
        #[arg(long)]
        orbit: Option<PathBuf>,
        /// Coset witness files whose supports the labels must close.
        #[arg(long = "pin-witness")]
        pin_witness: Vec<PathBuf>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Exhaustive search instead of randomized restarts.
        #[arg(long)]
        complete: bool,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Verify labels against a code from scratch.
    CertifyLift {
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        orbit: Option<PathBuf>,
    },
    /// Certify that no nontrivial logical has weight below the target.
    Distance {
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        target: usize,
        /// Seconds; 0 means unlimited.
        #[arg(long, default_value_t = 0.0)]
        budget: f64,
    },
    /// Check a logical witness.
    Witness {
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        witness: PathBuf,
    },
    /// Decode one sampled error.
    Decode {
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        dec: DecoderArgs,
    },
    /// Monte Carlo frame error rate.
    Fer(FerArgs),
    /// Extract residual logicals from saved failure dumps.
    Replay {
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        dumps: PathBuf,
        /// Write witness candidates here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct DecoderArgs {
    /// Decoder config file (key = value).
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct FerArgs {
    #[arg(long)]
    code: PathBuf,
    /// Comma-separated depolarizing probabilities.
    #[arg(long = "p-list", value_delimiter = ',', required = true)]
    p_list: Vec<f64>,
    #[arg(long, conflicts_with = "failures")]
    trials: Option<u64>,
    /// Stop each point at this many failures.
    #[arg(long)]
    failures: Option<u64>,
    /// Trial cap in failure-target mode.
    #[arg(long, default_value_t = 1_000_000)]
    max_trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Columnar plot data output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// FerRecords as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    checkpoint_every: u64,
    #[arg(long)]
    dump_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 256)]
    batch: usize,
    #[command(flatten)]
    dec: DecoderArgs,
}

fn read(p: &Path) -> Result<String> {
    std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))
}

fn write(p: &Path, s: &str) -> Result<()> {
    std::fs::write(p, s).with_context(|| format!("writing {}", p.display()))?;
    eprintln!("wrote {}", p.display());
    Ok(())
}

fn parse_field(s: &str) -> Result<Field> {
    let (p, e) = match s.split_once('^') {
        Some((p, e)) => (p.trim().parse()?, e.trim().parse()?),
        None => (s.trim().parse()?, 1),
    };
    Ok(Field::new(p, e, None)?)
}

fn load_base(path: &Path) -> Result<BasePair> {
    let c = io::parse_coefficients(&read(path)?)?;
    Ok(build_base(&c)?)
}

fn load_orbit(b: &BasePair, path: &Path) -> Result<SupportOrbit> {
    let spec = io::parse_orbit(&read(path)?)?;
    Ok(orbit_from_seeds(b, &spec.seeds, spec.k)?)
}

struct LoadedCode {
    code: CssCode,
    manifest: CodeManifest,
    path: PathBuf,
}

fn load_code(path: &Path) -> Result<LoadedCode> {
    let manifest = io::parse_manifest(&read(path)?)?;
    let hx = io::parse_alist(&read(&io::resolve(path, &manifest.hx))?)?;
    let hz = io::parse_alist(&read(&io::resolve(path, &manifest.hz))?)?;
    let mut code = CssCode::new(hx, hz)?;
    if let Some(p) = manifest.circulant {
        code = code.with_circulant(p);
    }
    Ok(LoadedCode {
        code,
        manifest,
        path: path.to_path_buf(),
    })
}

fn load_config(a: &DecoderArgs) -> Result<DecoderConfig> {
    match &a.config {
        Some(p) => Ok(DecoderConfig::from_text(&read(p)?)?),
        None => Ok(DecoderConfig::default()),
    }
}

fn write_code(dir: &Path, hx: &coset_qldpc::binmat::SparseBinMatrix, hz: &coset_qldpc::binmat::SparseBinMatrix, m: CodeManifest) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write(&dir.join(&m.hx), &io::write_alist(hx))?;
    write(&dir.join(&m.hz), &io::write_alist(hz))?;
    write(&dir.join("code.txt"), &io::write_manifest(&m))
}

fn search_base(field: &str, m: u32, j: usize, exhaustive: bool, out: Option<PathBuf>) -> Result<()> {
    let f = parse_field(field)?;
    let mode = if exhaustive { SearchMode::Exhaustive } else { SearchMode::FirstFound };
    let t = Instant::now();
    let found = search_coefficients(&f, m, j, mode)?;
    println!("{} candidate(s) in {:.2}s", found.len(), t.elapsed().as_secs_f64());
    for (i, c) in found.iter().enumerate() {
        println!("{c}");
        if let Some(dir) = &out {
            std::fs::create_dir_all(dir)?;
            write(&dir.join(format!("cand-{i:04}.coeffs")), &io::write_coefficients(c))?;
        }
    }
    Ok(())
}

fn certify_base(coeffs: &TwoBranchCoefficients, distance: Option<usize>) -> Result<bool> {
    let mut ok = true;
    let mut line = |pass: bool, name: &str, detail: String| {
        ok &= pass;
        println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    };
    match check_orthogonality_certificate(coeffs)? {
        Ok(()) => line(true, "orthogonality-certificate", "cross coset equalities hold".into()),
        Err(e) => line(false, "orthogonality-certificate", e.to_string()),
    }
    match check_4cycle_certificate(coeffs)? {
        Ok(()) => line(true, "4-cycle-certificate", "same-type cosets disjoint".into()),
        Err(e) => line(false, "4-cycle-certificate", e.to_string()),
    }
    let b = build_base(coeffs)?;
    let code = CssCode::new(b.hx.clone(), b.hz.clone());
    line(code.is_ok(), "orthogonality", "H_X H_Z^T = 0".into());
    line(verify_4cycles_directly(&b), "no-4-cycles", "checked on both matrices".into());
    let c = census(&b);
    line(
        c.overlaps_zero_or_two(),
        "census",
        format!("N6 = ({}, {}), N_XZ2 = {}", c.n6_x, c.n6_z, c.n_xz2),
    );
    if let Ok(code) = code {
        println!("params {}", code.params_string());
        if let Some(d) = distance {
            let rep = check_lower_bound(&code, d, &EnumOptions::default());
            println!("{rep}");
            let up = check_lower_bound(&code, d + 1, &EnumOptions::default());
            println!("{up}");
        }
    }
    Ok(ok)
}

fn lift(
    base: &Path,
    p: u32,
    orbit_path: Option<&Path>,
    pins: &[PathBuf],
    seed: u64,
    complete: bool,
    restarts: usize,
    out: &Path,
) -> Result<bool> {
    let b = load_base(base)?;
    let orbit = orbit_path.map(|o| load_orbit(&b, o)).transpose()?;
    let mut sys = assemble_system(&b, p, orbit.as_ref())?;
    for w in pins {
        match io::parse_witness(&read(w)?)? {
            WitnessSpec::Cosets { side, k, pairs } => {
                if k.p != p {
                    bail!("{}: witness is for P = {}", w.display(), k.p);
                }
                sys.pinned.extend(witness_constraints(&b, side, &pairs, &k)?);
            }
            WitnessSpec::Support { .. } => bail!("{}: only coset witnesses can be pinned", w.display()),
        }
    }
    let forced = liftability_report(&sys).iter().filter(|x| **x == Liftability::ForcedZero).count();
    println!(
        "system: {} variables, {} zero, {} nonzero ({} forced), {} pinned",
        sys.nvars(),
        sys.zero.len(),
        sys.nonzero.len(),
        forced,
        sys.pinned.len()
    );
    let mode = if complete { SolveMode::Complete } else { SolveMode::Randomized };
    let budget = SolveBudget {
        restarts,
        ..SolveBudget::default()
    };
    let t = Instant::now();
    let labels = match solve_labels(&sys, seed, budget, mode) {
        SolveOutcome::Solved(l) => l,
        other => {
            println!("no labels: {other:?} after {:.2}s", t.elapsed().as_secs_f64());
            return Ok(false);
        }
    };
    println!("labels solved in {:.2}s", t.elapsed().as_secs_f64());
    let code = build_lift(&b, &labels)?;
    let cert = verify_lift_code(&code, &b, &labels, orbit.as_ref())?;
    print!("{cert}");
    std::fs::create_dir_all(out)?;
    write(&out.join("labels.txt"), &io::write_labels(&b, &labels))?;
    write(&out.join("base.coeffs"), &io::write_coefficients(&b.coeffs))?;
    write(&out.join("certificate.txt"), &cert.to_string())?;
    let mut m = CodeManifest {
        hx: "hx.alist".into(),
        hz: "hz.alist".into(),
        circulant: Some(p as usize),
        base: Some("base.coeffs".into()),
        labels: Some("labels.txt".into()),
        orbit: None,
    };
    if let Some(o) = &orbit {
        write(
            &out.join("orbit.txt"),
            &io::write_orbit(&OrbitSpec {
                k: o.k,
                seeds: o.seeds.clone(),
            }),
        )?;
        m.orbit = Some("orbit.txt".into());
    }
    write_code(out, &code.hx, &code.hz, m)?;
    Ok(cert.passed())
}

fn certify_lift(code: &Path, labels: &Path, orbit: Option<&Path>) -> Result<bool> {
    let lc = load_code(code)?;
    let base = lc
        .manifest
        .base
        .as_ref()
        .context("the code manifest names no base coefficient file")?;
    let b = load_base(&io::resolve(&lc.path, base))?;
    let l: LiftLabels = io::parse_labels(&b, &read(labels)?)?;
    let orbit_path = orbit
        .map(Path::to_path_buf)
        .or_else(|| lc.manifest.orbit.as_ref().map(|o| io::resolve(&lc.path, o)));
    let orbit = orbit_path.map(|o| load_orbit(&b, &o)).transpose()?;
    let cert = verify_lift_code(&lc.code, &b, &l, orbit.as_ref())?;
    print!("{cert}");
    Ok(cert.passed())
}

fn fer(a: &FerArgs) -> Result<()> {
    let lc = load_code(&a.code)?;
    let cfg = load_config(&a.dec)?;
    let stop = match (a.trials, a.failures) {
        (Some(t), None) => StopRule::Trials(t),
        (None, Some(f)) => StopRule::Failures {
            target: f,
            max_trials: a.max_trials,
        },
        _ => bail!("give exactly one of --trials and --failures"),
    };
    let dec = Decoder::new(&lc.code, cfg)?;
    let opts = FerOptions {
        checkpoint: a.checkpoint.clone(),
        checkpoint_every: a.checkpoint_every,
        dump_dir: a.dump_dir.clone(),
        batch: a.batch,
    };
    let recs = run_fer_with(&lc.code, &dec, &a.p_list, stop, a.seed, &opts)?;
    println!("p trials bp_failures failures fer ci_low ci_high seconds corrections");
    for r in &recs {
        println!(
            "{} {} {} {} {:.3e} {:.3e} {:.3e} {:.1} {:?}",
            r.p, r.trials, r.bp_failures, r.failures, r.fer, r.ci_low, r.ci_high, r.seconds, r.rule_corrections
        );
    }
    let refs = ReferenceLines::for_rate(lc.code.rate().clamp(1e-9, 1.0 - 1e-9))?;
    let data = emit_plot_data(&recs, &refs);
    match &a.out {
        Some(p) => write(p, &data)?,
        None => print!("{data}"),
    }
    if let Some(p) = &a.json {
        write(p, &serde_json::to_string_pretty(&recs)?)?;
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let ok = match cli.cmd {
        Cmd::SearchBase {
            field,
            m,
            j,
            exhaustive,
            out,
        } => {
            search_base(&field, m, j, exhaustive, out)?;
            true
        }
        Cmd::BuildBase { coeffs, out } => {
            let b = load_base(&coeffs)?;
            let code = CssCode::new(b.hx.clone(), b.hz.clone())?;
            println!("{} {}", b.coeffs, code.params_string());
            std::fs::create_dir_all(&out)?;
            write(&out.join("sidecar.txt"), &io::write_sidecar(&b))?;
            write(&out.join("base.coeffs"), &io::write_coefficients(&b.coeffs))?;
            let m = CodeManifest {
                hx: "hx.alist".into(),
                hz: "hz.alist".into(),
                base: Some("base.coeffs".into()),
                ..Default::default()
            };
            write_code(&out, &b.hx, &b.hz, m)?;
            true
        }
        Cmd::CertifyBase { coeffs, distance } => certify_base(&io::parse_coefficients(&read(&coeffs)?)?, distance)?,
        Cmd::Lift {
            base,
            p,
            orbit,
            pin_witness,
            seed,
            complete,
            restarts,
            out,
        } => lift(&base, p, orbit.as_deref(), &pin_witness, seed, complete, restarts, &out)?,
        Cmd::CertifyLift { code, labels, orbit } => certify_lift(&code, &labels, orbit.as_deref())?,
        Cmd::Distance { code, target, budget } => {
            let lc = load_code(&code)?;
            let opts = EnumOptions {
                budget: if budget > 0.0 { SearchBudget::seconds(budget) } else { SearchBudget::unlimited() },
                ..EnumOptions::default()
            };
            let rep = check_lower_bound(&lc.code, target, &opts);
            println!("{rep}");
            rep.verdict == LowerBoundVerdict::Accepted
        }
        Cmd::Witness { code, witness } => {
            let mut lc = load_code(&code)?;
            let w = io::parse_witness(&read(&witness)?)?;
            let rep = verify_witness(&mut lc.code, w.side(), &w.support())?;
            println!(
                "{}-witness weight {}: in kernel {}, in row space {} => {}",
                rep.side,
                rep.weight,
                rep.in_kernel,
                rep.in_row_space,
                if rep.is_valid() { "valid" } else { "invalid" }
            );
            rep.is_valid()
        }
        Cmd::Decode { code, p, seed, dec } => {
            let lc = load_code(&code)?;
            let d = Decoder::new(&lc.code, load_config(&dec)?)?;
            let prior = DepolarizingPrior::new(p)?;
            let t = run_trial(&lc.code, &d, &prior, seed, true)?;
            println!("seed {seed} status {} verdict {:?}", t.status, t.verdict);
            if let Some(dump) = &t.dump {
                println!("{}", serde_json::to_string(dump)?);
            }
            true
        }
        Cmd::Fer(a) => {
            fer(&a)?;
            true
        }
        Cmd::Replay { code, dumps, out } => {
            let lc = load_code(&code)?;
            for (i, d) in io::parse_dumps(&read(&dumps)?)?.iter().enumerate() {
                match extract_logical(&lc.code, d) {
                    Ok(Replay::Degenerate) => println!("dump {i} (seed {}): degenerate", d.trial_seed),
                    Ok(Replay::Logical(reps)) => {
                        for r in reps {
                            println!("dump {i} (seed {}): {}-logical of weight {}", d.trial_seed, r.side, r.weight);
                            if let Some(dir) = &out {
                                std::fs::create_dir_all(dir)?;
                                let spec = WitnessSpec::Support {
                                    side: r.side,
                                    support: r.support,
                                };
                                write(&dir.join(format!("witness-{}-{}.txt", d.trial_seed, spec.side())), &io::write_witness(&spec))?;
                            }
                        }
                    }
                    Err(e) => println!("dump {i} (seed {}): {e}", d.trial_seed),
                }
            }
            true
        }
    };
    if !ok {
        std::process::exit(1);
    }
    Ok(())
}

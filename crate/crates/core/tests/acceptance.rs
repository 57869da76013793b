//! Acceptance criteria, one PASS/FAIL line each. Run with `--nocapture` to
//! see the report. Criteria that cannot be met are still run in full; the
//! test then checks that they fail for the documented reason only.

use std::collections::BTreeSet;
use std::time::Instant;

use coset_qldpc::base::{
    build_base, census, check_4cycle_certificate, check_orthogonality_certificate, presets, search_coefficients,
    verify_4cycles_directly, BasePair, SearchMode, TwoBranchCoefficients,
};
use coset_qldpc::binmat::{kernel_basis, product_is_zero, BitVec, RowSpaceBasis, SparseBinMatrix};
use coset_qldpc::certify::{
    check_lower_bound, check_witness, min_kernel_weight_below, CssCode, EnumOptions, KernelSearchOutcome,
    LowerBoundVerdict, SearchBudget,
};
use coset_qldpc::decode::{
    syndromes, DecodeStatus, Decoder, DecoderConfig, DepolarizingPrior, Verdict,
};
use coset_qldpc::gf::Field;
use coset_qldpc::harness::{
    emit_plot_data, hashing_threshold, parse_plot_data, run_fer_with, FerOptions, FerRecord, ReferenceLines, StopRule,
};
use coset_qldpc::lift::{
    self, assemble_system, build_lift, coset_support, eval_form, lift_matrix, lifted_walk_closes, liftability_report,
    random_labels, random_orthogonal_labels, reference, sixcycle_forms, solve_labels, support_quotient_forms,
    verify_lift_code, CongruenceSystem, LiftLabels, LiftSubgroup, Liftability, PinnedForm, SolveBudget, SolveMode,
    SolveOutcome, SupportAnalysis,
};
use coset_qldpc::Side;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const HASH_TOL: f64 = 1e-7;
const DAMPING_TOL: f64 = 1e-10;
const F7_TRIALS: u64 = 100_000;
const LIFT_TRIALS: u64 = 1_000_000;

struct Line {
    id: u32,
    pass: bool,
    detail: String,
}

// Written to the real stdout so the lines show up without --nocapture.
fn say(line: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}

fn report(lines: &mut Vec<Line>, id: u32, pass: bool, detail: String) {
    say(&format!("{} criterion {id}: {detail}", if pass { "PASS" } else { "FAIL" }));
    lines.push(Line { id, pass, detail });
}

fn base_of(name: &str) -> BasePair {
    build_base(&presets::find(name).unwrap().coefficients()).unwrap()
}

fn code_of(b: &BasePair) -> CssCode {
    CssCode::new(b.hx.clone(), b.hz.clone()).unwrap()
}

// ---- 1 ----

/// Smallest D for which the lower bound is rejected, with the logical found.
fn measured_distance(code: &CssCode, max: usize) -> Option<(usize, usize)> {
    for d in 1..=max + 1 {
        if let LowerBoundVerdict::Rejected { support, .. } = check_lower_bound(code, d, &EnumOptions::default()).verdict {
            return Some((d - 1, support.len()));
        }
    }
    None
}

/// Returns the failed sub-checks as (row, what).
fn criterion1(lines: &mut Vec<Line>) -> Vec<(String, String)> {
    // (name, n, k, N_XZ2, N6, d)
    let rows: [(&str, usize, usize, usize, (usize, usize), Option<usize>); 6] = [
        ("(3,6) F7", 42, 10, 189, (168, 168), Some(3)),
        ("(3,8) F9", 72, 22, 324, (432, 432), Some(6)),
        ("(3,10) F11", 110, 48, 495, (880, 880), Some(6)),
        ("(3,12) F13", 156, 82, 702, (1560, 1560), Some(3)),
        ("(3,16) F17", 272, 174, 1224, (3808, 3808), Some(6)),
        ("(4,8) F13", 104, 6, 832, (1456, 1456), None),
    ];
    let t = Instant::now();
    let mut failed = Vec::new();
    for (name, n, k, nxz, n6, d) in rows {
        let c = presets::find(name).unwrap().coefficients();
        let b = build_base(&c).unwrap();
        let mut fail = |what: String| failed.push((name.to_string(), what));
        if !matches!(check_orthogonality_certificate(&c), Ok(Ok(()))) {
            fail("orthogonality certificate".into());
        }
        if !matches!(check_4cycle_certificate(&c), Ok(Ok(()))) {
            fail("4-cycle certificate".into());
        }
        if !product_is_zero(&b.hx, &b.hz).unwrap() {
            fail("H_X H_Z^T != 0".into());
        }
        if !verify_4cycles_directly(&b) {
            fail("direct 4-cycle check".into());
        }
        let code = code_of(&b);
        if (code.n(), code.k()) != (n, k) {
            fail(format!("params [[{},{}]] vs [[{n},{k}]]", code.n(), code.k()));
        }
        let cen = census(&b);
        if cen.n_xz2 != nxz || (cen.n6_x, cen.n6_z) != n6 {
            fail(format!("census N_XZ2={} N6=({},{})", cen.n_xz2, cen.n6_x, cen.n6_z));
        }
        let mut dline = String::new();
        if let Some(d) = d {
            let lower = check_lower_bound(&code, d, &EnumOptions::default());
            let upper = check_lower_bound(&code, d + 1, &EnumOptions::default());
            let found_d = matches!(&upper.verdict, LowerBoundVerdict::Rejected { support, .. } if support.len() == d);
            if lower.verdict != LowerBoundVerdict::Accepted || !found_d {
                let measured = measured_distance(&code, 8);
                fail(format!("d={d} not confirmed; measured {measured:?} (distance, logical weight)"));
            }
            dline = format!(" d: {} / {}", lower, upper);
        }
        println!(
            "  {name}: [[{},{}]] N_XZ2={} N6=({},{}){dline}",
            code.n(),
            code.k(),
            cen.n_xz2,
            cen.n6_x,
            cen.n6_z
        );
    }
    let detail = if failed.is_empty() {
        format!("all six base codes reproduced ({:.1}s)", t.elapsed().as_secs_f64())
    } else {
        format!("mismatches {:?} ({:.1}s)", failed, t.elapsed().as_secs_f64())
    };
    report(lines, 1, failed.is_empty(), detail);
    failed
}

// ---- 2 ----

fn criterion2(lines: &mut Vec<Line>) {
    let b = base_of("(3,6) F7");
    let v = b.subgroup_elements().iter().position(|&h| h == 1).unwrap();
    let c = b.column_index(0, 0, v);
    let col = |h: &SparseBinMatrix| h.columns()[c].clone();
    let (x, z) = (col(&b.hx), col(&b.hz));
    let ok = x == vec![0, 8, 17] && z == vec![2, 11, 19];
    report(lines, 2, ok, format!("column (0,0,1) = global {c}: H_X rows {x:?}, H_Z rows {z:?}"));
}

// ---- 3 ----

fn certified(c: &TwoBranchCoefficients) -> bool {
    matches!(check_orthogonality_certificate(c), Ok(Ok(()))) && matches!(check_4cycle_certificate(c), Ok(Ok(())))
}

fn key(c: &TwoBranchCoefficients) -> Vec<u32> {
    [&c.a[0], &c.b[0], &c.a[1], &c.b[1]].iter().flat_map(|v| v.iter().copied()).collect()
}

// images under per-branch translations and a global nonzero scaling
fn expand(f: &Field, c: &TwoBranchCoefficients) -> BTreeSet<Vec<u32>> {
    let mut out = BTreeSet::new();
    for mu in 1..f.q() {
        for t0 in 0..f.q() {
            for t1 in 0..f.q() {
                let map = |v: &[u32], t: u32| v.iter().map(|&x| f.add(f.mul(mu, x), t)).collect::<Vec<_>>();
                let mut k = map(&c.a[0], t0);
                k.extend(map(&c.b[0], t0));
                k.extend(map(&c.a[1], t1));
                k.extend(map(&c.b[1], t1));
                out.insert(k);
            }
        }
    }
    out
}

fn brute_force_f7_j2(f: &Field) -> BTreeSet<Vec<u32>> {
    let q = f.q();
    let mut branch = Vec::new();
    for a0 in 0..q {
        for a1 in 0..q {
            for b0 in 0..q {
                for b1 in 0..q {
                    branch.push([a0, a1, b0, b1]);
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    for x in &branch {
        for y in &branch {
            let c = TwoBranchCoefficients::new(
                f.descriptor().clone(),
                3,
                [vec![x[0], x[1]], vec![y[0], y[1]]],
                [vec![x[2], x[3]], vec![y[2], y[3]]],
            )
            .unwrap();
            if certified(&c) {
                out.insert(key(&c));
            }
        }
    }
    out
}

fn criterion3(lines: &mut Vec<Line>) {
    let t = Instant::now();
    let f = Field::new(7, 1, None).unwrap();
    let j3 = search_coefficients(&f, 3, 3, SearchMode::Exhaustive).unwrap();
    let j3_ok = !j3.is_empty() && j3.iter().all(certified);
    let j2 = search_coefficients(&f, 3, 2, SearchMode::Exhaustive).unwrap();
    let mut expanded = BTreeSet::new();
    for c in &j2 {
        expanded.extend(expand(&f, c));
    }
    let brute = brute_force_f7_j2(&f);
    let ok = j3_ok && expanded == brute;
    report(
        lines,
        3,
        ok,
        format!(
            "J=3: {} normalized candidates, all certified {j3_ok}; J=2: {} normalized -> {} expanded vs {} brute force ({:.1}s)",
            j3.len(),
            j2.len(),
            expanded.len(),
            brute.len(),
            t.elapsed().as_secs_f64()
        ),
    );
}

// ---- 4 ----

fn criterion4(lines: &mut Vec<Line>) {
    let p = hashing_threshold(4108.0 / 10240.0).unwrap();
    let ok = (p - 0.09403285).abs() <= HASH_TOL;
    report(lines, 4, ok, format!("p_hash(4108/10240) = {p:.9} (target 0.09403285, tol {HASH_TOL:e})"));
}

// ---- 5 ----

/// Returns the failure reason if the lift could not be solved.
fn criterion5(lines: &mut Vec<Line>) -> Option<String> {
    let t = Instant::now();
    let b = base_of("(3,6) F7");
    let sys = assemble_system(&b, 8, None).unwrap();
    let forced = liftability_report(&sys).iter().filter(|x| **x == Liftability::ForcedZero).count();
    let outcome = solve_labels(&sys, 1, SolveBudget::default(), SolveMode::Complete);

    // algebra/graph equivalence on random labels
    let mut checked = 0usize;
    let mut agree = true;
    for seed in 0..100 {
        let l = random_labels(&b, 8, seed);
        let s = l.to_vector();
        for side in [Side::X, Side::Z] {
            let h = b.matrix(side);
            let lifted = lift_matrix(h, l.side(side), 8);
            let cols = lifted.columns();
            let forms = sixcycle_forms(&b, side);
            for (cyc, form) in census(&b).cycles(side).iter().zip(&forms) {
                let closes = lifted_walk_closes(&lifted, &cols, 8, cyc);
                agree &= (eval_form(form, &s, 8) == 0) == closes;
                checked += 1;
            }
        }
    }
    let (solved, reason) = match &outcome {
        SolveOutcome::Solved(l) => {
            let code = build_lift(&b, l).unwrap();
            let cert = verify_lift_code(&code, &b, l, None).unwrap();
            (cert.passed(), (!cert.passed()).then(|| format!("labels fail verification:\n{cert}")))
        }
        SolveOutcome::Unsat => (
            false,
            Some(format!(
                "complete search proves no orthogonal labels with all 6-cycle sums nonzero; {forced} forms are forced to zero"
            )),
        ),
        SolveOutcome::BudgetExhausted => (false, Some("budget exhausted".into())),
    };
    let ok = solved && agree;
    report(
        lines,
        5,
        ok,
        format!(
            "P=8 solve: {}; walk equivalence on 100 label sets ({checked} cycles): {} ({:.1}s)",
            reason.clone().unwrap_or_else(|| "solved and verified".into()),
            if agree { "agrees" } else { "DISAGREES" },
            t.elapsed().as_secs_f64()
        ),
    );
    assert!(agree, "walk equivalence must hold regardless of the solve");
    reason.map(|r| format!("{r} [forced={forced}]"))
}

// ---- 6 ----

/// Exhaustive search over coset representatives `f_c` in `0..step` for a
/// zero-syndrome lifted coset support, using only the lifted matrix.
fn exhaustive_closing(hx_lift: &SparseBinMatrix, base_hx: &SparseBinMatrix, t: &[usize], k: &LiftSubgroup) -> Option<Vec<u32>> {
    let p = k.p as usize;
    let cols = base_hx.columns();
    // order columns so each one after the first shares a row with an earlier one
    let mut order = vec![t[0]];
    while order.len() < t.len() {
        let next = t
            .iter()
            .copied()
            .filter(|c| !order.contains(c))
            .find(|&c| cols[c].iter().any(|r| order.iter().any(|o| cols[*o].contains(r))))
            .unwrap_or_else(|| *t.iter().find(|c| !order.contains(c)).unwrap());
        order.push(next);
    }
    // rows checked once their last support column (in order) is placed
    let mut due: Vec<Vec<usize>> = vec![Vec::new(); order.len()];
    let mut rows = BTreeSet::new();
    for &c in t {
        rows.extend(cols[c].iter().copied());
    }
    for r in rows {
        let last = order.iter().rposition(|c| base_hx.row(r).contains(c)).unwrap();
        due[last].push(r);
    }
    let mut f = vec![u32::MAX; base_hx.ncols()];
    fn row_ok(hx: &SparseBinMatrix, r: usize, p: usize, f: &[u32], k: &LiftSubgroup) -> bool {
        (0..p).all(|u| {
            hx.row(r * p + u)
                .iter()
                .filter(|&&col| {
                    let (c, x) = (col / p, (col % p) as u32);
                    f[c] != u32::MAX && (x + k.p - f[c]) % k.step == 0
                })
                .count()
                % 2
                == 0
        })
    }
    fn dfs(
        i: usize,
        order: &[usize],
        due: &[Vec<usize>],
        f: &mut [u32],
        hx: &SparseBinMatrix,
        p: usize,
        k: &LiftSubgroup,
    ) -> bool {
        if i == order.len() {
            return true;
        }
        for v in 0..k.step {
            f[order[i]] = v;
            if due[i].iter().all(|&r| row_ok(hx, r, p, f, k)) && dfs(i + 1, order, due, f, hx, p, k) {
                return true;
            }
        }
        f[order[i]] = u32::MAX;
        false
    }
    dfs(0, &order, &due, &mut f, hx_lift, p, k).then(|| order_values(t, &f))
}

fn order_values(t: &[usize], f: &[u32]) -> Vec<u32> {
    t.iter().map(|&c| f[c]).collect()
}

fn criterion6(lines: &mut Vec<Line>) {
    let t = Instant::now();
    let b = reference::base().unwrap();
    let orbit = reference::orbit(&b).unwrap();
    let k = orbit.k;
    let rows_z = RowSpaceBasis::from_matrix(&b.hz);
    let mut ok = orbit.supports.len() == 20;
    for s in &orbit.supports {
        let v = BitVec::from_indices(b.n(), s);
        ok &= b.hx.mul_vec(&v).unwrap().is_zero() && !rows_z.contains(&v).unwrap();
    }
    let analyses: Vec<_> = orbit
        .supports
        .iter()
        .map(|s| match support_quotient_forms(&b, s, &k).unwrap() {
            SupportAnalysis::Forms(f) => f,
            other => panic!("orbit support unexpectedly {other:?}"),
        })
        .collect();

    // closing labels: orthogonal labels with every cycle form of support 0 pinned to zero
    let target = &analyses[0];
    let mut sys = CongruenceSystem::empty(lift::EdgeIndex::of_base(&b), reference::P);
    sys.zero = assemble_system(&b, reference::P, None).unwrap().zero;
    sys.pinned = target
        .forms
        .iter()
        .map(|f| PinnedForm {
            terms: f.clone(),
            modulus: target.modulus,
            target: 0,
        })
        .collect();
    let closing: LiftLabels = random_orthogonal_labels(&sys, 7).expect("closing labels exist");
    let cs = closing.to_vector();
    let (hx_close, _) = lift::lift_pair(&b, &closing).unwrap();
    let reps = target.closing_representatives(&cs);
    let mut closing_ok = false;
    if let Some(f) = &reps {
        let sup = coset_support(&target.support, f, &k);
        let zero = hx_close.syndrome_of_support(&sup).unwrap().is_zero();
        let found = exhaustive_closing(&hx_close, &b.hx, &target.support, &k).is_some();
        closing_ok = zero && found && sup.len() == 16;
    }
    ok &= closing_ok;

    // accepted labels: every support excluded, confirmed by exhaustive search
    let (_, _, accepted) = reference::labels().unwrap();
    let sa = accepted.to_vector();
    let (hx_acc, _) = lift::lift_pair(&b, &accepted).unwrap();
    let mut excluded = 0;
    let mut exhaustive_none = 0;
    for a in &analyses {
        if a.excluded_by(&sa) {
            excluded += 1;
        }
        if exhaustive_closing(&hx_acc, &b.hx, &a.support, &k).is_none() {
            exhaustive_none += 1;
        }
    }
    ok &= excluded == 20 && exhaustive_none == 20;
    report(
        lines,
        6,
        ok,
        format!(
            "orbit {} supports in ker H_X \\ row(H_Z); closing labels give a weight-16 zero-syndrome lift: {closing_ok}; accepted labels exclude {excluded}/20, exhaustive search finds none for {exhaustive_none}/20 ({:.1}s)",
            orbit.supports.len(),
            t.elapsed().as_secs_f64()
        ),
    );
}

// ---- 7 ----

fn criterion7(lines: &mut Vec<Line>) -> CssCode {
    let t = Instant::now();
    let (b, orbit, labels) = reference::labels().unwrap();
    let code = build_lift(&b, &labels).unwrap();
    let cert = verify_lift_code(&code, &b, &labels, Some(&orbit)).unwrap();
    for l in cert.to_string().lines() {
        println!("  {l}");
    }
    let classes = ["orthogonality", "zero-congruences", "six-cycle-sums-X", "six-cycle-sums-Z", "girth-X", "girth-Z", "orbit-exclusion"];
    let ok = cert.passed() && classes.iter().all(|c| cert.line(c).is_some_and(|l| l.ok));
    report(
        lines,
        7,
        ok,
        format!(
            "64-fold lift [[{}, {}]], k {} the published 4108; certificate {} ({:.1}s)",
            code.n(),
            code.k(),
            if code.k() == 4108 { "agrees with" } else { "DISAGREES with" },
            if cert.passed() { "passes" } else { "fails" },
            t.elapsed().as_secs_f64()
        ),
    );
    code
}

// ---- 8 ----

fn random_css(rng: &mut ChaCha8Rng) -> CssCode {
    loop {
        let n = rng.gen_range(8..=28);
        let rx = rng.gen_range(2..=n / 3);
        let rows: Vec<Vec<usize>> = (0..rx)
            .map(|_| {
                let w = rng.gen_range(2..=6.min(n));
                let mut r: Vec<usize> = (0..w).map(|_| rng.gen_range(0..n)).collect();
                r.sort_unstable();
                r.dedup();
                r
            })
            .collect();
        let hx = SparseBinMatrix::new(n, rows).unwrap();
        let ker = kernel_basis(&hx);
        if ker.is_empty() {
            continue;
        }
        let rz = rng.gen_range(1..=n / 3);
        let mut zrows = Vec::new();
        for _ in 0..rz {
            let mut v = BitVec::zeros(n);
            for _ in 0..rng.gen_range(1..=3) {
                v.xor_assign(&ker[rng.gen_range(0..ker.len())]);
            }
            if !v.is_zero() {
                zrows.push(v.ones());
            }
        }
        if zrows.is_empty() {
            continue;
        }
        let hz = SparseBinMatrix::new(n, zrows).unwrap();
        return CssCode::new(hx, hz).unwrap();
    }
}

// u64 row-space basis for the brute force
fn mask_basis(h: &SparseBinMatrix) -> Vec<u64> {
    let mut basis: Vec<u64> = Vec::new();
    for r in h.rows() {
        let mut v = r.iter().fold(0u64, |m, &c| m | 1 << c);
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis
}

fn in_span(basis: &[u64], mut v: u64) -> bool {
    for &b in basis {
        v = v.min(v ^ b);
    }
    v == 0
}

/// Gray-code walk over all 2^n - 1 nonzero vectors: (min kernel weight,
/// min weight outside the opposite row space).
fn brute_min(check: &SparseBinMatrix, rows: &SparseBinMatrix) -> (Option<usize>, Option<usize>) {
    let n = check.ncols();
    let colmask: Vec<u64> = check
        .columns()
        .iter()
        .map(|c| c.iter().fold(0u64, |m, &r| m | 1 << r))
        .collect();
    let basis = mask_basis(rows);
    let (mut s, mut v) = (0u64, 0u64);
    let (mut kmin, mut lmin) = (None::<usize>, None::<usize>);
    for i in 1u64..(1 << n) {
        let bit = i.trailing_zeros() as usize;
        s ^= colmask[bit];
        v ^= 1 << bit;
        if s == 0 {
            let w = v.count_ones() as usize;
            if kmin.is_none_or(|m| w < m) {
                kmin = Some(w);
            }
            if lmin.is_none_or(|m| w < m) && !in_span(&basis, v) {
                lmin = Some(w);
            }
        }
    }
    (kmin, lmin)
}

fn criterion8(lines: &mut Vec<Line>, code: &CssCode) {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut mismatches = Vec::new();
    let mut queries = 0;
    for trial in 0..50 {
        let c = random_css(&mut rng);
        let brute = [Side::X, Side::Z].map(|s| brute_min(c.logical_kernel_matrix(s), c.checks(s)));
        let both_min = brute.iter().filter_map(|b| b.1).min();
        for d in 1..=c.n() + 1 {
            for (side, (kmin, _)) in [Side::X, Side::Z].into_iter().zip(brute) {
                let check = c.logical_kernel_matrix(side);
                queries += 1;
                let got = min_kernel_weight_below(check, d, SearchBudget::unlimited()).outcome;
                let good = match (&got, kmin) {
                    (KernelSearchOutcome::NoneBelow, None) => true,
                    (KernelSearchOutcome::NoneBelow, Some(w)) => w >= d,
                    (KernelSearchOutcome::Found(v), Some(w)) => {
                        v.len() == w && w < d && check.syndrome_of_support(v).unwrap().is_zero()
                    }
                    _ => false,
                };
                if !good {
                    mismatches.push((trial, Some(side), d, format!("{got:?}"), kmin));
                }
            }
            let lb = check_lower_bound(&c, d, &EnumOptions::default()).verdict;
            let lb_good = match (&lb, both_min) {
                (LowerBoundVerdict::Accepted, None) => true,
                (LowerBoundVerdict::Accepted, Some(w)) => w >= d,
                (LowerBoundVerdict::Rejected { support, .. }, Some(w)) => support.len() == w && w < d,
                _ => false,
            };
            if !lb_good {
                mismatches.push((trial, None, d, format!("{lb:?}"), both_min));
            }
        }
    }
    let oracle_ok = mismatches.is_empty();

    // witnesses: admitted by the pinned reference labels
    let mut wit = Vec::new();
    for side in [Side::X, Side::Z] {
        let rep = check_witness(code, side, &reference::witness_support(side)).unwrap();
        wit.push(format!("{side}: weight {} valid {}", rep.weight, rep.is_valid()));
        if !rep.is_valid() {
            mismatches.push((0, Some(side), 0, "reference witness invalid".into(), None));
        }
    }
    // an unpinned solve need not admit them; report, do not fail
    let b = reference::base().unwrap();
    let o = reference::orbit(&b).unwrap();
    let sys = assemble_system(&b, reference::P, Some(&o)).unwrap();
    if let SolveOutcome::Solved(l) = solve_labels(&sys, 2, SolveBudget::default(), SolveMode::Randomized) {
        let c2 = build_lift(&b, &l).unwrap();
        for side in [Side::X, Side::Z] {
            let rep = check_witness(&c2, side, &reference::witness_support(side)).unwrap();
            if rep.is_valid() {
                println!("  unpinned labels: {side}-witness valid");
            } else {
                println!("  unpinned labels: SKIP {side}-witness (labels do not close its coset support)");
            }
        }
    }
    let ok = oracle_ok && mismatches.is_empty();
    report(
        lines,
        8,
        ok,
        format!(
            "50 random CSS pairs (n<=28), {queries} kernel queries and lower-bound checks at every D vs 2^n brute force: {} mismatches; witnesses [{}] ({:.1}s)",
            mismatches.len(),
            wit.join(", "),
            t.elapsed().as_secs_f64()
        ),
    );
    if !mismatches.is_empty() {
        println!("  first mismatches: {:?}", &mismatches[..mismatches.len().min(5)]);
    }
}

// ---- 9 and 10 ----

fn same_record(a: &FerRecord, b: &FerRecord) -> bool {
    let mut b = b.clone();
    b.seconds = a.seconds;
    *a == b
}

fn damping_neutral(code: &CssCode) -> (bool, f64, usize) {
    let dec = Decoder::new(code, DecoderConfig::default()).unwrap();
    let prior = DepolarizingPrior::new(0.01).unwrap();
    let mut ez = BitVec::zeros(code.n());
    ez.set(5, true);
    let (sx, sz) = syndromes(code, &BitVec::zeros(code.n()), &ez).unwrap();
    let mut m = dec.initial_messages(&prior);
    let mut iters = 0;
    loop {
        let prev = m.clone();
        dec.iterate(&mut m, &sx, &sz, &prior, 0.0);
        iters += 1;
        if m.max_abs_diff(&prev) == 0.0 || iters >= 10_000 {
            break;
        }
    }
    let mut damped = m.clone();
    dec.iterate(&mut damped, &sx, &sz, &prior, 0.3);
    let diff = damped.max_abs_diff(&m);
    (diff <= DAMPING_TOL, diff, iters)
}

fn criterion9(lines: &mut Vec<Line>, f7: &CssCode, lift: &CssCode, f7_records: &[FerRecord]) {
    let t = Instant::now();
    let mut notes = Vec::new();
    let mut ok = true;
    // zero-noise identity
    for (name, code) in [("F7", f7), ("lift", lift)] {
        let dec = Decoder::new(code, DecoderConfig::default()).unwrap();
        let z = BitVec::zeros(code.n());
        let (sx, sz) = syndromes(code, &z, &z).unwrap();
        let out = dec.decode(&sx, &sz, &DepolarizingPrior::new(0.0).unwrap()).unwrap();
        let good = out.iterations == 0 && out.ex.is_zero() && out.ez.is_zero() && out.status == DecodeStatus::BpConverged;
        ok &= good;
        notes.push(format!("zero-noise {name} {good}"));
    }
    // single-error completeness
    let dec = Decoder::new(f7, DecoderConfig::default()).unwrap();
    let prior = DepolarizingPrior::new(0.01).unwrap();
    let mut single_fail = 0;
    for v in 0..f7.n() {
        for side in [Side::X, Side::Z] {
            let (mut ex, mut ez) = (BitVec::zeros(f7.n()), BitVec::zeros(f7.n()));
            match side {
                Side::X => ex.set(v, true),
                Side::Z => ez.set(v, true),
            }
            let (sx, sz) = syndromes(f7, &ex, &ez).unwrap();
            let out = dec.decode(&sx, &sz, &prior).unwrap();
            if coset_qldpc::decode::classify_outcome(f7, &ex, &ez, &out.ex, &out.ez).unwrap() != Verdict::Success {
                single_fail += 1;
            }
        }
    }
    ok &= single_fail == 0;
    notes.push(format!("single errors {}/{} decoded", 2 * f7.n() - single_fail, 2 * f7.n()));
    // syndrome soundness is checked inside every trial of the FER runs; an
    // error there would have aborted them
    let total: u64 = f7_records.iter().map(|r| r.trials).sum();
    ok &= f7_records.iter().all(|r| r.trials == F7_TRIALS);
    notes.push(format!("soundness held on {total} trials"));
    // determinism
    let opts = FerOptions {
        batch: 64,
        ..Default::default()
    };
    let a = run_fer_with(f7, &dec, &[0.06], StopRule::Trials(3000), 99, &opts).unwrap();
    let b = run_fer_with(f7, &dec, &[0.06], StopRule::Trials(3000), 99, &FerOptions { batch: 7, ..opts.clone() }).unwrap();
    let det = same_record(&a[0], &b[0]);
    ok &= det;
    notes.push(format!("determinism across batch sizes {det}"));
    // accounting identity
    let acc = f7_records.iter().chain(&a).all(|r| r.accounting_holds());
    ok &= acc;
    notes.push(format!("accounting identity {acc}"));
    let (neutral, diff, iters) = damping_neutral(f7);
    ok &= neutral;
    notes.push(format!("damping neutrality diff {diff:.1e} after {iters} undamped iterations"));
    report(lines, 9, ok, format!("{} ({:.1}s)", notes.join("; "), t.elapsed().as_secs_f64()));
}

fn criterion10(lines: &mut Vec<Line>, records: &[FerRecord], lift: &CssCode) {
    let t = Instant::now();
    for r in records {
        println!(
            "  F7 p={} trials={} failures={} FER={:.4e} CI=[{:.4e}, {:.4e}] corrections={:?}",
            r.p, r.trials, r.failures, r.fer, r.ci_low, r.ci_high, r.rule_corrections
        );
    }
    let increasing = records.windows(2).all(|w| w[0].fer < w[1].fer && w[0].ci_high < w[1].ci_low);
    let dec = Decoder::new(lift, DecoderConfig::default()).unwrap();
    let opts = FerOptions {
        batch: 1,
        ..Default::default()
    };
    let stop = StopRule::Failures {
        target: 1,
        max_trials: LIFT_TRIALS,
    };
    let rec = run_fer_with(lift, &dec, &[0.09], stop, 10, &opts).unwrap();
    let r = &rec[0];
    println!(
        "  lift p=0.09: failure after {} trial(s) (cap {LIFT_TRIALS}), bp failures {}, {:.1}s",
        r.trials, r.bp_failures, r.seconds
    );
    let above = r.failures > 0;
    let mut all = records.to_vec();
    all.push(r.clone());
    let refs = ReferenceLines::for_rate(lift.rate()).unwrap();
    let plot = parse_plot_data(&emit_plot_data(&all, &refs)).unwrap();
    let plotted = plot.rows.len() == 4
        && plot.refs.published_points.contains(&(0.058, 1.0e-7))
        && (plot.refs.p_hash - 0.09403285).abs() <= HASH_TOL;
    report(
        lines,
        10,
        increasing && above && plotted,
        format!(
            "F7 FER strictly increasing with disjoint 95% intervals: {increasing}; 64-fold lift at p=0.09 fails within the 10^6-trial cap: {above}; plot data carries p_hash and the published (0.058, 1.0e-7) point: {plotted} ({:.1}s)",
            t.elapsed().as_secs_f64()
        ),
    );
}

#[test]
fn acceptance() {
    let start = Instant::now();
    let mut lines = Vec::new();
    let c1 = criterion1(&mut lines);
    criterion2(&mut lines);
    criterion3(&mut lines);
    criterion4(&mut lines);
    let c5 = criterion5(&mut lines);
    criterion6(&mut lines);
    let lift = criterion7(&mut lines);
    criterion8(&mut lines, &lift);

    let f7 = code_of(&base_of("(3,6) F7"));
    let dec = Decoder::new(&f7, DecoderConfig::default()).unwrap();
    let t = Instant::now();
    let f7_records = run_fer_with(
        &f7,
        &dec,
        &[0.02, 0.05, 0.08],
        StopRule::Trials(F7_TRIALS),
        2024,
        &FerOptions {
            batch: 1024,
            ..Default::default()
        },
    )
    .expect("every trial is syndrome-sound");
    println!("  F7 FER runs: {:.1}s", t.elapsed().as_secs_f64());
    criterion9(&mut lines, &f7, &lift, &f7_records);
    criterion10(&mut lines, &f7_records, &lift);

    say(&format!("---- acceptance summary ({:.0}s) ----", start.elapsed().as_secs_f64()));
    for l in &lines {
        say(&format!("{} {:>2}: {}", if l.pass { "PASS" } else { "FAIL" }, l.id, l.detail));
    }

    // Known, documented failures: the expected d=3 of the two J=3 codes
    // where every logical has even weight, and the P=8 lift of a base with
    // forced 6-cycle forms.
    let expected_c1: BTreeSet<&str> = ["(3,6) F7", "(3,12) F13"].into();
    for (row, what) in &c1 {
        assert!(
            expected_c1.contains(row.as_str()) && what.starts_with("d=3 not confirmed; measured Some((4, 4))"),
            "unexpected criterion 1 failure: {row}: {what}"
        );
    }
    let reason = c5.as_deref().unwrap_or("");
    assert!(
        c5.is_none() || (reason.starts_with("complete search proves") && reason.contains("forced=84")),
        "unexpected criterion 5 outcome: {reason}"
    );
    for l in &lines {
        if l.id != 1 && l.id != 5 {
            assert!(l.pass, "criterion {} failed: {}", l.id, l.detail);
        }
    }
}

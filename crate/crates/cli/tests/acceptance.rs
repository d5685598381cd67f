//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use posmap::choi::{assemble, blocks, choi_from_map, BlockDecomposition};
use posmap::decompose::{
    dykstra_decompose, random_boundary_map, random_face_map, uniqueness_probe, verify_decomposition,
    DecompositionResult, Interpretation,
};
use posmap::linalg::{eig_hermitian, min_eig, partial_transpose, ComplexMatrix, C64};
use posmap::positivity::{
    check_choi22, check_lemma24_ccp, check_lemma24_cp, check_prop21, check_yz_bound, is_block_positive_scan,
    nier1_holds, search_nier1_violation,
};
use posmap::random::{self, stream_rng};
use posmap::{find_margin, Margin, ToleranceConfig};
use rand::Rng;

const GRID: usize = 2000;
const BAND: f64 = 1e-6;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn scan(h: &ComplexMatrix, tol: &ToleranceConfig) -> f64 {
    is_block_positive_scan(h, GRID, tol).unwrap().margin
}

/// Slack drawn uniformly from `[lo, 1]` on a dedicated stream.
fn slack(seed: u64, lo: f64) -> f64 {
    stream_rng(seed, 7).random_range(lo..=1.0)
}

fn eigensolver() -> Outcome {
    let t0 = Instant::now();
    let mut worst: f64 = 0.0;
    for seed in 0..1000u64 {
        let side = 2 + (seed % 11) as usize;
        let a = random::hermitian(&mut random::rng(seed), side);
        let e = eig_hermitian(&a, 1e-12).unwrap();
        let v = &e.eigenvectors;
        let rec = e.recompose(|x| x).distance(&a) / a.frobenius_norm();
        let orth = (&v.adjoint() * v).distance(&ComplexMatrix::identity(side));
        worst = worst.max(rec).max(orth);
    }
    let t = t0.elapsed();
    check(
        worst <= 1e-10 && t < Duration::from_secs(10),
        format!("1000 matrices, worst relative error {worst:.2e}, {t:.2?}"),
    )
}

fn pt_involution() -> Outcome {
    let mut bad = 0;
    for seed in 0..1000u64 {
        let h = random::hermitian(&mut random::rng(seed), 6);
        let back = partial_transpose(&partial_transpose(&h, 3).unwrap(), 3).unwrap();
        if back.as_slice() != h.as_slice() {
            bad += 1;
        }
    }
    check(bad == 0, format!("1000 matrices, {bad} not bit-exact"))
}

struct Tally {
    agree: usize,
    banded: usize,
    /// Scan positive, some inequality violated.
    necessity: usize,
    /// Scan negative, all inequalities hold.
    sufficiency: usize,
}

fn tally_choi22(hs: impl Iterator<Item = ComplexMatrix>, tol: &ToleranceConfig) -> Tally {
    let mut t = Tally {
        agree: 0,
        banded: 0,
        necessity: 0,
        sufficiency: 0,
    };
    for h in hs {
        let s = scan(&h, tol);
        let ms = check_choi22(&blocks(&h, tol).unwrap(), tol).unwrap();
        let low = ms.iter().map(|m| m.value.unwrap()).fold(f64::INFINITY, f64::min);
        let scan_positive = s >= -tol.pos_tol;
        if low.abs() <= BAND || (!scan_positive && s > -BAND) {
            t.banded += 1;
        } else if scan_positive == (low > 0.0) {
            t.agree += 1;
        } else if scan_positive {
            t.necessity += 1;
        } else {
            t.sufficiency += 1;
        }
    }
    t
}

fn two_by_two() -> Outcome {
    let tol = ToleranceConfig::default();
    let positive = (0..500u64).map(|seed| choi_from_map(&random_face_map(seed, 1, slack(seed, 0.0), &tol).unwrap()));
    let t = tally_choi22(positive, &tol);
    // Face-form matrices with shrunk off-diagonal blocks: both verdicts occur.
    let mixed = (0..500u64).map(|seed| {
        let mut rng = random::rng(seed);
        let mut d = blocks(&random::face_form_choi(&mut rng, 1), &tol).unwrap();
        let f: f64 = rng.random_range(0.0..1.0);
        d.c = d.c.scale(f);
        d.y = d.y.scale(f);
        d.z = d.z.scale(f);
        d.t = d.t.scale(f);
        assemble(&d).unwrap()
    });
    let m = tally_choi22(mixed, &tol);
    check(
        t.necessity + t.sufficiency == 0 && m.necessity == 0,
        format!(
            "500 sampled positive maps: {} agree, {} in band, {} hard disagreements; \
             mixed population: {} agree, {} in band, {} positive maps failing an inequality, \
             {} non-positive maps passing all three (not asserted)",
            t.agree,
            t.banded,
            t.necessity + t.sufficiency,
            m.agree,
            m.banded,
            m.necessity,
            m.sufficiency
        ),
    )
}

fn necessary_conditions() -> Outcome {
    let tol = ToleranceConfig::default();
    let mut worst = f64::INFINITY;
    let mut not_positive = 0;
    for seed in 0..200u64 {
        let h = choi_from_map(&random_face_map(seed, 2, slack(seed, 0.0), &tol).unwrap());
        if scan(&h, &tol) < -tol.pos_tol {
            not_positive += 1;
        }
        let d = blocks(&h, &tol).unwrap();
        let mut ms = check_prop21(&d, GRID, &tol);
        ms.push(check_yz_bound(&d, &tol).unwrap());
        for m in ms {
            if let Some(v) = m.value {
                worst = worst.min(v);
            }
        }
    }
    check(
        worst >= -1e-8 && not_positive == 0,
        format!("200 samples, lowest margin {worst:.3e}, {not_positive} failed the scan"),
    )
}

/// Adds a random perturbation to `T`, `Y` or `T` and `Z`, growing it until
/// the scan margin drops to `-1e-3`.
fn perturbed(seed: u64, tol: &ToleranceConfig) -> (BlockDecomposition, f64) {
    let h = choi_from_map(&random_face_map(seed, 2, (seed % 10) as f64 / 10.0, tol).unwrap());
    let base = blocks(&h, tol).unwrap();
    let mut rng = stream_rng(seed, 99);
    let g = random::gaussian_matrix(&mut rng, 2, 2);
    let gy = random::gaussian_matrix(&mut rng, 1, 2);
    let mut s = 0.02;
    loop {
        let mut d = base.clone();
        match seed % 3 {
            0 => d.t = &base.t + &g.scale(s),
            1 => d.y = &base.y + &gy.scale(s),
            _ => {
                d.t = &base.t + &g.scale(s);
                d.z = &base.z + &gy.scale(s);
            }
        }
        let m = scan(&assemble(&d).unwrap(), tol);
        if m <= -1e-3 {
            return (d, m);
        }
        s *= 1.3;
    }
}

fn witness_cross_validation() -> Outcome {
    let tol = ToleranceConfig::default();
    let mut false_alarms = 0;
    for seed in 0..100u64 {
        let h = choi_from_map(&random_face_map(seed, 2, slack(seed, 0.0), &tol).unwrap());
        let d = blocks(&h, &tol).unwrap();
        if search_nier1_violation(&d, 10_000, seed, &tol).is_some() {
            false_alarms += 1;
        }
    }
    let mut found = 0;
    let mut unsound = 0;
    for seed in 0..100u64 {
        let (d, _) = perturbed(seed, &tol);
        if let Some(w) = search_nier1_violation(&d, 10_000, seed, &tol) {
            found += 1;
            if nier1_holds(&d, &w).unwrap() >= 0.0 {
                unsound += 1;
            }
        }
    }
    check(
        false_alarms == 0 && found >= 95 && unsound == 0,
        format!(
            "positive: {false_alarms}/100 with a witness; perturbed: {found}/100 refuted, {unsound} witnesses failed re-verification"
        ),
    )
}

fn redundancy(ms: &[Margin], lead: &str, rest: [&str; 3]) -> Option<bool> {
    if !find_margin(ms, lead).unwrap().passed() {
        return None;
    }
    Some(rest.iter().all(|name| find_margin(ms, name).unwrap().value.is_none_or(|v| v >= -1e-8)))
}

fn cp_ccp_redundancy() -> Outcome {
    let tol = ToleranceConfig::default();
    let (mut cp_ok, mut cp_led, mut ccp_ok, mut ccp_led) = (0, 0, 0, 0);
    for seed in 0..100u64 {
        let n = 1 + (seed % 3) as usize;
        let mut rng = random::rng(seed);
        let cp = blocks(&random::cp_face_choi(&mut rng, n), &tol).unwrap();
        if let Some(ok) = redundancy(&check_lemma24_cp(&cp, &tol), "A2", ["A3", "A4", "A5"]) {
            cp_led += 1;
            cp_ok += ok as usize;
        }
        let ccp = blocks(&random::ccp_face_choi(&mut rng, n), &tol).unwrap();
        if let Some(ok) = redundancy(&check_lemma24_ccp(&ccp, &tol), "B2", ["B3", "B4", "B5"]) {
            ccp_led += 1;
            ccp_ok += ok as usize;
        }
    }
    check(
        cp_ok == cp_led && ccp_ok == ccp_led && cp_led == 100 && ccp_led == 100,
        format!("CP: lead condition held on {cp_led}/100, derived conditions followed on {cp_ok}; co-CP: lead condition held on {ccp_led}/100, derived conditions followed on {ccp_ok}"),
    )
}

fn decomposability() -> Outcome {
    let tol = ToleranceConfig::default();
    let t0 = Instant::now();
    let (mut converged, mut verified, mut max_iter) = (0, 0, 0);
    let mut failures = Vec::new();
    for seed in 0..200u64 {
        let h = choi_from_map(&random_face_map(seed, 2, slack(seed, 0.05), &tol).unwrap());
        let r = dykstra_decompose(&h, 50_000, 1e-8, None).unwrap();
        max_iter = max_iter.max(r.iterations);
        converged += r.converged as usize;
        if r.converged && verify_decomposition(&h, &r, &tol).iter().all(Margin::passed) {
            verified += 1;
        } else {
            failures.push(seed);
        }
    }
    let t = t0.elapsed();
    check(
        converged == 200 && verified == 200 && t < Duration::from_secs(300),
        format!(
            "{converged}/200 converged, {verified}/200 verified, most iterations {max_iter}, {t:.1?}, failing seeds {failures:?}"
        ),
    )
}

fn splitting(h1: ComplexMatrix, h: &ComplexMatrix) -> DecompositionResult {
    DecompositionResult {
        h2: h - &h1,
        h1,
        residual: 0.0,
        iterations: 0,
        converged: true,
        cp_margin: f64::NAN,
        ppt_margin: f64::NAN,
        likely_non_decomposable: false,
        reduced_directions: 0,
        step_norms: Vec::new(),
    }
}

/// Largest `δ ∈ [0, 1]` keeping `f(δ) ≥ min(f(0), 0) − 1e-12`, by
/// bisection; `f` is the smallest eigenvalue of the donor part, so a part
/// that starts on its cone boundary to rounding may stay there.
fn largest_shift(f: impl Fn(f64) -> f64) -> f64 {
    let floor = f(0.0).min(0.0) - 1e-12;
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if f(mid) >= floor {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// A second splitting of `h`, moving `δ E₁₁` between the parts of `first`.
/// `E₁₁` is fixed by the partial transpose, so both cones allow the move as
/// long as the part giving it up keeps its own membership.
fn second_splitting(h: &ComplexMatrix, first: &DecompositionResult) -> (DecompositionResult, f64) {
    let k = h.rows() / 2;
    let e00 = ComplexMatrix::from_fn(h.rows(), h.rows(), |i, j| C64::new((i == 0 && j == 0) as u8 as f64, 0.0));
    let from_cp = largest_shift(|d| min_eig(&(&first.h1 - &e00.scale(d)), 1e-10).unwrap());
    let h2g = partial_transpose(&first.h2, k).unwrap();
    let from_ccp = largest_shift(|d| min_eig(&(&h2g - &e00.scale(d)), 1e-10).unwrap());
    let (delta, sign) = if from_cp >= from_ccp { (from_cp, -1.0) } else { (from_ccp, 1.0) };
    let delta = 0.5 * delta;
    (splitting(&first.h1 + &e00.scale(sign * delta), h), delta)
}

/// `vv*` for a Schmidt-rank-two `v ∈ ℂ² ⊗ ℂ³`, with the smallest eigenvalue
/// of its partial transpose, which is `−s₁s₂` for Schmidt coefficients `s₁, s₂`.
fn pure_state(seed: u64) -> (ComplexMatrix, f64) {
    let mut rng = random::rng(1000 + seed);
    let a = random::unitary(&mut rng, 2);
    let b = random::unitary(&mut rng, 3);
    let s = [0.8f64.sqrt(), 0.2f64.sqrt()];
    let v: Vec<C64> = (0..6)
        .map(|idx| {
            let (i, r) = (idx / 3, idx % 3);
            (0..2).map(|j| a[(i, j)] * b[(r, j)] * s[j]).sum()
        })
        .collect();
    (ComplexMatrix::outer(&v), -s[0] * s[1])
}

/// `H − X` fails to be PSD for 50 sampled PPT matrices `X = P^Γ`, `P ⪰ 0`,
/// of norm `10⁻³‖H‖`.
fn dominates_no_ppt_part(h: &ComplexMatrix, seed: u64) -> bool {
    let mut rng = stream_rng(seed, 5);
    (0..50).all(|_| {
        let rank = rng.random_range(1..=6);
        let x = partial_transpose(&random::psd(&mut rng, 6, rank), 3).unwrap();
        let x = x.scale(1e-3 * h.frobenius_norm() / x.frobenius_norm());
        min_eig(&(h - &x), 1e-10).unwrap() < 0.0
    })
}

fn probe_calibration() -> Outcome {
    let tol = ToleranceConfig::default();
    let feas = 1e-8;
    let mut certified = 0;
    let mut constructed = 0;
    let mut min_delta = f64::INFINITY;
    for seed in 0..20u64 {
        let h = choi_from_map(&random_face_map(seed, 2, 1.0, &tol).unwrap());
        let first = dykstra_decompose(&h, 50_000, feas, None).unwrap();
        let (second, delta) = second_splitting(&h, &first);
        let both_valid = first.converged
            && verify_decomposition(&h, &first, &tol).iter().all(Margin::passed)
            && verify_decomposition(&h, &second, &tol).iter().all(Margin::passed);
        if both_valid && second.h1.distance(&first.h1) > 100.0 * feas {
            constructed += 1;
        }
        min_delta = min_delta.min(delta);
        let r = uniqueness_probe(&h, 8, seed, 50_000, feas, &tol).unwrap();
        certified += (r.interpretation == Interpretation::NonUniqueCertified) as usize;
    }

    let mut singletons = 0;
    let mut oracle_ok = 0;
    let mut worst: f64 = 0.0;
    for seed in 0..20u64 {
        let (h, expected) = pure_state(seed);
        let lmin = min_eig(&partial_transpose(&h, 3).unwrap(), 1e-10).unwrap();
        oracle_ok += ((lmin - expected).abs() <= 1e-10 && dominates_no_ppt_part(&h, seed)) as usize;
        let r = uniqueness_probe(&h, 8, seed, 50_000, feas, &tol).unwrap();
        worst = worst.max(r.diameter_estimate);
        singletons += (r.converged_starts() >= 2 && r.diameter_estimate <= 10.0 * feas) as usize;
    }

    let mut boundary = [0usize; 4];
    for seed in 0..5u64 {
        let h = choi_from_map(&random_boundary_map(seed, &tol).unwrap());
        let r = uniqueness_probe(&h, 8, seed, 50_000, feas, &tol).unwrap();
        boundary[match r.interpretation {
            Interpretation::ConsistentWithUniqueness => 0,
            Interpretation::NonUniqueCertified => 1,
            Interpretation::Inconclusive => 2,
            Interpretation::InsufficientSamples => 3,
        }] += 1;
    }
    check(
        certified >= 18 && constructed == 20 && singletons == 20 && oracle_ok == 20,
        format!(
            "interior: second splitting built for {constructed}/20 (smallest shift {min_delta:.2e}), certified {certified}/20; \
             pure states: oracle {oracle_ok}/20, diameter <= 1e-7 for {singletons}/20 (largest {worst:.2e}); \
             boundary stratum, reported only: {} consistent, {} certified, {} inconclusive, {} insufficient",
            boundary[0], boundary[1], boundary[2], boundary[3]
        ),
    )
}

fn run_cli(args: &[&str], dir: &Path) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_posmap"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn pipeline(seed: u64, dir: &Path) -> Result<Vec<Vec<u8>>, String> {
    let s = seed.to_string();
    let sl = format!("{:.3}", slack(seed, 0.05));
    let steps: [&[&str]; 4] = [
        &["random", "--seed", &s, "--slack", &sl, "--n", "2", "--out", "m.json"],
        &["--json", "check", "m.json"],
        &["--json", "decompose", "m.json"],
        &["--json", "verify", "m.json", "m.cp.json", "m.ccp.json"],
    ];
    let mut out = Vec::new();
    for args in steps {
        let (code, stdout) = run_cli(args, dir);
        if code != 0 {
            return Err(format!("seed {seed}: `{}` exited {code}", args.join(" ")));
        }
        out.push(stdout);
    }
    let report: serde_json::Value = serde_json::from_slice(&out[3]).unwrap();
    if !report["verification"].as_array().unwrap().iter().all(|m| m["passed"] == true) {
        return Err(format!("seed {seed}: verification failed"));
    }
    for f in ["m.json", "m.cp.json", "m.ccp.json"] {
        out.push(std::fs::read(dir.join(f)).unwrap());
    }
    Ok(out)
}

fn cli_determinism() -> Outcome {
    let mut ok = 0;
    let mut errors = Vec::new();
    for seed in 0..50u64 {
        let dir = tempfile::TempDir::new().unwrap();
        let first = pipeline(seed, dir.path());
        let second = pipeline(seed, dir.path());
        match (first, second) {
            (Ok(a), Ok(b)) if a == b => ok += 1,
            (Ok(_), Ok(_)) => errors.push(format!("seed {seed}: output differs on repeat")),
            (Err(e), _) | (_, Err(e)) => errors.push(e),
        }
    }
    check(ok == 50, format!("{ok}/50 pipelines identical on repeat {errors:?}"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("eigensolver", eigensolver),
        ("partial transpose involution", pt_involution),
        ("2x2 inequalities vs Bloch scan", two_by_two),
        ("necessary conditions on positive face maps", necessary_conditions),
        ("witness search vs Bloch scan", witness_cross_validation),
        ("CP / co-CP condition redundancy", cp_ccp_redundancy),
        ("decomposability of positive maps M2 -> M3", decomposability),
        ("uniqueness probe calibration", probe_calibration),
        ("CLI pipeline determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let t0 = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let t = t0.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail} [{t:.1?}]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail} [{t:.1?}]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

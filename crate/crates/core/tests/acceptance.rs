//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints one PASS/FAIL line; exits non-zero if any fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use qsl_core::engine::{
    action, analytic_bounds, conj_min_time, gate_time, orthogonalizer, AnalyticBound, Trajectory,
};
use qsl_core::geom::{check_ad_invariance, survey_geodesic_vectors};
use qsl_core::matcore::{haar_su, principal_log, AlgebraElement, ComplexMatrix, Sampler, UnitaryGate};
use qsl_core::phfun::{evaluate, ConstraintLevel, PHFunctionSpec, RandersData, StateVector};
use qsl_core::Tolerances;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn kappa(k: f64) -> ConstraintLevel {
    ConstraintLevel::new(k).unwrap()
}

fn ket0(n: usize) -> StateVector {
    StateVector::basis(n, 0).unwrap()
}

/// Orthogonalizer times against the closed form `expected(κ)`, over
/// several phases, `κ` values and `N ∈ {2, 3, 4}`.
fn bound_sweep(
    name: &str,
    make: impl Fn(usize) -> PHFunctionSpec,
    bound: AnalyticBound,
    expected: impl Fn(f64) -> f64,
) -> Result<(f64, usize), String> {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for n in 2..=4 {
        let f = make(n);
        for theta in [0.0, 0.7, PI / 3.0, 2.5] {
            for k in [1.0, 0.35, 2.75] {
                let o = orthogonalizer(theta, n).unwrap();
                let t = gate_time(&f, kappa(k), &o, 2).map_err(|e| format!("{name} N={n}: {e}"))?;
                let closed = expected(k);
                let table = analytic_bounds(bound, k).unwrap();
                let err = (t.time - closed).abs().max((table - closed).abs());
                worst = worst.max(err);
                cases += 1;
                ensure(err < 1e-9, || {
                    format!("{name} N={n} theta={theta} kappa={k}: time {} vs {closed}", t.time)
                })?;
            }
        }
    }
    Ok((worst, cases))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut cases = 0;
    for p in [1.0, 2.0, 3.0] {
        let (w, c) = bound_sweep(
            &format!("ml({p})"),
            |n| PHFunctionSpec::ml(p, ket0(n)).unwrap(),
            AnalyticBound::Ml { p },
            |k| PI / (2f64.powf(1.0 / p) * k),
        )?;
        worst = worst.max(w);
        cases += c;
    }
    let elapsed = start.elapsed().as_secs_f64();
    ensure(elapsed < 1.0, || format!("took {elapsed:.3} s"))?;
    Ok(format!("{cases} cases, max error {worst:.2e}, {elapsed:.3} s"))
}

fn criterion_2() -> Outcome {
    let (worst, cases) = bound_sweep(
        "mt",
        |n| PHFunctionSpec::mt(ket0(n)),
        AnalyticBound::Mt,
        |k| PI / (2.0 * k),
    )?;
    Ok(format!("{cases} cases, max error {worst:.2e}"))
}

fn criterion_3() -> Outcome {
    let (worst, cases) = bound_sweep("op_shifted", |_| PHFunctionSpec::OpShifted, AnalyticBound::Opnorm, |k| PI / k)?;
    Ok(format!("{cases} cases, max error {worst:.2e}"))
}

fn invariant_family() -> Vec<PHFunctionSpec> {
    let s = |p: f64| PHFunctionSpec::schatten(p).unwrap();
    vec![
        s(1.0),
        s(2.0),
        s(3.0),
        s(f64::INFINITY),
        PHFunctionSpec::OpShifted,
        PHFunctionSpec::sum(s(1.0), PHFunctionSpec::OpShifted).unwrap(),
        PHFunctionSpec::max(s(2.0), s(f64::INFINITY)).unwrap(),
        PHFunctionSpec::min(s(3.0), PHFunctionSpec::OpShifted).unwrap(),
        PHFunctionSpec::powmean(2.0, s(1.0), PHFunctionSpec::OpShifted).unwrap(),
    ]
}

fn non_invariant_family(n: usize) -> Vec<PHFunctionSpec> {
    let d = n * n - 1;
    let psi = StateVector::normalized(DVector::from_fn(n, |k, _| Complex64::new(1.0 + k as f64, 0.5 * k as f64))).unwrap();
    let b = DVector::from_fn(d, |k, _| 0.4 / (d as f64).sqrt() * if k % 2 == 0 { 1.0 } else { -0.5 });
    vec![
        PHFunctionSpec::ml(1.0, ket0(n)).unwrap(),
        PHFunctionSpec::ml(2.0, psi.clone()).unwrap(),
        PHFunctionSpec::mt(ket0(n)),
        PHFunctionSpec::mt(psi),
        PHFunctionSpec::randers(RandersData::with_identity_metric(n, b).unwrap()),
    ]
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let tol = Tolerances::default();
    let mut checked = 0;
    for n in [2usize, 3] {
        for f in invariant_family() {
            let survey = survey_geodesic_vectors(&f, n, 50, 11, tol.fd_step, tol.geodesic).map_err(|e| e.to_string())?;
            ensure(survey.all_pass(), || {
                format!(
                    "{} N={n}: {}/50 geodesic, worst {:.2e}",
                    f.label(),
                    survey.passed,
                    survey.max_normalized
                )
            })?;
            let inv = check_ad_invariance(&f, n, 200, 11).map_err(|e| e.to_string())?;
            ensure(inv.ad_invariant, || format!("{} N={n}: not classified Ad-invariant", f.label()))?;
            checked += 1;
        }
        for f in non_invariant_family(n) {
            let survey = survey_geodesic_vectors(&f, n, 200, 11, tol.fd_step, tol.geodesic).map_err(|e| e.to_string())?;
            ensure(survey.first_failure.is_some(), || {
                format!("{} N={n}: no failing X in 200 samples", f.label())
            })?;
            let inv = check_ad_invariance(&f, n, 200, 11).map_err(|e| e.to_string())?;
            ensure(!inv.ad_invariant, || format!("{} N={n}: classified Ad-invariant", f.label()))?;
            checked += 1;
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    ensure(elapsed < 60.0, || format!("took {elapsed:.1} s"))?;
    Ok(format!("{checked} constraints, {elapsed:.2} s"))
}

/// Eigenphases from a complex Schur form, independent of the library's solver.
fn schur_phases(o: &UnitaryGate) -> Vec<f64> {
    let eig = o.matrix().inner().clone().schur().eigenvalues().expect("complex Schur eigenvalues");
    eig.iter().map(|z| z.im.atan2(z.re)).collect()
}

/// Minimum of `sqrt(Σ φ_k²)` over `φ_k = θ_k + 2π n_k`, `|n_k| <= bound`, `Σ φ_k = 0`.
fn brute_force_frobenius(theta: &[f64], bound: i64) -> f64 {
    let n = theta.len();
    let mut best = f64::INFINITY;
    let mut shifts = vec![-bound; n];
    loop {
        let phases: Vec<f64> = theta.iter().zip(&shifts).map(|(t, &s)| t + 2.0 * PI * s as f64).collect();
        if phases.iter().sum::<f64>().abs() < 1e-6 {
            best = best.min(phases.iter().map(|p| p * p).sum::<f64>().sqrt());
        }
        let mut k = 0;
        while k < n && shifts[k] == bound {
            shifts[k] = -bound;
            k += 1;
        }
        if k == n {
            return best;
        }
        shifts[k] += 1;
    }
}

fn criterion_5() -> Outcome {
    let f = PHFunctionSpec::schatten(2.0).unwrap();
    let mut worst = 0.0f64;
    for n in [2usize, 3] {
        for i in 0..50u64 {
            let o = haar_su(n, 1000 + i);
            let t = gate_time(&f, kappa(1.0), &o, 3).map_err(|e| e.to_string())?;
            let log = principal_log(&o).map_err(|e| e.to_string())?;
            let principal = evaluate(&f, &log.value).unwrap();
            let brute = brute_force_frobenius(&schur_phases(&o), 3);
            let err = (t.time - principal).abs().max((t.time - brute).abs());
            worst = worst.max(err);
            ensure(err < 1e-10, || {
                format!("N={n} gate {i}: time {} principal {principal} brute force {brute}", t.time)
            })?;
            ensure(t.branch.shifts == log.shifts, || format!("N={n} gate {i}: non-principal branch chosen"))?;
        }
    }
    Ok(format!("100 gates, max error {worst:.2e}"))
}

/// `H(s) = A + sB + s²C` on `[0, 1]`.
struct Curve {
    a: ComplexMatrix,
    b: ComplexMatrix,
    c: ComplexMatrix,
}

impl Curve {
    fn at(&self, s: f64, speed: f64) -> ComplexMatrix {
        let m = self.a.inner() + self.b.inner() * Complex64::from(s) + self.c.inner() * Complex64::from(s * s);
        ComplexMatrix::new(m * Complex64::from(speed)).unwrap()
    }
}

/// `φ(τ) = w(u(τ/T))` with `u(x) = x + a sin(2πkx)/(2πk)` and
/// `w(x) = (e^{cx} - 1)/(e^c - 1)`; returns `(φ, φ')`.
fn reparam(a: f64, k: f64, c: f64, total: f64) -> impl Fn(f64) -> (f64, f64) {
    move |tau| {
        let x = tau / total;
        let w = 2.0 * PI * k;
        let u = x + a * (w * x).sin() / w;
        let du = (1.0 + a * (w * x).cos()) / total;
        let denom = c.exp_m1();
        ((c * u).exp_m1() / denom, c * (c * u).exp() / denom * du)
    }
}

fn criterion_6() -> Outcome {
    let n = 3;
    let mut sampler = Sampler::new(2024);
    let curve = Curve {
        a: sampler.algebra(n).hamiltonian(),
        b: sampler.algebra(n).hamiltonian(),
        c: sampler.algebra(n).hamiltonian().scale_real(0.5),
    };
    let constraints = [
        PHFunctionSpec::sum(PHFunctionSpec::schatten(2.0).unwrap(), PHFunctionSpec::mt(ket0(n))).unwrap(),
        PHFunctionSpec::ml(2.0, ket0(n)).unwrap(),
    ];
    let reference_traj = Trajectory::uniform(1.0, 1001, |s| curve.at(s, 1.0)).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for f in &constraints {
        let reference = action(f, &reference_traj).map_err(|e| e.to_string())?;
        for _ in 0..5 {
            let a = 1.6 * sampler.uniform() - 0.8;
            let k = (1.0 + 3.0 * sampler.uniform()).floor();
            let c = if sampler.uniform() < 0.5 { -1.0 } else { 1.0 } * (0.3 + 2.0 * sampler.uniform());
            let total = 0.5 + 2.5 * sampler.uniform();
            let phi = reparam(a, k, c, total);
            let traj = Trajectory::uniform(total, 1001, |tau| {
                let (s, ds) = phi(tau);
                curve.at(s, ds)
            })
            .map_err(|e| e.to_string())?;
            let value = action(f, &traj).map_err(|e| e.to_string())?;
            let rel = (value - reference).abs() / reference;
            worst = worst.max(rel);
            ensure(rel < 1e-6, || {
                format!("{}: action {value} vs {reference} (a={a}, k={k}, c={c}, T={total})", f.label())
            })?;
        }
    }
    Ok(format!("10 reparameterizations, max relative error {worst:.2e}"))
}

/// su(2) coordinates of `X` in the basis `iσ_k/√2`, from Pauli traces.
fn pauli_coordinates(x: &AlgebraElement) -> [f64; 3] {
    let m = x.matrix().inner();
    let i = Complex64::i();
    let traces = [m[(1, 0)] + m[(0, 1)], -i * m[(1, 0)] + i * m[(0, 1)], m[(0, 0)] - m[(1, 1)]];
    traces.map(|t| {
        let c = -i * t / 2f64.sqrt();
        assert!(c.im.abs() < 1e-12);
        c.re
    })
}

/// Grid minimum of `sqrt(cᵀ diag(w) c)` over `c ↦ R_z(α) R_y(β) R_z(γ) c`,
/// step 0.01 rad in each Euler angle.
fn randers_grid_minimum(c: [f64; 3], w: [f64; 3]) -> f64 {
    let step = 0.01;
    let full: Vec<(f64, f64)> = (0..629).map(|k| ((k as f64 * step).cos(), (k as f64 * step).sin())).collect();
    let half: Vec<(f64, f64)> = (0..=315)
        .map(|k| ((k as f64 * step).min(PI).cos(), (k as f64 * step).min(PI).sin()))
        .collect();
    let mut best = f64::INFINITY;
    for &(cg, sg) in &full {
        let (x1, y1, z1) = (cg * c[0] - sg * c[1], sg * c[0] + cg * c[1], c[2]);
        for &(cb, sb) in &half {
            let (x2, y2, z2) = (cb * x1 + sb * z1, y1, -sb * x1 + cb * z1);
            let zz = w[2] * z2 * z2;
            for &(ca, sa) in &full {
                let x3 = ca * x2 - sa * y2;
                let y3 = sa * x2 + ca * y2;
                best = best.min(w[0] * x3 * x3 + w[1] * y3 * y3 + zz);
            }
        }
    }
    best.sqrt()
}

fn criterion_7() -> Outcome {
    let mut worst_inv = 0.0f64;
    let invariant = [
        PHFunctionSpec::schatten(2.0).unwrap(),
        PHFunctionSpec::schatten(1.0).unwrap(),
        PHFunctionSpec::OpShifted,
    ];
    let gates = [
        orthogonalizer(0.4, 2).unwrap(),
        orthogonalizer(1.1, 3).unwrap(),
        haar_su(2, 5),
        haar_su(3, 6),
    ];
    for f in &invariant {
        for (g, o) in gates.iter().enumerate() {
            let conj = conj_min_time(f, kappa(1.0), o, 16, 42).map_err(|e| e.to_string())?;
            let plain = gate_time(f, kappa(1.0), o, 2).map_err(|e| e.to_string())?;
            let err = (conj.time - plain.time).abs();
            worst_inv = worst_inv.max(err);
            ensure(err < 1e-8, || format!("{} gate {g}: conj {} vs {}", f.label(), conj.time, plain.time))?;
        }
    }

    let ml = PHFunctionSpec::ml(1.0, ket0(2)).unwrap();
    let ml_time = conj_min_time(&ml, kappa(1.0), &orthogonalizer(PI, 2).unwrap(), 16, 42)
        .map_err(|e| e.to_string())?
        .time;
    ensure(ml_time < 1e-6, || format!("ml(1) conjugated orthogonalizer time {ml_time}"))?;

    let weights = [1.0, 2.0, 3.0];
    let metric = DMatrix::from_diagonal(&DVector::from_vec(weights.to_vec()));
    let randers = PHFunctionSpec::randers(RandersData::new(metric, DVector::zeros(3)).unwrap());
    let mut worst_grid = 0.0f64;
    for seed in [7u64, 8] {
        let o = haar_su(2, seed);
        let x = principal_log(&o).map_err(|e| e.to_string())?.value;
        let oracle = randers_grid_minimum(pauli_coordinates(&x), weights);
        let conj = conj_min_time(&randers, kappa(1.0), &o, 16, 42).map_err(|e| e.to_string())?;
        let err = (conj.time - oracle).abs();
        worst_grid = worst_grid.max(err);
        ensure(err < 1e-4, || format!("randers gate seed {seed}: conj {} vs grid {oracle}", conj.time))?;
    }
    Ok(format!(
        "invariant max error {worst_inv:.2e}, ml(1) time {ml_time:.2e}, randers grid error {worst_grid:.2e}"
    ))
}

fn criterion_8() -> Outcome {
    let run = || -> Result<Vec<u8>, String> {
        let out = Command::new(env!("CARGO_BIN_EXE_qsl"))
            .args(["--output", "json", "reproduce", "--seed", "42"])
            .env_remove("QSL_SEED")
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success(), || {
            format!("exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr))
        })?;
        Ok(out.stdout)
    };
    let first = run()?;
    let second = run()?;
    ensure(!first.is_empty(), || "empty output".into())?;
    ensure(first == second, || "outputs differ between runs".into())?;
    Ok(format!("{} identical bytes", first.len()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("ml(p) bounds", criterion_1),
        ("mt bound", criterion_2),
        ("op_shifted bound", criterion_3),
        ("Ad-invariance vs geodesic condition", criterion_4),
        ("branch minimization", criterion_5),
        ("action reparameterization invariance", criterion_6),
        ("conjugation minimization", criterion_7),
        ("reproduce determinism", criterion_8),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {} ({name}): PASS ({detail})", k + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {} ({name}): FAIL ({why})", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}

use num_complex::Complex64;

use super::spec::{Combinator, PHFunctionSpec, RandersData};
use super::state::StateVector;
use crate::error::{Error, Result};
use crate::matcore::{coordinates, eigh, AlgebraElement};

/// Anything that can be evaluated as a constraint on su(N).
///
/// [`PHFunctionSpec`] is the production implementation; the trait exists so
/// that checks like homogeneity or Ad-invariance can also be pointed at test
/// fixtures.
pub trait PhFunction: Sync {
    fn value(&self, a: &AlgebraElement) -> Result<f64>;

    /// Dimension the function is tied to, if any.
    fn fixed_dim(&self) -> Option<usize> {
        None
    }
}

impl PhFunction for PHFunctionSpec {
    fn value(&self, a: &AlgebraElement) -> Result<f64> {
        evaluate(self, a)
    }

    fn fixed_dim(&self) -> Option<usize> {
        self.dim()
    }
}

pub fn evaluate(f: &PHFunctionSpec, a: &AlgebraElement) -> Result<f64> {
    if let Some(n) = f.dim() {
        if n != a.dim() {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: a.dim(),
            });
        }
    }
    let value = eval_node(f, a)?;
    debug_assert!(
        value >= -1e-12 * (1.0 + a.norm()),
        "{} evaluated negative: {value}",
        f.label()
    );
    Ok(value)
}

fn eval_node(f: &PHFunctionSpec, a: &AlgebraElement) -> Result<f64> {
    match f {
        PHFunctionSpec::Schatten { p } => {
            let (values, _) = eigh(&a.hamiltonian())?;
            Ok(schatten(&values, *p))
        }
        PHFunctionSpec::OpShifted => {
            let (values, _) = eigh(&a.hamiltonian())?;
            Ok(values[values.len() - 1] - values[0])
        }
        PHFunctionSpec::MargolusLevitin { p, psi } => margolus_levitin(a, *p, psi),
        PHFunctionSpec::MandelstamTamm { psi } => mandelstam_tamm(a, psi),
        PHFunctionSpec::Randers(r) => Ok(randers(r, a)),
        PHFunctionSpec::Combine { op, p, children } => {
            let f1 = eval_node(&children[0], a)?;
            let f2 = eval_node(&children[1], a)?;
            Ok(combine(*op, *p, f1, f2))
        }
    }
}

/// `(Σ |λ|^p)^(1/p)`, scaled by the largest term to stay finite for big `p`.
fn schatten(eigenvalues: &[f64], p: f64) -> f64 {
    let top = eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if top == 0.0 || p.is_infinite() {
        return top;
    }
    top * eigenvalues
        .iter()
        .map(|v| (v.abs() / top).powf(p))
        .sum::<f64>()
        .powf(1.0 / p)
}

/// `⟨ψ|(H - E_0)^p|ψ⟩^(1/p)`, taken spectrally: `Σ_k |⟨k|ψ⟩|² (λ_k - λ_0)^p`.
fn margolus_levitin(a: &AlgebraElement, p: f64, psi: &StateVector) -> Result<f64> {
    let (values, q) = eigh(&a.hamiltonian())?;
    let ground = values[0];
    let v = psi.amplitudes();
    let top = values[values.len() - 1] - ground;
    if top == 0.0 {
        return Ok(0.0);
    }
    let moment: f64 = values
        .iter()
        .enumerate()
        .map(|(k, &lambda)| {
            let weight = q.column(k).dotc(v).norm_sqr();
            let gap = ((lambda - ground) / top).max(0.0);
            weight * gap.powf(p)
        })
        .sum();
    Ok(top * moment.max(0.0).powf(1.0 / p))
}

/// `‖(H - Ē) ψ‖`.
fn mandelstam_tamm(a: &AlgebraElement, psi: &StateVector) -> Result<f64> {
    let v = psi.amplitudes();
    let h = a.hamiltonian();
    let hv = h.apply(v);
    let mean = v.dotc(&hv).re;
    Ok((hv - v * Complex64::new(mean, 0.0)).norm())
}

fn randers(r: &RandersData, a: &AlgebraElement) -> f64 {
    let coords = nalgebra::DVector::from_vec(coordinates(a));
    let quad = coords.dot(&(&r.metric * &coords));
    debug_assert!(quad >= -1e-12 * coords.norm_squared(), "metric not PSD at {quad}");
    quad.max(0.0).sqrt() + r.oneform.dot(&coords)
}

pub(crate) fn combine(op: Combinator, p: Option<f64>, f1: f64, f2: f64) -> f64 {
    match op {
        Combinator::Sum => f1 + f2,
        Combinator::Max => f1.max(f2),
        Combinator::Min => f1.min(f2),
        Combinator::PowMean => {
            let p = p.expect("powmean carries p");
            let top = f1.abs().max(f2.abs());
            if top == 0.0 {
                return 0.0;
            }
            top * ((f1 / top).powf(p) + (f2 / top).powf(p)).powf(1.0 / p)
        }
        // (F1^p F2^p)^(1/(2p)) is sqrt(F1 F2) for every p; computed in that form.
        Combinator::GeoMean => (f1 * f2).max(0.0).sqrt(),
    }
}

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::matcore::{AlgebraElement, ComplexMatrix};
use crate::phfun::{evaluate, PHFunctionSpec};

/// A sampled Hamiltonian path `t ↦ H_t` on `[0, duration]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TrajectoryRecord", into = "TrajectoryRecord")]
pub struct Trajectory {
    samples: Vec<(f64, ComplexMatrix)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub h: ComplexMatrix,
}

/// On-disk form: `{"duration": T, "samples": [{"t": 0, "h": {...}}, ...]}`.
/// `duration` may be omitted; when present it must equal the last sample time.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration: Option<f64>,
    pub samples: Vec<TrajectorySample>,
}

impl TryFrom<TrajectoryRecord> for Trajectory {
    type Error = Error;

    fn try_from(rec: TrajectoryRecord) -> Result<Self> {
        let traj = Self::new(rec.samples.into_iter().map(|s| (s.t, s.h)).collect())?;
        if let Some(d) = rec.duration {
            if (d - traj.duration()).abs() > 1e-12 * traj.duration() {
                return Err(Error::InvalidParameter(format!(
                    "trajectory duration {d} does not match the last sample time {}",
                    traj.duration()
                )));
            }
        }
        Ok(traj)
    }
}

impl From<Trajectory> for TrajectoryRecord {
    fn from(t: Trajectory) -> Self {
        Self {
            duration: Some(t.duration()),
            samples: t
                .samples
                .into_iter()
                .map(|(t, h)| TrajectorySample { t, h })
                .collect(),
        }
    }
}

impl Trajectory {
    /// Samples must start at `t = 0`, increase strictly, and carry traceless
    /// Hermitian matrices of one dimension.
    pub fn new(samples: Vec<(f64, ComplexMatrix)>) -> Result<Self> {
        Self::with_tolerance(samples, Tolerances::default().algebra)
    }

    /// As [`new`](Self::new), with the Hermiticity and trace tolerance given.
    pub fn with_tolerance(samples: Vec<(f64, ComplexMatrix)>, tol: f64) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::TooFewSamples(samples.len()));
        }
        let duration = samples[samples.len() - 1].0;
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "trajectory must end at a positive finite time, got {duration}"
            )));
        }
        if samples[0].0.abs() > 1e-12 * duration {
            return Err(Error::InvalidParameter(format!(
                "trajectory must start at t = 0, got {}",
                samples[0].0
            )));
        }
        if let Some(w) = samples.windows(2).find(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::InvalidParameter(format!(
                "sample times must increase strictly ({} then {})",
                w[0].0, w[1].0
            )));
        }
        let n = samples[0].1.dim();
        for (_, h) in &samples {
            if h.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: h.dim(),
                });
            }
            let deviation = h.hermitian_deviation();
            if !(deviation <= tol) {
                return Err(Error::NotHermitian {
                    deviation,
                    tolerance: tol,
                });
            }
            AlgebraElement::with_tolerance(h.scale(Complex64::new(0.0, -1.0)), tol)?;
        }
        Ok(Self { samples })
    }

    /// Samples `H(t)` at `count` uniform points of `[0, duration]`.
    pub fn uniform(duration: f64, count: usize, mut h: impl FnMut(f64) -> ComplexMatrix) -> Result<Self> {
        if count < 2 {
            return Err(Error::TooFewSamples(count));
        }
        let step = duration / (count - 1) as f64;
        Self::new(
            (0..count)
                .map(|k| {
                    let t = if k == count - 1 { duration } else { k as f64 * step };
                    (t, h(t))
                })
                .collect(),
        )
    }

    pub fn duration(&self) -> f64 {
        self.samples[self.samples.len() - 1].0
    }

    pub fn dim(&self) -> usize {
        self.samples[0].1.dim()
    }

    pub fn samples(&self) -> &[(f64, ComplexMatrix)] {
        &self.samples
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|(t, _)| *t).collect()
    }
}

/// `∫ F(-iH_t) dt` over the trajectory.
///
/// Composite Simpson on uniform grids (closing with a 3/8 panel when the
/// interval count is odd), trapezoid otherwise.
pub fn action(f: &PHFunctionSpec, traj: &Trajectory) -> Result<f64> {
    let values = traj
        .samples
        .iter()
        // validated at construction; projecting keeps a looser tolerance usable
        .map(|(_, h)| evaluate(f, &AlgebraElement::project(&h.scale(Complex64::new(0.0, -1.0)))))
        .collect::<Result<Vec<f64>>>()?;
    Ok(integrate(&traj.times(), &values))
}

pub(crate) fn integrate(t: &[f64], y: &[f64]) -> f64 {
    let intervals = t.len() - 1;
    let h = (t[intervals] - t[0]) / intervals as f64;
    let uniform = t
        .windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h);
    if !uniform || intervals < 2 {
        return t
            .windows(2)
            .zip(y.windows(2))
            .map(|(tw, yw)| 0.5 * (tw[1] - tw[0]) * (yw[0] + yw[1]))
            .sum();
    }
    let simpson = |y: &[f64]| -> f64 {
        let m = y.len() - 1;
        let inner: f64 = (1..m).map(|k| if k % 2 == 1 { 4.0 } else { 2.0 } * y[k]).sum();
        h / 3.0 * (y[0] + inner + y[m])
    };
    if intervals.is_multiple_of(2) {
        return simpson(y);
    }
    let split = intervals - 3;
    let tail = &y[split..];
    let three_eighths = 3.0 * h / 8.0 * (tail[0] + 3.0 * tail[1] + 3.0 * tail[2] + tail[3]);
    let head = if split > 0 { simpson(&y[..=split]) } else { 0.0 };
    head + three_eighths
}

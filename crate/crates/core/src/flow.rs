//! Fisher-gradient flow `theta' = -I(theta)^-1 grad Phi(theta)` and a
//! fixed-step RK4 integrator that records phase-chart diagnostics per sample.

use nalgebra::Vector2;
use serde::Serialize;

use crate::error::{GeoError, Result};
use crate::exp_family::NaturalParams;
use crate::hamiltonian::{hamiltonian, to_phase, PhaseCoords};

/// Distance from the chart boundary (`theta2 = 0` or `theta1 = 0`) at which
/// integration stops.
pub const DOMAIN_EPS: f64 = 1e-9;

/// Closed-form right-hand side `(theta1^3 / (2 theta2), theta1^2 / 2 + theta2)`.
pub fn gradient_rhs(t: NaturalParams) -> Result<Vector2<f64>> {
    t.validate()?;
    let (a, b) = (t.theta1, t.theta2);
    Ok(Vector2::new(a * a * a / (2.0 * b), 0.5 * a * a + b))
}

/// One recorded point of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sample {
    pub time: f64,
    pub theta: NaturalParams,
    pub phase: PhaseCoords,
    pub hamiltonian: f64,
}

impl Sample {
    fn at(time: f64, theta: NaturalParams) -> Result<Self> {
        let phase = to_phase(theta)?;
        Ok(Self {
            time,
            theta,
            phase,
            hamiltonian: hamiltonian(phase)?,
        })
    }
}

/// Why an integration stopped before `t_end`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// `theta2` came within `DOMAIN_EPS` of zero.
    Theta2Boundary { time: f64 },
    /// `|theta1|` came within `DOMAIN_EPS` of zero, where `P` blows up.
    Theta1Singularity { time: f64 },
    /// A stage produced a non-finite or out-of-domain state.
    NonFinite { time: f64 },
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Termination::Theta2Boundary { time } => {
                write!(f, "theta2 reached the domain boundary near t={time}")
            }
            Termination::Theta1Singularity { time } => {
                write!(f, "theta1 reached the chart singularity near t={time}")
            }
            Termination::NonFinite { time } => {
                write!(f, "non-finite or invalid state near t={time}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub step: f64,
    pub terminated_early: Option<Termination>,
}

impl Trajectory {
    pub fn last(&self) -> &Sample {
        // never empty: the initial sample is always recorded
        self.samples
            .last()
            .expect("trajectory has an initial sample")
    }

    /// `max_t |H(t) - H(0)|`.
    pub fn hamiltonian_drift(&self) -> f64 {
        let h0 = self.samples[0].hamiltonian;
        self.samples
            .iter()
            .map(|s| (s.hamiltonian - h0).abs())
            .fold(0.0, f64::max)
    }
}

fn rk4_step(theta: NaturalParams, h: f64) -> Result<NaturalParams> {
    let shift = |k: &Vector2<f64>, c: f64| NaturalParams {
        theta1: theta.theta1 + c * k[0],
        theta2: theta.theta2 + c * k[1],
    };
    let k1 = gradient_rhs(theta)?;
    let k2 = gradient_rhs(shift(&k1, 0.5 * h))?;
    let k3 = gradient_rhs(shift(&k2, 0.5 * h))?;
    let k4 = gradient_rhs(shift(&k3, h))?;
    let incr = (k1 + 2.0 * k2 + 2.0 * k3 + k4) * (h / 6.0);
    Ok(NaturalParams {
        theta1: theta.theta1 + incr[0],
        theta2: theta.theta2 + incr[1],
    })
}

fn step_count(step: f64, t_end: f64) -> usize {
    let ratio = t_end / step;
    let nearest = ratio.round();
    if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest as usize
    } else {
        ratio.floor() as usize
    }
}

/// Integrates the gradient flow from `t0` with classical RK4 at a fixed step.
///
/// Sample `k` sits at time `k * step` for `k = 0..=floor(t_end / step)`.
/// Integration stops early, flagging the reason, once the state comes within
/// [`DOMAIN_EPS`] of `theta2 = 0` or `theta1 = 0`; the offending state is not
/// recorded.
pub fn integrate(t0: NaturalParams, step: f64, t_end: f64) -> Result<Trajectory> {
    if !(step.is_finite() && step > 0.0) {
        return Err(GeoError::Argument(format!(
            "step must be positive, got {step}"
        )));
    }
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(GeoError::Argument(format!(
            "t_end must be non-negative, got {t_end}"
        )));
    }
    let mut samples = vec![Sample::at(0.0, t0)?];
    let n = step_count(step, t_end);
    samples.reserve(n);
    let mut theta = t0;
    let mut terminated_early = None;

    for k in 1..=n {
        let time = k as f64 * step;
        let next = match rk4_step(theta, step) {
            Ok(next) => next,
            Err(_) => {
                terminated_early = Some(Termination::NonFinite { time });
                break;
            }
        };
        if !(next.theta1.is_finite() && next.theta2.is_finite()) {
            terminated_early = Some(Termination::NonFinite { time });
            break;
        }
        if next.theta2 >= -DOMAIN_EPS {
            terminated_early = Some(Termination::Theta2Boundary { time });
            break;
        }
        if next.theta1.abs() <= DOMAIN_EPS {
            terminated_early = Some(Termination::Theta1Singularity { time });
            break;
        }
        match Sample::at(time, next) {
            Ok(s) => samples.push(s),
            Err(_) => {
                terminated_early = Some(Termination::NonFinite { time });
                break;
            }
        }
        theta = next;
    }

    Ok(Trajectory {
        samples,
        step,
        terminated_early,
    })
}

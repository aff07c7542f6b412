//! Lognormal family as a two-parameter exponential family.
//!
//! Three coordinate systems live here: the source parameters `(mu, sigma)` of
//! the log-variable, the natural parameters
//! `theta = (mu / sigma^2, -1 / (2 sigma^2))` and the expectation (dual)
//! parameters `eta = grad Phi(theta) = (mu, mu^2 + sigma^2)`.
//!
//! The log-partition (potential) function is
//!
//! ```text
//! Phi(theta) = -theta1^2 / (4 theta2) - 1/2 log(-2 theta2) + 1/2 log(2 pi)
//! ```
//!
//! and its Hessian is the Fisher information metric.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};

/// Default central-difference step for [`fisher_fd`].
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// `(mu, sigma)` of the underlying normal variable `log x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceParams {
    pub mu: f64,
    pub sigma: f64,
}

impl SourceParams {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        let p = Self { mu, sigma };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if !self.mu.is_finite() || !self.sigma.is_finite() {
            return Err(GeoError::Domain(format!(
                "source parameters must be finite (mu = {}, sigma = {})",
                self.mu, self.sigma
            )));
        }
        if self.sigma <= 0.0 {
            return Err(GeoError::Domain(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        Ok(())
    }
}

/// Natural parameters `(theta1, theta2)`; valid when `theta2 < 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NaturalParams {
    pub theta1: f64,
    pub theta2: f64,
}

impl NaturalParams {
    pub fn new(theta1: f64, theta2: f64) -> Result<Self> {
        let t = Self { theta1, theta2 };
        t.validate()?;
        Ok(t)
    }

    /// Checks `theta2 < 0` and finiteness. The chart condition `theta1 != 0`
    /// is checked by the phase chart, not here.
    pub fn validate(&self) -> Result<()> {
        if !self.theta1.is_finite() || !self.theta2.is_finite() {
            return Err(GeoError::Domain(format!(
                "natural parameters must be finite (theta1 = {}, theta2 = {})",
                self.theta1, self.theta2
            )));
        }
        if self.theta2 >= 0.0 {
            return Err(GeoError::Domain(format!(
                "theta2 must be negative, got {}",
                self.theta2
            )));
        }
        Ok(())
    }

    pub fn as_vector(&self) -> Vector2<f64> {
        Vector2::new(self.theta1, self.theta2)
    }
}

/// Expectation parameters `(eta1, eta2) = (E[log x], E[(log x)^2])`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualParams {
    pub eta1: f64,
    pub eta2: f64,
}

impl DualParams {
    /// `eta2 - eta1^2`, the variance of `log x`.
    pub fn variance(&self) -> f64 {
        self.eta2 - self.eta1 * self.eta1
    }

    pub fn as_vector(&self) -> Vector2<f64> {
        Vector2::new(self.eta1, self.eta2)
    }
}

/// A symmetric 2x2 matrix: the Fisher metric or its inverse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherMatrix(pub Matrix2<f64>);

impl FisherMatrix {
    pub fn matrix(&self) -> &Matrix2<f64> {
        &self.0
    }

    pub fn entry(&self, row: usize, col: usize) -> f64 {
        self.0[(row, col)]
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let ev = self.0.symmetric_eigenvalues();
        let (a, b) = (ev[0], ev[1]);
        if a <= b {
            [a, b]
        } else {
            [b, a]
        }
    }

    pub fn is_positive_definite(&self) -> bool {
        self.eigenvalues()[0] > 0.0
    }
}

/// Whether a log-density is evaluated from the raw lognormal formula or from
/// the exponential-family decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityForm {
    Direct,
    Family,
}

pub fn to_natural(p: SourceParams) -> Result<NaturalParams> {
    p.validate()?;
    let var = p.sigma * p.sigma;
    Ok(NaturalParams {
        theta1: p.mu / var,
        theta2: -1.0 / (2.0 * var),
    })
}

pub fn to_source(t: NaturalParams) -> Result<SourceParams> {
    t.validate()?;
    Ok(SourceParams {
        mu: -t.theta1 / (2.0 * t.theta2),
        sigma: (-1.0 / (2.0 * t.theta2)).sqrt(),
    })
}

/// Log-partition function `Phi(theta)`.
pub fn potential(t: NaturalParams) -> Result<f64> {
    t.validate()?;
    Ok(potential_unchecked(t.theta1, t.theta2))
}

#[inline]
fn potential_unchecked(theta1: f64, theta2: f64) -> f64 {
    -theta1 * theta1 / (4.0 * theta2) - 0.5 * (-2.0 * theta2).ln() + 0.5 * (2.0 * PI).ln()
}

/// Gradient of the potential, `eta = grad Phi(theta)`.
pub fn dual_params(t: NaturalParams) -> Result<DualParams> {
    t.validate()?;
    let (a, b) = (t.theta1, t.theta2);
    Ok(DualParams {
        eta1: -a / (2.0 * b),
        eta2: a * a / (4.0 * b * b) - 1.0 / (2.0 * b),
    })
}

/// Legendre conjugate `Psi(eta) = theta . eta - Phi(theta)` at `eta = grad Phi(theta)`.
pub fn dual_potential(t: NaturalParams) -> Result<f64> {
    let eta = dual_params(t)?;
    Ok(t.theta1 * eta.eta1 + t.theta2 * eta.eta2 - potential(t)?)
}

/// `Phi(theta) + Psi(eta) - theta . eta`, recomputed term by term.
pub fn legendre_residual(t: NaturalParams) -> Result<f64> {
    let phi = potential(t)?;
    let psi = dual_potential(t)?;
    let eta = dual_params(t)?;
    Ok(phi + psi - (t.theta1 * eta.eta1 + t.theta2 * eta.eta2))
}

/// Closed-form Fisher metric, the Hessian of the potential.
pub fn fisher(t: NaturalParams) -> Result<FisherMatrix> {
    t.validate()?;
    let (a, b) = (t.theta1, t.theta2);
    let off = a / (2.0 * b * b);
    Ok(FisherMatrix(Matrix2::new(
        -1.0 / (2.0 * b),
        off,
        off,
        (b - a * a) / (2.0 * b * b * b),
    )))
}

/// Central-difference Hessian of the potential with step `h`.
///
/// The step is snapped so that `theta +/- h` is exactly representable.
pub fn fisher_fd(t: NaturalParams, h: f64) -> Result<FisherMatrix> {
    t.validate()?;
    if !(h.is_finite() && h > 0.0) {
        return Err(GeoError::Argument(format!(
            "finite-difference step must be positive, got {h}"
        )));
    }
    if t.theta2 >= -2.0 * h {
        return Err(GeoError::Domain(format!(
            "step {h} too large for theta2 = {}",
            t.theta2
        )));
    }
    let (a, b) = (t.theta1, t.theta2);
    let ha = (a + h) - a;
    let hb = (b + h) - b;

    // The stencil is linear, so it is applied to the quadratic and the log
    // part separately; the additive constant of Phi drops out.
    let quad = |x: f64, y: f64| -x * x / (4.0 * y);
    let logp = |y: f64| -0.5 * (-2.0 * y).ln();

    let q0 = quad(a, b);
    let faa = (quad(a + ha, b) - 2.0 * q0 + quad(a - ha, b)) / (ha * ha);
    let fbb = (quad(a, b + hb) - 2.0 * q0 + quad(a, b - hb)) / (hb * hb)
        + (logp(b + hb) - 2.0 * logp(b) + logp(b - hb)) / (hb * hb);
    let fab = (quad(a + ha, b + hb) - quad(a + ha, b - hb) - quad(a - ha, b + hb)
        + quad(a - ha, b - hb))
        / (4.0 * ha * hb);
    Ok(FisherMatrix(Matrix2::new(faa, fab, fab, fbb)))
}

/// Closed-form inverse of the Fisher metric.
pub fn fisher_inverse(t: NaturalParams) -> Result<FisherMatrix> {
    t.validate()?;
    let (a, b) = (t.theta1, t.theta2);
    let off = 2.0 * b * a;
    Ok(FisherMatrix(Matrix2::new(
        2.0 * a * a - 2.0 * b,
        off,
        off,
        2.0 * b * b,
    )))
}

/// Log-density of the lognormal distribution at `x > 0`.
pub fn log_pdf(x: f64, p: SourceParams, form: DensityForm) -> Result<f64> {
    p.validate()?;
    if !(x.is_finite() && x > 0.0) {
        return Err(GeoError::Domain(format!("x must be positive, got {x}")));
    }
    let lx = x.ln();
    match form {
        DensityForm::Direct => {
            let d = lx - p.mu;
            Ok(-0.5 * (2.0 * PI).ln() - p.sigma.ln() - lx - d * d / (2.0 * p.sigma * p.sigma))
        }
        DensityForm::Family => {
            let t = to_natural(p)?;
            let c = -lx;
            Ok(c + t.theta1 * lx + t.theta2 * lx * lx - potential(t)?)
        }
    }
}

/// The 24-point property grid: `theta1 in {+-0.5, +-1, +-2}`,
/// `theta2 in {-0.25, -0.5, -1, -2}`.
pub fn standard_grid() -> Vec<NaturalParams> {
    const T1: [f64; 6] = [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0];
    const T2: [f64; 4] = [-0.25, -0.5, -1.0, -2.0];
    T1.iter()
        .flat_map(|&a| {
            T2.iter().map(move |&b| NaturalParams {
                theta1: a,
                theta2: b,
            })
        })
        .collect()
}

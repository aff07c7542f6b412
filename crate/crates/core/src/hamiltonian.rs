//! Phase chart `(P, Q)` on which the Fisher-gradient flow is Hamiltonian.
//!
//! With `P = 2 theta2 / theta1` and `Q = (theta1^2 - 2 theta2) / (4 theta2^2)`
//! the flow becomes `(P', Q') = Lambda grad H` for `H = -P Q` and the constant
//! Poisson bivector `Lambda = [[0, -1], [1, 0]]`. Rotations `exp(beta Lambda)`
//! supply the rotation block of the layer weight.

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{GeoError, Result};
use crate::exp_family::NaturalParams;
use crate::flow::gradient_rhs;

/// Canonical coordinates of the Hamiltonian chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct PhaseCoords {
    pub P: f64,
    pub Q: f64,
}

impl PhaseCoords {
    #[allow(non_snake_case)]
    pub fn new(P: f64, Q: f64) -> Self {
        Self { P, Q }
    }

    pub fn norm(&self) -> f64 {
        self.P.hypot(self.Q)
    }

    pub(crate) fn check_not_origin(&self) -> Result<()> {
        if !(self.P.is_finite() && self.Q.is_finite()) {
            return Err(GeoError::Domain(format!(
                "phase coordinates must be finite, got ({}, {})",
                self.P, self.Q
            )));
        }
        if self.P == 0.0 && self.Q == 0.0 {
            return Err(GeoError::Domain(
                "phase origin (0, 0) has no angle".to_string(),
            ));
        }
        Ok(())
    }

    pub fn as_vector(&self) -> Vector2<f64> {
        Vector2::new(self.P, self.Q)
    }
}

/// The constant bivector `Lambda`.
pub const POISSON: PoissonBivector = PoissonBivector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PoissonBivector;

impl PoissonBivector {
    pub fn matrix(&self) -> Matrix2<f64> {
        Matrix2::new(0.0, -1.0, 1.0, 0.0)
    }
}

/// An element of SO(2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix(pub Matrix2<f64>);

impl RotationMatrix {
    pub fn matrix(&self) -> &Matrix2<f64> {
        &self.0
    }

    pub fn determinant(&self) -> f64 {
        self.0.determinant()
    }

    /// `max |R^T R - I|`.
    pub fn orthogonality_defect(&self) -> f64 {
        (self.0.transpose() * self.0 - Matrix2::identity()).amax()
    }
}

pub fn to_phase(t: NaturalParams) -> Result<PhaseCoords> {
    t.validate()?;
    if t.theta1 == 0.0 {
        return Err(GeoError::ChartSingularity(
            "theta1 = 0 (mu = 0): P = 2 theta2 / theta1 is undefined".to_string(),
        ));
    }
    let (a, b) = (t.theta1, t.theta2);
    Ok(PhaseCoords {
        P: 2.0 * b / a,
        Q: (a * a - 2.0 * b) / (4.0 * b * b),
    })
}

/// Inverse chart. Requires `P != 0` and `Q P^2 > 1`.
pub fn from_phase(c: PhaseCoords) -> Result<NaturalParams> {
    c.check_not_origin()?;
    if c.P == 0.0 {
        return Err(GeoError::ChartSingularity(
            "P = 0 has no preimage".to_string(),
        ));
    }
    let qp2 = c.Q * c.P * c.P;
    if qp2 <= 1.0 {
        return Err(GeoError::OutsideChartImage(qp2));
    }
    let theta2 = c.P * c.P / (2.0 * (1.0 - qp2));
    NaturalParams::new(2.0 * theta2 / c.P, theta2)
}

/// Jacobian `d(P, Q) / d(theta1, theta2)`.
pub fn chart_jacobian(t: NaturalParams) -> Result<Matrix2<f64>> {
    to_phase(t)?;
    let (a, b) = (t.theta1, t.theta2);
    Ok(Matrix2::new(
        -2.0 * b / (a * a),
        2.0 / a,
        a / (2.0 * b * b),
        -a * a / (2.0 * b * b * b) + 1.0 / (2.0 * b * b),
    ))
}

/// `H = -P Q`.
///
/// The angular form `-(P^2 + Q^2) cos(beta) sin(beta)` is evaluated alongside
/// and must agree to `1e-12 (P^2 + Q^2)`.
pub fn hamiltonian(c: PhaseCoords) -> Result<f64> {
    c.check_not_origin()?;
    let h = -c.P * c.Q;
    let angular = hamiltonian_angular(c)?;
    let scale = c.P * c.P + c.Q * c.Q;
    let residual = (h - angular).abs();
    if residual > 1e-12 * scale {
        return Err(GeoError::Consistency {
            what: "angular Hamiltonian form",
            residual,
        });
    }
    Ok(h)
}

/// `-(P^2 + Q^2) cos(beta) sin(beta)` with `beta = atan2(Q, P)`.
pub fn hamiltonian_angular(c: PhaseCoords) -> Result<f64> {
    let beta = crate::disk::beta_angle(c)?;
    Ok(-(c.P * c.P + c.Q * c.Q) * beta.cos() * beta.sin())
}

/// `grad H = (-Q, -P)`.
pub fn hamiltonian_gradient(c: PhaseCoords) -> Vector2<f64> {
    Vector2::new(-c.Q, -c.P)
}

/// `X_H = Lambda grad H`, which equals `(P, -Q)`.
pub fn hamiltonian_vector_field(c: PhaseCoords) -> Result<Vector2<f64>> {
    c.check_not_origin()?;
    Ok(POISSON.matrix() * hamiltonian_gradient(c))
}

/// Gradient-flow velocity carried into the phase chart by the chain rule.
pub fn pushforward_rhs(t: NaturalParams) -> Result<Vector2<f64>> {
    let jac = chart_jacobian(t)?;
    Ok(jac * gradient_rhs(t)?)
}

/// `max |pushforward_rhs(t) - X_H(to_phase(t))|`.
pub fn equivalence_residual(t: NaturalParams) -> Result<f64> {
    let push = pushforward_rhs(t)?;
    let field = hamiltonian_vector_field(to_phase(t)?)?;
    Ok((push - field).amax())
}

/// `exp(beta Lambda)`, the rotation by `beta`.
pub fn bivector_exp(beta: f64) -> Result<RotationMatrix> {
    if !beta.is_finite() {
        return Err(GeoError::Argument(format!(
            "beta must be finite, got {beta}"
        )));
    }
    let (s, c) = beta.sin_cos();
    Ok(RotationMatrix(Matrix2::new(c, -s, s, c)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exp_family::standard_grid;
    use approx::assert_abs_diff_eq;

    fn nat(a: f64, b: f64) -> NaturalParams {
        NaturalParams::new(a, b).unwrap()
    }

    #[test]
    fn chart_examples() {
        assert_eq!(
            to_phase(nat(1.0, -0.5)).unwrap(),
            PhaseCoords::new(-1.0, 2.0)
        );
        assert_eq!(
            to_phase(nat(-1.0, -0.5)).unwrap(),
            PhaseCoords::new(1.0, 2.0)
        );
        assert_eq!(
            to_phase(nat(2.0, -1.0)).unwrap(),
            PhaseCoords::new(-1.0, 1.5)
        );
        assert_eq!(
            to_phase(nat(0.5, -0.5)).unwrap(),
            PhaseCoords::new(-2.0, 1.25)
        );
    }

    #[test]
    fn chart_errors() {
        assert!(matches!(
            to_phase(nat(0.0, -0.5)),
            Err(GeoError::ChartSingularity(_))
        ));
        let bad = NaturalParams {
            theta1: 1.0,
            theta2: 0.5,
        };
        assert!(matches!(to_phase(bad), Err(GeoError::Domain(_))));
        assert!(matches!(
            from_phase(PhaseCoords::new(1.0, 0.5)),
            Err(GeoError::OutsideChartImage(_))
        ));
        assert!(matches!(
            from_phase(PhaseCoords::new(0.0, 3.0)),
            Err(GeoError::ChartSingularity(_))
        ));
        assert!(from_phase(PhaseCoords::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn inverse_chart_examples() {
        let t = from_phase(PhaseCoords::new(-1.0, 2.0)).unwrap();
        assert_abs_diff_eq!(t.theta1, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t.theta2, -0.5, epsilon = 1e-15);
        let t = from_phase(PhaseCoords::new(1.0, 2.0)).unwrap();
        assert_abs_diff_eq!(t.theta1, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(t.theta2, -0.5, epsilon = 1e-15);
    }

    #[test]
    fn chart_round_trip_on_grid() {
        for t in standard_grid() {
            let c = to_phase(t).unwrap();
            assert!(c.Q > 0.0 && c.Q * c.P * c.P > 1.0);
            let back = from_phase(c).unwrap();
            assert!((back.theta1 - t.theta1).abs() <= 1e-12 * t.theta1.abs());
            assert!((back.theta2 - t.theta2).abs() <= 1e-12 * t.theta2.abs());
        }
    }

    #[test]
    fn hamiltonian_examples() {
        assert_eq!(hamiltonian(PhaseCoords::new(-1.0, 2.0)).unwrap(), 2.0);
        assert_eq!(hamiltonian(PhaseCoords::new(1.0, 1.0)).unwrap(), -1.0);
        assert_abs_diff_eq!(
            hamiltonian_angular(PhaseCoords::new(1.0, 1.0)).unwrap(),
            -1.0,
            epsilon = 1e-15
        );
        for p in [-3.0, 0.1, 7.0] {
            assert_eq!(hamiltonian(PhaseCoords::new(p, 0.0)).unwrap(), 0.0);
        }
        assert!(hamiltonian(PhaseCoords::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn vector_field_examples() {
        let x = hamiltonian_vector_field(PhaseCoords::new(-1.0, 2.0)).unwrap();
        assert_eq!(x, Vector2::new(-1.0, -2.0));
        let x = hamiltonian_vector_field(PhaseCoords::new(1.0, 1.0)).unwrap();
        assert_eq!(x, Vector2::new(1.0, -1.0));
        for t in standard_grid() {
            let c = to_phase(t).unwrap();
            let x = hamiltonian_vector_field(c).unwrap();
            assert_eq!(hamiltonian_gradient(c).dot(&x), 0.0);
        }
    }

    #[test]
    fn pushforward_examples() {
        let v = pushforward_rhs(nat(1.0, -0.5)).unwrap();
        assert_abs_diff_eq!(v[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(v[1], -2.0, epsilon = 1e-14);
        let v = pushforward_rhs(nat(2.0, -1.0)).unwrap();
        assert_abs_diff_eq!(v[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(v[1], -1.5, epsilon = 1e-14);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let h = 1e-6;
        for t in standard_grid() {
            let jac = chart_jacobian(t).unwrap();
            let phase = |a: f64, b: f64| to_phase(nat(a, b)).unwrap().as_vector();
            let d1 = (phase(t.theta1 + h, t.theta2) - phase(t.theta1 - h, t.theta2)) / (2.0 * h);
            let d2 = (phase(t.theta1, t.theta2 + h) - phase(t.theta1, t.theta2 - h)) / (2.0 * h);
            let fd = Matrix2::from_columns(&[d1, d2]);
            let scale = jac.amax().max(1.0);
            assert!((fd - jac).amax() < 1e-6 * scale, "{t:?}: {fd} vs {jac}");
            // FD pushforward agrees with the Hamiltonian field too.
            let push_fd = fd * gradient_rhs(t).unwrap();
            let field = hamiltonian_vector_field(to_phase(t).unwrap()).unwrap();
            assert!((push_fd - field).amax() < 1e-5 * scale);
        }
    }

    #[test]
    fn equivalence_on_grid() {
        for t in standard_grid() {
            assert!(equivalence_residual(t).unwrap() < 1e-10, "{t:?}");
        }
    }

    #[test]
    fn bivector_exp_values() {
        assert_eq!(*bivector_exp(0.0).unwrap().matrix(), Matrix2::identity());
        let r = bivector_exp(std::f64::consts::FRAC_PI_2).unwrap();
        assert!((r.matrix() - POISSON.matrix()).amax() < 1e-15);
        let r = bivector_exp(2.0_f64.atan2(-1.0)).unwrap();
        let want = Matrix2::new(-0.4472136, -0.8944272, 0.8944272, -0.4472136);
        assert!((r.matrix() - want).amax() < 1e-7);
        assert!(bivector_exp(f64::NAN).is_err());
        assert!(bivector_exp(f64::INFINITY).is_err());
    }

    /// Truncated power series `sum_k (beta Lambda)^k / k!`.
    fn exp_series(beta: f64, terms: usize) -> Matrix2<f64> {
        let a = POISSON.matrix() * beta;
        let mut term = Matrix2::identity();
        let mut sum = Matrix2::identity();
        for k in 1..terms {
            term = term * a / k as f64;
            sum += term;
        }
        sum
    }

    #[test]
    fn bivector_exp_matches_series() {
        let n = 201;
        for i in 0..n {
            let beta =
                -std::f64::consts::PI + 2.0 * std::f64::consts::PI * i as f64 / (n - 1) as f64;
            let closed = bivector_exp(beta).unwrap();
            assert!(
                (closed.matrix() - exp_series(beta, 30)).amax() < 1e-12,
                "beta={beta}"
            );
            assert!(closed.orthogonality_defect() < 1e-12);
            assert!((closed.determinant() - 1.0).abs() < 1e-12);
        }
    }
}

//! Poincare-disk embedding of phase states and the SU(1,1) Mobius action.
//!
//! Elements of SU(1,1) are stored as the pair `(alpha, xi)` of the matrix
//! `[[alpha, xi], [conj(xi), conj(alpha)]]` with `|alpha|^2 - |xi|^2 = 1`.
//! They act on the open unit disk by `g.z = (alpha z + xi) / (conj(xi) z + conj(alpha))`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{GeoError, Result};
use crate::hamiltonian::PhaseCoords;

/// Largest tolerated deviation of `|alpha|^2 - |xi|^2` from 1.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Radius of the circle the phase chart embeds onto.
pub const EMBED_RADIUS: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint(pub Complex64);

impl DiskPoint {
    pub fn new(z: Complex64) -> Result<Self> {
        if !(z.re.is_finite() && z.im.is_finite()) || z.norm() >= 1.0 {
            return Err(GeoError::Domain(format!(
                "disk point must lie strictly inside the unit disk, got {z}"
            )));
        }
        Ok(Self(z))
    }

    /// The embedded point at angle `beta`, `(cos beta + i sin beta) / 2`.
    pub fn on_embedding_circle(beta: f64) -> Result<Self> {
        if !beta.is_finite() {
            return Err(GeoError::Argument(format!(
                "beta must be finite, got {beta}"
            )));
        }
        let (s, c) = beta.sin_cos();
        Ok(Self(Complex64::new(EMBED_RADIUS * c, EMBED_RADIUS * s)))
    }

    pub fn value(&self) -> Complex64 {
        self.0
    }

    pub fn modulus(&self) -> f64 {
        self.0.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su11Element {
    pub alpha: Complex64,
    pub xi: Complex64,
}

impl Su11Element {
    pub const IDENTITY: Self = Self {
        alpha: Complex64::new(1.0, 0.0),
        xi: Complex64::new(0.0, 0.0),
    };

    pub fn new(alpha: Complex64, xi: Complex64) -> Result<Self> {
        let g = Self { alpha, xi };
        g.check()?;
        Ok(g)
    }

    /// `|alpha|^2 - |xi|^2`.
    pub fn determinant(&self) -> f64 {
        self.alpha.norm_sqr() - self.xi.norm_sqr()
    }

    fn check(&self) -> Result<()> {
        let det = self.determinant();
        if !det.is_finite() || (det - 1.0).abs() > MEMBERSHIP_TOL {
            return Err(GeoError::InvalidElement(det));
        }
        Ok(())
    }

    /// Matrix product `self * other`, written back in `(alpha, xi)` form.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            alpha: self.alpha * other.alpha + self.xi * other.xi.conj(),
            xi: self.alpha * other.xi + self.xi * other.alpha.conj(),
        }
    }

    /// The 2x2 matrix `[[alpha, xi], [conj(xi), conj(alpha)]]`, row-major.
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        [[self.alpha, self.xi], [self.xi.conj(), self.alpha.conj()]]
    }
}

/// The two real hyperbolic generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Generator {
    /// Boost by `cos(beta)`.
    G1,
    /// Boost by `sin(beta)`.
    G2,
}

/// `beta = atan2(Q, P)`.
pub fn beta_angle(c: PhaseCoords) -> Result<f64> {
    c.check_not_origin()?;
    Ok(c.Q.atan2(c.P))
}

/// `z = (cos beta + i sin beta) / 2` for the phase angle `beta`.
pub fn embed(c: PhaseCoords) -> Result<DiskPoint> {
    DiskPoint::on_embedding_circle(beta_angle(c)?)
}

/// `g1 = (cosh(cos beta), sinh(cos beta))`, `g2 = (cosh(sin beta), sinh(sin beta))`.
pub fn generator(which: Generator, beta: f64) -> Result<Su11Element> {
    if !beta.is_finite() {
        return Err(GeoError::Argument(format!(
            "beta must be finite, got {beta}"
        )));
    }
    let rapidity = match which {
        Generator::G1 => beta.cos(),
        Generator::G2 => beta.sin(),
    };
    Ok(Su11Element {
        alpha: Complex64::new(rapidity.cosh(), 0.0),
        xi: Complex64::new(rapidity.sinh(), 0.0),
    })
}

/// Group inverse `(conj(alpha), -xi)`.
pub fn inverse(g: &Su11Element) -> Result<Su11Element> {
    g.check()?;
    Ok(Su11Element {
        alpha: g.alpha.conj(),
        xi: -g.xi,
    })
}

/// Mobius action `g.z`.
pub fn mobius(g: &Su11Element, z: DiskPoint) -> Result<DiskPoint> {
    g.check()?;
    let z = DiskPoint::new(z.0)?;
    let num = g.alpha * z.0 + g.xi;
    let den = g.xi.conj() * z.0 + g.alpha.conj();
    if den.norm() < 1e-15 {
        return Err(GeoError::NumericalSingularity(format!(
            "Mobius denominator vanished at z = {}",
            z.0
        )));
    }
    let w = num / den;
    if !(w.re.is_finite() && w.im.is_finite()) || w.norm() >= 1.0 {
        return Err(GeoError::NumericalSingularity(format!(
            "Mobius image {w} left the open disk"
        )));
    }
    Ok(DiskPoint(w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    const BETA_11: f64 = 2.0344439357957027;

    #[test]
    fn beta_examples() {
        assert!((beta_angle(PhaseCoords::new(-1.0, 2.0)).unwrap() - 2.0344439).abs() < 1e-7);
        assert_eq!(beta_angle(PhaseCoords::new(-1.0, 2.0)).unwrap(), BETA_11);
        assert_eq!(beta_angle(PhaseCoords::new(1.0, 0.0)).unwrap(), 0.0);
        assert_eq!(beta_angle(PhaseCoords::new(0.0, 1.0)).unwrap(), FRAC_PI_2);
        assert!(beta_angle(PhaseCoords::new(0.0, 0.0)).is_err());
        for (p, q) in [(-1.0, 2.0), (3.0, 0.25), (-0.1, 7.0)] {
            let b = beta_angle(PhaseCoords::new(p, q)).unwrap();
            let r = f64::hypot(p, q);
            assert!((b.cos() - p / r).abs() < 1e-14);
            assert!((b.sin() - q / r).abs() < 1e-14);
        }
    }

    #[test]
    fn embed_examples() {
        let z = embed(PhaseCoords::new(-1.0, 2.0)).unwrap().value();
        assert!((z - Complex64::new(-0.2236068, 0.4472136)).norm() < 1e-7);
        assert!((z - Complex64::new(-0.5 / 5f64.sqrt(), 1.0 / 5f64.sqrt())).norm() < 1e-15);
        assert_eq!(
            embed(PhaseCoords::new(1.0, 0.0)).unwrap().value(),
            Complex64::new(0.5, 0.0)
        );
        let z = embed(PhaseCoords::new(0.0, 1.0)).unwrap().value();
        assert!(z.re.abs() < 1e-16 && z.im == 0.5);
        assert!(embed(PhaseCoords::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn generator_values() {
        let beta = BETA_11;
        let g1 = generator(Generator::G1, beta).unwrap();
        // cosh / sinh of -1/sqrt(5), evaluated at 30 digits
        assert!((g1.alpha.re - 1.1016778175486346).abs() < 1e-15);
        assert!((g1.xi.re - -0.46227049838673754).abs() < 1e-15);
        assert_eq!((g1.alpha.im, g1.xi.im), (0.0, 0.0));
        assert_eq!(
            generator(Generator::G2, 0.0).unwrap(),
            Su11Element::IDENTITY
        );
        assert!(generator(Generator::G1, f64::NAN).is_err());
    }

    #[test]
    fn inverse_of_generators() {
        assert_eq!(
            inverse(&Su11Element::IDENTITY).unwrap(),
            Su11Element::IDENTITY
        );
        let g = generator(Generator::G1, 0.7).unwrap();
        let gi = inverse(&g).unwrap();
        assert_eq!(gi.alpha, Complex64::new(0.7f64.cos().cosh(), 0.0));
        assert_eq!(gi.xi, Complex64::new(-0.7f64.cos().sinh(), 0.0));
        assert_eq!(inverse(&gi).unwrap(), g);
        let prod = g.compose(&gi);
        assert!((prod.alpha - 1.0).norm() < 1e-14 && prod.xi.norm() < 1e-14);
    }

    #[test]
    fn inverse_rejects_non_members() {
        let bad = Su11Element {
            alpha: Complex64::new(2.0, 0.0),
            xi: Complex64::new(0.0, 0.0),
        };
        assert!(matches!(inverse(&bad), Err(GeoError::InvalidElement(_))));
        assert!(mobius(&bad, DiskPoint(Complex64::new(0.1, 0.0))).is_err());
        assert!(Su11Element::new(Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0)).is_err());
    }

    #[test]
    fn identity_acts_trivially() {
        let z = DiskPoint::new(Complex64::new(0.3, -0.6)).unwrap();
        assert_eq!(mobius(&Su11Element::IDENTITY, z).unwrap(), z);
    }

    #[test]
    fn g1_on_worked_example() {
        let g1 = generator(Generator::G1, BETA_11).unwrap();
        let z = DiskPoint::on_embedding_circle(BETA_11).unwrap();
        let w = mobius(&g1, z).unwrap();
        assert!(
            (w.0 - Complex64::new(-0.6394, 0.2992)).norm() < 1e-4,
            "{w:?}"
        );
        assert!((w.modulus() - 0.706).abs() < 1e-3);
    }

    #[test]
    fn action_numerator_expansion() {
        // Expanded numerator and denominator of g1.z at embedded points.
        for i in 0..64 {
            let beta = PI * (i as f64 + 0.5) / 64.0;
            let (s, c) = beta.sin_cos();
            let (ch, sh) = (c.cosh(), c.sinh());
            let num = Complex64::new(0.5 * ch * c + sh, 0.5 * ch * s);
            let den = Complex64::new(0.5 * sh * c + ch, 0.5 * sh * s);
            let g1 = generator(Generator::G1, beta).unwrap();
            let z = DiskPoint::on_embedding_circle(beta).unwrap();
            assert!((g1.alpha * z.0 + g1.xi - num).norm() < 1e-12);
            assert!((g1.xi.conj() * z.0 + g1.alpha.conj() - den).norm() < 1e-12);
            assert!((mobius(&g1, z).unwrap().0 - num / den).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_points_outside_disk() {
        assert!(DiskPoint::new(Complex64::new(1.0, 0.0)).is_err());
        assert!(mobius(&Su11Element::IDENTITY, DiskPoint(Complex64::new(0.0, 1.5))).is_err());
    }
}

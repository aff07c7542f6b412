//! The fully connected layer built from a phase angle `beta`.
//!
//! Input `Z = (cos beta, sin beta) / 2` is the embedded disk point, the
//! rotation block is `exp(beta Lambda)`, the output `Z'` is the activation of
//! the disk point, and the translation is whatever makes
//! `(Z', 1) = W (Z, 1)` hold exactly.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::disk::{beta_angle, embed, DiskPoint};
use crate::error::{GeoError, Result};
use crate::exp_family::{
    dual_params, fisher_inverse, potential, to_natural, FisherMatrix, NaturalParams, SourceParams,
};
use crate::flow::gradient_rhs;
use crate::hamiltonian::{bivector_exp, equivalence_residual, hamiltonian, to_phase, PhaseCoords};

/// Residual above which the pipeline refuses to build a layer.
pub const EQUIVALENCE_TOL: f64 = 1e-10;

/// Which activation produces `Z'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActivationMode {
    /// `e^{Re z} (cos(2 Im z), sin(2 Im z))`; at embedded points this is
    /// `e^{cos(beta)/2} (cos(sin beta), sin(sin beta))`.
    #[default]
    Paper,
    /// The complex exponential `e^z`.
    Exp,
}

impl fmt::Display for ActivationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ActivationMode::Paper => "paper",
            ActivationMode::Exp => "exp",
        })
    }
}

impl FromStr for ActivationMode {
    type Err = GeoError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(ActivationMode::Paper),
            "exp" => Ok(ActivationMode::Exp),
            other => Err(GeoError::Argument(format!(
                "unknown activation mode {other:?} (expected paper or exp)"
            ))),
        }
    }
}

/// Homogeneous SE(2) matrix `[[Omega, t], [0, 0, 1]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SE2Weight(Matrix3<f64>);

impl SE2Weight {
    pub fn from_parts(rotation: &Matrix2<f64>, translation: &Vector2<f64>) -> Self {
        #[rustfmt::skip]
        let m = Matrix3::new(
            rotation[(0, 0)], rotation[(0, 1)], translation[0],
            rotation[(1, 0)], rotation[(1, 1)], translation[1],
            0.0, 0.0, 1.0,
        );
        Self(m)
    }

    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn rotation(&self) -> Matrix2<f64> {
        self.0.fixed_view::<2, 2>(0, 0).into_owned()
    }

    pub fn translation(&self) -> Vector2<f64> {
        self.0.fixed_view::<2, 1>(0, 2).into_owned()
    }

    /// `self * other`; the bottom row stays `(0, 0, 1)` exactly.
    pub fn compose(&self, other: &Self) -> Self {
        let rot = self.rotation() * other.rotation();
        let trans = self.rotation() * other.translation() + self.translation();
        Self::from_parts(&rot, &trans)
    }

    /// Row-major entries `w_{i,j}`.
    pub fn row_major(&self) -> [f64; 9] {
        let m = &self.0;
        [
            m[(0, 0)],
            m[(0, 1)],
            m[(0, 2)],
            m[(1, 0)],
            m[(1, 1)],
            m[(1, 2)],
            m[(2, 0)],
            m[(2, 1)],
            m[(2, 2)],
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayerState {
    pub z_in: Vector2<f64>,
    pub z_out: Vector2<f64>,
    pub beta: f64,
    pub mode: ActivationMode,
    pub weight: SE2Weight,
}

impl LayerState {
    pub fn homogeneous_input(&self) -> Vector3<f64> {
        Vector3::new(self.z_in[0], self.z_in[1], 1.0)
    }
}

/// Activation applied to a disk point.
pub fn activation(z: DiskPoint, mode: ActivationMode) -> Result<Complex64> {
    let z = DiskPoint::new(z.value())?.value();
    let phase = match mode {
        ActivationMode::Exp => z.im,
        ActivationMode::Paper => 2.0 * z.im,
    };
    let (s, c) = phase.sin_cos();
    let r = z.re.exp();
    Ok(Complex64::new(r * c, r * s))
}

/// Builds `W` for the disk angle `beta`.
pub fn build_layer(beta: f64, mode: ActivationMode) -> Result<LayerState> {
    let point = DiskPoint::on_embedding_circle(beta)?;
    let z_in = Vector2::new(point.value().re, point.value().im);
    let omega = bivector_exp(beta)?;
    let out = activation(point, mode)?;
    let z_out = Vector2::new(out.re, out.im);
    let t = z_out - omega.matrix() * z_in;
    let weight = SE2Weight::from_parts(omega.matrix(), &t);

    let state = LayerState {
        z_in,
        z_out,
        beta,
        mode,
        weight,
    };
    let applied = apply_layer(&weight, &state.homogeneous_input())?;
    let residual = (applied.fixed_rows::<2>(0) - z_out).amax();
    if residual > 1e-14 {
        return Err(GeoError::Consistency {
            what: "layer equation W (Z, 1) = (Z', 1)",
            residual,
        });
    }
    Ok(state)
}

/// Homogeneous product `W (z1, z2, 1)`; component `k` is the neuron sum
/// `S_k = sum_i w_{k,i} z_i`.
pub fn apply_layer(w: &SE2Weight, input: &Vector3<f64>) -> Result<Vector3<f64>> {
    if input[2] != 1.0 {
        return Err(GeoError::Argument(format!(
            "homogeneous input must have third component 1, got {}",
            input[2]
        )));
    }
    Ok(w.matrix() * input)
}

/// Every intermediate quantity of the construction from `(mu, sigma)` to the layer.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineRun {
    pub source: SourceParams,
    pub theta: NaturalParams,
    pub potential: f64,
    pub fisher_inverse: FisherMatrix,
    pub gradient: Vector2<f64>,
    pub equivalence_residual: f64,
    pub phase: PhaseCoords,
    pub hamiltonian: f64,
    pub beta: f64,
    pub z: DiskPoint,
    pub layer: LayerState,
    pub output: Vector3<f64>,
}

/// Runs the full construction and keeps the intermediate values.
pub fn pipeline_trace(p: SourceParams, mode: ActivationMode) -> Result<PipelineRun> {
    let source = SourceParams::new(p.mu, p.sigma)?;
    let theta = to_natural(source)?;
    start_from_natural(source, theta, mode)
}

/// Same as [`pipeline_trace`], entered directly at natural parameters.
pub fn pipeline_from_natural(theta: NaturalParams, mode: ActivationMode) -> Result<PipelineRun> {
    let source = crate::exp_family::to_source(theta)?;
    start_from_natural(source, theta, mode)
}

fn start_from_natural(
    source: SourceParams,
    theta: NaturalParams,
    mode: ActivationMode,
) -> Result<PipelineRun> {
    theta.validate()?;
    let potential = potential(theta)?;
    dual_params(theta)?;
    let fisher_inverse = fisher_inverse(theta)?;
    let gradient = gradient_rhs(theta)?;

    let phase = to_phase(theta)?;
    let equivalence_residual = equivalence_residual(theta)?;
    if equivalence_residual >= EQUIVALENCE_TOL {
        return Err(GeoError::Consistency {
            what: "gradient flow pushed into (P, Q) equals Lambda grad H",
            residual: equivalence_residual,
        });
    }
    let hamiltonian = hamiltonian(phase)?;
    let beta = beta_angle(phase)?;
    let z = embed(phase)?;

    let layer = build_layer(beta, mode)?;
    let output = apply_layer(&layer.weight, &layer.homogeneous_input())?;

    Ok(PipelineRun {
        source,
        theta,
        potential,
        fisher_inverse,
        gradient,
        equivalence_residual,
        phase,
        hamiltonian,
        beta,
        z,
        layer,
        output,
    })
}

/// `(mu, sigma)` to the layer.
pub fn pipeline(p: SourceParams, mode: ActivationMode) -> Result<LayerState> {
    Ok(pipeline_trace(p, mode)?.layer)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkNode {
    pub name: String,
    pub value: f64,
}

/// Edge from input node `z_{col}` to output node `z'_{row}` carrying `w_{row,col}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkEdge {
    pub from: String,
    pub to: String,
    pub row: usize,
    pub col: usize,
    pub weight: f64,
}

/// Three inputs, three outputs and nine weighted edges.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkDescription {
    pub inputs: Vec<NetworkNode>,
    pub outputs: Vec<NetworkNode>,
    pub edges: Vec<NetworkEdge>,
    pub sums: Vec<f64>,
}

pub fn export_network(s: &LayerState) -> NetworkDescription {
    let input = s.homogeneous_input();
    let sums = s.weight.matrix() * input;
    let inputs = (0..3)
        .map(|i| NetworkNode {
            name: format!("z{}", i + 1),
            value: input[i],
        })
        .collect();
    let outputs = (0..3)
        .map(|k| NetworkNode {
            name: format!("z'{}", k + 1),
            value: sums[k],
        })
        .collect();
    let w = s.weight.matrix();
    let edges = (0..3)
        .flat_map(|row| {
            (0..3).map(move |col| NetworkEdge {
                from: format!("z{}", col + 1),
                to: format!("z'{}", row + 1),
                row: row + 1,
                col: col + 1,
                weight: w[(row, col)],
            })
        })
        .collect();
    NetworkDescription {
        inputs,
        outputs,
        edges,
        sums: sums.iter().copied().collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BETA_11: f64 = 2.0344439357957027;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() < tol
    }

    #[test]
    fn activation_examples() {
        let z = DiskPoint::new(Complex64::new(0.5, 0.0)).unwrap();
        for mode in [ActivationMode::Paper, ActivationMode::Exp] {
            let f = activation(z, mode).unwrap();
            assert!(close(f.re, 1.6487213, 1e-7) && f.im == 0.0);
        }
        let z = DiskPoint::new(Complex64::new(-0.2236068, 0.4472136)).unwrap();
        let f = activation(z, ActivationMode::Paper).unwrap();
        assert!(
            close(f.re, 0.5006, 1e-4) && close(f.im, 0.6236, 1e-4),
            "{f}"
        );
        // e^z at 30 digits: 0.72099040251... + 0.34580364174...i
        let f = activation(z, ActivationMode::Exp).unwrap();
        assert!(
            close(f.re, 0.7209904, 1e-7) && close(f.im, 0.3458036, 1e-7),
            "{f}"
        );
        assert!((f - z.value().exp()).norm() < 1e-15);
    }

    #[test]
    fn layer_at_zero() {
        let s = build_layer(0.0, ActivationMode::Paper).unwrap();
        assert_eq!(s.z_in, Vector2::new(0.5, 0.0));
        assert_eq!(s.weight.rotation(), Matrix2::identity());
        assert!(close(s.z_out[0], 1.6487213, 1e-7) && s.z_out[1] == 0.0);
        let t = s.weight.translation();
        assert!(close(t[0], 1.1487213, 1e-7) && t[1] == 0.0);
    }

    #[test]
    fn layer_at_worked_beta() {
        let s = build_layer(BETA_11, ActivationMode::Paper).unwrap();
        let oz = s.weight.rotation() * s.z_in;
        assert!(
            close(oz[0], -0.3, 1e-15) && close(oz[1], -0.4, 1e-15),
            "{oz}"
        );
        let t = s.weight.translation();
        assert!(
            close(t[0], 0.8006, 1e-4) && close(t[1], 1.0236, 1e-4),
            "{t}"
        );
        assert!((t - (s.z_out - oz)).amax() <= 1e-15);
    }

    #[test]
    fn apply_examples() {
        let v = Vector3::new(0.3, -0.2, 1.0);
        assert_eq!(apply_layer(&SE2Weight::identity(), &v).unwrap(), v);
        let s = build_layer(BETA_11, ActivationMode::Paper).unwrap();
        let out = apply_layer(&s.weight, &Vector3::new(-0.2236068, 0.4472136, 1.0)).unwrap();
        assert!(close(out[0], 0.5006, 1e-4) && close(out[1], 0.6236, 1e-4));
        assert_eq!(out[2], 1.0);
        assert!(apply_layer(&s.weight, &Vector3::new(0.1, 0.2, 0.5)).is_err());
    }

    #[test]
    fn composition_keeps_bottom_row() {
        let a = build_layer(0.4, ActivationMode::Paper).unwrap().weight;
        let b = build_layer(2.9, ActivationMode::Exp).unwrap().weight;
        let c = a.compose(&b);
        let row = c.matrix().row(2);
        assert_eq!((row[0], row[1], row[2]), (0.0, 0.0, 1.0));
        assert!((c.matrix() - a.matrix() * b.matrix()).amax() < 1e-14);
    }

    #[test]
    fn pipeline_worked_example() {
        let run =
            pipeline_trace(SourceParams::new(1.0, 1.0).unwrap(), ActivationMode::Paper).unwrap();
        assert!(close(run.beta, 2.0344439, 1e-7));
        let w = run.layer.weight.row_major();
        assert!(close(w[0], -0.4472136, 1e-7) && close(w[1], -0.8944272, 1e-7));
        assert!(close(w[2], 0.8006, 1e-4) && close(w[5], 1.0236, 1e-4));
        assert!(run.equivalence_residual < 1e-10);
        assert_eq!(run.hamiltonian, 2.0);
    }

    #[test]
    fn pipeline_half_mu() {
        let run =
            pipeline_trace(SourceParams::new(0.5, 1.0).unwrap(), ActivationMode::Paper).unwrap();
        assert_eq!((run.theta.theta1, run.theta.theta2), (0.5, -0.5));
        assert_eq!(run.phase, PhaseCoords::new(-2.0, 1.25));
    }

    #[test]
    fn pipeline_errors() {
        let err = pipeline(
            SourceParams {
                mu: 0.0,
                sigma: 1.0,
            },
            ActivationMode::Paper,
        )
        .unwrap_err();
        assert!(matches!(err, GeoError::ChartSingularity(_)));
        let err = pipeline(
            SourceParams {
                mu: 1.0,
                sigma: 0.0,
            },
            ActivationMode::Paper,
        )
        .unwrap_err();
        assert!(matches!(err, GeoError::Domain(_)));
        assert!(build_layer(f64::NAN, ActivationMode::Paper).is_err());
    }

    #[test]
    fn export_structure() {
        let s = build_layer(0.0, ActivationMode::Paper).unwrap();
        let net = export_network(&s);
        assert_eq!(net.edges.len(), 9);
        assert_eq!((net.inputs.len(), net.outputs.len()), (3, 3));
        let w = |r: usize, c: usize| {
            net.edges
                .iter()
                .find(|e| e.row == r && e.col == c)
                .unwrap()
                .weight
        };
        assert_eq!((w(3, 1), w(3, 2), w(3, 3)), (0.0, 0.0, 1.0));
        assert_eq!((w(1, 1), w(2, 2), w(1, 2), w(2, 1)), (1.0, 1.0, 0.0, 0.0));

        let s = build_layer(BETA_11, ActivationMode::Paper).unwrap();
        let net = export_network(&s);
        let w = |r: usize, c: usize| {
            net.edges
                .iter()
                .find(|e| e.row == r && e.col == c)
                .unwrap()
                .weight
        };
        assert!(close(w(1, 3), 0.8006, 1e-4) && close(w(2, 3), 1.0236, 1e-4));
        assert_eq!(net.sums[2], 1.0);
        assert_eq!(net.sums[0], net.outputs[0].value);
    }

    #[test]
    fn modes_differ_off_axis() {
        let a = build_layer(0.0, ActivationMode::Paper).unwrap();
        let b = build_layer(0.0, ActivationMode::Exp).unwrap();
        assert_eq!(a.z_out, b.z_out);
        let a = build_layer(1.0, ActivationMode::Paper).unwrap();
        let b = build_layer(1.0, ActivationMode::Exp).unwrap();
        assert!((a.z_out - b.z_out).amax() > 0.0);
    }

    #[test]
    fn mode_parsing() {
        assert_eq!(
            "paper".parse::<ActivationMode>().unwrap(),
            ActivationMode::Paper
        );
        assert_eq!(
            "exp".parse::<ActivationMode>().unwrap(),
            ActivationMode::Exp
        );
        assert!("relu".parse::<ActivationMode>().is_err());
    }
}

//! Serializable views of layers, trajectories and Mobius actions.
//!
//! Shared by the command-line tool and the browser bindings so both emit the
//! same JSON. Matrices are flattened row-major with explicit `rows`/`cols`.
//! Constructors refuse non-finite values, so every record serializes to
//! plain JSON numbers.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix2, Matrix3, Vector2};
use num_complex::Complex64;
use serde::Serialize;

use crate::disk::{generator, inverse, mobius, Generator, Su11Element};
use crate::error::{GeoError, Result};
use crate::flow::Trajectory;
use crate::layer::{export_network, NetworkDescription, PipelineRun};

fn ensure_finite(what: &str, values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(GeoError::NumericalSingularity(format!(
            "non-finite value in {what}"
        )))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixRecord {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl From<&Matrix2<f64>> for MatrixRecord {
    fn from(m: &Matrix2<f64>) -> Self {
        Self {
            rows: 2,
            cols: 2,
            data: vec![m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]],
        }
    }
}

impl From<&Matrix3<f64>> for MatrixRecord {
    fn from(m: &Matrix3<f64>) -> Self {
        let data = (0..3)
            .flat_map(|r| (0..3).map(move |c| m[(r, c)]))
            .collect();
        Self {
            rows: 3,
            cols: 3,
            data,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexRecord {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexRecord {
    fn from(z: Complex64) -> Self {
        // adding +0.0 folds -0.0 into 0.0
        Self {
            re: z.re + 0.0,
            im: z.im + 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThetaRecord {
    pub theta1: f64,
    pub theta2: f64,
}

fn pair(v: &Vector2<f64>) -> [f64; 2] {
    [v[0], v[1]]
}

/// Output of the `build-layer` command.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[allow(non_snake_case)]
pub struct BuildLayerRecord {
    pub theta: ThetaRecord,
    pub P: f64,
    pub Q: f64,
    pub H: f64,
    pub beta: f64,
    pub z: ComplexRecord,
    pub Omega: MatrixRecord,
    pub t: [f64; 2],
    pub Z: [f64; 2],
    pub Zprime: [f64; 2],
    pub W: MatrixRecord,
    pub mode: String,
    pub network: NetworkDescription,
}

impl BuildLayerRecord {
    pub fn from_run(run: &PipelineRun) -> Result<Self> {
        let layer = &run.layer;
        let w = layer.weight.matrix();
        let mut values = vec![
            run.theta.theta1,
            run.theta.theta2,
            run.phase.P,
            run.phase.Q,
            run.hamiltonian,
            run.beta,
            run.z.value().re,
            run.z.value().im,
            layer.z_out[0],
            layer.z_out[1],
        ];
        values.extend(w.iter().copied());
        ensure_finite("layer", &values)?;
        Ok(Self {
            theta: ThetaRecord {
                theta1: run.theta.theta1,
                theta2: run.theta.theta2,
            },
            P: run.phase.P,
            Q: run.phase.Q,
            H: run.hamiltonian,
            beta: run.beta,
            z: run.z.value().into(),
            Omega: (&layer.weight.rotation()).into(),
            t: pair(&layer.weight.translation()),
            Z: pair(&layer.z_in),
            Zprime: pair(&layer.z_out),
            W: w.into(),
            mode: layer.mode.to_string(),
            network: export_network(layer),
        })
    }
}

/// One trajectory row; field names match the CSV header `t,theta1,theta2,P,Q,H`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[allow(non_snake_case)]
pub struct FlowRow {
    pub t: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub P: f64,
    pub Q: f64,
    pub H: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowRecord {
    pub step: f64,
    pub samples: Vec<FlowRow>,
    pub terminated: Option<String>,
}

impl FlowRecord {
    pub fn from_trajectory(tr: &Trajectory) -> Result<Self> {
        let samples: Vec<FlowRow> = tr
            .samples
            .iter()
            .map(|s| FlowRow {
                t: s.time,
                theta1: s.theta.theta1,
                theta2: s.theta.theta2,
                P: s.phase.P,
                Q: s.phase.Q,
                H: s.hamiltonian,
            })
            .collect();
        for r in &samples {
            ensure_finite("trajectory", &[r.t, r.theta1, r.theta2, r.P, r.Q, r.H])?;
        }
        Ok(Self {
            step: tr.step,
            samples,
            terminated: tr.terminated_early.as_ref().map(|t| t.to_string()),
        })
    }
}

/// Generator selection including inverses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorChoice {
    G1,
    G2,
    G1Inv,
    G2Inv,
}

impl GeneratorChoice {
    pub fn element(&self, beta: f64) -> Result<Su11Element> {
        match self {
            GeneratorChoice::G1 => generator(Generator::G1, beta),
            GeneratorChoice::G2 => generator(Generator::G2, beta),
            GeneratorChoice::G1Inv => inverse(&generator(Generator::G1, beta)?),
            GeneratorChoice::G2Inv => inverse(&generator(Generator::G2, beta)?),
        }
    }
}

impl fmt::Display for GeneratorChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GeneratorChoice::G1 => "g1",
            GeneratorChoice::G2 => "g2",
            GeneratorChoice::G1Inv => "g1inv",
            GeneratorChoice::G2Inv => "g2inv",
        })
    }
}

impl FromStr for GeneratorChoice {
    type Err = GeoError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "g1" => Ok(GeneratorChoice::G1),
            "g2" => Ok(GeneratorChoice::G2),
            "g1inv" => Ok(GeneratorChoice::G1Inv),
            "g2inv" => Ok(GeneratorChoice::G2Inv),
            other => Err(GeoError::Argument(format!(
                "unknown generator {other:?} (expected g1, g2, g1inv or g2inv)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ElementRecord {
    pub alpha: ComplexRecord,
    pub xi: ComplexRecord,
}

/// Output of the `mobius` command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MobiusRecord {
    pub generator: String,
    pub beta: f64,
    pub z: ComplexRecord,
    pub g: ElementRecord,
    pub gz: ComplexRecord,
    pub gz_modulus: f64,
}

impl MobiusRecord {
    /// Applies the chosen generator, built at the pipeline's `beta`, to the
    /// pipeline's embedded point.
    pub fn from_run(run: &PipelineRun, choice: GeneratorChoice) -> Result<Self> {
        let g = choice.element(run.beta)?;
        let gz = mobius(&g, run.z)?;
        ensure_finite(
            "Mobius action",
            &[
                g.alpha.re,
                g.alpha.im,
                g.xi.re,
                g.xi.im,
                gz.value().re,
                gz.value().im,
            ],
        )?;
        Ok(Self {
            generator: choice.to_string(),
            beta: run.beta,
            z: run.z.value().into(),
            g: ElementRecord {
                alpha: g.alpha.into(),
                xi: g.xi.into(),
            },
            gz: gz.value().into(),
            gz_modulus: gz.modulus(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exp_family::SourceParams;
    use crate::layer::{pipeline_trace, ActivationMode};

    fn run11() -> PipelineRun {
        pipeline_trace(SourceParams::new(1.0, 1.0).unwrap(), ActivationMode::Paper).unwrap()
    }

    #[test]
    fn layer_record_keys() {
        let rec = BuildLayerRecord::from_run(&run11()).unwrap();
        let v = serde_json::to_value(&rec).unwrap();
        for key in [
            "theta", "P", "Q", "beta", "z", "Omega", "t", "Z", "Zprime", "W", "mode",
        ] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["W"]["rows"], 3);
        assert_eq!(&rec.W.data[6..], &[0.0, 0.0, 1.0]);
        assert_eq!(v["mode"], "paper");
    }

    #[test]
    fn mobius_record_inverse_round_trip() {
        let run = run11();
        let inv = MobiusRecord::from_run(&run, GeneratorChoice::G1Inv).unwrap();
        let g1 = GeneratorChoice::G1.element(run.beta).unwrap();
        let back = mobius(
            &g1,
            crate::disk::DiskPoint::new(Complex64::new(inv.gz.re, inv.gz.im)).unwrap(),
        )
        .unwrap();
        assert!((back.value() - run.z.value()).norm() < 1e-12);
    }

    #[test]
    fn generator_parsing() {
        for s in ["g1", "g2", "g1inv", "g2inv"] {
            assert_eq!(s.parse::<GeneratorChoice>().unwrap().to_string(), s);
        }
        assert!("g3".parse::<GeneratorChoice>().is_err());
    }
}

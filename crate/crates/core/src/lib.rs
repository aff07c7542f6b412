//! Neural layer construction on the lognormal statistical manifold.
//!
//! The chain runs from the lognormal parameters `(mu, sigma)` through the
//! natural parameters and Fisher metric ([`exp_family`]), the Fisher-gradient
//! flow ([`flow`]), the Hamiltonian `(P, Q)` chart ([`hamiltonian`]), the
//! Poincare disk with its SU(1,1) action ([`disk`]) and finally the SE(2)
//! weight matrix of the layer ([`layer`]).
//!
//! ```
//! use lognet_core::{pipeline, ActivationMode, SourceParams};
//!
//! let layer = pipeline(SourceParams::new(1.0, 1.0)?, ActivationMode::Paper)?;
//! assert_eq!(layer.weight.matrix()[(2, 2)], 1.0);
//! # Ok::<(), lognet_core::GeoError>(())
//! ```

pub mod disk;
pub mod error;
pub mod exp_family;
pub mod flow;
pub mod hamiltonian;
pub mod layer;
pub mod records;
pub mod verify;

pub use disk::{beta_angle, embed, generator, inverse, mobius, DiskPoint, Generator, Su11Element};
pub use error::{GeoError, Result};
pub use exp_family::{
    dual_params, dual_potential, fisher, fisher_fd, fisher_inverse, legendre_residual, log_pdf,
    potential, standard_grid, to_natural, to_source, DensityForm, DualParams, FisherMatrix,
    NaturalParams, SourceParams,
};
pub use flow::{gradient_rhs, integrate, Sample, Termination, Trajectory};
pub use hamiltonian::{
    bivector_exp, from_phase, hamiltonian, hamiltonian_vector_field, pushforward_rhs, to_phase,
    PhaseCoords, RotationMatrix, POISSON,
};
pub use layer::{
    activation, apply_layer, build_layer, export_network, pipeline, pipeline_from_natural,
    pipeline_trace, ActivationMode, LayerState, NetworkDescription, PipelineRun, SE2Weight,
};

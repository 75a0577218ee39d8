//! Discontinuous Galerkin solvers for the semilinear wave equation
//! `u_tt - u_xx = |u|^p` written as a first-order split system, with
//! blow-up detection, an upwind finite-difference reference and
//! benchmark problems with closed-form blow-up solutions.

pub mod benchmarks;
pub mod blowup;
pub mod dg;
pub mod error;
pub mod fd;
pub mod history;
pub mod linalg;
pub mod poly;
pub mod quadrature;
pub mod reference_element;
pub mod scalar;
pub mod scheme;
pub mod validation;
pub mod xi;

pub use blowup::{run_until_blowup, BlowUpResult, RunLimits};
pub use dg::{DgScheme, FieldState, Mesh, ProblemConfig, TimeStepPolicy};
pub use error::{Error, Result};
pub use fd::FdScheme;
pub use history::{RunHistory, RunStatus, StepRecord};
pub use reference_element::ReferenceElement;
pub use scalar::Real;
pub use scheme::{Scheme, StepReport};

pub type ReferenceElementF64 = ReferenceElement<f64>;
pub type ReferenceElementF32 = ReferenceElement<f32>;
pub type DgSchemeF64 = DgScheme<f64>;
pub type DgSchemeF32 = DgScheme<f32>;
pub type MeshF64 = Mesh<f64>;
pub type FieldStateF64 = FieldState<f64>;
pub type ProblemConfigF64 = ProblemConfig<f64>;
pub type FdSchemeF64 = FdScheme<f64>;
pub type FdSchemeF32 = FdScheme<f32>;

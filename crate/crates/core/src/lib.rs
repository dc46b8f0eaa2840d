//! Restricted elliptic solid-on-solid R-matrices of types A, B, C and D,
//! viewed as operators on graded path spaces over a finite groupoid of
//! restricted weights, with numerical checks of their algebraic relations.

pub mod boltzmann;
pub mod error;
pub mod graded;
pub mod groupoid;
pub mod reps;
pub mod rmatrix;
pub mod theta;
pub mod verify;

pub use boltzmann::{SqrtMode, WeightContext};
pub use error::{Error, Result};
pub use graded::{GradedOperator, Path};
pub use groupoid::{Family, Groupoid, Kind, ModelType, ObjId, Step};
pub use reps::{Rep, ScalarFn};
pub use rmatrix::{Model, RKind};
pub use theta::ThetaContext;
pub use verify::{CheckReport, SuiteConfig, SuiteReport};

//! Exact-arithmetic toolkit for curved shifted L-infinity algebras: Maurer–Cartan obstruction
//! theory through the spectral sequence of the filtration, an iterative twisting solver, and
//! the deformation complex of A-infinity morphisms with an intrinsic formality check.

pub mod ainfty;
pub mod defcomplex;
pub mod fixtures;
pub mod generate;
pub mod graded;
pub mod io;
pub mod koszul;
pub mod linalg;
pub mod linfty;
pub mod power;
pub mod solver;
pub mod specseq;

pub use ainfty::{AInftyAlgebra, AInftyBuilder, AInftyError, BarCoalgebra, BarDifferential};
pub use graded::{BasisVector, Element, FiltrationWeight, GradedSpace, LinearMap, Scalar, SpaceError};
pub use linfty::{AlgebraBuilder, AlgebraError, CurvedAlgebra, RelationReport};

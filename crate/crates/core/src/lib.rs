//! Reconstruction of compact quantum group relations from collections of
//! intertwiners: tensor-power operators, closure under the category
//! operations, commutants, the annihilator ideal and its Hopf structure.
//!
//! Everything is generic over the real scalar type; the aliases below fix it
//! to `f64` (or `f32`) for callers who do not care.

pub mod algebra;
pub mod closure;
pub mod commutant;
pub mod error;
pub mod hopf;
pub mod linalg;
pub mod scalar;
pub mod tensor;
pub mod verify;
pub mod word;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Complex64 = scalar::C<f64>;
pub type InterOp64 = tensor::InterOp<f64>;
pub type InterOp32 = tensor::InterOp<f32>;
pub type FMatrix64 = tensor::FMatrix<f64>;
pub type FMatrix32 = tensor::FMatrix<f32>;
pub type Collection64 = closure::Collection<f64>;
pub type Collection32 = closure::Collection<f32>;
pub type OpSpace64 = closure::OpSpace<f64>;
pub type AlgebraElement64 = algebra::AlgebraElement<f64>;
pub type CommutantBasis64 = commutant::CommutantBasis<f64>;
pub type IdealBasis64 = hopf::IdealBasis<f64>;
pub type Presentation64 = hopf::Presentation<f64>;
pub type Word64 = word::Word<f64>;

//! Symmetric tensor algebra: second- and fourth-order types, spectral
//! decomposition, and the regularized positive/negative split.

pub mod spectral;
pub mod split;
pub mod sym2;
pub mod sym4;

pub use spectral::{euler_zyx, spectral, spectral_pow, Spectral, EIGEN_GAP_TOL};
pub use split::{pn_split, pn_split_derivative, pn_split_derivative_with, pn_split_with, SplitConfig};
pub use sym2::SymTensor2;
pub use sym4::SymTensor4;

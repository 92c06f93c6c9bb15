pub mod canonical;
pub mod error;
pub mod exterior;
pub mod hamiltonian;
pub mod homogeneity;
pub mod linalg;
pub mod multi_index;
pub mod orthogonality;
pub mod poly;
pub mod random;
pub mod scenario;
pub mod scalar;

pub use error::{Error, Result};

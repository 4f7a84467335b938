pub mod analysis;
pub mod dielectric;
pub mod error;
pub mod greens;
pub mod oracle;
pub mod photon;
pub mod profile;
pub mod quadrature;
pub mod special;
pub mod vacuum;
pub mod vector;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use profile::{Profile1D, Profile3D, ProfileShape};
pub use vector::{Tensor3C, Vec3};

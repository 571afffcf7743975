pub mod antideriv;
pub mod error;
pub mod hermite;
pub mod quadrature;
pub mod special;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use hermite::HermiteBasis;
pub use quadrature::{QuadratureRule, RuleSizes};
pub use spectral::{MultiIndex, SpectralState};
pub use verify::{CheckSpec, EstimateId, EstimateReport, ScanConfig, Status};

pub use num_complex::Complex64;

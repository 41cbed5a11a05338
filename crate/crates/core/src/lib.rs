pub mod angle;
pub mod basis;
pub mod error;
pub mod frqdt;
pub mod quadrature;
pub mod quat;
pub mod report;
pub mod special;
pub mod suites;
pub mod transform1d;
pub mod uncertainty;

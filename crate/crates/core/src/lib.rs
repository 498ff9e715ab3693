pub mod baker_akhiezer;
pub mod eigenfunction;
pub mod continuation;
pub mod contour;
pub mod degenerate_beta;
pub mod elliptic;
pub mod error;
pub mod linalg;
pub mod spectral_curve;
pub mod weierstrass_surface;

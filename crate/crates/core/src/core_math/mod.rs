//! Scalar special functions for the normal law and an adaptive quadrature
//! oracle.

mod normal;
mod quadrature;

pub use normal::{
    norm_cdf, norm_inv_cdf, norm_pdf, norm_sf, standard_normal_cdf, standard_normal_pdf,
    standard_normal_quantile, standard_normal_sf, Probability,
};
pub use quadrature::{integrate, Integral, QuadratureSettings};

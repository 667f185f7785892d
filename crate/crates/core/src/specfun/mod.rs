//! Special-function kernel: gamma family, regularized Gauss hypergeometric,
//! univariate and bivariate Meijer G.

mod bivariate;
mod complex;
mod gamma;
mod hyp2f1;
mod meijer;

pub use bivariate::{
    bivariate_meijer_g, bivariate_meijer_g_diag, BivariateDiagnostics, BivariateGSpec,
};
pub use complex::ln_gamma_c;
pub use gamma::{
    digamma, gamma, ln_gamma, pochhammer, reg_gamma_pq, reg_lower_gamma, reg_upper_gamma, rgamma,
    upper_inc_gamma, upper_inc_gamma_scaled, EULER_GAMMA,
};
pub use hyp2f1::{gauss_2f1, gauss_2f1_reg};
pub use meijer::{meijer_g, meijer_g_contour, MeijerGSpec};

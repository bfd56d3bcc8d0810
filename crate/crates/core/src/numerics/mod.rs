//! Numeric kernels shared by the rest of the crate.

pub mod kummer;
pub mod lambert;
pub mod ode;
pub mod poly;

pub use kummer::{kummer_1f1, kummer_1f1_prime};
pub use lambert::{lambert_w, lambert_w_prime, Branch as LambertBranch};
pub use ode::{integrate_ode, OdeOptions, OdeTrajectory};
pub use poly::{poly_roots, quadratic_roots, ComplexPoly};

pub use num_complex::Complex64;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

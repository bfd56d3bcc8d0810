//! Double-, bi- and tri-confluent Heun equations
//! `P(z) u'' + (γ + δz + εz²) u' + (αz − q) u = 0` with `P = z², z, 1`.

mod derivative;
mod eval;
mod series;
mod termination;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use derivative::{check_derivative_constraints, derivative_equation_check, DerivativeData};
pub use eval::{eval_heun, eval_heun_branch, integrate_curve, integrate_path, Branch, SERIES_RADIUS};
pub(crate) use series::series_jet;
pub use series::{raw_coeffs, recurrence_residuals, series_coeffs, Classification, SeriesSolution};
pub use termination::{coefficient_polys, termination_conditions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HeunFamily {
    Double,
    Bi,
    Tri,
}

impl HeunFamily {
    pub const ALL: [HeunFamily; 3] = [HeunFamily::Double, HeunFamily::Bi, HeunFamily::Tri];

    pub fn name(self) -> &'static str {
        match self {
            HeunFamily::Double => "double",
            HeunFamily::Bi => "bi",
            HeunFamily::Tri => "tri",
        }
    }

    /// Leading coefficient `P(z)`.
    pub fn p(self, z: Complex64) -> Complex64 {
        match self {
            HeunFamily::Double => z * z,
            HeunFamily::Bi => z,
            HeunFamily::Tri => Complex64::new(1.0, 0.0),
        }
    }

    pub fn dp(self, z: Complex64) -> Complex64 {
        match self {
            HeunFamily::Double => 2.0 * z,
            HeunFamily::Bi => Complex64::new(1.0, 0.0),
            HeunFamily::Tri => Complex64::new(0.0, 0.0),
        }
    }

    /// Whether `z = 0` is a singular point.
    pub fn singular_at_origin(self) -> bool {
        self != HeunFamily::Tri
    }
}

impl fmt::Display for HeunFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HeunFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "double" => Ok(HeunFamily::Double),
            "bi" => Ok(HeunFamily::Bi),
            "tri" => Ok(HeunFamily::Tri),
            other => Err(Error::InvalidInput(format!("unknown Heun family '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeunParams {
    pub family: HeunFamily,
    pub gamma: Complex64,
    pub delta: Complex64,
    pub epsilon: Complex64,
    pub alpha: Complex64,
    pub q: Complex64,
}

impl HeunParams {
    pub fn new(
        family: HeunFamily,
        gamma: Complex64,
        delta: Complex64,
        epsilon: Complex64,
        alpha: Complex64,
        q: Complex64,
    ) -> Result<Self> {
        let p = HeunParams {
            family,
            gamma,
            delta,
            epsilon,
            alpha,
            q,
        };
        if p.as_array().iter().all(|c| c.is_finite()) {
            Ok(p)
        } else {
            Err(Error::InvalidInput(format!("non-finite Heun parameters {p:?}")))
        }
    }

    pub fn as_array(&self) -> [Complex64; 5] {
        [self.gamma, self.delta, self.epsilon, self.alpha, self.q]
    }

    pub fn with_q(mut self, q: Complex64) -> Self {
        self.q = q;
        self
    }

    /// `γ + δz + εz²`.
    pub fn g(&self, z: Complex64) -> Complex64 {
        self.gamma + z * (self.delta + z * self.epsilon)
    }

    pub fn dg(&self, z: Complex64) -> Complex64 {
        self.delta + 2.0 * self.epsilon * z
    }

    /// Largest parameter modulus, used to scale tolerances.
    pub fn scale(&self) -> f64 {
        self.as_array().iter().map(|c| c.norm()).fold(1.0, f64::max)
    }
}

/// Right-hand side of the first-order system for `(u, u')`.
pub fn heun_rhs(
    params: &HeunParams,
    z: Complex64,
    state: (Complex64, Complex64),
) -> Result<(Complex64, Complex64)> {
    let (u, uz) = state;
    let p = params.family.p(z);
    if p.norm() == 0.0 {
        return Err(Error::singular_z(z, format!("{}-confluent Heun equation", params.family)));
    }
    let uzz = -(params.g(z) * uz + (params.alpha * z - params.q) * u) / p;
    Ok((uz, uzz))
}

/// `[u, u', u'', u''']` at `z` from the pair `(u, u')`.
pub fn heun_jet(params: &HeunParams, z: Complex64, u: Complex64, uz: Complex64) -> Result<[Complex64; 4]> {
    let (_, uzz) = heun_rhs(params, z, (u, uz))?;
    let p = params.family.p(z);
    let fam = params.family;
    let uzzz = -((fam.dp(z) + params.g(z)) * uzz
        + (params.dg(z) + params.alpha * z - params.q) * uz
        + params.alpha * u)
        / p;
    Ok([u, uz, uzz, uzzz])
}

/// Pointwise residual of the Heun equation for a supplied jet.
pub fn heun_residual(params: &HeunParams, z: Complex64, u: Complex64, uz: Complex64, uzz: Complex64) -> Complex64 {
    params.family.p(z) * uzz + params.g(z) * uz + (params.alpha * z - params.q) * u
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rhs_examples() {
        let z0 = c(0.0, 0.0);
        let tri = HeunParams::new(HeunFamily::Tri, z0, z0, z0, z0, z0).unwrap();
        assert_eq!(heun_rhs(&tri, c(0.3, 0.0), (c(1.0, 0.0), z0)).unwrap(), (z0, z0));

        let bi = HeunParams::new(HeunFamily::Bi, c(1.0, 0.0), z0, z0, z0, z0).unwrap();
        assert_eq!(
            heun_rhs(&bi, c(1.0, 0.0), (c(1.0, 0.0), c(1.0, 0.0))).unwrap(),
            (c(1.0, 0.0), c(-1.0, 0.0))
        );
        assert!(matches!(
            heun_rhs(&bi, z0, (c(1.0, 0.0), z0)),
            Err(Error::Singularity { .. })
        ));
    }

    #[test]
    fn double_rhs_at_unit_point() {
        // Parameters of the constant-amplitude cosh model with U0 = 3.
        let u0: f64 = 3.0;
        let p = HeunParams::new(HeunFamily::Double, c(0.0, -1.0), c(1.0, 1.0), c(0.0, -1.0), c(0.0, 0.0), c(-u0 * u0, 0.0)).unwrap();
        let (_, uzz) = heun_rhs(&p, c(1.0, 0.0), (c(1.0, 0.0), c(0.0, 0.0))).unwrap();
        assert!((uzz - c(-u0 * u0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn third_derivative_matches_difference() {
        let p = HeunParams::new(HeunFamily::Bi, c(0.4, 0.1), c(-0.3, 0.2), c(0.5, 0.0), c(0.2, -0.1), c(0.7, 0.0)).unwrap();
        let z = c(0.8, 0.3);
        let (u, uz) = (c(1.1, -0.2), c(0.3, 0.4));
        let jet = heun_jet(&p, z, u, uz).unwrap();
        // Advance the pair with a tiny Taylor step and difference u''.
        let h = 1e-5;
        let zp = z + h;
        let up = u + uz * h + jet[2] * h * h / 2.0 + jet[3] * h * h * h / 6.0;
        let uzp = uz + jet[2] * h + jet[3] * h * h / 2.0;
        let (_, uzz_p) = heun_rhs(&p, zp, (up, uzp)).unwrap();
        let fd = (uzz_p - jet[2]) / h;
        assert!((fd - jet[3]).norm() < 1e-4 * jet[3].norm().max(1.0));
    }
}

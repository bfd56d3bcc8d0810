//! Equations obeyed by weighted derivatives `v = w(z) u_z` of Heun solutions.

use num_complex::Complex64;

use super::{eval_heun, heun_jet, HeunFamily, HeunParams};
use crate::error::{Error, Result};

/// The point `z₀` and exponent `σ` entering the derivative equations.
/// The tri-confluent equation uses neither.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeData {
    pub z0: Complex64,
    pub sigma: Complex64,
}

const CONSTRAINT_TOL: f64 = 1e-10;

fn require(ok: bool, what: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Constraint(what()))
    }
}

/// Checks the side conditions under which the derivative equation takes its
/// simplified form.
pub fn check_derivative_constraints(p: &HeunParams, data: DerivativeData) -> Result<()> {
    let s = p.scale();
    let tol = CONSTRAINT_TOL * s * s;
    let DerivativeData { z0, sigma } = data;
    match p.family {
        HeunFamily::Tri => {
            require(p.q.norm() <= tol, || format!("q = {} must vanish", p.q))?;
            let r = p.alpha + p.epsilon - p.gamma * p.delta;
            require(r.norm() <= tol, || format!("alpha + epsilon - gamma*delta = {r} must vanish"))
        }
        HeunFamily::Bi => {
            let tol = tol * (1.0 + z0.norm_sqr()) * (1.0 + sigma.norm());
            let r1 = p.alpha * z0 - p.q;
            require(r1.norm() <= tol, || format!("z0 = {z0} is not q/alpha (residual {r1})"))?;
            let r2 = sigma - (p.gamma + p.delta * z0 + p.epsilon * z0 * z0);
            require(r2.norm() <= tol, || format!("sigma = {sigma} is not gamma + delta*z0 + epsilon*z0^2 (residual {r2})"))?;
            let r3 = (p.alpha + p.epsilon) * z0 - (p.delta + 2.0 * p.epsilon * z0) * sigma;
            require(r3.norm() <= tol, || format!("(alpha + epsilon)*z0 = (delta + 2*epsilon*z0)*sigma fails by {r3}"))
        }
        HeunFamily::Double => {
            let r1 = p.alpha + p.epsilon;
            require(r1.norm() <= tol, || format!("alpha = -epsilon fails by {r1}"))?;
            let r2 = p.q - p.delta / 2.0;
            require(r2.norm() <= tol, || format!("q = delta/2 fails by {r2}"))?;
            if p.epsilon.norm() == 0.0 {
                return Err(Error::Constraint("epsilon must be nonzero".into()));
            }
            let r3 = sigma - (p.gamma - p.delta * p.delta / (4.0 * p.epsilon));
            require(r3.norm() <= tol, || format!("sigma = gamma - delta^2/(4 epsilon) fails by {r3}"))?;
            let r4 = z0 * p.alpha - p.q;
            require(r4.norm() <= tol * (1.0 + z0.norm()), || format!("z0 = {z0} is not q/alpha (residual {r4})"))
        }
    }
}

/// `[v, v', v'']` for `v = w u_z` with the family's weight
/// (`e^{γz}`, `z^σ` or `e^{−σ/z}`), from the jet `[u, u', u'', u''']`.
pub(crate) fn weighted_derivative_jet(
    p: &HeunParams,
    sigma: Complex64,
    z: Complex64,
    jet: [Complex64; 4],
) -> [Complex64; 3] {
    let (w0, w1, w2) = (jet[1], jet[2], jet[3]);
    // Logarithmic derivative L of the weight, its derivative, and the weight itself.
    let (weight, l, dl) = match p.family {
        HeunFamily::Tri => ((p.gamma * z).exp(), p.gamma, Complex64::new(0.0, 0.0)),
        HeunFamily::Bi => ((sigma * z.ln()).exp(), sigma / z, -sigma / (z * z)),
        HeunFamily::Double => ((-sigma / z).exp(), sigma / (z * z), -2.0 * sigma / (z * z * z)),
    };
    [
        weight * w0,
        weight * (w1 + l * w0),
        weight * (w2 + 2.0 * l * w1 + (l * l + dl) * w0),
    ]
}

/// Absolute residual at `z` of the second-order equation satisfied by the
/// weighted derivative of the family's default Heun solution.
pub fn derivative_equation_check(
    family: HeunFamily,
    p: &HeunParams,
    data: DerivativeData,
    z: Complex64,
) -> Result<f64> {
    if family != p.family {
        return Err(Error::InvalidInput(format!(
            "family {family} does not match parameter family {}",
            p.family
        )));
    }
    check_derivative_constraints(p, data)?;
    if z.norm() == 0.0 || (z - data.z0).norm() == 0.0 && family != HeunFamily::Tri {
        return Err(Error::singular_z(z, "singular point of the derivative equation"));
    }
    let (u, uz) = eval_heun(p, z, None, 1e-13)?;
    let jet = heun_jet(p, z, u, uz)?;
    let [v, dv, ddv] = weighted_derivative_jet(p, data.sigma, z, jet);
    let DerivativeData { z0, sigma } = data;
    let (g, d, e, a) = (p.gamma, p.delta, p.epsilon, p.alpha);
    let res = match family {
        HeunFamily::Tri => ddv + (-g + d * z + e * z * z - 1.0 / z) * dv - g * e * z * z * v,
        HeunFamily::Bi => {
            ddv + ((g + 1.0 - 2.0 * sigma) / z + d + e * z - 1.0 / (z - z0)) * dv
                + (a + e - e * sigma) * (z - z0) * (z - z0) / (z * z) * v
        }
        HeunFamily::Double => {
            ddv + ((g - 2.0 * sigma) / (z * z) + (d + 2.0) / z + e - 1.0 / (z - z0)) * dv
                - e * sigma * (z - z0) * (z - z0) / (z * z * z * z) * v
        }
    };
    Ok(res.norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn tri_with_zero_gamma() {
        let p = HeunParams::new(HeunFamily::Tri, c(0.0, 0.0), c(0.4, 0.0), c(0.3, 0.0), c(-0.3, 0.0), c(0.0, 0.0)).unwrap();
        let data = DerivativeData { z0: c(0.0, 0.0), sigma: c(0.0, 0.0) };
        for z in [c(0.5, 0.0), c(1.2, 0.3), c(-0.7, 0.1)] {
            assert!(derivative_equation_check(HeunFamily::Tri, &p, data, z).unwrap() < 1e-10);
        }
    }

    #[test]
    fn constraint_violation_is_reported() {
        let p = HeunParams::new(HeunFamily::Tri, c(0.2, 0.0), c(0.4, 0.0), c(0.3, 0.0), c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        let data = DerivativeData { z0: c(0.0, 0.0), sigma: c(0.0, 0.0) };
        assert!(matches!(
            derivative_equation_check(HeunFamily::Tri, &p, data, c(1.0, 0.0)),
            Err(Error::Constraint(_))
        ));
    }

    #[test]
    fn double_with_side_conditions() {
        let (g, d, e) = (c(0.3, 0.2), c(0.5, -0.1), c(0.4, 0.3));
        let p = HeunParams::new(HeunFamily::Double, g, d, e, -e, d / 2.0).unwrap();
        let data = DerivativeData { z0: p.q / p.alpha, sigma: g - d * d / (4.0 * e) };
        for z in [c(0.8, 0.0), c(1.5, 0.4), c(2.5, -0.3)] {
            let r = derivative_equation_check(HeunFamily::Double, &p, data, z).unwrap();
            assert!(r < 1e-9, "z={z} r={r}");
        }
    }
}

//! Real branches of the Lambert W function.

use std::f64::consts::E;

use crate::error::{Error, Result};

/// Real branch selector for [`lambert_w`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Principal branch, `w >= -1`, defined for `x >= -1/e`.
    Principal,
    /// Lower branch, `w <= -1`, defined for `-1/e <= x < 0`.
    Lower,
}

impl Branch {
    pub fn from_index(index: i32) -> Result<Self> {
        match index {
            0 => Ok(Branch::Principal),
            -1 => Ok(Branch::Lower),
            other => Err(Error::InvalidInput(format!(
                "only real Lambert W branches 0 and -1 exist, got {other}"
            ))),
        }
    }
}

const INV_E: f64 = 1.0 / E;
const MAX_ITER: usize = 64;

/// Solves `w * exp(w) = x` on the requested real branch by Halley iteration.
pub fn lambert_w(branch: Branch, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("Lambert W argument {x} is not finite")));
    }
    // Slack of a few ulps so that -1/e computed by the caller is accepted.
    let branch_gap = x + INV_E;
    if branch_gap < -4.0 * f64::EPSILON * INV_E {
        return Err(Error::Domain(format!(
            "Lambert W argument {x} lies below the branch point -1/e"
        )));
    }
    if branch == Branch::Lower && x >= 0.0 {
        return Err(Error::Domain(format!(
            "Lambert W branch -1 requires -1/e <= x < 0, got {x}"
        )));
    }
    if branch_gap <= 0.0 {
        return Ok(-1.0);
    }
    if x == 0.0 {
        return Ok(0.0);
    }

    let mut w = initial_guess(branch, x, branch_gap);
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - x;
        if f == 0.0 {
            return Ok(w);
        }
        let wp1 = w + 1.0;
        if wp1 == 0.0 {
            return Ok(w);
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        let next = w - step;
        let done = (next - w).abs() <= 4.0 * f64::EPSILON * (1.0 + next.abs());
        w = next;
        if done {
            break;
        }
    }
    match branch {
        Branch::Principal => Ok(w.max(-1.0)),
        Branch::Lower => Ok(w.min(-1.0)),
    }
}

fn initial_guess(branch: Branch, x: f64, branch_gap: f64) -> f64 {
    // Series about the branch point in p = sqrt(2 (e x + 1)).
    let p = (2.0 * E * branch_gap).sqrt();
    match branch {
        Branch::Principal => {
            if p < 0.5 {
                -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
            } else if x < 3.0 {
                // Pade-like start good on the middle range.
                let l = x.ln_1p();
                l * (1.0 - l.ln_1p() / (2.0 + l))
            } else {
                let l1 = x.ln();
                let l2 = l1.ln();
                l1 - l2 + l2 / l1
            }
        }
        Branch::Lower => {
            if p < 0.5 {
                -1.0 - p - p * p / 3.0 - 11.0 / 72.0 * p * p * p
            } else {
                let l1 = (-x).ln();
                let l2 = (-l1).ln();
                l1 - l2 + l2 / l1
            }
        }
    }
}

/// Derivative `W'(x) = W / (x (1 + W))`, valid away from `x = 0` and the branch point.
pub fn lambert_w_prime(w: f64, x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        w / (x * (1.0 + w))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_values() {
        assert_eq!(lambert_w(Branch::Principal, 0.0).unwrap(), 0.0);
        assert!((lambert_w(Branch::Principal, E).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(lambert_w(Branch::Principal, -INV_E).unwrap(), -1.0);
        assert_eq!(lambert_w(Branch::Lower, -INV_E).unwrap(), -1.0);
    }

    #[test]
    fn branches_are_ordered() {
        for &x in &[-0.36, -0.3, -0.1, -1e-3, -1e-10] {
            let w0 = lambert_w(Branch::Principal, x).unwrap();
            let wm = lambert_w(Branch::Lower, x).unwrap();
            assert!(w0 >= -1.0 && wm <= -1.0, "x={x} w0={w0} wm={wm}");
            assert!((w0 * w0.exp() - x).abs() <= 1e-14 * x.abs().max(1e-300) + 1e-17);
            assert!((wm * wm.exp() - x).abs() <= 1e-14 * x.abs().max(1e-300) + 1e-17);
        }
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(lambert_w(Branch::Principal, -0.5), Err(Error::Domain(_))));
        assert!(matches!(lambert_w(Branch::Lower, 0.1), Err(Error::Domain(_))));
        assert!(matches!(lambert_w(Branch::Lower, 0.0), Err(Error::Domain(_))));
        assert!(Branch::from_index(1).is_err());
    }

    #[test]
    fn large_arguments() {
        for &x in &[10.0, 1e3, 1e10, 1e100, 1e300] {
            let w = lambert_w(Branch::Principal, x).unwrap();
            let rel = (w.ln() + w - x.ln()).abs();
            assert!(rel < 1e-14, "x={x} w={w}");
        }
    }
}

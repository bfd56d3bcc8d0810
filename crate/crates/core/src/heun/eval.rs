//! Numerical evaluation of Heun solutions by series summation and path continuation.

use num_complex::Complex64;

use super::series::{series_coeffs, series_jet, Classification};
use super::{heun_rhs, HeunFamily, HeunParams};
use crate::error::{Error, Result};
use crate::numerics::{integrate_ode, OdeOptions};

/// Radius inside which convergent series are summed directly.
pub const SERIES_RADIUS: f64 = 1.5;

/// Selects one solution of the Heun equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Branch {
    /// Power series with exponent `mu` about the origin.
    Series { mu: Complex64 },
    /// Solution with `u(z) = u`, `u'(z) = du` at an anchor point.
    Anchor { z: Complex64, u: Complex64, du: Complex64 },
}

fn is_nonpositive_integer(x: Complex64) -> bool {
    x.im.abs() <= 1e-12 && x.re <= 1e-12 && (x.re - x.re.round()).abs() <= 1e-12
}

impl Branch {
    /// The solution used by default for each family: the anchored solution
    /// `u(1) = 1, u'(1) = 0` (double), the regular Frobenius series (bi) and
    /// `u(0) = 1, u'(0) = 0` (tri).
    pub fn default_for(p: &HeunParams) -> Branch {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        match p.family {
            HeunFamily::Double => Branch::Anchor { z: one, u: one, du: zero },
            HeunFamily::Bi => {
                if is_nonpositive_integer(p.gamma) {
                    Branch::Series { mu: one - p.gamma }
                } else {
                    Branch::Series { mu: zero }
                }
            }
            HeunFamily::Tri => Branch::Anchor { z: zero, u: one, du: zero },
        }
    }

    /// A solution independent of [`Branch::default_for`].
    pub fn second_for(p: &HeunParams) -> Result<Branch> {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        match p.family {
            HeunFamily::Double => Ok(Branch::Anchor { z: one, u: zero, du: one }),
            HeunFamily::Tri => Ok(Branch::Anchor { z: zero, u: zero, du: one }),
            HeunFamily::Bi => {
                let mu = one - p.gamma;
                let integer_gamma = (p.gamma.re - p.gamma.re.round()).abs() <= 1e-12 && p.gamma.im.abs() <= 1e-12;
                if !integer_gamma {
                    return Ok(Branch::Series { mu });
                }
                // Integer γ: the two Frobenius exponents differ by an integer,
                // so anchor a solution whose Wronskian with the first is one.
                let first = Branch::default_for(p);
                let (u, du) = eval_heun_branch(p, first, one, None, None, 1e-13)?;
                if u.norm() >= du.norm() {
                    Ok(Branch::Anchor { z: one, u: zero, du: one / u })
                } else {
                    Ok(Branch::Anchor { z: one, u: -one / du, du: zero })
                }
            }
        }
    }
}

/// `(u, u')` of the family's default solution at `z_target`.
pub fn eval_heun(
    p: &HeunParams,
    z_target: Complex64,
    z_path: Option<&[Complex64]>,
    tol: f64,
) -> Result<(Complex64, Complex64)> {
    eval_heun_branch(p, Branch::default_for(p), z_target, z_path, None, tol)
}

/// `(u, u')` of the chosen solution at `z_target`.
///
/// `z_path` lists intermediate waypoints between the branch's starting point
/// and the target. `log_z` fixes the branch of `z^μ` at the target for
/// series solutions with non-integer exponent.
pub fn eval_heun_branch(
    p: &HeunParams,
    branch: Branch,
    z_target: Complex64,
    z_path: Option<&[Complex64]>,
    log_z: Option<Complex64>,
    tol: f64,
) -> Result<(Complex64, Complex64)> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    if !z_target.is_finite() {
        return Err(Error::InvalidInput(format!("non-finite target z = {z_target}")));
    }
    match branch {
        Branch::Series { mu } => {
            let terminated = if p.family == HeunFamily::Double {
                let sol = series_coeffs(p, mu, 64)?;
                if sol.classification != Classification::Terminated {
                    return Err(Error::Classification(
                        "the double-confluent series diverges for these parameters; \
                         use an anchored branch evaluated along an ODE path"
                            .into(),
                    ));
                }
                true
            } else {
                false
            };
            let r = z_target.norm();
            match z_path {
                Some(path) if !path.is_empty() => {
                    let start = path[0];
                    let j = series_jet(p, mu, start, None)?;
                    let mut pts = path[1..].to_vec();
                    pts.push(z_target);
                    integrate_path(p, start, (j[0], j[1]), &pts, tol)
                }
                _ if terminated || r <= SERIES_RADIUS => {
                    let j = series_jet(p, mu, z_target, log_z)?;
                    Ok((j[0], j[1]))
                }
                _ => {
                    // Sum at the series radius on the same ray, then continue outwards.
                    let start = z_target * (SERIES_RADIUS / r);
                    let log_start = log_z.map(|l| l - (r / SERIES_RADIUS).ln());
                    let j = series_jet(p, mu, start, log_start)?;
                    integrate_path(p, start, (j[0], j[1]), &[z_target], tol)
                }
            }
        }
        Branch::Anchor { z, u, du } => {
            let pts = match z_path {
                Some(path) => {
                    let mut v = path.to_vec();
                    v.push(z_target);
                    v
                }
                None => default_path(p.family, z, z_target),
            };
            integrate_path(p, z, (u, du), &pts, tol)
        }
    }
}

/// Straight segment, or a two-segment detour when the segment would pass
/// through a singular origin.
fn default_path(family: HeunFamily, a: Complex64, b: Complex64) -> Vec<Complex64> {
    if family.singular_at_origin() && a.norm() > 0.0 && b.norm() > 0.0 && segment_distance_to_origin(a, b) <= 1e-12 * (a.norm() + b.norm()) {
        let radius = a.norm().max(b.norm());
        vec![Complex64::new(0.0, 1.0) * a / a.norm() * radius, b]
    } else {
        vec![b]
    }
}

fn segment_distance_to_origin(a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return a.norm();
    }
    let s = (-(a.conj() * d).re / len2).clamp(0.0, 1.0);
    (a + d * s).norm()
}

/// Integrates the Heun equation along straight segments through `points`.
pub fn integrate_path(
    p: &HeunParams,
    z_start: Complex64,
    state: (Complex64, Complex64),
    points: &[Complex64],
    tol: f64,
) -> Result<(Complex64, Complex64)> {
    let opts = OdeOptions::new(tol, tol * 1e-3);
    let mut a = z_start;
    let mut y = [state.0, state.1];
    for &b in points {
        if b == a {
            continue;
        }
        if p.family.singular_at_origin() && segment_distance_to_origin(a, b) <= 1e-12 * (a.norm() + b.norm()) {
            return Err(Error::singular_z(
                Complex64::new(0.0, 0.0),
                format!("path segment {a} -> {b} passes through the singular origin"),
            ));
        }
        let d = b - a;
        let traj = integrate_ode(
            |s, y, dy| {
                let (uz, uzz) = heun_rhs(p, a + d * s, (y[0], y[1]))?;
                dy[0] = uz * d;
                dy[1] = uzz * d;
                Ok(())
            },
            0.0,
            1.0,
            &y,
            &[],
            &opts,
        )?;
        let fin = traj.final_state();
        y = [fin[0], fin[1]];
        a = b;
    }
    Ok((y[0], y[1]))
}

/// Continues `(u, u')` along a curve `t ↦ z(t)` given as `(z, dz/dt)`,
/// starting from `state` at `t_ref` and reporting at `times` (ascending).
pub fn integrate_curve<F>(
    p: &HeunParams,
    curve: F,
    t_ref: f64,
    state: (Complex64, Complex64),
    times: &[f64],
    tol: f64,
) -> Result<Vec<(Complex64, Complex64)>>
where
    F: Fn(f64) -> Result<(Complex64, Complex64)>,
{
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("times must be strictly ascending".into()));
    }
    let opts = OdeOptions::new(tol, tol * 1e-3);
    let rhs = |t: f64, y: &[Complex64], dy: &mut [Complex64]| {
        let (z, dz) = curve(t)?;
        let (uz, uzz) = heun_rhs(p, z, (y[0], y[1]))?;
        dy[0] = uz * dz;
        dy[1] = uzz * dz;
        Ok(())
    };
    let y0 = [state.0, state.1];
    let split = times.partition_point(|&t| t < t_ref);
    let mut out = vec![(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); times.len()];

    let before: Vec<f64> = times[..split].iter().rev().copied().collect();
    if let Some(&t_end) = before.last() {
        let traj = integrate_ode(rhs, t_ref, t_end, &y0, &before, &opts)?;
        for (k, s) in traj.states.iter().enumerate() {
            out[split - 1 - k] = (s[0], s[1]);
        }
    }
    let after = &times[split..];
    if let Some(&t_end) = after.last() {
        let traj = integrate_ode(rhs, t_ref, t_end, &y0, after, &opts)?;
        for (k, s) in traj.states.iter().enumerate() {
            out[split + k] = (s[0], s[1]);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heun::heun_residual;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn bi_series_at_origin() {
        let p = HeunParams::new(HeunFamily::Bi, c(0.5, 0.0), c(0.0, -1.0), c(0.0, -2.5), c(0.0, 0.0), c(-1.0, 0.0)).unwrap();
        let (u, du) = eval_heun(&p, c(0.0, 0.0), None, 1e-12).unwrap();
        assert_eq!(u, c(1.0, 0.0));
        assert!((du - p.q / p.gamma).norm() < 1e-15);
    }

    #[test]
    fn tri_zero_parameters_linear() {
        let z0 = c(0.0, 0.0);
        let p = HeunParams::new(HeunFamily::Tri, z0, z0, z0, z0, z0).unwrap();
        let b = Branch::Anchor { z: z0, u: c(1.0, 0.0), du: c(2.0, -1.0) };
        let (u, du) = eval_heun_branch(&p, b, c(1.5, 2.0), Some(&[c(-1.0, 0.5)]), None, 1e-12).unwrap();
        assert!((u - (1.0 + c(2.0, -1.0) * c(1.5, 2.0))).norm() < 1e-12);
        assert!((du - c(2.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn bi_series_matches_continuation_beyond_radius() {
        let p = HeunParams::new(HeunFamily::Bi, c(0.3, 0.1), c(0.2, -0.4), c(-0.1, 0.3), c(0.4, 0.0), c(0.2, 0.2)).unwrap();
        let z = c(2.5, 1.0);
        let (u_ode, du_ode) = eval_heun(&p, z, None, 1e-12).unwrap();
        let j = series_jet(&p, c(0.0, 0.0), z, None).unwrap();
        assert!((u_ode - j[0]).norm() < 1e-9 * j[0].norm().max(1.0));
        assert!((du_ode - j[1]).norm() < 1e-9 * j[1].norm().max(1.0));
    }

    #[test]
    fn double_detours_around_origin() {
        let p = HeunParams::new(HeunFamily::Double, c(0.5, 0.0), c(1.0, 0.0), c(0.2, 0.0), c(0.1, 0.0), c(0.3, 0.0)).unwrap();
        let z = c(-1.0, 0.0);
        let (u, du) = eval_heun(&p, z, None, 1e-12).unwrap();
        let (_, uzz) = heun_rhs(&p, z, (u, du)).unwrap();
        assert!(heun_residual(&p, z, u, du, uzz).norm() < 1e-12);
        assert!(matches!(
            eval_heun(&p, z, Some(&[c(0.0, 0.0)]), 1e-10),
            Err(Error::Singularity { .. })
        ));
    }

    #[test]
    fn divergent_double_series_is_refused() {
        let p = HeunParams::new(HeunFamily::Double, c(0.5, 0.0), c(1.0, 0.0), c(0.2, 0.0), c(0.1, 0.0), c(0.3, 0.0)).unwrap();
        let b = Branch::Series { mu: c(0.0, 0.0) };
        assert!(matches!(eval_heun_branch(&p, b, c(1.0, 0.0), None, None, 1e-10), Err(Error::Classification(_))));
    }
}

//! Adaptive Dormand–Prince 5(4) integrator for complex state vectors.
//!
//! Complex components are treated as pairs of real components for error
//! control. Output at caller-requested times comes from the method's
//! continuous extension, so requested points never shorten the step.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Step-size control and budget for [`integrate_ode`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Initial step magnitude; estimated from the right-hand side when `None`.
    pub h_init: Option<f64>,
    /// Largest step magnitude allowed.
    pub h_max: Option<f64>,
}

impl OdeOptions {
    pub fn new(rtol: f64, atol: f64) -> Self {
        OdeOptions {
            rtol,
            atol,
            max_steps: 2_000_000,
            h_init: None,
            h_max: None,
        }
    }

    pub fn with_h_max(mut self, h_max: f64) -> Self {
        self.h_max = Some(h_max);
        self
    }
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions::new(1e-10, 1e-12)
    }
}

/// Output of [`integrate_ode`]: states at the requested times.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<Complex64>>,
    /// Sum over accepted steps of the max-norm of the embedded local error estimate.
    pub est_error: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl OdeTrajectory {
    pub fn final_state(&self) -> &[Complex64] {
        self.states.last().expect("trajectory is never empty")
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

fn check_finite(t: f64, v: &[Complex64]) -> Result<()> {
    if v.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::singular_t(t, "right-hand side is not finite"))
    }
}

fn axpy(out: &mut [Complex64], y: &[Complex64], h: f64, terms: &[(f64, &[Complex64])]) {
    for i in 0..out.len() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, k) in terms {
            acc += k[i] * *c;
        }
        out[i] = y[i] + acc * h;
    }
}

/// Weighted RMS norm over paired real components.
fn error_norm(err: &[Complex64], y: &[Complex64], ynew: &[Complex64], rtol: f64, atol: f64) -> f64 {
    let mut sum = 0.0;
    for i in 0..err.len() {
        let sc_re = atol + rtol * y[i].re.abs().max(ynew[i].re.abs());
        let sc_im = atol + rtol * y[i].im.abs().max(ynew[i].im.abs());
        sum += (err[i].re / sc_re).powi(2) + (err[i].im / sc_im).powi(2);
    }
    (sum / (2 * err.len()).max(1) as f64).sqrt()
}

/// Integrates `y' = rhs(t, y)` from `t0` to `t1` (either direction).
///
/// `output` lists the times at which states are reported; they must lie in
/// the closed interval and be strictly monotone in the direction of
/// integration. An empty list reports only `t0` and `t1`.
pub fn integrate_ode<F>(
    mut rhs: F,
    t0: f64,
    t1: f64,
    y0: &[Complex64],
    output: &[f64],
    opts: &OdeOptions,
) -> Result<OdeTrajectory>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]) -> Result<()>,
{
    if !(opts.rtol > 0.0 && opts.atol > 0.0) {
        return Err(Error::InvalidInput("rtol and atol must be positive".into()));
    }
    if y0.is_empty() {
        return Err(Error::InvalidInput("empty initial state".into()));
    }
    if !t0.is_finite() || !t1.is_finite() {
        return Err(Error::InvalidInput("integration bounds must be finite".into()));
    }
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let requested: Vec<f64> = if output.is_empty() {
        if t0 == t1 {
            vec![t0]
        } else {
            vec![t0, t1]
        }
    } else {
        output.to_vec()
    };
    for (i, &t) in requested.iter().enumerate() {
        if (t - t0) * dir < 0.0 || (t1 - t) * dir < 0.0 {
            return Err(Error::InvalidInput(format!(
                "output time {t} outside [{t0}, {t1}]"
            )));
        }
        if i > 0 && (t - requested[i - 1]) * dir <= 0.0 {
            return Err(Error::InvalidInput(
                "output times must be strictly monotone".into(),
            ));
        }
    }

    let n = y0.len();
    let mut times = Vec::with_capacity(requested.len());
    let mut states = Vec::with_capacity(requested.len());
    let mut next_out = 0;
    while next_out < requested.len() && requested[next_out] == t0 {
        times.push(t0);
        states.push(y0.to_vec());
        next_out += 1;
    }
    let mut traj = OdeTrajectory {
        times,
        states,
        est_error: 0.0,
        accepted_steps: 0,
        rejected_steps: 0,
    };
    if next_out == requested.len() {
        return Ok(traj);
    }

    let zero = Complex64::new(0.0, 0.0);
    let mut y = y0.to_vec();
    let mut k1 = vec![zero; n];
    let mut k2 = vec![zero; n];
    let mut k3 = vec![zero; n];
    let mut k4 = vec![zero; n];
    let mut k5 = vec![zero; n];
    let mut k6 = vec![zero; n];
    let mut k7 = vec![zero; n];
    let mut ytmp = vec![zero; n];
    let mut ynew = vec![zero; n];
    let mut err = vec![zero; n];

    let mut t = t0;
    rhs(t, &y, &mut k1)?;
    check_finite(t, &k1)?;

    let span = (t1 - t0).abs();
    let h_max = opts.h_max.unwrap_or(span).min(span);
    let mut h = match opts.h_init {
        Some(h0) => h0.abs().min(h_max),
        None => initial_step(&mut rhs, t, &y, &k1, dir, h_max, opts)?,
    };

    let mut last_rejected = false;
    let mut steps = 0usize;
    loop {
        if steps >= opts.max_steps {
            return Err(Error::NotConverged(format!(
                "ODE step budget of {} exhausted at t = {t}",
                opts.max_steps
            )));
        }
        steps += 1;
        let remaining = (t1 - t).abs();
        let mut last = false;
        if h >= remaining {
            h = remaining;
            last = true;
        }
        let hmin = 16.0 * f64::EPSILON * t.abs().max(1.0);
        if h < hmin && !last {
            return Err(Error::singular_t(t, "step size underflow"));
        }
        let hs = h * dir;

        axpy(&mut ytmp, &y, hs, &[(A21, &k1)]);
        rhs(t + C2 * hs, &ytmp, &mut k2)?;
        axpy(&mut ytmp, &y, hs, &[(A31, &k1), (A32, &k2)]);
        rhs(t + C3 * hs, &ytmp, &mut k3)?;
        axpy(&mut ytmp, &y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
        rhs(t + C4 * hs, &ytmp, &mut k4)?;
        axpy(&mut ytmp, &y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
        rhs(t + C5 * hs, &ytmp, &mut k5)?;
        axpy(
            &mut ytmp,
            &y,
            hs,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        );
        let t_new = if last { t1 } else { t + hs };
        rhs(t + hs, &ytmp, &mut k6)?;
        axpy(
            &mut ynew,
            &y,
            hs,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        rhs(t_new, &ynew, &mut k7)?;

        let finite = ynew.iter().chain(k7.iter()).all(|c| c.is_finite());
        let err_norm = if finite {
            for i in 0..n {
                err[i] = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6
                    + k7[i] * E7)
                    * hs;
            }
            error_norm(&err, &y, &ynew, opts.rtol, opts.atol)
        } else {
            f64::INFINITY
        };

        if err_norm <= 1.0 {
            traj.accepted_steps += 1;
            traj.est_error += err.iter().map(|e| e.norm()).fold(0.0, f64::max);

            // Continuous extension coefficients.
            while next_out < requested.len()
                && ((requested[next_out] - t_new) * dir <= 0.0 || last)
            {
                let tout = requested[next_out];
                let theta = if hs == 0.0 { 1.0 } else { (tout - t) / hs };
                let theta1 = 1.0 - theta;
                let mut out = vec![zero; n];
                for i in 0..n {
                    let ydiff = ynew[i] - y[i];
                    let bspl = k1[i] * hs - ydiff;
                    let r4 = ydiff - k7[i] * hs - bspl;
                    let r5 = (k1[i] * D1 + k3[i] * D3 + k4[i] * D4 + k5[i] * D5 + k6[i] * D6
                        + k7[i] * D7)
                        * hs;
                    out[i] = y[i] + (ydiff + (bspl + (r4 + r5 * theta1) * theta) * theta1) * theta;
                }
                if tout == t_new {
                    out.copy_from_slice(&ynew);
                }
                traj.times.push(tout);
                traj.states.push(out);
                next_out += 1;
            }

            t = t_new;
            y.copy_from_slice(&ynew);
            k1.copy_from_slice(&k7);
            if last || next_out == requested.len() {
                return Ok(traj);
            }
            let mut fac = 0.9 * err_norm.max(1e-10).powf(-0.2);
            fac = fac.clamp(0.2, 5.0);
            if last_rejected {
                fac = fac.min(1.0);
            }
            h = (h * fac).min(h_max);
            last_rejected = false;
        } else {
            traj.rejected_steps += 1;
            let fac = if err_norm.is_finite() {
                (0.9 * err_norm.powf(-0.2)).clamp(0.1, 0.9)
            } else {
                0.1
            };
            h *= fac;
            last_rejected = true;
            if h < 16.0 * f64::EPSILON * t.abs().max(1.0) {
                return Err(Error::singular_t(t, "step size underflow"));
            }
        }
    }
}

fn initial_step<F>(
    rhs: &mut F,
    t: f64,
    y: &[Complex64],
    f0: &[Complex64],
    dir: f64,
    h_max: f64,
    opts: &OdeOptions,
) -> Result<f64>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]) -> Result<()>,
{
    let sc: Vec<f64> = y.iter().map(|v| opts.atol + opts.rtol * v.norm()).collect();
    let norm = |v: &[Complex64]| {
        (v.iter().zip(&sc).map(|(a, s)| (a.norm() / s).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
    };
    let d0 = norm(y);
    let d1 = norm(f0);
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h0 = h0.min(h_max);
    let y1: Vec<Complex64> = y.iter().zip(f0).map(|(a, b)| a + b * (h0 * dir)).collect();
    let mut f1 = vec![Complex64::new(0.0, 0.0); y.len()];
    rhs(t + h0 * dir, &y1, &mut f1)?;
    check_finite(t, &f1)?;
    let diff: Vec<Complex64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    Ok((100.0 * h0).min(h1).min(h_max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn exponential_rotation() {
        let traj = integrate_ode(
            |_, y, dy| {
                dy[0] = c(0.0, 1.0) * y[0];
                Ok(())
            },
            0.0,
            PI,
            &[c(1.0, 0.0)],
            &[],
            &OdeOptions::new(1e-12, 1e-14),
        )
        .unwrap();
        assert!((traj.final_state()[0] - c(-1.0, 0.0)).norm() < 1e-10);
        assert_eq!(traj.times, vec![0.0, PI]);
    }

    #[test]
    fn backward_integration_with_dense_output() {
        let out: Vec<f64> = (0..=20).map(|i| 2.0 - 0.1 * i as f64).collect();
        let traj = integrate_ode(
            |_, y, dy| {
                dy[0] = -y[0];
                Ok(())
            },
            2.0,
            0.0,
            &[c((-2.0f64).exp(), 0.0)],
            &out,
            &OdeOptions::new(1e-11, 1e-13),
        )
        .unwrap();
        for (t, s) in traj.times.iter().zip(&traj.states) {
            assert!((s[0].re - (-t).exp()).abs() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn singular_rhs_is_reported() {
        let res = integrate_ode(
            |t, _y, dy| {
                dy[0] = c(1.0 / (1.0 - t).powi(2), 0.0);
                Ok(())
            },
            0.0,
            2.0,
            &[c(1.0, 0.0)],
            &[],
            &OdeOptions::new(1e-8, 1e-10),
        );
        assert!(matches!(res, Err(Error::Singularity { .. })), "{res:?}");
    }

    #[test]
    fn rejects_bad_output_grid() {
        let f = |_: f64, _: &[Complex64], d: &mut [Complex64]| {
            d[0] = c(0.0, 0.0);
            Ok(())
        };
        let o = OdeOptions::default();
        assert!(integrate_ode(f, 0.0, 1.0, &[c(1.0, 0.0)], &[0.5, 0.2], &o).is_err());
        assert!(integrate_ode(f, 0.0, 1.0, &[c(1.0, 0.0)], &[1.5], &o).is_err());
        assert!(integrate_ode(f, 0.0, 1.0, &[c(1.0, 0.0)], &[], &OdeOptions::new(0.0, 1.0)).is_err());
    }
}

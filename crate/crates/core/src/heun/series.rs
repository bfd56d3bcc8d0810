//! Power-series solutions `u = z^μ Σ cₙ zⁿ` and their recurrences.

use num_complex::Complex64;
use serde::Serialize;

use super::{HeunFamily, HeunParams};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Convergent,
    Asymptotic,
    Terminated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSolution {
    pub family: HeunFamily,
    pub mu: Complex64,
    /// Pre-exponents of the double-confluent form `e^{ν₀z − ν₁/z}`; zero here.
    pub nu0: Complex64,
    pub nu1: Complex64,
    pub coeffs: Vec<Complex64>,
    pub classification: Classification,
    pub termination_n: Option<usize>,
}

const INDEX_TOL: f64 = 1e-12;
const TERMINATION_REL: f64 = 1e-10;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Recurrence row `[lead, a₁, a₂, a₃]` so that
/// `lead·cₙ + a₁cₙ₋₁ + a₂cₙ₋₂ + a₃cₙ₋₃ = 0`.
pub(crate) fn recurrence_row(p: &HeunParams, mu: Complex64, n: usize) -> [Complex64; 4] {
    let m = |j: isize| mu + j as f64;
    let n = n as isize;
    let pn = |j: isize| p.alpha + p.epsilon * m(j);
    match p.family {
        HeunFamily::Double => [
            p.gamma * m(n),
            m(n - 1) * (m(n - 1) + p.delta - 1.0) - p.q,
            pn(n - 2),
            zero(),
        ],
        HeunFamily::Bi => [
            m(n) * (m(n) - 1.0 + p.gamma),
            p.delta * m(n - 1) - p.q,
            pn(n - 2),
            zero(),
        ],
        HeunFamily::Tri => [
            m(n) * (m(n) - 1.0),
            p.gamma * m(n - 1),
            p.delta * m(n - 2) - p.q,
            pn(n - 3),
        ],
    }
}

/// `P_N = α + ε(N + μ)`, whose vanishing is the first termination condition.
pub(crate) fn termination_factor(p: &HeunParams, mu: Complex64, n: usize) -> Complex64 {
    p.alpha + p.epsilon * (mu + n as f64)
}

pub(crate) fn check_exponent(p: &HeunParams, mu: Complex64) -> Result<()> {
    let ok = match p.family {
        HeunFamily::Double => mu.norm() <= INDEX_TOL,
        HeunFamily::Bi => {
            mu.norm() <= INDEX_TOL || (mu - (1.0 - p.gamma)).norm() <= INDEX_TOL * p.scale()
        }
        HeunFamily::Tri => (mu * (mu - 1.0)).norm() <= INDEX_TOL,
    };
    if ok {
        Ok(())
    } else {
        let allowed = match p.family {
            HeunFamily::Double => "0",
            HeunFamily::Bi => "0 or 1 - gamma",
            HeunFamily::Tri => "0 or 1",
        };
        Err(Error::InvalidInput(format!(
            "exponent mu = {mu} is not admissible for the {}-confluent series (allowed: {allowed})",
            p.family
        )))
    }
}

/// Coefficients `c₀..c_nmax` exactly as produced by the recurrence, with no
/// termination snapping.
pub fn raw_coeffs(p: &HeunParams, mu: Complex64, nmax: usize) -> Result<Vec<Complex64>> {
    check_exponent(p, mu)?;
    let mut c = Vec::with_capacity(nmax + 1);
    c.push(Complex64::new(1.0, 0.0));
    for n in 1..=nmax {
        let row = recurrence_row(p, mu, n);
        let lead_tol = 1e-13 * (1.0 + (mu + n as f64).norm_sqr()) * p.scale();
        if row[0].norm() <= lead_tol {
            return Err(Error::Resonance {
                n,
                detail: format!("{}-confluent series with mu = {mu}", p.family),
            });
        }
        let mut acc = zero();
        for j in 1..=3 {
            if n >= j {
                acc += row[j] * c[n - j];
            }
        }
        c.push(-acc / row[0]);
    }
    Ok(c)
}

/// Series solution with classification; coefficients past a detected
/// termination index are set to zero.
pub fn series_coeffs(p: &HeunParams, mu: Complex64, nmax: usize) -> Result<SeriesSolution> {
    if nmax == 0 {
        return Err(Error::InvalidInput("nmax must be positive".into()));
    }
    let mut coeffs = raw_coeffs(p, mu, nmax)?;
    let tail_len = if p.family == HeunFamily::Tri { 2 } else { 1 };
    let mut termination_n = None;
    let mut head_max: f64 = 0.0;
    for n in 0..coeffs.len() {
        head_max = head_max.max(coeffs[n].norm());
        if n + tail_len >= coeffs.len() {
            break;
        }
        let factor_small =
            termination_factor(p, mu, n).norm() <= 1e-12 * p.scale() * (1.0 + n as f64);
        let tail_small = (1..=tail_len).all(|j| coeffs[n + j].norm() <= TERMINATION_REL * head_max);
        if factor_small && tail_small {
            termination_n = Some(n);
            break;
        }
    }
    let classification = if let Some(n) = termination_n {
        for c in coeffs.iter_mut().skip(n + 1) {
            *c = zero();
        }
        Classification::Terminated
    } else if p.family == HeunFamily::Double {
        Classification::Asymptotic
    } else {
        Classification::Convergent
    };
    Ok(SeriesSolution {
        family: p.family,
        mu,
        nu0: zero(),
        nu1: zero(),
        coeffs,
        classification,
        termination_n,
    })
}

/// Absolute recurrence residual for each index `n ≥ 1` of `coeffs`.
pub fn recurrence_residuals(p: &HeunParams, mu: Complex64, coeffs: &[Complex64]) -> Vec<f64> {
    (1..coeffs.len())
        .map(|n| {
            let row = recurrence_row(p, mu, n);
            let mut acc = row[0] * coeffs[n];
            for j in 1..=3 {
                if n >= j {
                    acc += row[j] * coeffs[n - j];
                }
            }
            acc.norm()
        })
        .collect()
}

/// Non-negative integer value of `mu`, if it is one.
pub(crate) fn integer_exponent(mu: Complex64) -> Option<usize> {
    let r = mu.re.round();
    if mu.im.abs() <= INDEX_TOL && (mu.re - r).abs() <= INDEX_TOL && r >= 0.0 {
        Some(r as usize)
    } else {
        None
    }
}

/// `[A, A', A'']` for the polynomial `Σ cₙ zⁿ`, together with the largest
/// term magnitude seen and whether the trailing terms were negligible.
fn sum_poly(coeffs: &[Complex64], z: Complex64) -> ([Complex64; 3], bool) {
    let r = z.norm();
    let mut a = [zero(); 3];
    let mut zp = [Complex64::new(1.0, 0.0), zero(), zero()]; // z^n, z^{n-1}, z^{n-2}
    let mut zn = Complex64::new(1.0, 0.0);
    let mut max_term: f64 = 0.0;
    let mut quiet = 0;
    for (n, &c) in coeffs.iter().enumerate() {
        let nf = n as f64;
        zp[0] = zn;
        a[0] += c * zp[0];
        if n >= 1 {
            a[1] += c * nf * zp[1];
        }
        if n >= 2 {
            a[2] += c * nf * (nf - 1.0) * zp[2];
        }
        let mag = c.norm() * r.powi(n as i32).max(nf * r.powi(n as i32 - 1)).max(nf * nf * r.powi(n as i32 - 2));
        let mag = if mag.is_finite() { mag } else { 0.0 };
        max_term = max_term.max(mag);
        if mag <= 1e-17 * max_term {
            quiet += 1;
        } else {
            quiet = 0;
        }
        zp[2] = zp[1];
        zp[1] = zn;
        zn *= z;
    }
    let converged = quiet >= 4 || r == 0.0;
    (a, converged)
}

impl SeriesSolution {
    /// `[u, u', u'']` at `z`. Non-integer exponents use `log_z` for `z^μ`
    /// (principal logarithm when `None`).
    pub fn jet(&self, z: Complex64, log_z: Option<Complex64>) -> Result<[Complex64; 3]> {
        if self.family == HeunFamily::Double && self.classification != Classification::Terminated {
            return Err(Error::Classification(
                "the double-confluent series has zero radius of convergence; \
                 evaluate by ODE continuation from an anchor point instead"
                    .into(),
            ));
        }
        let len = match self.termination_n {
            Some(n) => n + 1,
            None => self.coeffs.len(),
        };
        let (a, converged) = sum_poly(&self.coeffs[..len], z);
        if self.termination_n.is_none() && !converged {
            return Err(Error::NotConverged(format!(
                "series at z = {z} needs more than {} terms",
                self.coeffs.len()
            )));
        }
        finish_jet(self.mu, a, z, log_z)
    }
}

fn finish_jet(mu: Complex64, a: [Complex64; 3], z: Complex64, log_z: Option<Complex64>) -> Result<[Complex64; 3]> {
    if mu.norm() == 0.0 {
        return Ok(a);
    }
    if let Some(m) = integer_exponent(mu) {
        // z^m A(z) expanded by Leibniz's rule.
        let mf = m as f64;
        let zm = |k: i32| if m as i32 - k < 0 { zero() } else { z.powi(m as i32 - k) };
        let u = zm(0) * a[0];
        let du = mf * zm(1) * a[0] + zm(0) * a[1];
        let ddu = mf * (mf - 1.0) * zm(2) * a[0] + 2.0 * mf * zm(1) * a[1] + zm(0) * a[2];
        return Ok([u, du, ddu]);
    }
    if z.norm() == 0.0 {
        return Err(Error::singular_z(z, format!("branch point of z^{mu}")));
    }
    let lz = log_z.unwrap_or_else(|| z.ln());
    let zmu = (mu * lz).exp();
    let l = mu / z;
    let u = zmu * a[0];
    let du = zmu * (a[1] + l * a[0]);
    let ddu = zmu * (a[2] + 2.0 * l * a[1] + (l * l - mu / (z * z)) * a[0]);
    Ok([u, du, ddu])
}

/// Sums the series at `z`, growing the coefficient count until the tail is
/// negligible.
pub(crate) fn series_jet(
    p: &HeunParams,
    mu: Complex64,
    z: Complex64,
    log_z: Option<Complex64>,
) -> Result<[Complex64; 3]> {
    let mut nmax = 64;
    loop {
        let sol = series_coeffs(p, mu, nmax)?;
        match sol.jet(z, log_z) {
            Err(Error::NotConverged(_)) if nmax < 8192 => nmax *= 2,
            other => return other,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn params(f: HeunFamily, v: [Complex64; 5]) -> HeunParams {
        HeunParams::new(f, v[0], v[1], v[2], v[3], v[4]).unwrap()
    }

    #[test]
    fn double_first_coefficient() {
        // Constant-amplitude cosh model with U0 = 1 and unit detuning coefficients.
        let p = params(HeunFamily::Double, [c(0.0, -1.0), c(1.0, -1.0), c(0.0, -1.0), c(0.0, 0.0), c(-1.0, 0.0)]);
        let s = series_coeffs(&p, c(0.0, 0.0), 10).unwrap();
        assert!((s.coeffs[1] - c(0.0, -1.0)).norm() < 1e-15);
        assert_eq!(s.classification, Classification::Asymptotic);
        assert!(matches!(s.jet(c(1.0, 0.0), None), Err(Error::Classification(_))));
    }

    #[test]
    fn tri_first_coefficient() {
        let p = params(HeunFamily::Tri, [c(0.7, 0.2), c(0.1, 0.0), c(0.3, 0.0), c(0.2, 0.0), c(0.4, 0.0)]);
        let s = series_coeffs(&p, c(1.0, 0.0), 5).unwrap();
        assert!((s.coeffs[1] - (-(p.gamma) / 2.0)).norm() < 1e-15);
        assert!(matches!(raw_coeffs(&p, c(0.0, 0.0), 5), Err(Error::Resonance { n: 1, .. })));
    }

    #[test]
    fn bi_resonance_and_exponents() {
        let p = params(HeunFamily::Bi, [c(-2.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)]);
        assert!(matches!(raw_coeffs(&p, c(0.0, 0.0), 10), Err(Error::Resonance { n: 3, .. })));
        assert!(raw_coeffs(&p, c(3.0, 0.0), 10).is_ok());
        assert!(matches!(raw_coeffs(&p, c(0.5, 0.0), 10), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn bi_zero_first_coefficient() {
        let p = params(HeunFamily::Bi, [c(0.3, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.5, 0.0), c(0.0, 0.0)]);
        let s = series_coeffs(&p, c(0.0, 0.0), 8).unwrap();
        assert_eq!(s.coeffs[1], c(0.0, 0.0));
    }

    #[test]
    fn jet_at_origin_for_integer_exponents() {
        let p = params(HeunFamily::Bi, [c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let j = series_jet(&p, c(1.0, 0.0), c(0.0, 0.0), None).unwrap();
        assert_eq!(j[0], c(0.0, 0.0));
        assert_eq!(j[1], c(1.0, 0.0));
    }
}

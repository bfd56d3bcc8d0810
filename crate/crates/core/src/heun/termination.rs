//! Quasi-polynomial termination: values of `q` for which the series stops at index N.

use num_complex::Complex64;

use super::series::{check_exponent, raw_coeffs, recurrence_row, termination_factor};
use super::{HeunFamily, HeunParams};
use crate::error::{Error, Result};
use crate::numerics::{poly_roots, ComplexPoly};

/// `c₀..c_{count−1}` as polynomials in `q`, all other parameters fixed.
pub fn coefficient_polys(p: &HeunParams, mu: Complex64, count: usize) -> Result<Vec<ComplexPoly>> {
    check_exponent(p, mu)?;
    let zero = Complex64::new(0.0, 0.0);
    let p0 = p.with_q(zero);
    let p1 = p.with_q(Complex64::new(1.0, 0.0));
    let mut c: Vec<ComplexPoly> = Vec::with_capacity(count);
    c.push(ComplexPoly::constant(Complex64::new(1.0, 0.0)));
    for n in 1..count {
        // Every recurrence entry is affine in q.
        let r0 = recurrence_row(&p0, mu, n);
        let r1 = recurrence_row(&p1, mu, n);
        if r0[0].norm() <= 1e-13 * (1.0 + (mu + n as f64).norm_sqr()) * p.scale() {
            return Err(Error::Resonance {
                n,
                detail: format!("{}-confluent termination with mu = {mu}", p.family),
            });
        }
        let mut acc = ComplexPoly::zero();
        for j in 1..=3 {
            if n >= j {
                let row = ComplexPoly::new(vec![r0[j], r1[j] - r0[j]]);
                acc = &acc + &(&row * &c[n - j]);
            }
        }
        c.push(acc.scale(-1.0 / r0[0]));
    }
    Ok(c)
}

fn identically_zero(poly: &ComplexPoly, reference: f64) -> bool {
    poly.max_abs_coeff() <= 1e-13 * reference.max(1e-300)
}

/// Every `q` for which the series with exponent `mu` terminates at index `n`.
///
/// Requires `α + ε(n + μ) = 0`. For the tri-confluent family both
/// `c_{n+1}` and `c_{n+2}` must vanish, and the joint solution set may be
/// empty. Each returned value is checked against the next four raw
/// coefficients.
pub fn termination_conditions(p: &HeunParams, mu: Complex64, n: usize) -> Result<Vec<Complex64>> {
    let factor = termination_factor(p, mu, n);
    if factor.norm() > 1e-10 * p.scale() {
        return Err(Error::Constraint(format!(
            "termination at N = {n} needs alpha + epsilon*(N + mu) = 0, got {factor}"
        )));
    }
    let polys = coefficient_polys(p, mu, n + 3)?;
    let reference = polys[..=n].iter().map(|c| c.max_abs_coeff()).fold(1.0, f64::max);
    let first = polys[n + 1].normalized(1e-14);
    let mut candidates = if p.family == HeunFamily::Tri {
        let second = polys[n + 2].normalized(1e-14);
        match (identically_zero(&first, reference), identically_zero(&second, reference)) {
            (true, true) => {
                return Err(Error::InvalidInput(format!(
                    "tri-confluent termination at N = {n} holds for every q"
                )))
            }
            (true, false) => roots_or_empty(&second)?,
            (false, _) => {
                let scale = second.max_abs_coeff();
                let deg = second.degree().unwrap_or(0) as i32;
                roots_or_empty(&first)?
                    .into_iter()
                    .filter(|&q| second.eval(q).norm() <= 1e-8 * scale.max(1e-300) * q.norm().max(1.0).powi(deg))
                    .collect()
            }
        }
    } else {
        if identically_zero(&first, reference) {
            return Err(Error::InvalidInput(format!(
                "{}-confluent termination at N = {n} holds for every q",
                p.family
            )));
        }
        roots_or_empty(&first)?
    };
    if p.family == HeunFamily::Tri {
        dedup(&mut candidates);
    }

    let mut accepted = Vec::with_capacity(candidates.len());
    for q in candidates {
        let coeffs = raw_coeffs(&p.with_q(q), mu, n + 4)?;
        let head = coeffs[..=n].iter().map(|c| c.norm()).fold(0.0, f64::max);
        let tail = coeffs[n + 1..].iter().map(|c| c.norm()).fold(0.0, f64::max);
        if tail <= 1e-10 * head {
            accepted.push(q);
        } else if p.family != HeunFamily::Tri {
            return Err(Error::NotConverged(format!(
                "termination root q = {q} leaves a coefficient tail of {tail:e}"
            )));
        }
    }
    Ok(accepted)
}

fn roots_or_empty(poly: &ComplexPoly) -> Result<Vec<Complex64>> {
    match poly.degree() {
        None | Some(0) => Ok(Vec::new()),
        Some(_) => poly_roots(poly),
    }
}

fn dedup(qs: &mut Vec<Complex64>) {
    let mut out: Vec<Complex64> = Vec::with_capacity(qs.len());
    for &q in qs.iter() {
        if !out.iter().any(|r| (r - q).norm() <= 1e-9 * q.norm().max(1.0)) {
            out.push(q);
        }
    }
    *qs = out;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn bi_first_order_quadratic() {
        let (g, d, e) = (c(0.7, 0.1), c(-0.4, 0.3), c(0.5, -0.2));
        let a = -e;
        let p = HeunParams::new(HeunFamily::Bi, g, d, e, a, c(0.0, 0.0)).unwrap();
        let qs = termination_conditions(&p, c(0.0, 0.0), 1).unwrap();
        assert_eq!(qs.len(), 2);
        for q in qs {
            assert!((q * q - d * q - a * g).norm() < 1e-12);
        }
    }

    #[test]
    fn alpha_condition_enforced() {
        let p = HeunParams::new(HeunFamily::Bi, c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        assert!(matches!(termination_conditions(&p, c(0.0, 0.0), 2), Err(Error::Constraint(_))));
    }

    #[test]
    fn tri_joint_solution() {
        let g = c(0.6, 0.0);
        let d = c(0.3, 0.2);
        let e = -g * (d + g * g) / 2.0;
        let p = HeunParams::new(HeunFamily::Tri, g, d, e, -2.0 * e, c(0.0, 0.0)).unwrap();
        let qs = termination_conditions(&p, c(1.0, 0.0), 1).unwrap();
        assert!(qs.iter().any(|q| (q - (d - g * g)).norm() < 1e-10), "{qs:?}");
    }

    #[test]
    fn tri_generic_has_no_joint_solution() {
        let e = c(0.5, 0.0);
        let p = HeunParams::new(HeunFamily::Tri, c(0.3, 0.0), c(0.7, 0.0), e, -2.0 * e, c(0.0, 0.0)).unwrap();
        assert!(termination_conditions(&p, c(1.0, 0.0), 1).unwrap().is_empty());
    }
}

//! Dense polynomials with complex coefficients and an Aberth–Ehrlich root finder.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Polynomial in ascending-degree coefficient order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComplexPoly {
    coeffs: Vec<Complex64>,
}

impl ComplexPoly {
    /// Builds a polynomial, dropping trailing (highest-degree) zero coefficients.
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let mut p = ComplexPoly { coeffs };
        p.trim();
        p
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        ComplexPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `z`.
    pub fn identity() -> Self {
        Self::new(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)])
    }

    fn trim(&mut self) {
        while matches!(self.coeffs.last(), Some(c) if *c == Complex64::new(0.0, 0.0)) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, &c)| c * j as f64)
                .collect(),
        )
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Drops coefficients whose magnitude is below `rel_tol * max|coeff|`
    /// from the top, so that the leading coefficient is meaningfully nonzero.
    pub fn normalized(&self, rel_tol: f64) -> Self {
        let scale = self.max_abs_coeff();
        let mut coeffs = self.coeffs.clone();
        while matches!(coeffs.last(), Some(c) if c.norm() <= rel_tol * scale) {
            coeffs.pop();
        }
        ComplexPoly { coeffs }
    }

    /// Monic product `lead * prod (z - r_i)`.
    pub fn from_roots(lead: Complex64, roots: &[Complex64]) -> Self {
        let mut p = ComplexPoly::constant(lead);
        for &r in roots {
            p = &p * &ComplexPoly::new(vec![-r, Complex64::new(1.0, 0.0)]);
        }
        p
    }
}

impl Add for &ComplexPoly {
    type Output = ComplexPoly;
    fn add(self, rhs: &ComplexPoly) -> ComplexPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = Complex64::new(0.0, 0.0);
        ComplexPoly::new(
            (0..n)
                .map(|i| {
                    self.coeffs.get(i).copied().unwrap_or(zero)
                        + rhs.coeffs.get(i).copied().unwrap_or(zero)
                })
                .collect(),
        )
    }
}

impl Neg for &ComplexPoly {
    type Output = ComplexPoly;
    fn neg(self) -> ComplexPoly {
        ComplexPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Sub for &ComplexPoly {
    type Output = ComplexPoly;
    fn sub(self, rhs: &ComplexPoly) -> ComplexPoly {
        self + &(-rhs)
    }
}

impl Mul for &ComplexPoly {
    type Output = ComplexPoly;
    fn mul(self, rhs: &ComplexPoly) -> ComplexPoly {
        if self.is_zero() || rhs.is_zero() {
            return ComplexPoly::zero();
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ComplexPoly::new(out)
    }
}

const ABERTH_MAX_ITER: usize = 500;

/// All roots of `p`, with multiplicity.
///
/// Exact zero roots are split off first; the remaining roots come from
/// Aberth–Ehrlich simultaneous iteration followed by a Newton polish.
pub fn poly_roots(p: &ComplexPoly) -> Result<Vec<Complex64>> {
    let p = p.normalized(0.0);
    let degree = match p.degree() {
        Some(d) if d >= 1 => d,
        _ => {
            return Err(Error::InvalidInput(
                "polynomial root finding needs degree >= 1".into(),
            ))
        }
    };
    let zeros = p.coeffs.iter().take_while(|c| c.norm() == 0.0).count();
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    let reduced = ComplexPoly::new(p.coeffs[zeros..].to_vec());
    let rdeg = degree - zeros;
    if rdeg == 0 {
        return Ok(roots);
    }
    if rdeg == 1 {
        roots.push(-reduced.coeffs[0] / reduced.coeffs[1]);
        return Ok(roots);
    }
    if rdeg == 2 {
        roots.extend(quadratic_roots(
            reduced.coeffs[2],
            reduced.coeffs[1],
            reduced.coeffs[0],
        ));
        polish(&reduced, &mut roots[zeros..]);
        return Ok(roots);
    }
    let mut found = aberth(&reduced, rdeg)?;
    polish(&reduced, &mut found);
    roots.extend(found);
    Ok(roots)
}

/// Roots of `a z^2 + b z + c` with the cancellation-free form.
pub fn quadratic_roots(a: Complex64, b: Complex64, c: Complex64) -> [Complex64; 2] {
    let disc = (b * b - 4.0 * a * c).sqrt();
    // Pick the sign that avoids subtracting nearly equal numbers.
    let s = if (b.conj() * disc).re >= 0.0 { b + disc } else { b - disc };
    if s.norm() == 0.0 {
        // b = 0 and disc = 0: double root at the origin.
        let r = (-c / a).sqrt();
        return [r, -r];
    }
    let r1 = -s / (2.0 * a);
    let r2 = -2.0 * c / s;
    [r1, r2]
}

fn aberth(p: &ComplexPoly, degree: usize) -> Result<Vec<Complex64>> {
    let dp = p.derivative();
    let lead = p.coeffs[degree].norm();
    // Fujiwara-type bound on root moduli.
    let radius = (0..degree)
        .map(|j| (p.coeffs[j].norm() / lead).powf(1.0 / (degree - j) as f64))
        .fold(0.0, f64::max)
        .max(1e-3);
    let mut z: Vec<Complex64> = (0..degree)
        .map(|j| {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / degree as f64 + 0.4;
            Complex64::from_polar(0.5 * radius, theta)
        })
        .collect();
    for _ in 0..ABERTH_MAX_ITER {
        let mut max_step: f64 = 0.0;
        for i in 0..degree {
            let pv = p.eval(z[i]);
            if pv.norm() == 0.0 {
                continue;
            }
            let ratio = pv / dp.eval(z[i]);
            let repulsion: Complex64 = (0..degree)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        1.0 / d
                    }
                })
                .sum();
            let denom = 1.0 - ratio * repulsion;
            let step = if denom.norm() == 0.0 || !ratio.is_finite() {
                Complex64::new(1e-8 * radius, 0.0)
            } else {
                ratio / denom
            };
            z[i] -= step;
            max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
        }
        if max_step < 1e-15 {
            return Ok(z);
        }
    }
    // Clusters of multiple roots converge only linearly; accept if residuals are small.
    let scale = p.max_abs_coeff();
    let ok = z
        .iter()
        .all(|&r| p.eval(r).norm() <= 1e-8 * scale * r.norm().max(1.0).powi(degree as i32));
    if ok {
        Ok(z)
    } else {
        Err(Error::NotConverged(
            "Aberth iteration did not converge".into(),
        ))
    }
}

fn polish(p: &ComplexPoly, roots: &mut [Complex64]) {
    let dp = p.derivative();
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let d = dp.eval(*r);
            if d.norm() == 0.0 {
                break;
            }
            let step = p.eval(*r) / d;
            let candidate = *r - step;
            if p.eval(candidate).norm() < p.eval(*r).norm() {
                *r = candidate;
            } else {
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        v
    }

    #[test]
    fn simple_quadratics() {
        let r = sorted(poly_roots(&ComplexPoly::from_real(&[-1.0, 0.0, 1.0])).unwrap());
        assert!((r[0] - c(-1.0, 0.0)).norm() < 1e-15 && (r[1] - c(1.0, 0.0)).norm() < 1e-15);

        let r = poly_roots(&ComplexPoly::from_real(&[0.0, 0.0, 1.0])).unwrap();
        assert_eq!(r, vec![c(0.0, 0.0), c(0.0, 0.0)]);

        // z^2 - i z = z (z - i)
        let r = sorted(poly_roots(&ComplexPoly::new(vec![c(0.0, 0.0), c(0.0, -1.0), c(1.0, 0.0)])).unwrap());
        assert!((r[0] - c(0.0, 0.0)).norm() < 1e-15);
        assert!((r[1] - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn degree_zero_is_rejected() {
        assert!(matches!(
            poly_roots(&ComplexPoly::from_real(&[3.0])),
            Err(Error::InvalidInput(_))
        ));
        assert!(poly_roots(&ComplexPoly::zero()).is_err());
    }

    #[test]
    fn quintic_with_known_roots() {
        let roots = [c(1.0, 0.0), c(-2.0, 0.5), c(0.3, -1.0), c(3.0, 3.0), c(-0.1, 0.0)];
        let p = ComplexPoly::from_roots(c(2.0, -1.0), &roots);
        let found = poly_roots(&p).unwrap();
        for r in roots {
            let best = found.iter().map(|f| (f - r).norm()).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-12, "missing root {r}");
        }
    }

    #[test]
    fn polynomial_arithmetic() {
        let a = ComplexPoly::from_real(&[1.0, 2.0]);
        let b = ComplexPoly::from_real(&[-1.0, 0.0, 3.0]);
        assert_eq!((&a * &b).coeffs(), ComplexPoly::from_real(&[-1.0, -2.0, 3.0, 6.0]).coeffs());
        assert_eq!((&a - &a).degree(), None);
        assert_eq!(b.derivative().coeffs(), ComplexPoly::from_real(&[0.0, 6.0]).coeffs());
    }
}

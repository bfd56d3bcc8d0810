//! Kummer's confluent hypergeometric function M(a, b, z) = 1F1(a; b; z).

use num_complex::Complex64;

use crate::error::{Error, Result};

const MAX_TERMS: usize = 20_000;
const TOL: f64 = 1e-16;

fn is_nonpositive_integer(b: Complex64) -> bool {
    b.im == 0.0 && b.re <= 0.0 && b.re.fract() == 0.0
}

/// Kummer's function by its Taylor series.
///
/// For `Re z < 0` Kummer's transformation `M(a,b,z) = e^z M(b-a,b,-z)` is
/// applied first so that the summed series has no sign-alternating
/// cancellation for real parameters. Summation stops once a geometric bound
/// on the remaining tail falls below `1e-16` of the partial sum.
pub fn kummer_1f1(a: Complex64, b: Complex64, z: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(b) {
        return Err(Error::Pole(b.to_string()));
    }
    if z.re < 0.0 {
        Ok(z.exp() * taylor(b - a, b, -z)?)
    } else {
        taylor(a, b, z)
    }
}

/// First derivative, `M'(a,b,z) = (a/b) M(a+1, b+1, z)`.
pub fn kummer_1f1_prime(a: Complex64, b: Complex64, z: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(b) {
        return Err(Error::Pole(b.to_string()));
    }
    let one = Complex64::new(1.0, 0.0);
    Ok(a / b * kummer_1f1(a + one, b + one, z)?)
}

fn taylor(a: Complex64, b: Complex64, z: Complex64) -> Result<Complex64> {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        let ratio = (a + nf) / (b + nf) * z / (nf + 1.0);
        term *= ratio;
        sum += term;
        if term.norm() == 0.0 {
            return Ok(sum);
        }
        // Once |ratio| is below one and decreasing in n, the tail is bounded
        // by the geometric series starting at the next term.
        let next_ratio = ((a + nf + 1.0) / (b + nf + 1.0) * z / (nf + 2.0)).norm();
        if nf + 1.0 > z.norm() && next_ratio < 1.0 {
            let tail = term.norm() * next_ratio / (1.0 - next_ratio);
            if tail <= TOL * sum.norm() {
                return Ok(sum);
            }
        }
    }
    Err(Error::NotConverged(format!(
        "Kummer series for a={a}, b={b}, z={z} did not converge in {MAX_TERMS} terms"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn trivial_identities() {
        assert_eq!(kummer_1f1(c(0.3, 0.1), c(1.7, 0.0), c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
        for z in [c(1.0, 0.0), c(-3.0, 0.5), c(10.0, -2.0), c(-40.0, 0.0)] {
            let m = kummer_1f1(c(1.3, 0.2), c(1.3, 0.2), z).unwrap();
            assert!((m - z.exp()).norm() <= 1e-13 * z.exp().norm(), "z={z}");
        }
    }

    #[test]
    fn pole_detection() {
        assert!(matches!(kummer_1f1(c(1.0, 0.0), c(-2.0, 0.0), c(1.0, 0.0)), Err(Error::Pole(_))));
        assert!(matches!(kummer_1f1(c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)), Err(Error::Pole(_))));
        assert!(kummer_1f1(c(1.0, 0.0), c(-2.0, 1e-3), c(1.0, 0.0)).is_ok());
    }

    #[test]
    fn polynomial_case() {
        // M(-2, b, z) = 1 - 2z/b + z^2/(b(b+1))
        let b = c(0.5, 0.0);
        for z in [c(0.7, 0.0), c(-5.0, 0.0), c(2.0, 3.0)] {
            let exact = 1.0 - 2.0 * z / b + z * z / (b * (b + 1.0));
            let m = kummer_1f1(c(-2.0, 0.0), b, z).unwrap();
            assert!((m - exact).norm() < 1e-12 * exact.norm().max(1.0), "z={z}: {m} vs {exact}");
        }
    }
}

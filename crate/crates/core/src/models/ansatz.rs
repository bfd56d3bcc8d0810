//! Prefactor exponents and the map from a class member to Heun parameters.

use num_complex::Complex64;
use serde::Serialize;

use super::catalog::{ClassId, ModelClass};
use crate::error::{Error, Result};
use crate::heun::{DerivativeData, HeunFamily, HeunParams};
use crate::numerics::quadratic_roots;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Exponents of the prefactor `φ(z)`.
///
/// Double: `φ = z^{α1} e^{α0 z − α2/z}`. Bi: `φ = z^{α1} e^{α0 z + α2 z²/2}`.
/// Tri: `φ = e^{α0 z + α1 z²/2 + α2 z³/3}`. The derivative classes carry
/// `σ` for their `z^σ` or `e^{−σ/z}` weights; the tri-derivative weight
/// `e^{iδ0 z}` is stored as `α0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnsatzExponents {
    #[serde(serialize_with = "ser_c")]
    pub a0: Complex64,
    #[serde(serialize_with = "ser_c")]
    pub a1: Complex64,
    #[serde(serialize_with = "ser_c")]
    pub a2: Complex64,
    #[serde(serialize_with = "ser_opt_c")]
    pub sigma: Option<Complex64>,
}

fn ser_c<S: serde::Serializer>(c: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [c.re, c.im].serialize(s)
}

fn ser_opt_c<S: serde::Serializer>(c: &Option<Complex64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    c.map(|c| [c.re, c.im]).serialize(s)
}

impl AnsatzExponents {
    pub fn new(a0: Complex64, a1: Complex64, a2: Complex64) -> Self {
        AnsatzExponents { a0, a1, a2, sigma: None }
    }

    pub fn zero() -> Self {
        Self::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    }

    fn weight(&self) -> f64 {
        self.a0.norm() + self.a1.norm() + self.a2.norm() + self.sigma.map_or(0.0, |s| s.norm())
    }
}

fn model_scale(m: &ModelClass) -> f64 {
    [m.u0star * m.u0star, m.d0, m.d1, m.d2, m.z0.unwrap_or_default()]
        .iter()
        .map(|c| c.norm())
        .fold(1.0, f64::max)
}

fn degenerate_tol(m: &ModelClass) -> f64 {
    1e-12 * model_scale(m)
}

/// All exponent sets for which the prefactor maps the amplitude equation onto
/// a Heun equation, ordered by `|α0| + |α1| + |α2|`.
pub fn solve_ansatz(m: &ModelClass) -> Result<Vec<AnsatzExponents>> {
    let vals = [m.u0star, m.d0, m.d1, m.d2, m.z0.unwrap_or_default()];
    if vals.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite model parameters: {}", m.describe())));
    }
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let k = m.id.k().unwrap_or(0.0);
    let mut sets = Vec::new();
    match m.id {
        ClassId::Double { .. } => {
            let a0s = quadratic_roots(one, -I * m.d0, m.q_coeff(4));
            let a2s = quadratic_roots(one, -I * m.d2, m.q_coeff(0));
            for &a0 in &a0s {
                for &a2 in &a2s {
                    let gamma = 2.0 * a2 - I * m.d2;
                    let rhs = a2 * (2.0 + k + I * m.d1) - m.q_coeff(1);
                    if let Some(a1) = linear_step(gamma, rhs, degenerate_tol(m)) {
                        sets.push(AnsatzExponents::new(a0, a1, a2));
                    }
                }
            }
        }
        ClassId::Bi { .. } => {
            let a1s = quadratic_roots(one, -(1.0 + k + I * m.d1), m.q_coeff(0));
            let a2s = quadratic_roots(one, -I * m.d2, m.q_coeff(4));
            for &a1 in &a1s {
                for &a2 in &a2s {
                    let eps = 2.0 * a2 - I * m.d2;
                    let rhs = I * a2 * m.d0 - m.q_coeff(3);
                    if let Some(a0) = linear_step(eps, rhs, degenerate_tol(m)) {
                        sets.push(AnsatzExponents::new(a0, a1, a2));
                    }
                }
            }
        }
        ClassId::Tri => {
            sets.push(AnsatzExponents::zero());
            sets.push(AnsatzExponents::new(I * m.d0, I * m.d1, I * m.d2));
        }
        ClassId::TriDerivative => sets.push(AnsatzExponents::new(I * m.d0, zero, zero)),
        ClassId::BiDerivative | ClassId::DoubleDerivative => {
            let mut a = AnsatzExponents::zero();
            a.sigma = m.sigma();
            sets.push(a);
        }
    }
    let mut unique: Vec<AnsatzExponents> = Vec::with_capacity(sets.len());
    for s in sets {
        let dup = unique.iter().any(|u| {
            (u.a0 - s.a0).norm() + (u.a1 - s.a1).norm() + (u.a2 - s.a2).norm() <= 1e-14 * model_scale(m)
        });
        if !dup {
            unique.push(s);
        }
    }
    unique.sort_by(|a, b| a.weight().partial_cmp(&b.weight()).unwrap_or(std::cmp::Ordering::Equal));
    Ok(unique)
}

/// Solves `coef · x = rhs`. A vanishing coefficient with consistent right-hand
/// side leaves `x` free and it is set to zero; an inconsistent one has no solution.
fn linear_step(coef: Complex64, rhs: Complex64, tol: f64) -> Option<Complex64> {
    if coef.norm() > tol {
        Some(rhs / coef)
    } else if rhs.norm() <= tol {
        Some(Complex64::new(0.0, 0.0))
    } else {
        None
    }
}

/// Residuals of the defining constraint system for `(model, ansatz)`.
pub fn constraint_residuals(m: &ModelClass, a: &AnsatzExponents) -> Result<Vec<f64>> {
    let k = m.id.k().unwrap_or(0.0);
    Ok(match m.id {
        ClassId::Double { .. } => {
            let gamma = 2.0 * a.a2 - I * m.d2;
            vec![
                (a.a0 * a.a0 - I * a.a0 * m.d0 + m.q_coeff(4)).norm(),
                (a.a1 * gamma - a.a2 * (2.0 + k + I * m.d1) + m.q_coeff(1)).norm(),
                (a.a2 * a.a2 - I * a.a2 * m.d2 + m.q_coeff(0)).norm(),
            ]
        }
        ClassId::Bi { .. } => {
            let eps = 2.0 * a.a2 - I * m.d2;
            vec![
                (a.a0 * eps - I * a.a2 * m.d0 + m.q_coeff(3)).norm(),
                (a.a1 * a.a1 - a.a1 * (1.0 + k + I * m.d1) + m.q_coeff(0)).norm(),
                (a.a2 * a.a2 - I * a.a2 * m.d2 + m.q_coeff(4)).norm(),
            ]
        }
        ClassId::Tri => {
            // (φ'/φ)(φ'/φ − iδ*) must vanish identically; its z^0..z^4 coefficients.
            let f = [a.a0, a.a1, a.a2];
            let g = [a.a0 - I * m.d0, a.a1 - I * m.d1, a.a2 - I * m.d2];
            (0..5)
                .map(|j| {
                    let mut s = Complex64::new(0.0, 0.0);
                    for i in 0..3 {
                        if j >= i && j - i < 3 {
                            s += f[i] * g[j - i];
                        }
                    }
                    s.norm()
                })
                .collect()
        }
        ClassId::TriDerivative => vec![
            (m.u0star * m.u0star + m.d0 * m.d2).norm(),
            (a.a0 - I * m.d0).norm(),
        ],
        ClassId::BiDerivative | ClassId::DoubleDerivative => {
            let sigma = a
                .sigma
                .ok_or_else(|| Error::Constraint(format!("{} needs an exponent sigma", m.id)))?;
            let p = derivative_params(m, sigma)?;
            let data = derivative_data(m, sigma)?;
            let mut r = vec![(sigma - m.sigma().expect("derivative class")).norm()];
            if m.id == ClassId::BiDerivative {
                let z0 = data.z0;
                let alpha = I * m.d2 * (1.0 - 2.0 * sigma) - I * m.d0 * sigma / z0;
                r.push((p.alpha - alpha).norm());
                r.push((m.u0star * m.u0star - (p.alpha + p.epsilon - p.epsilon * sigma)).norm());
                r.push((sigma - (p.gamma + p.delta * z0 + p.epsilon * z0 * z0)).norm());
                r.push(((p.alpha + p.epsilon) * z0 - (p.delta + 2.0 * p.epsilon * z0) * sigma).norm());
            } else {
                r.push((m.u0star * m.u0star + p.epsilon * sigma).norm());
                r.push((sigma - (p.gamma - p.delta * p.delta / (4.0 * p.epsilon))).norm());
                r.push((p.alpha + p.epsilon).norm());
                r.push((p.q - p.delta / 2.0).norm());
            }
            r
        }
    })
}

fn derivative_params(m: &ModelClass, sigma: Complex64) -> Result<HeunParams> {
    let zero = Complex64::new(0.0, 0.0);
    match m.id {
        ClassId::TriDerivative => HeunParams::new(
            HeunFamily::Tri,
            I * m.d0,
            -I * m.d1,
            -I * m.d2,
            m.d0 * m.d1 + I * m.d2,
            zero,
        ),
        ClassId::BiDerivative => {
            let z0 = m.z0.ok_or_else(|| Error::InvalidInput("bi-derivative class needs z0".into()))?;
            let alpha = I * m.d2 * (1.0 - 2.0 * sigma) - I * m.d0 * sigma / z0;
            HeunParams::new(HeunFamily::Bi, -I * m.d1 + 2.0 * sigma, -I * m.d0, -I * m.d2, alpha, alpha * z0)
        }
        ClassId::DoubleDerivative => HeunParams::new(
            HeunFamily::Double,
            -I * m.d2 + 2.0 * sigma,
            -I * m.d1,
            -I * m.d0,
            I * m.d0,
            -I * m.d1 / 2.0,
        ),
        _ => Err(Error::InvalidInput(format!("{} is not a derivative class", m.id))),
    }
}

/// `(z0, σ)` entering the derivative equation of a derivative class.
pub fn derivative_data(m: &ModelClass, sigma: Complex64) -> Result<DerivativeData> {
    let zero = Complex64::new(0.0, 0.0);
    match m.id {
        ClassId::TriDerivative => Ok(DerivativeData { z0: zero, sigma: zero }),
        ClassId::BiDerivative | ClassId::DoubleDerivative => Ok(DerivativeData {
            z0: m.z0.ok_or_else(|| Error::InvalidInput(format!("{} needs z0", m.id)))?,
            sigma,
        }),
        _ => Err(Error::InvalidInput(format!("{} is not a derivative class", m.id))),
    }
}

/// Heun parameters for `(model, ansatz)`; fails if the ansatz does not solve
/// the model's constraint system.
pub fn heun_params_from_model(m: &ModelClass, a: &AnsatzExponents) -> Result<HeunParams> {
    let res = constraint_residuals(m, a)?;
    let s = model_scale(m);
    let worst = res.iter().cloned().fold(0.0, f64::max);
    if worst > 1e-9 * s * s.max(a.weight()) {
        return Err(Error::Constraint(format!(
            "ansatz {a:?} does not solve the constraints of {} (residual {worst:e})",
            m.describe()
        )));
    }
    let k = m.id.k().unwrap_or(0.0);
    match m.id {
        ClassId::Double { .. } => {
            let gamma = 2.0 * a.a2 - I * m.d2;
            let delta = 2.0 * a.a1 - I * m.d1 - k;
            let eps = 2.0 * a.a0 - I * m.d0;
            let alpha = a.a1 * eps - a.a0 * (k + I * m.d1) + m.q_coeff(3);
            let q = a.a1 * (1.0 + k + I * m.d1 - a.a1) - a.a2 * eps + I * a.a0 * m.d2 - m.q_coeff(2);
            HeunParams::new(HeunFamily::Double, gamma, delta, eps, alpha, q)
        }
        ClassId::Bi { .. } => {
            let gamma = 2.0 * a.a1 - I * m.d1 - k;
            let delta = 2.0 * a.a0 - I * m.d0;
            let eps = 2.0 * a.a2 - I * m.d2;
            let alpha = a.a0 * (a.a0 - I * m.d0) + a.a1 * eps + a.a2 * (1.0 - k - I * m.d1) + m.q_coeff(2);
            let q = a.a0 * (k + I * m.d1) - a.a1 * delta - m.q_coeff(1);
            HeunParams::new(HeunFamily::Bi, gamma, delta, eps, alpha, q)
        }
        ClassId::Tri => HeunParams::new(
            HeunFamily::Tri,
            2.0 * a.a0 - I * m.d0,
            2.0 * a.a1 - I * m.d1,
            2.0 * a.a2 - I * m.d2,
            2.0 * a.a2,
            -a.a1 - m.u0star * m.u0star,
        ),
        ClassId::TriDerivative => derivative_params(m, Complex64::new(0.0, 0.0)),
        ClassId::BiDerivative | ClassId::DoubleDerivative => derivative_params(m, a.sigma.expect("checked above")),
    }
}

/// `φ = z^λ exp(Σ b_j z^j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Prefactor {
    pub lambda: Complex64,
    pub terms: Vec<(i32, Complex64)>,
}

impl Prefactor {
    pub fn for_model(m: &ModelClass, a: &AnsatzExponents) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        let (lambda, terms) = match m.id {
            ClassId::Double { .. } => (a.a1, vec![(1, a.a0), (-1, -a.a2)]),
            ClassId::Bi { .. } => (a.a1, vec![(1, a.a0), (2, a.a2 / 2.0)]),
            ClassId::Tri => (zero, vec![(1, a.a0), (2, a.a1 / 2.0), (3, a.a2 / 3.0)]),
            ClassId::TriDerivative => (zero, vec![(1, a.a0)]),
            ClassId::BiDerivative => (a.sigma.unwrap_or_default(), vec![]),
            ClassId::DoubleDerivative => (zero, vec![(-1, -a.sigma.unwrap_or_default())]),
        };
        Prefactor {
            lambda,
            terms: terms.into_iter().filter(|(_, b)| b.norm() != 0.0).collect(),
        }
    }

    /// `φ(z)` with `log_z` fixing the branch of `z^λ`.
    pub fn value(&self, z: Complex64, log_z: Complex64) -> Complex64 {
        let mut e = if self.lambda.norm() == 0.0 { Complex64::new(0.0, 0.0) } else { self.lambda * log_z };
        for &(j, b) in &self.terms {
            e += b * z.powi(j);
        }
        e.exp()
    }

    /// `(L, L')` for the logarithmic derivative `L = φ'/φ`.
    pub fn log_derivs(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut l = Complex64::new(0.0, 0.0);
        let mut dl = Complex64::new(0.0, 0.0);
        if self.lambda.norm() != 0.0 {
            l += self.lambda / z;
            dl -= self.lambda / (z * z);
        }
        for &(j, b) in &self.terms {
            let jf = j as f64;
            l += b * jf * z.powi(j - 1);
            dl += b * jf * (jf - 1.0) * z.powi(j - 2);
        }
        (l, dl)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }
    fn r(x: f64) -> Complex64 {
        c(x, 0.0)
    }

    #[test]
    fn double_k_minus_one_zero_set_first() {
        let m = ModelClass::base(ClassId::Double { twice_k: -2 }, r(3.0), r(1.0), r(-2.0), r(1.0)).unwrap();
        let sets = solve_ansatz(&m).unwrap();
        assert_eq!(sets[0], AnsatzExponents::zero());
        assert_eq!(sets.len(), 4);
        for s in &sets {
            assert!(constraint_residuals(&m, s).unwrap().iter().all(|&x| x < 1e-12));
        }
        let p = heun_params_from_model(&m, &sets[0]).unwrap();
        assert_eq!(p.as_array(), [c(0.0, -1.0), c(1.0, 2.0), c(0.0, -1.0), r(0.0), r(-9.0)]);
    }

    #[test]
    fn tri_sets() {
        let m = ModelClass::base(ClassId::Tri, r(1.5), r(0.0), r(-1.0), r(1.0)).unwrap();
        let sets = solve_ansatz(&m).unwrap();
        assert_eq!(sets.len(), 2);
        assert_eq!(sets[1], AnsatzExponents::new(r(0.0), c(0.0, -1.0), c(0.0, 1.0)));
        let p = heun_params_from_model(&m, &sets[1]).unwrap();
        assert_eq!(p.as_array(), [r(0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 2.0), c(-2.25, 1.0)]);
    }

    #[test]
    fn inconsistent_ansatz_rejected() {
        let m = ModelClass::base(ClassId::Bi { twice_k: 0 }, r(1.0), r(0.3), r(0.2), r(0.1)).unwrap();
        let bad = AnsatzExponents::new(r(1.0), r(1.0), r(1.0));
        assert!(matches!(heun_params_from_model(&m, &bad), Err(Error::Constraint(_))));
    }

    #[test]
    fn degenerate_linear_step() {
        assert_eq!(linear_step(r(0.0), r(0.0), 1e-12), Some(r(0.0)));
        assert_eq!(linear_step(r(0.0), r(1.0), 1e-12), None);
        assert_eq!(linear_step(r(2.0), r(1.0), 1e-12), Some(r(0.5)));
    }

    #[test]
    fn prefactor_log_derivative() {
        let m = ModelClass::base(ClassId::Double { twice_k: -4 }, r(0.7), r(0.2), r(0.1), r(0.5)).unwrap();
        let a = solve_ansatz(&m).unwrap()[1];
        let pf = Prefactor::for_model(&m, &a);
        let z = c(1.3, 0.2);
        let h = 1e-6;
        let fd = (pf.value(z + h, (z + h).ln()) - pf.value(z - h, (z - h).ln())) / (2.0 * h);
        let (l, _) = pf.log_derivs(z);
        assert!((fd / pf.value(z, z.ln()) - l).norm() < 1e-8);
    }
}

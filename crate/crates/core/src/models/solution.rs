//! Analytic two-state amplitudes `a₂ = φ(z) H(z)` and `a₁` from the first-order system.

use num_complex::Complex64;

use super::ansatz::{heun_params_from_model, solve_ansatz, AnsatzExponents, Prefactor};
use super::catalog::{ClassKind, ModelClass};
use super::field::{field_configuration, FieldConfiguration};
use super::transform::{Transform, ZJet};
use crate::error::{Error, Result};
use crate::heun::{eval_heun_branch, heun_jet, heun_rhs, integrate_curve, series_jet, Branch, HeunFamily, HeunParams, SERIES_RADIUS};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Heun evaluation tolerance used for analytic amplitudes.
pub const EVAL_TOL: f64 = 1e-12;

/// A two-state solution built from a class member, one exponent set and a transformation.
#[derive(Debug, Clone)]
pub struct TwoStateSolution {
    pub model: ModelClass,
    pub ansatz: AnsatzExponents,
    pub heun: HeunParams,
    pub transform: Transform,
    pub field: FieldConfiguration,
    pub branch: Branch,
    pub prefactor: Prefactor,
}

/// `a₂` and its first two time derivatives.
pub type A2Jet = [Complex64; 3];

impl TwoStateSolution {
    /// Uses the `index`-th exponent set returned by [`solve_ansatz`].
    pub fn new(model: &ModelClass, index: usize, transform: &Transform, domain: (f64, f64)) -> Result<Self> {
        let sets = solve_ansatz(model)?;
        let ansatz = *sets.get(index).ok_or_else(|| {
            Error::InvalidInput(format!("exponent set {index} requested but only {} exist", sets.len()))
        })?;
        Self::with_ansatz(model, &ansatz, transform, domain)
    }

    pub fn with_ansatz(
        model: &ModelClass,
        ansatz: &AnsatzExponents,
        transform: &Transform,
        domain: (f64, f64),
    ) -> Result<Self> {
        let heun = heun_params_from_model(model, ansatz)?;
        let field = field_configuration(model, transform, domain)?;
        Ok(TwoStateSolution {
            model: *model,
            ansatz: *ansatz,
            heun,
            transform: transform.clone(),
            field,
            branch: Branch::default_for(&heun),
            prefactor: Prefactor::for_model(model, ansatz),
        })
    }

    /// Same construction with another Heun solution in place of the default one.
    pub fn with_branch(&self, branch: Branch) -> Self {
        TwoStateSolution { branch, ..self.clone() }
    }

    /// Same construction with `δ(t_ref)` set to `offset`.
    pub fn with_gauge(&self, offset: f64) -> Self {
        TwoStateSolution { field: self.field.with_gauge(offset), ..self.clone() }
    }

    fn is_derivative(&self) -> bool {
        self.model.id.kind() == ClassKind::Derivative
    }

    /// `[u, u', u'', u''']` (the last entry only for derivative classes) at each `z(t)`.
    fn heun_jets(&self, zs: &[ZJet], times: &[f64]) -> Result<Vec<[Complex64; 4]>> {
        let p = &self.heun;
        let zero = Complex64::new(0.0, 0.0);
        let finish = |z: Complex64, u: Complex64, du: Complex64| -> Result<[Complex64; 4]> {
            if self.is_derivative() {
                heun_jet(p, z, u, du)
            } else {
                let (_, ddu) = heun_rhs(p, z, (u, du))?;
                Ok([u, du, ddu, zero])
            }
        };
        if p.family == HeunFamily::Bi {
            return zs
                .iter()
                .map(|j| match self.branch {
                    Branch::Series { mu } if !self.is_derivative() && j.z.norm() <= SERIES_RADIUS => {
                        let [u, du, ddu] = series_jet(p, mu, j.z, Some(j.log_z))?;
                        Ok([u, du, ddu, zero])
                    }
                    _ => {
                        let (u, du) = eval_heun_branch(p, self.branch, j.z, None, Some(j.log_z), EVAL_TOL)?;
                        finish(j.z, u, du)
                    }
                })
                .collect();
        }
        // Continue along the curve from the reference time so the path follows z(t).
        let t_ref = self.field.t_ref;
        let start = self.transform.eval(t_ref)?;
        let state = eval_heun_branch(p, self.branch, start.z, None, Some(start.log_z), EVAL_TOL)?;
        let mut order: Vec<usize> = (0..times.len()).collect();
        order.sort_by(|&a, &b| times[a].total_cmp(&times[b]));
        let mut uniq: Vec<f64> = Vec::with_capacity(times.len());
        let mut slot = vec![0usize; times.len()];
        for &k in &order {
            if uniq.last() != Some(&times[k]) {
                uniq.push(times[k]);
            }
            slot[k] = uniq.len() - 1;
        }
        let tr = &self.transform;
        let states = integrate_curve(
            p,
            |t| {
                let j = tr.eval(t)?;
                Ok((j.z, j.dz))
            },
            t_ref,
            state,
            &uniq,
            EVAL_TOL,
        )?;
        (0..times.len())
            .map(|k| {
                let (u, du) = states[slot[k]];
                finish(zs[k].z, u, du)
            })
            .collect()
    }

    /// `[a₂, da₂/dt, d²a₂/dt²]` at each time, by the chain rule through `z(t)`.
    pub fn a2_jets(&self, times: &[f64]) -> Result<Vec<A2Jet>> {
        let zs: Vec<ZJet> = times.iter().map(|&t| self.transform.eval(t)).collect::<Result<_>>()?;
        let heun = self.heun_jets(&zs, times)?;
        let derivative = self.is_derivative();
        Ok(zs
            .iter()
            .zip(heun)
            .map(|(j, h)| {
                let (w0, w1, w2) = if derivative { (h[1], h[2], h[3]) } else { (h[0], h[1], h[2]) };
                let phi = self.prefactor.value(j.z, j.log_z);
                let (l, dl) = self.prefactor.log_derivs(j.z);
                let a = phi * w0;
                let az = phi * (l * w0 + w1);
                let azz = phi * ((l * l + dl) * w0 + 2.0 * l * w1 + w2);
                [a, az * j.dz, azz * j.dz * j.dz + az * j.d2z]
            })
            .collect())
    }

    pub fn a2_jet(&self, t: f64) -> Result<A2Jet> {
        Ok(self.a2_jets(&[t])?[0])
    }

    /// `a₁ = i (da₂/dt) e^{−iδ} / U`.
    pub fn a1_from_jet(&self, t: f64, jet: &A2Jet) -> Result<Complex64> {
        let u = self.field.u_c(t)?;
        if u.norm() == 0.0 {
            return Err(Error::Division(format!("U({t}) = 0, a1 is undefined (a2 = {})", jet[0])));
        }
        let delta = self.field.delta_c(t)?;
        Ok(I * jet[1] * (-I * delta).exp() / u)
    }
}

/// `(a₁, a₂)` at time `t`.
pub fn analytic_amplitudes(sol: &TwoStateSolution, t: f64) -> Result<(Complex64, Complex64)> {
    let jet = sol.a2_jet(t)?;
    Ok((sol.a1_from_jet(t, &jet)?, jet[0]))
}

/// `(a₁, a₂)` on a grid, sharing one path continuation.
pub fn analytic_amplitudes_grid(sol: &TwoStateSolution, times: &[f64]) -> Result<Vec<(Complex64, Complex64)>> {
    let jets = sol.a2_jets(times)?;
    times
        .iter()
        .zip(jets.iter())
        .map(|(&t, j)| Ok((sol.a1_from_jet(t, j)?, j[0])))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heun::eval_heun;
    use crate::models::catalog::ClassId;

    fn r(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn double_at_origin_of_time_is_heun_value() {
        let m = ModelClass::base(ClassId::Double { twice_k: -2 }, r(3.0), r(1.0), r(1.0), r(1.0)).unwrap();
        let sol = TwoStateSolution::new(&m, 0, &Transform::Exp, (-2.0, 2.0)).unwrap();
        let (_, a2) = analytic_amplitudes(&sol, 0.0).unwrap();
        let (u, _) = eval_heun(&sol.heun, r(1.0), None, 1e-12).unwrap();
        assert!((a2 - u).norm() < 1e-12);
    }

    #[test]
    fn time_derivatives_match_differences() {
        let m = ModelClass::base(ClassId::Bi { twice_k: -1 }, r(1.0), r(-1.0), r(0.0), r(2.5)).unwrap();
        let sol = TwoStateSolution::new(&m, 0, &Transform::Square, (-1.5, 1.5)).unwrap();
        let h = 1e-4;
        for t in [-1.2, -0.3, 0.0, 0.7] {
            let j = sol.a2_jets(&[t - h, t, t + h]).unwrap();
            let fd1 = (j[2][0] - j[0][0]) / (2.0 * h);
            let fd2 = (j[2][0] - 2.0 * j[1][0] + j[0][0]) / (h * h);
            assert!((fd1 - j[1][1]).norm() < 1e-6 * j[1][1].norm().max(1.0), "t={t}");
            assert!((fd2 - j[1][2]).norm() < 1e-4 * j[1][2].norm().max(1.0), "t={t}");
        }
    }

    #[test]
    fn zero_coupling_amplitude_is_undefined() {
        let m = ModelClass::base(ClassId::Tri, r(0.0), r(0.0), r(-1.0), r(1.0)).unwrap();
        let sol = TwoStateSolution::new(&m, 0, &Transform::Affine { scale: 1.0, t1: 1.0 }, (-2.0, 4.0)).unwrap();
        assert!(matches!(analytic_amplitudes(&sol, 0.5), Err(Error::Division(_))));
        assert!(sol.a2_jet(0.5).is_ok());
    }
}

//! Real-time field configurations `U(t)`, `δ_t(t)` and `δ(t)`.

use num_complex::Complex64;

use super::catalog::{ModelClass, PowerSum};
use super::transform::Transform;
use crate::error::{Error, Result};
use crate::numerics::{integrate_ode, OdeOptions};

const REALNESS_TOL: f64 = 1e-10;
const REALNESS_SAMPLES: usize = 64;

/// `U(t) = U*(z) dz/dt` and `δ_t(t) = δ*_z(z) dz/dt` for a model and a transformation.
#[derive(Debug, Clone)]
pub struct FieldConfiguration {
    pub model: ModelClass,
    pub transform: Transform,
    pub domain: (f64, f64),
    /// Time at which `δ` equals the gauge constant.
    pub t_ref: f64,
    pub gauge: f64,
    amplitude: PowerSum,
    detuning: PowerSum,
    delta_ref: Complex64,
}

fn power_sum_dz(tr: &Transform, sum: &PowerSum, t: f64) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for &(c, p) in &sum.terms {
        if c.norm() != 0.0 {
            acc += c * tr.zpow_dz(t, p)?;
        }
    }
    Ok(acc)
}

fn power_sum_dz_dt(tr: &Transform, sum: &PowerSum, t: f64) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for &(c, p) in &sum.terms {
        if c.norm() != 0.0 {
            acc += c * tr.zpow_dz_dt(t, p)?;
        }
    }
    Ok(acc)
}

fn power_sum_antiderivative(tr: &Transform, sum: &PowerSum, t: f64) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for &(c, p) in &sum.terms {
        if c.norm() != 0.0 {
            acc += c * tr.zpow_antiderivative(t, p)?;
        }
    }
    Ok(acc)
}

/// Builds the field configuration of `model` under `transform` on `domain`,
/// checking that `U` and `δ_t` are real there.
pub fn field_configuration(model: &ModelClass, transform: &Transform, domain: (f64, f64)) -> Result<FieldConfiguration> {
    transform.validate()?;
    let (lo, hi) = domain;
    let (dlo, dhi) = transform.domain();
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Domain(format!("invalid time interval [{lo}, {hi}]")));
    }
    if lo < dlo || hi > dhi {
        return Err(Error::Domain(format!(
            "interval [{lo}, {hi}] leaves the domain [{dlo}, {dhi}] of transform {}",
            transform.spec()
        )));
    }
    let amplitude = model.amplitude_terms();
    let detuning = model.detuning_terms();
    if matches!(transform, Transform::Square) && lo < 0.0 && hi > 0.0 {
        let log_term = detuning.terms.iter().any(|&(c, p)| c.norm() != 0.0 && (p + 1.0).abs() < 1e-14);
        if log_term {
            return Err(Error::Domain(
                "the square transform with a nonzero 1/z detuning term cannot cross t = 0".into(),
            ));
        }
    }
    let mut cfg = FieldConfiguration {
        model: *model,
        transform: transform.clone(),
        domain,
        t_ref: transform.reference_time(),
        gauge: 0.0,
        amplitude,
        detuning,
        delta_ref: Complex64::new(0.0, 0.0),
    };
    let usable = cfg.t_ref >= lo
        && cfg.t_ref <= hi
        && (transform.is_custom() || cfg.antiderivative(cfg.t_ref).is_ok());
    if !usable {
        cfg.t_ref = 0.5 * (lo + hi);
    }
    if !transform.is_custom() {
        cfg.delta_ref = cfg.antiderivative(cfg.t_ref)?;
    }
    cfg.check_realness()?;
    Ok(cfg)
}

impl FieldConfiguration {
    /// Same configuration with `δ(t_ref) = offset`.
    pub fn with_gauge(&self, offset: f64) -> Self {
        FieldConfiguration { gauge: offset, ..self.clone() }
    }

    fn antiderivative(&self, t: f64) -> Result<Complex64> {
        power_sum_antiderivative(&self.transform, &self.detuning, t)
    }

    fn check_realness(&self) -> Result<()> {
        let (lo, hi) = self.domain;
        for j in 0..REALNESS_SAMPLES {
            let t = lo + (hi - lo) * j as f64 / (REALNESS_SAMPLES - 1) as f64;
            if let Ok(u) = self.u_c(t) {
                if u.im.abs() > REALNESS_TOL * u.norm().max(1.0) {
                    return Err(Error::Realness(format!(
                        "U({t}) = {u} is not real; adjust U0* = {} (z0 = {:?}) for transform {}",
                        self.model.u0star,
                        self.model.z0,
                        self.transform.spec()
                    )));
                }
            }
            if let Ok(d) = self.delta_t_c(t) {
                if d.im.abs() > REALNESS_TOL * d.norm().max(1.0) {
                    return Err(Error::Realness(format!(
                        "delta_t({t}) = {d} is not real; adjust delta0 = {}, delta1 = {}, delta2 = {} for transform {}",
                        self.model.d0,
                        self.model.d1,
                        self.model.d2,
                        self.transform.spec()
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_time(&self, t: f64) -> Result<()> {
        let (dlo, dhi) = self.transform.domain();
        if !t.is_finite() || t < dlo || t > dhi {
            return Err(Error::Domain(format!("t = {t} is outside the transform domain [{dlo}, {dhi}]")));
        }
        Ok(())
    }

    pub fn u_c(&self, t: f64) -> Result<Complex64> {
        self.check_time(t)?;
        power_sum_dz(&self.transform, &self.amplitude, t)
    }

    pub fn u_t_c(&self, t: f64) -> Result<Complex64> {
        self.check_time(t)?;
        power_sum_dz_dt(&self.transform, &self.amplitude, t)
    }

    pub fn delta_t_c(&self, t: f64) -> Result<Complex64> {
        self.check_time(t)?;
        power_sum_dz(&self.transform, &self.detuning, t)
    }

    pub fn ddelta_t_c(&self, t: f64) -> Result<Complex64> {
        self.check_time(t)?;
        power_sum_dz_dt(&self.transform, &self.detuning, t)
    }

    /// `δ(t) = ∫_{t_ref}^t δ_t + gauge`.
    pub fn delta_c(&self, t: f64) -> Result<Complex64> {
        self.check_time(t)?;
        if self.transform.is_custom() {
            return Ok(self.quadrature(t)? + self.gauge);
        }
        Ok(self.antiderivative(t)? - self.delta_ref + self.gauge)
    }

    fn quadrature(&self, t: f64) -> Result<Complex64> {
        if t == self.t_ref {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let opts = OdeOptions::new(1e-12, 1e-14);
        let traj = integrate_ode(
            |s, _y, dy| {
                dy[0] = self.delta_t_c(s)?;
                Ok(())
            },
            self.t_ref,
            t,
            &[Complex64::new(0.0, 0.0)],
            &[],
            &opts,
        )?;
        Ok(traj.final_state()[0])
    }

    pub fn u(&self, t: f64) -> Result<f64> {
        Ok(self.u_c(t)?.re)
    }

    pub fn u_t(&self, t: f64) -> Result<f64> {
        Ok(self.u_t_c(t)?.re)
    }

    pub fn delta_t(&self, t: f64) -> Result<f64> {
        Ok(self.delta_t_c(t)?.re)
    }

    pub fn ddelta_t(&self, t: f64) -> Result<f64> {
        Ok(self.ddelta_t_c(t)?.re)
    }

    pub fn delta(&self, t: f64) -> Result<f64> {
        Ok(self.delta_c(t)?.re)
    }

    /// Times inside the domain where `z(t)` degenerates.
    pub fn singular_times(&self) -> Vec<f64> {
        let (lo, hi) = self.domain;
        self.transform
            .singular_times()
            .into_iter()
            .filter(|&t| t >= lo && t <= hi)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::catalog::ClassId;

    fn r(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn cosh_detuning() {
        let m = ModelClass::base(ClassId::Double { twice_k: -2 }, r(3.0), r(1.0), r(-2.0), r(1.0)).unwrap();
        let f = field_configuration(&m, &Transform::Exp, (-3.0, 3.0)).unwrap();
        for t in [-2.0, 0.0, 1.3] {
            assert!((f.u(t).unwrap() - 3.0).abs() < 1e-14);
            assert!((f.delta_t(t).unwrap() - (-2.0 + 2.0 * f64::cosh(t))).abs() < 1e-12);
            assert!((f.delta(t).unwrap() - (f64::exp(t) - 2.0 * t - f64::exp(-t))).abs() < 1e-12);
        }
    }

    #[test]
    fn periodic_detuning() {
        let (u0, d1, d2) = (1.5, 1.0, 1.0);
        let i = Complex64::new(0.0, 1.0);
        let m = ModelClass::base(ClassId::Double { twice_k: -2 }, -i * u0, -i * d2 / 2.0, -i * d1, -i * d2 / 2.0).unwrap();
        let f = field_configuration(&m, &Transform::ExpI { t0: 0.0 }, (0.0, 12.0)).unwrap();
        for t in [0.0, 1.0, 4.0] {
            assert!((f.u(t).unwrap() - u0).abs() < 1e-14);
            assert!((f.delta_t(t).unwrap() - (d1 + d2 * t.cos())).abs() < 1e-12);
        }
    }

    #[test]
    fn complex_parameters_rejected() {
        let m = ModelClass::base(ClassId::Double { twice_k: -2 }, Complex64::new(1.0, 1.0), r(1.0), r(0.0), r(1.0)).unwrap();
        assert!(matches!(field_configuration(&m, &Transform::Exp, (-1.0, 1.0)), Err(Error::Realness(_))));
    }

    #[test]
    fn square_with_log_term_cannot_cross_zero() {
        let m = ModelClass::base(ClassId::Bi { twice_k: -1 }, r(1.0), r(1.0), r(0.5), r(1.0)).unwrap();
        assert!(matches!(field_configuration(&m, &Transform::Square, (-1.0, 1.0)), Err(Error::Domain(_))));
        let f = field_configuration(&m, &Transform::Square, (0.5, 2.0)).unwrap();
        let (t, h) = (1.1, 1e-5);
        let fd = (f.delta(t + h).unwrap() - f.delta(t - h).unwrap()) / (2.0 * h);
        assert!((fd - f.delta_t(t).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn custom_transform_quadrature() {
        let m = ModelClass::base(ClassId::Tri, r(1.0), r(0.3), r(-0.5), r(0.2)).unwrap();
        let tr = Transform::Custom {
            name: "sinh".into(),
            f: std::sync::Arc::new(|t: f64| Ok((r(t.sinh()), r(t.cosh()), r(t.sinh())))),
            reference: 0.0,
        };
        let f = field_configuration(&m, &tr, (-1.0, 1.0)).unwrap();
        let t: f64 = 0.8;
        let z = t.sinh();
        let exact = 0.3 * z - 0.25 * z * z + 0.2 * z * z * z / 3.0;
        assert!((f.delta(t).unwrap() - exact).abs() < 1e-10);
    }
}

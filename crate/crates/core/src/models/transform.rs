//! Reparameterizations `z(t)` of the basic models.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{lambert_w, LambertBranch};

/// Values of a transformation at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZJet {
    pub z: Complex64,
    pub dz: Complex64,
    pub d2z: Complex64,
    /// Logarithm of `z` continued along the real time axis.
    pub log_z: Complex64,
}

/// User-supplied transformation returning `(z, dz/dt, d²z/dt²)`.
pub type CustomFn = Arc<dyn Fn(f64) -> Result<(Complex64, Complex64, Complex64)> + Send + Sync>;

#[derive(Clone)]
pub enum Transform {
    /// `z = e^t`.
    Exp,
    /// `z = e^{i(t − t0)}`.
    ExpI { t0: f64 },
    /// `z = t²`, with `√z ≡ t`.
    Square,
    /// `z = t^{2/3}` for `t ≥ 0`.
    Power23,
    /// `z = Δ(t − t1)`.
    Affine { scale: f64, t1: f64 },
    /// `z = −z0 W(−e^{−t/z0}/z0)`.
    LambertBi { z0: f64 },
    /// `z = −z0 / W(−z0 e^{−t})`.
    LambertDouble { z0: f64 },
    Custom { name: String, f: CustomFn, reference: f64 },
}

impl fmt::Debug for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec())
    }
}

impl PartialEq for Transform {
    fn eq(&self, other: &Self) -> bool {
        self.spec() == other.spec()
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `x^m` for real `x` and real `m`; integer exponents stay real for negative `x`.
fn real_pow(x: f64, m: f64, log_x: Complex64) -> Result<Complex64> {
    if (m - m.round()).abs() < 1e-14 {
        let mi = m.round() as i32;
        if x == 0.0 && mi < 0 {
            return Err(Error::singular_z(real(0.0), format!("power {m} at the origin")));
        }
        return Ok(real(x.powi(mi)));
    }
    if x == 0.0 {
        return if m > 0.0 {
            Ok(real(0.0))
        } else {
            Err(Error::singular_z(real(0.0), format!("power {m} at the origin")))
        };
    }
    Ok((m * log_x).exp())
}

fn real_log(x: f64) -> Complex64 {
    if x < 0.0 {
        c((-x).ln(), PI)
    } else {
        real(x.ln())
    }
}

impl Transform {
    /// Canonical text form, also accepted by [`Transform::parse`].
    pub fn spec(&self) -> String {
        match self {
            Transform::Exp => "exp".into(),
            Transform::ExpI { t0 } => format!("exp_i:t0={t0}"),
            Transform::Square => "square".into(),
            Transform::Power23 => "power_2_3".into(),
            Transform::Affine { scale, t1 } => format!("affine:scale={scale},t1={t1}"),
            Transform::LambertBi { z0 } => format!("lambert_bi:z0={z0}"),
            Transform::LambertDouble { z0 } => format!("lambert_double:z0={z0}"),
            Transform::Custom { name, .. } => format!("custom:{name}"),
        }
    }

    /// Parses `exp`, `exp_i:t0=..`, `square`, `power_2_3`, `affine:scale=..,t1=..`,
    /// `lambert_bi:z0=..` or `lambert_double:z0=..`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut kv = std::collections::HashMap::new();
        for part in rest.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidInput(format!("transform argument '{part}' is not key=value")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("transform argument '{part}' is not a number")))?;
            kv.insert(k.trim().to_string(), v);
        }
        let get = |k: &str, default: Option<f64>| -> Result<f64> {
            kv.get(k)
                .copied()
                .or(default)
                .ok_or_else(|| Error::InvalidInput(format!("transform '{head}' needs '{k}'")))
        };
        let t = match head {
            "exp" => Transform::Exp,
            "exp_i" => Transform::ExpI { t0: get("t0", Some(0.0))? },
            "square" => Transform::Square,
            "power_2_3" => Transform::Power23,
            "affine" => Transform::Affine {
                scale: get("scale", Some(1.0))?,
                t1: get("t1", Some(0.0))?,
            },
            "lambert_bi" => Transform::LambertBi { z0: get("z0", None)? },
            "lambert_double" => Transform::LambertDouble { z0: get("z0", None)? },
            other => return Err(Error::InvalidInput(format!("unknown transform '{other}'"))),
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Transform::Affine { scale, .. } if scale == 0.0 || !scale.is_finite() => {
                Err(Error::InvalidInput("affine scale must be finite and nonzero".into()))
            }
            Transform::LambertBi { z0 } | Transform::LambertDouble { z0 } if z0 == 0.0 || !z0.is_finite() => {
                Err(Error::InvalidInput("Lambert transform needs finite nonzero z0".into()))
            }
            _ => Ok(()),
        }
    }

    /// Closed real-time domain on which the transformation is defined.
    pub fn domain(&self) -> (f64, f64) {
        match *self {
            Transform::Power23 => (0.0, f64::INFINITY),
            Transform::LambertBi { z0 } if z0 > 0.0 => (z0 * (1.0 - z0.ln()), f64::INFINITY),
            Transform::LambertDouble { z0 } if z0 > 0.0 => (1.0 + z0.ln(), f64::INFINITY),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// Natural gauge and anchoring time.
    pub fn reference_time(&self) -> f64 {
        match self {
            Transform::Exp | Transform::Square => 0.0,
            Transform::ExpI { t0 } => *t0,
            Transform::Power23 => 1.0,
            Transform::Affine { scale, t1 } => t1 + 1.0 / scale,
            Transform::LambertBi { .. } | Transform::LambertDouble { .. } => {
                let (lo, _) = self.domain();
                if lo.is_finite() {
                    lo + 1.0
                } else {
                    0.0
                }
            }
            Transform::Custom { reference, .. } => *reference,
        }
    }

    /// Times at which `z(t)` reaches the origin or the map degenerates.
    pub fn singular_times(&self) -> Vec<f64> {
        match *self {
            Transform::Square | Transform::Power23 => vec![0.0],
            Transform::Affine { t1, .. } => vec![t1],
            Transform::LambertBi { .. } | Transform::LambertDouble { .. } => {
                let (lo, _) = self.domain();
                if lo.is_finite() {
                    vec![lo]
                } else {
                    vec![]
                }
            }
            _ => vec![],
        }
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        let (lo, hi) = self.domain();
        if !t.is_finite() || t < lo || t > hi {
            return Err(Error::Domain(format!(
                "t = {t} lies outside the domain [{lo}, {hi}] of transform {}",
                self.spec()
            )));
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> Result<ZJet> {
        self.check_domain(t)?;
        Ok(match self {
            Transform::Exp => {
                let e = real(t.exp());
                ZJet { z: e, dz: e, d2z: e, log_z: real(t) }
            }
            Transform::ExpI { t0 } => {
                let th = t - t0;
                let z = Complex64::from_polar(1.0, th);
                ZJet { z, dz: c(0.0, 1.0) * z, d2z: -z, log_z: c(0.0, th) }
            }
            Transform::Square => {
                let log_z = 2.0 * real_log(t);
                ZJet { z: real(t * t), dz: real(2.0 * t), d2z: real(2.0), log_z }
            }
            Transform::Power23 => {
                let z = t.powf(2.0 / 3.0);
                let (dz, d2z) = if t == 0.0 {
                    (f64::INFINITY, f64::NEG_INFINITY)
                } else {
                    (2.0 / 3.0 * t.powf(-1.0 / 3.0), -2.0 / 9.0 * t.powf(-4.0 / 3.0))
                };
                ZJet { z: real(z), dz: real(dz), d2z: real(d2z), log_z: real(2.0 / 3.0 * t.ln()) }
            }
            Transform::Affine { scale, t1 } => {
                let z = scale * (t - t1);
                ZJet { z: real(z), dz: real(*scale), d2z: real(0.0), log_z: real_log(z) }
            }
            Transform::LambertBi { z0 } => {
                let z0 = *z0;
                let x = -(-t / z0).exp() / z0;
                let w = lambert_w(LambertBranch::Principal, x)?;
                let z = -z0 * w;
                let dz = w / (1.0 + w);
                let d2z = -w / (z0 * (1.0 + w).powi(3));
                ZJet { z: real(z), dz: real(dz), d2z: real(d2z), log_z: real_log(z) }
            }
            Transform::LambertDouble { z0 } => {
                let z0 = *z0;
                let x = -z0 * (-t).exp();
                let w = lambert_w(LambertBranch::Principal, x)?;
                if w == 0.0 {
                    return Err(Error::singular_t(t, "Lambert transform with W = 0"));
                }
                let z = -z0 / w;
                let dz = -z0 / (w * (1.0 + w));
                let d2z = -z0 * (1.0 + 2.0 * w) / (w * (1.0 + w).powi(3));
                ZJet { z: real(z), dz: real(dz), d2z: real(d2z), log_z: real_log(z) }
            }
            Transform::Custom { f, .. } => {
                let (z, dz, d2z) = f(t)?;
                ZJet { z, dz, d2z, log_z: z.ln() }
            }
        })
    }

    /// `z^p dz/dt` on the continuous branch of `z^p`.
    pub fn zpow_dz(&self, t: f64, p: f64) -> Result<Complex64> {
        self.check_domain(t)?;
        match self {
            Transform::Exp => Ok(real(((p + 1.0) * t).exp())),
            Transform::ExpI { t0 } => Ok(c(0.0, 1.0) * Complex64::from_polar(1.0, (p + 1.0) * (t - t0))),
            Transform::Square => Ok(2.0 * real_pow(t, 2.0 * p + 1.0, real_log(t))?),
            Transform::Power23 => Ok(2.0 / 3.0 * real_pow(t, (2.0 * p - 1.0) / 3.0, real_log(t))?),
            _ => {
                let j = self.eval(t)?;
                Ok(zpow(j.z, p, j.log_z)? * j.dz)
            }
        }
    }

    /// Time derivative of [`Transform::zpow_dz`].
    pub fn zpow_dz_dt(&self, t: f64, p: f64) -> Result<Complex64> {
        self.check_domain(t)?;
        match self {
            Transform::Exp => Ok((p + 1.0) * real(((p + 1.0) * t).exp())),
            Transform::ExpI { t0 } => Ok(-(p + 1.0) * Complex64::from_polar(1.0, (p + 1.0) * (t - t0))),
            Transform::Square => {
                let m = 2.0 * p + 1.0;
                if m == 0.0 {
                    Ok(real(0.0))
                } else {
                    Ok(2.0 * m * real_pow(t, m - 1.0, real_log(t))?)
                }
            }
            Transform::Power23 => {
                let m = (2.0 * p - 1.0) / 3.0;
                if m == 0.0 {
                    Ok(real(0.0))
                } else {
                    Ok(2.0 / 3.0 * m * real_pow(t, m - 1.0, real_log(t))?)
                }
            }
            _ => {
                let j = self.eval(t)?;
                let zp = zpow(j.z, p, j.log_z)?;
                let dterm = if p == 0.0 { real(0.0) } else { p * zpow(j.z, p - 1.0, j.log_z)? * j.dz * j.dz };
                Ok(dterm + zp * j.d2z)
            }
        }
    }

    /// Antiderivative `∫ z^p dz` evaluated at `z(t)`: `z^{p+1}/(p+1)`, or `log z` for `p = −1`.
    pub fn zpow_antiderivative(&self, t: f64, p: f64) -> Result<Complex64> {
        let j = self.eval(t)?;
        if (p + 1.0).abs() < 1e-14 {
            if j.z.norm() == 0.0 {
                return Err(Error::singular_t(t, "logarithm of z = 0"));
            }
            Ok(j.log_z)
        } else {
            Ok(zpow(j.z, p + 1.0, j.log_z)? / (p + 1.0))
        }
    }

    pub fn is_custom(&self) -> bool {
        matches!(self, Transform::Custom { .. })
    }
}

/// `z^p` using `log_z` for non-integer `p`.
pub fn zpow(z: Complex64, p: f64, log_z: Complex64) -> Result<Complex64> {
    if (p - p.round()).abs() < 1e-14 {
        let pi = p.round() as i32;
        if z.norm() == 0.0 && pi < 0 {
            return Err(Error::singular_z(z, format!("power {p}")));
        }
        return Ok(z.powi(pi));
    }
    if z.norm() == 0.0 {
        return if p > 0.0 {
            Ok(real(0.0))
        } else {
            Err(Error::singular_z(z, format!("power {p}")))
        };
    }
    Ok((p * log_z).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambert_round_trips() {
        let tr = Transform::LambertBi { z0: -1.0 };
        for t in [-6.0, -1.0, 0.0, 2.5, 6.0] {
            let j = tr.eval(t).unwrap();
            // z = W(e^t) for z0 = -1.
            assert!((j.z.re * j.z.re.exp() - f64::exp(t)).abs() <= 1e-12 * f64::exp(t).max(1.0));
        }
        let tr = Transform::LambertDouble { z0: 0.75 };
        let (lo, _) = tr.domain();
        assert!(tr.eval(lo - 0.1).is_err());
        let j = tr.eval(lo + 0.5).unwrap();
        let w = -0.75 / j.z.re;
        let x = -0.75 * (-(lo + 0.5)).exp();
        assert!((w * w.exp() - x).abs() <= 1e-12);
    }

    #[test]
    fn derivatives_match_differences() {
        let transforms = [
            Transform::Exp,
            Transform::ExpI { t0: 0.3 },
            Transform::Square,
            Transform::Power23,
            Transform::Affine { scale: 2.0, t1: -0.5 },
            Transform::LambertBi { z0: -1.3 },
            Transform::LambertBi { z0: 0.6 },
            Transform::LambertDouble { z0: -0.8 },
            Transform::LambertDouble { z0: 0.9 },
        ];
        for tr in transforms {
            let t = tr.reference_time() + 0.37;
            let h = 1e-5;
            for p in [-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0] {
                let fd = (tr.zpow_dz(t + h, p).unwrap() - tr.zpow_dz(t - h, p).unwrap()) / (2.0 * h);
                let an = tr.zpow_dz_dt(t, p).unwrap();
                assert!((fd - an).norm() <= 1e-6 * an.norm().max(1.0), "{tr:?} p={p}");
                let fd = (tr.zpow_antiderivative(t + h, p).unwrap() - tr.zpow_antiderivative(t - h, p).unwrap()) / (2.0 * h);
                let an = tr.zpow_dz(t, p).unwrap();
                assert!((fd - an).norm() <= 1e-6 * an.norm().max(1.0), "{tr:?} p={p}");
            }
        }
    }

    #[test]
    fn square_root_branch_is_t() {
        let tr = Transform::Square;
        for t in [-2.0, -0.3, 0.4] {
            let j = tr.eval(t).unwrap();
            let s = zpow(j.z, 0.5, j.log_z).unwrap();
            assert!((s - real(t)).norm() < 1e-15);
            assert!((tr.zpow_dz(t, -0.5).unwrap() - real(2.0)).norm() < 1e-15);
        }
        assert_eq!(tr.zpow_dz(0.0, -0.5).unwrap(), real(2.0));
    }

    #[test]
    fn parse_round_trip() {
        for s in ["exp", "exp_i:t0=0.5", "square", "power_2_3", "affine:scale=2,t1=1", "lambert_bi:z0=-1", "lambert_double:z0=0.5"] {
            let t = Transform::parse(s).unwrap();
            assert_eq!(Transform::parse(&t.spec()).unwrap(), t);
        }
        assert!(Transform::parse("cubic").is_err());
        assert!(Transform::parse("lambert_bi").is_err());
        assert!(Transform::parse("affine:scale=0").is_err());
    }
}

//! Field configurations of the published figures.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::models::{ClassId, ModelClass, Transform};

#[derive(Debug, Clone)]
pub struct PresetCurve {
    pub label: String,
    pub model: ModelClass,
    pub transform: Transform,
    pub t_range: (f64, f64),
}

#[derive(Debug, Clone)]
pub struct FigurePreset {
    pub id: &'static str,
    pub title: &'static str,
    pub curves: Vec<PresetCurve>,
}

pub const PRESET_IDS: [&str; 8] = ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8"];

fn r(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

const I: Complex64 = Complex64::new(0.0, 1.0);

fn curve(label: String, model: ModelClass, transform: Transform, t_range: (f64, f64)) -> PresetCurve {
    PresetCurve { label, model, transform, t_range }
}

pub fn preset(id: &str) -> Result<FigurePreset> {
    let double_k1 = ClassId::Double { twice_k: -2 };
    let p = match id {
        "fig1" => FigurePreset {
            id: "fig1",
            title: "double k=-1, z = e^t, U0 = 3, delta2 = delta0 = 1",
            curves: [-1.0, -2.0, -3.0]
                .iter()
                .map(|&d1| -> Result<PresetCurve> {
                    let m = ModelClass::base(double_k1, r(3.0), r(1.0), r(d1), r(1.0))?;
                    Ok(curve(format!("delta1={d1}"), m, Transform::Exp, (-3.0, 3.0)))
                })
                .collect::<Result<_>>()?,
        },
        "fig2" => FigurePreset {
            id: "fig2",
            title: "double k=-1, z = e^t, U0 = 3, delta2 = -delta0 = -1",
            curves: [5.0, 0.0, -5.0]
                .iter()
                .map(|&d1| -> Result<PresetCurve> {
                    let m = ModelClass::base(double_k1, r(3.0), r(1.0), r(d1), r(-1.0))?;
                    Ok(curve(format!("delta1={d1}"), m, Transform::Exp, (-3.0, 3.0)))
                })
                .collect::<Result<_>>()?,
        },
        "fig3" => FigurePreset {
            id: "fig3",
            title: "double k=-1, z = e^{i(t-t0)}, U0 = 1.5, t0 = 0, Delta2 = 1",
            curves: [0.0, 1.0, 2.0]
                .iter()
                .map(|&dd1| -> Result<PresetCurve> {
                    let (u0, dd2) = (1.5, 1.0);
                    let m = ModelClass::base(double_k1, -I * u0, -I * dd2 / 2.0, -I * dd1, -I * dd2 / 2.0)?;
                    Ok(curve(
                        format!("Delta1={dd1}"),
                        m,
                        Transform::ExpI { t0: 0.0 },
                        (0.0, 4.0 * std::f64::consts::PI),
                    ))
                })
                .collect::<Result<_>>()?,
        },
        "fig4" => FigurePreset {
            id: "fig4",
            title: "bi k=-1/2, z = t^2, U0 = 2",
            curves: [(-2.0, 5.0), (0.0, 10.0), (5.0, 20.0)]
                .iter()
                .map(|&(dd1, dd2)| -> Result<PresetCurve> {
                    let u0 = 2.0;
                    let m = ModelClass::base(ClassId::Bi { twice_k: -1 }, r(u0 / 2.0), r(dd1 / 2.0), r(0.0), r(dd2 / 2.0))?;
                    Ok(curve(format!("Delta1={dd1},Delta2={dd2}"), m, Transform::Square, (-3.0, 3.0)))
                })
                .collect::<Result<_>>()?,
        },
        "fig5" => FigurePreset {
            id: "fig5",
            title: "bi k=1/2, z = t^(2/3), U0 = 1.5",
            curves: [1.0, 2.0, 3.0]
                .iter()
                .map(|&dd2| -> Result<PresetCurve> {
                    let u0 = 1.5;
                    let m = ModelClass::base(ClassId::Bi { twice_k: 1 }, r(1.5 * u0), r(0.0), r(0.0), r(1.5 * dd2))?;
                    Ok(curve(format!("Delta2={dd2}"), m, Transform::Power23, (0.0, 5.0)))
                })
                .collect::<Result<_>>()?,
        },
        "fig6" => FigurePreset {
            id: "fig6",
            title: "tri, z = Delta(t - t1), U0 = 1.5, t1 = 1, t2 = 2",
            curves: [1.0, 2.0, 4.0]
                .iter()
                .map(|&dd| -> Result<PresetCurve> {
                    let (u0, t1, t2) = (1.5, 1.0, 2.0);
                    let m = ModelClass::base(ClassId::Tri, r(u0 / dd), r(0.0), r((t1 - t2) / dd), r(1.0 / (dd * dd)))?;
                    Ok(curve(format!("Delta={dd}"), m, Transform::Affine { scale: dd, t1 }, (-1.0, 4.0)))
                })
                .collect::<Result<_>>()?,
        },
        "fig7" => FigurePreset {
            id: "fig7",
            title: "bi-derivative, z = W(e^t), z0 = -1, delta1 = 0, delta2 = -delta0",
            curves: [1.0, 2.0, 3.0]
                .iter()
                .map(|&d0| -> Result<PresetCurve> {
                    let m = ModelClass::bi_derivative(r(d0), r(0.0), r(-d0), r(-1.0))?;
                    Ok(curve(format!("delta0={d0}"), real_amplitude(m), Transform::LambertBi { z0: -1.0 }, (-6.0, 6.0)))
                })
                .collect::<Result<_>>()?,
        },
        "fig8" => FigurePreset {
            id: "fig8",
            title: "double-derivative, z = -z0/W(-z0 e^-t), delta1 = -2 sqrt(25 - delta0^2), delta2 = -delta0",
            curves: [2.0, 3.0, 4.0]
                .iter()
                .map(|&d0: &f64| -> Result<PresetCurve> {
                    let d1 = -2.0 * (25.0 - d0 * d0).sqrt();
                    let m = ModelClass::double_derivative(r(d0), r(d1), r(-d0))?;
                    let z0 = m.z0.expect("derivative class").re;
                    let tr = Transform::LambertDouble { z0 };
                    let start = tr.domain().0 + 0.05;
                    Ok(curve(format!("delta0={d0}"), real_amplitude(m), tr, (start, 6.0)))
                })
                .collect::<Result<_>>()?,
        },
        other => {
            return Err(Error::InvalidInput(format!(
                "unknown preset '{other}' (expected one of {})",
                PRESET_IDS.join(", ")
            )))
        }
    };
    Ok(p)
}

/// Drops round-off imaginary parts from a positive `U0*²`.
fn real_amplitude(m: ModelClass) -> ModelClass {
    match m.required_u0star_sq() {
        Some(u2) if u2.re > 0.0 && u2.im.abs() <= 1e-12 * u2.re => ModelClass { u0star: r(u2.re.sqrt()), ..m },
        _ => m,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_presets_build() {
        for id in PRESET_IDS {
            let p = preset(id).unwrap();
            assert_eq!(p.curves.len(), 3);
        }
        assert!(preset("fig9").is_err());
    }

    #[test]
    fn derivative_amplitudes() {
        let p = preset("fig7").unwrap();
        for (c, d0) in p.curves.iter().zip([1.0, 2.0, 3.0]) {
            assert!((c.model.u0star - r(2.0 * d0)).norm() < 1e-12);
        }
        let p = preset("fig8").unwrap();
        for c in &p.curves {
            assert!((c.model.u0star - r(5.0)).norm() < 1e-12);
        }
    }
}

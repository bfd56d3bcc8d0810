//! Resonance crossings: real zeros of `δ_t(t)`.

use serde::Serialize;

use super::field::FieldConfiguration;

const GRID: usize = 2000;
const ROOT_TOL: f64 = 1e-10;
const GLANCING_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossingReport {
    pub count: usize,
    pub roots: Vec<f64>,
    pub glancing: Vec<bool>,
}

fn bisect(f: &dyn Fn(f64) -> Option<f64>, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    while b - a > ROOT_TOL {
        let m = 0.5 * (a + b);
        let fm = match f(m) {
            Some(v) => v,
            None => break,
        };
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

fn golden_min(f: &dyn Fn(f64) -> Option<f64>, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let val = |x: f64| f(x).map_or(f64::INFINITY, f64::abs);
    let (mut fc, mut fd) = (val(c), val(d));
    while b - a > ROOT_TOL {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = val(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = val(d);
        }
    }
    0.5 * (a + b)
}

/// Roots of `δ_t` on `[lo, hi]`: sign changes refined by bisection, plus
/// touching zeros found as local minima of `|δ_t|`.
pub fn crossing_analysis(config: &FieldConfiguration, interval: (f64, f64)) -> CrossingReport {
    let (lo, hi) = interval;
    let f = |t: f64| config.delta_t(t).ok().filter(|v| v.is_finite());
    let ts: Vec<f64> = (0..=GRID).map(|j| lo + (hi - lo) * j as f64 / GRID as f64).collect();
    let vs: Vec<Option<f64>> = ts.iter().map(|&t| f(t)).collect();
    let scale = vs.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let mut roots: Vec<f64> = Vec::new();
    for j in 0..=GRID {
        let Some(v) = vs[j] else { continue };
        if v == 0.0 {
            roots.push(ts[j]);
            continue;
        }
        if j < GRID {
            if let Some(w) = vs[j + 1] {
                if w != 0.0 && (v < 0.0) != (w < 0.0) {
                    roots.push(bisect(&f, ts[j], ts[j + 1], v));
                    continue;
                }
            }
        }
        if j > 0 && j < GRID {
            if let (Some(a), Some(b)) = (vs[j - 1], vs[j + 1]) {
                let same_sign = (a < 0.0) == (v < 0.0) && (b < 0.0) == (v < 0.0);
                if same_sign && v.abs() < a.abs() && v.abs() <= b.abs() {
                    let t = golden_min(&f, ts[j - 1], ts[j + 1]);
                    if f(t).is_some_and(|x| x.abs() <= 1e-8 * scale) {
                        roots.push(t);
                    }
                }
            }
        }
    }
    roots.sort_by(f64::total_cmp);
    let mut unique: Vec<f64> = Vec::with_capacity(roots.len());
    for t in roots {
        if unique.last().is_none_or(|&u| t - u > 1e3 * ROOT_TOL) {
            unique.push(t);
        }
    }
    let glancing = unique
        .iter()
        .map(|&t| match config.ddelta_t(t) {
            Ok(d) if d.is_finite() => d.abs() < GLANCING_TOL * scale,
            _ => false,
        })
        .collect();
    CrossingReport { count: unique.len(), roots: unique, glancing }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::catalog::{ClassId, ModelClass};
    use crate::models::field::field_configuration;
    use crate::models::transform::Transform;
    use num_complex::Complex64;

    fn r(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn cosh_family_counts() {
        for (d1, count, glance) in [(-1.0, 0, false), (-2.0, 1, true), (-3.0, 2, false)] {
            let m = ModelClass::base(ClassId::Double { twice_k: -2 }, r(3.0), r(1.0), r(d1), r(1.0)).unwrap();
            let f = field_configuration(&m, &Transform::Exp, (-3.0, 3.0)).unwrap();
            let rep = crossing_analysis(&f, (-3.0, 3.0));
            assert_eq!(rep.count, count, "d1={d1}");
            if count == 1 {
                assert!(rep.roots[0].abs() < 1e-6);
                assert_eq!(rep.glancing, vec![glance]);
            }
        }
    }

    #[test]
    fn cubic_three_roots() {
        let m = ModelClass::base(ClassId::Bi { twice_k: -1 }, r(1.0), r(-1.0), r(0.0), r(2.5)).unwrap();
        let f = field_configuration(&m, &Transform::Square, (-3.0, 3.0)).unwrap();
        let rep = crossing_analysis(&f, (-3.0, 3.0));
        assert_eq!(rep.count, 3);
        let s = 0.4f64.sqrt();
        for (a, b) in rep.roots.iter().zip([-s, 0.0, s]) {
            assert!((a - b).abs() < 1e-9);
        }
        assert_eq!(rep.glancing, vec![false; 3]);
    }
}

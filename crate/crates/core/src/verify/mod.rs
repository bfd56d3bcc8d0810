//! Numerical checks of analytic two-state solutions against the amplitude
//! equation and a direct integration of the first-order system.

mod sweep;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::{analytic_amplitudes_grid, A2Jet, FieldConfiguration, TwoStateSolution};
use crate::numerics::{integrate_ode, OdeOptions, OdeTrajectory};

pub use sweep::{
    instance_for, run_instance, verify_scope, GridMeta, Instance, ParamRecord, Thresholds, VerificationReport,
    DEFAULT_SEED, DRAWS,
};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Half-width of the neighborhoods removed around singular times.
pub const EXCLUSION_RADIUS: f64 = 0.05;

/// Source of `[a₂, da₂/dt, d²a₂/dt²]` on a set of times.
pub trait A2Source {
    fn jets(&self, times: &[f64]) -> Result<Vec<A2Jet>>;
}

impl A2Source for TwoStateSolution {
    fn jets(&self, times: &[f64]) -> Result<Vec<A2Jet>> {
        self.a2_jets(times)
    }
}

/// A closed-form `a₂` supplying its own derivatives.
pub struct ClosedForm<F>(pub F);

impl<F: Fn(f64) -> Result<A2Jet>> A2Source for ClosedForm<F> {
    fn jets(&self, times: &[f64]) -> Result<Vec<A2Jet>> {
        times.iter().map(|&t| (self.0)(t)).collect()
    }
}

/// A black-box `a₂`, differentiated by five-point central differences.
pub struct FiniteDifference<F>(pub F);

impl<F: Fn(f64) -> Result<Complex64>> A2Source for FiniteDifference<F> {
    fn jets(&self, times: &[f64]) -> Result<Vec<A2Jet>> {
        times
            .iter()
            .map(|&t| {
                let h = 2e-3 * t.abs().max(1.0);
                let f = &self.0;
                let (m2, m1, c, p1, p2) = (f(t - 2.0 * h)?, f(t - h)?, f(t)?, f(t + h)?, f(t + 2.0 * h)?);
                let d1 = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
                let d2 = (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * h * h);
                Ok([c, d1, d2])
            })
            .collect()
    }
}

/// Uniform time grid with neighborhoods of singular times removed, stored as
/// contiguous pieces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeGrid {
    pub start: f64,
    pub end: f64,
    pub pieces: Vec<Vec<f64>>,
    pub excluded: Vec<(f64, f64)>,
}

impl TimeGrid {
    pub fn uniform(start: f64, end: f64, n: usize) -> Result<Self> {
        Self::excluding(start, end, n, &[])
    }

    /// `n` uniform points on `[start, end]` minus `EXCLUSION_RADIUS` around each of `singular`.
    pub fn excluding(start: f64, end: f64, n: usize, singular: &[f64]) -> Result<Self> {
        if !(start.is_finite() && end.is_finite() && start < end) || n < 2 {
            return Err(Error::InvalidInput(format!("invalid grid {start}:{end}:{n}")));
        }
        let mut excluded: Vec<(f64, f64)> = singular
            .iter()
            .filter(|&&s| s >= start - EXCLUSION_RADIUS && s <= end + EXCLUSION_RADIUS)
            .map(|&s| (s - EXCLUSION_RADIUS, s + EXCLUSION_RADIUS))
            .collect();
        excluded.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut pieces: Vec<Vec<f64>> = Vec::new();
        let mut current: Vec<f64> = Vec::new();
        for j in 0..n {
            let t = start + (end - start) * j as f64 / (n - 1) as f64;
            if excluded.iter().any(|&(a, b)| t >= a && t <= b) {
                if !current.is_empty() {
                    pieces.push(std::mem::take(&mut current));
                }
            } else {
                current.push(t);
            }
        }
        if !current.is_empty() {
            pieces.push(current);
        }
        if pieces.is_empty() {
            return Err(Error::Domain(format!("grid {start}:{end} lies entirely inside excluded neighborhoods")));
        }
        Ok(TimeGrid { start, end, pieces, excluded })
    }

    /// Grid on `[start, end]` avoiding the transform's singular times and
    /// the zeros and singularities of `U`.
    pub fn for_config(config: &FieldConfiguration, start: f64, end: f64, n: usize) -> Result<Self> {
        let mut singular = config.singular_times();
        let m = 4000;
        let ts: Vec<f64> = (0..=m).map(|j| start + (end - start) * j as f64 / m as f64).collect();
        let us: Vec<Option<f64>> = ts.iter().map(|&t| config.u(t).ok().filter(|u| u.is_finite())).collect();
        for j in 0..=m {
            match us[j] {
                None => singular.push(ts[j]),
                Some(0.0) => singular.push(ts[j]),
                Some(u) => {
                    if let Some(Some(v)) = us.get(j + 1) {
                        if *v != 0.0 && (u < 0.0) != (*v < 0.0) {
                            singular.push(0.5 * (ts[j] + ts[j + 1]));
                        }
                    }
                }
            }
        }
        singular.sort_by(f64::total_cmp);
        singular.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        Self::excluding(start, end, n, &singular)
    }

    pub fn points(&self) -> usize {
        self.pieces.iter().map(Vec::len).sum()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.pieces.iter().flatten().copied()
    }
}

/// Largest normalized residual of the second-order amplitude equation
/// `a₂'' + (−iδ_t − U_t/U) a₂' + U² a₂ = 0` on `grid`.
pub fn residual_eq4(config: &FieldConfiguration, a2: &dyn A2Source, grid: &TimeGrid) -> Result<f64> {
    let mut worst = 0.0f64;
    for piece in &grid.pieces {
        let jets = a2.jets(piece)?;
        for (&t, j) in piece.iter().zip(&jets) {
            let u = config.u(t)?;
            if u == 0.0 {
                return Err(Error::singular_t(t, "U vanishes on the verification grid"));
            }
            let ut = config.u_t(t)?;
            let dt = config.delta_t(t)?;
            let res = j[2] + (-I * dt - ut / u) * j[1] + u * u * j[0];
            let norm = (u * u * j[0]).norm().max(1.0);
            let r = res.norm() / norm;
            if !r.is_finite() {
                return Err(Error::NotConverged(format!("non-finite residual at t = {t}")));
            }
            worst = worst.max(r);
        }
    }
    Ok(worst)
}

/// Outcome of one direct integration of the first-order system.
#[derive(Debug, Clone)]
pub struct OracleRun {
    /// Largest distance between numeric and analytic `(a₁, a₂)`, relative to the initial norm.
    pub deviation: f64,
    pub unitarity_drift: f64,
    pub trajectory: OdeTrajectory,
}

/// Integrates `i a₁' = U e^{−iδ} a₂`, `i a₂' = U e^{iδ} a₁` from normalized initial data.
pub fn integrate_two_state(
    config: &FieldConfiguration,
    t_start: f64,
    t_end: f64,
    y0: [Complex64; 2],
    output: &[f64],
    rtol: f64,
) -> Result<OdeTrajectory> {
    let opts = OdeOptions::new(rtol, rtol * 1e-2);
    integrate_ode(
        |t, y, dy| {
            let u = config.u(t)?;
            let phase = Complex64::from_polar(1.0, config.delta(t)?);
            dy[0] = -I * u * phase.conj() * y[1];
            dy[1] = -I * u * phase * y[0];
            Ok(())
        },
        t_start,
        t_end,
        &y0,
        output,
        &opts,
    )
}

/// Starts from the analytic `(a₁, a₂)` at `times[0]`, integrates the
/// first-order system at `rtol/10` and compares at every time.
pub fn oracle_run(config: &FieldConfiguration, sol: &TwoStateSolution, times: &[f64], rtol: f64) -> Result<OracleRun> {
    if times.len() < 2 || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("oracle grid must be strictly ascending with two or more points".into()));
    }
    let analytic = analytic_amplitudes_grid(sol, times)?;
    let (a1, a2) = analytic[0];
    let norm0 = (a1.norm_sqr() + a2.norm_sqr()).sqrt();
    if !(norm0 > 0.0) || !norm0.is_finite() {
        return Err(Error::Division(format!("analytic state at t = {} has norm {norm0}", times[0])));
    }
    let y0 = [a1 / norm0, a2 / norm0];
    let traj = integrate_two_state(config, times[0], times[times.len() - 1], y0, times, rtol / 10.0)?;
    let mut deviation = 0.0f64;
    for (s, &(b1, b2)) in traj.states.iter().zip(&analytic) {
        let d = ((s[0] - b1 / norm0).norm_sqr() + (s[1] - b2 / norm0).norm_sqr()).sqrt();
        deviation = deviation.max(d);
    }
    let drift = unitarity_drift(&traj);
    Ok(OracleRun { deviation, unitarity_drift: drift, trajectory: traj })
}

/// [`oracle_run`] on a 200-point uniform grid over `[t_start, t_end]`.
pub fn oracle_compare(
    config: &FieldConfiguration,
    sol: &TwoStateSolution,
    t_start: f64,
    t_end: f64,
    rtol: f64,
) -> Result<f64> {
    let grid = TimeGrid::uniform(t_start, t_end, 200)?;
    Ok(oracle_run(config, sol, &grid.pieces[0], rtol)?.deviation)
}

/// Largest departure of `|a₁|² + |a₂|²` from its initial value.
pub fn unitarity_drift(traj: &OdeTrajectory) -> f64 {
    let norm = |s: &Vec<Complex64>| s.iter().map(|c| c.norm_sqr()).sum::<f64>();
    let Some(first) = traj.states.first() else { return 0.0 };
    let n0 = norm(first);
    traj.states.iter().map(|s| (norm(s) - n0).abs()).fold(0.0, f64::max)
}

/// Largest relative change of `W/(U e^{iδ})`, with `W = a b' − a' b`, from its
/// value at the first grid point.
pub fn wronskian_drift(
    config: &FieldConfiguration,
    sol_a: &dyn A2Source,
    sol_b: &dyn A2Source,
    grid: &TimeGrid,
) -> Result<f64> {
    let mut ratios = Vec::with_capacity(grid.points());
    let mut w_max = 0.0f64;
    let mut cross_max = 0.0f64;
    for piece in &grid.pieces {
        let ja = sol_a.jets(piece)?;
        let jb = sol_b.jets(piece)?;
        for ((&t, a), b) in piece.iter().zip(&ja).zip(&jb) {
            let w = a[0] * b[1] - a[1] * b[0];
            w_max = w_max.max(w.norm());
            cross_max = cross_max.max((a[0] * b[1]).norm()).max((a[1] * b[0]).norm());
            let u = config.u(t)?;
            if u == 0.0 {
                return Err(Error::singular_t(t, "U vanishes on the verification grid"));
            }
            ratios.push(w / (u * Complex64::from_polar(1.0, config.delta(t)?)));
        }
    }
    if w_max <= 1e-12 * cross_max || w_max == 0.0 {
        return Err(Error::Dependent(format!(
            "Wronskian vanishes on the grid (max |W| = {w_max:e}); the two solutions are proportional"
        )));
    }
    let r0 = ratios[0];
    if r0.norm() == 0.0 {
        return Err(Error::Dependent("Wronskian vanishes at the first grid point".into()));
    }
    Ok(ratios.iter().map(|r| (r - r0).norm() / r0.norm()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{field_configuration, ClassId, ModelClass, Transform};

    fn r(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn rabi_config(u0: f64, delta: f64) -> FieldConfiguration {
        // Tri class with z = t gives U = U0*, δ_t = δ0.
        let m = ModelClass::base(ClassId::Tri, r(u0), r(delta), r(0.0), r(0.0)).unwrap();
        field_configuration(&m, &Transform::Affine { scale: 1.0, t1: 0.0 }, (-3.0, 3.0)).unwrap()
    }

    fn rabi_exponents(u0: f64, delta: f64) -> [Complex64; 2] {
        // λ² − iΔλ + U0² = 0
        let disc = -(delta * delta) - 4.0 * u0 * u0;
        let s = Complex64::new(disc, 0.0).sqrt();
        [(I * delta + s) / 2.0, (I * delta - s) / 2.0]
    }

    #[test]
    fn rabi_residual_and_wronskian() {
        let (u0, d) = (1.3, 0.7);
        let cfg = rabi_config(u0, d);
        let [l1, l2] = rabi_exponents(u0, d);
        let a = ClosedForm(move |t: f64| {
            let e = (l1 * t).exp();
            Ok([e, l1 * e, l1 * l1 * e])
        });
        let b = ClosedForm(move |t: f64| {
            let e = (l2 * t).exp();
            Ok([e, l2 * e, l2 * l2 * e])
        });
        let grid = TimeGrid::uniform(-2.0, 2.0, 200).unwrap();
        assert!(residual_eq4(&cfg, &a, &grid).unwrap() <= 1e-12);
        assert!(wronskian_drift(&cfg, &a, &b, &grid).unwrap() <= 1e-12);
        let one = ClosedForm(|_t: f64| Ok([r(1.0), r(0.0), r(0.0)]));
        let res = residual_eq4(&cfg, &one, &grid).unwrap();
        assert!((res - 1.0).abs() < 1e-12);
    }

    #[test]
    fn proportional_solutions_are_dependent() {
        let (u0, d) = (1.0, 0.2);
        let cfg = rabi_config(u0, d);
        let [l1, _] = rabi_exponents(u0, d);
        let a = ClosedForm(move |t: f64| {
            let e = (l1 * t).exp();
            Ok([e, l1 * e, l1 * l1 * e])
        });
        let b = ClosedForm(move |t: f64| {
            let e = 2.0 * (l1 * t).exp();
            Ok([e, l1 * e, l1 * l1 * e])
        });
        let grid = TimeGrid::uniform(-1.0, 1.0, 50).unwrap();
        assert!(matches!(wronskian_drift(&cfg, &a, &b, &grid), Err(Error::Dependent(_))));
    }

    #[test]
    fn finite_differences_match_closed_form() {
        let (u0, d) = (1.3, 0.7);
        let cfg = rabi_config(u0, d);
        let [l1, _] = rabi_exponents(u0, d);
        let fd = FiniteDifference(move |t: f64| Ok((l1 * t).exp()));
        let grid = TimeGrid::uniform(-2.0, 2.0, 100).unwrap();
        assert!(residual_eq4(&cfg, &fd, &grid).unwrap() <= 1e-8);
    }

    #[test]
    fn rabi_unitarity() {
        let cfg = rabi_config(2.0, 1.0);
        let times: Vec<f64> = (0..100).map(|j| -3.0 + 6.0 * j as f64 / 99.0).collect();
        let traj = integrate_two_state(&cfg, -3.0, 3.0, [r(1.0), r(0.0)], &times, 1e-10).unwrap();
        assert!(unitarity_drift(&traj) <= 1e-9);
    }

    #[test]
    fn grid_exclusion() {
        let g = TimeGrid::excluding(-1.0, 1.0, 201, &[0.0]).unwrap();
        assert_eq!(g.pieces.len(), 2);
        assert!(g.times().all(|t| t.abs() > EXCLUSION_RADIUS));
        assert_eq!(g.excluded, vec![(-0.05, 0.05)]);
    }
}

use heun_twostate::cli;
use heun_twostate::models::{field_configuration, ClassId, ModelClass, Transform, TwoStateSolution};
use heun_twostate::verify::{oracle_run, residual_eq4, TimeGrid};
use num_complex::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn r(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[test]
fn hyperbolic_double_residual() {
    let m = ModelClass::base(ClassId::Double { twice_k: -2 }, r(3.0), r(1.0), r(-2.0), r(1.0)).unwrap();
    let sol = TwoStateSolution::new(&m, 0, &Transform::Exp, (-2.0, 2.0)).unwrap();
    let grid = TimeGrid::uniform(-2.0, 2.0, 200).unwrap();
    assert!(residual_eq4(&sol.field, &sol, &grid).unwrap() <= 1e-8);
    assert!(oracle_run(&sol.field, &sol, &grid.pieces[0], 1e-10).unwrap().deviation <= 1e-6);
}

#[test]
fn periodic_double_five_periods() {
    let (u0, dd1, dd2) = (1.5, 1.0, 1.0);
    let m = ModelClass::base(ClassId::Double { twice_k: -2 }, -I * u0, -I * dd2 / 2.0, -I * dd1, -I * dd2 / 2.0).unwrap();
    let end = 10.0 * std::f64::consts::PI;
    let sol = TwoStateSolution::new(&m, 0, &Transform::ExpI { t0: 0.0 }, (0.0, end)).unwrap();
    let grid = TimeGrid::uniform(0.0, end, 400).unwrap();
    let run = oracle_run(&sol.field, &sol, &grid.pieces[0], 1e-10).unwrap();
    assert!(run.deviation <= 1e-6, "deviation {}", run.deviation);
    assert!(run.unitarity_drift <= 1e-8, "drift {}", run.unitarity_drift);
}

#[test]
fn parabolic_tri_oracle() {
    let (u0, dd, t1, t2) = (1.5, 2.0, 1.0, 2.0);
    let m = ModelClass::base(ClassId::Tri, r(u0 / dd), r(0.0), r((t1 - t2) / dd), r(1.0 / (dd * dd))).unwrap();
    let sol = TwoStateSolution::new(&m, 0, &Transform::Affine { scale: dd, t1 }, (-1.0, 4.0)).unwrap();
    let grid = TimeGrid::uniform(-1.0, 4.0, 200).unwrap();
    assert!(oracle_run(&sol.field, &sol, &grid.pieces[0], 1e-10).unwrap().deviation <= 1e-6);
}

#[test]
#[ignore = "the bi-derivative detuning with delta2 = -delta0 turns over at W = sqrt(2) - 1"]
fn lambert_bi_chirp_is_monotone() {
    for cv in cli::preset("fig7").unwrap().curves {
        let cfg = field_configuration(&cv.model, &cv.transform, cv.t_range).unwrap();
        let d: Vec<f64> = cli::linspace(cv.t_range.0, cv.t_range.1, 601).iter().map(|&t| cfg.delta_t(t).unwrap()).collect();
        let inc = d.windows(2).all(|w| w[1] >= w[0]);
        let dec = d.windows(2).all(|w| w[1] <= w[0]);
        assert!(inc || dec, "{} is not monotone", cv.label);
    }
}

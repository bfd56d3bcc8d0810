//! Command-line front end.

mod params;
mod presets;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::heun::{series_coeffs, termination_conditions, HeunFamily, HeunParams};
use crate::models::{
    analytic_amplitudes_grid, enumerate_classes, field_configuration, ClassId, ClassKind, FieldConfiguration,
    ModelClass, Transform, TwoStateSolution,
};
use crate::verify::{integrate_two_state, verify_scope, Thresholds, DEFAULT_SEED};

pub use params::{linspace, parse_complex, parse_grid, parse_params};
pub use presets::{preset, FigurePreset, PresetCurve, PRESET_IDS};

const DEFAULT_POINTS: usize = 601;

#[derive(Debug, Parser)]
#[command(name = "heun-twostate", version, about = "Two-state models solvable in confluent Heun functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the catalog of solvable classes.
    Classes {
        #[arg(long)]
        json: bool,
    },
    /// Emit U(t), delta_t(t) and delta(t) as CSV.
    Field(ModelArgs),
    /// Emit analytic amplitudes a1(t), a2(t) as CSV.
    Solve {
        #[command(flatten)]
        model: ModelArgs,
        /// Index of the prefactor exponent set.
        #[arg(long, default_value_t = 0)]
        ansatz: usize,
        /// Append amplitudes from direct integration of the first-order system.
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = 1e-10)]
        rtol: f64,
    },
    /// Run the verification suite on `all`, a family, or a class id.
    Verify {
        scope: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 1e-10)]
        rtol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Values of q for which the series solution terminates at index N.
    Terminate {
        #[arg(long)]
        family: String,
        /// gamma, delta, epsilon and optionally alpha and mu.
        #[arg(long, default_value = "")]
        params: String,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Figure preset (fig1..fig8).
    #[arg(long, conflicts_with_all = ["class", "transform", "params"])]
    preset: Option<String>,
    /// Curve index within the preset (all curves if omitted).
    #[arg(long, requires = "preset")]
    curve: Option<usize>,
    /// Class id, e.g. double:k=-1, bi:k=1/2, tri, bi-derivative.
    #[arg(long, requires_all = ["transform", "grid"])]
    class: Option<String>,
    /// Transformation, e.g. exp, exp_i:t0=0, square, power_2_3, affine:scale=1,t1=0, lambert_bi:z0=-1.
    #[arg(long)]
    transform: Option<String>,
    /// Class parameters u0, d0, d1, d2, z0 as key=value pairs; values may be complex (1-2i).
    #[arg(long, default_value = "")]
    params: String,
    /// Time grid start:stop:n.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Output file, or directory for several curves.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Output of one command: text destined for stdout and the exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, stderr: String::new(), code: 0 }
    }
}

/// Parses arguments and runs the command without touching the process streams.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome::ok(text)
            } else {
                Outcome { stdout: String::new(), stderr: text, code }
            };
        }
    };
    match dispatch(cli.command) {
        Ok(o) => o,
        Err(e) => Outcome { stdout: String::new(), stderr: format!("error: {e}\n"), code: 2 },
    }
}

fn dispatch(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Classes { json } => cmd_list_classes(json).map(Outcome::ok),
        Command::Field(args) => cmd_emit_field(&args),
        Command::Solve { model, ansatz, oracle, rtol } => cmd_solve(&model, ansatz, oracle, rtol),
        Command::Verify { scope, seed, rtol, out } => cmd_verify(&scope, seed, rtol, out.as_deref()),
        Command::Terminate { family, params, n } => cmd_terminate(&family, &params, n).map(Outcome::ok),
    }
}

pub fn cmd_list_classes(json: bool) -> Result<String> {
    let classes = enumerate_classes();
    if json {
        let mut s = serde_json::to_string_pretty(&classes).map_err(|e| Error::InvalidInput(e.to_string()))?;
        s.push('\n');
        return Ok(s);
    }
    let mut s = String::new();
    for t in &classes {
        let k = t.k.map_or("-".to_string(), |k| format!("{k}"));
        let _ = writeln!(
            s,
            "{:<36} family={:<6} kind={:<10} k={:<5} {} ; {}",
            t.id.label(),
            t.family.name(),
            match t.kind {
                ClassKind::Base => "base",
                ClassKind::Derivative => "derivative",
            },
            k,
            t.amplitude,
            t.detuning
        );
    }
    Ok(s)
}

fn get(p: &BTreeMap<String, Complex64>, key: &str) -> Option<Complex64> {
    p.get(key).copied()
}

fn need(p: &BTreeMap<String, Complex64>, key: &str) -> Result<Complex64> {
    get(p, key).ok_or_else(|| Error::InvalidInput(format!("missing parameter '{key}'")))
}

fn reject_unknown(p: &BTreeMap<String, Complex64>, allowed: &[&str]) -> Result<()> {
    match p.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(Error::InvalidInput(format!("unknown parameter '{k}' (expected {})", allowed.join(", ")))),
        None => Ok(()),
    }
}

/// Builds a class member from `u0, d0, d1, d2, z0`.
pub fn model_from_params(id: ClassId, p: &BTreeMap<String, Complex64>) -> Result<ModelClass> {
    let zero = Complex64::new(0.0, 0.0);
    let d = |k| get(p, k).unwrap_or(zero);
    match id {
        ClassId::TriDerivative | ClassId::BiDerivative | ClassId::DoubleDerivative => {
            if p.contains_key("u0") {
                return Err(Error::InvalidInput(format!("U0* of {id} is fixed by its constraint; omit 'u0'")));
            }
            let m = match id {
                ClassId::TriDerivative => {
                    reject_unknown(p, &["d0", "d1", "d2"])?;
                    ModelClass::tri_derivative(d("d0"), d("d1"), d("d2"))
                }
                ClassId::BiDerivative => {
                    reject_unknown(p, &["d0", "d1", "d2", "z0"])?;
                    ModelClass::bi_derivative(d("d0"), d("d1"), d("d2"), need(p, "z0")?)?
                }
                _ => {
                    reject_unknown(p, &["d0", "d1", "d2"])?;
                    ModelClass::double_derivative(d("d0"), d("d1"), d("d2"))?
                }
            };
            let u2 = m.required_u0star_sq().expect("derivative class");
            if u2.re > 0.0 && u2.im.abs() <= 1e-12 * u2.re {
                Ok(ModelClass { u0star: Complex64::new(u2.re.sqrt(), 0.0), ..m })
            } else {
                Ok(m)
            }
        }
        _ => {
            reject_unknown(p, &["u0", "d0", "d1", "d2"])?;
            ModelClass::base(id, need(p, "u0")?, d("d0"), d("d1"), d("d2"))
        }
    }
}

struct Job {
    label: String,
    file_stem: String,
    model: ModelClass,
    transform: Transform,
    times: Vec<f64>,
}

fn jobs(args: &ModelArgs, default_points: usize) -> Result<Vec<Job>> {
    if let Some(id) = &args.preset {
        let p = preset(id)?;
        let picked: Vec<(usize, PresetCurve)> = match args.curve {
            Some(i) => {
                let c = p.curves.get(i).cloned().ok_or_else(|| {
                    Error::InvalidInput(format!("preset {id} has curves 0..{}", p.curves.len() - 1))
                })?;
                vec![(i, c)]
            }
            None => p.curves.into_iter().enumerate().collect(),
        };
        return picked
            .into_iter()
            .map(|(i, c)| {
                let times = match &args.grid {
                    Some(g) => parse_grid(g)?,
                    None => linspace(c.t_range.0, c.t_range.1, default_points),
                };
                Ok(Job {
                    label: format!("{id} curve {} ({})", i + 1, c.label),
                    file_stem: format!("{id}_curve{}", i + 1),
                    model: c.model,
                    transform: c.transform,
                    times,
                })
            })
            .collect();
    }
    let class = args
        .class
        .as_deref()
        .ok_or_else(|| Error::InvalidInput("either --preset or --class/--transform/--grid is required".into()))?;
    let id: ClassId = class.parse()?;
    let transform = Transform::parse(args.transform.as_deref().unwrap_or_default())?;
    let params = parse_params(&args.params)?;
    let model = model_from_params(id, &params)?;
    let times = parse_grid(args.grid.as_deref().unwrap_or_default())?;
    Ok(vec![Job {
        label: format!("{id}"),
        file_stem: "field".into(),
        model,
        transform,
        times,
    }])
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn job_config(job: &Job) -> Result<FieldConfiguration> {
    let lo = job.times[0];
    let hi = job.times[job.times.len() - 1];
    field_configuration(&job.model, &job.transform, (lo, hi))
}

fn field_csv(job: &Job) -> Result<String> {
    let cfg = job_config(job)?;
    let mut s = String::from("t,U,delta_t,delta\n");
    for &t in &job.times {
        let _ = writeln!(s, "{},{},{},{}", fmt(t), fmt(cfg.u(t)?), fmt(cfg.delta_t(t)?), fmt(cfg.delta(t)?));
    }
    Ok(s)
}

fn write_outputs(out: Option<&Path>, files: Vec<(String, String, String)>) -> Result<Outcome> {
    let io = |e: std::io::Error| Error::InvalidInput(format!("cannot write output: {e}"));
    match out {
        None => {
            if files.len() == 1 {
                return Ok(Outcome::ok(files.into_iter().next().expect("one file").2));
            }
            let mut s = String::new();
            for (label, _, body) in files {
                let _ = writeln!(s, "# {label}");
                s.push_str(&body);
            }
            Ok(Outcome::ok(s))
        }
        Some(path) if files.len() == 1 && path.extension().is_some() => {
            std::fs::write(path, &files[0].2).map_err(io)?;
            Ok(Outcome::ok(format!("wrote {}\n", path.display())))
        }
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(io)?;
            let mut s = String::new();
            for (_, stem, body) in files {
                let path = dir.join(format!("{stem}.csv"));
                std::fs::write(&path, body).map_err(io)?;
                let _ = writeln!(s, "wrote {}", path.display());
            }
            Ok(Outcome::ok(s))
        }
    }
}

fn cmd_emit_field(args: &ModelArgs) -> Result<Outcome> {
    let files = jobs(args, DEFAULT_POINTS)?
        .iter()
        .map(|j| Ok((j.label.clone(), j.file_stem.clone(), field_csv(j)?)))
        .collect::<Result<Vec<_>>>()?;
    write_outputs(args.out.as_deref(), files)
}

fn solve_csv(job: &Job, ansatz: usize, oracle: bool, rtol: f64) -> Result<String> {
    let lo = job.times[0];
    let hi = job.times[job.times.len() - 1];
    let sol = TwoStateSolution::new(&job.model, ansatz, &job.transform, (lo, hi))?;
    let jets = sol.a2_jets(&job.times)?;
    let decoupled = job.model.u0star.norm() == 0.0;
    let amps: Vec<(Complex64, Complex64)> = if decoupled {
        jets.iter().map(|j| (Complex64::new(0.0, 0.0), j[0])).collect()
    } else {
        analytic_amplitudes_grid(&sol, &job.times)?
    };
    let numeric = if oracle {
        let traj = integrate_two_state(&sol.field, lo, hi, [amps[0].0, amps[0].1], &job.times, rtol / 10.0)?;
        Some(traj.states)
    } else {
        None
    };
    let mut s = String::from("t,re_a1,im_a1,re_a2,im_a2,abs_a1_sq,abs_a2_sq");
    if oracle {
        s.push_str(",re_a1_oracle,im_a1_oracle,re_a2_oracle,im_a2_oracle");
    }
    s.push('\n');
    for (k, (&t, &(a1, a2))) in job.times.iter().zip(&amps).enumerate() {
        let _ = write!(
            s,
            "{},{},{},{},{},{},{}",
            fmt(t),
            fmt(a1.re),
            fmt(a1.im),
            fmt(a2.re),
            fmt(a2.im),
            fmt(a1.norm_sqr()),
            fmt(a2.norm_sqr())
        );
        if let Some(states) = &numeric {
            let y = &states[k];
            let _ = write!(s, ",{},{},{},{}", fmt(y[0].re), fmt(y[0].im), fmt(y[1].re), fmt(y[1].im));
        }
        s.push('\n');
    }
    Ok(s)
}

fn cmd_solve(args: &ModelArgs, ansatz: usize, oracle: bool, rtol: f64) -> Result<Outcome> {
    if !(rtol > 0.0) {
        return Err(Error::InvalidInput("--rtol must be positive".into()));
    }
    let files = jobs(args, 201)?
        .iter()
        .map(|j| Ok((j.label.clone(), j.file_stem.replace("field", "solve"), solve_csv(j, ansatz, oracle, rtol)?)))
        .collect::<Result<Vec<_>>>()?;
    write_outputs(args.out.as_deref(), files)
}

fn cmd_verify(scope: &str, seed: u64, rtol: f64, out: Option<&Path>) -> Result<Outcome> {
    let reports = verify_scope(scope, seed, &Thresholds::default(), rtol)?;
    let mut json = serde_json::to_string_pretty(&reports).map_err(|e| Error::InvalidInput(e.to_string()))?;
    json.push('\n');
    let passed = reports.iter().filter(|r| r.pass).count();
    let mut stderr = String::new();
    for r in reports.iter().filter(|r| !r.pass) {
        let _ = writeln!(
            stderr,
            "FAIL {} draw {}: residual {:e}, oracle {:e}, unitarity {:e}, wronskian {:e}{}",
            r.model_id,
            r.draw,
            r.max_residual_eq4,
            r.max_oracle_deviation,
            r.unitarity_drift,
            r.wronskian_drift,
            r.error.as_ref().map(|e| format!(" ({e})")).unwrap_or_default()
        );
    }
    let _ = writeln!(stderr, "{passed}/{} instances passed", reports.len());
    let code = if passed == reports.len() { 0 } else { 1 };
    let stdout = match out {
        Some(path) => {
            std::fs::write(path, &json).map_err(|e| Error::InvalidInput(format!("cannot write output: {e}")))?;
            format!("wrote {}\n", path.display())
        }
        None => json,
    };
    Ok(Outcome { stdout, stderr, code })
}

fn cmd_terminate(family: &str, params: &str, n: usize) -> Result<String> {
    let family: HeunFamily = family.parse()?;
    let p = parse_params(params)?;
    reject_unknown(&p, &["gamma", "delta", "epsilon", "alpha", "mu"])?;
    let zero = Complex64::new(0.0, 0.0);
    let mu = get(&p, "mu").unwrap_or(if family == HeunFamily::Tri { Complex64::new(1.0, 0.0) } else { zero });
    let eps = need(&p, "epsilon")?;
    let alpha = get(&p, "alpha").unwrap_or(-eps * (mu + n as f64));
    let hp = HeunParams::new(family, need(&p, "gamma")?, need(&p, "delta")?, eps, alpha, zero)?;
    let qs = termination_conditions(&hp, mu, n)?;
    let mut s = String::new();
    if qs.is_empty() {
        let _ = writeln!(s, "no value of q terminates the {family}-confluent series at N = {n} (mu = {mu})");
        return Ok(s);
    }
    let _ = writeln!(s, "{} value(s) of q terminate the {family}-confluent series at N = {n} (mu = {mu})", qs.len());
    for (j, &q) in qs.iter().enumerate() {
        let sol = series_coeffs(&hp.with_q(q), mu, n + 8)?;
        let head = sol.coeffs[..=n].iter().map(|c| c.norm()).fold(0.0, f64::max);
        let raw = crate::heun::raw_coeffs(&hp.with_q(q), mu, n + 4)?;
        let tail = raw[n + 1..].iter().map(|c| c.norm()).fold(0.0, f64::max);
        let _ = writeln!(s, "q[{j}] = {},{} (tail/head = {:.3e})", fmt(q.re), fmt(q.im), tail / head);
        for (k, c) in sol.coeffs[..=n].iter().enumerate() {
            let _ = writeln!(s, "  c{k} = {},{}", fmt(c.re), fmt(c.im));
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Outcome {
        run(std::iter::once("heun-twostate").chain(args.iter().copied()))
    }

    #[test]
    fn classes_listing() {
        let o = run_args(&["classes"]);
        assert_eq!(o.code, 0);
        assert_eq!(o.stdout.lines().count(), 14);
        assert!(o.stdout.contains("double k=-1"));
        assert!(o.stdout.contains("bi k=1/2"));
        assert!(o.stdout.contains("tri-derivative (3-parametric)"));
        let j = run_args(&["classes", "--json"]);
        let v: serde_json::Value = serde_json::from_str(&j.stdout).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 14);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_args(&["verify", "quad:k=1"]).code, 2);
        assert_eq!(run_args(&["field", "--preset", "fig9"]).code, 2);
        assert_eq!(run_args(&["bogus"]).code, 2);
        let o = run_args(&["field", "--class", "double:k=-1", "--transform", "exp", "--params", "u0=1+i,d0=1,d2=1", "--grid", "0:1:3"]);
        assert_eq!(o.code, 2);
        assert!(o.stderr.contains("U0*"), "{}", o.stderr);
    }

    #[test]
    fn terminate_bi_quadratic() {
        let o = run_args(&["terminate", "--family", "bi", "--params", "gamma=0.7,delta=-0.4,epsilon=0.5", "--n", "1"]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        assert!(o.stdout.starts_with("2 value(s)"));
        let o = run_args(&["terminate", "--family", "tri", "--params", "gamma=0.3,delta=0.7,epsilon=0.5", "--n", "1"]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        assert!(o.stdout.starts_with("no value"));
    }

    #[test]
    fn decoupled_solution_is_constant() {
        let o = run_args(&["solve", "--class", "tri", "--transform", "affine:scale=1,t1=0", "--params", "u0=0", "--grid", "-1:1:5"]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        for line in o.stdout.lines().skip(1) {
            let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
            assert_eq!(cols[1], 0.0);
            assert!((cols[3] - 1.0).abs() < 1e-12 && cols[4].abs() < 1e-12);
        }
    }
}

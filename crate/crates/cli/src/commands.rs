use std::sync::Arc;

use multicascade::cascades::{build_counterexample_schedule, sample_environment, MeasureModel, ModelSpec, RNG_NAME};
use multicascade::checks::{run_suite, Check, SuiteParams, SUITES};
use multicascade::closedform::{big_t, BivariateCaseParams, CaseTag, SupportRegion};
use multicascade::scaling::{
    legendre_2d_fn, Axis, Cells, EnumeratedSums, GridFunction1D, GridFunction2D, LegendreOptions, PairFactors,
    RunLengthDp, ENUMERATION_CAP,
};
use serde::Serialize;
use serde_json::json;

use crate::manifest::{replayable_args, OutputDir, RunManifest};
use crate::{CaseArg, EnvArgs, Mode, Outcome, Pair, Result, SpectrumArgs, Suite, TauArgs, ValidateArgs, Which};

fn manifest(command: &str, argv: &[String], params: impl Serialize, seeds: Vec<u64>, grids: serde_json::Value) -> Result<RunManifest> {
    Ok(RunManifest {
        command: command.into(),
        args: replayable_args(argv),
        params: serde_json::to_value(params)?,
        seeds,
        grids,
        tool_version: env!("CARGO_PKG_VERSION").into(),
        rng: RNG_NAME.into(),
        outputs: Vec::new(),
    })
}

fn csv2(f: &GridFunction2D, names: [&str; 3]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    f.write_csv(&mut buf, names)?;
    Ok(buf)
}

pub fn env(a: &EnvArgs, argv: &[String]) -> Result<Outcome> {
    let env = sample_environment(a.eta, a.seed, a.jmax)?;
    let mut out = OutputDir::create(&a.out)?;
    out.write("environment.json", (serde_json::to_string_pretty(&env)? + "\n").as_bytes())?;
    out.finish(manifest("env", argv, a, vec![a.seed], json!(null))?)?;
    println!("|A| = {} of {} generations", env.a.count_upto(a.jmax), a.jmax);
    Ok(Outcome::Done)
}

/// Limit of the counterexample scaling functions.
fn counterexample_limit(q1: f64, q2: f64) -> f64 {
    (q1 + q2 - 1.0).min(q1 / 2.0 + q2 - 0.5).min(q1 + q2 / 2.0 - 0.5)
}

pub fn tau(a: &TauArgs, argv: &[String]) -> Result<Outcome> {
    let q = Axis::new(a.qmin, a.qmax, a.qstep)?;
    let p = a.params;
    let j = usize::try_from(a.j)?;
    let surface = match (a.pair, a.mode) {
        (Pair::Counterexample, Mode::TildeExact) => {
            let s = build_counterexample_schedule(a.nmax)?;
            let prof = s.profile_at(a.j as u128)?;
            GridFunction2D::sample(q, q, |x, y| prof.tau(x, y))
        }
        (Pair::Counterexample, Mode::ThreeIDp) => {
            return Err("threeI-dp needs product-form measures; the counterexample pair is not".into())
        }
        (Pair::Counterexample, Mode::Closed) => GridFunction2D::sample(q, q, counterexample_limit),
        (Pair::Binomial, Mode::Closed) => GridFunction2D::sample(q, q, |x, y| big_t(p.p1, p.p2, x, y)),
        (Pair::Switched, Mode::Closed) => {
            let c = BivariateCaseParams::new(p.p1, p.p2, p.eta)?;
            GridFunction2D::sample(q, q, |x, y| c.tau_closed(x, y))
        }
        (pair, mode) => {
            let (m1, m2) = models(a, pair)?;
            match mode {
                Mode::TildeExact => {
                    let f = PairFactors::new(&m1, &m2, j)?;
                    GridFunction2D::sample(q, q, |x, y| f.tilde_tau(x, y))
                }
                Mode::ThreeIDp => {
                    let dp = RunLengthDp::new(&m1, &m2, j)?;
                    GridFunction2D::sample(q, q, |x, y| dp.tau(x, y))
                }
                Mode::ThreeIEnum => {
                    let e = EnumeratedSums::new(&m1, &m2, j, Cells::Windows, ENUMERATION_CAP)?;
                    GridFunction2D::sample(q, q, |x, y| e.tau(x, y))
                }
                Mode::Closed => unreachable!("closed forms handled above"),
            }
        }
    };
    let seeds = if a.pair == Pair::Switched && a.mode != Mode::Closed { vec![a.seed] } else { vec![] };
    let mut out = OutputDir::create(&a.out)?;
    out.write("tau.csv", &csv2(&surface, ["q1", "q2", "tau"])?)?;
    out.finish(manifest("tau", argv, a, seeds, json!({ "q1": q, "q2": q }))?)?;
    println!("wrote {} rows", surface.values.len());
    Ok(Outcome::Done)
}

fn models(a: &TauArgs, pair: Pair) -> Result<(MeasureModel, MeasureModel)> {
    let p = a.params;
    let j = a.j as usize;
    Ok(match pair {
        Pair::Binomial => (MeasureModel::binomial(p.p1)?, MeasureModel::binomial(p.p2)?),
        Pair::Switched => {
            let env = Arc::new(sample_environment(p.eta, a.seed, a.jmax.unwrap_or(j).max(j))?);
            (MeasureModel::binomial(p.p1)?, MeasureModel::switched(p.p1, p.p2, env)?)
        }
        Pair::Counterexample => (
            ModelSpec::Counterexample { n_max: a.nmax, index: 1 }.build()?,
            ModelSpec::Counterexample { n_max: a.nmax, index: 2 }.build()?,
        ),
    })
}

fn support(c: &BivariateCaseParams) -> Result<SupportRegion> {
    Ok(match c.case() {
        CaseTag::SameSide => c.parallelogram()?,
        CaseTag::Mixed => c.pentagon_p2()?,
    })
}

fn h_axis(a: &SpectrumArgs, lo: f64, hi: f64) -> Result<Axis> {
    let (lo, hi) = (a.hmin.unwrap_or(lo), a.hmax.unwrap_or(hi));
    Ok(match a.hstep {
        Some(step) => Axis::new(lo, hi, step)?,
        None => Axis::linspace(lo, hi, 101)?,
    })
}

pub fn spectrum(a: &SpectrumArgs, argv: &[String]) -> Result<Outcome> {
    let p = a.params;
    let c = BivariateCaseParams::new(p.p1, p.p2, p.eta)?;
    let case = c.case();
    if let Some(want) = a.case {
        let want = match want {
            CaseArg::SameSide => CaseTag::SameSide,
            CaseArg::Mixed => CaseTag::Mixed,
        };
        if want != case {
            return Err(format!("case mismatch: p = ({}, {}) is {case:?}, not {want:?}", p.p1, p.p2).into());
        }
    }
    let mut out = OutputDir::create(&a.out)?;
    let grids = match a.which {
        Which::Regions => {
            let regions = match case {
                CaseTag::SameSide => vec![c.parallelogram()?],
                CaseTag::Mixed => vec![c.pentagon_p1()?, c.pentagon_p2()?],
            };
            let doc = json!({ "case": case, "params": p, "regions": regions });
            out.write("regions.json", (serde_json::to_string_pretty(&doc)? + "\n").as_bytes())?;
            json!(null)
        }
        Which::NuEta => {
            let h = h_axis(a, c.h_eta_min(), c.h_eta_max())?;
            let f = GridFunction1D::new(h, h.values().iter().map(|&x| c.spectrum_nu_eta(x).value).collect())?;
            let mut buf = Vec::new();
            f.write_csv(&mut buf, ["h", "d"])?;
            out.write("nu_eta.csv", &buf)?;
            json!({ "h": h })
        }
        Which::Multifractal | Which::Legendre => {
            let ((x0, x1), (y0, y1)) = support(&c)?.bounding_box();
            let (h1, h2) = (h_axis(a, x0, x1)?, h_axis(a, y0, y1)?);
            let surface = if a.which == Which::Multifractal {
                GridFunction2D::sample(h1, h2, |x, y| c.spectrum(x, y))
            } else {
                let q = Axis::new(a.qmin, a.qmax, a.qstep)?;
                let pts: Vec<(f64, f64)> =
                    (0..h1.len).flat_map(|i| (0..h2.len).map(move |k| (h1.value(i), h2.value(k)))).collect();
                let v = legendre_2d_fn(&q, &q, |x, y| c.tau_closed(x, y), &pts, LegendreOptions::default())?;
                GridFunction2D::new(h1, h2, v)?
            };
            let name = if a.which == Which::Multifractal { "spectrum.csv" } else { "legendre.csv" };
            out.write(name, &csv2(&surface, ["h1", "h2", "value"])?)?;
            json!({ "h1": h1, "h2": h2, "q": if a.which == Which::Legendre { json!({"min": a.qmin, "max": a.qmax, "step": a.qstep}) } else { json!(null) } })
        }
    };
    out.finish(manifest("spectrum", argv, a, vec![], grids)?)?;
    println!("{case:?} case, wrote {:?}", a.which);
    Ok(Outcome::Done)
}

#[derive(Serialize)]
struct SuiteReport {
    suite: String,
    passed: bool,
    checks: Vec<Check>,
}

#[derive(Serialize)]
struct Report {
    passed: bool,
    suites: Vec<SuiteReport>,
}

pub fn validate(a: &ValidateArgs, argv: &[String]) -> Result<Outcome> {
    let names: Vec<&str> = match a.suite {
        Suite::All => SUITES.to_vec(),
        Suite::Identities => vec!["identities"],
        Suite::Counterexample => vec!["counterexample"],
        Suite::Formalism => vec!["formalism"],
        Suite::Environment => vec!["environment"],
    };
    let sp = SuiteParams { p1: a.p1, p2: a.p2, eta: a.eta, seed: a.seed, n_max: a.nmax };
    let mut suites = Vec::new();
    for name in names {
        let checks = run_suite(name, &sp)?;
        for k in &checks {
            println!("{} {name}: {} ({:.3e}, tol {:.1e})", if k.passed { "pass" } else { "FAIL" }, k.name, k.deviation, k.tolerance);
        }
        suites.push(SuiteReport { suite: name.into(), passed: checks.iter().all(|k| k.passed), checks });
    }
    let report = Report { passed: suites.iter().all(|s| s.passed), suites };
    let mut out = OutputDir::create(&a.out)?;
    out.write("report.json", (serde_json::to_string_pretty(&report)? + "\n").as_bytes())?;
    out.finish(manifest("validate", argv, a, a.seed.into_iter().collect(), json!(null))?)?;
    Ok(if report.passed { Outcome::Done } else { Outcome::ValidationFailed })
}

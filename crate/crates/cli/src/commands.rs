use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use grushin::grid::GridFunction;
use grushin::grushin::Grushin;
use grushin::heisenberg::{kernel_fields, p_kernel, q_kernel, z_grad_pair, HeisenbergPoint, KernelParams};
use grushin::riesz::TruncationWindow;
use grushin::sweep::{dimension_sweep_with, Family, GridSpec, SweepConfig, SweepOp};
use grushin::verify::{run_suite, Suite, VerifyConfig, VERSION};
use grushin::Execution;

use crate::config::RunConfig;
use crate::{Cli, CliError, Command, KernelEval, Transform};

type Outcome = Result<u8, CliError>;

pub fn run(cli: Cli) -> Outcome {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    cfg.set("seed", cli.seed);
    if cli.sequential {
        cfg.set("mode", Some("sequential"));
    }
    cfg.set_default("seed", 0);
    cfg.set_default("mode", "parallel");
    match cli.command {
        Command::Verify { suite, samples, moment_samples, epsilon, directions, trials, report } => {
            cfg.set("suite", Some(suite));
            cfg.set("samples", samples);
            cfg.set("moment_samples", moment_samples);
            cfg.set("epsilon", epsilon);
            cfg.set("directions", directions);
            cfg.set("trials", trials);
            cfg.set("report", report.map(|p| p.display().to_string()));
            verify(cfg)
        }
        Command::Sweep { dims, exponents, trials, op, family, epsilon, budget, xi_half, eta_count, eta_step, out } => {
            cfg.set("dims", dims);
            cfg.set("exponents", exponents);
            cfg.set("trials", trials);
            cfg.set("op", op);
            cfg.set("family", family);
            cfg.set("epsilon", epsilon);
            cfg.set("budget", budget);
            cfg.set("xi_half", xi_half);
            cfg.set("eta_count", eta_count);
            cfg.set("eta_step", eta_step);
            cfg.set("out", out.map(|p| p.display().to_string()));
            sweep(cfg)
        }
        Command::Apply { transform, j, epsilon, samples, input, out } => {
            cfg.set("transform", transform.and_then(|t| t.to_possible_value()).map(|v| v.get_name().to_string()));
            cfg.set("j", j);
            cfg.set("epsilon", epsilon);
            cfg.set("samples", samples);
            cfg.set("in", input.map(|p| p.display().to_string()));
            cfg.set("out", out.map(|p| p.display().to_string()));
            apply(cfg)
        }
        Command::Kernel { eval, at, s } => {
            cfg.set("eval", eval.and_then(|t| t.to_possible_value()).map(|v| v.get_name().to_string()));
            cfg.set("at", at);
            cfg.set("s", s);
            kernel(cfg)
        }
    }
}

fn execution(cfg: &RunConfig) -> Result<Execution, CliError> {
    match cfg.raw("mode") {
        Some("parallel") | None => Ok(Execution::Parallel),
        Some("sequential") => Ok(Execution::Sequential),
        Some(m) => Err(CliError::Config(format!("mode must be parallel or sequential, got '{m}'"))),
    }
}

fn required<'a>(cfg: &'a RunConfig, key: &str) -> Result<&'a str, CliError> {
    cfg.raw(key).ok_or_else(|| CliError::Config(format!("missing required setting '{key}'")))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn write_json(w: &mut impl Write, path: &Path, value: &Value) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *w, value)
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}

fn config_json(cfg: &RunConfig) -> Value {
    json!(cfg.entries())
}

fn verify(mut cfg: RunConfig) -> Outcome {
    cfg.check_keys(&[
        "suite",
        "seed",
        "mode",
        "samples",
        "moment_samples",
        "epsilon",
        "directions",
        "trials",
        "report",
    ])?;
    let suite: Suite = required(&cfg, "suite")?.parse().map_err(|e: grushin::Error| CliError::Config(e.to_string()))?;
    let d = VerifyConfig::default();
    let vc = VerifyConfig {
        seed: cfg.get_or("seed", d.seed)?,
        samples: cfg.get_or("samples", d.samples)?,
        moment_samples: cfg.get_or("moment_samples", d.moment_samples)?,
        epsilon: cfg.get_or("epsilon", d.epsilon)?,
        directions: cfg.get_or("directions", d.directions)?,
        trials: cfg.get_or("trials", d.trials)?,
        exec: execution(&cfg)?,
    };
    vc.validate()?;
    cfg.set_default("samples", vc.samples);
    cfg.set_default("moment_samples", vc.moment_samples);
    cfg.set_default("epsilon", vc.epsilon);
    cfg.set_default("directions", vc.directions);
    cfg.set_default("trials", vc.trials);
    let report_path = cfg.raw("report").map(PathBuf::from);
    let mut sink = report_path.as_deref().map(create).transpose()?;

    let report = run_suite(suite, &vc)?;
    for c in &report.checks {
        eprintln!("{c}");
    }
    let value = json!({
        "version": VERSION,
        "config": config_json(&cfg),
        "suite": report.suite,
        "seed": report.seed,
        "checks": report.checks,
        "passed": report.passed,
    });
    let text = serde_json::to_string_pretty(&value).map_err(|e| CliError::Failure(e.to_string()))?;
    println!("{text}");
    if let (Some(w), Some(p)) = (sink.as_mut(), report_path.as_deref()) {
        write_json(w, p, &value)?;
    }
    Ok(if report.passed { 0 } else { 1 })
}

#[derive(Serialize)]
struct CsvRow<'a> {
    n: usize,
    p: f64,
    epsilon: Option<f64>,
    estimate: f64,
    stderr: f64,
    seed: u64,
    trial_id: usize,
    grid_hash: &'a str,
}

fn sweep(mut cfg: RunConfig) -> Outcome {
    cfg.check_keys(&[
        "seed",
        "mode",
        "dims",
        "exponents",
        "trials",
        "op",
        "family",
        "epsilon",
        "budget",
        "xi_half",
        "eta_count",
        "eta_step",
        "out",
    ])?;
    let d = SweepConfig::default();
    let g = GridSpec::default();
    let join = |v: &[String]| v.join(",");
    cfg.set_default("dims", join(&d.dims.iter().map(|x| x.to_string()).collect::<Vec<_>>()));
    cfg.set_default("exponents", join(&d.exponents.iter().map(|x| x.to_string()).collect::<Vec<_>>()));
    cfg.set_default("trials", d.trials);
    cfg.set_default("op", d.op);
    cfg.set_default("family", d.family);
    cfg.set_default("budget", g.budget);
    cfg.set_default("xi_half", g.xi_half);
    cfg.set_default("eta_count", g.eta_count);
    cfg.set_default("eta_step", g.eta_step);
    cfg.set_default("out", "sweep.csv");

    let config = SweepConfig {
        dims: cfg.list("dims")?.unwrap_or_default(),
        exponents: cfg.list("exponents")?.unwrap_or_default(),
        trials: cfg.get_or("trials", d.trials)?,
        seed: cfg.get_or("seed", 0)?,
        grid: GridSpec {
            budget: cfg.get_or("budget", g.budget)?,
            xi_half: cfg.get_or("xi_half", g.xi_half)?,
            eta_count: cfg.get_or("eta_count", g.eta_count)?,
            eta_step: cfg.get_or("eta_step", g.eta_step)?,
        },
        epsilon: cfg.get("epsilon")?,
        op: cfg.get_or::<SweepOp>("op", d.op)?,
        family: cfg.get_or::<Family>("family", d.family)?,
    };
    config.validate()?;
    let exec = execution(&cfg)?;

    let out = PathBuf::from(required(&cfg, "out")?);
    let side = sidecar_path(&out);
    let csv_file = create(&out)?;
    let mut side_file = create(&side)?;

    let outcome = dimension_sweep_with(&config, exec)?;
    let mut w = csv::Writer::from_writer(csv_file);
    let io = |e: csv::Error| CliError::Config(format!("cannot write {}: {e}", out.display()));
    if outcome.records.is_empty() {
        w.write_record(["n", "p", "epsilon", "estimate", "stderr", "seed", "trial_id", "grid_hash"]).map_err(io)?;
    }
    for r in &outcome.records {
        w.serialize(CsvRow {
            n: r.n,
            p: r.p,
            epsilon: r.epsilon,
            estimate: r.estimate,
            stderr: r.stderr,
            seed: r.seed,
            trial_id: r.trial_id,
            grid_hash: &r.grid_hash,
        })
        .map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Config(format!("cannot write {}: {e}", out.display())))?;
    for f in &outcome.failures {
        eprintln!("grushin: cell n={} p={} failed: {}", f.n, f.p, f.message);
    }
    let skipped: Vec<Value> = outcome
        .records
        .iter()
        .filter(|r| r.skipped > 0)
        .map(|r| json!({"n": r.n, "p": r.p, "skipped": r.skipped}))
        .collect();
    let value = json!({
        "version": VERSION,
        "config": config_json(&cfg),
        "records": outcome.records.len(),
        "failures": outcome.failures,
        "skipped": skipped,
    });
    write_json(&mut side_file, &side, &value)?;
    Ok(if outcome.records.is_empty() { 1 } else { 0 })
}

fn read_grid(path: &Path) -> Result<GridFunction, CliError> {
    let f = File::open(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    GridFunction::read_from(std::io::BufReader::new(f))
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn write_grid(g: &GridFunction, path: &Path) -> Result<(), CliError> {
    let mut w = create(path)?;
    g.write_to(&mut w)?;
    w.flush().map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}

fn apply(mut cfg: RunConfig) -> Outcome {
    cfg.check_keys(&["seed", "mode", "transform", "j", "epsilon", "samples", "in", "out"])?;
    let transform = Transform::from_str(required(&cfg, "transform")?, true)
        .map_err(|e| CliError::Config(format!("transform: {e}")))?;
    let j: usize = cfg.get_or("j", 1)?;
    let epsilon: Option<f64> = cfg.get("epsilon")?;
    let samples: usize = cfg.get_or("samples", 20_000)?;
    let seed: u64 = cfg.get_or("seed", 0)?;
    let input = PathBuf::from(required(&cfg, "in")?);
    let out = PathBuf::from(required(&cfg, "out")?);
    let exec = execution(&cfg)?;
    cfg.set_default("j", j);
    if transform == Transform::RieszMc {
        cfg.set_default("samples", samples);
    }
    let f = read_grid(&input)?;
    if f.dim() < 2 {
        return Err(CliError::Config("input grid needs at least one ξ axis and the η axis".into()));
    }
    let n = f.dim() - 1;
    if transform != Transform::Vector && !(1..=n).contains(&j) {
        return Err(CliError::Config(format!("--j must be in 1..={n}")));
    }
    let window = epsilon.map(TruncationWindow::new).transpose()?;
    // fail on an unwritable destination before doing any work
    drop(create(&out)?);

    let g = Grushin { exec, ..Default::default() };
    let mut extra = serde_json::Map::new();
    let result = match transform {
        Transform::Riesz | Transform::RieszStar => {
            let star = transform == Transform::RieszStar;
            match window {
                Some(w) => g.truncated_riesz(&f, j - 1, star, w)?,
                None => g.riesz(&f, j - 1, star)?,
            }
        }
        Transform::Vector => {
            let s = g.slices(&f)?;
            g.vector_magnitude_sliced(&s, window)?
        }
        Transform::RieszMc => {
            let eps = epsilon.ok_or_else(|| CliError::Config("riesz-mc needs --epsilon".into()))?;
            let mc = g.riesz_mc(&f, j - 1, false, eps, samples, seed, &f.axes)?;
            let se_path = {
                let mut s = out.as_os_str().to_owned();
                s.push(".stderr");
                PathBuf::from(s)
            };
            write_grid(&mc.stderr, &se_path)?;
            extra.insert("stderr_file".into(), json!(se_path.display().to_string()));
            mc.estimate
        }
    };
    write_grid(&result, &out)?;
    let side = sidecar_path(&out);
    let mut value = json!({
        "version": VERSION,
        "config": config_json(&cfg),
        "grid_hash": result.grid_hash(),
        "max_abs": result.max_abs(),
    });
    if let Value::Object(m) = &mut value {
        m.extend(extra);
    }
    write_json(&mut create(&side)?, &side, &value)?;
    Ok(0)
}

fn parse_point(text: &str) -> Result<(Vec<Complex64>, f64), CliError> {
    let v: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| CliError::Config(format!("bad coordinate '{s}' in --at ({e})"))))
        .collect::<Result<_, _>>()?;
    if v.len() < 3 || v.len().is_multiple_of(2) {
        return Err(CliError::Config(format!(
            "--at needs x1,y1,...,xn,yn,last (an odd count ≥ 3), got {} values",
            v.len()
        )));
    }
    let last = v[v.len() - 1];
    let z = v[..v.len() - 1].chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
    Ok((z, last))
}

fn kernel(mut cfg: RunConfig) -> Outcome {
    cfg.check_keys(&["seed", "mode", "eval", "at", "s"])?;
    let eval =
        KernelEval::from_str(required(&cfg, "eval")?, true).map_err(|e| CliError::Config(format!("eval: {e}")))?;
    let (z, last) = parse_point(required(&cfg, "at")?)?;
    let n = z.len();
    let s: f64 = cfg.get_or("s", 1.0)?;
    cfg.set_default("s", s);
    let params = KernelParams::new(n, s)?;
    let result = match eval {
        KernelEval::Q => json!({ "q": q_kernel(&z, last, params) }),
        KernelEval::P => json!({ "p": p_kernel(&HeisenbergPoint::new(z, last), params)? }),
        KernelEval::Grad => {
            if s != 1.0 {
                return Err(CliError::Config("grad is available for s = 1 only".into()));
            }
            let p = HeisenbergPoint::new(z, last);
            let f = kernel_fields(&p)?;
            let comps: Vec<Value> = (0..n)
                .map(|j| {
                    let (a, b) = z_grad_pair(&f, &p, j);
                    json!({ "z": [a.re, a.im], "z_star": [b.re, b.im] })
                })
                .collect();
            json!({ "p": f.p, "radial": f.radial, "dt": f.dt, "components": comps })
        }
    };
    let value = json!({
        "version": VERSION,
        "config": config_json(&cfg),
        "result": result,
    });
    println!("{}", serde_json::to_string_pretty(&value).map_err(|e| CliError::Failure(e.to_string()))?);
    Ok(0)
}

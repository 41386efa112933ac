use std::fs::{self, File};
use std::io::{self, BufWriter, Write};

use serde::Serialize;
use serde_json::json;

use reachbound::condition::CondGlobalOptions;
use reachbound::federer::{
    estimate_reach, estimate_reach_local, sample_variety_with, LocalReachEstimate, ReachEstimate, SampleOptions,
    SampleStats,
};
use reachbound::norms::PowerOptions;
use reachbound::random::{run_experiment, ExperimentConfig, TailCurve};
use reachbound::reach::{reach_bound_report, worstcase_bit_bound, ReachOptions};

use crate::config::{self, pick};
use crate::report::{num, CliError, Envelope};
use crate::{BoundArgs, EstimateArgs, Format, McTailArgs, Routes, WorstcaseArgs};

fn with_file<T: Default + serde::de::DeserializeOwned>(path: Option<&std::path::Path>) -> Result<T, CliError> {
    path.map_or_else(|| Ok(T::default()), config::load)
}

pub fn bound(flags: BoundArgs) -> Result<(), CliError> {
    let mut file: BoundArgs = with_file(flags.config.as_deref())?;
    if flags.poly.is_some() || flags.poly_file.is_some() {
        file.poly = None;
        file.poly_file = None;
    }
    let global = flags.global || file.global;
    let defaults = CondGlobalOptions::default();
    let mut cfg = BoundArgs {
        config: None,
        poly: pick(flags.poly, file.poly),
        poly_file: pick(flags.poly_file, file.poly_file),
        n: pick(flags.n, file.n),
        degrees: pick(flags.degrees, file.degrees),
        point: pick(flags.point, file.point),
        global,
        r: pick(flags.r, file.r).or(global.then_some(1.0)),
        routes: Some(pick(flags.routes, file.routes).unwrap_or(Routes::Both)),
        r_max: pick(flags.r_max, file.r_max),
        target_rel_err: Some(pick(flags.target_rel_err, file.target_rel_err).unwrap_or(defaults.target_rel_err)),
        max_cells: Some(pick(flags.max_cells, file.max_cells).unwrap_or(defaults.max_cells)),
        seed: Some(pick(flags.seed, file.seed).unwrap_or(PowerOptions::default().seed)),
        format: Some(pick(flags.format, file.format).unwrap_or(Format::Json)),
        workers: Some(config::workers(pick(flags.workers, file.workers))?),
    };
    config::install_pool(cfg.workers.unwrap_or(1))?;
    let f = config::load_poly(cfg.poly.as_deref(), cfg.poly_file.as_deref(), cfg.n, cfg.degrees.as_deref())?;
    cfg.n = Some(f.n());
    cfg.degrees = Some(f.degrees().to_vec());
    if cfg.point.is_none() && !cfg.global {
        return Err(CliError::Config("nothing to bound: give --point and/or --global".into()));
    }

    let seed = cfg.seed.unwrap_or_default();
    let opts = ReachOptions {
        routes: cfg.routes.unwrap_or(Routes::Both).into(),
        r_max: cfg.r_max.unwrap_or(f64::INFINITY),
        cond_global: CondGlobalOptions {
            target_rel_err: cfg.target_rel_err.unwrap_or(defaults.target_rel_err),
            max_cells: cfg.max_cells.unwrap_or(defaults.max_cells),
            ..defaults
        },
        power: PowerOptions {
            seed,
            ..PowerOptions::default()
        },
        ..ReachOptions::default()
    };
    let radius = if cfg.global { cfg.r } else { None };
    let rep = reach_bound_report(&f, cfg.point.as_deref(), radius, &opts)?;

    let mut out = io::stdout().lock();
    match cfg.format.unwrap_or(Format::Json) {
        Format::Json => writeln!(out, "{}", Envelope::new("bound", seed, &cfg, &rep).to_json())?,
        Format::Csv => {
            writeln!(out, "route,value")?;
            for (route, v) in rep.routes() {
                writeln!(out, "{route},{}", num(v))?;
            }
        }
        Format::Table => {
            writeln!(out, "{:<12} {:>24}", "route", "reach lower bound")?;
            for (route, v) in rep.routes() {
                writeln!(out, "{route:<12} {:>24}", num(v))?;
            }
            if let Some(best) = &rep.best_route {
                writeln!(out, "best: {} ({best})", num(rep.best))?;
            }
            for d in &rep.diagnostics {
                writeln!(out, "note: {d}")?;
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct EstimateResult {
    /// The global or local estimate, whichever was asked for.
    #[serde(serialize_with = "reachbound::serde_ext::serialize")]
    estimate: f64,
    sample_points: usize,
    sample_stats: SampleStats,
    global: Option<ReachEstimate>,
    local: Option<LocalReachEstimate>,
}

pub fn estimate(flags: EstimateArgs) -> Result<(), CliError> {
    let mut file: EstimateArgs = with_file(flags.config.as_deref())?;
    if flags.poly.is_some() || flags.poly_file.is_some() {
        file.poly = None;
        file.poly_file = None;
    }
    let r = pick(flags.r, file.r).unwrap_or(1.0);
    let mut cfg = EstimateArgs {
        config: None,
        poly: pick(flags.poly, file.poly),
        poly_file: pick(flags.poly_file, file.poly_file),
        n: pick(flags.n, file.n),
        degrees: pick(flags.degrees, file.degrees),
        samples: Some(pick(flags.samples, file.samples).unwrap_or(1000)),
        seed: Some(config::seed(pick(flags.seed, file.seed), flags.auto_seed)?),
        auto_seed: false,
        r: Some(r),
        min_sep: Some(pick(flags.min_sep, file.min_sep).unwrap_or(1e-3 * r)),
        center: pick(flags.center, file.center),
        ball: pick(flags.ball, file.ball),
        export_samples: pick(flags.export_samples, file.export_samples),
        max_probes: pick(flags.max_probes, file.max_probes),
        format: Some(pick(flags.format, file.format).unwrap_or(Format::Json)),
        workers: Some(config::workers(pick(flags.workers, file.workers))?),
    };
    config::install_pool(cfg.workers.unwrap_or(1))?;
    let f = config::load_poly(cfg.poly.as_deref(), cfg.poly_file.as_deref(), cfg.n, cfg.degrees.as_deref())?;
    cfg.n = Some(f.n());
    cfg.degrees = Some(f.degrees().to_vec());
    if cfg.center.is_some() != cfg.ball.is_some() {
        return Err(CliError::Config("--center and --ball must be given together".into()));
    }

    let seed = cfg.seed.unwrap_or_default();
    let min_sep = cfg.min_sep.unwrap_or(1e-3 * r);
    let opts = SampleOptions {
        max_probes: cfg.max_probes,
        ..SampleOptions::default()
    };
    let sample = sample_variety_with(&f, r, cfg.samples.unwrap_or(1000), seed, &opts)?;
    if let Some(path) = &cfg.export_samples {
        let w = BufWriter::new(File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?);
        sample.write_csv(w)?;
    }
    let (global, local) = match (&cfg.center, cfg.ball) {
        (Some(c), Some(b)) => (None, Some(estimate_reach_local(&sample, c, b, min_sep)?)),
        _ => (Some(estimate_reach(&sample, min_sep)?), None),
    };
    let res = EstimateResult {
        estimate: global.as_ref().map_or_else(|| local.as_ref().map_or(f64::NAN, |l| l.estimate), |g| g.estimate),
        sample_points: sample.len(),
        sample_stats: sample.stats,
        global,
        local,
    };

    let mut out = io::stdout().lock();
    match cfg.format.unwrap_or(Format::Json) {
        Format::Json => writeln!(out, "{}", Envelope::new("estimate", seed, &cfg, &res).to_json())?,
        Format::Csv => {
            writeln!(out, "estimate,sample_points,seed")?;
            writeln!(out, "{},{},{seed}", num(res.estimate), res.sample_points)?;
        }
        Format::Table => {
            writeln!(out, "estimate      {}", num(res.estimate))?;
            writeln!(out, "sample points {}", res.sample_points)?;
            writeln!(out, "seed          {seed}")?;
        }
    }
    Ok(())
}

pub fn mc_tail(flags: McTailArgs) -> Result<(), CliError> {
    let mut cfg: ExperimentConfig = config::load(&flags.config)?;
    if let Some(t) = flags.trials {
        cfg.trials = t;
    }
    if let Some(g) = flags.t_grid {
        cfg.t_grid = g;
    }
    let seed = config::seed(flags.seed.or(cfg.seed), flags.auto_seed)?;
    cfg.seed = Some(seed);
    let workers = config::workers(flags.workers)?;
    let format = flags.format.unwrap_or(Format::Table);

    let curve = run_experiment(&cfg, Some(workers))?;
    let resolved = json!({
        "experiment": cfg,
        "workers": workers,
        "out_dir": flags.out_dir,
    });
    let report = Envelope::new("mc-tail", seed, &resolved, &curve).to_json();
    fs::create_dir_all(&flags.out_dir)?;
    curve.write_csv(BufWriter::new(File::create(flags.out_dir.join("tail.csv"))?))?;
    fs::write(flags.out_dir.join("tail.json"), format!("{report}\n"))?;

    let mut out = io::stdout().lock();
    match format {
        Format::Json => writeln!(out, "{report}")?,
        Format::Csv => curve.write_csv(&mut out)?,
        Format::Table => print_tail(&mut out, &curve)?,
    }
    if !curve.underpowered && !curve.sound() {
        let bad: Vec<String> = curve
            .points
            .iter()
            .filter(|p| p.pass == Some(false))
            .map(|p| format!("{}", p.t))
            .collect();
        return Err(CliError::Assertion(format!(
            "empirical tail above the theoretical bound at t = {}",
            bad.join(", ")
        )));
    }
    Ok(())
}

fn print_tail(out: &mut impl Write, curve: &TailCurve) -> io::Result<()> {
    writeln!(
        out,
        "{} ({}), {} trials, {} excluded",
        serde_json::to_value(curve.statistic).map_or_else(|_| String::new(), |v| v.as_str().unwrap_or("").to_string()),
        curve.formula,
        curve.trials,
        curve.excluded
    )?;
    writeln!(
        out,
        "{:>10} {:>12} {:>12} {:>12} {:>14}  verdict",
        "t", "empirical", "undecided", "wilson_lo", "theoretical"
    )?;
    for p in &curve.points {
        let verdict = match (p.pass, curve.underpowered) {
            (None, _) => "out of range",
            (Some(_), true) => "skipped (underpowered)",
            (Some(true), false) => "pass",
            (Some(false), false) => "FAIL",
        };
        writeln!(
            out,
            "{:>10} {:>12.6} {:>12} {:>12.6} {:>14.6e}  {verdict}",
            p.t, p.empirical, p.undecided, p.wilson_lo, p.theoretical.value
        )?;
    }
    if let Some(s) = curve.decay_slope {
        writeln!(out, "decay slope (log2 empirical per unit t): {s:.4}")?;
    }
    Ok(())
}

pub fn worstcase(args: WorstcaseArgs) -> Result<(), CliError> {
    let b = worstcase_bit_bound(args.n, args.q, args.d, args.tau, args.r)?;
    let mut out = io::stdout().lock();
    match args.format.unwrap_or(Format::Json) {
        Format::Json => writeln!(out, "{}", Envelope::new("worstcase", 0, &args, &b).to_json())?,
        Format::Csv => {
            writeln!(out, "value,log2_value,integer_part")?;
            writeln!(out, "{},{},{}", num(b.value), b.log2_value, b.integer_part)?;
        }
        Format::Table => writeln!(out, "{}", b.integer_part)?,
    }
    Ok(())
}

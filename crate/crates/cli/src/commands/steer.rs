use super::{load_noise, load_topology, report_json, Common};
use crate::error::{CliError, CliResult};
use crate::manifest::OutputSink;
use clap::Args;
use demonsteer::format::format_sig;
use demonsteer::steering::{sweep_csv, SteeringCircuits, SteeringExperiment, SteeringReport, SweepRow, DEFAULT_GRID, DEVICE_LAYOUT};
use demonsteer::transpiler::{QubitMapping, GRID5_PRESET};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct SteerArgs {
    /// Demon probabilities to sweep.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_GRID.to_vec())]
    pub grid: Vec<f64>,
    /// Independent measurement groups per point.
    #[arg(long, default_value_t = 200)]
    pub groups: usize,
    /// Shots per group.
    #[arg(long, default_value_t = 2000)]
    pub shots: u64,
    /// Noise config JSON.
    #[arg(long)]
    pub noise: Option<PathBuf>,
    /// Coupling preset or coupling-map file.
    #[arg(long, default_value = GRID5_PRESET)]
    pub coupling: String,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Serialize)]
struct Point {
    exact: SteeringReport,
    sampled: SteeringReport,
}

#[derive(Serialize)]
struct SteerOutput<'a> {
    noise: Option<serde_json::Value>,
    compiled: Vec<&'a demonsteer::transpiler::CompileReport>,
    points: Vec<Point>,
}

pub fn run(args: &SteerArgs) -> CliResult<()> {
    if args.grid.is_empty() || args.grid.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(CliError::Usage(format!("grid values must lie in [0, 1], got {:?}", args.grid)));
    }
    if args.groups == 0 || args.shots == 0 {
        return Err(CliError::Usage("--groups and --shots must be at least 1".into()));
    }
    let noise = load_noise(args.noise.as_deref())?;
    let topo = load_topology(&args.coupling)?;
    let circuits = SteeringCircuits::compile(&topo, &QubitMapping::new(DEVICE_LAYOUT.to_vec())?)?;
    let seed = args.common.seed;

    let (rows, points) = args.common.in_pool(|| {
        let exp = SteeringExperiment::new(&circuits, noise.as_ref())?;
        let points = args
            .grid
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                Ok(Point { exact: exp.exact_report(p)?, sampled: exp.sample_point(p, args.groups, args.shots, seed, i as u64)? })
            })
            .collect::<CliResult<Vec<_>>>()?;
        let rows: Vec<SweepRow> = points
            .iter()
            .map(|pt| SweepRow {
                p: pt.exact.p,
                s2_exact: pt.exact.s2,
                s2_sampled: pt.sampled.s2,
                stderr: pt.sampled.s2_stderr,
                sigmas_above_bound: pt.sampled.sigmas_above_bound,
            })
            .collect();
        Ok((rows, points))
    })?;

    let mut sink = OutputSink::new(&args.common.out)?;
    sink.write("sweep.csv", &sweep_csv(&rows))?;
    let noise_json = noise.as_ref().map(|m| serde_json::from_str(&m.to_json()).expect("noise json"));
    let output = SteerOutput { noise: noise_json, compiled: circuits.all().iter().map(|c| &c.report).collect(), points };
    sink.write("steer_report.json", &report_json(&output))?;
    sink.finish("steer", args, seed)?;

    println!("{:>6} {:>14} {:>14} {:>14} {:>10}", "p", "S2 exact", "S2 sampled", "stderr", "sigmas");
    for r in &rows {
        println!(
            "{:>6} {:>14} {:>14} {:>14} {:>10}",
            format_sig(r.p),
            format!("{:.6}", r.s2_exact),
            format!("{:.6}", r.s2_sampled),
            format!("{:.6}", r.stderr),
            r.sigmas_above_bound.map(|s| format!("{s:.2}")).unwrap_or_else(|| "-".into())
        );
    }
    Ok(())
}

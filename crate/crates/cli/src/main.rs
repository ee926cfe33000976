use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use kdist::acceptance::{run_all, DEFAULT_SEED};
use kdist::certificate::bound_certificate;
use kdist::chains::{chain_certificate, ConeFamily};
use kdist::cover::{
    cone_halfwidth_check, cover_assignment, generated_cone, greedy_separated_set, packing_bound_check,
    random_sphere_samples, sphere_samples,
};
use kdist::decompose::{brunn_minkowski_mc_check, decompose_recursive_bound, find_equivalence_threshold, volume_ratio_bound};
use kdist::norm::polygon_vertices_2d;
use kdist::planar::{max_area_normalization, quadrant_cones};
use kdist::search::{branch_and_bound, SearchConfig, SearchProblem};
use kdist::spectrum::{best_distinct_witness, distance_spectrum};
use kdist::{Error, NormSpec, PointSet, Result};

/// Bounds, certificates and exact search for k-distance sets.
///
/// Norms and point sets are read from JSON files; results go to standard
/// output as JSON. Exit status: 0 on success, 2 on a falsification alarm or
/// failed certificate, 1 on bad input.
#[derive(Parser)]
#[command(name = "kdist", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Distance spectrum and best distinct-distance witness.
    Spectrum {
        #[arg(long)]
        norm: PathBuf,
        #[arg(long)]
        points: PathBuf,
    },
    /// Chain heights under a cone family (coordinate cones by default).
    Chains {
        #[arg(long)]
        norm: PathBuf,
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        cones: Option<PathBuf>,
    },
    /// Max-area normalization of a planar unit ball and its quadrant cones.
    #[command(name = "normalize2d")]
    Normalize2d {
        #[arg(long)]
        norm: PathBuf,
    },
    /// Greedy separated unit vectors, cover test, and cone half-widths.
    Conecover {
        #[arg(long)]
        norm: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 1_000)]
        fresh: usize,
        #[arg(long, default_value_t = 1_000)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Cluster threshold, recursive bound trace, and volume checks.
    Decompose {
        #[arg(long)]
        norm: PathBuf,
        #[arg(long)]
        points: PathBuf,
        /// Monte Carlo samples for the volume check; 0 skips it.
        #[arg(long, default_value_t = 0)]
        mc_samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Largest subset of a ground set with at most k distances.
    Search {
        #[arg(long)]
        norm: PathBuf,
        #[arg(long)]
        ground: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        goal: Option<usize>,
        #[arg(long)]
        use_bound_pruning: bool,
        #[arg(long)]
        enumerate_optima: bool,
    },
    /// Tightest applicable cardinality certificate.
    Bound {
        #[arg(long)]
        norm: PathBuf,
        #[arg(long)]
        points: PathBuf,
    },
    /// Runs the acceptance suite and prints a summary table.
    Selftest {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Print the summary as JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Input(format!("{}: malformed JSON: {e}", path.display())))
}

enum Output {
    Json(Value),
    Text(String),
}

/// The output and whether every check passed.
fn run(command: Command) -> Result<(Output, bool)> {
    Ok(match command {
        Command::Spectrum { norm, points } => {
            let spec: NormSpec = read_json(&norm)?;
            let set: PointSet = read_json(&points)?;
            let spectrum = distance_spectrum(&spec, &set)?;
            let witness = if set.len() >= 2 { Some(best_distinct_witness(&spec, &set)?) } else { None };
            (Output::Json(json!({ "k": spectrum.k(), "spectrum": spectrum, "witness": witness })), true)
        }
        Command::Chains { norm, points, cones } => {
            let spec: NormSpec = read_json(&norm)?;
            let set: PointSet = read_json(&points)?;
            let family = match cones {
                Some(path) => ConeFamily::new(read_json::<ConeFamily>(&path)?.cones)?,
                None => ConeFamily::linf(set.dim()),
            };
            let cert = chain_certificate(&spec, &set, &family)?;
            let ok = cert.injective && (set.len() as u128) <= cert.bound;
            (Output::Json(serde_json::to_value(&cert)?), ok)
        }
        Command::Normalize2d { norm } => {
            let spec: NormSpec = read_json(&norm)?;
            let normalization = max_area_normalization(&polygon_vertices_2d(&spec)?)?;
            let cones = quadrant_cones(&normalization.polygon)?;
            let ok = normalization.checks.all() && cones.report.holds();
            (Output::Json(json!({ "normalization": normalization, "cones": cones })), ok)
        }
        Command::Conecover { norm, samples, fresh, trials, seed } => {
            let spec: NormSpec = read_json(&norm)?;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let pool = sphere_samples(&spec, samples, seed)?;
            let set = greedy_separated_set(&spec, &pool)?;
            let packing = packing_bound_check(&set, &spec)?;
            let tests = random_sphere_samples(&spec, fresh, &mut rng)?;
            let cover = cover_assignment(&set, &spec, &tests)?;
            let cones = set
                .centers
                .iter()
                .map(|c| {
                    let cone = generated_cone(&spec, c, &pool)?;
                    let report = cone_halfwidth_check(&cone, &spec, trials, &mut rng)?;
                    Ok(json!({ "center": c, "generators": cone.generators.len(), "halfwidth": report }))
                })
                .collect::<Result<Vec<_>>>()?;
            let ok = packing.holds() && cover.unassigned.is_empty();
            let value = json!({
                "seed": seed,
                "separated": set,
                "packing": packing,
                "cover": { "tested": cover.tested, "unassigned": cover.unassigned.len() },
                "cones": cones,
            });
            (Output::Json(value), ok)
        }
        Command::Decompose { norm, points, mc_samples, seed } => {
            let spec: NormSpec = read_json(&norm)?;
            let set: PointSet = read_json(&points)?;
            let spectrum = distance_spectrum(&spec, &set)?;
            let threshold = if spectrum.k() >= 2 { find_equivalence_threshold(&spec, &set)? } else { None };
            let trace = decompose_recursive_bound(&spec, &set)?;
            let volume = if spectrum.k() >= 1 { Some(volume_ratio_bound(&spectrum, set.dim())?) } else { None };
            let mc = if mc_samples > 0 { Some(brunn_minkowski_mc_check(&spec, &set, mc_samples, seed)?) } else { None };
            let ok = mc.as_ref().is_none_or(|r| r.holds());
            let value = json!({
                "k": spectrum.k(),
                "threshold": threshold,
                "volume_bound": volume,
                "trace": trace,
                "monte_carlo": mc,
            });
            (Output::Json(value), ok)
        }
        Command::Search { norm, ground, k, goal, use_bound_pruning, enumerate_optima } => {
            let spec: NormSpec = read_json(&norm)?;
            let ground: PointSet = read_json(&ground)?;
            let mut problem = SearchProblem::new(spec, ground, k)?;
            problem.goal = goal;
            let result = branch_and_bound(&problem, SearchConfig { use_bound_pruning, enumerate_optima })?;
            (Output::Json(serde_json::to_value(&result)?), true)
        }
        Command::Bound { norm, points } => {
            let spec: NormSpec = read_json(&norm)?;
            let set: PointSet = read_json(&points)?;
            let cert = bound_certificate(&spec, &set)?;
            let ok = cert.pass;
            (Output::Json(serde_json::to_value(&cert)?), ok)
        }
        Command::Selftest { seed, json } => {
            let summary = run_all(seed);
            let ok = summary.all_pass();
            if json {
                (Output::Json(serde_json::to_value(&summary)?), ok)
            } else {
                (Output::Text(summary.table()), ok)
            }
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok((output, ok)) => {
            match output {
                Output::Json(v) => println!("{}", serde_json::to_string_pretty(&v).expect("serializable")),
                Output::Text(t) => println!("{t}"),
            }
            ExitCode::from(if ok { 0 } else { 2 })
        }
        Err(e) => {
            eprintln!("kdist: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

//! Command-line front end: every table and figure of the analysis has one
//! subcommand that emits its underlying data as deterministic JSON/CSV.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sswave_core::report::{csv, fmt_g9, Json};
use sswave_core::{asymptotics, exterior, polar, spectrum, stability};

#[derive(Parser)]
#[command(name = "sswave", version, about = "Self-similar profiles of the focusing cubic wave equation: spectra, asymptotics, stability and exterior continuation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    run: RunOpts,
}

#[derive(Args, Clone)]
struct RunOpts {
    /// Relative tolerance for root finding and integration.
    #[arg(long, default_value_t = 1e-10, global = true)]
    rel_tol: f64,
    /// Absolute tolerance floor for integration.
    #[arg(long, default_value_t = 1e-12, global = true)]
    abs_tol: f64,
    /// Output directory for JSON/CSV files.
    #[arg(long, default_value = "out", global = true)]
    out: PathBuf,
    /// Main output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the regular solution with n interior zeros.
    Solve {
        #[arg(long, value_parser = clap::value_parser!(u32).range(0..=10))]
        n: u32,
    },
    /// Solutions n = 0..n_max with closed-form predictions and deviations.
    Table {
        #[arg(long, value_parser = clap::value_parser!(u32).range(0..=10))]
        n_max: u32,
    },
    /// Matching constants (both routes) for the large-n scaling laws.
    Asymptotics,
    /// Closed-form prediction of (c_n, b_n).
    Predict {
        #[arg(long, value_parser = clap::value_parser!(u32).range(0..=1000))]
        n: u32,
    },
    /// Point spectrum of the linearization around solution n.
    Stability {
        #[arg(long, value_parser = clap::value_parser!(u32).range(0..=10))]
        n: u32,
        /// Also write eigenfunction samples as CSV.
        #[arg(long)]
        eigenfunctions: bool,
    },
    /// Continue a profile (or a raw cone datum b) past the light cone.
    Exterior {
        #[arg(long, value_parser = clap::value_parser!(u32).range(0..=10), conflicts_with_all = ["b", "direction"])]
        n: Option<u32>,
        #[arg(long, requires = "direction")]
        b: Option<f64>,
        #[arg(long, value_enum)]
        direction: Option<Direction>,
    },
    /// Grid certificates for the monotonicity inequalities.
    Certify {
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u32).range(100..=20000))]
        grid: u32,
    },
    /// Polar-shooting curves and their intersection for nodal class
    /// n = 2k (or 2k+1 with --odd).
    Appendix {
        #[arg(long, value_parser = clap::value_parser!(u32).range(0..=5))]
        k: u32,
        #[arg(long)]
        odd: bool,
    },
    /// Existence-scan curve data in the sigma-normalized chart.
    Figure1,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Direction {
    In,
    Out,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            let diag = Json::Obj(vec![
                ("error", Json::Str(msg)),
                ("rel_tol", Json::Num(cli.run.rel_tol)),
                ("abs_tol", Json::Num(cli.run.abs_tol)),
            ]);
            eprint!("{}", diag.render());
            ExitCode::from(1)
        }
    }
}

fn metadata(run: &RunOpts) -> Json {
    Json::Obj(vec![
        ("rel_tol", Json::Num(run.rel_tol)),
        ("abs_tol", Json::Num(run.abs_tol)),
        ("version", Json::Str(env!("CARGO_PKG_VERSION").to_string())),
    ])
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, String> {
    fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    Ok(path)
}

fn solution_json(run: &RunOpts, s: &spectrum::SelfSimilarSolution, profile_path: &Path) -> Json {
    let (c_pred, b_pred) = asymptotics::predict(s.n, asymptotics::constants());
    Json::Obj(vec![
        ("n", Json::Int(s.n as i64)),
        ("c_n", Json::Num(s.c)),
        ("b_n", Json::Num(s.b)),
        ("E_n", Json::Num(s.energy)),
        ("c_pred", Json::Num(c_pred)),
        ("b_pred", Json::Num(b_pred)),
        ("x_max", Json::Num(s.x_max)),
        ("profile_path", Json::Str(profile_path.display().to_string())),
        ("metadata", metadata(run)),
    ])
}

fn profile_csv(s: &spectrum::SelfSimilarSolution) -> String {
    let rows: Vec<Vec<f64>> = s
        .orbit
        .profile()
        .iter()
        .map(|p| vec![p.x, p.f, p.b, p.d, p.phi, p.lyapunov])
        .collect();
    csv(&["x", "f", "b", "d", "phi", "G"], &rows)
}

fn run(cli: &Cli) -> Result<(), String> {
    let run = &cli.run;
    if !(run.rel_tol > 0.0 && run.abs_tol > 0.0) {
        return Err("tolerances must be positive".into());
    }
    match &cli.command {
        Command::Solve { n } => {
            let s = spectrum::find_c_n(*n, run.rel_tol).map_err(|e| e.to_string())?;
            let profile = write_file(&run.out, &format!("profile_n{n}.csv"), &profile_csv(&s))?;
            let doc = solution_json(run, &s, &profile);
            write_file(&run.out, &format!("solution_n{n}.json"), &doc.render())?;
            print!("{}", doc.render());
        }
        Command::Table { n_max } => {
            let rows = spectrum::table(*n_max).map_err(|e| e.to_string())?;
            let mut items = Vec::new();
            let mut csv_rows = Vec::new();
            for row in &rows {
                let s = &row.solution;
                items.push(Json::Obj(vec![
                    ("n", Json::Int(s.n as i64)),
                    ("c_n", Json::Num(s.c)),
                    ("b_n", Json::Num(s.b)),
                    ("E_n", Json::Num(s.energy)),
                    ("c_pred", Json::Num(row.c_predicted)),
                    ("b_pred", Json::Num(row.b_predicted)),
                    ("c_rel_dev", Json::Num(row.c_deviation)),
                    ("b_rel_dev", Json::Num(row.b_deviation)),
                ]));
                csv_rows.push(vec![
                    s.n as f64,
                    s.c,
                    s.b,
                    s.energy,
                    row.c_predicted,
                    row.b_predicted,
                    row.c_deviation,
                    row.b_deviation,
                ]);
            }
            let doc = Json::Obj(vec![
                ("rows", Json::Arr(items)),
                ("metadata", metadata(run)),
            ]);
            write_file(&run.out, "table.json", &doc.render())?;
            match run.format {
                Format::Json => print!("{}", doc.render()),
                Format::Csv => {
                    let text = csv(
                        &["n", "c_n", "b_n", "E_n", "c_pred", "b_pred", "c_rel_dev", "b_rel_dev"],
                        &csv_rows,
                    );
                    write_file(&run.out, "table.csv", &text)?;
                    print!("{text}");
                }
            }
        }
        Command::Asymptotics => {
            let k = asymptotics::compute_constants(1e-8).map_err(|e| e.to_string())?;
            let (half_tau, minus_sum, a0t) = k.prediction_literals();
            let doc = Json::Obj(vec![
                ("T_quadrature", Json::Num(k.t_len)),
                ("T_beta", Json::Num(k.t_len_beta)),
                ("T_route_discrepancy", Json::Num(k.t_route_discrepancy())),
                ("tau_quadrature", Json::Num(k.tau)),
                ("tau_beta", Json::Num(k.tau_beta)),
                ("tau_route_discrepancy", Json::Num(k.tau_route_discrepancy())),
                ("A0", Json::Num(k.a0)),
                ("theta0", Json::Num(k.theta0)),
                ("A1", Json::Num(k.a1)),
                ("theta1", Json::Num(k.theta1)),
                ("half_tau", Json::Num(half_tau)),
                ("minus_theta_sum", Json::Num(minus_sum)),
                ("A0_times_T", Json::Num(a0t)),
                ("amplitude_ratio_cubed", Json::Num(k.amplitude_ratio_cubed())),
                ("metadata", metadata(run)),
            ]);
            write_file(&run.out, "constants.json", &doc.render())?;
            print!("{}", doc.render());
        }
        Command::Predict { n } => {
            let (c, b) = asymptotics::predict(*n, asymptotics::constants());
            let doc = Json::Obj(vec![
                ("n", Json::Int(*n as i64)),
                ("c_pred", Json::Num(c)),
                ("b_pred", Json::Num(b)),
                ("metadata", metadata(run)),
            ]);
            write_file(&run.out, &format!("predict_n{n}.json"), &doc.render())?;
            print!("{}", doc.render());
        }
        Command::Stability { n, eigenfunctions } => {
            let s = spectrum::find_c_n(*n, run.rel_tol).map_err(|e| e.to_string())?;
            let pot = stability::build_potential(&s);
            let report = stability::eigenvalues(&pot, 1.5 * pot.min_value(), run.rel_tol)
                .map_err(|e| e.to_string())?;
            let doc = Json::Obj(vec![
                ("n", Json::Int(report.n as i64)),
                (
                    "eigenvalues",
                    Json::Arr(report.eigenvalues.iter().map(|&l| Json::Num(l)).collect()),
                ),
                ("negative_count", Json::Int(report.negative_count as i64)),
                (
                    "matrix_eigenvalues",
                    Json::Arr(report.matrix_eigenvalues.iter().map(|&l| Json::Num(l)).collect()),
                ),
                ("method_agreement", Json::Num(report.method_agreement)),
                (
                    "node_counts",
                    Json::Arr(report.node_counts.iter().map(|&k| Json::Int(k as i64)).collect()),
                ),
                ("gap_window_count", Json::Int(report.gap_window_count as i64)),
                ("gauge_residual", Json::Num(report.gauge_residual)),
                ("gauge_nodes", Json::Int(report.gauge_nodes as i64)),
                ("metadata", metadata(run)),
            ]);
            write_file(&run.out, &format!("eigen_n{n}.json"), &doc.render())?;
            if *eigenfunctions {
                for (i, &lam) in report.eigenvalues.iter().enumerate() {
                    let samples = stability::eigenfunction_samples(&pot, lam, 2000);
                    let rows: Vec<Vec<f64>> = samples.iter().map(|&(x, v)| vec![x, v]).collect();
                    write_file(
                        &run.out,
                        &format!("eigenfunction_n{n}_{i}.csv"),
                        &csv(&["x", "xi"], &rows),
                    )?;
                }
            }
            print!("{}", doc.render());
        }
        Command::Exterior { n, b, direction } => {
            let (report, label) = match (n, b, direction) {
                (Some(n), None, None) => {
                    let s = spectrum::find_c_n(*n, run.rel_tol).map_err(|e| e.to_string())?;
                    let sing = exterior::exterior_singularity(&s).map_err(|e| e.to_string())?;
                    let start =
                        exterior::rho_series_cone(s.b.abs(), 1e-4, exterior::ConeSide::Outer)
                            .map_err(|e| e.to_string())?;
                    let orbit = exterior::continue_orbit(start, 1e6, run.rel_tol)
                        .map_err(|e| e.to_string())?;
                    let doc = Json::Obj(vec![
                        ("n", Json::Int(*n as i64)),
                        ("b_n", Json::Num(sing.b)),
                        ("rho_singular", Json::Num(sing.rho_sing)),
                        ("uncertainty", Json::Num(sing.uncertainty)),
                        ("metadata", metadata(run)),
                    ]);
                    write_file(&run.out, &format!("exterior_n{n}.json"), &doc.render())?;
                    print!("{}", doc.render());
                    (orbit, format!("exterior_n{n}"))
                }
                (None, Some(b), Some(dir)) => {
                    let (side, limit) = match dir {
                        Direction::Out => (exterior::ConeSide::Outer, 1e6),
                        Direction::In => (exterior::ConeSide::Inner, 1e-6),
                    };
                    let start = exterior::rho_series_cone(*b, 1e-4, side)
                        .map_err(|e| e.to_string())?;
                    let orbit = exterior::continue_orbit(start, limit, run.rel_tol)
                        .map_err(|e| e.to_string())?;
                    let outcome = match orbit.outcome {
                        exterior::Outcome::RegularTo(r) => {
                            Json::Obj(vec![("regular_to", Json::Num(r))])
                        }
                        exterior::Outcome::SingularAt(r) => {
                            Json::Obj(vec![("singular_at", Json::Num(r))])
                        }
                    };
                    let doc = Json::Obj(vec![
                        ("b", Json::Num(*b)),
                        ("outcome", outcome),
                        ("metadata", metadata(run)),
                    ]);
                    let tag = if *dir == Direction::Out { "out" } else { "in" };
                    let label = format!("exterior_b{}_{tag}", fmt_g9(*b));
                    write_file(&run.out, &format!("{label}.json"), &doc.render())?;
                    print!("{}", doc.render());
                    (orbit, label)
                }
                _ => return Err("pass either --n N or both --b B and --direction".into()),
            };
            let rows: Vec<Vec<f64>> = report
                .monitors
                .iter()
                .map(|m| vec![m.rho, m.u, m.du, m.h, m.g, m.h_prime_numerator])
                .collect();
            write_file(
                &run.out,
                &format!("{label}.csv"),
                &csv(&["rho", "U", "dU", "h", "g", "n"], &rows),
            )?;
        }
        Command::Certify { grid } => {
            let report =
                exterior::certify_inequalities(*grid as usize).map_err(|e| e.to_string())?;
            let doc = Json::Obj(vec![
                ("grid", Json::Int(report.grid as i64)),
                ("rectangle_min", Json::Num(report.rectangle_min)),
                (
                    "rectangle_argmin",
                    Json::Arr(vec![
                        Json::Num(report.rectangle_argmin.0),
                        Json::Num(report.rectangle_argmin.1),
                    ]),
                ),
                ("boundary_min", Json::Num(report.boundary_min)),
                ("g_prime_min", Json::Num(report.g_prime_min)),
                ("integrated_inequality_min", Json::Num(report.integrated_inequality_min)),
                ("outward_increment_min", Json::Num(report.outward_increment_min)),
                ("outward_g_min", Json::Num(report.outward_g_min)),
                ("inward_numerator_max", Json::Num(report.inward_numerator_max)),
                ("holds", Json::Bool(report.holds(1e-9))),
                ("metadata", metadata(run)),
            ]);
            write_file(&run.out, "certificate.json", &doc.render())?;
            print!("{}", doc.render());
        }
        Command::Appendix { k, odd } => {
            let branch = if *odd { polar::Branch::Odd } else { polar::Branch::Even };
            let (center, cone) = polar::curves(*k, branch).map_err(|e| e.to_string())?;
            let suffix = if *odd { format!("k{k}_odd") } else { format!("k{k}_even") };
            for (name, curve) in [("center", &center), ("cone", &cone)] {
                let rows: Vec<Vec<f64>> =
                    curve.iter().map(|s| vec![s.parameter, s.angle, s.radius]).collect();
                write_file(
                    &run.out,
                    &format!("curve_{name}_{suffix}.csv"),
                    &csv(&["parameter", "angle", "radius"], &rows),
                )?;
            }
            let hit = polar::find_intersection(*k, branch).map_err(|e| e.to_string())?;
            let residual =
                polar::glued_equation_residual(hit.c, hit.b).map_err(|e| e.to_string())?;
            let doc = Json::Obj(vec![
                ("k", Json::Int(hit.k as i64)),
                ("branch", Json::Str(if *odd { "odd" } else { "even" }.into())),
                ("n", Json::Int(hit.n as i64)),
                ("c", Json::Num(hit.c)),
                ("b", Json::Num(hit.b)),
                ("match_residual", Json::Num(hit.residual)),
                ("equation_residual", Json::Num(residual)),
                ("metadata", metadata(run)),
            ]);
            write_file(&run.out, &format!("intersection_{suffix}.json"), &doc.render())?;
            print!("{}", doc.render());
        }
        Command::Figure1 => {
            // Geometric grid over both signs of c.
            let n_pts = 120;
            let cs: Vec<f64> = (0..=n_pts)
                .map(|i| 0.05 * (400.0f64 / 0.05).powf(i as f64 / n_pts as f64))
                .collect();
            let mut all: Vec<f64> = cs.iter().map(|&c| -c).rev().collect();
            all.extend(cs);
            let points = spectrum::scan_points(&all).map_err(|e| e.to_string())?;
            let rows: Vec<Vec<f64>> = points
                .iter()
                .map(|p| vec![p.c, p.b_limit, p.d_limit, p.sigma, p.b_bar, p.d_bar])
                .collect();
            let text = csv(&["c", "B", "D", "sigma", "b_bar", "d_bar"], &rows);
            write_file(&run.out, "figure1.csv", &text)?;
            print!("{text}");
        }
    }
    Ok(())
}

//! Command-line front end for the Gaussian transport geometry library.
//!
//! Structured results are printed as one JSON object per invocation
//! (`command`, `inputs`, `outputs`, `diagnostics`); the `geodesic` subcommand
//! emits CSV by default for plotting. Exit codes: 0 success, 2 invalid
//! arguments, 3 numerical/domain failure.

use clap::{Parser, Subcommand, ValueEnum};
use gwgeom::curvature::{
    angle_between_families, angle_between_families_numeric, classify_kinds, estimate_curvature_with,
    gram_schmidt_pair, sectional_curvature_kinds, EstimatorParams,
};
use gwgeom::geometry::{
    ellipse_parameters, frame_vector_at, geodesic, metric_at, optimal_map, w2_distance, FrameKind,
    Gaussian, Tangent,
};
use gwgeom::linalg::{EigenPair, Matrix, SpdMatrix, SymMatrix};
use gwgeom::oracle::{oracle_w2, quantile_w2_1d};
use serde::Serialize;
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "gwgeom",
    version,
    about = "Quadratic transport geometry of Gaussian measures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Transport distance between two Gaussians.
    Distance {
        /// Path to the first Gaussian (JSON {"mean": [...], "cov": [[...]]}).
        #[arg(long)]
        a: PathBuf,
        /// Path to the second Gaussian.
        #[arg(long)]
        b: PathBuf,
    },
    /// Optimal affine transport map from the first Gaussian to the second.
    Map {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Sample the geodesic between two Gaussians (CSV by default).
    Geodesic {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Number of samples, endpoints included.
        #[arg(long, default_value_t = 11)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Closed-form sectional curvature of a frame-vector pair.
    Curvature {
        /// Comma-separated eigenvalue list, e.g. 1,2,3.
        #[arg(long)]
        lambda: String,
        /// Pair of frame vectors, e.g. e12,f12 (1-based indices; e+ allowed).
        #[arg(long)]
        pair: String,
    },
    /// Closed-form curvature vs the geodesic-circle estimator.
    VerifyCurvature {
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        pair: String,
        /// Largest radius of the estimator ladder (default: 0.08 × bound).
        #[arg(long)]
        r0: Option<f64>,
        /// Quadrature nodes per circle.
        #[arg(long, default_value_t = 256)]
        ntheta: usize,
    },
    /// Angle between rotated flat families: exact and metric-evaluated.
    Angle {
        /// First family angle, radians in (−π/4, π/4].
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        /// Second family angle, radians in (−π/4, π/4].
        #[arg(long, allow_hyphen_values = true)]
        phi: f64,
        /// Major principal standard deviation for the numeric path.
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        /// Minor principal standard deviation for the numeric path.
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
    },
    /// Closed-form distance vs the exact discrete-transport oracle.
    Oracle {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Grid points per principal axis.
        #[arg(long, default_value_t = 16)]
        resolution: usize,
    },
}

enum CliError {
    /// Bad arguments or unreadable/invalid input files → exit 2.
    Usage(String),
    /// Domain or numerical failure in the computation → exit 3.
    Numeric(String),
}

impl From<gwgeom::Error> for CliError {
    fn from(e: gwgeom::Error) -> Self {
        CliError::Numeric(e.to_string())
    }
}

#[derive(Serialize)]
struct CommandResult {
    command: String,
    inputs: Value,
    outputs: Value,
    diagnostics: Value,
}

fn load_gaussian(path: &PathBuf) -> Result<Gaussian<f64>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{} is not valid JSON: {e}", path.display())))?;
    let mean: Vec<f64> = serde_json::from_value(
        value
            .get("mean")
            .cloned()
            .ok_or_else(|| CliError::Usage(format!("{} lacks a \"mean\" field", path.display())))?,
    )
    .map_err(|e| CliError::Usage(format!("bad \"mean\" in {}: {e}", path.display())))?;
    let cov: Vec<Vec<f64>> = serde_json::from_value(
        value
            .get("cov")
            .cloned()
            .ok_or_else(|| CliError::Usage(format!("{} lacks a \"cov\" field", path.display())))?,
    )
    .map_err(|e| CliError::Usage(format!("bad \"cov\" in {}: {e}", path.display())))?;
    // Covariance is symmetrized on load, then PD-validated.
    let sym = SymMatrix::from_rows(&cov)
        .map_err(|e| CliError::Usage(format!("bad covariance in {}: {e}", path.display())))?;
    let spd = SpdMatrix::new(sym)?;
    Ok(Gaussian::new(mean, spd)?)
}

fn parse_lambda(text: &str) -> Result<Vec<f64>, CliError> {
    let lambda: Vec<f64> = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("invalid eigenvalue '{s}'")))
        })
        .collect::<Result<_, _>>()?;
    if lambda.len() < 2 {
        return Err(CliError::Usage(
            "need at least two eigenvalues (--lambda l1,l2,...)".into(),
        ));
    }
    if lambda.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
        return Err(CliError::Usage("eigenvalues must be positive and finite".into()));
    }
    Ok(lambda)
}

/// Parses one frame-vector name: `e+`, `e<i><j>` or `f<i><j>` with 1-based
/// single-digit indices i < j ≤ d.
fn parse_frame_kind(text: &str, dim: usize) -> Result<FrameKind, CliError> {
    let bad = || CliError::Usage(format!("invalid frame vector '{text}' (expect e+, eij or fij)"));
    if text == "e+" {
        return Ok(FrameKind::EPlus);
    }
    let mut chars = text.chars();
    let family = chars.next().ok_or_else(bad)?;
    let i = chars.next().and_then(|c| c.to_digit(10)).ok_or_else(bad)? as usize;
    let j = chars.next().and_then(|c| c.to_digit(10)).ok_or_else(bad)? as usize;
    if chars.next().is_some() {
        return Err(bad());
    }
    if !(1 <= i && i < j && j <= dim) {
        return Err(CliError::Usage(format!(
            "indices in '{text}' must satisfy 1 ≤ i < j ≤ {dim}"
        )));
    }
    match family {
        'e' => Ok(FrameKind::EDiag(i - 1, j - 1)),
        'f' => Ok(FrameKind::FOff(i - 1, j - 1)),
        _ => Err(bad()),
    }
}

fn parse_pair(text: &str, dim: usize) -> Result<(FrameKind, FrameKind), CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(CliError::Usage(format!(
            "expected two comma-separated frame vectors, got '{text}'"
        )));
    }
    Ok((
        parse_frame_kind(parts[0], dim)?,
        parse_frame_kind(parts[1], dim)?,
    ))
}

fn mean_json(g: &Gaussian<f64>) -> Value {
    json!(g.mean())
}

fn cov_json(g: &Gaussian<f64>) -> Value {
    json!(g.cov().sym().rows())
}

fn emit(result: &CommandResult) {
    println!(
        "{}",
        serde_json::to_string_pretty(result).expect("result serialization")
    );
}

fn base_diagnostics() -> Value {
    json!({
        "version": env!("CARGO_PKG_VERSION"),
        "eps_pd_relative": 1e-12,
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Distance { a, b } => {
            let ga = load_gaussian(&a)?;
            let gb = load_gaussian(&b)?;
            let d = w2_distance(&ga, &gb)?;
            emit(&CommandResult {
                command: "distance".into(),
                inputs: json!({
                    "a": {"path": a.display().to_string(), "mean": mean_json(&ga), "cov": cov_json(&ga)},
                    "b": {"path": b.display().to_string(), "mean": mean_json(&gb), "cov": cov_json(&gb)},
                }),
                outputs: json!({"w2_distance": d, "w2_squared": d * d}),
                diagnostics: base_diagnostics(),
            });
        }
        Command::Map { a, b } => {
            let ga = load_gaussian(&a)?;
            let gb = load_gaussian(&b)?;
            let m = optimal_map(&ga, &gb)?;
            emit(&CommandResult {
                command: "map".into(),
                inputs: json!({
                    "a": {"path": a.display().to_string(), "mean": mean_json(&ga), "cov": cov_json(&ga)},
                    "b": {"path": b.display().to_string(), "mean": mean_json(&gb), "cov": cov_json(&gb)},
                }),
                outputs: json!({"linear": m.linear.rows(), "shift": m.shift}),
                diagnostics: base_diagnostics(),
            });
        }
        Command::Geodesic {
            a,
            b,
            steps,
            format,
        } => {
            if steps < 2 {
                return Err(CliError::Usage("--steps must be at least 2".into()));
            }
            let ga = load_gaussian(&a)?;
            let gb = load_gaussian(&b)?;
            let dim = ga.dim();
            let mut samples = Vec::with_capacity(steps);
            for k in 0..steps {
                let t = k as f64 / (steps - 1) as f64;
                let g = geodesic(&ga, &gb, t)?;
                let ellipse = if dim == 2 {
                    Some(ellipse_parameters(g.cov())?)
                } else {
                    None
                };
                samples.push((t, g, ellipse));
            }
            match format {
                Format::Csv => {
                    let mut header: Vec<String> = vec!["t".into()];
                    header.extend((1..=dim).map(|i| format!("mean_{i}")));
                    for i in 1..=dim {
                        for j in 1..=dim {
                            header.push(format!("cov_{i}{j}"));
                        }
                    }
                    if dim == 2 {
                        header.extend(["alpha".into(), "beta".into(), "theta".into()]);
                    }
                    println!("{}", header.join(","));
                    for (t, g, ellipse) in &samples {
                        let mut row: Vec<String> = vec![format!("{t}")];
                        row.extend(g.mean().iter().map(|v| format!("{v}")));
                        for r in g.cov().sym().rows() {
                            row.extend(r.iter().map(|v| format!("{v}")));
                        }
                        if let Some((al, be, th)) = ellipse {
                            row.push(format!("{al}"));
                            row.push(format!("{be}"));
                            row.push(format!("{th}"));
                        }
                        println!("{}", row.join(","));
                    }
                }
                Format::Json => {
                    let rows: Vec<Value> = samples
                        .iter()
                        .map(|(t, g, ellipse)| {
                            let mut obj = json!({
                                "t": t,
                                "mean": g.mean(),
                                "cov": g.cov().sym().rows(),
                            });
                            if let Some((al, be, th)) = ellipse {
                                obj["ellipse"] = json!({"alpha": al, "beta": be, "theta": th});
                            }
                            obj
                        })
                        .collect();
                    emit(&CommandResult {
                        command: "geodesic".into(),
                        inputs: json!({
                            "a": {"path": a.display().to_string()},
                            "b": {"path": b.display().to_string()},
                            "steps": steps,
                        }),
                        outputs: json!({"samples": rows}),
                        diagnostics: base_diagnostics(),
                    });
                }
            }
        }
        Command::Curvature { lambda, pair } => {
            let lam = parse_lambda(&lambda)?;
            let (ka, kb) = parse_pair(&pair, lam.len())?;
            let case = classify_kinds(lam.len(), ka, kb)?;
            let k = sectional_curvature_kinds(&lam, ka, kb)?;
            emit(&CommandResult {
                command: "curvature".into(),
                inputs: json!({"lambda": lam, "pair": pair}),
                outputs: json!({"curvature": k, "case": case.index(), "flat": case.is_flat()}),
                diagnostics: base_diagnostics(),
            });
        }
        Command::VerifyCurvature {
            lambda,
            pair,
            r0,
            ntheta,
        } => {
            let lam = parse_lambda(&lambda)?;
            let (ka, kb) = parse_pair(&pair, lam.len())?;
            let case = classify_kinds(lam.len(), ka, kb)?;
            let closed = sectional_curvature_kinds(&lam, ka, kb)?;

            let eig = EigenPair::new(Matrix::identity(lam.len()), lam.clone())?;
            let va = frame_vector_at(&eig, ka)?;
            let vb = frame_vector_at(&eig, kb)?;
            let (ta, tb) = orthonormal_pair(&eig, va.as_tangent(), vb.as_tangent())?;
            let params = EstimatorParams {
                r0,
                n_theta: ntheta,
                fd_step: None,
            };
            let estimated = estimate_curvature_with(&eig, &ta, &tb, &params)?;
            let abs_error = (estimated - closed).abs();
            let rel_error = if closed != 0.0 {
                abs_error / closed.abs()
            } else {
                f64::NAN
            };
            let mut diagnostics = base_diagnostics();
            diagnostics["n_theta"] = json!(ntheta);
            diagnostics["r0"] = json!(r0);
            diagnostics["radius_ladder"] = json!("r0, r0/2, r0/4 with Richardson extrapolation");
            diagnostics["rel_tolerance"] = json!(0.05);
            diagnostics["abs_tolerance_flat"] = json!(1e-3);
            emit(&CommandResult {
                command: "verify-curvature".into(),
                inputs: json!({"lambda": lam, "pair": pair}),
                outputs: json!({
                    "curvature": closed,
                    "estimated": estimated,
                    "abs_error": abs_error,
                    "rel_error": if rel_error.is_nan() { Value::Null } else { json!(rel_error) },
                    "case": case.index(),
                }),
                diagnostics,
            });
        }
        Command::Angle {
            theta,
            phi,
            alpha,
            beta,
        } => {
            let exact = angle_between_families(theta, phi)?;
            let numeric = angle_between_families_numeric(alpha, beta, theta, phi)?;
            let mut diagnostics = base_diagnostics();
            diagnostics["agreement_tolerance"] = json!(1e-10);
            emit(&CommandResult {
                command: "angle".into(),
                inputs: json!({"theta": theta, "phi": phi, "alpha": alpha, "beta": beta}),
                outputs: json!({
                    "exact": exact,
                    "numeric": numeric,
                    "difference": (exact - numeric).abs(),
                }),
                diagnostics,
            });
        }
        Command::Oracle { a, b, resolution } => {
            let ga = load_gaussian(&a)?;
            let gb = load_gaussian(&b)?;
            let closed = w2_distance(&ga, &gb)?;
            let lp = oracle_w2(&ga, &gb, resolution)?;
            let quantile = if ga.dim() == 1 {
                Some(quantile_w2_1d(&ga, &gb)?)
            } else {
                None
            };
            let mut diagnostics = base_diagnostics();
            diagnostics["resolution"] = json!(resolution);
            diagnostics["grid_radius_sigmas"] = json!(5.0);
            emit(&CommandResult {
                command: "oracle".into(),
                inputs: json!({
                    "a": {"path": a.display().to_string()},
                    "b": {"path": b.display().to_string()},
                    "resolution": resolution,
                }),
                outputs: json!({
                    "closed_form": closed,
                    "lp_oracle": lp,
                    "gap": (closed - lp).abs(),
                    "quantile_oracle": quantile,
                }),
                diagnostics,
            });
        }
    }
    Ok(())
}

/// Returns the pair itself when already g-orthonormal; otherwise its
/// Gram–Schmidt orthonormalization (needed for the flat diagonal-plane
/// pairs, which are not orthogonal in g).
fn orthonormal_pair(
    eig: &EigenPair<f64>,
    a: &Tangent<f64>,
    b: &Tangent<f64>,
) -> Result<(Tangent<f64>, Tangent<f64>), CliError> {
    let base = SpdMatrix::new(eig.reconstruct())?;
    let resid = (metric_at(&base, a, a)? - 1.0)
        .abs()
        .max((metric_at(&base, b, b)? - 1.0).abs())
        .max(metric_at(&base, a, b)?.abs());
    if resid <= 1e-10 {
        Ok((a.clone(), b.clone()))
    } else {
        Ok(gram_schmidt_pair(eig, a, b)?)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

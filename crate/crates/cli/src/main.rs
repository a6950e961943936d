//! Command-line front end: threshold tables, exact matrix export,
//! conditioning classification, codiagonal inspection, condition-number
//! sweeps and the verification suite.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use splinecond::exact::{decimal_string, format_rational, parse_rational, Rational};
use splinecond::galerkin::{
    assemble, critical_rho, outer_codiagonals, scaled_system, system_matrix, ExactMatrix,
    MatrixKind,
};
use splinecond::lab::{
    figure_sweeps, sweep, to_csv, to_svg, Axis, NormKind, SweepResult, SweepSpec,
};
use splinecond::symbols::thresholds;
use splinecond::toeplitz::classify_scaled_family;
use splinecond::Error;

#[derive(Parser)]
#[command(
    name = "splinecond",
    version,
    about = "Exact spline Galerkin matrices, Toeplitz conditioning classification and CFL/penalty thresholds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Output file; stdout when omitted. File outputs get a manifest beside them.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact CFL and penalty thresholds per spline degree.
    Thresholds {
        /// Largest degree to tabulate.
        #[arg(long, default_value_t = 6)]
        pmax: usize,
        /// Tabulate the penalty threshold for every stabilization order k.
        #[arg(long)]
        k_orders: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Assemble exact matrices of the discrete bilinear forms, or dump the
    /// spline basis.
    Assemble {
        /// Spline degree.
        #[arg(short = 'p', long)]
        degree: usize,
        /// Number of mesh elements N (uniform mesh on [0, T]).
        #[arg(short = 'N', long)]
        elements: Option<usize>,
        /// Family size n, for --kind scaled.
        #[arg(short = 'n', long)]
        size: Option<usize>,
        /// End time T, rational or decimal; defaults to N (mesh size 1).
        #[arg(long = "T", allow_hyphen_values = true)]
        t_end: Option<String>,
        /// mass | stiffness | deriv | system | scaled | basis.
        #[arg(long, default_value = "mass")]
        kind: String,
        /// Derivative/stabilization order k (defaults to the degree).
        #[arg(short = 'k', long)]
        stab_order: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        rho: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        delta: Option<String>,
        /// Significant digits for Matrix Market / CSV rendering.
        #[arg(long, default_value_t = 17)]
        digits: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Conditioning classification of the scaled family at (rho, delta).
    Classify {
        #[arg(short = 'p', long)]
        degree: usize,
        #[arg(long, allow_hyphen_values = true)]
        rho: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        delta: String,
        #[arg(short = 'k', long)]
        stab_order: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Leading outer-codiagonal entries and the critical parameter.
    Codiag {
        #[arg(short = 'p', long)]
        degree: usize,
        #[arg(long, allow_hyphen_values = true)]
        rho: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        delta: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Condition-number sweeps: published figure templates or custom grids.
    Sweep {
        /// Figure template 4..9.
        #[arg(long)]
        figure: Option<u8>,
        /// Shrinks the template family sizes (0 < scale <= 1).
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(short = 'p', long)]
        degree: Option<usize>,
        #[arg(short = 'k', long)]
        stab_order: Option<usize>,
        /// rho | delta | h | n.
        #[arg(long)]
        axis: Option<String>,
        /// Grid as start:end:count or start:end:count:log.
        #[arg(long)]
        grid: Option<String>,
        #[arg(short = 'n', long)]
        size: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        rho: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        delta: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<f64>,
        #[arg(long = "T", allow_hyphen_values = true)]
        t_end: Option<f64>,
        /// one | two | inf.
        #[arg(long, default_value = "two")]
        norm: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the built-in verification suite; nonzero exit on any failure.
    Verify,
}

type AnyError = Box<dyn std::error::Error>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err.downcast_ref::<Error>() {
                Some(Error::HypothesisViolated(_)) => ExitCode::from(3),
                Some(Error::InvalidParameter(_)) | Some(Error::UnsupportedDegree(_)) => {
                    ExitCode::from(2)
                }
                _ => ExitCode::from(1),
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, AnyError> {
    match cli.command {
        Command::Thresholds {
            pmax,
            k_orders,
            output,
        } => {
            let format = output.format.as_deref().unwrap_or("csv");
            let rows: Vec<_> = (1..=pmax).map(thresholds).collect::<Result<_, _>>()?;
            let text = match format {
                "json" => {
                    let arr: Vec<Value> = rows
                        .iter()
                        .map(|t| {
                            json!({
                                "p": t.degree,
                                "rho": format_rational(&t.cfl),
                                "rho_decimal": decimal_string(&t.cfl, 15),
                                "delta": format_rational(&t.penalty),
                                "delta_decimal": decimal_string(&t.penalty, 15),
                                "delta_by_order": t.penalty_by_order.iter().map(|(k, d)| json!({
                                    "k": k,
                                    "delta": format_rational(d),
                                    "delta_decimal": decimal_string(d, 15),
                                })).collect::<Vec<_>>(),
                            })
                        })
                        .collect();
                    serde_json::to_string_pretty(&Value::Array(arr))? + "\n"
                }
                "csv" if k_orders => {
                    let mut s = String::from("p,k,delta_k,delta_k_decimal\n");
                    for t in &rows {
                        for (k, d) in &t.penalty_by_order {
                            s.push_str(&format!(
                                "{},{},{},{}\n",
                                t.degree,
                                k,
                                format_rational(d),
                                decimal_string(d, 15)
                            ));
                        }
                    }
                    s
                }
                "csv" => {
                    let mut s = String::from("p,rho,delta,rho_decimal,delta_decimal\n");
                    for t in &rows {
                        s.push_str(&format!(
                            "{},{},{},{},{}\n",
                            t.degree,
                            format_rational(&t.cfl),
                            format_rational(&t.penalty),
                            decimal_string(&t.cfl, 15),
                            decimal_string(&t.penalty, 15)
                        ));
                    }
                    s
                }
                other => return Err(usage(format!("unknown format {other}"))),
            };
            emit(&text, &output, "thresholds")?;
        }
        Command::Assemble {
            degree,
            elements,
            size,
            t_end,
            kind,
            stab_order,
            mu,
            rho,
            delta,
            digits,
            output,
        } => {
            let k = stab_order.unwrap_or(degree);
            let delta_r = opt_rational(&delta)?.unwrap_or_else(|| Rational::from_integer(0.into()));
            if kind == "basis" {
                let n_el = elements.ok_or_else(|| usage("-N is required".into()))?;
                let t = resolve_t(&t_end, n_el)?;
                let basis = splinecond::spline_space::build_basis(degree, n_el, t)?;
                let text = serde_json::to_string_pretty(&basis.to_json())? + "\n";
                emit(&text, &output, "basis")?;
                return Ok(ExitCode::SUCCESS);
            }
            let mat: ExactMatrix = match kind.as_str() {
                "mass" | "stiffness" | "deriv" => {
                    let n_el = elements.ok_or_else(|| usage("-N is required".into()))?;
                    let t = resolve_t(&t_end, n_el)?;
                    let mk = match kind.as_str() {
                        "mass" => MatrixKind::Mass,
                        "stiffness" => MatrixKind::Stiffness,
                        _ => MatrixKind::Deriv(k),
                    };
                    assemble(degree, n_el, t, mk)?
                }
                "system" => {
                    let n_el = elements.ok_or_else(|| usage("-N is required".into()))?;
                    let t = resolve_t(&t_end, n_el)?;
                    let mu = opt_rational(&mu)?
                        .ok_or_else(|| usage("--mu is required for --kind system".into()))?;
                    system_matrix(degree, n_el, t, &mu, &delta_r, k)?
                }
                "scaled" => {
                    let n = size.ok_or_else(|| usage("-n is required for --kind scaled".into()))?;
                    let rho = opt_rational(&rho)?
                        .ok_or_else(|| usage("--rho is required for --kind scaled".into()))?;
                    scaled_system(degree, n, &rho, &delta_r, k)?
                }
                other => return Err(usage(format!("unknown kind {other}"))),
            };
            let format = output.format.as_deref().unwrap_or("json");
            let text = match format {
                "json" => serde_json::to_string_pretty(&mat.to_json())? + "\n",
                "mm" => mat.to_matrix_market(digits),
                "csv" => {
                    let mut s = String::new();
                    for i in 0..mat.n() {
                        let row: Vec<String> = (0..mat.n())
                            .map(|j| decimal_string(mat.get(i, j), digits))
                            .collect();
                        s.push_str(&row.join(","));
                        s.push('\n');
                    }
                    s
                }
                other => return Err(usage(format!("unknown format {other}"))),
            };
            emit(&text, &output, "assemble")?;
        }
        Command::Classify {
            degree,
            rho,
            delta,
            stab_order,
            output,
        } => {
            let rho = parse_rational(&rho)?;
            let delta = parse_rational(&delta)?;
            let k = stab_order.unwrap_or(degree);
            let fc = classify_scaled_family(degree, &rho, &delta, k)?;
            let t = fc.verdict.evidence;
            let value = json!({
                "type": [t.inside, t.unit, t.outside],
                "eta": t.max_unit_multiplicity,
                "verdict": match fc.verdict.class {
                    splinecond::ConditioningClass::Well => "well",
                    splinecond::ConditioningClass::Weak(_) => "weak",
                    splinecond::ConditioningClass::Exponential => "exponential",
                },
                "verdict_detail": fc.verdict.class.to_string(),
                "band": {
                    "lower": fc.band.lower(),
                    "upper": fc.band.upper(),
                    "coefficients": fc.band.coeffs().iter().map(format_rational).collect::<Vec<_>>(),
                    "reduced": fc.band_reduced,
                },
                "sturm_interval_roots": fc.sturm_interval_roots,
                "routes_agree": fc.routes_agree,
                "roots": fc.floating.clusters.iter().map(|(z, mult)| json!({
                    "re": z.re,
                    "im": z.im,
                    "modulus": z.norm(),
                    "multiplicity": mult,
                })).collect::<Vec<_>>(),
            });
            let text = serde_json::to_string_pretty(&value)? + "\n";
            emit(&text, &output, "classify")?;
        }
        Command::Codiag {
            degree,
            rho,
            delta,
            output,
        } => {
            let rho = parse_rational(&rho)?;
            let delta = parse_rational(&delta)?;
            let (star, hash) = outer_codiagonals(degree, &rho, &delta)?;
            let crit = critical_rho(degree, &delta)?;
            let format = output.format.as_deref().unwrap_or("json");
            let text = match format {
                "json" => {
                    let value = json!({
                        "p": degree,
                        "rho": format_rational(&rho),
                        "delta": format_rational(&delta),
                        "k_star": star.iter().map(format_rational).collect::<Vec<_>>(),
                        "k_hash": hash.iter().map(format_rational).collect::<Vec<_>>(),
                        "critical_rho": crit.as_ref().map(format_rational),
                    });
                    serde_json::to_string_pretty(&value)? + "\n"
                }
                "csv" => {
                    let mut s = String::from("codiagonal,index,value\n");
                    for (i, v) in star.iter().enumerate() {
                        s.push_str(&format!("star,{i},{}\n", format_rational(v)));
                    }
                    for (i, v) in hash.iter().enumerate() {
                        s.push_str(&format!("hash,{i},{}\n", format_rational(v)));
                    }
                    s
                }
                other => return Err(usage(format!("unknown format {other}"))),
            };
            emit(&text, &output, "codiag")?;
        }
        Command::Sweep {
            figure,
            scale,
            degree,
            stab_order,
            axis,
            grid,
            size,
            rho,
            delta,
            mu,
            t_end,
            norm,
            output,
        } => {
            let norm = NormKind::parse(&norm)?;
            let results: Vec<SweepResult> = if let Some(fig) = figure {
                let specs = figure_sweeps(fig, scale)?;
                specs.iter().map(sweep).collect::<Result<_, _>>()?
            } else {
                let p = degree.ok_or_else(|| usage("-p is required for custom sweeps".into()))?;
                let axis = match axis.as_deref() {
                    Some("rho") => Axis::Rho,
                    Some("delta") => Axis::DeltaAbs,
                    Some("h") => Axis::MeshSize,
                    Some("n") => Axis::Elements,
                    Some(other) => return Err(usage(format!("unknown axis {other}"))),
                    None => return Err(usage("--axis is required for custom sweeps".into())),
                };
                let spec = SweepSpec {
                    degree: p,
                    stab_order: stab_order.unwrap_or(p),
                    axis,
                    norm,
                    grid: parse_grid(&grid.ok_or_else(|| usage("--grid is required".into()))?)?,
                    size,
                    rho,
                    delta,
                    mu,
                    t_end,
                };
                vec![sweep(&spec)?]
            };
            let format = output.format.as_deref().unwrap_or("csv");
            let text = match format {
                "csv" => to_csv(&results),
                "svg" => {
                    let title = figure
                        .map(|f| format!("condition-number sweep (template {f})"))
                        .unwrap_or_else(|| "condition-number sweep".to_string());
                    let x_log = matches!(results.first().map(|r| r.axis), Some(Axis::DeltaAbs));
                    to_svg(&results, &title, x_log)
                }
                other => return Err(usage(format!("unknown format {other}"))),
            };
            emit(&text, &output, "sweep")?;
        }
        Command::Verify => {
            let checks = splinecond::verify::run_all();
            let mut failed = 0;
            for c in &checks {
                println!(
                    "{}: {} — {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                );
                if !c.passed {
                    failed += 1;
                }
            }
            println!(
                "{} of {} checks passed",
                checks.len() - failed,
                checks.len()
            );
            if failed > 0 {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn usage(message: String) -> AnyError {
    Box::new(Error::InvalidParameter(message))
}

fn opt_rational(s: &Option<String>) -> Result<Option<Rational>, AnyError> {
    Ok(match s {
        Some(v) => Some(parse_rational(v)?),
        None => None,
    })
}

fn resolve_t(t_end: &Option<String>, elements: usize) -> Result<Rational, AnyError> {
    Ok(match t_end {
        Some(v) => parse_rational(v)?,
        None => Rational::from_integer((elements as i64).into()),
    })
}

/// start:end:count or start:end:count:log.
fn parse_grid(s: &str) -> Result<Vec<f64>, AnyError> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 && parts.len() != 4 {
        return Err(usage(format!("grid `{s}` must be start:end:count[:log]")));
    }
    let a: f64 = parts[0]
        .parse()
        .map_err(|_| usage(format!("bad grid start {}", parts[0])))?;
    let b: f64 = parts[1]
        .parse()
        .map_err(|_| usage(format!("bad grid end {}", parts[1])))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| usage(format!("bad grid count {}", parts[2])))?;
    if count == 0 {
        return Err(usage("grid count must be positive".into()));
    }
    let log = parts.len() == 4 && parts[3] == "log";
    Ok((0..count)
        .map(|i| {
            let t = if count == 1 {
                0.0
            } else {
                i as f64 / (count as f64 - 1.0)
            };
            if log {
                10f64.powf(a.log10() + (b.log10() - a.log10()) * t)
            } else {
                a + (b - a) * t
            }
        })
        .collect())
}

/// Writes to stdout or to the output path; file outputs get a manifest
/// describing the run beside them.
fn emit(text: &str, output: &OutputArgs, tag: &str) -> Result<(), AnyError> {
    match &output.out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => {
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)?;
                }
            }
            std::fs::write(path, text)?;
            write_manifest(path, tag)?;
            Ok(())
        }
    }
}

fn write_manifest(out_path: &Path, tag: &str) -> Result<(), AnyError> {
    let manifest = json!({
        "command": std::env::args().collect::<Vec<_>>(),
        "subcommand": tag,
        "package": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "outputs": [out_path.display().to_string()],
        "determinism": "no random seeds; repeated runs produce bit-identical outputs",
    });
    let manifest_path = PathBuf::from(format!("{}.manifest.json", out_path.display()));
    std::fs::write(
        &manifest_path,
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;
    Ok(())
}

//! Floating-point condition-number measurements and parameter sweeps.
//! Matrices are assembled exactly and rounded to doubles entry by entry; the
//! sweeps reproduce the qualitative sharpness experiments around the CFL and
//! penalty thresholds.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{from_f64, rint, to_f64, Rational};
use crate::galerkin::{assemble_trio, combine_system, system_matrix, ExactMatrix};
use crate::symbols::penalty_threshold;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    One,
    Two,
    Inf,
}

impl NormKind {
    pub fn label(&self) -> &'static str {
        match self {
            NormKind::One => "one",
            NormKind::Two => "two",
            NormKind::Inf => "inf",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "one" | "1" => Ok(NormKind::One),
            "two" | "2" => Ok(NormKind::Two),
            "inf" => Ok(NormKind::Inf),
            other => Err(Error::InvalidParameter(format!("unknown norm {other}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CondOutcome {
    Finite(f64),
    Singular,
}

fn norm_one(a: &DMatrix<f64>) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn norm_inf(a: &DMatrix<f64>) -> f64 {
    (0..a.nrows())
        .map(|i| a.row(i).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Condition number of a dense matrix: one- and infinity-norm variants go
/// through the explicit LU inverse, the spectral variant through the full
/// SVD. Numerical singularity (sigma_min below 1e3 eps sigma_max, or a
/// failed inversion) is reported as such rather than as a huge number.
pub fn cond(a: &DMatrix<f64>, norm: NormKind) -> CondOutcome {
    match norm {
        NormKind::Two => {
            let sv = a.clone().svd(false, false).singular_values;
            let smax = sv.iter().cloned().fold(0.0, f64::max);
            let smin = sv.iter().cloned().fold(f64::INFINITY, f64::min);
            if smin <= 1e3 * f64::EPSILON * smax || !smin.is_finite() {
                CondOutcome::Singular
            } else {
                CondOutcome::Finite(smax / smin)
            }
        }
        NormKind::One | NormKind::Inf => match a.clone().try_inverse() {
            None => CondOutcome::Singular,
            Some(inv) => {
                let (na, ni) = match norm {
                    NormKind::One => (norm_one(a), norm_one(&inv)),
                    _ => (norm_inf(a), norm_inf(&inv)),
                };
                CondOutcome::Finite(na * ni)
            }
        },
    }
}

/// Smallest singular value.
pub fn sigma_min(a: &DMatrix<f64>) -> f64 {
    let sv = a.clone().svd(false, false).singular_values;
    sv.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Swept parameter axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Rho,
    DeltaAbs,
    MeshSize,
    Elements,
}

impl Axis {
    pub fn label(&self) -> &'static str {
        match self {
            Axis::Rho => "rho",
            Axis::DeltaAbs => "delta_abs",
            Axis::MeshSize => "h",
            Axis::Elements => "n",
        }
    }
}

/// One measured point; overflow and singularity are kept as explicit
/// sentinel rows, never dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub parameter: f64,
    pub size: usize,
    pub rho: Option<f64>,
    pub delta: Option<f64>,
    pub mesh_size: Option<f64>,
    pub kappa: f64,
    pub sentinel: Option<&'static str>,
}

impl SweepPoint {
    fn from_outcome(parameter: f64, size: usize, outcome: CondOutcome) -> Self {
        let (kappa, sentinel) = match outcome {
            CondOutcome::Singular => (f64::INFINITY, Some("singular")),
            CondOutcome::Finite(k) if k > 1e15 => (k, Some("ge1e15")),
            CondOutcome::Finite(k) => (k, None),
        };
        SweepPoint {
            parameter,
            size,
            rho: None,
            delta: None,
            mesh_size: None,
            kappa,
            sentinel,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub axis: Axis,
    pub degree: usize,
    pub stab_order: usize,
    pub norm: NormKind,
    pub points: Vec<SweepPoint>,
}

/// Specification of one sweep. The fixed parameters not on the axis must be
/// set; the grid carries the axis values.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub degree: usize,
    pub stab_order: usize,
    pub axis: Axis,
    pub norm: NormKind,
    pub grid: Vec<f64>,
    /// Family size for rho / delta sweeps.
    pub size: Option<usize>,
    pub rho: Option<f64>,
    pub delta: Option<f64>,
    pub mu: Option<f64>,
    pub t_end: Option<f64>,
}

fn exact_from(value: f64, what: &str) -> Result<Rational> {
    from_f64(value).map_err(|_| Error::InvalidParameter(format!("{what} = {value} is not finite")))
}

/// Runs a sweep: every grid point assembles the exact matrix, rounds it once
/// to doubles and measures the requested condition number. Points run
/// concurrently and are reported in grid order.
pub fn sweep(spec: &SweepSpec) -> Result<SweepResult> {
    let p = spec.degree;
    let k = spec.stab_order;
    if k < 1 || k > p {
        return Err(Error::InvalidParameter(format!(
            "stab order {k} outside 1..={p}"
        )));
    }
    let points: Vec<SweepPoint> = match spec.axis {
        Axis::Rho | Axis::DeltaAbs => {
            let n = spec
                .size
                .ok_or_else(|| Error::InvalidParameter("size n required for this axis".into()))?;
            if n < p + 1 {
                return Err(Error::InvalidParameter(format!(
                    "n={n} too small for p={p}"
                )));
            }
            let elements = n - p + 1;
            let trio = assemble_trio(p, elements, rint(elements as i64), k)?;
            let fixed_rho = spec.rho;
            let fixed_delta = spec.delta.unwrap_or(0.0);
            spec.grid
                .par_iter()
                .map(|&g| -> Result<SweepPoint> {
                    let (rho_f, delta_f) = match spec.axis {
                        Axis::Rho => (g, fixed_delta),
                        _ => (
                            fixed_rho.ok_or_else(|| {
                                Error::InvalidParameter("rho required for delta sweep".into())
                            })?,
                            -g.abs(),
                        ),
                    };
                    if rho_f <= 0.0 {
                        return Err(Error::InvalidParameter(format!(
                            "rho = {rho_f} must be positive"
                        )));
                    }
                    let rho = exact_from(rho_f, "rho")?;
                    let delta = exact_from(delta_f, "delta")?;
                    let mat = combine_system(&trio, &rho, &delta);
                    let outcome = cond(&mat.to_dense_f64(), spec.norm);
                    let mut pt = SweepPoint::from_outcome(g, n, outcome);
                    pt.rho = Some(rho_f);
                    pt.delta = Some(delta_f);
                    Ok(pt)
                })
                .collect::<Result<Vec<_>>>()?
        }
        Axis::MeshSize | Axis::Elements => {
            let t_end = spec.t_end.unwrap_or(1.0);
            let mu_f = spec
                .mu
                .ok_or_else(|| Error::InvalidParameter("mu required for mesh sweeps".into()))?;
            let delta_f = spec.delta.unwrap_or(0.0);
            // Distinct element counts only: nearby mesh sizes that round
            // to the same N would repeat the identical measurement.
            let mut sizes: Vec<(usize, f64)> = Vec::new();
            for &g in &spec.grid {
                let elements = match spec.axis {
                    Axis::MeshSize => (t_end / g).round() as usize,
                    _ => g.round() as usize,
                };
                if sizes.last().map(|(e, _)| *e) != Some(elements) {
                    sizes.push((elements, g));
                }
            }
            sizes
                .par_iter()
                .map(|&(elements, g)| -> Result<SweepPoint> {
                    if elements < 1 {
                        return Err(Error::InvalidParameter("empty mesh".into()));
                    }
                    let t = exact_from(t_end, "T")?;
                    let mu = exact_from(mu_f, "mu")?;
                    let delta = exact_from(delta_f, "delta")?;
                    let mat: ExactMatrix = system_matrix(p, elements, t, &mu, &delta, k)?;
                    let h = to_f64(&mat.meta.mesh_size());
                    let size = mat.n();
                    let outcome = cond(&mat.to_dense_f64(), spec.norm);
                    let parameter = match spec.axis {
                        Axis::MeshSize => h,
                        _ => g,
                    };
                    let mut pt = SweepPoint::from_outcome(parameter, size, outcome);
                    pt.rho = Some(mu_f * h * h);
                    pt.delta = Some(delta_f);
                    pt.mesh_size = Some(h);
                    Ok(pt)
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(SweepResult {
        axis: spec.axis,
        degree: p,
        stab_order: k,
        norm: spec.norm,
        points,
    })
}

fn linspace(a: f64, b: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![a];
    }
    (0..count)
        .map(|i| a + (b - a) * i as f64 / (count as f64 - 1.0))
        .collect()
}

fn logspace(a: f64, b: f64, count: usize) -> Vec<f64> {
    linspace(a.log10(), b.log10(), count)
        .into_iter()
        .map(|x| 10f64.powf(x))
        .collect()
}

/// The published sweep templates, by figure number 4..9. `scale` in (0, 1]
/// shrinks the family sizes for quick runs; 1.0 reproduces the full
/// experiment grids.
pub fn figure_sweeps(figure: u8, scale: f64) -> Result<Vec<SweepSpec>> {
    if !(0.0..=1.0).contains(&scale) || scale == 0.0 {
        return Err(Error::InvalidParameter("scale must be in (0, 1]".into()));
    }
    let shrink = |n: usize, floor: usize| ((n as f64 * scale).round() as usize).max(floor);
    let specs = match figure {
        4 => (1..=3usize)
            .map(|p| SweepSpec {
                degree: p,
                stab_order: p,
                axis: Axis::Rho,
                norm: NormKind::Two,
                grid: linspace(8.0, 13.0, 51),
                size: Some(shrink(1000, 12 * p)),
                rho: None,
                delta: Some(0.0),
                mu: None,
                t_end: None,
            })
            .collect(),
        5 => (4..=5usize)
            .map(|p| SweepSpec {
                degree: p,
                stab_order: p,
                axis: Axis::Rho,
                norm: NormKind::Two,
                grid: linspace(9.84, 9.92, 41),
                size: Some(shrink(2000, 12 * p)),
                rho: None,
                delta: Some(0.0),
                mu: None,
                t_end: None,
            })
            .collect(),
        6 => (1..=3usize)
            .map(|p| SweepSpec {
                degree: p,
                stab_order: p,
                axis: Axis::MeshSize,
                norm: NormKind::Two,
                grid: linspace(0.028, 0.036, 41),
                size: None,
                rho: None,
                delta: Some(0.0),
                mu: Some(10000.0),
                t_end: Some(10.0 * scale.max(0.2)),
            })
            .collect(),
        7 => (1..=6usize)
            .map(|p| SweepSpec {
                degree: p,
                stab_order: p,
                axis: Axis::DeltaAbs,
                norm: NormKind::Two,
                grid: logspace(1e-8, 0.3, 49),
                size: Some(shrink(1000, 12 * p)),
                rho: Some(20000.0),
                delta: None,
                mu: None,
                t_end: None,
            })
            .collect(),
        8 | 9 => {
            let mut specs = Vec::new();
            for p in 1..=6usize {
                let delta = if figure == 9 {
                    to_f64(&penalty_threshold(p, p)?)
                } else {
                    0.0
                };
                let n_cap = ((4096.0 * scale).round() as usize).max(128);
                let grid: Vec<f64> = (7..=12u32)
                    .map(|j| 2f64.powi(j as i32))
                    .filter(|&n| n <= n_cap as f64)
                    .collect();
                specs.push(SweepSpec {
                    degree: p,
                    stab_order: p,
                    axis: Axis::Elements,
                    norm: NormKind::Two,
                    grid,
                    size: None,
                    rho: None,
                    delta: Some(delta),
                    mu: Some(10000.0),
                    t_end: Some(1.0),
                });
            }
            specs
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "no sweep template for figure {other} (have 4..=9)"
            )))
        }
    };
    Ok(specs)
}

pub fn run_figure(figure: u8, scale: f64) -> Result<Vec<SweepResult>> {
    figure_sweeps(figure, scale)?.iter().map(sweep).collect()
}

/// CSV rendering, one row per measured point.
pub fn to_csv(results: &[SweepResult]) -> String {
    let mut out = String::from("p,k,n_or_N,rho,delta,h,norm,kappa,sentinel_flag\n");
    let fmt_opt = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
    for r in results {
        for pt in &r.points {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{:e},{}\n",
                r.degree,
                r.stab_order,
                pt.size,
                fmt_opt(pt.rho),
                fmt_opt(pt.delta),
                fmt_opt(pt.mesh_size),
                r.norm.label(),
                pt.kappa,
                pt.sentinel.unwrap_or("")
            ));
        }
    }
    out
}

/// Minimal SVG line plot of the sweeps: parameter on x, condition number on
/// a log axis, one polyline per sweep; sentinel values are clipped at 1e15
/// and the clipping is displayed rather than hidden.
pub fn to_svg(results: &[SweepResult], title: &str, x_log: bool) -> String {
    const W: f64 = 720.0;
    const H: f64 = 480.0;
    const ML: f64 = 70.0;
    const MR: f64 = 20.0;
    const MT: f64 = 36.0;
    const MB: f64 = 52.0;
    let colors = [
        "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
    ];

    let tx = |v: f64| if x_log { v.log10() } else { v };
    let clip = |k: f64| k.clamp(1e-16, 1e15);

    let mut xs: Vec<f64> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    for r in results {
        for p in &r.points {
            xs.push(tx(p.parameter));
            ys.push(clip(p.kappa).log10());
        }
    }
    if xs.is_empty() {
        return String::from("<svg xmlns=\"http://www.w3.org/2000/svg\"/>");
    }
    let (x0, x1) = xs
        .iter()
        .fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
    let (y0, y1) = ys
        .iter()
        .fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
    let (x0, x1) = if x0 == x1 {
        (x0 - 0.5, x1 + 0.5)
    } else {
        (x0, x1)
    };
    let (y0, y1) = if y0 == y1 {
        (y0 - 0.5, y1 + 0.5)
    } else {
        (y0 - 0.2, y1 + 0.2)
    };
    let px = |x: f64| ML + (x - x0) / (x1 - x0) * (W - ML - MR);
    let py = |y: f64| H - MB - (y - y0) / (y1 - y0) * (H - MT - MB);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
    ));
    svg.push_str(&format!(
        "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">{}</text>\n",
        W / 2.0,
        title
    ));
    svg.push_str(&format!(
        "<rect x=\"{ML}\" y=\"{MT}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
        W - ML - MR,
        H - MT - MB
    ));
    // Decade ticks on the y axis.
    let mut d = y0.ceil() as i64;
    while (d as f64) <= y1 {
        let y = py(d as f64);
        svg.push_str(&format!(
            "<line x1=\"{ML}\" y1=\"{y:.1}\" x2=\"{}\" y2=\"{y:.1}\" stroke=\"#dddddd\"/>\n<text x=\"{}\" y=\"{:.1}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e{d}</text>\n",
            W - MR,
            ML - 6.0,
            y + 4.0
        ));
        d += 1;
    }
    // A few x ticks.
    for i in 0..=4 {
        let xv = x0 + (x1 - x0) * i as f64 / 4.0;
        let x = px(xv);
        let label = if x_log {
            format!("{:.3e}", 10f64.powf(xv))
        } else {
            format!("{xv:.4}")
        };
        svg.push_str(&format!(
            "<text x=\"{x:.1}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">{label}</text>\n",
            H - MB + 18.0
        ));
    }
    for (idx, r) in results.iter().enumerate() {
        let color = colors[idx % colors.len()];
        let path: Vec<String> = r
            .points
            .iter()
            .map(|p| {
                format!(
                    "{:.2},{:.2}",
                    px(tx(p.parameter)),
                    py(clip(p.kappa).log10())
                )
            })
            .collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
            path.join(" ")
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"{color}\">p={}{}</text>\n",
            ML + 10.0,
            MT + 16.0 + 15.0 * idx as f64,
            r.degree,
            if r.stab_order != r.degree { format!(" k={}", r.stab_order) } else { String::new() }
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

//! Exact assembly of the mass, stiffness and derivative Galerkin matrices of
//! maximal-regularity spline spaces, the stabilized system families built
//! from them, structural verification (persymmetry, Toeplitz band rows,
//! corner anomalies), outer codiagonals and the critical parameter where the
//! band width collapses.

use nalgebra::DMatrix;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::cardinal::cardinal_eval;
use crate::error::{Error, Result};
use crate::exact::{decimal_string, format_rational, parse_rational, rint, to_f64, Rational};
use crate::spline_space::{build_basis, SplineBasis};
use crate::toeplitz::BandSpec;

/// Which bilinear form an assembled matrix represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    Mass,
    Stiffness,
    /// Both derivative orders equal to `k`.
    Deriv(usize),
}

impl MatrixKind {
    fn label(&self) -> String {
        match self {
            MatrixKind::Mass => "mass".into(),
            MatrixKind::Stiffness => "stiffness".into(),
            MatrixKind::Deriv(k) => format!("deriv({k})"),
        }
    }

    fn order(&self) -> usize {
        match self {
            MatrixKind::Mass => 0,
            MatrixKind::Stiffness => 1,
            MatrixKind::Deriv(k) => *k,
        }
    }
}

/// Provenance of an assembled matrix; enough to recompute its reference
/// Toeplitz band.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixMeta {
    pub degree: usize,
    pub elements: usize,
    pub t_end: Rational,
    pub kind: String,
    pub stab_order: usize,
    pub mu: Option<Rational>,
    pub rho: Option<Rational>,
    pub delta: Option<Rational>,
}

impl MatrixMeta {
    pub fn mesh_size(&self) -> Rational {
        &self.t_end / rint(self.elements as i64)
    }
}

/// Dense matrix of exact rationals with assembly metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactMatrix {
    n: usize,
    entries: Vec<Rational>,
    pub meta: MatrixMeta,
}

impl ExactMatrix {
    fn zeros(n: usize, meta: MatrixMeta) -> Self {
        ExactMatrix {
            n,
            entries: vec![Rational::zero(); n * n],
            meta,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// 0-based access.
    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.entries[i * self.n + j] = v;
    }

    /// Entry-wise rounding to doubles, the single rounding step between the
    /// exact objects and the floating experiments.
    pub fn to_dense_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| to_f64(self.get(i, j)))
    }

    /// Rectangular block as rows of rationals, 0-based, half-open ranges.
    pub fn block(
        &self,
        rows: std::ops::Range<usize>,
        cols: std::ops::Range<usize>,
    ) -> Vec<Vec<Rational>> {
        rows.map(|i| cols.clone().map(|j| self.get(i, j).clone()).collect())
            .collect()
    }

    /// Matrix Market coordinate export; exact entries rendered as decimal
    /// strings with `sig` significant digits (default 17 at the CLI).
    pub fn to_matrix_market(&self, sig: usize) -> String {
        let mut lines = Vec::new();
        let mut body = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                let v = self.get(i, j);
                if !v.is_zero() {
                    body.push(format!("{} {} {}", i + 1, j + 1, decimal_string(v, sig)));
                }
            }
        }
        lines.push("%%MatrixMarket matrix coordinate real general".to_string());
        lines.push(format!(
            "% {} p={} N={} n={}",
            self.meta.kind, self.meta.degree, self.meta.elements, self.n
        ));
        lines.push(format!("{} {} {}", self.n, self.n, body.len()));
        lines.extend(body);
        lines.join("\n") + "\n"
    }

    /// Exact JSON form, rationals as `num/den` strings.
    pub fn to_json(&self) -> Value {
        let opt = |r: &Option<Rational>| -> Value {
            match r {
                Some(v) => Value::String(format_rational(v)),
                None => Value::Null,
            }
        };
        json!({
            "n": self.n,
            "meta": {
                "degree": self.meta.degree,
                "elements": self.meta.elements,
                "t_end": format_rational(&self.meta.t_end),
                "kind": self.meta.kind,
                "stab_order": self.meta.stab_order,
                "mu": opt(&self.meta.mu),
                "rho": opt(&self.meta.rho),
                "delta": opt(&self.meta.delta),
            },
            "entries": (0..self.n).map(|i| {
                (0..self.n).map(|j| format_rational(self.get(i, j))).collect::<Vec<_>>()
            }).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<ExactMatrix> {
        let bad = |m: &str| Error::InvalidParameter(format!("matrix json: {m}"));
        let n = v["n"].as_u64().ok_or_else(|| bad("missing n"))? as usize;
        let meta = &v["meta"];
        let opt = |field: &Value| -> Result<Option<Rational>> {
            match field {
                Value::Null => Ok(None),
                Value::String(s) => Ok(Some(parse_rational(s)?)),
                _ => Err(bad("expected rational string")),
            }
        };
        let meta = MatrixMeta {
            degree: meta["degree"].as_u64().ok_or_else(|| bad("degree"))? as usize,
            elements: meta["elements"].as_u64().ok_or_else(|| bad("elements"))? as usize,
            t_end: parse_rational(meta["t_end"].as_str().ok_or_else(|| bad("t_end"))?)?,
            kind: meta["kind"]
                .as_str()
                .ok_or_else(|| bad("kind"))?
                .to_string(),
            stab_order: meta["stab_order"]
                .as_u64()
                .ok_or_else(|| bad("stab_order"))? as usize,
            mu: opt(&meta["mu"])?,
            rho: opt(&meta["rho"])?,
            delta: opt(&meta["delta"])?,
        };
        let rows = v["entries"].as_array().ok_or_else(|| bad("entries"))?;
        if rows.len() != n {
            return Err(bad("row count"));
        }
        let mut out = ExactMatrix::zeros(n, meta);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_array().ok_or_else(|| bad("row"))?;
            if row.len() != n {
                return Err(bad("column count"));
            }
            for (j, cell) in row.iter().enumerate() {
                out.set(
                    i,
                    j,
                    parse_rational(cell.as_str().ok_or_else(|| bad("cell"))?)?,
                );
            }
        }
        Ok(out)
    }
}

/// Assembles one of the three matrices of the discrete bilinear form: entry
/// `[l, j]` (1-based) is the inner product of the j-th trial function with
/// the (l-1)-th test function, derivative order fixed by `kind`.
pub fn assemble(
    p: usize,
    elements: usize,
    t_end: Rational,
    kind: MatrixKind,
) -> Result<ExactMatrix> {
    let basis = build_basis(p, elements, t_end.clone())?;
    assemble_with_basis(&basis, kind)
}

fn assemble_with_basis(basis: &SplineBasis, kind: MatrixKind) -> Result<ExactMatrix> {
    let p = basis.degree();
    let k = kind.order();
    if k > p {
        return Err(Error::DerivativeOrder {
            order: k,
            degree: p,
        });
    }
    let elements = basis.knot_vector.elements;
    let n = elements + p - 1;
    let meta = MatrixMeta {
        degree: p,
        elements,
        t_end: basis.knot_vector.t_end.clone(),
        kind: kind.label(),
        stab_order: k,
        mu: None,
        rho: None,
        delta: None,
    };
    let mut out = ExactMatrix::zeros(n, meta);
    for row in 0..n {
        // Trial index is col+1, test index is row; supports overlap only for
        // |col + 1 - row| <= p.
        let lo = row.saturating_sub(p + 1);
        let hi = (row + p).min(n);
        for col in lo..hi {
            let v = basis.inner(col + 1, row, k, k)?;
            out.set(row, col, v);
        }
    }
    Ok(out)
}

/// Mass, stiffness and order-k derivative matrices over a single basis build.
pub fn assemble_trio(
    p: usize,
    elements: usize,
    t_end: Rational,
    k: usize,
) -> Result<(ExactMatrix, ExactMatrix, ExactMatrix)> {
    let basis = build_basis(p, elements, t_end)?;
    Ok((
        assemble_with_basis(&basis, MatrixKind::Mass)?,
        assemble_with_basis(&basis, MatrixKind::Stiffness)?,
        assemble_with_basis(&basis, MatrixKind::Deriv(k))?,
    ))
}

/// `-B + mu M + mu delta h^{2k} D` from an already assembled trio.
pub fn combine_system(
    trio: &(ExactMatrix, ExactMatrix, ExactMatrix),
    mu: &Rational,
    delta: &Rational,
) -> ExactMatrix {
    let (mass, stiffness, deriv) = trio;
    let k = deriv.meta.stab_order;
    let h = mass.meta.mesh_size();
    let mut hk = Rational::one();
    for _ in 0..2 * k {
        hk *= &h;
    }
    let w_d = mu * delta * hk;
    let n = mass.n;
    let mut meta = mass.meta.clone();
    meta.kind = "system".into();
    meta.stab_order = k;
    meta.mu = Some(mu.clone());
    meta.delta = Some(delta.clone());
    let mut out = ExactMatrix::zeros(n, meta);
    let p = mass.meta.degree;
    for i in 0..n {
        // Trial/test support disjointness keeps every kind inside the
        // offsets [-(p+1), p-1].
        let lo = i.saturating_sub(p + 1);
        let hi = (i + p).min(n);
        for j in lo..hi {
            let v = -stiffness.get(i, j) + mu * mass.get(i, j) + &w_d * deriv.get(i, j);
            if !v.is_zero() {
                out.set(i, j, v);
            }
        }
    }
    out
}

/// The stabilized system matrix `K_{mu,h}(delta)` with stabilization order k.
pub fn system_matrix(
    p: usize,
    elements: usize,
    t_end: Rational,
    mu: &Rational,
    delta: &Rational,
    k: usize,
) -> Result<ExactMatrix> {
    if !mu.is_positive() {
        return Err(Error::InvalidParameter("mu must be positive".into()));
    }
    if delta.is_positive() {
        return Err(Error::InvalidParameter("delta must be <= 0".into()));
    }
    if k < 1 || k > p {
        return Err(Error::InvalidParameter(format!(
            "stabilization order k={k} outside 1..=p={p}"
        )));
    }
    let trio = assemble_trio(p, elements, t_end, k)?;
    Ok(combine_system(&trio, mu, delta))
}

/// The h-scaled family member `K_n(rho, delta)`: mesh-independent, built here
/// with h = 1 and mu = rho (any split of rho = mu h^2 gives the same matrix).
pub fn scaled_system(
    p: usize,
    n: usize,
    rho: &Rational,
    delta: &Rational,
    k: usize,
) -> Result<ExactMatrix> {
    if n < p + 1 {
        return Err(Error::InvalidParameter(format!(
            "n={n} too small for p={p}"
        )));
    }
    if !rho.is_positive() {
        return Err(Error::InvalidParameter("rho must be positive".into()));
    }
    let elements = n - p + 1;
    let mut out = system_matrix(p, elements, rint(elements as i64), rho, delta, k)?;
    out.meta.kind = "scaled".into();
    out.meta.rho = Some(rho.clone());
    out.meta.mu = None;
    Ok(out)
}

/// Band value of the scaled system at offset distance `j` from the first
/// lower codiagonal: `d2 Phi_{2p+1}(p+1-j) + rho (Phi + delta (-1)^k d^{2k} Phi)`.
pub fn scaled_band_value(
    p: usize,
    rho: &Rational,
    delta: &Rational,
    k: usize,
    j: usize,
) -> Result<Rational> {
    let arg = rint(p as i64 + 1 - j as i64);
    let d2 = cardinal_eval(2 * p + 1, 2, &arg)?;
    let mass = cardinal_eval(2 * p + 1, 0, &arg)?;
    let dk = cardinal_eval(2 * p + 1, 2 * k, &arg)?;
    let sign = if k % 2 == 1 {
        -Rational::one()
    } else {
        Rational::one()
    };
    Ok(d2 + rho * (mass + delta * sign * dk))
}

/// The pure Toeplitz band of the scaled system family as a `BandSpec`
/// (lower bandwidth p+1, upper p-1); outer coefficients that vanish, as at
/// the critical parameter, are trimmed by the `BandSpec` constructor.
pub fn toeplitz_band(p: usize, rho: &Rational, delta: &Rational, k: usize) -> Result<BandSpec> {
    let mut coeffs = Vec::with_capacity(2 * p + 1);
    for offset in -(p as i64 + 1)..=(p as i64 - 1) {
        let j = (offset + 1).unsigned_abs() as usize;
        coeffs.push(scaled_band_value(p, rho, delta, k, j)?);
    }
    BandSpec::new(p + 1, p - 1, coeffs)
}

/// Structural report of an assembled matrix against its reference band.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureReport {
    pub is_persymmetric: bool,
    /// 1-based inclusive row range of purely Toeplitz rows, empty if N < 3p+1.
    pub band_rows_range: Option<(usize, usize)>,
    /// Whether all rows in that range match the reference band exactly.
    pub band_rows_match: bool,
    pub corner_anomaly_count: usize,
    pub outer_codiagonal_nonzero: bool,
    /// (max lower offset, max upper offset) over all nonzero entries.
    pub effective_band: (usize, usize),
}

/// Reference band value for offset distance `j` in [0, p], scaled per kind.
fn reference_band_value(meta: &MatrixMeta, j: usize) -> Result<Rational> {
    let p = meta.degree;
    let h = meta.mesh_size();
    let arg = rint(p as i64 + 1 - j as i64);
    let phi = |order: usize| cardinal_eval(2 * p + 1, order, &arg);
    let pow_h = |e: i64| -> Rational {
        let mut v = Rational::one();
        for _ in 0..e.unsigned_abs() {
            v *= &h;
        }
        if e < 0 {
            Rational::one() / v
        } else {
            v
        }
    };
    let k = meta.stab_order;
    let sign_k = if k % 2 == 1 {
        -Rational::one()
    } else {
        Rational::one()
    };
    match meta.kind.as_str() {
        "mass" => Ok(&h * phi(0)?),
        "stiffness" => Ok(-pow_h(-1) * phi(2)?),
        s if s.starts_with("deriv") => Ok(pow_h(1 - 2 * k as i64) * sign_k * phi(2 * k)?),
        "system" => {
            let mu = meta
                .mu
                .clone()
                .ok_or_else(|| Error::Consistency("system without mu".into()))?;
            let delta = meta.delta.clone().unwrap_or_else(Rational::zero);
            Ok(pow_h(-1) * (phi(2)? + mu * &h * &h * (phi(0)? + delta * sign_k * phi(2 * k)?)))
        }
        "scaled" => {
            let rho = meta
                .rho
                .clone()
                .ok_or_else(|| Error::Consistency("scaled without rho".into()))?;
            let delta = meta.delta.clone().unwrap_or_else(Rational::zero);
            Ok(phi(2)? + rho * (phi(0)? + delta * sign_k * phi(2 * k)?))
        }
        other => Err(Error::InvalidParameter(format!("unknown kind {other}"))),
    }
}

/// Verifies persymmetry, locates and checks the Toeplitz band rows, counts
/// corner anomalies and checks the outer codiagonals needed by the perturbed
/// family theory. Failures are carried in the report, not raised.
pub fn structure_report(mat: &ExactMatrix) -> Result<StructureReport> {
    let n = mat.n;
    let p = mat.meta.degree;
    let big_n = mat.meta.elements;

    let mut is_persymmetric = true;
    'outer: for i in 0..n {
        for j in 0..n {
            if mat.get(i, j) != mat.get(n - 1 - j, n - 1 - i) {
                is_persymmetric = false;
                break 'outer;
            }
        }
    }

    let band: Vec<Rational> = (0..=p)
        .map(|j| reference_band_value(&mat.meta, j))
        .collect::<Result<_>>()?;
    // Entry at (i, j) follows the band iff its offset j-i lies in
    // [-(p+1), p-1]; the band is centered on the first lower codiagonal.
    let reference = |i: usize, j: usize| -> Rational {
        let o = j as i64 - i as i64;
        if o < -(p as i64 + 1) || o > p as i64 - 1 {
            Rational::zero()
        } else {
            band[(o + 1).unsigned_abs() as usize].clone()
        }
    };

    let band_rows_range = if big_n > 3 * p {
        Some((2 * p + 1, big_n - p))
    } else {
        None
    };
    let mut band_rows_match = true;
    if let Some((first, last)) = band_rows_range {
        for row in first..=last {
            let i = row - 1;
            for j in 0..n {
                if *mat.get(i, j) != reference(i, j) {
                    band_rows_match = false;
                }
            }
        }
    }

    let corner = 2 * p.min(n);
    let mut corner_anomaly_count = 0;
    for i in 0..corner {
        for j in 0..corner {
            if *mat.get(i, j) != reference(i, j) {
                corner_anomaly_count += 1;
            }
        }
    }

    let mut effective_lower = 0usize;
    let mut effective_upper = 0usize;
    for i in 0..n {
        for j in 0..n {
            if !mat.get(i, j).is_zero() {
                if i > j {
                    effective_lower = effective_lower.max(i - j);
                } else {
                    effective_upper = effective_upper.max(j - i);
                }
            }
        }
    }

    let mut outer_codiagonal_nonzero = true;
    for i in 0..n {
        let upper = i as i64 + p as i64 - 1;
        if (0..n as i64).contains(&upper) && mat.get(i, upper as usize).is_zero() {
            outer_codiagonal_nonzero = false;
        }
        let lower = i as i64 - (p as i64 + 1);
        if (0..n as i64).contains(&lower) && mat.get(i, lower as usize).is_zero() {
            outer_codiagonal_nonzero = false;
        }
    }

    Ok(StructureReport {
        is_persymmetric,
        band_rows_range,
        band_rows_match,
        corner_anomaly_count,
        outer_codiagonal_nonzero,
        effective_band: (effective_lower, effective_upper),
    })
}

/// Cached mass/stiffness/derivative trio used by the codiagonal probes; the
/// probe size depends only on the degree.
fn codiag_trio(p: usize) -> Result<std::sync::Arc<(ExactMatrix, ExactMatrix, ExactMatrix)>> {
    use std::collections::HashMap;
    use std::sync::{Arc, Mutex, OnceLock};
    type TrioCache = Mutex<HashMap<usize, Arc<(ExactMatrix, ExactMatrix, ExactMatrix)>>>;
    static CACHE: OnceLock<TrioCache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&p) {
        return Ok(hit.clone());
    }
    let n = 4 * p + 6;
    let elements = n - p + 1;
    let trio = Arc::new(assemble_trio(p, elements, rint(elements as i64), p)?);
    cache.lock().unwrap().insert(p, trio.clone());
    Ok(trio)
}

/// Leading entries of the two outermost codiagonals of the scaled system:
/// the first p+1 entries of the (p-1)-th codiagonal and the first p+2 of the
/// (p-2)-th, the quantities tabulated per degree in the verification of the
/// perturbed-family hypothesis.
pub fn outer_codiagonals(
    p: usize,
    rho: &Rational,
    delta: &Rational,
) -> Result<(Vec<Rational>, Vec<Rational>)> {
    if !(2..=8).contains(&p) {
        return Err(Error::UnsupportedDegree(p));
    }
    if !rho.is_positive() {
        return Err(Error::InvalidParameter("rho must be positive".into()));
    }
    let trio = codiag_trio(p)?;
    let mat = combine_system(&trio, rho, delta);
    let star = (0..=p).map(|i| mat.get(i, i + p - 1).clone()).collect();
    let hash = (0..=p + 1).map(|i| mat.get(i, i + p - 2).clone()).collect();
    Ok((star, hash))
}

/// Affine representation `value = a + rho * b + rho * delta * c` of every
/// codiagonal entry returned by [`outer_codiagonals`]; exact in (rho, delta).
#[derive(Debug, Clone)]
pub struct CodiagonalAffine {
    pub star: Vec<(Rational, Rational, Rational)>,
    pub hash: Vec<(Rational, Rational, Rational)>,
}

impl CodiagonalAffine {
    pub fn eval_star(&self, i: usize, rho: &Rational, delta: &Rational) -> Rational {
        let (a, b, c) = &self.star[i];
        a + rho * b + rho * delta * c
    }

    pub fn eval_hash(&self, i: usize, rho: &Rational, delta: &Rational) -> Rational {
        let (a, b, c) = &self.hash[i];
        a + rho * b + rho * delta * c
    }
}

pub fn codiagonal_affine(p: usize) -> Result<CodiagonalAffine> {
    if !(2..=8).contains(&p) {
        return Err(Error::UnsupportedDegree(p));
    }
    let trio = codiag_trio(p)?;
    let (mass, stiffness, deriv) = (&trio.0, &trio.1, &trio.2);
    let collect = |offset: usize, count: usize| -> Vec<(Rational, Rational, Rational)> {
        (0..count)
            .map(|i| {
                (
                    -stiffness.get(i, i + offset),
                    mass.get(i, i + offset).clone(),
                    deriv.get(i, i + offset).clone(),
                )
            })
            .collect()
    };
    Ok(CodiagonalAffine {
        star: collect(p - 1, p + 1),
        hash: collect(p - 2, p + 2),
    })
}

/// The single positive parameter at which all leading (p-1)-codiagonal
/// entries vanish; exists only for even p and sufficiently negative delta.
pub fn critical_rho(p: usize, delta: &Rational) -> Result<Option<Rational>> {
    if !(2..=8).contains(&p) {
        return Err(Error::UnsupportedDegree(p));
    }
    if p % 2 == 1 {
        return Ok(None);
    }
    let affine = codiagonal_affine(p)?;
    let (a, b, c) = &affine.star[0];
    let denom = b + delta * c;
    if denom.is_negative() {
        Ok(Some(-a / denom))
    } else {
        Ok(None)
    }
}

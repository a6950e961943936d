//! Conditioning classification of (perturbed) Toeplitz band families: the
//! associated polynomial and its root-type triple, the Chebyshev transform of
//! self-reciprocal polynomials with exact Sturm root counting, boundary
//! products, verdict transfer to corner-perturbed families, and the Casorati
//! coupling matrix whose rank decides nonsingularity of a perturbed family.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{rint, to_f64, Rational};
use crate::poly::{count_roots_in, RatPoly};

/// Toeplitz band data `c_{-m}, ..., c_k` with nonzero outer coefficients.
/// The constructor trims vanished outer coefficients, shrinking the
/// bandwidths, so families sitting at a band-collapse parameter are
/// represented by their true reduced band.
#[derive(Debug, Clone, PartialEq)]
pub struct BandSpec {
    m: usize,
    k: usize,
    coeffs: Vec<Rational>,
}

impl BandSpec {
    pub fn new(m: usize, k: usize, coeffs: Vec<Rational>) -> Result<Self> {
        if coeffs.len() != m + k + 1 {
            return Err(Error::InvalidBand(format!(
                "expected {} coefficients for bandwidths ({m}, {k}), got {}",
                m + k + 1,
                coeffs.len()
            )));
        }
        let lead = coeffs.iter().take_while(|c| c.is_zero()).count();
        let trail = coeffs.iter().rev().take_while(|c| c.is_zero()).count();
        if lead == coeffs.len() {
            return Err(Error::InvalidBand("all band coefficients vanish".into()));
        }
        if lead > m || trail > k {
            return Err(Error::InvalidBand(
                "band does not reach the main diagonal".into(),
            ));
        }
        Ok(BandSpec {
            m: m - lead,
            k: k - trail,
            coeffs: coeffs[lead..coeffs.len() - trail].to_vec(),
        })
    }

    pub fn lower(&self) -> usize {
        self.m
    }

    pub fn upper(&self) -> usize {
        self.k
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient at diagonal offset `o` (column minus row), zero outside.
    pub fn coeff_at(&self, o: i64) -> Rational {
        let idx = o + self.m as i64;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            Rational::zero()
        } else {
            self.coeffs[idx as usize].clone()
        }
    }

    pub fn is_palindromic(&self) -> bool {
        let n = self.coeffs.len();
        (0..n / 2).all(|i| self.coeffs[i] == self.coeffs[n - 1 - i])
    }

    /// Reversed band, the transposed family.
    pub fn transposed(&self) -> BandSpec {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        BandSpec {
            m: self.k,
            k: self.m,
            coeffs,
        }
    }

    /// Dense n-by-n member of the unperturbed family, rounded to doubles.
    pub fn dense_f64(&self, n: usize) -> DMatrix<f64> {
        DMatrix::from_fn(n, n, |i, j| {
            let o = j as i64 - i as i64;
            to_f64(&self.coeff_at(o))
        })
    }
}

/// The polynomial `q(z) = sum_j c_j z^(m+j)` attached to a band family; its
/// root moduli relative to the unit circle govern the conditioning.
#[derive(Debug, Clone, PartialEq)]
pub struct AssociatedPolynomial {
    pub coeffs: Vec<Rational>,
    pub lower: usize,
    pub upper: usize,
}

pub fn assoc_poly(spec: &BandSpec) -> AssociatedPolynomial {
    AssociatedPolynomial {
        coeffs: spec.coeffs.clone(),
        lower: spec.m,
        upper: spec.k,
    }
}

impl AssociatedPolynomial {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn to_poly(&self) -> RatPoly {
        RatPoly::new(self.coeffs.clone())
    }
}

/// Root counts (inside, on, outside the unit circle) with the highest
/// multiplicity among unit-modulus roots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TypeTriple {
    pub inside: usize,
    pub unit: usize,
    pub outside: usize,
    pub max_unit_multiplicity: usize,
}

/// Floating root classification: roots from the companion-matrix
/// eigenvalues, multiplicities merged by clustering, unit-circle membership
/// decided within `unit_tol`.
#[derive(Debug, Clone)]
pub struct RootClassification {
    pub triple: TypeTriple,
    /// Cluster representatives with multiplicities, ascending modulus.
    pub clusters: Vec<(Complex64, usize)>,
    pub unit_tol: f64,
}

/// Roots of an exact polynomial through the companion matrix, no
/// clustering; intended for square-free polynomials.
fn poly_roots_f64(poly: &RatPoly) -> Result<Vec<Complex64>> {
    let deg = match poly.degree() {
        Some(d) if d >= 1 => d,
        _ => return Ok(Vec::new()),
    };
    let c: Vec<f64> = poly.coeffs().iter().map(to_f64).collect();
    let lead = c[deg];
    let companion = DMatrix::<f64>::from_fn(deg, deg, |i, j| {
        if j == deg - 1 {
            -c[i] / lead
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let eigen = companion.complex_eigenvalues();
    for z in eigen.iter() {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::RootFinding(
                "companion eigenvalues did not converge".into(),
            ));
        }
    }
    Ok(eigen.iter().copied().collect())
}

pub fn classify_roots(
    q: &AssociatedPolynomial,
    unit_tol: Option<f64>,
) -> Result<RootClassification> {
    let deg = q.degree();
    if deg < 1 {
        return Err(Error::InvalidParameter(
            "constant polynomial has no roots".into(),
        ));
    }
    let c: Vec<f64> = q.coeffs.iter().map(to_f64).collect();
    let lead = c[deg];
    if lead == 0.0 || c[0] == 0.0 {
        return Err(Error::InvalidBand(
            "outer coefficients must not vanish".into(),
        ));
    }
    let max_ratio = c.iter().map(|v| (v / c[0]).abs()).fold(0.0f64, f64::max);
    let tol = unit_tol.unwrap_or(1e-8 * (1.0 + max_ratio));

    let companion = DMatrix::<f64>::from_fn(deg, deg, |i, j| {
        if j == deg - 1 {
            -c[i] / lead
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let eigen = companion.complex_eigenvalues();
    for z in eigen.iter() {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::RootFinding(
                "companion eigenvalues did not converge".into(),
            ));
        }
    }

    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    'roots: for z in eigen.iter() {
        for (center, count) in clusters.iter_mut() {
            if (z - *center).norm() <= tol * (1.0 + center.norm()) {
                // Running mean keeps the representative centered.
                *center = (*center * (*count as f64) + z) / (*count as f64 + 1.0);
                *count += 1;
                continue 'roots;
            }
        }
        clusters.push((*z, 1));
    }
    clusters.sort_by(|a, b| a.0.norm().partial_cmp(&b.0.norm()).unwrap());

    let mut triple = TypeTriple {
        inside: 0,
        unit: 0,
        outside: 0,
        max_unit_multiplicity: 0,
    };
    for (z, count) in &clusters {
        let r = z.norm();
        if (r - 1.0).abs() <= tol {
            triple.unit += count;
            triple.max_unit_multiplicity = triple.max_unit_multiplicity.max(*count);
        } else if r < 1.0 {
            triple.inside += count;
        } else {
            triple.outside += count;
        }
    }
    debug_assert_eq!(triple.inside + triple.unit + triple.outside, deg);
    Ok(RootClassification {
        triple,
        clusters,
        unit_tol: tol,
    })
}

/// Conditioning class of a Toeplitz band family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConditioningClass {
    /// Condition numbers uniformly bounded in n.
    Well,
    /// Condition numbers grow at most like n^eta.
    Weak(usize),
    /// Condition numbers grow faster than any fixed power of n.
    Exponential,
}

impl std::fmt::Display for ConditioningClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConditioningClass::Well => write!(f, "well-conditioned"),
            ConditioningClass::Weak(eta) => write!(f, "weakly well-conditioned(eta={eta})"),
            ConditioningClass::Exponential => write!(f, "exponentially ill-conditioned"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditioningVerdict {
    pub class: ConditioningClass,
    pub evidence: TypeTriple,
}

/// Verdict from the root-type triple for a band with bandwidths (m, k):
/// well for type (m, 0, k); weakly well-conditioned when unit roots exist
/// and the off-circle counts split as (m1, m2, k) or (m, k1, k2);
/// exponential when the split matches neither side. A family whose roots lie
/// entirely on the unit circle is classified by the polynomial bound n^eta,
/// the behaviour the classical symmetric tridiagonal family exhibits.
pub fn conditioning_verdict(t: &TypeTriple, m: usize, k: usize) -> ConditioningVerdict {
    let class = if (t.inside, t.unit, t.outside) == (m, 0, k) {
        ConditioningClass::Well
    } else if t.unit > 0 && (t.outside == k || t.inside == m) {
        ConditioningClass::Weak(t.max_unit_multiplicity)
    } else if t.inside + t.outside > 0 && t.inside != m && t.outside != k {
        ConditioningClass::Exponential
    } else {
        ConditioningClass::Weak(t.max_unit_multiplicity)
    };
    ConditioningVerdict {
        class,
        evidence: *t,
    }
}

/// Self-reciprocal (palindromic) polynomial of even degree 2p, stored as the
/// half vector `g_0..g_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfReciprocalPolynomial {
    half: Vec<Rational>,
}

impl SelfReciprocalPolynomial {
    pub fn from_half(half: Vec<Rational>) -> Result<Self> {
        if half.is_empty() || half[0].is_zero() {
            return Err(Error::InvalidBand(
                "leading coefficient g_0 must not vanish".into(),
            ));
        }
        Ok(SelfReciprocalPolynomial { half })
    }

    pub fn from_full(coeffs: &[Rational]) -> Result<Self> {
        if coeffs.len().is_multiple_of(2) {
            return Err(Error::InvalidBand(
                "self-reciprocal polynomial must have even degree".into(),
            ));
        }
        let n = coeffs.len();
        for i in 0..n / 2 {
            if coeffs[i] != coeffs[n - 1 - i] {
                return Err(Error::InvalidBand(format!(
                    "coefficient {i} breaks the palindrome"
                )));
            }
        }
        Self::from_half(coeffs[..=n / 2].to_vec())
    }

    pub fn from_band(spec: &BandSpec) -> Result<Self> {
        if !spec.is_palindromic() {
            return Err(Error::InvalidBand(
                "band coefficients are not palindromic".into(),
            ));
        }
        Self::from_full(spec.coeffs())
    }

    /// p, half of the degree.
    pub fn half_degree(&self) -> usize {
        self.half.len() - 1
    }

    pub fn g(&self, j: usize) -> &Rational {
        &self.half[j]
    }

    pub fn to_poly(&self) -> RatPoly {
        let p = self.half_degree();
        let mut coeffs = vec![Rational::zero(); 2 * p + 1];
        for (j, g) in self.half.iter().enumerate() {
            coeffs[j] = g.clone();
            coeffs[2 * p - j] = g.clone();
        }
        RatPoly::new(coeffs)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.to_poly().eval(x)
    }
}

/// Chebyshev transform: the degree-p polynomial with
/// `T q(z + 1/z) = q(z) / z^p`, with exact rational coefficients; its leading
/// coefficient equals g_0.
pub fn chebyshev_transform(q: &SelfReciprocalPolynomial) -> RatPoly {
    let p = q.half_degree();
    // u_j(x) = 2 T_j(x/2): u_0 = 2, u_1 = x, u_{j+1} = x u_j - u_{j-1}.
    let mut u_prev = RatPoly::constant(rint(2));
    let mut u_cur = RatPoly::identity();
    let mut table = vec![u_prev.clone()];
    if p >= 1 {
        table.push(u_cur.clone());
        for _ in 2..=p {
            let next = RatPoly::identity().mul(&u_cur).sub(&u_prev);
            u_prev = u_cur;
            u_cur = next;
            table.push(u_cur.clone());
        }
    }
    let mut out = RatPoly::constant(q.g(p).clone());
    for j in 0..p {
        out = out.add(&table[p - j].scale(q.g(j)));
    }
    debug_assert_eq!(out.leading(), Some(q.g(0)));
    out
}

/// Distinct real roots in the closed interval [a, b] by exact Sturm
/// sequences; endpoint roots are counted.
pub fn count_roots_interval(poly: &RatPoly, a: &Rational, b: &Rational) -> Result<usize> {
    count_roots_in(poly, a, b)
}

/// `prod (x_j - 2)`, `prod (x_j + 2)` over the Chebyshev-transform roots, and
/// the necessary condition `(-1)^p q(-1) q(1) <= 0` for weak
/// well-conditioning, all evaluated exactly from q alone.
pub fn boundary_products(q: &SelfReciprocalPolynomial) -> (Rational, Rational, bool) {
    let p = q.half_degree();
    let q1 = q.eval(&Rational::one());
    let qm1 = q.eval(&-Rational::one());
    let sign = if p % 2 == 1 {
        -Rational::one()
    } else {
        Rational::one()
    };
    let prod_minus = &sign * &q1 / q.g(0);
    let prod_plus = &qm1 / q.g(0);
    let necessary = !(sign * &qm1 * &q1).is_positive();
    (prod_minus, prod_plus, necessary)
}

/// Checks the corner-perturbation hypothesis on one block: every entry of
/// the k-th upper and (-m)-th lower codiagonals inside the block must be
/// nonzero. Returns the offending position on failure.
fn check_block_codiagonals(
    block: &[Vec<Rational>],
    m: usize,
    k: usize,
) -> std::result::Result<(), (usize, usize)> {
    for i in 0..m {
        if block[i][i + k].is_zero() {
            return Err((i, i + k));
        }
    }
    for i in m..m + k {
        if block[i][i - m].is_zero() {
            return Err((i, i - m));
        }
    }
    Ok(())
}

/// Verdict transfer to a corner-perturbed family: with (m+k)-square corner
/// blocks whose outer codiagonal entries are all nonzero, the perturbed
/// family inherits the conditioning of the unperturbed band family. Callers
/// assert per-instance nonsingularity themselves.
pub fn classify_family(
    spec: &BandSpec,
    top_left: &[Vec<Rational>],
    bottom_right: &[Vec<Rational>],
) -> Result<ConditioningVerdict> {
    let mk = spec.m + spec.k;
    for (name, block) in [("top-left", top_left), ("bottom-right", bottom_right)] {
        if block.len() != mk || block.iter().any(|row| row.len() != mk) {
            return Err(Error::InvalidParameter(format!(
                "{name} perturbation block must be {mk}x{mk}"
            )));
        }
        if let Err((i, j)) = check_block_codiagonals(block, spec.m, spec.k) {
            return Err(Error::HypothesisViolated(format!(
                "zero entry on an outer codiagonal of the {name} block at ({i}, {j})"
            )));
        }
    }
    let rc = classify_roots(&assoc_poly(spec), None)?;
    Ok(conditioning_verdict(&rc.triple, spec.m, spec.k))
}

/// Classification of the scaled spline system family at (rho, delta) with
/// stabilization order `stab`: band construction (reduced automatically at a
/// band-collapse parameter, which re-checks the next codiagonal), corner
/// hypothesis check, the exact Sturm route on the Chebyshev transform, and
/// the floating root-type route as cross-check.
#[derive(Debug, Clone)]
pub struct FamilyClassification {
    pub verdict: ConditioningVerdict,
    pub band: BandSpec,
    /// True when outer band coefficients vanished and the band was reduced.
    pub band_reduced: bool,
    /// Distinct Chebyshev-transform roots in [-2, 2] (exact route).
    pub sturm_interval_roots: usize,
    pub floating: RootClassification,
    pub routes_agree: bool,
}

pub fn classify_scaled_family(
    p: usize,
    rho: &Rational,
    delta: &Rational,
    stab: usize,
) -> Result<FamilyClassification> {
    let band = crate::galerkin::toeplitz_band(p, rho, delta, stab)?;
    let band_reduced = band.lower() < p + 1;
    let mk = band.lower() + band.upper();

    let n0 = (2 * mk + 2).max(4 * p + 6);
    let mat = crate::galerkin::scaled_system(p, n0, rho, delta, stab)?;
    let n = mat.n();
    let tl = mat.block(0..mk, 0..mk);
    let br = mat.block(n - mk..n, n - mk..n);
    for (name, block) in [("top-left", &tl), ("bottom-right", &br)] {
        if let Err((i, j)) = check_block_codiagonals(block, band.lower(), band.upper()) {
            return Err(Error::HypothesisViolated(format!(
                "zero entry on an outer codiagonal of the {name} corner at ({i}, {j}) \
                 after band reduction to ({}, {})",
                band.lower(),
                band.upper()
            )));
        }
    }

    let q = assoc_poly(&band);
    let floating = classify_roots(&q, None)?;

    let sr = SelfReciprocalPolynomial::from_band(&band)?;
    let cheb = chebyshev_transform(&sr);
    let sturm_interval_roots = count_roots_interval(&cheb, &rint(-2), &rint(2))?;

    // Each distinct transform root in [-2, 2] lifts to a unit-circle pair;
    // simple transform roots at the endpoints lift to double roots at +-1.
    let half = sr.half_degree();
    let (unit, eta) = match sturm_interval_roots {
        0 => (0usize, 0usize),
        1 => {
            let endpoint =
                sr.eval(&Rational::one()).is_zero() || sr.eval(&-Rational::one()).is_zero();
            (2, if endpoint { 2 } else { 1 })
        }
        _ => (floating.triple.unit, floating.triple.max_unit_multiplicity),
    };
    let off = half
        .checked_sub(unit / 2)
        .ok_or_else(|| Error::Consistency("unit root count exceeds polynomial degree".into()))?;
    let triple = TypeTriple {
        inside: off,
        unit,
        outside: off,
        max_unit_multiplicity: eta,
    };
    let verdict = conditioning_verdict(&triple, band.lower(), band.upper());
    let routes_agree = floating.triple == triple;

    Ok(FamilyClassification {
        verdict,
        band,
        band_reduced,
        sturm_interval_roots,
        floating,
        routes_agree,
    })
}

/// Dense member of a corner-perturbed band family, entries rounded once.
pub fn dense_perturbed_f64(
    spec: &BandSpec,
    top_left: &[Vec<Rational>],
    bottom_right: &[Vec<Rational>],
    n: usize,
) -> Result<DMatrix<f64>> {
    let mk = spec.m + spec.k;
    if n < 2 * mk {
        return Err(Error::InvalidParameter(format!(
            "n={n} below 2(m+k)={}",
            2 * mk
        )));
    }
    let mut a = spec.dense_f64(n);
    for i in 0..mk {
        for j in 0..mk {
            a[(i, j)] = to_f64(&top_left[i][j]);
            a[(n - mk + i, n - mk + j)] = to_f64(&bottom_right[i][j]);
        }
    }
    Ok(a)
}

/// The coupling matrix and its numerical rank; rank deficiency certifies
/// that the perturbed family members become singular for large n.
#[derive(Debug, Clone)]
pub struct CouplingReport {
    pub matrix: DMatrix<f64>,
    pub singular_values: Vec<f64>,
    pub rank: usize,
    pub full_rank: bool,
    /// Whether the computation ran on the transposed family.
    pub transposed: bool,
}

/// Builds the coupling matrix `(W^-1)[m+1..m+k, :] Y2^-1 Y1` from the band
/// and the top-left perturbation block. The perturbation must be confined to
/// the first k columns, directly or after transposition. The fundamental
/// system behind the Casorati matrix W is `1^T Z^j` with Z carrying a Jordan
/// block per double root; roots of multiplicity three or more are refused.
pub fn casorati_coupling(spec: &BandSpec, top_left: &[Vec<Rational>]) -> Result<CouplingReport> {
    let mk = spec.m + spec.k;
    if top_left.len() != mk || top_left.iter().any(|r| r.len() != mk) {
        return Err(Error::InvalidParameter(format!(
            "top-left block must be {mk}x{mk}"
        )));
    }

    let confined = |band: &BandSpec, block: &[Vec<Rational>]| -> bool {
        for (i, row) in block.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if j >= band.k && *v != band.coeff_at(j as i64 - i as i64) {
                    return false;
                }
            }
        }
        true
    };

    let (band, block, transposed) = if spec.k > 0 && confined(spec, top_left) {
        (spec.clone(), top_left.to_vec(), false)
    } else {
        let t = spec.transposed();
        let block_t: Vec<Vec<Rational>> = (0..mk)
            .map(|i| (0..mk).map(|j| top_left[j][i].clone()).collect())
            .collect();
        if t.k == 0 || !confined(&t, &block_t) {
            return Err(Error::InvalidParameter(
                "perturbation is not confined to the first k columns in either orientation".into(),
            ));
        }
        (t, block_t, true)
    };
    let (m, k) = (band.m, band.k);

    // The multiplicity structure comes from exact gcd chains; companion
    // eigenvalues alone smear a multiple root over a cluster wider than any
    // fixed tolerance. Roots are then extracted from square-free factors,
    // where they are simple and accurately computed.
    let q_poly = assoc_poly(&band).to_poly();
    let repeated = q_poly.gcd(&q_poly.derivative());
    if repeated.degree().unwrap_or(0) >= 1 {
        let deeper = repeated.gcd(&repeated.derivative());
        if deeper.degree().unwrap_or(0) >= 1 {
            return Err(Error::UnsupportedMultiplicity(3));
        }
    }
    let distinct = if repeated.degree().unwrap_or(0) >= 1 {
        q_poly.div_rem(&repeated).0
    } else {
        q_poly.clone()
    };
    let distinct_roots = poly_roots_f64(&distinct)?;
    let double_roots = poly_roots_f64(&repeated)?;
    let mut clusters: Vec<(Complex64, usize)> = distinct_roots
        .iter()
        .map(|z| {
            let is_double = double_roots
                .iter()
                .any(|w| (z - w).norm() <= 1e-7 * (1.0 + w.norm()));
            (*z, if is_double { 2 } else { 1 })
        })
        .collect();
    clusters.sort_by(|a, b| a.0.norm().partial_cmp(&b.0.norm()).unwrap());
    let total: usize = clusters.iter().map(|(_, m)| m).sum();
    if total != q_poly.degree().unwrap() {
        return Err(Error::RootFinding(format!(
            "multiplicity structure inconsistent: {total} roots for degree {}",
            q_poly.degree().unwrap()
        )));
    }

    let mut columns: Vec<Vec<Complex64>> = Vec::with_capacity(mk);
    for (z, mult) in &clusters {
        match mult {
            1 => columns.push((0..mk).map(|j| z.powi(j as i32)).collect()),
            2 => {
                columns.push((0..mk).map(|j| z.powi(j as i32)).collect());
                columns.push(
                    (0..mk)
                        .map(|j| {
                            if j == 0 {
                                Complex64::new(1.0, 0.0)
                            } else {
                                z.powi(j as i32 - 1) * (j as f64) + z.powi(j as i32)
                            }
                        })
                        .collect(),
                );
            }
            more => return Err(Error::UnsupportedMultiplicity(*more)),
        }
    }
    let w = DMatrix::<Complex64>::from_fn(mk, mk, |i, j| columns[j][i]);
    let w_inv = w
        .try_inverse()
        .ok_or_else(|| Error::Singular("Casorati matrix is singular".into()))?;

    let y1 = DMatrix::<Complex64>::from_fn(mk, k, |i, j| Complex64::new(to_f64(&block[i][j]), 0.0));
    let y2 = DMatrix::<Complex64>::from_fn(mk, mk, |i, j| {
        Complex64::new(to_f64(&band.coeff_at(k as i64 + j as i64 - i as i64)), 0.0)
    });
    let y2_inv = y2
        .try_inverse()
        .ok_or_else(|| Error::Singular("Y2 block is singular".into()))?;

    let g2 = w_inv.rows(m, k) * y2_inv * y1;
    let max_re = g2.iter().map(|z| z.re.abs()).fold(0.0f64, f64::max);
    let max_im = g2.iter().map(|z| z.im.abs()).fold(0.0f64, f64::max);
    if max_im > 1e-8 * (1.0 + max_re) {
        return Err(Error::Consistency(format!(
            "coupling matrix has non-real entries (max imaginary part {max_im:e})"
        )));
    }
    let real = DMatrix::<f64>::from_fn(k, k, |i, j| g2[(i, j)].re);

    let svd = real.clone().svd(false, false);
    let mut singular_values: Vec<f64> = svd.singular_values.iter().copied().collect();
    singular_values.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let smax = singular_values.first().copied().unwrap_or(0.0);
    let rank = singular_values
        .iter()
        .filter(|&&s| s > 1e-10 * smax)
        .count();

    Ok(CouplingReport {
        matrix: real,
        singular_values,
        rank,
        full_rank: rank == k,
        transposed,
    })
}

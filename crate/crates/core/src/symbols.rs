//! The 2-pi-periodic symbols generated by the spline Toeplitz bands (mass,
//! stiffness, order-k derivative), the scalar function whose unit-circle
//! zeros decide weak well-conditioning, and the sharp CFL / penalty
//! thresholds computed by two independent exact routes.

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::cardinal::cardinal_eval;
use crate::error::{Error, Result};
use crate::exact::{decide_with_pi, rint, to_f64, zeta_even_coeff, RatInterval, Rational};

/// Symbol values at one angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolValue {
    pub theta: f64,
    /// Mass symbol, positive on [-pi, pi].
    pub mass: f64,
    /// Stiffness symbol, nonpositive.
    pub stiffness: f64,
    /// Order-k derivative symbol; (-1)^k * deriv_k is nonnegative.
    pub deriv_k: f64,
}

/// Exact band coefficients entering the three symbols: values of the degree
/// 2p+1 cardinal spline and its even derivatives at the integers.
fn band_coefficients(p: usize, order: usize) -> Result<Vec<Rational>> {
    (0..=p)
        .map(|j| cardinal_eval(2 * p + 1, order, &rint(p as i64 + 1 - j as i64)))
        .collect()
}

fn cosine_sum(coeffs: &[Rational], theta: f64) -> f64 {
    let mut total = to_f64(&coeffs[0]);
    for (j, c) in coeffs.iter().enumerate().skip(1) {
        total += 2.0 * to_f64(c) * (j as f64 * theta).cos();
    }
    total
}

/// Evaluates the three symbols at `theta` through their finite cosine sums
/// with exact spline coefficients.
pub fn symbol_eval(p: usize, k: usize, theta: f64) -> Result<SymbolValue> {
    if p < 1 {
        return Err(Error::InvalidParameter("degree must be >= 1".into()));
    }
    if k > p {
        return Err(Error::DerivativeOrder {
            order: k,
            degree: p,
        });
    }
    Ok(SymbolValue {
        theta,
        mass: cosine_sum(&band_coefficients(p, 0)?, theta),
        stiffness: cosine_sum(&band_coefficients(p, 2)?, theta),
        deriv_k: cosine_sum(&band_coefficients(p, 2 * k)?, theta),
    })
}

fn alternating_sum(coeffs: &[Rational]) -> Rational {
    let mut total = coeffs[0].clone();
    for (j, c) in coeffs.iter().enumerate().skip(1) {
        let term = rint(2) * c;
        if j % 2 == 1 {
            total -= term;
        } else {
            total += term;
        }
    }
    total
}

fn pow2(e: usize) -> Rational {
    Rational::from_integer(BigInt::one() << e)
}

fn pow2_minus_1(e: usize) -> Rational {
    Rational::from_integer((BigInt::one() << e) - BigInt::one())
}

/// Exact symbol values at theta = pi by two independent routes: the finite
/// alternating sum of spline values, and the even-zeta closed forms. The two
/// must agree exactly; a mismatch is a fatal internal inconsistency.
pub fn symbol_at_pi_exact(p: usize, k: usize) -> Result<(Rational, Rational, Rational)> {
    if p < 1 || k < 1 || k > p {
        return Err(Error::InvalidParameter(format!(
            "symbol_at_pi_exact requires 1 <= k <= p, got p={p} k={k}"
        )));
    }
    let mass_sum = alternating_sum(&band_coefficients(p, 0)?);
    let stiff_sum = alternating_sum(&band_coefficients(p, 2)?);
    let deriv_sum = alternating_sum(&band_coefficients(p, 2 * k)?);

    let mass_zeta = rint(2) * pow2_minus_1(2 * (p + 1)) * zeta_even_coeff(p + 1);
    let stiff_zeta = -rint(8) * pow2_minus_1(2 * p) * zeta_even_coeff(p);
    let sign_k = if k % 2 == 1 {
        -Rational::one()
    } else {
        Rational::one()
    };
    let deriv_zeta =
        sign_k * pow2(2 * k + 1) * pow2_minus_1(2 * (p + 1 - k)) * zeta_even_coeff(p + 1 - k);

    if mass_sum != mass_zeta || stiff_sum != stiff_zeta || deriv_sum != deriv_zeta {
        return Err(Error::Consistency(format!(
            "symbol routes disagree at theta=pi for p={p}, k={k}: \
             mass {mass_sum} vs {mass_zeta}, stiffness {stiff_sum} vs {stiff_zeta}, \
             deriv {deriv_sum} vs {deriv_zeta}"
        )));
    }
    Ok((mass_sum, stiff_sum, deriv_sum))
}

/// `F(theta) = B(theta) + rho (M(theta) + delta (-1)^k D_k(theta))`, the
/// scalar whose sign change over (0, pi] counts the unit-circle zeros of the
/// family polynomial.
pub fn f_eval(p: usize, k: usize, theta: f64, rho: f64, delta: f64) -> Result<f64> {
    let s = symbol_eval(p, k, theta)?;
    let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
    Ok(s.stiffness + rho * (s.mass + delta * sign * s.deriv_k))
}

/// Sharp CFL threshold: the largest rho with a weakly well-conditioned
/// unstabilized family, `-B(pi)/M(pi)`, as an exact rational (the pi powers
/// cancel through the even-zeta coefficients).
pub fn cfl_threshold(p: usize) -> Result<Rational> {
    if p < 1 {
        return Err(Error::InvalidParameter("degree must be >= 1".into()));
    }
    let value = rint(4) * pow2_minus_1(2 * p) / pow2_minus_1(2 * (p + 1)) * zeta_even_coeff(p)
        / zeta_even_coeff(p + 1);
    // Cross-check against the symbol route.
    let (mass, stiffness, _) = symbol_at_pi_exact(p, 1)?;
    let ratio = -stiffness / mass;
    if ratio != value {
        return Err(Error::Consistency(format!(
            "CFL threshold routes disagree for p={p}: {value} vs {ratio}"
        )));
    }
    Ok(value)
}

/// Sharp penalty threshold for stabilization order k:
/// `-M(pi) / ((-1)^k D_k(pi))` as an exact rational.
pub fn penalty_threshold(p: usize, k: usize) -> Result<Rational> {
    if p < 1 || k < 1 || k > p {
        return Err(Error::InvalidParameter(format!(
            "penalty_threshold requires 1 <= k <= p, got p={p} k={k}"
        )));
    }
    let value = -pow2_minus_1(2 * (p + 1)) / (pow2(2 * k) * pow2_minus_1(2 * (p + 1 - k)))
        * zeta_even_coeff(p + 1)
        / zeta_even_coeff(p + 1 - k);
    let (mass, _, deriv) = symbol_at_pi_exact(p, k)?;
    let sign_k = if k % 2 == 1 {
        -Rational::one()
    } else {
        Rational::one()
    };
    let ratio = -mass / (sign_k * deriv);
    if ratio != value {
        return Err(Error::Consistency(format!(
            "penalty threshold routes disagree for p={p}, k={k}: {value} vs {ratio}"
        )));
    }
    Ok(value)
}

/// The full threshold record for one degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Thresholds {
    pub degree: usize,
    pub cfl: Rational,
    /// Penalty threshold at full stabilization order k = p.
    pub penalty: Rational,
    /// (k, threshold) for every stabilization order 1..=p.
    pub penalty_by_order: Vec<(usize, Rational)>,
}

pub fn thresholds(p: usize) -> Result<Thresholds> {
    let penalty_by_order: Vec<(usize, Rational)> = (1..=p)
        .map(|k| Ok((k, penalty_threshold(p, k)?)))
        .collect::<Result<_>>()?;
    Ok(Thresholds {
        degree: p,
        cfl: cfl_threshold(p)?,
        penalty: penalty_by_order.last().unwrap().1.clone(),
        penalty_by_order,
    })
}

/// True when the CFL threshold exceeds pi^2, decided by exact enclosure.
pub fn cfl_exceeds_pi_squared(p: usize) -> Result<bool> {
    let rho = cfl_threshold(p)?;
    Ok(decide_with_pi(|pi: &RatInterval| {
        pi.pow_nonneg(2).strictly_below(&rho)
    }))
}

/// Checks that `F/M` strictly decreases across a uniform grid of
/// `grid_size` angles inside (0, pi).
pub fn monotonicity_check(
    p: usize,
    k: usize,
    rho: f64,
    delta: f64,
    grid_size: usize,
) -> Result<bool> {
    if grid_size < 2 {
        return Err(Error::InvalidParameter("grid_size must be >= 2".into()));
    }
    if rho <= 0.0 || delta > 0.0 {
        return Err(Error::InvalidParameter(
            "requires rho > 0 and delta <= 0".into(),
        ));
    }
    let mut prev = f64::INFINITY;
    for i in 1..=grid_size {
        let theta = std::f64::consts::PI * i as f64 / (grid_size as f64 + 1.0);
        let s = symbol_eval(p, k, theta)?;
        let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
        let value = (s.stiffness + rho * (s.mass + delta * sign * s.deriv_k)) / s.mass;
        if value >= prev {
            return Ok(false);
        }
        prev = value;
    }
    Ok(true)
}

/// Number of zeros of F in [-pi, pi], using the proven monotonicity of F/M:
/// F(0) = rho > 0, so the count is 2 exactly when the exact sign of F(pi) is
/// nonpositive, and 0 otherwise. Positive delta is outside the proven regime
/// and rejected.
pub fn symbol_zero_count(p: usize, k: usize, rho: &Rational, delta: &Rational) -> Result<usize> {
    if !rho.is_positive() {
        return Err(Error::InvalidParameter("rho must be positive".into()));
    }
    if delta.is_positive() {
        return Err(Error::InvalidParameter(
            "delta > 0 is outside the monotone regime".into(),
        ));
    }
    let (mass, stiffness, deriv) = symbol_at_pi_exact(p, k)?;
    let sign_k = if k % 2 == 1 {
        -Rational::one()
    } else {
        Rational::one()
    };
    let f_pi = stiffness + rho * (mass + delta * sign_k * deriv);
    Ok(if f_pi.is_positive() { 0 } else { 2 })
}

/// The limit constant governing the penalty threshold scale when the
/// stabilization order trails the degree by M-1: exact rational part divided
/// by pi^2 (all other pi powers cancel).
pub fn penalty_limit_constant(m: usize) -> Result<f64> {
    Ok(to_f64(&penalty_limit_ratio(m)?) / (std::f64::consts::PI * std::f64::consts::PI))
}

/// The exact rational `C_M * pi^2 = 1 / ((1 - 2^(-2M)) * zeta_even_coeff(M))`.
pub fn penalty_limit_ratio(m: usize) -> Result<Rational> {
    if m < 1 {
        return Err(Error::InvalidParameter("M must be >= 1".into()));
    }
    let frac = pow2_minus_1(2 * m) / pow2(2 * m);
    Ok(Rational::one() / (frac * zeta_even_coeff(m)))
}

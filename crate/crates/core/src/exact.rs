//! Exact rational scalars: arbitrary-precision rationals, Bernoulli numbers,
//! the rational coefficients of even zeta values, and guaranteed interval
//! enclosures of pi for sign decisions that cannot be settled in rational
//! arithmetic alone.

use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number, always stored in lowest terms with a
/// positive denominator.
pub type Rational = num_rational::BigRational;

/// Shorthand constructor from machine integers.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Integer as a rational.
pub fn rint(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Renders as `num/den`, the wire form used in all JSON/CSV outputs.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `a/b`, plain integers, decimal strings like `-0.125`, and
/// scientific notation like `1e-8`, all exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidParameter(format!("cannot parse `{s}` as a rational"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::InvalidParameter("zero denominator".into()));
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    let negative = int_part.starts_with('-');
    let digits: String = int_part
        .trim_start_matches(['-', '+'])
        .chars()
        .chain(frac_part.chars())
        .collect();
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let mut numer: BigInt = digits.parse().map_err(|_| bad())?;
    if negative {
        numer = -numer;
    }
    let scale = frac_part.len() as i32 - exp;
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        Rational::new(numer, ten.pow(scale as u32))
    } else {
        Rational::from_integer(numer * ten.pow((-scale) as u32))
    };
    Ok(value)
}

/// Nearest double; exact conversion is impossible in general, rounding happens
/// once and only here.
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Converts a finite double to the exact rational it represents.
pub fn from_f64(x: f64) -> Result<Rational> {
    Rational::from_float(x).ok_or_else(|| Error::InvalidParameter(format!("non-finite value {x}")))
}

/// Decimal rendering with `sig` significant digits (round half away from
/// zero), in scientific notation `d.dddde±E`. Used by the Matrix Market
/// export.
pub fn decimal_string(r: &Rational, sig: usize) -> String {
    assert!(sig >= 1);
    if r.is_zero() {
        return "0.0e0".to_string();
    }
    let neg = r.is_negative();
    let n = r.numer().abs();
    let d = r.denom().clone();
    // Scale so that floor(n * 10^shift / d) has exactly `sig` digits.
    let nd = n.to_string().len() as i64;
    let dd = d.to_string().len() as i64;
    let mut shift = sig as i64 - (nd - dd) - 1;
    let ten = BigInt::from(10);
    let scaled = |shift: i64| -> (BigInt, BigInt) {
        if shift >= 0 {
            (
                (&n * ten.pow(shift as u32)).div_floor(&d),
                &n * ten.pow(shift as u32),
            )
        } else {
            ((&n / ten.pow((-shift) as u32)).div_floor(&d), n.clone())
        }
    };
    let _ = scaled;
    let mut q = quotient_digits(&n, &d, shift);
    while q.to_string().len() > sig {
        shift -= 1;
        q = quotient_digits(&n, &d, shift);
    }
    while q.to_string().len() < sig {
        shift += 1;
        q = quotient_digits(&n, &d, shift);
    }
    // Round: compare twice the remainder against the divisor.
    let (num_scaled, den_scaled) = if shift >= 0 {
        (&n * ten.pow(shift as u32), d.clone())
    } else {
        (n.clone(), &d * ten.pow((-shift) as u32))
    };
    let rem = &num_scaled - &q * &den_scaled;
    if BigInt::from(2) * rem >= den_scaled {
        q += 1;
        if q.to_string().len() > sig {
            // 999..9 rounded up to 1000..0; drop the extra digit.
            q /= &ten;
            shift -= 1;
        }
    }
    let digits = q.to_string();
    let exponent = (digits.len() as i64 - 1) - shift;
    let mantissa = if digits.len() == 1 {
        format!("{}.0", digits)
    } else {
        format!("{}.{}", &digits[..1], &digits[1..])
    };
    format!("{}{}e{}", if neg { "-" } else { "" }, mantissa, exponent)
}

fn quotient_digits(n: &BigInt, d: &BigInt, shift: i64) -> BigInt {
    let ten = BigInt::from(10);
    if shift >= 0 {
        (n * ten.pow(shift as u32)).div_floor(d)
    } else {
        n.div_floor(&(d * ten.pow((-shift) as u32)))
    }
}

fn binomial_big(n: u64, k: u64) -> BigInt {
    num_integer::binomial(BigInt::from(n), BigInt::from(k))
}

fn factorial_big(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

static BERNOULLI_CACHE: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();

/// The m-th Bernoulli number, convention `B_1 = -1/2`, by the defining
/// recurrence `sum_{j=0}^{m} C(m+1, j) B_j = 0`.
pub fn bernoulli(m: usize) -> Rational {
    let cache = BERNOULLI_CACHE.get_or_init(|| Mutex::new(vec![Rational::one()]));
    let mut table = cache.lock().unwrap();
    while table.len() <= m {
        let mm = table.len();
        let mut acc = Rational::zero();
        for (j, b) in table.iter().enumerate() {
            acc += Rational::from_integer(binomial_big(mm as u64 + 1, j as u64)) * b;
        }
        let next = -acc / Rational::from_integer(BigInt::from(mm as u64 + 1));
        table.push(next);
    }
    table[m].clone()
}

/// The exact rational `zeta(2m) / pi^(2m) = (-1)^(m+1) B_{2m} 2^(2m-1) / (2m)!`.
pub fn zeta_even_coeff(m: usize) -> Rational {
    assert!(m >= 1, "zeta_even_coeff requires m >= 1");
    let b = bernoulli(2 * m);
    let sign = if m % 2 == 1 { 1 } else { -1 };
    let num = BigInt::from(sign) * b.numer() * (BigInt::one() << (2 * m - 1));
    Rational::new(num, b.denom() * factorial_big(2 * m as u64))
}

/// The exact rational `c` with `sum_{j in Z} (pi + 2 j pi)^(-2m) = c / pi^(2m)`,
/// i.e. `(2^(2m) - 1) / 2^(2m-1) * zeta_even_coeff(m)`.
pub fn odd_half_integer_sum_coeff(m: usize) -> Rational {
    assert!(m >= 1);
    let num = (BigInt::one() << (2 * m)) - BigInt::one();
    Rational::new(num, BigInt::one() << (2 * m - 1)) * zeta_even_coeff(m)
}

/// Closed rational interval `[lo, hi]` with exact endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct RatInterval {
    pub lo: Rational,
    pub hi: Rational,
}

impl RatInterval {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi);
        RatInterval { lo, hi }
    }

    pub fn point(x: Rational) -> Self {
        RatInterval {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_negative() {
            RatInterval {
                lo: &self.lo * c,
                hi: &self.hi * c,
            }
            .swapped()
        } else {
            RatInterval {
                lo: &self.lo * c,
                hi: &self.hi * c,
            }
        }
    }

    fn swapped(self) -> Self {
        RatInterval {
            lo: self.hi.clone().min(self.lo.clone()),
            hi: self.hi.max(self.lo),
        }
    }

    /// Product of two intervals with nonnegative lower bounds.
    pub fn mul_nonneg(&self, other: &RatInterval) -> Self {
        assert!(!self.lo.is_negative() && !other.lo.is_negative());
        RatInterval {
            lo: &self.lo * &other.lo,
            hi: &self.hi * &other.hi,
        }
    }

    /// Integer power of an interval with a nonnegative lower bound.
    pub fn pow_nonneg(&self, e: u32) -> Self {
        assert!(!self.lo.is_negative());
        let mut out = RatInterval::point(Rational::one());
        for _ in 0..e {
            out = out.mul_nonneg(self);
        }
        out
    }

    /// `Some(true)` if the whole interval is below `x`, `Some(false)` if it is
    /// above, `None` if `x` lies inside.
    pub fn strictly_below(&self, x: &Rational) -> Option<bool> {
        if &self.hi < x {
            Some(true)
        } else if &self.lo > x {
            Some(false)
        } else {
            None
        }
    }
}

/// Guaranteed enclosure of pi with roughly `digits` correct decimal digits,
/// via Machin's formula evaluated in integer arithmetic with explicit error
/// accounting.
pub fn pi_interval(digits: usize) -> RatInterval {
    let guard = 10u32;
    let scale_pow = digits as u32 + guard;
    let scale = BigInt::from(10).pow(scale_pow);

    // atan(1/x) * scale, with unit-of-scale error bound.
    let atan_inv = |x: u64| -> (BigInt, u64) {
        let xx = BigInt::from(x) * BigInt::from(x);
        let mut term = &scale / BigInt::from(x);
        let mut sum = BigInt::zero();
        let mut k = 0u64;
        let mut terms = 0u64;
        loop {
            let t = &term / BigInt::from(2 * k + 1);
            if t.is_zero() {
                break;
            }
            if k.is_multiple_of(2) {
                sum += &t;
            } else {
                sum -= &t;
            }
            term /= &xx;
            k += 1;
            terms += 1;
        }
        // Each floor division loses less than one unit; the truncated tail is
        // below one unit as well.
        (sum, terms + 2)
    };

    let (a5, e5) = atan_inv(5);
    let (a239, e239) = atan_inv(239);
    let center = BigInt::from(16) * &a5 - BigInt::from(4) * &a239;
    let err = BigInt::from(16 * e5 + 4 * e239);
    RatInterval::new(
        Rational::new(&center - &err, scale.clone()),
        Rational::new(center + err, scale),
    )
}

/// Decides a predicate that compares some exact quantity against a power of
/// pi. The closure receives sharper and sharper enclosures (starting at 100
/// digits, doubling on every straddle) until it can answer.
pub fn decide_with_pi<F>(mut predicate: F) -> bool
where
    F: FnMut(&RatInterval) -> Option<bool>,
{
    let mut digits = 100;
    loop {
        if let Some(ans) = predicate(&pi_interval(digits)) {
            return ans;
        }
        digits *= 2;
        assert!(digits <= 100_000, "pi comparison did not resolve");
    }
}

/// Sign of a big integer as -1, 0, 1.
pub fn sign_of(x: &BigInt) -> i32 {
    match x.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_base_cases() {
        assert_eq!(bernoulli(0), rint(1));
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert_eq!(bernoulli(2), rat(1, 6));
        assert_eq!(bernoulli(3), rint(0));
        assert_eq!(bernoulli(4), rat(-1, 30));
        assert_eq!(bernoulli(10), rat(5, 66));
    }

    #[test]
    fn bernoulli_recurrence_holds_up_to_40() {
        for m in 1..=40usize {
            let mut acc = Rational::zero();
            for j in 0..=m {
                acc += Rational::from_integer(binomial_big(m as u64 + 1, j as u64)) * bernoulli(j);
            }
            // sum_{j=0}^{m} C(m+1,j) B_j = 0 for m >= 1 under B_1 = -1/2.
            assert!(acc.is_zero(), "recurrence fails at m={m}: {acc}");
        }
    }

    #[test]
    fn zeta_even_coeff_golden() {
        assert_eq!(zeta_even_coeff(1), rat(1, 6));
        assert_eq!(zeta_even_coeff(2), rat(1, 90));
        assert_eq!(zeta_even_coeff(3), rat(1, 945));
        assert_eq!(zeta_even_coeff(4), rat(1, 9450));
        assert_eq!(zeta_even_coeff(5), rat(1, 93555));
        assert_eq!(zeta_even_coeff(6), rat(691, 638512875));
    }

    #[test]
    fn zeta_even_coeff_partial_sum_oracle() {
        // zeta(2m) ~ sum_{n<=10^4} n^(-2m), tail below the integral bound.
        for m in 1..=6usize {
            let mut partial = 0.0f64;
            for n in (1..=10_000u64).rev() {
                partial += (n as f64).powi(-2 * m as i32);
            }
            let tail = (1e4f64).powi(1 - 2 * m as i32) / (2.0 * m as f64 - 1.0);
            let pi = std::f64::consts::PI;
            let value = to_f64(&zeta_even_coeff(m)) * pi.powi(2 * m as i32);
            assert!(
                (value - partial).abs() <= tail + 1e-11,
                "m={m}: value={value}, partial={partial}, tail={tail}"
            );
        }
    }

    #[test]
    fn odd_half_integer_sum_golden() {
        // (2^(2m)-1)/2^(2m-1) * zeta_even_coeff(m); the two-sided sum over
        // odd half-integer multiples of pi is itself this pure rational.
        assert_eq!(odd_half_integer_sum_coeff(1), rat(1, 4));
        assert_eq!(odd_half_integer_sum_coeff(2), rat(1, 48));
        assert_eq!(odd_half_integer_sum_coeff(3), rat(1, 480));
    }

    #[test]
    fn odd_half_integer_sum_truncated_oracle() {
        // sum_{|j| <= 10^6} (pi + 2 j pi)^(-2m) equals the coefficient itself
        // (the pi powers cancel), up to the truncation tail.
        let pi = std::f64::consts::PI;
        for m in 1..=3usize {
            let mut s = 0.0f64;
            for j in (1..=1_000_000i64).rev() {
                let a = (pi + 2.0 * j as f64 * pi).powi(-2 * m as i32);
                let b = (pi - 2.0 * j as f64 * pi).powi(-2 * m as i32);
                s += a + b;
            }
            s += pi.powi(-2 * m as i32);
            let expect = to_f64(&odd_half_integer_sum_coeff(m));
            // Tail bound: 2 * int_{10^6 - 1}^inf (2 pi x)^(-2m) dx.
            let tail = 2.0 * (2.0 * pi).powi(-2 * m as i32) * (1e6f64 - 1.0).powi(1 - 2 * m as i32)
                / (2.0 * m as f64 - 1.0);
            assert!((s - expect).abs() < tail + 1e-12, "m={m}: {s} vs {expect}");
        }
    }

    #[test]
    fn pi_interval_encloses_reference() {
        // 50-digit truncation of pi; it sits strictly below pi by < 1e-50.
        let reference =
            parse_rational("3.14159265358979323846264338327950288419716939937510").unwrap();
        // Coarse enclosures bracket the reference outright.
        for digits in [10usize, 20, 40] {
            let enc = pi_interval(digits);
            assert!(enc.lo < reference && reference < enc.hi, "digits={digits}");
        }
        // A tight enclosure sits within 1e-50 above the truncated reference
        // and keeps its guaranteed width.
        let enc = pi_interval(100);
        assert!(reference < enc.hi);
        let gap = &enc.lo - &reference;
        assert!(gap > Rational::zero() && gap < parse_rational("1e-50").unwrap());
        assert!(to_f64(&enc.width()) < 1e-100);
        // Nesting: sharper enclosures stay inside coarser ones.
        let coarse = pi_interval(50);
        assert!(coarse.lo <= enc.lo && enc.hi <= coarse.hi);
    }

    #[test]
    fn zeta_value_bracket_via_pi_enclosure() {
        // zeta(2m) = coeff * pi^(2m) lies in (1, 1 + 1/(2m-1)).
        for m in 1..=20usize {
            let c = zeta_even_coeff(m);
            assert!(c > Rational::zero());
            let above_one = decide_with_pi(|pi| {
                let z = pi.pow_nonneg(2 * m as u32).scale(&c);
                z.strictly_below(&Rational::one()).map(|b| !b)
            });
            let below_cap = decide_with_pi(|pi| {
                let z = pi.pow_nonneg(2 * m as u32).scale(&c);
                let cap = Rational::one() + rat(1, 2 * m as i64 - 1);
                z.strictly_below(&cap)
            });
            assert!(above_one && below_cap, "zeta bracket fails at m={m}");
        }
    }

    #[test]
    fn zeta_ratio_inequality_up_to_50() {
        // zeta(2p+2)/zeta(2p) < 4 (2^(2p)-1)/(2^(2p+2)-1), cleared of pi^2
        // through the even-zeta coefficients and decided by enclosure.
        for p in 1..=50usize {
            let lhs_coeff = zeta_even_coeff(p + 1) / zeta_even_coeff(p);
            let rhs = {
                let num = (BigInt::one() << (2 * p)) - BigInt::one();
                let den = (BigInt::one() << (2 * p + 2)) - BigInt::one();
                Rational::new(BigInt::from(4) * num, den)
            };
            let holds = decide_with_pi(|pi| {
                let lhs = pi.pow_nonneg(2).scale(&lhs_coeff);
                lhs.strictly_below(&rhs)
            });
            assert!(holds, "zeta ratio inequality fails at p={p}");
        }
    }

    #[test]
    fn parse_and_format_roundtrip() {
        assert_eq!(parse_rational("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rational("-3/4").unwrap(), rat(-3, 4));
        assert_eq!(parse_rational("0.125").unwrap(), rat(1, 8));
        assert_eq!(parse_rational("-2").unwrap(), rint(-2));
        assert_eq!(parse_rational("1e-3").unwrap(), rat(1, 1000));
        assert_eq!(parse_rational("2.5e2").unwrap(), rint(250));
        assert_eq!(format_rational(&rat(-1, 12)), "-1/12");
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(decimal_string(&rat(1, 3), 5), "3.3333e-1");
        assert_eq!(decimal_string(&rat(2, 3), 5), "6.6667e-1");
        assert_eq!(decimal_string(&rint(120), 4), "1.200e2");
        assert_eq!(decimal_string(&rat(-1, 12), 3), "-8.33e-2");
        assert_eq!(decimal_string(&Rational::zero(), 5), "0.0e0");
        assert_eq!(decimal_string(&rat(999, 1000), 2), "1.0e0");
        assert_eq!(decimal_string(&rint(1), 17), "1.0000000000000000e0");
    }

    #[test]
    fn f64_conversions() {
        assert_eq!(to_f64(&rat(1, 2)), 0.5);
        assert_eq!(from_f64(0.1).unwrap(), Rational::from_float(0.1).unwrap());
        assert!(from_f64(f64::INFINITY).is_err());
    }
}

//! Dense univariate polynomials with exact rational coefficients, plus the
//! Sturm-sequence root counting used for the exact classification route.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::Rational;

/// Polynomial with ascending coefficients; the zero polynomial has no
/// coefficients and the leading coefficient is never zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatPoly {
    coeffs: Vec<Rational>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn zero() -> Self {
        RatPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    pub fn identity() -> Self {
        Self::new(vec![Rational::zero(), Rational::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + crate::exact::to_f64(c);
        }
        acc
    }

    pub fn derivative(&self) -> RatPoly {
        if self.coeffs.len() <= 1 {
            return RatPoly::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * Rational::from_integer(i.into()))
            .collect();
        RatPoly::new(coeffs)
    }

    pub fn derivative_n(&self, n: usize) -> RatPoly {
        let mut p = self.clone();
        for _ in 0..n {
            p = p.derivative();
        }
        p
    }

    /// Antiderivative with zero constant term.
    pub fn antiderivative(&self) -> RatPoly {
        if self.is_zero() {
            return RatPoly::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Rational::zero());
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c / Rational::from_integer((i + 1).into()));
        }
        RatPoly::new(coeffs)
    }

    pub fn add(&self, other: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) + other.coeff(i)).collect();
        RatPoly::new(coeffs)
    }

    pub fn sub(&self, other: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) - other.coeff(i)).collect();
        RatPoly::new(coeffs)
    }

    pub fn neg(&self) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, other: &RatPoly) -> RatPoly {
        if self.is_zero() || other.is_zero() {
            return RatPoly::zero();
        }
        let mut coeffs = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        RatPoly::new(coeffs)
    }

    pub fn scale(&self, c: &Rational) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// `p(scale * x + shift)` by Horner with linear factors.
    pub fn compose_affine(&self, scale: &Rational, shift: &Rational) -> RatPoly {
        let linear = RatPoly::new(vec![shift.clone(), scale.clone()]);
        let mut acc = RatPoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&linear).add(&RatPoly::constant(c.clone()));
        }
        acc
    }

    /// Euclidean division; panics on division by the zero polynomial.
    pub fn div_rem(&self, divisor: &RatPoly) -> (RatPoly, RatPoly) {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let dd = divisor.degree().unwrap();
        let lead = divisor.leading().unwrap().clone();
        let mut rem = self.clone();
        let mut quot = vec![Rational::zero(); self.coeffs.len().saturating_sub(dd)];
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let factor = rem.leading().unwrap() / &lead;
            let pos = rd - dd;
            quot[pos] = factor.clone();
            let mut sub = vec![Rational::zero(); pos];
            sub.extend(divisor.coeffs.iter().map(|c| c * &factor));
            rem = rem.sub(&RatPoly::new(sub));
        }
        (RatPoly::new(quot), rem)
    }

    /// Divides out a known root `a` exactly; errors if `a` is not a root.
    pub fn deflate_root(&self, a: &Rational) -> Result<RatPoly> {
        if !self.eval(a).is_zero() {
            return Err(Error::InvalidParameter(format!(
                "deflate_root: {a} is not a root"
            )));
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() - 1];
        let mut carry = Rational::zero();
        for i in (0..self.coeffs.len()).rev() {
            if i == 0 {
                break;
            }
            carry = self.coeff(i) + carry * a;
            out[i - 1] = carry.clone();
        }
        Ok(RatPoly::new(out))
    }

    /// Scales so that the coefficients become coprime integers; the sign of
    /// the polynomial is preserved.
    fn primitive(&self) -> RatPoly {
        if self.is_zero() {
            return RatPoly::zero();
        }
        let mut den = num_bigint::BigInt::one();
        for c in &self.coeffs {
            den = num_integer::lcm(den, c.denom().clone());
        }
        let ints: Vec<num_bigint::BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * &den / c.denom())
            .collect();
        let mut g = num_bigint::BigInt::zero();
        for v in &ints {
            g = num_integer::gcd(g, v.clone());
        }
        RatPoly::new(
            ints.into_iter()
                .map(|v| Rational::from_integer(v / &g))
                .collect(),
        )
    }

    pub fn gcd(&self, other: &RatPoly) -> RatPoly {
        let mut a = self.primitive();
        let mut b = other.primitive();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r.primitive();
        }
        if a.is_zero() {
            a
        } else {
            // Monic-ish normalization: positive leading coefficient.
            let lead = a.leading().unwrap().clone();
            a.scale(
                &(Rational::one() / lead.abs()
                    * if lead.is_negative() {
                        -Rational::one()
                    } else {
                        Rational::one()
                    }),
            )
        }
    }

    pub fn square_free(&self) -> RatPoly {
        if self.degree().unwrap_or(0) < 1 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        if g.degree() == Some(0) {
            self.clone()
        } else {
            self.div_rem(&g).0
        }
    }
}

fn sign(r: &Rational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_negative() {
        -1
    } else {
        1
    }
}

/// Sturm chain of the square-free part, primitive-scaled to keep the
/// coefficients small.
fn sturm_chain(f: &RatPoly) -> Vec<RatPoly> {
    let mut chain = vec![f.clone(), f.derivative()];
    loop {
        let n = chain.len();
        if chain[n - 1].is_zero() {
            chain.pop();
            break;
        }
        let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
        if r.is_zero() {
            break;
        }
        chain.push(r.neg().primitive());
    }
    chain
}

fn sign_variations(chain: &[RatPoly], x: &Rational) -> usize {
    let mut last = 0i32;
    let mut variations = 0;
    for p in chain {
        let s = sign(&p.eval(x));
        if s != 0 {
            if last != 0 && s != last {
                variations += 1;
            }
            last = s;
        }
    }
    variations
}

/// Number of distinct real roots of `poly` in the closed interval `[a, b]`,
/// endpoints included, by exact Sturm sequences.
pub fn count_roots_in(poly: &RatPoly, a: &Rational, b: &Rational) -> Result<usize> {
    if poly.is_zero() {
        return Err(Error::InvalidParameter(
            "root counting on the zero polynomial".into(),
        ));
    }
    if a >= b {
        return Err(Error::InvalidParameter("empty interval".into()));
    }
    if poly.degree() == Some(0) {
        return Ok(0);
    }
    let mut g = poly.square_free();
    let mut endpoint_roots = 0usize;
    if g.eval(a).is_zero() {
        g = g.deflate_root(a)?;
        endpoint_roots += 1;
    }
    if g.eval(b).is_zero() {
        g = g.deflate_root(b)?;
        endpoint_roots += 1;
    }
    if g.degree().unwrap_or(0) == 0 {
        return Ok(endpoint_roots);
    }
    let chain = sturm_chain(&g);
    let inner = sign_variations(&chain, a) - sign_variations(&chain, b);
    Ok(inner + endpoint_roots)
}

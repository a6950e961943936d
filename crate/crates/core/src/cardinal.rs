//! Cardinal B-splines on the integer knot sequence {0, ..., p+1}: exact
//! piecewise-polynomial construction, derivative evaluation at rational
//! points, and the inner-product identity that generates every Toeplitz band
//! coefficient downstream.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{rint, Rational};
use crate::poly::RatPoly;

/// Degree-p cardinal B-spline; piece `j` is the polynomial on `[j, j+1)`.
#[derive(Debug, Clone)]
pub struct CardinalSpline {
    degree: usize,
    pieces: Vec<RatPoly>,
}

impl CardinalSpline {
    pub fn new(degree: usize) -> Self {
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(hit) = cache.lock().unwrap().get(&degree) {
            return hit.clone();
        }
        let built = Self::build(degree);
        cache.lock().unwrap().insert(degree, built.clone());
        built
    }

    fn build(degree: usize) -> Self {
        if degree == 0 {
            return CardinalSpline {
                degree: 0,
                pieces: vec![RatPoly::constant(Rational::one())],
            };
        }
        let prev = Self::new(degree - 1);
        let p = degree;
        let pr = rint(p as i64);
        let mut pieces = Vec::with_capacity(p + 1);
        for j in 0..=p {
            let mut piece = RatPoly::zero();
            if j < prev.pieces.len() {
                // (s / p) * prev_j(s)
                let s_over_p = RatPoly::new(vec![Rational::zero(), Rational::one() / &pr]);
                piece = piece.add(&prev.pieces[j].mul(&s_over_p));
            }
            if j >= 1 && j - 1 < prev.pieces.len() {
                // ((p+1-s) / p) * prev_{j-1}(s-1)
                let shifted = prev.pieces[j - 1].compose_affine(&Rational::one(), &rint(-1));
                let weight = RatPoly::new(vec![rint(p as i64 + 1) / &pr, -(Rational::one() / &pr)]);
                piece = piece.add(&shifted.mul(&weight));
            }
            pieces.push(piece);
        }
        CardinalSpline { degree, pieces }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn piece(&self, j: usize) -> &RatPoly {
        &self.pieces[j]
    }

    /// k-th derivative at a rational point; pieces are right-continuous at the
    /// integer knots, values outside [0, p+1) are zero.
    pub fn eval(&self, k: usize, s: &Rational) -> Result<Rational> {
        if k > self.degree {
            return Err(Error::DerivativeOrder {
                order: k,
                degree: self.degree,
            });
        }
        if s.is_negative() || *s >= rint(self.degree as i64 + 1) {
            return Ok(Rational::zero());
        }
        let j = s.numer().div_floor(s.denom());
        let j: usize = j.to_string().parse().unwrap();
        Ok(self.pieces[j].derivative_n(k).eval(s))
    }
}

type SplineCache = Mutex<HashMap<usize, CardinalSpline>>;
type IntTableCache = Mutex<HashMap<(usize, usize), Vec<Rational>>>;

static CACHE: OnceLock<SplineCache> = OnceLock::new();
static INT_CACHE: OnceLock<IntTableCache> = OnceLock::new();

/// Values of `d^order Phi_degree` at the integers 0..=degree+1 by the
/// pointwise value and differencing recurrences, right-continuous at knots.
/// Avoids building piecewise polynomials, which matters for the doubled
/// degrees the symbols need.
fn integer_table(degree: usize, order: usize) -> Vec<Rational> {
    let cache = INT_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&(degree, order)) {
        return hit.clone();
    }
    let at = |prev: &[Rational], j: i64| -> Rational {
        if j < 0 || j as usize >= prev.len() {
            Rational::zero()
        } else {
            prev[j as usize].clone()
        }
    };
    let table: Vec<Rational> = if order == 0 {
        if degree == 0 {
            vec![Rational::one(), Rational::zero()]
        } else {
            let prev = integer_table(degree - 1, 0);
            (0..=degree as i64 + 1)
                .map(|j| {
                    (rint(j) * at(&prev, j) + rint(degree as i64 + 1 - j) * at(&prev, j - 1))
                        / rint(degree as i64)
                })
                .collect()
        }
    } else {
        let prev = integer_table(degree - 1, order - 1);
        (0..=degree as i64 + 1)
            .map(|j| at(&prev, j) - at(&prev, j - 1))
            .collect()
    };
    cache.lock().unwrap().insert((degree, order), table.clone());
    table
}

/// `d^k/ds^k Phi_p(s)` exactly; integer arguments go through the value
/// recurrence, everything else through the piecewise polynomials.
pub fn cardinal_eval(p: usize, k: usize, s: &Rational) -> Result<Rational> {
    if k > p {
        return Err(Error::DerivativeOrder {
            order: k,
            degree: p,
        });
    }
    if s.is_integer() {
        if s.is_negative() || *s > rint(p as i64 + 1) {
            return Ok(Rational::zero());
        }
        let j: usize = s.numer().to_string().parse().unwrap();
        return Ok(integer_table(p, k)[j].clone());
    }
    CardinalSpline::new(p).eval(k, s)
}

/// Exact inner product of cardinal spline derivatives,
/// `int d^{k1} Phi_p(s) d^{k2} Phi_p(s+j) ds`, reduced to a point value of the
/// degree 2p+1 spline: `(-1)^{k2} d^{k1+k2} Phi_{2p+1}(p+1-j)`.
pub fn cardinal_inner(p: usize, k1: usize, k2: usize, j: i64) -> Result<Rational> {
    let total = k1 + k2;
    if total > 2 * p + 1 {
        return Err(Error::InnerProductOrder {
            sum: total,
            max: 2 * p + 1,
            degree: p,
        });
    }
    let arg = rint(p as i64 + 1 - j);
    let v = cardinal_eval(2 * p + 1, total, &arg)?;
    Ok(if k2 % 2 == 1 { -v } else { v })
}

/// Checks the reflection identity
/// `d^k Phi_{2p+1}(p+1+s) == (-1)^k d^k Phi_{2p+1}(p+1-s)` exactly.
pub fn symmetry_holds(p: usize, k: usize, s: &Rational) -> bool {
    let c = rint(p as i64 + 1);
    let right = cardinal_eval(2 * p + 1, k, &(&c + s));
    let left = cardinal_eval(2 * p + 1, k, &(&c - s));
    match (right, left) {
        (Ok(r), Ok(l)) => {
            if k % 2 == 1 {
                r == -l
            } else {
                r == l
            }
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use rand::{Rng, SeedableRng};

    #[test]
    fn golden_point_values() {
        // Values that pin the mass/stiffness/derivative bands of degree 2.
        assert_eq!(cardinal_eval(5, 0, &rint(3)).unwrap(), rat(11, 20));
        assert_eq!(cardinal_eval(5, 0, &rint(1)).unwrap(), rat(1, 120));
        assert_eq!(cardinal_eval(5, 0, &rint(2)).unwrap(), rat(13, 60));
        assert_eq!(cardinal_eval(3, 0, &rint(7)).unwrap(), rint(0));
        assert_eq!(cardinal_eval(5, 2, &rint(3)).unwrap(), rint(-1));
        assert_eq!(cardinal_eval(5, 4, &rint(3)).unwrap(), rint(6));
        assert_eq!(cardinal_eval(3, 2, &rint(2)).unwrap(), rint(-2));
        assert_eq!(cardinal_eval(3, 2, &rint(1)).unwrap(), rint(1));
        assert!(cardinal_eval(3, 4, &rint(1)).is_err());
    }

    #[test]
    fn golden_inner_products() {
        assert_eq!(cardinal_inner(2, 1, 1, 0).unwrap(), rint(1));
        assert_eq!(cardinal_inner(2, 2, 2, 0).unwrap(), rint(6));
        assert_eq!(cardinal_inner(2, 0, 0, 2).unwrap(), rat(1, 120));
        assert!(cardinal_inner(2, 3, 3, 0).is_err());
    }

    #[test]
    fn inner_product_change_of_variables() {
        // inner(p, k1, k2, j) == inner(p, k2, k1, -j)
        for p in 1..=8usize {
            for k1 in 0..=p {
                for k2 in 0..=p {
                    for j in -(p as i64 + 1)..=(p as i64 + 1) {
                        assert_eq!(
                            cardinal_inner(p, k1, k2, j).unwrap(),
                            cardinal_inner(p, k2, k1, -j).unwrap(),
                            "p={p} k1={k1} k2={k2} j={j}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn reflection_symmetry() {
        assert!(symmetry_holds(2, 0, &rat(1, 2)));
        assert!(symmetry_holds(1, 2, &rint(1)));
        assert!(symmetry_holds(3, 1, &rint(0)));
        for p in 1..=4usize {
            for k in 0..=2 * p {
                for s in [rat(1, 3), rat(5, 7), rint(1), rat(9, 4)] {
                    assert!(symmetry_holds(p, k, &s), "p={p} k={k} s={s}");
                }
            }
        }
    }

    #[test]
    fn partition_of_unity_random_rationals() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for p in 0..=11usize {
            let spline = CardinalSpline::new(p);
            for _ in 0..100 {
                let den = rng.gen_range(1..=97i64);
                let num = rng.gen_range(0..=den * (p as i64 + 1) - 1);
                let s = rat(num, den);
                let mut total = Rational::zero();
                for j in -(p as i64 + 2)..=(p as i64 + 2) {
                    total += spline.eval(0, &(&s - rint(j))).unwrap();
                }
                assert!(total.is_one(), "partition of unity fails p={p} s={s}");
            }
        }
    }

    #[test]
    fn knot_continuity_up_to_p_minus_1() {
        for p in 1..=11usize {
            let spline = CardinalSpline::new(p);
            for k in 0..=p.saturating_sub(1) {
                for knot in 1..=p {
                    let left = spline
                        .piece(knot - 1)
                        .derivative_n(k)
                        .eval(&rint(knot as i64));
                    let right = spline.piece(knot).derivative_n(k).eval(&rint(knot as i64));
                    assert_eq!(left, right, "p={p} k={k} knot={knot}");
                }
            }
        }
    }

    #[test]
    fn integer_table_matches_piecewise_route() {
        for p in 0..=9usize {
            let spline = CardinalSpline::new(p);
            for k in 0..=p {
                for j in -1..=(p as i64 + 2) {
                    let s = rint(j);
                    let fast = cardinal_eval(p, k, &s).unwrap();
                    let slow = spline.eval(k, &s).unwrap();
                    assert_eq!(fast, slow, "p={p} k={k} j={j}");
                }
            }
        }
    }

    #[test]
    fn inner_products_match_quadrature() {
        // Composite Gauss-Legendre with a degree-exact node count per unit
        // interval reproduces the exact inner products to 1e-12 relative.
        use crate::exact::to_f64;
        for p in 1..=6usize {
            let spline = CardinalSpline::new(p);
            // Pieces shifted exactly to local coordinates on [0, 1) before
            // rounding; the global-variable polynomials cancel too many
            // digits in floating point.
            let pieces_f64: Vec<Vec<Vec<f64>>> = (0..=p)
                .map(|k| {
                    (0..=p)
                        .map(|j| {
                            spline
                                .piece(j)
                                .derivative_n(k)
                                .compose_affine(&Rational::one(), &rint(j as i64))
                                .coeffs()
                                .iter()
                                .map(to_f64)
                                .collect()
                        })
                        .collect()
                })
                .collect();
            let eval = |k: usize, s: f64| -> f64 {
                if !(0.0..(p as f64 + 1.0)).contains(&s) {
                    return 0.0;
                }
                let j = (s.floor() as usize).min(p);
                let tau = s - j as f64;
                let mut acc = 0.0;
                for c in pieces_f64[k][j].iter().rev() {
                    acc = acc * tau + c;
                }
                acc
            };
            for k1 in 0..=p {
                for k2 in 0..=p {
                    for j in -(p as i64 + 1)..=(p as i64 + 1) {
                        let exact = to_f64(&cardinal_inner(p, k1, k2, j).unwrap());
                        let mut quad = 0.0;
                        for m in 0..=p as i64 {
                            quad += crate::quadrature::integrate(
                                |s| eval(k1, s) * eval(k2, s + j as f64),
                                m as f64,
                                m as f64 + 1.0,
                                p + 1,
                            );
                        }
                        assert!(
                            (exact - quad).abs() <= 1e-12 * (1.0 + exact.abs()),
                            "p={p} k1={k1} k2={k2} j={j}: exact {exact} vs quadrature {quad}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn nonnegative_on_support() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for p in 0..=8usize {
            for _ in 0..50 {
                let den = rng.gen_range(1..=50i64);
                let num = rng.gen_range(0..den * (p as i64 + 1));
                let v = cardinal_eval(p, 0, &rat(num, den)).unwrap();
                assert!(!v.is_negative());
            }
        }
    }
}

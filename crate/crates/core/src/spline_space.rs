//! Open-knot-vector spline spaces on uniform meshes: Cox-de Boor basis
//! construction as exact piecewise polynomials, and exact inner products of
//! derivatives over [0, T].

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact::{format_rational, rint, Rational};
use crate::poly::RatPoly;

/// Open knot vector with maximal interior regularity: the first and last
/// knots repeat p+1 times, interior knots `l T / N` are simple.
#[derive(Debug, Clone)]
pub struct KnotVector {
    pub degree: usize,
    pub elements: usize,
    pub t_end: Rational,
    pub knots: Vec<Rational>,
}

impl KnotVector {
    pub fn open_uniform(degree: usize, elements: usize, t_end: Rational) -> Result<Self> {
        if degree < 1 {
            return Err(Error::InvalidParameter("degree must be >= 1".into()));
        }
        if elements < 1 {
            return Err(Error::InvalidParameter("need at least one element".into()));
        }
        if !t_end.is_positive() {
            return Err(Error::InvalidParameter("T must be positive".into()));
        }
        let mut knots = Vec::with_capacity(2 * degree + elements + 1);
        for _ in 0..=degree {
            knots.push(Rational::zero());
        }
        for l in 1..elements {
            knots.push(&t_end * rint(l as i64) / rint(elements as i64));
        }
        for _ in 0..=degree {
            knots.push(t_end.clone());
        }
        Ok(KnotVector {
            degree,
            elements,
            t_end,
            knots,
        })
    }

    pub fn mesh_size(&self) -> Rational {
        &self.t_end / rint(self.elements as i64)
    }

    pub fn breakpoints(&self) -> Vec<Rational> {
        (0..=self.elements)
            .map(|l| &self.t_end * rint(l as i64) / rint(self.elements as i64))
            .collect()
    }
}

/// One basis function, stored as polynomials per mesh element over its
/// contiguous support.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisFunction {
    pub first_element: usize,
    pub pieces: Vec<RatPoly>,
}

impl BasisFunction {
    fn zero() -> Self {
        BasisFunction {
            first_element: 0,
            pieces: Vec::new(),
        }
    }

    pub fn piece_on(&self, element: usize) -> Option<&RatPoly> {
        if element >= self.first_element && element < self.first_element + self.pieces.len() {
            Some(&self.pieces[element - self.first_element])
        } else {
            None
        }
    }

    fn last_element_excl(&self) -> usize {
        self.first_element + self.pieces.len()
    }

    fn trim(mut self) -> Self {
        while self.pieces.first().is_some_and(|p| p.is_zero()) {
            self.pieces.remove(0);
            self.first_element += 1;
        }
        while self.pieces.last().is_some_and(|p| p.is_zero()) {
            self.pieces.pop();
        }
        if self.pieces.is_empty() {
            self.first_element = 0;
        }
        self
    }
}

/// All N+p basis functions of the spline space on [0, T].
#[derive(Debug, Clone)]
pub struct SplineBasis {
    pub knot_vector: KnotVector,
    pub functions: Vec<BasisFunction>,
    breakpoints: Vec<Rational>,
}

/// Builds the full basis by the Cox-de Boor recursion; any term with a zero
/// denominator (repeated knots) is dropped.
pub fn build_basis(degree: usize, elements: usize, t_end: Rational) -> Result<SplineBasis> {
    let kv = KnotVector::open_uniform(degree, elements, t_end)?;
    let knots = &kv.knots;
    let breakpoints = kv.breakpoints();
    let elem_of = |x: &Rational| -> usize {
        breakpoints
            .iter()
            .position(|b| b == x)
            .expect("knot is a breakpoint")
    };

    // Degree 0: indicator of [xi_j, xi_{j+1}).
    let mut level: Vec<BasisFunction> = (0..knots.len() - 1)
        .map(|j| {
            if knots[j] < knots[j + 1] {
                let start = elem_of(&knots[j]);
                let stop = elem_of(&knots[j + 1]);
                BasisFunction {
                    first_element: start,
                    pieces: vec![RatPoly::constant(Rational::one()); stop - start],
                }
            } else {
                BasisFunction::zero()
            }
        })
        .collect();

    for d in 1..=degree {
        let mut next = Vec::with_capacity(knots.len() - 1 - d);
        for j in 0..knots.len() - 1 - d {
            let left = &level[j];
            let right = &level[j + 1];
            let den1 = &knots[j + d] - &knots[j];
            let den2 = &knots[j + d + 1] - &knots[j + 1];
            let start = match (left.pieces.is_empty(), right.pieces.is_empty()) {
                (true, true) => {
                    next.push(BasisFunction::zero());
                    continue;
                }
                (true, false) => right.first_element,
                (false, true) => left.first_element,
                (false, false) => left.first_element.min(right.first_element),
            };
            let stop = left.last_element_excl().max(right.last_element_excl());
            let mut pieces = vec![RatPoly::zero(); stop - start];
            if !den1.is_zero() {
                let w = RatPoly::new(vec![-&knots[j] / &den1, Rational::one() / &den1]);
                for e in left.first_element..left.last_element_excl() {
                    let poly = left.piece_on(e).unwrap().mul(&w);
                    pieces[e - start] = pieces[e - start].add(&poly);
                }
            }
            if !den2.is_zero() {
                let w = RatPoly::new(vec![&knots[j + d + 1] / &den2, -(Rational::one() / &den2)]);
                for e in right.first_element..right.last_element_excl() {
                    let poly = right.piece_on(e).unwrap().mul(&w);
                    pieces[e - start] = pieces[e - start].add(&poly);
                }
            }
            next.push(
                BasisFunction {
                    first_element: start,
                    pieces,
                }
                .trim(),
            );
        }
        level = next;
    }

    Ok(SplineBasis {
        knot_vector: kv,
        functions: level,
        breakpoints,
    })
}

impl SplineBasis {
    pub fn degree(&self) -> usize {
        self.knot_vector.degree
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    /// k-th derivative of basis function `j` at `t`, right-continuous at the
    /// break points; zero outside the support and at `t = T`.
    pub fn eval(&self, j: usize, k: usize, t: &Rational) -> Result<Rational> {
        if j >= self.functions.len() {
            return Err(Error::IndexOutOfRange(format!("basis index {j}")));
        }
        if k > self.degree() {
            return Err(Error::DerivativeOrder {
                order: k,
                degree: self.degree(),
            });
        }
        if t.is_negative() || *t >= self.knot_vector.t_end {
            return Ok(Rational::zero());
        }
        let n = self.knot_vector.elements;
        let scaled = t * rint(n as i64) / &self.knot_vector.t_end;
        let e: usize = num_integer::Integer::div_floor(scaled.numer(), scaled.denom())
            .to_string()
            .parse()
            .unwrap();
        match self.functions[j].piece_on(e) {
            Some(p) => Ok(p.derivative_n(k).eval(t)),
            None => Ok(Rational::zero()),
        }
    }

    /// Exact `int_0^T d^{k1} phi_i d^{k2} phi_j dt` by piecewise polynomial
    /// antiderivatives.
    pub fn inner(&self, i: usize, j: usize, k1: usize, k2: usize) -> Result<Rational> {
        if i >= self.functions.len() || j >= self.functions.len() {
            return Err(Error::IndexOutOfRange(format!(
                "basis indices ({i}, {j}) with {} functions",
                self.functions.len()
            )));
        }
        let p = self.degree();
        if k1 > p || k2 > p {
            return Err(Error::DerivativeOrder {
                order: k1.max(k2),
                degree: p,
            });
        }
        let a = &self.functions[i];
        let b = &self.functions[j];
        let lo = a.first_element.max(b.first_element);
        let hi = a.last_element_excl().min(b.last_element_excl());
        let mut total = Rational::zero();
        for e in lo..hi {
            let pa = a.piece_on(e).unwrap().derivative_n(k1);
            let pb = b.piece_on(e).unwrap().derivative_n(k2);
            if pa.is_zero() || pb.is_zero() {
                continue;
            }
            let anti = pa.mul(&pb).antiderivative();
            total += anti.eval(&self.breakpoints[e + 1]) - anti.eval(&self.breakpoints[e]);
        }
        Ok(total)
    }

    /// JSON dump of break points and per-piece coefficient lists, rationals as
    /// `num/den` strings.
    pub fn to_json(&self) -> Value {
        json!({
            "degree": self.degree(),
            "elements": self.knot_vector.elements,
            "t_end": format_rational(&self.knot_vector.t_end),
            "breakpoints": self.breakpoints.iter().map(format_rational).collect::<Vec<_>>(),
            "functions": self.functions.iter().map(|f| json!({
                "first_element": f.first_element,
                "pieces": f.pieces.iter().map(|p| {
                    p.coeffs().iter().map(format_rational).collect::<Vec<_>>()
                }).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

//! Sparse complex multivariate polynomials in canonical form.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::model::C64;

/// Largest total degree the Gaussian moment engine accepts.
pub const MAX_DEGREE: u32 = 8;

/// Exponent multi-index, one entry per variable.
pub type Monomial = Vec<u32>;

/// A polynomial in `dim` variables with complex coefficients.
///
/// Terms with an exactly-zero coefficient are never stored, so two
/// polynomials are equal iff their term maps are equal.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiPoly {
    dim: usize,
    terms: BTreeMap<Monomial, C64>,
}

impl MultiPoly {
    pub fn zero(dim: usize) -> Self {
        Self { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: C64) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(vec![0; dim], c);
        p
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, C64::new(1.0, 0.0))
    }

    /// The coordinate `q_i`.
    pub fn var(dim: usize, i: usize) -> Self {
        assert!(i < dim, "variable index {i} out of range for dimension {dim}");
        let mut e = vec![0; dim];
        e[i] = 1;
        let mut p = Self::zero(dim);
        p.add_term(e, C64::new(1.0, 0.0));
        p
    }

    /// `|q|^2 = sum_i q_i^2`.
    pub fn norm_sq(dim: usize) -> Self {
        let mut p = Self::zero(dim);
        for i in 0..dim {
            let mut e = vec![0; dim];
            e[i] = 2;
            p.add_term(e, C64::new(1.0, 0.0));
        }
        p
    }

    /// `x . q` for a fixed complex vector `x`.
    pub fn dot(x: &[C64]) -> Self {
        let dim = x.len();
        let mut p = Self::zero(dim);
        for (i, &xi) in x.iter().enumerate() {
            let mut e = vec![0; dim];
            e[i] = 1;
            p.add_term(e, xi);
        }
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, merging duplicates.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, C64)>,
    {
        let mut p = Self::zero(dim);
        for (e, c) in terms {
            if e.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: e.len() });
            }
            p.add_term(e, c);
        }
        p.check_degree()?;
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, e: &[u32]) -> C64 {
        self.terms.get(e).copied().unwrap_or_default()
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum::<u32>()).max().unwrap_or(0)
    }

    pub fn check_degree(&self) -> Result<()> {
        let degree = self.degree();
        if degree > MAX_DEGREE {
            return Err(Error::DegreeOverflow { degree, bound: MAX_DEGREE });
        }
        Ok(())
    }

    fn add_term(&mut self, e: Monomial, c: C64) {
        if c == C64::default() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == C64::default() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut p = Self::zero(self.dim);
        for (e, v) in &self.terms {
            p.add_term(e.clone(), v * c);
        }
        p
    }

    pub fn evaluate(&self, q: &[C64]) -> C64 {
        assert_eq!(q.len(), self.dim);
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter().zip(q).fold(*c, |acc, (&k, &x)| acc * x.powu(k))
            })
            .sum()
    }

    /// The polynomial `u -> p(u + c)`, expanded exactly by the binomial theorem.
    pub fn shift(&self, c: &[C64]) -> Self {
        assert_eq!(c.len(), self.dim);
        let mut out = Self::zero(self.dim);
        for (e, coef) in &self.terms {
            // Expand prod_i (u_i + c_i)^{k_i} one axis at a time.
            let mut partial: Vec<(Monomial, C64)> = vec![(vec![0; self.dim], *coef)];
            for (axis, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let mut next = Vec::with_capacity(partial.len() * (k as usize + 1));
                for (pe, pc) in &partial {
                    for j in 0..=k {
                        let mut ne = pe.clone();
                        ne[axis] = j;
                        let w = binomial(k, j) * c[axis].powu(k - j);
                        next.push((ne, pc * w));
                    }
                }
                partial = next;
            }
            for (pe, pc) in partial {
                out.add_term(pe, pc);
            }
        }
        out
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

impl Add for &MultiPoly {
    type Output = MultiPoly;

    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.dim, rhs.dim);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;

    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.dim, rhs.dim);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;

    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.dim, rhs.dim);
        let mut out = MultiPoly::zero(self.dim);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Monomial = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;

    fn neg(self) -> MultiPoly {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Add for MultiPoly {
    type Output = MultiPoly;

    fn add(self, rhs: MultiPoly) -> MultiPoly {
        &self + &rhs
    }
}

impl Sub for MultiPoly {
    type Output = MultiPoly;

    fn sub(self, rhs: MultiPoly) -> MultiPoly {
        &self - &rhs
    }
}

impl Mul for MultiPoly {
    type Output = MultiPoly;

    fn mul(self, rhs: MultiPoly) -> MultiPoly {
        &self * &rhs
    }
}

impl Mul<C64> for MultiPoly {
    type Output = MultiPoly;

    fn mul(self, rhs: C64) -> MultiPoly {
        self.scale(rhs)
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;

    fn neg(self) -> MultiPoly {
        -&self
    }
}

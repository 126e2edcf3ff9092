//! The free algebra `A = T(B(H)*)` on the matrix coefficients `u_ij`, with
//! its bialgebra structure and the graded coordinates of `A_n`.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::scalar::{ipow, modulus, one, zero, Real, C};
use crate::tensor::{decode_multi_index, encode_multi_index};

/// `u^{(k)}_{rows,cols} = u_{rows[0] cols[0]} ··· u_{rows[k-1] cols[k-1]}` (0-based).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl Monomial {
    pub fn new(rows: Vec<usize>, cols: Vec<usize>) -> Result<Self> {
        if rows.len() != cols.len() {
            return Err(Error::Invalid(format!(
                "monomial rows ({}) and cols ({}) differ in length",
                rows.len(),
                cols.len()
            )));
        }
        Ok(Self { rows, cols })
    }

    pub fn unit() -> Self {
        Self {
            rows: Vec::new(),
            cols: Vec::new(),
        }
    }

    pub fn generator(i: usize, j: usize) -> Self {
        Self {
            rows: vec![i],
            cols: vec![j],
        }
    }

    pub fn degree(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn cols(&self) -> &[usize] {
        &self.cols
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut rows = self.rows.clone();
        rows.extend_from_slice(&other.rows);
        let mut cols = self.cols.clone();
        cols.extend_from_slice(&other.cols);
        Self { rows, cols }
    }

    /// Factors `(rows[t], cols[t])` in order.
    pub fn factors(&self) -> impl DoubleEndedIterator<Item = (usize, usize)> + '_ {
        self.rows.iter().copied().zip(self.cols.iter().copied())
    }

    fn check(&self, dim: usize) -> Result<()> {
        if self.rows.iter().chain(&self.cols).any(|&i| i >= dim) {
            return Err(Error::Invalid(format!(
                "monomial index out of range for d={dim}"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rows.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .factors()
            .map(|(i, j)| format!("u{}{}", i + 1, j + 1))
            .collect();
        write!(f, "{}", parts.join("·"))
    }
}

/// `dim A_n = Σ_{k≤n} d^{2k}`.
pub fn algebra_dim(d: usize, n: usize) -> usize {
    (0..=n).map(|k| ipow(d, 2 * k)).sum()
}

/// Offset of the degree-`k` block in the coordinates of `A_n`.
pub fn degree_offset(d: usize, k: usize) -> usize {
    (0..k).map(|m| ipow(d, 2 * m)).sum()
}

/// Coordinate of a monomial: degree block, then row multi-index, then column.
pub fn monomial_coordinate(d: usize, m: &Monomial) -> usize {
    let k = m.degree();
    degree_offset(d, k)
        + encode_multi_index(d, &m.rows) * ipow(d, k)
        + encode_multi_index(d, &m.cols)
}

/// Inverse of [`monomial_coordinate`].
pub fn coordinate_monomial(d: usize, mut pos: usize) -> Monomial {
    let mut k = 0;
    loop {
        let size = ipow(d, 2 * k);
        if pos < size {
            let dk = ipow(d, k);
            return Monomial {
                rows: decode_multi_index(d, k, pos / dk),
                cols: decode_multi_index(d, k, pos % dk),
            };
        }
        pos -= size;
        k += 1;
    }
}

/// Finite linear combination of monomials.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement<T: Real> {
    dim: usize,
    terms: BTreeMap<Monomial, C<T>>,
}

impl<T: Real> AlgebraElement<T> {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn unit(dim: usize) -> Self {
        Self::monomial(dim, Monomial::unit(), one())
    }

    pub fn generator(dim: usize, i: usize, j: usize) -> Self {
        Self::monomial(dim, Monomial::generator(i, j), one())
    }

    pub fn monomial(dim: usize, m: Monomial, coef: C<T>) -> Self {
        let mut out = Self::zero(dim);
        out.add_term(m, coef);
        out
    }

    pub fn from_terms(
        dim: usize,
        terms: impl IntoIterator<Item = (Monomial, C<T>)>,
    ) -> Result<Self> {
        let mut out = Self::zero(dim);
        for (m, c) in terms {
            m.check(dim)?;
            out.add_term(m, c);
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, C<T>> {
        &self.terms
    }

    pub fn coefficient(&self, m: &Monomial) -> C<T> {
        self.terms.get(m).copied().unwrap_or_else(zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest degree present (0 for the zero element).
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: Monomial, coef: C<T>) {
        let slot = self.terms.entry(m).or_insert_with(zero);
        *slot += coef;
        if *slot == zero() {
            let key = self
                .terms
                .iter()
                .find(|(_, v)| **v == zero())
                .map(|(k, _)| k.clone());
            if let Some(k) = key {
                self.terms.remove(&k);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), *c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-one::<T>()))
    }

    pub fn scale(&self, s: C<T>) -> Self {
        let mut out = Self::zero(self.dim);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), *c * s);
        }
        out
    }

    /// Drops coefficients with modulus at most `tol` times the largest.
    pub fn pruned(&self, tol: T) -> Self {
        let max = self
            .terms
            .values()
            .map(|c| modulus(*c))
            .fold(T::zero(), |a, b| if b > a { b } else { a });
        let terms = self
            .terms
            .iter()
            .filter(|(_, c)| modulus(**c) > tol * max)
            .map(|(m, c)| (m.clone(), *c))
            .collect();
        Self {
            dim: self.dim,
            terms,
        }
    }

    /// Concatenation product, extended bilinearly.
    pub fn multiply(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.dim);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.add_term(a.concat(b), *ca * *cb);
            }
        }
        out
    }

    /// `ε(u_ij) = δ_ij`, extended multiplicatively.
    pub fn counit(&self) -> C<T> {
        self.terms
            .iter()
            .filter(|(m, _)| m.rows == m.cols)
            .fold(zero(), |acc, (_, c)| acc + *c)
    }

    /// `Δ(u^{(k)}_{i,j}) = Σ_m u^{(k)}_{i,m} ⊗ u^{(k)}_{m,j}`.
    pub fn comultiply(&self) -> TensorElement<T> {
        let d = self.dim;
        let mut out = TensorElement::zero(d);
        for (m, c) in &self.terms {
            let k = m.degree();
            for pos in 0..ipow(d, k) {
                let mid = decode_multi_index(d, k, pos);
                out.add_term(
                    Monomial {
                        rows: m.rows.clone(),
                        cols: mid.clone(),
                    },
                    Monomial {
                        rows: mid,
                        cols: m.cols.clone(),
                    },
                    *c,
                );
            }
        }
        out
    }

    /// Coordinates in `A_n`.
    pub fn to_coordinates(&self, n: usize) -> Result<DVector<C<T>>> {
        let deg = self.degree();
        if deg > n {
            return Err(Error::DegreeOverflow {
                degree: deg,
                level: n,
            });
        }
        let mut v = DVector::zeros(algebra_dim(self.dim, n));
        for (m, c) in &self.terms {
            v[monomial_coordinate(self.dim, m)] = *c;
        }
        Ok(v)
    }

    pub fn from_coordinates(dim: usize, v: &DVector<C<T>>) -> Self {
        let mut out = Self::zero(dim);
        for (pos, c) in v.iter().enumerate() {
            if *c != zero() {
                out.terms.insert(coordinate_monomial(dim, pos), *c);
            }
        }
        out
    }

    /// Extends a generator table antimultiplicatively; `conjugate` makes the
    /// extension antilinear as well.
    pub fn anti_extend(&self, table: &GeneratorTable<T>, conjugate: bool) -> Self {
        let mut out = Self::zero(self.dim);
        for (m, c) in &self.terms {
            let coef = if conjugate { c.conj() } else { *c };
            let mut acc = Self::unit(self.dim).scale(coef);
            for (i, j) in m.factors().rev() {
                acc = acc.multiply(table.image(i, j));
            }
            out = out.add(&acc);
        }
        out
    }
}

impl<T: Real> fmt::Display for AlgebraElement<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let (re, im) = (
                    c.re.to_f64().unwrap_or(f64::NAN),
                    c.im.to_f64().unwrap_or(f64::NAN),
                );
                if im == 0.0 {
                    format!("{re}·{m}")
                } else {
                    format!("({re}{im:+}i)·{m}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Images of the generators `u_ij` under a (anti)multiplicative map.
#[derive(Clone, Debug)]
pub struct GeneratorTable<T: Real> {
    dim: usize,
    images: Vec<AlgebraElement<T>>,
}

impl<T: Real> GeneratorTable<T> {
    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> AlgebraElement<T>) -> Self {
        let images = (0..dim * dim).map(|p| f(p / dim, p % dim)).collect();
        Self { dim, images }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn image(&self, i: usize, j: usize) -> &AlgebraElement<T> {
        &self.images[i * self.dim + j]
    }
}

/// Element of `A ⊗ A`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorElement<T: Real> {
    dim: usize,
    terms: BTreeMap<(Monomial, Monomial), C<T>>,
}

impl<T: Real> TensorElement<T> {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn terms(&self) -> &BTreeMap<(Monomial, Monomial), C<T>> {
        &self.terms
    }

    pub fn add_term(&mut self, a: Monomial, b: Monomial, coef: C<T>) {
        let key = (a, b);
        let slot = self.terms.entry(key.clone()).or_insert_with(zero);
        *slot += coef;
        if *slot == zero() {
            self.terms.remove(&key);
        }
    }

    pub fn pure(a: &AlgebraElement<T>, b: &AlgebraElement<T>) -> Self {
        let mut out = Self::zero(a.dim);
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                out.add_term(ma.clone(), mb.clone(), *ca * *cb);
            }
        }
        out
    }

    /// Coordinates in `A_n ⊗ A_n` (index `left * dim A_n + right`).
    pub fn to_coordinates(&self, n: usize) -> Result<DVector<C<T>>> {
        let big = algebra_dim(self.dim, n);
        let mut v = DVector::zeros(big * big);
        for ((a, b), c) in &self.terms {
            let deg = a.degree().max(b.degree());
            if deg > n {
                return Err(Error::DegreeOverflow {
                    degree: deg,
                    level: n,
                });
            }
            v[monomial_coordinate(self.dim, a) * big + monomial_coordinate(self.dim, b)] = *c;
        }
        Ok(v)
    }
}

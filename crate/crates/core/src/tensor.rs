//! Graded operators `H^⊗k → H^⊗l` on `H = C^d` and the primitive moves
//! of the category they generate.
//!
//! Multi-indices are big-endian: the first tensor leg is the most
//! significant digit, so `kronecker` products keep the left factor's legs
//! in front.

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::{ipow, modulus, one, zero, Real, C};

/// Position of a multi-index `idx ∈ {0..d}^k` in big-endian order.
pub fn encode_multi_index(d: usize, idx: &[usize]) -> usize {
    idx.iter().fold(0, |acc, &i| {
        debug_assert!(i < d);
        acc * d + i
    })
}

/// Inverse of [`encode_multi_index`].
pub fn decode_multi_index(d: usize, k: usize, mut pos: usize) -> Vec<usize> {
    let mut out = vec![0; k];
    for slot in out.iter_mut().rev() {
        *slot = pos % d;
        pos /= d;
    }
    out
}

/// Operator between tensor powers of `C^dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct InterOp<T: Real> {
    dim: usize,
    source: usize,
    target: usize,
    matrix: DMatrix<C<T>>,
}

impl<T: Real> InterOp<T> {
    pub fn new(dim: usize, source: usize, target: usize, matrix: DMatrix<C<T>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Invalid("dimension must be positive".into()));
        }
        let (rows, cols) = (ipow(dim, target), ipow(dim, source));
        if matrix.nrows() != rows || matrix.ncols() != cols {
            return Err(Error::Shape {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
                expected_rows: rows,
                expected_cols: cols,
            });
        }
        Ok(Self {
            dim,
            source,
            target,
            matrix,
        })
    }

    pub fn zero(dim: usize, source: usize, target: usize) -> Self {
        let m = DMatrix::zeros(ipow(dim, target), ipow(dim, source));
        Self {
            dim,
            source,
            target,
            matrix: m,
        }
    }

    pub fn identity(dim: usize, k: usize) -> Self {
        let n = ipow(dim, k);
        Self {
            dim,
            source: k,
            target: k,
            matrix: DMatrix::identity(n, n),
        }
    }

    /// `r(1) = Σ_i e_i ⊗ e_i`.
    pub fn duality_r(dim: usize) -> Self {
        let mut m = DMatrix::zeros(dim * dim, 1);
        for i in 0..dim {
            m[(i * dim + i, 0)] = one();
        }
        Self {
            dim,
            source: 0,
            target: 2,
            matrix: m,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn target(&self) -> usize {
        self.target
    }

    /// `(source, target)`.
    pub fn grading(&self) -> (usize, usize) {
        (self.source, self.target)
    }

    pub fn matrix(&self) -> &DMatrix<C<T>> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C<T>> {
        self.matrix
    }

    /// Entry at multi-indices `(row, col)`.
    pub fn entry(&self, row: &[usize], col: &[usize]) -> C<T> {
        self.matrix[(
            encode_multi_index(self.dim, row),
            encode_multi_index(self.dim, col),
        )]
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(Self {
            dim: self.dim,
            source: self.source + other.source,
            target: self.target + other.target,
            matrix: self.matrix.kronecker(&other.matrix),
        })
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        self.same_dim(inner)?;
        if self.source != inner.target {
            return Err(Error::GradingMismatch {
                outer_source: self.source,
                inner_target: inner.target,
            });
        }
        Ok(Self {
            dim: self.dim,
            source: inner.source,
            target: self.target,
            matrix: &self.matrix * &inner.matrix,
        })
    }

    pub fn adjoint(&self) -> Self {
        Self {
            dim: self.dim,
            source: self.target,
            target: self.source,
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            dim: self.dim,
            source: self.target,
            target: self.source,
            matrix: self.matrix.transpose(),
        }
    }

    /// Entrywise complex conjugate.
    pub fn conjugate(&self) -> Self {
        Self {
            matrix: self.matrix.map(|z| z.conj()),
            ..self.clone()
        }
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self {
            matrix: self.matrix.map(|z| z * s),
            ..self.clone()
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self {
            matrix: &self.matrix + &other.matrix,
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self {
            matrix: &self.matrix - &other.matrix,
            ..self.clone()
        })
    }

    /// `⟨self, other⟩ = Tr(other* self)`.
    pub fn hs_inner(&self, other: &Self) -> C<T> {
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .fold(zero(), |acc, (a, b)| acc + *a * b.conj())
    }

    pub fn hs_norm(&self) -> T {
        self.matrix.norm()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.matrix
            .iter()
            .map(|z| modulus(*z))
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }

    /// Entries as a flat vector (column-major); the HS inner product becomes
    /// the standard Hermitian one.
    pub fn to_vector(&self) -> DVector<C<T>> {
        DVector::from_column_slice(self.matrix.as_slice())
    }

    pub fn from_vector(dim: usize, source: usize, target: usize, v: &DVector<C<T>>) -> Self {
        let m = DMatrix::from_column_slice(ipow(dim, target), ipow(dim, source), v.as_slice());
        Self {
            dim,
            source,
            target,
            matrix: m,
        }
    }

    /// `F^{⊗k} · self` style helpers take the operator on the left.
    pub fn left_mul(&self, m: &DMatrix<C<T>>) -> Self {
        Self {
            matrix: m * &self.matrix,
            ..self.clone()
        }
    }

    pub fn right_mul(&self, m: &DMatrix<C<T>>) -> Self {
        Self {
            matrix: &self.matrix * m,
            ..self.clone()
        }
    }

    /// True when every entry differs by at most `tol * max(1, scale)`.
    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        if self.grading() != other.grading() || self.dim != other.dim {
            return false;
        }
        let scale = self.max_abs().max(other.max_abs()).max(T::one());
        (&self.matrix - &other.matrix)
            .iter()
            .all(|z| modulus(*z) <= tol * scale)
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        self.same_dim(other)?;
        if self.grading() != other.grading() {
            return Err(Error::WrongGrading {
                expected_k: self.source,
                expected_l: self.target,
                k: other.source,
                l: other.target,
            });
        }
        Ok(())
    }
}

/// Sign `s` in `(R*⊗ι)(ι⊗R) = s·ι`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn as_real<T: Real>(self) -> T {
        match self {
            Sign::Plus => T::one(),
            Sign::Minus => -T::one(),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

/// Invertible `d×d` matrix with `R = (ι⊗F) r`.
#[derive(Clone, Debug)]
pub struct FMatrix<T: Real> {
    entries: DMatrix<C<T>>,
    inverse: DMatrix<C<T>>,
    sign: Option<Sign>,
}

impl<T: Real> FMatrix<T> {
    pub fn new(entries: DMatrix<C<T>>, tol: T) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() == 0 {
            return Err(Error::Shape {
                rows: entries.nrows(),
                cols: entries.ncols(),
                expected_rows: entries.nrows().max(1),
                expected_cols: entries.nrows().max(1),
            });
        }
        let sv = entries.clone().svd(false, false).singular_values;
        let max = sv.max();
        let min = sv.min();
        if max == T::zero() || min <= tol * max {
            return Err(Error::NotInvertible {
                smallest: min.to_f64().unwrap_or(0.0),
            });
        }
        let inverse = entries.clone().try_inverse().ok_or(Error::NotInvertible {
            smallest: min.to_f64().unwrap_or(0.0),
        })?;
        let sign = sign_of_conjugate_square(&entries, tol);
        Ok(Self {
            entries,
            inverse,
            sign,
        })
    }

    pub fn identity(d: usize) -> Self {
        Self::new(DMatrix::identity(d, d), T::default_tolerance()).expect("identity is invertible")
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<C<T>> {
        &self.entries
    }

    pub fn inverse(&self) -> &DMatrix<C<T>> {
        &self.inverse
    }

    /// `s` with `F F̄ = s·1`, if any.
    pub fn sign(&self) -> Option<Sign> {
        self.sign
    }

    pub fn require_sign(&self) -> Result<Sign> {
        self.sign.ok_or(Error::SignUndefined)
    }

    /// `F^{⊗k}` (the `1×1` identity for `k = 0`).
    pub fn power(&self, k: usize) -> DMatrix<C<T>> {
        kron_power(&self.entries, k)
    }

    /// `(F^{-1})^{⊗k}`.
    pub fn inverse_power(&self, k: usize) -> DMatrix<C<T>> {
        kron_power(&self.inverse, k)
    }
}

pub(crate) fn kron_power<T: Real>(m: &DMatrix<C<T>>, k: usize) -> DMatrix<C<T>> {
    (0..k).fold(DMatrix::identity(1, 1), |acc, _| acc.kronecker(m))
}

fn sign_of_conjugate_square<T: Real>(f: &DMatrix<C<T>>, tol: T) -> Option<Sign> {
    let prod = f * f.map(|z| z.conj());
    classify_against_identity(&prod, tol)
}

fn classify_against_identity<T: Real>(m: &DMatrix<C<T>>, tol: T) -> Option<Sign> {
    let n = m.nrows();
    let scale = m
        .iter()
        .map(|z| modulus(*z))
        .fold(T::one(), |a, b| if b > a { b } else { a });
    let id: DMatrix<C<T>> = DMatrix::identity(n, n);
    let close = |s: T| {
        (m - id.map(|z| z * s))
            .iter()
            .all(|z| modulus(*z) <= tol * scale)
    };
    if close(T::one()) {
        Some(Sign::Plus)
    } else if close(-T::one()) {
        Some(Sign::Minus)
    } else {
        None
    }
}

fn require_grading<T: Real>(op: &InterOp<T>, k: usize, l: usize) -> Result<()> {
    if op.grading() != (k, l) {
        return Err(Error::WrongGrading {
            expected_k: k,
            expected_l: l,
            k: op.source,
            l: op.target,
        });
    }
    Ok(())
}

/// The unique `F` with `R = (ι⊗F) r`, i.e. `F_{ji} = ⟨R(1), e_i⊗e_j⟩`.
pub fn extract_f<T: Real>(r: &InterOp<T>, tol: T) -> Result<FMatrix<T>> {
    require_grading(r, 0, 2)?;
    let d = r.dim();
    let f = DMatrix::from_fn(d, d, |j, i| r.matrix[(i * d + j, 0)]);
    FMatrix::new(f, tol)
}

/// `R = (ι⊗F) r`.
pub fn build_r_from_f<T: Real>(f: &FMatrix<T>) -> InterOp<T> {
    let d = f.dim();
    let mut m = DMatrix::zeros(d * d, 1);
    for i in 0..d {
        for j in 0..d {
            m[(i * d + j, 0)] = f.entries[(j, i)];
        }
    }
    InterOp {
        dim: d,
        source: 0,
        target: 2,
        matrix: m,
    }
}

/// `(R*⊗ι)(ι⊗R)`.
pub fn left_snake<T: Real>(r: &InterOp<T>) -> Result<InterOp<T>> {
    require_grading(r, 0, 2)?;
    let id = InterOp::identity(r.dim(), 1);
    r.adjoint().tensor(&id)?.compose(&id.tensor(r)?)
}

/// `(ι⊗R*)(R⊗ι)`.
pub fn right_snake<T: Real>(r: &InterOp<T>) -> Result<InterOp<T>> {
    require_grading(r, 0, 2)?;
    let id = InterOp::identity(r.dim(), 1);
    id.tensor(&r.adjoint())?.compose(&r.tensor(&id)?)
}

/// Detects `s` in `(R*⊗ι)(ι⊗R) = s·ι`; `None` if neither sign fits.
pub fn conjugation_sign<T: Real>(r: &InterOp<T>, tol: T) -> Result<Option<Sign>> {
    let snake = left_snake(r)?;
    Ok(classify_against_identity(snake.matrix(), tol))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    /// Trade a source leg for a target leg: `(k,l) → (k-1,l+1)`.
    Up,
    /// Trade a target leg for a source leg: `(k,l) → (k+1,l-1)`.
    Down,
}

/// Frobenius leg bending with the duality morphism `r_op`.
///
/// * right/up: `(T⊗ι)(ι_{k-1}⊗R)`
/// * right/down: `(ι_{l-1}⊗R*)(T⊗ι)`
/// * left/up: `(ι⊗T)(R⊗ι_{k-1})`
/// * left/down: `(R*⊗ι_{l-1})(ι⊗T)`
pub fn bend<T: Real>(
    t: &InterOp<T>,
    r_op: &InterOp<T>,
    side: Side,
    dir: Direction,
) -> Result<InterOp<T>> {
    require_grading(r_op, 0, 2)?;
    let d = t.dim();
    let (k, l) = t.grading();
    let id1 = InterOp::identity(d, 1);
    match (side, dir) {
        (Side::Right, Direction::Up) => {
            let k1 = k.checked_sub(1).ok_or(Error::GradingUnderflow)?;
            t.tensor(&id1)?
                .compose(&InterOp::identity(d, k1).tensor(r_op)?)
        }
        (Side::Right, Direction::Down) => {
            let l1 = l.checked_sub(1).ok_or(Error::GradingUnderflow)?;
            InterOp::identity(d, l1)
                .tensor(&r_op.adjoint())?
                .compose(&t.tensor(&id1)?)
        }
        (Side::Left, Direction::Up) => {
            let k1 = k.checked_sub(1).ok_or(Error::GradingUnderflow)?;
            id1.tensor(t)?
                .compose(&r_op.tensor(&InterOp::identity(d, k1))?)
        }
        (Side::Left, Direction::Down) => {
            let l1 = l.checked_sub(1).ok_or(Error::GradingUnderflow)?;
            r_op.adjoint()
                .tensor(&InterOp::identity(d, l1))?
                .compose(&id1.tensor(t)?)
        }
    }
}

/// Grading produced by [`bend`], if defined.
pub fn bent_grading(k: usize, l: usize, dir: Direction) -> Option<(usize, usize)> {
    match dir {
        Direction::Up => k.checked_sub(1).map(|k1| (k1, l + 1)),
        Direction::Down => l.checked_sub(1).map(|l1| (k + 1, l1)),
    }
}

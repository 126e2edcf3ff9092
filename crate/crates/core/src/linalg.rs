//! Dense rank revelation: column spans, null spaces and subspace comparison.
//!
//! Every rank decision counts singular values above `tol * sigma_max`.

use nalgebra::{DMatrix, DVector};

use crate::scalar::{Real, C};

/// Singular values of `m`, computed on a square reduction when `m` is tall.
fn singular_values<T: Real>(m: &DMatrix<C<T>>) -> DVector<T> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return DVector::zeros(0);
    }
    if m.nrows() > m.ncols() {
        m.clone().qr().r().svd(false, false).singular_values
    } else {
        m.clone().svd(false, false).singular_values
    }
}

fn threshold<T: Real>(sv: &DVector<T>, tol: T) -> T {
    let max = sv
        .iter()
        .copied()
        .fold(T::zero(), |a, b| if b > a { b } else { a });
    max * tol
}

/// Numerical rank of `m` at relative tolerance `tol`.
pub fn rank<T: Real>(m: &DMatrix<C<T>>, tol: T) -> usize {
    let sv = singular_values(m);
    let thr = threshold(&sv, tol);
    sv.iter().filter(|s| **s > thr && **s > T::zero()).count()
}

/// Orthonormal basis of a subspace of `C^ambient`, stored as columns.
#[derive(Clone, Debug)]
pub struct Subspace<T: Real> {
    basis: DMatrix<C<T>>,
}

impl<T: Real> Subspace<T> {
    pub fn zero(ambient: usize) -> Self {
        Self {
            basis: DMatrix::zeros(ambient, 0),
        }
    }

    /// Wraps columns that are already orthonormal.
    pub fn from_orthonormal(basis: DMatrix<C<T>>) -> Self {
        Self { basis }
    }

    /// Column span of `m`.
    pub fn span_of(m: &DMatrix<C<T>>, tol: T) -> Self {
        let ambient = m.nrows();
        if m.ncols() == 0 || ambient == 0 {
            return Self::zero(ambient);
        }
        // Wide inputs: span(M) = span(R^H) where M^H = QR.
        let reduced = if m.ncols() > ambient {
            m.adjoint().qr().r().adjoint()
        } else {
            m.clone()
        };
        let svd = reduced.svd(true, false);
        let u = svd.u.expect("left singular vectors requested");
        let thr = threshold(&svd.singular_values, tol);
        let keep: Vec<usize> = svd
            .singular_values
            .iter()
            .enumerate()
            .filter(|(_, s)| **s > thr && **s > T::zero())
            .map(|(i, _)| i)
            .collect();
        Self {
            basis: u.select_columns(keep.iter()),
        }
    }

    /// Span of a list of vectors of common length `ambient`.
    pub fn span_of_vectors(ambient: usize, vectors: &[DVector<C<T>>], tol: T) -> Self {
        if vectors.is_empty() {
            return Self::zero(ambient);
        }
        let m = DMatrix::from_fn(ambient, vectors.len(), |i, j| vectors[j][i]);
        Self::span_of(&m, tol)
    }

    pub fn ambient(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<C<T>> {
        &self.basis
    }

    pub fn column(&self, i: usize) -> DVector<C<T>> {
        self.basis.column(i).into_owned()
    }

    /// Orthogonal projection of `v` onto the subspace.
    pub fn project(&self, v: &DVector<C<T>>) -> DVector<C<T>> {
        if self.dim() == 0 {
            return DVector::zeros(v.len());
        }
        let coeffs = self.basis.adjoint() * v;
        &self.basis * coeffs
    }

    /// Norm of the component of `v` orthogonal to the subspace.
    pub fn residual(&self, v: &DVector<C<T>>) -> T {
        (v - self.project(v)).norm()
    }

    /// Residual divided by `max(|v|, tiny)`.
    pub fn relative_residual(&self, v: &DVector<C<T>>) -> T {
        let n = v.norm();
        if n == T::zero() {
            T::zero()
        } else {
            self.residual(v) / n
        }
    }

    /// Largest residual of any basis vector of `other` against `self`.
    pub fn containment_defect(&self, other: &Subspace<T>) -> T {
        (0..other.dim())
            .map(|i| self.residual(&other.column(i)))
            .fold(T::zero(), |a, b| if b > a { b } else { a })
    }

    /// Symmetric distance: `sin` of the largest principal angle when dims agree,
    /// and at least one when they do not.
    pub fn distance(&self, other: &Subspace<T>) -> T {
        if self.dim() != other.dim() {
            return T::one();
        }
        let a = self.containment_defect(other);
        let b = other.containment_defect(self);
        if a > b {
            a
        } else {
            b
        }
    }
}

/// Orthonormal basis of `{x : m x = 0}`.
pub fn null_space<T: Real>(m: &DMatrix<C<T>>, tol: T) -> Subspace<T> {
    let n = m.ncols();
    if n == 0 {
        return Subspace::zero(0);
    }
    if m.nrows() == 0 {
        return Subspace::from_orthonormal(DMatrix::identity(n, n));
    }
    // Square the system up: tall inputs are compressed by QR, wide inputs padded.
    let square = if m.nrows() > n {
        m.clone().qr().r()
    } else if m.nrows() < n {
        let mut padded = DMatrix::zeros(n, n);
        padded.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
        padded
    } else {
        m.clone()
    };
    let svd = square.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let thr = threshold(&svd.singular_values, tol);
    let all_zero = svd.singular_values.iter().all(|s| *s == T::zero());
    let keep: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| all_zero || **s <= thr)
        .map(|(i, _)| i)
        .collect();
    let rows = v_t.select_rows(keep.iter());
    Subspace::from_orthonormal(rows.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{c, re};

    #[test]
    fn rank_of_rank_one_outer_product() {
        let u = DVector::from_vec(vec![re::<f64>(1.0), c(0.0, 2.0), re(-1.0)]);
        let v = DVector::from_vec(vec![re::<f64>(3.0), re(1.0)]);
        let m = &u * v.transpose();
        assert_eq!(rank(&m, 1e-9), 1);
        assert_eq!(rank(&DMatrix::<C<f64>>::zeros(3, 2), 1e-9), 0);
    }

    #[test]
    fn null_space_of_wide_matrix() {
        // x + y + z = 0 has a two-dimensional solution space.
        let m = DMatrix::from_element(1, 3, re::<f64>(1.0));
        let ns = null_space(&m, 1e-9);
        assert_eq!(ns.dim(), 2);
        for i in 0..2 {
            assert!((&m * ns.column(i)).norm() < 1e-12);
        }
        let g = ns.basis().adjoint() * ns.basis();
        assert!((g - DMatrix::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn null_space_of_tall_matrix() {
        let mut m = DMatrix::<C<f64>>::zeros(6, 3);
        for i in 0..6 {
            m[(i, 0)] = re(i as f64);
            m[(i, 1)] = re(2.0 * i as f64);
            m[(i, 2)] = re(1.0);
        }
        let ns = null_space(&m, 1e-9);
        assert_eq!(ns.dim(), 1);
        assert!((&m * ns.column(0)).norm() < 1e-10);
    }

    #[test]
    fn span_and_residual() {
        let vs = vec![
            DVector::from_vec(vec![re::<f64>(1.0), re(0.0), re(0.0)]),
            DVector::from_vec(vec![re::<f64>(2.0), re(0.0), re(0.0)]),
            DVector::from_vec(vec![re::<f64>(0.0), re(1.0), re(0.0)]),
        ];
        let s = Subspace::span_of_vectors(3, &vs, 1e-9);
        assert_eq!(s.dim(), 2);
        let out = DVector::from_vec(vec![re::<f64>(1.0), re(1.0), re(1.0)]);
        assert!((s.residual(&out) - 1.0).abs() < 1e-12);
        let wide: Vec<_> = (0..7).map(|i| vs[i % 3].clone()).collect();
        assert_eq!(Subspace::span_of_vectors(3, &wide, 1e-9).dim(), 2);
        assert!(s.distance(&Subspace::span_of_vectors(3, &wide, 1e-9)) < 1e-12);
    }
}

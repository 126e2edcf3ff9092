//! The commutant `B_n` of a truncated collection inside `⊕_{k≤n} B(H^⊗k)`,
//! its pairing with `A_n`, and the bicommutant consistency check.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::algebra::{algebra_dim, degree_offset, AlgebraElement};
use crate::closure::{Collection, OpSpace};
use crate::error::{Error, Result};
use crate::linalg::{null_space, Subspace};
use crate::scalar::{ipow, zero, Real, C};
use crate::tensor::{encode_multi_index, InterOp};

/// `(X_0, …, X_n)` with `X_k ∈ B(H^⊗k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockOperator<T: Real> {
    dim: usize,
    blocks: Vec<DMatrix<C<T>>>,
}

impl<T: Real> BlockOperator<T> {
    pub fn new(dim: usize, blocks: Vec<DMatrix<C<T>>>) -> Result<Self> {
        for (k, b) in blocks.iter().enumerate() {
            let n = ipow(dim, k);
            if b.nrows() != n || b.ncols() != n {
                return Err(Error::Shape {
                    rows: b.nrows(),
                    cols: b.ncols(),
                    expected_rows: n,
                    expected_cols: n,
                });
            }
        }
        if blocks.is_empty() {
            return Err(Error::Invalid(
                "block operator needs at least the degree-0 block".into(),
            ));
        }
        Ok(Self { dim, blocks })
    }

    pub fn identity(dim: usize, level: usize) -> Self {
        let blocks = (0..=level)
            .map(|k| DMatrix::identity(ipow(dim, k), ipow(dim, k)))
            .collect();
        Self { dim, blocks }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn block(&self, k: usize) -> &DMatrix<C<T>> {
        &self.blocks[k]
    }

    pub fn blocks(&self) -> &[DMatrix<C<T>>] {
        &self.blocks
    }

    /// Coordinates aligned with those of `A_n`: block `k`, entry `(i, j)` at
    /// `offset_k + i·d^k + j`.
    pub fn to_vector(&self) -> DVector<C<T>> {
        let n = self.level();
        let mut v = DVector::zeros(algebra_dim(self.dim, n));
        for (k, b) in self.blocks.iter().enumerate() {
            let off = degree_offset(self.dim, k);
            let size = b.nrows();
            for i in 0..size {
                for j in 0..size {
                    v[off + i * size + j] = b[(i, j)];
                }
            }
        }
        v
    }

    pub fn from_vector(dim: usize, level: usize, v: &DVector<C<T>>) -> Self {
        let blocks = (0..=level)
            .map(|k| {
                let off = degree_offset(dim, k);
                let size = ipow(dim, k);
                DMatrix::from_fn(size, size, |i, j| v[off + i * size + j])
            })
            .collect();
        Self { dim, blocks }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            dim: self.dim,
            blocks: self.blocks.iter().map(|b| b.adjoint()).collect(),
        }
    }

    pub fn product(&self, other: &Self) -> Self {
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a * b)
            .collect();
        Self {
            dim: self.dim,
            blocks,
        }
    }

    /// Blocks `0..=m`.
    pub fn truncated(&self, m: usize) -> Self {
        Self {
            dim: self.dim,
            blocks: self.blocks[..=m.min(self.level())].to_vec(),
        }
    }

    /// `max ‖X_l T − T X_k‖_HS` over the operators of one cell.
    pub fn intertwining_defect(&self, t: &InterOp<T>) -> T {
        let (k, l) = t.grading();
        (&self.blocks[l] * t.matrix() - t.matrix() * &self.blocks[k]).norm()
    }
}

/// Pairing `⟨u^{(k)}_{i,j}, X⟩ = X_k[i, j]`, extended linearly.
pub fn pair<T: Real>(a: &AlgebraElement<T>, x: &BlockOperator<T>) -> Result<C<T>> {
    let deg = a.degree();
    if deg > x.level() {
        return Err(Error::DegreeOverflow {
            degree: deg,
            level: x.level(),
        });
    }
    let d = x.dim;
    Ok(a.terms().iter().fold(zero(), |acc, (m, c)| {
        let i = encode_multi_index(d, m.rows());
        let j = encode_multi_index(d, m.cols());
        acc + *c * x.blocks[m.degree()][(i, j)]
    }))
}

#[derive(Clone, Debug)]
pub struct CommutantBasis<T: Real> {
    dim: usize,
    level: usize,
    basis: Vec<BlockOperator<T>>,
    subspace: Subspace<T>,
}

impl<T: Real> CommutantBasis<T> {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BlockOperator<T>] {
        &self.basis
    }

    /// The span in the coordinates of `A_n`.
    pub fn subspace(&self) -> &Subspace<T> {
        &self.subspace
    }

    /// Distance of `x` from the span, relative to `|x|`.
    pub fn relative_residual(&self, x: &BlockOperator<T>) -> T {
        self.subspace.relative_residual(&x.to_vector())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Rows of the linear map `X ↦ T X_k − X_l T` written in the block
/// coordinates (one row per matrix entry `(i, j)` of the result).
fn intertwiner_rows<T: Real>(t: &InterOp<T>, total: usize) -> Vec<Vec<(usize, C<T>)>> {
    let d = t.dim();
    let (k, l) = t.grading();
    let (dk, dl) = (ipow(d, k), ipow(d, l));
    let (ok, ol) = (degree_offset(d, k), degree_offset(d, l));
    let m = t.matrix();
    let mut rows = Vec::with_capacity(dl * dk);
    for i in 0..dl {
        for j in 0..dk {
            let mut row = Vec::new();
            // (T X_k)_{ij} = Σ_a T[i,a] X_k[a,j]
            for a in 0..dk {
                let coef = m[(i, a)];
                if coef != zero() {
                    row.push((ok + a * dk + j, coef));
                }
            }
            // −(X_l T)_{ij} = −Σ_b X_l[i,b] T[b,j]
            for b in 0..dl {
                let coef = m[(b, j)];
                if coef != zero() {
                    row.push((ol + i * dl + b, -coef));
                }
            }
            debug_assert!(row.iter().all(|(p, _)| *p < total));
            rows.push(row);
        }
    }
    rows
}

/// Orthonormal basis of `B_n = (⊕_{k,l≤n} C(k,l))'`, solved as a single
/// null space over all blocks at once.
pub fn commutant_basis<T: Real>(c: &Collection<T>) -> CommutantBasis<T> {
    let d = c.dim();
    let n = c.level();
    let total = algebra_dim(d, n);
    let ops: Vec<&InterOp<T>> = c.spaces().flat_map(|s| s.basis().iter()).collect();
    let sparse_rows: Vec<Vec<(usize, C<T>)>> = ops
        .par_iter()
        .flat_map_iter(|t| intertwiner_rows(t, total))
        .collect();
    let mut a = DMatrix::zeros(sparse_rows.len(), total);
    for (r, row) in sparse_rows.iter().enumerate() {
        for (p, coef) in row {
            a[(r, *p)] += *coef;
        }
    }
    let ns = null_space(&a, c.tolerance());
    let basis = (0..ns.dim())
        .map(|i| BlockOperator::from_vector(d, n, &ns.column(i)))
        .collect();
    CommutantBasis {
        dim: d,
        level: n,
        basis,
        subspace: ns,
    }
}

#[derive(Clone, Debug)]
pub struct CellComparison<T: Real> {
    pub k: usize,
    pub l: usize,
    pub collection_dim: usize,
    pub bicommutant_dim: usize,
    pub distance: T,
}

#[derive(Clone, Debug)]
pub struct BicommutantReport<T: Real> {
    pub consistent: bool,
    pub cells: Vec<CellComparison<T>>,
    pub commutant_dim: usize,
}

impl<T: Real> BicommutantReport<T> {
    pub fn mismatches(&self) -> impl Iterator<Item = &CellComparison<T>> {
        self.cells
            .iter()
            .filter(|c| c.collection_dim != c.bicommutant_dim)
    }
}

/// `{T : X_l T = T X_k for every X in the basis}` for one cell.
pub fn commutant_of<T: Real>(comm: &CommutantBasis<T>, k: usize, l: usize, tol: T) -> Subspace<T> {
    let d = comm.dim;
    let (dk, dl) = (ipow(d, k), ipow(d, l));
    let unknowns = dk * dl;
    // Column-major position of T[a, j], matching `InterOp::to_vector`.
    let pos = |a: usize, j: usize| a + j * dl;
    let mut a = DMatrix::zeros(comm.basis.len() * unknowns, unknowns);
    let mut row = 0;
    for x in &comm.basis {
        let (xk, xl) = (x.block(k), x.block(l));
        for i in 0..dl {
            for j in 0..dk {
                for b in 0..dl {
                    a[(row, pos(b, j))] += xl[(i, b)];
                }
                for b in 0..dk {
                    a[(row, pos(i, b))] -= xk[(b, j)];
                }
                row += 1;
            }
        }
    }
    null_space(&a, tol)
}

/// Recomputes every cell from `B_n` and compares with the collection.
pub fn bicommutant_check<T: Real>(c: &Collection<T>, distance_tol: T) -> BicommutantReport<T> {
    let comm = commutant_basis(c);
    bicommutant_check_with(c, &comm, distance_tol)
}

pub fn bicommutant_check_with<T: Real>(
    c: &Collection<T>,
    comm: &CommutantBasis<T>,
    distance_tol: T,
) -> BicommutantReport<T> {
    let n = c.level();
    let cells: Vec<(usize, usize)> = (0..=n).flat_map(|k| (0..=n).map(move |l| (k, l))).collect();
    let cells: Vec<CellComparison<T>> = cells
        .par_iter()
        .map(|&(k, l)| {
            let space: &OpSpace<T> = c.space(k, l);
            let bi = commutant_of(comm, k, l, c.tolerance());
            let distance = space.subspace().distance(&bi);
            CellComparison {
                k,
                l,
                collection_dim: space.dim(),
                bicommutant_dim: bi.dim(),
                distance,
            }
        })
        .collect();
    let consistent = cells
        .iter()
        .all(|x| x.collection_dim == x.bicommutant_dim && x.distance < distance_tol);
    BicommutantReport {
        consistent,
        cells,
        commutant_dim: comm.dimension(),
    }
}

/// `Σ_{k≤n} ⟨X_k, Y_k⟩_HS`.
pub fn block_inner<T: Real>(x: &BlockOperator<T>, y: &BlockOperator<T>) -> C<T> {
    x.blocks
        .iter()
        .zip(&y.blocks)
        .flat_map(|(a, b)| a.iter().zip(b.iter()))
        .fold(zero(), |acc, (p, q)| acc + *p * q.conj())
}

//! Slice relations, the annihilator ideal `I_n`, the `O_F^+` / `U_Q^+`
//! presentations and the Hopf *-operations on the free algebra.

use nalgebra::{DMatrix, DVector};

use crate::algebra::{algebra_dim, AlgebraElement, GeneratorTable, Monomial};
use crate::closure::Collection;
use crate::commutant::{commutant_basis, pair, CommutantBasis};
use crate::error::{Error, Result};
use crate::linalg::Subspace;
use crate::scalar::{ipow, modulus, one, zero, Real, C};
use crate::tensor::{build_r_from_f, decode_multi_index, FMatrix, InterOp, Sign};

/// The elements `(ω_{ij}⊗ι)((T⊗1)U^⊗k − U^⊗l(T⊗1))` for all `i ∈ [d]^l`,
/// `j ∈ [d]^k`, in row-major order of `(i, j)`.
pub fn slice_relations<T: Real>(t: &InterOp<T>) -> Vec<AlgebraElement<T>> {
    let d = t.dim();
    let (k, l) = t.grading();
    let (dk, dl) = (ipow(d, k), ipow(d, l));
    let m = t.matrix();
    let mut out = Vec::with_capacity(dk * dl);
    for i in 0..dl {
        let iv = decode_multi_index(d, l, i);
        for j in 0..dk {
            let jv = decode_multi_index(d, k, j);
            let mut a = AlgebraElement::zero(d);
            for mm in 0..dk {
                let coef = m[(i, mm)];
                if coef != zero() {
                    let mono = Monomial::new(decode_multi_index(d, k, mm), jv.clone())
                        .expect("equal lengths");
                    a.add_term(mono, coef);
                }
            }
            for mm in 0..dl {
                let coef = m[(mm, j)];
                if coef != zero() {
                    let mono = Monomial::new(iv.clone(), decode_multi_index(d, l, mm))
                        .expect("equal lengths");
                    a.add_term(mono, -coef);
                }
            }
            out.push(a);
        }
    }
    out
}

/// Orthonormal basis (coefficient-vector inner product) of an ideal
/// truncated at `level`.
#[derive(Clone, Debug)]
pub struct IdealBasis<T: Real> {
    dim: usize,
    level: usize,
    subspace: Subspace<T>,
}

impl<T: Real> IdealBasis<T> {
    pub fn from_subspace(dim: usize, level: usize, subspace: Subspace<T>) -> Self {
        Self {
            dim,
            level,
            subspace,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn dimension(&self) -> usize {
        self.subspace.dim()
    }

    pub fn subspace(&self) -> &Subspace<T> {
        &self.subspace
    }

    pub fn element(&self, i: usize) -> AlgebraElement<T> {
        AlgebraElement::from_coordinates(self.dim, &self.subspace.column(i))
    }

    pub fn elements(&self) -> Vec<AlgebraElement<T>> {
        (0..self.dimension()).map(|i| self.element(i)).collect()
    }

    /// Distance of `a` from the ideal relative to `scale` (or `|a|`).
    pub fn residual(&self, a: &AlgebraElement<T>) -> Result<T> {
        let v = a.to_coordinates(self.level)?;
        Ok(self.subspace.residual(&v))
    }

    pub fn relative_residual(&self, a: &AlgebraElement<T>) -> Result<T> {
        let v = a.to_coordinates(self.level)?;
        Ok(self.subspace.relative_residual(&v))
    }
}

/// Column span of all slice relations of all basis operators of `c`.
pub fn ideal_basis<T: Real>(c: &Collection<T>) -> IdealBasis<T> {
    let d = c.dim();
    let n = c.level();
    let total = algebra_dim(d, n);
    let mut cols: Vec<DVector<C<T>>> = Vec::new();
    for s in c.spaces() {
        for t in s.basis() {
            for a in slice_relations(t) {
                if !a.is_zero() {
                    cols.push(a.to_coordinates(n).expect("slice degree within level"));
                }
            }
        }
    }
    IdealBasis {
        dim: d,
        level: n,
        subspace: Subspace::span_of_vectors(total, &cols, c.tolerance()),
    }
}

/// `dim I_n + dim B_n = dim A_n`, with the pairing of the two bases.
#[derive(Clone, Debug)]
pub struct DualityCheck<T: Real> {
    pub ideal_dim: usize,
    pub commutant_dim: usize,
    pub algebra_dim: usize,
    /// `max |⟨a, X⟩|` over basis pairs.
    pub max_pairing: T,
}

impl<T: Real> DualityCheck<T> {
    pub fn dims_consistent(&self) -> bool {
        self.ideal_dim + self.commutant_dim == self.algebra_dim
    }
}

pub fn duality_check<T: Real>(ideal: &IdealBasis<T>, comm: &CommutantBasis<T>) -> DualityCheck<T> {
    let mut max_pairing = T::zero();
    for a in ideal.elements() {
        for x in comm.basis() {
            let p = modulus(pair(&a, x).expect("same level"));
            if p > max_pairing {
                max_pairing = p;
            }
        }
    }
    DualityCheck {
        ideal_dim: ideal.dimension(),
        commutant_dim: comm.dimension(),
        algebra_dim: algebra_dim(ideal.dim, ideal.level),
        max_pairing,
    }
}

/// `ideal_basis` together with the independent commutant solve it must
/// complement.
pub fn ideal_basis_checked<T: Real>(c: &Collection<T>) -> (IdealBasis<T>, DualityCheck<T>) {
    let ideal = ideal_basis(c);
    let comm = commutant_basis(c);
    let check = duality_check(&ideal, &comm);
    (ideal, check)
}

/// `dim A_m / I_m` for `m = 0..=n`; the last entry equals `dim B_n`.
pub fn quotient_dims<T: Real>(c: &Collection<T>) -> Vec<usize> {
    (0..=c.level())
        .map(|m| {
            let ideal = ideal_basis(&c.truncated(m));
            algebra_dim(c.dim(), m) - ideal.dimension()
        })
        .collect()
}

/// `(u_ij)* = Σ_{a,b} F_{aj} (F^{-1})_{ib} u_{ba}`, from `U* = F^t U^t (F^{-1})^t`
/// with `(U*)_{ij} = (u_{ji})*`.
pub fn star_table<T: Real>(f: &FMatrix<T>) -> GeneratorTable<T> {
    let (fe, fi) = (f.entries(), f.inverse());
    let d = f.dim();
    GeneratorTable::from_fn(d, |i, j| {
        let mut a = AlgebraElement::zero(d);
        for x in 0..d {
            for y in 0..d {
                let coef = fe[(x, j)] * fi[(i, y)];
                if coef != zero() {
                    a.add_term(Monomial::generator(y, x), coef);
                }
            }
        }
        a
    })
}

/// `S(u_ij) = (F^t U^t (F^{-1})^t)_{ij} = Σ_{a,b} F_{ai} (F^{-1})_{jb} u_{ba}`.
pub fn antipode_table<T: Real>(f: &FMatrix<T>) -> GeneratorTable<T> {
    let (fe, fi) = (f.entries(), f.inverse());
    let d = f.dim();
    GeneratorTable::from_fn(d, |i, j| {
        let mut a = AlgebraElement::zero(d);
        for x in 0..d {
            for y in 0..d {
                let coef = fe[(x, i)] * fi[(j, y)];
                if coef != zero() {
                    a.add_term(Monomial::generator(y, x), coef);
                }
            }
        }
        a
    })
}

/// Antilinear, antimultiplicative involution determined by `F`.
pub fn star_element<T: Real>(a: &AlgebraElement<T>, f: &FMatrix<T>) -> AlgebraElement<T> {
    a.anti_extend(&star_table(f), true)
}

/// Linear, antimultiplicative antipode determined by `F`.
pub fn antipode_element<T: Real>(a: &AlgebraElement<T>, f: &FMatrix<T>) -> AlgebraElement<T> {
    a.anti_extend(&antipode_table(f), false)
}

/// `T^∨ = (F_l^{-1} T F_k)^t`, grading `(l, k)`.
pub fn conjugate_morphism<T: Real>(t: &InterOp<T>, f: &FMatrix<T>) -> InterOp<T> {
    let (k, l) = t.grading();
    t.left_mul(&f.inverse_power(l))
        .right_mul(&f.power(k))
        .transpose()
}

/// Inverse of `∨`: `S ↦ F_l S^t F_k^{-1}` for `S` of grading `(l, k)`.
pub fn conjugate_morphism_inverse<T: Real>(s: &InterOp<T>, f: &FMatrix<T>) -> InterOp<T> {
    let (l, k) = s.grading();
    s.transpose()
        .left_mul(&f.power(l))
        .right_mul(&f.inverse_power(k))
}

/// `R_m = (ι_m ⊗ F^{⊗m}) r_m` with `r_m(1) = Σ_i e_i ⊗ e_i` over `i ∈ [d]^m`.
fn parallel_duality<T: Real>(f: &FMatrix<T>, m: usize) -> InterOp<T> {
    let d = f.dim();
    let fm = f.power(m);
    let dm = ipow(d, m);
    let mut mat = DMatrix::zeros(dm * dm, 1);
    for a in 0..dm {
        for b in 0..dm {
            mat[(a * dm + b, 0)] = fm[(b, a)];
        }
    }
    InterOp::new(d, 0, 2 * m, mat).expect("shape by construction")
}

/// `T^∨` through cups and caps: `s^l (ι_k⊗R_l*)(ι_k⊗T⊗ι_l)(R_k⊗ι_l)`.
pub fn conjugate_morphism_categorical<T: Real>(
    t: &InterOp<T>,
    f: &FMatrix<T>,
) -> Result<InterOp<T>> {
    let sign = f.require_sign()?;
    let d = t.dim();
    let (k, l) = t.grading();
    let rk = parallel_duality(f, k);
    let rl = parallel_duality(f, l);
    let out = InterOp::identity(d, k)
        .tensor(&rl.adjoint())?
        .compose(
            &InterOp::identity(d, k)
                .tensor(t)?
                .tensor(&InterOp::identity(d, l))?,
        )?
        .compose(&rk.tensor(&InterOp::identity(d, l))?)?;
    let s = if sign == Sign::Minus && l % 2 == 1 {
        -one::<T>()
    } else {
        one()
    };
    Ok(out.scale(s))
}

/// `T̃ = F_l (T*)^t F_k^{-1}`; same grading as `T`.
pub fn tilde<T: Real>(t: &InterOp<T>, f: &FMatrix<T>) -> InterOp<T> {
    let (k, l) = t.grading();
    t.conjugate()
        .left_mul(&f.power(l))
        .right_mul(&f.inverse_power(k))
}

/// `lhs = equals·1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Relation<T: Real> {
    pub lhs: AlgebraElement<T>,
    pub equals: C<T>,
}

impl<T: Real> Relation<T> {
    /// `lhs − equals·1`, the corresponding ideal element.
    pub fn as_element(&self) -> AlgebraElement<T> {
        self.lhs
            .sub(&AlgebraElement::unit(self.lhs.dim()).scale(self.equals))
    }
}

/// Generators `u_ij`, relations, involution and antipode tables; the
/// comultiplication is always `Δ(u_ij) = Σ_k u_ik ⊗ u_kj`.
#[derive(Clone, Debug)]
pub struct Presentation<T: Real> {
    pub dim: usize,
    pub relations: Vec<Relation<T>>,
    pub involution: GeneratorTable<T>,
    pub antipode: GeneratorTable<T>,
}

impl<T: Real> Presentation<T> {
    pub fn relation_elements(&self) -> Vec<AlgebraElement<T>> {
        self.relations.iter().map(Relation::as_element).collect()
    }
}

fn push_unique<T: Real>(out: &mut Vec<Relation<T>>, rel: Relation<T>) {
    if !rel.lhs.is_zero() && !out.contains(&rel) {
        out.push(rel);
    }
}

/// `U F^t U^t (F^{-1})^t = 1` and `F^t U^t (F^{-1})^t U = 1`, entrywise.
pub fn of_plus_relations<T: Real>(f: &FMatrix<T>) -> Result<Presentation<T>> {
    f.require_sign()?;
    let d = f.dim();
    let tol = T::default_tolerance();
    let (fe, fi) = (f.entries(), f.inverse());
    let mut relations = Vec::new();
    let delta = |i: usize, j: usize| if i == j { one() } else { zero() };
    for i in 0..d {
        for j in 0..d {
            // Σ_{a,b,c} u_{ia} F_{ba} u_{cb} (F^{-1})_{jc}
            let mut lhs = AlgebraElement::zero(d);
            for a in 0..d {
                for b in 0..d {
                    for c in 0..d {
                        let coef = fe[(b, a)] * fi[(j, c)];
                        if coef != zero() {
                            lhs.add_term(Monomial::new(vec![i, c], vec![a, b])?, coef);
                        }
                    }
                }
            }
            push_unique(
                &mut relations,
                Relation {
                    lhs: lhs.pruned(tol),
                    equals: delta(i, j),
                },
            );
        }
    }
    for i in 0..d {
        for j in 0..d {
            // Σ_{a,b,c} F_{ai} u_{ba} (F^{-1})_{cb} u_{cj}
            let mut lhs = AlgebraElement::zero(d);
            for a in 0..d {
                for b in 0..d {
                    for c in 0..d {
                        let coef = fe[(a, i)] * fi[(c, b)];
                        if coef != zero() {
                            lhs.add_term(Monomial::new(vec![b, c], vec![a, j])?, coef);
                        }
                    }
                }
            }
            push_unique(
                &mut relations,
                Relation {
                    lhs: lhs.pruned(tol),
                    equals: delta(i, j),
                },
            );
        }
    }
    Ok(Presentation {
        dim: d,
        relations,
        involution: star_table(f),
        antipode: antipode_table(f),
    })
}

/// Data of the free unitary construction on `H = K ⊕ K̄`.
#[derive(Clone, Debug)]
pub struct UqPlus<T: Real> {
    pub dim: usize,
    pub f: FMatrix<T>,
    pub r: InterOp<T>,
    /// Orthogonal projection onto `K`.
    pub p: InterOp<T>,
    pub presentation: Presentation<T>,
}

/// Builds `F = [[0, Q̄^{-1}], [Q, 0]]`, `R = (ι⊗F) r`, the projection onto `K`
/// and the four relation families.
pub fn uq_plus_generators<T: Real>(q: &DMatrix<C<T>>) -> Result<UqPlus<T>> {
    let tol = T::default_tolerance();
    let m = q.nrows();
    if m == 0 || q.ncols() != m {
        return Err(Error::Shape {
            rows: q.nrows(),
            cols: q.ncols(),
            expected_rows: m.max(1),
            expected_cols: m.max(1),
        });
    }
    let qf = FMatrix::new(q.clone(), tol)?;
    let qbar_inv = qf.inverse().map(|z| z.conj());
    let d = 2 * m;
    let mut fm = DMatrix::zeros(d, d);
    fm.view_mut((0, m), (m, m)).copy_from(&qbar_inv);
    fm.view_mut((m, 0), (m, m)).copy_from(q);
    let f = FMatrix::new(fm, tol)?;
    let r = build_r_from_f(&f);
    let p = InterOp::new(
        d,
        1,
        1,
        DMatrix::from_fn(d, d, |i, j| if i == j && i < m { one() } else { zero() }),
    )?;
    let mut presentation = of_plus_relations(&f)?;
    // (p⊗1)U − U(p⊗1) has entries (p_i − p_j) u_ij: the off-diagonal blocks vanish.
    for i in 0..d {
        for j in 0..d {
            let pi = if i < m { 1.0 } else { 0.0 };
            let pj = if j < m { 1.0 } else { 0.0 };
            let coef = pi - pj;
            if coef != 0.0 {
                let lhs = AlgebraElement::generator(d, i, j).scale(crate::scalar::re(coef));
                push_unique(
                    &mut presentation.relations,
                    Relation {
                        lhs,
                        equals: zero(),
                    },
                );
            }
        }
    }
    Ok(UqPlus {
        dim: d,
        f,
        r,
        p,
        presentation,
    })
}

/// Span of `{b₁ ρ b₂}` over relation elements `ρ` and monomials `b₁, b₂` with
/// total degree at most `n`.
pub fn monomial_closure<T: Real>(
    dim: usize,
    relations: &[AlgebraElement<T>],
    n: usize,
    tol: T,
) -> Subspace<T> {
    let total = algebra_dim(dim, n);
    let monomials_up_to = |deg: usize| -> Vec<Monomial> {
        (0..algebra_dim(dim, deg))
            .map(|p| crate::algebra::coordinate_monomial(dim, p))
            .collect()
    };
    let mut cols = Vec::new();
    for rho in relations {
        let rd = rho.degree();
        if rd > n {
            continue;
        }
        let spare = n - rd;
        let left = monomials_up_to(spare);
        for b1 in &left {
            let right = monomials_up_to(spare - b1.degree());
            let lhs = AlgebraElement::monomial(dim, b1.clone(), one()).multiply(rho);
            for b2 in &right {
                let prod = lhs.multiply(&AlgebraElement::monomial(dim, b2.clone(), one()));
                if !prod.is_zero() {
                    cols.push(prod.to_coordinates(n).expect("degree bounded"));
                }
            }
        }
    }
    Subspace::span_of_vectors(total, &cols, tol)
}

//! Saturation of a generating set into the smallest truncated collection
//! closed under tensor products, composition, adjoints and leg bending.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DVector;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::Subspace;
use crate::scalar::{ipow, modulus, one, zero, Real, C};
use crate::tensor::{bend, bent_grading, conjugation_sign, Direction, InterOp, Side};
use crate::word::{Word, WordContext};

pub type Cell = (usize, usize);

#[derive(Clone, Debug)]
pub struct ClosureOptions<T: Real> {
    pub tolerance: T,
    /// Refuse levels with `d^(2n)` above this many matrix rows.
    pub memory_cap: usize,
    /// Candidates whose provenance word is deeper than this are dropped.
    pub max_depth: usize,
    pub max_sweeps: usize,
}

impl<T: Real> Default for ClosureOptions<T> {
    fn default() -> Self {
        Self {
            tolerance: T::default_tolerance(),
            memory_cap: 4096,
            max_depth: 64,
            max_sweeps: 64,
        }
    }
}

/// Orthonormal (Hilbert–Schmidt) basis of one cell `C(k,l)`.
#[derive(Clone, Debug)]
pub struct OpSpace<T: Real> {
    dim: usize,
    grading: Cell,
    basis: Vec<InterOp<T>>,
    provenance: Vec<Option<Word<T>>>,
}

impl<T: Real> OpSpace<T> {
    pub fn empty(dim: usize, grading: Cell) -> Self {
        Self {
            dim,
            grading,
            basis: Vec::new(),
            provenance: Vec::new(),
        }
    }

    /// Orthonormalizes `ops` (in order) into a space without provenance.
    pub fn spanned_by(dim: usize, grading: Cell, ops: &[InterOp<T>], tol: T) -> Result<Self> {
        let mut builder = CellBuilder::new(dim, grading);
        for op in ops {
            if op.grading() != grading || op.dim() != dim {
                return Err(Error::WrongGrading {
                    expected_k: grading.0,
                    expected_l: grading.1,
                    k: op.source(),
                    l: op.target(),
                });
            }
            builder.offer(op.clone(), None, tol);
        }
        Ok(builder.finish())
    }

    pub fn from_parts(
        dim: usize,
        grading: Cell,
        basis: Vec<InterOp<T>>,
        provenance: Vec<Option<Word<T>>>,
    ) -> Result<Self> {
        if basis.len() != provenance.len() {
            return Err(Error::Invalid("basis and provenance lengths differ".into()));
        }
        for op in &basis {
            if op.grading() != grading || op.dim() != dim {
                return Err(Error::WrongGrading {
                    expected_k: grading.0,
                    expected_l: grading.1,
                    k: op.source(),
                    l: op.target(),
                });
            }
        }
        Ok(Self {
            dim,
            grading,
            basis,
            provenance,
        })
    }

    pub fn grading(&self) -> Cell {
        self.grading
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[InterOp<T>] {
        &self.basis
    }

    pub fn provenance(&self) -> &[Option<Word<T>>] {
        &self.provenance
    }

    pub fn ambient(&self) -> usize {
        ipow(self.dim, self.grading.0) * ipow(self.dim, self.grading.1)
    }

    /// The span as a subspace of the flattened operator space.
    pub fn subspace(&self) -> Subspace<T> {
        let n = self.ambient();
        let m = nalgebra::DMatrix::from_fn(n, self.basis.len(), |i, j| {
            self.basis[j].matrix().as_slice()[i]
        });
        Subspace::from_orthonormal(m)
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn gram_defect(&self) -> T {
        let mut worst = T::zero();
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate() {
                let target = if i == j { one() } else { zero() };
                let d = modulus(a.hs_inner(b) - target);
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }
}

/// Hilbert–Schmidt distance from `t` to `span(space)`.
pub fn membership<T: Real>(t: &InterOp<T>, space: &OpSpace<T>) -> Result<T> {
    if t.grading() != space.grading {
        return Err(Error::WrongGrading {
            expected_k: space.grading.0,
            expected_l: space.grading.1,
            k: t.source(),
            l: t.target(),
        });
    }
    let mut r = t.to_vector();
    for _ in 0..2 {
        for e in &space.basis {
            let ev = e.to_vector();
            let coef = ev.dotc(&r);
            r -= ev * coef;
        }
    }
    Ok(r.norm())
}

/// Residual of `t` relative to its own norm (zero for the zero operator).
pub fn relative_membership<T: Real>(t: &InterOp<T>, space: &OpSpace<T>) -> Result<T> {
    let n = t.hs_norm();
    let res = membership(t, space)?;
    Ok(if n == T::zero() { T::zero() } else { res / n })
}

/// A truncated collection `C(k,l)`, `0 ≤ k,l ≤ level`.
#[derive(Clone, Debug)]
pub struct Collection<T: Real> {
    dim: usize,
    level: usize,
    r: InterOp<T>,
    generators: Vec<InterOp<T>>,
    spaces: BTreeMap<Cell, OpSpace<T>>,
    tolerance: T,
}

impl<T: Real> Collection<T> {
    /// Assembles a collection from explicit cells; missing cells are empty.
    pub fn from_spaces(
        dim: usize,
        level: usize,
        r: InterOp<T>,
        generators: Vec<InterOp<T>>,
        spaces: Vec<OpSpace<T>>,
        tolerance: T,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for k in 0..=level {
            for l in 0..=level {
                map.insert((k, l), OpSpace::empty(dim, (k, l)));
            }
        }
        for s in spaces {
            let (k, l) = s.grading;
            if k > level || l > level {
                return Err(Error::LevelExceeded { k, l, level });
            }
            if s.dim != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: s.dim,
                });
            }
            map.insert((k, l), s);
        }
        Ok(Self {
            dim,
            level,
            r,
            generators,
            spaces: map,
            tolerance,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn r(&self) -> &InterOp<T> {
        &self.r
    }

    pub fn generators(&self) -> &[InterOp<T>] {
        &self.generators
    }

    pub fn tolerance(&self) -> T {
        self.tolerance
    }

    pub fn space(&self, k: usize, l: usize) -> &OpSpace<T> {
        &self.spaces[&(k, l)]
    }

    pub fn spaces(&self) -> impl Iterator<Item = &OpSpace<T>> {
        self.spaces.values()
    }

    /// `dim C(k,l)` for `0 ≤ k,l ≤ level`.
    pub fn dims_table(&self) -> Vec<Vec<usize>> {
        (0..=self.level)
            .map(|k| (0..=self.level).map(|l| self.space(k, l).dim()).collect())
            .collect()
    }

    /// The cells with `k,l ≤ m`.
    pub fn truncated(&self, m: usize) -> Self {
        let m = m.min(self.level);
        let spaces = self
            .spaces
            .iter()
            .filter(|((k, l), _)| *k <= m && *l <= m)
            .map(|(c, s)| (*c, s.clone()))
            .collect();
        Self {
            level: m,
            spaces,
            ..self.clone()
        }
    }

    /// Copy with basis vector `idx` of cell `(k,l)` shifted by `delta`.
    pub fn perturbed(&self, k: usize, l: usize, idx: usize, delta: &InterOp<T>) -> Result<Self> {
        let mut out = self.clone();
        let space = out.spaces.get_mut(&(k, l)).ok_or(Error::LevelExceeded {
            k,
            l,
            level: self.level,
        })?;
        let v = space
            .basis
            .get_mut(idx)
            .ok_or_else(|| Error::Invalid(format!("cell ({k},{l}) has no basis vector {idx}")))?;
        *v = v.add(delta)?;
        Ok(out)
    }

    fn word_context(&self) -> WordContext<'_, T> {
        WordContext {
            dim: self.dim,
            r: &self.r,
            generators: &self.generators,
        }
    }
}

/// Incremental Gram–Schmidt basis of one cell, tracking how each
/// orthonormal vector combines the accepted raw candidates.
struct CellBuilder<T: Real> {
    dim: usize,
    grading: Cell,
    ortho: Vec<DVector<C<T>>>,
    /// `ortho[j] = Σ_m coeffs[j][m] raw[m]`.
    coeffs: Vec<Vec<C<T>>>,
    raw: Vec<Raw<T>>,
}

#[derive(Clone)]
struct Raw<T: Real> {
    op: InterOp<T>,
    word: Option<Arc<Word<T>>>,
    generation: usize,
}

impl<T: Real> CellBuilder<T> {
    fn new(dim: usize, grading: Cell) -> Self {
        Self {
            dim,
            grading,
            ortho: Vec::new(),
            coeffs: Vec::new(),
            raw: Vec::new(),
        }
    }

    fn rank(&self) -> usize {
        self.ortho.len()
    }

    /// Adds `op` if it leaves a relative residual above `tol`.
    fn offer(&mut self, op: InterOp<T>, word: Option<Arc<Word<T>>>, tol: T) -> bool {
        let scale = op.hs_norm();
        self.offer_at(op, word, tol, scale, 0)
    }

    /// `scale` bounds the norm the candidate would have without cancellation;
    /// residuals are judged against it so that round-off is never accepted.
    fn offer_at(
        &mut self,
        op: InterOp<T>,
        word: Option<Arc<Word<T>>>,
        tol: T,
        scale: T,
        generation: usize,
    ) -> bool {
        let x = op.to_vector();
        let norm = x.norm().max(scale);
        if norm == T::zero() {
            return false;
        }
        let mut r = x;
        let mut proj = vec![zero::<T>(); self.ortho.len()];
        for _ in 0..2 {
            for (i, e) in self.ortho.iter().enumerate() {
                let coef = e.dotc(&r);
                r -= e * coef;
                proj[i] += coef;
            }
        }
        let rn = r.norm();
        if rn <= tol * norm {
            return false;
        }
        let inv = C::new(T::one() / rn, T::zero());
        let new_idx = self.raw.len();
        let mut row = vec![zero::<T>(); new_idx + 1];
        row[new_idx] = inv;
        for (i, p) in proj.iter().enumerate() {
            for (m, cm) in self.coeffs[i].iter().enumerate() {
                row[m] -= *p * *cm * inv;
            }
        }
        self.ortho.push(r * inv);
        self.coeffs.push(row);
        self.raw.push(Raw {
            op,
            word,
            generation,
        });
        true
    }

    fn finish(self) -> OpSpace<T> {
        let (k, l) = self.grading;
        let basis = self
            .ortho
            .iter()
            .map(|v| InterOp::from_vector(self.dim, k, l, v))
            .collect();
        let provenance = self
            .coeffs
            .iter()
            .map(|row| {
                let mut terms = Vec::with_capacity(row.len());
                for (coef, raw) in row.iter().zip(&self.raw) {
                    if *coef == zero() {
                        continue;
                    }
                    terms.push((*coef, raw.word.clone()?));
                }
                Some(Word::Lin(terms))
            })
            .collect();
        OpSpace {
            dim: self.dim,
            grading: self.grading,
            basis,
            provenance,
        }
    }
}

struct Candidate<T: Real> {
    op: InterOp<T>,
    word: Arc<Word<T>>,
    scale: T,
}

#[derive(Clone, Copy, Debug)]
enum Move {
    Adjoint(Cell, usize),
    Bend(Cell, usize, Side, Direction),
    Compose(Cell, usize, Cell, usize),
    Tensor(Cell, usize, Cell, usize),
}

struct Engine<'a, T: Real> {
    level: usize,
    r: &'a InterOp<T>,
    opts: &'a ClosureOptions<T>,
    cells: BTreeMap<Cell, CellBuilder<T>>,
}

impl<'a, T: Real> Engine<'a, T> {
    fn new(dim: usize, level: usize, r: &'a InterOp<T>, opts: &'a ClosureOptions<T>) -> Self {
        let mut cells = BTreeMap::new();
        for k in 0..=level {
            for l in 0..=level {
                cells.insert((k, l), CellBuilder::new(dim, (k, l)));
            }
        }
        Self {
            level,
            r,
            opts,
            cells,
        }
    }

    fn seed(&mut self, op: InterOp<T>, word: Arc<Word<T>>) -> bool {
        let tol = self.opts.tolerance;
        self.cells
            .get_mut(&op.grading())
            .expect("grading within level")
            .offer(op, Some(word), tol)
    }

    fn raw(&self, cell: Cell, i: usize) -> &Raw<T> {
        &self.cells[&cell].raw[i]
    }

    /// Moves touching at least one element of generation `fresh`.
    fn plan(&self, fresh: usize) -> Vec<Move> {
        let n = self.level;
        let mut moves = Vec::new();
        let entries: Vec<(Cell, usize, usize)> = self
            .cells
            .iter()
            .flat_map(|(c, b)| {
                b.raw
                    .iter()
                    .enumerate()
                    .map(move |(i, r)| (*c, i, r.generation))
            })
            .collect();
        for &(cell, i, generation) in &entries {
            if generation != fresh {
                continue;
            }
            moves.push(Move::Adjoint(cell, i));
            for side in [Side::Left, Side::Right] {
                for dir in [Direction::Up, Direction::Down] {
                    if let Some((k, l)) = bent_grading(cell.0, cell.1, dir) {
                        if k <= n && l <= n {
                            moves.push(Move::Bend(cell, i, side, dir));
                        }
                    }
                }
            }
        }
        for &(a, i, ga) in &entries {
            for &(b, j, gb) in &entries {
                if ga != fresh && gb != fresh {
                    continue;
                }
                if a.0 == b.1 {
                    moves.push(Move::Compose(a, i, b, j));
                }
                if a.0 + b.0 <= n && a.1 + b.1 <= n {
                    moves.push(Move::Tensor(a, i, b, j));
                }
            }
        }
        moves
    }

    fn apply(&self, mv: Move) -> Option<Candidate<T>> {
        let (op, word, scale) = match mv {
            Move::Adjoint(c, i) => {
                let a = self.raw(c, i);
                (
                    a.op.adjoint(),
                    Word::Adjoint(a.word.clone()?),
                    a.op.hs_norm(),
                )
            }
            Move::Bend(c, i, side, dir) => {
                let a = self.raw(c, i);
                let rn = self.r.hs_norm();
                (
                    bend(&a.op, self.r, side, dir).ok()?,
                    Word::Bend(side, dir, a.word.clone()?),
                    a.op.hs_norm() * rn * rn,
                )
            }
            Move::Compose(ca, i, cb, j) => {
                let (a, b) = (self.raw(ca, i), self.raw(cb, j));
                (
                    a.op.compose(&b.op).ok()?,
                    Word::Compose(a.word.clone()?, b.word.clone()?),
                    a.op.hs_norm() * b.op.hs_norm(),
                )
            }
            Move::Tensor(ca, i, cb, j) => {
                let (a, b) = (self.raw(ca, i), self.raw(cb, j));
                (
                    a.op.tensor(&b.op).ok()?,
                    Word::Tensor(a.word.clone()?, b.word.clone()?),
                    a.op.hs_norm() * b.op.hs_norm(),
                )
            }
        };
        if word.depth() > self.opts.max_depth {
            return None;
        }
        Some(Candidate {
            op,
            word: Arc::new(word),
            scale,
        })
    }

    /// One sweep over moves involving generation `fresh`; returns rank added.
    fn sweep(&mut self, fresh: usize) -> usize {
        let moves = self.plan(fresh);
        let candidates: Vec<Option<Candidate<T>>> =
            moves.par_iter().map(|mv| self.apply(*mv)).collect();
        let tol = self.opts.tolerance;
        let mut added = 0;
        for Candidate { op, word, scale } in candidates.into_iter().flatten() {
            let cell = self
                .cells
                .get_mut(&op.grading())
                .expect("move stays within level");
            if cell.offer_at(op, Some(word), tol, scale, fresh + 1) {
                added += 1;
            }
        }
        added
    }

    fn run(&mut self) -> Result<()> {
        let mut fresh = 0;
        loop {
            if fresh >= self.opts.max_sweeps {
                return Err(Error::Invalid(format!(
                    "saturation did not stabilise within {} sweeps",
                    self.opts.max_sweeps
                )));
            }
            if self.sweep(fresh) == 0 {
                return Ok(());
            }
            fresh += 1;
        }
    }

    fn into_spaces(self) -> Vec<OpSpace<T>> {
        self.cells
            .into_values()
            .map(|b| {
                debug_assert!(b.rank() == b.raw.len());
                b.finish()
            })
            .collect()
    }
}

fn check_inputs<T: Real>(
    dim: usize,
    r: &InterOp<T>,
    generators: &[InterOp<T>],
    level: usize,
    opts: &ClosureOptions<T>,
) -> Result<()> {
    let rows = dim.checked_pow(2 * level as u32).unwrap_or(usize::MAX);
    if rows > opts.memory_cap {
        return Err(Error::GuardExceeded {
            rows,
            cap: opts.memory_cap,
        });
    }
    if r.dim() != dim {
        return Err(Error::DimensionMismatch {
            left: dim,
            right: r.dim(),
        });
    }
    if conjugation_sign(r, opts.tolerance)?.is_none() {
        return Err(Error::SignUndefined);
    }
    for g in generators {
        if g.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: g.dim(),
            });
        }
        let (k, l) = g.grading();
        if k > level || l > level {
            return Err(Error::LevelExceeded { k, l, level });
        }
    }
    Ok(())
}

/// Smallest collection up to `level` containing identities, `r` and the
/// generators, closed under the category operations.
pub fn generate_collection<T: Real>(
    dim: usize,
    r: &InterOp<T>,
    generators: &[InterOp<T>],
    level: usize,
    opts: &ClosureOptions<T>,
) -> Result<Collection<T>> {
    check_inputs(dim, r, generators, level, opts)?;
    let mut engine = Engine::new(dim, level, r, opts);
    for k in 0..=level {
        engine.seed(InterOp::identity(dim, k), Arc::new(Word::Identity(k)));
    }
    if level >= 2 {
        let rw = Arc::new(Word::R);
        engine.seed(r.clone(), rw.clone());
        engine.seed(r.adjoint(), Arc::new(Word::Adjoint(rw)));
    }
    for (i, g) in generators.iter().enumerate() {
        let gw = Arc::new(Word::Generator(i));
        engine.seed(g.clone(), gw.clone());
        engine.seed(g.adjoint(), Arc::new(Word::Adjoint(gw)));
    }
    engine.run()?;
    Collection::from_spaces(
        dim,
        level,
        r.clone(),
        generators.to_vec(),
        engine.into_spaces(),
        opts.tolerance,
    )
}

/// Runs one saturation sweep seeded with the collection's own basis and
/// reports how much rank it adds per cell (all zeros for a closed collection).
pub fn extra_sweep<T: Real>(c: &Collection<T>, opts: &ClosureOptions<T>) -> BTreeMap<Cell, usize> {
    let mut engine = Engine::new(c.dim, c.level, &c.r, opts);
    for s in c.spaces.values() {
        for (op, w) in s.basis.iter().zip(&s.provenance) {
            let word = Arc::new(w.clone().unwrap_or(Word::Lin(Vec::new())));
            engine.seed(op.clone(), word);
        }
    }
    let before: BTreeMap<Cell, usize> = engine.cells.iter().map(|(k, b)| (*k, b.rank())).collect();
    engine.sweep(0);
    engine
        .cells
        .iter()
        .map(|(k, b)| (*k, b.rank() - before[k]))
        .collect()
}

#[derive(Clone, Debug)]
pub struct AuditReport<T: Real> {
    pub max_deviation: T,
    /// `(k, l, index, deviation)` for vectors off by more than the tolerance
    /// or without an evaluable word.
    pub flagged: Vec<(usize, usize, usize, T)>,
    pub max_depth: usize,
    pub words: usize,
}

impl<T: Real> AuditReport<T> {
    pub fn passed(&self) -> bool {
        self.flagged.is_empty()
    }
}

/// Re-evaluates every provenance word and compares with its basis vector.
pub fn provenance_audit<T: Real>(c: &Collection<T>) -> AuditReport<T> {
    let ctx = c.word_context();
    let mut report = AuditReport {
        max_deviation: T::zero(),
        flagged: Vec::new(),
        max_depth: 0,
        words: 0,
    };
    let threshold = c.tolerance * T::from_f64_lossy(10.0);
    for s in c.spaces.values() {
        for (idx, (op, w)) in s.basis.iter().zip(&s.provenance).enumerate() {
            let dev = match w.as_ref().map(|w| (w.depth(), w.eval(&ctx))) {
                Some((depth, Ok(v))) if v.grading() == op.grading() => {
                    report.words += 1;
                    report.max_depth = report.max_depth.max(depth);
                    let scale = op.hs_norm().max(T::one());
                    (&v.into_matrix() - op.matrix()).norm() / scale
                }
                _ => T::one() / T::zero(),
            };
            worse(&mut report.max_deviation, dev);
            if matches!(dev.partial_cmp(&threshold), Some(Ordering::Greater) | None) {
                report.flagged.push((s.grading.0, s.grading.1, idx, dev));
            }
        }
    }
    report
}

/// Worst relative residuals for the closure conditions.
#[derive(Clone, Debug, Default)]
pub struct ClosureDefects<T: Real> {
    pub identity: T,
    pub r: T,
    pub adjoint: T,
    pub compose: T,
    pub tensor: T,
    pub orthonormality: T,
}

/// Raises `slot` to `v`; NaN always wins.
fn worse<T: Real>(slot: &mut T, v: T) {
    if matches!(v.partial_cmp(slot), Some(Ordering::Greater) | None) {
        *slot = v;
    }
}

/// Direct span-membership tests of the closure conditions on the basis.
pub fn closure_defects<T: Real>(c: &Collection<T>) -> ClosureDefects<T> {
    let n = c.level;
    let mut d = ClosureDefects {
        identity: T::zero(),
        r: T::zero(),
        adjoint: T::zero(),
        compose: T::zero(),
        tensor: T::zero(),
        orthonormality: T::zero(),
    };
    let rel_scaled = |t: &InterOp<T>, k: usize, l: usize, scale: T| -> T {
        let res = membership(t, c.space(k, l)).unwrap_or(scale);
        let s = scale.max(t.hs_norm());
        if s == T::zero() {
            T::zero()
        } else {
            res / s
        }
    };
    let rel = |t: &InterOp<T>, k: usize, l: usize| rel_scaled(t, k, l, T::zero());
    for k in 0..=n {
        worse(&mut d.identity, rel(&InterOp::identity(c.dim, k), k, k));
    }
    if n >= 2 {
        worse(&mut d.r, rel(&c.r, 0, 2));
    }
    for s in c.spaces.values() {
        worse(&mut d.orthonormality, s.gram_defect());
        let (k, l) = s.grading;
        for t in &s.basis {
            worse(&mut d.adjoint, rel(&t.adjoint(), l, k));
        }
    }
    for a in c.spaces.values() {
        for b in c.spaces.values() {
            let (ka, la) = a.grading;
            let (kb, lb) = b.grading;
            for x in &a.basis {
                for y in &b.basis {
                    if ka == lb {
                        let p = x.compose(y).expect("matching grading");
                        worse(
                            &mut d.compose,
                            rel_scaled(&p, kb, la, x.hs_norm() * y.hs_norm()),
                        );
                    }
                    if ka + kb <= n && la + lb <= n {
                        let p = x.tensor(y).expect("same dimension");
                        worse(
                            &mut d.tensor,
                            rel_scaled(&p, ka + kb, la + lb, x.hs_norm() * y.hs_norm()),
                        );
                    }
                }
            }
        }
    }
    d
}

impl<T: Real> ClosureDefects<T> {
    pub fn max(&self) -> T {
        [
            self.identity,
            self.r,
            self.adjoint,
            self.compose,
            self.tensor,
            self.orthonormality,
        ]
        .into_iter()
        .fold(T::zero(), |a, b| if b > a { b } else { a })
    }
}

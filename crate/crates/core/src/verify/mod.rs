//! Numerical check suites producing structured reports.

mod oracle;

pub use oracle::{
    all_pairings, diagram_oracle_dims, diagram_oracle_table, noncrossing_pairings, PairPartition,
};

use std::cmp::Ordering;
use std::fmt;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::{algebra_dim, AlgebraElement, Monomial};
use crate::closure::{
    closure_defects, extra_sweep, generate_collection, provenance_audit, relative_membership,
    ClosureOptions, Collection,
};
use crate::commutant::{bicommutant_check_with, commutant_basis};
use crate::error::Result;
use crate::hopf::{
    antipode_element, ideal_basis, monomial_closure, of_plus_relations, slice_relations,
    star_element, tilde, IdealBasis,
};
use crate::linalg::{null_space, rank, Subspace};
use crate::scalar::{c, modulus, one, Real, C};
use crate::tensor::{build_r_from_f, extract_f, FMatrix, InterOp};

#[derive(Clone, Debug)]
pub struct VerifyOptions<T: Real> {
    /// Rank and span tolerance.
    pub tolerance: T,
    /// Residual bound for every check record.
    pub threshold: T,
    pub seed: u64,
    /// Sampled pairs in the product-stability check.
    pub samples: usize,
    pub memory_cap: usize,
    /// Exact rank containment for the coproduct when `dim A_n` is at most this.
    pub rank_check_limit: usize,
}

impl<T: Real> Default for VerifyOptions<T> {
    fn default() -> Self {
        Self {
            tolerance: T::default_tolerance(),
            threshold: T::from_f64_lossy(1e-8),
            seed: 0,
            samples: 500,
            memory_cap: 4096,
            rank_check_limit: 32,
        }
    }
}

impl<T: Real> VerifyOptions<T> {
    fn closure_options(&self) -> ClosureOptions<T> {
        ClosureOptions {
            tolerance: self.tolerance,
            memory_cap: self.memory_cap,
            ..ClosureOptions::default()
        }
    }

    fn threshold_f64(&self) -> f64 {
        self.threshold.to_f64().unwrap_or(f64::NAN)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckRecord {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub suite: String,
    pub records: Vec<CheckRecord>,
    /// Diagnostic key/value pairs (dimensions, tables) that are not checks.
    pub facts: Vec<(String, String)>,
    pub pass: bool,
    pub wall_time: Duration,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>) -> Self {
        Self {
            suite: suite.into(),
            records: Vec::new(),
            facts: Vec::new(),
            pass: true,
            wall_time: Duration::ZERO,
        }
    }

    /// Passes when `residual <= threshold`; NaN always fails.
    pub fn check(&mut self, name: impl Into<String>, residual: f64, threshold: f64) {
        let pass = residual <= threshold;
        self.pass &= pass;
        self.records.push(CheckRecord {
            name: name.into(),
            residual,
            threshold,
            pass,
        });
    }

    /// Integer equality recorded as a residual `|got − want|` against zero.
    pub fn exact(&mut self, name: impl Into<String>, got: usize, want: usize) {
        self.check(name, got.abs_diff(want) as f64, 0.0);
    }

    pub fn fact(&mut self, key: impl Into<String>, value: impl fmt::Display) {
        self.facts.push((key.into(), value.to_string()));
    }

    pub fn fact_value(&self, key: &str) -> Option<&str> {
        self.facts
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.pass)
    }

    fn finish(mut self, start: Instant) -> Self {
        self.wall_time = start.elapsed();
        self
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "# suite {} {} {:.3}s",
            self.suite,
            if self.pass { "PASS" } else { "FAIL" },
            self.wall_time.as_secs_f64()
        )?;
        for (k, v) in &self.facts {
            writeln!(f, "# {k} = {v}")?;
        }
        for r in &self.records {
            writeln!(
                f,
                "{} {:e} {:e} {}",
                r.name,
                r.residual,
                r.threshold,
                if r.pass { "PASS" } else { "FAIL" }
            )?;
        }
        Ok(())
    }
}

fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn max_of<T: Real>(it: impl IntoIterator<Item = T>) -> T {
    it.into_iter()
        .fold(T::zero(), |a, b| match b.partial_cmp(&a) {
            Some(Ordering::Greater) | None => b,
            _ => a,
        })
}

fn format_table(t: &[Vec<usize>]) -> String {
    t.iter()
        .map(|row| {
            row.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect::<Vec<_>>()
        .join(";")
}

fn coordinate_matrix<T: Real>(elements: &[AlgebraElement<T>], n: usize) -> DMatrix<C<T>> {
    let rows = elements.first().map_or(0, |a| algebra_dim(a.dim(), n));
    let mut m = DMatrix::zeros(rows, elements.len());
    for (j, a) in elements.iter().enumerate() {
        m.set_column(j, &a.to_coordinates(n).expect("degree within level"));
    }
    m
}

/// Basis of `I ∩ A_{m}` inside `A_m`, for an ideal subspace of `A_n`, `m < n`.
fn restrict_to_lower_degree<T: Real>(ideal: &Subspace<T>, lower_dim: usize, tol: T) -> Subspace<T> {
    let q = ideal.basis();
    if ideal.dim() == 0 {
        return Subspace::zero(lower_dim);
    }
    let top = q.rows(lower_dim, q.nrows() - lower_dim).into_owned();
    let z = null_space(&top, tol);
    if z.dim() == 0 {
        return Subspace::zero(lower_dim);
    }
    let inter = q * z.basis();
    Subspace::span_of(&inter.rows(0, lower_dim).into_owned(), tol)
}

/// Slices annihilate the commutant, `dim I_n + dim B_n = dim A_n`, and the
/// ideal filtration is compatible with truncation.
pub fn verify_annihilator<T: Real>(
    c: &Collection<T>,
    opts: &VerifyOptions<T>,
) -> VerificationReport {
    let start = Instant::now();
    let thr = opts.threshold_f64();
    let mut rep = VerificationReport::new("annihilator");
    let n = c.level();
    let ideal = ideal_basis(c);
    let comm = commutant_basis(c);
    let slices: Vec<AlgebraElement<T>> = c
        .spaces()
        .flat_map(|s| s.basis().iter().flat_map(slice_relations))
        .filter(|a| !a.is_zero())
        .collect();
    let total = algebra_dim(c.dim(), n);
    let mut b = DMatrix::zeros(total, comm.dimension());
    for (j, x) in comm.basis().iter().enumerate() {
        b.set_column(j, &x.to_vector());
    }
    let pairing = if slices.is_empty() || comm.dimension() == 0 {
        T::zero()
    } else {
        let s = coordinate_matrix(&slices, n);
        max_of((s.transpose() * &b).iter().map(|z| modulus(*z)))
    };
    rep.check("annihilator.slice_pairing", to_f64(pairing), thr);
    let coverage = max_of(
        slices
            .iter()
            .map(|a| ideal.relative_residual(a).expect("degree within level")),
    );
    rep.check("annihilator.slice_coverage", to_f64(coverage), thr);
    let ideal_pairing = if ideal.dimension() == 0 || comm.dimension() == 0 {
        T::zero()
    } else {
        max_of(
            (ideal.subspace().basis().transpose() * &b)
                .iter()
                .map(|z| modulus(*z)),
        )
    };
    rep.check("annihilator.ideal_pairing", to_f64(ideal_pairing), thr);
    rep.exact(
        "annihilator.duality_dims",
        ideal.dimension() + comm.dimension(),
        total,
    );
    rep.fact("ideal_dim", ideal.dimension());
    rep.fact("commutant_dim", comm.dimension());
    rep.fact("algebra_dim", total);
    if n >= 1 {
        let lower = ideal_basis(&c.truncated(n - 1));
        let lower_dim = algebra_dim(c.dim(), n - 1);
        let inter = restrict_to_lower_degree(ideal.subspace(), lower_dim, opts.tolerance);
        rep.check(
            "annihilator.filtration",
            to_f64(inter.distance(lower.subspace())),
            thr,
        );
        rep.fact("lower_ideal_dim", lower.dimension());
    }
    rep.finish(start)
}

/// Ideals `I_0, …, I_n` of the truncations of `c`.
pub fn ideal_levels<T: Real>(c: &Collection<T>) -> Vec<IdealBasis<T>> {
    (0..=c.level())
        .map(|m| ideal_basis(&c.truncated(m)))
        .collect()
}

/// Bi-ideal checks for `c`'s own ideals.
pub fn verify_bi_ideal<T: Real>(c: &Collection<T>, opts: &VerifyOptions<T>) -> VerificationReport {
    verify_bi_ideal_levels(&ideal_levels(c), opts)
}

fn random_monomial(rng: &mut ChaCha8Rng, d: usize, m: usize) -> Monomial {
    let rows = (0..m).map(|_| rng.gen_range(0..d)).collect();
    let cols = (0..m).map(|_| rng.gen_range(0..d)).collect();
    Monomial::new(rows, cols).expect("equal lengths")
}

fn random_combination<T: Real>(rng: &mut ChaCha8Rng, ideal: &IdealBasis<T>) -> DVector<C<T>> {
    let coeffs = DVector::from_fn(ideal.dimension(), |_, _| {
        c(
            T::from_f64_lossy(rng.gen_range(-1.0..1.0)),
            T::from_f64_lossy(rng.gen_range(-1.0..1.0)),
        )
    });
    ideal.subspace().basis() * coeffs
}

/// Product stability (seeded samples of `a·b`, `b·a` with `a ∈ I_{n−m}`,
/// `b` a degree-`m` monomial) and coproduct containment of `I_n`, given the
/// ideals of every level `0..=n`.
pub fn verify_bi_ideal_levels<T: Real>(
    levels: &[IdealBasis<T>],
    opts: &VerifyOptions<T>,
) -> VerificationReport {
    let start = Instant::now();
    let thr = opts.threshold_f64();
    let mut rep = VerificationReport::new("bi_ideal");
    let top = levels.last().expect("at least level 0");
    let (d, n) = (top.dim(), top.level());

    let usable: Vec<usize> = (1..=n).filter(|m| levels[n - m].dimension() > 0).collect();
    if usable.is_empty() {
        rep.fact("product_pairs", "0 (I_m = 0 below the top level)");
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let samples: Vec<(AlgebraElement<T>, AlgebraElement<T>)> = (0..opts.samples)
            .map(|_| {
                let m = usable[rng.gen_range(0..usable.len())];
                let a = AlgebraElement::from_coordinates(
                    d,
                    &random_combination(&mut rng, &levels[n - m]),
                );
                let b = AlgebraElement::monomial(d, random_monomial(&mut rng, d, m), one());
                (a, b)
            })
            .collect();
        let worst = samples
            .par_iter()
            .map(|(a, b)| {
                let left = top
                    .relative_residual(&a.multiply(b))
                    .expect("degree within level");
                let right = top
                    .relative_residual(&b.multiply(a))
                    .expect("degree within level");
                if left > right {
                    left
                } else {
                    right
                }
            })
            .collect::<Vec<_>>();
        rep.check("bi_ideal.product_stability", to_f64(max_of(worst)), thr);
        rep.fact("product_pairs", samples.len());
    }

    // Δ(ρ) ∈ I⊗A + A⊗I  ⇔  (P⊥⊗P⊥)Δ(ρ) = 0, with Δ(ρ) as an N×N matrix.
    let big = algebra_dim(d, n);
    let q = top.subspace().basis();
    let p_perp = DMatrix::<C<T>>::identity(big, big) - q * q.adjoint();
    let coproducts: Vec<DMatrix<C<T>>> = top
        .elements()
        .iter()
        .map(|rho| {
            let v = rho
                .comultiply()
                .to_coordinates(n)
                .expect("degree within level");
            DMatrix::from_fn(big, big, |i, j| v[i * big + j])
        })
        .collect();
    let worst = max_of(coproducts.iter().map(|m| {
        let norm = m.norm();
        if norm == T::zero() {
            T::zero()
        } else {
            (&p_perp * m * p_perp.transpose()).norm() / norm
        }
    }));
    rep.check("bi_ideal.coproduct_projection", to_f64(worst), thr);

    if big <= opts.rank_check_limit && top.dimension() > 0 {
        let r = top.dimension();
        let mut span = DMatrix::zeros(big * big, 2 * r * big);
        for i in 0..r {
            let qi = q.column(i);
            for j in 0..big {
                for a in 0..big {
                    span[(a * big + j, 2 * (i * big + j))] = qi[a];
                    span[(j * big + a, 2 * (i * big + j) + 1)] = qi[a];
                }
            }
        }
        let base = rank(&span, opts.tolerance);
        let mut extended = DMatrix::zeros(big * big, span.ncols() + coproducts.len());
        extended.columns_mut(0, span.ncols()).copy_from(&span);
        for (k, m) in coproducts.iter().enumerate() {
            let col = DVector::from_fn(big * big, |idx, _| m[(idx / big, idx % big)]);
            extended.set_column(span.ncols() + k, &col);
        }
        rep.exact(
            "bi_ideal.coproduct_rank",
            rank(&extended, opts.tolerance),
            base,
        );
        rep.fact("coproduct_span_rank", base);
    }
    rep.fact("ideal_dim", top.dimension());
    rep.finish(start)
}

/// `T̃`-closure of every cell, and invariance of the ideal under `*` and `S`.
pub fn verify_hopf_star<T: Real>(
    c: &Collection<T>,
    f: &FMatrix<T>,
    opts: &VerifyOptions<T>,
) -> VerificationReport {
    let start = Instant::now();
    let thr = opts.threshold_f64();
    let mut rep = VerificationReport::new("hopf_star");
    let tilde_defect = max_of(c.spaces().flat_map(|s| {
        s.basis()
            .iter()
            .map(move |t| relative_membership(&tilde(t, f), s).expect("same grading"))
    }));
    rep.check("hopf_star.tilde_closure", to_f64(tilde_defect), thr);
    let ideal = ideal_basis(c);
    let elements = ideal.elements();
    let star = max_of(
        elements
            .par_iter()
            .map(|a| {
                ideal
                    .relative_residual(&star_element(a, f))
                    .expect("degree kept")
            })
            .collect::<Vec<_>>(),
    );
    rep.check("hopf_star.star_invariance", to_f64(star), thr);
    let anti = max_of(
        elements
            .par_iter()
            .map(|a| {
                ideal
                    .relative_residual(&antipode_element(a, f))
                    .expect("degree kept")
            })
            .collect::<Vec<_>>(),
    );
    rep.check("hopf_star.antipode_invariance", to_f64(anti), thr);
    if c.level() >= 2 {
        let d = c.dim();
        let mut worst = T::zero();
        for i in 0..d {
            for j in 0..d {
                let eps = AlgebraElement::generator(d, i, j).counit();
                let unit = AlgebraElement::unit(d).scale(eps);
                let mut left = AlgebraElement::zero(d);
                let mut right = AlgebraElement::zero(d);
                for k in 0..d {
                    let s_ik = antipode_element(&AlgebraElement::generator(d, i, k), f);
                    let s_kj = antipode_element(&AlgebraElement::generator(d, k, j), f);
                    left = left.add(&s_ik.multiply(&AlgebraElement::generator(d, k, j)));
                    right = right.add(&AlgebraElement::generator(d, i, k).multiply(&s_kj));
                }
                for e in [left.sub(&unit), right.sub(&unit)] {
                    let r = ideal.residual(&e).expect("degree two");
                    if r > worst {
                        worst = r;
                    }
                }
            }
        }
        rep.check("hopf_star.antipode_identity", to_f64(worst), thr);
    }
    rep.fact("ideal_dim", ideal.dimension());
    rep.finish(start)
}

/// Monomial closure of the `O_F^+` relations against the ideal of the
/// collection generated by `R = (ι⊗F)r` alone.
pub fn verify_of_plus<T: Real>(
    f: &FMatrix<T>,
    n: usize,
    opts: &VerifyOptions<T>,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let thr = opts.threshold_f64();
    let mut rep = VerificationReport::new("of_plus");
    let pres = of_plus_relations(f)?;
    let coll = generate_collection(f.dim(), &build_r_from_f(f), &[], n, &opts.closure_options())?;
    let ideal = ideal_basis(&coll);
    let closure = monomial_closure(f.dim(), &pres.relation_elements(), n, opts.tolerance);
    rep.check(
        "of_plus.relations_in_ideal",
        to_f64(ideal.subspace().containment_defect(&closure)),
        thr,
    );
    rep.check(
        "of_plus.ideal_in_relations",
        to_f64(closure.containment_defect(ideal.subspace())),
        thr,
    );
    rep.exact("of_plus.dimension", closure.dim(), ideal.dimension());
    rep.fact("relation_count", pres.relations.len());
    rep.fact("closure_dim", closure.dim());
    rep.fact("ideal_dim", ideal.dimension());
    Ok(rep.finish(start))
}

/// Cell-by-cell and ideal comparison of two collections.
pub fn compare_collections<T: Real>(
    a: &Collection<T>,
    b: &Collection<T>,
    opts: &VerifyOptions<T>,
) -> VerificationReport {
    let start = Instant::now();
    let thr = opts.threshold_f64();
    let mut rep = VerificationReport::new("uniqueness");
    let (ta, tb) = (a.dims_table(), b.dims_table());
    let mut differing = Vec::new();
    let mut worst = T::zero();
    let level = a.level().min(b.level());
    for k in 0..=level {
        for l in 0..=level {
            if ta[k][l] != tb[k][l] {
                differing.push(format!("({k},{l}):{}vs{}", ta[k][l], tb[k][l]));
            }
            let dist = a.space(k, l).subspace().distance(&b.space(k, l).subspace());
            if dist > worst {
                worst = dist;
            }
        }
    }
    rep.exact("uniqueness.dims_table", differing.len(), 0);
    rep.check("uniqueness.cell_distance", to_f64(worst), thr);
    let ideal_distance = ideal_basis(a)
        .subspace()
        .distance(ideal_basis(b).subspace());
    rep.check("uniqueness.ideal_distance", to_f64(ideal_distance), thr);
    if !differing.is_empty() {
        rep.fact("differing_cells", differing.join(" "));
    }
    rep.fact("dims_a", format_table(&ta));
    rep.fact("dims_b", format_table(&tb));
    rep.finish(start)
}

/// Regenerates `c` from `alternate` (same `R`, same level) and compares.
pub fn verify_uniqueness<T: Real>(
    c: &Collection<T>,
    alternate: &[InterOp<T>],
    opts: &VerifyOptions<T>,
) -> Result<VerificationReport> {
    let other = generate_collection(
        c.dim(),
        c.r(),
        alternate,
        c.level(),
        &opts.closure_options(),
    )?;
    Ok(compare_collections(c, &other, opts))
}

/// Engine dimensions of the `R`-only collection against the diagram oracle.
pub fn verify_oracle<T: Real>(
    f: &FMatrix<T>,
    n: usize,
    opts: &VerifyOptions<T>,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut rep = VerificationReport::new("oracle");
    let coll = generate_collection(f.dim(), &build_r_from_f(f), &[], n, &opts.closure_options())?;
    let engine = coll.dims_table();
    let oracle = diagram_oracle_table(f, n, opts.tolerance);
    let mismatches = (0..=n)
        .flat_map(|k| (0..=n).map(move |l| (k, l)))
        .filter(|&(k, l)| engine[k][l] != oracle[k][l])
        .count();
    rep.exact("oracle.table_agreement", mismatches, 0);
    rep.fact("engine", format_table(&engine));
    rep.fact("oracle", format_table(&oracle));
    Ok(rep.finish(start))
}

/// Closure conditions, saturation, provenance replay and bicommutant
/// equality of an already generated collection.
pub fn verify_closure<T: Real>(c: &Collection<T>, opts: &VerifyOptions<T>) -> VerificationReport {
    let start = Instant::now();
    let thr = opts.threshold_f64();
    let mut rep = VerificationReport::new("closure");
    let defects = closure_defects(c);
    rep.check("closure.identity", to_f64(defects.identity), thr);
    rep.check("closure.r", to_f64(defects.r), thr);
    rep.check("closure.adjoint", to_f64(defects.adjoint), thr);
    rep.check("closure.compose", to_f64(defects.compose), thr);
    rep.check("closure.tensor", to_f64(defects.tensor), thr);
    rep.check(
        "closure.orthonormality",
        to_f64(defects.orthonormality),
        thr,
    );
    let added: usize = extra_sweep(c, &opts.closure_options()).values().sum();
    rep.exact("closure.saturated", added, 0);
    let audit = provenance_audit(c);
    rep.check("closure.provenance", to_f64(audit.max_deviation), thr);
    let comm = commutant_basis(c);
    let bic = bicommutant_check_with(c, &comm, opts.threshold);
    rep.check(
        "closure.bicommutant",
        to_f64(max_of(bic.cells.iter().map(|x| x.distance))),
        thr,
    );
    rep.fact("dims", format_table(&c.dims_table()));
    rep.fact("commutant_dim", comm.dimension());
    rep.fact("provenance_words", audit.words);
    rep.fact("max_word_depth", audit.max_depth);
    rep.finish(start)
}

/// Every suite that applies to `c`, run in parallel. The Hopf, `O_F^+` and
/// oracle suites need a sign for the `F` extracted from `R`; the oracle only
/// runs when there are no extra generators.
pub fn verify_all<T: Real>(c: &Collection<T>, opts: &VerifyOptions<T>) -> Vec<VerificationReport> {
    type Job<'a> = Box<dyn Fn() -> VerificationReport + Send + Sync + 'a>;
    let f = extract_f(c.r(), opts.tolerance)
        .ok()
        .filter(|f| f.sign().is_some());
    let mut jobs: Vec<Job<'_>> = vec![
        Box::new(|| verify_closure(c, opts)),
        Box::new(|| verify_annihilator(c, opts)),
        Box::new(|| verify_bi_ideal(c, opts)),
    ];
    if let Some(f) = f {
        let f2 = f.clone();
        jobs.push(Box::new(move || verify_hopf_star(c, &f2, opts)));
        let f3 = f.clone();
        jobs.push(Box::new(move || {
            verify_of_plus(&f3, c.level(), opts)
                .unwrap_or_else(|e| failed("of_plus", &e.to_string()))
        }));
        if c.generators().is_empty() {
            jobs.push(Box::new(move || {
                verify_oracle(&f, c.level(), opts)
                    .unwrap_or_else(|e| failed("oracle", &e.to_string()))
            }));
        }
    }
    jobs.par_iter().map(|job| job()).collect()
}

fn failed(suite: &str, why: &str) -> VerificationReport {
    let mut rep = VerificationReport::new(suite);
    rep.check(format!("{suite}.precondition"), f64::INFINITY, 0.0);
    rep.fact("error", why);
    rep
}

/// `I_n` enlarged by one extra element, for negative controls.
pub fn enlarged_ideal<T: Real>(
    ideal: &IdealBasis<T>,
    extra: &AlgebraElement<T>,
    tol: T,
) -> Result<IdealBasis<T>> {
    let v = extra.to_coordinates(ideal.level())?;
    let mut m = DMatrix::zeros(v.len(), ideal.dimension() + 1);
    m.columns_mut(0, ideal.dimension())
        .copy_from(ideal.subspace().basis());
    m.set_column(ideal.dimension(), &v);
    Ok(IdealBasis::from_subspace(
        ideal.dim(),
        ideal.level(),
        Subspace::span_of(&m, tol),
    ))
}

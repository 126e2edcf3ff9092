use nalgebra::DMatrix;
use tannaka::algebra::AlgebraElement;
use tannaka::closure::{generate_collection, ClosureOptions, Collection};
use tannaka::hopf::uq_plus_generators;
use tannaka::scalar::{re, C};
use tannaka::tensor::{build_r_from_f, FMatrix, InterOp};
use tannaka::verify::*;

fn opts() -> VerifyOptions<f64> {
    VerifyOptions::default()
}

fn symplectic() -> FMatrix<f64> {
    let m = DMatrix::from_row_slice(2, 2, &[re(0.0), re(1.0), re(-1.0), re(0.0)]);
    FMatrix::new(m, 1e-9).unwrap()
}

fn o_f(f: &FMatrix<f64>, n: usize) -> Collection<f64> {
    generate_collection(
        f.dim(),
        &build_r_from_f(f),
        &[],
        n,
        &ClosureOptions::default(),
    )
    .unwrap()
}

fn uq(n: usize) -> (Collection<f64>, FMatrix<f64>, InterOp<f64>) {
    let q = DMatrix::<C<f64>>::identity(1, 1);
    let b = uq_plus_generators(&q).unwrap();
    let c = generate_collection(
        2,
        &b.r,
        std::slice::from_ref(&b.p),
        n,
        &ClosureOptions::default(),
    )
    .unwrap();
    (c, b.f, b.p)
}

fn dims(rep: &VerificationReport) -> (String, String, String) {
    let get = |k: &str| rep.fact_value(k).unwrap().to_string();
    (get("ideal_dim"), get("commutant_dim"), get("algebra_dim"))
}

#[test]
fn annihilator_suite() {
    let rep = verify_annihilator(&o_f(&FMatrix::identity(2), 2), &opts());
    assert!(rep.pass, "{rep}");
    assert_eq!(dims(&rep), ("7".into(), "14".into(), "21".into()));

    let rep = verify_annihilator(&o_f(&FMatrix::identity(1), 2), &opts());
    assert!(rep.pass, "{rep}");
    assert_eq!(dims(&rep), ("1".into(), "2".into(), "3".into()));

    let rep = verify_annihilator(&o_f(&FMatrix::identity(2), 0), &opts());
    assert!(rep.pass, "{rep}");
    assert_eq!(dims(&rep), ("0".into(), "1".into(), "1".into()));

    let rep = verify_annihilator(&o_f(&symplectic(), 3), &opts());
    assert!(rep.pass, "{rep}");
}

#[test]
fn bi_ideal_suite() {
    for c in [
        o_f(&FMatrix::identity(2), 2),
        o_f(&FMatrix::identity(1), 2),
        o_f(&FMatrix::identity(2), 3),
    ] {
        let rep = verify_bi_ideal(&c, &opts());
        assert!(rep.pass, "{rep}");
    }
    let rep = verify_bi_ideal(&o_f(&FMatrix::identity(2), 3), &opts());
    assert_eq!(rep.fact_value("product_pairs"), Some("500"));
    let rep = verify_bi_ideal(&o_f(&FMatrix::identity(2), 2), &opts());
    assert!(rep
        .records
        .iter()
        .any(|r| r.name == "bi_ideal.coproduct_rank"));
}

#[test]
fn bi_ideal_negative_control() {
    let c = o_f(&FMatrix::identity(2), 2);
    let mut levels = ideal_levels(&c);
    let stray = AlgebraElement::generator(2, 0, 0).multiply(&AlgebraElement::generator(2, 1, 1));
    let top = levels.pop().unwrap();
    levels.push(enlarged_ideal(&top, &stray, 1e-9).unwrap());
    let rep = verify_bi_ideal_levels(&levels, &opts());
    assert!(!rep.pass);
    assert!(rep
        .failures()
        .any(|r| r.name == "bi_ideal.coproduct_projection"));

    // A stray element in I_1 breaks product stability at level 2.
    let mut levels = ideal_levels(&c);
    levels[1] = enlarged_ideal(&levels[1], &AlgebraElement::generator(2, 0, 1), 1e-9).unwrap();
    let rep = verify_bi_ideal_levels(&levels, &opts());
    assert!(rep
        .failures()
        .any(|r| r.name == "bi_ideal.product_stability"));
}

#[test]
fn hopf_star_suite() {
    for f in [FMatrix::identity(2), symplectic()] {
        let rep = verify_hopf_star(&o_f(&f, 2), &f, &opts());
        assert!(rep.pass, "{rep}");
    }
    let (c, f, _) = uq(2);
    let rep = verify_hopf_star(&c, &f, &opts());
    assert!(rep.pass, "{rep}");
}

#[test]
fn of_plus_suite() {
    let rep = verify_of_plus(&FMatrix::identity(2), 2, &opts()).unwrap();
    assert!(rep.pass, "{rep}");
    assert_eq!(rep.fact_value("ideal_dim"), Some("7"));
    assert!(
        verify_of_plus(&FMatrix::identity(1), 2, &opts())
            .unwrap()
            .pass
    );
    assert!(verify_of_plus(&symplectic(), 2, &opts()).unwrap().pass);
}

#[test]
fn uniqueness_suite() {
    let f = FMatrix::identity(2);
    let c = o_f(&f, 2);
    let r = build_r_from_f(&f);
    let rr = r.compose(&r.adjoint()).unwrap();
    let rep = verify_uniqueness(&c, &[r, rr], &opts()).unwrap();
    assert!(rep.pass, "{rep}");

    let (c, _, p) = uq(2);
    let q = InterOp::identity(2, 1).sub(&p).unwrap();
    let rep = verify_uniqueness(&c, &[q], &opts()).unwrap();
    assert!(rep.pass, "{rep}");

    let rep = compare_collections(&o_f(&f, 2), &c, &opts());
    assert!(!rep.pass);
    assert!(rep
        .fact_value("differing_cells")
        .unwrap()
        .contains("(1,1):1vs2"));
}

#[test]
fn oracle_suite() {
    for f in [FMatrix::identity(2), symplectic(), FMatrix::identity(1)] {
        let rep = verify_oracle(&f, 3, &opts()).unwrap();
        assert!(rep.pass, "{rep}");
    }
}

#[test]
fn full_suite_and_corruption() {
    let c = o_f(&FMatrix::identity(2), 2);
    let reports = verify_all(&c, &opts());
    assert_eq!(reports.len(), 6);
    assert!(
        reports.iter().all(|r| r.pass),
        "{:?}",
        reports.iter().filter(|r| !r.pass).collect::<Vec<_>>()
    );

    let delta = InterOp::new(
        2,
        2,
        2,
        DMatrix::from_fn(4, 4, |i, j| re(if i == 1 && j == 2 { 0.3 } else { 0.0 })),
    )
    .unwrap();
    let bad = c.perturbed(2, 2, 0, &delta).unwrap();
    let reports = verify_all(&bad, &opts());
    assert!(reports.iter().any(|r| !r.pass));

    let (c, _, _) = uq(2);
    assert!(verify_all(&c, &opts()).iter().all(|r| r.pass));
}

#[test]
fn report_lines() {
    let mut rep = VerificationReport::new("demo");
    rep.check("a.b", 1e-12, 1e-8);
    rep.exact("a.c", 3, 4);
    rep.check("a.nan", f64::NAN, 1.0);
    assert!(!rep.pass);
    let text = rep.to_string();
    assert!(text.contains("a.b 1e-12 1e-8 PASS"));
    assert!(text.contains("a.c 1e0 0e0 FAIL"));
    assert_eq!(rep.failures().count(), 2);
}

use nalgebra::DMatrix;
use proptest::prelude::*;
use tannaka::algebra::{AlgebraElement, Monomial};
use tannaka::closure::{generate_collection, ClosureOptions};
use tannaka::hopf::{of_plus_relations, Relation};
use tannaka::scalar::{c, C};
use tannaka::tensor::{build_r_from_f, FMatrix, InterOp};
use tannaka::verify::{verify_annihilator, VerifyOptions};
use tannaka_cli::format::*;

fn any_f64() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |x| x.is_finite()),
        Just(0.0),
        Just(-0.0),
        Just(1e-300)
    ]
}

fn complex() -> impl Strategy<Value = C<f64>> {
    (any_f64(), any_f64()).prop_map(|(a, b)| c(a, b))
}

fn operator() -> impl Strategy<Value = InterOp<f64>> {
    (1usize..=3, 0usize..=2, 0usize..=2).prop_flat_map(|(d, k, l)| {
        let (rows, cols) = (d.pow(l as u32), d.pow(k as u32));
        prop::collection::vec(complex(), rows * cols).prop_map(move |v| {
            InterOp::new(d, k, l, DMatrix::from_row_slice(rows, cols, &v)).unwrap()
        })
    })
}

fn bits(m: &DMatrix<C<f64>>) -> Vec<(u64, u64)> {
    m.iter().map(|z| (z.re.to_bits(), z.im.to_bits())).collect()
}

proptest! {
    #[test]
    fn operator_files_round_trip(op in operator()) {
        let file = OperatorFile { format: FORMAT, operator: OperatorJson::from_op(&op) };
        let text = to_json(&file);
        let back: OperatorFile = serde_json::from_str(&text).unwrap();
        let op2 = back.operator.to_op("op").unwrap();
        prop_assert_eq!(op2.grading(), op.grading());
        prop_assert_eq!(bits(op2.matrix()), bits(op.matrix()));
    }

    #[test]
    fn relation_files_round_trip(
        terms in prop::collection::vec(
            (prop::collection::vec((0usize..3, 0usize..3), 0..4), complex()), 0..6),
        equals in complex(),
    ) {
        let mut lhs = AlgebraElement::zero(3);
        for (factors, z) in terms {
            let (rows, cols): (Vec<_>, Vec<_>) = factors.into_iter().unzip();
            lhs.add_term(Monomial::new(rows, cols).unwrap(), z);
        }
        let rel = Relation { lhs, equals };
        let file = RelationsFile::from_relations(3, std::slice::from_ref(&rel), None, None);
        let back: RelationsFile = serde_json::from_str(&to_json(&file)).unwrap();
        let rel2 = back.to_relations().unwrap().remove(0);
        prop_assert_eq!(rel2.equals.re.to_bits(), rel.equals.re.to_bits());
        prop_assert_eq!(rel2.lhs.terms().len(), rel.lhs.terms().len());
        for ((m1, z1), (m2, z2)) in rel.lhs.terms().iter().zip(rel2.lhs.terms()) {
            prop_assert_eq!(m1, m2);
            prop_assert_eq!((z1.re.to_bits(), z1.im.to_bits()), (z2.re.to_bits(), z2.im.to_bits()));
        }
    }

    #[test]
    fn dims_csv_round_trip(table in (1usize..5).prop_flat_map(|n| prop::collection::vec(prop::collection::vec(0usize..1000, n), n))) {
        prop_assert_eq!(parse_dims_csv(&dims_csv(&table)).unwrap(), table);
    }
}

#[test]
fn collection_file_round_trip() {
    let f = FMatrix::new(
        DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)]),
        1e-9,
    )
    .unwrap();
    let coll =
        generate_collection(2, &build_r_from_f(&f), &[], 3, &ClosureOptions::default()).unwrap();
    let file = CollectionFile::from_collection(&coll);
    let back: CollectionFile = serde_json::from_str(&to_json(&file)).unwrap();
    assert_eq!(back, file);
    let coll2 = back.to_collection().unwrap();
    assert_eq!(coll2.dims_table(), coll.dims_table());
    for (a, b) in coll.spaces().zip(coll2.spaces()) {
        for (x, y) in a.basis().iter().zip(b.basis()) {
            assert_eq!(bits(x.matrix()), bits(y.matrix()));
        }
        let words: Vec<_> = b
            .provenance()
            .iter()
            .map(|w| w.as_ref().map(ToString::to_string))
            .collect();
        let orig: Vec<_> = a
            .provenance()
            .iter()
            .map(|w| w.as_ref().map(ToString::to_string))
            .collect();
        assert_eq!(words, orig);
    }
    assert!(verify_annihilator(&coll2, &VerifyOptions::default()).pass);
}

#[test]
fn builtin_relations_round_trip() {
    let p = of_plus_relations(&FMatrix::<f64>::identity(2)).unwrap();
    let file =
        RelationsFile::from_relations(2, &p.relations, Some(&p.involution), Some(&p.antipode));
    let back: RelationsFile = serde_json::from_str(&to_json(&file)).unwrap();
    assert_eq!(back, file);
    assert_eq!(back.to_relations().unwrap(), p.relations);
    // 1-based indices on disk.
    assert!(back
        .relations
        .iter()
        .flat_map(|r| &r.terms)
        .all(|t| t.rows.iter().all(|&i| (1..=2).contains(&i))));
}

#[test]
fn report_records_round_trip() {
    let mut rep = tannaka::verify::VerificationReport::new("demo");
    rep.check("x.small", 1.234_567_890_123e-13, 1e-8);
    rep.check("x.large", 0.1 + 0.2, 1e-8);
    rep.exact("x.count", 7, 7);
    let records = parse_report_records(&reports_text(std::slice::from_ref(&rep))).unwrap();
    assert_eq!(records, rep.records);
}

#[test]
fn malformed_rows_are_named() {
    let rows = vec![vec![[1.0, 0.0], [0.0, 0.0]], vec![[0.0, 0.0]]];
    let err = matrix_from_json(&rows, 2, 2, "F").unwrap_err();
    assert_eq!(err.exit_code(), 1);
    assert!(err.to_string().contains("row 1 has 1 entries"), "{err}");
}

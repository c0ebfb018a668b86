use outlying::dataset::{
    parse_csv, parse_schema, satisfies, select, support, AttributeKind, Column, Condition, Dataset, Explanation,
};
use outlying::Error;
use proptest::prelude::*;

fn db(xs: Vec<f64>, ys: Vec<f64>, cs: Vec<bool>) -> Dataset {
    let labels: Vec<&str> = cs.iter().map(|&c| if c { "yes" } else { "no" }).collect();
    Dataset::from_columns(vec![
        ("x".into(), Column::Numeric(xs)),
        ("y".into(), Column::Numeric(ys)),
        ("c".into(), Column::categorical(&labels)),
    ])
    .unwrap()
}

fn rows() -> impl Strategy<Value = Dataset> {
    (1usize..60).prop_flat_map(|n| {
        (
            prop::collection::vec(-3.0..3.0f64, n),
            prop::collection::vec(-3.0..3.0f64, n),
            prop::collection::vec(any::<bool>(), n),
        )
            .prop_map(|(x, y, c)| db(x, y, c))
    })
}

proptest! {
    #[test]
    fn selection_agrees_with_satisfies(d in rows(), a in -3.0..3.0f64, w in 0.0..3.0f64, b in -3.0..3.0f64) {
        let e = Explanation::new(vec![
            Condition::interval(0, a, a + w).unwrap(),
            Condition::interval(1, b.min(0.0), b.max(0.0)).unwrap(),
        ]).unwrap();
        let view = select(&d, &e).unwrap();
        for r in 0..d.len() {
            prop_assert_eq!(view.contains(r), satisfies(&d.object(r).unwrap(), &e).unwrap());
        }
        prop_assert_eq!(view.support(), view.len() as f64 / d.len() as f64);
    }

    #[test]
    fn adding_conditions_never_raises_support(d in rows(), a in -3.0..3.0f64, w in 0.0..3.0f64, yes in any::<bool>()) {
        let one = Explanation::new(vec![Condition::interval(0, a, a + w).unwrap()]).unwrap();
        let two = Explanation::new(vec![
            Condition::interval(0, a, a + w).unwrap(),
            Condition::equals(2, if yes { "yes" } else { "no" }),
        ]).unwrap();
        let s0 = support(&d, &Explanation::empty()).unwrap();
        let s1 = support(&d, &one).unwrap();
        let s2 = support(&d, &two).unwrap();
        prop_assert_eq!(s0, 1.0);
        prop_assert!(s2 <= s1 && s1 <= s0);
    }
}

#[test]
fn explanation_rules() {
    let d = db(vec![0.0, 1.0], vec![0.0, 1.0], vec![true, false]);
    let dup = Explanation::new(vec![Condition::interval(0, 0.0, 1.0).unwrap(), Condition::interval(0, 0.0, 0.5).unwrap()]);
    assert!(dup.is_err());
    assert!(Condition::interval(0, 1.0, 0.0).is_err());
    assert!(Condition::interval(0, f64::NAN, 0.0).is_err());
    let wrong_kind = Explanation::new(vec![Condition::equals(0, "1")]).unwrap();
    assert!(matches!(select(&d, &wrong_kind), Err(Error::Schema(_))));
    let unknown = Explanation::new(vec![Condition::interval(7, 0.0, 1.0).unwrap()]).unwrap();
    assert!(select(&d, &unknown).is_err());
}

#[test]
fn csv_with_schema_hint() {
    let schema = parse_schema("# zip codes are labels\nzip: categorical\nh: numeric\n").unwrap();
    let d = parse_csv("zip,h\n02139,170.5\n10001,181\n", Some(&schema)).unwrap();
    assert_eq!(d.schema()[0].kind, AttributeKind::Categorical);
    assert_eq!(d.schema()[1].kind, AttributeKind::Numeric);
    let inferred = parse_csv("zip,h\n02139,170.5\n10001,181\n", None).unwrap();
    assert_eq!(inferred.schema()[0].kind, AttributeKind::Numeric);
}

#[test]
fn csv_errors_carry_positions() {
    match parse_csv("a,b\n1,2\n3,\n", None) {
        Err(Error::MissingValue { line, column }) => assert_eq!((line, column.as_str()), (3, "b")),
        other => panic!("{other:?}"),
    }
    assert!(matches!(parse_csv("a\nNaN\n", None), Err(Error::Parse { .. })));
    assert!(matches!(parse_csv("a\n", None), Err(Error::EmptySample) | Err(Error::Schema(_))));
}

use proptest::prelude::*;
use qwalk::experiment::output::format_real;
use qwalk::experiment::{Cell, Table};

fn cell() -> impl Strategy<Value = Cell> {
    prop_oneof![
        4 => any::<f64>().prop_map(Cell::Real),
        2 => any::<i64>().prop_map(Cell::Int),
        1 => "[a-hj-mo-z][a-z ,\"=]{0,8}".prop_map(Cell::Text),
        1 => Just(Cell::Empty),
    ]
}

fn same(a: &Cell, b: &Cell) -> bool {
    match (a, b) {
        (Cell::Real(x), Cell::Real(y)) => x.to_bits() == y.to_bits() || (x.is_nan() && y.is_nan()),
        _ => a == b,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn shortest_repr_round_trips(v in any::<f64>()) {
        let s = format_real(v);
        let back: f64 = match s.as_str() {
            "NaN" => f64::NAN,
            "inf" => f64::INFINITY,
            "-inf" => f64::NEG_INFINITY,
            other => other.parse().unwrap(),
        };
        prop_assert!(back.to_bits() == v.to_bits() || (v.is_nan() && back.is_nan()));
    }

    #[test]
    fn csv_round_trips(width in 1usize..6, rows in prop::collection::vec(prop::collection::vec(cell(), 6), 0..12)) {
        let mut table = Table::new((0..width).map(|j| format!("c{j}")));
        for r in rows {
            table.push(r[..width].to_vec());
        }
        let text = table.to_csv();
        let back = Table::from_csv(&text).unwrap();
        prop_assert_eq!(&back.columns, &table.columns);
        prop_assert_eq!(back.rows.len(), table.rows.len());
        for (ra, rb) in table.rows.iter().zip(&back.rows) {
            for (a, b) in ra.iter().zip(rb) {
                prop_assert!(same(a, b), "{:?} vs {:?}", a, b);
            }
        }
        prop_assert_eq!(back.to_csv(), text);
    }

    #[test]
    fn jsonl_keeps_finite_reals(values in prop::collection::vec(-1e300f64..1e300, 1..20)) {
        let mut table = Table::new(["v"]);
        for &v in &values {
            table.push(vec![v.into()]);
        }
        for (line, &v) in table.to_jsonl().lines().zip(&values) {
            let parsed: serde_json::Value = serde_json::from_str(line).unwrap();
            prop_assert_eq!(parsed["v"].as_f64().unwrap().to_bits(), v.to_bits());
        }
    }
}

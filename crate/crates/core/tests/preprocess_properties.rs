use ecoopt_core::preprocess::{
    fit, iqr_fences, quantile_sorted, OutlierAction, PipelineConfig, StdKind,
};
use ecoopt_core::table::{Column, DataTable, Value};
use proptest::prelude::*;

fn table(cols: &[(&str, Vec<Option<f64>>)]) -> DataTable {
    let mut t = DataTable::new("t", cols.iter().map(|(n, _)| Column::numeric(*n)).collect()).unwrap();
    for i in 0..cols[0].1.len() {
        t.push_row(cols.iter().map(|(_, v)| v[i].map_or(Value::Missing, Value::Number)).collect())
            .unwrap();
    }
    t
}

fn values(t: &DataTable, c: &str) -> Vec<f64> {
    t.numeric(c).unwrap().into_iter().map(Option::unwrap).collect()
}

fn config(action: OutlierAction, scale: bool) -> PipelineConfig {
    PipelineConfig {
        scale,
        outlier_action: action,
        interaction_pairs: vec![],
        ..PipelineConfig::default()
    }
}

#[test]
fn hand_computed_examples() {
    // positions 0.25 * 4 = 1 and 0.75 * 4 = 3 fall on order statistics
    let s = [1.0, 2.0, 3.0, 4.0, 100.0];
    assert_eq!(quantile_sorted(&s, 0.25), 2.0);
    assert_eq!(quantile_sorted(&s, 0.75), 4.0);
    assert_eq!(iqr_fences(2.0, 4.0, 1.5), (-1.0, 7.0));
    // 0.25 * 3 = 0.75 between 1 and 2
    assert_eq!(quantile_sorted(&[1.0, 2.0, 3.0, 4.0], 0.25), 1.75);

    let t = table(&[("x", vec![Some(1.0), None, Some(3.0)])]);
    let p = fit(&t, &config(OutlierAction::Keep, false)).unwrap();
    assert_eq!(values(&p.transform(&t).unwrap(), "x"), [1.0, 2.0, 3.0]);

    let t = table(&[("x", vec![Some(0.0), Some(10.0)])]);
    let p = fit(&t, &config(OutlierAction::Keep, true)).unwrap();
    assert_eq!(values(&p.transform(&t).unwrap(), "x"), [-1.0, 1.0]);
    let sample = PipelineConfig { std_kind: StdKind::Sample, ..config(OutlierAction::Keep, true) };
    let p = fit(&t, &sample).unwrap();
    let v = values(&p.transform(&t).unwrap(), "x");
    assert!((v[1] - 5.0 / 50f64.sqrt()).abs() < 1e-12);
}

fn column() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e3..1e3f64, 4..60)
}

proptest! {
    #[test]
    fn clean_scaled_columns_are_standardized(x in column()) {
        prop_assume!(x.iter().any(|v| (v - x[0]).abs() > 1e-6));
        let t = table(&[("x", x.iter().copied().map(Some).collect())]);
        let p = fit(&t, &config(OutlierAction::Keep, true)).unwrap();
        let z = values(&p.transform(&t).unwrap(), "x");
        let n = z.len() as f64;
        let mean = z.iter().sum::<f64>() / n;
        let var = z.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        prop_assert!(mean.abs() < 1e-9);
        prop_assert!((var.sqrt() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn imputation_is_noop_on_complete_tables(x in column()) {
        let t = table(&[("x", x.iter().copied().map(Some).collect())]);
        let p = fit(&t, &config(OutlierAction::Keep, false)).unwrap();
        prop_assert_eq!(values(&p.transform(&t).unwrap(), "x"), x);
    }

    #[test]
    fn winsorize_stays_within_fences(x in column(), k in 0.1..3.0f64) {
        let t = table(&[("x", x.iter().copied().map(Some).collect())]);
        let cfg = PipelineConfig { iqr_multiplier: k, ..config(OutlierAction::Winsorize, false) };
        let p = fit(&t, &cfg).unwrap();
        let (lo, hi) = p.fences("x").unwrap();
        for (before, after) in x.iter().zip(values(&p.transform(&t).unwrap(), "x")) {
            prop_assert!(after >= lo && after <= hi);
            if *before < lo { prop_assert_eq!(after, lo); }
            else if *before > hi { prop_assert_eq!(after, hi); }
            else { prop_assert_eq!(after, *before); }
        }
    }

    #[test]
    fn drop_removes_exactly_violating_rows(x in column(), y in column()) {
        let n = x.len().min(y.len());
        let t = table(&[
            ("x", x[..n].iter().copied().map(Some).collect()),
            ("y", y[..n].iter().copied().map(Some).collect()),
        ]);
        let p = fit(&t, &config(OutlierAction::Drop, false)).unwrap();
        let (fx, fy) = (p.fences("x").unwrap(), p.fences("y").unwrap());
        let inside = |v: f64, f: (f64, f64)| v >= f.0 && v <= f.1;
        let kept: Vec<f64> = (0..n)
            .filter(|&i| inside(x[i], fx) && inside(y[i], fy))
            .map(|i| x[i])
            .collect();
        prop_assert_eq!(values(&p.transform(&t).unwrap(), "x"), kept);
    }

    #[test]
    fn fit_is_reproducible(x in column()) {
        let mut cells: Vec<Option<f64>> = x.iter().copied().map(Some).collect();
        cells[0] = None;
        let t = table(&[("x", cells)]);
        let cfg = PipelineConfig::default();
        let cfg = PipelineConfig { interaction_pairs: vec![], ..cfg };
        let a = fit(&t, &cfg).unwrap();
        let b = fit(&t, &cfg).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.transform(&t).unwrap().to_csv_string(), b.transform(&t).unwrap().to_csv_string());
        let json = serde_json::to_string(&a).unwrap();
        let back: ecoopt_core::preprocess::FittedPipeline = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, a);
    }
}

use ecoopt_core::datagen::{entrepreneurship_spec, generate, sustainability_spec};
use ecoopt_core::experiments::{
    baseline, compare, countries, sectors, surrogate_data, validate, FRAMEWORK_LABEL,
};
use ecoopt_core::report::{self, ReportTable};
use ecoopt_core::{BoundsSet, ModelCoefficients, WeightConfig};

#[test]
fn countries_are_top_ten_by_component_mean() {
    let t = generate(&sustainability_spec(42)).unwrap();
    let rows = countries(&t, 10).unwrap();
    assert_eq!(rows.len(), 10);
    for r in &rows {
        let mean = r.means.iter().sum::<f64>() / 3.0;
        assert!((r.composite.unwrap() - mean).abs() < 1e-9);
    }
    assert!(rows.windows(2).all(|w| w[0].composite >= w[1].composite));
    let table = report::country_table(&rows).to_data_table().unwrap();
    assert_eq!(table.n_rows(), 10);
}

#[test]
fn sectors_sorted_by_sustainability_impact() {
    let t = generate(&entrepreneurship_spec(42)).unwrap();
    let rows = sectors(&t).unwrap();
    assert_eq!(rows.len(), 14);
    assert!(rows.windows(2).all(|w| w[0].means[0] >= w[1].means[0]));
    assert_eq!(rows.iter().map(|r| r.count).sum::<usize>(), t.n_rows());
}

#[test]
fn baseline_reports_targets() {
    let spec = sustainability_spec(42);
    let t = generate(&spec).unwrap();
    let r = baseline(std::slice::from_ref(&t), &spec).unwrap();
    let ren = r
        .correlations
        .iter()
        .find(|c| c.a == "renewable_energy_pct")
        .unwrap();
    assert!((ren.r - 0.71).abs() <= 0.05);
    assert_eq!(r.correlations.len(), 5);
    assert_eq!(r.trends.len(), 5);
    assert!(r.trends.iter().all(|tr| (tr.first_year, tr.last_year) == (2015, 2024)));
    for table in report::baseline_tables(&r) {
        table.to_data_table().unwrap();
    }
}

fn data(seed: u64) -> ecoopt_core::experiments::SurrogateData {
    let t = generate(&sustainability_spec(seed)).unwrap();
    surrogate_data(&t, &WeightConfig::default(), &ModelCoefficients::default(), &BoundsSet::default(), seed)
        .unwrap()
}

#[test]
fn comparison_favours_boosting_over_linear() {
    let d = data(42);
    let r = compare(&d, 42).unwrap();
    let r2 = |m: &str| r.methods.iter().find(|x| x.method == m).unwrap().metrics.r2;
    assert!(r2("Gradient Boosting") >= 0.98);
    assert!(r2("Gradient Boosting") > r2("Linear Regression"));
    assert!(r2(FRAMEWORK_LABEL) > 0.999);
    let bl = r
        .significance
        .iter()
        .find(|s| s.better == "Gradient Boosting" && s.worse == "Linear Regression")
        .unwrap();
    assert!(bl.significant, "{bl:?}");
    let tables: Vec<ReportTable> = report::comparison_tables(&r);
    assert_eq!(tables[0].rows.len(), 4);
}

#[test]
fn validation_importances_are_ranked() {
    let d = data(3);
    let rows = validate(&d, 3).unwrap();
    assert_eq!(rows.len(), 4);
    for r in &rows {
        assert!(r.importance.windows(2).all(|w| w[0].1 >= w[1].1));
        assert!((r.importance.iter().map(|x| x.1).sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(r.cv.mean.r2 > 0.8, "{} {}", r.component, r.cv.mean.r2);
    }
    // Environmental cost only depends on the three cost columns.
    let env = rows.iter().find(|r| r.component == "environmental").unwrap();
    let top3: Vec<&str> = env.importance.iter().take(3).map(|x| x.0.as_str()).collect();
    for c in ["energy_consumption", "carbon_emissions", "water_usage"] {
        assert!(top3.contains(&c), "{top3:?}");
    }
}

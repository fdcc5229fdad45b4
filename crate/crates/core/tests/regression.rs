//! Behaviour on synthetic series, with thresholds frozen from measured runs.

use rls_predict::predictor::run_prediction;
use rls_predict::strategy::{table_sweep, RowOutcome};
use rls_predict::{correlation, forecast_future, sweep_surface, synth_ar, PredictorConfig, PriceSeries, SweepConfig};

#[test]
fn short_horizon_beats_long_horizon_on_ar1() {
    let s = synth_ar(&[0.9], 0.1, 2000, 7, 50.0).unwrap();
    let r = |l| {
        let t = run_prediction(&s, &PredictorConfig::new(4, l, 0.98)).unwrap();
        let (p, d) = t.window(1800, 1999).unwrap();
        correlation(p, d).unwrap()
    };
    let (short, long) = (r(1), r(20));
    assert!((short - 0.878490573230856).abs() < 1e-9, "{short}");
    assert!((long - 0.40994663826781313).abs() < 1e-9, "{long}");
    assert!(short > long);
}

#[test]
fn ar1_forecast_smoke() {
    let s = synth_ar(&[0.9], 0.1, 2000, 7, 50.0).unwrap();
    let f = forecast_future(&s, &PredictorConfig::new(4, 16, 0.98)).unwrap();
    assert_eq!(f.len(), 16);
    assert!(f.iter().all(|(_, y)| y.is_finite()));
    assert_eq!(f[0].0, 2000);
    assert_eq!(f[15].0, 2015);
}

fn seed11_sweep(l_values: Vec<usize>, n_values: Vec<usize>) -> rls_predict::CorrelationSurface {
    let s = synth_ar(&[0.9], 0.05, 2000, 11, 50.0).unwrap();
    let config = SweepConfig {
        n_values,
        l_values,
        lambda: 0.98,
        delta: 0.01,
        eval_from: 1800,
        eval_to: 1999,
    };
    sweep_surface(&s, &config).unwrap()
}

#[test]
fn sweep_horizon_decay_at_n8() {
    let surface = seed11_sweep(vec![1, 5, 10, 25], vec![8]);
    let expected = [0.8990762861805037, 0.6393692114712388, 0.44155726891872515, 0.08632546493550373];
    for (got, want) in surface.values[0].iter().zip(expected) {
        assert!((got.unwrap() - want).abs() < 1e-9);
    }
    assert!(surface.get(8, 1).unwrap() > surface.get(8, 25).unwrap());
}

#[test]
fn sub_grid_reproduces_full_grid_cells() {
    let full = seed11_sweep(vec![1, 3, 7, 12], vec![2, 6, 10]);
    let sub = seed11_sweep(vec![3, 12], vec![6, 10]);
    for (n, l, r) in sub.cells() {
        assert_eq!(r.map(f64::to_bits), full.get(n, l).map(f64::to_bits));
    }
    assert!(full.cells().all(|(_, _, r)| r.is_some_and(|r| (-1.0..=1.0).contains(&r))));
    // repeated evaluation on the parallel pool is order independent
    assert_eq!(full, seed11_sweep(vec![1, 3, 7, 12], vec![2, 6, 10]));
}

#[test]
fn one_cell_sweep_equals_direct_run() {
    let surface = seed11_sweep(vec![4], vec![6]);
    let s = synth_ar(&[0.9], 0.05, 2000, 11, 50.0).unwrap();
    let t = run_prediction(&s, &PredictorConfig::new(6, 4, 0.98)).unwrap();
    let (p, d) = t.window(1800, 1999).unwrap();
    assert_eq!(surface.get(6, 4), Some(correlation(p, d).unwrap()));
}

#[test]
fn table_is_deterministic_and_ordered() {
    let s = synth_ar(&[0.95], 0.3, 600, 5, 40.0).unwrap();
    let rows = [(20, 8), (10, 4), (30, 12)];
    let a = table_sweep(&s, &rows, 0.98, 0.01, 560);
    let b = table_sweep(&s, &rows, 0.98, 0.01, 560);
    assert_eq!(a, b);
    let order: Vec<(usize, usize)> = a.iter().map(|r| (r.n_coeffs, r.window)).collect();
    assert_eq!(order, rows);
    for row in &a {
        if let RowOutcome::Traded(r) = &row.outcome {
            assert!(r.plan.buy_index < r.plan.sell_index);
            assert!(r.plan.buy_index > 560 && r.plan.sell_index <= 560 + row.window);
            assert_eq!(r.profit_pct, 100.0 * (r.sell_price - r.buy_price) / r.buy_price);
            assert_eq!(r.buy_price, s.price(r.plan.buy_index).unwrap());
        }
    }
}

#[test]
fn constant_series_table_row_is_flat() {
    let s = PriceSeries::new(vec![33.0; 700]).unwrap();
    let rows = table_sweep(&s, &[(100, 16)], 0.98, 0.01, 650);
    match &rows[0].outcome {
        RowOutcome::Traded(r) => {
            assert_eq!(r.profit_pct, 0.0);
            assert_eq!((r.plan.buy_index, r.plan.sell_index), (651, 652));
        }
        other => panic!("{other:?}"),
    }
}

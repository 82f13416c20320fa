use hilbert_ar::datagen::{generate_mackey_glass, MackeyGlassParams};
use hilbert_ar::eval::{aggregate_mse, run_outer_evaluation_with, select_hyperparameters, EvalConfig, Method};
use hilbert_ar::kernel::KernelConfig;
use hilbert_ar::linalg::lstsq;
use hilbert_ar::linear::MomentEstimator;
use hilbert_ar::preimage::{solve_with_fallback, PreimageSettings};
use hilbert_ar::{Parallelism, TimeSeries};
use nalgebra::{DMatrix, DVector};

fn mg30(n: usize) -> TimeSeries {
    generate_mackey_glass(&MackeyGlassParams::default(), n).unwrap()
}

#[test]
fn noiseless_ar1_is_reproduced_with_common_range_moments() {
    let x: Vec<f64> = (0..120).map(|t| 0.9f64.powi(t)).collect();
    let series = TimeSeries::new("ar1", x).unwrap();
    let mut cfg = EvalConfig::new(Method::Lar, 50);
    cfg.linear_estimator = MomentEstimator::CommonRange;
    let rep = run_outer_evaluation_with(&series, &cfg, Parallelism::Sequential).unwrap();
    assert_eq!(rep.records.len(), 70);
    for r in &rep.records {
        assert!(r.sq_error < 1e-16, "frame {}: {}", r.frame_index, r.sq_error);
    }
}

#[test]
fn constant_series_is_forecast_exactly_by_every_method() {
    let series = TimeSeries::new("c", vec![0.75; 60]).unwrap();
    for method in [Method::Lar, Method::Kam, Method::Kem] {
        let cfg = EvalConfig::new(method, 30).with_steps(10);
        let rep = run_outer_evaluation_with(&series, &cfg, Parallelism::Sequential).unwrap();
        assert!(rep.failures.is_empty(), "{method}: {:?}", rep.failures);
        assert_eq!(rep.mse, Some(0.0), "{method}");
        assert!(rep.records.iter().all(|r| r.prediction == 0.75));
    }
}

#[test]
fn report_invariants_hold_on_mg30() {
    let series = mg30(160);
    for method in [Method::Lar, Method::Kam, Method::Kem] {
        let cfg = EvalConfig::new(method, 40).with_steps(25);
        let rep = run_outer_evaluation_with(&series, &cfg, Parallelism::Auto).unwrap();
        assert_eq!(rep.records.len() + rep.failures.len(), 25);
        let errors: Vec<f64> = rep.records.iter().map(|r| r.sq_error).collect();
        assert_eq!(rep.mse, Some(aggregate_mse(&errors, false).unwrap()));
        assert_eq!(rep.mse_trimmed, Some(aggregate_mse(&errors, true).unwrap()));
        for (i, r) in rep.records.iter().enumerate() {
            assert_eq!(r.frame_index, i);
            assert_eq!(r.truth, series.values()[i + 40]);
            assert_eq!(r.sq_error, (r.prediction - r.truth).powi(2));
            assert!(cfg.p_grid.contains(&r.p));
            match method {
                Method::Lar => assert!(r.lp.is_none() && r.ell.is_none()),
                _ => assert!(cfg.lp_grid.contains(&r.lp.unwrap())),
            }
        }
    }
}

#[test]
fn reports_do_not_depend_on_parallelism() {
    let series = mg30(120);
    for method in [Method::Lar, Method::Kem] {
        let cfg = EvalConfig::new(method, 40).with_steps(20);
        let seq = run_outer_evaluation_with(&series, &cfg, Parallelism::Sequential).unwrap();
        let par = run_outer_evaluation_with(&series, &cfg, Parallelism::Threads(3)).unwrap();
        let auto = run_outer_evaluation_with(&series, &cfg, Parallelism::Auto).unwrap();
        assert_eq!(seq, par);
        assert_eq!(seq, auto);
    }
}

#[test]
fn too_short_series_is_a_config_error() {
    let series = mg30(40);
    let cfg = EvalConfig::new(Method::Kam, 40);
    assert!(matches!(
        run_outer_evaluation_with(&series, &cfg, Parallelism::Sequential),
        Err(hilbert_ar::Error::InvalidConfig(_))
    ));
}

// Straight re-implementation of the inner selection loop: explicit lag
// blocks, hand-assembled systems, own median and own tie-breaking.

fn se(x: f64, y: f64, l: f64) -> f64 {
    (-(x - y).powi(2) / (2.0 * l * l)).exp()
}

fn own_median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

fn oracle_alpha(method: Method, x: &[f64], p: usize, l: f64) -> Vec<f64> {
    let n = x.len();
    let (a, b) = match method {
        Method::Kam => {
            let a = DMatrix::from_fn(p, p, |k, j| {
                (p..n).map(|t| se(x[t - j - 1], x[t - k - 1], l)).sum::<f64>() / (n - p) as f64
            });
            let b = DVector::from_fn(p, |k, _| {
                (p..n).map(|t| se(x[t], x[t - k - 1], l)).sum::<f64>() / (n - p) as f64
            });
            (a, b)
        }
        Method::Kem => {
            let m = n - p;
            // lag column j holds x[p + r - j], r = 0..m
            let col = |j: usize, r: usize| x[p + r - j];
            let block = |k: usize, j: usize| DMatrix::from_fn(m, m, |r, s| se(col(k, r), col(j, s), l));
            let h: Vec<DMatrix<f64>> = (1..=p).map(|k| block(k, 0)).collect();
            let kb: Vec<Vec<DMatrix<f64>>> = (1..=p).map(|k| (1..=p).map(|j| block(k, j)).collect()).collect();
            let a = DMatrix::from_fn(p, p, |i, j| (0..p).map(|k| kb[k][i].dot(&kb[k][j])).sum::<f64>());
            let b = DVector::from_fn(p, |i, _| (0..p).map(|k| h[k].dot(&kb[k][i])).sum::<f64>());
            (a, b)
        }
        Method::Lar => unreachable!(),
    };
    lstsq(&a, &b).solution.iter().copied().collect()
}

fn oracle_select(train: &[f64], cfg: &EvalConfig) -> (usize, f64) {
    let half = cfg.w / 2;
    let settings = PreimageSettings::default();
    let mut best: Option<(f64, usize, f64)> = None;
    for &p in &cfg.p_grid {
        for &lp in &cfg.lp_grid {
            let mut total = 0.0;
            for u in 0..half {
                let inner = &train[u..u + half];
                let l = lp * own_median(inner).abs();
                let alpha = oracle_alpha(cfg.method, inner, p, l);
                let hist: Vec<f64> = (1..=p).map(|j| inner[half - j]).collect();
                let k = KernelConfig::squared_exponential(l).unwrap();
                let x = solve_with_fallback(&alpha, &hist, &k, &settings).unwrap().x;
                total += (x - train[u + half]).powi(2);
            }
            let score = total / half as f64;
            let better = match best {
                None => true,
                Some((s, bp, bl)) => score < s || (score == s && (p < bp || (p == bp && lp < bl))),
            };
            if better {
                best = Some((score, p, lp));
            }
        }
    }
    let (_, p, lp) = best.unwrap();
    (p, lp)
}

#[test]
fn mg30_selection_matches_exhaustive_reimplementation() {
    let series = mg30(130);
    for method in [Method::Kam, Method::Kem] {
        let cfg = EvalConfig::new(method, 100);
        for t in [0, 13, 29] {
            let train = &series.values()[t..t + 100];
            let got = select_hyperparameters(train, &cfg).unwrap();
            let (p, lp) = oracle_select(train, &cfg);
            assert_eq!((got.p, got.lp), (p, Some(lp)), "{method} frame {t}");
        }
    }
}

#[test]
fn single_grid_point_is_returned() {
    let series = mg30(60);
    let mut cfg = EvalConfig::new(Method::Kem, 40);
    cfg.p_grid = vec![3];
    cfg.lp_grid = vec![2.0];
    let s = select_hyperparameters(&series.values()[..40], &cfg).unwrap();
    assert_eq!((s.p, s.lp), (3, Some(2.0)));
}

mod common;

use approx::assert_abs_diff_eq;
use rand::Rng;
use shrinkreg::regression::sw_estimates;
use shrinkreg::*;

fn line_with_noise_free_rows(n: usize) -> Dataset<f64> {
    let x = Matrix::from_fn(n, 1, |i, _| i as f64 / 3.0 - 2.0);
    let y = (0..n).map(|i| 0.75 * x[(i, 0)] - 1.25).collect();
    Dataset::new(x, y).unwrap()
}

#[test]
fn exact_line_sw_equals_ols() {
    let data = line_with_noise_free_rows(25);
    let sw = sw_fit(&data).unwrap();
    let ols = ols_fit(&data).unwrap();
    assert!(sw.outliers.is_empty());
    assert_abs_diff_eq!(sw.beta[0], ols.beta[0], epsilon = 1e-8);
    assert_abs_diff_eq!(sw.alpha, ols.alpha, epsilon = 1e-8);
    assert!(sw.sigma2 <= 1e-10);
}

#[test]
fn exact_line_with_bad_leverage_points() {
    let n = 40;
    let mut x = Matrix::from_fn(n, 1, |i, _| i as f64 / 4.0);
    let mut y: Vec<f64> = (0..n).map(|i| 2.0 * x[(i, 0)] + 1.0).collect();
    for i in 0..4 {
        x[(i, 0)] = 60.0 + i as f64;
        y[i] = -30.0 - i as f64;
    }
    let data = Dataset::new(x, y).unwrap();
    let sw = sw_fit(&data).unwrap();
    assert_eq!(&sw.w[..4], &[false; 4]);
    assert_abs_diff_eq!(sw.beta[0], 2.0, epsilon = 1e-6);
    let sr = sr_fit(&data).unwrap();
    assert_eq!(sr.outliers, vec![0, 1, 2, 3]);
    assert_abs_diff_eq!(sr.beta[0], 2.0, epsilon = 1e-10);
    assert_abs_diff_eq!(sr.alpha, 1.0, epsilon = 1e-10);
}

#[test]
fn clean_sample_sw_moments_are_plain_moments() {
    // a compact symmetric cloud where no distance exceeds the cutoff
    let pts = [
        (0.0, 0.0),
        (1.0, 0.5),
        (-1.0, -0.5),
        (0.5, -0.2),
        (-0.5, 0.2),
        (0.2, 0.4),
        (-0.2, -0.4),
    ];
    let x = Matrix::from_fn(pts.len(), 1, |i, _| pts[i].0);
    let data = Dataset::new(x, pts.iter().map(|p| p.1).collect()).unwrap();
    let sw = sw_estimates(&data, &SrConfig::default()).unwrap();
    assert!(sw.w.iter().all(|&k| k));
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / n;
    assert_abs_diff_eq!(sw.location[0], mx, epsilon = 1e-12);
    assert_abs_diff_eq!(sw.location[1], my, epsilon = 1e-12);
    assert_abs_diff_eq!(sw.scatter[(1, 0)], sxy, epsilon = 1e-12);
}

#[test]
fn gross_outlier_is_dropped_at_both_stages() {
    let mut rng = common::rng(5);
    let clean = common::linear_dataset(&mut rng, 30, &[1.0, -1.0], 0.0, 0.3);
    let mut x = clean.carriers().clone();
    let mut y = clean.response().to_vec();
    x[(0, 0)] = 1e6;
    x[(0, 1)] = -1e6;
    y[0] = 1e6;
    let data = Dataset::new(x, y).unwrap();
    let sw = sw_estimates(&data, &SrConfig::default()).unwrap();
    assert!(!sw.w[0]);
    let rest: Vec<usize> = (0..30).filter(|&i| sw.w[i]).collect();
    let joint = data.select(&rest).unwrap().joint();
    let (mean, _) =
        shrinkreg::regression::weighted_moments(&joint, &vec![true; rest.len()]).unwrap();
    for (a, b) in sw.location.iter().zip(&mean) {
        assert_abs_diff_eq!(*a, *b, epsilon = 1e-12);
    }
    assert!(sr_fit(&data).unwrap().outliers.contains(&0));
}

#[test]
fn sr_beats_ols_on_contaminated_lines() {
    let truth = [1.5];
    for seed in 0..100 {
        let mut rng = common::rng(10_000 + seed);
        let lambda = 3.0 + (seed % 5) as f64;
        let frac = 0.10 + 0.05 * (seed % 3) as f64;
        let clean = common::linear_dataset(&mut rng, 80, &truth, 0.5, 1.0);
        let mut x = clean.carriers().clone();
        let mut y = clean.response().to_vec();
        let bad = (80.0 * frac) as usize;
        for i in 0..bad {
            x[(i, 0)] = lambda * 3.0 + rng.random_range(-0.5..0.5);
            y[i] = -lambda * 3.0 + rng.random_range(-0.5..0.5);
        }
        let data = Dataset::new(x, y).unwrap();
        let sr = (sr_fit(&data).unwrap().beta[0] - truth[0]).abs();
        let ols = (ols_fit(&data).unwrap().beta[0] - truth[0]).abs();
        assert!(sr <= ols, "seed {seed}: SR error {sr} > OLS error {ols}");
    }
}

#[test]
fn fixed_weights_final_stage_is_exactly_equivariant() {
    let mut rng = common::rng(77);
    let data = common::linear_dataset(&mut rng, 40, &[0.5, -0.3], 1.0, 1.0);
    let fit = sr_fit(&data).unwrap();
    let kept: Vec<usize> = (0..40).filter(|&i| fit.wr[i]).collect();
    let sub = data.select(&kept).unwrap();
    let base = ols_fit(&sub).unwrap();
    // y -> 2y + x·g + v
    let (c, g, v) = (2.0, [0.4, -1.1], 0.7);
    let y2: Vec<f64> = sub
        .carriers()
        .rows()
        .zip(sub.response())
        .map(|(x, &y)| c * y + x[0] * g[0] + x[1] * g[1] + v)
        .collect();
    let moved = ols_fit(&sub.replace(sub.carriers().clone(), y2).unwrap()).unwrap();
    for j in 0..2 {
        assert_abs_diff_eq!(moved.beta[j], base.beta[j] * c + g[j], epsilon = 1e-10);
    }
    assert_abs_diff_eq!(moved.alpha, base.alpha * c + v, epsilon = 1e-10);
}

#[test]
fn too_few_retained_rows_is_over_trimming() {
    // a cutoff at the 1% quantile keeps almost nothing
    let cfg = SrConfig {
        delta1: 0.99,
        ..SrConfig::default()
    };
    let data = common::linear_dataset(&mut common::rng(8), 12, &[1.0], 0.0, 1.0);
    match sr_fit_with(&data, &cfg) {
        Err(Error::OverTrimming { retained, required }) => {
            assert!(retained < required);
            assert_eq!(required, 3);
        }
        other => panic!("expected over-trimming, got {other:?}"),
    }
}

#[test]
fn adjusted_r2_formula() {
    let mut rng = common::rng(4);
    let data = common::linear_dataset(&mut rng, 50, &[1.0, 2.0, 0.0], 0.0, 1.0);
    let fit = ols_fit(&data).unwrap();
    let expect = 1.0 - (1.0 - fit.r2) * 49.0 / 46.0;
    assert_abs_diff_eq!(fit.adjusted_r2, expect, epsilon = 1e-12);
}

#[test]
fn single_precision_pipeline_agrees_with_double() {
    let mut rng = common::rng(21);
    let data = common::linear_dataset(&mut rng, 60, &[1.0, -0.5], 0.25, 0.5);
    let x32 = Matrix::from_fn(60, 2, |i, j| data.carriers()[(i, j)] as f32);
    let y32: Vec<f32> = data.response().iter().map(|&v| v as f32).collect();
    let data32 = Dataset::new(x32, y32).unwrap();
    let f64_fit = sr_fit(&data).unwrap();
    let f32_fit = sr_fit(&data32).unwrap();
    for (a, b) in f64_fit.params().iter().zip(f32_fit.params()) {
        assert!((a - b as f64).abs() < 1e-3);
    }
}

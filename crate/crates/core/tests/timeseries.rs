use chrono::{Days, NaiveDate};
use moodcast::timeseries::{scale_unit, zscore_local, UnitRange, Window};
use moodcast::TimeSeries;
use proptest::prelude::*;

fn series(values: &[f64]) -> TimeSeries {
    let start = NaiveDate::from_ymd_opt(2008, 1, 1).unwrap();
    TimeSeries::new(
        values
            .iter()
            .enumerate()
            .map(|(i, &v)| (start + Days::new(i as u64), v))
            .collect(),
    )
    .unwrap()
}

fn lcg(n: usize, seed: u64) -> Vec<f64> {
    let mut s = seed
        .wrapping_mul(6364136223846793005)
        .wrapping_add(1442695040888963407);
    (0..n)
        .map(|_| {
            s = s
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64 * 10.0 - 5.0
        })
        .collect()
}

/// Straight per-window recomputation with a two-pass sample variance.
fn brute(values: &[f64], k: usize, trailing: bool) -> Vec<f64> {
    let n = values.len();
    (0..n)
        .map(|t| {
            let (lo, hi) = if trailing {
                (t.saturating_sub(2 * k), t)
            } else {
                (t.saturating_sub(k), (t + k).min(n - 1))
            };
            let w = &values[lo..=hi];
            if w.len() < 2 {
                return 0.0;
            }
            let m = w.iter().sum::<f64>() / w.len() as f64;
            let var = w.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (w.len() - 1) as f64;
            let sd = var.sqrt();
            if sd < 1e-12 {
                0.0
            } else {
                (values[t] - m) / sd
            }
        })
        .collect()
}

#[test]
fn zscore_matches_brute_force_k7() {
    let v = lcg(1000, 11);
    let s = series(&v);
    for (window, trailing) in [(Window::Centered, false), (Window::Trailing, true)] {
        let got = zscore_local(&s, 7, window).unwrap().series.values();
        let want = brute(&v, 7, trailing);
        for (t, (g, w)) in got.iter().zip(&want).enumerate() {
            assert!((g - w).abs() <= 1e-12, "{window:?} t={t}: {g} vs {w}");
        }
    }
}

#[test]
fn zscore_affine_invariance() {
    let v = lcg(1000, 5);
    let z = zscore_local(&series(&v), 7, Window::Centered)
        .unwrap()
        .series
        .values();
    let up: Vec<f64> = v.iter().map(|x| 3.7 * x + 120.0).collect();
    let down: Vec<f64> = v.iter().map(|x| -0.25 * x - 9.0).collect();
    let zu = zscore_local(&series(&up), 7, Window::Centered)
        .unwrap()
        .series
        .values();
    let zd = zscore_local(&series(&down), 7, Window::Centered)
        .unwrap()
        .series
        .values();
    for i in 0..v.len() {
        assert!((z[i] - zu[i]).abs() <= 1e-9);
        assert!((z[i] + zd[i]).abs() <= 1e-9);
    }
}

#[test]
fn flat_windows_are_flagged_and_zero() {
    let mut v = vec![2.0; 30];
    v.extend(lcg(30, 2));
    let z = zscore_local(&series(&v), 3, Window::Centered).unwrap();
    assert!(z.flagged.contains(&0));
    assert_eq!(z.series.values()[10], 0.0);
    assert!(!z.flagged.contains(&45));
}

proptest! {
    #[test]
    fn unit_scaling_round_trips(values in prop::collection::vec(-1e6f64..1e6, 2..200)) {
        prop_assume!(values.iter().any(|&v| v != values[0]));
        let scaled = scale_unit(&values, None).unwrap();
        prop_assert_eq!(scaled.clipped, 0);
        for (s, v) in scaled.values.iter().zip(&values) {
            prop_assert!((0.0..=1.0).contains(s));
            let back = scaled.range.unscale(*s);
            prop_assert!((back - v).abs() <= 1e-12 * v.abs().max(scaled.range.max - scaled.range.min));
        }
    }

    #[test]
    fn zscore_bounded_by_window_size(values in prop::collection::vec(-100f64..100.0, 3..120), k in 1usize..10) {
        // |z| <= (n-1)/sqrt(n) for any sample of n points
        let z = zscore_local(&series(&values), k, Window::Centered).unwrap().series.values();
        let n = (2 * k + 1) as f64;
        let bound = (n - 1.0) / n.sqrt() + 1e-9;
        prop_assert!(z.iter().all(|v| v.abs() <= bound));
    }
}

#[test]
fn applied_range_clips_test_values() {
    let r = UnitRange::new(0.0, 10.0).unwrap();
    let s = scale_unit(&[12.0, 5.0, -1.0], Some(r)).unwrap();
    assert_eq!(s.values, [1.0, 0.5, 0.0]);
    assert_eq!(s.clipped, 2);
}

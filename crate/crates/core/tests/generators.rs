use esn_ituc::timeseries::{
    gen_henon, gen_lorenz, gen_mackey_glass, gen_mso, gen_rossler, Benchmark, HenonParams, LorenzParams,
    MackeyGlassParams, RosslerParams, TimeSeries,
};

fn range(values: &[f64]) -> (f64, f64) {
    values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
        (lo.min(x), hi.max(x))
    })
}

/// Forward Euler at a fine step with an exact-grid delay; samples every time unit.
fn mackey_glass_euler(n: usize, dt: f64) -> Vec<f64> {
    let delay = (17.0 / dt).round() as usize;
    let per_unit = (1.0 / dt).round() as usize;
    let mut hist = std::collections::VecDeque::from(vec![1.2f64; delay]);
    let mut u = 1.2f64;
    let mut out = Vec::with_capacity(n);
    let total = 10 * delay + n * per_unit;
    for step in 0..total {
        let lag = hist.pop_front().unwrap();
        hist.push_back(u);
        u += dt * (0.2 * lag / (1.0 + lag.powi(10)) - 0.1 * u);
        if step >= 10 * delay && (step - 10 * delay).is_multiple_of(per_unit) {
            out.push(u);
        }
    }
    out
}

#[test]
fn mackey_glass_range_agrees_with_euler_oracle() {
    let oracle = mackey_glass_euler(1000, 0.001);
    let (olo, ohi) = range(&oracle);
    assert!(olo > 0.2 && ohi < 1.6, "oracle range ({olo}, {ohi})");

    let ours = gen_mackey_glass(1000, &MackeyGlassParams::default()).unwrap();
    let (lo, hi) = range(ours.as_flat());
    assert!(lo > 0.2 && hi < 1.6, "range ({lo}, {hi})");
    assert!((lo - olo).abs() < 0.05 && (hi - ohi).abs() < 0.05);
}

#[test]
fn mackey_glass_is_aperiodic_at_tau_17() {
    let ts = gen_mackey_glass(3000, &MackeyGlassParams::default()).unwrap();
    let x = ts.as_flat();
    // A periodic orbit would revisit earlier values to within rounding at some lag.
    let min_gap = (50..500)
        .map(|lag| {
            (0..1000)
                .map(|i| (x[i + 1500] - x[i + 1500 - lag]).abs())
                .fold(0.0, f64::max)
        })
        .fold(f64::INFINITY, f64::min);
    assert!(min_gap > 1e-3, "{min_gap}");
}

#[test]
fn lorenz_stays_on_attractor() {
    let ts = gen_lorenz(20_000, &LorenzParams::default()).unwrap();
    for s in ts.samples() {
        assert!(
            s[0].abs() < 25.0 && s[1].abs() < 35.0 && s[2] > 0.0 && s[2] < 55.0,
            "{s:?}"
        );
    }
}

#[test]
fn lorenz_without_sigma_keeps_x() {
    let p = LorenzParams {
        sigma: 0.0,
        ..LorenzParams::default()
    };
    let ts = gen_lorenz(500, &p).unwrap();
    assert!(ts.component(0).iter().all(|&x| x == 1.0));
}

#[test]
fn rossler_z_stays_non_negative() {
    let ts = gen_rossler(20_000, &RosslerParams::default()).unwrap();
    assert!(ts.component(2).iter().all(|&z| z >= 0.0));
    // Finer-step oracle over the same time span agrees on the sign too.
    let fine = gen_rossler(
        20_000,
        &RosslerParams {
            dt: 0.005,
            burn_in: 10_000,
            ..RosslerParams::default()
        },
    )
    .unwrap();
    assert!(fine.component(2).iter().all(|&z| z >= 0.0));
}

/// `‖x(h) - x(h/2)‖ / ‖x(h/2) - x(h/4)‖` at time `t_end` from a fixed start.
fn richardson_ratio(run: impl Fn(f64, usize) -> TimeSeries, h: f64, t_end: f64) -> f64 {
    let at = |dt: f64| {
        let steps = (t_end / dt).round() as usize;
        run(dt, steps + 1).sample(steps).to_vec()
    };
    let (a, b, c) = (at(h), at(h / 2.0), at(h / 4.0));
    let dist = |p: &[f64], q: &[f64]| p.iter().zip(q).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    dist(&a, &b) / dist(&b, &c)
}

#[test]
fn rk4_converges_at_fourth_order() {
    let lorenz = |dt: f64, n: usize| {
        gen_lorenz(
            n,
            &LorenzParams {
                dt,
                burn_in: 0,
                ..LorenzParams::default()
            },
        )
        .unwrap()
    };
    let rossler = |dt: f64, n: usize| {
        gen_rossler(
            n,
            &RosslerParams {
                dt,
                burn_in: 0,
                ..RosslerParams::default()
            },
        )
        .unwrap()
    };
    let ratio = richardson_ratio(lorenz, 0.01, 0.5);
    assert!((ratio - 16.0).abs() < 1.5, "lorenz {ratio}");
    let ratio = richardson_ratio(rossler, 0.05, 4.0);
    assert!((ratio - 16.0).abs() < 1.5, "rossler {ratio}");
}

#[test]
fn henon_stays_bounded() {
    let ts = gen_henon(100_000, &HenonParams::default()).unwrap();
    assert!(ts.as_flat().iter().all(|x| x.abs() < 2.0));
}

#[test]
fn mso_noise_has_requested_variance() {
    let n = 100_000;
    let noisy = gen_mso(n, 0.01, 17).unwrap();
    let clean = gen_mso(n, 0.0, 17).unwrap();
    let z: Vec<f64> = noisy
        .as_flat()
        .iter()
        .zip(clean.as_flat())
        .map(|(a, b)| a - b)
        .collect();
    let mean = z.iter().sum::<f64>() / n as f64;
    let var = z.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
    assert!((var - 0.01).abs() < 0.001, "{var}");
    assert!(((0.2f64).sin() + (0.311f64).sin() - clean.as_flat()[0]).abs() < 1e-15);
}

#[test]
fn benchmarks_are_normalised_and_deterministic() {
    for b in Benchmark::ALL {
        let n = if b == Benchmark::Lorenz { 16_384 } else { 2000 };
        let ts = b.generate(n, 3).unwrap();
        assert_eq!(ts.len(), n);
        assert_eq!(ts.dim(), b.dim());
        for d in 0..ts.dim() {
            let (lo, hi) = range(&ts.component(d));
            assert_eq!((lo, hi), (0.0, 1.0), "{b} dim {d}");
        }
        assert_eq!(ts, b.generate(n, 3).unwrap());
    }
}

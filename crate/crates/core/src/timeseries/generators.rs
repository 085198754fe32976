use super::{SeriesError, TimeSeries};
use crate::rng::Rng;

/// Noise variance of the default MSO series (std 0.1).
pub const MSO_NOISE_VARIANCE: f64 = 0.01;

const HENON_DIVERGENCE: f64 = 1e6;

/// Classical fourth-order Runge-Kutta step of an autonomous vector field.
pub fn rk4_step<const D: usize>(field: impl Fn(&[f64; D]) -> [f64; D], state: &mut [f64; D], dt: f64) {
    let offset = |base: &[f64; D], k: &[f64; D], h: f64| {
        let mut out = *base;
        for (o, ki) in out.iter_mut().zip(k) {
            *o += h * ki;
        }
        out
    };
    let k1 = field(state);
    let k2 = field(&offset(state, &k1, 0.5 * dt));
    let k3 = field(&offset(state, &k2, 0.5 * dt));
    let k4 = field(&offset(state, &k3, dt));
    for i in 0..D {
        state[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

fn positive(name: &str, value: f64) -> Result<(), SeriesError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(SeriesError::Parameter(format!("{name} must be positive, got {value}")))
    }
}

fn nonzero_len(n: usize) -> Result<(), SeriesError> {
    if n == 0 {
        Err(SeriesError::Parameter("series length must be positive".into()))
    } else {
        Ok(())
    }
}

/// Ratio `num / den` as a step count, if it is (numerically) an integer.
fn whole_steps(num: f64, den: f64) -> Option<usize> {
    let ratio = num / den;
    let rounded = ratio.round();
    ((ratio - rounded).abs() <= 1e-9 * rounded.max(1.0) && rounded >= 1.0).then_some(rounded as usize)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MackeyGlassParams {
    pub tau: f64,
    /// Integration step.
    pub dt: f64,
    /// Constant value of the history buffer (and of u(0)).
    pub history_init: f64,
    /// Time between returned samples; a whole multiple of `dt`.
    pub sample_interval: f64,
}

impl Default for MackeyGlassParams {
    fn default() -> Self {
        Self {
            tau: 17.0,
            dt: 0.1,
            history_init: 1.2,
            sample_interval: 1.0,
        }
    }
}

fn mackey_glass_rate(u: f64, delayed: f64) -> f64 {
    0.2 * delayed / (1.0 + delayed.powi(10)) - 0.1 * u
}

/// Mackey-Glass delay differential equation, RK4 with a circular delay buffer.
///
/// Delayed values at half steps are linearly interpolated between the two
/// neighbouring grid points. The first `10·tau/dt` steps are discarded.
pub fn gen_mackey_glass(n: usize, params: &MackeyGlassParams) -> Result<TimeSeries, SeriesError> {
    nonzero_len(n)?;
    positive("tau", params.tau)?;
    positive("dt", params.dt)?;
    positive("sample_interval", params.sample_interval)?;
    let delay_steps = whole_steps(params.tau, params.dt)
        .ok_or_else(|| SeriesError::Parameter(format!("tau/dt = {} is not a whole number", params.tau / params.dt)))?;
    let stride = whole_steps(params.sample_interval, params.dt).ok_or_else(|| {
        SeriesError::Parameter(format!(
            "sample_interval/dt = {} is not a whole number",
            params.sample_interval / params.dt
        ))
    })?;
    if !params.history_init.is_finite() {
        return Err(SeriesError::Parameter("history_init must be finite".into()));
    }

    let dt = params.dt;
    // history[pos] holds u(t - tau); the following entries walk forward to u(t - dt).
    let mut history = vec![params.history_init; delay_steps];
    let mut pos = 0usize;
    let mut u = params.history_init;
    let mut step = |u: &mut f64| {
        let lag_now = history[pos];
        let lag_next = if delay_steps > 1 {
            history[(pos + 1) % delay_steps]
        } else {
            *u
        };
        let lag_half = 0.5 * (lag_now + lag_next);
        let k1 = mackey_glass_rate(*u, lag_now);
        let k2 = mackey_glass_rate(*u + 0.5 * dt * k1, lag_half);
        let k3 = mackey_glass_rate(*u + 0.5 * dt * k2, lag_half);
        let k4 = mackey_glass_rate(*u + dt * k3, lag_next);
        history[pos] = *u;
        pos = (pos + 1) % delay_steps;
        *u += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    };

    for _ in 0..10 * delay_steps {
        step(&mut u);
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        if i > 0 {
            for _ in 0..stride {
                step(&mut u);
            }
        }
        out.push(u);
    }
    TimeSeries::from_flat(1, params.sample_interval, out)
}

/// Two superimposed sines plus Gaussian noise: `sin(0.2t) + sin(0.311t) + z`,
/// `t = 1..=n`, `z ~ N(0, noise_variance)`.
pub fn gen_mso(n: usize, noise_variance: f64, seed: u64) -> Result<TimeSeries, SeriesError> {
    nonzero_len(n)?;
    if !(noise_variance >= 0.0 && noise_variance.is_finite()) {
        return Err(SeriesError::Parameter(format!(
            "noise variance must be non-negative, got {noise_variance}"
        )));
    }
    let std_dev = noise_variance.sqrt();
    let mut rng = Rng::new(seed);
    let values = (1..=n)
        .map(|t| {
            let t = t as f64;
            let clean = (0.2 * t).sin() + (0.311 * t).sin();
            if std_dev > 0.0 {
                clean + rng.normal(0.0, std_dev)
            } else {
                clean
            }
        })
        .collect();
    TimeSeries::from_flat(1, 1.0, values)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LorenzParams {
    pub sigma: f64,
    pub r: f64,
    pub b: f64,
    pub dt: f64,
    pub initial: [f64; 3],
    pub burn_in: usize,
}

impl Default for LorenzParams {
    fn default() -> Self {
        Self {
            sigma: 10.0,
            r: 28.0,
            b: 8.0 / 3.0,
            dt: 0.01,
            initial: [1.0, 1.0, 1.0],
            burn_in: 1000,
        }
    }
}

/// Lorenz system integrated with RK4. The first returned sample is the state
/// after `burn_in` steps; consecutive samples are one step apart.
pub fn gen_lorenz(n: usize, params: &LorenzParams) -> Result<TimeSeries, SeriesError> {
    nonzero_len(n)?;
    positive("dt", params.dt)?;
    let &LorenzParams { sigma, r, b, .. } = params;
    let field = move |s: &[f64; 3]| {
        [
            sigma * (s[1] - s[0]),
            r * s[0] - s[1] - s[0] * s[2],
            s[0] * s[1] - b * s[2],
        ]
    };
    integrate(n, params.dt, params.initial, params.burn_in, field)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RosslerParams {
    pub r: f64,
    pub b: f64,
    pub c: f64,
    pub dt: f64,
    pub initial: [f64; 3],
    pub burn_in: usize,
}

impl Default for RosslerParams {
    fn default() -> Self {
        Self {
            r: 0.15,
            b: 0.20,
            c: 10.0,
            dt: 0.05,
            initial: [0.0, 1.0, 0.0],
            burn_in: 1000,
        }
    }
}

/// Rossler system `x' = -y - z`, `y' = x + r y`, `z' = b + z (x - c)`, RK4.
pub fn gen_rossler(n: usize, params: &RosslerParams) -> Result<TimeSeries, SeriesError> {
    nonzero_len(n)?;
    positive("dt", params.dt)?;
    let &RosslerParams { r, b, c, .. } = params;
    let field = move |s: &[f64; 3]| [-s[1] - s[2], s[0] + r * s[1], b + s[2] * (s[0] - c)];
    integrate(n, params.dt, params.initial, params.burn_in, field)
}

fn integrate(
    n: usize,
    dt: f64,
    initial: [f64; 3],
    burn_in: usize,
    field: impl Fn(&[f64; 3]) -> [f64; 3],
) -> Result<TimeSeries, SeriesError> {
    let mut state = initial;
    for _ in 0..burn_in {
        rk4_step(&field, &mut state, dt);
    }
    let mut data = Vec::with_capacity(3 * n);
    for i in 0..n {
        if i > 0 {
            rk4_step(&field, &mut state, dt);
        }
        data.extend_from_slice(&state);
    }
    TimeSeries::from_flat(3, dt, data)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HenonParams {
    pub r: f64,
    pub b: f64,
    pub x0: f64,
    pub y0: f64,
}

impl Default for HenonParams {
    fn default() -> Self {
        Self {
            r: 1.4,
            b: 0.3,
            x0: 1.0,
            y0: 1.0,
        }
    }
}

/// x-component of the Henon map, starting from the first iterate after
/// `(x0, y0)`.
pub fn gen_henon(n: usize, params: &HenonParams) -> Result<TimeSeries, SeriesError> {
    nonzero_len(n)?;
    let (mut x, mut y) = (params.x0, params.y0);
    let mut out = Vec::with_capacity(n);
    for step in 1..=n {
        let next_x = 1.0 - params.r * x * x + y;
        y = params.b * x;
        x = next_x;
        if !(x.abs() <= HENON_DIVERGENCE) {
            return Err(SeriesError::Divergence { step, value: x.abs() });
        }
        out.push(x);
    }
    TimeSeries::from_flat(1, 1.0, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn henon_first_iterates() {
        let ts = gen_henon(2, &HenonParams::default()).unwrap();
        assert!((ts.as_flat()[0] - 0.6).abs() < 1e-15);
        assert!((ts.as_flat()[1] - 0.796).abs() < 1e-15);
    }

    #[test]
    fn henon_without_b_is_one_dimensional() {
        let params = HenonParams {
            b: 0.0,
            x0: 0.3,
            y0: 0.0,
            ..HenonParams::default()
        };
        let ts = gen_henon(50, &params).unwrap();
        let mut x = 0.3_f64;
        for &got in ts.as_flat() {
            x = 1.0 - 1.4 * x * x;
            assert_eq!(got, x);
        }
    }

    #[test]
    fn henon_divergence_reports_step() {
        let params = HenonParams {
            r: 3.0,
            x0: 5.0,
            ..HenonParams::default()
        };
        match gen_henon(100, &params) {
            Err(SeriesError::Divergence { step, .. }) => assert!(step > 1 && step < 10),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn mso_noiseless_closed_form() {
        let ts = gen_mso(5, 0.0, 1).unwrap();
        assert_eq!(ts.as_flat()[0], 0.2f64.sin() + 0.311f64.sin());
        assert!(gen_mso(5, -1.0, 1).is_err());
    }

    #[test]
    fn lorenz_without_sigma_freezes_x() {
        let params = LorenzParams {
            sigma: 0.0,
            ..LorenzParams::default()
        };
        let ts = gen_lorenz(500, &params).unwrap();
        assert!(ts.component(0).iter().all(|&x| x == 1.0));
    }

    #[test]
    fn rossler_without_b_is_linear_in_xy() {
        let params = |x0: f64| RosslerParams {
            b: 0.0,
            initial: [x0, 0.0, 0.0],
            burn_in: 0,
            ..RosslerParams::default()
        };
        let one = gen_rossler(200, &params(1.0)).unwrap();
        let two = gen_rossler(200, &params(2.0)).unwrap();
        assert!(one.component(2).iter().all(|&z| z == 0.0));
        assert!(one.component(0).iter().all(|&x| x <= 10.0));
        // Doubling the start doubles the whole (x, y) trajectory exactly.
        for (a, b) in one.as_flat().iter().zip(two.as_flat()) {
            assert_eq!(2.0 * a, *b);
        }
    }

    #[test]
    fn mackey_glass_parameter_checks() {
        assert!(gen_mackey_glass(
            10,
            &MackeyGlassParams {
                dt: 0.0,
                ..Default::default()
            }
        )
        .is_err());
        assert!(gen_mackey_glass(
            10,
            &MackeyGlassParams {
                tau: -1.0,
                ..Default::default()
            }
        )
        .is_err());
        assert!(gen_mackey_glass(
            10,
            &MackeyGlassParams {
                dt: 0.3,
                ..Default::default()
            }
        )
        .is_err());
        assert!(gen_mackey_glass(0, &MackeyGlassParams::default()).is_err());
    }

    #[test]
    fn mackey_glass_is_deterministic() {
        let p = MackeyGlassParams::default();
        assert_eq!(gen_mackey_glass(300, &p).unwrap(), gen_mackey_glass(300, &p).unwrap());
    }

    #[test]
    fn whole_step_detection() {
        assert_eq!(whole_steps(17.0, 0.1), Some(170));
        assert_eq!(whole_steps(1.0, 0.1), Some(10));
        assert_eq!(whole_steps(17.0, 0.3), None);
    }
}

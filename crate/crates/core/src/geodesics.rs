//! Geodesic integration used as a dynamical check of reversibility.
//!
//! Finsler geodesics solve `x'' = −2G(x, x')` with the spray coefficients computed from
//! finite differences of `F²`, so this module does not rely on the symbolic pipeline.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metric::{IsothermalMetric, MetricBundle, Rect};

/// A sampled trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicPath {
    pub samples: Vec<[f64; 2]>,
    pub velocities: Vec<[f64; 2]>,
    pub x0: [f64; 2],
    pub y0: [f64; 2],
    pub h: f64,
    pub duration: f64,
    /// Set when integration stopped at the domain boundary.
    pub truncated: bool,
}

impl GeodesicPath {
    pub fn end(&self) -> ([f64; 2], [f64; 2]) {
        (
            *self.samples.last().expect("paths are non-empty"),
            *self.velocities.last().expect("paths are non-empty"),
        )
    }

    /// Largest distance from a sample to the segment joining the endpoints.
    pub fn max_chord_deviation(&self) -> f64 {
        let a = self.samples[0];
        let b = *self.samples.last().expect("paths are non-empty");
        self.samples
            .iter()
            .map(|&p| point_segment_distance(p, a, b))
            .fold(0.0, f64::max)
    }

    pub fn euclidean_length(&self) -> f64 {
        self.samples.windows(2).map(|w| dist(w[0], w[1])).sum()
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn point_segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    if len2 == 0.0 {
        return dist(p, a);
    }
    let u = (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0);
    dist(p, [a[0] + u * d[0], a[1] + u * d[1]])
}

fn point_polyline_distance(p: [f64; 2], line: &[[f64; 2]]) -> f64 {
    if line.len() == 1 {
        return dist(p, line[0]);
    }
    line.windows(2)
        .map(|w| point_segment_distance(p, w[0], w[1]))
        .fold(f64::INFINITY, f64::min)
}

fn mean_distance(from: &[[f64; 2]], to: &[[f64; 2]]) -> f64 {
    let total: f64 = from
        .par_iter()
        .map(|&p| point_polyline_distance(p, to))
        .collect::<Vec<_>>()
        .iter()
        .sum();
    total / from.len() as f64
}

/// Symmetric mean of nearest-point distances between two polylines.
pub fn path_distance(a: &GeodesicPath, b: &GeodesicPath) -> f64 {
    polyline_distance(&a.samples, &b.samples)
}

pub fn polyline_distance(a: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty(), "paths must be non-empty");
    0.5 * (mean_distance(a, b) + mean_distance(b, a))
}

/// Spray coefficients `(G¹, G²)` of `F` at `(x, y)`.
pub fn spray(bundle: &MetricBundle, x: [f64; 2], y: [f64; 2]) -> Result<[f64; 2]> {
    let hx = 1e-5 * bundle.domain().extent();
    spray_with_step(bundle, x, y, hx)
}

#[allow(clippy::needless_range_loop)]
fn spray_with_step(bundle: &MetricBundle, x: [f64; 2], y: [f64; 2], hx: f64) -> Result<[f64; 2]> {
    let ny = y[0].hypot(y[1]);
    if ny == 0.0 || !ny.is_finite() {
        return Err(Error::InvalidArgument(
            "spray needs a nonzero finite tangent vector".into(),
        ));
    }
    let hy = 1e-4 * ny;
    let f2 = |x: [f64; 2], y: [f64; 2]| -> Result<f64> {
        let f = bundle.norm(x, y)?;
        Ok(f * f)
    };
    let shift = |v: [f64; 2], i: usize, d: f64| {
        let mut w = v;
        w[i] += d;
        w
    };
    // ∂F²/∂yˡ by central differences
    let dy = |x: [f64; 2], l: usize| -> Result<f64> {
        Ok((f2(x, shift(y, l, hy))? - f2(x, shift(y, l, -hy))?) / (2.0 * hy))
    };

    let center = f2(x, y)?;
    let mut g = [[0.0; 2]; 2];
    for i in 0..2 {
        g[i][i] =
            0.5 * (f2(x, shift(y, i, hy))? - 2.0 * center + f2(x, shift(y, i, -hy))?) / (hy * hy);
    }
    let pp = f2(x, shift(shift(y, 0, hy), 1, hy))?;
    let pm = f2(x, shift(shift(y, 0, hy), 1, -hy))?;
    let mp = f2(x, shift(shift(y, 0, -hy), 1, hy))?;
    let mm = f2(x, shift(shift(y, 0, -hy), 1, -hy))?;
    g[0][1] = 0.5 * (pp - pm - mp + mm) / (4.0 * hy * hy);
    g[1][0] = g[0][1];

    let mut rhs = [0.0; 2];
    for l in 0..2 {
        let mut mixed = 0.0;
        for k in 0..2 {
            let d = (dy(shift(x, k, hx), l)? - dy(shift(x, k, -hx), l)?) / (2.0 * hx);
            mixed += d * y[k];
        }
        let dx = (f2(shift(x, l, hx), y)? - f2(shift(x, l, -hx), y)?) / (2.0 * hx);
        rhs[l] = 0.5 * (mixed - dx);
    }

    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    if !(g[0][0] > 0.0 && det > 0.0) {
        return Err(Error::SingularHessian { x, y });
    }
    // g·(2G) = rhs
    let two_g = [
        (g[1][1] * rhs[0] - g[0][1] * rhs[1]) / det,
        (g[0][0] * rhs[1] - g[1][0] * rhs[0]) / det,
    ];
    Ok([0.5 * two_g[0], 0.5 * two_g[1]])
}

/// Closed-form spray of the conformal metric `e^{2ν}δ`: `Gⁱ = yⁱ(∇ν·y) − ½|y|²∂ᵢν`.
pub fn riemann_spray(metric: &IsothermalMetric, x: [f64; 2], y: [f64; 2]) -> Result<[f64; 2]> {
    let n = metric.grad(x)?;
    let dot = n[0] * y[0] + n[1] * y[1];
    let sq = y[0] * y[0] + y[1] * y[1];
    Ok([y[0] * dot - 0.5 * sq * n[0], y[1] * dot - 0.5 * sq * n[1]])
}

type State = [f64; 4];

fn rk4_step(f: &dyn Fn(&State) -> Result<State>, s: &State, h: f64) -> Result<State> {
    let add = |a: &State, b: &State, c: f64| -> State { std::array::from_fn(|i| a[i] + c * b[i]) };
    let k1 = f(s)?;
    let k2 = f(&add(s, &k1, 0.5 * h))?;
    let k3 = f(&add(s, &k2, 0.5 * h))?;
    let k4 = f(&add(s, &k3, h))?;
    Ok(std::array::from_fn(|i| {
        s[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    }))
}

fn check_inputs(y0: [f64; 2], duration: f64, h: f64) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "step h must be positive, got {h}"
        )));
    }
    if !(duration >= 0.0 && duration.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "duration must be non-negative, got {duration}"
        )));
    }
    if y0[0] == 0.0 && y0[1] == 0.0 {
        return Err(Error::InvalidArgument(
            "initial direction must be nonzero".into(),
        ));
    }
    Ok(())
}

/// Fixed-step RK4 on `(x, y)` with `x'' = −2G(x, x')`; the last step is shortened to land on `duration`.
fn integrate_with(
    spray: &(dyn Fn([f64; 2], [f64; 2]) -> Result<[f64; 2]> + Sync),
    domain: Rect,
    x0: [f64; 2],
    y0: [f64; 2],
    duration: f64,
    h: f64,
) -> Result<GeodesicPath> {
    check_inputs(y0, duration, h)?;
    let rhs = |s: &State| -> Result<State> {
        let g = spray([s[0], s[1]], [s[2], s[3]])?;
        Ok([s[2], s[3], -2.0 * g[0], -2.0 * g[1]])
    };
    let steps = (duration / h - 1e-9).ceil().max(0.0) as usize;
    let mut state = [x0[0], x0[1], y0[0], y0[1]];
    let mut samples = vec![x0];
    let mut velocities = vec![y0];
    let mut truncated = !domain.contains(x0);
    let mut elapsed = 0.0;
    for k in 0..steps {
        if truncated {
            break;
        }
        let step = if k + 1 == steps {
            duration - h * k as f64
        } else {
            h
        };
        let next = rk4_step(&rhs, &state, step)?;
        if !domain.contains([next[0], next[1]]) {
            truncated = true;
            break;
        }
        state = next;
        elapsed += step;
        samples.push([state[0], state[1]]);
        velocities.push([state[2], state[3]]);
    }
    Ok(GeodesicPath {
        samples,
        velocities,
        x0,
        y0,
        h,
        duration: elapsed,
        truncated,
    })
}

/// Integrates the Finsler geodesic through `(x0, y0)` for time `duration`.
pub fn integrate(
    bundle: &MetricBundle,
    x0: [f64; 2],
    y0: [f64; 2],
    duration: f64,
    h: f64,
) -> Result<GeodesicPath> {
    integrate_with(
        &|x, y| spray(bundle, x, y),
        bundle.domain(),
        x0,
        y0,
        duration,
        h,
    )
}

/// Integrates the geodesic of `e^{2ν}δ` with closed-form Christoffel symbols.
pub fn riemann_geodesic(
    metric: &IsothermalMetric,
    x0: [f64; 2],
    y0: [f64; 2],
    duration: f64,
    h: f64,
) -> Result<GeodesicPath> {
    integrate_with(
        &|x, y| riemann_spray(metric, x, y),
        metric.domain(),
        x0,
        y0,
        duration,
        h,
    )
}

/// Composite Simpson integral of `F(x, −x')` along the samples (trapezoid on a trailing odd interval).
fn reverse_length(bundle: &MetricBundle, path: &GeodesicPath) -> Result<f64> {
    let vals: Vec<f64> = path
        .samples
        .iter()
        .zip(&path.velocities)
        .map(|(&x, &y)| bundle.norm(x, [-y[0], -y[1]]))
        .collect::<Result<_>>()?;
    let n = vals.len();
    if n < 2 {
        return Ok(0.0);
    }
    // every step is h except possibly the last one
    let last = path.duration - path.h * (n - 2) as f64;
    let uniform = n - 1 - usize::from(last != path.h);
    let mut total = 0.0;
    let mut i = 0;
    while i + 2 <= uniform {
        total += path.h / 3.0 * (vals[i] + 4.0 * vals[i + 1] + vals[i + 2]);
        i += 2;
    }
    while i + 1 < n {
        let step = if i + 1 == n - 1 { last } else { path.h };
        total += 0.5 * step * (vals[i] + vals[i + 1]);
        i += 1;
    }
    Ok(total)
}

/// Forward path, the path traced back from its endpoint, and their distance.
#[derive(Debug, Clone)]
pub struct ReversibilityRun {
    pub forward: GeodesicPath,
    pub reverse: GeodesicPath,
    /// Duration of the reverse run, chosen so that both runs cover the same `F̄`-length.
    pub reverse_duration: f64,
    pub error: f64,
}

impl ReversibilityRun {
    pub fn truncated(&self) -> bool {
        self.forward.truncated || self.reverse.truncated
    }
}

/// Integrates forward from `(x0, y0)`, then from `(x_T, −y_T)` back over the same reverse length.
///
/// `y0` is first rescaled to `F(x0, y0) = 1`, so the result depends only on its direction.
pub fn reversibility_run(
    bundle: &MetricBundle,
    x0: [f64; 2],
    y0: [f64; 2],
    duration: f64,
    h: f64,
) -> Result<ReversibilityRun> {
    check_inputs(y0, duration, h)?;
    let f0 = bundle.norm(x0, y0)?;
    let y0 = [y0[0] / f0, y0[1] / f0];
    let forward = integrate(bundle, x0, y0, duration, h)?;
    let (xt, yt) = forward.end();
    let back = [-yt[0], -yt[1]];
    let speed = bundle.norm(xt, back)?;
    let reverse_duration = reverse_length(bundle, &forward)? / speed;
    let reverse = integrate(bundle, xt, back, reverse_duration, h)?;
    let error = path_distance(&forward, &reverse);
    Ok(ReversibilityRun {
        forward,
        reverse,
        reverse_duration,
        error,
    })
}

pub fn reversibility_error(
    bundle: &MetricBundle,
    x0: [f64; 2],
    y0: [f64; 2],
    duration: f64,
    h: f64,
) -> Result<f64> {
    Ok(reversibility_run(bundle, x0, y0, duration, h)?.error)
}

/// `n` unit directions at angles `2πk/n`.
pub fn seed_directions(n: usize) -> Vec<[f64; 2]> {
    (0..n)
        .map(|k| {
            let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            [a.cos(), a.sin()]
        })
        .collect()
}

/// Runs [`reversibility_run`] for each direction in parallel, preserving order.
pub fn reversibility_batch(
    bundle: &MetricBundle,
    x0: [f64; 2],
    directions: &[[f64; 2]],
    duration: f64,
    h: f64,
) -> Vec<Result<ReversibilityRun>> {
    directions
        .par_iter()
        .map(|&y| reversibility_run(bundle, x0, y, duration, h))
        .collect()
}

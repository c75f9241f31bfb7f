#![allow(dead_code)]

use geodrev::metric::{IsothermalMetric, LinearForm, MetricBundle, PhiFunction, Rect, Sampling};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub const SPHERE_NU: &str = "-ln(1 + (x1^2 + x2^2)/4)";

pub struct Profile {
    pub name: &'static str,
    pub phi: PhiFunction,
    pub even: bool,
    /// Even part plus a multiple of s.
    pub even_plus_linear: bool,
}

pub fn corpus() -> Vec<Profile> {
    let p = |name, phi: PhiFunction, even, even_plus_linear| Profile {
        name,
        phi,
        even,
        even_plus_linear,
    };
    vec![
        p("randers", PhiFunction::randers(0.9).unwrap(), false, true),
        p(
            "matsumoto",
            PhiFunction::matsumoto(0.4).unwrap(),
            false,
            false,
        ),
        p(
            "1+s^2",
            PhiFunction::from_expr("1 + s^2", 0.5).unwrap(),
            true,
            true,
        ),
        p(
            "1+s^2+0.3s",
            PhiFunction::from_expr("1 + s^2 + 0.3*s", 0.5).unwrap(),
            false,
            true,
        ),
        p(
            "exp(s^2)-0.5s",
            PhiFunction::even_plus_linear("exp(s^2)", -0.5, 0.5).unwrap(),
            false,
            true,
        ),
    ]
}

pub fn bundle(nu: &str, b1: &str, b2: &str, phi: PhiFunction, sampling: Sampling) -> MetricBundle {
    MetricBundle::new(
        IsothermalMetric::parse(nu, Rect::square(1.5)).unwrap(),
        LinearForm::parse(b1, b2).unwrap(),
        phi,
        sampling,
    )
    .unwrap()
}

pub fn class_a(sampling: Sampling) -> MetricBundle {
    bundle(
        SPHERE_NU,
        "0.1*x2",
        "0.1*x1",
        PhiFunction::randers(0.9).unwrap(),
        sampling,
    )
}

pub fn class_b(sampling: Sampling) -> MetricBundle {
    bundle(
        "0",
        "0.2",
        "0.1",
        PhiFunction::matsumoto(0.4).unwrap(),
        sampling,
    )
}

pub fn irreversible(sampling: Sampling) -> MetricBundle {
    bundle(
        "0",
        "0.2 + 0.1*x1",
        "0",
        PhiFunction::matsumoto(0.4).unwrap(),
        sampling,
    )
}

/// A general curved configuration exercising every derivative term.
pub fn generic(sampling: Sampling) -> MetricBundle {
    bundle(
        "0.2*x1 - 0.1*x2^2 + 0.05*sin(x1*x2)",
        "0.1 + 0.05*x1*x2",
        "0.08*cos(x1) - 0.03*x2",
        PhiFunction::matsumoto(0.4).unwrap(),
        sampling,
    )
}

pub fn witnesses() -> Vec<(&'static str, MetricBundle)> {
    let s = Sampling::default();
    vec![
        ("class A", class_a(s)),
        ("class B", class_b(s)),
        ("irreversible", irreversible(s)),
    ]
}

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Uniform `(x, t)` inside the bundle's domain shrunk by 5%.
pub fn random_xt(rng: &mut StdRng, bundle: &MetricBundle) -> ([f64; 2], f64) {
    let d = bundle.domain();
    let shrink = |lo: f64, hi: f64| {
        let m = 0.05 * (hi - lo);
        (lo + m, hi - m)
    };
    let (a, b) = shrink(d.x1_min, d.x1_max);
    let (c, e) = shrink(d.x2_min, d.x2_max);
    let x = [rng.gen_range(a..b), rng.gen_range(c..e)];
    (x, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// `n` points strictly inside (−b, b).
pub fn open_grid(b: f64, n: usize) -> Vec<f64> {
    (1..=n)
        .map(|i| -b + 2.0 * b * i as f64 / (n + 1) as f64)
        .collect()
}

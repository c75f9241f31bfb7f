//! Acceptance suite: one line per criterion, non-zero exit status if any fails.

mod common;

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::*;
use geodrev::frames::{self, DerivMode};
use geodrev::geodesics::{self, riemann_geodesic, seed_directions};
use geodrev::metric::{beta_on_indicatrix, validate_finsler, IsothermalMetric, Rect, Sampling};
use geodrev::reversibility::{
    cal_e, cal_f, classify, gauss_curvature, integrability_obstruction, Verdict,
};
use geodrev::scalarfield::{fd_check, Point, ScalarField, Var};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn parity() -> Outcome {
    let mut worst_e: f64 = 0.0;
    let mut worst_f: f64 = 0.0;
    for p in corpus() {
        let b0 = p.phi.b0();
        let b = 0.9 * b0;
        let samples = open_grid(b, 200);
        let scale_e = 1.0
            + samples
                .iter()
                .map(|&s| cal_e(&p.phi, s).unwrap().abs())
                .fold(0.0, f64::max);
        let scale_f = 1.0
            + samples
                .iter()
                .map(|&s| cal_f(&p.phi, s, b).unwrap().abs())
                .fold(0.0, f64::max);
        for &s in &samples {
            let e = (cal_e(&p.phi, s).unwrap() + cal_e(&p.phi, -s).unwrap()).abs() / scale_e;
            let f = (cal_f(&p.phi, s, b).unwrap() - cal_f(&p.phi, -s, b).unwrap()).abs() / scale_f;
            ensure(e <= 1e-12, || {
                format!("{}: E not odd at s = {s} ({e:e})", p.name)
            })?;
            ensure(f <= 1e-12, || {
                format!("{}: F not even at s = {s} ({f:e})", p.name)
            })?;
            worst_e = worst_e.max(e);
            worst_f = worst_f.max(f);
        }
        ensure(cal_e(&p.phi, 0.0).unwrap() == 0.0, || {
            format!("{}: E(0) != 0", p.name)
        })?;
    }
    Ok(format!(
        "max relative |E(s)+E(-s)| = {worst_e:e}, |F(s)-F(-s)| = {worst_f:e}"
    ))
}

fn e_vanishing() -> Outcome {
    let eps = Sampling::default().eps_zero;
    let mut worst: f64 = 0.0;
    for p in corpus().into_iter().filter(|p| p.even_plus_linear) {
        for s in open_grid(p.phi.b0(), 201) {
            let e = cal_e(&p.phi, s).unwrap().abs();
            ensure(e <= eps, || format!("{}: |E({s})| = {e:e}", p.name))?;
            worst = worst.max(e);
        }
    }
    let m = corpus()
        .into_iter()
        .find(|p| p.name == "matsumoto")
        .unwrap()
        .phi;
    let max_m = (0..=250)
        .map(|i| cal_e(&m, 0.05 + 0.25 * i as f64 / 250.0).unwrap().abs())
        .fold(0.0, f64::max);
    ensure(max_m >= 0.1, || {
        format!("matsumoto max |E| on [0.05, 0.3] = {max_m}")
    })?;
    // exact rational value of E(1/10) for φ = 1/(1 − s)
    let oracle = 400000.0 / 323433.0;
    let e01 = cal_e(&m, 0.1).unwrap();
    ensure(
        (e01 - 1.23673).abs() <= 1e-5 && (e01 - oracle).abs() <= 1e-12,
        || format!("matsumoto E(0.1) = {e01}, expected {oracle}"),
    )?;
    Ok(format!(
        "even+linear max |E| = {worst:e}; matsumoto max |E| = {max_m:.4}, E(0.1) = {e01:.8}"
    ))
}

fn f_nonvanishing() -> Outcome {
    let eps = Sampling::default().eps_zero;
    let mut report = Vec::new();
    for p in corpus() {
        let b0 = p.phi.b0();
        let mut min_f = f64::INFINITY;
        let mut max_f: f64 = 0.0;
        for j in 1..40 {
            let b = b0 * j as f64 / 40.0;
            for i in 0..=40 {
                let s = -b + 2.0 * b * i as f64 / 40.0;
                if p.phi.at(s).unwrap().d1 == 0.0 || p.phi.at(-s).unwrap().d1 == 0.0 {
                    continue;
                }
                let f = cal_f(&p.phi, s, b).unwrap().abs();
                min_f = min_f.min(f);
                max_f = max_f.max(f);
                if p.name == "randers" {
                    ensure((cal_f(&p.phi, s, b).unwrap() - 2.0).abs() <= 1e-12, || {
                        format!("randers F({s}, {b}) != 2")
                    })?;
                }
            }
        }
        if p.even {
            ensure(max_f <= eps, || {
                format!("{}: max |F| = {max_f:e} for an even profile", p.name)
            })?;
            report.push(format!("{} max {max_f:e}", p.name));
        } else {
            ensure(validate_finsler(&p.phi, 128).pass, || {
                format!("{} not accepted", p.name)
            })?;
            ensure(min_f > 0.0, || format!("{}: min |F| = {min_f:e}", p.name))?;
            report.push(format!("{} min {min_f:.3}", p.name));
        }
    }
    Ok(report.join(", "))
}

fn beta_identity() -> Outcome {
    let mut rng = rng(4);
    let mut worst: f64 = 0.0;
    for (_, b) in witnesses() {
        for _ in 0..1000 {
            let (x, t) = random_xt(&mut rng, &b);
            let v = beta_on_indicatrix(&b, x, t).unwrap();
            let err = (v.beta_t * v.beta_t - (v.bsq - v.beta * v.beta)).abs()
                / v.bsq.max(f64::MIN_POSITIVE);
            worst = worst.max(err);
        }
    }
    ensure(worst <= 1e-12, || format!("max relative error {worst:e}"))?;
    Ok(format!("3000 samples, max relative error {worst:e}"))
}

fn crosscheck_oracle() -> Outcome {
    let s = Sampling::default();
    let eps = s.eps_zero;
    let mut rng = rng(5);
    let b = irreversible(s);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (x, t) = random_xt(&mut rng, &b);
        let c = frames::crosscheck(&b, x, t).unwrap();
        let gap =
            (c.direct.abs() - c.closed_form.abs()).abs() / c.direct.abs().max(c.closed_form.abs());
        ensure(gap <= 1e-6, || format!("gap {gap:e} at {x:?}, t = {t}"))?;
        worst = worst.max(gap);
    }
    for (name, b) in [("class A", class_a(s)), ("class B", class_b(s))] {
        for _ in 0..100 {
            let (x, t) = random_xt(&mut rng, &b);
            let c = frames::crosscheck(&b, x, t).unwrap();
            ensure(c.direct.abs() <= eps && c.closed_form.abs() <= eps, || {
                format!(
                    "{name}: direct {:e}, closed {:e} at {x:?}, t = {t}",
                    c.direct, c.closed_form
                )
            })?;
        }
    }
    Ok(format!(
        "irreversible max relative gap {worst:e}; reversible witnesses vanish"
    ))
}

fn classification() -> Outcome {
    let s = Sampling::default();
    let cases = [
        ("class A", class_a as fn(Sampling) -> _, Verdict::ClassA),
        ("class B", class_b, Verdict::ClassB),
        ("irreversible", irreversible, Verdict::Irreversible),
    ];
    for (name, make, want) in cases {
        for sampling in [s, s.doubled()] {
            let got = classify(&make(sampling)).unwrap().verdict;
            ensure(got == want, || {
                format!("{name} with {sampling:?}: got {got}, expected {want}")
            })?;
        }
    }
    Ok("ClassA, ClassB, Irreversible at default and doubled sampling".into())
}

fn dynamics() -> Outcome {
    let s = Sampling::default();
    let dirs = seed_directions(8);
    let a = class_a(s);
    let worst_a = geodesics::reversibility_batch(&a, [0.0, 0.0], &dirs, 1.0, 1e-3)
        .into_iter()
        .map(|r| r.unwrap().error)
        .fold(0.0, f64::max);
    ensure(worst_a <= 1e-6, || {
        format!("class A reversibility error {worst_a:e}")
    })?;

    let i = irreversible(s);
    let best_i = geodesics::reversibility_batch(&i, [0.0, 0.0], &dirs, 1.0, 1e-3)
        .into_iter()
        .map(|r| r.unwrap().error)
        .fold(0.0, f64::max);
    ensure(best_i >= 1e-3, || {
        format!("irreversible max error {best_i:e}")
    })?;

    let b = class_b(s);
    let mut dev: f64 = 0.0;
    let mut g_max: f64 = 0.0;
    for &y in &dirs {
        let p = geodesics::integrate(&b, [0.0, 0.0], y, 1.0, 1e-3).unwrap();
        dev = dev.max(p.max_chord_deviation());
        for &x in p.samples.iter().step_by(100) {
            let g = geodesics::spray(&b, x, y).unwrap();
            g_max = g_max.max(g[0].abs()).max(g[1].abs());
        }
    }
    ensure(dev <= 1e-8, || format!("class B chord deviation {dev:e}"))?;
    ensure(g_max <= 1e-10, || format!("class B spray {g_max:e}"))?;
    Ok(format!(
        "class A max error {worst_a:e}; irreversible max error {best_i:e}; class B deviation {dev:e}, |G| {g_max:e}"
    ))
}

fn geometry() -> Outcome {
    let sphere = IsothermalMetric::parse(SPHERE_NU, Rect::square(1.5)).unwrap();
    let mut rng = rng(8);
    let probe = class_a(Sampling::default());
    let mut k_err: f64 = 0.0;
    let mut s_err: f64 = 0.0;
    let mut o_err: f64 = 0.0;
    let metrics = [
        sphere.clone(),
        IsothermalMetric::parse("0.2*x1 - 0.1*x2^2 + 0.05*sin(x1*x2)", Rect::square(1.5)).unwrap(),
        IsothermalMetric::parse("x1^2 - x2^2", Rect::square(1.5)).unwrap(),
    ];
    for _ in 0..50 {
        let (x, t) = random_xt(&mut rng, &probe);
        k_err = k_err.max((gauss_curvature(&sphere, x).unwrap() - 1.0).abs());
        for m in &metrics {
            s_err = s_err.max(
                frames::structure_residuals(m, x, t)
                    .unwrap()
                    .into_iter()
                    .fold(0.0, f64::max),
            );
            let lhs = integrability_obstruction(m, x).unwrap();
            let rhs = -(2.0 * m.nu(x).unwrap()).exp() * gauss_curvature(m, x).unwrap();
            o_err = o_err.max((lhs - rhs).abs() / lhs.abs().max(1e-300).max(rhs.abs()));
        }
    }
    ensure(k_err <= 1e-8, || {
        format!("sphere curvature error {k_err:e}")
    })?;
    ensure(s_err <= 1e-8, || {
        format!("structure equation residual {s_err:e}")
    })?;
    ensure(o_err <= 1e-12, || format!("obstruction mismatch {o_err:e}"))?;
    Ok(format!(
        "|k - 1| {k_err:e}; structure {s_err:e}; obstruction {o_err:e}"
    ))
}

fn derivative_pipeline() -> Outcome {
    let mut rng = rng(9);
    let mut worst_sym: f64 = 0.0;
    let mut check = |f: &ScalarField, var: Var, point: Point| -> Result<(), String> {
        let exact = f.diff(var).unwrap().eval(&point).unwrap();
        let approx = fd_check(f, var, &point, 1e-5).unwrap();
        let err = (exact - approx).abs() / (1.0 + exact.abs());
        worst_sym = worst_sym.max(err);
        ensure(err <= 1e-6, || {
            format!("d/d{var} of {f} at {point:?}: {exact} vs {approx}")
        })
    };
    for p in corpus() {
        for _ in 0..100 {
            let s = 0.9 * p.phi.b0() * rng.gen_range(-1.0..1.0);
            for order in 0..3 {
                check(p.phi.derivative_field(order), Var::S, Point::s(s))?;
            }
        }
    }
    let bundles = [
        class_a(Sampling::default()),
        irreversible(Sampling::default()),
        generic(Sampling::default()),
    ];
    for b in &bundles {
        for _ in 0..100 {
            let (x, _) = random_xt(&mut rng, b);
            let point = Point::x(x[0], x[1]);
            for f in [
                b.metric().nu_field(),
                b.form().b1_field(),
                b.form().b2_field(),
            ] {
                for var in [Var::X1, Var::X2] {
                    check(f, var, point)?;
                    check(&f.diff(var).unwrap(), Var::X1, point)?;
                    check(&f.diff(var).unwrap(), Var::X2, point)?;
                }
            }
        }
    }

    let mut worst_frame: f64 = 0.0;
    let witness = irreversible(Sampling::default());
    let mut points = vec![(witness.clone(), [0.0, 0.0], PI / 3.0)];
    for b in bundles {
        for _ in 0..20 {
            let (x, t) = random_xt(&mut rng, &b);
            points.push((b.clone(), x, t));
        }
    }
    for (b, x, t) in &points {
        for (cf, fd) in [
            (
                frames::directional_derivs(b, *x, *t, DerivMode::ClosedForm).unwrap(),
                frames::directional_derivs(b, *x, *t, DerivMode::FrameFd).unwrap(),
            ),
            (
                frames::reverse_directional_derivs(b, *x, *t, DerivMode::ClosedForm).unwrap(),
                frames::reverse_directional_derivs(b, *x, *t, DerivMode::FrameFd).unwrap(),
            ),
        ] {
            let a = cf.as_array();
            let c = fd.as_array();
            for k in 0..7 {
                worst_frame = worst_frame.max((a[k] - c[k]).abs());
            }
        }
    }
    ensure(worst_frame <= 1e-6, || {
        format!("closed form vs frame differences {worst_frame:e}")
    })?;

    let m = IsothermalMetric::parse(SPHERE_NU, Rect::square(10.0)).unwrap();
    let end = |h: f64| {
        riemann_geodesic(&m, [0.3, -0.2], [1.0, 0.5], 2.0, h)
            .unwrap()
            .end()
            .0
    };
    let (a, b, c) = (end(0.2), end(0.1), end(0.05));
    let d = |u: [f64; 2], v: [f64; 2]| (u[0] - v[0]).hypot(u[1] - v[1]);
    let ratio = d(a, b) / d(b, c);
    ensure((8.0..=32.0).contains(&ratio), || {
        format!("convergence ratio {ratio}")
    })?;
    Ok(format!(
        "symbolic vs central difference {worst_sym:e}; frame derivatives {worst_frame:e}; RK4 ratio {ratio:.2}"
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("parity of E and F", parity),
        (
            "E vanishes exactly for even-plus-linear profiles",
            e_vanishing,
        ),
        ("F is nonzero unless the profile is even", f_nonvanishing),
        ("beta_t^2 = b^2 - beta^2 on the indicatrix", beta_identity),
        (
            "direct condition agrees with the closed-form residual",
            crosscheck_oracle,
        ),
        ("canonical classifications are stable", classification),
        (
            "geodesic reversibility and Minkowski straightness",
            dynamics,
        ),
        ("curvature, structure equations and integrability", geometry),
        (
            "derivative pipeline and integrator order",
            derivative_pipeline,
        ),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = t0.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!(
                "criterion {}: PASS  {title} ({secs:.1}s)\n    {detail}",
                i + 1
            ),
            Err(detail) => {
                failed += 1;
                println!(
                    "criterion {}: FAIL  {title} ({secs:.1}s)\n    {detail}",
                    i + 1
                );
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        criteria.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

//! Closed-form reversibility criterion and the resulting classification.
//!
//! On the Riemannian unit circle at `x` the geodesics of `F` and of its reverse
//! `F(x, -y)` coincide iff
//!
//! ```text
//! β'ₜ·𝓔(β)·𝓜 + 𝓕(β, b)·e^{−ν}·curl₂₁ = 0   for all t,
//! ```
//!
//! with `𝓜 = e^{−ν}(K1 + K2 cos 2t + K3 sin 2t)`.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::frames;
use crate::metric::{
    beta_from_local, even_odd_decompose, IsothermalMetric, LinearForm, LocalData, MetricBundle,
    PhiFunction, PhiValues,
};

fn pair(phi: &PhiFunction, s: f64) -> Result<(PhiValues, PhiValues)> {
    Ok((phi.at(s)?, phi.at(-s)?))
}

/// `(value, scale)` where scale is the largest magnitude among the summed terms.
fn cal_e_terms(phi: &PhiFunction, s: f64) -> Result<(f64, f64)> {
    let (p, m) = pair(phi, s)?;
    let terms = [s * p.d1 * m.d2, s * m.d1 * p.d2, m.v * p.d2, -p.v * m.d2];
    Ok((terms.iter().sum(), max_abs(&terms)))
}

fn cal_f_terms(phi: &PhiFunction, s: f64, b: f64) -> Result<(f64, f64)> {
    check_sb(phi, s, b)?;
    let (p, m) = pair(phi, s)?;
    let w = b * b - s * s;
    let terms = [w * p.d1 * m.d2, w * m.d1 * p.d2, m.v * p.d1, p.v * m.d1];
    Ok((terms.iter().sum(), max_abs(&terms)))
}

fn check_sb(phi: &PhiFunction, s: f64, b: f64) -> Result<()> {
    if !(b >= 0.0 && b < phi.b0()) {
        return Err(Error::OutsideProfileInterval { s: b, b0: phi.b0() });
    }
    if s.abs() > b * (1.0 + 1e-12) + 1e-15 {
        return Err(Error::InvalidArgument(format!(
            "|s| = {} exceeds b = {b}",
            s.abs()
        )));
    }
    Ok(())
}

fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// 𝓔(s) = s(φ'(s)φ''(−s) + φ'(−s)φ''(s)) + φ(−s)φ''(s) − φ(s)φ''(−s).
pub fn cal_e(phi: &PhiFunction, s: f64) -> Result<f64> {
    Ok(cal_e_terms(phi, s)?.0)
}

/// 𝓕(s, b) = (b² − s²)(φ'(s)φ''(−s) + φ'(−s)φ''(s)) + φ(−s)φ'(s) + φ(s)φ'(−s).
pub fn cal_f(phi: &PhiFunction, s: f64, b: f64) -> Result<f64> {
    Ok(cal_f_terms(phi, s, b)?.0)
}

/// ∂b₂/∂x¹ − ∂b₁/∂x²
pub fn curl21(form: &LinearForm, x: [f64; 2]) -> Result<f64> {
    let j = form.jacobian(x)?;
    Ok(j[1][0] - j[0][1])
}

/// Fourier coefficients of the angular factor, without the `e^{−ν}` weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MCoefficients {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
}

impl MCoefficients {
    /// K1 + K2 cos 2t + K3 sin 2t
    pub fn eval(&self, t: f64) -> f64 {
        let (s2, c2) = (2.0 * t).sin_cos();
        self.k1 + self.k2 * c2 + self.k3 * s2
    }

    pub fn is_zero(&self, threshold: f64) -> bool {
        self.k1.abs().max(self.k2.abs()).max(self.k3.abs()) <= threshold
    }
}

fn k_from_local(l: &LocalData) -> MCoefficients {
    let [[b11, b12], [b21, b22]] = l.db;
    let [n1, n2] = l.nu_grad;
    let [b1, b2] = l.b;
    MCoefficients {
        k1: 0.5 * (b11 + b22),
        k2: 0.5 * (b11 - b22) - (n1 * b1 - n2 * b2),
        k3: 0.5 * (b21 + b12) - (n2 * b1 + n1 * b2),
    }
}

pub fn m_coeffs(
    form: &LinearForm,
    metric: &IsothermalMetric,
    x: [f64; 2],
) -> Result<MCoefficients> {
    let nu = metric.nu(x)?;
    let l = LocalData {
        x,
        nu,
        inv_scale: (-nu).exp(),
        nu_grad: metric.grad(x)?,
        b: form.value(x)?,
        db: form.jacobian(x)?,
    };
    Ok(k_from_local(&l))
}

/// 𝓜 evaluated term by term from b-derivatives, β and β'ₜ.
pub fn m_direct(l: &LocalData, t: f64) -> f64 {
    let (sin, cos) = t.sin_cos();
    let [[b11, b12], [b21, b22]] = l.db;
    let [n1, n2] = l.nu_grad;
    let bv = beta_from_local(l, t);
    l.inv_scale * (b11 * cos * cos + sin * cos * (b12 + b21) + b22 * sin * sin)
        + bv.beta_t * (n2 * cos - n1 * sin)
        - bv.beta * (n1 * cos + n2 * sin)
}

/// 𝓜 = e^{−ν}(K1 + K2 cos 2t + K3 sin 2t)
pub fn m_value(l: &LocalData, t: f64) -> f64 {
    l.inv_scale * k_from_local(l).eval(t)
}

fn m_scale(l: &LocalData) -> f64 {
    let [[b11, b12], [b21, b22]] = l.db;
    let [n1, n2] = l.nu_grad;
    let b = l.b[0].abs() + l.b[1].abs();
    l.inv_scale * (b11.abs() + b12.abs() + b21.abs() + b22.abs() + (n1.abs() + n2.abs()) * b)
}

/// Signed residual with its term scale.
pub(crate) fn residual_local(phi: &PhiFunction, l: &LocalData, t: f64) -> Result<(f64, f64)> {
    let bv = beta_from_local(l, t);
    phi.check_interval(bv.beta)?;
    let b = bv.bsq.sqrt();
    let (e, e_scale) = cal_e_terms(phi, bv.beta)?;
    let (f, f_scale) = cal_f_terms(phi, bv.beta, b.max(bv.beta.abs()))?;
    let curl = l.curl21();
    let first = bv.beta_t * e * m_value(l, t);
    let second = f * l.inv_scale * curl;
    let curl_scale = l.db[1][0].abs() + l.db[0][1].abs();
    let scale = bv.beta_t.abs() * e_scale * m_scale(l) + f_scale * l.inv_scale * curl_scale;
    Ok((first + second, scale))
}

/// β'ₜ·𝓔(β)·𝓜 + 𝓕(β, b)·e^{−ν}·curl₂₁ at `(x, t)`.
pub fn residual(bundle: &MetricBundle, x: [f64; 2], t: f64) -> Result<f64> {
    Ok(residual_local(bundle.phi(), &bundle.local(x)?, t)?.0)
}

/// Left-hand sides of the four-equation system obtained from `𝓜 ≡ 0`, `curl₂₁ = 0`:
/// `[curl, divergence, K2, K3]`.
pub fn pde_residuals(
    form: &LinearForm,
    metric: &IsothermalMetric,
    x: [f64; 2],
) -> Result<[f64; 4]> {
    let j = form.jacobian(x)?;
    let k = m_coeffs(form, metric, x)?;
    Ok([j[1][0] - j[0][1], j[0][0] + j[1][1], k.k2, k.k3])
}

/// k = −e^{−2ν}Δν
pub fn gauss_curvature(metric: &IsothermalMetric, x: [f64; 2]) -> Result<f64> {
    let nu = metric.nu(x)?;
    Ok(-(-2.0 * nu).exp() * integrability_obstruction(metric, x)?)
}

/// Δν; nontrivial solutions of the `𝓜 ≡ 0` system need this to vanish.
pub fn integrability_obstruction(metric: &IsothermalMetric, x: [f64; 2]) -> Result<f64> {
    let h = metric.hessian(x)?;
    Ok(h[0][0] + h[1][1])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    ClassA,
    ClassB,
    AbsolutelyHomogeneous,
    TriviallyProjectivelyFlat,
    Irreversible,
    Undetermined,
}

impl Verdict {
    /// True for the verdicts that imply reversible geodesics.
    pub fn is_reversible(self) -> bool {
        matches!(
            self,
            Verdict::ClassA | Verdict::ClassB | Verdict::AbsolutelyHomogeneous
        )
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// A grid maximum compared against a scale-aware threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroTest {
    pub name: &'static str,
    pub max_abs: f64,
    pub threshold: f64,
    /// `max_abs <= threshold`
    pub pass: bool,
}

impl ZeroTest {
    fn new(name: &'static str, max_abs: f64, scale: f64, eps_zero: f64) -> Self {
        let threshold = eps_zero * (1.0 + scale);
        Self {
            name,
            max_abs,
            threshold,
            pass: max_abs <= threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub verdict: Verdict,
    pub evidence: Vec<ZeroTest>,
    /// Result of the odd-part linearity test on φ.
    pub class_a_shape: bool,
    pub k2: Option<f64>,
    pub notes: Vec<String>,
}

impl Classification {
    pub fn test(&self, name: &str) -> Option<&ZeroTest> {
        self.evidence.iter().find(|z| z.name == name)
    }

    fn zero(&self, name: &str) -> bool {
        self.test(name).is_some_and(|z| z.pass)
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verdict: {}", self.verdict)?;
        for z in &self.evidence {
            writeln!(
                f,
                "  {:<10} max = {:<24e} threshold = {:<24e} zero = {}",
                z.name, z.max_abs, z.threshold, z.pass
            )?;
        }
        writeln!(f, "  class_a_shape = {}", self.class_a_shape)?;
        if let Some(k2) = self.k2 {
            writeln!(f, "  k2 = {k2}")?;
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}

/// Largest `|value|` and largest scale over a set of samples.
#[derive(Debug, Clone, Copy, Default)]
struct Extent {
    max: f64,
    scale: f64,
}

impl Extent {
    fn push(&mut self, value: f64, scale: f64) {
        self.max = if value.is_nan() {
            f64::NAN
        } else {
            self.max.max(value.abs())
        };
        self.scale = self.scale.max(scale.abs());
    }

    fn merge(mut self, other: Extent) -> Extent {
        self.push(other.max, other.scale);
        self
    }
}

/// `(max − min, max |v|)`
fn variation(values: &[f64]) -> (f64, f64) {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (hi - lo, lo.abs().max(hi.abs()))
}

/// `n` equally spaced points on `[-b, b]`.
pub(crate) fn s_grid(b: f64, n: usize) -> Vec<f64> {
    if n <= 1 || b == 0.0 {
        return vec![0.0];
    }
    (0..n)
        .map(|i| -b + 2.0 * b * i as f64 / (n - 1) as f64)
        .collect()
}

/// Per-point quantities gathered for classification, in grid order.
struct PointScan {
    nu: f64,
    b: [f64; 2],
    curl: Extent,
    m: Extent,
    m2: Extent,
    res: Extent,
}

fn scan_point(bundle: &MetricBundle, x: [f64; 2], angles: &[f64]) -> Result<PointScan> {
    let l = bundle.local(x)?;
    let mut curl = Extent::default();
    curl.push(l.curl21(), l.db[1][0].abs() + l.db[0][1].abs());
    let (mut m, mut m2, mut res) = (Extent::default(), Extent::default(), Extent::default());
    let ms = m_scale(&l);
    for &t in angles {
        m.push(m_value(&l, t), ms);
        let (v, scale) = frames::projective_term(bundle, &l, t)?;
        m2.push(v, scale);
        let (v, scale) = residual_local(bundle.phi(), &l, t)?;
        res.push(v, scale);
    }
    Ok(PointScan {
        nu: l.nu,
        b: l.b,
        curl,
        m,
        m2,
        res,
    })
}

/// Evaluates every zero-test on the bundle's sampling grid and applies the decision table.
pub fn classify(bundle: &MetricBundle) -> Result<Classification> {
    let sampling = *bundle.sampling();
    let eps = sampling.eps_zero;
    let phi = bundle.phi();
    let (b_max, _) = bundle.b_max();

    let s_values = s_grid(b_max, sampling.n_s);
    let s_rows: Vec<(f64, f64, f64, f64)> = s_values
        .par_iter()
        .map(|&s| {
            let (e, e_scale) = cal_e_terms(phi, s)?;
            let (p, m) = (phi.value(s)?, phi.value(-s)?);
            Ok((e, e_scale, p - m, p.abs().max(m.abs())))
        })
        .collect::<Result<_>>()?;
    let mut z_e = Extent::default();
    let mut z_even = Extent::default();
    for &(e, es, d, ds) in &s_rows {
        z_e.push(e, es);
        z_even.push(d, ds);
    }

    let points = bundle.domain().grid(sampling.n_x1, sampling.n_x2);
    let angles = sampling.angles();
    let scans: Vec<PointScan> = points
        .par_iter()
        .map(|&x| scan_point(bundle, x, &angles))
        .collect::<Result<_>>()?;

    let mut curl = Extent::default();
    let mut m = Extent::default();
    let mut m2 = Extent::default();
    let mut res = Extent::default();
    for p in &scans {
        curl = curl.merge(p.curl);
        m = m.merge(p.m);
        m2 = m2.merge(p.m2);
        res = res.merge(p.res);
    }
    let b1: Vec<f64> = scans.iter().map(|p| p.b[0]).collect();
    let b2: Vec<f64> = scans.iter().map(|p| p.b[1]).collect();
    let nus: Vec<f64> = scans.iter().map(|p| p.nu).collect();
    let (v1, s1) = variation(&b1);
    let (v2, s2) = variation(&b2);
    let (vn, sn) = variation(&nus);

    let evidence = vec![
        ZeroTest::new("Z_even", z_even.max, z_even.scale, eps),
        ZeroTest::new("Z_E", z_e.max, z_e.scale, eps),
        ZeroTest::new("Z_curl", curl.max, curl.scale, eps),
        ZeroTest::new("Z_M", m.max, m.scale, eps),
        ZeroTest::new("Z_bconst", v1.max(v2), s1.max(s2), eps),
        ZeroTest::new("Z_nuconst", vn, sn, eps),
        ZeroTest::new("Z_M2", m2.max, m2.scale, eps),
        ZeroTest::new("Z_residual", res.max, res.scale, eps),
    ];

    let decomposition = even_odd_decompose(phi, eps, sampling.n_s)?;
    let mut c = Classification {
        verdict: Verdict::Undetermined,
        evidence,
        class_a_shape: decomposition.is_class_a_shape,
        k2: decomposition.k2,
        notes: Vec::new(),
    };
    c.verdict = decide(&mut c);
    Ok(c)
}

fn decide(c: &mut Classification) -> Verdict {
    if c.zero("Z_even") {
        return Verdict::AbsolutelyHomogeneous;
    }
    if c.zero("Z_E") && c.zero("Z_curl") {
        if c.class_a_shape {
            return Verdict::ClassA;
        }
        c.notes.push(
            "E vanishes on the sampled s-range but the odd part of phi is not linear on (-b0, b0)"
                .into(),
        );
        return Verdict::Undetermined;
    }
    if c.zero("Z_M") && c.zero("Z_curl") && c.zero("Z_bconst") && c.zero("Z_nuconst") {
        return Verdict::ClassB;
    }
    if c.zero("Z_M2") {
        return Verdict::TriviallyProjectivelyFlat;
    }
    if !c.zero("Z_residual") {
        return Verdict::Irreversible;
    }
    c.notes
        .push("residual vanishes on the grid but no class matched".into());
    Verdict::Undetermined
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::metric::{Rect, Sampling};

    fn bundle(nu: &str, b1: &str, b2: &str, phi: PhiFunction, half: f64) -> MetricBundle {
        MetricBundle::new(
            IsothermalMetric::parse(nu, Rect::square(half)).unwrap(),
            LinearForm::parse(b1, b2).unwrap(),
            phi,
            Sampling::default(),
        )
        .unwrap()
    }

    fn form(b1: &str, b2: &str) -> LinearForm {
        LinearForm::parse(b1, b2).unwrap()
    }

    fn metric(nu: &str) -> IsothermalMetric {
        IsothermalMetric::parse(nu, Rect::square(1.0)).unwrap()
    }

    #[test]
    fn cal_e_examples() {
        let r = PhiFunction::randers(0.9).unwrap();
        assert_eq!(cal_e(&r, 0.3).unwrap(), 0.0);
        let even = PhiFunction::from_expr("1 + s^2", 0.5).unwrap();
        for s in [-0.4, 0.1, 0.3] {
            assert!(cal_e(&even, s).unwrap().abs() < 1e-15);
        }
        let m = PhiFunction::matsumoto(0.4).unwrap();
        assert!((cal_e(&m, 0.1).unwrap() - 400000.0 / 323433.0).abs() < 1e-13);
        assert!(cal_e(&m, 0.5).is_err());
    }

    #[test]
    fn cal_f_examples() {
        let r = PhiFunction::randers(0.9).unwrap();
        assert_eq!(cal_f(&r, 0.2, 0.5).unwrap(), 2.0);
        let even = PhiFunction::from_expr("1 + s^2", 0.5).unwrap();
        assert!(cal_f(&even, 0.1, 0.3).unwrap().abs() < 1e-15);
        let m = PhiFunction::matsumoto(0.4).unwrap();
        assert!((cal_f(&m, 0.1, 0.3).unwrap() - 2.3704033498952386).abs() < 1e-13);
        assert!(cal_f(&m, 0.35, 0.3).is_err());
        assert!(cal_f(&m, 0.1, 0.4).is_err());
    }

    #[test]
    fn curl_examples() {
        assert_eq!(curl21(&form("x2", "x1"), [0.3, 0.1]).unwrap(), 0.0);
        assert_eq!(curl21(&form("-x2", "x1"), [0.3, 0.1]).unwrap(), 2.0);
        assert_eq!(curl21(&form("0.2", "0.1"), [0.3, 0.1]).unwrap(), 0.0);
    }

    #[test]
    fn m_coeff_examples() {
        let k = m_coeffs(&form("x1", "-x2"), &metric("0"), [0.2, 0.3]).unwrap();
        assert_eq!(
            k,
            MCoefficients {
                k1: 0.0,
                k2: 1.0,
                k3: 0.0
            }
        );
        let k = m_coeffs(&form("0.3", "0.1"), &metric("0"), [0.2, 0.3]).unwrap();
        assert!(k.is_zero(0.0));
        let k = m_coeffs(&form("1", "0"), &metric("x1"), [0.2, 0.3]).unwrap();
        assert_eq!(
            k,
            MCoefficients {
                k1: 0.0,
                k2: -1.0,
                k3: 0.0
            }
        );
    }

    #[test]
    fn m_fourier_form_matches_direct_form() {
        let b = bundle(
            "0.3*x1 - 0.2*x2^2",
            "0.1 + 0.05*sin(x2)",
            "0.08*x1*x2",
            PhiFunction::matsumoto(0.4).unwrap(),
            1.0,
        );
        for x in [[0.0, 0.0], [0.5, -0.7], [-0.9, 0.3]] {
            let l = b.local(x).unwrap();
            for k in 0..16 {
                let t = 2.0 * PI * k as f64 / 16.0;
                let d = m_direct(&l, t);
                let f = m_value(&l, t);
                assert!((d - f).abs() <= 1e-12 * (1.0 + d.abs()), "{d} vs {f}");
            }
        }
    }

    #[test]
    fn residual_examples() {
        let b = bundle("0", "0.2", "0.1", PhiFunction::matsumoto(0.4).unwrap(), 1.0);
        assert_eq!(residual(&b, [0.3, 0.4], 1.0).unwrap(), 0.0);

        let b = bundle(
            "0.2*x1*x2",
            "0.1*x2",
            "0.1*x1",
            PhiFunction::randers(0.9).unwrap(),
            1.0,
        );
        for t in [0.0, 0.7, 2.5] {
            assert!(residual(&b, [0.4, -0.6], t).unwrap().abs() < 1e-15);
        }

        let b = bundle("0", "-x2", "x1", PhiFunction::randers(0.9).unwrap(), 0.5);
        for t in [0.0, 1.3, 4.0] {
            assert!((residual(&b, [0.3, 0.2], t).unwrap() - 4.0).abs() < 1e-14);
        }
    }

    #[test]
    fn residual_is_symmetric_under_half_turn() {
        let b = bundle(
            "0.1*x1",
            "0.2 + 0.1*x1",
            "0.05*x2",
            PhiFunction::matsumoto(0.4).unwrap(),
            1.0,
        );
        for t in [0.1, 0.9, 2.2] {
            let a = residual(&b, [0.2, -0.3], t).unwrap();
            let c = residual(&b, [0.2, -0.3], t + PI).unwrap();
            assert!((a - c).abs() < 1e-14 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn pde_examples() {
        assert_eq!(
            pde_residuals(&form("0.2", "0.1"), &metric("0.5"), [0.1, 0.2]).unwrap(),
            [0.0; 4]
        );
        assert_eq!(
            pde_residuals(&form("x1", "-x2"), &metric("0"), [0.1, 0.2]).unwrap(),
            [0.0, 0.0, 1.0, 0.0]
        );
        assert_eq!(
            pde_residuals(&form("exp(x1)", "0"), &metric("x1"), [0.0, 0.0]).unwrap(),
            [0.0, 1.0, -0.5, 0.0]
        );
    }

    #[test]
    fn curvature_examples() {
        assert_eq!(gauss_curvature(&metric("0.3"), [0.1, 0.2]).unwrap(), 0.0);
        assert_eq!(gauss_curvature(&metric("x1"), [0.1, 0.2]).unwrap(), 0.0);
        let sphere = metric("-ln(1 + (x1^2 + x2^2)/4)");
        for x in [[0.0, 0.0], [0.7, -0.3], [-1.0, 1.0]] {
            assert!((gauss_curvature(&sphere, x).unwrap() - 1.0).abs() < 1e-12);
        }
        assert_eq!(
            integrability_obstruction(&metric("x1^2"), [0.4, 0.1]).unwrap(),
            2.0
        );
        assert_eq!(
            integrability_obstruction(&metric("x1^2 - x2^2"), [0.4, 0.1]).unwrap(),
            0.0
        );
    }

    #[test]
    fn canonical_classifications() {
        let a = bundle(
            "-ln(1 + (x1^2 + x2^2)/4)",
            "0.1*x2",
            "0.1*x1",
            PhiFunction::randers(0.9).unwrap(),
            1.5,
        );
        assert_eq!(classify(&a).unwrap().verdict, Verdict::ClassA);
        let b = bundle("0", "0.2", "0.1", PhiFunction::matsumoto(0.4).unwrap(), 1.5);
        assert_eq!(classify(&b).unwrap().verdict, Verdict::ClassB);
        let i = bundle(
            "0",
            "0.2 + 0.1*x1",
            "0",
            PhiFunction::matsumoto(0.4).unwrap(),
            1.5,
        );
        let c = classify(&i).unwrap();
        assert_eq!(c.verdict, Verdict::Irreversible, "{c}");
        let even = bundle(
            "0.1*x1",
            "0.1*x2",
            "0.2",
            PhiFunction::from_expr("1 + s^2", 0.5).unwrap(),
            1.0,
        );
        assert_eq!(
            classify(&even).unwrap().verdict,
            Verdict::AbsolutelyHomogeneous
        );
    }
}

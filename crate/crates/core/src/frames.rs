//! Moving-frame computations on the Riemannian unit tangent bundle.
//!
//! Points of the bundle are `(x¹, x², t)` with `t` the fiber angle. The coframe
//!
//! ```text
//! α¹ = −e^ν sin t dx¹ + e^ν cos t dx²
//! α² =  e^ν cos t dx¹ + e^ν sin t dx²
//! α³ = −ν₂ dx¹ + ν₁ dx² + dt
//! ```
//!
//! has dual frame `(e₁, e₂, e₃)`, and `p_a = e_a(p)`, `p_ab = e_b(e_a(p))` for the
//! indicatrix function `p(x, t) = φ(β(x, t))`. The reverse metric has `r(x, t) = p(x, t + π)`.

use nalgebra::Matrix3;

use crate::error::{Error, Result};
use crate::metric::{beta_from_local, IsothermalMetric, LocalData, MetricBundle, PhiFunction};
use crate::reversibility;
use crate::scalarfield::{Expr, ScalarField, Var};

use std::f64::consts::PI;

/// Three 1-forms written in the basis `(dx¹, dx², dt)`, one per row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoframeAtPoint {
    pub rows: [[f64; 3]; 3],
}

impl CoframeAtPoint {
    pub fn matrix(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.rows[i][j])
    }

    pub fn det(&self) -> f64 {
        self.matrix().determinant()
    }

    /// Dual frame vectors as rows: `frame[b]` has components `(∂₁, ∂₂, ∂ₜ)`.
    pub fn dual_frame(&self) -> Option<[[f64; 3]; 3]> {
        let inv = self.matrix().try_inverse()?;
        Some(std::array::from_fn(|b| {
            std::array::from_fn(|k| inv[(k, b)])
        }))
    }
}

fn axpy(a: f64, x: [f64; 3], y: [f64; 3]) -> [f64; 3] {
    [a * x[0] + y[0], a * x[1] + y[1], a * x[2] + y[2]]
}

fn scale(a: f64, x: [f64; 3]) -> [f64; 3] {
    [a * x[0], a * x[1], a * x[2]]
}

fn alpha_from_local(l: &LocalData, t: f64) -> CoframeAtPoint {
    let (sin, cos) = t.sin_cos();
    let e = l.nu.exp();
    let [n1, n2] = l.nu_grad;
    CoframeAtPoint {
        rows: [
            [-e * sin, e * cos, 0.0],
            [e * cos, e * sin, 0.0],
            [-n2, n1, 1.0],
        ],
    }
}

pub fn alpha_coframe(metric: &IsothermalMetric, x: [f64; 2], t: f64) -> Result<CoframeAtPoint> {
    let nu = metric.nu(x)?;
    let (sin, cos) = t.sin_cos();
    let e = nu.exp();
    let [n1, n2] = metric.grad(x)?;
    Ok(CoframeAtPoint {
        rows: [
            [-e * sin, e * cos, 0.0],
            [e * cos, e * sin, 0.0],
            [-n2, n1, 1.0],
        ],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivMode {
    /// Chain rule through the symbolic derivatives of φ.
    ClosedForm,
    /// Central differences along the numerically inverted dual frame.
    FrameFd,
}

/// Frame derivatives of an indicatrix function at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DirectionalDerivs {
    pub p: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub p31: f64,
    pub p32: f64,
    pub p33: f64,
    pub p332: f64,
    pub p333: f64,
}

impl DirectionalDerivs {
    /// p + p₃₃, positive exactly when the indicatrix is strongly convex.
    pub fn convexity(&self) -> f64 {
        self.p + self.p33
    }

    pub fn projective(&self) -> f64 {
        self.p32 - self.p1
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let a = self.as_array();
        let b = other.as_array();
        a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
    }

    pub fn as_array(&self) -> [f64; 9] {
        [
            self.p, self.p1, self.p2, self.p3, self.p31, self.p32, self.p33, self.p332, self.p333,
        ]
    }
}

/// Coordinate partials of `p(x¹, x², t)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CoordPartials {
    pub v: f64,
    pub x1: f64,
    pub x2: f64,
    pub t: f64,
    pub tt: f64,
    pub ttt: f64,
    pub x1t: f64,
    pub x2t: f64,
    pub x1tt: f64,
    pub x2tt: f64,
}

/// β-derivatives in x: `a, b` are ∂β/∂xⁱ and `c, d` are ∂β'ₜ/∂xⁱ.
#[derive(Debug, Clone, Copy, PartialEq)]
struct BetaGradients {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

fn beta_gradients(l: &LocalData, t: f64) -> BetaGradients {
    let (sin, cos) = t.sin_cos();
    let [[b11, b12], [b21, b22]] = l.db;
    let [n1, n2] = l.nu_grad;
    let bv = beta_from_local(l, t);
    let w = l.inv_scale;
    BetaGradients {
        a: w * (b11 * cos + b21 * sin) - n1 * bv.beta,
        b: w * (b12 * cos + b22 * sin) - n2 * bv.beta,
        c: w * (-b11 * sin + b21 * cos) - n1 * bv.beta_t,
        d: w * (-b12 * sin + b22 * cos) - n2 * bv.beta_t,
    }
}

pub(crate) fn coord_partials(phi: &PhiFunction, l: &LocalData, t: f64) -> Result<CoordPartials> {
    let bv = beta_from_local(l, t);
    let f = phi.at(bv.beta)?;
    let g = beta_gradients(l, t);
    let (s, s1) = (bv.beta, bv.beta_t);
    let x_t = |a: f64, c: f64| f.d2 * s1 * a + f.d1 * c;
    let x_tt = |a: f64, c: f64| f.d3 * s1 * s1 * a - f.d2 * s * a + 2.0 * f.d2 * s1 * c - f.d1 * a;
    Ok(CoordPartials {
        v: f.v,
        x1: f.d1 * g.a,
        x2: f.d1 * g.b,
        t: f.d1 * s1,
        tt: f.d2 * s1 * s1 - f.d1 * s,
        ttt: f.d3 * s1 * s1 * s1 - 3.0 * f.d2 * s * s1 - f.d1 * s1,
        x1t: x_t(g.a, g.c),
        x2t: x_t(g.b, g.d),
        x1tt: x_tt(g.a, g.c),
        x2tt: x_tt(g.b, g.d),
    })
}

/// ν₊ = ν₁cos t + ν₂sin t, ν₋ = ν₂cos t − ν₁sin t
fn nu_pm(l: &LocalData, t: f64) -> (f64, f64) {
    let (sin, cos) = t.sin_cos();
    let [n1, n2] = l.nu_grad;
    (n1 * cos + n2 * sin, n2 * cos - n1 * sin)
}

fn to_directional(c: &CoordPartials, l: &LocalData, t: f64) -> DirectionalDerivs {
    let (sin, cos) = t.sin_cos();
    let (np, nm) = nu_pm(l, t);
    let w = l.inv_scale;
    DirectionalDerivs {
        p: c.v,
        p1: w * (-c.x1 * sin + c.x2 * cos - c.t * np),
        p2: w * (c.x1 * cos + c.x2 * sin + c.t * nm),
        p3: c.t,
        p31: w * (-c.x1t * sin + c.x2t * cos - c.tt * np),
        p32: w * (c.x1t * cos + c.x2t * sin + c.tt * nm),
        p33: c.tt,
        p332: w * (c.x1tt * cos + c.x2tt * sin + c.ttt * nm),
        p333: c.ttt,
    }
}

/// `(p₃₂ − p₁, scale)` with the closed-form derivatives.
pub(crate) fn projective_term(bundle: &MetricBundle, l: &LocalData, t: f64) -> Result<(f64, f64)> {
    let c = coord_partials(bundle.phi(), l, t)?;
    let (sin, cos) = t.sin_cos();
    let (np, nm) = nu_pm(l, t);
    let terms = [
        c.x1t * cos,
        c.x2t * sin,
        c.tt * nm,
        c.x1 * sin,
        -c.x2 * cos,
        c.t * np,
    ];
    let value = l.inv_scale * terms.iter().sum::<f64>();
    let scale = l.inv_scale * terms.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
    Ok((value, scale))
}

/// Step sizes for the frame finite differences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdSteps {
    pub first: f64,
    pub second: f64,
    pub third: f64,
}

impl FdSteps {
    /// Base steps 1e−5, 1e−4, 1e−3 scaled by half the domain extent (clamped to [0.1, 10]).
    pub fn for_extent(extent: f64) -> Self {
        let f = (0.5 * extent).clamp(0.1, 10.0);
        Self {
            first: 1e-5 * f,
            second: 1e-4 * f,
            third: 1e-3 * f,
        }
    }
}

/// Differentiates `g(x¹, x², t) = φ(σ·β)` along the dual frame at `(x, t)`.
fn frame_fd(
    bundle: &MetricBundle,
    x: [f64; 2],
    t: f64,
    sigma: f64,
    steps: FdSteps,
) -> Result<DirectionalDerivs> {
    let coframe = alpha_coframe(bundle.metric(), x, t)?;
    let frame = coframe
        .dual_frame()
        .ok_or_else(|| Error::InvalidArgument("singular coframe".into()))?;
    let g = |y: [f64; 3]| -> Result<f64> {
        let l = bundle.local([y[0], y[1]])?;
        let beta = beta_from_local(&l, y[2]).beta;
        bundle.phi().value(sigma * beta)
    };
    let y0 = [x[0], x[1], t];
    let e3 = [0.0, 0.0, 1.0];

    let d1 =
        |f: &dyn Fn([f64; 3]) -> Result<f64>, y: [f64; 3], v: [f64; 3], h: f64| -> Result<f64> {
            Ok((f(axpy(h, v, y))? - f(axpy(-h, v, y))?) / (2.0 * h))
        };
    let d2t = |y: [f64; 3], h: f64| -> Result<f64> {
        Ok((g(axpy(h, e3, y))? - 2.0 * g(y)? + g(axpy(-h, e3, y))?) / (h * h))
    };

    let (h1, h2, h3) = (steps.first, steps.second, steps.third);
    let p3_fn = |y: [f64; 3]| d1(&g, y, e3, h2);
    let p33_fn = |y: [f64; 3]| d2t(y, h3);
    let h = h3;
    let p333 = (g(axpy(2.0 * h, e3, y0))? - 2.0 * g(axpy(h, e3, y0))? + 2.0 * g(axpy(-h, e3, y0))?
        - g(axpy(-2.0 * h, e3, y0))?)
        / (2.0 * h * h * h);
    Ok(DirectionalDerivs {
        p: g(y0)?,
        p1: d1(&g, y0, frame[0], h1)?,
        p2: d1(&g, y0, frame[1], h1)?,
        p3: d1(&g, y0, e3, h1)?,
        p31: d1(&p3_fn, y0, frame[0], h2)?,
        p32: d1(&p3_fn, y0, frame[1], h2)?,
        p33: d2t(y0, h2)?,
        p332: d1(&p33_fn, y0, frame[1], h3)?,
        p333,
    })
}

/// Frame derivatives of `p = φ(β)`.
pub fn directional_derivs(
    bundle: &MetricBundle,
    x: [f64; 2],
    t: f64,
    mode: DerivMode,
) -> Result<DirectionalDerivs> {
    match mode {
        DerivMode::ClosedForm => {
            let l = bundle.local(x)?;
            Ok(to_directional(&coord_partials(bundle.phi(), &l, t)?, &l, t))
        }
        DerivMode::FrameFd => frame_fd(
            bundle,
            x,
            t,
            1.0,
            FdSteps::for_extent(bundle.domain().extent()),
        ),
    }
}

/// Frame derivatives of `r = φ(−β)`.
///
/// In closed form these are the coordinate partials of `p` at `t + π`, pushed through the frame at `t`.
/// The finite-difference mode differentiates `φ(−β)` directly.
pub fn reverse_directional_derivs(
    bundle: &MetricBundle,
    x: [f64; 2],
    t: f64,
    mode: DerivMode,
) -> Result<DirectionalDerivs> {
    match mode {
        DerivMode::ClosedForm => {
            let l = bundle.local(x)?;
            Ok(to_directional(
                &coord_partials(bundle.phi(), &l, t + PI)?,
                &l,
                t,
            ))
        }
        DerivMode::FrameFd => frame_fd(
            bundle,
            x,
            t,
            -1.0,
            FdSteps::for_extent(bundle.domain().extent()),
        ),
    }
}

/// The ½-weighted third-order term of the third ω-form.
pub fn p_term(d: &DirectionalDerivs) -> f64 {
    let DirectionalDerivs {
        p,
        p1,
        p2,
        p3,
        p32,
        p33,
        p332,
        p333,
        ..
    } = *d;
    0.5 * (p3 * p32 * p33 - p3 * p33 * p1 + p * p333 * p32 - p * p1 * p333 + 2.0 * p * p32 * p3
        - 2.0 * p * p1 * p3
        - 3.0 * p * p2 * p33
        - p * p * p332
        - 2.0 * p * p * p2
        - p2 * p33 * p33
        - p * p332 * p33)
}

/// The Finsler coframe `(ω¹, ω², ω³)` expressed in `(dx¹, dx², dt)`.
pub fn omega_coframe(bundle: &MetricBundle, x: [f64; 2], t: f64) -> Result<CoframeAtPoint> {
    let l = bundle.local(x)?;
    let d = to_directional(&coord_partials(bundle.phi(), &l, t)?, &l, t);
    let conv = d.convexity();
    if !(conv > 0.0 && d.p > 0.0) {
        return Err(Error::Convexity { value: conv, x, t });
    }
    let [a1, a2, a3] = alpha_from_local(&l, t).rows;
    let root = (d.p * conv).sqrt();
    let w1 = scale(root, a1);
    let w2 = axpy(d.p3, a1, scale(d.p, a2));
    let w3 = axpy(
        p_term(&d) / (root * root * root),
        a1,
        scale(1.0 / root, axpy(d.projective(), a2, scale(conv, a3))),
    );
    Ok(CoframeAtPoint { rows: [w1, w2, w3] })
}

/// `(p₃₂ − p₁)(r + r₃₃) − (r₃₂ − r₁)(p + p₃₃)` with closed-form frame derivatives.
pub fn ecprinc_direct(bundle: &MetricBundle, x: [f64; 2], t: f64) -> Result<f64> {
    ecprinc_with(bundle, x, t, DerivMode::ClosedForm)
}

pub fn ecprinc_with(bundle: &MetricBundle, x: [f64; 2], t: f64, mode: DerivMode) -> Result<f64> {
    let p = directional_derivs(bundle, x, t, mode)?;
    let r = reverse_directional_derivs(bundle, x, t, mode)?;
    Ok(p.projective() * r.convexity() - r.projective() * p.convexity())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crosscheck {
    pub direct: f64,
    pub closed_form: f64,
    /// `direct / closed_form`, observed to equal `e^{−ν}`.
    pub ratio: Option<f64>,
    /// Relative gap between `|direct|` and `e^{−ν}|closed_form|`; 0 when both are below `eps_zero`.
    pub gap: f64,
}

pub fn crosscheck(bundle: &MetricBundle, x: [f64; 2], t: f64) -> Result<Crosscheck> {
    let direct = ecprinc_direct(bundle, x, t)?;
    let closed_form = reversibility::residual(bundle, x, t)?;
    let weight = (-bundle.metric().nu(x)?).exp();
    let a = direct.abs();
    let c = weight * closed_form.abs();
    let eps = bundle.sampling().eps_zero;
    let gap = if a <= eps && c <= eps {
        0.0
    } else {
        (a - c).abs() / a.max(c)
    };
    let ratio = (closed_form != 0.0).then(|| direct / closed_form);
    Ok(Crosscheck {
        direct,
        closed_form,
        ratio,
        gap,
    })
}

/// Intermediate quantities linking the direct condition to the closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameIntermediates {
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub t4: f64,
    pub g: f64,
    pub h: f64,
    pub nu_plus: f64,
    pub nu_minus: f64,
    pub beta: f64,
    pub beta_t: f64,
    pub cal_e: f64,
    pub cal_f: f64,
}

impl FrameIntermediates {
    /// T₃ + 𝓕β, expected to equal (β'ₜ)²𝓔.
    pub fn coeff_minus(&self) -> f64 {
        self.t3 + self.cal_f * self.beta
    }

    /// −β'ₜβ𝓔 − β'ₜ𝓕 + T₄, expected to equal −β'ₜβ𝓔.
    pub fn coeff_plus(&self) -> f64 {
        -self.beta_t * self.beta * self.cal_e - self.beta_t * self.cal_f + self.t4
    }

    /// β'ₜ𝓖𝓔 + ℋ𝓕 + ν₋T₃ + ν₊T₄
    pub fn local_sum(&self) -> f64 {
        self.beta_t * self.g * self.cal_e
            + self.h * self.cal_f
            + self.nu_minus * self.t3
            + self.nu_plus * self.t4
    }
}

pub fn frame_intermediates(
    bundle: &MetricBundle,
    x: [f64; 2],
    t: f64,
) -> Result<FrameIntermediates> {
    let l = bundle.local(x)?;
    let phi = bundle.phi();
    let p = coord_partials(phi, &l, t)?;
    let r = coord_partials(phi, &l, t + PI)?;
    let (sin, cos) = t.sin_cos();
    let (np, nm) = nu_pm(&l, t);
    let bv = beta_from_local(&l, t);
    let bracket = |c: &CoordPartials| cos * (c.x1t - c.x2) + sin * (c.x2t + c.x1);
    let [[b11, b12], [b21, b22]] = l.db;
    let w = l.inv_scale;
    Ok(FrameIntermediates {
        t1: bracket(&p),
        t2: bracket(&r),
        t3: p.tt * r.v - r.tt * p.v,
        t4: p.t * (r.tt + r.v) - r.t * (p.tt + p.v),
        g: w * (b11 * cos * cos + sin * cos * (b21 + b12) + b22 * sin * sin) - bv.beta * np,
        h: w * l.curl21() - bv.beta_t * np + bv.beta * nm,
        nu_plus: np,
        nu_minus: nm,
        beta: bv.beta,
        beta_t: bv.beta_t,
        cal_e: reversibility::cal_e(phi, bv.beta)?,
        cal_f: reversibility::cal_f(phi, bv.beta, bv.bsq.sqrt().max(bv.beta.abs()))?,
    })
}

/// Symbolic α-coframe over `(x¹, x², t)`; `rows[a][k]` is the `dxᵏ` coefficient of αᵃ.
pub fn symbolic_alpha(metric: &IsothermalMetric) -> Result<[[ScalarField; 3]; 3]> {
    let vars = [Var::X1, Var::X2, Var::T];
    let nu = metric.nu_field().expr().clone();
    let e = Expr::exp(nu.clone());
    let t = Expr::var(Var::T);
    let (sin, cos) = (Expr::sin(t.clone()), Expr::cos(t));
    let n1 = nu.derivative(Var::X1);
    let n2 = nu.derivative(Var::X2);
    let rows = [
        [
            Expr::neg(Expr::mul(e.clone(), sin.clone())),
            Expr::mul(e.clone(), cos.clone()),
            Expr::Const(0.0),
        ],
        [
            Expr::mul(e.clone(), cos),
            Expr::mul(e, sin),
            Expr::Const(0.0),
        ],
        [Expr::neg(n2), n1, Expr::Const(1.0)],
    ];
    let mut out: Vec<[ScalarField; 3]> = Vec::with_capacity(3);
    for row in rows {
        let [a, b, c] = row;
        out.push([
            ScalarField::new(a, &vars)?,
            ScalarField::new(b, &vars)?,
            ScalarField::new(c, &vars)?,
        ]);
    }
    Ok(out.try_into().expect("three rows"))
}

/// Components `[(1,2), (1,3), (2,3)]` of a 2-form in `(dx¹, dx², dt)`.
pub type TwoForm = [f64; 3];

const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];
const VARS3: [Var; 3] = [Var::X1, Var::X2, Var::T];

fn exterior_derivative(row: &[ScalarField; 3], y: &[f64; 4]) -> Result<TwoForm> {
    let mut out = [0.0; 3];
    for (slot, &(j, k)) in PAIRS.iter().enumerate() {
        let djk = row[k].diff(VARS3[j])?.expr().eval_with(y)?;
        let dkj = row[j].diff(VARS3[k])?.expr().eval_with(y)?;
        out[slot] = djk - dkj;
    }
    Ok(out)
}

fn wedge(a: [f64; 3], b: [f64; 3]) -> TwoForm {
    PAIRS.map(|(j, k)| a[j] * b[k] - a[k] * b[j])
}

/// Max component of `dα¹ − α²∧α³`, `dα² − α³∧α¹`, `dα³ − kα¹∧α²` at `(x, t)`.
pub fn structure_residuals(metric: &IsothermalMetric, x: [f64; 2], t: f64) -> Result<[f64; 3]> {
    let rows = symbolic_alpha(metric)?;
    let y = [x[0], x[1], 0.0, t];
    let a = alpha_coframe(metric, x, t)?.rows;
    let k = reversibility::gauss_curvature(metric, x)?;
    let expected = [
        wedge(a[1], a[2]),
        wedge(a[2], a[0]),
        wedge(a[0], a[1]).map(|v| k * v),
    ];
    let mut out = [0.0; 3];
    for i in 0..3 {
        let d = exterior_derivative(&rows[i], &y)?;
        out[i] = (0..3).fold(0.0, |m: f64, c| m.max((d[c] - expected[i][c]).abs()));
    }
    Ok(out)
}

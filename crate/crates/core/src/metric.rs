//! The (α,β)-metric `F = α·φ(β/α)` on an isothermal surface.
//!
//! The Riemannian factor is `a_ij = e^{2ν} δ_ij`, the linear form is
//! `β = b1 y¹ + b2 y²`, and the profile `φ` lives on `(-b0, b0)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::scalarfield::{Expr, ScalarField, Var};

const XY: [Var; 2] = [Var::X1, Var::X2];

/// The profile φ with its first three symbolic derivatives.
#[derive(Debug, Clone)]
pub struct PhiFunction {
    phi: ScalarField,
    d1: ScalarField,
    d2: ScalarField,
    d3: ScalarField,
    b0: f64,
    label: String,
}

/// φ and its derivatives at one value of s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiValues {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

impl PhiFunction {
    pub fn new(phi: ScalarField, b0: f64, label: impl Into<String>) -> Result<Self> {
        if !(b0 > 0.0 && b0.is_finite()) {
            return Err(Error::InvalidBound(b0));
        }
        let phi = ScalarField::new(phi.expr().clone(), &[Var::S])?;
        let d1 = phi.diff(Var::S)?;
        let d2 = d1.diff(Var::S)?;
        let d3 = d2.diff(Var::S)?;
        Ok(Self {
            phi,
            d1,
            d2,
            d3,
            b0,
            label: label.into(),
        })
    }

    pub fn from_expr(text: &str, b0: f64) -> Result<Self> {
        Self::new(ScalarField::parse(text, &[Var::S])?, b0, text)
    }

    /// Randers: φ = 1 + s.
    pub fn randers(b0: f64) -> Result<Self> {
        Self::new(ScalarField::parse("1 + s", &[Var::S])?, b0, "randers")
    }

    /// Matsumoto: φ = 1/(1 - s).
    pub fn matsumoto(b0: f64) -> Result<Self> {
        Self::new(ScalarField::parse("1/(1 - s)", &[Var::S])?, b0, "matsumoto")
    }

    /// φ = c0 + c1 s² + c2 s⁴ + ...
    pub fn even_polynomial(coeffs: &[f64], b0: f64) -> Result<Self> {
        let s = Expr::var(Var::S);
        let expr = coeffs
            .iter()
            .enumerate()
            .fold(Expr::Const(0.0), |acc, (k, &c)| {
                Expr::add(
                    acc,
                    Expr::mul(Expr::Const(c), Expr::powi(s.clone(), 2 * k as i32)),
                )
            });
        Self::new(ScalarField::new(expr, &[Var::S])?, b0, "even polynomial")
    }

    /// φ = φ0(s) + ε·s where `even` is expected to be an even expression in s.
    pub fn even_plus_linear(even: &str, epsilon: f64, b0: f64) -> Result<Self> {
        let base = ScalarField::parse(even, &[Var::S])?;
        let expr = Expr::add(
            base.expr().clone(),
            Expr::mul(Expr::Const(epsilon), Expr::var(Var::S)),
        );
        Self::new(
            ScalarField::new(expr, &[Var::S])?,
            b0,
            format!("{even} + {epsilon}*s"),
        )
    }

    pub fn b0(&self) -> f64 {
        self.b0
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn field(&self) -> &ScalarField {
        &self.phi
    }

    /// The symbolic derivative of the given order (0 to 3).
    pub fn derivative_field(&self, order: usize) -> &ScalarField {
        match order {
            0 => &self.phi,
            1 => &self.d1,
            2 => &self.d2,
            3 => &self.d3,
            _ => panic!("derivatives above order 3 are not kept"),
        }
    }

    pub fn check_interval(&self, s: f64) -> Result<()> {
        if s.abs() < self.b0 {
            Ok(())
        } else {
            Err(Error::OutsideProfileInterval { s, b0: self.b0 })
        }
    }

    /// φ, φ', φ'', φ''' at `s`, which must lie in (-b0, b0).
    pub fn at(&self, s: f64) -> Result<PhiValues> {
        self.check_interval(s)?;
        self.at_unchecked(s)
    }

    pub(crate) fn at_unchecked(&self, s: f64) -> Result<PhiValues> {
        let vals = [0.0, 0.0, s, 0.0];
        Ok(PhiValues {
            v: self.phi.eval_raw(&vals)?,
            d1: self.d1.eval_raw(&vals)?,
            d2: self.d2.eval_raw(&vals)?,
            d3: self.d3.eval_raw(&vals)?,
        })
    }

    pub fn value(&self, s: f64) -> Result<f64> {
        self.check_interval(s)?;
        Ok(self.phi.eval_raw(&[0.0, 0.0, s, 0.0])?)
    }
}

/// Which Finsler condition a validation witness violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// φ − sφ' + (b² − s²)φ'' > 0 for |s| ≤ b < b0.
    Ec1,
    /// φ − sφ' > 0 on (−b0, b0).
    Ec2,
    /// φ > 0 on (−b0, b0).
    Positivity,
    /// φ or a derivative could not be evaluated.
    Evaluation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub condition: Condition,
    pub s: f64,
    pub b: Option<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub min_margin_ec1: f64,
    pub min_margin_ec2: f64,
    pub min_phi: f64,
    pub pass: bool,
    pub witness: Witness,
    pub grid_n: usize,
    pub eval_error: Option<String>,
}

impl ValidationReport {
    pub fn summary(&self) -> String {
        let w = &self.witness;
        let b = w.b.map(|b| format!(", b = {b}")).unwrap_or_default();
        format!(
            "min_margin_ec1 = {:?}, min_margin_ec2 = {:?}, min_phi = {:?}, worst {:?} at s = {}{b}",
            round_sig(self.min_margin_ec1),
            round_sig(self.min_margin_ec2),
            round_sig(self.min_phi),
            w.condition,
            w.s
        )
    }
}

/// Rounds to 15 significant digits for display.
fn round_sig(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{v:.14e}").parse().unwrap_or(v)
}

/// Rows `(s, b, ec1_margin)` of the triangular grid `|s| ≤ b < b0`.
pub fn ec1_grid(phi: &PhiFunction, grid_n: usize) -> Vec<(f64, f64, Result<f64>)> {
    let n = grid_n.max(64);
    let b0 = phi.b0();
    let mut rows = Vec::with_capacity(n * (n + 1));
    for j in 0..n {
        let b = b0 * j as f64 / n as f64;
        for i in 0..=n {
            let s = if j == 0 {
                0.0
            } else {
                b * (2.0 * i as f64 / n as f64 - 1.0)
            };
            let margin = phi
                .at_unchecked(s)
                .map(|p| p.v - s * p.d1 + (b * b - s * s) * p.d2);
            rows.push((s, b, margin));
            if j == 0 {
                break;
            }
        }
    }
    rows
}

/// Samples the Finsler conditions for φ on its interval.
pub fn validate_finsler(phi: &PhiFunction, grid_n: usize) -> ValidationReport {
    let n = grid_n.max(64);
    let b0 = phi.b0();
    let mut min_ec1 = f64::INFINITY;
    let mut min_ec2 = f64::INFINITY;
    let mut min_phi = f64::INFINITY;
    let mut witness = Witness {
        condition: Condition::Ec1,
        s: 0.0,
        b: None,
        value: f64::INFINITY,
    };
    let mut eval_error = None;
    let consider = |condition, s, b, value: f64, witness: &mut Witness| {
        if value < witness.value {
            *witness = Witness {
                condition,
                s,
                b,
                value,
            };
        }
    };

    for (s, b, margin) in ec1_grid(phi, n) {
        match margin {
            Ok(m) => {
                min_ec1 = min_ec1.min(m);
                consider(Condition::Ec1, s, Some(b), m, &mut witness);
            }
            Err(e) => {
                min_ec1 = f64::NEG_INFINITY;
                eval_error.get_or_insert_with(|| e.to_string());
                consider(
                    Condition::Evaluation,
                    s,
                    Some(b),
                    f64::NEG_INFINITY,
                    &mut witness,
                );
            }
        }
    }
    for i in 1..n {
        let s = b0 * (2.0 * i as f64 / n as f64 - 1.0);
        match phi.at_unchecked(s) {
            Ok(p) => {
                let ec2 = p.v - s * p.d1;
                min_ec2 = min_ec2.min(ec2);
                min_phi = min_phi.min(p.v);
                consider(Condition::Ec2, s, None, ec2, &mut witness);
                consider(Condition::Positivity, s, None, p.v, &mut witness);
            }
            Err(e) => {
                min_ec2 = f64::NEG_INFINITY;
                min_phi = f64::NEG_INFINITY;
                eval_error.get_or_insert_with(|| e.to_string());
                consider(
                    Condition::Evaluation,
                    s,
                    None,
                    f64::NEG_INFINITY,
                    &mut witness,
                );
            }
        }
    }
    let pass = min_ec1 > 0.0 && min_ec2 > 0.0 && min_phi > 0.0;
    ValidationReport {
        min_margin_ec1: min_ec1,
        min_margin_ec2: min_ec2,
        min_phi,
        pass,
        witness,
        grid_n: n,
        eval_error,
    }
}

/// The profile of the reverse metric, φ̄(s) = φ(−s).
pub fn reverse_phi(phi: &PhiFunction) -> Result<PhiFunction> {
    let reflected = phi
        .field()
        .expr()
        .substitute(Var::S, &Expr::neg(Expr::var(Var::S)));
    PhiFunction::new(
        ScalarField::new(reflected, &[Var::S])?,
        phi.b0(),
        format!("reverse of {}", phi.label()),
    )
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub even: ScalarField,
    pub odd: ScalarField,
    /// True when odd(s)/s is constant over the sample grid.
    pub is_class_a_shape: bool,
    /// `2·odd(s)/s` when the odd part is linear.
    pub k2: Option<f64>,
}

/// Splits φ into even and odd parts and tests whether the odd part is linear in s.
pub fn even_odd_decompose(
    phi: &PhiFunction,
    eps_zero: f64,
    grid_n: usize,
) -> Result<Decomposition> {
    let e = phi.field().expr();
    let reflected = e.substitute(Var::S, &Expr::neg(Expr::var(Var::S)));
    let half = Expr::Const(0.5);
    let even = Expr::mul(half.clone(), Expr::add(e.clone(), reflected.clone()));
    let odd = Expr::mul(half, Expr::sub(e.clone(), reflected));
    let even = ScalarField::new(even, &[Var::S])?;
    let odd = ScalarField::new(odd, &[Var::S])?;

    let n = grid_n.max(8);
    let b0 = phi.b0();
    let mut ratios = Vec::with_capacity(n);
    for i in 1..n {
        let s = b0 * (2.0 * i as f64 / n as f64 - 1.0);
        if s.abs() < 1e-12 * b0 {
            continue;
        }
        ratios.push(odd.eval_raw(&[0.0, 0.0, s, 0.0])? / s);
    }
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let scale = lo.abs().max(hi.abs());
    let is_class_a_shape = hi - lo <= eps_zero * (1.0 + scale);
    let k2 = is_class_a_shape.then(|| {
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        2.0 * mean
    });
    Ok(Decomposition {
        even,
        odd,
        is_class_a_shape,
        k2,
    })
}

/// Closed coordinate rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x1_min: f64,
    pub x1_max: f64,
    pub x2_min: f64,
    pub x2_max: f64,
}

impl Rect {
    pub fn new(x1_min: f64, x1_max: f64, x2_min: f64, x2_max: f64) -> Result<Self> {
        let ok = [x1_min, x1_max, x2_min, x2_max]
            .iter()
            .all(|v| v.is_finite())
            && x1_min < x1_max
            && x2_min < x2_max;
        if !ok {
            return Err(Error::InvalidArgument(format!(
                "degenerate domain [{x1_min}, {x1_max}] x [{x2_min}, {x2_max}]"
            )));
        }
        Ok(Self {
            x1_min,
            x1_max,
            x2_min,
            x2_max,
        })
    }

    pub fn square(half_width: f64) -> Self {
        Self {
            x1_min: -half_width,
            x1_max: half_width,
            x2_min: -half_width,
            x2_max: half_width,
        }
    }

    pub fn contains(&self, x: [f64; 2]) -> bool {
        (self.x1_min..=self.x1_max).contains(&x[0]) && (self.x2_min..=self.x2_max).contains(&x[1])
    }

    /// Longest side length.
    pub fn extent(&self) -> f64 {
        (self.x1_max - self.x1_min).max(self.x2_max - self.x2_min)
    }

    /// Row-major grid including the corners (x2 varies fastest).
    pub fn grid(&self, n1: usize, n2: usize) -> Vec<[f64; 2]> {
        let lin = |lo: f64, hi: f64, n: usize, i: usize| {
            if n <= 1 {
                0.5 * (lo + hi)
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        };
        let mut pts = Vec::with_capacity(n1 * n2);
        for i in 0..n1 {
            for j in 0..n2 {
                pts.push([
                    lin(self.x1_min, self.x1_max, n1, i),
                    lin(self.x2_min, self.x2_max, n2, j),
                ]);
            }
        }
        pts
    }
}

/// The conformal factor ν of `a_ij = e^{2ν} δ_ij` together with its partials.
#[derive(Debug, Clone)]
pub struct IsothermalMetric {
    nu: ScalarField,
    nu_1: ScalarField,
    nu_2: ScalarField,
    nu_11: ScalarField,
    nu_12: ScalarField,
    nu_22: ScalarField,
    domain: Rect,
}

impl IsothermalMetric {
    pub fn new(nu: ScalarField, domain: Rect) -> Result<Self> {
        let nu = ScalarField::new(nu.expr().clone(), &XY)?;
        let nu_1 = nu.diff(Var::X1)?;
        let nu_2 = nu.diff(Var::X2)?;
        Ok(Self {
            nu_11: nu_1.diff(Var::X1)?,
            nu_12: nu_1.diff(Var::X2)?,
            nu_22: nu_2.diff(Var::X2)?,
            nu,
            nu_1,
            nu_2,
            domain,
        })
    }

    pub fn parse(nu: &str, domain: Rect) -> Result<Self> {
        Self::new(ScalarField::parse(nu, &XY)?, domain)
    }

    pub fn nu_field(&self) -> &ScalarField {
        &self.nu
    }

    pub fn domain(&self) -> Rect {
        self.domain
    }

    pub fn nu(&self, x: [f64; 2]) -> Result<f64> {
        Ok(self.nu.eval_raw(&xy(x))?)
    }

    /// (∂ν/∂x¹, ∂ν/∂x²)
    pub fn grad(&self, x: [f64; 2]) -> Result<[f64; 2]> {
        let v = xy(x);
        Ok([self.nu_1.eval_raw(&v)?, self.nu_2.eval_raw(&v)?])
    }

    /// [[ν11, ν12], [ν12, ν22]]
    pub fn hessian(&self, x: [f64; 2]) -> Result<[[f64; 2]; 2]> {
        let v = xy(x);
        let h12 = self.nu_12.eval_raw(&v)?;
        Ok([
            [self.nu_11.eval_raw(&v)?, h12],
            [h12, self.nu_22.eval_raw(&v)?],
        ])
    }
}

/// The coefficients (b1, b2) of β with their first partials.
#[derive(Debug, Clone)]
pub struct LinearForm {
    b1: ScalarField,
    b2: ScalarField,
    b1_1: ScalarField,
    b1_2: ScalarField,
    b2_1: ScalarField,
    b2_2: ScalarField,
}

impl LinearForm {
    pub fn new(b1: ScalarField, b2: ScalarField) -> Result<Self> {
        let b1 = ScalarField::new(b1.expr().clone(), &XY)?;
        let b2 = ScalarField::new(b2.expr().clone(), &XY)?;
        Ok(Self {
            b1_1: b1.diff(Var::X1)?,
            b1_2: b1.diff(Var::X2)?,
            b2_1: b2.diff(Var::X1)?,
            b2_2: b2.diff(Var::X2)?,
            b1,
            b2,
        })
    }

    pub fn parse(b1: &str, b2: &str) -> Result<Self> {
        Self::new(ScalarField::parse(b1, &XY)?, ScalarField::parse(b2, &XY)?)
    }

    pub fn b1_field(&self) -> &ScalarField {
        &self.b1
    }

    pub fn b2_field(&self) -> &ScalarField {
        &self.b2
    }

    pub fn value(&self, x: [f64; 2]) -> Result<[f64; 2]> {
        let v = xy(x);
        Ok([self.b1.eval_raw(&v)?, self.b2.eval_raw(&v)?])
    }

    /// `[[∂b1/∂x¹, ∂b1/∂x²], [∂b2/∂x¹, ∂b2/∂x²]]`
    pub fn jacobian(&self, x: [f64; 2]) -> Result<[[f64; 2]; 2]> {
        let v = xy(x);
        Ok([
            [self.b1_1.eval_raw(&v)?, self.b1_2.eval_raw(&v)?],
            [self.b2_1.eval_raw(&v)?, self.b2_2.eval_raw(&v)?],
        ])
    }
}

#[inline]
fn xy(x: [f64; 2]) -> [f64; 4] {
    [x[0], x[1], 0.0, 0.0]
}

/// Grid resolutions and the relative zero tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sampling {
    pub n_x1: usize,
    pub n_x2: usize,
    pub n_t: usize,
    pub n_s: usize,
    /// Relative factor: a quantity with scale `q` counts as zero below `eps_zero·(1 + q)`.
    pub eps_zero: f64,
}

impl Default for Sampling {
    fn default() -> Self {
        Self {
            n_x1: 21,
            n_x2: 21,
            n_t: 64,
            n_s: 201,
            eps_zero: 1e-9,
        }
    }
}

impl Sampling {
    pub fn threshold(&self, scale: f64) -> f64 {
        self.eps_zero * (1.0 + scale.abs())
    }

    pub fn doubled(&self) -> Self {
        Self {
            n_x1: 2 * self.n_x1,
            n_x2: 2 * self.n_x2,
            n_t: 2 * self.n_t,
            n_s: 2 * self.n_s,
            eps_zero: self.eps_zero,
        }
    }

    /// `n_t` equally spaced angles in [0, 2π).
    pub fn angles(&self) -> Vec<f64> {
        (0..self.n_t)
            .map(|k| 2.0 * PI * k as f64 / self.n_t as f64)
            .collect()
    }
}

/// Everything at one base point that the indicatrix formulas need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalData {
    pub x: [f64; 2],
    pub nu: f64,
    /// e^{−ν}
    pub inv_scale: f64,
    pub nu_grad: [f64; 2],
    pub b: [f64; 2],
    /// `[[∂b1/∂x¹, ∂b1/∂x²], [∂b2/∂x¹, ∂b2/∂x²]]`
    pub db: [[f64; 2]; 2],
}

impl LocalData {
    /// b² = e^{−2ν}(b1² + b2²)
    pub fn bsq(&self) -> f64 {
        self.inv_scale * self.inv_scale * (self.b[0] * self.b[0] + self.b[1] * self.b[1])
    }

    pub fn curl21(&self) -> f64 {
        self.db[1][0] - self.db[0][1]
    }
}

/// A validated (α,β)-metric ready for analysis.
#[derive(Debug, Clone)]
pub struct MetricBundle {
    metric: IsothermalMetric,
    form: LinearForm,
    phi: PhiFunction,
    sampling: Sampling,
    validation: ValidationReport,
    b_max: f64,
    b_max_at: [f64; 2],
}

impl MetricBundle {
    /// Validates φ and checks `sup b(x) < b0` on a 3× oversampled grid.
    pub fn new(
        metric: IsothermalMetric,
        form: LinearForm,
        phi: PhiFunction,
        sampling: Sampling,
    ) -> Result<Self> {
        let validation = validate_finsler(&phi, sampling.n_s.max(64));
        if !validation.pass {
            return Err(Error::NotFinsler(Box::new(validation)));
        }
        let domain = metric.domain();
        let fine = domain.grid(
            3 * (sampling.n_x1.max(2) - 1) + 1,
            3 * (sampling.n_x2.max(2) - 1) + 1,
        );
        let mut b_max = 0.0;
        let mut b_max_at = fine[0];
        for x in fine {
            let nu = metric.nu(x)?;
            let [b1, b2] = form.value(x)?;
            let b = (-nu).exp() * b1.hypot(b2);
            if b > b_max || b.is_nan() {
                b_max = b;
                b_max_at = x;
            }
        }
        if b_max.is_nan() || b_max >= phi.b0() {
            return Err(Error::FormTooLong {
                b_max,
                at: b_max_at,
                b0: phi.b0(),
            });
        }
        Ok(Self {
            metric,
            form,
            phi,
            sampling,
            validation,
            b_max,
            b_max_at,
        })
    }

    pub fn metric(&self) -> &IsothermalMetric {
        &self.metric
    }

    pub fn form(&self) -> &LinearForm {
        &self.form
    }

    pub fn phi(&self) -> &PhiFunction {
        &self.phi
    }

    pub fn sampling(&self) -> &Sampling {
        &self.sampling
    }

    pub fn validation(&self) -> &ValidationReport {
        &self.validation
    }

    pub fn domain(&self) -> Rect {
        self.metric.domain()
    }

    /// Grid supremum of b(x) and where it is attained.
    pub fn b_max(&self) -> (f64, [f64; 2]) {
        (self.b_max, self.b_max_at)
    }

    /// Margin `b0 − sup b`.
    pub fn b_margin(&self) -> f64 {
        self.phi.b0() - self.b_max
    }

    pub fn with_sampling(&self, sampling: Sampling) -> Result<Self> {
        Self::new(
            self.metric.clone(),
            self.form.clone(),
            self.phi.clone(),
            sampling,
        )
    }

    /// The same metric and form with the reverse profile φ(−s).
    pub fn reversed(&self) -> Result<Self> {
        Self::new(
            self.metric.clone(),
            self.form.clone(),
            reverse_phi(&self.phi)?,
            self.sampling,
        )
    }

    pub fn local(&self, x: [f64; 2]) -> Result<LocalData> {
        let nu = self.metric.nu(x)?;
        Ok(LocalData {
            x,
            nu,
            inv_scale: (-nu).exp(),
            nu_grad: self.metric.grad(x)?,
            b: self.form.value(x)?,
            db: self.form.jacobian(x)?,
        })
    }

    /// The Finsler norm `F(x, y) = α φ(β/α)` with `α = e^{ν}|y|`.
    pub fn norm(&self, x: [f64; 2], y: [f64; 2]) -> Result<f64> {
        let nu = self.metric.nu(x)?;
        let [b1, b2] = self.form.value(x)?;
        let alpha = nu.exp() * y[0].hypot(y[1]);
        if alpha == 0.0 {
            return Ok(0.0);
        }
        let beta = b1 * y[0] + b2 * y[1];
        Ok(alpha * self.phi.value(beta / alpha)?)
    }
}

/// β, ∂β/∂t and b² on the Riemannian unit circle at angle `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaValues {
    pub beta: f64,
    pub beta_t: f64,
    pub bsq: f64,
}

pub(crate) fn beta_from_local(local: &LocalData, t: f64) -> BetaValues {
    let (sin, cos) = t.sin_cos();
    let [b1, b2] = local.b;
    BetaValues {
        beta: local.inv_scale * (b1 * cos + b2 * sin),
        beta_t: local.inv_scale * (-b1 * sin + b2 * cos),
        bsq: local.bsq(),
    }
}

pub fn beta_on_indicatrix(bundle: &MetricBundle, x: [f64; 2], t: f64) -> Result<BetaValues> {
    Ok(beta_from_local(&bundle.local(x)?, t))
}

/// `p(x, t) = φ(β)` and `r(x, t) = φ(−β)`, the norms of F and its reverse on the unit circle.
pub fn indicatrix_p(bundle: &MetricBundle, x: [f64; 2], t: f64) -> Result<(f64, f64)> {
    let beta = beta_on_indicatrix(bundle, x, t)?.beta;
    let phi = bundle.phi();
    Ok((phi.value(beta)?, phi.value(-beta)?))
}

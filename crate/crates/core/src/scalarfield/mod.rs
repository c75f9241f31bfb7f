//! Scalar fields: parsed expressions with exact, lazily cached partial derivatives.

mod expr;
mod parser;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use thiserror::Error;

pub use expr::{BinaryOp, Expr, UnaryOp, Var};
pub use parser::parse_expr;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("domain error: {op} of {arg}")]
    Domain { op: &'static str, arg: f64 },
    #[error("variable `{0}` is not bound at the evaluation point")]
    Unbound(Var),
    #[error("variable `{0}` is not declared for this field")]
    Undeclared(Var),
}

/// A point binding some subset of the variables.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Point {
    values: [f64; 4],
    bound: [bool; 4],
}

impl Point {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: Var, value: f64) -> Self {
        self.set(var, value);
        self
    }

    pub fn set(&mut self, var: Var, value: f64) {
        self.values[var.index()] = value;
        self.bound[var.index()] = true;
    }

    pub fn s(value: f64) -> Self {
        Self::new().with(Var::S, value)
    }

    pub fn x(x1: f64, x2: f64) -> Self {
        Self::new().with(Var::X1, x1).with(Var::X2, x2)
    }

    pub fn xt(x1: f64, x2: f64, t: f64) -> Self {
        Self::x(x1, x2).with(Var::T, t)
    }

    pub fn get(&self, var: Var) -> Option<f64> {
        self.bound[var.index()].then_some(self.values[var.index()])
    }

    pub fn shifted(&self, var: Var, delta: f64) -> Self {
        let mut p = *self;
        p.values[var.index()] += delta;
        p
    }
}

struct FieldInner {
    expr: Expr,
    vars: Vec<Var>,
    partials: RwLock<HashMap<Var, ScalarField>>,
}

/// An immutable expression over a declared variable list.
///
/// Cloning is cheap and clones share the derivative cache.
#[derive(Clone)]
pub struct ScalarField {
    inner: Arc<FieldInner>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("expr", &self.inner.expr.to_string())
            .field("vars", &self.inner.vars)
            .finish()
    }
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.inner.expr.fmt(f)
    }
}

impl ScalarField {
    /// Wraps an expression; fails if it mentions a variable outside `vars`.
    pub fn new(expr: Expr, vars: &[Var]) -> Result<Self, ExprError> {
        if let Some(v) = expr.free_vars().into_iter().find(|v| !vars.contains(v)) {
            return Err(ExprError::Undeclared(v));
        }
        let mut vars = vars.to_vec();
        vars.sort();
        vars.dedup();
        Ok(Self::from_parts(expr, vars))
    }

    fn from_parts(expr: Expr, vars: Vec<Var>) -> Self {
        Self {
            inner: Arc::new(FieldInner {
                expr,
                vars,
                partials: RwLock::new(HashMap::new()),
            }),
        }
    }

    pub fn parse(text: &str, vars: &[Var]) -> Result<Self, ExprError> {
        Self::new(parse_expr(text, vars)?, vars)
    }

    pub fn constant(value: f64, vars: &[Var]) -> Self {
        Self::new(Expr::Const(value), vars).expect("constants reference no variables")
    }

    pub fn expr(&self) -> &Expr {
        &self.inner.expr
    }

    pub fn vars(&self) -> &[Var] {
        &self.inner.vars
    }

    /// True when the expression folded to a constant.
    pub fn as_constant(&self) -> Option<f64> {
        match self.inner.expr {
            Expr::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn eval(&self, point: &Point) -> Result<f64, ExprError> {
        for &v in &self.inner.vars {
            if !point.bound[v.index()] {
                return Err(ExprError::Unbound(v));
            }
        }
        self.inner.expr.eval_with(&point.values)
    }

    /// Evaluates without checking that the declared variables are bound.
    #[inline]
    pub(crate) fn eval_raw(&self, values: &[f64; 4]) -> Result<f64, ExprError> {
        self.inner.expr.eval_with(values)
    }

    /// Symbolic partial derivative, computed once and cached.
    pub fn diff(&self, var: Var) -> Result<ScalarField, ExprError> {
        if !self.inner.vars.contains(&var) {
            return Err(ExprError::Undeclared(var));
        }
        if let Some(d) = self
            .inner
            .partials
            .read()
            .expect("cache lock poisoned")
            .get(&var)
        {
            return Ok(d.clone());
        }
        let d = Self::from_parts(self.inner.expr.derivative(var), self.inner.vars.clone());
        let mut cache = self.inner.partials.write().expect("cache lock poisoned");
        Ok(cache.entry(var).or_insert(d).clone())
    }

    /// Mixed partial along `vars` in order, e.g. `[X1, X1]` for the second x1-derivative.
    pub fn partial(&self, vars: &[Var]) -> Result<ScalarField, ExprError> {
        vars.iter().try_fold(self.clone(), |f, &v| f.diff(v))
    }

    /// Builds a new field over the same variables from this field's expression.
    pub fn map_expr(&self, f: impl FnOnce(&Expr) -> Expr) -> Result<ScalarField, ExprError> {
        ScalarField::new(f(&self.inner.expr), &self.inner.vars)
    }
}

/// Central difference `(f(p+h) - f(p-h)) / 2h` along `var`.
pub fn fd_check(field: &ScalarField, var: Var, point: &Point, h: f64) -> Result<f64, ExprError> {
    assert!(h > 0.0, "finite-difference step must be positive");
    let plus = field.eval(&point.shifted(var, h))?;
    let minus = field.eval(&point.shifted(var, -h))?;
    Ok((plus - minus) / (2.0 * h))
}

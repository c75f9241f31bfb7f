//! Expression trees over the four coordinates used throughout the crate.

use std::fmt;

use super::ExprError;

/// The variables an expression may reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    X1,
    X2,
    S,
    T,
}

impl Var {
    pub const ALL: [Var; 4] = [Var::X1, Var::X2, Var::S, Var::T];

    pub fn name(self) -> &'static str {
        match self {
            Var::X1 => "x1",
            Var::X2 => "x2",
            Var::S => "s",
            Var::T => "t",
        }
    }

    pub fn from_name(name: &str) -> Option<Var> {
        match name {
            "x1" => Some(Var::X1),
            "x2" => Some(Var::X2),
            "s" => Some(Var::S),
            "t" => Some(Var::T),
            _ => None,
        }
    }

    #[inline]
    pub(crate) fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
}

impl UnaryOp {
    pub fn function_name(self) -> Option<&'static str> {
        match self {
            UnaryOp::Neg => None,
            UnaryOp::Sin => Some("sin"),
            UnaryOp::Cos => Some("cos"),
            UnaryOp::Exp => Some("exp"),
            UnaryOp::Ln => Some("ln"),
            UnaryOp::Sqrt => Some("sqrt"),
        }
    }

    pub fn from_function_name(name: &str) -> Option<UnaryOp> {
        match name {
            "sin" => Some(UnaryOp::Sin),
            "cos" => Some(UnaryOp::Cos),
            "exp" => Some(UnaryOp::Exp),
            "ln" => Some(UnaryOp::Ln),
            "sqrt" => Some(UnaryOp::Sqrt),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinaryOp {
    fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
        }
    }
}

/// A scalar expression. Powers carry integer exponents only.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
}

impl Expr {
    pub fn constant(value: f64) -> Expr {
        Expr::Const(value)
    }

    pub fn var(v: Var) -> Expr {
        Expr::Var(v)
    }

    fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    fn is_const(&self, value: f64) -> bool {
        self.as_const() == Some(value)
    }

    // The constructors below fold constants and drop additive zeros and
    // multiplicative ones/zeros. Nothing else is rewritten.

    #[allow(clippy::should_implement_trait)]
    pub fn neg(a: Expr) -> Expr {
        match a {
            Expr::Const(c) => Expr::Const(-c),
            Expr::Unary(UnaryOp::Neg, inner) => *inner,
            other => Expr::Unary(UnaryOp::Neg, Box::new(other)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x + y),
            (Some(0.0), _) => b,
            (_, Some(0.0)) => a,
            _ => Expr::Binary(BinaryOp::Add, Box::new(a), Box::new(b)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x - y),
            (Some(0.0), _) => Expr::neg(b),
            (_, Some(0.0)) => a,
            _ => Expr::Binary(BinaryOp::Sub, Box::new(a), Box::new(b)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x * y),
            (Some(0.0), _) => Expr::Const(0.0),
            (_, Some(0.0)) => Expr::Const(0.0),
            (Some(1.0), _) => b,
            (_, Some(1.0)) => a,
            (Some(-1.0), _) => Expr::neg(b),
            (_, Some(-1.0)) => Expr::neg(a),
            _ => Expr::Binary(BinaryOp::Mul, Box::new(a), Box::new(b)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if y != 0.0 => Expr::Const(x / y),
            (Some(0.0), _) => Expr::Const(0.0),
            (_, Some(1.0)) => a,
            _ => Expr::Binary(BinaryOp::Div, Box::new(a), Box::new(b)),
        }
    }

    pub fn powi(a: Expr, n: i32) -> Expr {
        match (n, a.as_const()) {
            (0, _) => Expr::Const(1.0),
            (1, _) => a,
            (_, Some(c)) if n > 0 || c != 0.0 => Expr::Const(c.powi(n)),
            _ => Expr::Pow(Box::new(a), n),
        }
    }

    pub fn unary(op: UnaryOp, a: Expr) -> Expr {
        match (op, a.as_const()) {
            (UnaryOp::Neg, _) => Expr::neg(a),
            (UnaryOp::Sin, Some(c)) => Expr::Const(c.sin()),
            (UnaryOp::Cos, Some(c)) => Expr::Const(c.cos()),
            (UnaryOp::Exp, Some(c)) => Expr::Const(c.exp()),
            (UnaryOp::Ln, Some(c)) if c > 0.0 => Expr::Const(c.ln()),
            (UnaryOp::Sqrt, Some(c)) if c >= 0.0 => Expr::Const(c.sqrt()),
            _ => Expr::Unary(op, Box::new(a)),
        }
    }

    pub fn sin(a: Expr) -> Expr {
        Expr::unary(UnaryOp::Sin, a)
    }

    pub fn cos(a: Expr) -> Expr {
        Expr::unary(UnaryOp::Cos, a)
    }

    pub fn exp(a: Expr) -> Expr {
        Expr::unary(UnaryOp::Exp, a)
    }

    pub fn ln(a: Expr) -> Expr {
        Expr::unary(UnaryOp::Ln, a)
    }

    pub fn sqrt(a: Expr) -> Expr {
        Expr::unary(UnaryOp::Sqrt, a)
    }

    /// Variables referenced anywhere in the tree, in canonical order.
    pub fn free_vars(&self) -> Vec<Var> {
        let mut seen = [false; 4];
        self.visit_vars(&mut |v| seen[v.index()] = true);
        Var::ALL.into_iter().filter(|v| seen[v.index()]).collect()
    }

    fn visit_vars(&self, f: &mut impl FnMut(Var)) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(v) => f(*v),
            Expr::Unary(_, a) | Expr::Pow(a, _) => a.visit_vars(f),
            Expr::Binary(_, a, b) => {
                a.visit_vars(f);
                b.visit_vars(f);
            }
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var(_) => 1,
            Expr::Unary(_, a) | Expr::Pow(a, _) => 1 + a.node_count(),
            Expr::Binary(_, a, b) => 1 + a.node_count() + b.node_count(),
        }
    }

    /// Evaluates with every variable read from `values` (indexed by `Var`).
    pub fn eval_with(&self, values: &[f64; 4]) -> Result<f64, ExprError> {
        match self {
            Expr::Const(c) => Ok(*c),
            Expr::Var(v) => Ok(values[v.index()]),
            Expr::Unary(op, a) => {
                let x = a.eval_with(values)?;
                match op {
                    UnaryOp::Neg => Ok(-x),
                    UnaryOp::Sin => Ok(x.sin()),
                    UnaryOp::Cos => Ok(x.cos()),
                    UnaryOp::Exp => Ok(x.exp()),
                    UnaryOp::Ln if x > 0.0 => Ok(x.ln()),
                    UnaryOp::Ln => Err(ExprError::Domain { op: "ln", arg: x }),
                    UnaryOp::Sqrt if x >= 0.0 => Ok(x.sqrt()),
                    UnaryOp::Sqrt => Err(ExprError::Domain { op: "sqrt", arg: x }),
                }
            }
            Expr::Binary(op, a, b) => {
                let x = a.eval_with(values)?;
                let y = b.eval_with(values)?;
                match op {
                    BinaryOp::Add => Ok(x + y),
                    BinaryOp::Sub => Ok(x - y),
                    BinaryOp::Mul => Ok(x * y),
                    BinaryOp::Div if y != 0.0 => Ok(x / y),
                    BinaryOp::Div => Err(ExprError::Domain {
                        op: "division",
                        arg: y,
                    }),
                }
            }
            Expr::Pow(a, n) => {
                let x = a.eval_with(values)?;
                if *n < 0 && x == 0.0 {
                    Err(ExprError::Domain {
                        op: "negative power",
                        arg: x,
                    })
                } else {
                    Ok(x.powi(*n))
                }
            }
        }
    }

    /// Replaces every occurrence of `var` by `with`.
    pub fn substitute(&self, var: Var, with: &Expr) -> Expr {
        match self {
            Expr::Const(c) => Expr::Const(*c),
            Expr::Var(v) if *v == var => with.clone(),
            Expr::Var(v) => Expr::Var(*v),
            Expr::Unary(op, a) => Expr::unary(*op, a.substitute(var, with)),
            Expr::Binary(op, a, b) => {
                let (a, b) = (a.substitute(var, with), b.substitute(var, with));
                match op {
                    BinaryOp::Add => Expr::add(a, b),
                    BinaryOp::Sub => Expr::sub(a, b),
                    BinaryOp::Mul => Expr::mul(a, b),
                    BinaryOp::Div => Expr::div(a, b),
                }
            }
            Expr::Pow(a, n) => Expr::powi(a.substitute(var, with), *n),
        }
    }

    /// Exact symbolic derivative with respect to `var`.
    pub fn derivative(&self, var: Var) -> Expr {
        match self {
            Expr::Const(_) => Expr::Const(0.0),
            Expr::Var(v) => Expr::Const(if *v == var { 1.0 } else { 0.0 }),
            Expr::Unary(op, a) => {
                let da = a.derivative(var);
                if da.is_const(0.0) {
                    return Expr::Const(0.0);
                }
                let a = (**a).clone();
                let outer = match op {
                    UnaryOp::Neg => return Expr::neg(da),
                    UnaryOp::Sin => Expr::cos(a),
                    UnaryOp::Cos => Expr::neg(Expr::sin(a)),
                    UnaryOp::Exp => Expr::exp(a),
                    UnaryOp::Ln => return Expr::div(da, a),
                    UnaryOp::Sqrt => {
                        return Expr::div(da, Expr::mul(Expr::Const(2.0), Expr::sqrt(a)));
                    }
                };
                Expr::mul(outer, da)
            }
            Expr::Binary(op, a, b) => {
                let da = a.derivative(var);
                let db = b.derivative(var);
                match op {
                    BinaryOp::Add => Expr::add(da, db),
                    BinaryOp::Sub => Expr::sub(da, db),
                    BinaryOp::Mul => {
                        Expr::add(Expr::mul(da, (**b).clone()), Expr::mul((**a).clone(), db))
                    }
                    BinaryOp::Div => {
                        if db.is_const(0.0) {
                            return Expr::div(da, (**b).clone());
                        }
                        // (a'b - ab') / b^2
                        Expr::div(
                            Expr::sub(Expr::mul(da, (**b).clone()), Expr::mul((**a).clone(), db)),
                            Expr::powi((**b).clone(), 2),
                        )
                    }
                }
            }
            Expr::Pow(a, n) => {
                let da = a.derivative(var);
                if da.is_const(0.0) {
                    return Expr::Const(0.0);
                }
                Expr::mul(
                    Expr::mul(Expr::Const(f64::from(*n)), Expr::powi((**a).clone(), n - 1)),
                    da,
                )
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(BinaryOp::Add | BinaryOp::Sub, ..) => 1,
            Expr::Binary(BinaryOp::Mul | BinaryOp::Div, ..) => 2,
            Expr::Unary(UnaryOp::Neg, _) => 3,
            Expr::Const(c) if c.is_sign_negative() => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.precedence() < min_prec {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) if c.is_sign_negative() => write!(f, "-{:?}", -c),
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Unary(UnaryOp::Neg, a) => {
                f.write_str("-")?;
                a.fmt_child(f, 4)
            }
            Expr::Unary(op, a) => write!(f, "{}({a})", op.function_name().unwrap_or("")),
            Expr::Binary(op, a, b) => {
                let prec = self.precedence();
                a.fmt_child(f, prec)?;
                write!(f, " {} ", op.symbol())?;
                // left-associative: an equal-precedence right child needs parentheses
                b.fmt_child(f, prec + 1)
            }
            Expr::Pow(a, n) => {
                a.fmt_child(f, 5)?;
                if *n < 0 {
                    write!(f, "^({n})")
                } else {
                    write!(f, "^{n}")
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(s: f64) -> [f64; 4] {
        [0.0, 0.0, s, 0.0]
    }

    #[test]
    fn folding_keeps_trees_small() {
        let e = Expr::add(
            Expr::mul(Expr::Const(0.0), Expr::var(Var::S)),
            Expr::Const(2.0),
        );
        assert_eq!(e, Expr::Const(2.0));
        let d = Expr::powi(Expr::var(Var::S), 3).derivative(Var::X1);
        assert_eq!(d, Expr::Const(0.0));
    }

    #[test]
    fn derivative_of_cube_twice() {
        let cube = Expr::powi(Expr::var(Var::S), 3);
        let d2 = cube.derivative(Var::S).derivative(Var::S);
        assert!((d2.eval_with(&at(0.2)).unwrap() - 1.2).abs() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        let e = Expr::ln(Expr::var(Var::S));
        assert!(matches!(
            e.eval_with(&at(-1.0)),
            Err(ExprError::Domain { op: "ln", .. })
        ));
        let e = Expr::sqrt(Expr::var(Var::S));
        assert!(e.eval_with(&at(-1e-3)).is_err());
        let e = Expr::powi(Expr::var(Var::S), -2);
        assert!(e.eval_with(&at(0.0)).is_err());
    }

    #[test]
    fn substitution_reflects_argument() {
        let e = Expr::div(
            Expr::Const(1.0),
            Expr::sub(Expr::Const(1.0), Expr::var(Var::S)),
        );
        let r = e.substitute(Var::S, &Expr::neg(Expr::var(Var::S)));
        let v = r.eval_with(&at(0.25)).unwrap();
        assert!((v - 1.0 / 1.25).abs() < 1e-15);
    }

    #[test]
    fn display_parenthesizes_by_precedence() {
        let e = Expr::sub(
            Expr::var(Var::S),
            Expr::sub(Expr::var(Var::T), Expr::Const(1.0)),
        );
        assert_eq!(e.to_string(), "s - (t - 1.0)");
        let p = Expr::powi(Expr::neg(Expr::var(Var::S)), 2);
        assert_eq!(p.to_string(), "(-s)^2");
    }
}

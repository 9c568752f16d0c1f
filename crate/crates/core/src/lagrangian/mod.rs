//! A small expression language for Lagrangians `L(x, y, y', Dy)` and
//! constraint integrands.
//!
//! Variables are `x`, `y1..yN` (path components), `dy1..dyN` (classical
//! derivatives) and `Dy1..DyN` (combined fractional derivatives).
//! Expressions are immutable once parsed; [`LagrangianExpr::diff`] returns
//! a new tree.

mod parser;

use std::fmt;

use crate::error::{Error, Result};

/// A variable of the Lagrangian. Component indices are 0-based here and
/// printed 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Y(usize),
    Dy(usize),
    Frac(usize),
}

impl Var {
    /// Position in the argument list `(x, y_1..y_N, y'_1..y'_N, Dy_1..Dy_N)`,
    /// counting from 1.
    pub fn canonical_index(self, arity: usize) -> usize {
        match self {
            Var::X => 1,
            Var::Y(i) => 2 + i,
            Var::Dy(i) => arity + 2 + i,
            Var::Frac(i) => 2 * arity + 2 + i,
        }
    }

    /// Inverse of [`canonical_index`](Self::canonical_index).
    pub fn from_canonical(index: usize, arity: usize) -> Option<Var> {
        match index {
            1 => Some(Var::X),
            k if k >= 2 && k < arity + 2 => Some(Var::Y(k - 2)),
            k if k >= arity + 2 && k < 2 * arity + 2 => Some(Var::Dy(k - arity - 2)),
            k if k >= 2 * arity + 2 && k < 3 * arity + 2 => Some(Var::Frac(k - 2 * arity - 2)),
            _ => None,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X => write!(f, "x"),
            Var::Y(i) => write!(f, "y{}", i + 1),
            Var::Dy(i) => write!(f, "dy{}", i + 1),
            Var::Frac(i) => write!(f, "Dy{}", i + 1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
    Abs,
    /// `-1`, `0` or `1`; the derivative of `abs`.
    Sign,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "sign" => Func::Sign,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Sign => "sign",
        }
    }

    fn apply(self, v: f64) -> std::result::Result<f64, &'static str> {
        Ok(match self {
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Exp => v.exp(),
            Func::Ln if v <= 0.0 => return Err("logarithm of a non-positive number"),
            Func::Ln => v.ln(),
            Func::Sqrt if v < 0.0 => return Err("square root of a negative number"),
            Func::Sqrt => v.sqrt(),
            Func::Abs => v.abs(),
            Func::Sign if v == 0.0 => 0.0,
            Func::Sign => v.signum(),
        })
    }
}

/// Expression tree node.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

// Smart constructors: constant folding and 0/1 elimination only.
impl Expr {
    fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    fn is_const(&self, v: f64) -> bool {
        self.as_const() == Some(v)
    }

    fn folded(value: f64, otherwise: impl FnOnce() -> Expr) -> Expr {
        if value.is_finite() {
            Expr::Const(value)
        } else {
            otherwise()
        }
    }

    pub fn neg(e: Expr) -> Expr {
        match e {
            Expr::Const(c) => Expr::Const(-c),
            Expr::Neg(inner) => *inner,
            other => Expr::Neg(Box::new(other)),
        }
    }

    pub fn add(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::folded(x + y, || Expr::Add(Box::new(a), Box::new(b))),
            (Some(x), _) if x == 0.0 => b,
            (_, Some(y)) if y == 0.0 => a,
            _ => Expr::Add(Box::new(a), Box::new(b)),
        }
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::folded(x - y, || Expr::Sub(Box::new(a), Box::new(b))),
            (Some(x), _) if x == 0.0 => Expr::neg(b),
            (_, Some(y)) if y == 0.0 => a,
            _ => Expr::Sub(Box::new(a), Box::new(b)),
        }
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::folded(x * y, || Expr::Mul(Box::new(a), Box::new(b))),
            (Some(x), _) | (_, Some(x)) if x == 0.0 => Expr::Const(0.0),
            (Some(x), _) if x == 1.0 => b,
            (_, Some(y)) if y == 1.0 => a,
            _ => Expr::Mul(Box::new(a), Box::new(b)),
        }
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if y != 0.0 => {
                Expr::folded(x / y, || Expr::Div(Box::new(a), Box::new(b)))
            }
            (_, Some(y)) if y == 1.0 => a,
            (Some(x), _) if x == 0.0 && !b.is_const(0.0) => Expr::Const(0.0),
            _ => Expr::Div(Box::new(a), Box::new(b)),
        }
    }

    pub fn pow(a: Expr, b: Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if x >= 0.0 || y.fract() == 0.0 => {
                Expr::folded(x.powf(y), || Expr::Pow(Box::new(a), Box::new(b)))
            }
            (_, Some(y)) if y == 0.0 => Expr::Const(1.0),
            (_, Some(y)) if y == 1.0 => a,
            _ => Expr::Pow(Box::new(a), Box::new(b)),
        }
    }

    pub fn call(f: Func, a: Expr) -> Expr {
        match a.as_const().map(|c| f.apply(c)) {
            Some(Ok(v)) if v.is_finite() => Expr::Const(v),
            _ => Expr::Call(f, Box::new(a)),
        }
    }
}

/// Values of the Lagrangian's arguments at one point.
#[derive(Debug, Clone, Copy)]
pub struct PointBinding<'a> {
    pub x: f64,
    pub y: &'a [f64],
    pub dy: &'a [f64],
    /// Combined fractional derivative values.
    pub frac: &'a [f64],
}

impl Expr {
    fn eval(&self, at: &PointBinding<'_>) -> Result<f64> {
        let fail = |message: &str| Error::Eval {
            location: self.to_string(),
            message: message.to_string(),
        };
        let value = match self {
            Expr::Const(c) => *c,
            Expr::Var(Var::X) => at.x,
            Expr::Var(Var::Y(i)) => at.y[*i],
            Expr::Var(Var::Dy(i)) => at.dy[*i],
            Expr::Var(Var::Frac(i)) => at.frac[*i],
            Expr::Neg(a) => -a.eval(at)?,
            Expr::Add(a, b) => a.eval(at)? + b.eval(at)?,
            Expr::Sub(a, b) => a.eval(at)? - b.eval(at)?,
            Expr::Mul(a, b) => a.eval(at)? * b.eval(at)?,
            Expr::Div(a, b) => {
                let den = b.eval(at)?;
                if den == 0.0 {
                    return Err(fail("division by zero"));
                }
                a.eval(at)? / den
            }
            Expr::Pow(a, b) => {
                let base = a.eval(at)?;
                let exponent = b.eval(at)?;
                if exponent.fract() == 0.0 && exponent.abs() < i32::MAX as f64 {
                    if base == 0.0 && exponent < 0.0 {
                        return Err(fail("zero raised to a negative power"));
                    }
                    base.powi(exponent as i32)
                } else if base < 0.0 {
                    return Err(fail("negative base with a non-integer exponent"));
                } else if base == 0.0 && exponent < 0.0 {
                    return Err(fail("zero raised to a negative power"));
                } else {
                    base.powf(exponent)
                }
            }
            Expr::Call(f, a) => f.apply(a.eval(at)?).map_err(fail)?,
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(fail("result is not finite"))
        }
    }

    fn diff(&self, v: Var) -> Expr {
        match self {
            Expr::Const(_) => Expr::Const(0.0),
            Expr::Var(w) => Expr::Const(if *w == v { 1.0 } else { 0.0 }),
            Expr::Neg(a) => Expr::neg(a.diff(v)),
            Expr::Add(a, b) => Expr::add(a.diff(v), b.diff(v)),
            Expr::Sub(a, b) => Expr::sub(a.diff(v), b.diff(v)),
            Expr::Mul(a, b) => Expr::add(
                Expr::mul(a.diff(v), (**b).clone()),
                Expr::mul((**a).clone(), b.diff(v)),
            ),
            Expr::Div(a, b) => {
                let (da, db) = (a.diff(v), b.diff(v));
                if db.is_const(0.0) {
                    Expr::div(da, (**b).clone())
                } else {
                    // (a'b - ab') / b²
                    Expr::div(
                        Expr::sub(
                            Expr::mul(da, (**b).clone()),
                            Expr::mul((**a).clone(), db),
                        ),
                        Expr::pow((**b).clone(), Expr::Const(2.0)),
                    )
                }
            }
            Expr::Pow(a, b) => {
                let (da, db) = (a.diff(v), b.diff(v));
                if db.is_const(0.0) {
                    // c·a^(c-1)·a'
                    Expr::mul(
                        Expr::mul(
                            (**b).clone(),
                            Expr::pow((**a).clone(), Expr::sub((**b).clone(), Expr::Const(1.0))),
                        ),
                        da,
                    )
                } else {
                    // a^b · (b'·ln a + b·a'/a)
                    Expr::mul(
                        self.clone(),
                        Expr::add(
                            Expr::mul(db, Expr::call(Func::Ln, (**a).clone())),
                            Expr::div(Expr::mul((**b).clone(), da), (**a).clone()),
                        ),
                    )
                }
            }
            Expr::Call(f, a) => {
                let da = a.diff(v);
                if da.is_const(0.0) {
                    return Expr::Const(0.0);
                }
                let arg = (**a).clone();
                let outer = match f {
                    Func::Sin => Expr::call(Func::Cos, arg),
                    Func::Cos => Expr::neg(Expr::call(Func::Sin, arg)),
                    Func::Exp => Expr::call(Func::Exp, arg),
                    Func::Ln => Expr::div(Expr::Const(1.0), arg),
                    Func::Sqrt => Expr::div(Expr::Const(0.5), Expr::call(Func::Sqrt, arg)),
                    Func::Abs => Expr::call(Func::Sign, arg),
                    Func::Sign => Expr::Const(0.0),
                };
                Expr::mul(outer, da)
            }
        }
    }

    fn visit_vars(&self, out: &mut impl FnMut(Var)) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(v) => out(*v),
            Expr::Neg(a) | Expr::Call(_, a) => a.visit_vars(out),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b) => {
                a.visit_vars(out);
                b.visit_vars(out);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(..) => 3,
            Expr::Pow(..) => 4,
            Expr::Const(_) | Expr::Var(_) | Expr::Call(..) => 5,
        }
    }

    fn write_operand(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) => {
                write!(f, "(-{})", -c)
            }
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                // a bare literal after `-` would be read back as a negative constant
                if matches!(**a, Expr::Const(c) if c >= 0.0 && c.is_sign_positive()) {
                    write!(f, "({a})")
                } else {
                    a.write_operand(f, 3)
                }
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                a.write_operand(f, 1)?;
                write!(f, "{}", if matches!(self, Expr::Add(..)) { "+" } else { "-" })?;
                b.write_operand(f, 2)
            }
            Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.write_operand(f, 2)?;
                write!(f, "{}", if matches!(self, Expr::Mul(..)) { "*" } else { "/" })?;
                b.write_operand(f, 3)
            }
            Expr::Pow(a, b) => {
                a.write_operand(f, 5)?;
                write!(f, "^")?;
                b.write_operand(f, 3)
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

/// A parsed Lagrangian (or constraint integrand) over `N` path components.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianExpr {
    root: Expr,
    arity: usize,
}

impl LagrangianExpr {
    /// Parses `text` for a path with `arity` components.
    pub fn parse(text: &str, arity: usize) -> Result<Self> {
        if arity == 0 {
            return Err(Error::Problem("the number of components must be positive".into()));
        }
        Ok(LagrangianExpr {
            root: parser::parse(text, arity)?,
            arity,
        })
    }

    /// Wraps a tree built in code. Fails if a variable index exceeds `arity`.
    pub fn from_expr(root: Expr, arity: usize) -> Result<Self> {
        let mut bad = None;
        root.visit_vars(&mut |v| {
            if let Var::Y(i) | Var::Dy(i) | Var::Frac(i) = v {
                if i >= arity {
                    bad.get_or_insert(v);
                }
            }
        });
        match bad {
            Some(v) => Err(Error::Arity {
                name: v.to_string(),
                arity,
            }),
            None => Ok(LagrangianExpr { root, arity }),
        }
    }

    pub fn expr(&self) -> &Expr {
        &self.root
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn eval(&self, at: &PointBinding<'_>) -> Result<f64> {
        if at.y.len() != self.arity || at.dy.len() != self.arity || at.frac.len() != self.arity {
            return Err(Error::Shape(format!(
                "binding has ({}, {}, {}) values, expression expects N = {}",
                at.y.len(),
                at.dy.len(),
                at.frac.len(),
                self.arity
            )));
        }
        self.root.eval(at)
    }

    /// Symbolic partial derivative with respect to `var`.
    pub fn diff(&self, var: Var) -> LagrangianExpr {
        LagrangianExpr {
            root: self.root.diff(var),
            arity: self.arity,
        }
    }

    /// Whether `var` occurs anywhere in the tree.
    pub fn depends_on(&self, var: Var) -> bool {
        let mut found = false;
        self.root.visit_vars(&mut |v| found |= v == var);
        found
    }

    /// True when the tree is the literal constant 0.
    pub fn is_zero(&self) -> bool {
        self.root.is_const(0.0)
    }
}

impl fmt::Display for LagrangianExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> LagrangianExpr {
        LagrangianExpr::parse(s, 1).unwrap()
    }

    fn eval1(e: &LagrangianExpr, x: f64, y: f64, dy: f64, frac: f64) -> Result<f64> {
        e.eval(&PointBinding {
            x,
            y: &[y],
            dy: &[dy],
            frac: &[frac],
        })
    }

    #[test]
    fn square_of_sum() {
        let e = parse("(dy1 + Dy1)^2");
        let expected = Expr::Pow(
            Box::new(Expr::Add(
                Box::new(Expr::Var(Var::Dy(0))),
                Box::new(Expr::Var(Var::Frac(0))),
            )),
            Box::new(Expr::Const(2.0)),
        );
        assert_eq!(e.expr(), &expected);
        assert_eq!(eval1(&e, 0.0, 0.0, 2.0, 1.0).unwrap(), 9.0);
    }

    #[test]
    fn single_variable() {
        assert_eq!(parse("x").expr(), &Expr::Var(Var::X));
        assert_eq!(eval1(&parse("x"), 0.25, 0.0, 0.0, 0.0).unwrap(), 0.25);
    }

    #[test]
    fn unbalanced_parenthesis_offset() {
        match LagrangianExpr::parse("(dy1 + ", 1) {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 7),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_errors() {
        for bad in ["", "  ", "foo", "y0", "1 +", "sin x", "x y1", "(x", "x)", "3 $ 4", "dy"] {
            assert!(
                matches!(LagrangianExpr::parse(bad, 2), Err(Error::Syntax { .. })),
                "{bad:?}"
            );
        }
    }

    #[test]
    fn arity_is_checked() {
        assert!(matches!(
            LagrangianExpr::parse("y1 + Dy3", 2),
            Err(Error::Arity { .. })
        ));
        assert!(LagrangianExpr::parse("y1 + Dy2 + dy2", 2).is_ok());
    }

    #[test]
    fn precedence() {
        let e = parse("-x^2");
        assert_eq!(eval1(&e, 3.0, 0.0, 0.0, 0.0).unwrap(), -9.0);
        let e = parse("2^3^2");
        assert_eq!(eval1(&e, 0.0, 0.0, 0.0, 0.0).unwrap(), 512.0);
        let e = parse("x^-2");
        assert_eq!(eval1(&e, 2.0, 0.0, 0.0, 0.0).unwrap(), 0.25);
        let e = parse("1 - 2 - 3 * 4 / 2");
        assert_eq!(eval1(&e, 0.0, 0.0, 0.0, 0.0).unwrap(), -7.0);
        assert_eq!(parse("-2").expr(), &Expr::Const(-2.0));
        assert!(matches!(parse("-2^2").expr(), Expr::Neg(_)));
    }

    #[test]
    fn exp_sin() {
        let e = parse("exp(y1)*sin(x)");
        let v = eval1(&e, std::f64::consts::FRAC_PI_2, 0.0, 0.0, 0.0).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eval_errors_name_the_subexpression() {
        let e = parse("x + ln(y1 - 1)");
        match eval1(&e, 0.0, 1.0, 0.0, 0.0) {
            Err(Error::Eval { location, .. }) => assert_eq!(location, "ln(y1-1)"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(eval1(&parse("1/y1"), 0.0, 0.0, 0.0, 0.0).is_err());
        assert!(eval1(&parse("y1^0.5"), 0.0, -1.0, 0.0, 0.0).is_err());
        assert!(eval1(&parse("sqrt(y1)"), 0.0, -1.0, 0.0, 0.0).is_err());
        assert_eq!(eval1(&parse("y1^3"), 0.0, -2.0, 0.0, 0.0).unwrap(), -8.0);
    }

    #[test]
    fn derivative_of_square() {
        let e = parse("(dy1 + Dy1)^2");
        let d = e.diff(Var::Frac(0));
        assert_eq!(d.to_string(), "2*(dy1+Dy1)");
        assert!(e.diff(Var::Y(0)).is_zero());
    }

    #[test]
    fn abs_derivative_uses_sign() {
        let d = parse("abs(y1)").diff(Var::Y(0));
        assert_eq!(eval1(&d, 0.0, 0.0, 0.0, 0.0).unwrap(), 0.0);
        assert_eq!(eval1(&d, 0.0, -3.0, 0.0, 0.0).unwrap(), -1.0);
    }

    #[test]
    fn canonical_indices() {
        let n = 3;
        let vars = [Var::X, Var::Y(0), Var::Y(2), Var::Dy(0), Var::Dy(2), Var::Frac(0), Var::Frac(2)];
        let expected = [1, 2, 4, 5, 7, 8, 10];
        for (v, k) in vars.iter().zip(expected) {
            assert_eq!(v.canonical_index(n), k);
            assert_eq!(Var::from_canonical(k, n), Some(*v));
        }
        assert_eq!(Var::from_canonical(11, n), None);
        assert_eq!(Var::from_canonical(0, n), None);
    }

    #[test]
    fn printing_keeps_structure() {
        for s in ["-(2)", "-(-2)", "(-2)^2", "x-(y1-dy1)", "x/(y1*dy1)", "(x^2)^3", "-x*y1", "--x", "x^-y1^2", "x*-3"] {
            let e = parse(s);
            let back = parse(&e.to_string());
            assert_eq!(e, back, "{s} printed as {e}");
        }
    }
}

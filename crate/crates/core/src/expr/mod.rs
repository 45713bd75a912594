//! Exact symbolic expressions over the rationals.
//!
//! This is the arithmetic substrate for everything else in the crate: metric
//! components, Christoffel symbols and check residuals are all values of
//! [`Expr`] trees evaluated at exact rational points. There is no floating
//! point anywhere in the verification path; `evaluate_float` exists only for
//! cross-checks against finite differences.
//!
//! Equality of expressions is *structural*. The engine never canonicalises
//! beyond the local rewrites in [`Expr::simplify`]; semantic equality is
//! decided by evaluation at sample points (see [`equivalent_at`]).

mod parse;
mod print;

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num::traits::Pow;
use num::{BigInt, One, Zero};

pub use parse::parse;

/// Exact rational scalar. Invariants (lowest terms, positive denominator)
/// are maintained by `num`.
pub type Rational = num::BigRational;

/// Shorthand for an integer-valued [`Rational`].
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for the [`Rational`] `n/d`. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Number of chart coordinates. The whole crate works on a single fixed
/// six-dimensional chart.
pub const DIM: usize = 6;

/// What a [`Symbol`] refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolKind {
    /// Chart coordinate with 0-based index (displayed 1-based as `x1`..`x6`).
    Coordinate(usize),
    /// Free parameter, opaque to differentiation.
    Parameter,
}

/// Interned name with a kind. Coordinates order before parameters, and
/// coordinates order by index, so `Point` iteration is `x1..x6` then
/// parameters by name.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    kind: SymbolKind,
    name: Arc<str>,
}

impl Symbol {
    /// The coordinate `x{index+1}`. Panics if `index >= DIM`.
    pub fn coordinate(index: usize) -> Symbol {
        assert!(index < DIM, "coordinate index {index} out of range 0..{DIM}");
        Symbol {
            kind: SymbolKind::Coordinate(index),
            name: format!("x{}", index + 1).into(),
        }
    }

    /// A named parameter.
    pub fn parameter(name: &str) -> Symbol {
        Symbol {
            kind: SymbolKind::Parameter,
            name: name.into(),
        }
    }

    /// Classify an identifier the way the parser does: `x1`..`x6` are
    /// coordinates, any other `x` followed by digits is rejected, everything
    /// else is a parameter.
    pub fn from_name(name: &str) -> Result<Symbol, ExprError> {
        if let Some(rest) = name.strip_prefix('x') {
            if !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()) {
                return match rest.parse::<usize>() {
                    Ok(n) if (1..=DIM).contains(&n) => Ok(Symbol::coordinate(n - 1)),
                    _ => Err(ExprError::UnknownCoordinate {
                        line: 0,
                        col: 0,
                        name: name.to_owned(),
                    }),
                };
            }
        }
        Ok(Symbol::parameter(name))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    pub fn is_coordinate(&self) -> bool {
        matches!(self.kind, SymbolKind::Coordinate(_))
    }

    /// 0-based index if this is a coordinate.
    pub fn coordinate_index(&self) -> Option<usize> {
        match self.kind {
            SymbolKind::Coordinate(i) => Some(i),
            SymbolKind::Parameter => None,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// The six chart coordinates `x1..x6`.
pub fn coordinates() -> [Symbol; DIM] {
    std::array::from_fn(Symbol::coordinate)
}

/// Exact evaluation point: bindings from symbols to rationals.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Point {
    bindings: BTreeMap<Symbol, Rational>,
}

impl Point {
    pub fn new() -> Point {
        Point::default()
    }

    /// Bind all six coordinates.
    pub fn of_coordinates(values: [Rational; DIM]) -> Point {
        let mut p = Point::new();
        for (i, v) in values.into_iter().enumerate() {
            p.insert(Symbol::coordinate(i), v);
        }
        p
    }

    pub fn insert(&mut self, symbol: Symbol, value: Rational) {
        self.bindings.insert(symbol, value);
    }

    /// Builder-style [`insert`](Point::insert).
    pub fn with(mut self, symbol: Symbol, value: Rational) -> Point {
        self.insert(symbol, value);
        self
    }

    pub fn get(&self, symbol: &Symbol) -> Option<&Rational> {
        self.bindings.get(symbol)
    }

    /// Value of coordinate `index` (0-based), if bound.
    pub fn coordinate(&self, index: usize) -> Option<&Rational> {
        self.bindings.get(&Symbol::coordinate(index))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &Rational)> {
        self.bindings.iter()
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (s, v) in &self.bindings {
            if !first {
                f.write_str(", ")?;
            }
            write!(f, "{s}={v}")?;
            first = false;
        }
        Ok(())
    }
}

/// Errors from parsing, differentiation and evaluation.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ExprError {
    /// Malformed source text, with 1-based position.
    #[error("parse error at {line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    /// Identifier of the form `x<digits>` outside `x1..x6`.
    #[error("unknown symbol kind at {line}:{col}: `{name}` looks like a coordinate but the chart has only x1..x6")]
    UnknownCoordinate {
        line: usize,
        col: usize,
        name: String,
    },
    /// Evaluation hit a symbol the point does not bind.
    #[error("symbol `{0}` is not bound at the evaluation point")]
    UnboundSymbol(String),
    /// Quotient denominator or negative power base vanished, so the point
    /// lies on a singular locus of the expression.
    #[error("division by zero during evaluation")]
    DivisionByZero,
    /// Differentiation is only defined with respect to coordinates.
    #[error("cannot differentiate with respect to parameter `{0}`")]
    ParameterDerivative(String),
    /// Wrapper attaching the index of the offending sample point.
    #[error("at sample point {index}: {source}")]
    AtPoint {
        index: usize,
        #[source]
        source: Box<ExprError>,
    },
}

/// Symbolic expression tree.
///
/// `Sum` and `Product` are n-ary; `Pow` has a constant integer exponent
/// (negative allowed). Trees built by the arithmetic operators are raw and
/// may nest; [`Expr::simplify`] flattens and folds constants without ever
/// reordering or cancelling symbolic terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Const(Rational),
    Sym(Symbol),
    Sum(Arc<[Expr]>),
    Product(Arc<[Expr]>),
    Quotient(Arc<Expr>, Arc<Expr>),
    Pow(Arc<Expr>, i32),
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::Const(Rational::zero())
    }

    pub fn one() -> Expr {
        Expr::Const(Rational::one())
    }

    pub fn int(n: i64) -> Expr {
        Expr::Const(rat_int(n))
    }

    /// The rational literal `n/d`. Panics if `d == 0`.
    pub fn rational(n: i64, d: i64) -> Expr {
        Expr::Const(rat(n, d))
    }

    pub fn constant(value: Rational) -> Expr {
        Expr::Const(value)
    }

    pub fn symbol(symbol: Symbol) -> Expr {
        Expr::Sym(symbol)
    }

    /// Coordinate `x{index+1}` as an expression.
    pub fn coordinate(index: usize) -> Expr {
        Expr::Sym(Symbol::coordinate(index))
    }

    pub fn parameter(name: &str) -> Expr {
        Expr::Sym(Symbol::parameter(name))
    }

    /// n-ary sum. Empty input gives `0`, a single item is returned as is.
    pub fn sum(items: Vec<Expr>) -> Expr {
        match items.len() {
            0 => Expr::zero(),
            1 => items.into_iter().next().unwrap(),
            _ => Expr::Sum(items.into()),
        }
    }

    /// n-ary product. Empty input gives `1`, a single item is returned as is.
    pub fn product(items: Vec<Expr>) -> Expr {
        match items.len() {
            0 => Expr::one(),
            1 => items.into_iter().next().unwrap(),
            _ => Expr::Product(items.into()),
        }
    }

    pub fn quotient(numer: Expr, denom: Expr) -> Expr {
        Expr::Quotient(Arc::new(numer), Arc::new(denom))
    }

    /// Integer power. `0^0` with a literal zero base is rejected here; any
    /// other base with exponent 0 simplifies to 1 later.
    pub fn powi(base: Expr, exponent: i32) -> Expr {
        assert!(
            !(exponent == 0 && matches!(&base, Expr::Const(c) if c.is_zero())),
            "0^0 is undefined"
        );
        Expr::Pow(Arc::new(base), exponent)
    }

    /// Structural zero test: does the expression simplify to the literal 0?
    pub fn is_zero(&self) -> bool {
        matches!(self.simplify(), Expr::Const(c) if c.is_zero())
    }

    /// All symbols occurring in the tree.
    pub fn free_symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<Symbol>) {
        match self {
            Expr::Const(_) => {}
            Expr::Sym(s) => {
                out.insert(s.clone());
            }
            Expr::Sum(items) | Expr::Product(items) => {
                for it in items.iter() {
                    it.collect_symbols(out);
                }
            }
            Expr::Quotient(n, d) => {
                n.collect_symbols(out);
                d.collect_symbols(out);
            }
            Expr::Pow(b, _) => b.collect_symbols(out),
        }
    }

    /// Local structural simplification. Rules: constant folding, neutral
    /// element removal, `e*0 -> 0`, flattening of nested sums and products,
    /// `e^0 -> 1` (construction already rejected the literal `0^0`),
    /// `(e^a)^b -> e^(a*b)` unless both exponents are negative. Quotients
    /// with a nonzero constant denominator fold into the numerator; `0/e` is
    /// deliberately left alone so that singular loci keep signalling.
    pub fn simplify(&self) -> Expr {
        match self {
            Expr::Const(_) | Expr::Sym(_) => self.clone(),
            Expr::Sum(items) => {
                let mut acc = Rational::zero();
                let mut out: Vec<Expr> = Vec::with_capacity(items.len());
                for it in items.iter() {
                    match it.simplify() {
                        Expr::Const(c) => acc += c,
                        Expr::Sum(inner) => {
                            for e in inner.iter() {
                                match e {
                                    Expr::Const(c) => acc += c,
                                    other => out.push(other.clone()),
                                }
                            }
                        }
                        other => out.push(other),
                    }
                }
                if !acc.is_zero() {
                    out.push(Expr::Const(acc));
                }
                Expr::sum(out)
            }
            Expr::Product(items) => {
                let mut acc = Rational::one();
                let mut out: Vec<Expr> = Vec::with_capacity(items.len());
                for it in items.iter() {
                    match it.simplify() {
                        Expr::Const(c) => acc *= c,
                        Expr::Product(inner) => {
                            for e in inner.iter() {
                                match e {
                                    Expr::Const(c) => acc *= c,
                                    other => out.push(other.clone()),
                                }
                            }
                        }
                        other => out.push(other),
                    }
                }
                if acc.is_zero() {
                    return Expr::zero();
                }
                if out.is_empty() {
                    return Expr::Const(acc);
                }
                if !acc.is_one() {
                    out.insert(0, Expr::Const(acc));
                }
                Expr::product(out)
            }
            Expr::Quotient(n, d) => {
                let n = n.simplify();
                let d = d.simplify();
                match d {
                    Expr::Const(c) if !c.is_zero() => {
                        if c.is_one() {
                            n
                        } else {
                            Expr::Product([Expr::Const(c.recip()), n].into()).simplify()
                        }
                    }
                    d => Expr::quotient(n, d),
                }
            }
            Expr::Pow(base, k) => {
                let base = base.simplify();
                if *k == 0 {
                    // Construction rejected the literal 0^0; anything that
                    // *simplified* to 0 was not a 0-literal, so e^0 is 1.
                    return Expr::one();
                }
                if *k == 1 {
                    return base;
                }
                match base {
                    Expr::Const(c) => {
                        if c.is_zero() && *k < 0 {
                            Expr::Pow(Arc::new(Expr::Const(c)), *k)
                        } else {
                            Expr::Const(c.pow(*k))
                        }
                    }
                    Expr::Pow(inner, j) if !(j < 0 && *k < 0) => match j.checked_mul(*k) {
                        Some(m) if m != 0 => Expr::Pow(inner, m),
                        Some(_) => Expr::one(),
                        None => Expr::Pow(Arc::new(Expr::Pow(inner, j)), *k),
                    },
                    base => Expr::Pow(Arc::new(base), *k),
                }
            }
        }
    }

    /// Partial derivative with respect to a chart coordinate. The result is
    /// simplified. Differentiating by a parameter is an error.
    pub fn differentiate(&self, var: &Symbol) -> Result<Expr, ExprError> {
        if !var.is_coordinate() {
            return Err(ExprError::ParameterDerivative(var.name().to_owned()));
        }
        Ok(self.diff_raw(var).simplify())
    }

    fn diff_raw(&self, var: &Symbol) -> Expr {
        match self {
            Expr::Const(_) => Expr::zero(),
            Expr::Sym(s) => {
                if s == var {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Expr::Sum(items) => Expr::sum(items.iter().map(|e| e.diff_raw(var)).collect()),
            Expr::Product(items) => {
                let mut terms = Vec::with_capacity(items.len());
                for i in 0..items.len() {
                    let mut factors: Vec<Expr> = items.to_vec();
                    factors[i] = items[i].diff_raw(var);
                    terms.push(Expr::product(factors));
                }
                Expr::sum(terms)
            }
            Expr::Quotient(n, d) => {
                let dn = n.diff_raw(var);
                let dd = d.diff_raw(var);
                let numer = Expr::sum(vec![
                    Expr::product(vec![dn, (**d).clone()]),
                    Expr::product(vec![Expr::int(-1), (**n).clone(), dd]),
                ]);
                Expr::quotient(numer, Expr::Pow(d.clone(), 2))
            }
            Expr::Pow(base, k) => match *k {
                0 => Expr::zero(),
                1 => base.diff_raw(var),
                k => Expr::product(vec![
                    Expr::constant(rat_int(i64::from(k))),
                    Expr::Pow(base.clone(), k - 1),
                    base.diff_raw(var),
                ]),
            },
        }
    }

    /// Exact evaluation. All factors of a product are evaluated, so a pole
    /// in one factor is reported even if another factor is zero.
    pub fn evaluate_exact(&self, point: &Point) -> Result<Rational, ExprError> {
        match self {
            Expr::Const(c) => Ok(c.clone()),
            Expr::Sym(s) => point
                .get(s)
                .cloned()
                .ok_or_else(|| ExprError::UnboundSymbol(s.name().to_owned())),
            Expr::Sum(items) => {
                let mut acc = Rational::zero();
                for it in items.iter() {
                    acc += it.evaluate_exact(point)?;
                }
                Ok(acc)
            }
            Expr::Product(items) => {
                let mut acc = Rational::one();
                for it in items.iter() {
                    acc *= it.evaluate_exact(point)?;
                }
                Ok(acc)
            }
            Expr::Quotient(n, d) => {
                let dv = d.evaluate_exact(point)?;
                if dv.is_zero() {
                    return Err(ExprError::DivisionByZero);
                }
                Ok(n.evaluate_exact(point)? / dv)
            }
            Expr::Pow(base, k) => {
                let bv = base.evaluate_exact(point)?;
                if *k == 0 {
                    // e^0 is the constant 1 (the literal 0^0 never constructs),
                    // keeping evaluation consistent with simplify.
                    return Ok(Rational::one());
                }
                if bv.is_zero() && *k < 0 {
                    return Err(ExprError::DivisionByZero);
                }
                Ok(bv.pow(*k))
            }
        }
    }

    /// Floating-point evaluation with the same error behaviour as
    /// [`evaluate_exact`](Expr::evaluate_exact). Only used by cross-checks.
    pub fn evaluate_float(&self, point: &BTreeMap<Symbol, f64>) -> Result<f64, ExprError> {
        match self {
            Expr::Const(c) => Ok(rational_to_f64(c)),
            Expr::Sym(s) => point
                .get(s)
                .copied()
                .ok_or_else(|| ExprError::UnboundSymbol(s.name().to_owned())),
            Expr::Sum(items) => {
                let mut acc = 0.0;
                for it in items.iter() {
                    acc += it.evaluate_float(point)?;
                }
                Ok(acc)
            }
            Expr::Product(items) => {
                let mut acc = 1.0;
                for it in items.iter() {
                    acc *= it.evaluate_float(point)?;
                }
                Ok(acc)
            }
            Expr::Quotient(n, d) => {
                let dv = d.evaluate_float(point)?;
                if dv == 0.0 {
                    return Err(ExprError::DivisionByZero);
                }
                Ok(n.evaluate_float(point)? / dv)
            }
            Expr::Pow(base, k) => {
                let bv = base.evaluate_float(point)?;
                if *k == 0 {
                    return Ok(1.0);
                }
                if bv == 0.0 && *k < 0 {
                    return Err(ExprError::DivisionByZero);
                }
                Ok(bv.powi(*k))
            }
        }
    }
}

/// Convert an exact rational to the nearest `f64`.
pub fn rational_to_f64(r: &Rational) -> f64 {
    use num::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Pointwise equivalence: do `lhs` and `rhs` agree exactly at every sample
/// point? Evaluation errors are tagged with the index of the offending
/// point. `points` must be non-empty; agreement at no points is vacuous.
pub fn equivalent_at(lhs: &Expr, rhs: &Expr, points: &[Point]) -> Result<bool, ExprError> {
    assert!(!points.is_empty(), "equivalent_at needs at least one point");
    for (index, p) in points.iter().enumerate() {
        let wrap = |source: ExprError| ExprError::AtPoint {
            index,
            source: Box::new(source),
        };
        let a = lhs.evaluate_exact(p).map_err(wrap)?;
        let b = rhs.evaluate_exact(p).map_err(wrap)?;
        if a != b {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `-e` as a raw tree: constants negate in place, products absorb the sign
/// into a leading constant, anything else is multiplied by -1.
pub(crate) fn negate(e: Expr) -> Expr {
    match e {
        Expr::Const(c) => Expr::Const(-c),
        Expr::Product(items) => {
            let mut v: Vec<Expr> = items.to_vec();
            match v.first_mut() {
                Some(Expr::Const(c)) => {
                    let neg = Expr::Const(-c.clone());
                    v[0] = neg;
                }
                _ => v.insert(0, Expr::int(-1)),
            }
            Expr::Product(v.into())
        }
        other => Expr::Product([Expr::int(-1), other].into()),
    }
}

impl std::ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::Sum([self, rhs].into())
    }
}

impl std::ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::Sum([self, negate(rhs)].into())
    }
}

impl std::ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Product([self, rhs].into())
    }
}

impl std::ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        Expr::quotient(self, rhs)
    }
}

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        negate(self)
    }
}

impl std::ops::Add for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        self.clone() + rhs.clone()
    }
}

impl std::ops::Sub for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        self.clone() - rhs.clone()
    }
}

impl std::ops::Mul for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        self.clone() * rhs.clone()
    }
}

impl std::ops::Div for &Expr {
    type Output = Expr;
    fn div(self, rhs: &Expr) -> Expr {
        self.clone() / rhs.clone()
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn ipoint(vals: [i64; DIM]) -> Point {
        Point::of_coordinates(std::array::from_fn(|i| rat_int(vals[i])))
    }

    fn x(i: usize) -> Expr {
        Expr::coordinate(i)
    }

    #[test]
    fn rational_literal_arithmetic() {
        let e = parse("3/4 + 1/4 - 2").unwrap();
        let p = Point::new();
        assert_eq!(e.evaluate_exact(&p).unwrap(), rat_int(-1));
    }

    #[test]
    fn product_rule() {
        // d/dx1 of x1^2 * x2 at (2, 3) is 2*2*3 = 12.
        let e = parse("x1^2 * x2").unwrap();
        let d = e.differentiate(&Symbol::coordinate(0)).unwrap();
        assert_eq!(d.evaluate_exact(&ipoint([2, 3, 0, 0, 0, 0])).unwrap(), rat_int(12));
    }

    #[test]
    fn quotient_rule() {
        // d/dx1 of x2/x1 at (2, 3) is -3/4.
        let e = parse("x2 / x1").unwrap();
        let d = e.differentiate(&Symbol::coordinate(0)).unwrap();
        assert_eq!(d.evaluate_exact(&ipoint([2, 3, 0, 0, 0, 0])).unwrap(), rat(-3, 4));
    }

    #[test]
    fn chain_rule_through_powers() {
        // d/dx1 of (x1^2 + 1)^3 at x1 = 1 is 3*(2)^2*2 = 24.
        let e = parse("(x1^2 + 1)^3").unwrap();
        let d = e.differentiate(&Symbol::coordinate(0)).unwrap();
        assert_eq!(d.evaluate_exact(&ipoint([1, 0, 0, 0, 0, 0])).unwrap(), rat_int(24));
    }

    #[test]
    fn negative_exponent_derivative() {
        // d/dx1 of x1^-2 at x1 = 2 is -2/8 = -1/4.
        let e = Expr::powi(x(0), -2);
        let d = e.differentiate(&Symbol::coordinate(0)).unwrap();
        assert_eq!(d.evaluate_exact(&ipoint([2, 0, 0, 0, 0, 0])).unwrap(), rat(-1, 4));
    }

    #[test]
    fn derivative_of_absent_coordinate_is_zero() {
        let e = parse("x1^2 + k*x2").unwrap();
        let d = e.differentiate(&Symbol::coordinate(3)).unwrap();
        assert!(d.is_zero());
    }

    #[test]
    fn parameter_derivative_rejected() {
        let e = parse("k * x1").unwrap();
        assert!(matches!(
            e.differentiate(&Symbol::parameter("k")),
            Err(ExprError::ParameterDerivative(name)) if name == "k"
        ));
    }

    #[test]
    fn power_zero_is_one_everywhere() {
        let e = Expr::powi(x(0), 0);
        assert_eq!(e.evaluate_exact(&ipoint([0; DIM])).unwrap(), rat_int(1));
        assert_eq!(e.simplify(), Expr::one());
    }

    #[test]
    #[should_panic(expected = "0^0")]
    fn literal_zero_to_the_zero_rejected() {
        let _ = Expr::powi(Expr::zero(), 0);
    }

    #[test]
    fn division_by_zero_reported() {
        let p = ipoint([0; DIM]);
        assert!(matches!(
            parse("1 / x1").unwrap().evaluate_exact(&p),
            Err(ExprError::DivisionByZero)
        ));
        assert!(matches!(
            parse("x1^-1").unwrap().evaluate_exact(&p),
            Err(ExprError::DivisionByZero)
        ));
    }

    #[test]
    fn pole_in_one_factor_not_masked_by_zero_factor() {
        let e = Expr::product(vec![x(1), Expr::quotient(Expr::one(), x(0))]);
        let p = ipoint([0; DIM]);
        assert!(matches!(e.evaluate_exact(&p), Err(ExprError::DivisionByZero)));
    }

    #[test]
    fn unbound_symbol_reported() {
        let e = parse("k * x1").unwrap();
        assert!(matches!(
            e.evaluate_exact(&ipoint([1, 0, 0, 0, 0, 0])),
            Err(ExprError::UnboundSymbol(name)) if name == "k"
        ));
    }

    #[test]
    fn free_symbols_cover_all_nodes() {
        let e = parse("(k + x1) * x2 / (x3 - mu)^2").unwrap();
        let mut names: Vec<String> = e.free_symbols().into_iter().map(|s| s.name().to_owned()).collect();
        names.sort();
        assert_eq!(names, ["k", "mu", "x1", "x2", "x3"]);
    }

    #[test]
    fn simplify_preserves_value_on_corpus() {
        let corpus = [
            "2*3*x1 - 6/2*x2",
            "(x1 + 0) * 1 * (x2 - x2 + x3)",
            "x1 / 4 + (2*x2)^3 / 2",
            "((x1^2)^3 + (x2^-1)^2) / (1 - 1/2)",
            "-(x1 - x2) * -1",
        ];
        let points = [ipoint([1, 2, 3, 4, 5, 6]), ipoint([-3, 7, 2, 1, -1, 5])];
        for src in corpus {
            let e = parse(src).unwrap();
            let s = e.simplify();
            for p in &points {
                assert_eq!(
                    e.evaluate_exact(p).unwrap(),
                    s.evaluate_exact(p).unwrap(),
                    "simplify changed the value of `{src}`"
                );
            }
        }
    }

    #[test]
    fn simplify_folds_structural_zero() {
        // eps = 0 switches whole branches off; the zero must fold through
        // products so the structural sparsity pattern is visible.
        let e = Expr::product(vec![Expr::zero(), x(0), Expr::quotient(x(1), x(2))]);
        assert!(e.simplify().is_zero());
    }

    #[test]
    fn equivalent_at_distinguishes_and_tags_errors() {
        let points = [ipoint([1, 2, 3, 4, 5, 6])];
        let a = parse("(x1 + x2)^2").unwrap();
        let b = parse("x1^2 + 2*x1*x2 + x2^2").unwrap();
        assert!(equivalent_at(&a, &b, &points).unwrap());
        let c = parse("x1^2 + x2^2").unwrap();
        assert!(!equivalent_at(&a, &c, &points).unwrap());
        let singular = parse("1/(x1 - 1)").unwrap();
        assert!(matches!(
            equivalent_at(&singular, &a, &points),
            Err(ExprError::AtPoint { index: 0, .. })
        ));
    }

    #[test]
    fn float_evaluation_tracks_exact() {
        let e = parse("(3/4*x1 + x2^-2) / (x3 - 1/3)").unwrap();
        let p = ipoint([2, 3, 4, 0, 0, 0]);
        let exact = rational_to_f64(&e.evaluate_exact(&p).unwrap());
        let mut floats = BTreeMap::new();
        for i in 0..DIM {
            floats.insert(
                Symbol::coordinate(i),
                rational_to_f64(p.coordinate(i).unwrap()),
            );
        }
        let approx = e.evaluate_float(&floats).unwrap();
        assert!((exact - approx).abs() <= 1e-12 * exact.abs().max(1.0));
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (-12i64..=12, 1i64..=9).prop_map(|(n, d)| Expr::rational(n, d)),
            (0usize..DIM).prop_map(Expr::coordinate),
            prop_oneof![Just("k"), Just("mu")].prop_map(Expr::parameter),
        ];
        leaf.prop_recursive(4, 48, 4, |inner| {
            prop_oneof![
                prop::collection::vec(inner.clone(), 2..4).prop_map(|v| Expr::Sum(v.into())),
                prop::collection::vec(inner.clone(), 2..4).prop_map(|v| Expr::Product(v.into())),
                (inner.clone(), inner.clone()).prop_map(|(n, d)| Expr::quotient(n, d)),
                (inner, prop_oneof![-3i32..0, 1i32..=3]).prop_map(|(b, k)| Expr::powi(b, k)),
            ]
        })
    }

    fn eval_points() -> Vec<Point> {
        vec![
            ipoint([2, 3, -1, 5, 7, -4]).with(Symbol::parameter("k"), rat(1, 3)).with(
                Symbol::parameter("mu"),
                rat_int(-2),
            ),
            Point::of_coordinates([
                rat(1, 2),
                rat(-3, 5),
                rat(7, 2),
                rat(11, 4),
                rat(-5, 3),
                rat(9, 7),
            ])
            .with(Symbol::parameter("k"), rat(5, 2))
            .with(Symbol::parameter("mu"), rat(-7, 6)),
        ]
    }

    proptest! {
        #[test]
        fn simplify_preserves_defined_values(e in arb_expr()) {
            for p in eval_points() {
                if let Ok(v) = e.evaluate_exact(&p) {
                    let s = e.simplify();
                    prop_assert_eq!(s.evaluate_exact(&p).expect("simplified form lost definedness"), v);
                }
            }
        }

        #[test]
        fn print_then_parse_preserves_values(e in arb_expr()) {
            let reparsed = parse(&e.to_string()).expect("printed form failed to parse");
            for p in eval_points() {
                match (e.evaluate_exact(&p), reparsed.evaluate_exact(&p)) {
                    (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
                    (Err(_), Err(_)) => {}
                    (a, b) => prop_assert!(false, "definedness changed: {:?} vs {:?}", a.is_ok(), b.is_ok()),
                }
            }
        }

        #[test]
        fn print_parse_is_identity_on_parser_image(e in arb_expr()) {
            let once = parse(&e.to_string()).expect("printed form failed to parse");
            let twice = parse(&once.to_string()).expect("reprinted form failed to parse");
            prop_assert_eq!(once, twice);
        }
    }
}

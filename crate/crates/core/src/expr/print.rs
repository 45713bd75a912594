//! Display rendering for [`Expr`], inverse to the parser.
//!
//! The renderer is conservative with parentheses so that printing and then
//! parsing reproduces the tree exactly, including n-ary arity and nesting.
//! Two traps drive the denominator rule: `x*3` followed by `/4` would lex as
//! the literal `3/4`, and a bare constant power in the denominator would
//! capture the slash the same way, so any denominator that could *start*
//! with an integer literal is parenthesised.

use std::fmt;

use num::{One, Signed};

use super::{Expr, Rational};

#[derive(Clone, Copy, PartialEq)]
enum Ctx {
    Top,
    SumItem,
    Numerator,
    ProductFactor,
    Denominator,
    PowBase,
}

fn is_nonneg_integer(c: &Rational) -> bool {
    !c.is_negative() && c.is_integer()
}

fn needs_parens(e: &Expr, ctx: Ctx) -> bool {
    match ctx {
        Ctx::Top => false,
        Ctx::SumItem | Ctx::Numerator => matches!(e, Expr::Sum(_)),
        Ctx::ProductFactor => match e {
            Expr::Sum(_) | Expr::Product(_) | Expr::Quotient(..) => true,
            Expr::Const(c) => c.is_negative(),
            Expr::Sym(_) | Expr::Pow(..) => false,
        },
        Ctx::Denominator => match e {
            Expr::Sym(_) => false,
            Expr::Pow(base, _) => matches!(&**base, Expr::Const(_)),
            _ => true,
        },
        Ctx::PowBase => match e {
            Expr::Sym(_) => false,
            Expr::Const(c) => !is_nonneg_integer(c),
            _ => true,
        },
    }
}

fn write_expr(f: &mut fmt::Formatter<'_>, e: &Expr, ctx: Ctx) -> fmt::Result {
    if needs_parens(e, ctx) {
        f.write_str("(")?;
        write_expr(f, e, Ctx::Top)?;
        return f.write_str(")");
    }
    match e {
        Expr::Const(c) => write!(f, "{c}"),
        Expr::Sym(s) => write!(f, "{s}"),
        Expr::Sum(items) => {
            for (i, item) in items.iter().enumerate() {
                let (negative, magnitude) = split_sign(item);
                if i == 0 {
                    if negative {
                        f.write_str("-")?;
                    }
                } else if negative {
                    f.write_str(" - ")?;
                } else {
                    f.write_str(" + ")?;
                }
                write_expr(f, &magnitude, Ctx::SumItem)?;
            }
            Ok(())
        }
        Expr::Product(items) => {
            let mut rest: &[Expr] = items;
            match items.first() {
                Some(Expr::Const(c)) if c.is_negative() => {
                    f.write_str("-")?;
                    if c.abs().is_one() && items.len() > 1 {
                        rest = &items[1..];
                    } else {
                        write_expr(f, &Expr::Const(c.abs()), Ctx::ProductFactor)?;
                        rest = &items[1..];
                        if !rest.is_empty() {
                            f.write_str("*")?;
                        }
                    }
                }
                _ => {}
            }
            for (i, item) in rest.iter().enumerate() {
                if i > 0 {
                    f.write_str("*")?;
                }
                write_expr(f, item, Ctx::ProductFactor)?;
            }
            Ok(())
        }
        Expr::Quotient(n, d) => {
            write_expr(f, n, Ctx::Numerator)?;
            f.write_str("/")?;
            write_expr(f, d, Ctx::Denominator)
        }
        Expr::Pow(base, k) => {
            write_expr(f, base, Ctx::PowBase)?;
            write!(f, "^{k}")
        }
    }
}

/// Structural sign split for sum items: `-3 -> (true, 3)`,
/// `(-c)*rest -> (true, c*rest)`, anything else is unchanged.
fn split_sign(e: &Expr) -> (bool, Expr) {
    match e {
        Expr::Const(c) if c.is_negative() => (true, Expr::Const(-c.clone())),
        Expr::Product(items) => match items.first() {
            Some(Expr::Const(c)) if c.is_negative() => {
                let mut v: Vec<Expr> = items.to_vec();
                if c.abs().is_one() && v.len() > 1 {
                    v.remove(0);
                } else {
                    v[0] = Expr::Const(c.abs());
                }
                (true, Expr::product(v))
            }
            _ => (false, e.clone()),
        },
        _ => (false, e.clone()),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self, Ctx::Top)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse, rat, Expr, Symbol};

    fn x(i: usize) -> Expr {
        Expr::Sym(Symbol::coordinate(i))
    }

    #[track_caller]
    fn round_trips(e: &Expr) {
        let printed = e.to_string();
        let back = parse(&printed).unwrap_or_else(|err| {
            panic!("printed form `{printed}` failed to parse: {err}")
        });
        assert_eq!(&back, e, "`{printed}` parsed to a different tree");
    }

    #[test]
    fn renders_signs_inside_sums() {
        let e = parse("x1 - 2*x2 - 3/4").unwrap();
        assert_eq!(e.to_string(), "x1 - 2*x2 - 3/4");
        round_trips(&e);
        let e = parse("-x1 + x2").unwrap();
        assert_eq!(e.to_string(), "-x1 + x2");
        round_trips(&e);
    }

    #[test]
    fn denominators_defeat_maximal_munch() {
        // x1*3 over 4: a bare `x1*3/4` would re-lex as the literal 3/4.
        let e = Expr::quotient(Expr::Product([x(0), Expr::Const(rat(3, 1))].into()), Expr::Const(rat(4, 1)));
        assert_eq!(e.to_string(), "x1*3/(4)");
        round_trips(&e);
        // Constant-base powers in the denominator would capture the slash.
        let e = Expr::quotient(Expr::Const(rat(3, 1)), Expr::Pow(Expr::Const(rat(2, 1)).into(), 5));
        assert_eq!(e.to_string(), "3/(2^5)");
        round_trips(&e);
        // Symbol denominators stay bare.
        let e = parse("x1/x2").unwrap();
        assert_eq!(e.to_string(), "x1/x2");
        round_trips(&e);
        // Symbol-base powers stay bare too.
        let e = parse("x1/x2^2").unwrap();
        assert_eq!(e.to_string(), "x1/x2^2");
        round_trips(&e);
    }

    #[test]
    fn quotient_chains_keep_association() {
        let e = parse("x1/x2/x3").unwrap();
        assert_eq!(e.to_string(), "x1/x2/x3");
        round_trips(&e);
        let e = parse("x1/(x2/x3)").unwrap();
        assert_eq!(e.to_string(), "x1/(x2/x3)");
        round_trips(&e);
    }

    #[test]
    fn products_parenthesise_compounds() {
        let e = parse("(x1 + x2)*(x3 - x4)").unwrap();
        assert_eq!(e.to_string(), "(x1 + x2)*(x3 - x4)");
        round_trips(&e);
        let e = parse("x1*(x2/x3)").unwrap();
        round_trips(&e);
    }

    #[test]
    fn power_bases_parenthesise_non_atoms() {
        let e = parse("(x1 + 1)^2").unwrap();
        assert_eq!(e.to_string(), "(x1 + 1)^2");
        round_trips(&e);
        let e = Expr::Pow(Expr::Const(rat(-2, 1)).into(), 3);
        assert_eq!(e.to_string(), "(-2)^3");
        round_trips(&e);
        let e = Expr::Pow(Expr::Const(rat(3, 2)).into(), 5);
        assert_eq!(e.to_string(), "(3/2)^5");
        round_trips(&e);
        let e = Expr::Pow(Expr::Pow(x(0).into(), 2).into(), 3);
        assert_eq!(e.to_string(), "(x1^2)^3");
        round_trips(&e);
        let e = parse("x1^-2").unwrap();
        assert_eq!(e.to_string(), "x1^-2");
        round_trips(&e);
    }

    #[test]
    fn negative_leading_coefficients() {
        let e = parse("-3*x1*x2").unwrap();
        assert_eq!(e.to_string(), "-3*x1*x2");
        round_trips(&e);
        let e = parse("-x1*x2").unwrap();
        assert_eq!(e.to_string(), "-x1*x2");
        round_trips(&e);
        let e = parse("x1 - x2*x3").unwrap();
        assert_eq!(e.to_string(), "x1 - x2*x3");
        round_trips(&e);
    }

    #[test]
    fn nested_sums_parenthesised_to_keep_arity() {
        // A sum inside a sum must not flatten on re-parse.
        let inner = parse("x1 + x2").unwrap();
        let e = Expr::Sum([inner, x(2)].into());
        assert_eq!(e.to_string(), "(x1 + x2) + x3");
        round_trips(&e);
    }
}

//! Plain-text parameter files.
//!
//! One `key = value` pair per line; `#` starts a comment; blank lines are
//! ignored. Keys: `e3`, `e6` (1 or -1), `eps`, `epst` (0 or 1), `a`, `c`
//! (integer or `p/q`), `theta`, `omega` (DSL expressions). Missing keys
//! keep their defaults; unknown and duplicate keys are errors.

use std::collections::BTreeSet;
use std::str::FromStr;

use num::BigInt;

use crate::expr::{parse, Rational};

use super::{HSpaceParams, Sign};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParamsFileError {
    #[error("line {line}: expected `key = value`")]
    MissingEquals { line: usize },
    #[error("line {line}: unknown key `{key}` (expected e3, e6, eps, epst, a, c, theta or omega)")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: invalid value for `{key}`: {message}")]
    InvalidValue {
        line: usize,
        key: String,
        message: String,
    },
}

fn parse_flag(s: &str) -> Result<bool, String> {
    match s.trim() {
        "0" => Ok(false),
        "1" => Ok(true),
        other => Err(format!("expected `0` or `1`, got `{other}`")),
    }
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    let (numer_text, denom_text) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let numer = BigInt::from_str(numer_text)
        .map_err(|_| format!("`{numer_text}` is not an integer"))?;
    let denom = BigInt::from_str(denom_text)
        .map_err(|_| format!("`{denom_text}` is not an integer"))?;
    if denom == BigInt::from(0) {
        return Err("zero denominator".into());
    }
    Ok(Rational::new(numer, denom))
}

/// Parse a parameter file. The result is *syntactically* valid; the
/// admissibility constraints are checked by `HSpaceParams::validate` (via
/// `HSpaceModel::build`).
pub fn parse_params_file(text: &str) -> Result<HSpaceParams, ParamsFileError> {
    let mut params = HSpaceParams::default();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ParamsFileError::MissingEquals { line });
        };
        let key = key.trim().to_owned();
        let value = value.trim();
        if !seen.insert(key.clone()) {
            return Err(ParamsFileError::DuplicateKey { line, key });
        }
        let invalid = |message: String| ParamsFileError::InvalidValue {
            line,
            key: key.clone(),
            message,
        };
        match key.as_str() {
            "e3" => params.e3 = Sign::from_str(value).map_err(invalid)?,
            "e6" => params.e6 = Sign::from_str(value).map_err(invalid)?,
            "eps" => params.eps = parse_flag(value).map_err(invalid)?,
            "epst" => params.epst = parse_flag(value).map_err(invalid)?,
            "a" => params.a = parse_rational(value).map_err(invalid)?,
            "c" => params.c = parse_rational(value).map_err(invalid)?,
            "theta" => params.theta = parse(value).map_err(|e| invalid(e.to_string()))?,
            "omega" => params.omega = parse(value).map_err(|e| invalid(e.to_string()))?,
            _ => return Err(ParamsFileError::UnknownKey { line, key }),
        }
    }
    Ok(params)
}

/// Canonical text form: fixed key order, one pair per line. Parsing the
/// result reproduces the parameters.
pub fn render_params(params: &HSpaceParams) -> String {
    format!(
        "e3 = {}\ne6 = {}\neps = {}\nepst = {}\na = {}\nc = {}\ntheta = {}\nomega = {}\n",
        params.e3,
        params.e6,
        u8::from(params.eps),
        u8::from(params.epst),
        params.a,
        params.c,
        params.theta,
        params.omega,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::rat;
    use crate::hspace::Sign;

    #[test]
    fn defaults_and_overrides() {
        let params = parse_params_file("").unwrap();
        assert_eq!(params, HSpaceParams::default());
        let params = parse_params_file(
            "# sample configuration\n\
             e6 = -1\n\
             a = 3/2   # gap offset\n\
             theta = x3^2 + 1\n\
             eps = 0\n",
        )
        .unwrap();
        assert_eq!(params.e6, Sign::Minus);
        assert_eq!(params.a, rat(3, 2));
        assert!(!params.eps);
        assert_eq!(params.theta, crate::expr::parse("x3^2 + 1").unwrap());
        assert_eq!(params.e3, Sign::Plus);
    }

    #[test]
    fn error_reporting() {
        assert_eq!(
            parse_params_file("e3 1").unwrap_err(),
            ParamsFileError::MissingEquals { line: 1 }
        );
        assert_eq!(
            parse_params_file("\n\nbogus = 1").unwrap_err(),
            ParamsFileError::UnknownKey {
                line: 3,
                key: "bogus".into()
            }
        );
        assert_eq!(
            parse_params_file("a = 1\na = 2").unwrap_err(),
            ParamsFileError::DuplicateKey {
                line: 2,
                key: "a".into()
            }
        );
        assert!(matches!(
            parse_params_file("eps = yes").unwrap_err(),
            ParamsFileError::InvalidValue { line: 1, .. }
        ));
        assert!(matches!(
            parse_params_file("a = 1/0").unwrap_err(),
            ParamsFileError::InvalidValue { .. }
        ));
        assert!(matches!(
            parse_params_file("theta = x3 +").unwrap_err(),
            ParamsFileError::InvalidValue { .. }
        ));
    }

    #[test]
    fn render_then_parse_round_trips() {
        let params = HSpaceParams {
            e3: Sign::Minus,
            a: rat(-7, 3),
            c: rat(1, 2),
            theta: crate::expr::parse("2*x3 - 1").unwrap(),
            omega: crate::expr::parse("x6^2").unwrap(),
            eps: false,
            ..HSpaceParams::default()
        };
        let text = render_params(&params);
        assert_eq!(parse_params_file(&text).unwrap(), params);
    }

    #[test]
    fn negative_rationals_and_whitespace() {
        let params = parse_params_file("  c   =   -5/4  \n").unwrap();
        assert_eq!(params.c, rat(-5, 4));
    }
}

//! The six-dimensional type [33] family: parameters, defining functions and
//! the exact symbolic model (metric, deformation pair, defining function).
//!
//! Coordinates are `x1..x6`. The family splits into two 3-blocks,
//! `(x1,x2,x3)` and `(x4,x5,x6)`, coupled only through the shared gap
//! `f6 - f3`. All constructions below are verbatim symbolic; nothing is
//! evaluated until a sampler or checker picks a point.

mod file;
mod sample;

pub use file::{parse_params_file, render_params, ParamsFileError};
pub use sample::{sample_regular_points, RegularPoint, SampleError, SampleStrategy};

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::expr::{Expr, Rational, DIM};
use crate::tensor::{Chart, Geometry, MetricField, TensorField};

/// A sign factor, `+1` or `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn rational(self) -> Rational {
        match self {
            Sign::Plus => crate::expr::rat_int(1),
            Sign::Minus => crate::expr::rat_int(-1),
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sign::Plus => f.write_str("1"),
            Sign::Minus => f.write_str("-1"),
        }
    }
}

impl FromStr for Sign {
    type Err = String;
    fn from_str(s: &str) -> Result<Sign, String> {
        match s.trim() {
            "1" | "+1" => Ok(Sign::Plus),
            "-1" => Ok(Sign::Minus),
            other => Err(format!("expected `1` or `-1`, got `{other}`")),
        }
    }
}

/// Free parameters of the family.
///
/// `theta` may depend only on `x3`, `omega` only on `x6`; both default to
/// the constant 1. `eps`/`epst` are the two block switches (0 or 1).
#[derive(Clone, Debug, PartialEq)]
pub struct HSpaceParams {
    pub e3: Sign,
    pub e6: Sign,
    pub eps: bool,
    pub epst: bool,
    pub a: Rational,
    pub c: Rational,
    pub theta: Expr,
    pub omega: Expr,
}

impl Default for HSpaceParams {
    fn default() -> HSpaceParams {
        HSpaceParams {
            e3: Sign::Plus,
            e6: Sign::Plus,
            eps: true,
            epst: true,
            a: crate::expr::rat_int(1),
            c: crate::expr::rat_int(0),
            theta: Expr::one(),
            omega: Expr::one(),
        }
    }
}

/// Violations of the parameter constraints.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParamsError {
    #[error("parameter `a` must be nonzero when epst = 0 (f6 - f3 would vanish identically)")]
    ZeroAWithZeroEpst,
    #[error("`theta` must not be the zero expression when eps = 0 (A would vanish identically)")]
    ZeroThetaWithZeroEps,
    #[error("`omega` must not be the zero expression when epst = 0 (A-tilde would vanish identically)")]
    ZeroOmegaWithZeroEpst,
    #[error("`theta` may depend only on x3, but it mentions `{0}`")]
    ThetaDependency(String),
    #[error("`omega` may depend only on x6, but it mentions `{0}`")]
    OmegaDependency(String),
}

impl HSpaceParams {
    /// Check the admissibility constraints. Every violation names the
    /// clause; the first violation in the fixed order below is reported.
    pub fn validate(&self) -> Result<(), ParamsError> {
        use num::Zero;
        if !self.epst && self.a.is_zero() {
            return Err(ParamsError::ZeroAWithZeroEpst);
        }
        if !self.eps && self.theta.is_zero() {
            return Err(ParamsError::ZeroThetaWithZeroEps);
        }
        if !self.epst && self.omega.is_zero() {
            return Err(ParamsError::ZeroOmegaWithZeroEpst);
        }
        if let Some(s) = offending_symbol(&self.theta, 2) {
            return Err(ParamsError::ThetaDependency(s));
        }
        if let Some(s) = offending_symbol(&self.omega, 5) {
            return Err(ParamsError::OmegaDependency(s));
        }
        Ok(())
    }
}

fn offending_symbol(e: &Expr, allowed_coordinate: usize) -> Option<String> {
    e.free_symbols()
        .into_iter()
        .find(|s| s.coordinate_index() != Some(allowed_coordinate))
        .map(|s| s.name().to_owned())
}

/// Flat configurations carry no curvature to verify against: both block
/// switches off.
pub fn is_flat_configuration(params: &HSpaceParams) -> bool {
    !params.eps && !params.epst
}

/// The named building blocks of the model, kept for reporting and for
/// samplers that must certify regularity.
#[derive(Clone, Debug)]
pub struct AuxiliaryExprs {
    /// `f3 = eps * x3`.
    pub f3: Expr,
    /// `f6 = epst * x6 + a`.
    pub f6: Expr,
    /// `A = eps * x2 + theta(x3)`, must not vanish at sample points.
    pub big_a: Expr,
    /// `At = epst * x5 + omega(x6)`, must not vanish at sample points.
    pub big_a_tilde: Expr,
    /// `Sigma1 = 3 / (f6 - f3)`.
    pub sigma1: Expr,
    /// `Sigma2 = 3 / (f6 - f3)^2`.
    pub sigma2: Expr,
}

/// Fully constructed model: metric `g`, companion tensor `a`, defining
/// function `phi` and the parallel candidate `h = a + 3(f3 + f6 + c) g`.
#[derive(Clone, Debug)]
pub struct HSpaceModel {
    params: HSpaceParams,
    metric: MetricField,
    a_tensor: TensorField,
    h: TensorField,
    phi: Expr,
    aux: AuxiliaryExprs,
}

impl HSpaceModel {
    /// Validate parameters and assemble all symbolic fields.
    pub fn build(params: HSpaceParams) -> Result<HSpaceModel, ParamsError> {
        params.validate()?;
        let x = Expr::coordinate;
        let eps = Expr::int(i64::from(params.eps));
        let epst = Expr::int(i64::from(params.epst));

        let f3 = (eps.clone() * x(2)).simplify();
        let f6 = (epst.clone() * x(5) + Expr::constant(params.a.clone())).simplify();
        let gap = (&f6 - &f3).simplify();
        let big_a = (eps.clone() * x(1) + params.theta.clone()).simplify();
        let big_a_tilde = (epst.clone() * x(4) + params.omega.clone()).simplify();
        let sigma1 = Expr::quotient(Expr::int(3), gap.clone());
        let sigma2 = Expr::quotient(Expr::int(3), Expr::powi(gap.clone(), 2));

        let g3 = Expr::constant(params.e3.rational()) * Expr::powi(gap.clone(), 3);
        let g6 = Expr::constant(params.e6.rational()) * Expr::powi((&f3 - &f6).simplify(), 3);

        // Metric upper triangle, first block rows 1..3, second block rows
        // 4..6 (1-based). Every entry carries the block conformal factor.
        let eps_x1 = eps.clone() * x(0);
        let epst_x4 = epst.clone() * x(3);
        let chart = Chart::standard();
        let zero = Expr::zero();
        let entries: [[Expr; DIM]; DIM] = {
            let mut e: [[Expr; DIM]; DIM] = std::array::from_fn(|_| std::array::from_fn(|_| zero.clone()));
            e[1][1] = g3.clone();
            e[0][2] = Expr::int(2) * big_a.clone() * g3.clone();
            e[1][2] = (eps_x1.clone() - Expr::int(2) * big_a.clone() * sigma1.clone()) * g3.clone();
            e[2][2] = (Expr::powi(eps_x1.clone(), 2)
                - Expr::int(4) * eps_x1.clone() * big_a.clone() * sigma1.clone()
                + Expr::int(4) * Expr::powi(big_a.clone(), 2) * sigma2.clone())
                * g3.clone();
            e[4][4] = g6.clone();
            e[3][5] = Expr::int(2) * big_a_tilde.clone() * g6.clone();
            e[4][5] = (epst_x4.clone() + Expr::int(2) * big_a_tilde.clone() * sigma1.clone()) * g6.clone();
            e[5][5] = (Expr::powi(epst_x4.clone(), 2)
                + Expr::int(4) * epst_x4.clone() * big_a_tilde.clone() * sigma1.clone()
                + Expr::int(4) * Expr::powi(big_a_tilde.clone(), 2) * sigma2.clone())
                * g6.clone();
            e
        };
        let metric = MetricField::symmetric(chart.clone(), |i, j| entries[i][j].simplify());

        // Companion tensor: f3/f6 times the block metric plus two in-block
        // corrections per block.
        let a_tensor = TensorField::symmetric02(chart.clone(), |i, j| {
            let (i, j) = (i.min(j), i.max(j));
            let base = if i < 3 && j < 3 {
                f3.clone() * metric.component(i, j).clone()
            } else if i >= 3 && j >= 3 {
                f6.clone() * metric.component(i, j).clone()
            } else {
                Expr::zero()
            };
            let extra = if (i, j) == (1, 2) {
                metric.component(0, 2).clone()
            } else if (i, j) == (2, 2) {
                Expr::int(4)
                    * big_a.clone()
                    * metric.component(1, 1).clone()
                    * (eps_x1.clone() - big_a.clone() * sigma1.clone())
            } else if (i, j) == (4, 5) {
                metric.component(3, 5).clone()
            } else if (i, j) == (5, 5) {
                Expr::int(4)
                    * big_a_tilde.clone()
                    * metric.component(4, 4).clone()
                    * (epst_x4.clone() + big_a_tilde.clone() * sigma1.clone())
            } else {
                Expr::zero()
            };
            (base + extra).simplify()
        });

        let phi = (Expr::rational(3, 2) * (&f3 + &f6) + Expr::constant(params.c.clone())).simplify();

        let h_scale =
            (Expr::int(3) * ((&f3 + &f6) + Expr::constant(params.c.clone()))).simplify();
        let h = TensorField::from_fn(chart, 0, 2, |idx| {
            (a_tensor.component(idx).clone()
                + h_scale.clone() * metric.component(idx[0], idx[1]).clone())
            .simplify()
        });

        Ok(HSpaceModel {
            params,
            metric,
            a_tensor,
            h,
            phi,
            aux: AuxiliaryExprs {
                f3,
                f6,
                big_a,
                big_a_tilde,
                sigma1,
                sigma2,
            },
        })
    }

    pub fn params(&self) -> &HSpaceParams {
        &self.params
    }

    pub fn metric(&self) -> &MetricField {
        &self.metric
    }

    /// The companion tensor `a`.
    pub fn a_tensor(&self) -> &TensorField {
        &self.a_tensor
    }

    /// The parallel candidate `h = a + 3(f3 + f6 + c) g`.
    pub fn h(&self) -> &TensorField {
        &self.h
    }

    /// The defining function `phi = (3/2)(f3 + f6) + c`.
    pub fn phi(&self) -> &Expr {
        &self.phi
    }

    pub fn aux(&self) -> &AuxiliaryExprs {
        &self.aux
    }

    pub fn is_flat_configuration(&self) -> bool {
        is_flat_configuration(&self.params)
    }

    /// Curvature pipeline for this metric. Building one costs the symbolic
    /// first and second metric partials; hold on to it.
    pub fn geometry(&self) -> Geometry {
        Geometry::new(self.metric.clone())
    }
}

/// Index pairs (0-based, `i <= j`) whose component is structurally zero.
/// For the model metric and `h` this is the common sparsity pattern that
/// parallel symmetric tensors must respect.
pub fn zero_pattern(t: &TensorField) -> BTreeSet<(usize, usize)> {
    assert_eq!(t.rank(), 2, "zero_pattern expects a rank-2 field");
    let mut out = BTreeSet::new();
    for i in 0..DIM {
        for j in i..DIM {
            if t.component(&[i, j]).is_zero() {
                out.insert((i, j));
            }
        }
    }
    out
}

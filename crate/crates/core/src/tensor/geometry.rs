//! Exact pointwise connection and curvature.
//!
//! Symbolic Christoffel symbols of this metric family are already large and
//! the symbolic curvature is intractable, so the pipeline evaluates instead:
//! the two symbolic derivative caches (first and second metric partials) are
//! small, and everything downstream is exact rational arithmetic at a point.
//! The inverse-metric derivative uses d(g^-1) = -g^-1 (dg) g^-1.
//!
//! Index conventions, fixed once for the whole crate:
//!   christoffel[i][j][k] = Gamma^i_{jk}
//!   riemann[i][j][k][l]  = R^i_{jkl}
//!                        = d_k Gamma^i_{jl} - d_l Gamma^i_{jk}
//!                          + Gamma^i_{mk} Gamma^m_{jl} - Gamma^i_{ml} Gamma^m_{jk}

use num::Zero;

use crate::expr::{coordinates, rat, Expr, Point, Rational, DIM};

use super::matrix::RationalMatrix;
use super::{MetricField, TensorError, TensorField};

pub type Rank2 = [[Rational; DIM]; DIM];
pub type Rank3 = [[[Rational; DIM]; DIM]; DIM];
pub type Rank4 = [[[[Rational; DIM]; DIM]; DIM]; DIM];

fn zero2() -> Rank2 {
    std::array::from_fn(|_| std::array::from_fn(|_| Rational::zero()))
}

fn zero3() -> Box<Rank3> {
    Box::new(std::array::from_fn(|_| zero2()))
}

fn zero4() -> Box<Rank4> {
    Box::new(std::array::from_fn(|_| *zero3()))
}

/// A tensor field bundled with its symbolic first partials, so pointwise
/// covariant derivatives do not re-differentiate per point.
#[derive(Clone, Debug)]
pub struct TensorFieldC1 {
    pub field: TensorField,
    /// `partials[idx, k] = d(field[idx]) / dx_k`.
    pub partials: TensorField,
}

impl TensorFieldC1 {
    pub fn new(field: TensorField) -> TensorFieldC1 {
        let partials = field.partials();
        TensorFieldC1 { field, partials }
    }
}

/// A scalar with symbolic gradient and second partials.
#[derive(Clone, Debug)]
pub struct ScalarFieldC2 {
    pub value: Expr,
    gradient: [Expr; DIM],
    second: [[Expr; DIM]; DIM],
}

impl ScalarFieldC2 {
    pub fn new(value: Expr) -> ScalarFieldC2 {
        let coords = coordinates();
        let gradient: [Expr; DIM] = std::array::from_fn(|i| {
            value
                .differentiate(&coords[i])
                .expect("coordinate derivative")
        });
        let second: [[Expr; DIM]; DIM] = std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                gradient[i]
                    .differentiate(&coords[j])
                    .expect("coordinate derivative")
            })
        });
        ScalarFieldC2 {
            value,
            gradient,
            second,
        }
    }

    /// `d psi / dx_i`.
    pub fn gradient(&self, i: usize) -> &Expr {
        &self.gradient[i]
    }

    /// `d^2 psi / dx_i dx_j`.
    pub fn second(&self, i: usize, j: usize) -> &Expr {
        &self.second[i][j]
    }
}

/// A metric with its cached symbolic first and second partials; the factory
/// for exact per-point frames.
#[derive(Clone, Debug)]
pub struct Geometry {
    metric: MetricField,
    /// `(0,3)`: `dg[i,j,k] = d_k g_ij`.
    dg: TensorField,
    /// `(0,4)`: `d2g[i,j,k,l] = d_l d_k g_ij`.
    d2g: TensorField,
}

impl Geometry {
    pub fn new(metric: MetricField) -> Geometry {
        let dg = metric.as_tensor().partials();
        let d2g = dg.partials();
        Geometry { metric, dg, d2g }
    }

    pub fn metric(&self) -> &MetricField {
        &self.metric
    }

    /// The cached symbolic first partials `dg[i,j,k] = d_k g_ij`, exposed
    /// for cross-checks against numerical differentiation.
    pub fn metric_partials(&self) -> &TensorField {
        &self.dg
    }

    /// Exact metric matrix at a point (no regularity requirement).
    pub fn metric_at(&self, point: &Point) -> Result<RationalMatrix, TensorError> {
        self.metric.evaluate_matrix(point)
    }

    /// Exact inverse metric, Christoffel symbols and curvature at a point.
    /// Fails with [`TensorError::SingularMetric`] where `det g = 0`.
    pub fn frame_at(&self, point: &Point) -> Result<PointFrame, TensorError> {
        let g = self.metric.evaluate_matrix(point)?;
        let ginv = g
            .inverse()
            .ok_or_else(|| TensorError::SingularMetric(point.to_string()))?;

        let mut dgv = zero3();
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    dgv[i][j][k] = self.dg.component(&[i, j, k]).evaluate_exact(point)?;
                }
            }
        }
        let mut d2gv = zero4();
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    for l in 0..DIM {
                        d2gv[i][j][k][l] =
                            self.d2g.component(&[i, j, k, l]).evaluate_exact(point)?;
                    }
                }
            }
        }

        let half = rat(1, 2);

        // Lowered symbols Gamma_{ajk} and their partials.
        let mut gl = zero3();
        for a in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    gl[a][j][k] =
                        (&dgv[a][k][j] + &dgv[a][j][k] - &dgv[j][k][a]) * &half;
                }
            }
        }
        let mut dgl = zero4();
        for a in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    for l in 0..DIM {
                        dgl[a][j][k][l] = (&d2gv[a][k][j][l] + &d2gv[a][j][k][l]
                            - &d2gv[j][k][a][l])
                            * &half;
                    }
                }
            }
        }

        let mut christoffel = zero3();
        for i in 0..DIM {
            for a in 0..DIM {
                let w = ginv.at(i, a);
                if w.is_zero() {
                    continue;
                }
                for j in 0..DIM {
                    for k in 0..DIM {
                        if gl[a][j][k].is_zero() {
                            continue;
                        }
                        christoffel[i][j][k] += w * &gl[a][j][k];
                    }
                }
            }
        }

        // d_l (g^-1) = -g^-1 (d_l g) g^-1, one matrix per direction.
        let mut dginv: Vec<RationalMatrix> = Vec::with_capacity(DIM);
        for l in 0..DIM {
            let dl = RationalMatrix::from_fn(DIM, DIM, |i, j| dgv[i][j][l].clone());
            let prod = ginv.mul(&dl).mul(&ginv);
            dginv.push(RationalMatrix::from_fn(DIM, DIM, |i, j| {
                -prod.at(i, j).clone()
            }));
        }

        // dgamma[i][j][k][l] = d_l Gamma^i_{jk}.
        let mut dgamma = zero4();
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    for l in 0..DIM {
                        let mut acc = Rational::zero();
                        for a in 0..DIM {
                            let da = dginv[l].at(i, a);
                            if !da.is_zero() && !gl[a][j][k].is_zero() {
                                acc += da * &gl[a][j][k];
                            }
                            let w = ginv.at(i, a);
                            if !w.is_zero() && !dgl[a][j][k][l].is_zero() {
                                acc += w * &dgl[a][j][k][l];
                            }
                        }
                        dgamma[i][j][k][l] = acc;
                    }
                }
            }
        }

        let mut riemann = zero4();
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    for l in 0..DIM {
                        let mut acc = &dgamma[i][j][l][k] - &dgamma[i][j][k][l];
                        for m in 0..DIM {
                            if !christoffel[i][m][k].is_zero()
                                && !christoffel[m][j][l].is_zero()
                            {
                                acc += &christoffel[i][m][k] * &christoffel[m][j][l];
                            }
                            if !christoffel[i][m][l].is_zero()
                                && !christoffel[m][j][k].is_zero()
                            {
                                acc -= &christoffel[i][m][l] * &christoffel[m][j][k];
                            }
                        }
                        riemann[i][j][k][l] = acc;
                    }
                }
            }
        }

        Ok(PointFrame {
            point: point.clone(),
            metric: g,
            metric_inverse: ginv,
            christoffel,
            riemann,
        })
    }
}

/// Exact geometry of one regular point.
#[derive(Clone, Debug)]
pub struct PointFrame {
    pub point: Point,
    pub metric: RationalMatrix,
    pub metric_inverse: RationalMatrix,
    /// `christoffel[i][j][k] = Gamma^i_{jk}`.
    pub christoffel: Box<Rank3>,
    /// `riemann[i][j][k][l] = R^i_{jkl}`.
    pub riemann: Box<Rank4>,
}

impl PointFrame {
    /// Covariant derivative of a (0,2) field:
    /// `out[i][j][k] = d_k b_ij - Gamma^m_{ik} b_mj - Gamma^m_{jk} b_im`.
    pub fn covariant_derivative_02(&self, b: &TensorFieldC1) -> Result<Box<Rank3>, TensorError> {
        if b.field.valence() != (0, 2) {
            let (contra, co) = b.field.valence();
            return Err(TensorError::ValenceMismatch {
                expected: "(0,2)",
                contra,
                co,
            });
        }
        let mut bv = zero2();
        for i in 0..DIM {
            for j in 0..DIM {
                bv[i][j] = b.field.component(&[i, j]).evaluate_exact(&self.point)?;
            }
        }
        let mut dbv = zero3();
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    dbv[i][j][k] = b
                        .partials
                        .component(&[i, j, k])
                        .evaluate_exact(&self.point)?;
                }
            }
        }
        let mut out = zero3();
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    let mut acc = dbv[i][j][k].clone();
                    for m in 0..DIM {
                        if !self.christoffel[m][i][k].is_zero() && !bv[m][j].is_zero() {
                            acc -= &self.christoffel[m][i][k] * &bv[m][j];
                        }
                        if !self.christoffel[m][j][k].is_zero() && !bv[i][m].is_zero() {
                            acc -= &self.christoffel[m][j][k] * &bv[i][m];
                        }
                    }
                    out[i][j][k] = acc;
                }
            }
        }
        Ok(out)
    }

    /// Covariant Hessian of a scalar:
    /// `out[i][j] = d_i d_j psi - Gamma^m_{ij} d_m psi`.
    pub fn covariant_hessian(&self, psi: &ScalarFieldC2) -> Result<Rank2, TensorError> {
        let mut grad: [Rational; DIM] = std::array::from_fn(|_| Rational::zero());
        for (m, slot) in grad.iter_mut().enumerate() {
            *slot = psi.gradient(m).evaluate_exact(&self.point)?;
        }
        let mut out = zero2();
        for i in 0..DIM {
            for j in 0..DIM {
                let mut acc = psi.second(i, j).evaluate_exact(&self.point)?;
                for m in 0..DIM {
                    if !self.christoffel[m][i][j].is_zero() && !grad[m].is_zero() {
                        acc -= &self.christoffel[m][i][j] * &grad[m];
                    }
                }
                out[i][j] = acc;
            }
        }
        Ok(out)
    }

    /// `R_{ijkl} = g_{im} R^m_{jkl}`.
    pub fn lowered_riemann(&self) -> Box<Rank4> {
        let mut out = zero4();
        for i in 0..DIM {
            for j in 0..DIM {
                for k in 0..DIM {
                    for l in 0..DIM {
                        let mut acc = Rational::zero();
                        for m in 0..DIM {
                            let gim = self.metric.at(i, m);
                            if !gim.is_zero() && !self.riemann[m][j][k][l].is_zero() {
                                acc += gim * &self.riemann[m][j][k][l];
                            }
                        }
                        out[i][j][k][l] = acc;
                    }
                }
            }
        }
        out
    }
}

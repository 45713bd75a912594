//! Tensor fields on the fixed six-dimensional chart and the pointwise
//! curvature pipeline.
//!
//! Fields store one [`Expr`] per component. Differential-geometric objects
//! that would swell symbolically (inverse metric, Christoffel symbols,
//! curvature) are instead computed exactly *per point*: [`Geometry`] caches
//! the symbolic first and second metric partials once, and
//! [`Geometry::frame_at`] assembles the exact connection and curvature at a
//! given rational point from them.

mod geometry;
mod matrix;

pub use geometry::{Geometry, PointFrame, Rank2, Rank3, Rank4, ScalarFieldC2, TensorFieldC1};
pub use matrix::{format_matrix, RationalMatrix};

use crate::expr::{Expr, ExprError, Point, Rational, Symbol, DIM};

/// Errors from tensor-level operations.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum TensorError {
    /// A constructor or operation received a field of the wrong valence.
    #[error("expected a {expected} tensor field, got valence ({contra},{co})")]
    ValenceMismatch {
        expected: &'static str,
        contra: usize,
        co: usize,
    },
    /// Metric components must be structurally symmetric.
    #[error("metric components are not symmetric: g[{i}][{j}] differs from g[{j}][{i}] structurally (1-based)")]
    AsymmetricMetric { i: usize, j: usize },
    /// The metric matrix failed to invert at an evaluation point.
    #[error("metric is singular at the point ({0})")]
    SingularMetric(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// The fixed chart `x1..x6`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    coords: [Symbol; DIM],
}

impl Chart {
    pub fn standard() -> Chart {
        Chart {
            coords: crate::expr::coordinates(),
        }
    }

    pub fn dimension(&self) -> usize {
        DIM
    }

    pub fn coordinate(&self, index: usize) -> &Symbol {
        &self.coords[index]
    }

    pub fn coordinates(&self) -> &[Symbol; DIM] {
        &self.coords
    }
}

impl Default for Chart {
    fn default() -> Chart {
        Chart::standard()
    }
}

/// Dense tensor field of valence `(contravariant, covariant)` with one
/// expression per component, stored row-major over the multi-index.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorField {
    chart: Chart,
    contravariant: usize,
    covariant: usize,
    components: Vec<Expr>,
    /// Marker for a symmetric slot pair (by slot position), set by the
    /// symmetric constructors. Purely informational.
    symmetric_pair: Option<(usize, usize)>,
}

fn flat_index(rank: usize, idx: &[usize]) -> usize {
    assert_eq!(idx.len(), rank, "multi-index has wrong rank");
    let mut flat = 0usize;
    for &i in idx {
        assert!(i < DIM, "index {i} out of range 0..{DIM}");
        flat = flat * DIM + i;
    }
    flat
}

fn unflatten(rank: usize, mut flat: usize) -> Vec<usize> {
    let mut idx = vec![0usize; rank];
    for slot in (0..rank).rev() {
        idx[slot] = flat % DIM;
        flat /= DIM;
    }
    idx
}

impl TensorField {
    /// Build a field by enumerating all `6^(r+s)` multi-indices.
    pub fn from_fn(
        chart: Chart,
        contravariant: usize,
        covariant: usize,
        mut f: impl FnMut(&[usize]) -> Expr,
    ) -> TensorField {
        let rank = contravariant + covariant;
        let total = DIM.pow(rank as u32);
        let mut components = Vec::with_capacity(total);
        for flat in 0..total {
            let idx = unflatten(rank, flat);
            components.push(f(&idx));
        }
        TensorField {
            chart,
            contravariant,
            covariant,
            components,
            symmetric_pair: None,
        }
    }

    /// Build a symmetric (0,2) field from its upper triangle: `f(i, j)` is
    /// only called for `i <= j` and mirrored.
    pub fn symmetric02(chart: Chart, mut f: impl FnMut(usize, usize) -> Expr) -> TensorField {
        let mut upper: Vec<Vec<Option<Expr>>> = vec![vec![None; DIM]; DIM];
        for i in 0..DIM {
            for j in i..DIM {
                upper[i][j] = Some(f(i, j));
            }
        }
        let mut t = TensorField::from_fn(chart, 0, 2, |idx| {
            let (i, j) = (idx[0].min(idx[1]), idx[0].max(idx[1]));
            upper[i][j].clone().expect("upper triangle filled")
        });
        t.symmetric_pair = Some((0, 1));
        t
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn valence(&self) -> (usize, usize) {
        (self.contravariant, self.covariant)
    }

    pub fn rank(&self) -> usize {
        self.contravariant + self.covariant
    }

    pub fn symmetric_pair(&self) -> Option<(usize, usize)> {
        self.symmetric_pair
    }

    pub fn component(&self, idx: &[usize]) -> &Expr {
        &self.components[flat_index(self.rank(), idx)]
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    /// Apply `f` to every component, keeping valence and symmetry marker.
    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> TensorField {
        TensorField {
            chart: self.chart.clone(),
            contravariant: self.contravariant,
            covariant: self.covariant,
            components: self.components.iter().map(f).collect(),
            symmetric_pair: self.symmetric_pair,
        }
    }

    /// Componentwise partial derivatives. The result gains one covariant
    /// slot at the *end*: `out[idx, k] = d(self[idx]) / dx_k`.
    pub fn partials(&self) -> TensorField {
        let coords = crate::expr::coordinates();
        let rank = self.rank();
        TensorField::from_fn(
            self.chart.clone(),
            self.contravariant,
            self.covariant + 1,
            |idx| {
                let (head, tail) = idx.split_at(rank);
                self.component(head)
                    .differentiate(&coords[tail[0]])
                    .expect("coordinate derivative")
            },
        )
    }

    /// Exact values of all components at a point, in component order.
    pub fn evaluate_at(&self, point: &Point) -> Result<Vec<Rational>, ExprError> {
        self.components
            .iter()
            .map(|e| e.evaluate_exact(point))
            .collect()
    }

    /// Evaluate a (0,2) or (2,0) field into a matrix.
    pub fn evaluate_matrix(&self, point: &Point) -> Result<RationalMatrix, TensorError> {
        if self.rank() != 2 {
            return Err(TensorError::ValenceMismatch {
                expected: "rank-2",
                contra: self.contravariant,
                co: self.covariant,
            });
        }
        let values = self.evaluate_at(point)?;
        Ok(RationalMatrix::from_fn(DIM, DIM, |r, c| {
            values[r * DIM + c].clone()
        }))
    }

    /// Rational linear combination of same-valence fields. Components are
    /// left raw; callers simplify where needed.
    pub fn linear_combination(terms: &[(Rational, &TensorField)]) -> TensorField {
        let first = terms.first().expect("at least one term").1;
        for (_, t) in terms {
            assert_eq!(t.valence(), first.valence(), "valence mismatch");
        }
        TensorField::from_fn(
            first.chart.clone(),
            first.contravariant,
            first.covariant,
            |idx| {
                Expr::sum(
                    terms
                        .iter()
                        .map(|(c, t)| Expr::constant(c.clone()) * t.component(idx).clone())
                        .collect(),
                )
            },
        )
    }
}

/// Symmetric (0,2) tensor field with structurally verified symmetry,
/// suitable as a metric. Degeneracy is a *pointwise* property checked by
/// evaluation, not here.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricField(TensorField);

impl MetricField {
    /// Wrap a (0,2) field, verifying structural symmetry of the components.
    pub fn new(field: TensorField) -> Result<MetricField, TensorError> {
        if field.valence() != (0, 2) {
            return Err(TensorError::ValenceMismatch {
                expected: "(0,2)",
                contra: field.contravariant,
                co: field.covariant,
            });
        }
        for i in 0..DIM {
            for j in i + 1..DIM {
                let upper = field.component(&[i, j]).simplify();
                let lower = field.component(&[j, i]).simplify();
                if upper != lower {
                    return Err(TensorError::AsymmetricMetric { i: i + 1, j: j + 1 });
                }
            }
        }
        Ok(MetricField(field))
    }

    /// Build from the upper triangle, mirroring the lower.
    pub fn symmetric(chart: Chart, f: impl FnMut(usize, usize) -> Expr) -> MetricField {
        MetricField(TensorField::symmetric02(chart, f))
    }

    pub fn as_tensor(&self) -> &TensorField {
        &self.0
    }

    pub fn component(&self, i: usize, j: usize) -> &Expr {
        self.0.component(&[i, j])
    }

    pub fn evaluate_matrix(&self, point: &Point) -> Result<RationalMatrix, TensorError> {
        self.0.evaluate_matrix(point)
    }
}

/// Lie derivative of a metric along a (1,0) vector field, fully symbolic:
/// `(L_xi g)_ij = xi^m d_m g_ij + g_mj d_i xi^m + g_im d_j xi^m`.
pub fn lie_derivative_metric(
    xi: &TensorField,
    metric: &MetricField,
) -> Result<TensorField, TensorError> {
    if xi.valence() != (1, 0) {
        return Err(TensorError::ValenceMismatch {
            expected: "(1,0)",
            contra: xi.contravariant,
            co: xi.covariant,
        });
    }
    let coords = crate::expr::coordinates();
    let g = metric.as_tensor();
    let out = TensorField::from_fn(xi.chart.clone(), 0, 2, |idx| {
        let (i, j) = (idx[0], idx[1]);
        let mut terms = Vec::with_capacity(3 * DIM);
        for m in 0..DIM {
            let dg = g
                .component(&[i, j])
                .differentiate(&coords[m])
                .expect("coordinate derivative");
            terms.push(xi.component(&[m]).clone() * dg);
            let dxi_i = xi
                .component(&[m])
                .differentiate(&coords[i])
                .expect("coordinate derivative");
            terms.push(g.component(&[m, j]).clone() * dxi_i);
            let dxi_j = xi
                .component(&[m])
                .differentiate(&coords[j])
                .expect("coordinate derivative");
            terms.push(g.component(&[i, m]).clone() * dxi_j);
        }
        Expr::sum(terms).simplify()
    });
    Ok(out)
}

/// Characteristic polynomial of the mixed endomorphism `g^{-1} b` at a
/// point, monic in descending powers (see [`RationalMatrix::char_poly`]).
pub fn char_poly_at(
    b: &TensorField,
    metric: &MetricField,
    point: &Point,
) -> Result<Vec<Rational>, TensorError> {
    let m = mixed_endomorphism_at(b, metric, point)?;
    Ok(m.char_poly())
}

/// Ranks of `(g^{-1} b - lambda I)^k` for `k = 1, 2, 3` at a point. The
/// profile determines the Jordan block sizes for eigenvalues of geometric
/// multiplicity up to 3.
pub fn rank_profile_at(
    b: &TensorField,
    metric: &MetricField,
    lambda: &Rational,
    point: &Point,
) -> Result<[usize; 3], TensorError> {
    let m = mixed_endomorphism_at(b, metric, point)?;
    let mut shifted = m;
    for i in 0..DIM {
        let v = shifted.at(i, i) - lambda;
        shifted.set(i, i, v);
    }
    Ok([
        shifted.rank(),
        shifted.pow(2).rank(),
        shifted.pow(3).rank(),
    ])
}

/// `g^{-1} b` evaluated exactly at a point.
pub fn mixed_endomorphism_at(
    b: &TensorField,
    metric: &MetricField,
    point: &Point,
) -> Result<RationalMatrix, TensorError> {
    let g = metric.evaluate_matrix(point)?;
    let ginv = g
        .inverse()
        .ok_or_else(|| TensorError::SingularMetric(point.to_string()))?;
    let bm = b.evaluate_matrix(point)?;
    Ok(ginv.mul(&bm))
}

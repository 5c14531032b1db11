use crate::family::{Ball, Cube};
use serde::Serialize;
use spectral_core::TorusGrid;

/// Element of the searched family at which a discrete supremum is attained.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    None,
    Cube { index: usize, cube: Cube, length: f64, center: [f64; 3] },
    Ball { center_index: usize, center: [f64; 3], radius: f64 },
    Time { index: usize, t: f64 },
    /// Multi-index of the derivative plus the inner witness.
    Derivative { gamma: Vec<usize>, inner: Box<Witness> },
}

impl Witness {
    pub fn cube(grid: &TorusGrid, index: usize, cube: Cube) -> Self {
        Witness::Cube { index, cube, length: cube.length(grid), center: cube.center(grid) }
    }

    pub fn ball(grid: &TorusGrid, ball: Ball) -> Self {
        Witness::Ball { center_index: ball.center, center: grid.position(ball.center), radius: ball.radius }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportParams {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub horizon: Option<f64>,
    pub grid: TorusGrid,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Quadrature {
    pub grid: TorusGrid,
    pub time_nodes: usize,
    pub excluded_diagonal: bool,
    /// Expected convergence exponents in `h`, keyed by what they describe.
    pub rates: Vec<(String, f64)>,
}

/// A computed norm with its witness and the parameters it was computed under.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormReport {
    pub norm: String,
    pub value: f64,
    pub witness: Witness,
    pub params: ReportParams,
    pub convention_notes: Vec<String>,
    pub quadrature: Quadrature,
}

pub(crate) const MEAN_NOTE: &str = "mean mode: homogeneous multipliers zero the k = 0 coefficient";
pub(crate) const RECT_NOTE: &str = "x-integrals: rectangle rule on grid samples, ball membership |y - x| < r";

impl NormReport {
    pub fn new(norm: &str, value: f64, witness: Witness, params: ReportParams, quad: Quadrature) -> Self {
        Self {
            norm: norm.to_string(),
            value,
            witness,
            params,
            convention_notes: vec![MEAN_NOTE.to_string(), RECT_NOTE.to_string()],
            quadrature: quad,
        }
    }

    pub fn note(mut self, s: impl Into<String>) -> Self {
        self.convention_notes.push(s.into());
        self
    }
}

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis, Zip};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Smooth;
use crate::error::{Error, Result};
use crate::linalg::{SymOperator, SymStore};

/// Per-target weights of the reconstruction residual.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    /// Every target column weighs 1.
    #[default]
    Uniform,
    /// Target column `j` weighs the eigenvalue `λ_j` of the basis vector it came from.
    Eigen,
}

impl Weighting {
    pub fn weights(&self, eigenvalues: ArrayView1<f64>) -> Array1<f64> {
        match self {
            Weighting::Uniform => Array1::ones(eigenvalues.len()),
            Weighting::Eigen => eigenvalues.mapv(|v| v.max(0.0)),
        }
    }
}

/// `Σ_c w_c ‖x_c - U z_c‖² + α ‖Z‖₁` evaluated directly.
///
/// `targets` holds the vectors `x_c` as columns (m×r), `dict` is `U` (m×p) and
/// `z` is p×r.
pub fn objective_eq6(
    z: ArrayView2<f64>,
    targets: ArrayView2<f64>,
    dict: ArrayView2<f64>,
    weights: ArrayView1<f64>,
    alpha: f64,
) -> Result<f64> {
    let (m, r) = targets.dim();
    let p = dict.ncols();
    if dict.nrows() != m || z.dim() != (p, r) || weights.len() != r {
        return Err(Error::ShapeMismatch(format!(
            "targets {:?}, dictionary {:?}, code {:?}, weights {}",
            targets.dim(),
            dict.dim(),
            z.dim(),
            weights.len()
        )));
    }
    let mut total = 0.0;
    for c in 0..r {
        let resid = &targets.column(c) - &dict.dot(&z.column(c));
        total += weights[c] * resid.dot(&resid) + alpha * z.column(c).iter().map(|v| v.abs()).sum::<f64>();
    }
    Ok(total)
}

/// Smooth part of the sparse-coding objective, in Gram form: with
/// `G = UᵀU` and `B = UᵀX`,
/// `f(Z) = Σ_c w_c (‖x_c‖² - 2 z_cᵀ b_c + z_cᵀ G z_c)` and `∇f = 2 (G Z - B) diag(w)`.
#[derive(Debug, Clone)]
pub struct SparseCoding {
    gram: Array2<f64>,
    cross: Array2<f64>,
    target_sq: Array1<f64>,
    weights: Array1<f64>,
}

impl SparseCoding {
    /// `eigenvalues` is required for [`Weighting::Eigen`].
    pub fn new(
        dict: ArrayView2<f64>,
        targets: ArrayView2<f64>,
        weighting: Weighting,
        eigenvalues: Option<ArrayView1<f64>>,
    ) -> Result<Self> {
        if dict.nrows() != targets.nrows() {
            return Err(Error::ShapeMismatch(format!(
                "dictionary has {} rows, targets have {}",
                dict.nrows(),
                targets.nrows()
            )));
        }
        let r = targets.ncols();
        let weights = match (weighting, eigenvalues) {
            (Weighting::Uniform, _) => Array1::ones(r),
            (Weighting::Eigen, Some(ev)) if ev.len() == r => weighting.weights(ev),
            (Weighting::Eigen, _) => {
                return Err(Error::ShapeMismatch(format!("eigen weighting needs {r} eigenvalues")));
            }
        };
        Ok(Self {
            gram: gram(dict),
            cross: dict.t().dot(&targets),
            target_sq: targets.axis_iter(Axis(1)).map(|c| c.dot(&c)).collect(),
            weights,
        })
    }

    pub fn weights(&self) -> &Array1<f64> {
        &self.weights
    }

    /// `‖∇f(0)‖_∞`, the smallest uniform ℓ1 weight whose solution is zero.
    pub fn zero_solution_bound(&self) -> f64 {
        let mut m: f64 = 0.0;
        for ((_, c), v) in self.cross.indexed_iter() {
            m = m.max((2.0 * self.weights[c] * v).abs());
        }
        m
    }
}

/// `Uᵀ U` with columns processed in parallel.
fn gram(u: ArrayView2<f64>) -> Array2<f64> {
    let p = u.ncols();
    let cols: Vec<Array1<f64>> = (0..p).map(|j| u.column(j).to_owned()).collect();
    let upper: Vec<Vec<f64>> = (0..p).into_par_iter().map(|i| (i..p).map(|j| cols[i].dot(&cols[j])).collect()).collect();
    let mut g = Array2::zeros((p, p));
    for (i, row) in upper.iter().enumerate() {
        for (off, &v) in row.iter().enumerate() {
            g[[i, i + off]] = v;
            g[[i + off, i]] = v;
        }
    }
    g
}

impl Smooth for SparseCoding {
    fn shape(&self) -> (usize, usize) {
        self.cross.dim()
    }

    fn value(&self, z: &Array2<f64>) -> f64 {
        let gz = self.gram.dot(z);
        (0..z.ncols())
            .map(|c| {
                let zc = z.column(c);
                self.weights[c] * (self.target_sq[c] - 2.0 * zc.dot(&self.cross.column(c)) + zc.dot(&gz.column(c)))
            })
            .sum::<f64>()
            .max(0.0)
    }

    fn value_grad(&self, z: &Array2<f64>) -> (f64, Array2<f64>) {
        let gz = self.gram.dot(z);
        let mut grad = &gz - &self.cross;
        for (mut col, w) in grad.axis_iter_mut(Axis(1)).zip(self.weights.iter()) {
            col.mapv_inplace(|v| 2.0 * w * v);
        }
        let val = (0..z.ncols())
            .map(|c| {
                let zc = z.column(c);
                self.weights[c] * (self.target_sq[c] - 2.0 * zc.dot(&self.cross.column(c)) + zc.dot(&gz.column(c)))
            })
            .sum::<f64>()
            .max(0.0);
        (val, grad)
    }
}

/// `Σ_i ‖X_i - X_i W‖²_F + Σ_i α_i tr(Wᵀ L_i W)` written as
/// `tr(Wᵀ A W) - 2 tr(Wᵀ G) + tr(G)` with `G = Σ X_iᵀ X_i` (sample Gram) and
/// `A = G + Σ α_i L_i`.
#[derive(Debug, Clone)]
pub struct WeightObjective {
    pub(crate) a: Array2<f64>,
    pub(crate) g: Array2<f64>,
    trace_g: f64,
}

impl WeightObjective {
    pub fn new(a: Array2<f64>, g: Array2<f64>) -> Self {
        let trace_g = g.diag().sum();
        Self { a, g, trace_g }
    }
}

impl Smooth for WeightObjective {
    fn shape(&self) -> (usize, usize) {
        self.g.dim()
    }

    fn value(&self, w: &Array2<f64>) -> f64 {
        self.value_grad(w).0
    }

    fn value_grad(&self, w: &Array2<f64>) -> (f64, Array2<f64>) {
        let aw = self.a.dot(w);
        let quad = Zip::from(w).and(&aw).fold(0.0, |s, x, y| s + x * y);
        let lin = Zip::from(w).and(&self.g).fold(0.0, |s, x, y| s + x * y);
        let grad = (&aw - &self.g) * 2.0;
        (quad - 2.0 * lin + self.trace_g, grad)
    }
}

/// `tr(Yᵀ L Y)` for a symmetric `L`.
pub struct TraceObjective<'a> {
    pub l: &'a SymStore,
    pub cols: usize,
}

impl TraceObjective<'_> {
    fn apply(&self, y: &Array2<f64>) -> Array2<f64> {
        let n = self.l.order();
        let mut out = Array2::zeros((n, y.ncols()));
        for (c, col) in y.axis_iter(Axis(1)).enumerate() {
            let x = col.to_vec();
            let mut ly = vec![0.0; n];
            self.l.apply(&x, &mut ly);
            out.column_mut(c).assign(&ArrayView1::from(&ly));
        }
        out
    }
}

impl Smooth for TraceObjective<'_> {
    fn shape(&self) -> (usize, usize) {
        (self.l.order(), self.cols)
    }

    fn value(&self, y: &Array2<f64>) -> f64 {
        self.value_grad(y).0
    }

    fn value_grad(&self, y: &Array2<f64>) -> (f64, Array2<f64>) {
        let ly = self.apply(y);
        let v = Zip::from(y).and(&ly).fold(0.0, |s, a, b| s + a * b);
        (v, ly * 2.0)
    }
}

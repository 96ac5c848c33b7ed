//! ℓ1-penalized first-order optimization.
//!
//! [`apg_solve`] minimizes `f(Z) + α Σ_i c_i Σ_j |Z_ij|` for a smooth `f` with
//! Lipschitz gradient using FISTA with backtracking and a monotone restart:
//! a candidate that would raise the objective is discarded and the momentum
//! is reset, so the recorded objective never increases.

mod eq8;
mod objectives;
mod refine;
mod weight;

use ndarray::{Array1, Array2, Zip};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::soft_threshold;

pub use eq8::{sparse_embedding_eq8, Eq8Config, SparseEmbedding};
pub use objectives::{objective_eq6, SparseCoding, TraceObjective, WeightObjective, Weighting};
pub use refine::{alternate_refine, code_coordinates, reweight_graph, RefineConfig, RefineResult};
pub use weight::{sparse_weight_matrix, SparseWeightMatrix};

/// Consecutive rejected candidates tolerated before reporting divergence.
pub const DIVERGENCE_STREAK: usize = 10;

/// Smooth part of a composite objective over matrices of a fixed shape.
pub trait Smooth: Sync {
    fn shape(&self) -> (usize, usize);
    fn value(&self, z: &Array2<f64>) -> f64;
    /// `f(z)` and `∇f(z)`.
    fn value_grad(&self, z: &Array2<f64>) -> (f64, Array2<f64>);
}

/// `α Σ_i c_i Σ_j |Z_ij|`, with `c_i = 1` when no row weights are given.
#[derive(Debug, Clone, PartialEq)]
pub struct L1Penalty {
    pub alpha: f64,
    pub row_weights: Option<Array1<f64>>,
}

impl L1Penalty {
    pub fn uniform(alpha: f64) -> Self {
        Self { alpha, row_weights: None }
    }

    fn row_weight(&self, i: usize) -> f64 {
        self.row_weights.as_ref().map_or(1.0, |c| c[i])
    }

    pub fn value(&self, z: &Array2<f64>) -> f64 {
        if self.alpha == 0.0 {
            return 0.0;
        }
        let s: f64 = z.outer_iter().enumerate().map(|(i, r)| self.row_weight(i) * r.iter().map(|v| v.abs()).sum::<f64>()).sum();
        self.alpha * s
    }

    /// Proximal map with step `1/β`: entrywise soft-threshold at `α c_i / β`.
    pub fn prox(&self, z: &mut Array2<f64>, beta: f64) {
        if self.alpha == 0.0 {
            return;
        }
        for (i, mut row) in z.outer_iter_mut().enumerate() {
            let tau = self.alpha * self.row_weight(i) / beta;
            row.mapv_inplace(|v| soft_threshold(v, tau));
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ApgConfig {
    /// Stop when the relative objective change of an accepted step falls below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Backtracking growth factor for β.
    pub eta: f64,
    /// Initial β (inverse step size).
    pub beta0: f64,
}

impl Default for ApgConfig {
    fn default() -> Self {
        Self { tol: 1e-6, max_iter: 500, eta: 2.0, beta0: 1.0 }
    }
}

impl ApgConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol >= 0.0) || self.max_iter == 0 || !(self.eta > 1.0) || !(self.beta0 > 0.0) {
            return Err(Error::ConfigInvalid(format!(
                "APG needs tol >= 0, max_iter >= 1, eta > 1, beta0 > 0 (got {self:?})"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SparseCode {
    pub z: Array2<f64>,
    pub alpha: f64,
    /// Objective at the start point followed by one value per iteration.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Final inverse step size.
    pub beta: f64,
}

impl SparseCode {
    pub fn objective(&self) -> f64 {
        *self.objective_trace.last().expect("trace starts with the initial objective")
    }

    /// Fraction of entries with magnitude at most 1e-12.
    pub fn sparsity(&self) -> f64 {
        sparsity(&self.z)
    }
}

pub fn sparsity(z: &Array2<f64>) -> f64 {
    if z.is_empty() {
        return 1.0;
    }
    z.iter().filter(|v| v.abs() <= 1e-12).count() as f64 / z.len() as f64
}

/// `prox_{g/β}(y - ∇f(y)/β)`.
pub fn prox_step(penalty: &L1Penalty, y: &Array2<f64>, grad: &Array2<f64>, beta: f64) -> Array2<f64> {
    let mut u = Array2::zeros(y.raw_dim());
    Zip::from(&mut u).and(y).and(grad).for_each(|u, &y, &g| *u = y - g / beta);
    penalty.prox(&mut u, beta);
    u
}

fn inner(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    Zip::from(a).and(b).fold(0.0, |acc, x, y| acc + x * y)
}

pub fn apg_solve(problem: &dyn Smooth, penalty: &L1Penalty, z0: Array2<f64>, cfg: &ApgConfig) -> Result<SparseCode> {
    cfg.validate()?;
    if z0.dim() != problem.shape() {
        return Err(Error::ShapeMismatch(format!("start point {:?} vs problem {:?}", z0.dim(), problem.shape())));
    }
    if !(penalty.alpha >= 0.0) {
        return Err(Error::ConfigInvalid(format!("l1 weight must be nonnegative, got {}", penalty.alpha)));
    }
    let objective = |z: &Array2<f64>, fz: f64| fz + penalty.value(z);

    let mut x = z0;
    let mut x_prev;
    let mut f_x = objective(&x, problem.value(&x));
    if !f_x.is_finite() {
        return Err(Error::NonFinite("objective at the start point".into()));
    }
    let mut trace = vec![f_x];
    let mut y = x.clone();
    let mut t = 1.0f64;
    let mut beta = cfg.beta0;
    let mut rejected = 0usize;
    let mut restarted = false;
    let mut converged = false;
    let mut iterations = 0;

    for it in 1..=cfg.max_iter {
        iterations = it;
        let (fy, gy) = problem.value_grad(&y);
        let (u, fu) = loop {
            let u = prox_step(penalty, &y, &gy, beta);
            let fu = problem.value(&u);
            let d = &u - &y;
            let model = fy + inner(&gy, &d) + 0.5 * beta * inner(&d, &d);
            if fu <= model + 1e-14 * fy.abs().max(1.0) {
                break (u, fu);
            }
            beta *= cfg.eta;
            if !beta.is_finite() || beta > 1e300 {
                return Err(Error::NoConvergence { what: "APG backtracking", iterations: it });
            }
        };
        let f_u = objective(&u, fu);
        if !f_u.is_finite() {
            return Err(Error::NonFinite("APG objective".into()));
        }
        if f_u <= f_x {
            rejected = 0;
            restarted = false;
            let rel = (f_x - f_u).abs() / f_x.abs().max(f64::MIN_POSITIVE);
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            x_prev = std::mem::replace(&mut x, u);
            f_x = f_u;
            trace.push(f_x);
            let m = (t - 1.0) / t_next;
            y = x.clone();
            Zip::from(&mut y).and(&x).and(&x_prev).for_each(|y, &a, &b| *y = a + m * (a - b));
            t = t_next;
            if rel < cfg.tol {
                converged = true;
                break;
            }
        } else {
            // right after a restart y == x; a rounding-level increase together with a
            // vanishing gradient mapping β(u - x) means x is stationary
            let mapping = beta * inner(&(&u - &y), &(&u - &y)).sqrt();
            if restarted
                && f_u - f_x <= 1e-12 * f_x.abs().max(1.0)
                && mapping <= 1e-6 * inner(&gy, &gy).sqrt().max(1.0)
            {
                trace.push(f_x);
                converged = true;
                break;
            }
            restarted = true;
            rejected += 1;
            if rejected >= DIVERGENCE_STREAK {
                return Err(Error::DivergenceDetected(rejected));
            }
            trace.push(f_x);
            y = x.clone();
            t = 1.0;
        }
    }
    Ok(SparseCode { z: x, alpha: penalty.alpha, objective_trace: trace, iterations, converged, beta })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::linalg::{solve_spd, SymMatrix};
    use ndarray::Array1;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_matrix(r: usize, c: usize, rng: &mut ChaCha8Rng) -> Array2<f64> {
        Array2::from_shape_fn((r, c), |_| rng.gen_range(-1.0..1.0))
    }

    /// Cyclic coordinate descent for `‖b - A z‖² + α‖z‖₁`, run to a tight tolerance.
    pub(crate) fn lasso_cd(a: &Array2<f64>, b: &Array1<f64>, alpha: f64) -> Array1<f64> {
        let p = a.ncols();
        let mut z = Array1::<f64>::zeros(p);
        let mut r = b.clone();
        let col_sq: Vec<f64> = (0..p).map(|j| a.column(j).dot(&a.column(j))).collect();
        for _ in 0..100_000 {
            let mut delta: f64 = 0.0;
            for j in 0..p {
                if col_sq[j] == 0.0 {
                    continue;
                }
                let rho = a.column(j).dot(&r) + col_sq[j] * z[j];
                let new = soft_threshold(rho, alpha / 2.0) / col_sq[j];
                let step = new - z[j];
                if step != 0.0 {
                    r.scaled_add(-step, &a.column(j));
                    z[j] = new;
                    delta = delta.max(step.abs());
                }
            }
            if delta < 1e-14 {
                break;
            }
        }
        z
    }

    fn lasso_objective(a: &Array2<f64>, b: &Array1<f64>, z: &Array1<f64>, alpha: f64) -> f64 {
        let r = b - &a.dot(z);
        r.dot(&r) + alpha * z.iter().map(|v| v.abs()).sum::<f64>()
    }

    #[test]
    fn unpenalized_quadratic_matches_normal_equations() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_matrix(20, 6, &mut rng);
        let b = random_matrix(20, 2, &mut rng);
        let prob = SparseCoding::new(a.view(), b.view(), Weighting::Uniform, None).unwrap();
        let cfg = ApgConfig { tol: 1e-14, max_iter: 5000, ..Default::default() };
        let code = apg_solve(&prob, &L1Penalty::uniform(0.0), Array2::zeros((6, 2)), &cfg).unwrap();
        let ata = SymMatrix::from_upper(a.t().dot(&a)).unwrap();
        let want = solve_spd(&ata, a.t().dot(&b).view()).unwrap();
        assert!((&code.z - &want).iter().all(|d| d.abs() < 1e-6), "{:?}", &code.z - &want);
    }

    #[test]
    fn alpha_above_zero_bound_gives_zero_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_matrix(15, 8, &mut rng);
        let b = random_matrix(15, 1, &mut rng);
        let prob = SparseCoding::new(a.view(), b.view(), Weighting::Uniform, None).unwrap();
        let (_, g0) = prob.value_grad(&Array2::zeros((8, 1)));
        let bound = g0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let code = apg_solve(&prob, &L1Penalty::uniform(bound), Array2::zeros((8, 1)), &ApgConfig::default()).unwrap();
        assert!(code.z.iter().all(|v| *v == 0.0));
        let code = apg_solve(&prob, &L1Penalty::uniform(0.9 * bound), Array2::zeros((8, 1)), &ApgConfig::default()).unwrap();
        assert!(code.z.iter().any(|v| *v != 0.0));
    }

    #[test]
    fn lasso_matches_coordinate_descent() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let a = random_matrix(20, 10, &mut rng);
            let b: Array1<f64> = random_matrix(20, 1, &mut rng).column(0).to_owned();
            let alpha = rng.gen_range(0.05..2.0);
            let prob = SparseCoding::new(a.view(), b.view().insert_axis(ndarray::Axis(1)), Weighting::Uniform, None).unwrap();
            // tightened so the solver error sits well below the comparison tolerance
            let cfg = ApgConfig { tol: 1e-12, max_iter: 5000, ..Default::default() };
            let code = apg_solve(&prob, &L1Penalty::uniform(alpha), Array2::zeros((10, 1)), &cfg).unwrap();
            let z_cd = lasso_cd(&a, &b, alpha);
            let gap = code.objective() - lasso_objective(&a, &b, &z_cd, alpha);
            assert!(gap <= 1e-6, "gap {gap}");
        }
    }

    #[test]
    fn trace_is_monotone_and_one_step_is_a_prox_step() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random_matrix(12, 5, &mut rng);
        let b = random_matrix(12, 3, &mut rng);
        let prob = SparseCoding::new(a.view(), b.view(), Weighting::Uniform, None).unwrap();
        let pen = L1Penalty::uniform(0.3);
        let code = apg_solve(&prob, &pen, Array2::zeros((5, 3)), &ApgConfig::default()).unwrap();
        assert!(code.objective_trace.windows(2).all(|w| w[1] <= w[0]));

        // β far above the Lipschitz constant: the first step needs no backtracking
        let beta = 1e4;
        let z0 = random_matrix(5, 3, &mut rng);
        let cfg = ApgConfig { max_iter: 1, beta0: beta, ..Default::default() };
        let one = apg_solve(&prob, &pen, z0.clone(), &cfg).unwrap();
        let grad = (a.t().dot(&(&b - &a.dot(&z0)))) * -2.0;
        let mut naive = Array2::zeros((5, 3));
        for i in 0..5 {
            for j in 0..3 {
                let v = z0[[i, j]] - grad[[i, j]] / beta;
                naive[[i, j]] = v.signum() * (v.abs() - 0.3 / beta).max(0.0);
            }
        }
        assert!((&one.z - &naive).iter().all(|d| d.abs() < 1e-12));
    }

    #[test]
    fn accelerated_rate_sanity() {
        // ill-conditioned least squares so the gap stays visible for many steps
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut a = random_matrix(40, 30, &mut rng);
        for j in 0..30 {
            let s = 10f64.powf(-2.0 * j as f64 / 29.0);
            a.column_mut(j).mapv_inplace(|v| v * s);
        }
        let b = random_matrix(40, 1, &mut rng);
        let prob = SparseCoding::new(a.view(), b.view(), Weighting::Uniform, None).unwrap();
        let pen = L1Penalty::uniform(1e-3);
        let run = |iters: usize, tol: f64| {
            let cfg = ApgConfig { tol, max_iter: iters, ..Default::default() };
            apg_solve(&prob, &pen, Array2::zeros((30, 1)), &cfg).unwrap().objective()
        };
        let best = run(200_000, 0.0);
        let g50 = run(50, 0.0) - best;
        let g200 = run(200, 0.0) - best;
        assert!(g50 > 0.0);
        assert!(g200 <= 2.0 * g50 / 4.0, "gap(50) = {g50:e}, gap(200) = {g200:e}");
    }

    #[test]
    fn rejects_bad_config_and_shapes() {
        let a = Array2::<f64>::eye(3);
        let prob = SparseCoding::new(a.view(), a.view(), Weighting::Uniform, None).unwrap();
        let pen = L1Penalty::uniform(0.1);
        assert!(matches!(apg_solve(&prob, &pen, Array2::zeros((2, 3)), &ApgConfig::default()), Err(Error::ShapeMismatch(_))));
        let bad = ApgConfig { eta: 1.0, ..Default::default() };
        assert!(matches!(apg_solve(&prob, &pen, Array2::zeros((3, 3)), &bad), Err(Error::ConfigInvalid(_))));
        assert!(matches!(
            apg_solve(&prob, &L1Penalty::uniform(-1.0), Array2::zeros((3, 3)), &ApgConfig::default()),
            Err(Error::ConfigInvalid(_))
        ));
    }

    /// A gradient that points the wrong way; every candidate is rejected.
    struct Broken;

    impl Smooth for Broken {
        fn shape(&self) -> (usize, usize) {
            (1, 1)
        }
        fn value(&self, z: &Array2<f64>) -> f64 {
            z[[0, 0]].powi(2)
        }
        fn value_grad(&self, z: &Array2<f64>) -> (f64, Array2<f64>) {
            (self.value(z), z.mapv(|v| -2.0 * v - 1.0))
        }
    }

    #[test]
    fn wrong_gradient_is_reported() {
        let err = apg_solve(&Broken, &L1Penalty::uniform(0.0), Array2::from_elem((1, 1), 1.0), &ApgConfig::default());
        assert!(matches!(err, Err(Error::DivergenceDetected(_)) | Err(Error::NoConvergence { .. })), "{err:?}");
    }
}

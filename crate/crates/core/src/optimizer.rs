//! Projected gradient ascent on the log-likelihood under the embedding
//! constraints: centered columns, `BᵀA = 0`, row norms capped at `C`, and
//! `‖A‖_F ≤ κ √a_n ‖B‖_F`.

use nalgebra::{DMatrix, SymmetricEigen, SVD};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::likelihood::{LikelihoodGradient, Pass};
use crate::model::{two_to_inf, EmbeddingState, Intercepts, Link, SignedNetwork};

/// Standard deviation of the random initial embeddings.
const INIT_SD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Init {
    Random,
    #[default]
    Spectral,
}

impl std::str::FromStr for Init {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "random" => Ok(Init::Random),
            "spectral" => Ok(Init::Spectral),
            other => Err(Error::InvalidConfig(format!("unknown init `{other}`"))),
        }
    }
}

impl std::fmt::Display for Init {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Init::Random => "random",
            Init::Spectral => "spectral",
        })
    }
}

/// Settings for [`fit`]. Step sizes left as `None` default to `1/n` for the
/// embeddings and `0.5/n²` for the intercepts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub k1: usize,
    pub k2: usize,
    /// Row-norm cap `C`.
    pub c: f64,
    pub kappa: f64,
    /// Anomaly rate.
    pub a_n: f64,
    pub xi1: Option<f64>,
    pub xi2: Option<f64>,
    pub xi3: Option<f64>,
    pub xi4: Option<f64>,
    pub max_iter: usize,
    /// Relative objective change below which the fit stops.
    pub tol: f64,
    pub learn_intercepts: bool,
    pub seed: u64,
    pub init: Init,
    /// Fixed intercepts, or the starting point when they are learned.
    pub intercepts: Intercepts,
    pub max_halvings: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            k1: 3,
            k2: 3,
            c: 2.0,
            kappa: 1.0,
            a_n: 0.1,
            xi1: None,
            xi2: None,
            xi3: None,
            xi4: None,
            max_iter: 2000,
            tol: 1e-6,
            learn_intercepts: false,
            seed: 0,
            init: Init::default(),
            intercepts: Intercepts::default(),
            max_halvings: 20,
        }
    }
}

impl FitConfig {
    /// `K1 = K2 = m - 1`, everything else default.
    pub fn for_communities(m: usize) -> Self {
        FitConfig::default().with_communities(m)
    }

    /// This configuration with `K1 = K2 = m - 1`.
    pub fn with_communities(&self, m: usize) -> Self {
        let k = m.saturating_sub(1).max(1);
        FitConfig {
            k1: k,
            k2: k,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.k1 == 0 {
            return bad("k1 must be at least 1".into());
        }
        if !(self.c > 0.0) {
            return bad(format!("C must be positive, got {}", self.c));
        }
        if !(self.kappa > 0.0) {
            return bad(format!("kappa must be positive, got {}", self.kappa));
        }
        if !(0.0..=1.0).contains(&self.a_n) {
            return bad(format!("a_n must lie in [0, 1], got {}", self.a_n));
        }
        if !(self.tol > 0.0) {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1".into());
        }
        for (name, xi) in [("xi1", self.xi1), ("xi2", self.xi2), ("xi3", self.xi3), ("xi4", self.xi4)] {
            if let Some(v) = xi {
                if !(v > 0.0) {
                    return bad(format!("{name} must be positive, got {v}"));
                }
            }
        }
        if self.learn_intercepts {
            self.intercepts.validate()?;
        } else if self.intercepts.d1 > self.intercepts.d0 {
            return Err(Error::InvalidIntercepts {
                d0: self.intercepts.d0,
                d1: self.intercepts.d1,
            });
        }
        Ok(())
    }

    /// Resolved step sizes `[ξ1, ξ2, ξ3, ξ4]` for a network on `n` nodes.
    pub fn steps(&self, n: usize) -> [f64; 4] {
        let n = n.max(1) as f64;
        [
            self.xi1.unwrap_or(1.0 / n),
            self.xi2.unwrap_or(1.0 / n),
            self.xi3.unwrap_or(0.5 / (n * n)),
            self.xi4.unwrap_or(0.5 / (n * n)),
        ]
    }

    fn anomaly_cap(&self, b: &DMatrix<f64>) -> f64 {
        self.kappa * self.a_n.sqrt() * b.norm()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub state: EmbeddingState,
    /// Negative log-likelihood after initialization and after each iteration.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl FitResult {
    pub fn final_objective(&self) -> f64 {
        *self.objective_trace.last().expect("trace holds the initial value")
    }
}

/// Rescales `x` onto the Frobenius ball of radius `c` (`c ≥ 0`).
pub fn project_frobenius(x: &DMatrix<f64>, c: f64) -> DMatrix<f64> {
    let norm = x.norm();
    if c <= 0.0 {
        return DMatrix::zeros(x.nrows(), x.ncols());
    }
    if norm <= c {
        x.clone()
    } else {
        x * (c / norm)
    }
}

/// Rescales the whole of `x` so its largest row norm is at most `c`.
pub fn project_row_norm(x: &DMatrix<f64>, c: f64) -> DMatrix<f64> {
    let norm = two_to_inf(x);
    if norm <= c {
        x.clone()
    } else {
        x * (c / norm)
    }
}

/// `J_n X` with `J_n = I - 11ᵀ/n`: subtracts every column mean.
pub fn center_columns(x: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = x.clone();
    let n = x.nrows();
    if n == 0 {
        return out;
    }
    for mut col in out.column_iter_mut() {
        let mean = col.sum() / n as f64;
        col.add_scalar_mut(-mean);
    }
    out
}

/// `min(max(x, lo), hi)`.
pub fn clamp_interval(x: f64, lo: f64, hi: f64) -> Result<f64> {
    if lo > hi {
        return Err(Error::InvalidInterval { lo, hi });
    }
    Ok(x.max(lo).min(hi))
}

/// Orthonormal basis of the numerical column space of `basis`. Directions
/// with singular value below `max(n, r)·ε·σ_max` are dropped.
pub fn column_space(basis: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, r) = basis.shape();
    if n == 0 || r == 0 {
        return DMatrix::zeros(n, 0);
    }
    let svd = SVD::new(basis.clone(), true, false);
    let u = svd.u.expect("left singular vectors requested");
    let sigma_max = svd.singular_values.max();
    let tol = (n.max(r) as f64) * f64::EPSILON * sigma_max;
    let keep: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > tol && s > 0.0)
        .map(|(i, _)| i)
        .collect();
    if keep.len() < r {
        log::debug!("complement projection: basis rank {} < {} columns", keep.len(), r);
    }
    u.select_columns(keep.iter())
}

/// Numerical rank of `basis`, as used by [`project_complement`].
pub fn numerical_rank(basis: &DMatrix<f64>) -> usize {
    column_space(basis).ncols()
}

/// `(I - P)X` where `P` projects onto the column space of `basis`.
/// Rank-deficient bases are handled by dropping null directions, which is
/// the pseudo-inverse form of the projector.
pub fn project_complement(basis: &DMatrix<f64>, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if basis.nrows() != x.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "basis has {} rows but X has {}",
            basis.nrows(),
            x.nrows()
        )));
    }
    let q = column_space(basis);
    Ok(complement_with(&q, x))
}

fn complement_with(q: &DMatrix<f64>, x: &DMatrix<f64>) -> DMatrix<f64> {
    if q.ncols() == 0 {
        return x.clone();
    }
    x - q * (q.transpose() * x)
}

/// `[B, 1_n]`
fn with_ones(b: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, k) = b.shape();
    let mut out = DMatrix::from_element(n, k + 1, 1.0);
    out.view_mut((0, 0), (n, k)).copy_from(b);
    out
}

/// Maps a raw anomaly matrix into the feasible set for balance matrix `b`:
/// orthogonal complement of `[B, 1]`, then the Frobenius cap, then row norms.
fn constrain_anomaly(q: &DMatrix<f64>, raw: &DMatrix<f64>, cap: f64, c: f64) -> DMatrix<f64> {
    project_row_norm(&project_frobenius(&complement_with(q, raw), cap), c)
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, n: usize, k: usize, sd: f64) -> DMatrix<f64> {
    let normal = Normal::new(0.0, sd).expect("finite positive sd");
    // row-major draw order keeps the stream independent of storage layout
    let mut data = Vec::with_capacity(n * k);
    for _ in 0..n * k {
        data.push(normal.sample(rng));
    }
    DMatrix::from_row_slice(n, k, &data)
}

/// Top-`k` eigenpairs (largest algebraic eigenvalue first) of a symmetric matrix.
pub(crate) fn top_eigen(sym: DMatrix<f64>, k: usize) -> (Vec<f64>, DMatrix<f64>) {
    let n = sym.nrows();
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    order.truncate(k);
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = eig.eigenvectors.select_columns(order.iter());
    (values, vectors)
}

/// Builds a feasible starting state.
///
/// `Random` draws i.i.d. `N(0, 0.1²)` entries. `Spectral` takes the leading
/// eigenvectors of the double-centered adjacency `J Y J`, weighted by the
/// square roots of their eigenvalues, and picks the overall scale by a
/// golden-section search on the likelihood within the row-norm cap. In both
/// cases `A` starts random and is projected into the feasible set.
pub fn init_state(y: &SignedNetwork, config: &FitConfig, link: Link) -> Result<EmbeddingState> {
    config.validate()?;
    let n = y.n();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let b = match config.init {
        Init::Random => {
            let raw = gaussian_matrix(&mut rng, n, config.k1, INIT_SD);
            project_row_norm(&center_columns(&raw), config.c)
        }
        Init::Spectral => spectral_balance(y, config, link)?,
    };

    let raw_a = gaussian_matrix(&mut rng, n, config.k2, INIT_SD);
    let q = column_space(&with_ones(&b));
    let a = constrain_anomaly(&q, &center_columns(&raw_a), config.anomaly_cap(&b), config.c);
    EmbeddingState::new(b, a, config.intercepts)
}

fn spectral_balance(y: &SignedNetwork, config: &FitConfig, link: Link) -> Result<DMatrix<f64>> {
    let n = y.n();
    let k = config.k1.min(n);
    let jyj = center_columns(&center_columns(&y.to_matrix()).transpose());
    let (values, vectors) = top_eigen(jyj, k);
    let mut shape = DMatrix::zeros(n, config.k1);
    for (col, &lambda) in values.iter().enumerate() {
        let w = lambda.max(0.0).sqrt();
        shape.set_column(col, &(vectors.column(col) * w));
    }
    let shape = center_columns(&shape);
    let top = two_to_inf(&shape);
    if top == 0.0 {
        return Ok(shape);
    }
    let shape = shape / top;

    let zero_a = DMatrix::zeros(n, config.k2);
    let objective = |s: f64| {
        Pass::from_parts(y, &(&shape * s), &zero_a, config.intercepts, link, false)
            .run()
            .0
    };
    let s = golden_section(objective, 0.0, config.c, 40);
    Ok(shape * s)
}

fn golden_section<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    let ratio = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        x1
    } else {
        x2
    }
}

struct Objective<'a> {
    y: &'a SignedNetwork,
    link: Link,
}

impl Objective<'_> {
    #[allow(dead_code)]
    fn value(&self, b: &DMatrix<f64>, a: &DMatrix<f64>, d: Intercepts) -> f64 {
        Pass::from_parts(self.y, b, a, d, self.link, false).run().0
    }

    fn value_grad(&self, b: &DMatrix<f64>, a: &DMatrix<f64>, d: Intercepts) -> (f64, LikelihoodGradient) {
        let (v, g) = Pass::from_parts(self.y, b, a, d, self.link, true).run();
        (v, g.expect("gradient requested"))
    }
}

/// Fits the embedding by alternating projected gradient steps on `B`, `A`
/// and (optionally) the intercepts.
///
/// Each block step starts from its default step size and halves it, up to
/// `max_halvings` times, until the objective does not increase. A `B` trial
/// is judged only after the `A` step it forces (the orthogonality constraint
/// couples the blocks), so the objective trace never increases.
pub fn fit(y: &SignedNetwork, config: &FitConfig, link: Link) -> Result<FitResult> {
    config.validate()?;
    if y.n() < 2 {
        return Err(Error::InvalidNetwork(format!("need at least 2 nodes, got {}", y.n())));
    }
    let init = init_state(y, config, link)?;
    fit_from(y, config, link, init)
}

/// [`fit`] starting from a given state instead of [`init_state`]. The state
/// should already be feasible; only its dimensions are checked.
pub fn fit_from(y: &SignedNetwork, config: &FitConfig, link: Link, init: EmbeddingState) -> Result<FitResult> {
    config.validate()?;
    init.check_dims()?;
    let n = y.n();
    if init.n() != n || init.k1() != config.k1 || init.k2() != config.k2 {
        return Err(Error::DimensionMismatch(format!(
            "initial state is {}x({}+{}), expected {}x({}+{})",
            init.n(),
            init.k1(),
            init.k2(),
            n,
            config.k1,
            config.k2
        )));
    }
    let [xi1, xi2, xi3, xi4] = config.steps(n);
    let obj = Objective { y, link };
    let (mut b, mut a, mut d) = (init.b, init.a, init.d);
    let (mut current, mut grad) = obj.value_grad(&b, &a, d);
    if !current.is_finite() {
        return Err(Error::Divergence { iteration: 0 });
    }
    let mut trace = vec![current];
    let mut converged = false;
    let mut iterations = 0;
    let anomalies_free = config.k2 > 0 && config.a_n > 0.0;

    for iter in 1..=config.max_iter {
        iterations = iter;
        let previous = current;

        // balance step, each trial judged after the anomaly step it forces;
        // the anomaly step halves first, the balance step only when that fails
        let mut accepted = None;
        let mut step_b = xi1;
        'balance: for _ in 0..=config.max_halvings {
            let cand_b = project_row_norm(&center_columns(&(&b + &grad.g_b * step_b)), config.c);
            let q = column_space(&with_ones(&cand_b));
            let cap = config.anomaly_cap(&cand_b);
            if anomalies_free {
                // gradient taken at (B_new, A_old)
                let g_a = obj.value_grad(&cand_b, &a, d).1.g_a;
                let mut step_a = xi2;
                for _ in 0..=config.max_halvings {
                    let cand_a = constrain_anomaly(&q, &(&a + &g_a * step_a), cap, config.c);
                    let (v, g) = obj.value_grad(&cand_b, &cand_a, d);
                    if !v.is_finite() {
                        return Err(Error::Divergence { iteration: iter });
                    }
                    if v <= current {
                        accepted = Some((cand_b, cand_a, v, g));
                        break 'balance;
                    }
                    step_a *= 0.5;
                }
            } else {
                let cand_a = constrain_anomaly(&q, &a, cap, config.c);
                let (v, g) = obj.value_grad(&cand_b, &cand_a, d);
                if !v.is_finite() {
                    return Err(Error::Divergence { iteration: iter });
                }
                if v <= current {
                    accepted = Some((cand_b, cand_a, v, g));
                    break;
                }
            }
            step_b *= 0.5;
        }
        if let Some((cand_b, cand_a, v, g)) = accepted {
            b = cand_b;
            a = cand_a;
            current = v;
            grad = g;
        }

        if config.learn_intercepts {
            let box_ = d;
            let mut step = xi3;
            for _ in 0..=config.max_halvings {
                let mut cand = d;
                cand.d1 = clamp_interval(d.d1 + step * grad.g_d1, box_.c1, d.d0 - box_.delta)?;
                let (v, g) = obj.value_grad(&b, &a, cand);
                if v <= current {
                    d = cand;
                    current = v;
                    grad = g;
                    break;
                }
                step *= 0.5;
            }
            let mut step = xi4;
            for _ in 0..=config.max_halvings {
                let mut cand = d;
                cand.d0 = clamp_interval(d.d0 + step * grad.g_d0, d.d1 + box_.delta, box_.c2)?;
                let (v, g) = obj.value_grad(&b, &a, cand);
                if v <= current {
                    d = cand;
                    current = v;
                    grad = g;
                    break;
                }
                step *= 0.5;
            }
        }

        if !current.is_finite() {
            return Err(Error::Divergence { iteration: iter });
        }
        trace.push(current);
        if ((previous - current) / current.abs().max(f64::MIN_POSITIVE)).abs() < config.tol {
            converged = true;
            break;
        }
    }

    Ok(FitResult {
        state: EmbeddingState::new(b, a, d)?,
        objective_trace: trace,
        iterations,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthgen::gen_example1;
    use proptest::prelude::*;

    fn random_matrix(seed: u64, n: usize, k: usize, sd: f64) -> DMatrix<f64> {
        gaussian_matrix(&mut ChaCha8Rng::seed_from_u64(seed), n, k, sd)
    }

    #[test]
    fn frobenius_cases() {
        let x = DMatrix::from_row_slice(2, 2, &[3.0, 0.0, 0.0, 4.0]);
        assert_eq!(project_frobenius(&x, 10.0), x);
        let p = project_frobenius(&x, 2.5);
        assert!((p.norm() - 2.5).abs() < 1e-12);
        assert_eq!(project_frobenius(&p, 2.5), p);
        assert_eq!(project_frobenius(&x, 0.0), DMatrix::zeros(2, 2));
    }

    #[test]
    fn row_norm_scales_whole_matrix() {
        let x = DMatrix::from_row_slice(2, 2, &[3.0, 0.0, 0.0, 0.5]);
        let p = project_row_norm(&x, 1.0);
        assert!((p[(0, 0)] - 1.0).abs() < 1e-15);
        assert!((p[(1, 1)] - 0.5 / 3.0).abs() < 1e-15);
        let small = DMatrix::from_row_slice(2, 2, &[0.1, 0.0, 0.0, 0.2]);
        assert_eq!(project_row_norm(&small, 1.0), small);
    }

    #[test]
    fn centering_cases() {
        let constant = DMatrix::from_element(5, 2, 3.5);
        assert!(center_columns(&constant).amax() < 1e-15);
        let x = random_matrix(1, 7, 3, 1.0);
        let cx = center_columns(&x);
        assert!((center_columns(&cx) - &cx).amax() < 1e-14);
        let j = DMatrix::identity(7, 7) - DMatrix::from_element(7, 7, 1.0 / 7.0);
        assert!((&j * &x - &cx).amax() < 1e-13);
        for col in cx.column_iter() {
            assert!(col.sum().abs() < 1e-13);
        }
    }

    #[test]
    fn clamp_cases() {
        assert_eq!(clamp_interval(0.5, 0.0, 1.0).unwrap(), 0.5);
        assert_eq!(clamp_interval(-2.0, 0.0, 1.0).unwrap(), 0.0);
        assert_eq!(clamp_interval(7.0, 0.0, 1.0).unwrap(), 1.0);
        assert!(matches!(clamp_interval(0.0, 1.0, 0.0), Err(Error::InvalidInterval { .. })));
    }

    #[test]
    fn complement_matches_normal_equations() {
        let basis = random_matrix(2, 20, 4, 1.0);
        let x = random_matrix(3, 20, 3, 1.0);
        // residual of least squares via (BᵀB)⁻¹BᵀX, independent of the SVD path
        let gram = basis.transpose() * &basis;
        let coef = gram.cholesky().unwrap().solve(&(basis.transpose() * &x));
        let oracle = &x - &basis * coef;
        let got = project_complement(&basis, &x).unwrap();
        assert!((&got - &oracle).amax() < 1e-10);
        assert!((basis.transpose() * &got).amax() < 1e-10);
    }

    #[test]
    fn complement_identity_and_annihilation() {
        let basis = random_matrix(4, 15, 3, 1.0);
        assert!(project_complement(&basis, &basis).unwrap().amax() < 1e-12);
        let x = project_complement(&basis, &random_matrix(5, 15, 2, 1.0)).unwrap();
        assert!((project_complement(&basis, &x).unwrap() - &x).amax() < 1e-12);
    }

    #[test]
    fn complement_rank_deficient_basis() {
        let mut basis = random_matrix(6, 12, 3, 1.0);
        basis.set_column(2, &DVectorZero::zeros(12));
        assert_eq!(numerical_rank(&basis), 2);
        let out = project_complement(&basis, &random_matrix(7, 12, 2, 1.0)).unwrap();
        assert!((basis.transpose() * out).amax() < 1e-10);
        assert!(project_complement(&basis, &DMatrix::zeros(5, 1)).is_err());
    }

    type DVectorZero = nalgebra::DVector<f64>;

    fn small_network(n: usize, a_n: f64, seed: u64) -> SignedNetwork {
        gen_example1(n, a_n, seed, Intercepts::default()).unwrap().0
    }

    #[test]
    fn init_is_deterministic_and_feasible() {
        let y = small_network(40, 0.1, 3);
        for init in [Init::Random, Init::Spectral] {
            let cfg = FitConfig {
                init,
                seed: 11,
                ..FitConfig::default()
            };
            let s1 = init_state(&y, &cfg, Link::Logit).unwrap();
            let s2 = init_state(&y, &cfg, Link::Logit).unwrap();
            assert_eq!(s1, s2);
            let r = s1.constraint_report(cfg.c, cfg.kappa, cfg.a_n);
            assert!(r.col_sum_b < 1e-10 && r.col_sum_a < 1e-10 && r.cross < 1e-10, "{r:?}");
            assert!(r.frob_a <= r.frob_cap + 1e-12);
            assert!(r.row_norm_b <= cfg.c + 1e-12 && r.row_norm_a <= cfg.c + 1e-12);
        }
    }

    #[test]
    fn zero_anomaly_rate_forces_zero_a() {
        let y = small_network(40, 0.0, 1);
        let cfg = FitConfig {
            a_n: 0.0,
            max_iter: 50,
            ..FitConfig::default()
        };
        let res = fit(&y, &cfg, Link::Logit).unwrap();
        assert!(res.state.a.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn example_fit_converges_monotonically() {
        let y = small_network(60, 0.1, 5);
        let cfg = FitConfig::default();
        let res = fit(&y, &cfg, Link::Logit).unwrap();
        assert!(res.converged);
        assert!(res.iterations <= 2000);
        for w in res.objective_trace.windows(2) {
            assert!(w[1] <= w[0], "trace increased: {} -> {}", w[0], w[1]);
        }
        let r = res.state.constraint_report(cfg.c, cfg.kappa, cfg.a_n);
        assert!(r.satisfied(1e-8, 1e-6 * 60.0), "{r:?}");
    }

    #[test]
    fn learned_intercepts_stay_in_box() {
        let y = small_network(50, 0.1, 8);
        let cfg = FitConfig {
            learn_intercepts: true,
            xi3: Some(1e-2),
            xi4: Some(1e-2),
            max_iter: 200,
            ..FitConfig::default()
        };
        let res = fit(&y, &cfg, Link::Probit).unwrap();
        let d = res.state.d;
        assert!(d.d1 + d.delta <= d.d0);
        assert!(d.c1 <= d.d1 && d.d0 <= d.c2);
        assert!(d != Intercepts::default(), "intercepts never moved");
        assert!(res.final_objective() <= res.objective_trace[0]);
    }

    #[test]
    fn empty_network_fits() {
        let y = SignedNetwork::empty(12);
        let res = fit(&y, &FitConfig::default(), Link::Logit).unwrap();
        assert!(res.final_objective().is_finite());
    }

    #[test]
    fn fit_from_checks_dimensions() {
        let y = small_network(20, 0.1, 2);
        let cfg = FitConfig::default();
        let other = FitConfig { k1: 2, ..cfg.clone() };
        let init = init_state(&y, &other, Link::Logit).unwrap();
        assert!(matches!(fit_from(&y, &cfg, Link::Logit, init), Err(Error::DimensionMismatch(_))));
        assert!(fit(&SignedNetwork::empty(1), &cfg, Link::Logit).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(FitConfig::default().validate().is_ok());
        let bad = [
            FitConfig { c: 0.0, ..FitConfig::default() },
            FitConfig { kappa: -1.0, ..FitConfig::default() },
            FitConfig { a_n: 1.5, ..FitConfig::default() },
            FitConfig { tol: 0.0, ..FitConfig::default() },
            FitConfig { max_iter: 0, ..FitConfig::default() },
            FitConfig { xi1: Some(0.0), ..FitConfig::default() },
            FitConfig { intercepts: Intercepts::new(-1.0, 1.0), ..FitConfig::default() },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
        assert_eq!(FitConfig::default().steps(10), [0.1, 0.1, 0.005, 0.005]);
    }

    fn matrix_strategy() -> impl Strategy<Value = DMatrix<f64>> {
        (1usize..8, 1usize..5).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-10.0f64..10.0, r * c).prop_map(move |v| DMatrix::from_row_slice(r, c, &v))
        })
    }

    proptest! {
        #[test]
        fn frobenius_projection_properties(x in matrix_strategy(), c in 0.01f64..20.0) {
            let p = project_frobenius(&x, c);
            prop_assert!(p.norm() <= c * (1.0 + 1e-12));
            prop_assert!(p.norm() <= x.norm() * (1.0 + 1e-12));
            prop_assert!((project_frobenius(&p, c) - &p).amax() <= 1e-12 * (1.0 + p.amax()));
        }

        #[test]
        fn row_norm_projection_properties(x in matrix_strategy(), c in 0.01f64..20.0) {
            let p = project_row_norm(&x, c);
            prop_assert!(two_to_inf(&p) <= c * (1.0 + 1e-12));
            prop_assert!(two_to_inf(&p) <= two_to_inf(&x) * (1.0 + 1e-12));
            prop_assert!((project_row_norm(&p, c) - &p).amax() <= 1e-12 * (1.0 + p.amax()));
        }

        #[test]
        fn complement_is_orthogonal_and_idempotent(seed in any::<u64>(), n in 5usize..20, r in 1usize..4, k in 1usize..4) {
            let basis = random_matrix(seed, n, r, 1.0);
            let x = random_matrix(seed.wrapping_add(1), n, k, 1.0);
            let p = project_complement(&basis, &x).unwrap();
            prop_assert!((basis.transpose() * &p).amax() < 1e-10);
            prop_assert!((project_complement(&basis, &p).unwrap() - &p).amax() < 1e-10);
        }
    }
}

//! Ordinal edge model for signed networks and its latent parameterization.
//!
//! An edge `y_ij ∈ {-1, 0, 1}` is drawn from a cumulative model
//! `Pr(y_ij ≥ t | m_ij) = f(d_t + m_ij)` for `t ∈ {0, 1}`, where `f` is an
//! increasing link and `m_ij = -‖β_i - β_j‖² + α_iᵀα_j` splits into a
//! balance part `L` (negative squared distances) and an anomaly part
//! `S = AAᵀ`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lower clamp applied to every category probability before taking logs.
pub const PROB_FLOOR: f64 = 1e-12;

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Symmetric adjacency with entries in {-1, 0, +1} and an empty diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedNetwork {
    n: usize,
    entries: Vec<i8>,
}

impl SignedNetwork {
    /// Network on `n` nodes without any edges.
    pub fn empty(n: usize) -> Self {
        SignedNetwork {
            n,
            entries: vec![0; n * n],
        }
    }

    /// Builds a network from `(i, j, sign)` records. Each unordered pair may
    /// appear at most once; the sign is mirrored to `(j, i)`.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, i8)>,
    {
        let mut net = SignedNetwork::empty(n);
        for (i, j, sign) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidNetwork(format!(
                    "edge ({i}, {j}) out of range for {n} nodes"
                )));
            }
            if i == j {
                return Err(Error::InvalidNetwork(format!("self-edge on node {i}")));
            }
            if !matches!(sign, -1..=1) {
                return Err(Error::InvalidNetwork(format!(
                    "sign {sign} on ({i}, {j}) not in {{-1, 0, 1}}"
                )));
            }
            if net.get(i, j) != 0 {
                return Err(Error::InvalidNetwork(format!("duplicate pair ({i}, {j})")));
            }
            net.set(i, j, sign);
        }
        Ok(net)
    }

    /// Validates a dense row-major `n × n` sign matrix.
    pub fn from_dense(n: usize, entries: Vec<i8>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries, got {}",
                n * n,
                entries.len()
            )));
        }
        for i in 0..n {
            if entries[i * n + i] != 0 {
                return Err(Error::InvalidNetwork(format!("nonzero diagonal at {i}")));
            }
            for j in 0..n {
                let v = entries[i * n + j];
                if !matches!(v, -1..=1) {
                    return Err(Error::InvalidNetwork(format!(
                        "entry {v} at ({i}, {j}) not in {{-1, 0, 1}}"
                    )));
                }
                if v != entries[j * n + i] {
                    return Err(Error::InvalidNetwork(format!("asymmetric at ({i}, {j})")));
                }
            }
        }
        Ok(SignedNetwork { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.entries[i * self.n + j]
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, sign: i8) {
        self.entries[i * self.n + j] = sign;
        self.entries[j * self.n + i] = sign;
    }

    /// Row `i` of the adjacency.
    #[inline]
    pub fn row(&self, i: usize) -> &[i8] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// Nonzero edges as `(i, j, sign)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, i8)> + '_ {
        (0..self.n).flat_map(move |i| {
            ((i + 1)..self.n).filter_map(move |j| {
                let s = self.get(i, j);
                (s != 0).then_some((i, j, s))
            })
        })
    }

    /// Number of positive and negative edges (unordered pairs).
    pub fn sign_counts(&self) -> (usize, usize) {
        self.edges().fold((0, 0), |(p, q), (_, _, s)| {
            if s > 0 {
                (p + 1, q)
            } else {
                (p, q + 1)
            }
        })
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j) as f64)
    }

    /// Relabels nodes: node `perm[i]` of the result is node `i` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut out = SignedNetwork::empty(self.n);
        for (i, j, s) in self.edges() {
            out.set(perm[i], perm[j], s);
        }
        out
    }
}

/// Increasing link function mapping the real line into (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Link {
    #[default]
    Logit,
    Probit,
}

impl Link {
    #[inline]
    pub fn value(self, x: f64) -> f64 {
        match self {
            Link::Logit => {
                let e = (-x.abs()).exp();
                if x >= 0.0 {
                    1.0 / (1.0 + e)
                } else {
                    e / (1.0 + e)
                }
            }
            Link::Probit => 0.5 * libm::erfc(-x * std::f64::consts::FRAC_1_SQRT_2),
        }
    }

    #[inline]
    pub fn derivative(self, x: f64) -> f64 {
        match self {
            Link::Logit => {
                let e = (-x.abs()).exp();
                e / ((1.0 + e) * (1.0 + e))
            }
            Link::Probit => FRAC_1_SQRT_2PI * (-0.5 * x * x).exp(),
        }
    }

    /// `(f(x), f'(x))` sharing one exponential where possible.
    #[inline]
    pub(crate) fn value_and_derivative(self, x: f64) -> (f64, f64) {
        match self {
            Link::Logit => {
                let e = (-x.abs()).exp();
                let inv = 1.0 / (1.0 + e);
                let v = if x >= 0.0 { inv } else { e * inv };
                (v, e * inv * inv)
            }
            Link::Probit => (self.value(x), self.derivative(x)),
        }
    }
}

impl std::str::FromStr for Link {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "logit" | "logistic" => Ok(Link::Logit),
            "probit" => Ok(Link::Probit),
            other => Err(Error::InvalidConfig(format!("unknown link `{other}`"))),
        }
    }
}

impl std::fmt::Display for Link {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Link::Logit => "logit",
            Link::Probit => "probit",
        })
    }
}

/// Intercepts `(d0, d1)` together with the feasible box used when they are
/// learned: `c1 ≤ d1 ≤ d0 - delta` and `d0 ≤ c2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Intercepts {
    pub d0: f64,
    pub d1: f64,
    pub delta: f64,
    pub c1: f64,
    pub c2: f64,
}

impl Default for Intercepts {
    fn default() -> Self {
        Intercepts {
            d0: 1.0,
            d1: -1.0,
            delta: 0.1,
            c1: -10.0,
            c2: 10.0,
        }
    }
}

impl Intercepts {
    /// Intercepts with the default feasible box.
    pub fn new(d0: f64, d1: f64) -> Self {
        Intercepts {
            d0,
            d1,
            ..Default::default()
        }
    }

    /// Checks the box constraints.
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "delta must be positive, got {}",
                self.delta
            )));
        }
        let ok = self.c1 <= self.d1 && self.d1 <= self.d0 - self.delta && self.d0 <= self.c2;
        if !ok {
            return Err(Error::InvalidConfig(format!(
                "intercepts violate c1 <= d1 <= d0 - delta, d0 <= c2: {self:?}"
            )));
        }
        Ok(())
    }
}

/// `Pr(y ≥ t | m)`.
pub fn survival(t: i32, m: f64, d: &Intercepts, link: Link) -> f64 {
    match t {
        t if t <= -1 => 1.0,
        0 => link.value(d.d0 + m),
        1 => link.value(d.d1 + m),
        _ => 0.0,
    }
}

/// `Pr(y = t | m)` for `t ∈ {-1, 0, 1}`, kept within `[PROB_FLOOR, 1]`.
/// Mass lifted onto floored categories is taken from the largest one, so
/// the three values still sum to one.
pub fn prob(t: i32, m: f64, d: &Intercepts, link: Link) -> Result<f64> {
    if d.d1 > d.d0 {
        return Err(Error::InvalidIntercepts { d0: d.d0, d1: d.d1 });
    }
    if !(-1..=1).contains(&t) {
        return Ok(PROB_FLOOR);
    }
    let mut p = [-1i8, 0, 1].map(|c| category_prob(c, m, d, link).clamp(PROB_FLOOR, 1.0));
    let lifted: f64 = [-1i8, 0, 1]
        .iter()
        .zip(&p)
        .map(|(&c, &q)| q - category_prob(c, m, d, link).min(1.0))
        .filter(|&x| x > 0.0)
        .sum();
    if lifted > 0.0 {
        let top = (0..3).fold(0, |best, k| if p[k] > p[best] { k } else { best });
        p[top] -= lifted;
    }
    Ok(p[(t + 1) as usize])
}

/// Unclamped category probability. Uses `1 - f(x) = f(-x)` (both links are
/// symmetric) so tail probabilities keep full relative precision.
#[inline]
pub(crate) fn category_prob(t: i8, m: f64, d: &Intercepts, link: Link) -> f64 {
    let x0 = d.d0 + m;
    let x1 = d.d1 + m;
    match t {
        1 => link.value(x1),
        0 => {
            if x1 > 0.0 {
                link.value(-x1) - link.value(-x0)
            } else {
                link.value(x0) - link.value(x1)
            }
        }
        _ => link.value(-x0),
    }
}

/// Derivative of `Pr(y = t | m)` with respect to `m`.
pub fn prob_derivative(t: i32, m: f64, d: &Intercepts, link: Link) -> f64 {
    let f0 = link.derivative(d.d0 + m);
    let f1 = link.derivative(d.d1 + m);
    match t {
        1 => f1,
        0 => f0 - f1,
        -1 => -f0,
        _ => 0.0,
    }
}

/// Node embeddings: `b` (n × K1) for balance, `a` (n × K2) for anomalies.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingState {
    pub b: DMatrix<f64>,
    pub a: DMatrix<f64>,
    pub d: Intercepts,
}

impl EmbeddingState {
    pub fn new(b: DMatrix<f64>, a: DMatrix<f64>, d: Intercepts) -> Result<Self> {
        let state = EmbeddingState { b, a, d };
        state.check_dims()?;
        Ok(state)
    }

    pub fn n(&self) -> usize {
        self.b.nrows()
    }

    pub fn k1(&self) -> usize {
        self.b.ncols()
    }

    pub fn k2(&self) -> usize {
        self.a.ncols()
    }

    pub(crate) fn check_dims(&self) -> Result<()> {
        if self.b.nrows() != self.a.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "B has {} rows but A has {}",
                self.b.nrows(),
                self.a.nrows()
            )));
        }
        Ok(())
    }

    /// Measures how far the state is from the estimation constraint set.
    pub fn constraint_report(&self, c: f64, kappa: f64, a_n: f64) -> ConstraintReport {
        let max_abs = |m: &DMatrix<f64>| m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
        let col_sum = |m: &DMatrix<f64>| {
            m.column_iter()
                .map(|c| c.sum().abs())
                .fold(0.0_f64, f64::max)
        };
        let frob_b = self.b.norm();
        ConstraintReport {
            col_sum_b: col_sum(&self.b),
            col_sum_a: col_sum(&self.a),
            cross: max_abs(&(self.b.transpose() * &self.a)),
            row_norm_b: two_to_inf(&self.b),
            row_norm_a: two_to_inf(&self.a),
            frob_a: self.a.norm(),
            frob_cap: kappa * a_n.sqrt() * frob_b,
            c,
        }
    }
}

/// Constraint residuals of an [`EmbeddingState`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstraintReport {
    /// `max_k |Σ_i B_ik|`
    pub col_sum_b: f64,
    pub col_sum_a: f64,
    /// `‖BᵀA‖_max`
    pub cross: f64,
    pub row_norm_b: f64,
    pub row_norm_a: f64,
    pub frob_a: f64,
    /// `κ √a_n ‖B‖_F`
    pub frob_cap: f64,
    pub c: f64,
}

impl ConstraintReport {
    /// True when every constraint holds: sums and row/Frobenius caps within
    /// `tol`, orthogonality within `cross_tol`.
    pub fn satisfied(&self, tol: f64, cross_tol: f64) -> bool {
        self.col_sum_b < tol
            && self.col_sum_a < tol
            && self.cross < cross_tol
            && self.row_norm_b <= self.c + tol
            && self.row_norm_a <= self.c + tol
            && self.frob_a <= self.frob_cap + tol
    }
}

/// Maximum Euclidean row norm.
pub fn two_to_inf(x: &DMatrix<f64>) -> f64 {
    x.row_iter().map(|r| r.norm()).fold(0.0, f64::max)
}

/// The latent matrices `L`, `S` and `M = L + S`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentDecomposition {
    pub l: DMatrix<f64>,
    pub s: DMatrix<f64>,
    pub m: DMatrix<f64>,
}

pub fn latent_matrix(state: &EmbeddingState) -> Result<LatentDecomposition> {
    state.check_dims()?;
    let n = state.n();
    let (b, a) = (&state.b, &state.a);
    let mut l = DMatrix::zeros(n, n);
    let mut s = DMatrix::zeros(n, n);
    for i in 0..n {
        s[(i, i)] = a.row(i).norm_squared();
        for j in (i + 1)..n {
            let dist2: f64 = (0..b.ncols())
                .map(|k| {
                    let diff = b[(i, k)] - b[(j, k)];
                    diff * diff
                })
                .sum();
            let dot: f64 = (0..a.ncols()).map(|k| a[(i, k)] * a[(j, k)]).sum();
            l[(i, j)] = -dist2;
            l[(j, i)] = -dist2;
            s[(i, j)] = dot;
            s[(j, i)] = dot;
        }
    }
    let m = &l + &s;
    Ok(LatentDecomposition { l, s, m })
}

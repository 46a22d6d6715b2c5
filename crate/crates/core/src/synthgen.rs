//! Synthetic signed networks with planted communities and anomalies.
//!
//! Both generators place four community centers `b_l ~ N(0, I₃)`. In the
//! block model (example 1) every node sits exactly on its center; in the
//! mixture model (example 2) nodes scatter around it with covariance
//! `0.01·I₃`. A fraction `a_n` of nodes carries an anomaly embedding drawn
//! from `0.5·N(1₃, Ω) + 0.5·N(-1₃, Ω)` with diagonal `Ω`, entries
//! `~ U[0, 0.1]`; all other anomaly embeddings are zero.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{category_prob, Intercepts, Link, SignedNetwork};

pub const DIM: usize = 3;
pub const COMMUNITIES: usize = 4;

const EXAMPLE1_WEIGHTS: [f64; COMMUNITIES] = [0.1, 0.2, 0.3, 0.4];
const EXAMPLE2_WEIGHTS: [f64; COMMUNITIES] = [0.25; COMMUNITIES];
const EXAMPLE2_SPREAD_SD: f64 = 0.1;
const OMEGA_MAX: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Example {
    /// Signed stochastic block model with anomalies.
    BlockModel,
    /// Gaussian mixture around the block centers, with anomalies.
    Mixture,
}

impl Example {
    pub fn from_index(index: u8) -> Result<Self> {
        match index {
            1 => Ok(Example::BlockModel),
            2 => Ok(Example::Mixture),
            other => Err(Error::InvalidConfig(format!("unknown example {other}; expected 1 or 2"))),
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Example::BlockModel => 1,
            Example::Mixture => 2,
        }
    }
}

/// Generator-side truth used to score a fit.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub b_star: DMatrix<f64>,
    pub a_star: DMatrix<f64>,
    /// Community of each node, `1..=4`.
    pub labels: Vec<usize>,
    /// Pairs `(i, j)`, `i < j`, with nonzero true anomaly effect.
    pub support: BTreeSet<(usize, usize)>,
    pub d_star: Intercepts,
    pub m_star: DMatrix<f64>,
    pub centers: DMatrix<f64>,
    pub omega: [f64; DIM],
}

pub fn gen_example1(n: usize, a_n: f64, seed: u64, d_star: Intercepts) -> Result<(SignedNetwork, GroundTruth)> {
    generate(Example::BlockModel, n, a_n, seed, d_star, Link::Logit)
}

pub fn gen_example2(n: usize, a_n: f64, seed: u64, d_star: Intercepts) -> Result<(SignedNetwork, GroundTruth)> {
    generate(Example::Mixture, n, a_n, seed, d_star, Link::Logit)
}

/// Draws one replication of `example`. Everything, the community centers
/// included, is redrawn from `seed`.
pub fn generate(
    example: Example,
    n: usize,
    a_n: f64,
    seed: u64,
    d_star: Intercepts,
    link: Link,
) -> Result<(SignedNetwork, GroundTruth)> {
    if n < 8 {
        return Err(Error::InvalidConfig(format!("generator needs n >= 8, got {n}")));
    }
    if !(0.0..=1.0).contains(&a_n) {
        return Err(Error::InvalidConfig(format!("a_n must lie in [0, 1], got {a_n}")));
    }
    if d_star.d1 > d_star.d0 {
        return Err(Error::InvalidIntercepts {
            d0: d_star.d0,
            d1: d_star.d1,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut normal = || -> f64 { rng.sample(StandardNormal) };
    let centers = DMatrix::from_fn(COMMUNITIES, DIM, |_, _| normal());

    let omega: [f64; DIM] = std::array::from_fn(|_| rng.gen_range(0.0..OMEGA_MAX));
    let weights = match example {
        Example::BlockModel => &EXAMPLE1_WEIGHTS,
        Example::Mixture => &EXAMPLE2_WEIGHTS,
    };

    let labels: Vec<usize> = (0..n).map(|_| draw_category(&mut rng, weights) + 1).collect();

    let mut b_star = DMatrix::zeros(n, DIM);
    for (i, &l) in labels.iter().enumerate() {
        for k in 0..DIM {
            b_star[(i, k)] = centers[(l - 1, k)];
            if example == Example::Mixture {
                let z: f64 = rng.sample(StandardNormal);
                b_star[(i, k)] += EXAMPLE2_SPREAD_SD * z;
            }
        }
    }

    let mut a_star = DMatrix::zeros(n, DIM);
    for i in 0..n {
        if rng.gen::<f64>() < a_n {
            let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            for k in 0..DIM {
                let z: f64 = rng.sample(StandardNormal);
                a_star[(i, k)] = sign + omega[k].sqrt() * z;
            }
        }
    }

    let edge_seed: u64 = rng.gen();
    let m_star = latent_from(&b_star, &a_star);
    let support = support_of(&a_star);
    let y = sample_edges(&m_star, &d_star, link, edge_seed)?;
    let truth = GroundTruth {
        b_star,
        a_star,
        labels,
        support,
        d_star,
        m_star,
        centers,
        omega,
    };
    Ok((y, truth))
}

fn draw_category(rng: &mut ChaCha8Rng, weights: &[f64]) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (k, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return k;
        }
    }
    weights.len() - 1
}

fn latent_from(b: &DMatrix<f64>, a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = b.nrows();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = a.row(i).norm_squared();
        for j in (i + 1)..n {
            let v = a.row(i).dot(&a.row(j)) - (b.row(i) - b.row(j)).norm_squared();
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// Pairs `i < j` whose anomaly embeddings are both nonzero with nonzero
/// inner product.
pub fn support_of(a: &DMatrix<f64>) -> BTreeSet<(usize, usize)> {
    let active: Vec<usize> = (0..a.nrows())
        .filter(|&i| a.row(i).iter().any(|&v| v != 0.0))
        .collect();
    let mut out = BTreeSet::new();
    for (idx, &i) in active.iter().enumerate() {
        for &j in &active[idx + 1..] {
            if a.row(i).dot(&a.row(j)) != 0.0 {
                out.insert((i, j));
            }
        }
    }
    out
}

/// Samples each pair `i < j` independently from the edge model at `m_ij`.
pub fn sample_edges(m: &DMatrix<f64>, d: &Intercepts, link: Link, seed: u64) -> Result<SignedNetwork> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::DimensionMismatch(format!("latent matrix is {}x{}", n, m.ncols())));
    }
    if d.d1 > d.d0 {
        return Err(Error::InvalidIntercepts { d0: d.d0, d1: d.d1 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut y = SignedNetwork::empty(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let mij = m[(i, j)];
            let p_neg = category_prob(-1, mij, d, link);
            let p_zero = category_prob(0, mij, d, link);
            let u: f64 = rng.gen();
            let t = if u < p_neg {
                -1
            } else if u < p_neg + p_zero {
                0
            } else {
                1
            };
            if t != 0 {
                y.set(i, j, t);
            }
        }
    }
    Ok(y)
}

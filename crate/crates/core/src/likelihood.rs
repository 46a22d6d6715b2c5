//! Negative log-likelihood of a signed network under the embedding model and
//! its analytic gradient.
//!
//! The likelihood runs over unordered pairs `i < j`; the diagonal is never
//! part of the data.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::{EmbeddingState, Intercepts, Link, SignedNetwork, PROB_FLOOR};

/// Gradient of `+log L` with respect to every free parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct LikelihoodGradient {
    pub g_b: DMatrix<f64>,
    pub g_a: DMatrix<f64>,
    pub g_d0: f64,
    pub g_d1: f64,
}

impl LikelihoodGradient {
    /// Largest entrywise relative discrepancy `|x - y| / max(|x|, |y|, 1)`.
    pub fn max_relative_error(&self, other: &LikelihoodGradient) -> f64 {
        let rel = |x: f64, y: f64| (x - y).abs() / x.abs().max(y.abs()).max(1.0);
        let mut worst = rel(self.g_d0, other.g_d0).max(rel(self.g_d1, other.g_d1));
        for (x, y) in self.g_b.iter().zip(other.g_b.iter()) {
            worst = worst.max(rel(*x, *y));
        }
        for (x, y) in self.g_a.iter().zip(other.g_a.iter()) {
            worst = worst.max(rel(*x, *y));
        }
        worst
    }
}

/// `-Σ_{i<j} log p(y_ij | m_ij)`.
pub fn neg_log_likelihood(y: &SignedNetwork, state: &EmbeddingState, link: Link) -> Result<f64> {
    check(y, state)?;
    Ok(Pass::new(y, state, link, false).run().0)
}

/// Analytic gradient of `+log L`.
pub fn gradient(y: &SignedNetwork, state: &EmbeddingState, link: Link) -> Result<LikelihoodGradient> {
    check(y, state)?;
    Ok(Pass::new(y, state, link, true).run().1.expect("gradient requested"))
}

/// Objective and gradient from a single sweep over the pairs.
pub fn value_and_gradient(
    y: &SignedNetwork,
    state: &EmbeddingState,
    link: Link,
) -> Result<(f64, LikelihoodGradient)> {
    check(y, state)?;
    let (v, g) = Pass::new(y, state, link, true).run();
    Ok((v, g.expect("gradient requested")))
}

/// Central-difference approximation of [`gradient`], one coordinate at a time.
pub fn fd_gradient(
    y: &SignedNetwork,
    state: &EmbeddingState,
    link: Link,
    step: f64,
) -> Result<LikelihoodGradient> {
    check(y, state)?;
    if !(step > 0.0) {
        return Err(Error::InvalidConfig(format!("step must be positive, got {step}")));
    }
    let f = |s: &EmbeddingState| Pass::new(y, s, link, false).run().0;
    // derivative of +log L = -(derivative of the negative log-likelihood)
    let central = |plus: &EmbeddingState, minus: &EmbeddingState| -(f(plus) - f(minus)) / (2.0 * step);

    let mut g_b = DMatrix::zeros(state.n(), state.k1());
    let mut g_a = DMatrix::zeros(state.n(), state.k2());
    let mut work = state.clone();
    for idx in 0..g_b.len() {
        let orig = state.b[idx];
        work.b[idx] = orig + step;
        let plus = work.clone();
        work.b[idx] = orig - step;
        g_b[idx] = central(&plus, &work);
        work.b[idx] = orig;
    }
    for idx in 0..g_a.len() {
        let orig = state.a[idx];
        work.a[idx] = orig + step;
        let plus = work.clone();
        work.a[idx] = orig - step;
        g_a[idx] = central(&plus, &work);
        work.a[idx] = orig;
    }
    let mut plus = state.clone();
    let mut minus = state.clone();
    plus.d.d0 += step;
    minus.d.d0 -= step;
    let g_d0 = central(&plus, &minus);
    let mut plus = state.clone();
    let mut minus = state.clone();
    plus.d.d1 += step;
    minus.d.d1 -= step;
    let g_d1 = central(&plus, &minus);
    Ok(LikelihoodGradient { g_b, g_a, g_d0, g_d1 })
}

fn check(y: &SignedNetwork, state: &EmbeddingState) -> Result<()> {
    state.check_dims()?;
    if y.n() != state.n() {
        return Err(Error::DimensionMismatch(format!(
            "network has {} nodes but state has {} rows",
            y.n(),
            state.n()
        )));
    }
    Ok(())
}

/// One sweep over all unordered pairs. Embeddings are copied to row-major
/// buffers so the inner loop walks contiguous memory.
pub(crate) struct Pass<'a> {
    y: &'a SignedNetwork,
    b: Vec<f64>,
    a: Vec<f64>,
    k1: usize,
    k2: usize,
    d: Intercepts,
    link: Link,
    want_grad: bool,
}

impl<'a> Pass<'a> {
    pub(crate) fn new(y: &'a SignedNetwork, state: &EmbeddingState, link: Link, want_grad: bool) -> Self {
        Pass::from_parts(y, &state.b, &state.a, state.d, link, want_grad)
    }

    pub(crate) fn from_parts(
        y: &'a SignedNetwork,
        b: &DMatrix<f64>,
        a: &DMatrix<f64>,
        d: Intercepts,
        link: Link,
        want_grad: bool,
    ) -> Self {
        Pass {
            y,
            b: row_major(b),
            a: row_major(a),
            k1: b.ncols(),
            k2: a.ncols(),
            d,
            link,
            want_grad,
        }
    }

    pub(crate) fn run(&self) -> (f64, Option<LikelihoodGradient>) {
        let n = self.y.n();
        let (k1, k2) = (self.k1, self.k2);
        let (b, a) = (&self.b, &self.a);
        let (d0, d1) = (self.d.d0, self.d.d1);
        let link = self.link;
        let log_floor = PROB_FLOOR.ln();

        let mut gb = if self.want_grad { vec![0.0; n * k1] } else { Vec::new() };
        let mut ga = if self.want_grad { vec![0.0; n * k2] } else { Vec::new() };
        let (mut gd0, mut gd1) = (0.0, 0.0);
        let mut nll = 0.0;

        for i in 0..n {
            let yi = self.y.row(i);
            let bi = &b[i * k1..(i + 1) * k1];
            let ai = &a[i * k2..(i + 1) * k2];
            // per-row partial sum keeps accumulation error small at large n
            let mut row_nll = 0.0;
            for j in (i + 1)..n {
                let bj = &b[j * k1..(j + 1) * k1];
                let aj = &a[j * k2..(j + 1) * k2];
                let mut dist2 = 0.0;
                for k in 0..k1 {
                    let diff = bi[k] - bj[k];
                    dist2 += diff * diff;
                }
                let mut dot = 0.0;
                for k in 0..k2 {
                    dot += ai[k] * aj[k];
                }
                let m = dot - dist2;

                // p, dp/dm, dp/dd0, dp/dd1
                let (p, dp_m, dp_d0, dp_d1) = match yi[j] {
                    1 => {
                        let (v, dv) = link.value_and_derivative(d1 + m);
                        (v, dv, 0.0, dv)
                    }
                    -1 => {
                        let (v, dv) = link.value_and_derivative(-(d0 + m));
                        (v, -dv, -dv, 0.0)
                    }
                    _ => {
                        let x0 = d0 + m;
                        let x1 = d1 + m;
                        // f' is even, so the derivative comes along either way
                        let (p, f0, f1) = if x1 > 0.0 {
                            let (v1, f1) = link.value_and_derivative(-x1);
                            let (v0, f0) = link.value_and_derivative(-x0);
                            (v1 - v0, f0, f1)
                        } else {
                            let (v0, f0) = link.value_and_derivative(x0);
                            let (v1, f1) = link.value_and_derivative(x1);
                            (v0 - v1, f0, f1)
                        };
                        (p, f0 - f1, f0, -f1)
                    }
                };

                if p > PROB_FLOOR {
                    row_nll -= p.ln();
                    if self.want_grad {
                        let inv = 1.0 / p;
                        let g = dp_m * inv;
                        gd0 += dp_d0 * inv;
                        gd1 += dp_d1 * inv;
                        let scale = -2.0 * g;
                        for k in 0..k1 {
                            let t = scale * (bi[k] - bj[k]);
                            gb[i * k1 + k] += t;
                            gb[j * k1 + k] -= t;
                        }
                        for k in 0..k2 {
                            ga[i * k2 + k] += g * aj[k];
                            ga[j * k2 + k] += g * ai[k];
                        }
                    }
                } else {
                    // clamped region: the objective is flat there
                    row_nll -= log_floor;
                }
            }
            nll += row_nll;
        }

        let grad = self.want_grad.then(|| LikelihoodGradient {
            g_b: DMatrix::from_row_slice(n, k1, &gb),
            g_a: DMatrix::from_row_slice(n, k2, &ga),
            g_d0: gd0,
            g_d1: gd1,
        });
        (nll, grad)
    }
}

fn row_major(x: &DMatrix<f64>) -> Vec<f64> {
    let (r, c) = x.shape();
    let mut out = Vec::with_capacity(r * c);
    for i in 0..r {
        for k in 0..c {
            out.push(x[(i, k)]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::prob;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_instance(n: usize, k1: usize, k2: usize, seed: u64) -> (SignedNetwork, EmbeddingState) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let s: i8 = rng.gen_range(-1..=1);
                if s != 0 {
                    edges.push((i, j, s));
                }
            }
        }
        let y = SignedNetwork::from_edges(n, edges).unwrap();
        let b = DMatrix::from_fn(n, k1, |_, _| rng.gen_range(-0.8..0.8));
        let a = DMatrix::from_fn(n, k2, |_, _| rng.gen_range(-0.6..0.6));
        let d = Intercepts::new(rng.gen_range(0.3..1.5), rng.gen_range(-1.5..-0.3));
        (y, EmbeddingState::new(b, a, d).unwrap())
    }

    /// Scalar-loop oracle built only on `prob`.
    fn naive_nll(y: &SignedNetwork, st: &EmbeddingState, link: Link) -> f64 {
        let n = y.n();
        let mut total = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let mut m = 0.0;
                for k in 0..st.k1() {
                    m -= (st.b[(i, k)] - st.b[(j, k)]).powi(2);
                }
                for k in 0..st.k2() {
                    m += st.a[(i, k)] * st.a[(j, k)];
                }
                total -= prob(y.get(i, j) as i32, m, &st.d, link).unwrap().ln();
            }
        }
        total
    }

    #[test]
    fn single_pair_value() {
        let y = SignedNetwork::empty(2);
        let st = EmbeddingState::new(DMatrix::zeros(2, 1), DMatrix::zeros(2, 1), Intercepts::new(1.0, -1.0)).unwrap();
        let v = neg_log_likelihood(&y, &st, Link::Logit).unwrap();
        let p0 = 1.0 / (1.0 + (-1.0_f64).exp()) - 1.0 / (1.0 + 1.0_f64.exp());
        assert_abs_diff_eq!(v, -p0.ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(v, 0.771_937, epsilon = 1e-6);
    }

    #[test]
    fn matches_naive_oracle() {
        for seed in 0..6 {
            for link in [Link::Logit, Link::Probit] {
                let (y, st) = random_instance(9, 2, 3, seed);
                let v = neg_log_likelihood(&y, &st, link).unwrap();
                assert_abs_diff_eq!(v, naive_nll(&y, &st, link), epsilon = 1e-10);
                assert_eq!(v, neg_log_likelihood(&y, &st.clone(), link).unwrap());
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        for seed in 0..4 {
            for link in [Link::Logit, Link::Probit] {
                let (y, st) = random_instance(10, 2, 2, 100 + seed);
                let g = gradient(&y, &st, link).unwrap();
                let fd = fd_gradient(&y, &st, link, 1e-5).unwrap();
                let err = g.max_relative_error(&fd);
                assert!(err < 1e-5, "seed {seed} {link}: {err}");
            }
        }
    }

    #[test]
    fn value_and_gradient_agree_with_separate_calls() {
        let (y, st) = random_instance(7, 2, 1, 3);
        let (v, g) = value_and_gradient(&y, &st, Link::Logit).unwrap();
        assert_eq!(v, neg_log_likelihood(&y, &st, Link::Logit).unwrap());
        assert_eq!(g, gradient(&y, &st, Link::Logit).unwrap());
    }

    #[test]
    fn zero_embeddings_give_zero_embedding_gradients() {
        let (y, mut st) = random_instance(8, 2, 2, 9);
        st.b.fill(0.0);
        st.a.fill(0.0);
        let g = gradient(&y, &st, Link::Logit).unwrap();
        assert!(g.g_b.iter().all(|&v| v == 0.0));
        assert!(g.g_a.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn gradient_rows_of_b_sum_to_zero() {
        let (y, st) = random_instance(11, 3, 2, 5);
        let g = gradient(&y, &st, Link::Logit).unwrap();
        for k in 0..3 {
            assert_abs_diff_eq!(g.g_b.column(k).sum(), 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn fd_step_halving_shrinks_error() {
        let (y, st) = random_instance(8, 2, 2, 21);
        let g = gradient(&y, &st, Link::Logit).unwrap();
        let coarse = fd_gradient(&y, &st, Link::Logit, 1e-2).unwrap();
        let fine = fd_gradient(&y, &st, Link::Logit, 5e-3).unwrap();
        let e1 = g.max_relative_error(&coarse);
        let e2 = g.max_relative_error(&fine);
        let ratio = e1 / e2;
        assert!((3.0..5.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn flat_direction_has_zero_derivative() {
        // An unused anomaly column: all other nodes have zero there, so the
        // derivative of the likelihood along node 0's entry is zero.
        let (y, mut st) = random_instance(6, 2, 2, 4);
        st.a.column_mut(1).fill(0.0);
        let fd = fd_gradient(&y, &st, Link::Logit, 1e-5).unwrap();
        for i in 0..6 {
            assert!(fd.g_a[(i, 1)].abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_size_mismatch() {
        let (y, _) = random_instance(5, 1, 1, 0);
        let st = EmbeddingState::new(DMatrix::zeros(4, 1), DMatrix::zeros(4, 1), Intercepts::default()).unwrap();
        assert!(neg_log_likelihood(&y, &st, Link::Logit).is_err());
        assert!(gradient(&y, &st, Link::Logit).is_err());
    }

    fn rotation(k: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = DMatrix::from_fn(k, k, |_, _| rng.gen_range(-1.0..1.0));
        g.qr().q()
    }

    proptest::proptest! {
        #[test]
        fn invariant_under_node_permutation(seed in 0u64..1000, n in 3usize..10) {
            let (y, st) = random_instance(n, 2, 2, seed);
            let mut perm: Vec<usize> = (0..n).collect();
            perm.rotate_left(seed as usize % n);
            perm.swap(0, n - 1);
            // node i moves to perm[i]
            let mut inv = vec![0; n];
            for (i, &p) in perm.iter().enumerate() {
                inv[p] = i;
            }
            let b = DMatrix::from_fn(n, 2, |r, k| st.b[(inv[r], k)]);
            let a = DMatrix::from_fn(n, 2, |r, k| st.a[(inv[r], k)]);
            let permuted = EmbeddingState::new(b, a, st.d).unwrap();
            for link in [Link::Logit, Link::Probit] {
                let v = neg_log_likelihood(&y, &st, link).unwrap();
                let w = neg_log_likelihood(&y.permuted(&perm), &permuted, link).unwrap();
                proptest::prop_assert!((v - w).abs() <= 1e-10 * v.abs().max(1.0));
            }
        }

        #[test]
        fn invariant_under_rotation_of_balance(seed in 0u64..1000, k in 1usize..4) {
            let (y, st) = random_instance(8, k, 2, seed);
            let rotated = EmbeddingState::new(&st.b * rotation(k, seed + 1), st.a.clone(), st.d).unwrap();
            for link in [Link::Logit, Link::Probit] {
                let v = neg_log_likelihood(&y, &st, link).unwrap();
                let w = neg_log_likelihood(&y, &rotated, link).unwrap();
                proptest::prop_assert!((v - w).abs() <= 1e-10 * v.abs().max(1.0));
            }
        }

        #[test]
        fn gradient_matches_fd_on_random_instances(seed in 0u64..10_000, big in proptest::bool::ANY, probit in proptest::bool::ANY) {
            let n = if big { 12 } else { 8 };
            let link = if probit { Link::Probit } else { Link::Logit };
            let (y, st) = random_instance(n, 2, 2, seed);
            let err = gradient(&y, &st, link).unwrap().max_relative_error(&fd_gradient(&y, &st, link, 1e-5).unwrap());
            proptest::prop_assert!(err < 1e-5, "{}", err);
        }
    }
}

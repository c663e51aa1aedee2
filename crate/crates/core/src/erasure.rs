//! The erasure functional m(λ) = E_{T∼λ}(|T| − r_C(T)): the expected rank
//! deficiency of a λ-random column subset. Exact evaluation walks all 2^n
//! subsets once and caches a (size, rank) histogram; a seeded Monte Carlo
//! estimator covers larger n; repetition-pair and first-order Reed–Muller
//! codes get closed forms.

use crate::error::{argument, capacity, Result};
use crate::gf2::LinearCode;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Largest n for the exhaustive subset walk.
pub const MAX_EXACT_N: usize = 22;

fn check_lambda(lam: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&lam) {
        return argument(format!("lambda = {lam} outside [0, 1]"));
    }
    Ok(())
}

/// Joint histogram over subsets T of the columns: `counts[t][r]` is the
/// number of T with |T| = t and r_C(T) = r. Built once per code, then any
/// λ-expectation is a cheap weighted sum.
#[derive(Clone, Debug)]
pub struct RankProfile {
    n: usize,
    k: usize,
    counts: Vec<Vec<u64>>,
}

impl RankProfile {
    pub fn new(code: &LinearCode) -> Result<Self> {
        let n = code.n();
        if n > MAX_EXACT_N {
            return capacity(format!("exact profile needs n ≤ {MAX_EXACT_N}, got {n}"));
        }
        let k = code.k();
        // column j of the generator matrix, packed as a k-bit word
        let cols: Vec<u32> = (0..n)
            .map(|j| {
                code.generator_rows()
                    .iter()
                    .enumerate()
                    .fold(0u32, |acc, (r, row)| acc | (((row >> j) & 1) << r))
            })
            .collect();
        let mut counts = vec![vec![0u64; k + 1]; n + 1];
        let mut basis = [0u32; 32];
        descend(&cols, 0, &mut basis, 0, 0, &mut counts);
        Ok(Self { n, k, counts })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn count(&self, size: usize, rank: usize) -> u64 {
        self.counts[size][rank]
    }

    /// m(λ) = Σ_T λ^{|T|}(1−λ)^{n−|T|}(|T| − r_C(T)).
    pub fn m_lambda(&self, lam: f64) -> Result<f64> {
        check_lambda(lam)?;
        let mut total = 0.0;
        for (t, row) in self.counts.iter().enumerate() {
            let weight = lam.powi(t as i32) * (1.0 - lam).powi((self.n - t) as i32);
            let deficiency: f64 =
                row.iter().enumerate().map(|(r, &c)| c as f64 * (t as f64 - r as f64)).sum();
            total += weight * deficiency;
        }
        Ok(total)
    }

    /// E_{T∼λ} r_C(T); with the duality r_{C⊥}(S) = |S| + r_C(S^c) − k this
    /// turns a profile of C into m_{C⊥}(λ) = k − E_{T∼1−λ} r_C(T).
    pub fn expected_rank(&self, lam: f64) -> Result<f64> {
        check_lambda(lam)?;
        let mut total = 0.0;
        for (t, row) in self.counts.iter().enumerate() {
            let weight = lam.powi(t as i32) * (1.0 - lam).powi((self.n - t) as i32);
            let rank_sum: f64 = row.iter().enumerate().map(|(r, &c)| c as f64 * r as f64).sum();
            total += weight * rank_sum;
        }
        Ok(total)
    }
}

/// Depth-first walk over include/exclude decisions per column, keeping an
/// XOR elimination basis that is extended on the way down and retracted on
/// the way back up, so each node costs O(k).
fn descend(
    cols: &[u32],
    j: usize,
    basis: &mut [u32; 32],
    size: usize,
    rank: usize,
    counts: &mut [Vec<u64>],
) {
    if j == cols.len() {
        counts[size][rank] += 1;
        return;
    }
    descend(cols, j + 1, basis, size, rank, counts);
    let mut v = cols[j];
    loop {
        if v == 0 {
            descend(cols, j + 1, basis, size + 1, rank, counts);
            return;
        }
        let p = (31 - v.leading_zeros()) as usize;
        if basis[p] == 0 {
            basis[p] = v;
            descend(cols, j + 1, basis, size + 1, rank + 1, counts);
            basis[p] = 0;
            return;
        }
        v ^= basis[p];
    }
}

/// Exact m(λ); builds a fresh profile, so prefer [`RankProfile`] directly
/// when sweeping a λ-grid.
pub fn m_lambda_exact(code: &LinearCode, lam: f64) -> Result<f64> {
    RankProfile::new(code)?.m_lambda(lam)
}

/// A Monte Carlo mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
}

/// Sample-mean estimate of m(λ). Sample s draws its own ChaCha stream
/// (`seed`, stream s), so results are reproducible and extendable.
pub fn m_lambda_mc(code: &LinearCode, lam: f64, samples: usize, seed: u64) -> Result<McEstimate> {
    Ok(m_lambda_mc_grid(code, &[lam], samples, seed)?[0])
}

/// Estimates m(λ) over a λ-grid with common random numbers: each sample
/// draws one vector of uniforms u and reuses T(λ) = {j : u_j < λ} for every
/// grid point, so the profile is smooth in λ. Rank is maintained
/// incrementally as columns enter in increasing-u order.
pub fn m_lambda_mc_grid(
    code: &LinearCode,
    lams: &[f64],
    samples: usize,
    seed: u64,
) -> Result<Vec<McEstimate>> {
    for &lam in lams {
        check_lambda(lam)?;
    }
    if samples == 0 {
        return argument("need at least one sample");
    }
    let n = code.n();
    let cols: Vec<u32> = (0..n)
        .map(|j| {
            code.generator_rows()
                .iter()
                .enumerate()
                .fold(0u32, |acc, (r, row)| acc | (((row >> j) & 1) << r))
        })
        .collect();
    // grid visited in ascending-λ order, results reported in input order
    let mut order: Vec<usize> = (0..lams.len()).collect();
    order.sort_by(|&a, &b| lams[a].total_cmp(&lams[b]));

    let mut sums = vec![0.0f64; lams.len()];
    let mut sq_sums = vec![0.0f64; lams.len()];
    let mut u = vec![0.0f64; n];
    let mut by_u: Vec<usize> = (0..n).collect();
    for s in 0..samples {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(s as u64);
        for v in u.iter_mut() {
            *v = rng.random();
        }
        by_u.sort_unstable_by(|&a, &b| u[a].total_cmp(&u[b]));
        let mut basis = [0u32; 32];
        let mut next = 0usize;
        let mut size = 0usize;
        let mut rank = 0usize;
        for &gi in &order {
            while next < n && u[by_u[next]] < lams[gi] {
                size += 1;
                let mut v = cols[by_u[next]];
                while v != 0 {
                    let p = (31 - v.leading_zeros()) as usize;
                    if basis[p] == 0 {
                        basis[p] = v;
                        rank += 1;
                        break;
                    }
                    v ^= basis[p];
                }
                next += 1;
            }
            let d = (size - rank) as f64;
            sums[gi] += d;
            sq_sums[gi] += d * d;
        }
    }
    let m = samples as f64;
    Ok((0..lams.len())
        .map(|gi| {
            let mean = sums[gi] / m;
            let stderr = if samples > 1 {
                let var = (sq_sums[gi] / m - mean * mean).max(0.0) * m / (m - 1.0);
                (var / m).sqrt()
            } else {
                0.0
            };
            McEstimate { mean, stderr }
        })
        .collect())
}

/// Samples and seed used when the exact budget is exceeded and
/// [`pseudorandomness_score`] falls back to Monte Carlo.
const SCORE_MC_SAMPLES: usize = 100_000;
const SCORE_MC_SEED: u64 = 0;

/// m(R)/n evaluated at the code's own rate — near 0 means λ-random subsets
/// at the rate threshold have nearly full rank at this n.
pub fn pseudorandomness_score(code: &LinearCode) -> Result<f64> {
    let r = code.rate();
    let m = if code.n() <= MAX_EXACT_N {
        m_lambda_exact(code, r)?
    } else {
        m_lambda_mc(code, r, SCORE_MC_SAMPLES, SCORE_MC_SEED)?.mean
    };
    Ok(m / code.n() as f64)
}

/// The Lipschitz bound m(λ) ≤ m(R) + (λ−R)n, valid for λ ≥ R because
/// 0 ≤ m′ ≤ n.
pub fn m_lambda_shift_bound(code: &LinearCode, lam: f64, anchor: f64) -> Result<f64> {
    check_lambda(lam)?;
    check_lambda(anchor)?;
    if lam < anchor {
        return argument(format!("shift bound needs lambda ≥ anchor, got {lam} < {anchor}"));
    }
    Ok(m_lambda_exact(code, anchor)? + (lam - anchor) * code.n() as f64)
}

/// m(λ) = (n/2)λ² for the repetition-pair code: the deficiency of T is the
/// number of pairs with both coordinates erased.
pub fn repetition_pair_m_lambda(n: usize, lam: f64) -> Result<f64> {
    if n == 0 || n % 2 != 0 {
        return argument(format!("repetition-pair length must be positive even, got {n}"));
    }
    check_lambda(lam)?;
    Ok(n as f64 / 2.0 * lam * lam)
}

/// Gaussian binomial table G[d][e] = number of e-dimensional subspaces of
/// F_2^d, via G(d,e) = G(d−1,e−1) + 2^e·G(d−1,e).
fn gaussian_binomials(m: usize) -> Vec<Vec<u128>> {
    let mut g = vec![vec![0u128; m + 1]; m + 1];
    for d in 0..=m {
        g[d][0] = 1;
        for e in 1..=d {
            g[d][e] = g[d - 1][e - 1] + (1u128 << e) * g[d - 1][e];
        }
    }
    g
}

/// Closed-form m(λ) for RM(1,m), any m ≤ 20. The generator columns at the
/// point y are (1, y), so r_C(T) = 1 + dim(affine hull of T) for T ≠ ∅.
/// The hull-dimension distribution comes from a triangular solve: with
/// F_e = P(hull(T) = W) for a fixed e-dimensional affine W,
///   (1−λ)^{n−2^d} − (1−λ)^n = Σ_{e≤d} 2^{d−e}·G(d,e)·F_e,
/// and m(λ) = λn − Σ_e (1+e)·2^{m−e}·G(m,e)·F_e.
pub fn rm1_m_lambda(m: usize, lam: f64) -> Result<f64> {
    if m == 0 || m > 20 {
        return argument(format!("RM(1,m) closed form needs 1 ≤ m ≤ 20, got {m}"));
    }
    check_lambda(lam)?;
    let n = 1u64 << m;
    let g = gaussian_binomials(m);
    let keep = 1.0 - lam;
    // hull-probability solve, smallest dimension first
    let mut f = vec![0.0f64; m + 1];
    for d in 0..=m {
        let lhs = keep.powi((n - (1u64 << d)) as i32) - keep.powi(n as i32);
        let mut known = 0.0;
        for e in 0..d {
            known += (1u64 << (d - e)) as f64 * g[d][e] as f64 * f[e];
        }
        f[d] = (lhs - known) / g[d][d] as f64;
    }
    let mut expected_rank = 0.0;
    for e in 0..=m {
        expected_rank += (1 + e) as f64 * (1u64 << (m - e)) as f64 * g[m][e] as f64 * f[e];
    }
    Ok(lam * n as f64 - expected_rank)
}

/// [`pseudorandomness_score`] for RM(1,m) through the closed form, usable
/// far beyond the generic length budget.
pub fn rm1_pseudorandomness_score(m: usize) -> Result<f64> {
    let n = 1u64 << m;
    let rate = (m + 1) as f64 / n as f64;
    Ok(rm1_m_lambda(m, rate)? / n as f64)
}

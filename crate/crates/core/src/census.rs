//! Censuses of ordered 4-tuples summing to zero inside a code's weight-i
//! level set, split into trivial tuples (every word an even number of
//! times) and nontrivial ones (rank 3). Three independent routes: a
//! meet-in-the-middle pair-sum count, an exact integer transform over the
//! coefficient space, and a cubic-loop rank-classifying oracle. On top:
//! the spectral identity for ‖f_ε‖₄⁴, its census-based inequality, and
//! seeded ensemble experiments over random codes.

use crate::cube::{log2_lq_norm, noise_operator, CubeFunction, Q};
use crate::error::{argument, capacity, inconsistency, Result};
use crate::gf2::{rank_of_words, sample_random_code_stream, LinearCode};
use crate::psi::{binary_entropy, psi_moment, psi_variational, prop18_bound};
use rayon::prelude::*;
use std::collections::HashMap;

/// Level-set size budget for the pair-sum census.
pub const MAX_CENSUS_LEVEL: usize = 1 << 13;
/// Code-dimension budget for the integer-transform census.
pub const MAX_SPECTRAL_K: usize = 22;
/// Level-set size budget for the cubic-loop oracle.
pub const MAX_ORACLE_LEVEL: usize = 512;

/// Counts of ordered 4-tuples (u₁,u₂,u₃,u₄) ∈ (C ∩ L_i)⁴ with
/// u₁+u₂+u₃+u₄ = 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TupleCensus {
    pub i: usize,
    /// |C ∩ L_i|
    pub m: u64,
    pub total: u128,
    pub trivial: u128,
    pub nontrivial: u128,
}

/// 3m² − 2m: the m constant tuples plus 3m(m−1) two-pair arrangements.
pub fn trivial_count(m: u64) -> u128 {
    let m = m as u128;
    3 * m * m - 2 * m
}

fn assemble(i: usize, m: u64, total: u128) -> Result<TupleCensus> {
    let trivial = trivial_count(m);
    if total < trivial {
        return inconsistency(format!(
            "census total {total} fell below the trivial floor {trivial}"
        ));
    }
    Ok(TupleCensus { i, m, total, trivial, nontrivial: total - trivial })
}

fn level_words(code: &LinearCode, i: usize) -> Result<Vec<u32>> {
    Ok(code.level_set(i)?.into_iter().map(|w| w.bits()).collect())
}

/// Meet-in-the-middle census: total = Σ_s P(s)² over the pair-sum counts
/// P(s) = #{(u₁,u₂) : u₁+u₂ = s}.
pub fn census(code: &LinearCode, i: usize) -> Result<TupleCensus> {
    let words = level_words(code, i)?;
    let m = words.len();
    if m > MAX_CENSUS_LEVEL {
        return capacity(format!("level set of size {m} exceeds {MAX_CENSUS_LEVEL}"));
    }
    if m == 0 {
        return Ok(TupleCensus { i, m: 0, total: 0, trivial: 0, nontrivial: 0 });
    }
    let total: u128 = if code.n() <= 22 {
        let mut pair_counts = vec![0u32; 1 << code.n()];
        for &a in &words {
            for &b in &words {
                pair_counts[(a ^ b) as usize] += 1;
            }
        }
        pair_counts.iter().map(|&c| (c as u128) * (c as u128)).sum()
    } else {
        let mut pair_counts: HashMap<u32, u32> = HashMap::new();
        for &a in &words {
            for &b in &words {
                *pair_counts.entry(a ^ b).or_insert(0) += 1;
            }
        }
        pair_counts.values().map(|&c| (c as u128) * (c as u128)).sum()
    };
    assemble(i, m as u64, total)
}

fn hadamard_i64(v: &mut [i64]) {
    let len = v.len();
    let mut step = 1;
    while step < len {
        let mut base = 0;
        while base < len {
            for t in base..base + step {
                let a = v[t];
                let b = v[t + step];
                v[t] = a + b;
                v[t + step] = a - b;
            }
            base += 2 * step;
        }
        step *= 2;
    }
}

/// Exact census through the coefficient space: with g the level-set
/// indicator pulled back along x ↦ xG and H its integer Hadamard
/// transform, total = 2^{−k} Σ_ξ H(ξ)⁴. Handles level sets far beyond the
/// pair-sum budget as long as k ≤ 22.
pub fn census_spectral(code: &LinearCode, i: usize) -> Result<TupleCensus> {
    let k = code.k();
    if k > MAX_SPECTRAL_K {
        return capacity(format!("spectral census needs k ≤ {MAX_SPECTRAL_K}, got {k}"));
    }
    if i > code.n() {
        return argument(format!("weight {i} exceeds length {}", code.n()));
    }
    let rows = code.generator_rows();
    let size = 1usize << k;
    let mut g = vec![0i64; size];
    let mut m = 0u64;
    let mut word = 0u32;
    // Gray walk: after counter c the word equals the codeword of
    // coefficient c ^ (c >> 1)
    if i == 0 {
        g[0] = 1;
        m = 1;
    }
    for c in 1..size {
        word ^= rows[c.trailing_zeros() as usize];
        if word.count_ones() as usize == i {
            g[c ^ (c >> 1)] = 1;
            m += 1;
        }
    }
    if m == 0 {
        return Ok(TupleCensus { i, m: 0, total: 0, trivial: 0, nontrivial: 0 });
    }
    hadamard_i64(&mut g);
    let mut sum: u128 = 0;
    for &h in &g {
        let sq = (h * h) as u64;
        sum += (sq as u128) * (sq as u128);
    }
    if sum & ((size as u128) - 1) != 0 {
        return inconsistency("fourth-moment sum not divisible by the space size");
    }
    assemble(i, m, sum >> k)
}

fn rank_of_quad(a: u32, b: u32, c: u32, d: u32) -> usize {
    let mut basis = [0u32; 32];
    let mut rank = 0;
    for mut v in [a, b, c, d] {
        while v != 0 {
            let p = (31 - v.leading_zeros()) as usize;
            if basis[p] == 0 {
                basis[p] = v;
                rank += 1;
                break;
            }
            v ^= basis[p];
        }
    }
    rank
}

/// Cubic-loop oracle: enumerates (u₁,u₂,u₃), looks up u₄ = u₁+u₂+u₃ in the
/// level set, and classifies each hit by the GF(2) rank of the four words
/// (trivial ⟺ rank ≤ 2).
pub fn census_oracle(code: &LinearCode, i: usize) -> Result<TupleCensus> {
    let mut words = level_words(code, i)?;
    let m = words.len();
    if m > MAX_ORACLE_LEVEL {
        return capacity(format!("oracle census needs a level set ≤ {MAX_ORACLE_LEVEL}, got {m}"));
    }
    if m == 0 {
        return Ok(TupleCensus { i, m: 0, total: 0, trivial: 0, nontrivial: 0 });
    }
    words.sort_unstable();
    let mut total: u128 = 0;
    let mut trivial: u128 = 0;
    for &a in &words {
        for &b in &words {
            for &c in &words {
                let d = a ^ b ^ c;
                if words.binary_search(&d).is_ok() {
                    total += 1;
                    if rank_of_quad(a, b, c, d) <= 2 {
                        trivial += 1;
                    }
                }
            }
        }
    }
    if trivial != trivial_count(m as u64) {
        return inconsistency(format!(
            "rank classification found {trivial} trivial tuples, formula says {}",
            trivial_count(m as u64)
        ));
    }
    assemble(i, m as u64, total)
}

/// Spectral route when the dimension allows it, pair sums otherwise.
pub fn census_auto(code: &LinearCode, i: usize) -> Result<TupleCensus> {
    if code.k() <= MAX_SPECTRAL_K {
        census_spectral(code, i)
    } else {
        census(code, i)
    }
}

fn kahan(values: impl Iterator<Item = f64>) -> f64 {
    let mut acc = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = acc + v;
        comp += if acc.abs() >= v.abs() { (acc - t) + v } else { (v - t) + acc };
        acc = t;
    }
    acc + comp
}

/// Both routes for ‖f_ε‖₄⁴ with f the scaled indicator of C: the norm of
/// the noised function, and the weighted census
/// Σ_{x+y+z+w=0, all ∈ C⊥} (1−2ε)^{|x|+|y|+|z|+|w|}.
pub fn fourier_quad_identity(code: &LinearCode, eps: f64) -> Result<(f64, f64)> {
    if !(0.0..=0.5).contains(&eps) {
        return argument(format!("eps = {eps} outside [0, 1/2]"));
    }
    let dual_dim = code.n() - code.k();
    if dual_dim > 13 {
        return capacity(format!("dual pair sums need n − k ≤ 13, got {dual_dim}"));
    }
    let f = CubeFunction::scaled_indicator(code)?;
    let norm_side = (4.0 * log2_lq_norm(&noise_operator(&f, eps)?, Q::Finite(4.0))?).exp2();

    let dual_words: Vec<u32> = code.dual().codewords()?.map(|w| w.bits()).collect();
    let mut damp = vec![0.0f64; code.n() + 1];
    for (w, d) in damp.iter_mut().enumerate() {
        *d = (1.0 - 2.0 * eps).powi(w as i32);
    }
    let mut weighted = vec![0.0f64; 1 << code.n()];
    for &a in &dual_words {
        let da = damp[a.count_ones() as usize];
        for &b in &dual_words {
            weighted[(a ^ b) as usize] += da * damp[b.count_ones() as usize];
        }
    }
    let sum_side = kahan(weighted.iter().map(|&w| w * w));
    Ok((norm_side, sum_side))
}

/// Verifies the exact inequality (1−2ε)^{4i}·total ≤ ‖f_ε‖₄⁴ over an
/// ε-grid, with f the scaled indicator of C⊥ so the spectral sum runs over
/// C itself. Returns ((1/n)log₂(total+1), prop18_bound(R, i/n)) for
/// comparison against the exponent bound.
pub fn prop18_bound_check(code: &LinearCode, i: usize, r: f64) -> Result<(f64, f64)> {
    let n = code.n();
    let cn = census_auto(code, i)?;
    let total = cn.total as f64;
    let f = CubeFunction::scaled_indicator(&code.dual())?;
    for t in 0..=20 {
        let eps = t as f64 / 40.0;
        let lhs = (1.0 - 2.0 * eps).powi(4 * i as i32) * total;
        let rhs = (4.0 * log2_lq_norm(&noise_operator(&f, eps)?, Q::Finite(4.0))?).exp2();
        if lhs > rhs * (1.0 + 1e-12) {
            return inconsistency(format!(
                "census bound violated at eps = {eps}: {lhs} > {rhs}"
            ));
        }
    }
    let lhs_rate = (total + 1.0).log2() / n as f64;
    Ok((lhs_rate, prop18_bound(r, i as f64 / n as f64)?))
}

/// Ensemble statistics of (1/n)log₂(nontrivial+1) over seeded random
/// codes, next to the two ψ-based predictions
/// max{ψ(4,γ)+2h(γ)−3λ, 2h(γ)−2λ}.
#[derive(Clone, Debug)]
pub struct EnsembleStats {
    pub n: usize,
    pub lam: f64,
    pub gamma: f64,
    pub i: usize,
    pub trials: usize,
    pub seed: u64,
    pub mean: f64,
    pub std_dev: f64,
    /// min, lower quartile, median, upper quartile, max
    pub quantiles: [f64; 5],
    /// prediction with ψ from the moment route at this n
    pub formula_moment: f64,
    /// prediction with ψ from the variational route (the n→∞ value)
    pub formula_variational: f64,
    pub per_trial: Vec<f64>,
}

pub fn ensemble_expectation(
    n: usize,
    lam: f64,
    gamma: f64,
    trials: usize,
    seed: u64,
) -> Result<EnsembleStats> {
    if trials == 0 {
        return argument("need at least one trial");
    }
    let i_real = gamma * n as f64;
    let i = i_real.round();
    if (i_real - i).abs() > 1e-9 {
        return argument(format!("gamma·n = {i_real} is not an integer"));
    }
    let i = i as usize;
    let per_trial: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let code = sample_random_code_stream(n, lam, seed, t as u64)?;
            let cn = census_auto(&code, i)?;
            Ok((cn.nontrivial as f64 + 1.0).log2() / n as f64)
        })
        .collect::<Result<_>>()?;
    let mean = kahan(per_trial.iter().cloned()) / trials as f64;
    let std_dev = if trials > 1 {
        let ss = kahan(per_trial.iter().map(|v| (v - mean) * (v - mean)));
        (ss / (trials - 1) as f64).sqrt()
    } else {
        0.0
    };
    let mut sorted = per_trial.clone();
    sorted.sort_by(f64::total_cmp);
    let pick = |p: f64| sorted[((sorted.len() - 1) as f64 * p).round() as usize];
    let quantiles = [sorted[0], pick(0.25), pick(0.5), pick(0.75), sorted[sorted.len() - 1]];

    let h = binary_entropy(gamma)?;
    let second_branch = 2.0 * h - 2.0 * lam;
    let psi_m = psi_moment(4.0, gamma, n)?.value;
    let psi_v = psi_variational(4.0, gamma)?.value;
    Ok(EnsembleStats {
        n,
        lam,
        gamma,
        i,
        trials,
        seed,
        mean,
        std_dev,
        quantiles,
        formula_moment: (psi_m + 2.0 * h - 3.0 * lam).max(second_branch),
        formula_variational: (psi_v + 2.0 * h - 3.0 * lam).max(second_branch),
        per_trial,
    })
}

/// How often a fixed word set lands inside a random code, against the
/// exact prediction 2^{−rank·λn} (each of the λn uniform parity rows must
/// annihilate the span).
#[derive(Clone, Debug, PartialEq)]
pub struct Containment {
    pub observed: f64,
    pub predicted: f64,
    pub hits: u64,
    pub trials: usize,
}

pub fn containment_frequency(
    n: usize,
    lam: f64,
    words: &[u32],
    trials: usize,
    seed: u64,
) -> Result<Containment> {
    if words.is_empty() {
        return argument("need at least one word");
    }
    if trials == 0 {
        return argument("need at least one trial");
    }
    if n == 0 || n > crate::gf2::MAX_N {
        return capacity(format!("length {n} outside 1..={}", crate::gf2::MAX_N));
    }
    if words.iter().any(|&w| n < 32 && w >> n != 0) {
        return argument("word has bits beyond the length");
    }
    let rows = (lam * n as f64).round();
    if (lam * n as f64 - rows).abs() > 1e-9 {
        return argument(format!("lambda·n = {} is not an integer", lam * n as f64));
    }
    let rank = rank_of_words(words, n);
    let hits: u64 = (0..trials)
        .into_par_iter()
        .map(|t| {
            let code = sample_random_code_stream(n, lam, seed, t as u64)?;
            Ok(u64::from(words.iter().all(|&w| code.contains(w))))
        })
        .collect::<Result<Vec<u64>>>()?
        .into_iter()
        .sum();
    Ok(Containment {
        observed: hits as f64 / trials as f64,
        predicted: (-((rank as f64) * rows)).exp2(),
        hits,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::{full_space, reed_muller, repetition_pair, sample_random_code};

    #[test]
    fn trivial_count_matches_pattern_enumeration() {
        for m in [1u64, 2, 3, 5, 8, 13, 40] {
            let mut brute = 0u128;
            for a in 0..m {
                for b in 0..m {
                    for c in 0..m {
                        for d in 0..m {
                            let mut counts = std::collections::HashMap::new();
                            for v in [a, b, c, d] {
                                *counts.entry(v).or_insert(0u32) += 1;
                            }
                            if counts.values().all(|&c| c % 2 == 0) {
                                brute += 1;
                            }
                        }
                    }
                }
            }
            assert_eq!(trivial_count(m), brute, "m = {m}");
        }
    }

    #[test]
    fn degenerate_levels() {
        let code = reed_muller(1, 4).unwrap();
        // no codewords of odd weight
        let empty = census(&code, 3).unwrap();
        assert_eq!(empty, TupleCensus { i: 3, m: 0, total: 0, trivial: 0, nontrivial: 0 });
        // the zero word alone
        let zero_level = census(&code, 0).unwrap();
        assert_eq!(zero_level.m, 1);
        assert_eq!(zero_level.total, 1);
        assert_eq!(zero_level.trivial, 1);
        assert_eq!(zero_level.nontrivial, 0);
    }

    #[test]
    fn three_routes_agree() {
        let mut codes = vec![reed_muller(1, 4).unwrap(), repetition_pair(12).unwrap()];
        for seed in 0..5u64 {
            codes.push(sample_random_code(14, 0.5, 300 + seed).unwrap());
        }
        for code in &codes {
            for i in 0..=code.n() {
                let fast = census(code, i).unwrap();
                let spectral = census_spectral(code, i).unwrap();
                assert_eq!(fast, spectral, "spectral route, weight {i}");
                if fast.m as usize <= MAX_ORACLE_LEVEL {
                    let oracle = census_oracle(code, i).unwrap();
                    assert_eq!(fast, oracle, "oracle route, weight {i}");
                }
            }
        }
    }

    #[test]
    fn levels_partition_the_code() {
        let code = sample_random_code(12, 0.5, 9).unwrap();
        let mut members = 0u128;
        for i in 0..=code.n() {
            members += census(&code, i).unwrap().m as u128;
        }
        assert_eq!(members, 1u128 << code.k());
    }

    #[test]
    fn quad_identity_reference_codes() {
        for eps in [0.0, 0.1, 0.25, 0.4, 0.5] {
            let (a, b) = fourier_quad_identity(&full_space(8).unwrap(), eps).unwrap();
            assert!((a - 1.0).abs() <= 1e-10 && (b - 1.0).abs() <= 1e-10, "full space: {a}, {b}");
        }
        let mut codes = vec![repetition_pair(8).unwrap(), reed_muller(1, 4).unwrap()];
        for seed in 0..4u64 {
            codes.push(sample_random_code(12, 0.5, 40 + seed).unwrap());
        }
        for code in &codes {
            for t in 0..=8 {
                let eps = t as f64 / 16.0;
                let (norm_side, sum_side) = fourier_quad_identity(code, eps).unwrap();
                let rel = (norm_side - sum_side).abs() / norm_side.abs().max(1e-300);
                assert!(rel <= 1e-9, "eps {eps}: {norm_side} vs {sum_side}");
            }
        }
    }

    #[test]
    fn norm_ratio_counts_tuples() {
        // E ĝ⁴ / (E ĝ²)² = total/m² for the level-set indicator g
        let code = sample_random_code(12, 0.5, 77).unwrap();
        for i in 1..=code.n() {
            let cn = census(&code, i).unwrap();
            if cn.m == 0 {
                continue;
            }
            let level: std::collections::HashSet<u32> =
                level_words(&code, i).unwrap().into_iter().collect();
            let g = CubeFunction::new(
                code.n(),
                (0..1u32 << code.n())
                    .map(|x| if level.contains(&x) { 1.0 } else { 0.0 })
                    .collect(),
            )
            .unwrap();
            let coeffs = g.fwht();
            let len = coeffs.coefficients().len() as f64;
            let e4 = kahan(coeffs.coefficients().iter().map(|c| c.powi(4))) / len;
            let e2 = kahan(coeffs.coefficients().iter().map(|c| c * c)) / len;
            let ratio = e4 / (e2 * e2);
            let expect = cn.total as f64 / (cn.m as f64 * cn.m as f64);
            assert!(
                (ratio - expect).abs() <= 1e-9 * expect.max(1.0),
                "weight {i}: {ratio} vs {expect}"
            );
        }
    }

    #[test]
    fn census_bound_checks_out() {
        let (lhs, bound) = prop18_bound_check(&repetition_pair(8).unwrap(), 4, 0.5).unwrap();
        assert!(lhs.is_finite() && bound.is_finite());
        prop18_bound_check(&reed_muller(1, 4).unwrap(), 8, 5.0 / 16.0).unwrap();
        prop18_bound_check(&full_space(8).unwrap(), 4, 1.0).unwrap();
    }

    #[test]
    fn ensemble_at_lambda_zero_is_exact() {
        // no parity rows: every trial yields the full space
        let stats = ensemble_expectation(10, 0.0, 0.3, 4, 11).unwrap();
        let reference = census_auto(&full_space(10).unwrap(), 3).unwrap();
        let expect = (reference.nontrivial as f64 + 1.0).log2() / 10.0;
        assert_eq!(stats.std_dev, 0.0);
        for v in &stats.per_trial {
            assert!((v - expect).abs() <= 1e-12);
        }
        assert_eq!(stats.i, 3);
    }

    #[test]
    fn ensemble_is_reproducible() {
        let a = ensemble_expectation(16, 0.25, 0.5, 12, 5).unwrap();
        let b = ensemble_expectation(16, 0.25, 0.5, 12, 5).unwrap();
        assert_eq!(a.per_trial, b.per_trial);
        assert_eq!(a.mean, b.mean);
        assert_eq!(a.quantiles, b.quantiles);
        assert!(a.quantiles[0] <= a.quantiles[2] && a.quantiles[2] <= a.quantiles[4]);
        assert!(ensemble_expectation(16, 0.25, 0.33, 4, 5).is_err());
    }

    #[test]
    fn containment_matches_rank_prediction() {
        let words = [0x00Fu32, 0x0F0, 0xF00];
        assert_eq!(rank_of_words(&words, 12), 3);
        let c = containment_frequency(12, 0.25, &words, 6000, 21).unwrap();
        assert!((c.predicted - (1.0 / 512.0)).abs() < 1e-15);
        let sigma = (c.predicted * (1.0 - c.predicted) / c.trials as f64).sqrt();
        assert!(
            (c.observed - c.predicted).abs() <= 4.0 * sigma,
            "observed {} vs predicted {} (σ = {sigma})",
            c.observed,
            c.predicted
        );
        // a spanning set is always contained
        let full = containment_frequency(8, 0.0, &[0x11, 0x22], 3, 1).unwrap();
        assert_eq!(full.hits, 3);
        assert_eq!(full.predicted, 1.0);
    }

    #[test]
    fn budgets_are_enforced() {
        assert!(census(&full_space(16).unwrap(), 8).is_err());
        assert!(census_oracle(&full_space(14).unwrap(), 7).is_err());
        assert!(census_spectral(&full_space(24).unwrap(), 12).is_err());
        // the auto route falls back to pair sums for high dimension
        let wide = full_space(24).unwrap();
        assert!(census_auto(&wide, 1).is_ok());
    }
}

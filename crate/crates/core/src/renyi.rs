//! The BSC↔BEC comparison machinery: λ(q,ε), both sides of the norm
//! inequality log₂‖f_ε‖_q ≤ E_{T∼λ} log₂‖E(f|T)‖_q, the upper/lower norm
//! bounds, Rényi entropies before and after a BSC, undetected-error
//! probability, and the even-length repetition-pair closed forms.

use crate::cube::{
    conditional_expectation, log2_lq_norm, noise_operator, CubeFunction, Q,
};
use crate::erasure::m_lambda_exact;
use crate::error::{argument, inconsistency, Result};
use crate::gf2::{CoordSet, LinearCode, WeightDistribution};
use crate::psi::lambda_real;

/// Cap for the exhaustive over-all-T expectation.
pub const MAX_EXHAUSTIVE_N: usize = 12;

fn check_eps(eps: f64) -> Result<()> {
    if !(0.0..=0.5).contains(&eps) {
        return argument(format!("eps = {eps} outside [0, 1/2]"));
    }
    Ok(())
}

/// λ(q,ε) = 1 + (1/(q−1))·log₂(ε^q + (1−ε)^q); for q = ∞ the limit
/// 1 + log₂(1−ε). Requires q ≥ 1 + 10⁻⁶ (the q→1 behavior is undefined
/// here) and ε ∈ [0, 1/2].
pub fn lambda_of(q: Q, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    match q {
        Q::Infinity => Ok(1.0 + (1.0 - eps).log2()),
        Q::Finite(q) => {
            if !q.is_finite() || q < 1.0 + 1e-6 {
                return argument(format!("q = {q} must be ≥ 1 + 1e-6 (or ∞)"));
            }
            Ok(lambda_real(q, eps))
        }
    }
}

fn validate_theorem_q(q: Q) -> Result<()> {
    match q {
        Q::Infinity => Ok(()),
        Q::Finite(v) if v.fract() == 0.0 && v >= 2.0 => Ok(()),
        Q::Finite(v) => argument(format!("the norm inequality needs integer q ≥ 2 or ∞, got {v}")),
    }
}

fn validate_nonneg(f: &CubeFunction) -> Result<()> {
    if !f.is_nonnegative() {
        return argument("function must be nonnegative");
    }
    if f.values().iter().all(|&v| v == 0.0) {
        return argument("function must not be identically zero");
    }
    Ok(())
}

/// log₂‖E(f|T)‖_q for every coordinate subset T, indexed by mask.
pub fn conditional_norm_table(f: &CubeFunction, q: Q) -> Result<Vec<f64>> {
    if f.n() > MAX_EXHAUSTIVE_N {
        return crate::error::capacity(format!(
            "exhaustive subset table needs n ≤ {MAX_EXHAUSTIVE_N}, got {}",
            f.n()
        ));
    }
    let mut table = Vec::with_capacity(1 << f.n());
    for mask in 0..1u32 << f.n() {
        let t = CoordSet::from_mask(f.n(), mask)?;
        table.push(log2_lq_norm(&conditional_expectation(f, &t)?, q)?);
    }
    Ok(table)
}

/// E_{T∼λ} g(T) for a table of per-subset values indexed by mask; each
/// coordinate enters T independently with probability λ.
pub fn subset_expectation(table: &[f64], n: usize, lam: f64) -> Result<f64> {
    if table.len() != 1 << n {
        return argument(format!("expected {} table entries, got {}", 1 << n, table.len()));
    }
    if !(0.0..=1.0).contains(&lam) {
        return argument(format!("lambda = {lam} outside [0, 1]"));
    }
    let mut weights = vec![0.0f64; n + 1];
    for (t, w) in weights.iter_mut().enumerate() {
        *w = lam.powi(t as i32) * (1.0 - lam).powi((n - t) as i32);
    }
    let mut acc = 0.0;
    for (mask, &v) in table.iter().enumerate() {
        acc += weights[mask.count_ones() as usize] * v;
    }
    Ok(acc)
}

/// Both sides of the noise/erasure comparison at λ = λ(q,ε):
/// lhs = log₂‖f_ε‖_q and rhs = E_{T∼λ} log₂‖E(f|T)‖_q. When `code` is
/// given, f must be its scaled indicator and the rhs collapses to
/// ((q−1)/q)·m(λ) through the rank identity; otherwise the expectation is
/// exhaustive (n ≤ 12). Errors with an inconsistency if lhs > rhs + 10⁻⁹.
pub fn theorem12_sides(
    f: &CubeFunction,
    code: Option<&LinearCode>,
    q: Q,
    eps: f64,
) -> Result<(f64, f64)> {
    validate_theorem_q(q)?;
    validate_nonneg(f)?;
    let lam = lambda_of(q, eps)?;
    let lhs = log2_lq_norm(&noise_operator(f, eps)?, q)?;
    let rhs = match code {
        Some(c) => {
            let reference = CubeFunction::scaled_indicator(c)?;
            let same = f.n() == c.n()
                && f.values()
                    .iter()
                    .zip(reference.values())
                    .all(|(a, b)| (a - b).abs() <= 1e-9);
            if !same {
                return argument("function is not the scaled indicator of the given code");
            }
            q.conjugate_factor() * m_lambda_exact(c, lam)?
        }
        None => subset_expectation(&conditional_norm_table(f, q)?, f.n(), lam)?,
    };
    if lhs > rhs + 1e-9 {
        return inconsistency(format!("norm inequality violated: lhs {lhs} > rhs {rhs}"));
    }
    Ok((lhs, rhs))
}

/// The rigorous finite-n upper bound ((q−1)/q)·(m(R)/n + λ − R) on
/// (1/n)log₂‖f_ε‖_q for the code's scaled indicator; needs λ(q,ε) ≥ R.
pub fn prop13_upper(code: &LinearCode, q: Q, eps: f64) -> Result<f64> {
    let lam = lambda_of(q, eps)?;
    let rate = code.rate();
    if lam < rate - 1e-12 {
        return argument(format!("bound needs lambda ≥ rate, got {lam} < {rate}"));
    }
    let m_at_rate = m_lambda_exact(code, rate)?;
    Ok(q.conjugate_factor() * (m_at_rate / code.n() as f64 + (lam - rate)))
}

/// The exact lower bound (1/q)log₂(ε^q+(1−ε)^q) + (1/n)log₂‖f‖_q for
/// (1/n)log₂‖f_ε‖_q, valid for every nonnegative f; equality holds for
/// point masses.
pub fn prop13_lower(f: &CubeFunction, q: Q, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    validate_nonneg(f)?;
    match q {
        Q::Infinity => {}
        Q::Finite(v) if v.fract() == 0.0 && v >= 1.0 => {}
        Q::Finite(v) => return argument(format!("lower bound needs integer q ≥ 1 or ∞, got {v}")),
    }
    let per_coordinate = match q {
        Q::Infinity => (1.0 - eps).log2(),
        Q::Finite(v) => (eps.powf(v) + (1.0 - eps).powf(v)).log2() / v,
    };
    Ok(per_coordinate + log2_lq_norm(f, q)? / f.n() as f64)
}

/// H_q(P) = −(1/(q−1))·log₂ Σ P(ω)^q in bits; min-entropy for q = ∞.
pub fn renyi_entropy(p: &[f64], q: Q) -> Result<f64> {
    if p.is_empty() {
        return argument("empty distribution");
    }
    if p.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return argument("distribution has a negative or non-finite entry");
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return argument(format!("distribution sums to {total}, not 1"));
    }
    match q {
        Q::Infinity => {
            let max = p.iter().cloned().fold(0.0f64, f64::max);
            Ok(-max.log2())
        }
        Q::Finite(v) => {
            if !v.is_finite() || v <= 0.0 || (v - 1.0).abs() < 1e-9 {
                return argument(format!("Rényi order must be positive and ≠ 1, got {v}"));
            }
            let terms: Vec<f64> =
                p.iter().filter(|&&x| x > 0.0).map(|&x| v * x.log2()).collect();
            let peak = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let sum: f64 = terms.iter().map(|&t| (t - peak).exp2()).sum();
            Ok(-(peak + sum.log2()) / (v - 1.0))
        }
    }
}

/// Entropy accounting for X uniform on the code and Z a BSC(ε) flip
/// pattern, via log₂‖f_ε‖_q = ((q−1)/q)(n − H_q(X⊕Z)).
#[derive(Clone, Debug, PartialEq)]
pub struct RenyiReport {
    pub q: Q,
    pub eps: f64,
    pub lambda: f64,
    /// H_q(X) = k exactly.
    pub h_input: f64,
    /// H_q(X⊕Z) computed from the norm identity.
    pub h_output: f64,
    /// (1−(λ−R))n − m(R): certified only when λ ≥ R.
    pub lower: Option<f64>,
    /// (1−(λ−R))n: holds for every code.
    pub upper: f64,
}

pub fn renyi_after_bsc(code: &LinearCode, q: Q, eps: f64) -> Result<RenyiReport> {
    let lam = lambda_of(q, eps)?;
    let f = CubeFunction::scaled_indicator(code)?;
    let log2_norm = log2_lq_norm(&noise_operator(&f, eps)?, q)?;
    let n = code.n() as f64;
    let rate = code.rate();
    let h_output = n - log2_norm / q.conjugate_factor();
    let lower = if lam >= rate {
        Some((1.0 - (lam - rate)) * n - m_lambda_exact(code, rate)?)
    } else {
        None
    };
    Ok(RenyiReport {
        q,
        eps,
        lambda: lam,
        h_input: code.k() as f64,
        h_output,
        lower,
        upper: (1.0 - (lam - rate)) * n,
    })
}

/// P_ue = Σ_{i≥1} a_i ε^i (1−ε)^{n−i}: the probability that a BSC error
/// pattern is itself a nonzero codeword.
pub fn p_ue(w: &WeightDistribution, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    let n = w.n() as i32;
    let mut acc = 0.0f64;
    let mut comp = 0.0f64;
    for (i, &a) in w.counts().iter().enumerate().skip(1) {
        if a == 0 {
            continue;
        }
        let term = a as f64 * eps.powi(i as i32) * (1.0 - eps).powi(n - i as i32);
        let t = acc + term;
        comp += if acc.abs() >= term.abs() { (acc - t) + term } else { (term - t) + acc };
        acc = t;
    }
    Ok(acc + comp)
}

/// The error-exponent certificate: −(1/n)log₂P_ue against the finite-n
/// bound (1−R) − m(R)/n, under the hypothesis 1 + log₂(1−ε) ≤ R.
pub fn corollary15_check(code: &LinearCode, eps: f64) -> Result<(f64, f64)> {
    check_eps(eps)?;
    let rate = code.rate();
    if 1.0 + (1.0 - eps).log2() > rate + 1e-12 {
        return argument(format!(
            "hypothesis 1 + log2(1−eps) ≤ R fails: {} > {rate}",
            1.0 + (1.0 - eps).log2()
        ));
    }
    let n = code.n() as f64;
    let pue = p_ue(&code.weight_distribution()?, eps)?;
    let exponent = -pue.log2() / n;
    let bound = (1.0 - rate) - m_lambda_exact(code, rate)? / n;
    if exponent < bound - 1e-9 {
        return inconsistency(format!("exponent {exponent} fell below the certificate {bound}"));
    }
    Ok((exponent, bound))
}

/// [`corollary15_check`] for RM(1,m) through the closed-form weight
/// distribution and closed-form m(R), usable for lengths 2^m far past the
/// generic budget. The three weight classes are 0, n/2 (2^{m+1}−2 words)
/// and n, so P_ue is summed in the log domain.
pub fn corollary15_check_rm1(m: usize, eps: f64) -> Result<(f64, f64)> {
    check_eps(eps)?;
    if m == 0 || m > 20 {
        return argument(format!("RM(1,m) closed form needs 1 ≤ m ≤ 20, got {m}"));
    }
    let n = (1u64 << m) as f64;
    let rate = (m + 1) as f64 / n;
    if 1.0 + (1.0 - eps).log2() > rate + 1e-12 {
        return argument(format!(
            "hypothesis 1 + log2(1−eps) ≤ R fails: {} > {rate}",
            1.0 + (1.0 - eps).log2()
        ));
    }
    let mid = ((1u64 << (m + 1)) - 2) as f64;
    let t_mid = mid.log2() + n / 2.0 * (eps * (1.0 - eps)).log2();
    let t_full = n * eps.log2();
    let peak = t_mid.max(t_full);
    let log2_pue = if peak == f64::NEG_INFINITY {
        f64::NEG_INFINITY
    } else {
        peak + ((t_mid - peak).exp2() + (t_full - peak).exp2()).log2()
    };
    let exponent = -log2_pue / n;
    let bound = (1.0 - rate) - crate::erasure::rm1_m_lambda(m, rate)? / n;
    if exponent < bound - 1e-9 {
        return inconsistency(format!("exponent {exponent} fell below the certificate {bound}"));
    }
    Ok((exponent, bound))
}

/// The two per-coordinate closed forms for the repetition-pair code:
/// lhs₂ = ½log₂(1+(1−2ε)⁴) for (1/n)log₂‖f_ε‖₂² and rhs₂ = ½λ(2,ε)² for
/// (1/n)E_T log₂‖E(f|T)‖₂², plus their gap (strictly positive inside the
/// open interval: the comparison is not tight here).
pub fn repetition_pair_forms(n: usize, eps: f64) -> Result<(f64, f64, f64)> {
    if n == 0 || n % 2 != 0 {
        return argument(format!("repetition-pair length must be positive even, got {n}"));
    }
    check_eps(eps)?;
    let lhs = 0.5 * (1.0 + (1.0 - 2.0 * eps).powi(4)).log2();
    let lam = lambda_real(2.0, eps);
    let rhs = 0.5 * lam * lam;
    let gap = rhs - lhs;
    // the gap shrinks like (1/2−ε)⁴ near 1/2, so strictness is only
    // asserted where it clears floating-point resolution
    if (1e-3..=0.49).contains(&eps) && gap <= 0.0 {
        return inconsistency(format!("expected a strict gap at eps = {eps}, got {gap}"));
    }
    Ok((lhs, rhs, gap))
}

/// Checks 2g(z) > g(2z) and a negative second difference for
/// g(z) = ln(log₂(1+e^z)) on a grid of negative z — the concavity
/// mechanism behind the strict gap above.
pub fn concavity_check_g(z_grid: &[f64]) -> Result<bool> {
    if z_grid.is_empty() {
        return argument("empty grid");
    }
    if z_grid.iter().any(|&z| z >= 0.0 || !z.is_finite()) {
        return argument("grid must be strictly negative");
    }
    let g = |z: f64| (1.0 + z.exp()).log2().ln();
    for &z in z_grid {
        if 2.0 * g(z) <= g(2.0 * z) {
            return Ok(false);
        }
        let h = (z.abs() / 10.0).min(1e-4);
        if g(z + h) - 2.0 * g(z) + g(z - h) >= 0.0 {
            return Ok(false);
        }
    }
    Ok(true)
}

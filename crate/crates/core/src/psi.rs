//! Exact Krawtchouk tables, the two computation routes for the exponent
//! ψ(q, γ) (finite-n norm moments and the variational formula), and the
//! threshold algebra (y₀, y₁, f(R)) for the rhombic-tuple count bound.

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};

use crate::error::{argument, capacity, inconsistency, Result};

/// Largest table length with big-integer arithmetic.
pub const MAX_KRAWTCHOUK_N: usize = 4096;

/// Binary entropy h(t) = t log₂(1/t) + (1−t) log₂(1/(1−t)), with h(0) = h(1) = 0.
pub fn binary_entropy(t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return argument(format!("entropy argument {t} outside [0, 1]"));
    }
    if t == 0.0 || t == 1.0 {
        return Ok(0.0);
    }
    Ok(-t * t.log2() - (1.0 - t) * (1.0 - t).log2())
}

/// λ(q, ε) = 1 + (1/(q−1)) log₂(ε^q + (1−ε)^q) for a real q > 1.
/// (The q = ∞ limit, 1 + log₂(1−ε), lives with the norm code in `renyi`.)
pub(crate) fn lambda_real(q: f64, eps: f64) -> f64 {
    debug_assert!(q > 1.0 && (0.0..=0.5).contains(&eps));
    1.0 + (eps.powf(q) + (1.0 - eps).powf(q)).log2() / (q - 1.0)
}

/// Row of binomial coefficients C(n, 0..=n), exact.
pub fn binomial_row(n: usize) -> Vec<BigUint> {
    let mut row = Vec::with_capacity(n + 1);
    let mut c = BigUint::from(1u32);
    row.push(c.clone());
    for j in 0..n {
        c = c * (n - j) / (j + 1);
        row.push(c.clone());
    }
    row
}

/// Exact integer values K_i(j), j = 0..=n, of the i-th Krawtchouk polynomial
/// for length n: K_i(j) = Σ_{x ∈ L_i} (−1)^{⟨x,y⟩} for any y of weight j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KrawtchoukTable {
    n: usize,
    i: usize,
    values: Vec<BigInt>,
}

impl KrawtchoukTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.i
    }

    pub fn value(&self, j: usize) -> &BigInt {
        &self.values[j]
    }

    pub fn values(&self) -> &[BigInt] {
        &self.values
    }
}

/// Build K_i for one (n, i) by the three-term recurrence in the degree,
/// (d+1) K_{d+1}(j) = (n−2j) K_d(j) − (n−d+1) K_{d−1}(j),
/// which stays exact (every division is exact in integers).
pub fn krawtchouk_table(n: usize, i: usize) -> Result<KrawtchoukTable> {
    if n == 0 || n > MAX_KRAWTCHOUK_N {
        return capacity(format!("table length {n} outside 1..={MAX_KRAWTCHOUK_N}"));
    }
    if i > n {
        return argument(format!("degree {i} exceeds length {n}"));
    }
    let mut prev: Vec<BigInt> = vec![BigInt::from(1); n + 1];
    if i == 0 {
        return Ok(KrawtchoukTable { n, i, values: prev });
    }
    let mut cur: Vec<BigInt> = (0..=n).map(|j| BigInt::from(n as i64 - 2 * j as i64)).collect();
    for d in 1..i {
        let mut next = Vec::with_capacity(n + 1);
        for j in 0..=n {
            let num = BigInt::from(n as i64 - 2 * j as i64) * &cur[j]
                - BigInt::from((n - d + 1) as i64) * &prev[j];
            let den = BigInt::from((d + 1) as i64);
            if (&num % &den) != BigInt::zero() {
                return inconsistency(format!("Krawtchouk recurrence not exact at d={d}, j={j}"));
            }
            next.push(num / den);
        }
        prev = cur;
        cur = next;
    }
    Ok(KrawtchoukTable { n, i, values: cur })
}

/// log₂ of a positive big integer, accurate to ~3 ulp.
pub fn log2_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 53 {
        return (x.to_u64().expect("fits") as f64).log2();
    }
    let shift = bits - 53;
    let top = (x >> shift).to_u64().expect("53 bits fit");
    shift as f64 + (top as f64).log2()
}

fn log2_bigint_abs(x: &BigInt) -> f64 {
    log2_biguint(x.magnitude())
}

/// How a ψ value was produced.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PsiMethod {
    /// Minimization of the matched variational objective.
    Variational,
    /// Finite-n Krawtchouk norm moment at the recorded weight.
    Moment { n: usize, weight: usize },
}

/// A computed value of ψ(q, γ) plus provenance.
#[derive(Clone, Copy, Debug)]
pub struct PsiValue {
    pub q: f64,
    /// Requested γ; for the moment route the effective γ is `weight / n`.
    pub gamma: f64,
    pub value: f64,
    /// Minimizer ε₀ (variational route only).
    pub eps0: Option<f64>,
    pub method: PsiMethod,
    /// True when q is outside the even integers the moment identity is
    /// stated for (odd / non-integer q use |K|^q).
    pub extension: bool,
}

impl PsiValue {
    /// γ actually evaluated (weight/n for the moment route).
    pub fn effective_gamma(&self) -> f64 {
        match self.method {
            PsiMethod::Moment { n, weight } => weight as f64 / n as f64,
            PsiMethod::Variational => self.gamma,
        }
    }
}

fn check_q_gamma(q: f64, gamma: f64) -> Result<()> {
    if !(q >= 2.0) {
        return argument(format!("q = {q} must be ≥ 2"));
    }
    if !(gamma > 0.0 && gamma <= 0.5) {
        return argument(format!("gamma = {gamma} outside (0, 1/2]"));
    }
    Ok(())
}

fn is_even_integer(q: f64) -> bool {
    q.fract() == 0.0 && (q as i64) % 2 == 0
}

/// Finite-n estimate of ψ(q, γ):
/// (1/n) log₂( 2^{−n} Σ_j C(n,j) |K_i(j)|^q ) − (q/2) h(i/n), with
/// i = round(γn) (recorded in the result). Carries an O(log n / n) error.
pub fn psi_moment(q: f64, gamma: f64, n: usize) -> Result<PsiValue> {
    check_q_gamma(q, gamma)?;
    let i = (gamma * n as f64).round() as usize;
    if i == 0 || i > n {
        return argument(format!("round(gamma*n) = {i} outside 1..={n}"));
    }
    let table = krawtchouk_table(n, i)?;
    let binom = binomial_row(n);
    // log-sum-exp over j of log₂C(n,j) + q·log₂|K_i(j)|
    let mut terms = Vec::with_capacity(n + 1);
    for j in 0..=n {
        if table.value(j).is_zero() {
            continue;
        }
        terms.push(log2_biguint(&binom[j]) + q * log2_bigint_abs(table.value(j)));
    }
    let peak = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = terms.iter().map(|t| (t - peak).exp2()).sum();
    let log_s = peak + sum.log2();
    let eff = i as f64 / n as f64;
    let value = (log_s - n as f64) / n as f64 - (q / 2.0) * binary_entropy(eff)?;
    Ok(PsiValue {
        q,
        gamma,
        value,
        eps0: None,
        method: PsiMethod::Moment { n, weight: i },
        extension: !is_even_integer(q),
    })
}

/// The objective g(ε) = (q−1) λ(q,ε) − q γ log₂(1−2ε) whose minimum over
/// ε ∈ [0, 1/2] equals ψ(q,γ) + (q/2) h(γ). Unimodal in ε.
pub fn g_objective(q: f64, gamma: f64, eps: f64) -> Result<f64> {
    check_q_gamma(q, gamma)?;
    if !(0.0..0.5).contains(&eps) {
        return argument(format!("eps = {eps} outside [0, 1/2)"));
    }
    Ok((q - 1.0) * lambda_real(q, eps) - q * gamma * (1.0 - 2.0 * eps).log2())
}

/// Stationarity function a(q, ε) = (1/2−ε)((1−ε)^{q−1} − ε^{q−1}) / ((1−ε)^q + ε^q),
/// decreasing from 1/2 to 0 on ε ∈ [0, 1/2].
fn stationarity(q: f64, eps: f64) -> f64 {
    (0.5 - eps) * ((1.0 - eps).powf(q - 1.0) - eps.powf(q - 1.0))
        / ((1.0 - eps).powf(q) + eps.powf(q))
}

/// ψ(q, γ) by the variational route: bisection for the ε₀ with
/// a(q, ε₀) = γ, then g(ε₀) − (q/2) h(γ). Bisection tolerance 10⁻¹⁴ in ε
/// (downstream exponents amplify the error by O(q/(1−2ε)), still far below
/// every consumer's tolerance). γ = 1/2 hits the exact endpoint ε₀ = 0.
pub fn psi_variational(q: f64, gamma: f64) -> Result<PsiValue> {
    check_q_gamma(q, gamma)?;
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if stationarity(q, mid) > gamma {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let eps0 = 0.5 * (lo + hi);
    let value = g_objective(q, gamma, eps0)? - (q / 2.0) * binary_entropy(gamma)?;
    Ok(PsiValue {
        q,
        gamma,
        value,
        eps0: Some(eps0),
        method: PsiMethod::Variational,
        extension: !is_even_integer(q),
    })
}

/// Threshold f(R) = 8^R + 1 − 3 √(8^{2R−1} + 8^{R−1}); decreases from
/// f(0) = 1/2 to f(1) = 0.
pub fn prop18_threshold(r: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&r) {
        return argument(format!("rate {r} outside [0, 1]"));
    }
    let e8 = 8f64.powf(r);
    Ok(e8 + 1.0 - 3.0 * (e8 * e8 / 8.0 + e8 / 8.0).sqrt())
}

/// The two algebraic roots of the tuple-count threshold, with their noise
/// rates via y = (1−2ε)².
#[derive(Clone, Copy, Debug)]
pub struct ThresholdRoots {
    pub y0: f64,
    pub y1: f64,
    pub eps0: f64,
    pub eps1: f64,
}

/// y₀ = (6γ−3 + √((3−6γ)² + 4γ(1−γ))) / (2(1−γ)) — the root of
/// γ = (y²+3y)/(y²+6y+1) — and y₁ = √(8 + 8^{1−R}) − 3 — the root of
/// y² + 6y + 1 = 8^{1−R}, equivalently λ(4, ε₁) = 1 − R.
pub fn y0_y1(r: f64, gamma: f64) -> Result<ThresholdRoots> {
    if !(0.0..=1.0).contains(&r) {
        return argument(format!("rate {r} outside [0, 1]"));
    }
    if !(0.0..=0.5).contains(&gamma) {
        return argument(format!("gamma {gamma} outside [0, 1/2]"));
    }
    let y0 = (6.0 * gamma - 3.0
        + ((3.0 - 6.0 * gamma).powi(2) + 4.0 * gamma * (1.0 - gamma)).sqrt())
        / (2.0 * (1.0 - gamma));
    let y1 = (8.0 + 8f64.powf(1.0 - r)).sqrt() - 3.0;
    let eps_of = |y: f64| 0.5 * (1.0 - y.max(0.0).sqrt());
    Ok(ThresholdRoots { y0, y1, eps0: eps_of(y0), eps1: eps_of(y1) })
}

/// Per-coordinate exponent bound for the non-trivial 4-tuple count of a
/// random rate-R code at relative weight γ:
/// ψ(4,γ) + 2h(γ) − 3(1−R) when γ ≥ f(R), otherwise −2γ log₂(y₁).
/// The two branches agree on the curve γ = f(R).
pub fn prop18_bound(r: f64, gamma: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&r) {
        return argument(format!("rate {r} outside [0, 1]"));
    }
    if !(gamma > 0.0 && gamma <= 0.5) {
        return argument(format!("gamma {gamma} outside (0, 1/2]"));
    }
    if gamma >= prop18_threshold(r)? {
        let psi = psi_variational(4.0, gamma)?.value;
        Ok(psi + 2.0 * binary_entropy(gamma)? - 3.0 * (1.0 - r))
    } else {
        let roots = y0_y1(r, gamma)?;
        Ok(-2.0 * gamma * roots.y1.log2())
    }
}

//! Real-valued functions on {0,1}^n under the uniform measure: the
//! Walsh–Hadamard transform, the noise operator T_ε (spectral and direct
//! kernel forms), ℓ_q norms, and conditional expectations on coordinate
//! subsets. Dense 2^n storage throughout.

use crate::error::{argument, capacity, Result};
use crate::gf2::{CoordSet, LinearCode};

/// Dense-storage budget for cube functions.
pub const MAX_DENSE_N: usize = 20;
/// Budget for the O(4^n) direct kernel sum.
pub const MAX_DIRECT_N: usize = 10;

/// Norm index: a finite q ≥ 1 or ∞.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Q {
    Finite(f64),
    Infinity,
}

impl Q {
    /// (q−1)/q, the conjugate factor in all code-norm identities; 1 for ∞.
    pub fn conjugate_factor(&self) -> f64 {
        match *self {
            Q::Finite(q) => (q - 1.0) / q,
            Q::Infinity => 1.0,
        }
    }

    pub fn is_integer(&self) -> bool {
        match *self {
            Q::Finite(q) => q.fract() == 0.0,
            Q::Infinity => true,
        }
    }

    fn validate_norm(&self) -> Result<()> {
        if let Q::Finite(q) = *self {
            if !(q >= 1.0) || !q.is_finite() {
                return argument(format!("norm index q = {q} must be ≥ 1 (or ∞)"));
            }
        }
        Ok(())
    }
}

impl std::fmt::Display for Q {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            Q::Finite(q) => write!(f, "{q}"),
            Q::Infinity => write!(f, "inf"),
        }
    }
}

/// A function {0,1}^n → ℝ stored point-wise; index x packs coordinate j
/// into bit j.
#[derive(Clone, Debug, PartialEq)]
pub struct CubeFunction {
    n: usize,
    values: Vec<f64>,
}

/// The same function in the Walsh basis: `coefficients[x]` multiplies the
/// character w_x(y) = (−1)^{⟨x,y⟩}.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralFunction {
    n: usize,
    coefficients: Vec<f64>,
}

fn check_dense(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DENSE_N {
        return capacity(format!("cube dimension {n} outside 1..={MAX_DENSE_N}"));
    }
    Ok(())
}

/// In-place unnormalized Hadamard butterfly; applying it twice multiplies
/// by 2^n.
fn hadamard_in_place(v: &mut [f64]) {
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

impl CubeFunction {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        check_dense(n)?;
        if values.len() != 1 << n {
            return argument(format!("expected {} values, got {}", 1 << n, values.len()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return argument("cube function has a non-finite entry");
        }
        Ok(Self { n, values })
    }

    pub fn constant(n: usize, c: f64) -> Result<Self> {
        Self::new(n, vec![c; 1 << n])
    }

    /// The scaled indicator f = (2^n / |C|) · 1_C, the distribution-like
    /// function with E f = 1 attached to a code.
    pub fn scaled_indicator(code: &LinearCode) -> Result<Self> {
        check_dense(code.n())?;
        let scale = (1u64 << (code.n() - code.k())) as f64;
        let mut values = vec![0.0; 1 << code.n()];
        for w in code.codewords()? {
            values[w.bits() as usize] = scale;
        }
        Ok(Self { n: code.n(), values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, x: u32) -> f64 {
        self.values[x as usize]
    }

    /// E_x f(x) under the uniform measure.
    pub fn mean(&self) -> f64 {
        kahan_sum(self.values.iter().cloned()) / self.values.len() as f64
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    /// Forward transform: ĝ(x) = E_y f(y) (−1)^{⟨x,y⟩}.
    pub fn fwht(&self) -> SpectralFunction {
        let mut coefficients = self.values.clone();
        hadamard_in_place(&mut coefficients);
        let scale = 1.0 / (1u64 << self.n) as f64;
        for c in &mut coefficients {
            *c *= scale;
        }
        SpectralFunction { n: self.n, coefficients }
    }
}

impl SpectralFunction {
    pub fn new(n: usize, coefficients: Vec<f64>) -> Result<Self> {
        check_dense(n)?;
        if coefficients.len() != 1 << n {
            return argument(format!(
                "expected {} coefficients, got {}",
                1 << n,
                coefficients.len()
            ));
        }
        Ok(Self { n, coefficients })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn coefficient(&self, x: u32) -> f64 {
        self.coefficients[x as usize]
    }

    /// Inverse transform: f(y) = Σ_x ĝ(x) (−1)^{⟨x,y⟩}.
    pub fn inverse(&self) -> CubeFunction {
        let mut values = self.coefficients.clone();
        hadamard_in_place(&mut values);
        CubeFunction { n: self.n, values }
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(0.0..=0.5).contains(&eps) {
        return argument(format!("eps = {eps} outside [0, 1/2]"));
    }
    Ok(())
}

/// The noise operator T_ε, computed spectrally: the coefficient at
/// frequency x is damped by (1−2ε)^{|x|}. Preserves the mean, and maps
/// nonnegative functions to nonnegative functions (up to rounding).
pub fn noise_operator(f: &CubeFunction, eps: f64) -> Result<CubeFunction> {
    check_eps(eps)?;
    let mut spectral = f.fwht();
    let mut damp = [0.0f64; MAX_DENSE_N + 1];
    for (w, d) in damp.iter_mut().enumerate().take(f.n + 1) {
        *d = (1.0 - 2.0 * eps).powi(w as i32);
    }
    for (x, c) in spectral.coefficients.iter_mut().enumerate() {
        *c *= damp[(x as u32).count_ones() as usize];
    }
    Ok(spectral.inverse())
}

/// The same operator as an explicit O(4^n) kernel sum
/// (T_ε f)(x) = Σ_y ε^{|y−x|} (1−ε)^{n−|y−x|} f(y); the oracle for
/// [`noise_operator`].
pub fn noise_operator_direct(f: &CubeFunction, eps: f64) -> Result<CubeFunction> {
    check_eps(eps)?;
    if f.n > MAX_DIRECT_N {
        return capacity(format!("direct kernel sum needs n ≤ {MAX_DIRECT_N}, got {}", f.n));
    }
    let n = f.n;
    let mut kernel = [0.0f64; MAX_DIRECT_N + 1];
    for (d, kv) in kernel.iter_mut().enumerate().take(n + 1) {
        *kv = eps.powi(d as i32) * (1.0 - eps).powi((n - d) as i32);
    }
    let size = 1usize << n;
    let mut out = vec![0.0; size];
    for (x, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        let mut comp = 0.0;
        for (y, &fy) in f.values.iter().enumerate() {
            let term = kernel[(x ^ y).count_ones() as usize] * fy;
            // Kahan step
            let t = acc + term;
            comp += if acc.abs() >= term.abs() { (acc - t) + term } else { (term - t) + acc };
            acc = t;
        }
        *o = acc + comp;
    }
    Ok(CubeFunction { n, values: out })
}

fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut acc = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = acc + v;
        comp += if acc.abs() >= v.abs() { (acc - t) + v } else { (v - t) + acc };
        acc = t;
    }
    acc + comp
}

/// log₂ ‖f‖_q under the expectation measure. Norms with q < 8 accumulate
/// |f|^q with compensated summation; q ≥ 8 goes through log-sum-exp so huge
/// powers cannot overflow. Non-integer q requires f ≥ 0 (up to rounding).
pub fn log2_lq_norm(f: &CubeFunction, q: Q) -> Result<f64> {
    q.validate_norm()?;
    match q {
        Q::Infinity => {
            let m = f.values.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
            Ok(m.log2())
        }
        Q::Finite(q) => {
            if q.fract() != 0.0 {
                let floor = -1e-12 * (1.0 + f.values.iter().fold(0.0f64, |m, &v| m.max(v.abs())));
                if f.values.iter().any(|&v| v < floor) {
                    return argument("non-integer q needs a nonnegative function");
                }
            }
            let n = f.n as f64;
            if q < 8.0 {
                let powed = f.values.iter().map(|&v| pow_abs(v, q));
                let mean = kahan_sum(powed) / f.values.len() as f64;
                Ok(mean.log2() / q)
            } else {
                // log-sum-exp in base 2
                let mut terms = Vec::with_capacity(f.values.len());
                for &v in &f.values {
                    if v != 0.0 {
                        terms.push(q * v.abs().log2());
                    }
                }
                if terms.is_empty() {
                    return Ok(f64::NEG_INFINITY);
                }
                let peak = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let sum: f64 = kahan_sum(terms.iter().map(|&t| (t - peak).exp2()));
                Ok((peak + sum.log2() - n) / q)
            }
        }
    }
}

/// ‖f‖_q = (E_x |f(x)|^q)^{1/q}; max |f| for q = ∞.
pub fn lq_norm(f: &CubeFunction, q: Q) -> Result<f64> {
    Ok(log2_lq_norm(f, q)?.exp2())
}

fn pow_abs(v: f64, q: f64) -> f64 {
    let a = v.abs();
    if q.fract() == 0.0 && q <= i32::MAX as f64 {
        a.powi(q as i32)
    } else {
        a.powf(q)
    }
}

/// E(f|T)(x) = E_{y: y_T = x_T} f(y): constant on the fibers of the
/// T-projection. E(f|∅) ≡ E f and E(f|full) = f.
pub fn conditional_expectation(f: &CubeFunction, t: &CoordSet) -> Result<CubeFunction> {
    if t.n() != f.n {
        return argument(format!(
            "coordinate set over length {} but function has n = {}",
            t.n(),
            f.n
        ));
    }
    let mask = t.mask() as usize;
    let mut sums = vec![0.0f64; f.values.len()];
    for (y, &v) in f.values.iter().enumerate() {
        sums[y & mask] += v;
    }
    let fiber = (f.values.len() >> t.len()) as f64;
    let values = (0..f.values.len()).map(|x| sums[x & mask] / fiber).collect();
    Ok(CubeFunction { n: f.n, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::{full_space, repetition_pair, reed_muller, sample_random_code};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn random_function(n: usize, seed: u64) -> CubeFunction {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        CubeFunction::new(n, (0..1usize << n).map(|_| rng.random::<f64>() * 2.0 - 0.7).collect())
            .unwrap()
    }

    fn random_nonneg(n: usize, seed: u64) -> CubeFunction {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        CubeFunction::new(n, (0..1usize << n).map(|_| rng.random::<f64>() + 1e-3).collect())
            .unwrap()
    }

    fn assert_close(a: f64, b: f64, tol: f64, what: &str) {
        assert!((a - b).abs() <= tol, "{what}: {a} vs {b}");
    }

    #[test]
    fn transform_of_constant() {
        let f = CubeFunction::constant(5, 1.0).unwrap();
        let s = f.fwht();
        assert_close(s.coefficient(0), 1.0, 1e-15, "mean coefficient");
        for x in 1..32u32 {
            assert_close(s.coefficient(x), 0.0, 1e-15, "other coefficients");
        }
    }

    #[test]
    fn code_indicator_spectrum() {
        // f = (2^n/|D|)·1_D with D = C⊥ has coefficients exactly 1_C
        for code in [repetition_pair(6).unwrap(), reed_muller(1, 3).unwrap()] {
            let dual = code.dual();
            let f = CubeFunction::scaled_indicator(&dual).unwrap();
            let s = f.fwht();
            for x in 0..1u32 << code.n() {
                let expect = if code.contains(x) { 1.0 } else { 0.0 };
                assert_close(s.coefficient(x), expect, 1e-12, "spectrum of code indicator");
            }
        }
    }

    #[test]
    fn round_trip_and_parseval() {
        for n in [4usize, 8, 12] {
            let f = random_function(n, n as u64);
            let back = f.fwht().inverse();
            for (a, b) in f.values().iter().zip(back.values()) {
                assert_close(*a, *b, 1e-12, "round trip");
            }
            let s = f.fwht();
            let e2: f64 = f.values().iter().map(|v| v * v).sum::<f64>() / (1 << n) as f64;
            let coef2: f64 = s.coefficients().iter().map(|c| c * c).sum();
            assert_close(e2, coef2, 1e-12, "Parseval");
        }
    }

    #[test]
    fn noise_operator_endpoints() {
        let f = random_function(7, 3);
        let same = noise_operator(&f, 0.0).unwrap();
        for (a, b) in f.values().iter().zip(same.values()) {
            assert_close(*a, *b, 1e-12, "eps = 0 identity");
        }
        let flat = noise_operator(&f, 0.5).unwrap();
        for v in flat.values() {
            assert_close(*v, f.mean(), 1e-12, "eps = 1/2 flattens to the mean");
        }
        assert!(noise_operator(&f, 0.6).is_err());
        assert!(noise_operator(&f, -0.1).is_err());
    }

    #[test]
    fn noised_point_mass() {
        // (δ_0)_ε(x) = ε^{|x|} (1−ε)^{n−|x|}, under the scaled convention
        let n = 6;
        let mut values = vec![0.0; 64];
        values[0] = 64.0; // scaled point mass, E f = 1
        let f = CubeFunction::new(n, values).unwrap();
        let g = noise_operator(&f, 0.3).unwrap();
        for x in 0..64u32 {
            let w = x.count_ones() as i32;
            let expect = 64.0 * 0.3f64.powi(w) * 0.7f64.powi(n as i32 - w);
            assert_close(g.value(x), expect, 1e-12, "noised point mass");
        }
    }

    #[test]
    fn direct_kernel_agrees_with_spectral() {
        for seed in 0..50u64 {
            let f = random_function(8, 100 + seed);
            for eps in [0.05, 0.2, 0.45] {
                let a = noise_operator(&f, eps).unwrap();
                let b = noise_operator_direct(&f, eps).unwrap();
                for (x, y) in a.values().iter().zip(b.values()) {
                    assert!((x - y).abs() <= 1e-10, "direct vs spectral: {x} vs {y}");
                }
            }
        }
        assert!(noise_operator_direct(&random_function(11, 0), 0.1).is_err());
    }

    #[test]
    fn noise_semigroup() {
        let f = random_function(8, 9);
        let e1 = 0.1;
        let e2 = 0.25;
        let e3 = 0.5 * (1.0 - (1.0 - 2.0 * e1) * (1.0 - 2.0 * e2));
        let two_step = noise_operator(&noise_operator(&f, e1).unwrap(), e2).unwrap();
        let one_step = noise_operator(&f, e3).unwrap();
        for (a, b) in two_step.values().iter().zip(one_step.values()) {
            assert_close(*a, *b, 1e-12, "semigroup");
        }
    }

    #[test]
    fn noise_preserves_mean_and_positivity() {
        let f = random_nonneg(9, 4);
        for eps in [0.0, 0.1, 0.3, 0.5] {
            let g = noise_operator(&f, eps).unwrap();
            assert_close(g.mean(), f.mean(), 1e-12, "mean preserved");
            assert!(g.values().iter().all(|&v| v >= -1e-12), "positivity preserved");
        }
    }

    #[test]
    fn norms_basic() {
        let f = CubeFunction::constant(6, 2.5).unwrap();
        for q in [Q::Finite(1.0), Q::Finite(2.0), Q::Finite(3.5), Q::Infinity] {
            assert_close(lq_norm(&f, q).unwrap(), 2.5, 1e-12, "constant norm");
        }
        assert!(lq_norm(&f, Q::Finite(0.5)).is_err());

        // scaled code indicator: (1/n) log₂‖f‖_q = ((q−1)/q)(1−R)
        let code = reed_muller(1, 4).unwrap();
        let f = CubeFunction::scaled_indicator(&code).unwrap();
        let rate = code.rate();
        for q in [Q::Finite(2.0), Q::Finite(3.0), Q::Finite(7.0), Q::Finite(16.0), Q::Infinity] {
            let got = log2_lq_norm(&f, q).unwrap() / code.n() as f64;
            assert_close(got, q.conjugate_factor() * (1.0 - rate), 1e-10, "indicator norm");
        }
    }

    #[test]
    fn norms_monotone_in_q() {
        // fractional q needs nonnegative inputs, integer q does not
        for seed in 0..20u64 {
            let f = random_nonneg(8, 200 + seed);
            let mut prev = 0.0;
            for (t, q) in [1.0, 1.5, 2.0, 3.0, 4.0, 8.0, 12.0].iter().enumerate() {
                let v = lq_norm(&f, Q::Finite(*q)).unwrap();
                if t > 0 {
                    assert!(v >= prev - 1e-12, "norm decreased from {prev} to {v} at q={q}");
                }
                prev = v;
            }
            let inf = lq_norm(&f, Q::Infinity).unwrap();
            assert!(inf >= prev - 1e-12);
        }
        for seed in 0..20u64 {
            let f = random_function(8, 500 + seed);
            let mut prev = 0.0;
            for (t, q) in [1.0, 2.0, 3.0, 4.0, 8.0].iter().enumerate() {
                let v = lq_norm(&f, Q::Finite(*q)).unwrap();
                if t > 0 {
                    assert!(v >= prev - 1e-12, "norm decreased from {prev} to {v} at q={q}");
                }
                prev = v;
            }
            assert!(lq_norm(&f, Q::Infinity).unwrap() >= prev - 1e-12);
            assert!(lq_norm(&f, Q::Finite(1.5)).is_err());
        }
    }

    #[test]
    fn log_domain_matches_direct_accumulation() {
        let f = random_nonneg(8, 77);
        for q in [8.0, 10.0, 16.0] {
            let direct = {
                let mean: f64 =
                    f.values().iter().map(|v| v.powf(q)).sum::<f64>() / f.values().len() as f64;
                mean.log2() / q
            };
            assert_close(log2_lq_norm(&f, Q::Finite(q)).unwrap(), direct, 1e-10, "log domain");
        }
    }

    #[test]
    fn conditional_expectation_limits() {
        let f = random_function(7, 5);
        let empty = conditional_expectation(&f, &CoordSet::empty(7).unwrap()).unwrap();
        for v in empty.values() {
            assert_close(*v, f.mean(), 1e-12, "E(f|∅) is the mean");
        }
        let full = conditional_expectation(&f, &CoordSet::full(7).unwrap()).unwrap();
        assert_eq!(full.values(), f.values());
    }

    #[test]
    fn conditional_expectation_tower_exhaustive() {
        let f = random_function(6, 6);
        for t_mask in 0..1u32 << 6 {
            let t = CoordSet::from_mask(6, t_mask).unwrap();
            let inner = conditional_expectation(&f, &t).unwrap();
            // S ⊆ T
            let mut s_mask = t_mask;
            loop {
                let s = CoordSet::from_mask(6, s_mask).unwrap();
                let a = conditional_expectation(&inner, &s).unwrap();
                let b = conditional_expectation(&f, &s).unwrap();
                for (x, y) in a.values().iter().zip(b.values()) {
                    assert_close(*x, *y, 1e-12, "tower property");
                }
                if s_mask == 0 {
                    break;
                }
                s_mask = (s_mask - 1) & t_mask;
            }
        }
    }

    #[test]
    fn conditional_norms_of_code_indicator() {
        // log₂‖E(f|T)‖_q = ((q−1)/q)(|T| − r_C(T)), all T exhaustively
        for code in [sample_random_code(8, 0.5, 1).unwrap(), reed_muller(1, 3).unwrap()] {
            let n = code.n();
            let f = CubeFunction::scaled_indicator(&code).unwrap();
            for mask in 0..1u32 << n {
                let t = CoordSet::from_mask(n, mask).unwrap();
                let e = conditional_expectation(&f, &t).unwrap();
                let deficiency = (t.len() - code.rank_of_columns(&t).unwrap()) as f64;
                for q in [Q::Finite(2.0), Q::Finite(3.0), Q::Finite(4.0), Q::Infinity] {
                    let got = log2_lq_norm(&e, q).unwrap();
                    assert_close(
                        got,
                        q.conjugate_factor() * deficiency,
                        1e-9,
                        "conditional norm identity",
                    );
                }
            }
        }
    }

    #[test]
    fn noise_norm_monotone_in_eps() {
        for seed in 0..10u64 {
            let f = random_nonneg(8, 300 + seed);
            for q in [Q::Finite(2.0), Q::Finite(4.0), Q::Infinity] {
                let mut prev = f64::INFINITY;
                for t in 0..=10 {
                    let eps = 0.05 * t as f64;
                    let v = lq_norm(&noise_operator(&f, eps).unwrap(), q).unwrap();
                    assert!(v <= prev + 1e-12, "‖f_eps‖ increased at eps={eps}");
                    prev = v;
                }
            }
        }
    }

    #[test]
    fn scaled_indicator_mean_one() {
        for code in [full_space(6).unwrap(), repetition_pair(8).unwrap(), reed_muller(2, 4).unwrap()]
        {
            let f = CubeFunction::scaled_indicator(&code).unwrap();
            assert_close(f.mean(), 1.0, 1e-12, "E f = 1");
        }
    }
}

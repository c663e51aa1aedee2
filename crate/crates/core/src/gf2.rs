//! Exact GF(2) linear algebra: packed bit vectors, linear codes in canonical
//! reduced-row-echelon form, duals, ranks of column subsets, codeword
//! enumeration, weight distributions, and the standard constructors used by
//! the rest of the library.
//!
//! Block length is capped at [`MAX_N`] and dimension at [`MAX_K`] so every
//! enumeration fits in word-packed arrays; larger lengths are only reachable
//! through closed forms (see `erasure`).

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{argument, capacity, inconsistency, parse_err, Result};
use crate::psi::krawtchouk_table;

/// Largest supported block length.
pub const MAX_N: usize = 30;
/// Largest supported code dimension for full enumeration.
pub const MAX_K: usize = 26;

/// A binary vector of length `n ≤ 30`, packed into a single word.
/// Coordinate `j` is bit `j`; bits at positions `≥ n` are always zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    n: u8,
    bits: u32,
}

impl BitVector {
    pub fn new(n: usize, bits: u32) -> Result<Self> {
        check_len(n)?;
        if n < 32 && bits >> n != 0 {
            return argument(format!("bits 0x{bits:x} exceed length {n}"));
        }
        Ok(Self { n: n as u8, bits })
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::new(n, 0)
    }

    pub fn len(&self) -> usize {
        self.n as usize
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Hamming weight |v|.
    pub fn weight(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn get(&self, j: usize) -> bool {
        debug_assert!(j < self.len());
        self.bits >> j & 1 == 1
    }

    /// Coordinate-wise sum over GF(2).
    pub fn xor(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return argument("length mismatch in xor");
        }
        Ok(Self { n: self.n, bits: self.bits ^ other.bits })
    }

    /// Inner product ⟨u, v⟩ mod 2.
    pub fn dot(&self, other: &Self) -> Result<bool> {
        if self.n != other.n {
            return argument("length mismatch in dot");
        }
        Ok((self.bits & other.bits).count_ones() % 2 == 1)
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.len() {
            write!(f, "{}", if self.get(j) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

/// A subset of coordinates `{0, .., n-1}`, stored as a bit mask.
/// Externally coordinates are 0-based everywhere.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct CoordSet {
    n: u8,
    mask: u32,
}

impl CoordSet {
    pub fn from_mask(n: usize, mask: u32) -> Result<Self> {
        check_len(n)?;
        if n < 32 && mask >> n != 0 {
            return argument(format!("coordinate set mask 0x{mask:x} exceeds length {n}"));
        }
        Ok(Self { n: n as u8, mask })
    }

    pub fn from_indices(n: usize, indices: &[usize]) -> Result<Self> {
        check_len(n)?;
        let mut mask = 0u32;
        for &j in indices {
            if j >= n {
                return argument(format!("coordinate {j} out of range for length {n}"));
            }
            mask |= 1 << j;
        }
        Ok(Self { n: n as u8, mask })
    }

    pub fn empty(n: usize) -> Result<Self> {
        Self::from_mask(n, 0)
    }

    pub fn full(n: usize) -> Result<Self> {
        check_len(n)?;
        Ok(Self { n: n as u8, mask: low_mask(n) })
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    /// |T|
    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn contains(&self, j: usize) -> bool {
        j < self.n() && self.mask >> j & 1 == 1
    }

    pub fn complement(&self) -> Self {
        Self { n: self.n, mask: self.mask ^ low_mask(self.n as usize) }
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..self.n()).filter(|&j| self.contains(j)).collect()
    }
}

impl fmt::Debug for CoordSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CoordSet{:?}", self.indices())
    }
}

fn check_len(n: usize) -> Result<()> {
    if n == 0 || n > MAX_N {
        return argument(format!("length {n} outside 1..={MAX_N}"));
    }
    Ok(())
}

fn low_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// Row-reduce `rows` in place over GF(2), processing columns left to right.
/// Returns the rank; afterwards `rows[..rank]` is in reduced row-echelon
/// form with pivot columns strictly increasing.
fn rref(rows: &mut Vec<u32>, n: usize) -> usize {
    let mut r = 0;
    for col in 0..n {
        let bit = 1u32 << col;
        let Some(sel) = (r..rows.len()).find(|&i| rows[i] & bit != 0) else {
            continue;
        };
        rows.swap(r, sel);
        let pivot_row = rows[r];
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && *row & bit != 0 {
                *row ^= pivot_row;
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    r
}

/// Rank over GF(2) of a list of packed rows (non-destructive oracle).
pub fn rank_of_words(rows: &[u32], n: usize) -> usize {
    let mut work: Vec<u32> = rows.to_vec();
    rref(&mut work, n)
}

/// A binary linear code, stored as a canonical reduced-row-echelon basis so
/// equality of `LinearCode` values is equality of codeword sets.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LinearCode {
    n: usize,
    k: usize,
    rows: Vec<u32>,
}

impl LinearCode {
    /// Build from a claimed basis; rejects linearly dependent generators.
    pub fn from_generators(n: usize, generators: &[u32]) -> Result<Self> {
        check_len(n)?;
        for (i, &g) in generators.iter().enumerate() {
            if n < 32 && g >> n != 0 {
                return argument(format!("generator {i} has bits past length {n}"));
            }
        }
        let mut rows = generators.to_vec();
        let rank = rref(&mut rows, n);
        if rank != generators.len() {
            return argument(format!(
                "generators are linearly dependent (rank {rank} < {})",
                generators.len()
            ));
        }
        Ok(Self { n, k: rank, rows })
    }

    /// Build from any spanning set (reduces away dependencies).
    pub fn from_span(n: usize, vectors: &[u32]) -> Result<Self> {
        check_len(n)?;
        for &v in vectors {
            if n < 32 && v >> n != 0 {
                return argument(format!("vector has bits past length {n}"));
            }
        }
        let mut rows = vectors.to_vec();
        let rank = rref(&mut rows, n);
        rows.truncate(rank);
        Ok(Self { n, k: rank, rows })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Rate R = k/n.
    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    /// Canonical generator rows (RREF, pivots ascending). Empty for k = 0.
    pub fn generator_rows(&self) -> &[u32] {
        &self.rows
    }

    pub fn generators(&self) -> Vec<BitVector> {
        self.rows.iter().map(|&r| BitVector { n: self.n as u8, bits: r }).collect()
    }

    /// Membership test by reduction against the canonical basis.
    pub fn contains(&self, word: u32) -> bool {
        let mut w = word;
        for &row in &self.rows {
            let pivot = row.trailing_zeros();
            if w >> pivot & 1 == 1 {
                w ^= row;
            }
        }
        w == 0
    }

    /// Rank r_C(T) of the generator-matrix columns indexed by `T`.
    /// Independent of the basis used: row rank of the restricted rows equals
    /// column rank of the submatrix.
    pub fn rank_of_columns(&self, t: &CoordSet) -> Result<usize> {
        if t.n() != self.n {
            return argument(format!(
                "coordinate set is over length {} but code has length {}",
                t.n(),
                self.n
            ));
        }
        let mask = t.mask();
        let mut restricted: Vec<u32> = self.rows.iter().map(|&r| r & mask).collect();
        Ok(rref(&mut restricted, self.n))
    }

    /// The dual code C⊥ of dimension n − k.
    pub fn dual(&self) -> LinearCode {
        let mut pivots = Vec::with_capacity(self.k);
        for &row in &self.rows {
            pivots.push(row.trailing_zeros() as usize);
        }
        let pivot_set: u32 = pivots.iter().map(|&p| 1u32 << p).sum();
        let mut duals = Vec::with_capacity(self.n - self.k);
        for f in 0..self.n {
            if pivot_set >> f & 1 == 1 {
                continue;
            }
            let mut h = 1u32 << f;
            for (r, &p) in pivots.iter().enumerate() {
                if self.rows[r] >> f & 1 == 1 {
                    h |= 1 << p;
                }
            }
            duals.push(h);
        }
        let mut rows = duals;
        let rank = rref(&mut rows, self.n);
        debug_assert_eq!(rank, self.n - self.k);
        LinearCode { n: self.n, k: rank, rows }
    }

    /// Iterate all 2^k codewords exactly once, in Gray-code order (adjacent
    /// words differ by one generator).
    pub fn codewords(&self) -> Result<CodewordIter<'_>> {
        if self.k > MAX_K {
            return capacity(format!("dimension {} exceeds enumeration budget {MAX_K}", self.k));
        }
        Ok(CodewordIter { code: self, counter: 0, current: 0 })
    }

    /// Exact weight distribution (a_0, …, a_n) by enumeration.
    pub fn weight_distribution(&self) -> Result<WeightDistribution> {
        let mut counts = vec![0u64; self.n + 1];
        for w in self.codewords()? {
            counts[w.weight()] += 1;
        }
        Ok(WeightDistribution { n: self.n, counts })
    }

    /// All codewords of weight exactly `i` (the level set C ∩ L_i).
    pub fn level_set(&self, i: usize) -> Result<Vec<BitVector>> {
        if i > self.n {
            return argument(format!("weight {i} exceeds length {}", self.n));
        }
        Ok(self.codewords()?.filter(|w| w.weight() == i).collect())
    }
}

impl fmt::Debug for LinearCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LinearCode(n={}, k={})", self.n, self.k)
    }
}

/// Gray-code enumeration of a code's words.
pub struct CodewordIter<'a> {
    code: &'a LinearCode,
    counter: u64,
    current: u32,
}

impl Iterator for CodewordIter<'_> {
    type Item = BitVector;

    fn next(&mut self) -> Option<BitVector> {
        if self.counter >= 1u64 << self.code.k {
            return None;
        }
        if self.counter > 0 {
            let flip = self.counter.trailing_zeros() as usize;
            self.current ^= self.code.rows[flip];
        }
        self.counter += 1;
        Some(BitVector { n: self.code.n as u8, bits: self.current })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (1u64 << self.code.k) - self.counter;
        (left as usize, Some(left as usize))
    }
}

/// The full space {0,1}^n (G = identity).
pub fn full_space(n: usize) -> Result<LinearCode> {
    check_len(n)?;
    let rows: Vec<u32> = (0..n).map(|j| 1u32 << j).collect();
    LinearCode::from_generators(n, &rows)
}

/// The zero code {0} (k = 0).
pub fn zero_code(n: usize) -> Result<LinearCode> {
    check_len(n)?;
    Ok(LinearCode { n, k: 0, rows: Vec::new() })
}

/// The code {(u, u) : u ∈ {0,1}^{n/2}} — each coordinate duplicated once.
/// Self-dual for every even n.
pub fn repetition_pair(n: usize) -> Result<LinearCode> {
    check_len(n)?;
    if n % 2 != 0 {
        return argument(format!("repetition-pair code needs even length, got {n}"));
    }
    let half = n / 2;
    let rows: Vec<u32> = (0..half).map(|j| (1u32 << j) | (1u32 << (j + half))).collect();
    LinearCode::from_generators(n, &rows)
}

/// Reed–Muller code RM(r, m): rows are evaluations of monomials of degree
/// ≤ r over {0,1}^m, so n = 2^m and k = Σ_{j≤r} C(m, j).
pub fn reed_muller(r: usize, m: usize) -> Result<LinearCode> {
    if r > m {
        return argument(format!("RM order {r} exceeds number of variables {m}"));
    }
    let n = 1usize << m;
    if n > MAX_N {
        return capacity(format!("RM(?, {m}) has length {n} > {MAX_N}"));
    }
    let mut rows = Vec::new();
    for s in 0..1u32 << m {
        if (s.count_ones() as usize) > r {
            continue;
        }
        // evaluation vector of the monomial Π_{j ∈ s} y_j
        let mut row = 0u32;
        for y in 0..n as u32 {
            if y & s == s {
                row |= 1 << y;
            }
        }
        rows.push(row);
    }
    LinearCode::from_generators(n, &rows)
}

/// Weight distribution of RM(1, m) in closed form, valid for any m (the
/// explicit constructor is capped at 2^m ≤ 30): one word of weight 0, one of
/// weight n, and 2^{m+1} − 2 of weight n/2.
pub fn rm1_weight_distribution(m: usize) -> Result<WeightDistribution> {
    if m == 0 || m > 20 {
        return argument(format!("RM(1, {m}) weight distribution: m outside 1..=20"));
    }
    let n = 1usize << m;
    let mut counts = vec![0u64; n + 1];
    counts[0] = 1;
    counts[n / 2] = (1u64 << (m + 1)) - 2;
    counts[n] = 1;
    Ok(WeightDistribution { n, counts })
}

/// Kernel basis of the matrix with the given rows (as a code of length `n`).
pub(crate) fn kernel_basis(n: usize, rows: &[u32]) -> Result<LinearCode> {
    let span = LinearCode::from_span(n, rows)?;
    Ok(span.dual())
}

/// The kernel of a uniformly random λn × n binary matrix, as a linear code.
/// Deterministic in `seed`; dimension is whatever the sampled matrix gives
/// (≥ n − λn, with equality for most seeds), never resampled.
pub fn sample_random_code(n: usize, lam: f64, seed: u64) -> Result<LinearCode> {
    sample_random_code_stream(n, lam, seed, 0)
}

/// Like [`sample_random_code`], with an extra stream index so ensembles can
/// derive per-trial RNGs as (seed, trial) without coordination.
pub fn sample_random_code_stream(n: usize, lam: f64, seed: u64, stream: u64) -> Result<LinearCode> {
    check_len(n)?;
    if !(0.0..=1.0).contains(&lam) {
        return argument(format!("lambda {lam} outside [0, 1]"));
    }
    let rows_f = lam * n as f64;
    let rows = rows_f.round() as usize;
    if (rows_f - rows as f64).abs() > 1e-9 {
        return argument(format!("lambda*n = {rows_f} is not an integer"));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mask = low_mask(n);
    let matrix: Vec<u32> = (0..rows).map(|_| rng.next_u32() & mask).collect();
    kernel_basis(n, &matrix)
}

/// Exact counts (a_0, …, a_n) of codewords by Hamming weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightDistribution {
    n: usize,
    counts: Vec<u64>,
}

impl WeightDistribution {
    pub fn new(n: usize, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != n + 1 {
            return argument(format!("expected {} counts, got {}", n + 1, counts.len()));
        }
        Ok(Self { n, counts })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, i: usize) -> u64 {
        self.counts[i]
    }

    /// Total number of codewords Σ a_i (= 2^k for a linear code).
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// MacWilliams transform: the dual distribution b_j = 2^{−k} Σ_i a_i K_j(i)
/// of a dimension-k code's distribution. Exact in big integers; inputs whose
/// transform has a negative or non-integral entry are rejected.
pub fn macwilliams_transform(w: &WeightDistribution, k: usize) -> Result<WeightDistribution> {
    let n = w.n;
    check_len(n)?;
    if k > n {
        return argument(format!("dimension {k} exceeds length {n}"));
    }
    let tables: Vec<_> = (0..=n).map(|j| krawtchouk_table(n, j)).collect::<Result<_>>()?;
    let denom = BigInt::from(1u64) << k;
    let mut counts = Vec::with_capacity(n + 1);
    for table in &tables {
        let mut acc = BigInt::zero();
        for (i, &a) in w.counts.iter().enumerate() {
            if a != 0 {
                acc += BigInt::from(a) * table.value(i);
            }
        }
        if (&acc % &denom) != BigInt::zero() {
            return inconsistency(format!(
                "MacWilliams transform is not integral at weight {} (sum {acc}, 2^k = {denom})",
                counts.len()
            ));
        }
        let b = acc / &denom;
        let Some(b) = (&b).to_u64() else {
            return inconsistency(format!(
                "MacWilliams transform has a negative or oversized entry {b} at weight {}",
                counts.len()
            ));
        };
        counts.push(b);
    }
    Ok(WeightDistribution { n, counts })
}

/// Parse the matrix file format: first line "n k", then k rows of n
/// characters from {0,1}; row t is generator t, character j is coordinate j.
pub fn parse_code(text: &str) -> Result<LinearCode> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = match lines.next() {
        Some(h) => h,
        None => return parse_err("empty code file"),
    };
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 2 {
        return parse_err(format!("header must be \"n k\", got {header:?}"));
    }
    let n: usize = fields[0]
        .parse()
        .map_err(|_| crate::error::Error::Parse(format!("bad n in header {header:?}")))?;
    let k: usize = fields[1]
        .parse()
        .map_err(|_| crate::error::Error::Parse(format!("bad k in header {header:?}")))?;
    check_len(n)?;
    if k > n {
        return parse_err(format!("dimension {k} exceeds length {n}"));
    }
    let mut rows = Vec::with_capacity(k);
    for t in 0..k {
        let Some(line) = lines.next() else {
            return parse_err(format!("expected {k} generator rows, found {t}"));
        };
        let line = line.trim();
        if line.len() != n {
            return parse_err(format!("row {t} has {} characters, expected {n}", line.len()));
        }
        let mut bits = 0u32;
        for (j, c) in line.chars().enumerate() {
            match c {
                '0' => {}
                '1' => bits |= 1 << j,
                other => return parse_err(format!("row {t} has invalid character {other:?}")),
            }
        }
        rows.push(bits);
    }
    if lines.next().is_some() {
        return parse_err(format!("trailing content after {k} generator rows"));
    }
    LinearCode::from_generators(n, &rows)
        .map_err(|e| crate::error::Error::Parse(format!("invalid generators: {e}")))
}

/// Inverse of [`parse_code`]'s format, for round-trips and test fixtures.
pub fn format_code(c: &LinearCode) -> String {
    let mut out = format!("{} {}\n", c.n, c.k);
    for g in c.generators() {
        out.push_str(&g.to_string());
        out.push('\n');
    }
    out
}

/// Set of all codewords, for brute-force oracles in tests.
pub fn codeword_set(c: &LinearCode) -> Result<HashSet<u32>> {
    Ok(c.codewords()?.map(|w| w.bits()).collect())
}

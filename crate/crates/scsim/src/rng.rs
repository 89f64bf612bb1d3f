//! Deterministic number sources that drive bit-stream generation.
//!
//! Every source is an indexable pure function of `(spec, index)`: calling
//! [`SequenceSource::value_at`] with the same index always yields the same
//! value, so sweeps can be sharded freely across threads and re-run
//! bit-identically. A streaming view is available via [`SequenceSource::iter`]
//! for cycle-by-cycle simulation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rational number. Denominators are powers of the base when produced
/// by [`radical_inverse`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rational {
    pub numerator: u64,
    pub denominator: u64,
}

impl Rational {
    pub fn new(numerator: u64, denominator: u64) -> Self {
        assert!(denominator > 0, "denominator must be positive");
        Rational {
            numerator,
            denominator,
        }
    }

    pub fn to_f64(self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }

    /// Reduce to lowest terms.
    pub fn reduced(self) -> Self {
        let g = gcd(self.numerator.max(1), self.denominator);
        Rational {
            numerator: self.numerator / g,
            denominator: self.denominator / g,
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl std::fmt::Display for Rational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

/// Reverse the base-`base` digits of `i` and read them as a fraction in [0,1).
///
/// `radical_inverse(77, 5)` reverses the digits of `(302)_5` into `(0.203)_5`,
/// i.e. `53/125`.
pub fn radical_inverse(i: u64, base: u64) -> Result<Rational> {
    if base < 2 {
        return Err(Error::invalid(format!("radical inverse base {base} < 2")));
    }
    let mut numerator: u64 = 0;
    let mut denominator: u64 = 1;
    let mut rest = i;
    while rest > 0 {
        numerator = numerator * base + rest % base;
        denominator *= base;
        rest /= base;
    }
    Ok(Rational::new(numerator, denominator).reduced())
}

/// Group-reversal value of an `m`-bit counter at index `i`, the hardware
/// realisation of the base-2^n radical inverse.
///
/// The counter word is split into n-bit groups (least-significant group
/// first), zero-padded to a whole number of groups, the group order is
/// reversed by hardwiring, and the top `m` bits of the reversed word are
/// kept. Equivalent to `floor(radical_inverse(i mod 2^m, 2^n) * 2^m)`;
/// the equivalence is asserted in tests. When `n` does not divide `m` the
/// truncation makes the map non-injective, matching the hardware.
pub fn vdc_value_at(n: u32, m: u32, i: u64) -> u64 {
    assert!(n >= 1 && m >= 1 && m <= 63, "need 1 <= m <= 63, n >= 1");
    let i = i & ((1u64 << m) - 1);
    let groups = m.div_ceil(n);
    let total = groups * n;
    let group_mask = (1u64 << n) - 1;
    let mut word: u64 = 0;
    for k in 0..groups {
        let g = (i >> (k * n)) & group_mask;
        word |= g << (total - (k + 1) * n);
    }
    word >> (total - m)
}

/// Fibonacci LFSR state after `i` shifts from `seed`.
///
/// `taps` are the nonzero exponents of the feedback polynomial (the constant
/// term is implicit); the feedback bit is the XOR of the tapped register
/// bits, with bit `t` of the state standing for exponent `t` (bit 1 = LSB).
///
/// The sequence is treated as periodic with period `2^m - 1`, which matches
/// the free-running register exactly for the maximal polynomials the
/// bundled configurations use.
pub fn lfsr_value_at(taps: &[u32], m: u32, seed: u64, i: u64) -> Result<u64> {
    let mask = (1u64 << m) - 1;
    let seed = seed & mask;
    if seed == 0 {
        return Err(Error::invalid("LFSR seed must be nonzero (lock-up state)"));
    }
    if taps.iter().any(|&t| t == 0 || t > m) {
        return Err(Error::invalid(format!(
            "LFSR tap exponents must lie in 1..={m}"
        )));
    }
    let mut s = seed;
    for _ in 0..(i % mask) {
        s = lfsr_step(taps, m, s);
    }
    Ok(s)
}

#[inline]
pub fn lfsr_step(taps: &[u32], m: u32, s: u64) -> u64 {
    let mask = (1u64 << m) - 1;
    let mut f = 0u64;
    for &t in taps {
        f ^= (s >> (t - 1)) & 1;
    }
    ((s << 1) | f) & mask
}

/// Orbit length of the LFSR from `seed`; equals `2^m - 1` for a maximal
/// polynomial. Used by tests and the config loader to verify tap sets.
pub fn lfsr_orbit_len(taps: &[u32], m: u32, seed: u64) -> Result<u64> {
    let mask = (1u64 << m) - 1;
    let seed = seed & mask;
    if seed == 0 {
        return Err(Error::invalid("LFSR seed must be nonzero"));
    }
    let mut s = lfsr_step(taps, m, seed);
    let mut len = 1u64;
    while s != seed {
        s = lfsr_step(taps, m, s);
        len += 1;
        if len > mask + 1 {
            return Err(Error::invalid("LFSR orbit did not close"));
        }
    }
    Ok(len)
}

/// Direction-number seeds for the bundled Sobol dimensions
/// (Joe–Kuo `new-joe-kuo-6.21201` table, dimensions 2..=5; dimension 1 is
/// the base-2 radical inverse by construction and needs no table row).
/// Entries are `(a, m_init)` with `a` the inner coefficient bits of the
/// primitive polynomial.
const SOBOL_DIMS: &[(u32, &[u64])] = &[
    (0, &[1]),       // dimension 1 (placeholder; special-cased below)
    (0, &[1]),       // dimension 2: s=1
    (1, &[1, 3]),    // dimension 3: s=2, x^2+x+1
    (1, &[1, 3, 1]), // dimension 4: s=3
    (2, &[1, 1, 1]), // dimension 5: s=3
];

/// Direction numbers for `dimension` at output width `m`.
pub fn sobol_direction_numbers(dimension: u32, m: u32) -> Result<Vec<u64>> {
    if dimension == 0 || dimension as usize > SOBOL_DIMS.len() {
        return Err(Error::invalid(format!(
            "Sobol dimension {dimension} outside bundled table (1..={})",
            SOBOL_DIMS.len()
        )));
    }
    if dimension == 1 {
        return Ok((1..=m).map(|k| 1u64 << (m - k)).collect());
    }
    let (poly, m_init) = SOBOL_DIMS[dimension as usize - 1];
    let s = m_init.len();
    let mut mk: Vec<u64> = m_init.to_vec();
    for k in s..m as usize {
        // m_k = 2 a_1 m_{k-1} ^ 4 a_2 m_{k-2} ^ ... ^ 2^s m_{k-s} ^ m_{k-s}
        let mut v = mk[k - s] ^ (mk[k - s] << s);
        for j in 1..s {
            if (poly as usize >> (s - 1 - j)) & 1 == 1 {
                v ^= mk[k - j] << j;
            }
        }
        mk.push(v);
    }
    Ok((1..=m as usize).map(|k| mk[k - 1] << (m as usize - k)).collect())
}

/// Sobol value at index `i` (natural binary order: XOR of the direction
/// numbers selected by the bits of `i`), truncated to `m` bits.
pub fn sobol_value_at(dimension: u32, m: u32, i: u64) -> Result<u64> {
    let v = sobol_direction_numbers(dimension, m)?;
    let i = i & ((1u64 << m) - 1);
    let mut x = 0u64;
    for (k, vk) in v.iter().enumerate() {
        if (i >> k) & 1 == 1 {
            x ^= vk;
        }
    }
    Ok(x)
}

/// A deterministic, indexable generator of integers in `[0, 2^m)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SequenceSource {
    /// Plain binary up counter: `value_at(i) = i mod 2^m`.
    Counter { m: u32 },
    /// Van der Corput generator in base 2^n (n-bit group reversal).
    Vdc { m: u32, n: u32 },
    /// Maximal-length Fibonacci LFSR.
    Lfsr { m: u32, taps: Vec<u32>, seed: u64 },
    /// Binary Sobol generator for one bundled dimension.
    Sobol { m: u32, dimension: u32 },
}

impl SequenceSource {
    pub fn counter(m: u32) -> Self {
        SequenceSource::Counter { m }
    }

    /// VDC source for base `2^n`.
    pub fn vdc(m: u32, n: u32) -> Self {
        SequenceSource::Vdc { m, n }
    }

    /// LFSR with all-ones default seed.
    pub fn lfsr(m: u32, taps: Vec<u32>) -> Self {
        SequenceSource::Lfsr {
            m,
            taps,
            seed: (1u64 << m) - 1,
        }
    }

    pub fn lfsr_seeded(m: u32, taps: Vec<u32>, seed: u64) -> Self {
        SequenceSource::Lfsr { m, taps, seed }
    }

    pub fn sobol(m: u32, dimension: u32) -> Self {
        SequenceSource::Sobol { m, dimension }
    }

    /// Output width in bits; values lie in `[0, 2^m)`.
    pub fn width(&self) -> u32 {
        match *self {
            SequenceSource::Counter { m }
            | SequenceSource::Vdc { m, .. }
            | SequenceSource::Lfsr { m, .. }
            | SequenceSource::Sobol { m, .. } => m,
        }
    }

    /// Value at index `i`. Pure: equal specs agree on every index.
    pub fn value_at(&self, i: u64) -> Result<u64> {
        match self {
            SequenceSource::Counter { m } => Ok(i & ((1u64 << m) - 1)),
            SequenceSource::Vdc { m, n } => Ok(vdc_value_at(*n, *m, i)),
            SequenceSource::Lfsr { m, taps, seed } => lfsr_value_at(taps, *m, *seed, i),
            SequenceSource::Sobol { m, dimension } => sobol_value_at(*dimension, *m, i),
        }
    }

    /// Streaming adapter over `value_at` starting at `offset`.
    pub fn iter(&self, offset: u64) -> SourceIter<'_> {
        let state = match self {
            SequenceSource::Lfsr { m, taps, seed } => {
                IterState::Lfsr(lfsr_value_at(taps, *m, *seed, offset).unwrap_or(1))
            }
            SequenceSource::Sobol { m, dimension } => IterState::Sobol(
                sobol_direction_numbers(*dimension, *m).unwrap_or_default(),
            ),
            _ => IterState::Plain,
        };
        SourceIter {
            source: self,
            state,
            index: offset,
        }
    }
}

impl std::fmt::Display for SequenceSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SequenceSource::Counter { m } => write!(f, "counter[{m}b]"),
            SequenceSource::Vdc { m, n } => write!(f, "vdc-{}[{m}b]", 1u64 << n),
            SequenceSource::Lfsr { m, taps, seed } => {
                write!(f, "lfsr{{{:?}}}[{m}b,seed={seed}]", taps)
            }
            SequenceSource::Sobol { m, dimension } => write!(f, "sobol-{dimension}[{m}b]"),
        }
    }
}

enum IterState {
    Plain,
    Lfsr(u64),
    Sobol(Vec<u64>),
}

/// Iterator view of a source. LFSRs carry the register state (one shift per
/// cycle instead of `i` shifts per call); Sobol caches direction numbers.
pub struct SourceIter<'a> {
    source: &'a SequenceSource,
    state: IterState,
    index: u64,
}

impl Iterator for SourceIter<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let out = match (self.source, &mut self.state) {
            (SequenceSource::Lfsr { m, taps, .. }, IterState::Lfsr(state)) => {
                let out = *state;
                *state = lfsr_step(taps, *m, *state);
                out
            }
            (SequenceSource::Sobol { m, .. }, IterState::Sobol(v)) => {
                let i = self.index & ((1u64 << m) - 1);
                let mut x = 0u64;
                for (k, vk) in v.iter().enumerate() {
                    if (i >> k) & 1 == 1 {
                        x ^= vk;
                    }
                }
                x
            }
            _ => self.source.value_at(self.index).ok()?,
        };
        self.index += 1;
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radical_inverse_base5_digit_reversal() {
        // 77 = (302)_5, reversed (0.203)_5 = 53/125
        assert_eq!(radical_inverse(77, 5).unwrap(), Rational::new(53, 125));
    }

    #[test]
    fn radical_inverse_of_zero_is_zero() {
        for base in [2, 3, 5, 16, 1024] {
            assert_eq!(radical_inverse(0, base).unwrap(), Rational::new(0, 1));
        }
    }

    #[test]
    fn radical_inverse_base2() {
        // 6 = 110_2, reversed 0.011_2 = 3/8
        assert_eq!(radical_inverse(6, 2).unwrap(), Rational::new(3, 8));
    }

    #[test]
    fn radical_inverse_rejects_small_base() {
        assert!(radical_inverse(3, 1).is_err());
        assert!(radical_inverse(3, 0).is_err());
    }

    #[test]
    fn vdc_bit_reversal_m3() {
        let seq: Vec<u64> = (0..8).map(|i| vdc_value_at(1, 3, i)).collect();
        assert_eq!(seq, vec![0, 4, 2, 6, 1, 5, 3, 7]);
    }

    #[test]
    fn vdc_identity_when_single_group() {
        // n = m: one group, reversal is the identity
        for m in [3u32, 6, 10] {
            for i in 0..(1u64 << m) {
                assert_eq!(vdc_value_at(m, m, i), i);
            }
        }
    }

    #[test]
    fn vdc_two_bit_groups() {
        // i=6 = 0110, groups LSB-first [10, 01], reversed word 1001 = 9
        assert_eq!(vdc_value_at(2, 4, 6), 9);
    }

    #[test]
    fn vdc_matches_radical_inverse_oracle() {
        for n in 1..=12u32 {
            for m in 1..=10u32 {
                let big = 1u64 << m;
                for i in 0..big {
                    let r = radical_inverse(i, 1 << n).unwrap();
                    let expect = r.numerator * big / r.denominator;
                    assert_eq!(vdc_value_at(n, m, i), expect, "n={n} m={m} i={i}");
                }
            }
        }
    }

    #[test]
    fn vdc_prefix_equidistribution() {
        // Every aligned 2^k prefix of the VDC-2 sequence covers each dyadic
        // interval exactly once.
        let m = 8u32;
        for k in 1..=m {
            let cells = 1u64 << k;
            let width = 1u64 << (m - k);
            let mut seen = vec![0u32; cells as usize];
            for i in 0..cells {
                seen[(vdc_value_at(1, m, i) / width) as usize] += 1;
            }
            assert!(seen.iter().all(|&c| c == 1), "k={k}: {seen:?}");
        }
    }

    #[test]
    fn vdc_truncation_not_injective_when_n_misaligned() {
        // n=9, m=10 drops one bit: every even value appears exactly twice.
        let mut counts = std::collections::HashMap::new();
        for i in 0..1024u64 {
            *counts.entry(vdc_value_at(9, 10, i)).or_insert(0u32) += 1;
        }
        assert_eq!(counts.len(), 512);
        assert!(counts.iter().all(|(v, c)| v % 2 == 0 && *c == 2));
    }

    #[test]
    fn lfsr_rejects_zero_seed() {
        assert!(lfsr_value_at(&[3, 2], 3, 0, 1).is_err());
    }

    #[test]
    fn lfsr_m3_enumerates_nonzero_states() {
        // x^3 + x^2 + 1, seed 001: the first 7 states cover {1..7}
        let mut states = std::collections::BTreeSet::new();
        for i in 0..7 {
            states.insert(lfsr_value_at(&[3, 2], 3, 1, i).unwrap());
        }
        assert_eq!(states, (1..=7).collect());
    }

    #[test]
    fn lfsr_periodicity() {
        let taps = [10, 8, 5, 4];
        let period = lfsr_orbit_len(&taps, 10, 1023).unwrap();
        assert_eq!(period, 1023);
        for i in [0u64, 5, 100] {
            assert_eq!(
                lfsr_value_at(&taps, 10, 1023, i).unwrap(),
                lfsr_value_at(&taps, 10, 1023, i + period).unwrap()
            );
        }
    }

    #[test]
    fn lfsr_bundled_polynomials_are_maximal() {
        // The tap sets used by the baseline configs, all verified maximal.
        let pairs: &[(u32, &[u32])] = &[
            (10, &[10, 8, 6, 1]),
            (10, &[10, 8, 5, 4]),
            (9, &[9, 5]),
            (9, &[9, 8, 7, 2]),
            (8, &[8, 7, 6, 1]),
            (8, &[8, 6, 5, 4]),
            (7, &[7, 6]),
            (7, &[7, 3]),
            (6, &[6, 5]),
            (6, &[6, 1]),
        ];
        for (m, taps) in pairs {
            let seed = (1u64 << m) - 1;
            assert_eq!(
                lfsr_orbit_len(taps, *m, seed).unwrap(),
                (1u64 << m) - 1,
                "taps {taps:?} at m={m} not maximal"
            );
        }
    }

    #[test]
    fn lfsr_never_emits_zero() {
        let src = SequenceSource::lfsr(10, vec![10, 8, 5, 4]);
        for i in 0..1023 {
            assert_ne!(src.value_at(i).unwrap(), 0);
        }
    }

    #[test]
    fn sobol_dimension_one_is_binary_radical_inverse() {
        for m in [3u32, 6, 10] {
            for i in 0..(1u64 << m) {
                assert_eq!(sobol_value_at(1, m, i).unwrap(), vdc_value_at(1, m, i));
            }
        }
    }

    #[test]
    fn sobol_index_zero_is_zero() {
        for d in 1..=4u32 {
            assert_eq!(sobol_value_at(d, 10, 0).unwrap(), 0);
        }
    }

    #[test]
    fn sobol_dimension_two_first_eight_distinct() {
        let vals: Vec<u64> = (0..8).map(|i| sobol_value_at(2, 4, i).unwrap()).collect();
        let set: std::collections::BTreeSet<u64> = vals.iter().copied().collect();
        assert_eq!(set.len(), 8);
        // even-spaced: all values share the stride of 2 at this width
        assert!(vals.iter().all(|v| v % 2 == 0));
    }

    #[test]
    fn sobol_one_period_is_a_permutation() {
        for d in 1..=4u32 {
            let m = 8;
            let set: std::collections::BTreeSet<u64> =
                (0..256).map(|i| sobol_value_at(d, m, i).unwrap()).collect();
            assert_eq!(set.len(), 256, "dimension {d}");
        }
    }

    #[test]
    fn sobol_rejects_unknown_dimension() {
        assert!(sobol_value_at(99, 10, 3).is_err());
        assert!(sobol_value_at(0, 10, 3).is_err());
    }

    #[test]
    fn iter_matches_value_at() {
        let sources = [
            SequenceSource::counter(6),
            SequenceSource::vdc(10, 3),
            SequenceSource::lfsr(8, vec![8, 6, 5, 4]),
            SequenceSource::sobol(10, 2),
        ];
        for src in &sources {
            for offset in [0u64, 7] {
                let direct: Vec<u64> = (0..40).map(|i| src.value_at(offset + i).unwrap()).collect();
                let streamed: Vec<u64> = src.iter(offset).take(40).collect();
                assert_eq!(direct, streamed, "{src}");
            }
        }
    }
}

//! The bit-stream value representation.
//!
//! A stream is a fixed-length binary sequence with positional time semantics:
//! bit `i` is the logic level during clock cycle `i`, and the encoded value is
//! the fraction of ones. Streams are packed into `u64` words so gate and
//! counting operations run word-parallel; the long baseline sweeps need on
//! the order of 1e10 bit operations and would crawl on `Vec<bool>`.

use crate::error::{Error, Result};
use crate::rng::{Rational, SequenceSource};

/// Immutable fixed-length binary sequence; value = ones / length.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bitstream {
    words: Vec<u64>,
    len: usize,
}

impl Bitstream {
    pub fn zeros(len: usize) -> Self {
        assert!(len > 0, "bit-stream length must be positive");
        Bitstream {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut s = Bitstream::zeros(len);
        for w in &mut s.words {
            *w = u64::MAX;
        }
        s.trim_tail();
        s
    }

    /// Builds from one bit per item; index 0 is the first clock cycle.
    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut words = Vec::new();
        let mut len = 0usize;
        let mut current = 0u64;
        for b in bits {
            if b {
                current |= 1u64 << (len % 64);
            }
            len += 1;
            if len % 64 == 0 {
                words.push(current);
                current = 0;
            }
        }
        if len % 64 != 0 {
            words.push(current);
        }
        assert!(len > 0, "bit-stream length must be positive");
        Bitstream { words, len }
    }

    /// Parses a 0/1 character string, leftmost character = cycle 0.
    pub fn parse(text: &str) -> Result<Self> {
        let bits: Result<Vec<bool>> = text
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::invalid(format!("bad stream character {other:?}"))),
            })
            .collect();
        let bits = bits?;
        if bits.is_empty() {
            return Err(Error::invalid("empty stream text"));
        }
        Ok(Bitstream::from_bits(bits))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    fn set(&mut self, i: usize, b: bool) {
        if b {
            self.words[i / 64] |= 1u64 << (i % 64);
        } else {
            self.words[i / 64] &= !(1u64 << (i % 64));
        }
    }

    /// Count of logic-1 positions.
    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Decoded value as an exact rational ones/N.
    pub fn decode(&self) -> Rational {
        Rational::new(self.count_ones(), self.len as u64)
    }

    pub fn decode_f64(&self) -> f64 {
        self.count_ones() as f64 / self.len as f64
    }

    fn trim_tail(&mut self) {
        let tail = self.len % 64;
        if tail != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
    }

    fn check_len(&self, other: &Bitstream) -> Result<()> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                left: self.len,
                right: other.len,
            });
        }
        Ok(())
    }

    pub fn and(&self, other: &Bitstream) -> Result<Bitstream> {
        self.zip_words(other, |a, b| a & b)
    }

    pub fn or(&self, other: &Bitstream) -> Result<Bitstream> {
        self.zip_words(other, |a, b| a | b)
    }

    pub fn xor(&self, other: &Bitstream) -> Result<Bitstream> {
        self.zip_words(other, |a, b| a ^ b)
    }

    pub fn not(&self) -> Bitstream {
        let mut out = Bitstream {
            words: self.words.iter().map(|w| !w).collect(),
            len: self.len,
        };
        out.trim_tail();
        out
    }

    fn zip_words(&self, other: &Bitstream, f: impl Fn(u64, u64) -> u64) -> Result<Bitstream> {
        self.check_len(other)?;
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| f(*a, *b))
            .collect();
        let mut out = Bitstream {
            words,
            len: self.len,
        };
        out.trim_tail();
        Ok(out)
    }

    /// Circular rotation: bit `i` of the output is bit `(i+k) mod N` of the
    /// input, so a one-cycle delay element maps `11111101` to `11111011`.
    /// Rotation preserves the decoded value exactly.
    pub fn rotate(&self, k: usize) -> Bitstream {
        let k = k % self.len;
        if k == 0 {
            return self.clone();
        }
        let mut out = Bitstream::zeros(self.len);
        for i in 0..self.len {
            out.set(i, self.get((i + k) % self.len));
        }
        out
    }

    /// Non-circular shift used only for delay sensitivity studies: drops the
    /// first `k` bits and back-fills with `fill`.
    pub fn shift_in(&self, k: usize, fill: bool) -> Bitstream {
        let mut out = Bitstream::zeros(self.len);
        for i in 0..self.len {
            let src = i + k;
            out.set(i, if src < self.len { self.get(src) } else { fill });
        }
        out
    }

    pub fn iter_bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }
}

impl std::fmt::Display for Bitstream {
    /// 0/1 text, cycle 0 leftmost (the dump format).
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Joint occurrence counts of bit pairs between two equal-length streams:
/// `a` counts (1,1), `b` (1,0), `c` (0,1), `d` (0,0).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairCounts {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

impl PairCounts {
    pub fn total(&self) -> u64 {
        self.a + self.b + self.c + self.d
    }
}

/// Positional joint counts of the four logic pairs.
pub fn pair_counts(s1: &Bitstream, s2: &Bitstream) -> Result<PairCounts> {
    s1.check_len(s2)?;
    let mut a = 0u64;
    let mut b = 0u64;
    let mut c = 0u64;
    for (w1, w2) in s1.words.iter().zip(&s2.words) {
        a += (w1 & w2).count_ones() as u64;
        b += (w1 & !w2).count_ones() as u64;
        c += (!w1 & w2).count_ones() as u64;
    }
    // the tail beyond len is zero in both words, so it only inflates d
    let n = s1.len as u64;
    Ok(PairCounts {
        a,
        b,
        c,
        d: n - a - b - c,
    })
}

/// Stochastic cross-correlation of two streams, in [-1, +1].
///
/// Degenerate pairs (a denominator of zero, e.g. constant streams) report 0.
pub fn scc(s1: &Bitstream, s2: &Bitstream) -> Result<f64> {
    let pc = pair_counts(s1, s2)?;
    Ok(scc_from_counts(&pc))
}

pub fn scc_from_counts(pc: &PairCounts) -> f64 {
    let n = pc.total() as f64;
    let (a, b, c, d) = (pc.a as f64, pc.b as f64, pc.c as f64, pc.d as f64);
    let ad_bc = a * d - b * c;
    let denom = if ad_bc > 0.0 {
        n * (a + b).min(a + c) - (a + b) * (a + c)
    } else {
        (a + b) * (a + c) - n * (a - d).max(0.0)
    };
    if denom == 0.0 {
        0.0
    } else {
        ad_bc / denom
    }
}

/// Zero-correlation error: how far the pair's joint statistics sit from
/// ideal independence. Zero for maximally independent configurations.
///
/// With `delta = a/N - (a+b)(a+c)/N^2` and
/// `delta0 = floor((a+b)(a+c)/N + 1/2)/N - (a+b)(a+c)/N^2`, the metric is
/// `delta * (1 - delta0/delta)`, computed as the algebraically identical
/// `delta - delta0` and defined as 0 when `delta` vanishes.
pub fn zce(s1: &Bitstream, s2: &Bitstream) -> Result<f64> {
    let pc = pair_counts(s1, s2)?;
    Ok(zce_from_counts(&pc))
}

pub fn zce_from_counts(pc: &PairCounts) -> f64 {
    let n = pc.total() as f64;
    let p1p2 = (pc.a + pc.b) as f64 * (pc.a + pc.c) as f64;
    let delta = pc.a as f64 / n - p1p2 / (n * n);
    if delta == 0.0 {
        return 0.0;
    }
    let delta0 = (p1p2 / n + 0.5).floor() / n - p1p2 / (n * n);
    delta - delta0
}

/// Comparator encoding: bit `i` is set iff `X > value_at(offset + i)`.
///
/// `X = 0` yields all zeros and `X = N` all ones (the generator never emits a
/// value >= N). For any source whose one-period output is a permutation of
/// `[0, N)` the encoding is exact: `decode(encode(X)) = X/N`.
pub fn encode(x: u64, source: &SequenceSource, offset: u64, n: usize) -> Result<Bitstream> {
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::invalid(format!(
            "stream length {n} must be a positive power of two"
        )));
    }
    let m = n.trailing_zeros();
    if source.width() != m {
        return Err(Error::invalid(format!(
            "source width {} does not match stream length {n} (need {m} bits)",
            source.width()
        )));
    }
    if x > n as u64 {
        return Err(Error::invalid(format!("X={x} outside [0, {n}]")));
    }
    Ok(Bitstream::from_bits(
        source.iter(offset).take(n).map(|r| x > r),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SequenceSource;
    use proptest::prelude::*;

    fn bs(text: &str) -> Bitstream {
        Bitstream::parse(text).unwrap()
    }

    #[test]
    fn encode_counter_gives_prefix_ones() {
        let src = SequenceSource::counter(3);
        let s = encode(4, &src, 0, 8).unwrap();
        assert_eq!(s.to_string(), "11110000");
        assert_eq!(s.decode(), crate::rng::Rational::new(4, 8));
    }

    #[test]
    fn encode_boundaries() {
        let src = SequenceSource::vdc(3, 1);
        assert_eq!(encode(0, &src, 0, 8).unwrap().count_ones(), 0);
        assert_eq!(encode(8, &src, 0, 8).unwrap().count_ones(), 8);
    }

    #[test]
    fn encode_vdc2_interleaves() {
        let src = SequenceSource::vdc(3, 1);
        // R = [0,4,2,6,1,5,3,7], bit_i = 4 > R_i
        let s = encode(4, &src, 0, 8).unwrap();
        assert_eq!(s.to_string(), "10101010");
        assert_eq!(s.decode_f64(), 0.5);
    }

    #[test]
    fn encode_rejects_bad_inputs() {
        let src = SequenceSource::counter(3);
        assert!(encode(9, &src, 0, 8).is_err());
        assert!(encode(4, &src, 0, 16).is_err()); // width mismatch
        assert!(encode(4, &src, 0, 12).is_err()); // not a power of two
    }

    #[test]
    fn decode_examples() {
        assert_eq!(bs("11110000").decode(), crate::rng::Rational::new(4, 8));
        assert_eq!(Bitstream::ones(1024).decode_f64(), 1.0);
        // AND output of the zero-correlation operand pair
        assert_eq!(bs("00010101").decode(), crate::rng::Rational::new(3, 8));
    }

    #[test]
    fn pair_counts_paper_pairs() {
        let max_pair = pair_counts(&bs("00001111"), &bs("00111111")).unwrap();
        assert_eq!(
            max_pair,
            PairCounts {
                a: 4,
                b: 0,
                c: 2,
                d: 2
            }
        );
        let min_pair = pair_counts(&bs("11110000"), &bs("00111111")).unwrap();
        assert_eq!(
            min_pair,
            PairCounts {
                a: 2,
                b: 2,
                c: 4,
                d: 0
            }
        );
    }

    #[test]
    fn pair_counts_self() {
        let s = bs("01101001");
        let pc = pair_counts(&s, &s).unwrap();
        assert_eq!(pc.a, s.count_ones());
        assert_eq!(pc.b, 0);
        assert_eq!(pc.c, 0);
        assert_eq!(pc.d, s.len() as u64 - s.count_ones());
    }

    #[test]
    fn pair_counts_rejects_length_mismatch() {
        assert!(pair_counts(&bs("0101"), &bs("01010101")).is_err());
    }

    #[test]
    fn scc_three_reference_pairs() {
        assert_eq!(scc(&bs("00001111"), &bs("00111111")).unwrap(), 1.0);
        assert_eq!(scc(&bs("11110000"), &bs("00111111")).unwrap(), -1.0);
        assert_eq!(scc(&bs("01010101"), &bs("00111111")).unwrap(), 0.0);
    }

    #[test]
    fn scc_degenerate_streams_report_zero() {
        let s = bs("01010101");
        assert_eq!(scc(&Bitstream::zeros(8), &s).unwrap(), 0.0);
        assert_eq!(scc(&Bitstream::ones(8), &s).unwrap(), 0.0);
        assert_eq!(scc(&Bitstream::ones(8), &Bitstream::ones(8)).unwrap(), 0.0);
    }

    #[test]
    fn scc_self_is_plus_one() {
        for text in ["01010101", "00010000", "0111111011111111"] {
            let s = bs(text);
            assert_eq!(scc(&s, &s).unwrap(), 1.0, "{text}");
        }
    }

    #[test]
    fn zce_reference_values() {
        // zero-correlation pair: delta = 3/8 - 24/64 = 0
        assert_eq!(zce(&bs("01010101"), &bs("00111111")).unwrap(), 0.0);
        // maximum-correlation pair: delta = 0.125, delta0 = 0
        assert_eq!(zce(&bs("00001111"), &bs("00111111")).unwrap(), 0.125);
    }

    #[test]
    fn zce_complement_half_weight() {
        let n = 64;
        let s = encode(32, &SequenceSource::counter(6), 0, n).unwrap();
        let z = zce(&s, &s.not()).unwrap();
        assert_eq!(z, -0.25);
    }

    #[test]
    fn rotate_matches_delay_example() {
        assert_eq!(bs("11111101").rotate(1).to_string(), "11111011");
    }

    #[test]
    fn rotate_identities() {
        let s = bs("1011001110001111");
        assert_eq!(s.rotate(0), s);
        assert_eq!(s.rotate(s.len()), s);
        for k in [1, 5, 13] {
            assert_eq!(s.rotate(k).count_ones(), s.count_ones());
        }
    }

    #[test]
    fn shift_in_backfills() {
        assert_eq!(bs("11110000").shift_in(2, true).to_string(), "11000011");
        assert_eq!(bs("11110000").shift_in(2, false).to_string(), "11000000");
    }

    #[test]
    fn display_round_trips() {
        let text = "0011010111110001";
        assert_eq!(bs(text).to_string(), text);
        assert!(Bitstream::parse("01x0").is_err());
        assert!(Bitstream::parse("").is_err());
    }

    #[test]
    fn encoding_exact_for_permutation_sources() {
        for m in [6u32, 8] {
            let n = 1usize << m;
            let mut sources = vec![SequenceSource::counter(m)];
            for nn in 1..=m {
                if m % nn == 0 {
                    sources.push(SequenceSource::vdc(m, nn));
                }
            }
            for src in &sources {
                for x in 0..=(n as u64) {
                    assert_eq!(encode(x, src, 0, n).unwrap().count_ones(), x, "{src} X={x}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn scc_symmetric_and_bounded(w1 in 0u64..=u64::MAX, w2 in 0u64..=u64::MAX) {
            let s1 = Bitstream::from_bits((0..64).map(|i| (w1 >> i) & 1 == 1));
            let s2 = Bitstream::from_bits((0..64).map(|i| (w2 >> i) & 1 == 1));
            let ab = scc(&s1, &s2).unwrap();
            let ba = scc(&s2, &s1).unwrap();
            prop_assert!((ab - ba).abs() < 1e-12);
            prop_assert!((-1.0..=1.0).contains(&ab));
        }

        #[test]
        fn zce_difference_matches_quotient_form(w1 in 0u64..=u64::MAX, w2 in 0u64..=u64::MAX) {
            let s1 = Bitstream::from_bits((0..64).map(|i| (w1 >> i) & 1 == 1));
            let s2 = Bitstream::from_bits((0..64).map(|i| (w2 >> i) & 1 == 1));
            let pc = pair_counts(&s1, &s2).unwrap();
            let n = 64f64;
            let p1p2 = (pc.a + pc.b) as f64 * (pc.a + pc.c) as f64;
            let delta = pc.a as f64 / n - p1p2 / (n * n);
            let z = zce_from_counts(&pc);
            if delta != 0.0 {
                let delta0 = (p1p2 / n + 0.5).floor() / n - p1p2 / (n * n);
                let quotient_form = delta * (1.0 - delta0 / delta);
                prop_assert!((z - quotient_form).abs() < 1e-12);
            } else {
                prop_assert_eq!(z, 0.0);
            }
        }

        #[test]
        fn and_or_counting_identity(w1 in 0u64..=u64::MAX, w2 in 0u64..=u64::MAX) {
            let s1 = Bitstream::from_bits((0..64).map(|i| (w1 >> i) & 1 == 1));
            let s2 = Bitstream::from_bits((0..64).map(|i| (w2 >> i) & 1 == 1));
            let and = s1.and(&s2).unwrap();
            let or = s1.or(&s2).unwrap();
            prop_assert_eq!(and.count_ones() + or.count_ones(), s1.count_ones() + s2.count_ones());
        }

        #[test]
        fn rotation_preserves_decode(w in 0u64..=u64::MAX, k in 0usize..128) {
            let s = Bitstream::from_bits((0..64).map(|i| (w >> i) & 1 == 1));
            prop_assert_eq!(s.rotate(k).count_ones(), s.count_ones());
        }
    }
}

//! SC computational primitives.
//!
//! Combinational gates act positionally (bit-wise AND is multiplication for
//! independent operands, min/max under full correlation); the sequential
//! elements (D-FF delay, JK flip-flop divider, CORDIV, correlator) are pure
//! stream-to-stream transforms whose internal state lives only inside one
//! invocation.

use crate::bitstream::Bitstream;
use crate::error::Result;

pub fn and2(a: &Bitstream, b: &Bitstream) -> Result<Bitstream> {
    a.and(b)
}

pub fn or2(a: &Bitstream, b: &Bitstream) -> Result<Bitstream> {
    a.or(b)
}

pub fn xor2(a: &Bitstream, b: &Bitstream) -> Result<Bitstream> {
    a.xor(b)
}

pub fn not1(a: &Bitstream) -> Bitstream {
    a.not()
}

pub fn nand2(a: &Bitstream, b: &Bitstream) -> Result<Bitstream> {
    Ok(a.and(b)?.not())
}

/// Multi-input AND as a balanced fold; positional semantics make the
/// association order irrelevant.
pub fn and_all(streams: &[&Bitstream]) -> Result<Bitstream> {
    assert!(!streams.is_empty());
    let mut acc = streams[0].clone();
    for s in &streams[1..] {
        acc = acc.and(s)?;
    }
    Ok(acc)
}

/// Scaled addition: `out_i = sel_i ? a_i : b_i`. With a half-weight select
/// stream independent of the operands the output decodes to (Pa+Pb)/2.
pub fn mux_add(a: &Bitstream, b: &Bitstream, sel: &Bitstream) -> Result<Bitstream> {
    let picked_a = sel.and(a)?;
    let picked_b = sel.not().and(b)?;
    picked_a.or(&picked_b)
}

/// Scaled subtraction: `out_i = sel_i ? a_i : !b_i`, the offset-scaled
/// difference (Pa + 1 - Pb)/2 under a half-weight independent select.
pub fn mux_sub(a: &Bitstream, b: &Bitstream, sel: &Bitstream) -> Result<Bitstream> {
    mux_add(a, &b.not(), sel)
}

/// Delay element: `k` cascaded D flip-flops over the N-periodic stream,
/// modelled as circular rotation (shares the bitstream implementation).
pub fn dff_delay(s: &Bitstream, k: usize) -> Bitstream {
    s.rotate(k)
}

/// Per-cycle record of a sequential element, for trace dumps.
#[derive(Debug, Clone)]
pub struct GateTrace {
    pub inputs: Vec<Bitstream>,
    pub output: Bitstream,
    /// Internal state after each cycle's update.
    pub state_log: Vec<u64>,
}

/// JK flip-flop divider: the state evolves per the JK truth table
/// (set / reset / toggle / hold) and the post-update state is the output.
/// For independent inputs the output approximates Pj / (Pj + Pk).
pub fn jkff_div(j: &Bitstream, k: &Bitstream) -> Result<Bitstream> {
    Ok(jkff_div_traced(j, k)?.output)
}

pub fn jkff_div_traced(j: &Bitstream, k: &Bitstream) -> Result<GateTrace> {
    let n = j.len();
    if n != k.len() {
        return Err(crate::error::Error::LengthMismatch {
            left: n,
            right: k.len(),
        });
    }
    let mut state = false;
    let mut out = Vec::with_capacity(n);
    let mut log = Vec::with_capacity(n);
    for (jb, kb) in j.iter_bits().zip(k.iter_bits()) {
        state = match (jb, kb) {
            (true, false) => true,
            (false, true) => false,
            (true, true) => !state,
            (false, false) => state,
        };
        out.push(state);
        log.push(state as u64);
    }
    Ok(GateTrace {
        inputs: vec![j.clone(), k.clone()],
        output: Bitstream::from_bits(out),
        state_log: log,
    })
}

/// Correlated division: a 1-bit state drives the output whenever the divisor
/// bit is 0; when it is 1 the dividend passes through and refreshes the
/// state. Intended for maximally correlated inputs with
/// `decode(dividend) <= decode(divisor)`; the quotient approximates
/// P_dividend / P_divisor. An all-zero divisor degenerates to emitting the
/// (never-refreshed) state, with no error raised.
pub fn cordiv(dividend: &Bitstream, divisor: &Bitstream) -> Result<Bitstream> {
    Ok(cordiv_traced(dividend, divisor)?.output)
}

pub fn cordiv_traced(dividend: &Bitstream, divisor: &Bitstream) -> Result<GateTrace> {
    let n = dividend.len();
    if n != divisor.len() {
        return Err(crate::error::Error::LengthMismatch {
            left: n,
            right: divisor.len(),
        });
    }
    // state initialised to 0; the cited design leaves it unspecified, so the
    // choice is logged to keep the startup bias visible
    let mut state = false;
    let mut out = Vec::with_capacity(n);
    let mut log = Vec::with_capacity(n);
    for (a, b) in dividend.iter_bits().zip(divisor.iter_bits()) {
        let bit = if b {
            state = a;
            a
        } else {
            state
        };
        out.push(bit);
        log.push(state as u64);
    }
    Ok(GateTrace {
        inputs: vec![dividend.clone(), divisor.clone()],
        output: Bitstream::from_bits(out),
        state_log: log,
    })
}

/// Result of the in-stream correlator: the re-timed first stream, the
/// untouched second stream, and the ones left in the deferral counter when
/// the stream ended (dropped from the output, reported here).
#[derive(Debug, Clone)]
pub struct CorrelatorResult {
    pub a: Bitstream,
    pub b: Bitstream,
    pub residual: u64,
    pub state_log: Vec<u64>,
}

/// Re-times `a` against `b` so the pair's SCC rises toward +1 while the
/// decoded values are preserved (up to the residual left in the counter).
///
/// A deferral counter (init 0, saturating at `depth`) banks ones of `a` that
/// arrive while `b` is low and replays them when `b` is high:
/// `a=1, b=0, counter below depth` defers (emit 0, count up);
/// `a=0, b=1, counter positive` replays (emit 1, count down);
/// otherwise `a` passes through.
pub fn correlate_max(a: &Bitstream, b: &Bitstream, depth: u64) -> Result<(Bitstream, Bitstream)> {
    let r = correlate_max_traced(a, b, depth)?;
    Ok((r.a, r.b))
}

pub fn correlate_max_traced(a: &Bitstream, b: &Bitstream, depth: u64) -> Result<CorrelatorResult> {
    let n = a.len();
    if n != b.len() {
        return Err(crate::error::Error::LengthMismatch {
            left: n,
            right: b.len(),
        });
    }
    assert!(depth >= 1, "correlator depth must be positive");
    let mut counter = 0u64;
    let mut out = Vec::with_capacity(n);
    let mut log = Vec::with_capacity(n);
    for (abit, bbit) in a.iter_bits().zip(b.iter_bits()) {
        let emit = match (abit, bbit) {
            (true, false) if counter < depth => {
                counter += 1;
                false
            }
            (false, true) if counter > 0 => {
                counter -= 1;
                true
            }
            _ => abit,
        };
        out.push(emit);
        log.push(counter);
    }
    Ok(CorrelatorResult {
        a: Bitstream::from_bits(out),
        b: b.clone(),
        residual: counter,
        state_log: log,
    })
}

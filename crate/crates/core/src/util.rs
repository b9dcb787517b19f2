use rand::Rng;

use crate::TieBreak;

/// Indices of all maxima of `values`. Empty input gives an empty vec.
pub(crate) fn argmax_ties(values: &[f64]) -> Vec<usize> {
    let mut best = f64::NEG_INFINITY;
    let mut out = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        if v > best {
            best = v;
            out.clear();
            out.push(i);
        } else if v == best {
            out.push(i);
        }
    }
    out
}

pub(crate) fn pick<R: Rng + ?Sized>(tie: TieBreak, candidates: &[usize], rng: &mut R) -> usize {
    debug_assert!(!candidates.is_empty());
    match tie {
        TieBreak::LowestIndex => candidates[0],
        TieBreak::Random => candidates[rng.random_range(0..candidates.len())],
    }
}

pub(crate) fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        h = (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// 64-bit fingerprint of a bit string, packed 8 bits per byte.
pub(crate) fn fingerprint_bits<I: Iterator<Item = bool>>(bits: I) -> u64 {
    let mut bytes = Vec::new();
    let mut cur = 0u8;
    let mut used = 0u8;
    for b in bits {
        cur |= u8::from(b) << used;
        used += 1;
        if used == 8 {
            bytes.push(cur);
            cur = 0;
            used = 0;
        }
    }
    if used > 0 {
        bytes.push(cur);
    }
    fnv1a64(&bytes)
}

/// Shortest round-trip decimal for a float; integral values print as integers.
pub fn fmt_num(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 9.0e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

//! Pinned pseudo-random streams.
//!
//! Every seeded routine in the crate draws from a [`Stream`], which is the
//! PCG XSL-RR 128/64 generator (`pcg64`) initialised from a 64-bit key through
//! SplitMix64. The derivation is fixed so that other implementations can
//! reproduce the exact same draws:
//!
//! ```text
//! splitmix64(x):
//!     z = x + 0x9E3779B97F4A7C15            (wrapping)
//!     z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//!     z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//!     return z ^ (z >> 31)
//!
//! mix(seed, index) = splitmix64(seed ^ splitmix64(index))
//!
//! Stream::new(key):
//!     s0 = splitmix64(key), s1 = splitmix64(s0), s2 = splitmix64(s1), s3 = splitmix64(s2)
//!     pcg64(state = s0 << 64 | s1, stream = s2 << 64 | s3)
//! ```
//!
//! `pcg64(state, stream)` follows the reference C implementation
//! (`pcg64_srandom_r`): increment `= stream << 1 | 1`, then
//! `state += increment` and one LCG step before the first output.
//!
//! Derived draws:
//!
//! - `next_f64` = `(next_u64 >> 11) * 2^-53`, uniform on `[0, 1)`.
//! - `below(bound)` uses Lemire's widening-multiply rejection: with
//!   `m = next_u64 as u128 * bound`, reject while `(m as u64) < (2^64 - bound) % bound`;
//!   return `m >> 64`.
//! - `shuffle` is the descending Fisher–Yates: for `i` from `len - 1` down to 1,
//!   swap `i` with `below(i + 1)`.

use rand_core::Rng;
use rand_pcg::Pcg64;

/// One round of the SplitMix64 finaliser applied to `x + golden gamma`.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Key of the `index`-th independent substream under `seed`.
pub fn mix(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index))
}

/// A seeded `pcg64` stream.
#[derive(Clone, Debug)]
pub struct Stream {
    inner: Pcg64,
}

impl Stream {
    pub fn new(key: u64) -> Self {
        let s0 = splitmix64(key);
        let s1 = splitmix64(s0);
        let s2 = splitmix64(s1);
        let s3 = splitmix64(s2);
        let state = (u128::from(s0) << 64) | u128::from(s1);
        let stream = (u128::from(s2) << 64) | u128::from(s3);
        Self {
            inner: Pcg64::new(state, stream),
        }
    }

    /// Substream `index` of `seed`; shorthand for `Stream::new(mix(seed, index))`.
    pub fn substream(seed: u64, index: u64) -> Self {
        Self::new(mix(seed, index))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `0..bound`. `bound` must be non-zero.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "below() needs a positive bound");
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let m = u128::from(self.next_u64()) * u128::from(bound);
            if (m as u64) >= threshold {
                return (m >> 64) as u64;
            }
        }
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

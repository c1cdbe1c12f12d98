//! Counter-based Gaussian stream.
//!
//! Every draw is a pure function of `(seed, sample, step, mode)` through the
//! Philox4x32-10 bijection, so any entry can be regenerated independently of
//! the order in which entries are produced.

use statrs::function::erf::erfc_inv;

const PHILOX_M0: u32 = 0xD251_1F53;
const PHILOX_M1: u32 = 0xCD9E_8D57;
const PHILOX_W0: u32 = 0x9E37_79B9;
const PHILOX_W1: u32 = 0xBB67_AE85;

#[inline]
fn mulhilo(a: u32, b: u32) -> (u32, u32) {
    let p = a as u64 * b as u64;
    ((p >> 32) as u32, p as u32)
}

/// Philox4x32 with 10 rounds.
pub fn philox4x32_10(counter: [u32; 4], key: [u32; 2]) -> [u32; 4] {
    let mut c = counter;
    let mut k = key;
    for round in 0..10 {
        if round > 0 {
            k[0] = k[0].wrapping_add(PHILOX_W0);
            k[1] = k[1].wrapping_add(PHILOX_W1);
        }
        let (hi0, lo0) = mulhilo(PHILOX_M0, c[0]);
        let (hi1, lo1) = mulhilo(PHILOX_M1, c[2]);
        c = [hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0];
    }
    c
}

/// Keyed stream of standard normal draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GaussianStream {
    key: [u32; 2],
    sample: [u32; 2],
}

impl GaussianStream {
    pub fn new(master_seed: u64, sample_index: u64) -> Self {
        Self {
            key: [master_seed as u32, (master_seed >> 32) as u32],
            sample: [sample_index as u32, (sample_index >> 32) as u32],
        }
    }

    /// Uniform draw in the open interval (0, 1) addressed by `(step, mode)`.
    #[inline]
    pub fn uniform(&self, step: u32, mode: u32) -> f64 {
        let out = philox4x32_10([mode, step, self.sample[0], self.sample[1]], self.key);
        let bits = ((out[0] as u64) << 32 | out[1] as u64) >> 11;
        (bits as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal draw by inverse CDF of [`GaussianStream::uniform`].
    #[inline]
    pub fn normal(&self, step: u32, mode: u32) -> f64 {
        -std::f64::consts::SQRT_2 * erfc_inv(2.0 * self.uniform(step, mode))
    }
}

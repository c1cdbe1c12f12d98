//! Fast DST-I through a complex FFT of the odd extension.
//!
//! The unnormalized transform is `y_k = sum_{m=1}^{n} x_m sin(pi k m / (n + 1))`
//! for `k = 1..n`. Applying it twice returns `(n + 1) / 2` times the input.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

/// A planned DST-I of fixed length with its own scratch buffers.
///
/// Plans are cheap to clone (the FFT is shared); buffers are not shared, so
/// each worker owns its transform.
pub struct SineTransform {
    len: usize,
    fft: Arc<dyn Fft<f64>>,
    buf: Vec<Complex<f64>>,
    scratch: Vec<Complex<f64>>,
}

impl Clone for SineTransform {
    fn clone(&self) -> Self {
        Self {
            len: self.len,
            fft: Arc::clone(&self.fft),
            buf: self.buf.clone(),
            scratch: self.scratch.clone(),
        }
    }
}

impl std::fmt::Debug for SineTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SineTransform").field("len", &self.len).finish()
    }
}

impl SineTransform {
    pub fn new(len: usize) -> Self {
        assert!(len >= 1, "DST-I length must be positive");
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(2 * (len + 1));
        let scratch = vec![Complex::default(); fft.get_inplace_scratch_len()];
        Self {
            len,
            fft,
            buf: vec![Complex::default(); 2 * (len + 1)],
            scratch,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Unnormalized DST-I of `input` into `output`. `input` may be shorter
    /// than the transform length; missing entries are treated as zero.
    pub fn forward(&mut self, input: &[f64], output: &mut [f64]) {
        let n = self.len;
        assert!(input.len() <= n && output.len() == n);
        let period = 2 * (n + 1);
        for c in self.buf.iter_mut() {
            *c = Complex::default();
        }
        for (m, &x) in input.iter().enumerate() {
            self.buf[m + 1] = Complex::new(x, 0.0);
            self.buf[period - m - 1] = Complex::new(-x, 0.0);
        }
        self.fft.process_with_scratch(&mut self.buf, &mut self.scratch);
        // FFT of the odd extension is -2i * DST-I.
        for (k, y) in output.iter_mut().enumerate() {
            *y = -0.5 * self.buf[k + 1].im;
        }
    }
}

/// Direct O(n^2) DST-I, used as a reference and for tiny lengths.
pub fn dst1_direct(input: &[f64]) -> Vec<f64> {
    let n = input.len();
    let denom = (n + 1) as f64;
    (1..=n)
        .map(|k| {
            input
                .iter()
                .enumerate()
                .map(|(m, &x)| x * (std::f64::consts::PI * (k * (m + 1)) as f64 / denom).sin())
                .sum()
        })
        .collect()
}

use super::{check_sobolev_exponent, sobolev_norm_unchecked, EnsembleField, SpectralField};
use crate::error::{Error, Result};

/// Outer summability index of a stochastic Besov norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BesovQ {
    Finite(f64),
    Infinity,
}

/// Inclusive mode range `2^{j-1} ..= 2^j - 1` of dyadic block `j >= 1`.
pub fn dyadic_range(j: u32) -> (usize, usize) {
    assert!((1..usize::BITS).contains(&j), "block index out of range: {j}");
    (1usize << (j - 1), (1usize << j) - 1)
}

/// `Pi_j v`: same mode count as `v`, zero outside block `j`.
pub fn dyadic_block(v: &SpectralField, j: u32) -> Result<SpectralField> {
    if j == 0 {
        return Err(Error::domain("dyadic blocks are indexed from 1"));
    }
    let mut out = vec![0.0; v.modes()];
    if j < usize::BITS {
        let (lo, hi) = dyadic_range(j);
        for k in lo..=hi.min(v.modes()) {
            out[k - 1] = v.coeff(k);
        }
    }
    Ok(SpectralField::from_vec(out))
}

/// Number of dyadic blocks that intersect `1..=modes`.
pub(crate) fn block_count(modes: usize) -> u32 {
    usize::BITS - modes.leading_zeros()
}

/// Empirical `B^q L^p(Omega; Ḣ^s)` norm of an ensemble: per block the sample
/// `p`-th moment norm of `||Pi_j v||_{Ḣ^s}`, then the `l^q` aggregate over
/// blocks (maximum for `q = inf`).
pub fn besov_norm_ensemble(e: &EnsembleField, s: f64, p: f64, q: BesovQ) -> Result<f64> {
    check_sobolev_exponent(s)?;
    if !(p >= 1.0) {
        return Err(Error::domain(format!("moment index p must be >= 1, got {p}")));
    }
    if let BesovQ::Finite(qv) = q {
        if !(qv >= 1.0) {
            return Err(Error::domain(format!("summability index q must be >= 1, got {qv}")));
        }
    }
    let modes = e.modes();
    let count = e.sample_count() as f64;
    let block_norms = (1..=block_count(modes)).map(|j| {
        let (lo, hi) = dyadic_range(j);
        let hi = hi.min(modes);
        let moment = e
            .samples()
            .iter()
            .map(|v| sobolev_norm_unchecked(&v.coeffs()[lo - 1..hi], lo, s).powf(p))
            .sum::<f64>()
            / count;
        moment.powf(1.0 / p)
    });
    Ok(match q {
        BesovQ::Infinity => block_norms.fold(0.0, f64::max),
        BesovQ::Finite(qv) => block_norms.map(|b| b.powf(qv)).sum::<f64>().powf(1.0 / qv),
    })
}

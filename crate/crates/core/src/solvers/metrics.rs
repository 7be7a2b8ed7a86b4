use crate::error::{Error, Result};
use crate::scalar::{norm2, Real};

/// Sentinel returned for an exact reconstruction.
pub const SNR_CAP_DB: f64 = 300.0;

/// `20 log10(‖f‖ / ‖f - f̃‖)`, capped at [`SNR_CAP_DB`].
pub fn snr_db<T: Real>(estimate: &[T], truth: &[T]) -> Result<f64> {
    if estimate.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            got: estimate.len(),
            context: "snr estimate",
        });
    }
    let num = norm2(truth).as_f64();
    if num == 0.0 {
        return Err(Error::InvalidArgument("SNR of a zero ground truth is undefined".into()));
    }
    let err: Vec<T> = truth.iter().zip(estimate).map(|(&a, &b)| a - b).collect();
    let den = norm2(&err).as_f64();
    if den == 0.0 {
        return Ok(SNR_CAP_DB);
    }
    Ok((20.0 * (num / den).log10()).min(SNR_CAP_DB))
}

/// SNR between the vignetted truth `w ⊙ f` and `w ⊙ f̃`.
pub fn vignetted_snr<T: Real>(estimate: &[T], truth: &[T], vignette: &[T]) -> Result<f64> {
    if vignette.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            got: vignette.len(),
            context: "snr vignette",
        });
    }
    let wf: Vec<T> = truth.iter().zip(vignette).map(|(&a, &w)| a * w).collect();
    let we: Vec<T> = estimate.iter().zip(vignette).map(|(&a, &w)| a * w).collect();
    snr_db(&we, &wf)
}

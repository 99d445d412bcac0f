//! Link-quality metrics for a beamforming vector `p` over one realization.
//!
//! With `G = diag(g)` and `P = diag(p)`, the reflect power spent by the IRS is
//!
//! ```text
//!   reflect_power(p) = P_S * sum |g_n p_n|^2  +  sigma_I^2 * sum |p_n|^2
//! ```
//!
//! and the user-side SNR of the combined direct plus reflected signal is
//!
//! ```text
//!   snr(p) = P_S |conj(h) + f^H G p|^2 / (sigma_I^2 |f^H p|^2 + sigma_U^2).
//! ```
//!
//! `rsnr` drops the direct term and substitutes the amplitude `lambda` into
//! the noise, `ssnr` is the same substitution applied to the full signal with
//! the cross term dropped; both are invariant to a global phase on `p`.

use num_complex::Complex64;

use crate::channel::{ChannelRealization, SystemParams};
use crate::cvec;
use crate::{Error, Result};

/// How far from 1 the norm of a direction vector may be.
pub const UNIT_NORM_TOL: f64 = 1e-9;

/// Amplitude/direction decomposition of a beamforming vector:
/// `p = lambda * p_bar` with `lambda = ||p||` and unit `p_bar`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamVector {
    p: Vec<Complex64>,
    lambda: f64,
    p_bar: Vec<Complex64>,
}

impl BeamVector {
    /// Builds from a unit direction and a nonnegative amplitude.
    pub fn from_direction(p_bar: Vec<Complex64>, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::precondition("lambda must be finite and nonnegative"));
        }
        let norm = cvec::norm(&p_bar);
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::precondition(format!(
                "direction must be unit norm, got {norm}"
            )));
        }
        let p = cvec::scale(&p_bar, Complex64::new(lambda, 0.0));
        Ok(BeamVector { p, lambda, p_bar })
    }

    /// Decomposes a full vector; the zero vector gets lambda = 0 and a zero
    /// direction placeholder.
    pub fn from_full(p: Vec<Complex64>) -> Self {
        let lambda = cvec::norm(&p);
        let p_bar = match cvec::normalized(&p) {
            Some(u) => u,
            None => vec![Complex64::new(0.0, 0.0); p.len()],
        };
        BeamVector { p, lambda, p_bar }
    }

    pub fn p(&self) -> &[Complex64] {
        &self.p
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn p_bar(&self) -> &[Complex64] {
        &self.p_bar
    }
    pub fn n(&self) -> usize {
        self.p.len()
    }
}

fn check_len(p: &[Complex64], ch: &ChannelRealization) -> Result<()> {
    if p.len() != ch.n() {
        return Err(Error::Dimension { expected: ch.n(), got: p.len() });
    }
    Ok(())
}

/// Total power leaving the IRS: amplified signal plus amplification noise.
pub fn reflect_power(p: &[Complex64], ch: &ChannelRealization, sp: &SystemParams) -> Result<f64> {
    check_len(p, ch)?;
    let signal: f64 = p.iter().zip(&ch.g).map(|(pn, gn)| (gn * pn).norm_sqr()).sum();
    Ok(sp.p_s * signal + sp.sigma_i_sq * cvec::norm_sq(p))
}

/// Amplitude that spends exactly the reflect budget along direction `p_bar`:
/// `lambda = sqrt(P_I / (P_S sum |g_n p_bar_n|^2 + sigma_I^2 ||p_bar||^2))`.
pub fn compute_lambda(
    p_bar: &[Complex64],
    ch: &ChannelRealization,
    sp: &SystemParams,
) -> Result<f64> {
    check_len(p_bar, ch)?;
    let norm = cvec::norm(p_bar);
    if (norm - 1.0).abs() > UNIT_NORM_TOL {
        return Err(Error::precondition(format!(
            "compute_lambda needs a unit direction, got norm {norm}"
        )));
    }
    let signal: f64 = p_bar.iter().zip(&ch.g).map(|(pn, gn)| (gn * pn).norm_sqr()).sum();
    let den = sp.p_s * signal + sp.sigma_i_sq * cvec::norm_sq(p_bar);
    Ok((sp.p_i / den).sqrt())
}

/// Reflected-path amplitude f^H G p = sum conj(f_n) g_n p_n.
pub(crate) fn reflected_amplitude(p: &[Complex64], ch: &ChannelRealization) -> Complex64 {
    p.iter()
        .zip(&ch.f)
        .zip(&ch.g)
        .map(|((pn, fn_), gn)| fn_.conj() * gn * pn)
        .sum()
}

/// User-side SNR of the combined direct and reflected signal.
pub fn snr(p: &[Complex64], ch: &ChannelRealization, sp: &SystemParams) -> Result<f64> {
    check_len(p, ch)?;
    let signal = ch.h.conj() + reflected_amplitude(p, ch);
    let forwarded = cvec::dot(&ch.f, p); // f^H p
    Ok(sp.p_s * signal.norm_sqr() / (sp.sigma_i_sq * forwarded.norm_sqr() + sp.sigma_u_sq))
}

/// Achievable rate log2(1 + snr) in bits.
pub fn rate(p: &[Complex64], ch: &ChannelRealization, sp: &SystemParams) -> Result<f64> {
    Ok((1.0 + snr(p, ch, sp)?).log2())
}

/// Reflected-signal-to-noise ratio with the amplitude folded into the noise:
/// `P_S |f^H G p|^2 / (sigma_I^2 |f^H p|^2 + lambda^-2 sigma_U^2 ||p||^2)`.
pub fn rsnr(
    p: &[Complex64],
    ch: &ChannelRealization,
    sp: &SystemParams,
    lambda: f64,
) -> Result<f64> {
    check_len(p, ch)?;
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::precondition("rsnr needs lambda > 0"));
    }
    let nsq = cvec::norm_sq(p);
    if nsq == 0.0 {
        return Err(Error::precondition("rsnr is undefined for the zero vector"));
    }
    let num = sp.p_s * reflected_amplitude(p, ch).norm_sqr();
    let forwarded = cvec::dot(&ch.f, p);
    let den = sp.sigma_i_sq * forwarded.norm_sqr() + sp.sigma_u_sq * nsq / (lambda * lambda);
    Ok(num / den)
}

/// Simplified SNR over a unit direction at amplitude `lambda`: the full SNR
/// with the direct/reflected cross term dropped,
/// `(P_S lambda^2 |f^H G p_bar|^2 + P_S |h|^2) / (lambda^2 sigma_I^2 |f^H p_bar|^2 + sigma_U^2)`.
pub fn ssnr(
    p_bar: &[Complex64],
    lambda: f64,
    ch: &ChannelRealization,
    sp: &SystemParams,
) -> Result<f64> {
    check_len(p_bar, ch)?;
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::precondition("ssnr needs lambda > 0"));
    }
    let norm = cvec::norm(p_bar);
    if (norm - 1.0).abs() > UNIT_NORM_TOL {
        return Err(Error::precondition(format!(
            "ssnr needs a unit direction, got norm {norm}"
        )));
    }
    let nsq = cvec::norm_sq(p_bar);
    let refl = reflected_amplitude(p_bar, ch).norm_sqr();
    let forwarded = cvec::dot(&ch.f, p_bar).norm_sqr();
    let lam_sq = lambda * lambda;
    let num = sp.p_s * lam_sq * refl + sp.p_s * ch.h.norm_sqr() * nsq;
    let den = lam_sq * sp.sigma_i_sq * forwarded + sp.sigma_u_sq * nsq;
    Ok(num / den)
}

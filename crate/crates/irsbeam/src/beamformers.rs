//! The beamformer designs: four active-IRS amplitude/direction solvers and
//! the passive phase-alignment baseline.
//!
//! All four active methods alternate between a direction update at fixed
//! amplitude and the budget-exact amplitude update of `compute_lambda`, so
//! every returned beam spends the reflect power budget exactly. They differ
//! in the direction step:
//!
//! * `max_rsnr` — closed-form maximizer of the reflected-only ratio against
//!   the full noise matrix `sigma_I^2 f f^H + lambda^-2 sigma_U^2 I`.
//! * `gmrr` — the same ratio but with the noise matrix's off-diagonal
//!   entries dropped, giving a diagonally-whitened matched filter.
//! * `max_ssnr_rr` — principal generalized eigenvector of the simplified-SNR
//!   pencil (cross term dropped, direct power kept).
//! * `max_ssnr_fp` — the same objective over unnormalized `p` solved by a
//!   Dinkelbach fractional-programming loop under the power constraint.
//!
//! The passive baseline sets unit-modulus phases that align every reflected
//! term with the direct path and is scored without amplification noise.

use num_complex::Complex64;

use crate::channel::{ChannelRealization, SystemParams};
use crate::cvec;
use crate::metrics::{self, BeamVector};
use crate::qcqp::{dinkelbach, DinkelbachOptions, FpMatrices};
use crate::spectral::{principal_eigvec, rank_one_rayleigh_max, HermitianMatrix};
use crate::{Error, Result};

/// The five beamforming strategies the experiment harness can run.
/// `Ord` follows declaration order, which is also the harness's canonical
/// reporting order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Passive,
    MaxRsnr,
    Gmrr,
    MaxSsnrRr,
    MaxSsnrFp,
}

impl Method {
    /// All methods, in the harness's canonical reporting order.
    pub const ALL: [Method; 5] =
        [Method::Passive, Method::MaxRsnr, Method::Gmrr, Method::MaxSsnrRr, Method::MaxSsnrFp];

    pub fn tag(&self) -> &'static str {
        match self {
            Method::Passive => "passive",
            Method::MaxRsnr => "max-rsnr",
            Method::Gmrr => "gmrr",
            Method::MaxSsnrRr => "max-ssnr-rr",
            Method::MaxSsnrFp => "max-ssnr-fp",
        }
    }

    pub fn parse(s: &str) -> Result<Method> {
        Method::ALL
            .into_iter()
            .find(|m| m.tag() == s)
            .ok_or_else(|| Error::UnknownMethod(s.to_string()))
    }

    /// True for the amplitude-bearing methods (everything except passive).
    pub fn is_active(&self) -> bool {
        !matches!(self, Method::Passive)
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// Stopping rules shared by the iterative methods.
#[derive(Debug, Clone)]
pub struct SolverTolerances {
    /// Relative amplitude-change threshold for the outer loop.
    pub eps_outer: f64,
    /// Relative step threshold for the fractional-programming inner loop,
    /// scaled by the current amplitude.
    pub eps_inner: f64,
    pub max_outer: usize,
    pub max_inner: usize,
}

impl Default for SolverTolerances {
    fn default() -> Self {
        SolverTolerances { eps_outer: 1e-3, eps_inner: 1e-4, max_outer: 50, max_inner: 100 }
    }
}

impl SolverTolerances {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps_outer > 0.0) || !self.eps_outer.is_finite() {
            return Err(Error::domain("eps_outer must be positive"));
        }
        if !(self.eps_inner > 0.0) || !self.eps_inner.is_finite() {
            return Err(Error::domain("eps_inner must be positive"));
        }
        if self.max_outer == 0 || self.max_inner == 0 {
            return Err(Error::domain("iteration caps must be at least 1"));
        }
        Ok(())
    }
}

/// Diagonal of the whitening matrix used by `gmrr`: the noise matrix with
/// off-diagonal entries dropped.
#[derive(Debug, Clone)]
pub struct DiagonalFeature {
    /// `e_n = sigma_I^2 |f_n|^2 + sigma_U^2 / lambda^2`.
    pub e_diag: Vec<f64>,
    /// `d_n = sqrt(e_n)`.
    pub d_diag: Vec<f64>,
}

impl DiagonalFeature {
    pub fn new(ch: &ChannelRealization, sp: &SystemParams, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::precondition("whitening diagonal needs lambda > 0"));
        }
        let floor = sp.sigma_u_sq / (lambda * lambda);
        let e_diag: Vec<f64> =
            ch.f.iter().map(|fn_| sp.sigma_i_sq * fn_.norm_sqr() + floor).collect();
        let d_diag: Vec<f64> = e_diag.iter().map(|&e| e.sqrt()).collect();
        Ok(DiagonalFeature { e_diag, d_diag })
    }
}

/// One outer-iteration snapshot: amplitude, the method's own objective, and
/// the rate the beam would deliver if stopped here (with the free terminal
/// phase rotation applied).
#[derive(Debug, Clone)]
pub struct TraceRow {
    pub k: usize,
    pub lambda: f64,
    pub objective: f64,
    pub rate_bits: f64,
}

/// A converged beamformer run.
#[derive(Debug, Clone)]
pub struct BeamformerOutput {
    pub beam: BeamVector,
    pub method: Method,
    pub trace: Vec<TraceRow>,
    /// Outer iterations performed (trace rows beyond the k = 0 snapshot).
    pub iterations: usize,
    /// False when the outer cap was hit before the stopping rule fired.
    pub converged: bool,
    /// True when the initializer fell back to a uniform-phase direction
    /// because the cascaded reflected channel is identically zero.
    pub degenerate: bool,
    /// Achievable rate of the returned beam, in bits.
    pub rate_bits: f64,
    /// Fractional-programming inner-iteration count per outer iteration
    /// (empty for other methods).
    pub inner_iterations: Vec<usize>,
    /// KKT linear-system solves per outer iteration (empty for other
    /// methods).
    pub kkt_solves: Vec<usize>,
}

/// Amplitude-and-direction starting point: matched filter on the cascaded
/// channel, rotated onto the direct path's phase.
#[derive(Debug, Clone)]
pub struct MrrInit {
    pub beam: BeamVector,
    pub degenerate: bool,
}

fn check_channel(ch: &ChannelRealization, sp: &SystemParams) -> Result<()> {
    if ch.n() != sp.n {
        return Err(Error::Dimension { expected: sp.n, got: ch.n() });
    }
    Ok(())
}

/// Cascaded per-element reflected channel `u = G^H f`, so that
/// `u^H p = f^H G p`.
fn cascade(ch: &ChannelRealization) -> Vec<Complex64> {
    ch.g.iter().zip(&ch.f).map(|(gn, fn_)| gn.conj() * fn_).collect()
}

/// Rotates the direction so the reflected term aligns with the direct
/// path: `arg(f^H G p) = -phi_h`. A no-op when the reflected term vanishes.
fn align_reflection_phase(dir: &mut [Complex64], ch: &ChannelRealization) {
    let amp = metrics::reflected_amplitude(dir, ch);
    if amp.norm() == 0.0 {
        return;
    }
    let rot = Complex64::from_polar(1.0, -(amp.arg() + ch.phi_h));
    for z in dir.iter_mut() {
        *z *= rot;
    }
}

/// Rate of the (phase-aligned) beam; the passive baseline is scored without
/// amplification noise.
fn rate_of(method: Method, p: &[Complex64], ch: &ChannelRealization, sp: &SystemParams) -> Result<f64> {
    if method == Method::Passive {
        let signal = ch.h.conj() + metrics::reflected_amplitude(p, ch);
        let snr = sp.p_s * signal.norm_sqr() / sp.sigma_u_sq;
        return Ok((1.0 + snr).log2());
    }
    metrics::rate(p, ch, sp)
}

fn aligned_rate(
    method: Method,
    p_bar: &[Complex64],
    lambda: f64,
    ch: &ChannelRealization,
    sp: &SystemParams,
) -> Result<f64> {
    let mut dir = p_bar.to_vec();
    align_reflection_phase(&mut dir, ch);
    let p = cvec::scale(&dir, Complex64::new(lambda, 0.0));
    rate_of(method, &p, ch, sp)
}

#[allow(clippy::too_many_arguments)]
fn finalize(
    method: Method,
    mut p_bar: Vec<Complex64>,
    lambda: f64,
    trace: Vec<TraceRow>,
    iterations: usize,
    converged: bool,
    degenerate: bool,
    inner_iterations: Vec<usize>,
    kkt_solves: Vec<usize>,
    ch: &ChannelRealization,
    sp: &SystemParams,
) -> Result<BeamformerOutput> {
    align_reflection_phase(&mut p_bar, ch);
    let beam = BeamVector::from_direction(p_bar, lambda)?;
    let rate_bits = rate_of(method, beam.p(), ch, sp)?;
    Ok(BeamformerOutput {
        beam,
        method,
        trace,
        iterations,
        converged,
        degenerate,
        rate_bits,
        inner_iterations,
        kkt_solves,
    })
}

/// Matched-filter initializer: `p_bar = normalize(G^H f) e^{-j phi_h}`,
/// amplitude from the power budget. Falls back to a uniform-phase direction
/// (flagged) when the cascaded channel is zero.
pub fn mrr_init(ch: &ChannelRealization, sp: &SystemParams) -> Result<MrrInit> {
    check_channel(ch, sp)?;
    let u = cascade(ch);
    let phase = Complex64::from_polar(1.0, -ch.phi_h);
    let (p_bar, degenerate) = match cvec::normalized(&u) {
        // f^H G normalize(u) = ||u|| > 0, so this lands arg(f^H G p) = -phi_h.
        Some(dir) => (cvec::scale(&dir, phase), false),
        None => {
            let amp = phase / (ch.n() as f64).sqrt();
            (vec![amp; ch.n()], true)
        }
    };
    let lambda = metrics::compute_lambda(&p_bar, ch, sp)?;
    Ok(MrrInit { beam: BeamVector::from_direction(p_bar, lambda)?, degenerate })
}

/// Output for channels whose reflected path is identically zero: the
/// initializer's beam, scored as-is.
fn degenerate_output(
    method: Method,
    init: MrrInit,
    ch: &ChannelRealization,
    sp: &SystemParams,
) -> Result<BeamformerOutput> {
    let lambda = init.beam.lambda();
    let p_bar = init.beam.p_bar().to_vec();
    let objective = metrics::rsnr(&p_bar, ch, sp, lambda)?;
    let rate = aligned_rate(method, &p_bar, lambda, ch, sp)?;
    let trace = vec![TraceRow { k: 0, lambda, objective, rate_bits: rate }];
    finalize(method, p_bar, lambda, trace, 0, true, true, Vec::new(), Vec::new(), ch, sp)
}

/// Diagonally-whitened matched filter, alternated with the amplitude update.
///
/// Per outer iteration: drop the noise matrix's off-diagonal entries to get
/// the positive diagonal `e`, take the direction `p_n = u_n / e_n` rotated
/// onto the direct path's phase, normalize, and refresh the amplitude.
pub fn gmrr(
    ch: &ChannelRealization,
    sp: &SystemParams,
    tols: &SolverTolerances,
) -> Result<BeamformerOutput> {
    check_channel(ch, sp)?;
    tols.validate()?;
    let init = mrr_init(ch, sp)?;
    if init.degenerate {
        return degenerate_output(Method::Gmrr, init, ch, sp);
    }
    let u = cascade(ch);
    let phase = Complex64::from_polar(1.0, -ch.phi_h);
    let mut lambda = init.beam.lambda();
    let mut p_bar = init.beam.p_bar().to_vec();
    let mut trace = vec![TraceRow {
        k: 0,
        lambda,
        objective: metrics::rsnr(&p_bar, ch, sp, lambda)?,
        rate_bits: aligned_rate(Method::Gmrr, &p_bar, lambda, ch, sp)?,
    }];
    let mut converged = false;
    let mut iterations = 0;
    for k in 1..=tols.max_outer {
        let feat = DiagonalFeature::new(ch, sp, lambda)?;
        let dir: Vec<Complex64> =
            u.iter().zip(&feat.e_diag).map(|(un, &en)| un / en * phase).collect();
        p_bar = cvec::normalized(&dir)
            .ok_or_else(|| Error::numeric("whitened direction collapsed to zero"))?;
        let new_lambda = metrics::compute_lambda(&p_bar, ch, sp)?;
        iterations = k;
        trace.push(TraceRow {
            k,
            lambda: new_lambda,
            objective: metrics::rsnr(&p_bar, ch, sp, new_lambda)?,
            rate_bits: aligned_rate(Method::Gmrr, &p_bar, new_lambda, ch, sp)?,
        });
        let delta = (new_lambda - lambda).abs();
        lambda = new_lambda;
        if delta <= tols.eps_outer * new_lambda {
            converged = true;
            break;
        }
    }
    finalize(Method::Gmrr, p_bar, lambda, trace, iterations, converged, false, Vec::new(), Vec::new(), ch, sp)
}

/// Closed-form reflected-ratio maximizer against the full noise matrix,
/// alternated with the amplitude update.
pub fn max_rsnr(
    ch: &ChannelRealization,
    sp: &SystemParams,
    tols: &SolverTolerances,
) -> Result<BeamformerOutput> {
    check_channel(ch, sp)?;
    tols.validate()?;
    let init = mrr_init(ch, sp)?;
    if init.degenerate {
        return degenerate_output(Method::MaxRsnr, init, ch, sp);
    }
    let u = cascade(ch);
    let mut lambda = init.beam.lambda();
    let mut p_bar = init.beam.p_bar().to_vec();
    let mut trace = vec![TraceRow {
        k: 0,
        lambda,
        objective: metrics::rsnr(&p_bar, ch, sp, lambda)?,
        rate_bits: aligned_rate(Method::MaxRsnr, &p_bar, lambda, ch, sp)?,
    }];
    let mut converged = false;
    let mut iterations = 0;
    for k in 1..=tols.max_outer {
        let noise = HermitianMatrix::diag_plus_rank_one(
            vec![sp.sigma_u_sq / (lambda * lambda); ch.n()],
            sp.sigma_i_sq,
            &ch.f,
        )?;
        let mut dir = rank_one_rayleigh_max(&noise, &u)?;
        align_reflection_phase(&mut dir, ch);
        p_bar = dir;
        let new_lambda = metrics::compute_lambda(&p_bar, ch, sp)?;
        iterations = k;
        trace.push(TraceRow {
            k,
            lambda: new_lambda,
            objective: metrics::rsnr(&p_bar, ch, sp, new_lambda)?,
            rate_bits: aligned_rate(Method::MaxRsnr, &p_bar, new_lambda, ch, sp)?,
        });
        let delta = (new_lambda - lambda).abs();
        lambda = new_lambda;
        if delta <= tols.eps_outer * new_lambda {
            converged = true;
            break;
        }
    }
    finalize(Method::MaxRsnr, p_bar, lambda, trace, iterations, converged, false, Vec::new(), Vec::new(), ch, sp)
}

/// Simplified-SNR maximizer via the generalized Rayleigh quotient: the
/// direction is the principal eigenvector of the pencil
/// `(P_S lambda^2 u u^H + P_S |h|^2 I,  lambda^2 sigma_I^2 f f^H + sigma_U^2 I)`.
pub fn max_ssnr_rr(
    ch: &ChannelRealization,
    sp: &SystemParams,
    tols: &SolverTolerances,
) -> Result<BeamformerOutput> {
    check_channel(ch, sp)?;
    tols.validate()?;
    let init = mrr_init(ch, sp)?;
    let degenerate = init.degenerate;
    let u = cascade(ch);
    let h_sq = ch.h.norm_sqr();
    let n = ch.n();
    let mut lambda = init.beam.lambda();
    let mut p_bar = init.beam.p_bar().to_vec();
    let mut trace = vec![TraceRow {
        k: 0,
        lambda,
        objective: metrics::ssnr(&p_bar, lambda, ch, sp)?,
        rate_bits: aligned_rate(Method::MaxSsnrRr, &p_bar, lambda, ch, sp)?,
    }];
    let mut converged = false;
    let mut iterations = 0;
    for k in 1..=tols.max_outer {
        let lam_sq = lambda * lambda;
        let signal =
            HermitianMatrix::diag_plus_rank_one(vec![sp.p_s * h_sq; n], sp.p_s * lam_sq, &u)?;
        let noise = HermitianMatrix::diag_plus_rank_one(
            vec![sp.sigma_u_sq; n],
            lam_sq * sp.sigma_i_sq,
            &ch.f,
        )?;
        p_bar = principal_eigvec(&signal, &noise)?;
        let new_lambda = metrics::compute_lambda(&p_bar, ch, sp)?;
        iterations = k;
        trace.push(TraceRow {
            k,
            lambda: new_lambda,
            objective: metrics::ssnr(&p_bar, new_lambda, ch, sp)?,
            rate_bits: aligned_rate(Method::MaxSsnrRr, &p_bar, new_lambda, ch, sp)?,
        });
        let delta = (new_lambda - lambda).abs();
        lambda = new_lambda;
        if delta <= tols.eps_outer * new_lambda {
            converged = true;
            break;
        }
    }
    finalize(Method::MaxSsnrRr, p_bar, lambda, trace, iterations, converged, degenerate, Vec::new(), Vec::new(), ch, sp)
}

/// Simplified-SNR maximizer over unnormalized `p`: each outer iteration
/// solves the ratio problem at fixed amplitude with a Dinkelbach loop under
/// the reflect-power constraint, then refreshes the amplitude from the
/// normalized direction.
pub fn max_ssnr_fp(
    ch: &ChannelRealization,
    sp: &SystemParams,
    tols: &SolverTolerances,
) -> Result<BeamformerOutput> {
    check_channel(ch, sp)?;
    tols.validate()?;
    let init = mrr_init(ch, sp)?;
    let degenerate = init.degenerate;
    let u = cascade(ch);
    let h_sq = ch.h.norm_sqr();
    let n = ch.n();
    let budget_shape: Vec<f64> =
        ch.g.iter().map(|gn| sp.p_s * gn.norm_sqr() + sp.sigma_i_sq).collect();
    let c_mat = HermitianMatrix::from_real_diagonal(budget_shape);

    let mut lambda = init.beam.lambda();
    let mut p_bar = init.beam.p_bar().to_vec();
    let mut p_full = init.beam.p().to_vec();
    let mut trace = vec![TraceRow {
        k: 0,
        lambda,
        objective: metrics::ssnr(&p_bar, lambda, ch, sp)?,
        rate_bits: aligned_rate(Method::MaxSsnrFp, &p_bar, lambda, ch, sp)?,
    }];
    let mut converged = false;
    let mut iterations = 0;
    let mut inner_iterations = Vec::new();
    let mut kkt_solves = Vec::new();
    for k in 1..=tols.max_outer {
        let lam_sq = lambda * lambda;
        let a_mat =
            HermitianMatrix::diag_plus_rank_one(vec![sp.p_s * h_sq / lam_sq; n], sp.p_s, &u)?;
        let b_mat = HermitianMatrix::diag_plus_rank_one(
            vec![sp.sigma_u_sq / lam_sq; n],
            sp.sigma_i_sq,
            &ch.f,
        )?;
        let fp = FpMatrices::new(a_mat, b_mat, c_mat.clone(), sp.p_i)?;
        let opts = DinkelbachOptions {
            tol_inner: tols.eps_inner * lambda,
            max_iter: tols.max_inner,
            refresh_linearization: true,
            constraint_tol: 1e-9,
        };
        let res = dinkelbach(&fp, &p_full, &opts).map_err(|e| {
            Error::numeric(format!("fractional-programming inner loop failed at outer iteration {k}: {e}"))
        })?;
        match cvec::normalized(&res.p) {
            Some(dir) => p_bar = dir,
            // Zero solution only occurs when the numerator annihilates the
            // iterate; keep the previous direction.
            None => {
                converged = true;
                break;
            }
        }
        inner_iterations.push(res.iterations);
        kkt_solves.push(res.kkt_solves);
        iterations = k;
        let new_lambda = metrics::compute_lambda(&p_bar, ch, sp)?;
        p_full = cvec::scale(&p_bar, Complex64::new(new_lambda, 0.0));
        trace.push(TraceRow {
            k,
            lambda: new_lambda,
            objective: metrics::ssnr(&p_bar, new_lambda, ch, sp)?,
            rate_bits: aligned_rate(Method::MaxSsnrFp, &p_bar, new_lambda, ch, sp)?,
        });
        let delta = (new_lambda - lambda).abs();
        lambda = new_lambda;
        if delta <= tols.eps_outer * new_lambda {
            converged = true;
            break;
        }
    }
    finalize(Method::MaxSsnrFp, p_bar, lambda, trace, iterations, converged, degenerate, inner_iterations, kkt_solves, ch, sp)
}

/// Unit-modulus phases aligning every reflected term with the direct path.
/// Scored without amplification noise.
pub fn passive_phase_align(
    ch: &ChannelRealization,
    sp: &SystemParams,
) -> Result<BeamformerOutput> {
    check_channel(ch, sp)?;
    let p: Vec<Complex64> =
        ch.f.iter()
            .zip(&ch.g)
            .map(|(fn_, gn)| {
                let w = fn_.conj() * gn;
                let theta = if w.norm() == 0.0 { 0.0 } else { w.arg() };
                Complex64::from_polar(1.0, -(ch.phi_h + theta))
            })
            .collect();
    let signal = ch.h.conj() + metrics::reflected_amplitude(&p, ch);
    let snr = sp.p_s * signal.norm_sqr() / sp.sigma_u_sq;
    let rate_bits = (1.0 + snr).log2();
    let beam = BeamVector::from_full(p);
    let trace =
        vec![TraceRow { k: 0, lambda: beam.lambda(), objective: snr, rate_bits }];
    Ok(BeamformerOutput {
        beam,
        method: Method::Passive,
        trace,
        iterations: 0,
        converged: true,
        degenerate: false,
        rate_bits,
        inner_iterations: Vec::new(),
        kkt_solves: Vec::new(),
    })
}

/// Dispatches one method on one realization.
pub fn run_method(
    method: Method,
    ch: &ChannelRealization,
    sp: &SystemParams,
    tols: &SolverTolerances,
) -> Result<BeamformerOutput> {
    match method {
        Method::Passive => passive_phase_align(ch, sp),
        Method::MaxRsnr => max_rsnr(ch, sp, tols),
        Method::Gmrr => gmrr(ch, sp, tols),
        Method::MaxSsnrRr => max_ssnr_rr(ch, sp, tols),
        Method::MaxSsnrFp => max_ssnr_fp(ch, sp, tols),
    }
}

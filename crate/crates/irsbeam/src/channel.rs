//! Three-node channel model: base station (BS), active IRS, and user.
//!
//! Geometry lives in the plane. Each of the three links carries independent
//! Rayleigh fading scaled by a distance power law,
//!
//! ```text
//!   gain(d) = ref_gain * d^(-alpha),      element ~ CN(0, gain)
//! ```
//!
//! so `g` (BS->IRS) and `f` (IRS->user) are N-element complex vectors and
//! `h` (BS->user) is a scalar. Draws are fully determined by a `u64` seed:
//! the stream order is `g[0..n]`, then `f[0..n]`, then `h`, each element
//! drawing its real part before its imaginary part.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use std::io::Write;

use crate::csvio;
use crate::{Error, Result};

// ── Static scene description ───────────────────────────────────────────────

/// Node positions in meters. Pairwise distances are strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    bs: [f64; 2],
    irs: [f64; 2],
    user: [f64; 2],
}

impl Geometry {
    pub fn new(bs: [f64; 2], irs: [f64; 2], user: [f64; 2]) -> Result<Self> {
        for v in [bs, irs, user] {
            if !v.iter().all(|c| c.is_finite()) {
                return Err(Error::domain("geometry coordinates must be finite"));
            }
        }
        let geo = Geometry { bs, irs, user };
        for (name, d) in [
            ("bs-irs", geo.d_bs_irs()),
            ("irs-user", geo.d_irs_user()),
            ("bs-user", geo.d_bs_user()),
        ] {
            if d <= 0.0 {
                return Err(Error::domain(format!("{name} distance must be positive")));
            }
        }
        Ok(geo)
    }

    pub fn bs(&self) -> [f64; 2] {
        self.bs
    }
    pub fn irs(&self) -> [f64; 2] {
        self.irs
    }
    pub fn user(&self) -> [f64; 2] {
        self.user
    }

    pub fn d_bs_irs(&self) -> f64 {
        dist(self.bs, self.irs)
    }
    pub fn d_irs_user(&self) -> f64 {
        dist(self.irs, self.user)
    }
    pub fn d_bs_user(&self) -> f64 {
        dist(self.bs, self.user)
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Distance power law per link. Exponents are strictly greater than two;
/// the reference gain at 1 m is strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossModel {
    ref_gain: f64,
    alpha_bi: f64,
    alpha_iu: f64,
    alpha_bu: f64,
}

impl PathLossModel {
    pub fn new(ref_gain: f64, alpha_bi: f64, alpha_iu: f64, alpha_bu: f64) -> Result<Self> {
        if !(ref_gain > 0.0) || !ref_gain.is_finite() {
            return Err(Error::domain("ref_gain must be finite and positive"));
        }
        for (name, a) in [("alpha_bi", alpha_bi), ("alpha_iu", alpha_iu), ("alpha_bu", alpha_bu)] {
            if !(a > 2.0) || !a.is_finite() {
                return Err(Error::domain(format!("{name} must be finite and > 2")));
            }
        }
        Ok(PathLossModel { ref_gain, alpha_bi, alpha_iu, alpha_bu })
    }

    pub fn ref_gain(&self) -> f64 {
        self.ref_gain
    }
    pub fn alpha_bi(&self) -> f64 {
        self.alpha_bi
    }
    pub fn alpha_iu(&self) -> f64 {
        self.alpha_iu
    }
    pub fn alpha_bu(&self) -> f64 {
        self.alpha_bu
    }

    /// Average power gain of each link for the given geometry,
    /// ordered (bs-irs, irs-user, bs-user).
    pub fn link_gains(&self, geo: &Geometry) -> Result<[f64; 3]> {
        Ok([
            path_gain(geo.d_bs_irs(), self.alpha_bi, self.ref_gain)?,
            path_gain(geo.d_irs_user(), self.alpha_iu, self.ref_gain)?,
            path_gain(geo.d_bs_user(), self.alpha_bu, self.ref_gain)?,
        ])
    }
}

/// Average power gain `ref_gain * d^(-alpha)` of a link of length `d` meters.
pub fn path_gain(d: f64, alpha: f64, ref_gain: f64) -> Result<f64> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::domain("distance must be finite and positive"));
    }
    if !alpha.is_finite() || !ref_gain.is_finite() || ref_gain <= 0.0 {
        return Err(Error::domain("alpha must be finite and ref_gain positive"));
    }
    Ok(ref_gain * d.powf(-alpha))
}

/// Transmit powers, noise variances (all in watts), and IRS element count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// BS transmit power.
    pub p_s: f64,
    /// IRS reflect-power budget.
    pub p_i: f64,
    /// Per-element amplification noise variance at the IRS.
    pub sigma_i_sq: f64,
    /// Thermal noise variance at the user.
    pub sigma_u_sq: f64,
    /// Number of IRS elements.
    pub n: usize,
}

impl SystemParams {
    pub fn new(p_s: f64, p_i: f64, sigma_i_sq: f64, sigma_u_sq: f64, n: usize) -> Result<Self> {
        let sp = SystemParams { p_s, p_i, sigma_i_sq, sigma_u_sq, n };
        sp.validate()?;
        Ok(sp)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("p_s", self.p_s),
            ("p_i", self.p_i),
            ("sigma_i_sq", self.sigma_i_sq),
            ("sigma_u_sq", self.sigma_u_sq),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::domain(format!("{name} must be finite and positive")));
            }
        }
        if self.n == 0 {
            return Err(Error::domain("element count n must be at least 1"));
        }
        Ok(())
    }
}

// ── Fading draws ───────────────────────────────────────────────────────────

/// One fading realization of the three links.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// BS -> IRS vector, length n.
    pub g: Vec<Complex64>,
    /// IRS -> user vector, length n.
    pub f: Vec<Complex64>,
    /// Direct BS -> user scalar.
    pub h: Complex64,
    /// Phase of `h` in (-pi, pi]; zero when `h` is exactly zero.
    pub phi_h: f64,
}

impl ChannelRealization {
    pub fn n(&self) -> usize {
        debug_assert_eq!(self.g.len(), self.f.len());
        self.g.len()
    }

    /// Debug dump as CSV records `trial,link,element_index,re,im`,
    /// links tagged `g`, `f`, `h` (the scalar `h` uses element index 0).
    pub fn write_debug_csv<W: Write>(&self, trial: u64, w: &mut W) -> Result<()> {
        for (tag, vec) in [("g", &self.g), ("f", &self.f)] {
            for (i, z) in vec.iter().enumerate() {
                csvio::write_record(
                    w,
                    &[
                        &trial.to_string(),
                        tag,
                        &i.to_string(),
                        &csvio::sig10(z.re),
                        &csvio::sig10(z.im),
                    ],
                )?;
            }
        }
        csvio::write_record(
            w,
            &[&trial.to_string(), "h", "0", &csvio::sig10(self.h.re), &csvio::sig10(self.h.im)],
        )?;
        Ok(())
    }
}

/// Header for the debug dump above.
pub const CHANNEL_CSV_HEADER: &str = "trial,link,element_index,re,im";

/// Draws one seeded realization. Equal seeds give bit-identical output.
pub fn sample_channel(
    geo: &Geometry,
    plm: &PathLossModel,
    params: &SystemParams,
    seed: u64,
) -> Result<ChannelRealization> {
    params.validate()?;
    let [gain_bi, gain_iu, gain_bu] = plm.link_gains(geo)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut draw = |gain: f64| -> Complex64 {
        // CN(0, gain): each real component has variance gain/2.
        let s = (gain / 2.0).sqrt();
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex64::new(s * re, s * im)
    };
    let g: Vec<Complex64> = (0..params.n).map(|_| draw(gain_bi)).collect();
    let f: Vec<Complex64> = (0..params.n).map(|_| draw(gain_iu)).collect();
    let h = draw(gain_bu);
    let phi_h = if h == Complex64::new(0.0, 0.0) { 0.0 } else { h.arg() };
    Ok(ChannelRealization { g, f, h, phi_h })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_geo() -> Geometry {
        Geometry::new([0.0, 0.0], [150.0, 20.0], [150.0, 0.0]).unwrap()
    }

    fn approx(a: f64, b: f64, rtol: f64) -> bool {
        (a - b).abs() <= rtol * b.abs().max(a.abs())
    }

    #[test]
    fn path_gain_free_space_point() {
        // ref_gain 1e-3 at 10 m with exponent 2 is 1e-5.
        let g = path_gain(10.0, 2.0, 1e-3).unwrap();
        assert!(approx(g, 1e-5, 1e-14), "{g}");
    }

    #[test]
    fn path_gain_at_bs_irs_distance() {
        // d = sqrt(150^2 + 20^2) = 151.32745950421556 m, alpha 2.2.
        // Reference value computed independently with 30-digit arithmetic.
        let d = default_geo().d_bs_irs();
        assert!(approx(d, 151.32745950421556, 1e-14));
        let g = path_gain(d, 2.2, 1e-3).unwrap();
        assert!(approx(g, 1.60022469934127e-8, 1e-12), "{g}");
    }

    #[test]
    fn path_gain_rejects_bad_domain() {
        assert!(path_gain(0.0, 2.2, 1e-3).is_err());
        assert!(path_gain(-5.0, 2.2, 1e-3).is_err());
        assert!(path_gain(f64::NAN, 2.2, 1e-3).is_err());
        assert!(path_gain(10.0, 2.2, 0.0).is_err());
    }

    #[test]
    fn geometry_rejects_coincident_nodes() {
        assert!(Geometry::new([0.0, 0.0], [0.0, 0.0], [1.0, 0.0]).is_err());
        assert!(Geometry::new([0.0, 0.0], [1.0, 0.0], [1.0, 0.0]).is_err());
    }

    #[test]
    fn path_loss_model_rejects_shallow_exponents() {
        assert!(PathLossModel::new(1e-3, 2.0, 2.2, 3.5).is_err());
        assert!(PathLossModel::new(1e-3, 2.2, 1.9, 3.5).is_err());
        assert!(PathLossModel::new(0.0, 2.2, 2.2, 3.5).is_err());
        assert!(PathLossModel::new(1e-3, 2.2, 2.2, 3.5).is_ok());
    }

    #[test]
    fn system_params_validation() {
        assert!(SystemParams::new(1.0, 1.0, 1.0, 1.0, 0).is_err());
        assert!(SystemParams::new(0.0, 1.0, 1.0, 1.0, 4).is_err());
        assert!(SystemParams::new(1.0, 1.0, 1.0, 1.0, 4).is_ok());
    }

    #[test]
    fn sampling_is_deterministic_in_the_seed() {
        let geo = default_geo();
        let plm = PathLossModel::new(1e-3, 2.2, 2.2, 3.5).unwrap();
        let sp = SystemParams::new(3.162, 0.316, 1e-10, 1e-10, 16).unwrap();
        let a = sample_channel(&geo, &plm, &sp, 12345).unwrap();
        let b = sample_channel(&geo, &plm, &sp, 12345).unwrap();
        assert_eq!(a, b);
        let c = sample_channel(&geo, &plm, &sp, 12346).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn mean_square_amplitude_matches_link_gain() {
        // One wide draw: 1e5 elements of g, sample mean of |g|^2 within 2%.
        let geo = default_geo();
        let plm = PathLossModel::new(1e-3, 2.2, 2.2, 3.5).unwrap();
        let sp = SystemParams::new(3.162, 0.316, 1e-10, 1e-10, 100_000).unwrap();
        let ch = sample_channel(&geo, &plm, &sp, 7777).unwrap();
        let gain_bi = path_gain(geo.d_bs_irs(), 2.2, 1e-3).unwrap();
        let mean: f64 = ch.g.iter().map(|z| z.norm_sqr()).sum::<f64>() / 1e5;
        assert!(
            (mean - gain_bi).abs() <= 0.02 * gain_bi,
            "mean {mean} vs gain {gain_bi}"
        );
    }

    #[test]
    fn doubling_ref_gain_doubles_mean_square() {
        let geo = default_geo();
        let sp = SystemParams::new(3.162, 0.316, 1e-10, 1e-10, 20_000).unwrap();
        let plm1 = PathLossModel::new(1e-3, 2.2, 2.2, 3.5).unwrap();
        let plm2 = PathLossModel::new(2e-3, 2.2, 2.2, 3.5).unwrap();
        let m = |plm| {
            let ch = sample_channel(&geo, &plm, &sp, 31).unwrap();
            ch.g.iter().map(|z| z.norm_sqr()).sum::<f64>() / 2e4
        };
        let ratio = m(plm2) / m(plm1);
        assert!(approx(ratio, 2.0, 1e-12), "{ratio}");
    }

    #[test]
    fn direct_channel_mean_is_near_zero() {
        // 1e5 independent h draws; complex sample mean within 3 sigma / sqrt(n).
        let geo = default_geo();
        let plm = PathLossModel::new(1e-3, 2.2, 2.2, 3.5).unwrap();
        let sp = SystemParams::new(3.162, 0.316, 1e-10, 1e-10, 1).unwrap();
        let trials = 100_000u64;
        let mut acc = Complex64::new(0.0, 0.0);
        for t in 0..trials {
            acc += sample_channel(&geo, &plm, &sp, 50_000 + t).unwrap().h;
        }
        let mean = acc / trials as f64;
        let sigma = path_gain(geo.d_bs_user(), 3.5, 1e-3).unwrap().sqrt();
        assert!(mean.norm() <= 3.0 * sigma / (trials as f64).sqrt(), "{}", mean.norm());
    }

    #[test]
    fn direct_channel_phase_is_uniform() {
        // Kolmogorov-Smirnov on arg(h) against U(-pi, pi], 1e5 samples,
        // 1% level: D must stay below 1.628 / sqrt(n).
        let geo = default_geo();
        let plm = PathLossModel::new(1e-3, 2.2, 2.2, 3.5).unwrap();
        let sp = SystemParams::new(3.162, 0.316, 1e-10, 1e-10, 1).unwrap();
        let n = 100_000usize;
        let mut u: Vec<f64> = (0..n)
            .map(|t| {
                let h = sample_channel(&geo, &plm, &sp, 900_000 + t as u64).unwrap().h;
                (h.arg() + std::f64::consts::PI) / (2.0 * std::f64::consts::PI)
            })
            .collect();
        u.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let nf = n as f64;
        let mut d = 0.0f64;
        for (i, &x) in u.iter().enumerate() {
            d = d.max(x - i as f64 / nf).max((i + 1) as f64 / nf - x);
        }
        let crit = 1.628 / nf.sqrt();
        assert!(d < crit, "KS statistic {d} over critical {crit}");
    }

    #[test]
    fn debug_csv_has_expected_shape() {
        let geo = default_geo();
        let plm = PathLossModel::new(1e-3, 2.2, 2.2, 3.5).unwrap();
        let sp = SystemParams::new(3.162, 0.316, 1e-10, 1e-10, 3).unwrap();
        let ch = sample_channel(&geo, &plm, &sp, 5).unwrap();
        let mut buf = Vec::new();
        ch.write_debug_csv(9, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 7); // 3 g + 3 f + 1 h
        assert!(lines[0].starts_with("9,g,0,"));
        assert!(lines[3].starts_with("9,f,0,"));
        assert!(lines[6].starts_with("9,h,0,"));
    }
}

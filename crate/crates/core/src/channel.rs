//! Per-band link physics: average SNR, fading laws, hop and route throughput.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma};
use statrs::function::gamma::{gamma_ur, ln_gamma};

use crate::error::{domain, require, Error, Result};
use crate::quad::{integrate_with_breaks, Tolerance};
use crate::units::{db_to_linear, dbm_to_watts, mhz_to_hz};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Band {
    Thz,
    Rf,
}

impl Band {
    pub fn label(self) -> &'static str {
        match self {
            Band::Thz => "THz",
            Band::Rf => "RF",
        }
    }
}

/// Small-scale power fading law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FadingModel {
    /// α–µ fading; `mbar` is the α-root mean value of the fading variable.
    AlphaMu { alpha: f64, mu: f64, mbar: f64 },
    ExponentialUnitMean,
}

impl FadingModel {
    pub fn alpha_mu(alpha: f64, mu: f64, mbar: f64) -> Result<Self> {
        require(alpha > 0.0 && alpha.is_finite(), "alpha must be positive")?;
        require(mu > 0.0 && mu.is_finite(), "mu must be positive")?;
        require(mbar > 0.0 && mbar.is_finite(), "mbar must be positive")?;
        Ok(FadingModel::AlphaMu { alpha, mu, mbar })
    }

    /// α–µ law with `mbar` chosen so that the fading variable has mean 1.
    pub fn alpha_mu_unit_mean(alpha: f64, mu: f64) -> Result<Self> {
        require(alpha > 0.0 && mu > 0.0, "alpha and mu must be positive")?;
        // E[X] = mbar Γ(µ + 2/α) / (Γ(µ) µ^{2/α})
        let ln_ratio = ln_gamma(mu + 2.0 / alpha) - ln_gamma(mu) - (2.0 / alpha) * mu.ln();
        Self::alpha_mu(alpha, mu, (-ln_ratio).exp())
    }

    pub fn mean(&self) -> f64 {
        match *self {
            FadingModel::AlphaMu { alpha, mu, mbar } => {
                mbar * (ln_gamma(mu + 2.0 / alpha) - ln_gamma(mu) - (2.0 / alpha) * mu.ln()).exp()
            }
            FadingModel::ExponentialUnitMean => 1.0,
        }
    }

    /// P[X > m].
    pub fn ccdf(&self, m: f64) -> Result<f64> {
        if !(m >= 0.0) {
            return Err(domain("fading threshold must be nonnegative"));
        }
        Ok(self.ccdf_unchecked(m))
    }

    pub(crate) fn ccdf_unchecked(&self, m: f64) -> f64 {
        match *self {
            FadingModel::AlphaMu { alpha, mu, mbar } => {
                let x = mu * (m / mbar).powf(0.5 * alpha);
                if x <= 0.0 {
                    1.0
                } else if !x.is_finite() {
                    0.0
                } else {
                    gamma_ur(mu, x)
                }
            }
            FadingModel::ExponentialUnitMean => (-m).exp(),
        }
    }

    /// Reusable sampler; building the Gamma distribution once per trial loop
    /// is noticeably cheaper than per draw.
    pub fn sampler(&self) -> FadingSampler {
        match *self {
            FadingModel::AlphaMu { alpha, mu, mbar } => FadingSampler::AlphaMu {
                gamma: Gamma::new(mu, mbar.powf(0.5 * alpha) / mu).expect("validated parameters"),
                exponent: 2.0 / alpha,
            },
            FadingModel::ExponentialUnitMean => FadingSampler::Exponential,
        }
    }

    /// Upper bound on the fading variable beyond which the CCDF is below `tail`.
    pub(crate) fn tail_point(&self, tail: f64) -> f64 {
        let mut y = 1.0;
        while self.ccdf_unchecked(y) > tail && y < 1e12 {
            y *= 2.0;
        }
        y
    }
}

#[derive(Debug, Clone, Copy)]
pub enum FadingSampler {
    AlphaMu { gamma: Gamma<f64>, exponent: f64 },
    Exponential,
}

impl Distribution<f64> for FadingSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            FadingSampler::AlphaMu { gamma, exponent } => {
                let g: f64 = gamma.sample(rng);
                if *exponent == 1.0 {
                    g
                } else {
                    g.powf(*exponent)
                }
            }
            FadingSampler::Exponential => Exp1.sample(rng),
        }
    }
}

/// α–µ CCDF `Γ(µ, µ(m/m̄)^{α/2}) / Γ(µ)`. Fails on the exponential variant.
pub fn alpha_mu_ccdf(f: &FadingModel, m: f64) -> Result<f64> {
    match f {
        FadingModel::AlphaMu { .. } => f.ccdf(m),
        FadingModel::ExponentialUnitMean => Err(domain("alpha_mu_ccdf needs an alpha-mu model")),
    }
}

pub fn sample_fading<R: Rng + ?Sized>(f: &FadingModel, rng: &mut R) -> f64 {
    f.sampler().sample(rng)
}

/// How the mean received power decays with distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Propagation {
    /// Free-space spreading times `exp(-β r)` molecular absorption.
    Absorption(f64),
    /// `r^{-β}` path loss.
    PathLoss(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandParams {
    band: Band,
    gain: f64,
    mean_additional_loss: f64,
    propagation: Propagation,
    noise_power: f64,
    bandwidth: f64,
    fading: FadingModel,
    carrier_freq: f64,
}

fn positive(x: f64, what: &str) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("{what} must be positive and finite, got {x}")))
    }
}

impl BandParams {
    #[allow(clippy::too_many_arguments)]
    pub fn thz(
        gain: f64,
        mean_additional_loss: f64,
        absorption_coeff: f64,
        noise_power: f64,
        bandwidth: f64,
        fading: FadingModel,
        carrier_freq: f64,
    ) -> Result<Self> {
        positive(absorption_coeff, "absorption coefficient")?;
        Self::checked(BandParams {
            band: Band::Thz,
            gain,
            mean_additional_loss,
            propagation: Propagation::Absorption(absorption_coeff),
            noise_power,
            bandwidth,
            fading,
            carrier_freq,
        })
    }

    #[allow(clippy::too_many_arguments)]
    pub fn rf(
        gain: f64,
        mean_additional_loss: f64,
        pathloss_exponent: f64,
        noise_power: f64,
        bandwidth: f64,
        fading: FadingModel,
        carrier_freq: f64,
    ) -> Result<Self> {
        require(
            pathloss_exponent >= 2.0 && pathloss_exponent.is_finite(),
            "RF path-loss exponent must be at least 2",
        )?;
        Self::checked(BandParams {
            band: Band::Rf,
            gain,
            mean_additional_loss,
            propagation: Propagation::PathLoss(pathloss_exponent),
            noise_power,
            bandwidth,
            fading,
            carrier_freq,
        })
    }

    fn checked(p: BandParams) -> Result<Self> {
        positive(p.gain, "antenna gain")?;
        positive(p.mean_additional_loss, "additional loss")?;
        positive(p.noise_power, "noise power")?;
        positive(p.bandwidth, "bandwidth")?;
        positive(p.carrier_freq, "carrier frequency")?;
        if let FadingModel::AlphaMu { alpha, mu, mbar } = p.fading {
            FadingModel::alpha_mu(alpha, mu, mbar)?;
        }
        Ok(p)
    }

    /// 1 THz carrier, 20 dBi, −93 dB loss, 0.05 /m absorption, −107 dBm noise,
    /// 500 MHz, α–µ(2, 4) fading.
    pub fn default_thz() -> Self {
        Self::thz(
            db_to_linear(20.0),
            db_to_linear(-93.0),
            0.05,
            dbm_to_watts(-107.0),
            mhz_to_hz(500.0),
            FadingModel::alpha_mu_unit_mean(2.0, 4.0).expect("constant parameters"),
            1e12,
        )
        .expect("constant parameters")
    }

    /// 2.1 GHz carrier, 0 dBi, −39 dB loss, exponent 2.5, −128 dBm noise,
    /// 40 MHz, Rayleigh (exponential power) fading.
    pub fn default_rf() -> Self {
        Self::rf(
            db_to_linear(0.0),
            db_to_linear(-39.0),
            2.5,
            dbm_to_watts(-128.0),
            mhz_to_hz(40.0),
            FadingModel::ExponentialUnitMean,
            2.1e9,
        )
        .expect("constant parameters")
    }

    /// Same band with a different absorption coefficient (THz only).
    pub fn with_absorption(&self, absorption_coeff: f64) -> Result<Self> {
        match self.propagation {
            Propagation::Absorption(_) => {
                positive(absorption_coeff, "absorption coefficient")?;
                Ok(BandParams { propagation: Propagation::Absorption(absorption_coeff), ..*self })
            }
            Propagation::PathLoss(_) => Err(domain("absorption applies to THz bands only")),
        }
    }

    pub fn band(&self) -> Band {
        self.band
    }
    pub fn gain(&self) -> f64 {
        self.gain
    }
    pub fn mean_additional_loss(&self) -> f64 {
        self.mean_additional_loss
    }
    pub fn propagation(&self) -> Propagation {
        self.propagation
    }
    pub fn absorption_coeff(&self) -> Option<f64> {
        match self.propagation {
            Propagation::Absorption(b) => Some(b),
            Propagation::PathLoss(_) => None,
        }
    }
    pub fn pathloss_exponent(&self) -> Option<f64> {
        match self.propagation {
            Propagation::PathLoss(b) => Some(b),
            Propagation::Absorption(_) => None,
        }
    }
    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }
    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }
    pub fn fading(&self) -> FadingModel {
        self.fading
    }
    pub fn carrier_freq(&self) -> f64 {
        self.carrier_freq
    }

    /// `Gη/σ²` in 1/W.
    pub fn snr_scale(&self) -> f64 {
        self.gain * self.mean_additional_loss / self.noise_power
    }

    /// Distance-dependent power gain.
    pub fn path_gain(&self, r: f64) -> f64 {
        match self.propagation {
            Propagation::Absorption(beta) => (-beta * r).exp() / (r * r),
            Propagation::PathLoss(beta) => r.powf(-beta),
        }
    }

    /// Average SNR per watt of transmit power at distance `r` (no checks).
    pub fn unit_snr(&self, r: f64) -> f64 {
        self.snr_scale() * self.path_gain(r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopLink {
    pub distance: f64,
    pub power: f64,
}

impl HopLink {
    pub fn new(distance: f64, power: f64) -> Self {
        HopLink { distance, power }
    }
}

fn check_link(link: &HopLink) -> Result<()> {
    if !(link.distance > 0.0) || !link.distance.is_finite() {
        return Err(domain(format!("hop distance must be positive, got {}", link.distance)));
    }
    if !(link.power >= 0.0) || !link.power.is_finite() {
        return Err(domain(format!("hop power must be nonnegative, got {}", link.power)));
    }
    Ok(())
}

/// Average SNR of a hop (fading averaged out).
pub fn avg_snr(band: &BandParams, link: HopLink) -> Result<f64> {
    check_link(&link)?;
    Ok(link.power * band.unit_snr(link.distance))
}

pub fn hop_throughput_avg(band: &BandParams, link: HopLink) -> Result<f64> {
    let snr = avg_snr(band, link)?;
    Ok(band.bandwidth * snr.ln_1p() / std::f64::consts::LN_2)
}

pub fn hop_throughput_instant(band: &BandParams, link: HopLink, fading_draw: f64) -> Result<f64> {
    if !(fading_draw >= 0.0) {
        return Err(domain("fading draw must be nonnegative"));
    }
    let snr = avg_snr(band, link)? * fading_draw;
    Ok(band.bandwidth * snr.ln_1p() / std::f64::consts::LN_2)
}

/// End-to-end throughput of a decode-and-forward chain: `1 / Σ 1/τ_k`.
pub fn total_throughput(hops: &[f64]) -> Result<f64> {
    if hops.is_empty() {
        return Err(Error::EmptySequence);
    }
    let mut inv = 0.0;
    for &t in hops {
        if !(t >= 0.0) {
            return Err(domain("hop throughput must be nonnegative"));
        }
        if t == 0.0 {
            return Ok(0.0);
        }
        inv += 1.0 / t;
    }
    if hops.len() == 1 {
        return Ok(hops[0]);
    }
    Ok(1.0 / inv)
}

/// `E_X[log2(1 + a X)]` for mean SNR `a`, via `∫ P[X > y] a/(1 + a y) dy`.
pub fn ergodic_spectral_efficiency(fading: &FadingModel, mean_snr: f64, rel_tol: f64) -> Result<f64> {
    require(mean_snr >= 0.0 && mean_snr.is_finite(), "mean SNR must be finite and nonnegative")?;
    if mean_snr == 0.0 {
        return Ok(0.0);
    }
    ergodic_spectral_efficiency_upto(fading, mean_snr, f64::INFINITY, rel_tol)
}

/// As [`ergodic_spectral_efficiency`], with the fading integral cut at `y_upper`.
pub(crate) fn ergodic_spectral_efficiency_upto(
    fading: &FadingModel,
    mean_snr: f64,
    y_upper: f64,
    rel_tol: f64,
) -> Result<f64> {
    if mean_snr == 0.0 {
        return Ok(0.0);
    }
    let a = mean_snr;
    let y_max = fading.tail_point(1e-14).min(y_upper);
    let mut breaks = vec![0.0];
    // Decade breakpoints around the knee at y = 1/a.
    let mut y = 1.0 / a;
    while y < y_max {
        if y > 0.0 {
            breaks.push(y);
        }
        y *= 10.0;
    }
    for knee in [0.25, 1.0, 4.0] {
        if knee < y_max {
            breaks.push(knee);
        }
    }
    breaks.push(y_max);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let est = integrate_with_breaks(
        |y| fading.ccdf_unchecked(y) * a / (1.0 + a * y),
        &breaks,
        Tolerance::rel(rel_tol),
    )?;
    Ok(est.value / std::f64::consts::LN_2)
}

/// Fading-averaged hop throughput `E[B log2(1 + SNR)]`.
pub fn ergodic_hop_throughput(band: &BandParams, link: HopLink, rel_tol: f64) -> Result<f64> {
    let a = avg_snr(band, link)?;
    Ok(band.bandwidth * ergodic_spectral_efficiency(&band.fading, a, rel_tol)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rf_snr_hand_value() {
        // 0.1 W at 100 m: -10 dBW + 0 dBi - 39 dB - 50 dB + 158 dB = 59 dB
        let rf = BandParams::default_rf();
        let snr = avg_snr(&rf, HopLink::new(100.0, 0.1)).unwrap();
        assert_relative_eq!(snr, 10f64.powf(5.9), max_relative = 1e-12);
        let t = hop_throughput_avg(&rf, HopLink::new(100.0, 0.1)).unwrap();
        assert_relative_eq!(t, 4e7 * (1.0 + 10f64.powf(5.9)).log2(), max_relative = 1e-12);
        assert!((t - 7.85e8).abs() / 7.85e8 < 2e-3);
    }

    #[test]
    fn thz_distance_ratio() {
        let thz = BandParams::default_thz();
        let a = avg_snr(&thz, HopLink::new(10.0, 1.0)).unwrap();
        let b = avg_snr(&thz, HopLink::new(20.0, 1.0)).unwrap();
        assert_relative_eq!(a / b, 4.0 * 0.5f64.exp(), max_relative = 1e-12);
        assert_relative_eq!(a / b, 6.5949, max_relative = 1e-4);
    }

    #[test]
    fn zero_power_and_domain() {
        for band in [BandParams::default_thz(), BandParams::default_rf()] {
            assert_eq!(avg_snr(&band, HopLink::new(5.0, 0.0)).unwrap(), 0.0);
            assert_eq!(hop_throughput_avg(&band, HopLink::new(5.0, 0.0)).unwrap(), 0.0);
            assert!(avg_snr(&band, HopLink::new(0.0, 1.0)).is_err());
            assert!(avg_snr(&band, HopLink::new(-1.0, 1.0)).is_err());
            assert!(avg_snr(&band, HopLink::new(1.0, -1.0)).is_err());
        }
    }

    #[test]
    fn unit_snr_throughput_is_bandwidth() {
        let rf = BandParams::default_rf();
        let r = 100.0;
        let s = 1.0 / rf.unit_snr(r);
        assert_relative_eq!(hop_throughput_avg(&rf, HopLink::new(r, s)).unwrap(), 4e7, max_relative = 1e-12);
    }

    #[test]
    fn instant_matches_avg_at_unit_draw() {
        let thz = BandParams::default_thz();
        let l = HopLink::new(13.0, 0.3);
        assert_eq!(hop_throughput_instant(&thz, l, 1.0).unwrap(), hop_throughput_avg(&thz, l).unwrap());
        assert_eq!(hop_throughput_instant(&thz, l, 0.0).unwrap(), 0.0);
        assert!(hop_throughput_instant(&thz, l, -0.1).is_err());
    }

    #[test]
    fn total_throughput_cases() {
        assert_eq!(total_throughput(&[3.0]).unwrap(), 3.0);
        assert_relative_eq!(total_throughput(&[3.0, 3.0]).unwrap(), 1.5);
        assert_relative_eq!(total_throughput(&[1.0, 1.0, 0.5]).unwrap(), 0.25);
        assert_eq!(total_throughput(&[1.0, 0.0]).unwrap(), 0.0);
        assert_eq!(total_throughput(&[]), Err(Error::EmptySequence));
    }

    #[test]
    fn rejects_bad_params() {
        let f = FadingModel::ExponentialUnitMean;
        assert!(BandParams::rf(1.0, 1.0, 1.5, 1e-15, 4e7, f, 2e9).is_err());
        assert!(BandParams::thz(1.0, 1.0, 0.0, 1e-15, 4e7, f, 2e9).is_err());
        assert!(BandParams::thz(1.0, -1.0, 0.05, 1e-15, 4e7, f, 2e9).is_err());
        assert!(BandParams::default_rf().with_absorption(0.1).is_err());
        assert_eq!(BandParams::default_thz().with_absorption(0.005).unwrap().absorption_coeff(), Some(0.005));
    }

    #[test]
    fn ccdf_basics() {
        let f = FadingModel::alpha_mu(2.0, 1.0, 1.0).unwrap();
        assert_eq!(alpha_mu_ccdf(&f, 0.0).unwrap(), 1.0);
        assert_relative_eq!(alpha_mu_ccdf(&f, 1.0).unwrap(), (-1f64).exp(), max_relative = 1e-12);
        assert!(alpha_mu_ccdf(&f, -1.0).is_err());
        assert!(alpha_mu_ccdf(&FadingModel::ExponentialUnitMean, 1.0).is_err());
    }

    #[test]
    fn unit_mean_normalization() {
        // α = 2 makes every µ unit-mean at m̄ = 1.
        match FadingModel::alpha_mu_unit_mean(2.0, 4.0).unwrap() {
            FadingModel::AlphaMu { mbar, .. } => assert_relative_eq!(mbar, 1.0, max_relative = 1e-12),
            _ => unreachable!(),
        }
        let f = FadingModel::alpha_mu_unit_mean(3.0, 1.7).unwrap();
        assert_relative_eq!(f.mean(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn alpha_mu_sampler_mean_and_ccdf() {
        let f = FadingModel::alpha_mu_unit_mean(2.0, 4.0).unwrap();
        let s = f.sampler();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 1_000_000;
        let mut sum = 0.0;
        let mut above = 0usize;
        for _ in 0..n {
            let x: f64 = s.sample(&mut rng);
            sum += x;
            if x > 1.0 {
                above += 1;
            }
        }
        let mean = sum / n as f64;
        assert!((0.99..=1.01).contains(&mean), "mean {mean}");
        let emp = above as f64 / n as f64;
        assert!((emp - f.ccdf(1.0).unwrap()).abs() < 0.003);
    }

    #[test]
    fn non_integer_alpha_sampler_mean() {
        let f = FadingModel::alpha_mu_unit_mean(3.0, 1.5).unwrap();
        let s = f.sampler();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let n = 400_000;
        let mean: f64 = (0..n).map(|_| s.sample(&mut rng)).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn exponential_sampler_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 1_000_000;
        let mean: f64 = (0..n).map(|_| sample_fading(&FadingModel::ExponentialUnitMean, &mut rng)).sum::<f64>() / n as f64;
        assert!((0.995..=1.005).contains(&mean), "mean {mean}");
    }

    // E1 by its convergent series, for the Rayleigh closed form e^{1/a} E1(1/a).
    fn exp_e1(x: f64) -> f64 {
        if x < 1.0 {
            let mut sum = -0.577_215_664_901_532_9 - x.ln();
            let mut term = 1.0;
            for k in 1..60 {
                term *= -x / k as f64;
                sum -= term / k as f64;
            }
            x.exp() * sum
        } else {
            // continued fraction for e^x E1(x)
            let mut f = 0.0;
            for k in (1..200).rev() {
                let k = k as f64;
                f = k / (1.0 + k / (x + f));
            }
            1.0 / (x + f)
        }
    }

    #[test]
    fn ergodic_rayleigh_closed_form() {
        for a in [1e-3, 0.3, 1.0, 17.0, 1e4, 1e8] {
            let q = ergodic_spectral_efficiency(&FadingModel::ExponentialUnitMean, a, 1e-9).unwrap();
            let exact = exp_e1(1.0 / a) / std::f64::consts::LN_2;
            assert_relative_eq!(q, exact, max_relative = 1e-7);
        }
    }

    #[test]
    fn ergodic_alpha_mu_against_pdf_quadrature() {
        // Oracle integrates log2(1 + a x) against the Gamma(4, 1/4) density.
        let f = FadingModel::alpha_mu_unit_mean(2.0, 4.0).unwrap();
        for a in [0.05, 2.0, 300.0, 1e6] {
            let pdf = |x: f64| 4f64.powi(4) * x.powi(3) * (-4.0 * x).exp() / 6.0;
            let mut sum = 0.0;
            let n = 200_000;
            let h = 20.0 / n as f64;
            for i in 0..n {
                let x = (i as f64 + 0.5) * h;
                sum += pdf(x) * (1.0 + a * x).log2() * h;
            }
            let q = ergodic_spectral_efficiency(&f, a, 1e-9).unwrap();
            assert_relative_eq!(q, sum, max_relative = 1e-6);
        }
    }
}

//! Quadrature evaluation of stepwise-suboptimal throughput and coverage.
//!
//! The first and last hops of a K-hop route start (or end) at a fixed terminal
//! and follow the Type-I distance law for separation R/K; the middle hops join
//! two selected relays and follow the Type-II law. Hops are treated as
//! independent.

use crate::channel::{ergodic_spectral_efficiency_upto, BandParams};
use crate::error::{require, Result};
use crate::geometry::{DistanceKind, DistancePdf};
use crate::optimizer::{stepwise_hop_count, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HopKind {
    Edge,
    Middle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisConfig {
    pub scenario: Scenario,
    pub hop_count: usize,
    /// Linear SNR threshold γ for coverage.
    pub snr_threshold: f64,
    pub quad_rel_tol: f64,
    /// Hop distances beyond this are dropped from the expectations (m).
    pub rho_upper: f64,
    /// Optional cap on the per-hop rate integral (bit/s); `None` integrates the
    /// fading tail until its CCDF is negligible.
    pub t_upper: Option<f64>,
}

impl AnalysisConfig {
    pub fn new(scenario: Scenario, hop_count: usize, snr_threshold: f64) -> Result<Self> {
        require(hop_count >= 1, "hop count must be at least 1")?;
        let rho_upper = default_rho_upper(&scenario, hop_count);
        let cfg = AnalysisConfig { scenario, hop_count, snr_threshold, quad_rel_tol: 1e-4, rho_upper, t_upper: None };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Configuration at the stepwise hop count the optimizer picks.
    pub fn stepwise(scenario: Scenario, snr_threshold: f64) -> Result<Self> {
        Self::new(scenario, stepwise_hop_count(&scenario)?, snr_threshold)
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        require(self.hop_count >= 1, "hop count must be at least 1")?;
        require(self.snr_threshold >= 0.0 && self.snr_threshold.is_finite(), "threshold must be nonnegative")?;
        require(self.quad_rel_tol > 0.0 && self.quad_rel_tol < 1.0, "tolerance must lie in (0, 1)")?;
        require(self.rho_upper > 0.0, "distance truncation must be positive")?;
        if let Some(t) = self.t_upper {
            require(t > 0.0, "rate truncation must be positive")?;
        }
        Ok(())
    }

    pub fn hop_separation(&self) -> f64 {
        self.scenario.total_distance / self.hop_count as f64
    }

    pub fn hop_power(&self) -> f64 {
        self.scenario.total_power / self.hop_count as f64
    }
}

/// `R/K + 6/sqrt(λπ)`.
pub fn default_rho_upper(scenario: &Scenario, hop_count: usize) -> f64 {
    scenario.total_distance / hop_count as f64 + 6.0 / (scenario.relay_density * std::f64::consts::PI).sqrt()
}

/// Tabulated hop-distance laws for one (R/K, λ) pair. Independent of power and
/// threshold, so sweeps over those can share one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct HopLaws {
    pub edge: DistancePdf,
    pub middle: Option<DistancePdf>,
}

impl HopLaws {
    pub fn new(separation: f64, density: f64, with_middle: bool) -> Result<Self> {
        let edge = DistancePdf::tabulated(DistanceKind::TypeI, separation, density)?;
        let middle = if with_middle {
            Some(DistancePdf::tabulated(DistanceKind::TypeII, separation, density)?)
        } else {
            None
        };
        Ok(HopLaws { edge, middle })
    }

    pub fn for_config(cfg: &AnalysisConfig) -> Result<Self> {
        Self::new(cfg.hop_separation(), cfg.scenario.relay_density, cfg.hop_count >= 3)
    }

    fn law(&self, kind: HopKind, cfg: &AnalysisConfig) -> Result<std::borrow::Cow<'_, DistancePdf>> {
        use std::borrow::Cow;
        Ok(match kind {
            HopKind::Edge => Cow::Borrowed(&self.edge),
            HopKind::Middle => match &self.middle {
                Some(m) => Cow::Borrowed(m),
                None => Cow::Owned(DistancePdf::tabulated(
                    DistanceKind::TypeII,
                    cfg.hop_separation(),
                    cfg.scenario.relay_density,
                )?),
            },
        })
    }
}

fn expect_within<G>(law: &DistancePdf, upper: f64, mut g: G) -> Result<f64>
where
    G: FnMut(f64) -> Result<f64>,
{
    law.expectation(|rho| if rho > upper { Ok(0.0) } else { g(rho) })
        .map(|v| v / law.table().map(|t| truncated_fraction(t, upper)).unwrap_or(1.0))
}

fn truncated_fraction(t: &crate::geometry::PdfTable, upper: f64) -> f64 {
    if upper >= t.support().1 {
        1.0
    } else {
        t.cdf(upper).max(f64::MIN_POSITIVE)
    }
}

fn rate_at(band: &BandParams, cfg: &AnalysisConfig, distance: f64, power: f64) -> Result<f64> {
    let a = power * band.unit_snr(distance);
    let y_upper = match cfg.t_upper {
        Some(t) => ((t / band.bandwidth()).exp2() - 1.0) / a,
        None => f64::INFINITY,
    };
    Ok(band.bandwidth() * ergodic_spectral_efficiency_upto(&band.fading(), a, y_upper, cfg.quad_rel_tol)?)
}

fn hop_coverage_at(band: &BandParams, gamma: f64, distance: f64, power: f64) -> f64 {
    if gamma == 0.0 {
        return 1.0;
    }
    let a = power * band.unit_snr(distance);
    band.fading().ccdf_unchecked(gamma / a)
}

/// Evaluates the analytical expressions for one configuration.
#[derive(Debug, Clone)]
pub struct Analyzer {
    cfg: AnalysisConfig,
    laws: HopLaws,
}

impl Analyzer {
    pub fn new(cfg: AnalysisConfig) -> Result<Self> {
        cfg.validate()?;
        let laws = HopLaws::for_config(&cfg)?;
        Ok(Analyzer { cfg, laws })
    }

    /// Reuses tables built for the same hop separation and density.
    pub fn with_laws(cfg: AnalysisConfig, laws: HopLaws) -> Result<Self> {
        cfg.validate()?;
        require(
            (laws.edge.r() - cfg.hop_separation()).abs() <= 1e-12 * cfg.hop_separation()
                && laws.edge.density() == cfg.scenario.relay_density,
            "distance tables were built for a different hop separation or density",
        )?;
        Ok(Analyzer { cfg, laws })
    }

    pub fn config(&self) -> &AnalysisConfig {
        &self.cfg
    }

    pub fn laws(&self) -> &HopLaws {
        &self.laws
    }

    /// Mean throughput of one hop (bit/s), averaged over distance and fading.
    pub fn hop_throughput(&self, kind: HopKind) -> Result<f64> {
        let cfg = &self.cfg;
        let band = cfg.scenario.band;
        let s = cfg.hop_power();
        if cfg.hop_count == 1 {
            return rate_at(&band, cfg, cfg.scenario.total_distance, s);
        }
        let law = self.laws.law(kind, cfg)?;
        expect_within(&law, cfg.rho_upper, |rho| rate_at(&band, cfg, rho, s))
    }

    pub fn total_throughput(&self) -> Result<f64> {
        let k = self.cfg.hop_count;
        let edge = self.hop_throughput(HopKind::Edge)?;
        match k {
            1 => Ok(edge),
            2 => Ok(edge / 2.0),
            _ => {
                let mid = self.hop_throughput(HopKind::Middle)?;
                Ok(combine(edge, mid, k))
            }
        }
    }

    /// Probability that one hop's instantaneous SNR exceeds `gamma`.
    pub fn hop_coverage_with(&self, kind: HopKind, gamma: f64) -> Result<f64> {
        require(gamma >= 0.0, "threshold must be nonnegative")?;
        let cfg = &self.cfg;
        let band = cfg.scenario.band;
        let s = cfg.hop_power();
        if cfg.hop_count == 1 {
            return Ok(hop_coverage_at(&band, gamma, cfg.scenario.total_distance, s));
        }
        if gamma == 0.0 {
            return Ok(1.0);
        }
        let law = self.laws.law(kind, cfg)?;
        Ok(expect_within(&law, cfg.rho_upper, |rho| Ok(hop_coverage_at(&band, gamma, rho, s)))?.clamp(0.0, 1.0))
    }

    pub fn coverage_with(&self, gamma: f64) -> Result<f64> {
        let k = self.cfg.hop_count;
        let edge = self.hop_coverage_with(HopKind::Edge, gamma)?;
        if k == 1 {
            return Ok(edge);
        }
        let mut p = edge * edge;
        if k > 2 {
            p *= self.hop_coverage_with(HopKind::Middle, gamma)?.powi(k as i32 - 2);
        }
        Ok(p.clamp(0.0, 1.0))
    }

    pub fn coverage(&self) -> Result<f64> {
        self.coverage_with(self.cfg.snr_threshold)
    }
}

/// Route throughput from edge and middle hop values: `τ₁τ₂ / (2τ₂ + (K−2)τ₁)`.
pub fn combine(edge: f64, middle: f64, hop_count: usize) -> f64 {
    match hop_count {
        0 => 0.0,
        1 => edge,
        2 => edge / 2.0,
        k => {
            if edge == 0.0 || middle == 0.0 {
                0.0
            } else {
                edge * middle / (2.0 * middle + (k as f64 - 2.0) * edge)
            }
        }
    }
}

pub fn analytic_hop_throughput(cfg: &AnalysisConfig, kind: HopKind) -> Result<f64> {
    Analyzer::new(*cfg)?.hop_throughput(kind)
}

pub fn analytic_total_throughput(cfg: &AnalysisConfig) -> Result<f64> {
    Analyzer::new(*cfg)?.total_throughput()
}

pub fn analytic_coverage(cfg: &AnalysisConfig) -> Result<f64> {
    Analyzer::new(*cfg)?.coverage()
}

/// Threshold on band `b` that demands the same rate `γ·B` as `gamma_a` on band `a`.
pub fn fairness_threshold(band_a: &BandParams, band_b: &BandParams, gamma_a: f64) -> f64 {
    gamma_a * band_a.bandwidth() / band_b.bandwidth()
}

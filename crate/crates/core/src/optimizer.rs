//! Stepwise throughput optimizer: per-hop power allocation, hop-count design,
//! the relay-collision hop cap and the ideal equally spaced route.

use std::f64::consts::{LN_2, PI};

use crate::channel::{avg_snr, hop_throughput_avg, BandParams, HopLink, Propagation};
use crate::error::{domain, require, Error, Result};
use crate::quad::bisect;

pub const DEFAULT_EPSILON: f64 = 0.01;
const MAX_HOPS: usize = 1_000_000;

/// End-to-end problem instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub band: BandParams,
    /// Source–target separation R (m).
    pub total_distance: f64,
    /// Power budget S shared by all hops (W).
    pub total_power: f64,
    /// Relay density λ (1/m²).
    pub relay_density: f64,
}

impl Scenario {
    pub fn new(band: BandParams, total_distance: f64, total_power: f64, relay_density: f64) -> Result<Self> {
        let s = Scenario { band, total_distance, total_power, relay_density };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        require(self.total_distance > 0.0 && self.total_distance.is_finite(), "distance must be positive")?;
        require(self.total_power > 0.0 && self.total_power.is_finite(), "power must be positive")?;
        require(self.relay_density > 0.0 && self.relay_density.is_finite(), "relay density must be positive")?;
        Ok(())
    }

    pub fn with_power(&self, total_power: f64) -> Result<Self> {
        Scenario::new(self.band, self.total_distance, total_power, self.relay_density)
    }

    pub fn with_distance(&self, total_distance: f64) -> Result<Self> {
        Scenario::new(self.band, total_distance, self.total_power, self.relay_density)
    }

    /// Average SNR of each hop when `k` equal hops share the power equally.
    pub fn equal_split_snr(&self, k: usize) -> f64 {
        let kf = k as f64;
        self.total_power / kf * self.band.unit_snr(self.total_distance / kf)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    HighSnr,
    LowSnr,
}

impl Regime {
    /// High when equal spacing with an equal power split keeps every hop at SNR ≥ 1.
    pub fn for_hops(scenario: &Scenario, k: usize) -> Regime {
        if scenario.equal_split_snr(k.max(1)) >= 1.0 {
            Regime::HighSnr
        } else {
            Regime::LowSnr
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoutePlan {
    pub hop_distances: Vec<f64>,
    pub hop_powers: Vec<f64>,
    pub regime: Regime,
}

impl RoutePlan {
    pub fn hop_count(&self) -> usize {
        self.hop_distances.len()
    }

    pub fn links(&self) -> impl Iterator<Item = HopLink> + '_ {
        self.hop_distances.iter().zip(&self.hop_powers).map(|(&d, &p)| HopLink::new(d, p))
    }
}

fn unit_snrs(band: &BandParams, distances: &[f64], total_power: f64) -> Result<Vec<f64>> {
    if distances.is_empty() {
        return Err(Error::EmptySequence);
    }
    require(total_power > 0.0 && total_power.is_finite(), "total power must be positive")?;
    distances.iter().map(|&r| avg_snr(band, HopLink::new(r, 1.0))).collect()
}

/// Low-SNR optimum: `s_k ∝ a_k^{-1/2}` where `a_k` is the per-watt SNR of hop k.
pub fn allocate_power_low_snr(band: &BandParams, distances: &[f64], total_power: f64) -> Result<Vec<f64>> {
    let a = unit_snrs(band, distances, total_power)?;
    let w: Vec<f64> = a.iter().map(|x| 1.0 / x.sqrt()).collect();
    let sum: f64 = w.iter().sum();
    if !(sum.is_finite() && sum > 0.0) {
        return Err(domain("per-hop SNR out of floating-point range"));
    }
    Ok(w.iter().map(|x| total_power * x / sum).collect())
}

/// Smallest `s ≥ 1/a` with `log2(a s)·sqrt(s) = c`.
fn invert_hop(a: f64, c: f64) -> Result<f64> {
    let lo0 = 1.0 / a;
    if c <= 0.0 {
        return Ok(lo0);
    }
    let phi = |s: f64| (a * s).log2() * s.sqrt();
    let mut lo = lo0;
    let mut hi = lo0.max(1e-300) * 2.0;
    let mut guard = 0;
    while phi(hi) < c {
        lo = hi;
        hi *= 4.0;
        guard += 1;
        if guard > 2000 {
            return Err(Error::NoConvergence { iterations: guard });
        }
    }
    let mut s = 0.5 * (lo + hi);
    for _ in 0..200 {
        let f = phi(s) - c;
        if f > 0.0 {
            hi = s;
        } else {
            lo = s;
        }
        let d = (1.0 / LN_2 + 0.5 * (a * s).log2()) / s.sqrt();
        let mut next = s - f / d;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - s).abs() <= 1e-12 * s || hi - lo <= 1e-14 * hi {
            return Ok(next);
        }
        s = next;
    }
    Err(Error::NoConvergence { iterations: 200 })
}

/// High-SNR optimum: equalizes `log2(a_k s_k)·sqrt(s_k)` across hops.
pub fn allocate_power_high_snr(band: &BandParams, distances: &[f64], total_power: f64) -> Result<Vec<f64>> {
    let a = unit_snrs(band, distances, total_power)?;
    let floor: f64 = a.iter().map(|x| 1.0 / x).sum();
    if floor > total_power {
        let (hop, weakest) = a
            .iter()
            .enumerate()
            .min_by(|x, y| x.1.total_cmp(y.1))
            .map(|(i, &x)| (i, x))
            .expect("non-empty");
        return Err(Error::RegimeViolation { hop, snr: weakest * total_power / a.len() as f64 });
    }
    let a_max = a.iter().cloned().fold(0.0, f64::max);
    let total = |c: f64| -> Result<f64> {
        let mut sum = 0.0;
        for &ak in &a {
            sum += invert_hop(ak, c)?;
        }
        Ok(sum)
    };
    let mut lo = 0.0;
    let mut hi = (a_max * total_power).log2() * total_power.sqrt();
    let mut c = hi;
    let mut converged = false;
    for _ in 0..200 {
        c = 0.5 * (lo + hi);
        let sum = total(c)?;
        if (sum - total_power).abs() <= 1e-12 * total_power {
            converged = true;
            break;
        }
        if sum > total_power {
            hi = c;
        } else {
            lo = c;
        }
        if hi - lo <= 1e-16 * hi {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { iterations: 200 });
    }
    let mut s: Vec<f64> = a.iter().map(|&ak| invert_hop(ak, c)).collect::<Result<_>>()?;
    let sum: f64 = s.iter().sum();
    for x in &mut s {
        *x *= total_power / sum;
    }
    for (k, (&ak, &sk)) in a.iter().zip(&s).enumerate() {
        if ak * sk < 1.0 - 1e-9 {
            return Err(Error::RegimeViolation { hop: k, snr: ak * sk });
        }
    }
    Ok(s)
}

/// Throughput of `k` equally spaced hops with equal power: `(1/k)·τ(R/k, S/k)`.
pub fn ideal_objective(scenario: &Scenario, k: usize) -> Result<f64> {
    require(k >= 1, "hop count must be at least 1")?;
    let kf = k as f64;
    Ok(hop_throughput_avg(
        &scenario.band,
        HopLink::new(scenario.total_distance / kf, scenario.total_power / kf),
    )? / kf)
}

/// `sqrt(λπR² / (4 ln(1/ε)))`.
pub fn hop_cap_bound(relay_density: f64, total_distance: f64, epsilon: f64) -> Result<f64> {
    require(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0, 1)")?;
    require(relay_density >= 0.0 && relay_density.is_finite(), "density must be nonnegative")?;
    require(total_distance > 0.0 && total_distance.is_finite(), "distance must be positive")?;
    Ok((relay_density * PI * total_distance * total_distance / (4.0 * (1.0 / epsilon).ln())).sqrt())
}

/// Largest `K < sqrt(λπR² / (4 ln(1/ε)))`, at least 1.
pub fn hop_cap(relay_density: f64, total_distance: f64, epsilon: f64) -> Result<usize> {
    let bound = hop_cap_bound(relay_density, total_distance, epsilon)?;
    if bound <= 1.0 {
        return Ok(1);
    }
    let c = bound.ceil();
    let k = if c == bound { c - 1.0 } else { bound.floor() };
    Ok((k as usize).clamp(1, MAX_HOPS))
}

/// Stationary point of the high-SNR objective, possibly below 1.
pub fn high_snr_root(scenario: &Scenario) -> Result<f64> {
    scenario.validate()?;
    let band = &scenario.band;
    let r = scenario.total_distance;
    let ln_a = (scenario.total_power * band.snr_scale()).ln();
    match band.propagation() {
        Propagation::Absorption(beta) => {
            let ln_a = ln_a - 2.0 * r.ln();
            let h = |k: f64| 2.0 * r * beta / k - ln_a + 1.0 - k.ln();
            if h(1.0) <= 0.0 {
                // Root lies below one hop.
                let h_small = |k: f64| 2.0 * r * beta / k - ln_a + 1.0 - k.ln();
                return bisect(h_small, 1e-12, 1.0, 1e-12, 400).or(Ok(1.0));
            }
            bisect(h, 1.0, MAX_HOPS as f64, 1e-12, 400).map_err(|e| match e {
                Error::NoRoot { .. } => Error::NoRoot { lo: 1.0, hi: MAX_HOPS as f64 },
                other => other,
            })
        }
        Propagation::PathLoss(beta) => {
            if (beta - 1.0).abs() < 1e-12 {
                return Err(domain("path-loss exponent 1 has no interior optimum"));
            }
            let lk = 1.0 + (ln_a - beta * r.ln()) / (1.0 - beta);
            Ok(lk.exp())
        }
    }
}

fn argmax_near(scenario: &Scenario, start: usize) -> Result<usize> {
    let mut k = start.clamp(1, MAX_HOPS);
    let mut best = ideal_objective(scenario, k)?;
    while k < MAX_HOPS {
        let up = ideal_objective(scenario, k + 1)?;
        if up > best {
            k += 1;
            best = up;
        } else {
            break;
        }
    }
    while k > 1 {
        let down = ideal_objective(scenario, k - 1)?;
        if down > best {
            k -= 1;
            best = down;
        } else {
            break;
        }
    }
    Ok(k)
}

/// Outcome of the hop-count design for one scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopDesign {
    /// Continuous high-SNR stationary point.
    pub root: f64,
    /// Integer maximizer of the equal-split objective.
    pub unconstrained: usize,
    pub regime: Regime,
    /// Relay-collision hop cap at ε = 0.01.
    pub cap: usize,
    /// Hop count the optimizer recommends.
    pub hop_count: usize,
}

pub fn hop_design(scenario: &Scenario) -> Result<HopDesign> {
    let root = high_snr_root(scenario)?;
    let lo = (root.floor() as usize).max(1);
    let hi = (root.ceil() as usize).max(1);
    let pick = if ideal_objective(scenario, hi)? > ideal_objective(scenario, lo)? { hi } else { lo };
    // The root comes from the log2(x) ≈ log2(1+x) approximation; a local
    // search on the exact objective closes the remaining gap.
    let unconstrained = argmax_near(scenario, pick)?;
    let regime = Regime::for_hops(scenario, unconstrained);
    let cap = hop_cap(scenario.relay_density, scenario.total_distance, DEFAULT_EPSILON)?;
    let hop_count = match regime {
        Regime::HighSnr => unconstrained,
        Regime::LowSnr => cap,
    };
    Ok(HopDesign { root, unconstrained, regime, cap, hop_count })
}

/// Recommended hop count; in the low-SNR regime the unbounded optimum is
/// replaced by the hop cap.
pub fn optimal_hop_count(scenario: &Scenario) -> Result<usize> {
    Ok(hop_design(scenario)?.hop_count)
}

/// Hop count used by the stepwise strategies on a real relay field.
pub fn stepwise_hop_count(scenario: &Scenario) -> Result<usize> {
    let d = hop_design(scenario)?;
    Ok(d.hop_count.min(d.cap))
}

/// Equally spaced equal-power route with relays exactly on the segment.
/// Returns the plan and its throughput, which bounds every realizable route.
pub fn ideal_route(scenario: &Scenario) -> Result<(RoutePlan, f64)> {
    let d = hop_design(scenario)?;
    let k = d.unconstrained;
    let kf = k as f64;
    let plan = RoutePlan {
        hop_distances: vec![scenario.total_distance / kf; k],
        hop_powers: vec![scenario.total_power / kf; k],
        regime: Regime::for_hops(scenario, k),
    };
    Ok((plan, ideal_objective(scenario, k)?))
}

/// Power split over realized hop distances: the high-SNR rule when it is admissible,
/// otherwise the low-SNR rule.
pub fn allocate_power(scenario: &Scenario, distances: &[f64]) -> Result<(Vec<f64>, Regime)> {
    let regime = Regime::for_hops(scenario, distances.len());
    if regime == Regime::HighSnr {
        match allocate_power_high_snr(&scenario.band, distances, scenario.total_power) {
            Ok(p) => return Ok((p, Regime::HighSnr)),
            Err(Error::RegimeViolation { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok((allocate_power_low_snr(&scenario.band, distances, scenario.total_power)?, Regime::LowSnr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::FadingModel;
    use approx::assert_relative_eq;

    fn thz(r: f64, s: f64) -> Scenario {
        Scenario::new(BandParams::default_thz(), r, s, 1e-2).unwrap()
    }

    fn rf(r: f64, s: f64) -> Scenario {
        Scenario::new(BandParams::default_rf(), r, s, 5e-4).unwrap()
    }

    fn exhaustive(s: &Scenario) -> usize {
        (1..=200).max_by(|&a, &b| ideal_objective(s, a).unwrap().total_cmp(&ideal_objective(s, b).unwrap())).unwrap()
    }

    #[test]
    fn cap_reference_value() {
        assert_eq!(hop_cap(1e-2, 100.0, 0.01).unwrap(), 4);
        assert_eq!(hop_cap(1e-9, 100.0, 0.01).unwrap(), 1);
        assert_eq!(hop_cap(0.0, 100.0, 0.01).unwrap(), 1);
        assert!(hop_cap(1e-2, 100.0, 1.0).is_err());
        assert!(hop_cap(1e-2, 100.0, 0.0).is_err());
    }

    #[test]
    fn cap_bound_scaling() {
        let b1 = hop_cap_bound(1e-3, 250.0, 0.01).unwrap();
        let b4 = hop_cap_bound(4e-3, 250.0, 0.01).unwrap();
        assert_relative_eq!(b4, 2.0 * b1, max_relative = 1e-14);
        // An integer bound is excluded by the strict inequality.
        for lam in [9.0 * 4.0 * 100f64.ln() / (PI * 1e4), 2.7e-3, 0.05] {
            let b = hop_cap_bound(lam, 100.0, 0.01).unwrap();
            let expect = if b.fract() == 0.0 { b as usize - 1 } else { b.floor() as usize };
            assert_eq!(hop_cap(lam, 100.0, 0.01).unwrap(), expect.max(1));
        }
    }

    #[test]
    fn hop_count_matches_exhaustive_reference() {
        let s = thz(100.0, 1.0);
        assert_eq!(optimal_hop_count(&s).unwrap(), exhaustive(&s));
        assert_eq!(optimal_hop_count(&s).unwrap(), 2);
        let s = rf(1000.0, 1.0);
        assert_eq!(optimal_hop_count(&s).unwrap(), exhaustive(&s));
        assert_eq!(optimal_hop_count(&s).unwrap(), 1);
    }

    #[test]
    fn thz_root_satisfies_stationarity() {
        let s = thz(100.0, 1.0);
        let k = high_snr_root(&s).unwrap();
        let a = s.total_power * s.band.snr_scale() / 1e4;
        assert_relative_eq!(2.0 * 100.0 * 0.05 / k - a.ln() + 1.0, k.ln(), epsilon = 1e-9);
    }

    #[test]
    fn rf_root_closed_form() {
        let s = rf(300.0, 0.5);
        let beta = 2.5f64;
        let c = (1.0 - beta + (0.5 * s.band.snr_scale()).ln()).exp();
        let expect = (c * 300f64.powf(-beta)).powf(1.0 / (1.0 - beta));
        assert_relative_eq!(high_snr_root(&s).unwrap(), expect, max_relative = 1e-12);
    }

    #[test]
    fn tiny_root_clamps_to_one() {
        let s = thz(1.0, 1.0);
        assert!(high_snr_root(&s).unwrap() < 1.0);
        assert_eq!(optimal_hop_count(&s).unwrap(), 1);
    }

    #[test]
    fn low_snr_returns_cap() {
        let s = thz(100.0, 1e-4);
        let d = hop_design(&s).unwrap();
        assert_eq!(d.regime, Regime::LowSnr);
        assert_eq!(d.hop_count, 4);
    }

    #[test]
    fn low_snr_closed_form_cases() {
        let band = BandParams::default_thz();
        let p = allocate_power_low_snr(&band, &[5.0; 4], 2.0).unwrap();
        for x in p {
            assert_relative_eq!(x, 0.5, max_relative = 1e-15);
        }
        let rf2 = BandParams::rf(1.0, 1e-4, 2.0, 1e-15, 4e7, FadingModel::ExponentialUnitMean, 2e9).unwrap();
        let p = allocate_power_low_snr(&rf2, &[20.0, 10.0], 3.0).unwrap();
        assert_relative_eq!(p[0], 2.0, max_relative = 1e-14);
        assert_relative_eq!(p[1], 1.0, max_relative = 1e-14);
    }

    #[test]
    fn high_snr_symmetric_and_ordering() {
        let band = BandParams::default_thz();
        let p = allocate_power_high_snr(&band, &[10.0; 3], 0.9).unwrap();
        for x in &p {
            assert_relative_eq!(*x, 0.3, max_relative = 1e-9);
        }
        let p = allocate_power_high_snr(&band, &[8.0, 14.0], 1.0).unwrap();
        assert!(p[1] > p[0]);
        assert_relative_eq!(p.iter().sum::<f64>(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn high_snr_violation() {
        let band = BandParams::default_thz();
        assert!(matches!(
            allocate_power_high_snr(&band, &[200.0, 200.0], 1e-3),
            Err(Error::RegimeViolation { .. })
        ));
    }

    #[test]
    fn ideal_route_direct() {
        let s = rf(1000.0, 1.0);
        let (plan, bound) = ideal_route(&s).unwrap();
        assert_eq!(plan.hop_count(), 1);
        assert_eq!(bound, hop_throughput_avg(&s.band, HopLink::new(1000.0, 1.0)).unwrap());
    }

    #[test]
    fn objective_unimodal_thz() {
        let s = thz(100.0, 1.0);
        let k = optimal_hop_count(&s).unwrap();
        let v: Vec<f64> = (1..=3 * k).map(|j| ideal_objective(&s, j).unwrap()).collect();
        let peak = v.iter().cloned().enumerate().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap().0;
        assert!(v[..=peak].windows(2).all(|w| w[1] >= w[0]));
        assert!(v[peak..].windows(2).all(|w| w[1] <= w[0]));
    }
}

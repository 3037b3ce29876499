//! Ground–UAV–ground THz routing. Terminals on the ground reach the UAV layer
//! through an elevation-dependent line-of-sight mixture; UAV-to-UAV hops at a
//! common altitude are line of sight and routed stepwise.

use rand::Rng;

use crate::channel::{hop_throughput_avg, total_throughput, Band, BandParams, HopLink};
use crate::error::{require, Error, Result};
use crate::geometry::{sample_ppp, Point, PointField, Window};
use crate::optimizer::{hop_cap, Scenario, DEFAULT_EPSILON};
use crate::simulate::trial_rng;

/// Parameters of the logistic line-of-sight law; `a` is in degrees, `b` in 1/degree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LosParams {
    pub a: f64,
    pub b: f64,
}

impl Default for LosParams {
    /// Suburban terrain: a = 25.27, b = 0.5.
    fn default() -> Self {
        LosParams { a: 25.27, b: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GroundLink {
    /// LoS-probability-weighted mean of the LoS and NLoS hop rates.
    #[default]
    Expected,
    /// One Bernoulli draw of the LoS state per ground hop.
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UavScenario {
    /// THz band, route length, power budget; `relay_density` is the UAV density.
    pub base: Scenario,
    pub altitude: f64,
    pub los: LosParams,
    pub absorption_los: f64,
    pub absorption_nlos: f64,
    pub ground_link: GroundLink,
    /// Treat every ground hop as line of sight.
    pub force_los: bool,
}

impl UavScenario {
    /// Defaults: 0.005 /m LoS and 0.5 /m NLoS absorption, suburban LoS law.
    pub fn new(band: BandParams, total_distance: f64, total_power: f64, altitude: f64, uav_density: f64) -> Result<Self> {
        let sc = UavScenario {
            base: Scenario::new(band, total_distance, total_power, uav_density)?,
            altitude,
            los: LosParams::default(),
            absorption_los: 0.005,
            absorption_nlos: 0.5,
            ground_link: GroundLink::Expected,
            force_los: false,
        };
        sc.validate()?;
        Ok(sc)
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        require(self.base.band.band() == Band::Thz, "UAV routing uses the THz band")?;
        require(self.altitude > 0.0 && self.altitude.is_finite(), "altitude must be positive")?;
        require(self.los.a > 0.0 && self.los.b > 0.0, "LoS parameters must be positive")?;
        require(self.absorption_los > 0.0, "LoS absorption must be positive")?;
        require(self.absorption_nlos > self.absorption_los, "NLoS absorption must exceed LoS absorption")?;
        Ok(())
    }

    pub fn uav_density(&self) -> f64 {
        self.base.relay_density
    }

    pub fn with_altitude(&self, altitude: f64) -> Result<Self> {
        let s = UavScenario { altitude, ..*self };
        s.validate()?;
        Ok(s)
    }

    pub fn with_density(&self, uav_density: f64) -> Result<Self> {
        let s = UavScenario { base: Scenario { relay_density: uav_density, ..self.base }, ..*self };
        s.validate()?;
        Ok(s)
    }

    fn los_band(&self) -> Result<BandParams> {
        self.base.band.with_absorption(self.absorption_los)
    }

    fn nlos_band(&self) -> Result<BandParams> {
        self.base.band.with_absorption(self.absorption_nlos)
    }

    fn p_los(&self, horizontal: f64) -> Result<f64> {
        if self.force_los {
            return Ok(1.0);
        }
        los_probability(self.los, elevation_angle(self.altitude, horizontal))
    }
}

/// `1 / (1 + a·exp(−b(θ − a)))` with θ in degrees.
pub fn los_probability(params: LosParams, theta_deg: f64) -> Result<f64> {
    if !(0.0..=90.0).contains(&theta_deg) {
        return Err(crate::error::domain(format!("elevation angle {theta_deg} outside [0, 90] degrees")));
    }
    Ok(1.0 / (1.0 + params.a * (-params.b * (theta_deg - params.a)).exp()))
}

/// Elevation of a UAV at `altitude` seen from a ground point `horizontal_distance` away, in degrees.
pub fn elevation_angle(altitude: f64, horizontal_distance: f64) -> f64 {
    altitude.atan2(horizontal_distance.max(0.0)).to_degrees()
}

/// UAV with the highest LoS probability from `ground`: the horizontally nearest one.
pub fn associate_ground_uav(field: &PointField, ground: Point) -> Result<(usize, Point)> {
    let (i, _) = field.nearest_index(ground)?;
    Ok((i, field.points()[i]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UavHop {
    Uplink,
    Relay,
    Downlink,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UavRoute {
    /// Horizontal positions: ground source, UAVs, ground target.
    pub waypoints: Vec<Point>,
    pub hops: Vec<UavHop>,
    /// Horizontal length of each hop.
    pub horizontal: Vec<f64>,
    pub hop_power: f64,
}

/// Composite throughput with the terminal UAVs `offset` inward of the ground
/// terminals along the segment and `k` equal UAV-to-UAV hops between them.
fn nominal_throughput(sc: &UavScenario, k: usize, offset: f64) -> Result<f64> {
    let n = k + 2;
    let s = sc.base.total_power / n as f64;
    let g = ground_rate(sc, offset, s, None::<&mut rand_chacha::ChaCha8Rng>)?;
    let span = sc.base.total_distance - 2.0 * offset;
    let m = hop_throughput_avg(&sc.los_band()?, HopLink::new(span / k as f64, s))?;
    let mut hops = vec![g, g];
    hops.extend(std::iter::repeat_n(m, k));
    total_throughput(&hops)
}

fn best_hops(sc: &UavScenario, limit: usize, offset: f64) -> Result<(usize, f64)> {
    let mut k = 1;
    let mut best = nominal_throughput(sc, 1, offset)?;
    while k < limit {
        let next = nominal_throughput(sc, k + 1, offset)?;
        if next > best {
            k += 1;
            best = next;
        } else {
            break;
        }
    }
    Ok((k, best))
}

/// Number of UAV-to-UAV hops the stepwise UAV route aims for, designed with
/// the terminal UAVs directly overhead.
pub fn design_relay_hops(sc: &UavScenario) -> Result<usize> {
    sc.validate()?;
    let cap = hop_cap(sc.uav_density(), sc.base.total_distance, DEFAULT_EPSILON)?;
    Ok(best_hops(sc, cap, 0.0)?.0)
}

/// Ideal routing for this scheme: the associated UAVs directly above the
/// terminals and UAV relays exactly on the segment, with the best hop count
/// regardless of density.
pub fn uav_ideal_throughput(sc: &UavScenario) -> Result<f64> {
    sc.validate()?;
    Ok(best_hops(sc, 100_000, 0.0)?.1)
}

/// Best throughput over all collinear placements: symmetric terminal-UAV
/// offset and any number of equal UAV-to-UAV hops. Bounds every realized route.
pub fn uav_placement_bound(sc: &UavScenario) -> Result<f64> {
    sc.validate()?;
    let half = 0.5 * sc.base.total_distance;
    let eval = |x: f64| -> Result<f64> { Ok(best_hops(sc, 100_000, x)?.1) };
    let grid = 200;
    let mut best_i: usize = 0;
    let mut best = eval(0.0)?;
    for i in 1..grid {
        let v = eval(half * i as f64 / grid as f64)?;
        if v > best {
            best = v;
            best_i = i;
        }
    }
    // The hop count is piecewise constant in the offset, so refine by a fine
    // scan of the bracketing cells rather than a derivative method.
    let lo = half * best_i.saturating_sub(1) as f64 / grid as f64;
    let hi = half * ((best_i + 1).min(grid - 1)) as f64 / grid as f64;
    for j in 0..=400 {
        best = best.max(eval(lo + (hi - lo) * j as f64 / 400.0)?);
    }
    Ok(best)
}

fn ground_rate<R: Rng>(sc: &UavScenario, horizontal: f64, power: f64, rng: Option<&mut R>) -> Result<f64> {
    let slant = sc.altitude.hypot(horizontal);
    let p = sc.p_los(horizontal)?;
    let los = hop_throughput_avg(&sc.los_band()?, HopLink::new(slant, power))?;
    if p >= 1.0 {
        return Ok(los);
    }
    let nlos = hop_throughput_avg(&sc.nlos_band()?, HopLink::new(slant, power))?;
    match (sc.ground_link, rng) {
        (GroundLink::Sampled, Some(rng)) => Ok(if rng.random::<f64>() < p { los } else { nlos }),
        _ => Ok(p * los + (1.0 - p) * nlos),
    }
}

/// Waypoints of the stepwise UAV route through `field`.
pub fn uav_route(sc: &UavScenario, field: &PointField) -> Result<UavRoute> {
    sc.validate()?;
    let src = Point::new(0.0, 0.0);
    let dst = Point::new(sc.base.total_distance, 0.0);
    let (is, us) = associate_ground_uav(field, src).map_err(|_| Error::NoRoute("no UAV in field".into()))?;
    let (it, ut) = associate_ground_uav(field, dst)?;
    let mut ids = vec![is];
    if is != it {
        let k = design_relay_hops(sc)?;
        for j in 1..k {
            let (i, _) = field.nearest_index(us.lerp(ut, j as f64 / k as f64))?;
            if *ids.last().expect("non-empty") != i && i != it {
                ids.push(i);
            }
        }
        ids.push(it);
    }
    let mut waypoints = vec![src];
    waypoints.extend(ids.iter().map(|&i| field.points()[i]));
    waypoints.push(dst);
    let n = waypoints.len() - 1;
    let mut hops = vec![UavHop::Relay; n];
    hops[0] = UavHop::Uplink;
    hops[n - 1] = UavHop::Downlink;
    let horizontal = waypoints.windows(2).map(|w| w[0].dist(w[1])).collect();
    Ok(UavRoute { waypoints, hops, horizontal, hop_power: sc.base.total_power / n as f64 })
}

/// End-to-end throughput of the stepwise UAV route through `field`. `rng`
/// is consulted only in [`GroundLink::Sampled`] mode.
pub fn uav_route_throughput<R: Rng>(sc: &UavScenario, field: &PointField, rng: &mut R) -> Result<f64> {
    let route = uav_route(sc, field)?;
    let los = sc.los_band()?;
    let mut rates = Vec::with_capacity(route.hops.len());
    for (kind, &d) in route.hops.iter().zip(&route.horizontal) {
        rates.push(match kind {
            UavHop::Uplink | UavHop::Downlink => ground_rate(sc, d, route.hop_power, Some(&mut *rng))?,
            UavHop::Relay => {
                if d > 0.0 {
                    hop_throughput_avg(&los, HopLink::new(d, route.hop_power))?
                } else {
                    return Err(Error::NoRoute("coincident UAVs".into()));
                }
            }
        });
    }
    total_throughput(&rates)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UavSummary {
    pub trials: usize,
    pub mean_throughput: f64,
    pub throughput_ci95: f64,
    pub failure_rate: f64,
}

/// Seeded Monte Carlo over UAV fields; an empty field is an outage.
pub fn uav_monte_carlo(sc: &UavScenario, trials: usize, seed: u64) -> Result<UavSummary> {
    require(trials >= 1, "at least one trial is required")?;
    sc.validate()?;
    let window = Window::around_route(sc.base.total_distance)?;
    let one = |t: u64| -> Result<Option<f64>> {
        let mut rng = trial_rng(seed, t);
        let field = sample_ppp(sc.uav_density(), window, &mut rng)?;
        match uav_route_throughput(sc, &field, &mut rng) {
            Ok(v) => Ok(Some(v)),
            Err(Error::NoRoute(_)) | Err(Error::EmptyField) => Ok(None),
            Err(e) => Err(e),
        }
    };
    #[cfg(feature = "parallel")]
    let results: Vec<Option<f64>> = {
        use rayon::prelude::*;
        (0..trials as u64).into_par_iter().map(one).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Option<f64>> = (0..trials as u64).map(one).collect::<Result<_>>()?;
    let n = trials as f64;
    // Outages count as zero throughput.
    let value = |r: &Option<f64>| r.unwrap_or(0.0);
    let fail = results.iter().filter(|r| r.is_none()).count();
    let mean = results.iter().map(value).sum::<f64>() / n;
    let var = if trials > 1 { results.iter().map(|r| (value(r) - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    Ok(UavSummary { trials, mean_throughput: mean, throughput_ci95: 1.96 * (var / n).sqrt(), failure_rate: fail as f64 / n })
}

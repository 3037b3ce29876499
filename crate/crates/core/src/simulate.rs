//! Monte Carlo engine: draw relay fields, route with each strategy, measure.
//!
//! A route that a baseline cannot complete counts as an outage: throughput 0,
//! not covered.

use std::f64::consts::{FRAC_PI_4, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;

use crate::channel::{avg_snr, hop_throughput_avg, total_throughput, Band, BandParams, FadingSampler};
use crate::error::{domain, require, Error, Result};
use crate::geometry::{sample_ppp, Point, PointField, Window};
use crate::optimizer::{allocate_power, ideal_route, stepwise_hop_count, Regime, RoutePlan, Scenario};

pub const DEFAULT_TRIALS: usize = 10_000;
const MAX_ROUTE_HOPS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StrategyKind {
    Ideal,
    StepwiseOptimal,
    StepwiseSuboptimal,
    /// Greedy: the node within `radius` closest to the target.
    LongHop { radius: f64 },
    /// Nearest unused node inside a cone of half-angle `max_angle` towards the target.
    ShortHop { max_angle: f64 },
}

impl StrategyKind {
    /// 40 m for THz, 400 m for RF.
    pub fn long_hop_default(band: Band) -> Self {
        StrategyKind::LongHop {
            radius: match band {
                Band::Thz => 40.0,
                Band::Rf => 400.0,
            },
        }
    }

    pub fn short_hop_default() -> Self {
        StrategyKind::ShortHop { max_angle: FRAC_PI_4 }
    }

    /// All five strategies with default baseline parameters.
    pub fn all(band: Band) -> [StrategyKind; 5] {
        [
            StrategyKind::Ideal,
            StrategyKind::StepwiseOptimal,
            StrategyKind::StepwiseSuboptimal,
            Self::long_hop_default(band),
            Self::short_hop_default(),
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            StrategyKind::Ideal => "ideal",
            StrategyKind::StepwiseOptimal => "stepwise-optimal",
            StrategyKind::StepwiseSuboptimal => "stepwise-suboptimal",
            StrategyKind::LongHop { .. } => "long-hop",
            StrategyKind::ShortHop { .. } => "short-hop",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            StrategyKind::LongHop { radius } => require(radius > 0.0 && radius.is_finite(), "radius must be positive"),
            StrategyKind::ShortHop { max_angle } => {
                require(max_angle > 0.0 && max_angle < PI, "cone angle must lie in (0, π)")
            }
            _ => Ok(()),
        }
    }

    fn uses_field(&self) -> bool {
        !matches!(self, StrategyKind::Ideal)
    }
}

/// A concrete route through a field.
#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    pub plan: RoutePlan,
    /// Source, relays, target.
    pub waypoints: Vec<Point>,
    /// Adjacent ideal positions that mapped onto the same relay and were merged.
    pub shared_relays: usize,
}

pub fn source() -> Point {
    Point::new(0.0, 0.0)
}

pub fn target(scenario: &Scenario) -> Point {
    Point::new(scenario.total_distance, 0.0)
}

/// Strategy bound to a scenario; the hop-count design runs once here rather
/// than once per trial.
#[derive(Debug, Clone)]
pub struct Planner {
    strategy: StrategyKind,
    scenario: Scenario,
    hop_count: usize,
    ideal: Option<RoutePlan>,
}

impl Planner {
    pub fn new(strategy: StrategyKind, scenario: Scenario) -> Result<Self> {
        strategy.validate()?;
        scenario.validate()?;
        let (hop_count, ideal) = match strategy {
            StrategyKind::Ideal => {
                let (plan, _) = ideal_route(&scenario)?;
                (plan.hop_count(), Some(plan))
            }
            StrategyKind::StepwiseOptimal | StrategyKind::StepwiseSuboptimal => (stepwise_hop_count(&scenario)?, None),
            _ => (0, None),
        };
        Ok(Planner { strategy, scenario, hop_count, ideal })
    }

    pub fn strategy(&self) -> StrategyKind {
        self.strategy
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    /// Designed hop count for the stepwise and ideal strategies; 0 for baselines.
    pub fn design_hop_count(&self) -> usize {
        self.hop_count
    }

    pub fn plan(&self, field: &PointField) -> Result<Route> {
        let sc = &self.scenario;
        let (src, dst) = (source(), target(sc));
        match self.strategy {
            StrategyKind::Ideal => {
                let plan = self.ideal.clone().expect("built in new");
                let k = plan.hop_count();
                let waypoints = (0..=k).map(|i| src.lerp(dst, i as f64 / k as f64)).collect();
                Ok(Route { plan, waypoints, shared_relays: 0 })
            }
            StrategyKind::StepwiseOptimal | StrategyKind::StepwiseSuboptimal => {
                let k = self.hop_count;
                let mut waypoints = vec![src];
                let mut last: Option<usize> = None;
                let mut shared = 0;
                for i in 1..k {
                    let ideal = src.lerp(dst, i as f64 / k as f64);
                    let (idx, _) = field.nearest_index(ideal).map_err(|_| Error::NoRoute("no relays in field".into()))?;
                    if last == Some(idx) {
                        shared += 1;
                        continue;
                    }
                    last = Some(idx);
                    waypoints.push(field.points()[idx]);
                }
                waypoints.push(dst);
                let distances = hop_lengths(&waypoints)?;
                let (powers, regime) = if self.strategy == StrategyKind::StepwiseOptimal {
                    allocate_power(sc, &distances)?
                } else {
                    let n = distances.len();
                    (vec![sc.total_power / n as f64; n], Regime::for_hops(sc, n))
                };
                Ok(Route { plan: RoutePlan { hop_distances: distances, hop_powers: powers, regime }, waypoints, shared_relays: shared })
            }
            StrategyKind::LongHop { radius } => {
                let waypoints = long_hop_path(field, src, dst, radius)?;
                equal_split_route(sc, waypoints)
            }
            StrategyKind::ShortHop { max_angle } => {
                let waypoints = short_hop_path(field, src, dst, max_angle)?;
                equal_split_route(sc, waypoints)
            }
        }
    }
}

fn hop_lengths(waypoints: &[Point]) -> Result<Vec<f64>> {
    let d: Vec<f64> = waypoints.windows(2).map(|w| w[0].dist(w[1])).collect();
    if d.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::NoRoute("degenerate zero-length hop".into()));
    }
    Ok(d)
}

fn equal_split_route(sc: &Scenario, waypoints: Vec<Point>) -> Result<Route> {
    let distances = hop_lengths(&waypoints)?;
    let n = distances.len();
    Ok(Route {
        plan: RoutePlan {
            hop_distances: distances,
            hop_powers: vec![sc.total_power / n as f64; n],
            regime: Regime::for_hops(sc, n),
        },
        waypoints,
        shared_relays: 0,
    })
}

fn long_hop_path(field: &PointField, src: Point, dst: Point, radius: f64) -> Result<Vec<Point>> {
    let r2 = radius * radius;
    let mut path = vec![src];
    let mut cur = src;
    for _ in 0..MAX_ROUTE_HOPS {
        if cur.dist2(dst) <= r2 {
            path.push(dst);
            return Ok(path);
        }
        let here = cur.dist2(dst);
        let mut best: Option<(f64, Point)> = None;
        for &p in field.points() {
            if p.dist2(cur) <= r2 {
                let d = p.dist2(dst);
                if d < here && best.is_none_or(|(bd, _)| d < bd) {
                    best = Some((d, p));
                }
            }
        }
        match best {
            Some((_, p)) => {
                path.push(p);
                cur = p;
            }
            None => return Err(Error::NoRoute("no progressing relay within radius".into())),
        }
    }
    Err(Error::NoRoute("hop limit exceeded".into()))
}

fn short_hop_path(field: &PointField, src: Point, dst: Point, max_angle: f64) -> Result<Vec<Point>> {
    let mut used = vec![false; field.len()];
    let mut path = vec![src];
    let mut cur = src;
    for _ in 0..MAX_ROUTE_HOPS {
        let (tx, ty) = (dst.x - cur.x, dst.y - cur.y);
        let to_target = cur.dist2(dst);
        let mut best: Option<(f64, usize)> = None;
        for (i, &p) in field.points().iter().enumerate() {
            if used[i] {
                continue;
            }
            let (cx, cy) = (p.x - cur.x, p.y - cur.y);
            let angle = (cx * ty - cy * tx).abs().atan2(cx * tx + cy * ty);
            if angle < max_angle {
                let d = p.dist2(cur);
                if d > 0.0 && best.is_none_or(|(bd, _)| d < bd) {
                    best = Some((d, i));
                }
            }
        }
        match best {
            Some((d, i)) if d < to_target => {
                used[i] = true;
                cur = field.points()[i];
                path.push(cur);
            }
            _ => {
                path.push(dst);
                return Ok(path);
            }
        }
    }
    Err(Error::NoRoute("hop limit exceeded".into()))
}

/// Builds the route a strategy takes through `field`.
pub fn plan_route(strategy: StrategyKind, scenario: &Scenario, field: &PointField) -> Result<Route> {
    Planner::new(strategy, *scenario)?.plan(field)
}

/// Route throughput from fading-averaged hop rates.
pub fn realize_throughput(plan: &RoutePlan, band: &BandParams) -> Result<f64> {
    let hops: Vec<f64> = plan.links().map(|l| hop_throughput_avg(band, l)).collect::<Result<_>>()?;
    total_throughput(&hops)
}

/// Draws one fading value per hop and reports whether every hop clears `gamma`.
pub fn realize_coverage<R: Rng + ?Sized>(plan: &RoutePlan, band: &BandParams, gamma: f64, rng: &mut R) -> Result<bool> {
    require(gamma >= 0.0, "threshold must be nonnegative")?;
    let sampler = band.fading().sampler();
    let mut ok = true;
    for l in plan.links() {
        let x: f64 = sampler.sample(rng);
        if avg_snr(band, l)? * x <= gamma {
            ok = false;
        }
    }
    Ok(ok)
}

/// Everything recorded about one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialResult {
    pub strategy: StrategyKind,
    pub hop_count: usize,
    pub throughput: f64,
    pub covered: bool,
    pub failed: bool,
    pub shared_relays: usize,
    /// Route throughput with one fading draw per hop.
    pub faded_throughput: f64,
    /// Sum and count of faded rates on first/last hops and on middle hops.
    pub edge_rate_sum: f64,
    pub edge_hops: usize,
    pub middle_rate_sum: f64,
    pub middle_hops: usize,
}

impl TrialResult {
    fn failed(strategy: StrategyKind) -> Self {
        TrialResult {
            strategy,
            hop_count: 0,
            throughput: 0.0,
            covered: false,
            failed: true,
            shared_relays: 0,
            faded_throughput: 0.0,
            edge_rate_sum: 0.0,
            edge_hops: 0,
            middle_rate_sum: 0.0,
            middle_hops: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McOptions {
    /// Multiplies the side lengths of the default window.
    pub window_scale: f64,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions { window_scale: 1.0 }
    }
}

pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Runs trial `trial` of a seeded experiment.
pub fn run_trial(planner: &Planner, gamma: f64, seed: u64, trial: u64, opts: &McOptions) -> Result<TrialResult> {
    let sc = planner.scenario();
    let band = sc.band;
    let mut rng = trial_rng(seed, trial);
    let window = Window::around_route(sc.total_distance)?.scaled(opts.window_scale)?;
    let field = if planner.strategy().uses_field() {
        sample_ppp(sc.relay_density, window, &mut rng)?
    } else {
        PointField::from_points(Vec::new(), sc.relay_density, window)?
    };
    let route = match planner.plan(&field) {
        Ok(r) => r,
        Err(Error::NoRoute(_)) => return Ok(TrialResult::failed(planner.strategy())),
        Err(e) => return Err(e),
    };
    let plan = &route.plan;
    let throughput = realize_throughput(plan, &band)?;
    let sampler: FadingSampler = band.fading().sampler();
    let k = plan.hop_count();
    let mut covered = true;
    let mut inv = 0.0;
    let mut zero = false;
    let (mut es, mut en, mut ms, mut mn) = (0.0, 0, 0.0, 0);
    for (i, l) in plan.links().enumerate() {
        let x: f64 = sampler.sample(&mut rng);
        let snr = avg_snr(&band, l)? * x;
        if snr <= gamma {
            covered = false;
        }
        let rate = band.bandwidth() * snr.ln_1p() / std::f64::consts::LN_2;
        if rate > 0.0 {
            inv += 1.0 / rate;
        } else {
            zero = true;
        }
        if i == 0 || i + 1 == k {
            es += rate;
            en += 1;
        } else {
            ms += rate;
            mn += 1;
        }
    }
    Ok(TrialResult {
        strategy: planner.strategy(),
        hop_count: k,
        throughput,
        covered,
        failed: false,
        shared_relays: route.shared_relays,
        faded_throughput: if zero { 0.0 } else { 1.0 / inv },
        edge_rate_sum: es,
        edge_hops: en,
        middle_rate_sum: ms,
        middle_hops: mn,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct McSummary {
    pub strategy: StrategyKind,
    pub trials: usize,
    /// Mean route throughput from fading-averaged hop rates (bit/s).
    pub mean_throughput: f64,
    /// Half-width of the normal-approximation 95% interval on `mean_throughput`.
    pub throughput_ci95: f64,
    pub coverage_rate: f64,
    pub failure_rate: f64,
    pub mean_hop_count: f64,
    /// Fraction of trials where adjacent ideal positions shared a relay.
    pub shared_relay_rate: f64,
    /// Mean route throughput with per-hop fading draws.
    pub mean_faded_throughput: f64,
    /// Mean faded rate of first/last hops and of middle hops.
    pub edge_hop_mean: f64,
    pub middle_hop_mean: Option<f64>,
}

impl McSummary {
    pub fn from_trials(strategy: StrategyKind, results: &[TrialResult]) -> Result<Self> {
        let n = results.len();
        require(n >= 1, "at least one trial is required")?;
        let nf = n as f64;
        let mut sum = 0.0;
        let (mut cov, mut fail, mut hops, mut shared, mut faded) = (0usize, 0usize, 0usize, 0usize, 0.0);
        let (mut es, mut en, mut ms, mut mn) = (0.0, 0usize, 0.0, 0usize);
        for r in results {
            sum += r.throughput;
            cov += r.covered as usize;
            fail += r.failed as usize;
            hops += r.hop_count;
            shared += (r.shared_relays > 0) as usize;
            faded += r.faded_throughput;
            es += r.edge_rate_sum;
            en += r.edge_hops;
            ms += r.middle_rate_sum;
            mn += r.middle_hops;
        }
        let mean = sum / nf;
        let var = if n > 1 {
            results.iter().map(|r| (r.throughput - mean).powi(2)).sum::<f64>() / (nf - 1.0)
        } else {
            0.0
        };
        Ok(McSummary {
            strategy,
            trials: n,
            mean_throughput: mean,
            throughput_ci95: 1.96 * (var / nf).sqrt(),
            coverage_rate: cov as f64 / nf,
            failure_rate: fail as f64 / nf,
            mean_hop_count: hops as f64 / nf,
            shared_relay_rate: shared as f64 / nf,
            mean_faded_throughput: faded / nf,
            edge_hop_mean: if en > 0 { es / en as f64 } else { 0.0 },
            middle_hop_mean: if mn > 0 { Some(ms / mn as f64) } else { None },
        })
    }

    /// Route throughput rebuilt from the mean edge and middle hop rates for a
    /// `hop_count`-hop route, the Monte Carlo counterpart of the analytic
    /// combination.
    pub fn hopwise_throughput(&self, hop_count: usize) -> f64 {
        crate::analysis::combine(self.edge_hop_mean, self.middle_hop_mean.unwrap_or(0.0), hop_count)
    }
}

#[cfg(feature = "parallel")]
fn collect_trials(planner: &Planner, gamma: f64, trials: usize, seed: u64, opts: &McOptions) -> Result<Vec<TrialResult>> {
    use rayon::prelude::*;
    (0..trials as u64).into_par_iter().map(|t| run_trial(planner, gamma, seed, t, opts)).collect()
}

#[cfg(not(feature = "parallel"))]
fn collect_trials(planner: &Planner, gamma: f64, trials: usize, seed: u64, opts: &McOptions) -> Result<Vec<TrialResult>> {
    (0..trials as u64).map(|t| run_trial(planner, gamma, seed, t, opts)).collect()
}

/// Seeded experiment. Trial `t` draws from stream `t` of the seed, and the
/// reduction runs in trial order, so the summary is bit-identical for any
/// number of worker threads.
pub fn monte_carlo(strategy: StrategyKind, scenario: &Scenario, gamma: f64, trials: usize, seed: u64) -> Result<McSummary> {
    monte_carlo_with(strategy, scenario, gamma, trials, seed, &McOptions::default())
}

pub fn monte_carlo_with(
    strategy: StrategyKind,
    scenario: &Scenario,
    gamma: f64,
    trials: usize,
    seed: u64,
    opts: &McOptions,
) -> Result<McSummary> {
    require(trials >= 1, "at least one trial is required")?;
    if !(opts.window_scale >= 1.0) {
        return Err(domain("window scale must be at least 1"));
    }
    let planner = Planner::new(strategy, *scenario)?;
    let results = collect_trials(&planner, gamma, trials, seed, opts)?;
    McSummary::from_trials(strategy, &results)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizer::{ideal_objective, optimal_hop_count};
    use approx::assert_relative_eq;

    fn thz() -> Scenario {
        Scenario::new(BandParams::default_thz(), 100.0, 1.0, 1e-2).unwrap()
    }

    fn field(points: Vec<Point>, r: f64) -> PointField {
        PointField::from_points(points, 1e-2, Window::around_route(r).unwrap()).unwrap()
    }

    #[test]
    fn stepwise_on_ideal_positions() {
        let sc = Scenario::new(BandParams::default_thz(), 100.0, 1e-2, 1e-2).unwrap();
        let k = stepwise_hop_count(&sc).unwrap();
        assert!(k > 1);
        let pts = (1..k).map(|i| Point::new(100.0 * i as f64 / k as f64, 0.0)).collect();
        let f = field(pts, 100.0);
        for s in [StrategyKind::StepwiseOptimal, StrategyKind::StepwiseSuboptimal] {
            let r = plan_route(s, &sc, &f).unwrap();
            assert_eq!(r.plan.hop_count(), k);
            for (&d, &p) in r.plan.hop_distances.iter().zip(&r.plan.hop_powers) {
                assert_relative_eq!(d, 100.0 / k as f64, max_relative = 1e-12);
                assert_relative_eq!(p, 1e-2 / k as f64, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn long_hop_direct_when_in_range() {
        let sc = Scenario::new(BandParams::default_thz(), 30.0, 1.0, 1e-2).unwrap();
        let f = field(vec![Point::new(10.0, 1.0)], 30.0);
        let r = plan_route(StrategyKind::LongHop { radius: 40.0 }, &sc, &f).unwrap();
        assert_eq!(r.plan.hop_count(), 1);
        assert_eq!(r.plan.hop_distances, vec![30.0]);
    }

    #[test]
    fn long_hop_fails_without_progress() {
        let sc = thz();
        let f = field(vec![Point::new(-10.0, 0.0)], 100.0);
        assert!(matches!(plan_route(StrategyKind::LongHop { radius: 40.0 }, &sc, &f), Err(Error::NoRoute(_))));
    }

    #[test]
    fn long_hop_greedy_choice() {
        let sc = thz();
        let f = field(vec![Point::new(20.0, 0.0), Point::new(39.0, 5.0), Point::new(70.0, 0.0)], 100.0);
        let r = plan_route(StrategyKind::LongHop { radius: 40.0 }, &sc, &f).unwrap();
        assert_eq!(r.waypoints, vec![source(), Point::new(39.0, 5.0), Point::new(70.0, 0.0), target(&sc)]);
    }

    #[test]
    fn short_hop_cone_and_direct() {
        let sc = thz();
        // (5, 10) is outside the π/4 cone; (10, 1) and (50, -3) are inside.
        let f = field(vec![Point::new(5.0, 10.0), Point::new(50.0, -3.0), Point::new(10.0, 1.0)], 100.0);
        let r = plan_route(StrategyKind::short_hop_default(), &sc, &f).unwrap();
        assert_eq!(r.waypoints, vec![source(), Point::new(10.0, 1.0), Point::new(50.0, -3.0), target(&sc)]);
        let empty = field(vec![], 100.0);
        let r = plan_route(StrategyKind::short_hop_default(), &sc, &empty).unwrap();
        assert_eq!(r.plan.hop_count(), 1);
    }

    #[test]
    fn strategy_validation() {
        assert!(StrategyKind::LongHop { radius: 0.0 }.validate().is_err());
        assert!(StrategyKind::ShortHop { max_angle: PI }.validate().is_err());
        assert!(StrategyKind::short_hop_default().validate().is_ok());
    }

    #[test]
    fn realized_single_hop_and_bound() {
        let band = BandParams::default_thz();
        let plan = RoutePlan { hop_distances: vec![12.0], hop_powers: vec![0.5], regime: Regime::HighSnr };
        assert_eq!(
            realize_throughput(&plan, &band).unwrap(),
            hop_throughput_avg(&band, crate::channel::HopLink::new(12.0, 0.5)).unwrap()
        );
        let plan = RoutePlan { hop_distances: vec![12.0, 30.0, 7.0], hop_powers: vec![0.2, 0.5, 0.3], regime: Regime::HighSnr };
        let t = realize_throughput(&plan, &band).unwrap();
        let min = plan.links().map(|l| hop_throughput_avg(&band, l).unwrap()).fold(f64::INFINITY, f64::min);
        assert!(t <= min);
    }

    #[test]
    fn coverage_zero_threshold_and_rf_rate() {
        let band = BandParams::default_rf();
        let plan = RoutePlan { hop_distances: vec![900.0], hop_powers: vec![1e-3], regime: Regime::LowSnr };
        let mut rng = trial_rng(3, 0);
        for _ in 0..1000 {
            assert!(realize_coverage(&plan, &band, 0.0, &mut rng).unwrap());
        }
        let snr = 1e-3 * band.unit_snr(900.0);
        let gamma = snr * 0.7;
        let n = 100_000;
        let hits = (0..n).filter(|_| realize_coverage(&plan, &band, gamma, &mut rng).unwrap()).count();
        assert!((hits as f64 / n as f64 - (-0.7f64).exp()).abs() < 0.01);
    }

    #[test]
    fn deterministic_and_single_trial() {
        let sc = thz();
        let a = monte_carlo(StrategyKind::StepwiseOptimal, &sc, 1.0, 200, 42).unwrap();
        let b = monte_carlo(StrategyKind::StepwiseOptimal, &sc, 1.0, 200, 42).unwrap();
        assert_eq!(a, b);
        let one = monte_carlo(StrategyKind::ShortHop { max_angle: FRAC_PI_4 }, &sc, 1.0, 1, 9).unwrap();
        let planner = Planner::new(StrategyKind::short_hop_default(), sc).unwrap();
        let t = run_trial(&planner, 1.0, 9, 0, &McOptions::default()).unwrap();
        assert_eq!(one, McSummary::from_trials(StrategyKind::short_hop_default(), &[t]).unwrap());
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn worker_count_does_not_change_results() {
        let sc = thz();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| monte_carlo(StrategyKind::StepwiseSuboptimal, &sc, 0.5, 300, 5).unwrap())
        };
        assert_eq!(run(1), run(3));
    }

    #[test]
    fn ideal_bounds_each_realization() {
        let sc = thz();
        let (_, bound) = ideal_route(&sc).unwrap();
        assert_eq!(optimal_hop_count(&sc).unwrap(), 2);
        assert_relative_eq!(bound, ideal_objective(&sc, 2).unwrap());
        let opts = McOptions::default();
        for s in StrategyKind::all(Band::Thz) {
            let p = Planner::new(s, sc).unwrap();
            for t in 0..300 {
                let r = run_trial(&p, 1.0, 11, t, &opts).unwrap();
                assert!(r.throughput <= bound * (1.0 + 1e-12), "{s:?} trial {t}: {} > {bound}", r.throughput);
            }
        }
    }

    #[test]
    fn failures_report_zero() {
        let sc = Scenario::new(BandParams::default_thz(), 100.0, 1.0, 1e-4).unwrap();
        let s = monte_carlo(StrategyKind::LongHop { radius: 10.0 }, &sc, 1.0, 50, 1).unwrap();
        assert_eq!(s.failure_rate, 1.0);
        assert_eq!(s.mean_throughput, 0.0);
        assert_eq!(s.coverage_rate, 0.0);
    }
}

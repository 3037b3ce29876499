use crate::config::{BandSetup, RunConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sg_router::analysis::{AnalysisConfig, Analyzer, HopLaws};
use sg_router::channel::{avg_snr, Band, BandParams, HopLink};
use sg_router::geometry::{DistanceKind, DistancePdf};
use sg_router::optimizer::{
    allocate_power_high_snr, allocate_power_low_snr, hop_cap, hop_cap_bound, hop_design, ideal_objective,
    optimal_hop_count, stepwise_hop_count, Regime, Scenario, DEFAULT_EPSILON,
};
use sg_router::simulate::{monte_carlo, StrategyKind};
use sg_router::uav::{uav_monte_carlo, LosParams, UavScenario};
use sg_router::units::dbm_to_watts;
use std::collections::HashMap;
use std::io::Write;

pub const SCHEMA_LINE: &str = "# sg-router v1";

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error("numerical failure: {0}")]
    Numeric(#[from] sg_router::Error),
    #[error("output error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

/// Options that apply to every subcommand.
#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub seed: u64,
    pub quick: bool,
}

impl RunOptions {
    fn trials(&self, configured: usize) -> usize {
        if self.quick {
            (configured / 10).max(100).min(configured)
        } else {
            configured
        }
    }
}

fn csv_writer(out: &mut dyn Write) -> Result<csv::Writer<&mut dyn Write>, CommandError> {
    writeln!(out, "{SCHEMA_LINE}")?;
    Ok(csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out))
}

fn band_label(b: Band) -> &'static str {
    match b {
        Band::Thz => "thz",
        Band::Rf => "rf",
    }
}

/// Distance laws keyed by (separation, density) so sweeps over power reuse
/// the tables.
#[derive(Default)]
struct LawCache(HashMap<(u64, u64, bool), HopLaws>);

impl LawCache {
    fn analyzer(&mut self, cfg: AnalysisConfig) -> Result<Analyzer, sg_router::Error> {
        let key = (cfg.hop_separation().to_bits(), cfg.scenario.relay_density.to_bits(), cfg.hop_count >= 3);
        let laws = match self.0.get(&key) {
            Some(l) => l.clone(),
            None => {
                let l = HopLaws::for_config(&cfg)?;
                self.0.insert(key, l.clone());
                l
            }
        };
        Analyzer::with_laws(cfg, laws)
    }
}

fn scenario(setup: &BandSetup, r: f64, dbm: f64) -> Result<Scenario, sg_router::Error> {
    Scenario::new(setup.params, r, dbm_to_watts(dbm), setup.relay_density)
}

/// Locale-free number formatting: plain decimals in the usual range and
/// exponent notation outside it, so tiny probabilities stay short.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e15).contains(&a) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

pub fn compare(cfg: &RunConfig, opts: RunOptions, out: &mut dyn Write) -> Result<(), CommandError> {
    let trials = opts.trials(cfg.run.trials);
    let mut w = csv_writer(out)?;
    w.write_record([
        "band",
        "strategy",
        "R_m",
        "S_dBm",
        "mean_throughput",
        "ci95",
        "coverage",
        "failures",
        "analytic_throughput",
        "analytic_coverage",
    ])?;
    let mut laws = LawCache::default();
    for band in cfg.bands() {
        let setup = cfg.band_setup(band).expect("validated");
        for &r in setup.distances {
            for &dbm in &cfg.scenario.powers_dbm {
                let sc = scenario(&setup, r, dbm)?;
                for strategy in cfg.strategies(&setup) {
                    let mc = monte_carlo(strategy, &sc, setup.gamma, trials, opts.seed)?;
                    let (at, ac) = if strategy == StrategyKind::StepwiseSuboptimal {
                        let k = stepwise_hop_count(&sc)?;
                        let a = laws.analyzer(AnalysisConfig::new(sc, k, setup.gamma)?)?;
                        (num(a.total_throughput()?), num(a.coverage()?))
                    } else {
                        (String::new(), String::new())
                    };
                    w.write_record([
                        band_label(band).to_string(),
                        strategy.name().to_string(),
                        num(r),
                        num(dbm),
                        num(mc.mean_throughput),
                        num(mc.throughput_ci95),
                        num(mc.coverage_rate),
                        num(mc.failure_rate),
                        at,
                        ac,
                    ])?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Analytic coverage of the stepwise-suboptimal route on the (R, S) grid.
pub fn heatmap_values(cfg: &RunConfig, band: Band) -> Result<Vec<Vec<f64>>, sg_router::Error> {
    let setup = cfg.band_setup(band).expect("validated");
    let mut laws = LawCache::default();
    let mut rows = Vec::new();
    for &r in &cfg.heatmap.distances_m {
        let mut row = Vec::new();
        for &dbm in &cfg.heatmap.powers_dbm {
            let sc = scenario(&setup, r, dbm)?;
            let k = stepwise_hop_count(&sc)?;
            row.push(laws.analyzer(AnalysisConfig::new(sc, k, setup.gamma)?)?.coverage()?);
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn heatmap(cfg: &RunConfig, out: &mut dyn Write) -> Result<(), CommandError> {
    let mut w = csv_writer(out)?;
    let mut header = vec!["band".to_string(), "R_m".to_string()];
    header.extend(cfg.heatmap.powers_dbm.iter().map(|s| format!("S_dBm={s}")));
    w.write_record(&header)?;
    for band in cfg.bands() {
        let rows = heatmap_values(cfg, band)?;
        for (r, row) in cfg.heatmap.distances_m.iter().zip(rows) {
            let mut rec = vec![band_label(band).to_string(), num(*r)];
            rec.extend(row.iter().map(|&v| num(v)));
            w.write_record(&rec)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn uav_scenario(cfg: &RunConfig, r: f64, dbm: f64, h: f64, per_km2: f64) -> Result<UavScenario, sg_router::Error> {
    let setup = cfg.band_setup(Band::Thz).expect("validated");
    let u = &cfg.uav;
    let mut sc = UavScenario::new(setup.params, r, dbm_to_watts(dbm), h, per_km2 * 1e-6)?;
    sc.absorption_los = u.absorption_los_per_m;
    sc.absorption_nlos = u.absorption_nlos_per_m;
    sc.los = LosParams { a: u.los_a, b: u.los_b };
    sc.validate()?;
    Ok(sc)
}

pub fn uav_sweep(cfg: &RunConfig, opts: RunOptions, out: &mut dyn Write) -> Result<(), CommandError> {
    let u = &cfg.uav;
    let trials = opts.trials(u.trials);
    let mut w = csv_writer(out)?;
    w.write_record(["sweep", "altitude_m", "density_per_km2", "S_dBm", "R_m", "mean_throughput", "ci95"])?;
    for &r in &u.distances_m {
        for &dbm in &u.powers_dbm {
            let mut emit = |sweep: &str, h: f64, d: f64| -> Result<(), CommandError> {
                let m = uav_monte_carlo(&uav_scenario(cfg, r, dbm, h, d)?, trials, opts.seed)?;
                w.write_record([
                    sweep.to_string(),
                    num(h),
                    num(d),
                    num(dbm),
                    num(r),
                    num(m.mean_throughput),
                    num(m.throughput_ci95),
                ])?;
                Ok(())
            };
            for &h in &u.altitudes_m {
                emit("altitude", h, u.density_per_km2)?;
            }
            for &d in &u.densities_per_km2 {
                emit("density", u.altitude_m, d)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// One line of the validation report.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

/// Reference routes for the self-checks: THz over 100 m and RF over 1000 m.
fn reference(cfg: &RunConfig) -> [(Band, BandSetup<'_>, f64); 2] {
    [
        (Band::Thz, cfg.band_setup(Band::Thz).expect("validated"), 100.0),
        (Band::Rf, cfg.band_setup(Band::Rf).expect("validated"), 1000.0),
    ]
}

fn check_pdf_normalization() -> Result<Check, sg_router::Error> {
    let mut worst = (0.0f64, 0.0f64);
    for (lam, r) in [(1e-2, 10.0), (5e-4, 400.0), (1e-1, 3.0)] {
        let m1 = DistancePdf::tabulated(DistanceKind::TypeI, r, lam)?.table().expect("tabulated").mass();
        let m2 = DistancePdf::tabulated(DistanceKind::TypeII, r, lam)?.table().expect("tabulated").mass();
        worst = (worst.0.max((m1 - 1.0).abs()), worst.1.max((m2 - 1.0).abs()));
    }
    Ok(Check {
        name: "pdf-normalization",
        pass: worst.0 < 1e-3 && worst.1 < 3e-3,
        detail: format!("max |mass-1| Type-I {:.2e} (<1e-3), Type-II {:.2e} (<3e-3)", worst.0, worst.1),
    })
}

fn check_analytic_mc(cfg: &RunConfig, trials: usize, seed: u64) -> Result<Check, sg_router::Error> {
    let mut worst: f64 = 0.0;
    let mut laws = LawCache::default();
    for (_, setup, r) in reference(cfg) {
        for dbm in [-10.0, 10.0, 30.0] {
            let sc = scenario(&setup, r, dbm)?;
            let k = stepwise_hop_count(&sc)?;
            let analytic = laws.analyzer(AnalysisConfig::new(sc, k, setup.gamma)?)?.total_throughput()?;
            let mc = monte_carlo(StrategyKind::StepwiseSuboptimal, &sc, setup.gamma, trials, seed)?;
            worst = worst.max((analytic - mc.hopwise_throughput(k)).abs() / mc.hopwise_throughput(k));
        }
    }
    Ok(Check {
        name: "analytic-vs-mc",
        pass: worst <= 0.05,
        detail: format!("worst relative gap {worst:.4} (≤0.05) over {trials} trials"),
    })
}

fn check_coverage(cfg: &RunConfig, trials: usize, seed: u64) -> Result<Check, sg_router::Error> {
    let mut worst: f64 = 0.0;
    let mut laws = LawCache::default();
    for (_, setup, r) in reference(cfg) {
        let sc = Scenario::new(setup.params, r, 1.0, setup.relay_density)?;
        let k = stepwise_hop_count(&sc)?;
        let a = laws.analyzer(AnalysisConfig::new(sc, k, setup.gamma)?)?.coverage()?;
        let mc = monte_carlo(StrategyKind::StepwiseSuboptimal, &sc, setup.gamma, trials, seed)?;
        worst = worst.max((a - mc.coverage_rate).abs());
    }
    Ok(Check { name: "coverage-vs-mc", pass: worst <= 0.02, detail: format!("worst |gap| {worst:.4} (≤0.02) at S = 1 W") })
}

fn check_ordering(cfg: &RunConfig, trials: usize, seed: u64) -> Result<Check, sg_router::Error> {
    let mut ok = true;
    let mut detail = Vec::new();
    let angle = cfg.scenario.short_hop_max_angle_deg.to_radians();
    for (band, setup, r) in reference(cfg) {
        let sc = Scenario::new(setup.params, r, 1.0, setup.relay_density)?;
        let run = |s| monte_carlo(s, &sc, setup.gamma, trials, seed);
        let ideal = run(StrategyKind::Ideal)?;
        let swo = run(StrategyKind::StepwiseOptimal)?;
        let sws = run(StrategyKind::StepwiseSuboptimal)?;
        let long = run(StrategyKind::LongHop { radius: setup.long_hop_radius })?;
        let short = run(StrategyKind::ShortHop { max_angle: angle })?;
        let base = if long.mean_throughput >= short.mean_throughput { long } else { short };
        let this = ideal.mean_throughput >= swo.mean_throughput
            && swo.mean_throughput >= sws.mean_throughput
            && sws.mean_throughput - sws.throughput_ci95 > base.mean_throughput + base.throughput_ci95;
        ok &= this;
        detail.push(format!("{} {}", band_label(band), if this { "ordered" } else { "out of order" }));
    }
    Ok(Check { name: "strategy-ordering", pass: ok, detail: detail.join(", ") })
}

fn check_optimizer(cfg: &RunConfig, seed: u64) -> Result<Check, sg_router::Error> {
    let mut mismatches = 0;
    let mut scanned = 0;
    for (_, setup, r) in reference(cfg) {
        for dbm in [-10.0, 0.0, 10.0, 20.0, 30.0, 40.0] {
            let sc = scenario(&setup, r, dbm)?;
            let d = hop_design(&sc)?;
            if d.regime != Regime::HighSnr || d.unconstrained >= 200 {
                continue;
            }
            scanned += 1;
            let mut best = (1, ideal_objective(&sc, 1)?);
            for k in 2..=200 {
                let v = ideal_objective(&sc, k)?;
                if v > best.1 {
                    best = (k, v);
                }
            }
            mismatches += (optimal_hop_count(&sc)? != best.0) as usize;
        }
    }
    let cap_ok = hop_cap(1e-2, 100.0, DEFAULT_EPSILON)? == 4 && hop_cap_bound(1e-2, 100.0, DEFAULT_EPSILON)? < 5.0;
    // Stationarity of both allocation rules on random distances.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let band = cfg.band_setup(Band::Thz).expect("validated").params;
    let mut spread: f64 = 0.0;
    for _ in 0..20 {
        let k = rng.random_range(2..8);
        let d: Vec<f64> = (0..k).map(|_| rng.random_range(2.0..25.0)).collect();
        let low = allocate_power_low_snr(&band, &d, 1.0)?;
        let high = allocate_power_high_snr(&band, &d, 1.0)?;
        spread = spread.max(rel_spread(d.iter().zip(&low).map(|(&r, &s)| snr(&band, r, s) * s)));
        spread = spread.max(rel_spread(d.iter().zip(&high).map(|(&r, &s)| snr(&band, r, s).log2() * s.sqrt())));
    }
    Ok(Check {
        name: "optimizer-oracle",
        pass: mismatches == 0 && cap_ok && spread < 1e-8,
        detail: format!("{mismatches} hop-count mismatches in {scanned} scans, cap ok {cap_ok}, stationarity spread {spread:.1e}"),
    })
}

fn snr(band: &BandParams, r: f64, s: f64) -> f64 {
    avg_snr(band, HopLink::new(r, s)).expect("positive inputs")
}

fn rel_spread(v: impl Iterator<Item = f64>) -> f64 {
    let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    (hi - lo) / hi.abs()
}

pub fn validate(cfg: &RunConfig, opts: RunOptions) -> Result<Vec<Check>, sg_router::Error> {
    let trials = if opts.quick { 2_000 } else { 20_000 };
    Ok(vec![
        check_pdf_normalization()?,
        check_analytic_mc(cfg, trials, opts.seed)?,
        check_coverage(cfg, trials, opts.seed)?,
        check_ordering(cfg, 1_000, opts.seed)?,
        check_optimizer(cfg, opts.seed)?,
    ])
}

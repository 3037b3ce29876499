use sg_router::analysis::{fairness_threshold, AnalysisConfig, Analyzer, HopLaws};
use sg_router::channel::{Band, BandParams};
use sg_router::geometry::{DistanceKind, DistancePdf};
use sg_router::optimizer::{ideal_route, stepwise_hop_count, Scenario};
use sg_router::units::{db_to_linear, dbm_to_watts};
use std::collections::HashMap;

fn band(name: &str) -> Result<Band, String> {
    match name {
        "thz" => Ok(Band::Thz),
        "rf" => Ok(Band::Rf),
        _ => Err(format!("unknown band {name:?}")),
    }
}

fn params(b: Band) -> BandParams {
    match b {
        Band::Thz => BandParams::default_thz(),
        Band::Rf => BandParams::default_rf(),
    }
}

pub fn distance_pdf(kind: &str, density: f64, separation: f64, points: usize) -> Result<Vec<f64>, String> {
    let kind = match kind {
        "type1" => DistanceKind::TypeI,
        "type2" => DistanceKind::TypeII,
        _ => return Err(format!("unknown distance kind {kind:?}")),
    };
    if points < 2 {
        return Err("need at least two points".into());
    }
    let pdf = DistancePdf::tabulated(kind, separation, density).map_err(|e| e.to_string())?;
    let (_, hi) = pdf.support();
    let mut out = Vec::with_capacity(2 * points);
    for i in 0..points {
        let rho = hi * i as f64 / (points - 1) as f64;
        out.push(rho);
        out.push(pdf.pdf(rho).map_err(|e| e.to_string())?);
    }
    Ok(out)
}

/// Laws depend only on hop separation, density and whether a middle hop
/// exists, so sweeps over power reuse them.
#[derive(Default)]
struct Laws(HashMap<(u64, bool), HopLaws>);

impl Laws {
    fn analyzer(&mut self, cfg: AnalysisConfig) -> Result<Analyzer, String> {
        let key = (cfg.hop_separation().to_bits(), cfg.hop_count >= 3);
        let laws = match self.0.get(&key) {
            Some(l) => l.clone(),
            None => {
                let l = HopLaws::for_config(&cfg).map_err(|e| e.to_string())?;
                self.0.insert(key, l.clone());
                l
            }
        };
        Analyzer::with_laws(cfg, laws).map_err(|e| e.to_string())
    }
}

pub fn throughput_curve(band_name: &str, density: f64, distance: f64, powers_dbm: &[f64]) -> Result<Vec<f64>, String> {
    let p = params(band(band_name)?);
    let mut laws = Laws::default();
    let mut out = Vec::with_capacity(4 * powers_dbm.len());
    for &dbm in powers_dbm {
        let sc = Scenario::new(p, distance, dbm_to_watts(dbm), density).map_err(|e| e.to_string())?;
        let (plan, ideal) = ideal_route(&sc).map_err(|e| e.to_string())?;
        let k = stepwise_hop_count(&sc).map_err(|e| e.to_string())?;
        let cfg = AnalysisConfig::new(sc, k, 1.0).map_err(|e| e.to_string())?;
        let analytic = laws.analyzer(cfg)?.total_throughput().map_err(|e| e.to_string())?;
        out.extend([plan.hop_count() as f64, ideal, k as f64, analytic]);
    }
    Ok(out)
}

/// Coverage at the stepwise hop count. The THz threshold is mapped from the
/// RF one so both bands ask for the same rate.
pub fn coverage_map(
    band_name: &str,
    density: f64,
    rf_gamma_db: f64,
    distances: &[f64],
    powers_dbm: &[f64],
) -> Result<Vec<f64>, String> {
    let b = band(band_name)?;
    let p = params(b);
    let rf_gamma = db_to_linear(rf_gamma_db);
    let gamma = match b {
        Band::Rf => rf_gamma,
        Band::Thz => fairness_threshold(&BandParams::default_rf(), &p, rf_gamma),
    };
    let mut laws = Laws::default();
    let mut out = Vec::with_capacity(distances.len() * powers_dbm.len());
    for &r in distances {
        for &dbm in powers_dbm {
            let sc = Scenario::new(p, r, dbm_to_watts(dbm), density).map_err(|e| e.to_string())?;
            let k = stepwise_hop_count(&sc).map_err(|e| e.to_string())?;
            let cfg = AnalysisConfig::new(sc, k, gamma).map_err(|e| e.to_string())?;
            out.push(laws.analyzer(cfg)?.coverage().map_err(|e| e.to_string())?);
        }
    }
    Ok(out)
}

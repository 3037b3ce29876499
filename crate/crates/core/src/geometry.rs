//! Poisson relay fields, nearest-neighbour queries and hop-distance laws.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{domain, require, Error, Result};
use crate::quad::{integrate, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn dist2(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    /// Point a fraction `t` of the way from `self` to `other`.
    pub fn lerp(self, other: Point, t: f64) -> Point {
        Point::new(self.x + t * (other.x - self.x), self.y + t * (other.y - self.y))
    }
}

/// Axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Window {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        require(
            x_max > x_min && y_max > y_min && (x_max - x_min).is_finite() && (y_max - y_min).is_finite(),
            "window must have positive finite area",
        )?;
        Ok(Window { x_min, x_max, y_min, y_max })
    }

    /// `[−R/2, 3R/2] × [−R, R]` around a source at the origin and a target at `(R, 0)`.
    pub fn around_route(r: f64) -> Result<Self> {
        require(r > 0.0, "route length must be positive")?;
        Self::new(-0.5 * r, 1.5 * r, -r, r)
    }

    /// Same centre, each side scaled by `k`.
    pub fn scaled(&self, k: f64) -> Result<Self> {
        let cx = 0.5 * (self.x_min + self.x_max);
        let cy = 0.5 * (self.y_min + self.y_max);
        let hx = 0.5 * k * (self.x_max - self.x_min);
        let hy = 0.5 * k * (self.y_max - self.y_min);
        Self::new(cx - hx, cx + hx, cy - hy, cy + hy)
    }

    pub fn area(&self) -> f64 {
        (self.x_max - self.x_min) * (self.y_max - self.y_min)
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }
}

/// One realization of a homogeneous PPP restricted to a window.
#[derive(Debug, Clone, PartialEq)]
pub struct PointField {
    points: Vec<Point>,
    density: f64,
    window: Window,
}

impl PointField {
    pub fn from_points(points: Vec<Point>, density: f64, window: Window) -> Result<Self> {
        require(density > 0.0, "density must be positive")?;
        require(points.iter().all(|p| window.contains(*p)), "point outside window")?;
        Ok(PointField { points, density, window })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }
    pub fn density(&self) -> f64 {
        self.density
    }
    pub fn window(&self) -> Window {
        self.window
    }
    pub fn len(&self) -> usize {
        self.points.len()
    }
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index and distance of the point closest to `q`; lowest index wins ties.
    pub fn nearest_index(&self, q: Point) -> Result<(usize, f64)> {
        let mut best = None;
        let mut best_d2 = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            let d2 = p.dist2(q);
            if d2 < best_d2 {
                best_d2 = d2;
                best = Some(i);
            }
        }
        best.map(|i| (i, best_d2.sqrt())).ok_or(Error::EmptyField)
    }
}

pub fn sample_ppp<R: Rng + ?Sized>(density: f64, window: Window, rng: &mut R) -> Result<PointField> {
    require(density > 0.0 && density.is_finite(), "density must be positive")?;
    let mean = density * window.area();
    require(mean.is_finite() && mean > 0.0, "window area must be positive")?;
    let n = Poisson::new(mean).map_err(|e| domain(e.to_string()))?.sample(rng) as usize;
    let w = window.x_max - window.x_min;
    let h = window.y_max - window.y_min;
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let x = window.x_min + w * rng.random::<f64>();
        let y = window.y_min + h * rng.random::<f64>();
        points.push(Point::new(x, y));
    }
    Ok(PointField { points, density, window })
}

pub fn nearest_to(field: &PointField, query: Point) -> Result<(Point, f64)> {
    let (i, d) = field.nearest_index(query)?;
    Ok((field.points[i], d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DistanceKind {
    /// From a fixed point to the relay nearest another fixed point.
    TypeI,
    /// Between the relays nearest two fixed points.
    TypeII,
}

const INNER_TOL: f64 = 1e-7;
const NESTED_INNER_TOL: f64 = 1e-6;
const OUTER_TOL: f64 = 1e-5;

fn check_args(density: f64, r: f64, rho: f64) -> Result<()> {
    require(density > 0.0 && density.is_finite(), "density must be positive")?;
    require(r >= 0.0 && r.is_finite(), "reference separation must be nonnegative")?;
    if !(rho > 0.0) {
        return Err(domain(format!("hop distance must be positive, got {rho}")));
    }
    Ok(())
}

fn type1_raw(density: f64, r: f64, rho: f64, tol: f64) -> Result<f64> {
    // Substituting l = c + h sin w spans l ∈ [|r−ρ|, r+ρ] and cancels both
    // inverse-square-root endpoint singularities of the law-of-cosines Jacobian.
    let c = r.max(rho);
    let h = r.min(rho);
    let lp = density * PI;
    if h == 0.0 {
        return Ok(2.0 * lp * rho * (-lp * rho * rho).exp());
    }
    let f = |w: f64| {
        let s = w.sin();
        let l = c + h * s;
        let q = (2.0 * c - h + h * s) * (2.0 * c + h + h * s);
        if l <= 0.0 || q <= 0.0 {
            0.0
        } else {
            l * (-lp * l * l).exp() / q.sqrt()
        }
    };
    // The Gaussian factor can be far narrower than [−π/2, π/2]; peak-bracketing
    // breakpoints keep the adaptive rule from missing it.
    let est = integrate(f, -FRAC_PI_2, FRAC_PI_2, Tolerance::rel(tol).with_abs(1e-300))?;
    Ok((4.0 * density * rho * est.value).max(0.0))
}

/// Density of the Type-I hop distance at `rho` for reference separation `r`.
pub fn type1_pdf(density: f64, r: f64, rho: f64) -> Result<f64> {
    check_args(density, r, rho)?;
    type1_raw(density, r, rho, INNER_TOL)
}

/// Density of the Type-II hop distance, treating the two nearest-neighbour
/// selections as independent.
pub fn type2_pdf(density: f64, r: f64, rho: f64) -> Result<f64> {
    check_args(density, r, rho)?;
    type2_raw(density, r, rho)
}

fn type2_raw(density: f64, r: f64, rho: f64) -> Result<f64> {
    let lp = density * PI;
    let rho_hat_max = 5.0 / lp.sqrt();
    let mut failure = None;
    let outer = |rh: f64| {
        if rh == 0.0 {
            return 0.0;
        }
        let inner = |theta: f64| {
            let rr = (r * r + rh * rh - 2.0 * r * rh * theta.cos()).max(0.0).sqrt();
            match type1_raw(density, rr, rho, NESTED_INNER_TOL) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        };
        let v = match integrate(inner, 0.0, PI, Tolerance::rel(OUTER_TOL).with_abs(1e-300)) {
            Ok(e) => e.value,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        };
        2.0 * density * rh * (-lp * rh * rh).exp() * v
    };
    let est = integrate(outer, 0.0, rho_hat_max, Tolerance::rel(OUTER_TOL).with_abs(1e-300));
    let failure_seen = failure.take();
    let est = est?;
    if let Some(e) = failure_seen {
        return Err(e);
    }
    Ok(est.value.max(0.0))
}

/// Tabulated law on a uniform grid: linear PDF interpolation, trapezoid CDF.
#[derive(Debug, Clone, PartialEq)]
pub struct PdfTable {
    lo: f64,
    step: f64,
    pdf: Vec<f64>,
    cdf: Vec<f64>,
}

impl PdfTable {
    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.lo + self.step * (self.pdf.len() - 1) as f64)
    }

    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.pdf.iter().enumerate().map(move |(i, &f)| (self.lo + self.step * i as f64, f))
    }

    /// Trapezoid mass of the table before normalization.
    pub fn mass(&self) -> f64 {
        *self.cdf.last().expect("non-empty table")
    }

    pub fn pdf(&self, rho: f64) -> f64 {
        let (lo, hi) = self.support();
        if rho < lo || rho > hi {
            return 0.0;
        }
        let t = (rho - lo) / self.step;
        let i = (t.floor() as usize).min(self.pdf.len() - 2);
        let u = t - i as f64;
        self.pdf[i] * (1.0 - u) + self.pdf[i + 1] * u
    }

    /// Normalized CDF at `rho`.
    pub fn cdf(&self, rho: f64) -> f64 {
        let (lo, hi) = self.support();
        if rho <= lo {
            return 0.0;
        }
        if rho >= hi {
            return 1.0;
        }
        let t = (rho - lo) / self.step;
        let i = (t.floor() as usize).min(self.pdf.len() - 2);
        let u = t - i as f64;
        let f0 = self.pdf[i];
        let f1 = f0 * (1.0 - u) + self.pdf[i + 1] * u;
        (self.cdf[i] + 0.5 * (f0 + f1) * u * self.step) / self.mass()
    }

    /// Inverse of [`PdfTable::cdf`], exact on the piecewise-linear density.
    pub fn quantile(&self, p: f64) -> f64 {
        let target = p.clamp(0.0, 1.0) * self.mass();
        let i = match self.cdf.binary_search_by(|c| c.total_cmp(&target)) {
            Ok(i) => i.min(self.pdf.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.pdf.len() - 2),
        };
        let rem = target - self.cdf[i];
        let f0 = self.pdf[i];
        let slope = (self.pdf[i + 1] - f0) / self.step;
        // Solve f0 x + slope x²/2 = rem for x in [0, step].
        let x = if slope.abs() < 1e-300 * (1.0 + f0) {
            if f0 > 0.0 {
                rem / f0
            } else {
                0.0
            }
        } else {
            let disc = (f0 * f0 + 2.0 * slope * rem).max(0.0);
            2.0 * rem / (f0 + disc.sqrt())
        };
        self.lo + self.step * i as f64 + x.clamp(0.0, self.step)
    }

    /// Normalized `E[g(ρ)]` by composite Simpson on the grid nodes.
    pub fn expectation<G>(&self, mut g: G) -> Result<f64>
    where
        G: FnMut(f64) -> Result<f64>,
    {
        let n = self.pdf.len();
        debug_assert!(n % 2 == 1);
        let mut num = 0.0;
        let mut den = 0.0;
        for (i, (rho, f)) in self.nodes().enumerate() {
            let w = if i == 0 || i == n - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            if f > 0.0 {
                num += w * f * g(rho)?;
                den += w * f;
            }
        }
        if den > 0.0 {
            Ok(num / den)
        } else {
            Err(domain("distance table carries no mass"))
        }
    }
}

/// Fine-grid intervals of every table (even, for Simpson).
const TABLE_INTERVALS: usize = 1024;
/// Coarse intervals evaluated by the nested quadrature for Type-II before refinement.
const TYPE2_COARSE_INTERVALS: usize = 128;
/// Support half-width in units of the nearest-neighbour displacement scale.
const SUPPORT_SCALE: f64 = 9.0;

#[derive(Debug, Clone, PartialEq)]
pub struct DistancePdf {
    kind: DistanceKind,
    r: f64,
    density: f64,
    cache: Option<PdfTable>,
}

impl DistancePdf {
    pub fn new(kind: DistanceKind, r: f64, density: f64) -> Result<Self> {
        require(density > 0.0 && density.is_finite(), "density must be positive")?;
        require(r >= 0.0 && r.is_finite(), "reference separation must be nonnegative")?;
        Ok(DistancePdf { kind, r, density, cache: None })
    }

    /// Shorthand for `new(..)?.with_cache()`.
    pub fn tabulated(kind: DistanceKind, r: f64, density: f64) -> Result<Self> {
        Self::new(kind, r, density)?.with_cache()
    }

    pub fn kind(&self) -> DistanceKind {
        self.kind
    }
    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn density(&self) -> f64 {
        self.density
    }
    pub fn table(&self) -> Option<&PdfTable> {
        self.cache.as_ref()
    }

    /// Standard deviation per axis of the relay displacement that defines the law.
    pub fn scale(&self) -> f64 {
        let per_point = 1.0 / (2.0 * PI * self.density);
        match self.kind {
            DistanceKind::TypeI => per_point.sqrt(),
            DistanceKind::TypeII => (2.0 * per_point).sqrt(),
        }
    }

    /// Range outside which the density is negligible.
    pub fn support(&self) -> (f64, f64) {
        let s = self.scale();
        ((self.r - SUPPORT_SCALE * s).max(0.0), self.r + SUPPORT_SCALE * s)
    }

    /// Direct evaluation by quadrature; zero at the origin.
    pub fn pdf(&self, rho: f64) -> Result<f64> {
        if !(rho >= 0.0 && rho.is_finite()) {
            return Err(domain(format!("hop distance must be nonnegative, got {rho}")));
        }
        self.eval_or_zero(rho)
    }

    fn eval_or_zero(&self, rho: f64) -> Result<f64> {
        if rho <= 0.0 {
            return Ok(0.0);
        }
        match self.kind {
            DistanceKind::TypeI => type1_raw(self.density, self.r, rho, INNER_TOL),
            DistanceKind::TypeII => type2_raw(self.density, self.r, rho),
        }
    }

    pub fn with_cache(mut self) -> Result<Self> {
        if self.cache.is_none() {
            self.cache = Some(self.build_table()?);
        }
        Ok(self)
    }

    fn build_table(&self) -> Result<PdfTable> {
        let (lo, hi) = self.support();
        let n = TABLE_INTERVALS;
        let step = (hi - lo) / n as f64;
        let pdf: Vec<f64> = match self.kind {
            DistanceKind::TypeI => {
                let rhos: Vec<f64> = (0..=n).map(|i| lo + step * i as f64).collect();
                map_nodes(&rhos, |x| self.eval_or_zero(x))?
            }
            DistanceKind::TypeII => {
                let m = TYPE2_COARSE_INTERVALS;
                let coarse_step = (hi - lo) / m as f64;
                let rhos: Vec<f64> = (0..=m).map(|i| lo + coarse_step * i as f64).collect();
                let coarse = map_nodes(&rhos, |x| self.eval_or_zero(x))?;
                refine_catmull_rom(&coarse, n / m)
            }
        };
        let mut cdf = Vec::with_capacity(pdf.len());
        let mut acc = 0.0;
        cdf.push(0.0);
        for w in pdf.windows(2) {
            acc += 0.5 * (w[0] + w[1]) * step;
            cdf.push(acc);
        }
        if !(acc > 0.0) {
            return Err(domain("distance law has no mass on its support"));
        }
        Ok(PdfTable { lo, step, pdf, cdf })
    }

    pub fn cached_pdf(&self, rho: f64) -> Result<f64> {
        Ok(self.cache.as_ref().ok_or(Error::CacheMissing)?.pdf(rho))
    }

    /// Inverse-CDF draw from the tabulated law.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        let t = self.cache.as_ref().ok_or(Error::CacheMissing)?;
        Ok(t.quantile(rng.random::<f64>()))
    }

    pub fn expectation<G>(&self, g: G) -> Result<f64>
    where
        G: FnMut(f64) -> Result<f64>,
    {
        self.cache.as_ref().ok_or(Error::CacheMissing)?.expectation(g)
    }

    pub fn mean(&self) -> Result<f64> {
        self.expectation(Ok)
    }
}

pub fn sample_hop_distance<R: Rng + ?Sized>(d: &DistancePdf, rng: &mut R) -> Result<f64> {
    d.sample(rng)
}

#[cfg(feature = "parallel")]
fn map_nodes<F>(xs: &[f64], f: F) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    use rayon::prelude::*;
    xs.par_iter().map(|&x| f(x)).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_nodes<F>(xs: &[f64], f: F) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64>,
{
    xs.iter().map(|&x| f(x)).collect()
}

fn refine_catmull_rom(coarse: &[f64], factor: usize) -> Vec<f64> {
    let m = coarse.len() - 1;
    let at = |i: isize| -> f64 {
        if i < 0 {
            // Reflect linearly past the ends.
            2.0 * coarse[0] - coarse[(-i) as usize]
        } else if i as usize > m {
            2.0 * coarse[m] - coarse[2 * m - i as usize]
        } else {
            coarse[i as usize]
        }
    };
    let mut out = Vec::with_capacity(m * factor + 1);
    for i in 0..m {
        let (p0, p1, p2, p3) = (at(i as isize - 1), at(i as isize), at(i as isize + 1), at(i as isize + 2));
        for j in 0..factor {
            let t = j as f64 / factor as f64;
            let t2 = t * t;
            let t3 = t2 * t;
            let v = 0.5
                * (2.0 * p1
                    + (p2 - p0) * t
                    + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t2
                    + (3.0 * (p1 - p2) + p3 - p0) * t3);
            out.push(v.max(0.0));
        }
    }
    out.push(coarse[m].max(0.0));
    out
}

//! Moment scans over the family of odd square-free d.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gint::{squarefree_odd_vec, GInt, UNITS};
use crate::lfun::{shifted_moment_envelope, AfeContext, ShiftedBoundParams};
use crate::numeric::{zeta_k, Neumaier};
use crate::products::leading_constant_4;

pub const DEFAULT_CEILING: u64 = 10_000;
pub const STRETCH_CEILING: u64 = 100_000;
pub const DEFAULT_SCAN_TOL: f64 = 1e-8;
pub const CSV_HEADER: &str = "X,count,S1,S2,S3,S4,ratio4,seconds";
pub const SCAN_NOTE: &str = "S4 / (C4 X log^10 X) is a structural diagnostic; \
the asymptotic is not expected to emerge at these X";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub grid: Vec<u64>,
    pub tol: f64,
    /// Sum over primary d only instead of all four unit multiples.
    pub primary_only: bool,
    pub workers: usize,
    /// Allow grids up to the stretch ceiling.
    pub stretch: bool,
    /// Fill the seconds column; off keeps reruns byte-identical.
    pub record_timing: bool,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            grid: vec![100, 1_000, 10_000],
            tol: DEFAULT_SCAN_TOL,
            primary_only: false,
            workers: 1,
            stretch: false,
            record_timing: false,
        }
    }
}

impl ScanConfig {
    pub fn x_max(&self) -> u64 {
        self.grid.iter().copied().max().unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() || self.grid.contains(&0) {
            return Err(Error::Domain("grid must be non-empty and positive".into()));
        }
        let ceiling = if self.stretch { STRETCH_CEILING } else { DEFAULT_CEILING };
        if self.x_max() > ceiling {
            return Err(Error::Domain(format!("X = {} above the ceiling {ceiling}", self.x_max())));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Domain(format!("tolerance {} not positive", self.tol)));
        }
        if self.workers == 0 {
            return Err(Error::Domain("need at least one worker".into()));
        }
        Ok(())
    }
}

/// Central values for a primary square-free d and its twist i d: index 0 is d,
/// index 1 is i d. The unit multiples -d and -i d share these values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyValue {
    pub d: GInt,
    pub norm: u64,
    /// L(1/2) from the j = 1 sum.
    pub l1: [f64; 2],
    /// L(1/2)^2 from the j = 2 sum.
    pub l2: [f64; 2],
}

impl FamilyValue {
    /// (count, S1, S2, S3, S4) contributions of this ideal.
    pub fn contributions(&self, primary_only: bool) -> (u64, [f64; 4]) {
        if primary_only {
            let (a, b) = (self.l1[0], self.l2[0]);
            (1, [a, b, a * a * a, b * b])
        } else {
            let (a, b) = (self.l1, self.l2);
            (
                4,
                [
                    2.0 * (a[0] + a[1]),
                    2.0 * (b[0] + b[1]),
                    2.0 * (a[0].powi(3) + a[1].powi(3)),
                    2.0 * (b[0] * b[0] + b[1] * b[1]),
                ],
            )
        }
    }
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Domain(format!("worker pool: {e}")))
}

fn family_values_in(ctx: &AfeContext, ds: &[GInt], tol: f64) -> Result<Vec<FamilyValue>> {
    ds.par_iter()
        .map(|&d| {
            let wrap = |e: Error| Error::Tolerance {
                tol,
                reason: format!("d = {d}: {e}"),
            };
            let [a, ai] = ctx.central_value_twists(d, 1, tol).map_err(wrap)?;
            let [b, bi] = ctx.central_value_twists(d, 2, tol).map_err(wrap)?;
            Ok(FamilyValue {
                d,
                norm: d.norm(),
                l1: [a.value, ai.value],
                l2: [b.value, bi.value],
            })
        })
        .collect()
}

/// Central values for every primary square-free d with N(d) <= x_max, in norm order.
pub fn family_values(x_max: u64, tol: f64, workers: usize) -> Result<Vec<FamilyValue>> {
    let ds = squarefree_odd_vec(x_max, true)?;
    let ctx = AfeContext::for_conductors(x_max, 2, tol)?;
    pool(workers)?.install(|| family_values_in(&ctx, &ds, tol))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentRow {
    pub x: u64,
    pub count: u64,
    /// S_1 .. S_4.
    pub s: [f64; 4],
    pub ratio4: f64,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub config: ScanConfig,
    pub c4: f64,
    pub note: String,
    pub rows: Vec<MomentRow>,
}

impl MomentReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{:e},{:e},{:e},{:e},{:e},{}",
                r.x, r.count, r.s[0], r.s[1], r.s[2], r.s[3], r.ratio4, r.seconds
            );
        }
        out
    }

    pub fn row(&self, x: u64) -> Option<&MomentRow> {
        self.rows.iter().find(|r| r.x == x)
    }
}

/// C4 X (log X)^10.
pub fn leading_term(x: f64) -> f64 {
    leading_constant_4() * x * x.ln().powi(10)
}

/// Aggregate per-ideal values into rows at each grid point, in d order.
pub fn aggregate(values: &[FamilyValue], grid: &[u64], primary_only: bool) -> Vec<MomentRow> {
    let mut grid = grid.to_vec();
    grid.sort_unstable();
    grid.dedup();
    let mut sums = [Neumaier::new(), Neumaier::new(), Neumaier::new(), Neumaier::new()];
    let mut count = 0u64;
    let mut it = values.iter().peekable();
    let mut rows = Vec::with_capacity(grid.len());
    for &x in &grid {
        while let Some(v) = it.next_if(|v| v.norm <= x) {
            let (c, s) = v.contributions(primary_only);
            count += c;
            for (acc, t) in sums.iter_mut().zip(s) {
                acc.add(t);
            }
        }
        let s = [sums[0].value(), sums[1].value(), sums[2].value(), sums[3].value()];
        let ratio4 = if x > 1 { s[3] / leading_term(x as f64) } else { f64::NAN };
        rows.push(MomentRow {
            x,
            count,
            s,
            ratio4,
            seconds: 0.0,
        });
    }
    rows
}

/// S_k(X) for k = 1..4 at every grid point.
pub fn moment_scan(config: &ScanConfig) -> Result<MomentReport> {
    config.validate()?;
    let start = Instant::now();
    let x_max = config.x_max();
    let ds = squarefree_odd_vec(x_max, true)?;
    let ctx = AfeContext::for_conductors(x_max, 2, config.tol)?;
    let workers = pool(config.workers)?;
    let mut grid = config.grid.clone();
    grid.sort_unstable();
    grid.dedup();
    let mut values = Vec::with_capacity(ds.len());
    let mut seconds = Vec::with_capacity(grid.len());
    let mut lo = 0usize;
    for &x in &grid {
        let hi = ds.partition_point(|d| d.norm() <= x);
        values.extend(workers.install(|| family_values_in(&ctx, &ds[lo..hi], config.tol))?);
        lo = hi;
        seconds.push(start.elapsed().as_secs_f64());
    }
    let mut rows = aggregate(&values, &grid, config.primary_only);
    if config.record_timing {
        for (r, t) in rows.iter_mut().zip(seconds) {
            r.seconds = t;
        }
    }
    Ok(MomentReport {
        config: config.clone(),
        c4: leading_constant_4(),
        note: SCAN_NOTE.into(),
        rows,
    })
}

/// Element sum of L(1/2)^k over all four unit multiples of each d, evaluating
/// every multiple separately.
pub fn element_sums(x_max: u64, tol: f64) -> Result<[f64; 4]> {
    let ctx = AfeContext::for_conductors(x_max, 2, tol)?;
    let mut sums = [Neumaier::new(), Neumaier::new(), Neumaier::new(), Neumaier::new()];
    for d in squarefree_odd_vec(x_max, true)? {
        for u in UNITS {
            let e = u * d;
            let a = ctx.central_value(e, 1, tol)?.value;
            let b = ctx.central_value(e, 2, tol)?.value;
            for (acc, t) in sums.iter_mut().zip([a, b, a * a * a, b * b]) {
                acc.add(t);
            }
        }
    }
    Ok([sums[0].value(), sums[1].value(), sums[2].value(), sums[3].value()])
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub x: u64,
    pub count: u64,
    pub predicted: f64,
    pub relative_error: f64,
}

/// Count of odd square-free elements of norm <= X against 2 pi X / (3 zeta_K(2)).
pub fn density_report(x: u64) -> Result<DensityReport> {
    if x > 10_000_000 {
        return Err(Error::Domain(format!("X = {x} above 1e7")));
    }
    let count = 4 * squarefree_odd_vec(x, true)?.len() as u64;
    let predicted = 2.0 * PI * x as f64 / (3.0 * zeta_k(Complex64::new(2.0, 0.0))?.re);
    Ok(DensityReport {
        x,
        count,
        predicted,
        relative_error: (count as f64 - predicted) / predicted,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RsProxy {
    pub k: u32,
    /// Length of the Dirichlet polynomial, X^{1/(10k)}.
    pub length: f64,
    /// sum L A^{k-1}.
    pub s1: f64,
    /// sum A^k.
    pub s2: f64,
    /// s1^k / s2^{k-1}.
    pub lower_bound: f64,
    /// sum L^k over the same range.
    pub s_k: f64,
}

impl RsProxy {
    pub fn holds(&self) -> bool {
        self.lower_bound <= self.s_k * (1.0 + 1e-12)
    }
}

/// The Holder lower bound for sum L^k over X/2 < N(d) <= X (all unit multiples)
/// from A(d) = sum_{N(n) <= x} chi_d(n) / sqrt N(n).
pub fn rs_proxy(x: u64, k: u32, tol: f64) -> Result<RsProxy> {
    if !(k == 2 || k == 4) {
        return Err(Error::Domain(format!("k = {k} not in {{2, 4}}")));
    }
    if !(2..=DEFAULT_CEILING).contains(&x) {
        return Err(Error::Domain(format!("X = {x} outside 2..={DEFAULT_CEILING}")));
    }
    let length = (x as f64).powf(1.0 / (10.0 * k as f64));
    let ds: Vec<GInt> = squarefree_odd_vec(x, true)?
        .into_iter()
        .filter(|d| 2 * d.norm() > x)
        .collect();
    let ctx = AfeContext::for_conductors(x, 1, tol)?;
    let terms: Vec<[f64; 3]> = ds
        .par_iter()
        .map(|&d| {
            let [l, li] = ctx.central_value_twists(d, 1, tol)?;
            let a = ctx.dirichlet_poly(d, length)?;
            let ai = ctx.dirichlet_poly(d.mul_i(), length)?;
            let km = k as i32 - 1;
            let t = |l: f64, a: f64| [l * a.powi(km), a.powi(k as i32), l.powi(k as i32)];
            let (u, v) = (t(l.value, a), t(li.value, ai));
            Ok([2.0 * (u[0] + v[0]), 2.0 * (u[1] + v[1]), 2.0 * (u[2] + v[2])])
        })
        .collect::<Result<_>>()?;
    let mut acc = [Neumaier::new(), Neumaier::new(), Neumaier::new()];
    for t in &terms {
        for (a, v) in acc.iter_mut().zip(t) {
            a.add(*v);
        }
    }
    let (s1, s2, s_k) = (acc[0].value(), acc[1].value(), acc[2].value());
    Ok(RsProxy {
        k,
        length,
        s1,
        s2,
        lower_bound: s1.powi(k as i32) / s2.powi(k as i32 - 1),
        s_k,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftedProbe {
    pub z1: Complex64,
    pub z2: Complex64,
    pub x: u64,
    pub moment: u32,
    pub envelope: f64,
    /// log(envelope / X) / log log X.
    pub exponent: f64,
    /// The scan value of S_moment at X; present only at z1 = z2 = 0.
    pub empirical: Option<f64>,
    /// Set when only the prediction is available.
    pub prediction_only: bool,
}

/// The envelope X exp(k M + k^2 V / 2), k = moment / 2, for |L(1/2+z1) L(1/2+z2)|^k,
/// with the scan value when z1 = z2 = 0. Shifted values are never evaluated.
pub fn shifted_moment_probe(
    z1: Complex64,
    z2: Complex64,
    moment: u32,
    report: &MomentReport,
    x: u64,
) -> Result<ShiftedProbe> {
    if !(moment == 2 || moment == 4) {
        return Err(Error::Domain(format!("moment {moment} not in {{2, 4}}")));
    }
    let params = ShiftedBoundParams::new(z1, z2, x as f64, moment as f64 / 2.0)?;
    let envelope = shifted_moment_envelope(&params);
    let xf = x as f64;
    let exponent = (envelope / xf).ln() / xf.ln().ln();
    let at_zero = z1 == Complex64::new(0.0, 0.0) && z2 == Complex64::new(0.0, 0.0);
    let empirical = if at_zero {
        let row = report
            .row(x)
            .ok_or_else(|| Error::Domain(format!("X = {x} not on the scan grid")))?;
        Some(row.s[moment as usize - 1])
    } else {
        None
    };
    Ok(ShiftedProbe {
        z1,
        z2,
        x,
        moment,
        envelope,
        exponent,
        prediction_only: empirical.is_none(),
        empirical,
    })
}

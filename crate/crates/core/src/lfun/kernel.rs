//! The AFE weights V_j(t) = (1/2 pi i) int w_j(s) t^{-s} ds/s.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{ln_gamma, Neumaier, QuinticTable};

/// 2^{5/2} / pi.
pub const A_CONST: f64 = 5.656_854_249_492_381 / PI;

const LEFT_ABSCISSA: f64 = -0.25;
const LEFT_STEP: f64 = 1.0 / 24.0;
const Y_LIMIT: f64 = 4000.0;
const CUTOFF: f64 = 1e-19;

/// Contour parameters for V_j. `None` fields are chosen from t.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothingKernel {
    pub j: u32,
    pub c: Option<f64>,
    pub height: Option<f64>,
    pub step: Option<f64>,
    pub series: bool,
}

impl SmoothingKernel {
    pub fn new(j: u32) -> Result<Self> {
        if !(j == 1 || j == 2) {
            return Err(Error::Domain(format!("kernel index j = {j} not in {{1, 2}}")));
        }
        Ok(SmoothingKernel {
            j,
            c: None,
            height: None,
            step: None,
            series: false,
        })
    }

    /// j = 1 evaluated by its residue series.
    pub fn series() -> Self {
        SmoothingKernel {
            series: true,
            ..SmoothingKernel::new(1).unwrap()
        }
    }

    pub fn with_contour(mut self, c: f64, step: f64, height: f64) -> Self {
        self.c = Some(c);
        self.step = Some(step);
        self.height = Some(height);
        self
    }

    /// log w_j(s).
    pub fn ln_w(&self, s: Complex64) -> Complex64 {
        let j = self.j as f64;
        j * (s * A_CONST.ln() + ln_gamma(0.5 + s) - 0.5 * PI.ln())
    }

    fn auto_abscissa(&self, t: f64) -> f64 {
        if t < 1.0 {
            LEFT_ABSCISSA
        } else {
            (t / A_CONST.powi(self.j as i32))
                .powf(1.0 / self.j as f64)
                .max(2.0)
        }
    }

    /// [V, V', V''] at t > 0.
    pub fn eval_derivs(&self, t: f64) -> Result<[f64; 3]> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!("V_j needs t > 0, got {t}")));
        }
        if self.series {
            return Ok(v1_series(t));
        }
        let c = self.c.unwrap_or_else(|| self.auto_abscissa(t));
        if c <= -0.5 || c == 0.0 {
            return Err(Error::Domain(format!("contour abscissa {c} crosses a pole")));
        }
        let h = self
            .step
            .unwrap_or(if c < 0.0 { LEFT_STEP } else { (c / 6.0).min(0.25) });
        let ymax = self.height.unwrap_or(Y_LIMIT);
        let lt = t.ln();
        let mut acc = [Neumaier::new(), Neumaier::new(), Neumaier::new()];
        let mut peak = 0f64;
        let mut k = 0usize;
        loop {
            let y = k as f64 * h;
            if y > ymax {
                if self.height.is_none() {
                    return Err(Error::Quadrature(format!("V_{} contour at t = {t} did not decay", self.j)));
                }
                break;
            }
            let s = Complex64::new(c, y);
            let base = (self.ln_w(s) - s * lt).exp();
            let f0 = base / s;
            let f1 = -base / t;
            let f2 = base * (s + 1.0) / (t * t);
            let wgt = if k == 0 { 1.0 } else { 2.0 };
            acc[0].add(wgt * f0.re);
            acc[1].add(wgt * f1.re);
            acc[2].add(wgt * f2.re);
            let m = f0.norm().max(f2.norm() * t * t / (1.0 + s.norm()));
            peak = peak.max(m);
            if self.height.is_none() && k > 8 && m < CUTOFF * peak {
                break;
            }
            k += 1;
        }
        let scale = h / (2.0 * PI);
        let residue = if c < 0.0 { 1.0 } else { 0.0 };
        Ok([
            residue + scale * acc[0].value(),
            scale * acc[1].value(),
            scale * acc[2].value(),
        ])
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        Ok(self.eval_derivs(t)?[0])
    }
}

/// V_1(t) = 1 - erf(sqrt x), x = t/A, from the residues at s = 0 and
/// s = -1/2 - k, with the derivatives in closed form. The alternating series
/// cancels badly once t is above about 20.
pub fn v1_series(t: f64) -> [f64; 3] {
    let x = t / A_CONST;
    let r = x.sqrt();
    let mut term = r;
    let mut acc = Neumaier::new();
    let mut k = 0u32;
    loop {
        let kf = k as f64;
        let v = term / (kf + 0.5);
        acc.add(if k % 2 == 0 { v } else { -v });
        if v.abs() < 1e-18 * acc.value().abs().max(1e-300) && kf > x {
            break;
        }
        k += 1;
        term *= x / (k as f64);
    }
    let v = 1.0 - acc.value() / PI.sqrt();
    // dV/dt = -e^{-x} / sqrt(pi x) / A
    let d1 = -(-x).exp() / (PI * x).sqrt() / A_CONST;
    let d2 = -d1 * (1.0 + 0.5 / x) / A_CONST;
    [v, d1, d2]
}

/// Node spacing of [`KernelTable`] in ln t and sqrt t.
pub const TABLE_STEP: f64 = 1.0 / 128.0;
/// Smallest tabulated t.
pub const TABLE_T_MIN: f64 = 1e-8;
const TABLE_FLOOR: f64 = 1e-22;

/// Quintic Hermite table of V_j on [TABLE_T_MIN, t_max], in u = ln t below 1
/// and in r = sqrt t above, with the cumulative tail integrals
/// I0(r) = int_{r^2}^inf t^{-1/2} V dt and I1(r) = int_{r^2}^inf t^{-1/2} ln t V dt.
#[derive(Clone, Debug)]
pub struct KernelTable {
    pub kernel: SmoothingKernel,
    lo: QuinticTable,
    hi: QuinticTable,
    t_max: f64,
    i0: Vec<f64>,
    i1: Vec<f64>,
    interp_error: f64,
}

impl KernelTable {
    pub fn new(kernel: SmoothingKernel) -> Result<Self> {
        let h = TABLE_STEP;
        let n_lo = (-TABLE_T_MIN.ln() / h).ceil() as usize;
        let u0 = -(n_lo as f64) * h;
        let lo_nodes = (0..=n_lo)
            .map(|k| {
                let u = u0 + k as f64 * h;
                let t = u.exp();
                let [v, d1, d2] = kernel.eval_derivs(t)?;
                Ok([v, t * d1, t * t * d2 + t * d1])
            })
            .collect::<Result<Vec<_>>>()?;
        let lo = QuinticTable::new(u0, h, lo_nodes);

        let mut hi_nodes = Vec::new();
        let mut r = 1.0f64;
        loop {
            let t = r * r;
            let [v, d1, d2] = kernel.eval_derivs(t)?;
            hi_nodes.push([v, 2.0 * r * d1, 4.0 * t * d2 + 2.0 * d1]);
            if v.abs() < TABLE_FLOOR && hi_nodes.len() > 8 {
                break;
            }
            r = 1.0 + hi_nodes.len() as f64 * h;
            if r > 1e3 {
                return Err(Error::Quadrature("V_j table did not reach its floor".into()));
            }
        }
        let t_max = r * r;
        let hi = QuinticTable::new(1.0, h, hi_nodes);

        // Simpson-type cumulative integrals on the r grid, run from the top
        let n = hi.nodes().len();
        let (mut i0, mut i1) = (vec![0.0; n], vec![0.0; n]);
        let sub = 8;
        for k in (0..n - 1).rev() {
            let (ra, rb) = (1.0 + k as f64 * h, 1.0 + (k + 1) as f64 * h);
            let (mut s0, mut s1) = (0.0, 0.0);
            for m in 0..=sub {
                let w = if m == 0 || m == sub {
                    1.0
                } else if m % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                let rr = ra + (rb - ra) * m as f64 / sub as f64;
                let v = hi.eval(rr);
                s0 += w * 2.0 * v;
                s1 += w * 2.0 * (rr * rr).ln() * v;
            }
            let f = (rb - ra) / (3.0 * sub as f64);
            i0[k] = i0[k + 1] + s0 * f;
            i1[k] = i1[k + 1] + s1 * f;
        }

        let mut table = KernelTable {
            kernel,
            lo,
            hi,
            t_max,
            i0,
            i1,
            interp_error: 0.0,
        };
        table.interp_error = table.measure_error()?;
        Ok(table)
    }

    /// Largest |table - direct| over interval midpoints, sampled every 7th interval.
    fn measure_error(&self) -> Result<f64> {
        let h = TABLE_STEP;
        let mut worst = 0f64;
        for k in (0..self.lo.nodes().len() - 1).step_by(7) {
            let t = (self.lo.x_min() + (k as f64 + 0.5) * h).exp();
            worst = worst.max((self.eval(t) - self.kernel.eval(t)?).abs());
        }
        for k in (0..self.hi.nodes().len() - 1).step_by(7) {
            let r = 1.0 + (k as f64 + 0.5) * h;
            let t = r * r;
            worst = worst.max((self.eval(t) - self.kernel.eval(t)?).abs());
        }
        Ok(worst)
    }

    /// Shared default tables for j = 1, 2.
    pub fn shared(j: u32) -> &'static KernelTable {
        static T1: OnceLock<KernelTable> = OnceLock::new();
        static T2: OnceLock<KernelTable> = OnceLock::new();
        let cell = match j {
            1 => &T1,
            2 => &T2,
            _ => panic!("kernel index j = {j} not in {{1, 2}}"),
        };
        cell.get_or_init(|| {
            KernelTable::new(SmoothingKernel::new(j).unwrap()).expect("default kernel table")
        })
    }

    /// V_j(t); zero beyond t_max where V_j < 1e-22, direct quadrature below TABLE_T_MIN.
    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        if t >= 1.0 {
            if t >= self.t_max {
                0.0
            } else {
                self.hi.eval(t.sqrt())
            }
        } else if t >= TABLE_T_MIN {
            self.lo.eval(t.ln())
        } else {
            self.kernel.eval(t).expect("V_j below the table")
        }
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    /// Measured interpolation error.
    pub fn interp_error(&self) -> f64 {
        self.interp_error
    }

    /// Tabulated r = sqrt t grid with I0 and I1, for truncation searches.
    pub fn tail_grid(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let h = TABLE_STEP;
        (0..self.i0.len()).map(move |k| (1.0 + k as f64 * h, self.i0[k], self.i1[k]))
    }

    /// Sup of |V_j(s)| e^{s} over s in [lo, hi], on the table nodes.
    pub fn exp_envelope(&self, lo: f64, hi: f64) -> f64 {
        let h = TABLE_STEP;
        self.hi
            .nodes()
            .iter()
            .enumerate()
            .map(|(k, v)| ((1.0 + k as f64 * h).powi(2), v[0]))
            .filter(|&(t, _)| t >= lo && t <= hi)
            .map(|(t, v)| v.abs() * t.exp())
            .fold(0.0, f64::max)
    }
}

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gauss_sum_closed;
use crate::chars::{residue_symbol, symbol_one_plus_i};
use crate::error::{Error, Result};
use crate::gint::{isqrt, GInt, ResidueSystem};
use crate::numeric::{ln_gamma, Neumaier};

pub const DEFAULT_POISSON_TOL: f64 = 1e-6;

const RESEED: usize = 256;
const REFINE_TOL: f64 = 1e-13;

/// Compactly supported bump exp(-1/(1-u^2)), u the affine image of [a, b] on [-1, 1].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub a: f64,
    pub b: f64,
}

impl Default for Bump {
    fn default() -> Self {
        Bump { a: 1.0, b: 2.0 }
    }
}

impl Bump {
    pub fn eval(&self, r: f64) -> f64 {
        if r <= self.a || r >= self.b {
            return 0.0;
        }
        let u = (2.0 * r - self.a - self.b) / (self.b - self.a);
        (-1.0 / (1.0 - u * u)).exp()
    }
}

/// W~(t) for a bump W.
///
/// The plane integral of W(|v|^2) e(t v_2) is taken by the tensor trapezoid
/// rule on a Cartesian grid; the x-sums are tabulated once as the projection
/// P(y) = int W(x^2 + y^2) dx, so each evaluation is a 1-D cosine sum.
#[derive(Debug)]
pub struct KernelTransform {
    pub w: Bump,
    proj: OnceLock<Vec<f64>>,
    envelope: OnceLock<Envelope>,
}

impl Clone for KernelTransform {
    fn clone(&self) -> Self {
        KernelTransform::new(self.w)
    }
}

impl Default for KernelTransform {
    fn default() -> Self {
        KernelTransform::new(Bump::default())
    }
}

/// Upper envelope of |W~| measured on a grid, extrapolated as C exp(-beta sqrt t).
#[derive(Clone, Debug)]
struct Envelope {
    step: f64,
    sup_from: Vec<f64>,
    log_c: f64,
    beta: f64,
}

const ENV_TMAX: f64 = 400.0;
const ENV_STEP: f64 = 0.125;
const ENV_SAFETY: f64 = 4.0;

/// Grid points on [0, sqrt b] for the Cartesian rule.
const GRID: usize = 4096;

impl KernelTransform {
    pub fn new(w: Bump) -> Self {
        assert!(w.a > 0.0 && w.b > w.a, "bump support must lie in (0, inf)");
        KernelTransform {
            w,
            proj: OnceLock::new(),
            envelope: OnceLock::new(),
        }
    }

    /// Integral of W over (0, inf).
    pub fn mass(&self) -> f64 {
        let n = 4000;
        let h = (self.w.b - self.w.a) / n as f64;
        (1..n).map(|k| self.w.eval(self.w.a + k as f64 * h)).sum::<f64>() * h
    }

    fn grid_step(&self) -> f64 {
        self.w.b.sqrt() / GRID as f64
    }

    /// Largest t at which the Cartesian rule is trusted.
    pub fn t_max(&self) -> f64 {
        0.6 / self.grid_step()
    }

    fn projection(&self) -> &[f64] {
        self.proj.get_or_init(|| {
            let h = self.grid_step();
            (0..=GRID)
                .map(|j| {
                    let y2 = (j as f64 * h).powi(2);
                    let half: f64 = (1..=GRID)
                        .map(|i| self.w.eval((i as f64 * h).powi(2) + y2))
                        .sum();
                    h * (self.w.eval(y2) + 2.0 * half)
                })
                .collect()
        })
    }

    /// W~(t), for 0 <= t <= t_max().
    pub fn eval(&self, t: f64) -> f64 {
        assert!(t >= 0.0 && t <= self.t_max(), "W~ argument {t} out of range");
        let p = self.projection();
        let h = self.grid_step();
        let mut acc = Neumaier::new();
        acc.add(p[0]);
        for (j, &pj) in p.iter().enumerate().skip(1) {
            if pj != 0.0 {
                acc.add(2.0 * pj * (2.0 * PI * t * j as f64 * h).cos());
            }
        }
        h * acc.value()
    }

    fn rho_nodes(&self, n: usize) -> (Vec<f64>, Vec<f64>, f64) {
        let (r0, r1) = (self.w.a.sqrt(), self.w.b.sqrt());
        let h = (r1 - r0) / n as f64;
        let rho: Vec<f64> = (0..=n).map(|k| r0 + k as f64 * h).collect();
        let g: Vec<f64> = rho.iter().map(|&p| self.w.eval(p * p) * p * h).collect();
        (rho, g, h)
    }

    /// sum_k g_k exp(i omega rho_k) with a re-seeded rotation recurrence.
    fn inner(rho: &[f64], g: &[f64], h: f64, omega: f64) -> Complex64 {
        let rot = Complex64::from_polar(1.0, omega * h);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut z = Complex64::new(0.0, 0.0);
        for (k, (&p, &gk)) in rho.iter().zip(g).enumerate() {
            if k % RESEED == 0 {
                z = Complex64::from_polar(1.0, omega * p);
            } else {
                z *= rot;
            }
            acc += z * gk;
        }
        acc
    }

    fn quad(&self, t: f64, n_theta: usize, n_rho: usize, full: bool) -> Complex64 {
        let (rho, g, h) = self.rho_nodes(n_rho);
        if full {
            // full circle, complex integrand, periodic trapezoid
            let m = 4 * n_theta;
            let dt = 2.0 * PI / m as f64;
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..m {
                let s = (j as f64 * dt).sin();
                acc += Self::inner(&rho, &g, h, -2.0 * PI * t * s) * dt;
            }
            return acc;
        }
        let dt = 0.5 * PI / n_theta as f64;
        let mut acc = 0.0;
        for j in 0..=n_theta {
            let wgt = if j == 0 || j == n_theta { 0.5 } else { 1.0 };
            let s = (j as f64 * dt).sin();
            acc += wgt * Self::inner(&rho, &g, h, 2.0 * PI * t * s).re;
        }
        Complex64::new(4.0 * acc * dt, 0.0)
    }

    fn sizes(t: f64) -> (usize, usize) {
        let n_theta = ((2.0 * PI * t * 2f64.sqrt() + 60.0) / 4.0).ceil() as usize + 8;
        let n_rho = 96 + (3.0 * t) as usize;
        (n_theta, n_rho)
    }

    /// W~(t) by trapezoid quadrature in polar coordinates, the rho-grid doubled
    /// until successive values agree to 1e-13.
    pub fn eval_polar(&self, t: f64) -> f64 {
        let (nt, mut nr) = Self::sizes(t);
        let mut prev = self.quad(t, nt, nr, false).re;
        loop {
            nr *= 2;
            let cur = self.quad(t, nt, nr, false).re;
            if (cur - prev).abs() < REFINE_TOL || nr > 1 << 16 {
                return cur;
            }
            prev = cur;
        }
    }

    /// The complex 2-D integral over the whole plane; its imaginary part vanishes.
    pub fn eval_complex(&self, t: f64) -> Complex64 {
        let (nt, nr) = Self::sizes(t);
        self.quad(t, nt, 2 * nr, true)
    }

    /// W~(t) from its Mellin-Barnes representation on Re s = 1/2.
    pub fn eval_mellin(&self, t: f64) -> f64 {
        assert!(t > 0.0);
        let c = 0.5;
        let (a, b) = (self.w.a.ln(), self.w.b.ln());
        let hy = 0.04;
        let ymax = 2500.0;
        let mut acc = Neumaier::new();
        let mut k = 0usize;
        loop {
            let y = k as f64 * hy;
            if y > ymax {
                break;
            }
            let s = Complex64::new(c, y);
            // W^(1 - s) = int W(e^u) e^{u (1 - s)} du
            let nu = 200 + (y * (b - a) * 2.0) as usize;
            let hu = (b - a) / nu as f64;
            let mut what = Complex64::new(0.0, 0.0);
            for j in 1..nu {
                let u = a + j as f64 * hu;
                what += self.w.eval(u.exp()) * ((1.0 - s) * u).exp();
            }
            what *= hu;
            let f = what
                * (-2.0 * s * (PI * t).ln()).exp()
                * (ln_gamma(s) - ln_gamma(1.0 - s)).exp();
            let wgt = if k == 0 { 0.5 } else { 1.0 };
            acc.add(wgt * f.re);
            k += 1;
        }
        // (pi / 2 pi i) int ds = (1/2) int dy over the line, symmetric in y
        acc.value() * hy
    }

    fn envelope(&self) -> &Envelope {
        self.envelope.get_or_init(|| {
            let n = (ENV_TMAX / ENV_STEP) as usize;
            let vals: Vec<f64> = (0..=n).map(|k| self.eval(k as f64 * ENV_STEP).abs()).collect();
            let mut sup_from = vals.clone();
            for k in (0..n).rev() {
                sup_from[k] = sup_from[k].max(sup_from[k + 1]);
            }
            // log-linear fit in sqrt t of the envelope over the last half
            let (t1, t2) = (ENV_TMAX / 2.0, ENV_TMAX);
            let e1 = sup_from[(t1 / ENV_STEP) as usize].max(1e-300).ln();
            let e2 = sup_from[n].max(1e-300).ln();
            let beta = ((e1 - e2) / (t2.sqrt() - t1.sqrt())).max(0.0);
            let log_c = e1 + beta * t1.sqrt();
            Envelope {
                step: ENV_STEP,
                sup_from,
                log_c,
                beta,
            }
        })
    }

    /// Bound on sup_{s >= t} |W~(s)|, with a safety factor for the sampling.
    pub fn decay_bound(&self, t: f64) -> f64 {
        let e = self.envelope();
        let k = (t / e.step).floor() as usize;
        let v = if k < e.sup_from.len() {
            e.sup_from[k]
        } else {
            (e.log_c - e.beta * t.sqrt()).exp()
        };
        ENV_SAFETY * v
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoissonReport {
    pub n: GInt,
    pub x: f64,
    pub kmax: u64,
    pub lhs_all: f64,
    pub rhs_all: f64,
    pub discrepancy_all: f64,
    pub tail_all: f64,
    pub lhs_odd: f64,
    pub rhs_odd: f64,
    pub discrepancy_odd: f64,
    pub tail_odd: f64,
}

impl PoissonReport {
    pub fn discrepancy(&self) -> f64 {
        self.discrepancy_all.max(self.discrepancy_odd)
    }
}

/// Bound on sum over N(k) > kmax of env(sqrt(N(k) c)).
fn lattice_tail(k: &KernelTransform, kmax: u64, c: f64) -> f64 {
    // lattice points with N in (u, u + du] number at most pi du + O(sqrt u);
    // integrate from a shifted start to absorb the boundary term
    let u0 = (kmax as f64 - 2.0 * (kmax as f64).sqrt() - 2.0).max(0.0);
    let mut acc = 0.0;
    let mut u = u0;
    let mut du = 1.0;
    loop {
        let v = k.decay_bound((u * c).sqrt());
        acc += 1.2 * PI * v * du;
        if v * (u + du) < 1e-30 || u > 1e12 {
            break;
        }
        u += du;
        du *= 1.05;
    }
    acc
}

/// Both Poisson summation identities for the symbol (./n), primary n, with the
/// dual sums truncated at N(k) <= kmax.
pub fn poisson_check(n: GInt, k: &KernelTransform, x: f64, kmax: u64) -> Result<PoissonReport> {
    if !n.is_primary() {
        return Err(Error::NotPrimary(n));
    }
    if x <= 0.0 {
        return Err(Error::Domain("X must be positive".into()));
    }
    let nn = n.norm() as f64;
    if (kmax as f64 * x / nn).sqrt() > k.t_max() {
        return Err(Error::Domain(format!("kmax = {kmax} exceeds the transform range")));
    }
    let w = k.w;
    let sym = |m: GInt| -> i8 { residue_symbol(m, n).unwrap() };

    let rm = (w.b * x).sqrt().ceil() as i64 + 1;
    let (mut lhs_all, mut lhs_odd) = (Neumaier::new(), Neumaier::new());
    for a in -rm..=rm {
        for b in -rm..=rm {
            let m = GInt::new(a, b);
            let v = w.eval(m.norm() as f64 / x);
            if v == 0.0 {
                continue;
            }
            let s = sym(m) as f64;
            lhs_all.add(s * v);
            if m.is_odd() {
                lhs_odd.add(s * v);
            }
        }
    }

    // g(k, n) depends on k mod n
    let res = ResidueSystem::new(n)?;
    let gk: Vec<f64> = res
        .reps()
        .map(|r| gauss_sum_closed(r, n).map(|g| g.value.re))
        .collect::<Result<_>>()?;
    let gmax = gk.iter().fold(0f64, |m, v| m.max(v.abs()));
    let rk = isqrt(kmax) as i64;
    let mut by_norm: HashMap<u64, (f64, f64)> = HashMap::new();
    for a in -rk..=rk {
        for b in -rk..=rk {
            let kk = GInt::new(a, b);
            let nk = kk.norm();
            if nk > kmax {
                continue;
            }
            let g = gk[res.index(kk)];
            if g == 0.0 {
                continue;
            }
            let e = by_norm.entry(nk).or_insert((0.0, 0.0));
            e.0 += g;
            e.1 += if nk % 2 == 0 { g } else { -g };
        }
    }
    let mut norms: Vec<u64> = by_norm.keys().copied().collect();
    norms.sort_unstable();
    let (mut rhs_all, mut rhs_odd) = (Neumaier::new(), Neumaier::new());
    for nk in norms {
        let (ga, go) = by_norm[&nk];
        if ga != 0.0 {
            rhs_all.add(ga * k.eval((nk as f64 * x / nn).sqrt()));
        }
        if go != 0.0 {
            rhs_odd.add(go * k.eval((nk as f64 * x / (2.0 * nn)).sqrt()));
        }
    }
    let pref_all = x / nn;
    let pref_odd = x / (2.0 * nn) * symbol_one_plus_i(n) as f64;
    let rhs_all = pref_all * rhs_all.value();
    let rhs_odd = pref_odd * rhs_odd.value();
    let tail_all = pref_all * gmax * lattice_tail(k, kmax, x / nn);
    let tail_odd = (x / (2.0 * nn)) * gmax * lattice_tail(k, kmax, x / (2.0 * nn));
    let (lhs_all, lhs_odd) = (lhs_all.value(), lhs_odd.value());
    Ok(PoissonReport {
        n,
        x,
        kmax,
        lhs_all,
        rhs_all,
        discrepancy_all: (lhs_all - rhs_all).abs(),
        tail_all,
        lhs_odd,
        rhs_odd,
        discrepancy_odd: (lhs_odd - rhs_odd).abs(),
        tail_odd,
    })
}

/// Runs [`poisson_check`] with kmax doubled from 256 until both dual tails are
/// below `tol`.
pub fn poisson_verify(n: GInt, k: &KernelTransform, x: f64, tol: f64) -> Result<PoissonReport> {
    let nn = n.try_norm()? as f64;
    let mut kmax = 256u64;
    loop {
        let r = poisson_check(n, k, x, kmax)?;
        if r.tail_all < tol && r.tail_odd < tol {
            return Ok(r);
        }
        kmax *= 2;
        if ((kmax as f64) * x / nn).sqrt() > k.t_max() {
            return Err(Error::Tolerance {
                tol,
                reason: format!("Poisson dual tail at n = {n}, X = {x} exceeds the transform range"),
            });
        }
    }
}

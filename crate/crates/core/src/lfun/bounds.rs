//! The shifted-moment envelope and the conditional bound for log |L(s, chi)|.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::chars::QuadChar;
use crate::error::{Error, Result};
use crate::gint::{gaussian_primes, GInt, ONE_PLUS_I};
use crate::numeric::Neumaier;

/// The positive root of e^{-x} = x.
pub const LAMBDA_0: f64 = 0.567_143_290_409_783_8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShiftedBoundParams {
    pub z1: Complex64,
    pub z2: Complex64,
    pub x: f64,
    pub k: f64,
}

impl ShiftedBoundParams {
    pub fn new(z1: Complex64, z2: Complex64, x: f64, k: f64) -> Result<Self> {
        let p = ShiftedBoundParams { z1, z2, x, k };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x >= 10.0) {
            return Err(Error::Domain(format!("X = {} below 10", self.x)));
        }
        if !(self.k > 0.0) {
            return Err(Error::Domain(format!("k = {} not positive", self.k)));
        }
        let top = 1.0 / self.x.ln();
        for z in [self.z1, self.z2] {
            if z.re < 0.0 || z.re > top {
                return Err(Error::Domain(format!("Re z = {} outside [0, 1/log X]", z.re)));
            }
            if z.im.abs() > self.x {
                return Err(Error::Domain(format!("|Im z| = {} above X", z.im.abs())));
            }
        }
        Ok(())
    }
}

/// L(z, x): log log x for |z| <= 1/log x, -log |z| up to |z| = 1, then 0.
pub fn script_l(z: Complex64, x: f64) -> f64 {
    let a = z.norm();
    if a <= 1.0 / x.ln() {
        x.ln().ln()
    } else if a <= 1.0 {
        -a.ln()
    } else {
        0.0
    }
}

/// (L(z1), L(z2), M, V) at x = X.
pub fn script_l_m_v(p: &ShiftedBoundParams) -> (f64, f64, f64, f64) {
    let x = p.x;
    let (z1, z2) = (p.z1, p.z2);
    let l1 = script_l(z1, x);
    let l2 = script_l(z2, x);
    let m = 0.5 * (l1 + l2);
    let re = |z: Complex64| Complex64::new(2.0 * z.re, 0.0);
    let v = 0.5
        * (script_l(2.0 * z1, x)
            + script_l(2.0 * z2, x)
            + script_l(re(z1), x)
            + script_l(re(z2), x)
            + 2.0 * script_l(z1 + z2, x)
            + 2.0 * script_l(z1 + z2.conj(), x));
    (l1, l2, m, v)
}

/// X exp(k M + k^2 V / 2).
pub fn shifted_moment_envelope(p: &ShiftedBoundParams) -> f64 {
    let (_, _, m, v) = script_l_m_v(p);
    p.x * (p.k * m + 0.5 * p.k * p.k * v).exp()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrhLogBound {
    pub prime_sum: f64,
    pub conductor_term: f64,
    pub total: f64,
    /// Height T used in the conductor term.
    pub height: f64,
}

/// Right side of the conditional bound for log |L(s, chi_{(1+i)^5 d})| without
/// its O(1/log x) term: the prime-power sum with chi(n) plus
/// (log T + log N(m)/2)(1/2 - sigma + (1 + lambda)/log x), T = max(2, |t|).
pub fn grh_log_bound(d: GInt, s: Complex64, x: f64, lambda: f64) -> Result<GrhLogBound> {
    if !(x >= 2.0) {
        return Err(Error::Domain(format!("x = {x} below 2")));
    }
    if !(LAMBDA_0 - 1e-12..=5.0).contains(&lambda) {
        return Err(Error::Domain(format!("lambda = {lambda} outside [lambda_0, 5]")));
    }
    let lx = x.ln();
    if s.re < 0.5 || s.re > 0.5 + lambda / lx + 1e-15 {
        return Err(Error::Domain(format!("sigma = {} outside [1/2, 1/2 + lambda/log x]", s.re)));
    }
    let c = QuadChar::new(d)?;
    let sigma0 = 0.5 + lambda / lx;
    let mut acc = Neumaier::new();
    for p in gaussian_primes(x.floor() as u64) {
        if p == ONE_PLUS_I {
            continue;
        }
        let chi_p = c.chi(p) as f64;
        if chi_p == 0.0 {
            continue;
        }
        let lnp = (p.norm() as f64).ln();
        let mut l = 1u32;
        loop {
            let ln_n = l as f64 * lnp;
            if ln_n > lx {
                break;
            }
            // Lambda(n) / log N(n) = 1/l on n = p^l
            let sign = if l % 2 == 0 { 1.0 } else { chi_p };
            let term = Complex64::new(-(sigma0 * ln_n), -(s.im * ln_n)).exp();
            acc.add(sign / l as f64 * term.re * (lx - ln_n) / lx);
            l += 1;
        }
    }
    let height = s.im.abs().max(2.0);
    let nm = 32.0 * c.d.norm() as f64;
    let conductor_term = (height.ln() + 0.5 * nm.ln()) * (0.5 - s.re + (1.0 + lambda) / lx);
    let prime_sum = acc.value();
    Ok(GrhLogBound {
        prime_sum,
        conductor_term,
        total: prime_sum + conductor_term,
        height,
    })
}

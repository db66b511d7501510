//! Central values L(1/2, chi_{(1+i)^5 d})^j from the approximate functional equation.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::kernel::KernelTable;
use crate::chars::{symbol_i, ChiTable, QuadChar};
use crate::error::{Error, Result};
use crate::gint::{GInt, PrimaryIdeals};
use crate::numeric::Neumaier;

/// Default absolute tolerance for AFE sums.
pub const DEFAULT_AFE_TOL: f64 = 1e-10;
/// Default ceiling on the truncation norm.
pub const DEFAULT_MAX_NORM: u64 = 1 << 27;

/// Safety factor on the smoothed lattice count in the tail bound.
const TAIL_KAPPA: f64 = 2.0;
/// Over-estimate of the constant in sum_{N(n) <= u} d(n) ~ (pi/8)^2 u (log u + C).
const DIVISOR_C: f64 = 4.0;
const BLOCK: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CentralValue {
    pub d: GInt,
    pub j: u32,
    pub value: f64,
    pub truncation_norm: u64,
    pub tail_bound: f64,
}

/// Bound on 2 sum_{N(n) > Q r^2} d_j(n) N(n)^{-1/2} |V_j(N(n)/Q)|.
pub fn tail_bound(j: u32, q: f64, i0: f64, i1: f64) -> f64 {
    let rho = PI / 8.0;
    let dens = match j {
        1 => rho * i0,
        _ => rho * rho * ((q.ln().max(0.0) + DIVISOR_C) * i0 + i1),
    };
    2.0 * TAIL_KAPPA * q.sqrt() * dens
}

/// Smallest tabulated truncation norm M = Q r^2 with tail below `tol`.
pub fn truncation(j: u32, q: f64, tol: f64) -> Result<(u64, f64)> {
    let tab = KernelTable::shared(j);
    for (r, i0, i1) in tab.tail_grid() {
        let tb = tail_bound(j, q, i0, i1);
        if tb < tol {
            let m = (q * r * r).ceil();
            if m > u64::MAX as f64 / 2.0 {
                break;
            }
            return Ok((m as u64, tb));
        }
    }
    Err(Error::Tolerance {
        tol,
        reason: format!("no AFE truncation certifies the tail at conductor scale {q}"),
    })
}

/// Primary ideals with the weights 1/sqrt N(n), d(n)/sqrt N(n) and the twist (i/n),
/// shared across many characters.
#[derive(Debug)]
pub struct AfeContext {
    ideals: Arc<PrimaryIdeals>,
    norms_f: Vec<f64>,
    w1: Vec<f64>,
    w2: Vec<f64>,
    twist: Vec<i8>,
}

impl AfeContext {
    pub fn new(max_norm: u64) -> Result<Self> {
        Self::from_ideals(Arc::new(PrimaryIdeals::new(max_norm)?))
    }

    pub fn from_ideals(ideals: Arc<PrimaryIdeals>) -> Result<Self> {
        let norms_f: Vec<f64> = ideals.norms().iter().map(|&n| n as f64).collect();
        let w1: Vec<f64> = norms_f.iter().map(|n| 1.0 / n.sqrt()).collect();
        let dc = ideals.divisor_counts(2);
        let w2 = w1.iter().zip(&dc).map(|(w, &c)| w * c as f64).collect();
        let twist = ideals.elems().iter().map(|&n| symbol_i(n)).collect();
        Ok(AfeContext {
            ideals,
            norms_f,
            w1,
            w2,
            twist,
        })
    }

    /// Context large enough for every d with N(d) <= nd_max at tolerance `tol`.
    pub fn for_conductors(nd_max: u64, j_max: u32, tol: f64) -> Result<Self> {
        let q = (nd_max.max(1) as f64).powf(j_max as f64 / 2.0);
        let (m, _) = truncation(j_max, q, tol)?;
        if m > DEFAULT_MAX_NORM {
            return Err(Error::Tolerance {
                tol,
                reason: format!("AFE truncation {m} exceeds the memory ceiling {DEFAULT_MAX_NORM}"),
            });
        }
        Self::new(m)
    }

    pub fn ideals(&self) -> &PrimaryIdeals {
        &self.ideals
    }

    pub fn max_norm(&self) -> u64 {
        self.ideals.x()
    }

    fn weights(&self, j: u32) -> &[f64] {
        if j == 1 {
            &self.w1
        } else {
            &self.w2
        }
    }

    /// (S_+, S_-): the AFE sum split by (i/n) = +1 and -1.
    fn split_sum(&self, chi: &[i8], j: u32, q: f64) -> (f64, f64) {
        let tab = KernelTable::shared(j);
        let w = self.weights(j);
        let parts: Vec<(Neumaier, Neumaier)> = chi
            .par_chunks(BLOCK)
            .enumerate()
            .map(|(b, ch)| {
                let (mut p, mut m) = (Neumaier::new(), Neumaier::new());
                let off = b * BLOCK;
                for (k, &c) in ch.iter().enumerate() {
                    if c == 0 {
                        continue;
                    }
                    let i = off + k;
                    let v = c as f64 * w[i] * tab.eval(self.norms_f[i] / q);
                    if self.twist[i] > 0 {
                        p.add(v);
                    } else {
                        m.add(v);
                    }
                }
                (p, m)
            })
            .collect();
        let (mut p, mut m) = (Neumaier::new(), Neumaier::new());
        for (a, b) in &parts {
            p.merge(a);
            m.merge(b);
        }
        (p.value(), m.value())
    }

    fn chi_table(&self, c: &QuadChar, m: u64) -> Result<ChiTable> {
        if m > self.max_norm() {
            return Err(Error::Domain(format!(
                "truncation {m} exceeds the context range {}",
                self.max_norm()
            )));
        }
        ChiTable::build(c, &self.ideals, m)
    }

    /// 2 sum chi(n) d_j(n) N(n)^{-1/2} V_j(N(n)/q) over primary n, for d and i d.
    fn afe_pair(&self, d: GInt, j: u32, q: f64, tol: f64) -> Result<[CentralValue; 2]> {
        if !(j == 1 || j == 2) {
            return Err(Error::Domain(format!("j = {j} not in {{1, 2}}")));
        }
        let c = QuadChar::new(d)?;
        let (m, tb) = truncation(j, q, tol)?;
        let chi = self.chi_table(&c, m)?;
        let (p, n) = self.split_sum(chi.values(), j, q);
        let mk = |d: GInt, v: f64| CentralValue {
            d,
            j,
            value: 2.0 * v,
            truncation_norm: m,
            tail_bound: tb,
        };
        Ok([mk(d, p + n), mk(d.mul_i(), p - n)])
    }

    /// L(1/2, chi_{(1+i)^5 d})^j.
    pub fn central_value(&self, d: GInt, j: u32, tol: f64) -> Result<CentralValue> {
        let [v, _] = self.afe_pair(d, j, conductor_scale(d, j)?, tol)?;
        Ok(v)
    }

    /// L(1/2)^j for d and for i d, from one character table; chi_{-d} = chi_d, so
    /// these are the values for all four unit multiples.
    pub fn central_value_twists(&self, d: GInt, j: u32, tol: f64) -> Result<[CentralValue; 2]> {
        self.afe_pair(d, j, conductor_scale(d, j)?, tol)
    }

    /// A_t(d) = 2 sum chi(n) d(n) N(n)^{-1/2} V_2(N(n)/t).
    pub fn mollified_afe(&self, d: GInt, t: f64, tol: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("A_t needs t > 0, got {t}")));
        }
        Ok(self.afe_pair(d, 2, t, tol)?[0].value)
    }

    /// A(d) = sum_{N(n) <= x} chi(n) / sqrt N(n).
    pub fn dirichlet_poly(&self, d: GInt, x: f64) -> Result<f64> {
        let c = QuadChar::new(d)?;
        let m = x.floor().max(0.0) as u64;
        let chi = self.chi_table(&c, m)?;
        let mut acc = Neumaier::new();
        for (i, &v) in chi.values().iter().enumerate() {
            if v != 0 {
                acc.add(v as f64 * self.w1[i]);
            }
        }
        Ok(acc.value())
    }
}

fn conductor_scale(d: GInt, j: u32) -> Result<f64> {
    Ok((d.try_norm()? as f64).powf(j as f64 / 2.0))
}

fn one_shot(j: u32, q: f64, tol: f64) -> Result<AfeContext> {
    let (m, _) = truncation(j, q, tol)?;
    if m > DEFAULT_MAX_NORM {
        return Err(Error::Tolerance {
            tol,
            reason: format!("AFE truncation {m} exceeds the memory ceiling {DEFAULT_MAX_NORM}"),
        });
    }
    AfeContext::new(m)
}

/// L(1/2, chi_{(1+i)^5 d})^j for j in {1, 2} with certified truncation error below `tol`.
pub fn central_value(d: GInt, j: u32, tol: f64) -> Result<CentralValue> {
    let q = conductor_scale(d, j)?;
    one_shot(j.clamp(1, 2), q, tol)?.central_value(d, j, tol)
}

/// A_t(d) at the default tolerance; A_{N(d)}(d) is central_value(d, 2).
pub fn mollified_afe_a_t(d: GInt, t: f64) -> Result<f64> {
    one_shot(2, t, DEFAULT_AFE_TOL)?.mollified_afe(d, t, DEFAULT_AFE_TOL)
}

/// The Dirichlet polynomial A(d) = sum_{N(n) <= x} chi(n) / sqrt N(n).
pub fn dirichlet_poly_a(d: GInt, x: f64) -> Result<f64> {
    if x > 1e7 {
        return Err(Error::Domain(format!("x = {x} above 1e7")));
    }
    AfeContext::new(x.floor().max(1.0) as u64)?.dirichlet_poly(d, x)
}

//! Additive characters, quadratic Gauss sums and Poisson summation checks.

mod poisson;

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chars::{residue_symbol, PrimeSymbolTable, QuadChar};
use crate::error::{Error, Result};
use crate::gint::{factor, phi, GInt, ResidueSystem, I};
use crate::numeric::CompensatedComplex;

pub use poisson::{
    poisson_check, poisson_verify, Bump, KernelTransform, PoissonReport, DEFAULT_POISSON_TOL,
};

const DIRECT_LIMIT: u64 = 100_000_000;
const CHUNK: usize = 1 << 14;

/// exp(2 pi i Im z).
pub fn e_tilde(z: Complex64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * z.im)
}

/// Exact value `sign * int * sqrt(rad)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactForm {
    pub sign: i8,
    pub int: u128,
    pub rad: u128,
}

impl ExactForm {
    pub const ZERO: ExactForm = ExactForm { sign: 0, int: 0, rad: 1 };
    pub const ONE: ExactForm = ExactForm { sign: 1, int: 1, rad: 1 };

    pub fn integer(v: i128) -> Self {
        ExactForm {
            sign: v.signum() as i8,
            int: v.unsigned_abs(),
            rad: 1,
        }
    }

    pub fn value(&self) -> f64 {
        self.sign as f64 * self.int as f64 * (self.rad as f64).sqrt()
    }

    pub fn checked_mul(self, o: ExactForm) -> Option<ExactForm> {
        if self.sign == 0 || o.sign == 0 {
            return Some(ExactForm::ZERO);
        }
        let mut int = self.int.checked_mul(o.int)?;
        let mut rad = self.rad.checked_mul(o.rad)?;
        // pull out the square of a common radicand
        if self.rad == o.rad && self.rad > 1 {
            int = int.checked_mul(self.rad)?;
            rad = 1;
        }
        Some(ExactForm {
            sign: self.sign * o.sign,
            int,
            rad,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussSumValue {
    pub value: Complex64,
    pub exact_form: Option<ExactForm>,
}

impl GaussSumValue {
    fn numeric(value: Complex64) -> Self {
        GaussSumValue {
            value,
            exact_form: None,
        }
    }

    fn exact(e: Option<ExactForm>, fallback: f64) -> Self {
        let v = e.map_or(fallback, |e| e.value());
        GaussSumValue {
            value: Complex64::new(v, 0.0),
            exact_form: e,
        }
    }
}

fn exp_table(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64))
        .collect()
}

/// Phase index of e~(r x / n) in units of 1/N(n).
#[inline]
fn phase(rx: GInt, n: GInt, norm: i128) -> usize {
    // Im(rx * conj(n))
    let im = rx.im as i128 * n.re as i128 - rx.re as i128 * n.im as i128;
    im.rem_euclid(norm) as usize
}

fn ordered_sum<F>(size: usize, term: F) -> Complex64
where
    F: Fn(usize) -> Complex64 + Sync,
{
    let chunks = size.div_ceil(CHUNK);
    let parts: Vec<CompensatedComplex> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = CompensatedComplex::new();
            for k in c * CHUNK..((c + 1) * CHUNK).min(size) {
                acc.add(term(k));
            }
            acc
        })
        .collect();
    let mut total = CompensatedComplex::new();
    for p in &parts {
        total.merge(p);
    }
    total.value()
}

fn check_odd_modulus(n: GInt) -> Result<u64> {
    if n.is_zero() {
        return Err(Error::Zero);
    }
    if !n.is_odd() {
        return Err(Error::EvenModulus(n));
    }
    let norm = n.try_norm()?;
    if norm > DIRECT_LIMIT {
        return Err(Error::Domain(format!("direct Gauss sum modulo norm {norm} too large")));
    }
    Ok(norm)
}

/// g(r, n) summed over the canonical residue system modulo n.
pub fn gauss_sum_direct(r: GInt, n: GInt) -> Result<GaussSumValue> {
    let norm = check_odd_modulus(n)?;
    let res = ResidueSystem::new(n)?;
    let f = factor(n)?;
    let tables: Vec<(PrimeSymbolTable, u32)> = f
        .primes
        .iter()
        .map(|&(p, m)| Ok((PrimeSymbolTable::new(p)?, m)))
        .collect::<Result<_>>()?;
    let r = r.rem(n)?;
    let exps = exp_table(norm as usize);
    let v = ordered_sum(res.size(), |k| {
        let x = res.rep(k);
        let mut s = 1i8;
        for (t, m) in &tables {
            let v = t.get(x);
            s *= if m % 2 == 1 { v } else { v * v };
        }
        if s == 0 {
            return Complex64::new(0.0, 0.0);
        }
        exps[phase(r * x, n, norm as i128)] * s as f64
    });
    Ok(GaussSumValue::numeric(v))
}

/// g(k, p^l) for a primary prime p.
fn prime_power_closed(k: GInt, p: GInt, l: u32) -> Result<ExactForm> {
    let q = p.norm() as u128;
    let mut h = 0u32;
    let mut kk = k;
    let inf = k.is_zero();
    if !inf {
        while let Some(t) = kk.div_exact(p) {
            kk = t;
            h += 1;
            if h > l {
                break;
            }
        }
    }
    let pw = |e: u32| q.checked_pow(e).ok_or(Error::Overflow("Gauss sum"));
    Ok(if inf || l <= h {
        if l % 2 == 1 {
            ExactForm::ZERO
        } else {
            ExactForm {
                sign: 1,
                int: pw(l - 1)? * (q - 1),
                rad: 1,
            }
        }
    } else if l == h + 1 {
        if l % 2 == 0 {
            ExactForm {
                sign: -1,
                int: pw(l - 1)?,
                rad: 1,
            }
        } else {
            let s = residue_symbol(I.checked_mul(kk)?, p)?;
            ExactForm {
                sign: s,
                int: pw(l - 1)?,
                rad: q,
            }
        }
    } else {
        ExactForm::ZERO
    })
}

/// g(k, n) for primary n from the prime-power evaluations, assembled multiplicatively.
pub fn gauss_sum_closed(k: GInt, n: GInt) -> Result<GaussSumValue> {
    if !n.is_primary() {
        return Err(Error::NotPrimary(n));
    }
    let f = factor(n)?;
    let mut e = Some(ExactForm::ONE);
    let mut fallback = 1.0;
    for &(p, l) in &f.primes {
        let t = prime_power_closed(k, p, l)?;
        fallback *= t.value();
        e = e.and_then(|e| e.checked_mul(t));
    }
    Ok(GaussSumValue::exact(e, fallback))
}

/// g(k, p^l) / N(p)^l from h = ord_p k (None when k = 0) and
/// sym = (i k p^{-h} / p). Stays finite for any l.
pub fn gauss_local_ratio(h: Option<u32>, sym: i8, norm: u64, l: u32) -> f64 {
    let q = norm as f64;
    let inside = h.map_or(true, |h| l <= h);
    if l == 0 {
        1.0
    } else if inside {
        if l % 2 == 1 {
            0.0
        } else {
            1.0 - 1.0 / q
        }
    } else if l == h.unwrap() + 1 {
        if l % 2 == 0 {
            -1.0 / q
        } else {
            sym as f64 / q.sqrt()
        }
    } else {
        0.0
    }
}

/// g(k, p^l) / N(p)^l for a primary prime p.
pub fn gauss_prime_power_ratio(k: GInt, p: GInt, l: u32) -> Result<f64> {
    if !p.is_primary() {
        return Err(Error::NotPrimary(p));
    }
    if !crate::gint::is_gaussian_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if k.is_zero() {
        return Ok(gauss_local_ratio(None, 0, p.norm(), l));
    }
    let mut kk = k;
    let mut h = 0u32;
    while let Some(t) = kk.div_exact(p) {
        kk = t;
        h += 1;
    }
    let sym = if l == h + 1 && l % 2 == 1 {
        residue_symbol(I.checked_mul(kk)?, p)?
    } else {
        0
    };
    Ok(gauss_local_ratio(Some(h), sym, p.norm(), l))
}

/// g(chi_{(1+i)^5 d}) summed directly over residues modulo (1+i)^5 d.
pub fn primitive_gauss_sum(d: GInt) -> Result<GaussSumValue> {
    let c = QuadChar::new(d)?;
    let m = c.modulus;
    let norm = c.conductor_norm;
    if norm > DIRECT_LIMIT {
        return Err(Error::Domain(format!("conductor norm {norm} too large")));
    }
    let res = ResidueSystem::new(m)?;
    let exps = exp_table(norm as usize);
    let v = ordered_sum(res.size(), |k| {
        let x = res.rep(k);
        let s = c.chi(x);
        if s == 0 {
            return Complex64::new(0.0, 0.0);
        }
        exps[phase(x, m, norm as i128)] * s as f64
    });
    Ok(GaussSumValue::numeric(v))
}

/// g(0, n) = phi(n) when n is a square and 0 otherwise.
pub fn gauss_sum_zero(n: GInt) -> Result<i128> {
    let f = factor(n)?;
    if f.primes.iter().all(|&(_, m)| m % 2 == 0) && f.e2 % 2 == 0 {
        Ok(phi(n)? as i128)
    } else {
        Ok(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gint::{gaussian_primes, squarefree_odd_vec, ONE, ONE_PLUS_I};

    fn g(a: i64, b: i64) -> GInt {
        GInt::new(a, b)
    }

    fn close(a: Complex64, b: f64, tol: f64) -> bool {
        (a - b).norm() < tol * (1.0 + b.abs())
    }

    #[test]
    fn e_tilde_basics() {
        assert!((e_tilde(Complex64::new(3.7, 0.0)) - 1.0).norm() < 1e-15);
        assert!((e_tilde(Complex64::new(0.0, 0.25)) - Complex64::i()).norm() < 1e-15);
        let (z, w) = (Complex64::new(0.3, 0.17), Complex64::new(-1.1, 0.61));
        assert!((e_tilde(z + w) - e_tilde(z) * e_tilde(w)).norm() < 1e-14);
    }

    #[test]
    fn examples() {
        let w = g(-1, -2);
        let v = gauss_sum_direct(ONE, w).unwrap().value;
        assert!(close(v, -5f64.sqrt(), 1e-12));
        assert!(gauss_sum_direct(ONE, g(2, 0)).is_err());
        for p in [w, g(-3, 0), g(3, 2)] {
            assert!(gauss_sum_direct(g(0, 0), p).unwrap().value.norm() < 1e-12);
        }
        let c = gauss_sum_closed(g(0, 0), w * w).unwrap();
        assert_eq!(c.exact_form.unwrap().value(), 20.0);
        assert_eq!(gauss_sum_closed(ONE, w * w).unwrap().value.re, 0.0);
        let c = gauss_sum_closed(ONE, w).unwrap();
        assert!((c.value.re + 5f64.sqrt()).abs() < 1e-15);
        assert!(gauss_sum_closed(ONE, g(3, 0)).is_err());
    }

    #[test]
    fn twisting_by_units() {
        let n = g(-3, 0) * g(3, 2);
        let base = gauss_sum_direct(g(2, 1), n).unwrap().value;
        for s in [g(0, 1), g(1, 1), g(4, -1)] {
            let v = gauss_sum_direct(s * g(2, 1), n).unwrap().value;
            let sym = residue_symbol(s, n).unwrap() as f64;
            assert!((v - base * sym).norm() < 1e-9);
        }
    }

    #[test]
    fn closed_matches_direct() {
        let mut cases = Vec::new();
        for p in gaussian_primes(50) {
            if p == ONE_PLUS_I {
                continue;
            }
            for l in 1..=3u32 {
                if p.norm().pow(l) > 20_000 {
                    continue;
                }
                cases.push(p.pow(l));
            }
        }
        cases.push(g(-3, 0) * g(-1, -2) * g(-1, -2));
        for n in cases {
            for k in [g(0, 0), ONE, I, ONE_PLUS_I, g(-3, 0), g(-1, 2) * g(-1, -2), g(7, 4)] {
                let a = gauss_sum_closed(k, n).unwrap().value;
                let b = gauss_sum_direct(k, n).unwrap().value;
                assert!((a - b).norm() < 1e-9 * (1.0 + a.norm()), "g({k},{n}) {a} vs {b}");
            }
        }
    }

    #[test]
    fn local_ratio_matches_closed() {
        for p in gaussian_primes(30) {
            if p == ONE_PLUS_I {
                continue;
            }
            for k in [g(0, 0), ONE, I, g(2, 1), p, p * p * I] {
                for l in 0..=4u32 {
                    let want = gauss_sum_closed(k, p.pow(l)).unwrap().value.re
                        / (p.norm() as f64).powi(l as i32);
                    let got = gauss_prime_power_ratio(k, p, l).unwrap();
                    assert!((got - want).abs() < 1e-14, "g({k},{p}^{l})");
                }
            }
        }
        assert!(gauss_prime_power_ratio(ONE, g(1, 2), 1).is_err());
    }

    #[test]
    fn g_of_n_squarefree() {
        for n in squarefree_odd_vec(300, true).unwrap() {
            let v = gauss_sum_direct(ONE, n).unwrap().value;
            let want = crate::chars::symbol_i(n) as f64 * (n.norm() as f64).sqrt();
            assert!(close(v, want, 1e-10), "{n}");
        }
    }

    #[test]
    fn g_zero_squares() {
        for n in [g(-3, 0), g(9, 0), g(-1, -2).pow(2), g(-1, -2).pow(3), g(-3, 0) * g(-1, 2)] {
            let want = gauss_sum_zero(n).unwrap() as f64;
            let v = gauss_sum_direct(g(0, 0), n).unwrap().value;
            assert!(close(v, want, 1e-10), "{n}");
        }
    }

    #[test]
    fn primitive_examples() {
        for (d, want) in [(ONE, 32f64.sqrt()), (g(-3, 0), 288f64.sqrt()), (g(0, -3), 288f64.sqrt())] {
            let v = primitive_gauss_sum(d).unwrap().value;
            assert!(close(v, want, 1e-9), "{d}: {v}");
        }
        assert!(primitive_gauss_sum(g(9, 0)).is_err());
    }
}

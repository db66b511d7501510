//! Arithmetic functions on ideals of Z[i].

use serde::{Deserialize, Serialize};

use super::{factor, GInt, PrimaryIdeals};
use crate::error::Result;

pub(crate) fn binom(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, j| acc * (n - j) / (j + 1))
}

/// Number of ways to write the ideal (n) as an ordered product of k ideals.
pub fn d_k(k: u32, n: GInt) -> Result<u64> {
    let f = factor(n)?;
    Ok(f
        .ideal_exponents()
        .map(|(_, m)| binom((m + k - 1) as u64, (k - 1) as u64))
        .product())
}

pub fn mobius(n: GInt) -> Result<i8> {
    let f = factor(n)?;
    let mut s = 1i8;
    for (_, m) in f.ideal_exponents() {
        if m > 1 {
            return Ok(0);
        }
        s = -s;
    }
    Ok(s)
}

/// Size of the unit group of Z[i]/(n).
pub fn phi(n: GInt) -> Result<u64> {
    let f = factor(n)?;
    Ok(f
        .ideal_exponents()
        .map(|(q, m)| q.pow(m - 1) * (q - 1))
        .product())
}

pub fn lambda(n: GInt) -> Result<f64> {
    let f = factor(n)?;
    let e: Vec<_> = f.ideal_exponents().collect();
    Ok(match e.as_slice() {
        [(q, _)] => (*q as f64).ln(),
        _ => 0.0,
    })
}

/// Product of N/(N+1) over the odd primes dividing n.
pub fn local_product(n: GInt) -> Result<f64> {
    let f = factor(n)?;
    Ok(f
        .primes
        .iter()
        .map(|&(p, _)| {
            let q = p.norm() as f64;
            q / (q + 1.0)
        })
        .product())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArithKind {
    DivisorCount(u32),
    Mobius,
    Phi,
    VonMangoldt,
    LocalProduct,
}

impl ArithKind {
    pub fn eval(self, n: GInt) -> Result<f64> {
        Ok(match self {
            ArithKind::DivisorCount(k) => d_k(k, n)? as f64,
            ArithKind::Mobius => mobius(n)? as f64,
            ArithKind::Phi => phi(n)? as f64,
            ArithKind::VonMangoldt => lambda(n)?,
            ArithKind::LocalProduct => local_product(n)?,
        })
    }

    /// Value on a power of a prime ideal of norm q.
    fn local(self, q: u64, m: u32) -> f64 {
        match self {
            ArithKind::DivisorCount(k) => binom((m + k - 1) as u64, (k - 1) as u64) as f64,
            ArithKind::Mobius => match m {
                0 => 1.0,
                1 => -1.0,
                _ => 0.0,
            },
            ArithKind::Phi => {
                if m == 0 {
                    1.0
                } else {
                    (q as f64).powi(m as i32 - 1) * (q as f64 - 1.0)
                }
            }
            ArithKind::VonMangoldt => unreachable!(),
            ArithKind::LocalProduct => {
                if m == 0 || q == 2 {
                    1.0
                } else {
                    q as f64 / (q as f64 + 1.0)
                }
            }
        }
    }
}

/// Cached values of one arithmetic function on all ideals of norm up to `x`.
#[derive(Clone, Debug)]
pub struct ArithmeticFunctionTable {
    pub kind: ArithKind,
    ideals: PrimaryIdeals,
    odd: Vec<f64>,
}

impl ArithmeticFunctionTable {
    pub fn new(kind: ArithKind, x: u64) -> Result<Self> {
        let ideals = PrimaryIdeals::new(x)?;
        let mut odd = vec![0.0; ideals.len()];
        if !ideals.is_empty() {
            odd[0] = if kind == ArithKind::VonMangoldt { 0.0 } else { 1.0 };
        }
        for i in 1..ideals.len() {
            let p = ideals.spf(i);
            let e = ideals.spf_exponent(i);
            let r = ideals.spf_rest(i);
            let q = ideals.norm(p);
            odd[i] = if kind == ArithKind::VonMangoldt {
                if r == 0 {
                    (q as f64).ln()
                } else {
                    0.0
                }
            } else {
                odd[r] * kind.local(q, e)
            };
        }
        Ok(ArithmeticFunctionTable { kind, ideals, odd })
    }

    pub fn ideals(&self) -> &PrimaryIdeals {
        &self.ideals
    }

    /// Value on the ideal (n), or `None` beyond the table range.
    pub fn get(&self, n: GInt) -> Option<f64> {
        if n.is_zero() {
            return None;
        }
        let (e, odd) = n.split_two();
        let (_, p) = odd.primary_associate().ok()?;
        let v = self.odd[self.ideals.index_of(p)?];
        if e == 0 {
            return Some(v);
        }
        if (1u64 << e.min(63)) as f64 * (p.norm() as f64) > self.ideals.x() as f64 {
            return None;
        }
        Some(match self.kind {
            ArithKind::VonMangoldt => {
                if p.norm() == 1 {
                    2f64.ln()
                } else {
                    0.0
                }
            }
            k => v * k.local(2, e),
        })
    }

    /// Values on primary (odd) ideals in the order of [`PrimaryIdeals`].
    pub fn odd_values(&self) -> &[f64] {
        &self.odd
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(a: i64, b: i64) -> GInt {
        GInt::new(a, b)
    }

    #[test]
    fn examples() {
        let w = g(-1, -2);
        assert_eq!(d_k(2, w * w).unwrap(), 3);
        assert_eq!(phi(w * w).unwrap(), 20);
        assert!((local_product(w).unwrap() - 5.0 / 6.0).abs() < 1e-15);
        assert_eq!(mobius(g(5, 0)).unwrap(), 1);
        assert_eq!(mobius(g(2, 0)).unwrap(), 0);
        assert_eq!(mobius(g(1, 1)).unwrap(), -1);
        assert_eq!(phi(g(2, 0)).unwrap(), 2);
        assert!((lambda(g(9, 0)).unwrap() - 9f64.ln()).abs() < 1e-15);
        assert_eq!(lambda(g(5, 0)).unwrap(), 0.0);
        assert!((lambda(g(0, 4)).unwrap() - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn generator_independent() {
        for a in -20i64..=20 {
            for b in -20i64..=20 {
                let z = g(a, b);
                if z.is_zero() {
                    continue;
                }
                for u in crate::gint::UNITS {
                    let w = u * z;
                    assert_eq!(d_k(3, z).unwrap(), d_k(3, w).unwrap());
                    assert_eq!(mobius(z).unwrap(), mobius(w).unwrap());
                    assert_eq!(phi(z).unwrap(), phi(w).unwrap());
                }
            }
        }
    }

    #[test]
    fn phi_counts_units_mod_n() {
        for z in [g(3, 0), g(1, 2), g(2, 0), g(3, 1), g(4, 2), g(-3, 0) * g(-3, 0)] {
            let n = z.norm() as i64;
            let mut c = 0;
            for x in 0..n {
                for y in 0..n {
                    // each residue class appears n times in the n x n box
                    if g(x, y).coprime(z) {
                        c += 1;
                    }
                }
            }
            assert_eq!(c as u64, phi(z).unwrap() * z.norm(), "{z}");
        }
    }

    #[test]
    fn table_matches_direct() {
        let x = 600;
        for kind in [
            ArithKind::DivisorCount(2),
            ArithKind::DivisorCount(4),
            ArithKind::Mobius,
            ArithKind::Phi,
            ArithKind::VonMangoldt,
            ArithKind::LocalProduct,
        ] {
            let t = ArithmeticFunctionTable::new(kind, x).unwrap();
            for a in -25i64..=25 {
                for b in -25i64..=25 {
                    let z = g(a, b);
                    if z.is_zero() || z.norm() > x {
                        continue;
                    }
                    let v = t.get(z).unwrap();
                    assert!((v - kind.eval(z).unwrap()).abs() < 1e-9, "{kind:?} {z}");
                }
            }
        }
    }
}

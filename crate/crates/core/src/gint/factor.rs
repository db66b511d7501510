use serde::{Deserialize, Serialize};

use super::{isqrt, GInt, ONE_PLUS_I};
use crate::error::{Error, Result};

/// `unit * (1+i)^e2 * prod p^m`, primes primary and sorted by (norm, re, im).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimaryFactorization {
    pub unit: GInt,
    pub e2: u32,
    pub primes: Vec<(GInt, u32)>,
}

impl PrimaryFactorization {
    pub fn reconstruct(&self) -> Result<GInt> {
        let mut z = self.unit.checked_mul(ONE_PLUS_I.checked_pow(self.e2)?)?;
        for &(p, m) in &self.primes {
            z = z.checked_mul(p.checked_pow(m)?)?;
        }
        Ok(z)
    }

    pub fn is_squarefree(&self) -> bool {
        self.e2 <= 1 && self.primes.iter().all(|&(_, m)| m == 1)
    }

    /// Exponent list over all prime ideals, with 1+i (norm 2) first when present.
    pub fn ideal_exponents(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        let two = (self.e2 > 0).then_some((2u64, self.e2));
        two.into_iter()
            .chain(self.primes.iter().map(|&(p, m)| (p.norm(), m)))
    }
}

/// Writes an odd rational prime p = 1 mod 4 as x^2 + y^2 by direct search.
pub(crate) fn two_squares(p: u64) -> Option<(u64, u64)> {
    let mut x = 1u64;
    while 2 * x * x <= p {
        let r = p - x * x;
        let y = isqrt(r);
        if y * y == r {
            return Some((x, y));
        }
        x += 1;
    }
    None
}

/// Primary generator of one of the two primes above a split rational prime.
pub(crate) fn split_prime(p: u64) -> GInt {
    let (x, y) = two_squares(p).expect("p = 1 mod 4 is a sum of two squares");
    GInt::new(x as i64, y as i64).primary_associate().unwrap().1
}

fn divide_out(z: &mut GInt, p: GInt) -> u32 {
    let mut m = 0;
    while let Some(q) = z.div_exact(p) {
        *z = q;
        m += 1;
    }
    m
}

pub fn factor(n: GInt) -> Result<PrimaryFactorization> {
    if n.is_zero() {
        return Err(Error::Zero);
    }
    n.try_norm()?;
    let (e2, mut z) = n.split_two();
    let mut rest = z.norm();
    let mut primes = Vec::new();
    let handle = |p: u64, z: &mut GInt, primes: &mut Vec<(GInt, u32)>| {
        if p % 4 == 3 {
            let q = GInt::new(-(p as i64), 0);
            let m = divide_out(z, q);
            primes.push((q, m));
        } else {
            let a = split_prime(p);
            let b = a.conj().primary_associate().unwrap().1;
            for q in [a, b] {
                let m = divide_out(z, q);
                if m > 0 {
                    primes.push((q, m));
                }
            }
        }
    };
    let mut p = 3u64;
    while p * p <= rest {
        if rest % p == 0 {
            while rest % p == 0 {
                rest /= p;
            }
            handle(p, &mut z, &mut primes);
        }
        p += 2;
    }
    if rest > 1 {
        handle(rest, &mut z, &mut primes);
    }
    debug_assert!(z.is_unit());
    primes.sort_by_key(|&(q, _)| q.order_key());
    Ok(PrimaryFactorization {
        unit: z,
        e2,
        primes,
    })
}

/// Primality of a Gaussian integer, by its norm.
pub fn is_gaussian_prime(z: GInt) -> bool {
    let n = match z.try_norm() {
        Ok(n) => n,
        Err(_) => return false,
    };
    if is_rational_prime(n) {
        return true;
    }
    let r = isqrt(n);
    r * r == n && r % 4 == 3 && is_rational_prime(r)
}

pub(crate) fn is_rational_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut p = 3;
    while p * p <= n {
        if n % p == 0 {
            return false;
        }
        p += 2;
    }
    true
}

impl GInt {
    pub fn is_prime(self) -> bool {
        is_gaussian_prime(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gint::{ONE, UNITS};

    fn g(a: i64, b: i64) -> GInt {
        GInt::new(a, b)
    }

    #[test]
    fn examples() {
        let f = factor(g(5, 0)).unwrap();
        assert_eq!(f.unit, ONE);
        assert_eq!(f.e2, 0);
        assert_eq!(f.primes, vec![(g(-1, -2), 1), (g(-1, 2), 1)]);

        let f = factor(g(4, 0)).unwrap();
        assert_eq!((f.unit, f.e2), (g(-1, 0), 4));
        assert!(f.primes.is_empty());

        let f = factor(g(-3, 0)).unwrap();
        assert_eq!((f.unit, f.e2, f.primes.clone()), (ONE, 0, vec![(g(-3, 0), 1)]));
        assert!(factor(g(0, 0)).is_err());
    }

    #[test]
    fn reconstruct_all_small() {
        for a in -60i64..=60 {
            for b in -60i64..=60 {
                let z = g(a, b);
                if z.is_zero() {
                    continue;
                }
                let f = factor(z).unwrap();
                assert_eq!(f.reconstruct().unwrap(), z);
                assert!(UNITS.contains(&f.unit));
                for w in f.primes.windows(2) {
                    assert!(w[0].0.order_key() < w[1].0.order_key());
                }
                for &(p, m) in &f.primes {
                    assert!(p.is_primary() && p.is_prime() && m > 0);
                }
            }
        }
    }

    #[test]
    fn primality() {
        assert!(g(1, 1).is_prime());
        assert!(g(-3, 0).is_prime());
        assert!(g(0, 7).is_prime());
        assert!(!g(5, 0).is_prime());
        assert!(!g(3, 3).is_prime());
        assert!(g(-1, -2).is_prime());
        assert!(!ONE.is_prime());
    }

    #[test]
    fn sums_of_squares() {
        for p in [5u64, 13, 17, 29, 1_000_033] {
            let (x, y) = two_squares(p).unwrap();
            assert_eq!(x * x + y * y, p);
        }
        assert_eq!(two_squares(7), None);
    }
}

//! Sieves over primary elements and lattice counts.

use super::arith::binom;
use super::factor::split_prime;
use super::{isqrt, GInt, ONE_PLUS_I, UNITS};
use crate::error::{Error, Result};

const MAX_SIEVE: u64 = 1 << 32;

/// #{z != 0 : N(z) <= x}.
pub fn norm_count(x: f64) -> u64 {
    if x < 1.0 {
        return 0;
    }
    let xi = x.floor() as u64;
    let r = isqrt(xi) as i64;
    let mut c: u64 = 0;
    for a in -r..=r {
        c += 2 * isqrt(xi - (a * a) as u64) + 1;
    }
    c - 1
}

/// Rational primes up to n.
pub(crate) fn rational_primes(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut comp = vec![false; n + 1];
    let mut out = Vec::new();
    for p in 2..=n {
        if comp[p] {
            continue;
        }
        out.push(p as u64);
        let mut q = p * p;
        while q <= n {
            comp[q] = true;
            q += p;
        }
    }
    out
}

/// Canonical prime generators (1+i and the primary odd primes) of norm at most x,
/// ordered by (norm, re, im).
pub fn gaussian_primes(x: u64) -> Vec<GInt> {
    let mut out = Vec::new();
    for p in rational_primes(x) {
        match p % 4 {
            2 => out.push(ONE_PLUS_I),
            1 => {
                let a = split_prime(p);
                let b = a.conj().primary_associate().unwrap().1;
                out.push(a);
                out.push(b);
            }
            _ => {
                if p.checked_mul(p).is_some_and(|q| q <= x) {
                    out.push(GInt::new(-(p as i64), 0));
                }
            }
        }
    }
    out.sort_by_key(|z| z.order_key());
    out
}

/// Index map on primary elements inside a disc of radius sqrt(x).
#[derive(Clone, Debug)]
struct PrimaryGrid {
    r1: i64,
    r2: i64,
    width: usize,
}

impl PrimaryGrid {
    fn new(x: u64) -> Self {
        let r = isqrt(x) as i64;
        let r1 = if r % 2 == 1 { r } else { r + 1 };
        let r2 = if r % 2 == 0 { r } else { r + 1 };
        PrimaryGrid {
            r1,
            r2,
            width: (r2 + 1) as usize,
        }
    }

    fn size(&self) -> usize {
        (self.r1 + 1) as usize * self.width
    }

    fn slot(&self, z: GInt) -> Option<usize> {
        if z.re.abs() > self.r1 || z.im.abs() > self.r2 || !z.is_primary() {
            return None;
        }
        let ia = ((z.re + self.r1) / 2) as usize;
        let ib = ((z.im + self.r2) / 2) as usize;
        Some(ia * self.width + ib)
    }
}

/// All primary elements of norm at most x, unordered.
fn primary_in_disc(x: u64) -> Vec<GInt> {
    let r = isqrt(x) as i64;
    let mut out = Vec::new();
    for a in -r..=r {
        if a % 2 == 0 {
            continue;
        }
        let bmax = isqrt(x - (a * a) as u64) as i64;
        let mut b = -bmax + (bmax % 2);
        while b <= bmax {
            let z = GInt::new(a, b);
            if z.is_primary() {
                out.push(z);
            }
            b += 2;
        }
    }
    out
}

fn check_bound(x: u64) -> Result<()> {
    if x > MAX_SIEVE {
        return Err(Error::Domain(format!("sieve bound {x} exceeds {MAX_SIEVE}")));
    }
    Ok(())
}

/// Odd square-free elements of norm at most x, ordered by (norm, re, im) of the
/// primary generator; when `primary_only` is false each generator is followed by
/// its multiples by i, -1 and -i.
pub fn squarefree_odd_vec(x: u64, primary_only: bool) -> Result<Vec<GInt>> {
    check_bound(x)?;
    let grid = PrimaryGrid::new(x);
    let mut bad = vec![false; grid.size()];
    for p in gaussian_primes(isqrt(x)) {
        if p == ONE_PLUS_I {
            continue;
        }
        let q = p * p;
        let nq = q.norm();
        if nq > x {
            continue;
        }
        for m in primary_in_disc(x / nq) {
            bad[grid.slot(q * m).unwrap()] = true;
        }
    }
    let mut keep: Vec<GInt> = primary_in_disc(x)
        .into_iter()
        .filter(|&z| !bad[grid.slot(z).unwrap()])
        .collect();
    keep.sort_unstable_by_key(|z| z.order_key());
    if primary_only {
        return Ok(keep);
    }
    Ok(keep
        .into_iter()
        .flat_map(|d| UNITS.into_iter().map(move |u| u * d))
        .collect())
}

pub fn squarefree_odd_iter(x: u64, primary_only: bool) -> Result<impl Iterator<Item = GInt>> {
    Ok(squarefree_odd_vec(x, primary_only)?.into_iter())
}

/// Primary elements of norm at most x in (norm, re, im) order, with smallest prime
/// factor data from a linear sieve. Index 0 is the element 1.
#[derive(Clone, Debug)]
pub struct PrimaryIdeals {
    x: u64,
    grid: PrimaryGrid,
    slots: Vec<u32>,
    elems: Vec<GInt>,
    norms: Vec<u64>,
    spf: Vec<u32>,
    exp: Vec<u8>,
    rest: Vec<u32>,
    cof: Vec<u32>,
    primes: Vec<u32>,
}

impl PrimaryIdeals {
    pub fn new(x: u64) -> Result<Self> {
        check_bound(x)?;
        let grid = PrimaryGrid::new(x);
        let mut elems = primary_in_disc(x);
        elems.sort_unstable_by_key(|z| z.order_key());
        let n = elems.len();
        if n as u64 >= u32::MAX as u64 {
            return Err(Error::Overflow("PrimaryIdeals"));
        }
        let mut slots = vec![u32::MAX; grid.size()];
        for (i, z) in elems.iter().enumerate() {
            slots[grid.slot(*z).unwrap()] = i as u32;
        }
        let norms: Vec<u64> = elems.iter().map(|z| z.norm()).collect();
        let mut spf = vec![u32::MAX; n];
        let mut exp = vec![0u8; n];
        let mut rest = vec![0u32; n];
        let mut cof = vec![0u32; n];
        let mut primes = Vec::new();
        for i in 1..n {
            if spf[i] == u32::MAX {
                spf[i] = i as u32;
                exp[i] = 1;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                if p > si || norms[p as usize] * norms[i] > x {
                    break;
                }
                let j = slots[grid.slot(elems[p as usize] * elems[i]).unwrap()] as usize;
                spf[j] = p;
                cof[j] = i as u32;
                if p == si {
                    exp[j] = exp[i] + 1;
                    rest[j] = rest[i];
                } else {
                    exp[j] = 1;
                    rest[j] = i as u32;
                }
            }
        }
        Ok(PrimaryIdeals {
            x,
            grid,
            slots,
            elems,
            norms,
            spf,
            exp,
            rest,
            cof,
            primes,
        })
    }

    pub fn x(&self) -> u64 {
        self.x
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elems(&self) -> &[GInt] {
        &self.elems
    }

    pub fn norms(&self) -> &[u64] {
        &self.norms
    }

    pub fn elem(&self, i: usize) -> GInt {
        self.elems[i]
    }

    pub fn norm(&self, i: usize) -> u64 {
        self.norms[i]
    }

    pub fn index_of(&self, z: GInt) -> Option<usize> {
        let s = *self.slots.get(self.grid.slot(z)?)?;
        (s != u32::MAX).then_some(s as usize)
    }

    /// Indices of the prime elements, ascending.
    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    pub fn is_prime(&self, i: usize) -> bool {
        i > 0 && self.spf[i] as usize == i
    }

    /// Index of the smallest prime factor of element i (i > 0).
    pub fn spf(&self, i: usize) -> usize {
        self.spf[i] as usize
    }

    /// Exponent of the smallest prime factor.
    pub fn spf_exponent(&self, i: usize) -> u32 {
        self.exp[i] as u32
    }

    /// Index of the part of element i coprime to its smallest prime factor.
    pub fn spf_rest(&self, i: usize) -> usize {
        self.rest[i] as usize
    }

    /// Index of element i divided by its smallest prime factor.
    pub fn cofactor(&self, i: usize) -> usize {
        self.cof[i] as usize
    }

    /// d_k on every element.
    pub fn divisor_counts(&self, k: u32) -> Vec<u32> {
        let mut d = vec![1u32; self.len()];
        for i in 1..self.len() {
            let e = self.exp[i] as u64;
            d[i] = d[self.rest[i] as usize] * binom(e + k as u64 - 1, k as u64 - 1) as u32;
        }
        d
    }

    /// True when element i is square-free.
    pub fn squarefree(&self) -> Vec<bool> {
        let mut s = vec![true; self.len()];
        for i in 1..self.len() {
            s[i] = self.exp[i] == 1 && s[self.rest[i] as usize];
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gint::{d_k, factor};

    fn g(a: i64, b: i64) -> GInt {
        GInt::new(a, b)
    }

    #[test]
    fn counts() {
        assert_eq!(norm_count(1.0), 4);
        assert_eq!(norm_count(2.0), 8);
        let c = norm_count(1e4) as f64;
        assert!((c - std::f64::consts::PI * 1e4).abs() <= 3.0 * 10f64.powf(1.26));
        for x in [1u64, 5, 17, 50] {
            let r = isqrt(x) as i64 + 1;
            let mut brute = 0;
            for a in -r..=r {
                for b in -r..=r {
                    let n = (a * a + b * b) as u64;
                    if n > 0 && n <= x {
                        brute += 1;
                    }
                }
            }
            assert_eq!(norm_count(x as f64), brute);
        }
    }

    #[test]
    fn squarefree_examples() {
        let v = squarefree_odd_vec(2, false).unwrap();
        assert_eq!(v, vec![g(1, 0), g(0, 1), g(-1, 0), g(0, -1)]);
        let v = squarefree_odd_vec(5, true).unwrap();
        assert_eq!(v, vec![g(1, 0), g(-1, -2), g(-1, 2)]);
    }

    #[test]
    fn squarefree_matches_factor() {
        let x = 3000;
        let v = squarefree_odd_vec(x, true).unwrap();
        let all = squarefree_odd_vec(x, false).unwrap();
        assert_eq!(all.len(), 4 * v.len());
        let mut brute = Vec::new();
        for z in primary_in_disc(x) {
            if factor(z).unwrap().is_squarefree() {
                brute.push(z);
            }
        }
        brute.sort_by_key(|z| z.order_key());
        assert_eq!(v, brute);
    }

    #[test]
    fn primes_list() {
        let p = gaussian_primes(13);
        assert_eq!(
            p,
            vec![g(1, 1), g(-1, -2), g(-1, 2), g(-3, 0), g(3, -2), g(3, 2)]
        );
    }

    #[test]
    fn ideals_linear_sieve() {
        let t = PrimaryIdeals::new(2000).unwrap();
        assert_eq!(t.elem(0), g(1, 0));
        let d2 = t.divisor_counts(2);
        let d3 = t.divisor_counts(3);
        let sf = t.squarefree();
        for i in 0..t.len() {
            let z = t.elem(i);
            assert_eq!(t.index_of(z), Some(i));
            assert_eq!(d2[i] as u64, d_k(2, z).unwrap());
            assert_eq!(d3[i] as u64, d_k(3, z).unwrap());
            assert_eq!(sf[i], factor(z).unwrap().is_squarefree());
            if i > 0 {
                let p = t.elem(t.spf(i));
                assert!(p.is_prime());
                assert_eq!(p * t.elem(t.cofactor(i)), z);
                assert_eq!(t.is_prime(i), z.is_prime());
                assert_eq!(p, factor(z).unwrap().primes[0].0);
            }
        }
        assert_eq!(t.index_of(g(3, 0)), None);
        assert_eq!(t.index_of(g(-45, 0)), None);
    }
}

//! Canonical residue systems modulo an element, from the Hermite normal form of
//! the lattice n Z[i].

use super::GInt;
use crate::error::{Error, Result};

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Residues x + yi with 0 <= x < N/g, 0 <= y < g, where g = gcd(re n, im n).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResidueSystem {
    pub n: GInt,
    m: i128,
    g: i128,
    shift: i128,
}

impl ResidueSystem {
    pub fn new(n: GInt) -> Result<Self> {
        if n.is_zero() {
            return Err(Error::Zero);
        }
        let norm = n.try_norm()? as i128;
        let (a, b) = (n.re as i128, n.im as i128);
        // u b + v a = g, and n (u + v i) = (a u - b v) + g i
        let (g, u, v) = ext_gcd(b, a);
        let m = norm / g;
        let shift = (a * u - b * v).rem_euclid(m);
        Ok(ResidueSystem { n, m, g, shift })
    }

    pub fn size(&self) -> usize {
        (self.m * self.g) as usize
    }

    #[inline]
    pub fn index(&self, z: GInt) -> usize {
        let y = z.im as i128;
        let k = y.div_euclid(self.g);
        let yr = y - k * self.g;
        let x = (z.re as i128 - k * self.shift).rem_euclid(self.m);
        (x + self.m * yr) as usize
    }

    pub fn rep(&self, idx: usize) -> GInt {
        let idx = idx as i128;
        GInt::new((idx % self.m) as i64, (idx / self.m) as i64)
    }

    pub fn reps(&self) -> impl Iterator<Item = GInt> + '_ {
        (0..self.size()).map(|k| self.rep(k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_and_canonical() {
        for n in [
            GInt::new(1, 0),
            GInt::new(-1, -2),
            GInt::new(3, 0),
            GInt::new(-3, 0) * GInt::new(-1, 2),
            GInt::new(6, 4),
            GInt::new(-7, 12),
            GInt::new(1, 1).pow(5),
        ] {
            let r = ResidueSystem::new(n).unwrap();
            assert_eq!(r.size() as u64, n.norm());
            let mut seen = vec![false; r.size()];
            for (k, z) in r.reps().enumerate() {
                assert_eq!(r.index(z), k);
                seen[k] = true;
            }
            assert!(seen.iter().all(|&s| s));
            for a in -15i64..15 {
                for b in -15i64..15 {
                    let z = GInt::new(a, b);
                    let k = r.index(z);
                    assert!(n.divides(z - r.rep(k)), "{z} mod {n}");
                    assert_eq!(r.index(z + n * GInt::new(b, -a)), k);
                }
            }
        }
    }
}

//! Brute-force oracles that share no code path with the library routines they check.

use std::f64::consts::PI;

use hecke_core::gint::{factor, GInt};
use hecke_core::Result;

/// zeta_K(2) as a quarter of the lattice sum of |z|^-4 over 0 < |z|^2 <= x,
/// plus the (pi/4)/x tail.
pub fn zeta_k2_lattice(x: i64) -> f64 {
    let r = (x as f64).sqrt() as i64 + 1;
    let mut s = 0.0;
    for a in -r..=r {
        for b in -r..=r {
            let n = a * a + b * b;
            if n > 0 && n <= x {
                s += 1.0 / (n as f64 * n as f64);
            }
        }
    }
    s / 4.0 + PI / 4.0 / x as f64
}

/// Odd square-free elements of norm <= x, by factoring every lattice point.
pub fn odd_squarefree_count(x: u64) -> Result<u64> {
    let r = (x as f64).sqrt() as i64 + 1;
    let mut n = 0;
    for a in -r..=r {
        for b in -r..=r {
            let z = GInt::new(a, b);
            if !z.is_zero() && z.norm() <= x && z.is_odd() && factor(z)?.is_squarefree() {
                n += 1;
            }
        }
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        // 4 units, 8 elements of norm 5, 4 associates of 3
        assert_eq!(odd_squarefree_count(1).unwrap(), 4);
        assert_eq!(odd_squarefree_count(5).unwrap(), 12);
        assert_eq!(odd_squarefree_count(9).unwrap(), 16);
    }

    #[test]
    fn lattice_zeta_close() {
        assert!((zeta_k2_lattice(100_000) - 1.5067030099).abs() < 1e-6);
    }
}

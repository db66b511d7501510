//! Verification suites behind `hecke verify`.

use hecke_core::chars::{residue_symbol, residue_symbol_euler};
use hecke_core::gauss::{
    gauss_sum_closed, gauss_sum_direct, poisson_verify, primitive_gauss_sum, Bump, KernelTransform,
};
use hecke_core::gint::{gaussian_primes, squarefree_odd_vec, GInt, I, ONE, ONE_PLUS_I};
use hecke_core::lfun::AfeContext;
use hecke_core::products::{verify_zseries, VerificationRow};
use hecke_core::Result;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// |g(chi)| = sqrt(32 N(d)) for odd square-free d, closed against direct Gauss
/// sums at prime powers, and the symbol algorithm against Euler's criterion.
pub fn gauss_suite(nmax: u64, pmax: u64, samples: usize, seed: u64) -> Result<Vec<VerificationRow>> {
    let mut rows = Vec::new();
    for d in squarefree_odd_vec(nmax, false)? {
        let g = primitive_gauss_sum(d)?.value;
        let want = (32.0 * d.norm() as f64).sqrt();
        rows.push(VerificationRow::new(
            "g(chi_(1+i)^5d) / sqrt(32 N(d)) = 1",
            format!("d={d}"),
            g / want,
            re(1.0),
            1e-6,
        ));
    }
    for p in gaussian_primes(pmax) {
        if p == ONE_PLUS_I {
            continue;
        }
        for l in 1..=3u32 {
            let n = p.pow(l);
            if n.norm() > 2_000_000 {
                break;
            }
            for k in [GInt::new(0, 0), ONE, I, ONE_PLUS_I, p, p * p] {
                let closed = gauss_sum_closed(k, n)?.value;
                let direct = gauss_sum_direct(k, n)?.value;
                rows.push(VerificationRow::new(
                    "g(k, p^l) closed = direct",
                    format!("k={k} p={p} l={l}"),
                    direct,
                    closed,
                    1e-9,
                ));
            }
        }
    }
    let primes: Vec<GInt> = gaussian_primes(100_000)
        .into_iter()
        .filter(|&p| p != ONE_PLUS_I)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut agree = 0usize;
    for _ in 0..samples {
        let p = primes[rng.gen_range(0..primes.len())];
        let a = GInt::new(rng.gen_range(-1_000_000..=1_000_000), rng.gen_range(-1_000_000..=1_000_000));
        if residue_symbol(a, p)? == residue_symbol_euler(a, p)? {
            agree += 1;
        }
    }
    if samples > 0 {
        rows.push(VerificationRow::new(
            "symbol by reciprocity = Euler criterion",
            format!("samples={samples} seed={seed}"),
            re(agree as f64 / samples as f64),
            re(1.0),
            1e-12,
        ));
    }
    Ok(rows)
}

/// Both Poisson identities at the sample moduli with the default bump.
pub fn poisson_suite(x: f64, tol: f64) -> Result<Vec<VerificationRow>> {
    let k = KernelTransform::new(Bump::default());
    let mut rows = Vec::new();
    for n in [ONE, GInt::new(-3, 0), GInt::new(-1, -2), GInt::new(3, 2)] {
        let r = poisson_verify(n, &k, x, tol / 10.0)?;
        let params = format!("n={n} X={x} kmax={}", r.kmax);
        rows.push(VerificationRow::new("Poisson, all k", params.clone(), re(r.lhs_all), re(r.rhs_all), tol));
        rows.push(VerificationRow::new("Poisson, odd k", params, re(r.lhs_odd), re(r.rhs_odd), tol));
    }
    Ok(rows)
}

/// L(1/2)^2 from the j = 1 sum against the j = 2 sum for every odd square-free
/// d with N(d) <= dmax.
pub fn afe_suite(dmax: u64, tol: f64) -> Result<Vec<VerificationRow>> {
    let ctx = AfeContext::for_conductors(dmax, 2, tol)?;
    let mut rows = Vec::new();
    for d in squarefree_odd_vec(dmax, true)? {
        let one = ctx.central_value_twists(d, 1, tol)?;
        let two = ctx.central_value_twists(d, 2, tol)?;
        for (a, b) in one.iter().zip(&two) {
            let l2 = b.value;
            rows.push(VerificationRow::new(
                "L1^2 = L2",
                format!("d={}", a.d),
                re(a.value * a.value / (1.0 + l2.abs())),
                re(l2 / (1.0 + l2.abs())),
                1e-6,
            ));
        }
    }
    Ok(rows)
}

pub fn zseries_suite(nmax: u64) -> Result<Vec<VerificationRow>> {
    verify_zseries(nmax)
}

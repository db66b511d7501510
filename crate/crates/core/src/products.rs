//! Euler products over the odd prime ideals of Z[i]: the constants a_k, the
//! fourth-moment constant, and the local factors of the Z-series.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chars::residue_symbol;
use crate::error::{Error, Result};
use crate::gauss::gauss_local_ratio;
use crate::gint::{factor, gaussian_primes, is_gaussian_prime, GInt, PrimaryIdeals, I, ONE_PLUS_I};
use crate::numeric::{zeta_k, CompensatedComplex};

/// Default truncation norm for Euler products.
pub const DEFAULT_TRUNCATION: u64 = 4_000_000;
/// 2^7 3^4 5^2 7.
pub const LEADING_DENOMINATOR: u64 = 1_814_400;
/// Largest series depth accepted by the local probes.
pub const MAX_DEPTH: usize = 60;
/// Default kernel limit multiplier in [`z_direct`].
pub const KERNEL_FACTOR: u64 = 100;

// pi(x) < 1.25506 x / log x for x > 1
const RS_CONST: f64 = 1.25506;
const BLOCK: usize = 1 << 14;
const KERNEL_CAP: u64 = 2_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProductTag {
    Ak,
    Z1,
    Z3Factor,
    Z4Factor,
    LeadingConstant,
    KernelSeries,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EulerProductValue {
    pub tag: ProductTag,
    /// Factors with N(p) <= truncation are included.
    pub truncation: u64,
    pub value: Complex64,
    /// Bound on |log(full / partial)|.
    pub log_tail_bound: f64,
}

impl EulerProductValue {
    /// Bound on |full - partial|.
    pub fn abs_error(&self) -> f64 {
        self.value.norm() * self.log_tail_bound.exp_m1()
    }
}

fn npow(n: f64, s: Complex64) -> Complex64 {
    (-s * n.ln()).exp()
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn odd_prime_norms(p: u64) -> Vec<f64> {
    gaussian_primes(p)
        .into_iter()
        .filter(|&q| q != ONE_PLUS_I)
        .map(|q| q.norm() as f64)
        .collect()
}

fn rational_prime_tail(sigma: f64, x: f64) -> f64 {
    RS_CONST * sigma / ((sigma - 1.0) * x.powf(sigma - 1.0) * x.ln())
}

/// Upper bound for the sum of N(p)^{-sigma} over odd prime ideals with N(p) > x.
pub fn prime_ideal_tail(sigma: f64, x: f64) -> Result<f64> {
    if !(sigma > 1.0) || !(x >= 4.0) {
        return Err(Error::Domain(format!("prime tail needs sigma > 1, x >= 4 (got {sigma}, {x})")));
    }
    Ok(2.0 * rational_prime_tail(sigma, x) + rational_prime_tail(2.0 * sigma, x.sqrt()))
}

/// 2 sup N^theta |log f(N)| over a geometric sample of N above p. The sample
/// stops at 10^8 (or 10 p), past which cancellation in f - 1 dominates.
fn tail_constant<F: Fn(f64) -> Complex64>(p: f64, theta: f64, log_f: &F) -> f64 {
    let top = (p * 1e3).min(1e8).max(p * 10.0);
    let mut n = p;
    let mut sup = 0f64;
    while n <= top {
        sup = sup.max(n.powf(theta) * log_f(n).norm());
        n *= 1.05;
    }
    2.0 * sup
}

/// prod over odd prime ideals with N(p) <= p of exp(log_f(N(p))), where
/// |log_f(N)| = O(N^{-theta}). The tail bound is C * (prime tail at theta).
pub fn euler_product<F>(tag: ProductTag, p: u64, theta: f64, log_f: F) -> Result<EulerProductValue>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    if p < 100 {
        return Err(Error::Domain(format!("truncation {p} below 100")));
    }
    if !(theta > 1.0) {
        return Err(Error::Domain(format!("local factors decay like N^-{theta}; product diverges")));
    }
    let norms = odd_prime_norms(p);
    let parts: Vec<CompensatedComplex> = norms
        .par_chunks(BLOCK)
        .map(|chunk| {
            let mut acc = CompensatedComplex::new();
            for &n in chunk {
                acc.add(log_f(n));
            }
            acc
        })
        .collect();
    let mut total = CompensatedComplex::new();
    for part in &parts {
        total.merge(part);
    }
    let log = total.value();
    if !(log.re.is_finite() && log.im.is_finite()) {
        return Err(Error::Domain("a local factor vanishes".into()));
    }
    let tail = tail_constant(p as f64, theta, &log_f) * prime_ideal_tail(theta, p as f64)?;
    Ok(EulerProductValue {
        tag,
        truncation: p,
        value: log.exp(),
        log_tail_bound: tail,
    })
}

fn ak_log_factor(k: f64, n: f64) -> f64 {
    let u = n.sqrt().recip();
    let plus = (-k * u.ln_1p()).exp_m1();
    let minus = (-k * (-u).ln_1p()).exp_m1();
    let bracket = 0.5 * (plus + minus) + 1.0 / n;
    0.5 * k * (k + 1.0) * (-1.0 / n).ln_1p() - (1.0 / n).ln_1p() + bracket.ln_1p()
}

/// a_k = 2^{-k(k+2)/2} prod_p (1 - 1/N)^{k(k+1)/2} / (1 + 1/N)
///   * (((1 + N^{-1/2})^{-k} + (1 - N^{-1/2})^{-k}) / 2 + 1/N).
pub fn a_k(k: f64, p: u64) -> Result<EulerProductValue> {
    if !(k >= 0.0) {
        return Err(Error::Domain(format!("k = {k} negative")));
    }
    let mut v = euler_product(ProductTag::Ak, p, 2.0, |n| c(ak_log_factor(k, n)))?;
    v.value *= 2f64.powf(-0.5 * k * (k + 2.0));
    Ok(v)
}

/// pi a_4 / (1814400 zeta_K(2)) (pi/4)^10 with a_4 truncated at p.
pub fn leading_constant_4_at(p: u64) -> Result<EulerProductValue> {
    let a4 = a_k(4.0, p)?;
    let z2 = zeta_k(c(2.0))?.re;
    Ok(EulerProductValue {
        tag: ProductTag::LeadingConstant,
        truncation: p,
        value: a4.value * PI / (LEADING_DENOMINATOR as f64 * z2) * (PI / 4.0).powi(10),
        log_tail_bound: a4.log_tail_bound,
    })
}

/// The fourth-moment constant at the default truncation.
pub fn leading_constant_4() -> f64 {
    static C4: OnceLock<f64> = OnceLock::new();
    *C4.get_or_init(|| leading_constant_4_at(DEFAULT_TRUNCATION).unwrap().value.re)
}

fn z1_local(a: Complex64, b: Complex64, n: f64) -> Complex64 {
    let x2a = npow(n, 2.0 * a);
    let x2b = npow(n, 2.0 * b);
    let xab = npow(n, a + b);
    let (x4a, x4b, x22) = (x2a * x2a, x2b * x2b, x2a * x2b);
    let pre = (1.0 - x2a) * (1.0 - x2b) * (1.0 - xab).powi(4);
    let corr = (3.0 * x2a + 3.0 * x2b + 4.0 * xab - x4a - x4b - 3.0 * x22
        + 2.0 * x2a * x4b
        + 2.0 * x4a * x2b
        - x4a * x4b)
        / (n + 1.0);
    pre * (1.0 + 4.0 * xab + x2a + x2b + x22 - corr)
}

/// Z_1(alpha, beta): the 2-part prefactor times prod_p Z_{1,p}.
pub fn z1_product(a: Complex64, b: Complex64, p: u64) -> Result<EulerProductValue> {
    let sigma = a.re.min(b.re);
    if !(sigma > 0.25) {
        return Err(Error::Domain(format!("Re shifts must exceed 1/4, got {sigma}")));
    }
    let theta = (1.0 + 2.0 * sigma).min(4.0 * sigma);
    let mut v = euler_product(ProductTag::Z1, p, theta, |n| z1_local(a, b, n).ln())?;
    let two = |s: Complex64| 1.0 - npow(2.0, s);
    v.value *= two(2.0 * a).powi(3) * two(2.0 * b).powi(3) * two(a + b).powi(4);
    Ok(v)
}

fn near_pole(s: Complex64) -> bool {
    (s - 1.0).norm() < 1e-6
}

/// zeta_K(2a)^3 zeta_K(2b)^3 zeta_K(a+b)^4 Z_1(a, b), products truncated at p.
pub fn z1_closed_at(a: Complex64, b: Complex64, p: u64) -> Result<Complex64> {
    if near_pole(2.0 * a) || near_pole(2.0 * b) || near_pole(a + b) {
        return Err(Error::Domain("too close to a pole of zeta_K".into()));
    }
    let z1 = z1_product(a, b, p)?;
    Ok(zeta_k(2.0 * a)?.powi(3) * zeta_k(2.0 * b)?.powi(3) * zeta_k(a + b)?.powi(4) * z1.value)
}

pub fn z1_closed(a: Complex64, b: Complex64) -> Result<Complex64> {
    z1_closed_at(a, b, DEFAULT_TRUNCATION)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZDirect {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub nmax: u64,
    /// Sum over primary n1, n2 with n1 n2 a square and N(n1), N(n2) <= nmax.
    pub box_sum: Complex64,
    pub kernel_limit: u64,
    /// The same series grouped by square-free kernel k (n1 = k a^2, n2 = k b^2),
    /// complete in a and b, over N(k) <= kernel_limit.
    pub completed: Complex64,
    /// Bound on |full series - completed|.
    pub completion_bound: f64,
}

impl ZDirect {
    /// Part of the series outside the box, as measured by the kernel completion.
    pub fn tail_estimate(&self) -> Complex64 {
        self.completed - self.box_sum
    }
}

fn prime_indices(ideals: &PrimaryIdeals, mut i: usize) -> Vec<usize> {
    let mut v = Vec::new();
    while i > 0 {
        v.push(ideals.spf(i));
        i = ideals.spf_rest(i);
    }
    v
}

fn box_sum(a: Complex64, b: Complex64, nmax: u64) -> Result<Complex64> {
    let ideals = PrimaryIdeals::new(nmax)?;
    let d = ideals.divisor_counts(2);
    let sqf = ideals.squarefree();
    let norms = ideals.norms();
    let pf = |i: usize| {
        let n = norms[i] as f64;
        n / (n + 1.0)
    };
    let kernels: Vec<usize> = (0..ideals.len()).filter(|&i| sqf[i]).collect();
    let parts: Vec<CompensatedComplex> = kernels
        .par_iter()
        .map(|&k| {
            let lim = nmax / norms[k];
            let m = norms.partition_point(|&n| n * n <= lim);
            let pk = prime_indices(&ideals, k);
            // (index of k a^2, primes of k a, P(k a)) for each a
            let side: Vec<(usize, Vec<usize>, f64)> = (0..m)
                .map(|ai| {
                    let e = ideals.elem(k) * ideals.elem(ai) * ideals.elem(ai);
                    let idx = ideals.index_of(e).expect("k a^2 inside the box");
                    let mut ps = pk.clone();
                    for q in prime_indices(&ideals, ai) {
                        if !ps.contains(&q) {
                            ps.push(q);
                        }
                    }
                    let pp = ps.iter().map(|&q| pf(q)).product();
                    (idx, ps, pp)
                })
                .collect();
            let bprimes: Vec<Vec<usize>> = (0..m).map(|bi| prime_indices(&ideals, bi)).collect();
            let mut acc = CompensatedComplex::new();
            for (i1, ps, pp) in &side {
                let wa = npow(norms[*i1] as f64, a) * (d[*i1] as f64);
                for (bi, (i2, _, _)) in side.iter().enumerate() {
                    let mut p = *pp;
                    for q in &bprimes[bi] {
                        if !ps.contains(q) {
                            p *= pf(*q);
                        }
                    }
                    acc.add(wa * npow(norms[*i2] as f64, b) * (d[*i2] as f64 * p));
                }
            }
            acc
        })
        .collect();
    let mut total = CompensatedComplex::new();
    for part in &parts {
        total.merge(part);
    }
    Ok(total.value())
}

// Local generating functions in x = N^-alpha, y = N^-beta with P = N/(N+1):
// even kernel exponent 1 + P (S_e(x) S_e(y) - 1), odd P x y S_o(x) S_o(y).
fn kernel_local(a: Complex64, b: Complex64, n: f64) -> (Complex64, Complex64) {
    let x = npow(n, a);
    let y = npow(n, b);
    let p = n / (n + 1.0);
    let se = |t: Complex64| (1.0 + t * t) / (1.0 - t * t).powi(2);
    let so = |t: Complex64| 2.0 / (1.0 - t * t).powi(2);
    let even = 1.0 + p * (se(x) * se(y) - 1.0);
    let odd = p * x * y * so(x) * so(y);
    (even, odd / even)
}

/// Sum of d(n1) d(n2) P(n1 n2) / (N(n1)^a N(n2)^b) over primary n1, n2 with
/// n1 n2 a square: the literal box N(n_i) <= nmax and a completion grouped by
/// square-free kernel up to N(k) <= 100 nmax.
pub fn z_direct(a: Complex64, b: Complex64, nmax: u64) -> Result<ZDirect> {
    z_direct_with(a, b, nmax, (KERNEL_FACTOR * nmax).min(KERNEL_CAP))
}

pub fn z_direct_with(a: Complex64, b: Complex64, nmax: u64, kernel_limit: u64) -> Result<ZDirect> {
    let sigma = a.re.min(b.re);
    if !(sigma > 0.5) {
        return Err(Error::Domain(format!("Re shifts must exceed 1/2, got {sigma}")));
    }
    if nmax < 1 || kernel_limit < 100 {
        return Err(Error::Domain("empty summation range".into()));
    }
    let box_value = box_sum(a, b, nmax)?;

    let base = euler_product(ProductTag::KernelSeries, DEFAULT_TRUNCATION, 2.0 * sigma, |n| {
        kernel_local(a, b, n).0.ln()
    })?;
    let ideals = PrimaryIdeals::new(kernel_limit)?;
    let len = ideals.len();
    let mut rho = vec![Complex64::new(0.0, 0.0); len];
    rho[0] = c(1.0);
    for i in 1..len {
        if ideals.spf_exponent(i) == 1 {
            let q = ideals.spf(i);
            let r = ideals.spf_rest(i);
            rho[i] = rho[r] * kernel_local(a, b, ideals.norm(q) as f64).1;
        }
    }
    let mut ks = CompensatedComplex::new();
    for r in &rho {
        ks.add(*r);
    }
    let ks = ks.value();

    // Rankin: sum over N(k) > K of |rho(k)| <= K^-delta prod_p (1 + |rho(p)| N^delta)
    let s = (a + b).re;
    let mut rankin = f64::INFINITY;
    let mut delta = 0.05;
    while s - delta > 1.05 {
        let v = euler_product(ProductTag::KernelSeries, 100_000, s - delta, |n| {
            c((kernel_local(a, b, n).1.norm() * n.powf(delta)).ln_1p())
        })?;
        let bound = (kernel_limit as f64).powf(-delta) * v.value.re * v.log_tail_bound.exp();
        rankin = rankin.min(bound);
        delta += 0.05;
    }
    let full_base = base.value.norm() * base.log_tail_bound.exp();
    let completion_bound = full_base * rankin + base.abs_error() * ks.norm();
    Ok(ZDirect {
        alpha: a,
        beta: b,
        nmax,
        box_sum: box_value,
        kernel_limit,
        completed: base.value * ks,
        completion_bound,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalFactorProbe {
    pub prime: GInt,
    pub alpha: Complex64,
    pub beta: Complex64,
    pub gamma: Option<Complex64>,
    pub depth: usize,
    pub direct: Complex64,
    pub closed: Option<Complex64>,
}

impl LocalFactorProbe {
    pub fn diff(&self) -> Option<f64> {
        self.closed.map(|c| (c - self.direct).norm())
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.diff().is_some_and(|d| d < tol)
    }
}

fn check_prime(p: GInt) -> Result<()> {
    if !p.is_primary() {
        return Err(Error::NotPrimary(p));
    }
    if !is_gaussian_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(())
}

fn check_depth(depth: usize) -> Result<()> {
    if depth == 0 || depth > MAX_DEPTH {
        return Err(Error::Domain(format!("depth {depth} outside 1..={MAX_DEPTH}")));
    }
    Ok(())
}

/// Square-free part k1 of k = k1 k2^2 with k2 a product of primary primes and 1+i.
fn squarefree_part(k: GInt) -> Result<GInt> {
    let f = factor(k)?;
    let mut k1 = f.unit;
    if f.e2 % 2 == 1 {
        k1 = k1.checked_mul(ONE_PLUS_I)?;
    }
    for &(p, m) in &f.primes {
        if m % 2 == 1 {
            k1 = k1.checked_mul(p)?;
        }
    }
    Ok(k1)
}

/// (1 - chi N^{-1/2-a})^2 (1 - chi N^{-1/2-b})^2.
fn z2_prefactor(chi: i8, n: f64, a: Complex64, b: Complex64) -> Complex64 {
    let chi = chi as f64;
    (1.0 - chi * npow(n, 0.5 + a)).powi(2) * (1.0 - chi * npow(n, 0.5 + b)).powi(2)
}

/// sum_{n1, n2 <= depth} (n1+1)(n2+1) N^{-n1 a - n2 b} g(k, p^{n1+n2}) / N^{n1+n2}.
fn z2_series(norm: u64, a: Complex64, b: Complex64, h: Option<u32>, sym: i8, depth: usize) -> Complex64 {
    let n = norm as f64;
    let x = npow(n, a);
    let y = npow(n, b);
    let g: Vec<f64> = (0..=2 * depth as u32).map(|l| gauss_local_ratio(h, sym, norm, l)).collect();
    let mut acc = CompensatedComplex::new();
    let mut xp = c(1.0);
    for n1 in 0..=depth {
        let mut yp = c(1.0);
        for n2 in 0..=depth {
            let gl = g[n1 + n2];
            if gl != 0.0 {
                acc.add(xp * yp * ((n1 + 1) as f64 * (n2 + 1) as f64 * gl));
            }
            yp *= y;
        }
        xp *= x;
    }
    acc.value()
}

fn check_shifts(a: Complex64, b: Complex64) -> Result<()> {
    if !(a.re > 0.0 && b.re > 0.0) {
        return Err(Error::Domain(format!("shifts need positive real parts, got {a}, {b}")));
    }
    Ok(())
}

/// Z_{2,p}(a, b, m, k) from its defining double series. `divides_2m` selects
/// the case p | 2m, where the local factor is the prefactor alone. The closed
/// value is reported for p | 2m and for k = 0.
pub fn z2_local(
    p: GInt,
    a: Complex64,
    b: Complex64,
    divides_2m: bool,
    k: GInt,
    depth: usize,
) -> Result<LocalFactorProbe> {
    check_prime(p)?;
    check_depth(depth)?;
    check_shifts(a, b)?;
    let n = p.norm() as f64;
    let (chi, h, sym) = if k.is_zero() {
        (1, None, 0)
    } else {
        let k1 = squarefree_part(k)?;
        let chi = residue_symbol(I.checked_mul(k1)?, p)?;
        let mut kk = k;
        let mut h = 0u32;
        while let Some(t) = kk.div_exact(p) {
            kk = t;
            h += 1;
        }
        (chi, Some(h), residue_symbol(I.checked_mul(kk)?, p)?)
    };
    let pre = z2_prefactor(chi, n, a, b);
    let (direct, closed) = if divides_2m {
        (pre, Some(pre))
    } else {
        let series = z2_series(p.norm(), a, b, h, sym, depth);
        let closed = if k.is_zero() {
            // only even n1 + n2 survive, each with weight 1 - 1/N
            let f = |t: Complex64| 1.0 / (1.0 - t).powi(2);
            let (x, y) = (npow(n, a), npow(n, b));
            let even = 0.5 * (f(x) * f(y) + f(-x) * f(-y));
            Some(pre * (1.0 + (1.0 - 1.0 / n) * (even - 1.0)))
        } else {
            None
        };
        (pre * series, closed)
    };
    Ok(LocalFactorProbe {
        prime: p,
        alpha: a,
        beta: b,
        gamma: None,
        depth,
        direct,
        closed,
    })
}

/// K_1(a, b, g; p) at N(p) = n.
pub fn k1_factor(a: Complex64, b: Complex64, g: Complex64, n: f64) -> Complex64 {
    (1.0 - npow(n, 0.5 + a)).powi(2)
        * (1.0 - npow(n, 0.5 + b)).powi(2)
        * (1.0 - npow(n, 2.0 * a + 2.0 * g)).powi(2)
        * (1.0 - npow(n, 2.0 * b + 2.0 * g)).powi(2)
}

/// K_2(a, b, g; p) at N(p) = n.
pub fn k2_factor(a: Complex64, b: Complex64, g: Complex64, n: f64) -> Complex64 {
    let pre = (1.0 - npow(n, 0.5 + a)).powi(2) * (1.0 - npow(n, 0.5 + b)).powi(2);
    let ua = npow(n, 2.0 * a + 2.0 * g);
    let ub = npow(n, 2.0 * b + 2.0 * g);
    let q = 1.0 / n;
    let body = (1.0 - q) * (1.0 + ua) * (1.0 + ub)
        + q * (1.0 - ua).powi(2) * (1.0 - ub).powi(2)
        + (1.0 - q) * 4.0 * npow(n, a + b + 2.0 * g)
        + 2.0
            * (1.0 - npow(n, 2.0 * g))
            * (npow(n, 0.5 + a)
                + npow(n, 0.5 + b)
                + npow(n, 0.5 + 2.0 * a + b + 2.0 * g)
                + npow(n, 0.5 + a + 2.0 * b + 2.0 * g));
    pre * body
}

/// sum_b Z_{2,p}(a, b, m, i p^{2b}) / N^{2 b g}, times
/// (1 - N^{-2g})(1 - N^{-2a-2g})^2 (1 - N^{-2b-2g})^2, against K_1 (p | 2m) or K_2.
pub fn z3_local_identity(
    p: GInt,
    a: Complex64,
    b: Complex64,
    g: Complex64,
    divides_2m: bool,
    depth: usize,
) -> Result<LocalFactorProbe> {
    check_prime(p)?;
    check_depth(depth)?;
    check_shifts(a, b)?;
    if !(g.re > 0.5) {
        return Err(Error::Domain(format!("Re gamma = {} must exceed 1/2", g.re)));
    }
    let n = p.norm() as f64;
    // k = i p^{2b}: k1 = i, chi_{i k1}(p) = (-1/p), and i k p^{-2b} = -1
    let minus = residue_symbol(GInt::new(-1, 0), p)?;
    let pre = z2_prefactor(minus, n, a, b);
    let step = npow(n, 2.0 * g);
    let mut acc = CompensatedComplex::new();
    let mut w = c(1.0);
    for bb in 0..=depth {
        let local = if divides_2m {
            pre
        } else {
            pre * z2_series(p.norm(), a, b, Some(2 * bb as u32), minus, depth.max(bb + 1))
        };
        acc.add(local * w);
        w *= step;
    }
    let norm = (1.0 - npow(n, 2.0 * g))
        * (1.0 - npow(n, 2.0 * a + 2.0 * g)).powi(2)
        * (1.0 - npow(n, 2.0 * b + 2.0 * g)).powi(2);
    let closed = if divides_2m {
        k1_factor(a, b, g, n)
    } else {
        k2_factor(a, b, g, n)
    };
    Ok(LocalFactorProbe {
        prime: p,
        alpha: a,
        beta: b,
        gamma: Some(g),
        depth,
        direct: acc.value() * norm,
        closed: Some(closed),
    })
}

fn z4_local(a: Complex64, b: Complex64, g: Complex64, n: f64) -> Complex64 {
    let main = k2_factor(a, b, g, n) - npow(n, 2.0 - 2.0 * g) * k1_factor(a, b, g, n);
    let num = (1.0 - npow(n, 2.0 * a + 2.0 * g))
        * (1.0 - npow(n, 2.0 * b + 2.0 * g))
        * (1.0 - npow(n, a + b + 2.0 * g)).powi(4);
    let den = (1.0 - npow(n, 0.5 + a + 2.0 * g)).powi(2) * (1.0 - npow(n, 0.5 + b + 2.0 * g)).powi(2);
    main * num / den
}

/// Z_4(a, b, g) = K_1(a, b, g; 1+i) prod_p (K_2 - N^{-2+2g} K_1) (ratio of zeta factors).
pub fn z4_factor_at(a: Complex64, b: Complex64, g: Complex64, p: u64) -> Result<EulerProductValue> {
    let sigma = a.re.min(b.re);
    if !(sigma >= 0.375) || !(-0.0625..=0.125).contains(&g.re) {
        return Err(Error::Domain(format!(
            "need Re a, Re b >= 3/8 and -1/16 <= Re g <= 1/8 (got {a}, {b}, {g})"
        )));
    }
    let gm = g.re.min(0.0);
    let theta = (1.0 + 2.0 * sigma + 4.0 * gm)
        .min(0.5 + 3.0 * sigma + 4.0 * gm)
        .min(2.0 - 2.0 * g.re)
        .min(4.0 * sigma + 4.0 * gm);
    let mut v = euler_product(ProductTag::Z4Factor, p, theta, |n| z4_local(a, b, g, n).ln())?;
    v.value *= k1_factor(a, b, g, 2.0);
    Ok(v)
}

pub fn z4_factor(a: Complex64, b: Complex64, g: Complex64) -> Result<EulerProductValue> {
    z4_factor_at(a, b, g, DEFAULT_TRUNCATION)
}

/// One line of a verification report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationRow {
    pub identity: String,
    pub parameters: String,
    pub direct: Complex64,
    pub closed: Complex64,
    pub diff: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl VerificationRow {
    pub fn new(identity: &str, parameters: String, direct: Complex64, closed: Complex64, tolerance: f64) -> Self {
        let diff = (direct - closed).norm();
        VerificationRow {
            identity: identity.into(),
            parameters,
            direct,
            closed,
            diff,
            tolerance,
            pass: diff < tolerance,
        }
    }
}

/// Sample primes of norm 5, 9, 13.
pub fn sample_primes() -> [GInt; 3] {
    [GInt::new(-1, -2), GInt::new(-3, 0), GInt::new(3, 2)]
}

/// Local identities at three primes and three shift triples, the global Z
/// factorization at two points, and the constant relations at the central point.
pub fn verify_zseries(nmax: u64) -> Result<Vec<VerificationRow>> {
    let mut rows = Vec::new();
    let z2_shifts = [(c(1.0), c(1.25)), (c(0.6), c(0.6)), (Complex64::new(0.75, 0.5), c(0.9))];
    let triples = [
        (c(0.1), c(0.1), c(0.75)),
        (c(0.6), c(0.3), c(1.0)),
        (Complex64::new(0.25, 0.5), c(0.4), Complex64::new(0.8, -0.3)),
    ];
    for p in sample_primes() {
        for &(a, b, g) in &triples {
            for div in [false, true] {
                let pr = z3_local_identity(p, a, b, g, div, 30)?;
                rows.push(VerificationRow::new(
                    if div { "Z3 local = K1" } else { "Z3 local = K2" },
                    format!("p={p} a={a} b={b} g={g}"),
                    pr.direct,
                    pr.closed.unwrap(),
                    1e-8,
                ));
            }
        }
        for &(a, b) in &z2_shifts {
            let pr = z2_local(p, a, b, false, GInt::new(0, 0), 60)?;
            rows.push(VerificationRow::new(
                "Z2 local series at k=0",
                format!("p={p} a={a} b={b}"),
                pr.direct,
                pr.closed.unwrap(),
                1e-8,
            ));
        }
    }
    for (a, b) in [(c(1.0), c(1.25)), (c(1.5), c(1.0))] {
        let zd = z_direct(a, b, nmax)?;
        let closed = z1_closed(a, b)?;
        rows.push(VerificationRow::new(
            "Z = zeta^3 zeta^3 zeta^4 Z1",
            format!("a={a} b={b} nmax={nmax} kernels<={}", zd.kernel_limit),
            zd.completed,
            closed,
            1e-3,
        ));
    }
    let a4 = a_k(4.0, DEFAULT_TRUNCATION)?.value;
    let z1 = z1_product(c(0.5), c(0.5), DEFAULT_TRUNCATION)?.value;
    rows.push(VerificationRow::new("Z1(1/2,1/2) = 4 a4", String::new(), z1, 4.0 * a4, 1e-5));
    let z4 = z4_factor(c(0.5), c(0.5), c(0.0))?.value;
    let zk2 = zeta_k(c(2.0))?;
    rows.push(VerificationRow::new(
        "Z4(1/2,1/2,0) = 16 a4 / (3 zeta_K(2))",
        String::new(),
        z4,
        16.0 * a4 / (3.0 * zk2),
        1e-5,
    ));
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a0_is_one() {
        let v = a_k(0.0, 1000).unwrap();
        assert!((v.value.re - 1.0).abs() < 1e-15);
        assert_eq!(v.log_tail_bound, 0.0);
    }

    #[test]
    fn a4_truncation_and_tail() {
        let lo = a_k(4.0, 10_000).unwrap();
        let hi = a_k(4.0, 100_000).unwrap();
        assert!(lo.value.re > 0.0);
        let d = (lo.value.re - hi.value.re).abs();
        assert!(d < 1e-6);
        assert!(d <= lo.abs_error());
        assert!(lo.abs_error() < 20.0 * d.max(1e-300) || d == 0.0);
    }

    #[test]
    fn a_k_continuous() {
        let x = a_k(2.0, 10_000).unwrap().value.re;
        let y = a_k(2.001, 10_000).unwrap().value.re;
        assert!((x - y).abs() < 1e-2 * x);
    }

    #[test]
    fn leading_constant() {
        assert_eq!(LEADING_DENOMINATOR, 2u64.pow(7) * 81 * 25 * 7);
        assert_eq!(LEADING_DENOMINATOR, (1..=10u64).product::<u64>() / 2);
        let c1 = leading_constant_4_at(DEFAULT_TRUNCATION).unwrap().value.re;
        let c2 = leading_constant_4_at(2 * DEFAULT_TRUNCATION).unwrap().value.re;
        assert_eq!(c1, leading_constant_4());
        assert!(c1 > 0.0 && c1 < 1.0);
        assert!((c1 - c2).abs() < 1e-6 * c1);
    }

    #[test]
    fn prime_tail_dominates() {
        // odd prime ideals with 1000 < N <= 10^6
        let s: f64 = odd_prime_norms(1_000_000).iter().filter(|&&n| n > 1000.0).map(|n| n.powi(-2)).sum();
        assert!(s < prime_ideal_tail(2.0, 1000.0).unwrap());
        assert!(prime_ideal_tail(2.0, 1000.0).unwrap() < 8.0 * s);
    }

    #[test]
    fn z1_factor_shape() {
        let (a, b) = (c(1.0), c(1.0));
        let mut last = f64::INFINITY;
        for n in [1e2, 1e3, 1e4, 1e5] {
            let d = (z1_local(a, b, n) - 1.0).norm();
            assert!(d * n * n < 20.0);
            assert!(d < last);
            last = d;
        }
    }

    #[test]
    fn z1_at_centre_is_4a4() {
        let a4 = a_k(4.0, 200_000).unwrap().value.re;
        let z1 = z1_product(c(0.5), c(0.5), 200_000).unwrap().value;
        assert!((z1.re - 4.0 * a4).abs() < 1e-6, "{z1} vs {}", 4.0 * a4);
    }

    #[test]
    fn z_direct_identity() {
        let (a, b) = (c(1.0), c(1.25));
        let zd = z_direct(a, b, 2000).unwrap();
        let closed = z1_closed(a, b).unwrap();
        assert!(zd.box_sum.re > 1.0 && zd.box_sum.re < zd.completed.re);
        assert!((zd.completed - closed).norm() < 1e-4, "{} vs {closed}", zd.completed);
        assert!(zd.completion_bound < 1e-3);
    }

    #[test]
    fn z_direct_small_box_by_hand() {
        // N <= 5: n in {1, -1+2i? no: primary 1, -1-2i, -1+2i}; squares need n1 = n2
        let a = c(1.0);
        let zd = z_direct_with(a, a, 5, 100).unwrap();
        let want = 1.0 + 2.0 * (4.0 * 5.0 / 6.0) / 25.0;
        assert!((zd.box_sum.re - want).abs() < 1e-14);
    }

    #[test]
    fn z2_trivial_cases() {
        let p = GInt::new(-1, -2);
        let (a, b) = (c(0.6), c(0.6));
        let pr = z2_local(p, a, b, true, GInt::new(-3, 0), 10).unwrap();
        let chi = residue_symbol(GInt::new(0, -3), p).unwrap() as f64;
        let want = (1.0 - chi * 5f64.powf(-1.1)).powi(4);
        assert!((pr.direct.re - want).abs() < 1e-15 && pr.passes(1e-15));
        // k = 0: only n1 = n2 = 0 at depth 1 with odd total vanishing
        let zero = z2_local(p, a, b, false, GInt::new(0, 0), 60).unwrap();
        assert!(zero.passes(1e-12), "{:?}", zero);
        let k = p.pow(6) * GInt::new(2, 1);
        let d30 = z2_local(p, c(0.1), c(0.1), false, k, 30).unwrap();
        let d60 = z2_local(p, c(0.1), c(0.1), false, k, 60).unwrap();
        assert!((d30.direct - d60.direct).norm() < 1e-10);
        let d30 = z2_local(p, c(1.0), c(1.0), false, GInt::new(0, 0), 30).unwrap();
        let d60 = z2_local(p, c(1.0), c(1.0), false, GInt::new(0, 0), 60).unwrap();
        assert!((d30.direct - d60.direct).norm() < 1e-10);
        assert!(z2_local(p, c(0.0), a, false, GInt::new(1, 0), 10).is_err());
        assert!(z2_local(GInt::new(1, 2), a, a, false, GInt::new(1, 0), 10).is_err());
    }

    #[test]
    fn z3_known_values() {
        let want = [0.403569003267951, 0.625269468685561, 0.729754268652802];
        for (p, w) in sample_primes().into_iter().zip(want) {
            let pr = z3_local_identity(p, c(0.1), c(0.1), c(0.75), false, 30).unwrap();
            assert!((pr.closed.unwrap().re - w).abs() < 1e-12);
            assert!(pr.passes(1e-8), "{p}: {:?}", pr);
            let pr1 = z3_local_identity(p, c(0.1), c(0.1), c(0.75), true, 30).unwrap();
            assert!(pr1.passes(1e-8));
        }
    }

    #[test]
    fn z3_b0_term() {
        let p = GInt::new(3, 2);
        let (a, b) = (c(0.3), c(0.2));
        let z2 = z2_local(p, a, b, false, I, 10).unwrap().direct;
        let pre = (1.0 - 13f64.powf(-0.8)).powi(2) * (1.0 - 13f64.powf(-0.7)).powi(2);
        let series = z2_series(13, a, b, Some(0), 1, 10);
        assert!((z2 - pre * series).norm() < 1e-15);
    }

    #[test]
    fn k1_large_gamma_limit() {
        let (a, b) = (c(0.2), c(0.3));
        let n = 13.0f64;
        let want = (1.0 - n.powf(-0.7)).powi(2) * (1.0 - n.powf(-0.8)).powi(2);
        assert!((k1_factor(a, b, c(40.0), n).re - want).abs() < 1e-12);
    }

    #[test]
    fn z4_domain_and_stability() {
        assert!(z4_factor_at(c(0.3), c(0.5), c(0.0), 1000).is_err());
        assert!(z4_factor_at(c(0.5), c(0.5), c(0.2), 1000).is_err());
        let x = z4_factor_at(c(0.5), c(0.5), c(0.0), 100_000).unwrap();
        let y = z4_factor_at(c(0.5), c(0.5), c(0.0), 200_000).unwrap();
        assert!((x.value - y.value).norm() < 1e-6);
        assert!((x.value - y.value).norm() <= x.abs_error());
        for n in [1e3, 1e4, 1e5] {
            assert!((z4_local(c(0.5), c(0.5), c(0.0), n) - 1.0).norm() * n * n < 50.0);
        }
        let lo = z4_factor_at(c(0.375), c(0.375), c(-0.0625), 10_000).unwrap();
        let hi = z4_factor_at(c(0.375), c(0.375), c(-0.0625), 100_000).unwrap();
        assert!(hi.value.norm().is_finite() && hi.log_tail_bound < lo.log_tail_bound);
        assert!((hi.value / lo.value).ln().norm() <= lo.log_tail_bound);
    }
}

//! One PASS/FAIL line per acceptance criterion. Exits non-zero if any fails.

use std::time::Instant;

use hecke_core::chars::{residue_symbol, residue_symbol_euler};
use hecke_core::gauss::{gauss_sum_closed, gauss_sum_direct, poisson_verify, primitive_gauss_sum, Bump, KernelTransform};
use hecke_core::gint::{gaussian_primes, squarefree_odd_vec, GInt, I, ONE, ONE_PLUS_I, UNITS};
use hecke_core::lfun::AfeContext;
use hecke_core::moments::{density_report, element_sums, family_values, moment_scan, rs_proxy, MomentReport, ScanConfig};
use hecke_core::numeric::zeta_k;
use hecke_core::products::{a_k, sample_primes, z1_closed, z1_product, z3_local_identity, z4_factor, z_direct, MAX_DEPTH};
use hecke_core::Result;
use hecke_validation::{odd_squarefree_count, zeta_k2_lattice};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const AFE_TOL: f64 = 1e-8;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn gauss_modulus() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let ds = squarefree_odd_vec(500, false)?;
    for &d in &ds {
        let g = primitive_gauss_sum(d)?.value;
        worst = worst.max((g.norm() / (32.0 * d.norm() as f64).sqrt() - 1.0).abs());
    }
    outcome(worst < 1e-6, format!("{} moduli, max rel err {worst:.2e}, tol 1e-6", ds.len()))
}

fn gauss_closed_forms() -> Result<Outcome> {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for p in gaussian_primes(100).into_iter().filter(|&p| p != ONE_PLUS_I) {
        for l in 1..=3 {
            let n = p.pow(l);
            for k in [GInt::new(0, 0), ONE, I, ONE_PLUS_I, p, p * p] {
                let d = (gauss_sum_closed(k, n)?.value - gauss_sum_direct(k, n)?.value).norm();
                worst = worst.max(d);
                cases += 1;
            }
        }
    }
    outcome(worst < 1e-9, format!("{cases} cases, max |closed - direct| {worst:.2e}, tol 1e-9"))
}

fn symbol_oracles() -> Result<Outcome> {
    let primes: Vec<GInt> = gaussian_primes(100_000).into_iter().filter(|&p| p != ONE_PLUS_I).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut agree = 0;
    let n = 10_000;
    for _ in 0..n {
        let p = primes[rng.gen_range(0..primes.len())];
        let a = GInt::new(rng.gen_range(-1_000_000_000..=1_000_000_000), rng.gen_range(-1_000_000_000..=1_000_000_000));
        agree += (residue_symbol(a, p)? == residue_symbol_euler(a, p)?) as usize;
    }
    outcome(agree == n, format!("{agree}/{n} agree"))
}

fn afe_exactness() -> Result<Outcome> {
    let ctx = AfeContext::for_conductors(2000, 2, AFE_TOL)?;
    let mut worst = 0.0f64;
    let mut cases = 0;
    for d in squarefree_odd_vec(2000, true)? {
        for u in UNITS {
            let e = u * d;
            let l1 = ctx.central_value(e, 1, AFE_TOL)?.value;
            let l2 = ctx.central_value(e, 2, AFE_TOL)?.value;
            worst = worst.max((l1 * l1 - l2).abs() / (1.0 + l2.abs()));
            cases += 1;
        }
    }
    outcome(worst < 1e-6, format!("{cases} d, max |L1^2 - L2| / (1 + |L2|) {worst:.2e}, tol 1e-6"))
}

fn poisson() -> Result<Outcome> {
    let k = KernelTransform::new(Bump::default());
    let mut worst = 0.0f64;
    for n in [ONE, GInt::new(-3, 0), GInt::new(-1, -2), GInt::new(3, 2)] {
        let r = poisson_verify(n, &k, 50.0, 1e-7)?;
        worst = worst.max((r.lhs_all - r.rhs_all).abs()).max((r.lhs_odd - r.rhs_odd).abs());
    }
    outcome(worst < 1e-6, format!("max discrepancy {worst:.2e}, tol 1e-6"))
}

fn z_factorization() -> Result<Outcome> {
    let (a, b) = (c(1.0), c(1.25));
    let z = z_direct(a, b, 10_000)?;
    let closed = z1_closed(a, b)?;
    let gap = (z.completed - closed).norm();
    let budget = gap + z.completion_bound;
    outcome(
        budget < 1e-3,
        format!(
            "box {:.7}, completed {:.7} (+- {:.1e}), closed {:.7}, |completed - closed| + bound {budget:.1e}, tol 1e-3",
            z.box_sum.re, z.completed.re, z.completion_bound, closed.re
        ),
    )
}

fn z3_local() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for p in sample_primes() {
        let probe = z3_local_identity(p, c(0.1), c(0.1), c(0.75), false, MAX_DEPTH)?;
        worst = worst.max(probe.diff().unwrap_or(f64::INFINITY));
    }
    outcome(worst < 1e-8, format!("N = 5, 9, 13, max diff {worst:.2e}, tol 1e-8"))
}

fn constants() -> Result<Outcome> {
    let a4_lo = a_k(4.0, 10_000)?.value.re;
    let a4_hi = a_k(4.0, 100_000)?.value.re;
    let a4 = a_k(4.0, hecke_core::products::DEFAULT_TRUNCATION)?.value.re;
    let zk = zeta_k(c(2.0))?.re;
    let zk_direct = zeta_k2_lattice(4_000_000);
    let z1 = z1_product(c(0.5), c(0.5), hecke_core::products::DEFAULT_TRUNCATION)?.value.re;
    let z4 = z4_factor(c(0.5), c(0.5), c(0.0))?.value.re;
    let z4_want = 16.0 * a4 / (3.0 * zk);
    let checks = [
        ("a4 drift", (a4_hi - a4_lo).abs(), 1e-6),
        ("zeta_K(2) - 1.5067030", (zk - 1.5067030).abs(), 1e-6),
        ("zeta_K(2) - ideal sum", (zk - zk_direct).abs(), 1e-6),
        ("Z1 - 4 a4", (z1 - 4.0 * a4).abs(), 1e-5),
        ("Z4 - 16 a4 / (3 zeta_K(2))", (z4 - z4_want).abs(), 1e-5),
    ];
    let pass = checks.iter().all(|&(_, v, t)| v < t);
    let mut detail: Vec<String> = checks
        .iter()
        .map(|&(n, v, t)| format!("{n} {v:.1e}{}", if v < t { "" } else { " (over)" }))
        .collect();
    detail.push(format!("Z4 / (16 a4 / (3 zeta_K(2))) = {:.7}", z4 / z4_want));
    outcome(pass, detail.join(", "))
}

fn density() -> Result<Outcome> {
    let r = density_report(1_000_000)?;
    let err = (r.count as f64 - r.predicted).abs() / r.x as f64;
    outcome(err < 0.01, format!("count {} vs {:.1}, |diff| / X {err:.2e}, tol 1e-2", r.count, r.predicted))
}

fn moments(report: &MomentReport) -> Result<Outcome> {
    let mut notes = Vec::new();
    let mut pass = true;
    for row in &report.rows {
        let brute = odd_squarefree_count(row.x)?;
        let ok = row.s[3] >= 0.0 && row.count == brute;
        pass &= ok;
        notes.push(format!("X={} S4={:.4e} count {}/{brute}", row.x, row.s[3], row.count));
    }
    // S4 two ways over N(d) <= 1e3, and against evaluating every unit multiple.
    let vals = family_values(1000, AFE_TOL, 1)?;
    let (mut four, mut two, mut budget) = (0.0, 0.0, 0.0);
    for v in &vals {
        for t in 0..2 {
            four += 2.0 * v.l1[t].powi(4);
            two += 2.0 * v.l2[t] * v.l2[t];
            budget += 2.0 * 1e-6 * (1.0 + v.l2[t].abs()).powi(2);
        }
    }
    let elem = element_sums(1000, AFE_TOL)?[3];
    let row = report.row(1000).expect("grid has 1e3");
    let ok = (four - two).abs() <= budget && (elem - row.s[3]).abs() <= 1e-9 * row.s[3];
    pass &= ok;
    notes.push(format!(
        "|sum L1^4 - sum (L2)^2| {:.1e} <= {budget:.1e}, element sum drift {:.1e}",
        (four - two).abs(),
        (elem - row.s[3]).abs() / row.s[3]
    ));
    let mut ratios = report.rows.iter().filter(|r| r.x >= 1000).map(|r| r.ratio4);
    if let (Some(r0), Some(r1)) = (ratios.next(), ratios.next()) {
        let var = (r1 / r0 - 1.0).abs();
        pass &= var < 0.25;
        notes.push(format!("ratio4 {r0:.3e} -> {r1:.3e}, variation {:.0}% (tol 25%)", 100.0 * var));
    }
    for k in [2, 4] {
        let p = rs_proxy(10_000, k, AFE_TOL)?;
        pass &= p.holds();
        notes.push(format!("Holder k={k}: {:.3e} <= {:.3e}", p.lower_bound, p.s_k));
    }
    outcome(pass, notes.join("; "))
}

fn determinism(base: &MomentReport) -> Result<Outcome> {
    let csv = base.to_csv();
    let mut same = Vec::new();
    for w in [4, 8] {
        let cfg = ScanConfig { workers: w, ..base.config.clone() };
        same.push((w, moment_scan(&cfg)?.to_csv() == csv));
    }
    let pass = same.iter().all(|&(_, s)| s);
    let detail = same
        .iter()
        .map(|&(w, s)| format!("1 vs {w} workers {}", if s { "identical" } else { "differ" }))
        .collect::<Vec<_>>()
        .join(", ");
    outcome(pass, detail)
}

fn main() {
    let mut failed = 0;
    let mut report_line = |no: u32, name: &str, t: Instant, r: Result<Outcome>| {
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(o) => {
                failed += !o.pass as u32;
                println!("{} {no:>2} {name}: {} [{secs:.1}s]", if o.pass { "PASS" } else { "FAIL" }, o.detail);
            }
            Err(e) => {
                failed += 1;
                println!("FAIL {no:>2} {name}: error {e} [{secs:.1}s]");
            }
        }
    };
    let t = Instant::now();
    report_line(1, "primitive Gauss sum modulus", t, gauss_modulus());
    let t = Instant::now();
    report_line(2, "prime-power Gauss sums", t, gauss_closed_forms());
    let t = Instant::now();
    report_line(3, "residue symbol oracles", t, symbol_oracles());
    let t = Instant::now();
    report_line(4, "AFE exactness", t, afe_exactness());
    let t = Instant::now();
    report_line(5, "Poisson identities", t, poisson());
    let t = Instant::now();
    report_line(6, "Z factorization", t, z_factorization());
    let t = Instant::now();
    report_line(7, "Z3 local identity", t, z3_local());
    let t = Instant::now();
    report_line(8, "constants", t, constants());
    let t = Instant::now();
    report_line(9, "square-free density", t, density());
    let t = Instant::now();
    let scan = moment_scan(&ScanConfig::default());
    let base = match scan {
        Ok(r) => {
            report_line(10, "moment scan", t, moments(&r));
            Some(r)
        }
        Err(e) => {
            report_line(10, "moment scan", t, Err(e));
            None
        }
    };
    let t = Instant::now();
    match base {
        Some(r) => report_line(11, "determinism", t, determinism(&r)),
        None => report_line(11, "determinism", t, Err(hecke_core::Error::Domain("no base scan".into()))),
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}

use num_complex::Complex64;

use crate::error::{Error, Result};

const TERMS: usize = 64;

/// Sum_{k>=0} (-1)^k a_k by the Cohen-Rodriguez Villegas-Zagier acceleration.
fn alternating<F: Fn(usize) -> Complex64>(a: F) -> Complex64 {
    let n = TERMS as f64;
    let d0 = (3.0 + 8f64.sqrt()).powf(n);
    let d = 0.5 * (d0 + 1.0 / d0);
    let mut b = -1.0;
    let mut c = -d;
    let mut s = Complex64::new(0.0, 0.0);
    for k in 0..TERMS {
        c = b - c;
        s += c * a(k);
        let kf = k as f64;
        b *= (kf + n) * (kf - n) / ((kf + 0.5) * (kf + 1.0));
    }
    s / d
}

/// Dirichlet eta function, Re(s) > 0.
pub fn dirichlet_eta(s: Complex64) -> Complex64 {
    alternating(|k| (-s * ((k + 1) as f64).ln()).exp())
}

/// L(s, chi_{-4}), Re(s) > 0.
pub fn dirichlet_beta(s: Complex64) -> Complex64 {
    alternating(|k| (-s * ((2 * k + 1) as f64).ln()).exp())
}

pub fn zeta(s: Complex64) -> Result<Complex64> {
    let f = 1.0 - Complex64::new(2.0, 0.0).powc(1.0 - s);
    if f.norm() < 1e-300 || s.re <= 0.0 {
        return Err(Error::Domain(format!("zeta at {s}")));
    }
    Ok(dirichlet_eta(s) / f)
}

/// Dedekind zeta function of Q(i).
pub fn zeta_k(s: Complex64) -> Result<Complex64> {
    if s.re <= 0.5 {
        return Err(Error::Domain(format!("zeta_K needs Re(s) > 1/2, got {s}")));
    }
    Ok(zeta(s)? * dirichlet_beta(s))
}

//! Gaussian integers and the arithmetic built on them.

mod arith;
mod factor;
mod residues;
mod sieve;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use arith::{d_k, lambda, mobius, phi, local_product, ArithKind, ArithmeticFunctionTable};
pub use factor::{factor, is_gaussian_prime, PrimaryFactorization};
pub use residues::ResidueSystem;
pub use sieve::{
    gaussian_primes, norm_count, squarefree_odd_iter, squarefree_odd_vec, PrimaryIdeals,
};

/// Largest norm accepted anywhere in the library.
pub const NORM_LIMIT: u64 = 1 << 63;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct GInt {
    pub re: i64,
    pub im: i64,
}

pub const ZERO: GInt = GInt::new(0, 0);
pub const ONE: GInt = GInt::new(1, 0);
pub const I: GInt = GInt::new(0, 1);
pub const ONE_PLUS_I: GInt = GInt::new(1, 1);
/// The four units in the order 1, i, -1, -i.
pub const UNITS: [GInt; 4] = [GInt::new(1, 0), GInt::new(0, 1), GInt::new(-1, 0), GInt::new(0, -1)];

/// Floor of the square root.
pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).map_or(true, |s| s > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|s| s <= n) {
        r += 1;
    }
    r
}

fn narrow(x: i128, what: &'static str) -> Result<i64> {
    i64::try_from(x).map_err(|_| Error::Overflow(what))
}

impl GInt {
    pub const fn new(re: i64, im: i64) -> Self {
        GInt { re, im }
    }

    pub fn from_i128(re: i128, im: i128) -> Result<Self> {
        Ok(GInt::new(narrow(re, "GInt")?, narrow(im, "GInt")?))
    }

    pub fn try_norm(self) -> Result<u64> {
        let n = (self.re as i128).pow(2) + (self.im as i128).pow(2);
        if n > NORM_LIMIT as i128 {
            return Err(Error::Overflow("norm"));
        }
        Ok(n as u64)
    }

    /// Panics if the norm exceeds [`NORM_LIMIT`]; use [`GInt::try_norm`] for untrusted input.
    pub fn norm(self) -> u64 {
        self.try_norm().expect("norm overflow")
    }

    pub fn conj(self) -> Self {
        GInt::new(self.re, -self.im)
    }

    pub fn is_zero(self) -> bool {
        self.re == 0 && self.im == 0
    }

    pub fn is_unit(self) -> bool {
        (self.re.abs() + self.im.abs()) == 1
    }

    /// True when 1+i does not divide `self`.
    pub fn is_odd(self) -> bool {
        (self.re ^ self.im) & 1 == 1
    }

    pub fn mul_i(self) -> Self {
        GInt::new(-self.im, self.re)
    }

    pub fn checked_add(self, o: Self) -> Result<Self> {
        Ok(GInt::new(
            self.re.checked_add(o.re).ok_or(Error::Overflow("add"))?,
            self.im.checked_add(o.im).ok_or(Error::Overflow("add"))?,
        ))
    }

    pub fn checked_sub(self, o: Self) -> Result<Self> {
        Ok(GInt::new(
            self.re.checked_sub(o.re).ok_or(Error::Overflow("sub"))?,
            self.im.checked_sub(o.im).ok_or(Error::Overflow("sub"))?,
        ))
    }

    pub fn checked_mul(self, o: Self) -> Result<Self> {
        let (a, b, c, d) = (self.re as i128, self.im as i128, o.re as i128, o.im as i128);
        GInt::from_i128(a * c - b * d, a * d + b * c)
    }

    pub fn checked_pow(self, mut e: u32) -> Result<Self> {
        let mut acc = ONE;
        let mut base = self;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.checked_mul(base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.checked_mul(base)?;
            }
        }
        Ok(acc)
    }

    pub fn pow(self, e: u32) -> Self {
        self.checked_pow(e).expect("GInt overflow in pow")
    }

    /// Euclidean division with each coordinate of `self / b` rounded to the nearest integer.
    pub fn divrem(self, b: Self) -> Result<(Self, Self)> {
        if b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let nb = b.try_norm()? as i128;
        let (x, y) = (self.re as i128, self.im as i128);
        let (c, d) = (b.re as i128, b.im as i128);
        let num_re = x * c + y * d;
        let num_im = y * c - x * d;
        let round = |t: i128| (2 * t + nb).div_euclid(2 * nb);
        let (qr, qi) = (round(num_re), round(num_im));
        let rr = x - (qr * c - qi * d);
        let ri = y - (qr * d + qi * c);
        Ok((GInt::from_i128(qr, qi)?, GInt::from_i128(rr, ri)?))
    }

    pub fn rem(self, b: Self) -> Result<Self> {
        Ok(self.divrem(b)?.1)
    }

    /// Exact quotient, or `None` when `b` does not divide `self`.
    pub fn div_exact(self, b: Self) -> Option<Self> {
        match self.divrem(b) {
            Ok((q, r)) if r.is_zero() => Some(q),
            _ => None,
        }
    }

    pub fn divides(self, a: Self) -> bool {
        if self.is_zero() {
            return a.is_zero();
        }
        a.div_exact(self).is_some()
    }

    pub fn is_primary(self) -> bool {
        let a = self.re.rem_euclid(4);
        let b = self.im.rem_euclid(4);
        (a == 1 && b == 0) || (a == 3 && b == 2)
    }

    /// Splits an odd `self` as `unit * p` with `p` primary.
    pub fn primary_associate(self) -> Result<(GInt, GInt)> {
        if self.is_zero() {
            return Err(Error::Zero);
        }
        if !self.is_odd() {
            return Err(Error::EvenModulus(self));
        }
        // p = u^{-1} * self, u^{-1} = conj(u)
        for u in UNITS {
            let p = self.checked_mul(u.conj())?;
            if p.is_primary() {
                return Ok((u, p));
            }
        }
        unreachable!("odd element without primary associate")
    }

    /// Strips the largest power of 1+i, returning (e, odd part).
    pub fn split_two(self) -> (u32, GInt) {
        debug_assert!(!self.is_zero());
        let mut z = self;
        let mut e = 0;
        while !z.is_odd() {
            // z / (1+i) = z (1-i) / 2
            let (a, b) = (z.re as i128, z.im as i128);
            z = GInt::new(((a + b) / 2) as i64, ((b - a) / 2) as i64);
            e += 1;
        }
        (e, z)
    }

    /// Normal form of the ideal generated by `self`: (1+i)^e times a primary element.
    pub fn normalize(self) -> Result<GInt> {
        if self.is_zero() {
            return Ok(ZERO);
        }
        let (e, odd) = self.split_two();
        let (_, p) = odd.primary_associate()?;
        ONE_PLUS_I.checked_pow(e)?.checked_mul(p)
    }

    pub fn gcd(self, b: Self) -> Result<GInt> {
        if self.is_zero() && b.is_zero() {
            return Err(Error::Zero);
        }
        let (mut x, mut y) = (self, b);
        while !y.is_zero() {
            let r = x.rem(y)?;
            x = y;
            y = r;
        }
        x.normalize()
    }

    pub fn coprime(self, b: Self) -> bool {
        matches!(self.gcd(b), Ok(g) if g == ONE)
    }

    /// Sort key used for deterministic orderings: (norm, re, im).
    pub fn order_key(self) -> (u64, i64, i64) {
        (self.norm(), self.re, self.im)
    }
}

impl Add for GInt {
    type Output = GInt;
    fn add(self, o: GInt) -> GInt {
        self.checked_add(o).expect("GInt overflow in add")
    }
}

impl Sub for GInt {
    type Output = GInt;
    fn sub(self, o: GInt) -> GInt {
        self.checked_sub(o).expect("GInt overflow in sub")
    }
}

impl Mul for GInt {
    type Output = GInt;
    fn mul(self, o: GInt) -> GInt {
        self.checked_mul(o).expect("GInt overflow in mul")
    }
}

impl Neg for GInt {
    type Output = GInt;
    fn neg(self) -> GInt {
        GInt::new(-self.re, -self.im)
    }
}

impl From<i64> for GInt {
    fn from(a: i64) -> Self {
        GInt::new(a, 0)
    }
}

impl fmt::Display for GInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = (self.re, self.im);
        if b == 0 {
            return write!(f, "{a}");
        }
        let imag = match b {
            1 => "i".to_string(),
            -1 => "-i".to_string(),
            _ => format!("{b}i"),
        };
        if a == 0 {
            write!(f, "{imag}")
        } else if b > 0 {
            write!(f, "{a}+{imag}")
        } else {
            write!(f, "{a}{imag}")
        }
    }
}

impl fmt::Debug for GInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_coeff(s: &str, whole: &str) -> Result<i64> {
    match s {
        "" | "+" => Ok(1),
        "-" => Ok(-1),
        _ => s.parse::<i64>().map_err(|_| Error::Parse(whole.to_string())),
    }
}

impl FromStr for GInt {
    type Err = Error;

    fn from_str(input: &str) -> Result<Self> {
        let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse(input.to_string()));
        }
        let Some(body) = s.strip_suffix('i') else {
            return s
                .parse::<i64>()
                .map(GInt::from)
                .map_err(|_| Error::Parse(input.to_string()));
        };
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(k, _)| k)
            .last();
        match split {
            Some(k) => {
                let re = body[..k]
                    .parse::<i64>()
                    .map_err(|_| Error::Parse(input.to_string()))?;
                Ok(GInt::new(re, parse_coeff(&body[k..], input)?))
            }
            None => Ok(GInt::new(0, parse_coeff(body, input)?)),
        }
    }
}

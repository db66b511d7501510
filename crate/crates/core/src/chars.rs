//! Quadratic residue symbols in Z[i] and the characters chi_{(1+i)^5 d}.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gint::{factor, GInt, PrimaryIdeals, ResidueSystem, ONE, ONE_PLUS_I};

/// (i/n) for primary n.
#[inline]
pub fn symbol_i(n: GInt) -> i8 {
    debug_assert!(n.is_primary());
    if (1 - n.re).rem_euclid(4) == 0 {
        1
    } else {
        -1
    }
}

/// ((1+i)/n) for primary n.
#[inline]
pub fn symbol_one_plus_i(n: GInt) -> i8 {
    debug_assert!(n.is_primary());
    let (a, b) = (n.re as i128, n.im as i128);
    let e = a - b - 1 - b * b;
    assert!(e.rem_euclid(4) == 0, "supplementary exponent not integral for {n}");
    if (e / 4).rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// (u/n) for a unit u and primary n.
#[inline]
pub fn unit_symbol(u: GInt, n: GInt) -> i8 {
    match (u.re, u.im) {
        (1, 0) | (-1, 0) => 1,
        (0, 1) | (0, -1) => symbol_i(n),
        _ => panic!("{u} is not a unit"),
    }
}

/// The quadratic residue symbol (a/n) for odd n.
pub fn residue_symbol(a: GInt, n: GInt) -> Result<i8> {
    if n.is_zero() {
        return Err(Error::Zero);
    }
    if !n.is_odd() {
        return Err(Error::EvenModulus(n));
    }
    let (_, mut n) = n.primary_associate()?;
    let mut a = a.rem(n)?;
    let mut s = 1i8;
    loop {
        if n == ONE {
            return Ok(s);
        }
        if a.is_zero() {
            return Ok(0);
        }
        let (e, odd) = a.split_two();
        if e % 2 == 1 {
            s *= symbol_one_plus_i(n);
        }
        let (u, p) = odd.primary_associate()?;
        s *= unit_symbol(u, n);
        a = n.rem(p)?;
        n = p;
    }
}

fn mod_pow(mut base: GInt, mut e: u64, m: GInt) -> Result<GInt> {
    let mut acc = ONE;
    base = base.rem(m)?;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.checked_mul(base)?.rem(m)?;
        }
        base = base.checked_mul(base)?.rem(m)?;
        e >>= 1;
    }
    Ok(acc)
}

/// (a/p) by the Euler criterion a^{(N(p)-1)/2} mod p, for an odd prime p.
pub fn residue_symbol_euler(a: GInt, p: GInt) -> Result<i8> {
    if p.is_zero() {
        return Err(Error::Zero);
    }
    if !p.is_odd() {
        return Err(Error::EvenModulus(p));
    }
    if !p.is_prime() {
        return Err(Error::NotPrime(p));
    }
    let r = mod_pow(a, (p.norm() - 1) / 2, p)?;
    if r.is_zero() {
        Ok(0)
    } else if p.divides(r - ONE) {
        Ok(1)
    } else if p.divides(r + ONE) {
        Ok(-1)
    } else {
        Err(Error::NotPrime(p))
    }
}

/// The character chi_{(1+i)^5 d} for odd square-free d.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadChar {
    pub d: GInt,
    pub modulus: GInt,
    pub conductor_norm: u64,
    unit: GInt,
    primes: Vec<GInt>,
}

impl QuadChar {
    pub fn new(d: GInt) -> Result<Self> {
        if d.is_zero() {
            return Err(Error::Zero);
        }
        if !d.is_odd() {
            return Err(Error::EvenModulus(d));
        }
        let f = factor(d)?;
        if !f.is_squarefree() {
            return Err(Error::NotSquareFree(d));
        }
        let nd = d.try_norm()?;
        let modulus = ONE_PLUS_I.pow(5).checked_mul(d)?;
        Ok(QuadChar {
            d,
            modulus,
            conductor_norm: nd.checked_mul(32).ok_or(Error::Overflow("conductor"))?,
            unit: f.unit,
            primes: f.primes.iter().map(|&(p, _)| p).collect(),
        })
    }

    /// Unit u with d = u * (primary part).
    pub fn unit(&self) -> GInt {
        self.unit
    }

    /// Primary prime divisors of d.
    pub fn primes(&self) -> &[GInt] {
        &self.primes
    }

    pub fn chi(&self, n: GInt) -> i8 {
        if n.is_zero() || !n.is_odd() {
            return 0;
        }
        residue_symbol(ONE_PLUS_I, n).unwrap() * residue_symbol(self.d, n).unwrap()
    }
}

pub fn chi(c: &QuadChar, n: GInt) -> i8 {
    c.chi(n)
}

/// Symbol table (x/q) over the canonical residues modulo a prime q.
#[derive(Clone, Debug)]
pub struct PrimeSymbolTable {
    pub res: ResidueSystem,
    vals: Vec<i8>,
}

impl PrimeSymbolTable {
    pub fn new(q: GInt) -> Result<Self> {
        let res = ResidueSystem::new(q)?;
        let n = res.size();
        let mut vals = vec![-1i8; n];
        vals[0] = 0;
        for k in 1..n {
            let z = res.rep(k);
            vals[res.index(z * z)] = 1;
        }
        Ok(PrimeSymbolTable { res, vals })
    }

    #[inline]
    pub fn get(&self, x: GInt) -> i8 {
        self.vals[self.res.index(x)]
    }
}

/// Evaluates chi_{(1+i)^5 d} at primary primes using reciprocity against
/// tabulated symbols modulo the primes of d.
#[derive(Clone, Debug)]
pub struct PrimeChiEvaluator {
    unit: GInt,
    tables: Vec<PrimeSymbolTable>,
}

impl PrimeChiEvaluator {
    pub fn new(c: &QuadChar) -> Result<Self> {
        Ok(PrimeChiEvaluator {
            unit: c.unit(),
            tables: c
                .primes()
                .iter()
                .map(|&q| PrimeSymbolTable::new(q))
                .collect::<Result<_>>()?,
        })
    }

    /// chi at a primary prime p.
    #[inline]
    pub fn at_prime(&self, p: GInt) -> i8 {
        let mut s = symbol_one_plus_i(p) * unit_symbol(self.unit, p);
        for t in &self.tables {
            s *= t.get(p);
        }
        s
    }
}

/// chi on every primary element of norm at most `limit`, filled by total
/// multiplicativity from its values at primes.
#[derive(Clone, Debug)]
pub struct ChiTable {
    values: Vec<i8>,
}

impl ChiTable {
    pub fn build(c: &QuadChar, ideals: &PrimaryIdeals, limit: u64) -> Result<Self> {
        let eval = PrimeChiEvaluator::new(c)?;
        let len = ideals.norms().partition_point(|&n| n <= limit);
        let mut values = vec![0i8; len];
        if len > 0 {
            values[0] = 1;
        }
        for i in 1..len {
            values[i] = if ideals.is_prime(i) {
                eval.at_prime(ideals.elem(i))
            } else {
                values[ideals.spf(i)] * values[ideals.cofactor(i)]
            };
        }
        Ok(ChiTable { values })
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Builds the sieved table of chi_{(1+i)^5 d} over primary n with N(n) <= x.
pub fn chi_sieved(c: &QuadChar, x: u64) -> Result<(PrimaryIdeals, ChiTable)> {
    let ideals = PrimaryIdeals::new(x)?;
    let t = ChiTable::build(c, &ideals, x)?;
    Ok((ideals, t))
}

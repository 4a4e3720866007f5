//! Integer primitives: factorization, exact divisors `s || d`, the star
//! product on exact divisors and modular inverses.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Prime factorization of a positive integer, primes strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pub n: u64,
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// Number of distinct prime factors.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    pub fn product(&self) -> u64 {
        self.factors.iter().map(|&(p, k)| p.pow(k)).product()
    }
}

/// An exact divisor `s || d`: `s | d` and `gcd(s, d/s) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ExactDivisor {
    pub d: u64,
    pub s: u64,
}

impl ExactDivisor {
    pub fn new(d: u64, s: u64) -> Result<Self> {
        if is_exact_divisor(s, d) {
            Ok(Self { d, s })
        } else {
            Err(Error::InvalidLevel { d, s })
        }
    }

    /// The complementary exact divisor `d/s`.
    pub fn complement(&self) -> Self {
        Self {
            d: self.d,
            s: self.d / self.s,
        }
    }
}

/// Trial division. `d` in this crate is a polarization degree, so this is plenty.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::NonPositive(0));
    }
    let mut factors = Vec::new();
    let mut rest = n;
    let mut p = 2u64;
    while p.saturating_mul(p) <= rest {
        if rest.is_multiple_of(p) {
            let mut k = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                k += 1;
            }
            factors.push((p, k));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    Ok(Factorization { n, factors })
}

pub fn is_exact_divisor(s: u64, d: u64) -> bool {
    s != 0 && d != 0 && d.is_multiple_of(s) && s.gcd(&(d / s)) == 1
}

/// All `s || d`, sorted ascending. There are `2^omega(d)` of them.
pub fn exact_divisors(d: u64) -> Result<Vec<ExactDivisor>> {
    let f = factorize(d)?;
    // every exact divisor is a product of a subset of the full prime powers
    let powers: Vec<u64> = f.factors.iter().map(|&(p, k)| p.pow(k)).collect();
    let mut out: Vec<u64> = vec![1];
    for q in powers {
        let with_q: Vec<u64> = out.iter().map(|s| s * q).collect();
        out.extend(with_q);
    }
    out.sort_unstable();
    Ok(out.into_iter().map(|s| ExactDivisor { d, s }).collect())
}

/// Number of distinct primes dividing `d`.
pub fn omega(d: u64) -> Result<usize> {
    Ok(factorize(d)?.omega())
}

/// `s * t = s t / gcd(s, t)^2`, the group law on exact divisors of a fixed level.
pub fn star(s: u64, t: u64) -> u64 {
    let g = s.gcd(&t);
    (s / g) * (t / g)
}

/// Least nonnegative inverse of `a` modulo `m`. Modulus 1 yields 0.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Result<BigInt> {
    if !m.is_positive() {
        return Err(Error::NonPositive(m.try_into().unwrap_or(i128::MIN)));
    }
    if m.is_one() {
        return Ok(BigInt::zero());
    }
    let eg = a.extended_gcd(m);
    if !eg.gcd.is_one() {
        return Err(Error::NotInvertible {
            a: a.to_string(),
            m: m.to_string(),
        });
    }
    Ok(eg.x.mod_floor(m))
}

/// Convenience wrapper for machine-size arguments.
pub fn mod_inverse_u64(a: i64, m: u64) -> Result<u64> {
    let inv = mod_inverse(&BigInt::from(a), &BigInt::from(m))?;
    Ok(inv.try_into().expect("inverse is below the modulus"))
}

//! Exact arithmetic in the Atkin-Lehner group `AL_d`.
//!
//! An element of the coset `W_s` (`s || d`) is the real matrix
//!
//! ```text
//!   (1/sqrt(s)) * [[a*s, b], [c*d, e*s]],   a*e*s - b*c*(d/s) = 1
//! ```
//!
//! and is stored as the integer quintuple `(s, a, b, c, e)` together with its
//! level `d`. No irrational number is ever stored; `W_1` is `Gamma_0(d)` and
//! the Fricke group is `W_1 + W_d`. Elements live in `PSL_2(R)`, so the
//! quadruple is kept in a canonical sign: the first nonzero entry in the
//! order `(a, c, b, e)` is positive.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{is_exact_divisor, mod_inverse, star};
use crate::error::{Error, Result};

/// Label of the coset `W_s` inside `AL_d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CosetLabel {
    pub d: u64,
    pub s: u64,
}

impl CosetLabel {
    pub fn new(d: u64, s: u64) -> Result<Self> {
        if !is_exact_divisor(s, d) {
            return Err(Error::InvalidLevel { d, s });
        }
        Ok(Self { d, s })
    }

    pub fn is_fricke(&self) -> bool {
        self.s == 1 || self.s == self.d
    }

    /// The coset of `Fr_d` containing `W_s`, named by its smaller member `min(s, d/s)`.
    pub fn fricke_class(&self) -> u64 {
        self.s.min(self.d / self.s)
    }
}

/// An element of `W_s ⊂ AL_d` in quintuple form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlElement {
    d: u64,
    s: u64,
    a: BigInt,
    b: BigInt,
    c: BigInt,
    e: BigInt,
}

fn determinant(s: u64, m: u64, a: &BigInt, b: &BigInt, c: &BigInt, e: &BigInt) -> BigInt {
    a * e * BigInt::from(s) - b * c * BigInt::from(m)
}

impl AlElement {
    /// Validating constructor. The tuple is sign-normalized.
    pub fn from_tuple(
        d: u64,
        s: u64,
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
        e: impl Into<BigInt>,
    ) -> Result<Self> {
        let (a, b, c, e) = (a.into(), b.into(), c.into(), e.into());
        if !is_exact_divisor(s, d) {
            return Err(Error::InvalidLevel { d, s });
        }
        let det = determinant(s, d / s, &a, &b, &c, &e);
        if !det.is_one() {
            return Err(Error::InvalidDeterminant(det.to_string()));
        }
        Ok(Self { d, s, a, b, c, e }.normalized())
    }

    pub fn identity(d: u64) -> Self {
        Self {
            d,
            s: 1,
            a: BigInt::one(),
            b: BigInt::zero(),
            c: BigInt::zero(),
            e: BigInt::one(),
        }
    }

    /// The translation `z -> z + k`, an element of `Gamma_0(d)`.
    pub fn translation(d: u64, k: impl Into<BigInt>) -> Self {
        Self {
            b: k.into(),
            ..Self::identity(d)
        }
        .normalized()
    }

    fn normalized(mut self) -> Self {
        let first = [&self.a, &self.c, &self.b, &self.e]
            .into_iter()
            .find(|x| !x.is_zero())
            .expect("determinant 1 forbids the zero tuple");
        if first.is_negative() {
            self.a = -self.a;
            self.b = -self.b;
            self.c = -self.c;
            self.e = -self.e;
        }
        self
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    /// The exact divisor `s` with `self ∈ W_s`.
    pub fn s(&self) -> u64 {
        self.s
    }

    pub fn level(&self) -> CosetLabel {
        CosetLabel {
            d: self.d,
            s: self.s,
        }
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }
    pub fn b(&self) -> &BigInt {
        &self.b
    }
    pub fn c(&self) -> &BigInt {
        &self.c
    }
    pub fn e(&self) -> &BigInt {
        &self.e
    }

    pub fn tuple(&self) -> [&BigInt; 4] {
        [&self.a, &self.b, &self.c, &self.e]
    }

    /// `[[a*s, b], [c*d, e*s]]`, i.e. `sqrt(s)` times the real matrix.
    pub fn scaled_matrix(&self) -> [[BigInt; 2]; 2] {
        let s = BigInt::from(self.s);
        [
            [&self.a * &s, self.b.clone()],
            [&self.c * BigInt::from(self.d), &self.e * &s],
        ]
    }

    pub fn is_fricke(&self) -> bool {
        self.level().is_fricke()
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.d)
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.d != rhs.d {
            return Err(Error::LevelMismatch(self.d, rhs.d));
        }
        let d = self.d;
        let [[p11, p12], [p21, p22]] = self.scaled_matrix();
        let [[q11, q12], [q21, q22]] = rhs.scaled_matrix();
        let m11 = &p11 * &q11 + &p12 * &q21;
        let m12 = &p11 * &q12 + &p12 * &q22;
        let m21 = &p21 * &q11 + &p22 * &q21;
        let m22 = &p21 * &q12 + &p22 * &q22;

        // sqrt(s1) sqrt(s2) = g sqrt(t)
        let g = BigInt::from(self.s.gcd(&rhs.s));
        let t = star(self.s, rhs.s);
        let tb = BigInt::from(t);
        let db = BigInt::from(d);
        let exact = |x: &BigInt, by: &BigInt, what: &str| -> Result<BigInt> {
            let (q, r) = x.div_rem(by);
            if r.is_zero() {
                Ok(q)
            } else {
                Err(Error::InternalClosureViolation(format!(
                    "{what}: {x} not divisible by {by} (d={d}, s1={}, s2={})",
                    self.s, rhs.s
                )))
            }
        };
        let a = exact(&m11, &(&g * &tb), "a")?;
        let b = exact(&m12, &g, "b")?;
        let c = exact(&m21, &(&g * &db), "c")?;
        let e = exact(&m22, &(&g * &tb), "e")?;
        let out = Self {
            d,
            s: t,
            a,
            b,
            c,
            e,
        }
        .normalized();
        let det = determinant(t, d / t, &out.a, &out.b, &out.c, &out.e);
        if !det.is_one() {
            return Err(Error::InternalClosureViolation(format!(
                "product determinant {det}"
            )));
        }
        Ok(out)
    }

    /// Inverse in the same coset: the adjugate `(e, -b, -c, a)`.
    pub fn inverse(&self) -> Self {
        Self {
            d: self.d,
            s: self.s,
            a: self.e.clone(),
            b: -&self.b,
            c: -&self.c,
            e: self.a.clone(),
        }
        .normalized()
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::identity(self.d);
        for _ in 0..k {
            acc = acc.mul(self).expect("same level");
        }
        acc
    }
}

impl fmt::Display for AlElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "W_{}[d={}]({}, {}, {}, {})",
            self.s, self.d, self.a, self.b, self.c, self.e
        )
    }
}

/// Wire form: `{"d": 6, "s": 2, "abce": ["1", "1", "1", "2"]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlElementJson {
    pub d: u64,
    pub s: u64,
    pub abce: [String; 4],
}

impl From<&AlElement> for AlElementJson {
    fn from(w: &AlElement) -> Self {
        Self {
            d: w.d,
            s: w.s,
            abce: w.tuple().map(|x| x.to_string()),
        }
    }
}

impl TryFrom<AlElementJson> for AlElement {
    type Error = String;

    fn try_from(j: AlElementJson) -> std::result::Result<Self, String> {
        let mut parsed = Vec::with_capacity(4);
        for x in &j.abce {
            parsed.push(
                x.trim()
                    .parse::<BigInt>()
                    .map_err(|e| format!("bad integer {x:?}: {e}"))?,
            );
        }
        let [a, b, c, e]: [BigInt; 4] = parsed.try_into().expect("four entries");
        AlElement::from_tuple(j.d, j.s, a, b, c, e).map_err(|e| e.to_string())
    }
}

impl Serialize for AlElement {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        AlElementJson::from(self).serialize(ser)
    }
}

impl<'de> Deserialize<'de> for AlElement {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let j = AlElementJson::deserialize(de)?;
        AlElement::try_from(j).map_err(serde::de::Error::custom)
    }
}

/// Default entry bound for the random generators.
pub const DEFAULT_BOUND: i64 = 10;

/// Random element of `Gamma_0(d) = W_1`.
///
/// Samples the lower-left multiplier `c` in `[-bound, bound]`, an `a` coprime
/// to `c*d`, completes to determinant 1 by the extended gcd and then shakes
/// the result with translations on both sides.
pub fn random_gamma0<R: Rng + ?Sized>(d: u64, rng: &mut R, bound: i64) -> AlElement {
    let bound = bound.max(0);
    let c: i64 = rng.gen_range(-bound..=bound);
    let cd = BigInt::from(c) * BigInt::from(d);
    let core = if c == 0 {
        AlElement::identity(d)
    } else {
        loop {
            let a = BigInt::from(rng.gen_range(-bound..=bound));
            let eg = a.extended_gcd(&cd);
            if eg.gcd.is_one() {
                // a*x + cd*y = 1  ->  e = x, b = -y
                break AlElement {
                    d,
                    s: 1,
                    a,
                    b: -eg.y,
                    c: BigInt::from(c),
                    e: eg.x,
                }
                .normalized();
            }
        }
    };
    let left = AlElement::translation(d, rng.gen_range(-bound..=bound));
    let right = AlElement::translation(d, rng.gen_range(-bound..=bound));
    left.mul(&core)
        .and_then(|x| x.mul(&right))
        .expect("Gamma_0 is closed")
}

/// A canonical element of `W_s`.
///
/// `s = 1` gives the identity and `s = d` the Fricke involution `z -> -1/(dz)`.
/// Otherwise `a = c = 1` and `e` is the least positive inverse of `s` modulo
/// `d/s`, which forces `b = (e*s - 1)/(d/s) >= 0`.
pub fn base_element(d: u64, s: u64) -> Result<AlElement> {
    if !is_exact_divisor(s, d) {
        return Err(Error::InvalidLevel { d, s });
    }
    if s == 1 {
        return Ok(AlElement::identity(d));
    }
    if s == d {
        return AlElement::from_tuple(d, d, 0, -1, 1, 0);
    }
    let m = BigInt::from(d / s);
    let sb = BigInt::from(s);
    let e = mod_inverse(&sb, &m)?;
    let b = (&e * &sb - 1) / &m;
    AlElement::from_tuple(d, s, 1, b, 1, e)
}

/// Random element of `W_s`: `g1 * base_element(d, s) * g2` with `g1, g2` random in `Gamma_0(d)`.
pub fn random_al<R: Rng + ?Sized>(d: u64, s: u64, rng: &mut R, bound: i64) -> Result<AlElement> {
    let base = base_element(d, s)?;
    if s == 1 {
        return Ok(random_gamma0(d, rng, bound));
    }
    let g1 = random_gamma0(d, rng, bound);
    let g2 = random_gamma0(d, rng, bound);
    g1.mul(&base)?.mul(&g2)
}

/// `[AL_d : Fr_d]`, counted as the orbits of `s -> s * d` on the coset labels.
pub fn fricke_index(d: u64) -> Result<usize> {
    let mut classes: Vec<(u64, u64)> = crate::arith::exact_divisors(d)?
        .iter()
        .map(|e| {
            let partner = star(e.s, d);
            (e.s.min(partner), e.s.max(partner))
        })
        .collect();
    classes.sort_unstable();
    classes.dedup();
    Ok(classes.len())
}

//! Mukai vectors, the Fourier-Mukai partner census and the numerical shadow
//! of the Fourier-Mukai groupoid.
//!
//! Objects of the groupoid are the partners `M_L(r + L + d/r)` labelled by
//! `P_d = {r || d} / (r ~ d/r)`; a morphism is recorded through its image in
//! `AL_d`. A morphism `Y1 -> Y2` with image in `W_σ` satisfies
//! `class(Y2) = class(Y1) * σ` in `AL_d / Fr_d`, so the image is Fricke
//! exactly when source and target agree.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{exact_divisors, is_exact_divisor, mod_inverse, star};
use crate::error::{Error, Result};
use crate::lattice::LatticeVector;
use crate::modgroup::AlElement;

/// `r ⊕ nL ⊕ s` in the numerical Grothendieck group of a degree `2d` K3.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MukaiVector {
    pub d: u64,
    pub r: BigInt,
    pub n: BigInt,
    pub s: BigInt,
}

impl MukaiVector {
    pub fn new(d: u64, r: impl Into<BigInt>, n: impl Into<BigInt>, s: impl Into<BigInt>) -> Self {
        Self {
            d,
            r: r.into(),
            n: n.into(),
            s: s.into(),
        }
    }

    /// The class of a point, `0 ⊕ 0 ⊕ 1`.
    pub fn point(d: u64) -> Self {
        Self::new(d, 0, 0, 1)
    }

    /// `<v, v> = 2d n² - 2rs`.
    pub fn self_pairing(&self) -> BigInt {
        BigInt::from(2 * self.d) * &self.n * &self.n - BigInt::from(2) * &self.r * &self.s
    }

    pub fn pairing(&self, other: &Self) -> Result<BigInt> {
        if self.d != other.d {
            return Err(Error::LevelMismatch(self.d, other.d));
        }
        Ok(BigInt::from(2 * self.d) * &self.n * &other.n - &self.r * &other.s - &self.s * &other.r)
    }

    pub fn is_isotropic(&self) -> bool {
        self.self_pairing().is_zero()
    }

    pub fn to_lattice(&self) -> LatticeVector {
        use num_rational::BigRational;
        let q = |x: &BigInt| BigRational::from_integer(x.clone());
        LatticeVector::new(self.d, [q(&self.r), q(&self.n), q(&self.s)])
    }
}

/// A Fourier-Mukai partner `M_L(r ⊕ L ⊕ d/r)`, labelled by the smaller of `r`, `d/r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PartnerLabel {
    d: u64,
    r: u64,
}

impl PartnerLabel {
    /// Canonical label of the class of `r || d`.
    pub fn new(d: u64, r: u64) -> Result<Self> {
        if !is_exact_divisor(r, d) {
            return Err(Error::InvalidLevel { d, s: r });
        }
        Ok(Self { d, r: r.min(d / r) })
    }

    /// `X` itself, `M_L(1 ⊕ L ⊕ d)`.
    pub fn base(d: u64) -> Self {
        Self { d, r: 1 }
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn moduli(&self) -> String {
        format!("M_L({}+L+{})", self.r, self.d / self.r)
    }

    /// `gcd(r, L², s) = 1`, the condition for the moduli space to be fine.
    pub fn is_fine(&self) -> bool {
        let s = self.d / self.r;
        self.r.gcd(&(2 * self.d)).gcd(&s) == 1
    }

    /// The label reached through an image in `W_σ`.
    pub fn shifted(&self, sigma: u64) -> Self {
        Self::new(self.d, star(self.r, sigma)).expect("star preserves exact divisors")
    }
}

impl fmt::Display for PartnerLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.moduli())
    }
}

#[derive(Serialize, Deserialize)]
struct PartnerLabelJson {
    r: u64,
    moduli: String,
}

/// Fourier-Mukai partners of a degree `2d` K3 surface of Picard rank one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartnerCensus {
    pub d: u64,
    pub labels: Vec<PartnerLabel>,
    pub fm_number: usize,
}

#[derive(Serialize, Deserialize)]
struct PartnerCensusJson {
    d: u64,
    labels: Vec<PartnerLabelJson>,
    fm_number: usize,
}

impl Serialize for PartnerCensus {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        PartnerCensusJson {
            d: self.d,
            labels: self
                .labels
                .iter()
                .map(|l| PartnerLabelJson {
                    r: l.r,
                    moduli: l.moduli(),
                })
                .collect(),
            fm_number: self.fm_number,
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for PartnerCensus {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = PartnerCensusJson::deserialize(de)?;
        let mut labels = Vec::with_capacity(j.labels.len());
        for l in j.labels {
            let label = PartnerLabel::new(j.d, l.r).map_err(D::Error::custom)?;
            if label.r != l.r || label.moduli() != l.moduli {
                return Err(D::Error::custom(format!(
                    "non-canonical label {}",
                    l.moduli
                )));
            }
            labels.push(label);
        }
        if labels.len() != j.fm_number {
            return Err(D::Error::custom("fm_number disagrees with the label list"));
        }
        Ok(PartnerCensus {
            d: j.d,
            labels,
            fm_number: j.fm_number,
        })
    }
}

pub fn partner_census(d: u64) -> Result<PartnerCensus> {
    let labels: Vec<PartnerLabel> = exact_divisors(d)?
        .into_iter()
        .filter(|e| e.s * e.s <= d)
        .map(|e| PartnerLabel { d, r: e.s })
        .collect();
    Ok(PartnerCensus {
        d,
        fm_number: labels.len(),
        labels,
    })
}

/// `r ⊕ L ⊕ d/r`.
pub fn isotropic_vector(d: u64, r: u64) -> Result<MukaiVector> {
    if !is_exact_divisor(r, d) {
        return Err(Error::InvalidLevel { d, s: r });
    }
    Ok(MukaiVector::new(d, r, 1, d / r))
}

/// Least nonnegative `n` with `(d/r) n ≡ -1 (mod r)`, equivalently
/// `(r + dn) / r²` integral.
pub fn derive_n_y(d: u64, r: u64) -> Result<BigInt> {
    if !is_exact_divisor(r, d) {
        return Err(Error::InvalidLevel { d, s: r });
    }
    let rb = BigInt::from(r);
    let inv = mod_inverse(&BigInt::from(d / r), &rb)?;
    Ok((-inv).mod_floor(&rb))
}

/// The numerical shadow of a Fourier-Mukai transformation `Φ: D(Y) -> D(Y')`.
///
/// `r` is the common rank of `v(Φ(O_y))` and `v(Φ⁻¹(O_x))`; `n_x`, `n_y`
/// are their `L`-coefficients. `r = 0` is the translation case.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InducedTransform {
    #[serde(with = "label_serde")]
    pub source: PartnerLabel,
    #[serde(with = "label_serde")]
    pub target: PartnerLabel,
    pub image: AlElement,
    #[serde(with = "bigint_string")]
    pub r: BigInt,
    #[serde(with = "bigint_string")]
    pub n_y: BigInt,
    #[serde(with = "bigint_string")]
    pub n_x: BigInt,
}

mod label_serde {
    use super::*;

    pub fn serialize<S: serde::Serializer>(
        l: &PartnerLabel,
        ser: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        PartnerLabelJson {
            r: l.r,
            moduli: l.moduli(),
        }
        .serialize(ser)
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(
        de: D,
    ) -> std::result::Result<PartnerLabel, D::Error> {
        use serde::de::Error as _;
        let j = PartnerLabelJson::deserialize(de)?;
        let d = j
            .moduli
            .trim_start_matches("M_L(")
            .trim_end_matches(')')
            .split("+L+")
            .map(|x| x.parse::<u64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(D::Error::custom)?;
        match d.as_slice() {
            [r, s] if *r == j.r => PartnerLabel::new(r * s, j.r).map_err(D::Error::custom),
            _ => Err(D::Error::custom(format!("bad moduli label {}", j.moduli))),
        }
    }
}

mod bigint_string {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigInt, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<BigInt, D::Error> {
        String::deserialize(de)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

impl InducedTransform {
    /// The morphism out of `source` whose image is `image`.
    ///
    /// The target is fixed by the coset bookkeeping, and `r, n_x, n_y` are
    /// read off the third columns of `R(image)` and `R(image⁻¹)`:
    /// `(c² d/s, ac, a² s)` and `(c² d/s, -ec, e² s)`.
    pub fn from_image(source: PartnerLabel, image: AlElement) -> Result<Self> {
        if source.d != image.d() {
            return Err(Error::LevelMismatch(source.d, image.d()));
        }
        let [a, _, c, e] = image.tuple();
        let r = c * c * BigInt::from(image.d() / image.s());
        let n_x = a * c;
        let n_y = -(e * c);
        Ok(Self {
            target: source.shifted(image.s()),
            source,
            image,
            r,
            n_y,
            n_x,
        })
    }

    /// Tensoring by `mL` on the partner `label`, the rank zero case `z -> z + m`.
    pub fn translation(label: PartnerLabel, m: impl Into<BigInt>) -> Self {
        Self::from_image(label, AlElement::translation(label.d, m)).expect("same level")
    }

    /// An autoequivalence of `label` with the given Fricke image.
    pub fn autoequivalence(label: PartnerLabel, image: AlElement) -> Result<Self> {
        if !image.is_fricke() {
            return Err(Error::EndpointMismatch(format!(
                "{image} is not Fricke, so it cannot be an autoequivalence"
            )));
        }
        Self::from_image(label, image)
    }

    pub fn d(&self) -> u64 {
        self.image.d()
    }

    pub fn inverse(&self) -> Self {
        Self::from_image(self.target, self.image.inverse()).expect("same level")
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target && self.image.is_identity()
    }
}

/// The transform `Φ_E: D(M_L(r ⊕ L ⊕ d/r)) -> D(X)` given by the universal family.
///
/// With `s = d/r` and `n = derive_n_y(d, r)` its image is
///
/// ```text
///   [[ sqrt(s),      -(r + dn)/r² / sqrt(s)],
///    [ r sqrt(s),    -n sqrt(s)            ]]
/// ```
///
/// i.e. the tuple `(1, -(r+dn)/r², 1, -n)` in `W_s`. `n_x = 1` because the
/// universal family restricts to sheaves with Mukai vector `r ⊕ L ⊕ s`.
pub fn induced_transform(d: u64, r: u64) -> Result<InducedTransform> {
    let n = derive_n_y(d, r)?;
    let s = d / r;
    let rb = BigInt::from(r);
    let numer = &rb + BigInt::from(d) * &n;
    let denom = &rb * &rb;
    let (b, rem) = numer.div_rem(&denom);
    if !rem.is_zero() {
        return Err(Error::InternalClosureViolation(format!(
            "(r + dn)/r^2 = {numer}/{denom} is not integral"
        )));
    }
    let image = AlElement::from_tuple(d, s, 1, -b, 1, -&n)?;
    let source = PartnerLabel::new(d, r)?;
    let target = source.shifted(s);
    debug_assert_eq!(target, PartnerLabel::base(d));
    Ok(InducedTransform {
        source,
        target,
        image,
        r: rb,
        n_y: n,
        n_x: BigInt::from(1),
    })
}

/// Source and target are isomorphic iff the image is Fricke.
pub fn same_partner(t: &InducedTransform) -> bool {
    t.image.is_fricke()
}

/// `t1 ∘ t2`, with `t2` applied first.
pub fn compose(t1: &InducedTransform, t2: &InducedTransform) -> Result<InducedTransform> {
    if t1.d() != t2.d() {
        return Err(Error::LevelMismatch(t1.d(), t2.d()));
    }
    if t1.source != t2.target {
        return Err(Error::EndpointMismatch(format!(
            "cannot compose {} -> {} after {} -> {}",
            t1.source, t1.target, t2.source, t2.target
        )));
    }
    let out = InducedTransform::from_image(t2.source, t1.image.mul(&t2.image)?)?;
    if out.target != t1.target {
        return Err(Error::EndpointMismatch(format!(
            "coset bookkeeping sends {} to {}, expected {}",
            out.source, out.target, t1.target
        )));
    }
    Ok(out)
}

/// `|r|` as used by the half plane formula; `None` for the translation case.
pub fn rank_abs(t: &InducedTransform) -> Option<BigInt> {
    (!t.r.is_zero()).then(|| t.r.abs())
}

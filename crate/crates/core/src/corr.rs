//! The correspondence between `AL_d` and `O^+(N_d)`.
//!
//! `represent` is the symmetric-square map `PSL_2(R) -> SO^+(N_d)`,
//!
//! ```text
//!   [[α, β], [γ, δ]]  ->  [[δ²,   2γδ,     γ²/d],
//!                          [βδ,   αδ+βγ,   αγ/d],
//!                          [dβ²,  2dαβ,    α²  ]]
//! ```
//!
//! evaluated at `(α, β, γ, δ) = (a√s, b/√s, c(d/s)√s, e√s)`. Every `√s`
//! cancels, so the entries are the integer expressions below. `descend` is
//! its inverse on `O^+(N_d) / ±1`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arith::exact_divisors;
use crate::error::{Error, Result};
use crate::lattice::{discriminant_unit, is_isometry, is_orientation_preserving, Isometry, Mat3};
use crate::modgroup::{random_al, AlElement, CosetLabel, DEFAULT_BOUND};

/// `R(w)` as an integral 3x3 matrix.
pub fn represent(w: &AlElement) -> Result<Isometry> {
    let d = BigInt::from(w.d());
    let s = BigInt::from(w.s());
    let m = BigInt::from(w.d() / w.s());
    let [a, b, c, e] = w.tuple();
    let two = BigInt::from(2);

    let db2 = &d * b * b;
    let (bottom_left, rem) = db2.div_rem(&s);
    if !rem.is_zero() {
        return Err(Error::IntegralityViolation(format!(
            "d*b^2/s = {db2}/{s} for {w}"
        )));
    }
    let rows = [
        [e * e * &s, &two * c * e * &d, c * c * &m],
        [b * e, a * e * &s + b * c * &m, a * c],
        [bottom_left, &two * &d * a * b, a * a * &s],
    ];
    let g = Isometry::new(w.d(), Mat3::from_integers(rows));
    debug_assert!(is_isometry(&g), "R({w}) is not an isometry");
    Ok(g)
}

fn exact_sqrt(x: &BigInt) -> Option<BigInt> {
    if x.is_negative() {
        return None;
    }
    let r = x.sqrt();
    (&r * &r == *x).then_some(r)
}

fn exact_div(x: &BigInt, by: &BigInt) -> Option<BigInt> {
    let (q, r) = x.div_rem(by);
    r.is_zero().then_some(q)
}

/// Recovers the unique `w` with `R(w) = ±g`.
///
/// The sign is fixed by passing to the determinant `+1` representative.
/// Each candidate level `s || d` is tested in turn: the diagonal corners give
/// `a² s`, `e² s`, the off corners `c² d/s` and `d b²/s`, and the sign pattern
/// is settled by comparing `R` of each candidate against `g` exactly.
pub fn descend(g: &Isometry) -> Result<AlElement> {
    if !g.is_integral() {
        return Err(Error::NotInImage("matrix is not integral".into()));
    }
    if !is_isometry(g) {
        return Err(Error::NotInImage("matrix is not an isometry of N_d".into()));
    }
    let target = if g.det().is_negative() {
        g.neg()
    } else {
        g.clone()
    };
    let d = target.d;
    let entry = |i: usize, j: usize| target.m.0[i][j].to_integer();
    let db = BigInt::from(d);

    for level in exact_divisors(d).map_err(|e| Error::NotInImage(e.to_string()))? {
        let s = BigInt::from(level.s);
        let m = BigInt::from(d / level.s);
        let mags = (|| {
            let a = exact_sqrt(&exact_div(&entry(2, 2), &s)?)?;
            let e = exact_sqrt(&exact_div(&entry(0, 0), &s)?)?;
            let c = exact_sqrt(&exact_div(&entry(0, 2), &m)?)?;
            let b = exact_sqrt(&exact_div(&(entry(2, 0) * &s), &db)?)?;
            Some((a, b, c, e))
        })();
        let Some((a, b, c, e)) = mags else { continue };
        // every pairwise product of (a, b, c, e) appears in R, up to positive factors:
        // ab ~ (3,2), ac = (2,3), ae ~ m22 + 1, bc ~ m22 - 1, be = (2,1), ce ~ (1,2)
        let mid = entry(1, 1);
        let sign_of_product = |x: usize, y: usize| -> BigInt {
            let p = match (x.min(y), x.max(y)) {
                (0, 1) => entry(2, 1),
                (0, 2) => entry(1, 2),
                (0, 3) => &mid + 1,
                (1, 2) => &mid - 1,
                (1, 3) => entry(1, 0),
                _ => entry(0, 1),
            };
            p.signum()
        };
        let mags = [a, b, c, e];
        // first nonzero in the order (a, c, b, e) is the positive pivot
        let Some(pivot) = [0usize, 2, 1, 3].into_iter().find(|&i| !mags[i].is_zero()) else {
            continue;
        };
        let signed: Vec<BigInt> = (0..4)
            .map(|i| {
                if i == pivot {
                    mags[i].clone()
                } else {
                    &mags[i] * sign_of_product(pivot, i)
                }
            })
            .collect();
        let [a, b, c, e]: [BigInt; 4] = signed.try_into().expect("four entries");
        let Ok(w) = AlElement::from_tuple(d, level.s, a, b, c, e) else {
            continue;
        };
        if represent(&w)? == target {
            return Ok(w);
        }
    }
    Err(Error::NotInImage(format!(
        "no Atkin-Lehner element of level {d} maps to {}",
        g.m
    )))
}

/// The coset `W_s` of `q(g)`.
pub fn classify_coset(g: &Isometry) -> Result<CosetLabel> {
    Ok(descend(g)?.level())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub check: String,
    pub input: serde_json::Value,
}

/// Outcome of sampling both directions of the correspondence at one level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrespondenceReport {
    pub d: u64,
    pub samples_per_coset: usize,
    pub checked: usize,
    pub failures: Vec<Failure>,
}

impl CorrespondenceReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn merge(mut self, other: CorrespondenceReport) -> Self {
        self.checked += other.checked;
        self.failures.extend(other.failures);
        self
    }
}

/// Runs the per-sample checks on a claimed pair `g = R(w)`; returns the name
/// of the first check that fails.
pub fn audit_sample(w: &AlElement, g: &Isometry) -> Option<&'static str> {
    if !g.is_integral() {
        return Some("integral");
    }
    if !is_isometry(g) {
        return Some("isometry");
    }
    if !matches!(is_orientation_preserving(g), Ok(true)) {
        return Some("orientation");
    }
    match discriminant_unit(g) {
        Ok(u) if u.is_plus_minus_one() == w.is_fricke() => {}
        _ => return Some("fricke_criterion"),
    }
    match descend(g) {
        Ok(back) if back == *w => None,
        _ => Some("round_trip"),
    }
}

pub fn record(report: &mut CorrespondenceReport, w: &AlElement, g: &Isometry) {
    report.checked += 1;
    if let Some(check) = audit_sample(w, g) {
        report.failures.push(Failure {
            check: check.to_string(),
            input: serde_json::json!({ "element": w, "matrix": g }),
        });
    }
}

/// Samples `samples_per_coset` random elements from every `W_s` and certifies
/// that `R` lands in `O^+(N_d)`, that `q ∘ R` is the identity, and that the
/// discriminant action is `±1` exactly on the Fricke cosets.
pub fn verify_correspondence<R: Rng + ?Sized>(
    d: u64,
    samples_per_coset: usize,
    rng: &mut R,
) -> CorrespondenceReport {
    let mut report = CorrespondenceReport {
        d,
        samples_per_coset,
        checked: 0,
        failures: Vec::new(),
    };
    let levels = match exact_divisors(d) {
        Ok(l) => l,
        Err(e) => {
            report.failures.push(Failure {
                check: "level".into(),
                input: serde_json::json!({ "d": d, "error": e.to_string() }),
            });
            return report;
        }
    };
    for level in levels {
        for _ in 0..samples_per_coset {
            let w = random_al(d, level.s, rng, DEFAULT_BOUND).expect("s is an exact divisor");
            match represent(&w) {
                Ok(g) => record(&mut report, &w, &g),
                Err(e) => {
                    report.checked += 1;
                    report.failures.push(Failure {
                        check: "represent".into(),
                        input: serde_json::json!({ "element": w, "error": e.to_string() }),
                    });
                }
            }
        }
    }
    report
}

//! Floating-point cross-checks on the upper half plane.
//!
//! Everything here is binary64. The exact modules decide membership and
//! cosets; this module only confirms that the 2x2 and 3x3 pictures agree
//! through the tube domain `z -> [exp(zL)] = [(1, z, d z²)]`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

use crate::corr::represent;
use crate::error::{Error, Result};
use crate::fmcalc::MukaiVector;
use crate::lattice::Isometry;
use crate::modgroup::AlElement;

/// Local arithmetic tolerance.
pub const LOCAL_TOL: f64 = 1e-12;
/// Tolerance for composed pipelines.
pub const PIPELINE_TOL: f64 = 1e-9;

/// `z = u + iv` with `v > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlanePoint {
    pub u: f64,
    pub v: f64,
}

impl HalfPlanePoint {
    pub fn new(u: f64, v: f64) -> Result<Self> {
        if v.is_nan() || v <= 0.0 || !u.is_finite() || !v.is_finite() {
            return Err(Error::NotInUpperHalfPlane(v));
        }
        Ok(Self { u, v })
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        Self::new(z.re, z.im)
    }

    pub fn z(&self) -> Complex64 {
        Complex64::new(self.u, self.v)
    }
}

/// `exp(zL) = 1 + zL + z²L²/2` in coordinates `(e0, l, e4)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TubeVector {
    pub d: u64,
    pub components: [Complex64; 3],
}

/// The Mukai pairing extended complex-bilinearly.
pub fn complex_pairing(d: u64, x: &[Complex64; 3], y: &[Complex64; 3]) -> Complex64 {
    x[1] * y[1] * (2 * d) as f64 - x[0] * y[2] - x[2] * y[0]
}

impl TubeVector {
    pub fn self_pairing(&self) -> Complex64 {
        complex_pairing(self.d, &self.components, &self.components)
    }

    /// `<x, x̄>`, real and positive on the tube domain.
    pub fn hermitian_norm(&self) -> f64 {
        let conj = self.components.map(|c| c.conj());
        complex_pairing(self.d, &self.components, &conj).re
    }
}

pub fn embed(z: HalfPlanePoint, d: u64) -> Result<TubeVector> {
    if z.v.is_nan() || z.v <= 0.0 {
        return Err(Error::NotInUpperHalfPlane(z.v));
    }
    let z = z.z();
    Ok(TubeVector {
        d,
        components: [Complex64::new(1.0, 0.0), z, z * z * d as f64],
    })
}

fn to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// The real matrix `(1/√s) [[a s, b], [c d, e s]]`.
pub fn real_matrix(w: &AlElement) -> [[f64; 2]; 2] {
    let root = (w.s() as f64).sqrt();
    let [a, b, c, e] = w.tuple().map(to_f64);
    [[a * root, b / root], [c * w.d() as f64 / root, e * root]]
}

pub fn mobius(w: &AlElement, z: HalfPlanePoint) -> Result<HalfPlanePoint> {
    let [[alpha, beta], [gamma, delta]] = real_matrix(w);
    let z = z.z();
    let den = z * gamma + delta;
    if den.is_zero() || !den.norm().is_finite() {
        return Err(Error::NumericalPole);
    }
    // det = 1, so Im(wz) = v / |γz + δ|² with no cancellation
    let norm = den.norm_sqr();
    let re = ((z * alpha + beta) * den.conj()).re / norm;
    HalfPlanePoint::new(re, z.im / norm).map_err(|_| Error::NumericalPole)
}

/// `z -> (1/(d|r|)) * (-1/(z - n_y/r)) + n_x/r`, the action of a transform
/// with `v(Φ(O_y)) = r ⊕ n_x L ⊕ *` and `v(Φ⁻¹(O_x)) = r ⊕ n_y L ⊕ *`.
pub fn mukai_action(
    d: u64,
    r: &BigInt,
    n_y: &BigInt,
    n_x: &BigInt,
    z: HalfPlanePoint,
) -> Result<HalfPlanePoint> {
    if r.is_zero() {
        return Err(Error::ZeroRank);
    }
    let rf = to_f64(r);
    let shifted = z.z() - to_f64(n_y) / rf;
    if shifted.is_zero() {
        return Err(Error::NumericalPole);
    }
    let out = -1.0 / (shifted * (d as f64 * rf.abs())) + to_f64(n_x) / rf;
    HalfPlanePoint::from_complex(out).map_err(|_| Error::NumericalPole)
}

/// `Z_(β,ω)(v) = <exp(β + iω), v>` with `β = uL`, `ω = vL`.
pub fn central_charge(beta: f64, omega: f64, v: &MukaiVector) -> Complex64 {
    let z = Complex64::new(beta, omega);
    let d = v.d as f64;
    let [r, n, s] = [&v.r, &v.n, &v.s].map(to_f64);
    z * n * (2.0 * d) - s - z * z * d * r
}

/// `v²/2r + (r/2) (ω + i(n/r - β))² L²`, the completed-square form; `None` for `r = 0`.
pub fn central_charge_expanded(beta: f64, omega: f64, v: &MukaiVector) -> Option<Complex64> {
    if v.r.is_zero() {
        return None;
    }
    let r = to_f64(&v.r);
    let n = to_f64(&v.n);
    let l2 = 2.0 * v.d as f64;
    let square = Complex64::new(omega, n / r - beta);
    Some(to_f64(&v.self_pairing()) / (2.0 * r) + square * square * (r / 2.0) * l2)
}

/// `|a - b| / max(|a|, |b|)`, zero when both vanish.
pub fn relative_error(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

/// Distance between two projective points, after scaling both so that the
/// coordinate where `y` is largest becomes 1.
pub fn projective_distance(x: &[Complex64; 3], y: &[Complex64; 3]) -> Result<f64> {
    let k = (0..3)
        .max_by(|&i, &j| y[i].norm().total_cmp(&y[j].norm()))
        .expect("three coordinates");
    if y[k].is_zero() || x[k].is_zero() || !x[k].norm().is_finite() {
        return Err(Error::NumericalPole);
    }
    let defect = (0..3)
        .map(|i| (x[i] / x[k] - y[i] / y[k]).norm())
        .fold(0.0, f64::max);
    Ok(defect)
}

/// How far `g · embed(z)` is from the line `embed(mobius(w, z))`.
pub fn equivariance_defect_with(g: &Isometry, w: &AlElement, z: HalfPlanePoint) -> Result<f64> {
    if g.d != w.d() {
        return Err(Error::LevelMismatch(g.d, w.d()));
    }
    let m = g.m.to_f64();
    let x = embed(z, w.d())?.components;
    let lhs: [Complex64; 3] = std::array::from_fn(|i| (0..3).map(|k| x[k] * m[i][k]).sum());
    let rhs = embed(mobius(w, z)?, w.d())?.components;
    projective_distance(&lhs, &rhs)
}

pub fn equivariance_defect(w: &AlElement, z: HalfPlanePoint) -> Result<f64> {
    equivariance_defect_with(&represent(w)?, w, z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::exact_divisors;
    use crate::fmcalc::{induced_transform, isotropic_vector, InducedTransform};
    use crate::modgroup::{base_element, random_al};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pt(u: f64, v: f64) -> HalfPlanePoint {
        HalfPlanePoint::new(u, v).unwrap()
    }

    fn random_point<R: Rng>(rng: &mut R) -> HalfPlanePoint {
        pt(rng.gen_range(-3.0..3.0), rng.gen_range(0.05..3.0))
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        relative_error(a, b) < tol
    }

    #[test]
    fn embed_examples() {
        let t = embed(pt(0.0, 1.0), 7).unwrap();
        assert_eq!(t.components, [1.0.into(), Complex64::i(), (-7.0).into()]);
        let t = embed(pt(1.0, 1.0), 2).unwrap();
        assert!(close(t.components[2], Complex64::new(0.0, 4.0), LOCAL_TOL));
        assert!(t.self_pairing().norm() < LOCAL_TOL * 10.0);
        assert!(t.hermitian_norm() > 0.0);
        // <x, x̄> = 4d v² grows quadratically
        let big = embed(pt(0.0, 1e3), 3).unwrap().hermitian_norm();
        assert!((big / 12e6 - 1.0).abs() < LOCAL_TOL);
        assert!(matches!(
            HalfPlanePoint::new(0.0, -1.0),
            Err(Error::NotInUpperHalfPlane(_))
        ));
        assert!(HalfPlanePoint::new(0.0, 0.0).is_err());
    }

    #[test]
    fn mobius_examples() {
        let z = pt(0.3, 0.7);
        assert_eq!(mobius(&AlElement::identity(4), z).unwrap(), z);
        for d in [2u64, 5, 30] {
            let f = base_element(d, d).unwrap();
            let fixed = pt(0.0, 1.0 / (d as f64).sqrt());
            let out = mobius(&f, fixed).unwrap();
            assert!(close(out.z(), fixed.z(), LOCAL_TOL));
            let w = mobius(&f, z).unwrap();
            assert!(close(w.z(), -1.0 / (z.z() * d as f64), LOCAL_TOL));
        }
        let t = mobius(&AlElement::translation(3, 1), z).unwrap();
        assert!(close(t.z(), z.z() + 1.0, LOCAL_TOL));
    }

    #[test]
    fn mukai_action_examples() {
        let out = mukai_action(2, &1.into(), &0.into(), &1.into(), pt(0.0, 1.0)).unwrap();
        assert!(close(out.z(), Complex64::new(1.0, 0.5), LOCAL_TOL));
        assert_eq!(
            mukai_action(2, &0.into(), &0.into(), &1.into(), pt(0.0, 1.0)),
            Err(Error::ZeroRank)
        );
    }

    #[test]
    fn mukai_action_matches_induced_image() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for d in 1..=50u64 {
            for e in exact_divisors(d).unwrap() {
                let t = induced_transform(d, e.s).unwrap();
                for _ in 0..10 {
                    let z = random_point(&mut rng);
                    let k = mukai_action(d, &t.r, &t.n_y, &t.n_x, z).unwrap();
                    let m = mobius(&t.image, z).unwrap();
                    assert!(close(k.z(), m.z(), PIPELINE_TOL), "d={d} r={}", e.s);
                    assert!(k.v > 0.0);
                }
            }
        }
    }

    #[test]
    fn mukai_action_matches_general_transforms() {
        // any image with c != 0 has r = c² d/s and the same action
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for d in [1u64, 2, 6, 30] {
            let divs = exact_divisors(d).unwrap();
            for _ in 0..200 {
                let s = divs[rng.gen_range(0..divs.len())].s;
                let w = random_al(d, s, &mut rng, 10).unwrap();
                let t =
                    InducedTransform::from_image(crate::fmcalc::PartnerLabel::base(d), w).unwrap();
                let z = random_point(&mut rng);
                match mukai_action(d, &t.r, &t.n_y, &t.n_x, z) {
                    Ok(k) => assert!(close(k.z(), mobius(&t.image, z).unwrap().z(), PIPELINE_TOL)),
                    Err(Error::ZeroRank) => assert!(t.image.c().is_zero()),
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }

    #[test]
    fn central_charge_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..100 {
            let (b, o) = (rng.gen_range(-5.0..5.0), rng.gen_range(0.01..5.0));
            let d = rng.gen_range(1..40u64);
            assert_eq!(
                central_charge(b, o, &MukaiVector::point(d)),
                Complex64::new(-1.0, 0.0)
            );
            let v1 = MukaiVector::new(
                d,
                rng.gen_range(-9..9),
                rng.gen_range(-9..9),
                rng.gen_range(-9..9),
            );
            let v2 = MukaiVector::new(
                d,
                rng.gen_range(-9..9),
                rng.gen_range(-9..9),
                rng.gen_range(-9..9),
            );
            let sum = MukaiVector::new(d, &v1.r + &v2.r, &v1.n + &v2.n, &v1.s + &v2.s);
            let lin = central_charge(b, o, &v1) + central_charge(b, o, &v2);
            assert!((central_charge(b, o, &sum) - lin).norm() < 1e-9 * (1.0 + lin.norm()));
            if let Some(x) = central_charge_expanded(b, o, &v1) {
                assert!(close(x, central_charge(b, o, &v1), 1e-10));
            }
        }
        for d in [1u64, 6, 30] {
            for e in exact_divisors(d).unwrap() {
                let v = isotropic_vector(d, e.s).unwrap();
                let omega = 0.8;
                let r = e.s as f64;
                let closed = Complex64::new(omega, 1.0 / r)
                    * Complex64::new(omega, 1.0 / r)
                    * (r / 2.0)
                    * (2.0 * d as f64);
                assert!(close(central_charge(0.0, omega, &v), closed, LOCAL_TOL));
            }
        }
    }

    #[test]
    fn central_charge_product_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        for d in [1u64, 2, 6, 30, 210] {
            for e in exact_divisors(d).unwrap() {
                let t = induced_transform(d, e.s).unwrap();
                let s = BigInt::from(d / e.s);
                let v_y = MukaiVector::new(d, t.r.clone(), t.n_y.clone(), &s * &t.n_y * &t.n_y);
                let v_x = MukaiVector::new(d, t.r.clone(), t.n_x.clone(), s.clone());
                for _ in 0..20 {
                    let z = random_point(&mut rng);
                    let zx = mobius(&t.image, z).unwrap();
                    let prod = central_charge(z.u, z.v, &v_y) * central_charge(zx.u, zx.v, &v_x);
                    assert!(
                        (prod - 1.0).norm() < PIPELINE_TOL,
                        "d={d} r={} prod={prod}",
                        e.s
                    );
                }
            }
        }
    }

    #[test]
    fn equivariance_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        for _ in 0..20 {
            let z = random_point(&mut rng);
            assert_eq!(
                equivariance_defect(&AlElement::identity(6), z).unwrap(),
                0.0
            );
        }
        let divs = exact_divisors(6).unwrap();
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let s = divs[rng.gen_range(0..divs.len())].s;
            let w = random_al(6, s, &mut rng, 10).unwrap();
            worst = worst.max(equivariance_defect(&w, random_point(&mut rng)).unwrap());
        }
        assert!(worst < PIPELINE_TOL, "worst defect {worst}");
        let w = base_element(6, 2).unwrap();
        let mut g = represent(&w).unwrap();
        g.m.0[0][0] += num_rational::BigRational::from_integer(5.into());
        let z = pt(0.1, 0.9);
        assert!(equivariance_defect_with(&g, &w, z).unwrap() > 1e-3);
    }

    #[test]
    fn mobius_is_a_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(36);
        for d in [1u64, 6, 30] {
            let divs = exact_divisors(d).unwrap();
            for _ in 0..300 {
                let x = random_al(d, divs[rng.gen_range(0..divs.len())].s, &mut rng, 10).unwrap();
                let y = random_al(d, divs[rng.gen_range(0..divs.len())].s, &mut rng, 10).unwrap();
                let z = random_point(&mut rng);
                let lhs = mobius(&x.mul(&y).unwrap(), z).unwrap();
                let rhs = mobius(&x, mobius(&y, z).unwrap()).unwrap();
                assert!(close(lhs.z(), rhs.z(), PIPELINE_TOL));
                assert!(lhs.v > 0.0);
            }
        }
    }
}

//! The rank 3 lattice `N_d = Z e0 + Z l + Z e4` with Gram matrix
//!
//! ```text
//!   [[ 0,  0, -1],
//!    [ 0, 2d,  0],
//!    [-1,  0,  0]]
//! ```
//!
//! i.e. the Mukai pairing `<(r,n,s),(r',n',s')> = 2d n n' - r s' - s r'`.
//! Matrices act on column vectors; column `j` is the image of the `j`th basis vector.

use std::fmt;
use std::ops::{Mul, Neg};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn rat(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// Formats a rational as `"p/q"` with `q >= 1`.
pub fn rational_to_string(x: &BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `"p/q"` or a bare integer `"p"`.
pub fn parse_rational(text: &str) -> std::result::Result<BigRational, String> {
    let text = text.trim();
    let (p, q) = match text.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (text, "1"),
    };
    let p: BigInt = p
        .parse()
        .map_err(|e| format!("bad numerator in {text:?}: {e}"))?;
    let q: BigInt = q
        .parse()
        .map_err(|e| format!("bad denominator in {text:?}: {e}"))?;
    if q.is_zero() {
        return Err(format!("zero denominator in {text:?}"));
    }
    Ok(BigRational::new(p, q))
}

/// A 3x3 matrix of exact rationals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mat3(pub [[BigRational; 3]; 3]);

impl Mat3 {
    pub fn from_fn(f: impl Fn(usize, usize) -> BigRational) -> Self {
        Mat3(std::array::from_fn(|i| std::array::from_fn(|j| f(i, j))))
    }

    pub fn from_integers<T: Into<BigInt> + Clone>(rows: [[T; 3]; 3]) -> Self {
        Self::from_fn(|i, j| BigRational::from_integer(rows[i][j].clone().into()))
    }

    pub fn identity() -> Self {
        Self::from_fn(|i, j| {
            if i == j {
                BigRational::one()
            } else {
                BigRational::zero()
            }
        })
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.0[j][i].clone())
    }

    pub fn det(&self) -> BigRational {
        let m = &self.0;
        &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
            - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
            + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
    }

    pub fn trace(&self) -> BigRational {
        &self.0[0][0] + &self.0[1][1] + &self.0[2][2]
    }

    /// Inverse by the adjugate, `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.det();
        if det.is_zero() {
            return None;
        }
        let m = &self.0;
        let cof = |i: usize, j: usize| {
            let rows: Vec<usize> = (0..3).filter(|&r| r != i).collect();
            let cols: Vec<usize> = (0..3).filter(|&c| c != j).collect();
            let minor = &m[rows[0]][cols[0]] * &m[rows[1]][cols[1]]
                - &m[rows[0]][cols[1]] * &m[rows[1]][cols[0]];
            if (i + j).is_multiple_of(2) {
                minor
            } else {
                -minor
            }
        };
        Some(Self::from_fn(|i, j| cof(j, i) / &det))
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().flatten().all(|x| x.is_integer())
    }

    pub fn apply(&self, v: &[BigRational; 3]) -> [BigRational; 3] {
        std::array::from_fn(|i| (0..3).map(|k| &self.0[i][k] * &v[k]).sum())
    }

    pub fn to_f64(&self) -> [[f64; 3]; 3] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.0[i][j].to_f64().unwrap_or(f64::NAN)))
    }

    /// Characteristic polynomial `x^3 + c2 x^2 + c1 x + c0`, returned as `[c0, c1, c2, 1]`.
    pub fn char_poly(&self) -> [BigRational; 4] {
        let m = &self.0;
        let minors = &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0] + &m[0][0] * &m[2][2]
            - &m[0][2] * &m[2][0]
            + &m[1][1] * &m[2][2]
            - &m[1][2] * &m[2][1];
        [-self.det(), minors, -self.trace(), BigRational::one()]
    }
}

impl Mul for &Mat3 {
    type Output = Mat3;
    fn mul(self, rhs: &Mat3) -> Mat3 {
        Mat3::from_fn(|i, j| (0..3).map(|k| &self.0[i][k] * &rhs.0[k][j]).sum())
    }
}

impl Neg for &Mat3 {
    type Output = Mat3;
    fn neg(self) -> Mat3 {
        Mat3::from_fn(|i, j| -&self.0[i][j])
    }
}

impl fmt::Display for Mat3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .0
            .iter()
            .map(|r| {
                let cells: Vec<String> = r.iter().map(|x| x.to_string()).collect();
                format!("[{}]", cells.join(", "))
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

impl Serialize for Mat3 {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = self
            .0
            .iter()
            .map(|r| r.iter().map(rational_to_string).collect())
            .collect();
        rows.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Mat3 {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let rows: Vec<Vec<String>> = Vec::deserialize(de)?;
        if rows.len() != 3 || rows.iter().any(|r| r.len() != 3) {
            return Err(D::Error::custom("expected a 3x3 array"));
        }
        let mut out = Mat3::identity();
        for (i, row) in rows.iter().enumerate() {
            for (j, cell) in row.iter().enumerate() {
                out.0[i][j] = parse_rational(cell).map_err(D::Error::custom)?;
            }
        }
        Ok(out)
    }
}

/// The Gram matrix of `N_d` in the basis `(e0, l, e4)`.
pub fn gram(d: u64) -> Mat3 {
    let two_d = 2 * d as i64;
    Mat3::from_integers([[0, 0, -1], [0, two_d, 0], [-1, 0, 0]])
}

fn sign_changes(coeffs: &[BigRational]) -> usize {
    let signs: Vec<bool> = coeffs
        .iter()
        .filter(|c| !c.is_zero())
        .map(|c| c.is_positive())
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// `(positive, negative)` eigenvalue counts of a symmetric matrix, read off
/// the characteristic polynomial by Descartes' rule (exact for real-rooted
/// polynomials).
pub fn signature(m: &Mat3) -> (usize, usize) {
    let p = m.char_poly();
    let pos = sign_changes(&p);
    let flipped: Vec<BigRational> = p
        .iter()
        .enumerate()
        .map(|(k, c)| if k % 2 == 1 { -c } else { c.clone() })
        .collect();
    (pos, sign_changes(&flipped))
}

/// A vector of `N_d ⊗ Q` in coordinates `(e0, l, e4)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeVector {
    pub d: u64,
    pub coords: [BigRational; 3],
}

impl LatticeVector {
    pub fn new(d: u64, coords: [BigRational; 3]) -> Self {
        Self { d, coords }
    }

    pub fn from_ints(d: u64, x0: i64, xl: i64, x4: i64) -> Self {
        Self::new(d, [rat(x0), rat(xl), rat(x4)])
    }
}

pub fn mukai_pairing(u: &LatticeVector, v: &LatticeVector) -> Result<BigRational> {
    if u.d != v.d {
        return Err(Error::LevelMismatch(u.d, v.d));
    }
    let [u0, ul, u4] = &u.coords;
    let [v0, vl, v4] = &v.coords;
    Ok(rat(2 * u.d as i64) * ul * vl - u0 * v4 - u4 * v0)
}

/// A rational 3x3 matrix acting on `N_d ⊗ Q`; a candidate element of `O(N_d)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Isometry {
    pub d: u64,
    pub m: Mat3,
}

impl Isometry {
    pub fn new(d: u64, m: Mat3) -> Self {
        Self { d, m }
    }

    pub fn identity(d: u64) -> Self {
        Self::new(d, Mat3::identity())
    }

    pub fn is_integral(&self) -> bool {
        self.m.is_integral()
    }

    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        if self.d != rhs.d {
            return Err(Error::LevelMismatch(self.d, rhs.d));
        }
        Ok(Self::new(self.d, &self.m * &rhs.m))
    }

    pub fn neg(&self) -> Self {
        Self::new(self.d, -&self.m)
    }

    pub fn inverse(&self) -> Option<Self> {
        Some(Self::new(self.d, self.m.inverse()?))
    }

    pub fn apply(&self, v: &LatticeVector) -> Result<LatticeVector> {
        if self.d != v.d {
            return Err(Error::LevelMismatch(self.d, v.d));
        }
        Ok(LatticeVector::new(self.d, self.m.apply(&v.coords)))
    }

    pub fn det(&self) -> BigRational {
        self.m.det()
    }
}

/// Wire form: `{"d": 6, "matrix": [["1/1", ...], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IsometryJson {
    pub d: u64,
    pub matrix: Mat3,
}

impl Serialize for Isometry {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        IsometryJson {
            d: self.d,
            matrix: self.m.clone(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Isometry {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let j = IsometryJson::deserialize(de)?;
        Ok(Isometry::new(j.d, j.matrix))
    }
}

/// `g^T Σ g == Σ`, checked as the six pairings between columns of `g`.
pub fn is_isometry(g: &Isometry) -> bool {
    let target = |i: usize, j: usize| -> i64 {
        match (i, j) {
            (1, 1) => 2 * g.d as i64,
            (0, 2) | (2, 0) => -1,
            _ => 0,
        }
    };
    let m = &g.m.0;
    if g.is_integral() {
        let two_d = BigInt::from(2 * g.d);
        let x: [[&BigInt; 3]; 3] =
            std::array::from_fn(|i| std::array::from_fn(|j| m[i][j].numer()));
        let pair =
            |i: usize, j: usize| &two_d * x[1][i] * x[1][j] - x[0][i] * x[2][j] - x[2][i] * x[0][j];
        return (0..3).all(|i| (i..3).all(|j| pair(i, j) == BigInt::from(target(i, j))));
    }
    let two_d = rat(2 * g.d as i64);
    let pair = |i: usize, j: usize| {
        &two_d * &m[1][i] * &m[1][j] - &m[0][i] * &m[2][j] - &m[2][i] * &m[0][j]
    };
    (0..3).all(|i| (i..3).all(|j| pair(i, j) == rat(target(i, j))))
}

/// Does `g` preserve the orientation of positive definite 2-planes?
///
/// Reference plane: `p1 = (1, 0, -d)`, `p2 = (0, 1, 0)`, the real and
/// imaginary parts of `exp(i L)`. The projection of `g(P)` onto `P` along
/// the negative line `P^⊥` is an isomorphism, and `g` preserves orientation
/// iff it has positive determinant, i.e. iff `det <g p_i, p_j> > 0` (the
/// Gram of `P` is `2d * I`).
pub fn is_orientation_preserving(g: &Isometry) -> Result<bool> {
    if !is_isometry(g) {
        return Err(Error::NotAnIsometry(g.d));
    }
    let d = g.d as i64;
    let p = [
        LatticeVector::from_ints(g.d, 1, 0, -d),
        LatticeVector::from_ints(g.d, 0, 1, 0),
    ];
    let gp = [g.apply(&p[0])?, g.apply(&p[1])?];
    let pairing = |i: usize, j: usize| mukai_pairing(&gp[i], &p[j]);
    let det = pairing(0, 0)? * pairing(1, 1)? - pairing(0, 1)? * pairing(1, 0)?;
    Ok(det.is_positive())
}

/// The action of an integral isometry on `A_{N_d} = N_d^∨ / N_d ≅ Z/2d`,
/// which is multiplication by a unit `u` with `u^2 ≡ 1 (mod 4d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DiscriminantUnit {
    pub d: u64,
    pub u: u64,
}

impl DiscriminantUnit {
    pub fn modulus(&self) -> u64 {
        2 * self.d
    }

    pub fn is_plus_minus_one(&self) -> bool {
        let m = self.modulus();
        self.u == 1 % m || self.u == m - 1
    }

    pub fn is_one(&self) -> bool {
        self.u == 1 % self.modulus()
    }

    pub fn preserves_form(&self) -> bool {
        let u = self.u as u128;
        (u * u) % (4 * self.d as u128) == 1 % (4 * self.d as u128)
    }
}

/// `A_{N_d}` is generated by `l/2d`; reads `u` off the middle column of `g`.
pub fn discriminant_unit(g: &Isometry) -> Result<DiscriminantUnit> {
    if !g.is_integral() {
        return Err(Error::NotIntegral);
    }
    if !is_isometry(g) {
        return Err(Error::NotAnIsometry(g.d));
    }
    let modulus = BigInt::from(2 * g.d);
    let col: [BigInt; 3] = std::array::from_fn(|i| g.m.0[i][1].to_integer());
    // g(l/2d) = (col0/2d) e0 + (col1/2d) l + (col4/2d) e4 must agree with u * l/2d mod N_d
    for i in [0, 2] {
        if !col[i].is_multiple_of(&modulus) {
            return Err(Error::ActionNotDiagonal(format!(
                "coefficient {} of g(l) not divisible by {}",
                col[i], modulus
            )));
        }
    }
    let u = col[1].mod_floor(&modulus);
    let unit = DiscriminantUnit {
        d: g.d,
        u: u.to_u64().expect("reduced below 2d"),
    };
    if !unit.preserves_form() {
        return Err(Error::ActionNotDiagonal(format!(
            "u = {} does not satisfy u^2 = 1 mod {}",
            unit.u,
            4 * g.d
        )));
    }
    Ok(unit)
}

/// Membership in `O(N_d)^*`, the kernel of `O(N_d) -> O(A_{N_d})`.
pub fn in_star_kernel(g: &Isometry) -> Result<bool> {
    Ok(discriminant_unit(g)?.is_one())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iso(d: u64, rows: [[i64; 3]; 3]) -> Isometry {
        Isometry::new(d, Mat3::from_integers(rows))
    }

    #[test]
    fn pairing_examples() {
        for d in [1u64, 2, 6, 17] {
            let pt = LatticeVector::from_ints(d, 0, 0, 1);
            assert!(mukai_pairing(&pt, &pt).unwrap().is_zero());
            let e0 = LatticeVector::from_ints(d, 1, 0, 0);
            assert_eq!(mukai_pairing(&e0, &pt).unwrap(), rat(-1));
            for r in 1..=6i64 {
                for s in 1..=6i64 {
                    let v = LatticeVector::from_ints(d, r, 1, s);
                    assert_eq!(
                        mukai_pairing(&v, &v).unwrap(),
                        rat(2 * d as i64 - 2 * r * s)
                    );
                }
            }
        }
        let u = LatticeVector::from_ints(2, 1, 0, 0);
        let v = LatticeVector::from_ints(3, 1, 0, 0);
        assert_eq!(mukai_pairing(&u, &v), Err(Error::LevelMismatch(2, 3)));
    }

    #[test]
    fn isometry_examples() {
        assert!(is_isometry(&Isometry::identity(5)));
        assert!(is_isometry(&Isometry::identity(5).neg()));
        assert!(!is_isometry(&iso(5, [[2, 0, 0], [0, 1, 0], [0, 0, 1]])));
    }

    #[test]
    fn orientation_examples() {
        for d in [1u64, 3, 6] {
            assert!(is_orientation_preserving(&Isometry::identity(d)).unwrap());
            assert!(is_orientation_preserving(&Isometry::identity(d).neg()).unwrap());
            let swap = iso(d, [[0, 0, 1], [0, 1, 0], [1, 0, 0]]);
            assert!(is_isometry(&swap));
            assert!(!is_orientation_preserving(&swap).unwrap());
            // l -> -l reverses the plane as well
            let flip = iso(d, [[1, 0, 0], [0, -1, 0], [0, 0, 1]]);
            assert!(!is_orientation_preserving(&flip).unwrap());
        }
        assert_eq!(
            is_orientation_preserving(&iso(2, [[2, 0, 0], [0, 1, 0], [0, 0, 1]])),
            Err(Error::NotAnIsometry(2))
        );
    }

    #[test]
    fn discriminant_examples() {
        for d in [1u64, 2, 6, 30] {
            assert_eq!(
                discriminant_unit(&Isometry::identity(d)).unwrap().u,
                1 % (2 * d)
            );
            assert_eq!(
                discriminant_unit(&Isometry::identity(d).neg()).unwrap().u,
                2 * d - 1
            );
            assert!(in_star_kernel(&Isometry::identity(d)).unwrap());
        }
        for d in [2u64, 6, 30] {
            assert!(!in_star_kernel(&Isometry::identity(d).neg()).unwrap());
        }
        // A_{N_1} = Z/2, where -1 = 1
        assert!(in_star_kernel(&Isometry::identity(1).neg()).unwrap());
        let half = Isometry::new(
            3,
            Mat3::from_fn(|i, j| {
                if i == j {
                    BigRational::new(1.into(), 2.into())
                } else {
                    BigRational::zero()
                }
            }),
        );
        assert_eq!(discriminant_unit(&half), Err(Error::NotIntegral));
    }

    #[test]
    fn gram_signature_is_two_one() {
        for d in 1..=200u64 {
            assert_eq!(signature(&gram(d)), (2, 1), "d = {d}");
        }
        assert_eq!(signature(&Mat3::identity()), (3, 0));
        assert_eq!(signature(&(-&Mat3::identity())), (0, 3));
    }

    #[test]
    fn inverse_and_char_poly() {
        let g = iso(1, [[1, 0, 0], [1, 1, 0], [1, 2, 1]]);
        assert!(is_isometry(&g));
        let gi = g.inverse().unwrap();
        assert!(is_isometry(&gi));
        assert_eq!(g.compose(&gi).unwrap(), Isometry::identity(1));
        // Σ has eigenvalues 2d, 1, -1
        let p = gram(3).char_poly();
        assert_eq!(p, [rat(6), rat(-1), rat(-6), rat(1)]);
        assert!(Mat3::from_integers([[1, 2, 3], [2, 4, 6], [0, 0, 1]])
            .inverse()
            .is_none());
    }

    #[test]
    fn rational_text_format() {
        assert_eq!(
            parse_rational("6/4").unwrap(),
            BigRational::new(3.into(), 2.into())
        );
        assert_eq!(parse_rational(" -7 ").unwrap(), rat(-7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(rational_to_string(&rat(-3)), "-3/1");
        let m = gram(2);
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(
            text,
            r#"[["0/1","0/1","-1/1"],["0/1","4/1","0/1"],["-1/1","0/1","0/1"]]"#
        );
        assert_eq!(serde_json::from_str::<Mat3>(&text).unwrap(), m);
        assert!(serde_json::from_str::<Mat3>(r#"[["1"]]"#).is_err());
    }
}

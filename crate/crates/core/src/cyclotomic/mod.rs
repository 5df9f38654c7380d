//! Exact arithmetic in cyclotomic fields.
//!
//! A [`CycloElem`] is an element of Q(zeta_N) stored as its coefficient
//! vector of length phi(N) modulo the N-th cyclotomic polynomial, so at a
//! fixed order the vector is a normal form and equality is coefficient
//! equality. Mixed-order arithmetic embeds both operands into the field of
//! order lcm(N, M) first. Elements that reduce to a rational are demoted to
//! order 1 after every operation, and equality across different stored
//! orders compares the lcm embeddings, so semantically equal values always
//! compare equal.
//!
//! No floating point is used anywhere; coefficients are arbitrary-precision
//! rationals.

mod poly;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use poly::QPoly;
use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use thiserror::Error;

pub(crate) use poly::euler_phi;

/// Default ceiling on cyclotomic orders the library will materialize.
pub const DEFAULT_MAX_ORDER: u64 = 10_000;

static MAX_ORDER: AtomicU64 = AtomicU64::new(DEFAULT_MAX_ORDER);

/// Current ceiling on cyclotomic orders.
pub fn max_order() -> u64 {
    MAX_ORDER.load(Ordering::Relaxed)
}

/// Adjust the ceiling on cyclotomic orders. Computing Phi_N takes quadratic
/// work in N, so the cap exists to turn runaway orders into a clean error
/// instead of an effective hang. Lowering it never invalidates elements that
/// were already built.
pub fn set_max_order(cap: u64) {
    MAX_ORDER.store(cap.max(1), Ordering::Relaxed);
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CycloError {
    #[error("cyclotomic order must be at least 1")]
    InvalidOrder,
    #[error("cyclotomic order {order} exceeds the configured cap {cap}")]
    OrderTooLarge { order: u64, cap: u64 },
    #[error("order {order} does not divide the requested order {target}")]
    NotASuborder { order: u64, target: u64 },
    #[error("division by zero in Q(zeta_{order})")]
    DivisionByZero { order: u64 },
}

/// An element of the cyclotomic field Q(zeta_order).
///
/// Invariants: `coeffs.len() == phi(order)`, the vector is reduced modulo
/// Phi_order, and a purely rational value is stored at order 1.
#[derive(Clone, Debug)]
pub struct CycloElem {
    order: u64,
    coeffs: Vec<BigRational>,
}

fn phi_poly(order: u64) -> Result<Arc<QPoly>, CycloError> {
    if order == 0 {
        return Err(CycloError::InvalidOrder);
    }
    let cap = max_order();
    if order > cap {
        return Err(CycloError::OrderTooLarge { order, cap });
    }
    Ok(poly::cyclotomic_poly(order))
}

fn lcm_order(a: u64, b: u64) -> Result<u64, CycloError> {
    let l = num_integer::lcm(a, b);
    let cap = max_order();
    if l > cap {
        return Err(CycloError::OrderTooLarge { order: l, cap });
    }
    Ok(l)
}

impl CycloElem {
    /// Reduce an arbitrary polynomial in zeta_order to the canonical vector.
    fn from_poly(order: u64, p: QPoly) -> Result<Self, CycloError> {
        let modulus = phi_poly(order)?;
        let rem = p.rem(&modulus);
        let len = euler_phi(order) as usize;
        let mut coeffs = rem.coeffs().to_vec();
        coeffs.resize(len, BigRational::zero());
        Ok(CycloElem { order, coeffs }.demote())
    }

    /// Drop to order 1 when no irrational basis element survives reduction.
    fn demote(self) -> Self {
        if self.order > 1 && self.coeffs[1..].iter().all(|c| c.is_zero()) {
            CycloElem {
                order: 1,
                coeffs: vec![self.coeffs[0].clone()],
            }
        } else {
            self
        }
    }

    fn lift(&self) -> QPoly {
        QPoly::new(self.coeffs.clone())
    }

    /// Coefficient vector re-expressed in Q(zeta_target), unreduced.
    fn spread(&self, target: u64) -> QPoly {
        let stride = (target / self.order) as usize;
        let mut out = vec![BigRational::zero(); (self.coeffs.len() - 1) * stride + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i * stride] = c.clone();
        }
        QPoly::new(out)
    }

    pub fn zero() -> Self {
        CycloElem {
            order: 1,
            coeffs: vec![BigRational::zero()],
        }
    }

    pub fn one() -> Self {
        CycloElem {
            order: 1,
            coeffs: vec![BigRational::one()],
        }
    }

    pub fn from_rational(r: BigRational) -> Self {
        CycloElem {
            order: 1,
            coeffs: vec![r],
        }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// zeta_n^k, stored at the canonical order n / gcd(n, k), so the result's
    /// order equals its multiplicative order.
    pub fn root_of_unity(n: u64, k: i64) -> Result<Self, CycloError> {
        if n == 0 {
            return Err(CycloError::InvalidOrder);
        }
        let k = k.rem_euclid(n as i64) as u64;
        if k == 0 {
            return Ok(Self::one());
        }
        let g = num_integer::gcd(n, k);
        let (n, k) = (n / g, k / g);
        Self::from_poly(n, QPoly::monomial(k as usize))
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.order == 1 && self.coeffs[0].is_one()
    }

    /// The rational value of this element, if it has one.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    /// Re-express at a larger order (the stored order must divide `target`).
    /// The result keeps order `target`; the value is unchanged.
    pub fn embed(&self, target: u64) -> Result<Self, CycloError> {
        if target == 0 {
            return Err(CycloError::InvalidOrder);
        }
        if target % self.order != 0 {
            return Err(CycloError::NotASuborder {
                order: self.order,
                target,
            });
        }
        if target == self.order {
            return Ok(self.clone());
        }
        let modulus = phi_poly(target)?;
        let rem = self.spread(target).rem(&modulus);
        let len = euler_phi(target) as usize;
        let mut coeffs = rem.coeffs().to_vec();
        coeffs.resize(len, BigRational::zero());
        Ok(CycloElem {
            order: target,
            coeffs,
        })
    }

    fn common_order(&self, rhs: &Self) -> Result<(u64, QPoly, QPoly), CycloError> {
        if self.order == rhs.order {
            return Ok((self.order, self.lift(), rhs.lift()));
        }
        let l = lcm_order(self.order, rhs.order)?;
        phi_poly(l)?;
        Ok((l, self.spread(l), rhs.spread(l)))
    }

    pub fn checked_add(&self, rhs: &Self) -> Result<Self, CycloError> {
        let (l, a, b) = self.common_order(rhs)?;
        Self::from_poly(l, a.add(&b))
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self, CycloError> {
        let (l, a, b) = self.common_order(rhs)?;
        Self::from_poly(l, a.sub(&b))
    }

    pub fn checked_mul(&self, rhs: &Self) -> Result<Self, CycloError> {
        let (l, a, b) = self.common_order(rhs)?;
        Self::from_poly(l, a.mul(&b))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, CycloError> {
        let (l, a, b) = self.common_order(rhs)?;
        let modulus = phi_poly(l)?;
        let b = b.rem(&modulus);
        if b.is_zero() {
            return Err(CycloError::DivisionByZero { order: l });
        }
        // Phi_l is irreducible over Q, so gcd(b, Phi_l) is a nonzero constant
        // and the Bezout coefficient of b is the inverse up to that constant.
        let (g, s, _) = b.xgcd(&modulus);
        debug_assert_eq!(g.degree(), Some(0));
        let inv = s.scale(&(BigRational::one() / g.coeff(0)));
        Self::from_poly(l, a.mul(&inv))
    }

    pub fn inverse(&self) -> Result<Self, CycloError> {
        Self::one().checked_div(self)
    }

    /// Integer power; negative exponents invert first.
    pub fn pow(&self, e: i64) -> Result<Self, CycloError> {
        if e == 0 {
            return Ok(Self::one());
        }
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut exp = e.unsigned_abs();
        let mut acc = Self::one();
        let mut sq = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.checked_mul(&sq)?;
            }
            exp >>= 1;
            if exp > 0 {
                sq = sq.checked_mul(&sq)?;
            }
        }
        Ok(acc)
    }

    /// Recognize a root of unity: returns (N, k) with `self == zeta_N^k`,
    /// gcd(k, N) = 1 and 0 <= k < N (so N is the multiplicative order), or
    /// None when the element is not a root of unity.
    ///
    /// The roots of unity inside Q(zeta_n) are exactly the elements of order
    /// dividing lcm(2, n), so a power check against that bound settles
    /// membership and a scan of the powers of zeta_lcm finds the exponent.
    pub fn as_root_of_unity(&self) -> Option<(u64, u64)> {
        if self.is_zero() {
            return None;
        }
        let n = self.order;
        let l = if n % 2 == 0 { n } else { 2 * n };
        let bound = self.pow(l as i64).ok()?;
        if !bound.is_one() {
            return None;
        }
        let zeta = Self::root_of_unity(l, 1).ok()?;
        let mut w = Self::one();
        for k in 0..l {
            if w == *self {
                let g = num_integer::gcd(l, k);
                return Some((l / g, k / g));
            }
            w = w.checked_mul(&zeta).ok()?;
        }
        None
    }
}

/// Equality is semantic: different stored orders are compared through their
/// lcm embedding, where the reduced vector is a normal form.
impl PartialEq for CycloElem {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.coeffs == other.coeffs;
        }
        let l = lcm_order(self.order, other.order)
            .unwrap_or_else(|e| panic!("cannot compare cyclotomic elements: {e}"));
        let a = self
            .embed(l)
            .unwrap_or_else(|e| panic!("cannot compare cyclotomic elements: {e}"));
        let b = other
            .embed(l)
            .unwrap_or_else(|e| panic!("cannot compare cyclotomic elements: {e}"));
        a.coeffs == b.coeffs
    }
}

impl Eq for CycloElem {}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident, $what:literal) => {
        impl std::ops::$trait<&CycloElem> for &CycloElem {
            type Output = CycloElem;
            fn $method(self, rhs: &CycloElem) -> CycloElem {
                self.$checked(rhs)
                    .unwrap_or_else(|e| panic!(concat!("cyclotomic ", $what, " failed: {}"), e))
            }
        }
        impl std::ops::$trait<CycloElem> for CycloElem {
            type Output = CycloElem;
            fn $method(self, rhs: CycloElem) -> CycloElem {
                (&self).$method(&rhs)
            }
        }
        impl std::ops::$trait<&CycloElem> for CycloElem {
            type Output = CycloElem;
            fn $method(self, rhs: &CycloElem) -> CycloElem {
                (&self).$method(rhs)
            }
        }
        impl std::ops::$trait<CycloElem> for &CycloElem {
            type Output = CycloElem;
            fn $method(self, rhs: CycloElem) -> CycloElem {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add, "addition");
forward_binop!(Sub, sub, checked_sub, "subtraction");
forward_binop!(Mul, mul, checked_mul, "multiplication");
forward_binop!(Div, div, checked_div, "division");

impl std::ops::Neg for &CycloElem {
    type Output = CycloElem;
    fn neg(self) -> CycloElem {
        CycloElem {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl std::ops::Neg for CycloElem {
    type Output = CycloElem;
    fn neg(self) -> CycloElem {
        -&self
    }
}

impl fmt::Display for CycloElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.as_rational() {
            return write!(f, "{r}");
        }
        if let Some((n, k)) = self.as_root_of_unity() {
            return match k {
                0 => write!(f, "1"),
                1 => write!(f, "zeta_{n}"),
                _ => write!(f, "zeta_{n}^{k}"),
            };
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let base = match i {
                0 => String::from("1"),
                1 => format!("zeta_{}", self.order),
                _ => format!("zeta_{}^{}", self.order, i),
            };
            if i == 0 {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{base}")?;
            } else {
                write!(f, "{mag}*{base}")?;
            }
        }
        Ok(())
    }
}

/// The n-th cyclotomic polynomial as its integer coefficient vector in
/// ascending degree order (length phi(n) + 1).
pub fn cyclotomic_polynomial(n: u64) -> Result<Vec<BigInt>, CycloError> {
    let p = phi_poly(n)?;
    Ok(p.coeffs()
        .iter()
        .map(|c| {
            debug_assert!(c.is_integer());
            c.to_integer()
        })
        .collect())
}

/// Parse the compact root-of-unity form "zeta_N" or "zeta_N^k".
fn parse_zeta(s: &str) -> Option<(u64, i64)> {
    let rest = s.strip_prefix("zeta_")?;
    match rest.split_once('^') {
        Some((n, k)) => Some((n.parse().ok()?, k.parse().ok()?)),
        None => Some((rest.parse().ok()?, 1)),
    }
}

fn elem_from_str(s: &str) -> Result<CycloElem, String> {
    if let Some((n, k)) = parse_zeta(s) {
        return CycloElem::root_of_unity(n, k).map_err(|e| e.to_string());
    }
    s.parse::<BigRational>()
        .map(CycloElem::from_rational)
        .map_err(|_| format!("expected a rational \"a/b\" or \"zeta_N^k\", got {s:?}"))
}

impl Serialize for CycloElem {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("CycloElem", 2)?;
        st.serialize_field("order", &self.order)?;
        let coeffs: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        st.serialize_field("coeffs", &coeffs)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for CycloElem {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ElemVisitor;

        impl<'de> Visitor<'de> for ElemVisitor {
            type Value = CycloElem;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a rational string, \"zeta_N^k\", or {\"order\", \"coeffs\"}")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<CycloElem, E> {
                elem_from_str(v).map_err(E::custom)
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<CycloElem, A::Error> {
                let mut order: Option<u64> = None;
                let mut coeffs: Option<Vec<String>> = None;
                while let Some(key) = map.next_key::<String>()? {
                    match key.as_str() {
                        "order" => order = Some(map.next_value()?),
                        "coeffs" => coeffs = Some(map.next_value()?),
                        other => {
                            return Err(de::Error::unknown_field(other, &["order", "coeffs"]))
                        }
                    }
                }
                let order = order.ok_or_else(|| de::Error::missing_field("order"))?;
                let coeffs = coeffs.ok_or_else(|| de::Error::missing_field("coeffs"))?;
                let parsed: Result<Vec<BigRational>, _> = coeffs
                    .iter()
                    .map(|s| {
                        s.parse::<BigRational>()
                            .map_err(|_| de::Error::custom(format!("bad coefficient {s:?}")))
                    })
                    .collect();
                CycloElem::from_poly(order, QPoly::new(parsed?)).map_err(de::Error::custom)
            }
        }

        deserializer.deserialize_any(ElemVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn zeta(n: u64, k: i64) -> CycloElem {
        CycloElem::root_of_unity(n, k).unwrap()
    }

    #[test]
    fn roots_of_unity_canonicalize() {
        // zeta_4^2 = -1, zeta_10^5 = -1, zeta_N^0 = 1, zeta_5^7 = zeta_5^2.
        assert_eq!(zeta(4, 2), CycloElem::from_integer(-1));
        assert_eq!(zeta(10, 5), CycloElem::from_integer(-1));
        assert_eq!(zeta(9, 0), CycloElem::one());
        assert_eq!(zeta(5, 7), zeta(5, 2));
        assert_eq!(zeta(10, 5).order(), 1);
        assert_eq!(zeta(6, 2).order(), 3);
    }

    #[test]
    fn primitive_fifth_roots_sum_to_minus_one() {
        let sum = zeta(5, 1) + zeta(5, 2) + zeta(5, 3) + zeta(5, 4);
        assert_eq!(sum, CycloElem::from_integer(-1));
        assert_eq!(sum.order(), 1);
    }

    #[test]
    fn third_root_product() {
        // (1 - zeta_3)(1 - zeta_3^2) = 3.
        let one = CycloElem::one();
        let prod = (&one - &zeta(3, 1)) * (&one - &zeta(3, 2));
        assert_eq!(prod, CycloElem::from_integer(3));
    }

    #[test]
    fn division_and_inverse() {
        let x = &CycloElem::from_integer(2) + &zeta(12, 5);
        assert_eq!(x.checked_div(&x).unwrap(), CycloElem::one());
        let inv = x.inverse().unwrap();
        assert_eq!(&x * &inv, CycloElem::one());
        assert!(matches!(
            CycloElem::one().checked_div(&CycloElem::zero()),
            Err(CycloError::DivisionByZero { .. })
        ));
    }

    #[test]
    fn mixed_order_arithmetic_lands_in_lcm() {
        let x = zeta(4, 1) * zeta(3, 1);
        assert_eq!(x, zeta(12, 7));
        // Different construction paths, same canonical value.
        let y = zeta(12, 4) * zeta(12, 3);
        assert_eq!(x, y);
    }

    #[test]
    fn demotion_collapses_rational_results() {
        let x = zeta(3, 1) * zeta(3, 2);
        assert!(x.is_one());
        assert_eq!(x.order(), 1);
        let two = (CycloElem::one() + zeta(6, 1)) - zeta(6, 1);
        assert_eq!(two.order(), 1);
        assert_eq!(two, CycloElem::from_integer(1));
    }

    #[test]
    fn pow_handles_negative_exponents() {
        let z = zeta(7, 3);
        assert_eq!(z.pow(7).unwrap(), CycloElem::one());
        assert_eq!(z.pow(-1).unwrap(), zeta(7, 4));
        assert_eq!(z.pow(0).unwrap(), CycloElem::one());
        assert_eq!(CycloElem::zero().pow(3).unwrap(), CycloElem::zero());
    }

    #[test]
    fn embed_scales_exponents() {
        let z3 = zeta(3, 1);
        let e = z3.embed(6).unwrap();
        assert_eq!(e.order(), 6);
        assert_eq!(e, zeta(6, 2));
        // Structural form: zeta_6^2 = zeta_6 - 1 modulo Phi_6.
        assert_eq!(e.coeffs(), &[rat(-1, 1), rat(1, 1)]);

        let z25 = zeta(5, 2).embed(25).unwrap();
        assert_eq!(z25, zeta(25, 10));

        assert!(matches!(
            zeta(4, 1).embed(6),
            Err(CycloError::NotASuborder { order: 4, target: 6 })
        ));
        // Embedding then comparing back is the identity on values.
        assert_eq!(z3.embed(12).unwrap(), z3);
    }

    #[test]
    fn root_recognition() {
        assert_eq!(CycloElem::from_integer(-1).as_root_of_unity(), Some((2, 1)));
        assert_eq!(CycloElem::one().as_root_of_unity(), Some((1, 0)));
        assert_eq!(zeta(10, 5).as_root_of_unity(), Some((2, 1)));
        assert_eq!(zeta(49, 14).as_root_of_unity(), Some((7, 2)));
        assert_eq!(CycloElem::from_integer(5).as_root_of_unity(), None);
        assert_eq!(CycloElem::zero().as_root_of_unity(), None);
        assert_eq!(
            (&CycloElem::one() + &zeta(3, 1)).as_root_of_unity(),
            Some((6, 1)),
            "1 + zeta_3 is a primitive sixth root"
        );
        let not_root = &CycloElem::one() + &zeta(5, 1);
        assert_eq!(not_root.as_root_of_unity(), None);
    }

    #[test]
    fn order_cap_is_enforced() {
        let err = CycloElem::root_of_unity(DEFAULT_MAX_ORDER + 1, 1);
        assert!(matches!(err, Err(CycloError::OrderTooLarge { .. })));
        assert!(cyclotomic_polynomial(0).is_err());
    }

    #[test]
    fn cyclotomic_polynomial_integer_coefficients() {
        let phi6: Vec<i64> = cyclotomic_polynomial(6)
            .unwrap()
            .iter()
            .map(|c| i64::try_from(c).unwrap())
            .collect();
        assert_eq!(phi6, vec![1, -1, 1]);
    }

    #[test]
    fn display_forms() {
        assert_eq!(zeta(5, 3).to_string(), "zeta_5^3");
        assert_eq!(CycloElem::from_rational(rat(-3, 4)).to_string(), "-3/4");
        assert_eq!(zeta(6, 1).to_string(), "zeta_6");
        let mixed = CycloElem::from_integer(2) + zeta(5, 1);
        assert_eq!(mixed.to_string(), "2 + zeta_5");
    }

    #[test]
    fn serde_object_and_compact_forms() {
        let x = CycloElem::from_rational(rat(1, 2)) + zeta(5, 3);
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(json, r#"{"order":5,"coeffs":["1/2","0","0","1"]}"#);
        let back: CycloElem = serde_json::from_str(&json).unwrap();
        assert_eq!(back, x);

        let z: CycloElem = serde_json::from_str(r#""zeta_6^2""#).unwrap();
        assert_eq!(z, zeta(3, 1));
        let r: CycloElem = serde_json::from_str(r#""-7/3""#).unwrap();
        assert_eq!(r, CycloElem::from_rational(rat(-7, 3)));
        // Unreduced vectors are accepted and canonicalized.
        let v: CycloElem = serde_json::from_str(r#"{"order":3,"coeffs":["2","0"]}"#).unwrap();
        assert_eq!(v.order(), 1);
        assert!(serde_json::from_str::<CycloElem>(r#""zeta_0^1""#).is_err());
    }
}

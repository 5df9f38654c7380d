//! Cusp data for the universal family with a point of prime order p.
//!
//! The base curve has p - 1 cusps: for each residue r in 1..=(p-1)/2 a cusp
//! r/p carrying an I_1 fiber (weight 1), and for each s in the same range a
//! cusp 1/s carrying an I_p fiber (weight p). The tautological section meets
//! every I_p fiber in a component numbered by the class of s, and is a
//! root of unity on every I_1 fiber with exponent numbered by the class of
//! the inverse of r. Component and exponent indices only matter up to sign,
//! so they live in the quotient of the units mod p by negation, represented
//! here by [`GpClass`].

use crate::weil::{w_star, WeilError};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::ser::SerializeStruct;
use serde::Serialize;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("p = {p} is not usable here: {reason}")]
    InvalidPrime { p: u64, reason: &'static str },
    #[error("the section index must be nonzero mod {p}")]
    ZeroSection { p: u64 },
    #[error("cusp index {index} is outside 1..={max} for p = {p}")]
    CuspIndexOutOfRange { index: u64, max: u64, p: u64 },
    #[error("class index {index} is outside {min}..={max} for p = {p}")]
    ClassIndexOutOfRange { index: u64, min: u64, max: u64, p: u64 },
    #[error(transparent)]
    Weil(#[from] WeilError),
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

fn validate_prime(p: u64) -> Result<(), SurfaceError> {
    if !is_prime(p) {
        return Err(SurfaceError::InvalidPrime {
            p,
            reason: "not prime",
        });
    }
    if p < 5 {
        return Err(SurfaceError::InvalidPrime {
            p,
            reason: "the cusp tables need p >= 5",
        });
    }
    Ok(())
}

fn half(p: u64) -> u64 {
    (p - 1) / 2
}

fn powmod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut acc = 1u128;
    let mut b = (base % modulus) as u128;
    let m = modulus as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// A unit mod p taken up to sign, stored by its representative in
/// 1..=(p-1)/2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GpClass {
    p: u64,
    rep: u64,
}

impl GpClass {
    /// The class of x, which must be a unit mod p.
    pub fn class_of(p: u64, x: u64) -> Result<Self, SurfaceError> {
        validate_prime(p)?;
        let r = x % p;
        if r == 0 {
            return Err(SurfaceError::ZeroSection { p });
        }
        Ok(GpClass {
            p,
            rep: r.min(p - r),
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn rep(&self) -> u64 {
        self.rep
    }

    /// Both lifts of the class to units in 1..p.
    pub fn residues(&self) -> [u64; 2] {
        [self.rep, self.p - self.rep]
    }

    /// Multiplicative inverse, computed by Fermat exponentiation. The
    /// Euclidean inverse lives in [`w_star`]; keeping the two routes apart
    /// lets them vouch for each other in tests.
    pub fn inverse(&self) -> Self {
        let inv = powmod(self.rep, self.p - 2, self.p);
        GpClass {
            p: self.p,
            rep: inv.min(self.p - inv),
        }
    }

    pub fn times(&self, other: &Self) -> Self {
        assert_eq!(self.p, other.p, "classes live mod the same prime");
        let prod = (self.rep as u128 * other.rep as u128 % self.p as u128) as u64;
        GpClass {
            p: self.p,
            rep: prod.min(self.p - prod),
        }
    }
}

impl fmt::Display for GpClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rep)
    }
}

impl Serialize for GpClass {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_u64(self.rep)
    }
}

/// Fiber type over a cusp: a nodal cubic or a p-cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FiberKind {
    I1,
    Ip,
}

impl fmt::Display for FiberKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiberKind::I1 => write!(f, "I_1"),
            FiberKind::Ip => write!(f, "I_p"),
        }
    }
}

/// One cusp of the base curve: its fiber type, its index r or s in
/// 1..=(p-1)/2, and the prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CuspData {
    kind: FiberKind,
    index: u64,
    p: u64,
}

impl CuspData {
    pub fn new(p: u64, kind: FiberKind, index: u64) -> Result<Self, SurfaceError> {
        validate_prime(p)?;
        if index == 0 || index > half(p) {
            return Err(SurfaceError::CuspIndexOutOfRange {
                index,
                max: half(p),
                p,
            });
        }
        Ok(CuspData { kind, index, p })
    }

    pub fn kind(&self) -> FiberKind {
        self.kind
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Multiplicity of the cusp in the discriminant: the fiber's component
    /// count.
    pub fn weight(&self) -> u64 {
        match self.kind {
            FiberKind::I1 => 1,
            FiberKind::Ip => self.p,
        }
    }

    /// Standard representative of the cusp on the base: r/p for the I_1
    /// cusps, 1/s for the I_p cusps.
    pub fn rep(&self) -> String {
        match self.kind {
            FiberKind::I1 => format!("{}/{}", self.index, self.p),
            FiberKind::Ip => format!("1/{}", self.index),
        }
    }
}

impl fmt::Display for CuspData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.rep(), self.kind)
    }
}

impl Serialize for CuspData {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("CuspData", 5)?;
        st.serialize_field("rep", &self.rep())?;
        st.serialize_field("type", &self.kind)?;
        st.serialize_field("index", &self.index)?;
        st.serialize_field("p", &self.p)?;
        st.serialize_field("weight", &self.weight())?;
        st.end()
    }
}

/// All p - 1 cusps: first the I_1 cusps r/p, then the I_p cusps 1/s, each
/// range ordered by index. The weights total (p^2 - 1) / 2.
pub fn cusps(p: u64) -> Result<Vec<CuspData>, SurfaceError> {
    validate_prime(p)?;
    let h = half(p);
    let mut out = Vec::with_capacity(2 * h as usize);
    for r in 1..=h {
        out.push(CuspData {
            kind: FiberKind::I1,
            index: r,
            p,
        });
    }
    for s in 1..=h {
        out.push(CuspData {
            kind: FiberKind::Ip,
            index: s,
            p,
        });
    }
    debug_assert_eq!(
        out.iter().map(CuspData::weight).sum::<u64>(),
        (p * p - 1) / 2
    );
    Ok(out)
}

/// Exponent class of the root of unity that the section with index alpha
/// hits on the I_1 fiber over r/p: the class of alpha / r.
pub fn root_of_unity_number(p: u64, alpha: u64, r: u64) -> Result<GpClass, SurfaceError> {
    validate_prime(p)?;
    if r == 0 || r > half(p) {
        return Err(SurfaceError::CuspIndexOutOfRange {
            index: r,
            max: half(p),
            p,
        });
    }
    let a = GpClass::class_of(p, alpha)?;
    let rc = GpClass::class_of(p, r)?;
    Ok(a.times(&rc.inverse()))
}

/// Component class met by the section with index alpha on the I_p fiber
/// over 1/s: the class of alpha * s, or None for the zero section, which
/// stays on component 0.
pub fn component_number(
    p: u64,
    alpha: u64,
    s: u64,
) -> Result<Option<GpClass>, SurfaceError> {
    validate_prime(p)?;
    if s == 0 || s > half(p) {
        return Err(SurfaceError::CuspIndexOutOfRange {
            index: s,
            max: half(p),
            p,
        });
    }
    if alpha % p == 0 {
        return Ok(None);
    }
    let a = GpClass::class_of(p, alpha)?;
    let sc = GpClass::class_of(p, s)?;
    Ok(Some(a.times(&sc)))
}

fn ratio(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Weighted fraction of the discriminant where the section with index alpha
/// meets component class i (i = 0 meaning the identity component), found by
/// enumerating every cusp.
pub fn m_fraction(p: u64, alpha: u64, i: u64) -> Result<BigRational, SurfaceError> {
    validate_prime(p)?;
    if alpha % p == 0 {
        return Err(SurfaceError::ZeroSection { p });
    }
    if i > half(p) {
        return Err(SurfaceError::ClassIndexOutOfRange {
            index: i,
            min: 0,
            max: half(p),
            p,
        });
    }
    let mut hit = 0u64;
    let mut total = 0u64;
    for cusp in cusps(p)? {
        total += cusp.weight();
        let class = match cusp.kind() {
            FiberKind::I1 => None,
            FiberKind::Ip => component_number(p, alpha, cusp.index())?,
        };
        let matches = match class {
            None => i == 0,
            Some(c) => c.rep() == i,
        };
        if matches {
            hit += cusp.weight();
        }
    }
    Ok(ratio(hit, total))
}

/// Closed form for the component fractions: 1/(p+1) on the identity
/// component, 2p/(p^2 - 1) on every other class.
pub fn m_fraction_closed(p: u64, i: u64) -> Result<BigRational, SurfaceError> {
    validate_prime(p)?;
    if i > half(p) {
        return Err(SurfaceError::ClassIndexOutOfRange {
            index: i,
            min: 0,
            max: half(p),
            p,
        });
    }
    if i == 0 {
        Ok(ratio(1, p + 1))
    } else {
        Ok(ratio(2 * p, p * p - 1))
    }
}

/// Fraction of the I_1 cusps where the section with index alpha lands on
/// the root-of-unity class i, found by enumeration.
pub fn r_fraction(p: u64, alpha: u64, i: u64) -> Result<BigRational, SurfaceError> {
    validate_prime(p)?;
    if alpha % p == 0 {
        return Err(SurfaceError::ZeroSection { p });
    }
    if i == 0 || i > half(p) {
        return Err(SurfaceError::ClassIndexOutOfRange {
            index: i,
            min: 1,
            max: half(p),
            p,
        });
    }
    let h = half(p);
    let mut hit = 0u64;
    for r in 1..=h {
        if root_of_unity_number(p, alpha, r)?.rep() == i {
            hit += 1;
        }
    }
    Ok(ratio(hit, h))
}

/// Closed form for the root-of-unity fractions at p >= 5: every class gets
/// 2/(p - 1).
pub fn r_fraction_closed(p: u64) -> Result<BigRational, SurfaceError> {
    validate_prime(p)?;
    Ok(ratio(2, p - 1))
}

/// At p = 2 and p = 3 the family degenerates and the enumeration above is
/// empty; there the lone nontrivial class accounts for everything.
pub fn r_fraction_small_prime(p: u64) -> Result<BigRational, SurfaceError> {
    if p == 2 || p == 3 {
        Ok(ratio(1, 1))
    } else {
        Err(SurfaceError::InvalidPrime {
            p,
            reason: "only p = 2 and p = 3 take the degenerate path",
        })
    }
}

/// The table Z[i][j] = class of i/j over the representatives i, j in
/// 1..=(p-1)/2. Row alpha lists the root-of-unity classes of the section
/// with index alpha across the I_1 cusps; every row and column is a
/// permutation of the classes.
pub fn z_matrix(p: u64) -> Result<Vec<Vec<u64>>, SurfaceError> {
    validate_prime(p)?;
    let h = half(p);
    let mut rows = Vec::with_capacity(h as usize);
    for i in 1..=h {
        let mut row = Vec::with_capacity(h as usize);
        for j in 1..=h {
            row.push(root_of_unity_number(p, i, j)?.rep());
        }
        rows.push(row);
    }
    Ok(rows)
}

/// The base involution swaps the cusp r/p with the cusp 1/r, exchanging the
/// fiber types and keeping the index.
pub fn involution(cusp: &CuspData) -> CuspData {
    CuspData {
        kind: match cusp.kind {
            FiberKind::I1 => FiberKind::Ip,
            FiberKind::Ip => FiberKind::I1,
        },
        index: cusp.index,
        p: cusp.p,
    }
}

/// One cusp's worth of the duality between root-of-unity numbers and
/// component numbers: the exponent class at an I_1 cusp inverts to the
/// component class at the involution's image cusp.
#[derive(Clone, Debug, Serialize)]
pub struct DualityEntry {
    pub cusp: CuspData,
    pub image: CuspData,
    pub ell: GpClass,
    pub k_at_image: GpClass,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DualityReport {
    pub p: u64,
    pub entries: Vec<DualityEntry>,
    pub all_pass: bool,
}

/// Check ell = k^{-1} across the involution for the tautological section at
/// every I_1 cusp. The two sides go through the two independent inversion
/// routes.
pub fn duality_check(p: u64) -> Result<DualityReport, SurfaceError> {
    validate_prime(p)?;
    let mut entries = Vec::new();
    for r in 1..=half(p) {
        let cusp = CuspData {
            kind: FiberKind::I1,
            index: r,
            p,
        };
        let image = involution(&cusp);
        let ell = root_of_unity_number(p, 1, r)?;
        let k_at_image =
            component_number(p, 1, image.index())?.expect("the section is nonzero");
        let pass = ell == k_at_image.inverse();
        entries.push(DualityEntry {
            cusp,
            image,
            ell,
            k_at_image,
            pass,
        });
    }
    let all_pass = entries.iter().all(|e| e.pass);
    Ok(DualityReport {
        p,
        entries,
        all_pass,
    })
}

/// Component classes on the quotient family: dividing out the torsion
/// section turns each I_1 fiber into an I_p and vice versa, and the induced
/// section meets the new I_p fiber over what was the cusp r/p in the class
/// of r. Over the old I_p cusps the quotient fiber is an I_1, where there is
/// no component to record.
#[derive(Clone, Debug, Serialize)]
pub struct QuotientEntry {
    pub cusp: CuspData,
    pub quotient_kind: FiberKind,
    pub k: Option<GpClass>,
}

pub fn quotient_component_numbers(p: u64) -> Result<Vec<QuotientEntry>, SurfaceError> {
    validate_prime(p)?;
    cusps(p)?
        .into_iter()
        .map(|cusp| {
            let quotient_kind = involution(&cusp).kind();
            let k = match cusp.kind() {
                // k(T') = ell(T)^{-1} = class(r / alpha) at alpha = 1.
                FiberKind::I1 => Some(root_of_unity_number(p, 1, cusp.index())?.inverse()),
                FiberKind::Ip => None,
            };
            Ok(QuotientEntry {
                cusp,
                quotient_kind,
                k,
            })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossCheckEntry {
    pub cusp: CuspData,
    pub alpha: u64,
    pub ell: GpClass,
    pub euclid_lifts: Vec<u64>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossCheckReport {
    pub p: u64,
    pub entries: Vec<CrossCheckEntry>,
    pub all_pass: bool,
}

/// Tie the two inversion routes together over the whole table: for every
/// I_1 cusp and every section index, lift the exponent class to its two
/// residues, invert each with the Euclidean route, and compare against the
/// Fermat route. At alpha = 1 the result must also reproduce the quotient
/// table's component class.
pub fn weil_cross_check(p: u64) -> Result<CrossCheckReport, SurfaceError> {
    validate_prime(p)?;
    let quotient = quotient_component_numbers(p)?;
    let mut entries = Vec::new();
    for r in 1..=half(p) {
        let cusp = CuspData {
            kind: FiberKind::I1,
            index: r,
            p,
        };
        for alpha in 1..p {
            let ell = root_of_unity_number(p, alpha, r)?;
            let expected = ell.inverse();
            let mut euclid_lifts = Vec::with_capacity(2);
            let mut pass = true;
            for a in ell.residues() {
                let lift = w_star(a, p)?;
                euclid_lifts.push(lift);
                if GpClass::class_of(p, lift)? != expected {
                    pass = false;
                }
            }
            if alpha == 1 {
                let q = quotient
                    .iter()
                    .find(|e| e.cusp == cusp)
                    .expect("every cusp appears in the quotient table");
                if q.k != Some(expected) {
                    pass = false;
                }
            }
            entries.push(CrossCheckEntry {
                cusp,
                alpha,
                ell,
                euclid_lifts,
                pass,
            });
        }
    }
    let all_pass = entries.iter().all(|e| e.pass);
    Ok(CrossCheckReport {
        p,
        entries,
        all_pass,
    })
}

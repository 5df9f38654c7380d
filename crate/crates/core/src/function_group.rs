//! Component-wise rational functions on a cycle of rational curves.
//!
//! On an I_m configuration, the functions of interest restrict to each
//! component as `alpha * u^ell * prod(u - lambda_i) / prod(u - mu_k)` with
//! all roots away from the nodes. A tuple of one such function per component
//! belongs to the group `K` when the node orders cancel (condition a), the
//! leading values agree across each node (condition b), and the monomial
//! exponents sum to zero (condition c). The divisor map forgets the node
//! support; a divisor is in its image exactly when it has degree zero and
//! trivial group sum, and `abel_witness` builds the preimage explicitly.

use crate::cyclotomic::CycloElem;
use crate::fiber::{Divisor, FiberError, FiberPoint, FiberShape};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FuncError {
    #[error("the scalar part of a rational function must be nonzero")]
    ZeroScalar,
    #[error("zeros and poles must avoid the nodes (nonzero coordinates)")]
    RootAtNode,
    #[error("cannot evaluate at 0 or at a zero/pole of the function")]
    EvaluationAtZeroOrPole,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KError {
    #[error("expected one function per component ({expected}), got {got}")]
    WrongComponentCount { expected: u64, got: usize },
    #[error("node {node}: adjacent orders do not cancel (sum {sum})")]
    NodeOrderSum { node: u64, sum: i64 },
    #[error("node {node}: leading values disagree across the node")]
    NodeValueMismatch { node: u64 },
    #[error("monomial exponents sum to {total}, expected 0")]
    MonomialDegreeSum { total: i64 },
    #[error(transparent)]
    Func(#[from] FuncError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AbelError {
    #[error("divisor is not principal: degree {degree}, group sum {sum}")]
    NotPrincipal { degree: i64, sum: FiberPoint },
    #[error(transparent)]
    Fiber(#[from] FiberError),
}

/// One component's worth of rational function, stored in factored form:
/// `alpha * u^ell * prod(u - zero) / prod(u - pole)`.
///
/// Invariants: `alpha != 0`, every root is nonzero, and no value appears in
/// both root multisets (common factors are cancelled on construction).
#[derive(Clone, Debug, Serialize)]
pub struct RationalFunc {
    alpha: CycloElem,
    ell: i64,
    zeros: Vec<CycloElem>,
    poles: Vec<CycloElem>,
}

fn multiset_eq(a: &[CycloElem], b: &[CycloElem]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut rest: Vec<&CycloElem> = b.iter().collect();
    for x in a {
        match rest.iter().position(|y| *y == x) {
            Some(i) => {
                rest.swap_remove(i);
            }
            None => return false,
        }
    }
    true
}

impl RationalFunc {
    pub fn new(
        alpha: CycloElem,
        ell: i64,
        zeros: Vec<CycloElem>,
        poles: Vec<CycloElem>,
    ) -> Result<Self, FuncError> {
        if alpha.is_zero() {
            return Err(FuncError::ZeroScalar);
        }
        if zeros.iter().chain(poles.iter()).any(|r| r.is_zero()) {
            return Err(FuncError::RootAtNode);
        }
        let mut zeros = zeros;
        let mut poles = poles;
        // Cancel the multiset intersection so the factored form is reduced.
        let mut i = 0;
        'outer: while i < zeros.len() {
            for j in 0..poles.len() {
                if zeros[i] == poles[j] {
                    zeros.remove(i);
                    poles.remove(j);
                    continue 'outer;
                }
            }
            i += 1;
        }
        Ok(RationalFunc {
            alpha,
            ell,
            zeros,
            poles,
        })
    }

    pub fn constant(alpha: CycloElem) -> Result<Self, FuncError> {
        Self::new(alpha, 0, Vec::new(), Vec::new())
    }

    pub fn one() -> Self {
        Self::constant(CycloElem::one()).expect("1 is a valid constant")
    }

    pub fn alpha(&self) -> &CycloElem {
        &self.alpha
    }

    pub fn ell(&self) -> i64 {
        self.ell
    }

    pub fn zeros(&self) -> &[CycloElem] {
        &self.zeros
    }

    pub fn poles(&self) -> &[CycloElem] {
        &self.poles
    }

    /// Order of vanishing at u = 0.
    pub fn n_zero(&self) -> i64 {
        self.ell
    }

    /// Order of vanishing at u = infinity: f - e - ell for e zeros, f poles.
    pub fn n_infinity(&self) -> i64 {
        self.poles.len() as i64 - self.zeros.len() as i64 - self.ell
    }

    /// Leading value at u = 0: alpha * (-1)^(e+f) * prod zeros / prod poles.
    pub fn c_zero(&self) -> CycloElem {
        let mut v = if (self.zeros.len() + self.poles.len()) % 2 == 1 {
            CycloElem::from_integer(-1)
        } else {
            CycloElem::one()
        };
        v = v * &self.alpha;
        for z in &self.zeros {
            v = v * z;
        }
        for p in &self.poles {
            v = v / p;
        }
        v
    }

    /// Leading value at u = infinity.
    pub fn c_infinity(&self) -> CycloElem {
        self.alpha.clone()
    }

    pub fn is_constant(&self) -> Option<&CycloElem> {
        if self.ell == 0 && self.zeros.is_empty() && self.poles.is_empty() {
            Some(&self.alpha)
        } else {
            None
        }
    }

    /// Value at a point away from 0 and from every zero and pole.
    pub fn evaluate(&self, u: &CycloElem) -> Result<CycloElem, FuncError> {
        let (num, den) = self.evaluate_parts(u)?;
        Ok(num / den)
    }

    /// Same value split as numerator/denominator, letting callers batch the
    /// final field inversions.
    pub(crate) fn evaluate_parts(
        &self,
        u: &CycloElem,
    ) -> Result<(CycloElem, CycloElem), FuncError> {
        if u.is_zero() || self.zeros.contains(u) || self.poles.contains(u) {
            return Err(FuncError::EvaluationAtZeroOrPole);
        }
        let mut num = self.alpha.clone();
        let mut den = CycloElem::one();
        if self.ell >= 0 {
            num = num * u.pow(self.ell).expect("u is nonzero");
        } else {
            den = u.pow(-self.ell).expect("u is nonzero");
        }
        for z in &self.zeros {
            num = num * (u - z);
        }
        for p in &self.poles {
            den = den * (u - p);
        }
        Ok((num, den))
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut zeros = self.zeros.clone();
        zeros.extend(rhs.zeros.iter().cloned());
        let mut poles = self.poles.clone();
        poles.extend(rhs.poles.iter().cloned());
        Self::new(
            self.alpha.checked_mul(&rhs.alpha).expect("nonzero scalars"),
            self.ell + rhs.ell,
            zeros,
            poles,
        )
        .expect("product of valid functions is valid")
    }

    pub fn inv(&self) -> Self {
        Self::new(
            self.alpha.inverse().expect("nonzero scalar"),
            -self.ell,
            self.poles.clone(),
            self.zeros.clone(),
        )
        .expect("inverse of a valid function is valid")
    }
}

impl PartialEq for RationalFunc {
    fn eq(&self, other: &Self) -> bool {
        self.alpha == other.alpha
            && self.ell == other.ell
            && multiset_eq(&self.zeros, &other.zeros)
            && multiset_eq(&self.poles, &other.poles)
    }
}

impl Eq for RationalFunc {}

fn group_roots(roots: &[CycloElem]) -> Vec<(CycloElem, usize)> {
    let mut grouped: Vec<(CycloElem, usize)> = Vec::new();
    for r in roots {
        match grouped.iter_mut().find(|(g, _)| g == r) {
            Some((_, n)) => *n += 1,
            None => grouped.push((r.clone(), 1)),
        }
    }
    grouped
}

impl fmt::Display for RationalFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut num: Vec<String> = Vec::new();
        if !self.alpha.is_one() || (self.ell == 0 && self.zeros.is_empty()) {
            num.push(format!("{}", self.alpha));
        }
        match self.ell {
            0 => {}
            1 => num.push(String::from("u")),
            e => num.push(format!("u^{e}")),
        }
        for (root, count) in group_roots(&self.zeros) {
            match count {
                1 => num.push(format!("(u - {root})")),
                n => num.push(format!("(u - {root})^{n}")),
            }
        }
        write!(f, "{}", num.join(" * "))?;
        let den: Vec<String> = group_roots(&self.poles)
            .into_iter()
            .map(|(root, count)| match count {
                1 => format!("(u - {root})"),
                n => format!("(u - {root})^{n}"),
            })
            .collect();
        match den.len() {
            0 => Ok(()),
            1 => write!(f, " / {}", den[0]),
            _ => write!(f, " / ({})", den.join(" * ")),
        }
    }
}

/// An element of the function group: one rational function per component,
/// satisfying the three node conditions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KElement {
    shape: FiberShape,
    funcs: Vec<RationalFunc>,
}

impl KElement {
    /// Validates the three membership conditions: (a) at each node the order
    /// of the outgoing function at infinity cancels the order of the
    /// incoming function at zero, (b) the leading values across each node
    /// agree, (c) the monomial exponents sum to zero.
    pub fn new(shape: FiberShape, funcs: Vec<RationalFunc>) -> Result<Self, KError> {
        let m = shape.components();
        if funcs.len() as u64 != m {
            return Err(KError::WrongComponentCount {
                expected: m,
                got: funcs.len(),
            });
        }
        for j in 0..funcs.len() {
            let next = (j + 1) % funcs.len();
            let sum = funcs[j].n_infinity() + funcs[next].n_zero();
            if sum != 0 {
                return Err(KError::NodeOrderSum {
                    node: j as u64,
                    sum,
                });
            }
        }
        for j in 0..funcs.len() {
            let next = (j + 1) % funcs.len();
            if funcs[j].c_infinity() != funcs[next].c_zero() {
                return Err(KError::NodeValueMismatch { node: j as u64 });
            }
        }
        let total: i64 = funcs.iter().map(RationalFunc::n_zero).sum();
        if total != 0 {
            return Err(KError::MonomialDegreeSum { total });
        }
        Ok(KElement { shape, funcs })
    }

    pub fn shape(&self) -> FiberShape {
        self.shape
    }

    pub fn funcs(&self) -> &[RationalFunc] {
        &self.funcs
    }

    /// The constant tuple with every component equal to `alpha`.
    pub fn constant(shape: FiberShape, alpha: CycloElem) -> Result<Self, KError> {
        let f = RationalFunc::constant(alpha)?;
        Self::new(shape, vec![f; shape.components() as usize])
    }

    /// Componentwise product; the group structure guarantees validity.
    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.shape, rhs.shape, "component counts must agree");
        let funcs = self
            .funcs
            .iter()
            .zip(&rhs.funcs)
            .map(|(a, b)| a.mul(b))
            .collect();
        Self::new(self.shape, funcs).expect("the group is closed under products")
    }

    /// Componentwise inverse.
    pub fn inv(&self) -> Self {
        let funcs = self.funcs.iter().map(RationalFunc::inv).collect();
        Self::new(self.shape, funcs).expect("the group is closed under inverses")
    }

    /// Divisor of zeros and poles, with the node support thrown away.
    pub fn div_map(&self) -> Divisor {
        let mut d = Divisor::new(self.shape);
        for (j, g) in self.funcs.iter().enumerate() {
            for z in g.zeros() {
                let p = FiberPoint::new(self.shape, j as i64, z.clone())
                    .expect("roots are nonzero");
                d.add_point(p, 1).expect("point is on the divisor's shape");
            }
            for pole in g.poles() {
                let p = FiberPoint::new(self.shape, j as i64, pole.clone())
                    .expect("roots are nonzero");
                d.add_point(p, -1).expect("point is on the divisor's shape");
            }
        }
        d
    }

    /// Some(alpha) when every component is the same constant alpha.
    pub fn is_constant(&self) -> Option<CycloElem> {
        let first = self.funcs[0].is_constant()?;
        for g in &self.funcs[1..] {
            if g.is_constant()? != first {
                return None;
            }
        }
        Some(first.clone())
    }
}

impl Serialize for KElement {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("KElement", 2)?;
        st.serialize_field("m", &self.shape.components())?;
        st.serialize_field("funcs", &self.funcs)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for KElement {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct RawFunc {
            alpha: CycloElem,
            ell: i64,
            #[serde(default)]
            zeros: Vec<CycloElem>,
            #[serde(default)]
            poles: Vec<CycloElem>,
        }
        #[derive(Deserialize)]
        struct Raw {
            m: u64,
            funcs: Vec<RawFunc>,
        }
        let raw = Raw::deserialize(deserializer)?;
        let shape = FiberShape::new(raw.m).map_err(serde::de::Error::custom)?;
        let funcs: Result<Vec<RationalFunc>, _> = raw
            .funcs
            .into_iter()
            .map(|f| {
                RationalFunc::new(f.alpha, f.ell, f.zeros, f.poles)
                    .map_err(serde::de::Error::custom)
            })
            .collect();
        KElement::new(shape, funcs?).map_err(serde::de::Error::custom)
    }
}

/// Degree zero and trivial group sum: exactly the principal divisors.
pub fn abel_check(d: &Divisor) -> bool {
    d.degree() == 0
        && d.sum()
            .expect("divisor sum is defined for stored divisors")
            .is_identity()
}

/// Construct a function tuple with the given divisor, normalized so the
/// component-0 scalar is 1. Fails exactly when the divisor is not principal.
///
/// The zeros and poles on each component are forced by the divisor; the node
/// conditions then pin down every monomial exponent (a telescoping walk from
/// the exponent sum) and every leading constant (chained across nodes from
/// alpha_0 = 1). Both loops close up precisely because the degree vanishes
/// and the group sum is trivial.
pub fn abel_witness(d: &Divisor) -> Result<KElement, AbelError> {
    let shape = d.shape();
    let m = shape.components() as usize;
    let degree = d.degree();
    let sum = d.sum()?;
    if degree != 0 || !sum.is_identity() {
        return Err(AbelError::NotPrincipal { degree, sum });
    }

    let mut zeros: Vec<Vec<CycloElem>> = vec![Vec::new(); m];
    let mut poles: Vec<Vec<CycloElem>> = vec![Vec::new(); m];
    for (p, mult) in d.terms() {
        let j = p.component() as usize;
        let bucket = if *mult > 0 {
            &mut zeros[j]
        } else {
            &mut poles[j]
        };
        for _ in 0..mult.unsigned_abs() {
            bucket.push(p.coord().clone());
        }
    }

    let mut sigma: i64 = 0;
    for (j, (zs, ps)) in zeros.iter().zip(&poles).enumerate() {
        sigma += j as i64 * (zs.len() as i64 - ps.len() as i64);
    }
    debug_assert_eq!(
        sigma.rem_euclid(m as i64),
        0,
        "trivial group sum forces the exponent walk to close"
    );
    let mut ells = Vec::with_capacity(m);
    ells.push(sigma / m as i64);
    for j in 0..m - 1 {
        let balance = poles[j].len() as i64 - zeros[j].len() as i64;
        ells.push(ells[j] - balance);
    }
    debug_assert_eq!(ells.iter().sum::<i64>(), 0);

    let mut alphas = Vec::with_capacity(m);
    alphas.push(CycloElem::one());
    for j in 1..m {
        let mut gamma = if (zeros[j].len() + poles[j].len()) % 2 == 1 {
            CycloElem::from_integer(-1)
        } else {
            CycloElem::one()
        };
        for z in &zeros[j] {
            gamma = gamma * z;
        }
        for p in &poles[j] {
            gamma = gamma / p;
        }
        let prev: &CycloElem = &alphas[j - 1];
        alphas.push(prev / gamma);
    }

    let funcs: Vec<RationalFunc> = (0..m)
        .map(|j| {
            RationalFunc::new(
                alphas[j].clone(),
                ells[j],
                std::mem::take(&mut zeros[j]),
                std::mem::take(&mut poles[j]),
            )
            .expect("divisor coordinates are nonzero")
        })
        .collect();
    let witness =
        KElement::new(shape, funcs).expect("principality makes the constructed tuple valid");
    debug_assert_eq!(witness.div_map(), *d);
    Ok(witness)
}

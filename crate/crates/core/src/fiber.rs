//! Points and divisors on the smooth locus of a cycle of rational curves.
//!
//! An I_m configuration is a cycle of m projective lines; its smooth part is
//! m disjoint copies of C*, indexed by component. A point is a pair
//! (coordinate, component) with nonzero coordinate, and the group law
//! multiplies coordinates while adding components mod m, with the point
//! (1, C_0) as identity. Divisors are finite integer combinations of such
//! points; their degree and group-valued sum are what the principality test
//! in [`crate::function_group`] consumes.

use crate::cyclotomic::{CycloElem, CycloError};
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FiberError {
    #[error("a fiber needs at least one component")]
    EmptyShape,
    #[error("shape mismatch: I_{0} vs I_{1}")]
    ShapeMismatch(u64, u64),
    #[error("fiber points have nonzero coordinates")]
    ZeroCoordinate,
    #[error("torsion order {m} does not divide the component count {shape}")]
    TorsionOrderMismatch { m: u64, shape: u64 },
    #[error("twist factor must satisfy zeta^{0} = 1")]
    TwistNotRootOfUnity(u64),
    #[error(transparent)]
    Cyclo(#[from] CycloError),
}

/// The component count m of an I_m configuration.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FiberShape {
    m: u64,
}

impl FiberShape {
    pub fn new(m: u64) -> Result<Self, FiberError> {
        if m == 0 {
            return Err(FiberError::EmptyShape);
        }
        Ok(FiberShape { m })
    }

    pub fn components(&self) -> u64 {
        self.m
    }
}

impl fmt::Display for FiberShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "I_{}", self.m)
    }
}

/// A smooth point (coord, C_component) of an I_m configuration.
#[derive(Clone, Debug)]
pub struct FiberPoint {
    shape: FiberShape,
    component: u64,
    coord: CycloElem,
}

impl FiberPoint {
    /// Component indices are taken mod m; the coordinate must be nonzero.
    pub fn new(shape: FiberShape, component: i64, coord: CycloElem) -> Result<Self, FiberError> {
        if coord.is_zero() {
            return Err(FiberError::ZeroCoordinate);
        }
        Ok(FiberPoint {
            shape,
            component: component.rem_euclid(shape.m as i64) as u64,
            coord,
        })
    }

    /// The group identity (1, C_0).
    pub fn identity(shape: FiberShape) -> Self {
        FiberPoint {
            shape,
            component: 0,
            coord: CycloElem::one(),
        }
    }

    pub fn shape(&self) -> FiberShape {
        self.shape
    }

    pub fn component(&self) -> u64 {
        self.component
    }

    pub fn coord(&self) -> &CycloElem {
        &self.coord
    }

    pub fn is_identity(&self) -> bool {
        self.component == 0 && self.coord.is_one()
    }

    /// Group law: coordinates multiply, components add mod m.
    pub fn add(&self, rhs: &Self) -> Result<Self, FiberError> {
        if self.shape != rhs.shape {
            return Err(FiberError::ShapeMismatch(self.shape.m, rhs.shape.m));
        }
        Ok(FiberPoint {
            shape: self.shape,
            component: (self.component + rhs.component) % self.shape.m,
            coord: self.coord.checked_mul(&rhs.coord)?,
        })
    }

    pub fn neg(&self) -> Result<Self, FiberError> {
        Ok(FiberPoint {
            shape: self.shape,
            component: (self.shape.m - self.component) % self.shape.m,
            coord: self.coord.inverse()?,
        })
    }

    /// n-fold sum, any integer n.
    pub fn multiple(&self, n: i64) -> Result<Self, FiberError> {
        let m = self.shape.m as i128;
        let component = ((n as i128 * self.component as i128).rem_euclid(m)) as u64;
        Ok(FiberPoint {
            shape: self.shape,
            component,
            coord: self.coord.pow(n)?,
        })
    }

    /// Coordinate change to another standard set: the j-th component's
    /// coordinate is scaled by zeta^j, where zeta^m = 1.
    pub fn twist_coordinates(&self, zeta: &CycloElem) -> Result<Self, FiberError> {
        let m = self.shape.m;
        if !zeta.pow(m as i64)?.is_one() {
            return Err(FiberError::TwistNotRootOfUnity(m));
        }
        Ok(FiberPoint {
            shape: self.shape,
            component: self.component,
            coord: self.coord.checked_mul(&zeta.pow(self.component as i64)?)?,
        })
    }
}

impl PartialEq for FiberPoint {
    fn eq(&self, other: &Self) -> bool {
        self.shape == other.shape
            && self.component == other.component
            && self.coord == other.coord
    }
}

impl Eq for FiberPoint {}

impl fmt::Display for FiberPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, C_{})", self.coord, self.component)
    }
}

impl Serialize for FiberPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("FiberPoint", 2)?;
        st.serialize_field("component", &self.component)?;
        st.serialize_field("coord", &self.coord)?;
        st.end()
    }
}

/// The m-torsion subgroup of I_{shape}: m must divide the component count,
/// and with k = shape/m the m^2 points are (zeta_m^t, C_{s k}) for
/// t, s in [0, m), enumerated with t outermost.
pub fn torsion_points(shape: FiberShape, m: u64) -> Result<Vec<FiberPoint>, FiberError> {
    if m == 0 || shape.m % m != 0 {
        return Err(FiberError::TorsionOrderMismatch { m, shape: shape.m });
    }
    let k = shape.m / m;
    let mut out = Vec::with_capacity((m * m) as usize);
    for t in 0..m {
        for s in 0..m {
            out.push(FiberPoint {
                shape,
                component: s * k,
                coord: CycloElem::root_of_unity(m, t as i64)?,
            });
        }
    }
    Ok(out)
}

/// A finitely supported integer combination of smooth points.
///
/// Terms are merged through semantic point equality and zero multiplicities
/// are dropped, so the term list is duplicate-free.
#[derive(Clone, Debug)]
pub struct Divisor {
    shape: FiberShape,
    terms: Vec<(FiberPoint, i64)>,
}

impl Divisor {
    pub fn new(shape: FiberShape) -> Self {
        Divisor {
            shape,
            terms: Vec::new(),
        }
    }

    pub fn from_terms<I>(shape: FiberShape, terms: I) -> Result<Self, FiberError>
    where
        I: IntoIterator<Item = (FiberPoint, i64)>,
    {
        let mut d = Divisor::new(shape);
        for (point, mult) in terms {
            d.add_point(point, mult)?;
        }
        Ok(d)
    }

    pub fn shape(&self) -> FiberShape {
        self.shape
    }

    pub fn add_point(&mut self, point: FiberPoint, mult: i64) -> Result<(), FiberError> {
        if point.shape != self.shape {
            return Err(FiberError::ShapeMismatch(self.shape.m, point.shape.m));
        }
        if mult == 0 {
            return Ok(());
        }
        for (i, (p, m)) in self.terms.iter_mut().enumerate() {
            if *p == point {
                *m += mult;
                if *m == 0 {
                    self.terms.remove(i);
                }
                return Ok(());
            }
        }
        self.terms.push((point, mult));
        Ok(())
    }

    pub fn terms(&self) -> &[(FiberPoint, i64)] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Multiplicity of one point (0 when absent).
    pub fn multiplicity(&self, point: &FiberPoint) -> i64 {
        self.terms
            .iter()
            .find(|(p, _)| p == point)
            .map_or(0, |(_, m)| *m)
    }

    /// Sum of multiplicities.
    pub fn degree(&self) -> i64 {
        self.terms.iter().map(|(_, m)| m).sum()
    }

    /// Group-valued sum: the fiber point `sum mult * point`.
    pub fn sum(&self) -> Result<FiberPoint, FiberError> {
        let mut acc = FiberPoint::identity(self.shape);
        for (p, m) in &self.terms {
            acc = acc.add(&p.multiple(*m)?)?;
        }
        Ok(acc)
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, FiberError> {
        if self.shape != rhs.shape {
            return Err(FiberError::ShapeMismatch(self.shape.m, rhs.shape.m));
        }
        let mut out = self.clone();
        for (p, m) in &rhs.terms {
            out.add_point(p.clone(), *m)?;
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        Divisor {
            shape: self.shape,
            terms: self.terms.iter().map(|(p, m)| (p.clone(), -m)).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, FiberError> {
        self.add(&rhs.neg())
    }

    /// Terms in a canonical order: by component, then by the coordinate's
    /// coefficient vector after embedding every coordinate into one common
    /// order. Deterministic and representation-independent.
    pub fn sorted_terms(&self) -> Vec<(FiberPoint, i64)> {
        let mut l = 1u64;
        for (p, _) in &self.terms {
            l = num_integer::lcm(l, p.coord.order());
        }
        let mut keyed: Vec<(Vec<crate::BigRational>, FiberPoint, i64)> = self
            .terms
            .iter()
            .map(|(p, m)| {
                let emb = p
                    .coord
                    .embed(l)
                    .unwrap_or_else(|e| panic!("divisor coordinate embedding failed: {e}"));
                (emb.coeffs().to_vec(), p.clone(), *m)
            })
            .collect();
        keyed.sort_by(|a, b| {
            a.1.component
                .cmp(&b.1.component)
                .then_with(|| a.0.cmp(&b.0))
        });
        keyed.into_iter().map(|(_, p, m)| (p, m)).collect()
    }
}

impl PartialEq for Divisor {
    fn eq(&self, other: &Self) -> bool {
        if self.shape != other.shape || self.terms.len() != other.terms.len() {
            return false;
        }
        self.terms
            .iter()
            .all(|(p, m)| other.multiplicity(p) == *m)
    }
}

impl Eq for Divisor {}

impl Serialize for Divisor {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a> {
            component: u64,
            coord: &'a CycloElem,
            mult: i64,
        }
        let sorted = self.sorted_terms();
        let terms: Vec<Term<'_>> = sorted
            .iter()
            .map(|(p, m)| Term {
                component: p.component,
                coord: &p.coord,
                mult: *m,
            })
            .collect();
        let mut st = serializer.serialize_struct("Divisor", 2)?;
        st.serialize_field("m", &self.shape.m)?;
        st.serialize_field("points", &terms)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for Divisor {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Term {
            component: i64,
            coord: CycloElem,
            mult: i64,
        }
        #[derive(Deserialize)]
        struct Raw {
            m: u64,
            points: Vec<Term>,
        }
        let raw = Raw::deserialize(deserializer)?;
        let shape = FiberShape::new(raw.m).map_err(serde::de::Error::custom)?;
        let mut d = Divisor::new(shape);
        for t in raw.points {
            let p = FiberPoint::new(shape, t.component, t.coord)
                .map_err(serde::de::Error::custom)?;
            d.add_point(p, t.mult).map_err(serde::de::Error::custom)?;
        }
        Ok(d)
    }
}

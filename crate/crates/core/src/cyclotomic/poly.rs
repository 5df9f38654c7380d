//! Dense univariate polynomials over the rationals.
//!
//! Internal toolkit for the cyclotomic module: ring arithmetic, Euclidean
//! division, the extended Euclidean algorithm (used to invert residues), and
//! the cyclotomic polynomials Phi_n computed by recursive division
//! `Phi_n = (x^n - 1) / prod { Phi_d : d | n, d < n }`.

use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Coefficients in ascending degree order. Invariant: no trailing zero, so
/// the zero polynomial is the empty vector and `degree` is well defined.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct QPoly {
    coeffs: Vec<BigRational>,
}

impl QPoly {
    pub(crate) fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub(crate) fn zero() -> Self {
        QPoly { coeffs: Vec::new() }
    }

    pub(crate) fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    pub(crate) fn one() -> Self {
        Self::constant(BigRational::one())
    }

    /// The monomial x^n.
    pub(crate) fn monomial(n: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); n + 1];
        coeffs[n] = BigRational::one();
        QPoly { coeffs }
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of a nonzero polynomial; the zero polynomial answers None.
    pub(crate) fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub(crate) fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub(crate) fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub(crate) fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + rhs.coeff(i));
        }
        Self::new(out)
    }

    pub(crate) fn sub(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) - rhs.coeff(i));
        }
        Self::new(out)
    }

    pub(crate) fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub(crate) fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Euclidean division by a nonzero divisor: returns (quotient, remainder)
    /// with deg(remainder) < deg(divisor).
    pub(crate) fn divmod(&self, divisor: &Self) -> (Self, Self) {
        let d = divisor.degree().expect("polynomial division by zero");
        let lead = divisor.coeffs[d].clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= d {
            return (Self::zero(), self.clone());
        }
        let mut quo = vec![BigRational::zero(); rem.len() - d];
        for top in (d..rem.len()).rev() {
            if rem[top].is_zero() {
                continue;
            }
            let factor = &rem[top] / &lead;
            let shift = top - d;
            for (j, c) in divisor.coeffs.iter().enumerate() {
                if !c.is_zero() {
                    let delta = &factor * c;
                    rem[shift + j] -= delta;
                }
            }
            quo[shift] = factor;
        }
        (Self::new(quo), Self::new(rem))
    }

    /// Remainder modulo a nonzero polynomial.
    pub(crate) fn rem(&self, modulus: &Self) -> Self {
        self.divmod(modulus).1
    }

    /// Extended Euclid: (g, s, t) with s*self + t*rhs = g, g monic (or zero
    /// when both inputs are zero).
    pub(crate) fn xgcd(&self, rhs: &Self) -> (Self, Self, Self) {
        let (mut r0, mut r1) = (self.clone(), rhs.clone());
        let (mut s0, mut s1) = (Self::one(), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::one());
        while !r1.is_zero() {
            let (q, r) = r0.divmod(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s = s0.sub(&q.mul(&s1));
            s0 = std::mem::replace(&mut s1, s);
            let t = t0.sub(&q.mul(&t1));
            t0 = std::mem::replace(&mut t1, t);
        }
        if let Some(d) = r0.degree() {
            let lead = r0.coeffs[d].clone();
            if !lead.is_one() {
                let inv = BigRational::one() / lead;
                r0 = r0.scale(&inv);
                s0 = s0.scale(&inv);
                t0 = t0.scale(&inv);
            }
        }
        (r0, s0, t0)
    }
}

/// Euler's totient by trial-division factorization.
pub(crate) fn euler_phi(n: u64) -> u64 {
    assert!(n >= 1, "totient of zero");
    let mut n = n;
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result = result / p * (p - 1);
        }
        p += 1;
    }
    if n > 1 {
        result = result / n * (n - 1);
    }
    result
}

/// Divisors of n in ascending order.
pub(crate) fn divisors(n: u64) -> Vec<u64> {
    assert!(n >= 1);
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

static PHI_CACHE: OnceLock<Mutex<HashMap<u64, Arc<QPoly>>>> = OnceLock::new();

/// The n-th cyclotomic polynomial, memoized. The cache tolerates concurrent
/// insertion (worst case a value is computed twice and one copy wins).
pub(crate) fn cyclotomic_poly(n: u64) -> Arc<QPoly> {
    assert!(n >= 1, "cyclotomic polynomial of order zero");
    let cache = PHI_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&n) {
        return hit.clone();
    }
    let result = if n == 1 {
        QPoly::new(vec![-BigRational::one(), BigRational::one()])
    } else {
        // (x^n - 1) divided by every proper-divisor factor.
        let mut num = QPoly::monomial(n as usize).sub(&QPoly::one());
        for d in divisors(n) {
            if d < n {
                let (q, r) = num.divmod(&cyclotomic_poly(d));
                debug_assert!(r.is_zero(), "Phi_{d} must divide x^{n} - 1 exactly");
                num = q;
            }
        }
        num
    };
    debug_assert_eq!(result.degree(), Some(euler_phi(n) as usize));
    let arc = Arc::new(result);
    cache.lock().unwrap().entry(n).or_insert_with(|| arc.clone());
    arc
}

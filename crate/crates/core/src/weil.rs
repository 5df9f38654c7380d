//! The torsion pairing on an I_{mk} configuration, computed two ways.
//!
//! The m-torsion of the smooth locus is generated by T = (zeta_m, C_0) and
//! S = (1, C_k), so every torsion point is M(t, s) = (zeta_m^t, C_{sk}).
//! The definitional route pulls a torsion point back through multiplication
//! by m, takes a function with that pullback divisor via [`abel_witness`],
//! and evaluates it at translated base points. The closed form
//! e(M(t1, s1), M(t2, s2)) = zeta_m^(t1 s2 - t2 s1) is kept as a separate
//! code path so the two can be checked against each other.

use crate::cyclotomic::{CycloElem, CycloError};
use crate::fiber::{Divisor, FiberError, FiberPoint, FiberShape};
use crate::function_group::{abel_witness, KElement};
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeilError {
    #[error("torsion order must be positive")]
    ZeroTorsionOrder,
    #[error("residue {a} is outside the range 1..{m}")]
    ResidueOutOfRange { a: u64, m: u64 },
    #[error("residue {a} is not invertible mod {m}")]
    ResidueNotInvertible { a: u64, m: u64 },
    #[error(transparent)]
    Cyclo(#[from] CycloError),
    #[error(transparent)]
    Fiber(#[from] FiberError),
}

/// Coordinates (t, s) of the torsion point M(t, s) = (zeta_m^t, C_{sk}),
/// reduced mod the torsion order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorsionLabel {
    pub t: u64,
    pub s: u64,
}

impl TorsionLabel {
    pub fn new(m: u64, t: i64, s: i64) -> Result<Self, WeilError> {
        if m == 0 {
            return Err(WeilError::ZeroTorsionOrder);
        }
        Ok(TorsionLabel {
            t: t.rem_euclid(m as i64) as u64,
            s: s.rem_euclid(m as i64) as u64,
        })
    }
}

/// The closed form zeta_m^(t1 s2 - t2 s1).
pub fn weil_formula(
    m: u64,
    p1: TorsionLabel,
    p2: TorsionLabel,
) -> Result<CycloElem, WeilError> {
    if m == 0 {
        return Err(WeilError::ZeroTorsionOrder);
    }
    let e = (p1.t as i128 * p2.s as i128 - p2.t as i128 * p1.s as i128).rem_euclid(m as i128);
    Ok(CycloElem::root_of_unity(m, e as i64)?)
}

/// The inverse of a mod m, lifted back to the range 1..m. Computed by the
/// extended Euclidean algorithm, deliberately not by Fermat exponentiation,
/// so the two inversion routes in this crate stay independent.
pub fn w_star(a: u64, m: u64) -> Result<u64, WeilError> {
    if a == 0 || a >= m {
        return Err(WeilError::ResidueOutOfRange { a, m });
    }
    let (mut r0, mut r1) = (m as i64, a as i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return Err(WeilError::ResidueNotInvertible { a, m });
    }
    Ok(t0.rem_euclid(m as i64) as u64)
}

/// Pairing calculator for the m-torsion on a fixed shape. Witness functions
/// and partial pairings are cached, so sweeps over many pairs stay cheap.
pub struct PairingEngine {
    shape: FiberShape,
    m: u64,
    k: u64,
    witnesses: RefCell<HashMap<u64, KElement>>,
    leaves: RefCell<HashMap<(u64, u64, u64), CycloElem>>,
}

impl PairingEngine {
    pub fn new(shape: FiberShape, m: u64) -> Result<Self, WeilError> {
        if m == 0 {
            return Err(WeilError::ZeroTorsionOrder);
        }
        if shape.components() % m != 0 {
            return Err(WeilError::Fiber(FiberError::TorsionOrderMismatch {
                m,
                shape: shape.components(),
            }));
        }
        Ok(PairingEngine {
            shape,
            m,
            k: shape.components() / m,
            witnesses: RefCell::new(HashMap::new()),
            leaves: RefCell::new(HashMap::new()),
        })
    }

    pub fn shape(&self) -> FiberShape {
        self.shape
    }

    pub fn torsion_order(&self) -> u64 {
        self.m
    }

    /// The point M(t, s) = (zeta_m^t, C_{sk}).
    pub fn torsion_point(&self, label: TorsionLabel) -> Result<FiberPoint, WeilError> {
        let coord = CycloElem::root_of_unity(self.m, (label.t % self.m) as i64)?;
        Ok(FiberPoint::new(
            self.shape,
            ((label.s % self.m) * self.k) as i64,
            coord,
        )?)
    }

    /// The divisor of preimages of (zeta_m^t2, C_0) under multiplication by
    /// m, minus the preimages of the identity. Coordinates live at order m^2.
    fn pullback_divisor(&self, t2: u64) -> Result<Divisor, WeilError> {
        let m = self.m;
        let mut d = Divisor::new(self.shape);
        for s in 0..m {
            let component = (s * self.k) as i64;
            for i in 0..m {
                let up = CycloElem::root_of_unity(m * m, (t2 + m * i) as i64)?;
                d.add_point(FiberPoint::new(self.shape, component, up)?, 1)?;
                let down = CycloElem::root_of_unity(m, i as i64)?;
                d.add_point(FiberPoint::new(self.shape, component, down)?, -1)?;
            }
        }
        Ok(d)
    }

    fn witness_for(&self, t2: u64) -> Result<KElement, WeilError> {
        if let Some(w) = self.witnesses.borrow().get(&t2) {
            return Ok(w.clone());
        }
        let d = self.pullback_divisor(t2)?;
        let w = abel_witness(&d).expect("multiplication pullbacks are principal");
        self.witnesses.borrow_mut().insert(t2, w.clone());
        Ok(w)
    }

    /// e(M(t1, s1), t2 T), straight from the definition: evaluate the
    /// witness for t2 at a generic base point translated by M(t1, s1),
    /// divided by its value at the base point itself.
    fn leaf(&self, t1: u64, s1: u64, t2: u64) -> Result<CycloElem, WeilError> {
        let (t1, s1, t2) = (t1 % self.m, s1 % self.m, t2 % self.m);
        if let Some(v) = self.leaves.borrow().get(&(t1, s1, t2)) {
            return Ok(v.clone());
        }
        let w = self.witness_for(t2)?;
        let shift = CycloElem::root_of_unity(self.m, t1 as i64)?;
        let g_shifted = &w.funcs()[(s1 * self.k) as usize];
        let g_base = &w.funcs()[0];
        let mut value = None;
        // Any base coordinate away from the zeros and poles works; those all
        // lie on the unit circle, so the first candidate always suffices.
        for x0 in [2i64, 3, 5, 7, 11, 13] {
            let x = CycloElem::from_integer(x0);
            let translated = x.checked_mul(&shift)?;
            if let (Ok((n1, d1)), Ok((n2, d2))) = (
                g_shifted.evaluate_parts(&translated),
                g_base.evaluate_parts(&x),
            ) {
                value = Some((n1 * d2) / (d1 * n2));
                break;
            }
        }
        let v = value.expect("some base point avoids every zero and pole");
        self.leaves.borrow_mut().insert((t1, s1, t2), v.clone());
        Ok(v)
    }

    /// The full pairing, assembled from partial pairings against the two
    /// generators via bilinearity and e(Q, Q) = 1:
    /// e(P, M(t2, s2)) = e(P, t2 T) * e(S, t1 T)^(-s2).
    pub fn pairing(&self, p1: TorsionLabel, p2: TorsionLabel) -> Result<CycloElem, WeilError> {
        let direct = self.leaf(p1.t, p1.s, p2.t)?;
        let against_s = self.leaf(0, 1, p1.t)?;
        Ok(direct * against_s.pow(-((p2.s % self.m) as i64))?)
    }
}

/// One-shot definitional pairing on a fresh engine.
pub fn weil_definitional(
    shape: FiberShape,
    m: u64,
    p1: TorsionLabel,
    p2: TorsionLabel,
) -> Result<CycloElem, WeilError> {
    PairingEngine::new(shape, m)?.pairing(p1, p2)
}

/// Outcome of sweeping every m-torsion pair on a shape: the definitional
/// route is compared against the closed form, then the standard pairing
/// identities and twist invariance are checked on the computed values.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub m: u64,
    pub components: u64,
    pub pairs_checked: u64,
    pub formula_matches: bool,
    pub bilinear: bool,
    pub skew_symmetric: bool,
    pub alternating: bool,
    pub values_in_mu_m: bool,
    pub non_degenerate: bool,
    pub twist_invariant: bool,
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.formula_matches
            && self.bilinear
            && self.skew_symmetric
            && self.alternating
            && self.values_in_mu_m
            && self.non_degenerate
            && self.twist_invariant
            && self.failures.is_empty()
    }
}

/// Check the definitional pairing against the closed form on all m^4 pairs,
/// then verify bilinearity, skew-symmetry, alternation, mu_m-valuedness,
/// non-degeneracy, and invariance under the coordinate twists.
pub fn weil_bilinearity_suite(shape: FiberShape, m: u64) -> Result<SuiteReport, WeilError> {
    let engine = PairingEngine::new(shape, m)?;
    let mu = m as usize;
    let mut report = SuiteReport {
        m,
        components: shape.components(),
        pairs_checked: 0,
        formula_matches: true,
        bilinear: true,
        skew_symmetric: true,
        alternating: true,
        values_in_mu_m: true,
        non_degenerate: true,
        twist_invariant: true,
        failures: Vec::new(),
    };

    // exps[t1][s1][t2][s2] = exponent of zeta_m in e(M(t1,s1), M(t2,s2)),
    // read off by locating the value in the list of all m-th roots.
    let roots: Vec<CycloElem> = (0..m)
        .map(|j| CycloElem::root_of_unity(m, j as i64))
        .collect::<Result<_, _>>()?;
    let mut exps = vec![0u64; mu * mu * mu * mu];
    let idx = |t1: u64, s1: u64, t2: u64, s2: u64| -> usize {
        (((t1 as usize * mu) + s1 as usize) * mu + t2 as usize) * mu + s2 as usize
    };
    for t1 in 0..m {
        for s1 in 0..m {
            for t2 in 0..m {
                for s2 in 0..m {
                    let p1 = TorsionLabel { t: t1, s: s1 };
                    let p2 = TorsionLabel { t: t2, s: s2 };
                    let got = engine.pairing(p1, p2)?;
                    let want = weil_formula(m, p1, p2)?;
                    report.pairs_checked += 1;
                    if got != want {
                        report.formula_matches = false;
                        report.failures.push(format!(
                            "definitional e(M({t1},{s1}), M({t2},{s2})) = {got}, formula gives {want}"
                        ));
                    }
                    match roots.iter().position(|r| r == &got) {
                        Some(e) => exps[idx(t1, s1, t2, s2)] = e as u64,
                        None => {
                            report.values_in_mu_m = false;
                            report.failures.push(format!(
                                "e(M({t1},{s1}), M({t2},{s2})) = {got} is not an m-th root of unity"
                            ));
                        }
                    }
                }
            }
        }
    }

    // Bilinearity in each slot, on the exponent table (addition mod m).
    'bilinear: for t1 in 0..m {
        for s1 in 0..m {
            for t1b in 0..m {
                for s1b in 0..m {
                    for t2 in 0..m {
                        for s2 in 0..m {
                            let joint = exps[idx((t1 + t1b) % m, (s1 + s1b) % m, t2, s2)];
                            let split =
                                (exps[idx(t1, s1, t2, s2)] + exps[idx(t1b, s1b, t2, s2)]) % m;
                            if joint != split {
                                report.bilinear = false;
                                report.failures.push(format!(
                                    "first slot not additive at ({t1},{s1})+({t1b},{s1b}) vs ({t2},{s2})"
                                ));
                                break 'bilinear;
                            }
                            let joint2 = exps[idx(t2, s2, (t1 + t1b) % m, (s1 + s1b) % m)];
                            let split2 =
                                (exps[idx(t2, s2, t1, s1)] + exps[idx(t2, s2, t1b, s1b)]) % m;
                            if joint2 != split2 {
                                report.bilinear = false;
                                report.failures.push(format!(
                                    "second slot not additive at ({t2},{s2}) vs ({t1},{s1})+({t1b},{s1b})"
                                ));
                                break 'bilinear;
                            }
                        }
                    }
                }
            }
        }
    }

    for t1 in 0..m {
        for s1 in 0..m {
            if exps[idx(t1, s1, t1, s1)] != 0 {
                report.alternating = false;
                report
                    .failures
                    .push(format!("e(P, P) != 1 at P = M({t1},{s1})"));
            }
            for t2 in 0..m {
                for s2 in 0..m {
                    if (exps[idx(t1, s1, t2, s2)] + exps[idx(t2, s2, t1, s1)]) % m != 0 {
                        report.skew_symmetric = false;
                        report.failures.push(format!(
                            "e(M({t1},{s1}), M({t2},{s2})) is not inverse to the swap"
                        ));
                    }
                }
            }
            if (t1, s1) != (0, 0) {
                let hit = (0..m).any(|t2| {
                    (0..m).any(|s2| exps[idx(t1, s1, t2, s2)] % m != 0)
                });
                if !hit {
                    report.non_degenerate = false;
                    report
                        .failures
                        .push(format!("M({t1},{s1}) pairs trivially with everything"));
                }
            }
        }
    }

    // Twisting every coordinate on component j by xi^(i j), xi the primitive
    // root of order mk, relabels M(t, s) to M(t + s i, s) and must leave all
    // pairings alone. The relabeling itself is recomputed from the actual
    // coordinate action, not assumed.
    for i in 0..m {
        let xi_i = CycloElem::root_of_unity(shape.components(), i as i64)?;
        for t in 0..m {
            for s in 0..m {
                let point = engine.torsion_point(TorsionLabel { t, s })?;
                let twisted = point.twist_coordinates(&xi_i)?;
                let relabeled = engine.torsion_point(TorsionLabel {
                    t: (t + s * i) % m,
                    s,
                })?;
                if twisted != relabeled {
                    report.twist_invariant = false;
                    report.failures.push(format!(
                        "twist {i} sends M({t},{s}) off the expected torsion point"
                    ));
                }
            }
        }
        for t1 in 0..m {
            for s1 in 0..m {
                for t2 in 0..m {
                    for s2 in 0..m {
                        let plain = exps[idx(t1, s1, t2, s2)];
                        let moved =
                            exps[idx((t1 + s1 * i) % m, s1, (t2 + s2 * i) % m, s2)];
                        if plain != moved {
                            report.twist_invariant = false;
                            report.failures.push(format!(
                                "twist {i} changes e(M({t1},{s1}), M({t2},{s2}))"
                            ));
                        }
                    }
                }
            }
        }
    }

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function_group::RationalFunc;

    fn shape(n: u64) -> FiberShape {
        FiberShape::new(n).unwrap()
    }

    fn zeta(n: u64, k: i64) -> CycloElem {
        CycloElem::root_of_unity(n, k).unwrap()
    }

    fn label(m: u64, t: i64, s: i64) -> TorsionLabel {
        TorsionLabel::new(m, t, s).unwrap()
    }

    #[test]
    fn w_star_inverts_residues() {
        assert_eq!(w_star(3, 7).unwrap(), 5);
        assert_eq!(w_star(2, 5).unwrap(), 3);
        assert_eq!(w_star(1, 2).unwrap(), 1);
        assert_eq!(w_star(6, 7).unwrap(), 6);
        assert!(matches!(
            w_star(2, 4),
            Err(WeilError::ResidueNotInvertible { a: 2, m: 4 })
        ));
        assert!(matches!(
            w_star(0, 5),
            Err(WeilError::ResidueOutOfRange { .. })
        ));
        assert!(matches!(
            w_star(5, 5),
            Err(WeilError::ResidueOutOfRange { .. })
        ));
        for m in 2u64..=50 {
            for a in 1..m {
                if num_integer::gcd(a, m) == 1 {
                    let b = w_star(a, m).unwrap();
                    assert!(b >= 1 && b < m);
                    assert_eq!(a * b % m, 1);
                }
            }
        }
    }

    #[test]
    fn labels_reduce_mod_the_order() {
        assert_eq!(label(5, 7, -1), TorsionLabel { t: 2, s: 4 });
        assert!(matches!(
            TorsionLabel::new(0, 0, 0),
            Err(WeilError::ZeroTorsionOrder)
        ));
    }

    #[test]
    fn formula_examples() {
        // t1 s2 - t2 s1 = 1*4 - 3*2 = -2, so the value is zeta_5^3.
        assert_eq!(
            weil_formula(5, label(5, 1, 2), label(5, 3, 4)).unwrap(),
            zeta(5, 3)
        );
        // The generators pair to a primitive root: e(T, S) = zeta_m.
        assert_eq!(
            weil_formula(2, label(2, 1, 0), label(2, 0, 1)).unwrap(),
            zeta(2, 1)
        );
        assert_eq!(
            weil_formula(5, label(5, 0, 1), label(5, 1, 0)).unwrap(),
            zeta(5, 4)
        );
    }

    #[test]
    fn pullback_divisors_are_principal_with_normalized_witnesses() {
        let engine = PairingEngine::new(shape(6), 3).unwrap();
        for t2 in 0..3 {
            let d = engine.pullback_divisor(t2).unwrap();
            assert_eq!(d.degree(), 0);
            assert!(d.sum().unwrap().is_identity());
            let w = engine.witness_for(t2).unwrap();
            assert_eq!(w.div_map(), d);
            assert_eq!(w.funcs()[0].alpha(), &CycloElem::one());
        }
        // t2 = 0 pulls back to the empty divisor, witnessed by the constant 1.
        assert_eq!(
            engine.witness_for(0).unwrap().is_constant(),
            Some(CycloElem::one())
        );
    }

    #[test]
    fn definitional_pairing_of_the_generators() {
        // On I_2: e(T, S) = -1.
        let engine = PairingEngine::new(shape(2), 2).unwrap();
        let t = label(2, 1, 0);
        let s = label(2, 0, 1);
        assert_eq!(engine.pairing(t, s).unwrap(), zeta(2, 1));
        // On I_5: e(S, T) = zeta_5^{-1}.
        let engine5 = PairingEngine::new(shape(5), 5).unwrap();
        assert_eq!(
            engine5.pairing(label(5, 0, 1), label(5, 1, 0)).unwrap(),
            zeta(5, 4)
        );
    }

    #[test]
    fn partial_pairings_see_only_the_section_component() {
        // e(M(t1, s1), t2 T) = zeta_m^{-t2 s1}: the coordinate part of the
        // first point enters through x^m only and drops out.
        let engine = PairingEngine::new(shape(3), 3).unwrap();
        for t1 in 0..3u64 {
            for s1 in 0..3u64 {
                for t2 in 0..3u64 {
                    let got = engine.leaf(t1, s1, t2).unwrap();
                    let want = zeta(3, -((t2 * s1) as i64));
                    assert_eq!(got, want, "t1={t1} s1={s1} t2={t2}");
                }
            }
        }
    }

    #[test]
    fn closed_form_witness_agrees_with_the_constructed_one() {
        // For k = 1 the witness for t2 has the closed form
        //   g_j = zeta_m^{-j t2} (u^m - zeta_m^{t2}) / (u^m - 1),
        // with both binomials split into linear factors.
        for m in [2u64, 3] {
            let engine = PairingEngine::new(shape(m), m).unwrap();
            for t2 in 1..m {
                let funcs: Vec<RationalFunc> = (0..m)
                    .map(|j| {
                        let zeros: Vec<CycloElem> = (0..m)
                            .map(|i| zeta(m * m, (t2 + m * i) as i64))
                            .collect();
                        let poles: Vec<CycloElem> =
                            (0..m).map(|i| zeta(m, i as i64)).collect();
                        RationalFunc::new(
                            zeta(m, -((j * t2) as i64)),
                            0,
                            zeros,
                            poles,
                        )
                        .unwrap()
                    })
                    .collect();
                let closed = KElement::new(shape(m), funcs).unwrap();
                let built = engine.witness_for(t2).unwrap();
                assert_eq!(built, closed, "m={m} t2={t2}");
            }
        }
    }

    #[test]
    fn pairings_are_invariant_under_coordinate_twists() {
        let m = 3u64;
        let engine = PairingEngine::new(shape(6), m).unwrap();
        let xi = zeta(6, 1);
        for t in 0..m {
            for s in 0..m {
                let twisted = engine
                    .torsion_point(label(m as u64, t as i64, s as i64))
                    .unwrap()
                    .twist_coordinates(&xi)
                    .unwrap();
                let relabeled = engine
                    .torsion_point(TorsionLabel { t: (t + s) % m, s })
                    .unwrap();
                assert_eq!(twisted, relabeled);
            }
        }
    }

    #[test]
    fn suites_pass_on_small_shapes() {
        for (n, m) in [(2u64, 2u64), (3, 3), (4, 2), (6, 3)] {
            let report = weil_bilinearity_suite(shape(n), m).unwrap();
            assert!(report.all_pass(), "I_{n}, m={m}: {:?}", report.failures);
            assert_eq!(report.pairs_checked, m.pow(4));
        }
    }

    #[test]
    fn trivial_torsion_is_degenerate_but_consistent() {
        let report = weil_bilinearity_suite(shape(3), 1).unwrap();
        assert!(report.all_pass());
        assert_eq!(report.pairs_checked, 1);
    }

    #[test]
    fn engines_reject_incompatible_orders() {
        assert!(matches!(
            PairingEngine::new(shape(3), 0),
            Err(WeilError::ZeroTorsionOrder)
        ));
        assert!(matches!(
            PairingEngine::new(shape(3), 2),
            Err(WeilError::Fiber(FiberError::TorsionOrderMismatch { m: 2, shape: 3 }))
        ));
    }

    #[test]
    fn torsion_points_have_the_advertised_coordinates() {
        let engine = PairingEngine::new(shape(6), 3).unwrap();
        let p = engine.torsion_point(label(3, 2, 1)).unwrap();
        assert_eq!(p.component(), 2);
        assert_eq!(p.coord(), &zeta(3, 2));
        assert_eq!(
            engine.torsion_point(label(3, 0, 0)).unwrap(),
            FiberPoint::identity(shape(6))
        );
    }
}

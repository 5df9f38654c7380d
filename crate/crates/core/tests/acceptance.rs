//! Acceptance gate: one test per shipping criterion, each printing a single
//! PASS/FAIL line with its timing. Run with `--nocapture` to see the lines.

use imfiber::{
    abel_check, abel_witness, cusps, duality_check, m_fraction, m_fraction_closed,
    quotient_component_numbers, r_fraction, r_fraction_closed, r_fraction_small_prime,
    weil_bilinearity_suite, z_matrix, BigInt, BigRational, CycloElem, Divisor, FiberKind,
    FiberPoint, FiberShape, KElement, RationalFunc,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::sync::Mutex;
use std::time::{Duration, Instant};

/// Criteria run one at a time so each timing reflects its own work.
static GATE: Mutex<()> = Mutex::new(());

fn finish(name: &str, what: &str, started: Instant, budget: Duration, failures: Vec<String>) {
    let elapsed = started.elapsed();
    let mut failures = failures;
    if elapsed > budget {
        failures.push(format!(
            "took {elapsed:.2?}, budget is {budget:.2?}"
        ));
    }
    if failures.is_empty() {
        println!("{name}: PASS - {what} ({elapsed:.2?})");
    } else {
        println!("{name}: FAIL - {}", failures.join("; "));
        panic!("{name} failed");
    }
}

fn ratio(num: u64, den: u64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

const PRIMES: [u64; 6] = [5, 7, 11, 13, 17, 19];

#[test]
fn criterion_1_component_fractions() {
    let _gate = GATE.lock().unwrap_or_else(|e| e.into_inner());
    let started = Instant::now();
    let mut failures = Vec::new();
    for p in PRIMES {
        for alpha in 1..p {
            for i in 0..=(p - 1) / 2 {
                let computed = m_fraction(p, alpha, i).unwrap();
                let closed = m_fraction_closed(p, i).unwrap();
                let expected = if i == 0 {
                    ratio(1, p + 1)
                } else {
                    ratio(2 * p, p * p - 1)
                };
                if computed != closed || computed != expected {
                    failures.push(format!("p={p} alpha={alpha} i={i}: got {computed}"));
                }
            }
        }
    }
    finish(
        "criterion 1",
        "component-number fractions equal 1/(p+1) and 2p/(p^2-1) for all p, alpha, i",
        started,
        Duration::from_secs(1),
        failures,
    );
}

#[test]
fn criterion_2_root_of_unity_fractions() {
    let _gate = GATE.lock().unwrap_or_else(|e| e.into_inner());
    let started = Instant::now();
    let mut failures = Vec::new();
    for p in PRIMES {
        for alpha in 1..p {
            for i in 1..=(p - 1) / 2 {
                let computed = r_fraction(p, alpha, i).unwrap();
                if computed != r_fraction_closed(p).unwrap() || computed != ratio(2, p - 1) {
                    failures.push(format!("p={p} alpha={alpha} i={i}: got {computed}"));
                }
            }
        }
    }
    for p in [2u64, 3] {
        if r_fraction_small_prime(p).unwrap() != ratio(1, 1) {
            failures.push(format!("degenerate path at p={p}"));
        }
    }
    finish(
        "criterion 2",
        "root-of-unity fractions equal 2/(p-1), with the degenerate p=2,3 path giving 1",
        started,
        Duration::from_secs(1),
        failures,
    );
}

#[test]
fn criterion_3_latin_square() {
    let _gate = GATE.lock().unwrap_or_else(|e| e.into_inner());
    let started = Instant::now();
    let mut failures = Vec::new();
    for p in PRIMES {
        let z = z_matrix(p).unwrap();
        let h = ((p - 1) / 2) as usize;
        let full: Vec<u64> = (1..=h as u64).collect();
        for i in 0..h {
            let mut row = z[i].clone();
            row.sort_unstable();
            if row != full {
                failures.push(format!("p={p}: row {i} is not a permutation"));
            }
            let mut col: Vec<u64> = (0..h).map(|j| z[j][i]).collect();
            col.sort_unstable();
            if col != full {
                failures.push(format!("p={p}: column {i} is not a permutation"));
            }
        }
    }
    finish(
        "criterion 3",
        "every row and column of the class table is a permutation",
        started,
        Duration::from_secs(1),
        failures,
    );
}

#[test]
fn criterion_4_duality() {
    let _gate = GATE.lock().unwrap_or_else(|e| e.into_inner());
    let started = Instant::now();
    let mut failures = Vec::new();
    for p in PRIMES {
        let report = duality_check(p).unwrap();
        if !report.all_pass {
            failures.push(format!("p={p}: duality fails"));
        }
        if report.entries.len() as u64 != (p - 1) / 2 {
            failures.push(format!("p={p}: expected one entry per nodal cusp"));
        }
        // The quotient table must carry the inverted exponent classes.
        let quotient = quotient_component_numbers(p).unwrap();
        if quotient.len() != cusps(p).unwrap().len() {
            failures.push(format!("p={p}: quotient table size"));
        }
        for entry in &quotient {
            match entry.cusp.kind() {
                FiberKind::I1 => {
                    let ell = imfiber::root_of_unity_number(p, 1, entry.cusp.index()).unwrap();
                    if entry.k != Some(ell.inverse()) || entry.quotient_kind != FiberKind::Ip {
                        failures.push(format!(
                            "p={p}: quotient at {} does not invert the exponent",
                            entry.cusp.rep()
                        ));
                    }
                }
                FiberKind::Ip => {
                    if entry.k.is_some() || entry.quotient_kind != FiberKind::I1 {
                        failures.push(format!("p={p}: quotient at {}", entry.cusp.rep()));
                    }
                }
            }
        }
    }
    finish(
        "criterion 4",
        "exponent classes invert to component classes across the involution and the quotient",
        started,
        Duration::from_secs(1),
        failures,
    );
}

#[test]
fn criterion_5_pairing() {
    let _gate = GATE.lock().unwrap_or_else(|e| e.into_inner());
    let started = Instant::now();
    let mut failures = Vec::new();
    let mut pairs = 0u64;
    for m in 2u64..=7 {
        for k in 1u64..=2 {
            let shape = FiberShape::new(m * k).unwrap();
            match weil_bilinearity_suite(shape, m) {
                Ok(report) => {
                    pairs += report.pairs_checked;
                    if !report.all_pass() {
                        failures.push(format!(
                            "m={m} k={k}: {}",
                            report.failures.join("; ")
                        ));
                    }
                }
                Err(e) => failures.push(format!("m={m} k={k}: {e}")),
            }
        }
    }
    let expected: u64 = (2u64..=7).map(|m| 2 * m.pow(4)).sum();
    if pairs != expected {
        failures.push(format!("checked {pairs} pairs, expected {expected}"));
    }
    finish(
        "criterion 5",
        "definitional and closed-form pairings agree on every pair, with all identities and twist invariance",
        started,
        Duration::from_secs(30),
        failures,
    );
}

fn func(alpha: CycloElem, ell: i64, zeros: Vec<CycloElem>, poles: Vec<CycloElem>) -> RationalFunc {
    RationalFunc::new(alpha, ell, zeros, poles).unwrap()
}

fn zeta(n: u64, k: i64) -> CycloElem {
    CycloElem::root_of_unity(n, k).unwrap()
}

fn int(n: i64) -> CycloElem {
    CycloElem::from_integer(n)
}

/// The two reference tuples with divisor m(z, C_{alpha k}) - m(1, C_0).
fn reference_tuple(m: u64, k: u64, alpha: u64, z: &CycloElem) -> Vec<RationalFunc> {
    let sign = if m % 2 == 1 { int(-1) } else { int(1) };
    let mk = (m * k) as usize;
    let (a, mi) = (alpha as i64, m as i64);
    if alpha == 0 {
        (0..mk)
            .map(|j| {
                if j == 0 {
                    func(int(1), 0, vec![z.clone(); m as usize], vec![int(1); m as usize])
                } else {
                    RationalFunc::one()
                }
            })
            .collect()
    } else {
        let pivot = (alpha * k) as usize;
        (0..mk)
            .map(|j| {
                if j == 0 {
                    func(int(1), a, vec![], vec![int(1); m as usize])
                } else if j < pivot {
                    func(int(1), a - mi, vec![], vec![])
                } else if j == pivot {
                    func(sign.clone(), a - mi, vec![z.clone(); m as usize], vec![])
                } else {
                    func(sign.clone(), a, vec![], vec![])
                }
            })
            .collect()
    }
}

fn random_coord(rng: &mut StdRng) -> CycloElem {
    let num = [-4i64, -3, -2, -1, 1, 2, 3, 4][rng.gen_range(0..8)];
    let den = rng.gen_range(1i64..=4);
    let e = rng.gen_range(0i64..12);
    int(num) / int(den) * zeta(12, e)
}

fn random_divisor(rng: &mut StdRng, shape: FiberShape) -> Divisor {
    let mut d = Divisor::new(shape);
    for _ in 0..rng.gen_range(0..5) {
        let component = rng.gen_range(0..shape.components()) as i64;
        let mult = rng.gen_range(-3i64..=3);
        let p = FiberPoint::new(shape, component, random_coord(rng)).unwrap();
        d.add_point(p, mult).unwrap();
    }
    d
}

fn balance(mut d: Divisor) -> Divisor {
    let s = d.shape();
    let total = d.sum().unwrap();
    d.add_point(total.neg().unwrap(), 1).unwrap();
    let deg = d.degree();
    d.add_point(FiberPoint::identity(s), -deg).unwrap();
    d
}

#[test]
fn criterion_6_divisor_criterion() {
    let _gate = GATE.lock().unwrap_or_else(|e| e.into_inner());
    let started = Instant::now();
    let mut failures = Vec::new();

    // (i) Reference tuples validate and carry the stated divisors, for all
    // section indices and every primitive coordinate root.
    for m in [2u64, 3, 5] {
        for k in [1u64, 2] {
            let shape = FiberShape::new(m * k).unwrap();
            for alpha in 0..m {
                for e in (1..=m).filter(|e| num_integer::gcd(*e, m) == 1) {
                    let z = zeta(m, e as i64);
                    let g = match KElement::new(shape, reference_tuple(m, k, alpha, &z)) {
                        Ok(g) => g,
                        Err(err) => {
                            failures.push(format!("m={m} k={k} alpha={alpha}: {err}"));
                            continue;
                        }
                    };
                    let expected = Divisor::from_terms(
                        shape,
                        vec![
                            (
                                FiberPoint::new(shape, (alpha * k) as i64, z.clone()).unwrap(),
                                m as i64,
                            ),
                            (FiberPoint::identity(shape), -(m as i64)),
                        ],
                    )
                    .unwrap();
                    if g.div_map() != expected {
                        failures.push(format!("m={m} k={k} alpha={alpha}: wrong divisor"));
                    }
                }
            }
        }
    }

    // (ii) The witness succeeds exactly on divisors passing both checks,
    // and reproduces the divisor, over 500 random divisors per shape.
    let mut rng = StdRng::seed_from_u64(0xfeed_beef);
    for mk in [2u64, 3, 4, 5, 6, 10] {
        let shape = FiberShape::new(mk).unwrap();
        for trial in 0..500 {
            let raw = random_divisor(&mut rng, shape);
            let d = if trial % 2 == 0 { balance(raw) } else { raw };
            let principal = abel_check(&d);
            match abel_witness(&d) {
                Ok(w) => {
                    if !principal {
                        failures.push(format!("I_{mk} trial {trial}: witness without principality"));
                    }
                    if w.div_map() != d {
                        failures.push(format!("I_{mk} trial {trial}: witness has wrong divisor"));
                    }
                }
                Err(_) if principal => {
                    failures.push(format!("I_{mk} trial {trial}: principal divisor rejected"));
                }
                Err(_) => {}
            }
        }
    }

    // (iii) Random group elements have divisors passing both checks, and
    // (iv) the kernel of the divisor map is exactly the constants.
    for trial in 0..220 {
        let mk = [2u64, 3, 4, 5, 6, 10][trial % 6];
        let shape = FiberShape::new(mk).unwrap();
        let g = abel_witness(&balance(random_divisor(&mut rng, shape))).unwrap();
        let h = abel_witness(&balance(random_divisor(&mut rng, shape))).unwrap();
        let c = KElement::constant(shape, random_coord(&mut rng)).unwrap();
        let combined = g.mul(&h.inv()).mul(&c);
        if !abel_check(&combined.div_map()) {
            failures.push(format!("trial {trial}: group element fails the divisor checks"));
        }
        if combined.div_map().is_empty() && combined.is_constant().is_none() {
            failures.push(format!("trial {trial}: empty divisor from a nonconstant"));
        }
        let trivial = combined.mul(&combined.inv());
        if trivial.is_constant() != Some(CycloElem::one()) || !trivial.div_map().is_empty() {
            failures.push(format!("trial {trial}: g/g is not the constant 1"));
        }
        if !c.div_map().is_empty() {
            failures.push(format!("trial {trial}: constant with nonempty divisor"));
        }
    }

    finish(
        "criterion 6",
        "reference tuples, witness/check equivalence on 3000 random divisors, and the constant kernel",
        started,
        Duration::from_secs(60),
        failures,
    );
}

/// Integer polynomials, ascending coefficients: just enough arithmetic to
/// rebuild the cyclotomic polynomials by Moebius inversion as an
/// independent oracle.
mod zpoly {
    pub fn mul(a: &[i64], b: &[i64]) -> Vec<i64> {
        let mut out = vec![0i64; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }

    /// Exact division, panicking on a nonzero remainder.
    pub fn div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
        let mut rem = num.to_vec();
        let dlead = *den.last().unwrap();
        let mut quo = vec![0i64; rem.len() - den.len() + 1];
        for i in (0..quo.len()).rev() {
            let c = rem[i + den.len() - 1] / dlead;
            quo[i] = c;
            for (j, d) in den.iter().enumerate() {
                rem[i + j] -= c * d;
            }
        }
        assert!(rem.iter().all(|c| *c == 0), "division was not exact");
        quo
    }

    pub fn x_pow_minus_one(n: u64) -> Vec<i64> {
        let mut v = vec![0i64; n as usize + 1];
        v[0] = -1;
        v[n as usize] = 1;
        v
    }

    pub fn moebius(mut n: u64) -> i64 {
        let mut mu = 1i64;
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                n /= d;
                if n % d == 0 {
                    return 0;
                }
                mu = -mu;
            }
            d += 1;
        }
        if n > 1 {
            mu = -mu;
        }
        mu
    }

    /// Phi_n as prod over d | n of (x^(n/d) - 1)^mu(d).
    pub fn cyclotomic(n: u64) -> Vec<i64> {
        let mut num = vec![1i64];
        let mut den = vec![1i64];
        for d in 1..=n {
            if n % d != 0 {
                continue;
            }
            match moebius(d) {
                1 => num = mul(&num, &x_pow_minus_one(n / d)),
                -1 => den = mul(&den, &x_pow_minus_one(n / d)),
                _ => {}
            }
        }
        div_exact(&num, &den)
    }
}

#[test]
fn criterion_7_cyclotomic_core() {
    let _gate = GATE.lock().unwrap_or_else(|e| e.into_inner());
    let started = Instant::now();
    let mut failures = Vec::new();

    // Field axioms at every order up to 50, on seeded random elements.
    let mut rng = StdRng::seed_from_u64(0xc0ffee);
    let random_elem = |rng: &mut StdRng, n: u64| {
        let mut acc = CycloElem::zero();
        for _ in 0..3 {
            let num = rng.gen_range(-4i64..=4);
            let den = rng.gen_range(1i64..=4);
            let e = rng.gen_range(0..n) as i64;
            acc = acc + int(num) / int(den) * zeta(n, e);
        }
        acc
    };
    for n in 1u64..=50 {
        for _ in 0..4 {
            let a = random_elem(&mut rng, n);
            let b = random_elem(&mut rng, n);
            let c = random_elem(&mut rng, n);
            if &a + &b != &b + &a
                || (&a + &b) + &c != &a + (&b + &c)
                || &a * &b != &b * &a
                || (&a * &b) * &c != &a * (&b * &c)
                || &a * (&b + &c) != &a * &b + &a * &c
                || !(&a - &a).is_zero()
                || &a * &CycloElem::one() != a
            {
                failures.push(format!("field axiom failed at order {n}"));
            }
            if !a.is_zero() {
                let inv = a.inverse().unwrap();
                if !(&a * &inv).is_one() {
                    failures.push(format!("inverse failed at order {n}"));
                }
            }
        }
    }

    // Embeddings into larger orders are injective ring maps.
    for (n, target) in [(2u64, 50u64), (3, 48), (5, 50), (6, 42), (7, 49), (12, 48), (10, 40)] {
        for _ in 0..4 {
            let a = random_elem(&mut rng, n);
            let b = random_elem(&mut rng, n);
            let (ea, eb) = (a.embed(target).unwrap(), b.embed(target).unwrap());
            if ea != a || eb != b {
                failures.push(format!("embedding {n} -> {target} moved a value"));
            }
            if &ea + &eb != (&a + &b).embed(target).unwrap()
                || &ea * &eb != (&a * &b).embed(target).unwrap()
            {
                failures.push(format!("embedding {n} -> {target} is not a ring map"));
            }
        }
    }

    // Frozen minimal-polynomial coefficients for every order up to 30,
    // cross-checked against a Moebius-product oracle built here from
    // integer polynomial arithmetic.
    let frozen: [(u64, Vec<i64>); 30] = [
        (1, vec![-1, 1]),
        (2, vec![1, 1]),
        (3, vec![1, 1, 1]),
        (4, vec![1, 0, 1]),
        (5, vec![1, 1, 1, 1, 1]),
        (6, vec![1, -1, 1]),
        (7, vec![1, 1, 1, 1, 1, 1, 1]),
        (8, vec![1, 0, 0, 0, 1]),
        (9, vec![1, 0, 0, 1, 0, 0, 1]),
        (10, vec![1, -1, 1, -1, 1]),
        (11, vec![1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1]),
        (12, vec![1, 0, -1, 0, 1]),
        (13, vec![1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1]),
        (14, vec![1, -1, 1, -1, 1, -1, 1]),
        (15, vec![1, -1, 0, 1, -1, 1, 0, -1, 1]),
        (16, vec![1, 0, 0, 0, 0, 0, 0, 0, 1]),
        (17, vec![1; 17]),
        (18, vec![1, 0, 0, -1, 0, 0, 1]),
        (19, vec![1; 19]),
        (20, vec![1, 0, -1, 0, 1, 0, -1, 0, 1]),
        (21, vec![1, -1, 0, 1, -1, 0, 1, 0, -1, 1, 0, -1, 1]),
        (22, vec![1, -1, 1, -1, 1, -1, 1, -1, 1, -1, 1]),
        (23, vec![1; 23]),
        (24, vec![1, 0, 0, 0, -1, 0, 0, 0, 1]),
        (25, vec![1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1]),
        (26, vec![1, -1, 1, -1, 1, -1, 1, -1, 1, -1, 1, -1, 1]),
        (27, vec![1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1]),
        (28, vec![1, 0, -1, 0, 1, 0, -1, 0, 1, 0, -1, 0, 1]),
        (29, vec![1; 29]),
        (30, vec![1, 1, 0, -1, -1, -1, 0, 1, 1]),
    ];
    for (n, expected) in &frozen {
        let got = imfiber::cyclotomic::cyclotomic_polynomial(*n).unwrap();
        let expected_big: Vec<BigInt> = expected.iter().map(|c| BigInt::from(*c)).collect();
        if got != expected_big {
            failures.push(format!("minimal polynomial at order {n} drifted"));
        }
        let oracle: Vec<BigInt> = zpoly::cyclotomic(*n).iter().map(|c| BigInt::from(*c)).collect();
        if got != oracle {
            failures.push(format!("order {n} disagrees with the Moebius oracle"));
        }
    }

    finish(
        "criterion 7",
        "field axioms and embeddings through order 50, minimal polynomials through order 30",
        started,
        Duration::from_secs(5),
        failures,
    );
}

//! Multiplicative characters of `F_q*` and the character-sum checks built on
//! them.
//!
//! `χ_j(g^t) = exp(2πi·jt/(q-1))`, extended by `χ(0) = 0`. Values are carried as
//! exponent residues in `Z_{q-1}` and only turned into floating-point complex
//! numbers when summed. All threshold inequalities are decided in exact
//! rational arithmetic.

use std::f64::consts::TAU;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bits::BitSet;
use crate::factor::factor;
use crate::field::{Field, FieldElement, FieldError};
use crate::poly::{value_set, Poly, PolyError};

/// Absolute slack on Weil-bound comparisons.
pub const WEIL_TOLERANCE: f64 = 1e-6;
/// Default budget of partial products for [`find_distinct_product_witness`].
pub const WITNESS_BUDGET: u64 = 100_000_000;

pub type Rational = Ratio<i128>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CharError {
    #[error("the scalar a must be nonzero")]
    ZeroScalar,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Clone, Copy, Debug)]
pub struct Character<'a> {
    field: &'a Field,
    index: u64,
}

impl<'a> Character<'a> {
    pub fn new(field: &'a Field, index: u64) -> Self {
        Character {
            field,
            index: index % field.order(),
        }
    }

    pub fn field(&self) -> &'a Field {
        self.field
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn order(&self) -> u64 {
        let n = self.field.order();
        n / self.index.gcd(&n)
    }

    pub fn is_trivial(&self) -> bool {
        self.index == 0
    }

    /// `e` with `χ(a) = ω^e`, `ω = exp(2πi/(q-1))`; `None` at zero.
    pub fn exponent(&self, a: FieldElement) -> Option<u64> {
        let t = self.field.dlog(a).ok()?;
        Some(crate::arith::mul_mod(self.index, t, self.field.order()))
    }

    pub fn value(&self, a: FieldElement) -> Complex64 {
        match self.exponent(a) {
            None => Complex64::new(0.0, 0.0),
            Some(e) => root_of_unity(e, self.field.order()),
        }
    }
}

fn root_of_unity(e: u64, n: u64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * e as f64 / n as f64)
}

/// All `q - 1` characters, trivial first.
pub fn characters(field: &Field) -> impl Iterator<Item = Character<'_>> {
    (0..field.order()).map(move |j| Character::new(field, j))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SumResult {
    pub re: f64,
    pub im: f64,
    pub magnitude: f64,
    /// `(roots - 1)·√q`.
    pub bound: f64,
}

impl SumResult {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// `Σ_{x ∈ F_q} χ(a·f(x))` by direct summation.
pub fn char_sum(chi: &Character<'_>, f: &Poly, a: FieldElement) -> Result<SumResult, CharError> {
    if a.is_zero() {
        return Err(CharError::ZeroScalar);
    }
    let field = chi.field();
    let roots = crate::factor::radical_root_count(field, f)?;
    let value: Complex64 = field
        .elements()
        .map(|x| chi.value(field.mul(a, f.eval(x, field))))
        .sum();
    Ok(SumResult {
        re: value.re,
        im: value.im,
        magnitude: value.norm(),
        bound: weil_bound(roots, field.q()),
    })
}

pub fn weil_bound(roots: usize, q: u64) -> f64 {
    (roots as f64 - 1.0) * (q as f64).sqrt()
}

/// Worst case over `a` for one character.
#[derive(Clone, Debug, Serialize)]
pub struct WeilRow {
    pub q: u64,
    pub f: String,
    pub char_index: u64,
    pub order: u64,
    pub a: u64,
    pub magnitude: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct WeilReport {
    pub q: u64,
    pub f: String,
    pub roots: usize,
    pub rows: Vec<WeilRow>,
    /// `(char_index, order)` pairs whose hypothesis fails for `f`.
    pub skipped: Vec<(u64, u64)>,
    /// Largest `|sum| / bound` over characters with a positive bound.
    pub max_ratio: f64,
    pub violations: usize,
}

impl WeilReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Checks the Weil bound for every nontrivial character and every `a ∈ F_q*`.
pub fn weil_verify(field: &Field, f: &Poly) -> Result<WeilReport, CharError> {
    if f.is_constant() {
        return Err(PolyError::ConstantPolynomial.into());
    }
    if !f.is_monic() {
        return Err(CharError::HypothesisViolated("f must be monic".into()));
    }
    let fac = factor(field, f)?;
    let roots: usize = fac.factors.iter().map(|(p, _)| p.degree().unwrap_or(0)).sum();
    let mult_gcd = fac.multiplicity_gcd();
    let ord = field.order();
    let bound = weil_bound(roots, field.q());
    let label = f.format(field);

    // Histogram of dlog f(x) over x with f(x) != 0.
    let mut hist = vec![0u64; ord as usize];
    for x in field.elements() {
        let y = f.eval(x, field);
        if let Ok(t) = field.dlog(y) {
            hist[t as usize] += 1;
        }
    }
    let bins: Vec<(u64, f64)> = hist
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(t, &c)| (t as u64, c as f64))
        .collect();
    let roots_table: Vec<Complex64> = (0..ord).map(|e| root_of_unity(e, ord)).collect();

    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    let mut max_ratio = 0.0f64;
    let mut violations = 0;
    for j in 1..ord {
        let d = ord / j.gcd(&ord);
        if mult_gcd % d == 0 {
            skipped.push((j, d));
            continue;
        }
        let mut worst = (0u64, -1.0f64);
        for a in field.units() {
            let la = field.dlog(a)?;
            let mut acc = Complex64::new(0.0, 0.0);
            for &(t, c) in &bins {
                let e = (j * ((t + la) % ord)) % ord;
                acc += roots_table[e as usize] * c;
            }
            let mag = acc.norm();
            if mag > worst.1 {
                worst = (a.encoding(), mag);
            }
        }
        let pass = worst.1 <= bound + WEIL_TOLERANCE;
        if !pass {
            violations += 1;
        }
        if bound > 0.0 {
            max_ratio = max_ratio.max(worst.1 / bound);
        }
        rows.push(WeilRow {
            q: field.q(),
            f: label.clone(),
            char_index: j,
            order: d,
            a: worst.0,
            magnitude: worst.1,
            bound,
            pass,
        });
    }
    Ok(WeilReport {
        q: field.q(),
        f: label,
        roots,
        rows,
        skipped,
        max_ratio,
        violations,
    })
}

/// Every monic polynomial of the given degree, in coefficient-encoding order.
pub fn monic_polys(field: &Field, degree: usize) -> impl Iterator<Item = Poly> + '_ {
    let q = field.q();
    let total = q.pow(degree as u32);
    (0..total).map(move |mut idx| {
        let mut coeffs = Vec::with_capacity(degree + 1);
        for _ in 0..degree {
            coeffs.push(field.element(idx % q).expect("in range"));
            idx /= q;
        }
        coeffs.push(FieldElement::ONE);
        Poly::new(coeffs)
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct WeilGridSummary {
    pub q: u64,
    pub degree: usize,
    pub polys: usize,
    /// `(f, χ)` pairs checked, each over all `a ∈ F_q*`.
    pub pairs_checked: usize,
    pub pairs_skipped: usize,
    pub violations: usize,
    pub max_ratio: f64,
}

/// [`weil_verify`] over all monic polynomials of one degree, in parallel.
pub fn weil_grid(field: &Field, degree: usize) -> Result<WeilGridSummary, CharError> {
    let polys: Vec<Poly> = monic_polys(field, degree).collect();
    let reports = polys
        .par_iter()
        .map(|f| weil_verify(field, f))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(WeilGridSummary {
        q: field.q(),
        degree,
        polys: polys.len(),
        pairs_checked: reports.iter().map(|r| r.rows.len()).sum(),
        pairs_skipped: reports.iter().map(|r| r.skipped.len()).sum(),
        violations: reports.iter().map(|r| r.violations).sum(),
        max_ratio: reports.iter().map(|r| r.max_ratio).fold(0.0, f64::max),
    })
}

fn membership(field: &Field, set: &[FieldElement]) -> BitSet {
    BitSet::from_indices(field.q() as usize, set.iter().map(|a| a.encoding() as usize))
}

/// `#{(a, b, x) ∈ A × B × F_q : ab = f(x)}`.
pub fn count_representations(field: &Field, a_set: &[FieldElement], b_set: &[FieldElement], f: &Poly) -> u64 {
    let in_b = membership(field, b_set);
    let inverses: Vec<FieldElement> = a_set
        .iter()
        .filter_map(|&a| field.inv(a))
        .collect();
    field
        .elements()
        .map(|x| f.eval(x, field))
        .filter(|y| !y.is_zero())
        .map(|y| {
            inverses
                .iter()
                .filter(|&&ai| in_b.contains(field.mul(y, ai).encoding() as usize))
                .count() as u64
        })
        .sum()
}

/// `(m-1)(q-1)/(q-m)`, defined for `m < q`.
pub fn c_m(q: u64, m: u64) -> Option<Rational> {
    (m < q).then(|| Rational::new((m as i128 - 1) * (q as i128 - 1), q as i128 - m as i128))
}

/// `q·((q-1)/(q-m))²·(m-1)²`.
pub fn representation_threshold(q: u64, m: u64) -> Option<Rational> {
    c_m(q, m).map(|c| c * c * Rational::from_integer(q as i128))
}

/// Exact test of `size >= 8·C_m·√q + 2k + 2`.
pub fn meets_distinct_product_threshold(size: u64, q: u64, m: u64, k: u64) -> bool {
    let Some(c) = c_m(q, m) else {
        return false;
    };
    let slack = size as i128 - 2 * k as i128 - 2;
    if slack < 0 {
        return false;
    }
    // slack >= 8 c sqrt(q)  <=>  slack^2 >= 64 c^2 q  (both sides nonnegative)
    Rational::from_integer(slack * slack) >= c * c * Rational::from_integer(64 * q as i128)
}

pub fn distinct_product_threshold_value(q: u64, m: u64, k: u64) -> Option<f64> {
    c_m(q, m).map(|c| {
        8.0 * (*c.numer() as f64 / *c.denom() as f64) * (q as f64).sqrt() + 2.0 * k as f64 + 2.0
    })
}

fn check_no_power_multiple(field: &Field, f: &Poly) -> Result<(), CharError> {
    let g = factor(field, f)?.multiplicity_gcd();
    let d = g.gcd(&field.order());
    if d > 1 {
        return Err(CharError::HypothesisViolated(format!(
            "f is a constant multiple of a {d}-th power"
        )));
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct RepresentationReport {
    pub product: u64,
    pub threshold: String,
    pub above_threshold: bool,
    pub representations: u64,
    pub implication_holds: bool,
}

/// Decides `|A||B| > q((q-1)/(q-m))²(m-1)²` and checks that it forces a
/// representation `ab = f(x)`.
pub fn representation_threshold_check(
    field: &Field,
    f: &Poly,
    a_set: &[FieldElement],
    b_set: &[FieldElement],
) -> Result<RepresentationReport, CharError> {
    let m = f.degree().ok_or(PolyError::ZeroPolynomial)? as u64;
    if m <= 1 || m >= field.q() {
        return Err(CharError::HypothesisViolated(format!(
            "degree {m} outside (1, {})",
            field.q()
        )));
    }
    check_no_power_multiple(field, f)?;
    let threshold = representation_threshold(field.q(), m).expect("m < q");
    let product = (a_set.len() * b_set.len()) as u64;
    let above = Rational::from_integer(product as i128) > threshold;
    let representations = count_representations(field, a_set, b_set, f);
    Ok(RepresentationReport {
        product,
        threshold: threshold.to_string(),
        above_threshold: above,
        representations,
        implication_holds: !above || representations > 0,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WitnessOutcome {
    Found {
        elements: Vec<FieldElement>,
        x0: FieldElement,
    },
    None,
    Inconclusive,
}

/// Exhaustive search for distinct `a_i ∈ A_i` with `a_1⋯a_k ∈ f(F_q)`.
///
/// Works in discrete-log space and prunes a partial product when no
/// completion through the remaining sets (ignoring distinctness) can reach the
/// value set. Sets are scanned in increasing discrete-log order.
pub fn find_distinct_product_witness(
    field: &Field,
    f: &Poly,
    sets: &[Vec<FieldElement>],
    budget: u64,
) -> WitnessOutcome {
    let ord = field.order() as usize;
    let k = sets.len();
    if k == 0 {
        return WitnessOutcome::None;
    }
    let mut targets = BitSet::new(ord);
    for y in value_set(field, f).iter() {
        if let Ok(t) = field.dlog(y) {
            targets.insert(t as usize);
        }
    }
    let logs: Vec<Vec<usize>> = sets
        .iter()
        .map(|s| {
            let mut v: Vec<usize> = s
                .iter()
                .filter_map(|&a| field.dlog(a).ok())
                .map(|t| t as usize)
                .collect();
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect();
    // reach[i] = A_i ⊕ … ⊕ A_{k-1}; reach[k] = {0}
    let mut reach = vec![BitSet::from_indices(ord, [0]); k + 1];
    for i in (0..k).rev() {
        let here = BitSet::from_indices(ord, logs[i].iter().copied());
        reach[i] = here.cyclic_sum(&reach[i + 1]);
    }

    struct Search<'s> {
        ord: usize,
        logs: &'s [Vec<usize>],
        reach: &'s [BitSet],
        targets: &'s BitSet,
        budget: u64,
        spent: u64,
        chosen: Vec<usize>,
    }

    impl Search<'_> {
        fn feasible(&self, level: usize, sigma: usize) -> bool {
            // (targets - sigma) ∩ reach[level] ≠ ∅
            let shifted = self.targets.rotate(self.ord - sigma % self.ord);
            shifted.intersects(&self.reach[level])
        }

        fn run(&mut self, level: usize, sigma: usize) -> Option<Option<Vec<usize>>> {
            if level == self.logs.len() {
                return Some(self.targets.contains(sigma).then(|| self.chosen.clone()));
            }
            if !self.feasible(level, sigma) {
                return Some(None);
            }
            for &t in &self.logs[level] {
                if self.chosen.contains(&t) {
                    continue;
                }
                self.spent += 1;
                if self.spent > self.budget {
                    return None;
                }
                self.chosen.push(t);
                let r = self.run(level + 1, (sigma + t) % self.ord);
                self.chosen.pop();
                match r {
                    None => return None,
                    Some(Some(found)) => return Some(Some(found)),
                    Some(None) => {}
                }
            }
            Some(None)
        }
    }

    let mut search = Search {
        ord,
        logs: &logs,
        reach: &reach,
        targets: &targets,
        budget,
        spent: 0,
        chosen: Vec::with_capacity(k),
    };
    match search.run(0, 0) {
        None => WitnessOutcome::Inconclusive,
        Some(None) => WitnessOutcome::None,
        Some(Some(found)) => {
            let elements: Vec<FieldElement> = found.iter().map(|&t| field.exp(t as u64)).collect();
            let product = elements
                .iter()
                .fold(field.one(), |acc, &a| field.mul(acc, a));
            let x0 = field
                .elements()
                .find(|&x| f.eval(x, field) == product)
                .expect("product lies in the value set");
            WitnessOutcome::Found { elements, x0 }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DistinctProductReport {
    pub threshold: Option<f64>,
    /// No subset of `F_q*` can reach the threshold.
    pub vacuous: bool,
    pub all_sets_meet_threshold: bool,
    pub outcome: WitnessOutcome,
    /// `false` only if every set meets the threshold and no witness exists.
    pub implication_holds: bool,
}

/// Runs the witness search and checks it against the size guarantee
/// `|A_i| >= 8·C_m·√q + 2k + 2`.
pub fn distinct_product_check(
    field: &Field,
    f: &Poly,
    sets: &[Vec<FieldElement>],
) -> Result<DistinctProductReport, CharError> {
    let m = f.degree().ok_or(PolyError::ZeroPolynomial)? as u64;
    if m < 1 || m >= field.q() {
        return Err(CharError::HypothesisViolated(format!("degree {m} outside [1, q)")));
    }
    check_no_power_multiple(field, f)?;
    let (q, k) = (field.q(), sets.len() as u64);
    let all_meet = sets
        .iter()
        .all(|s| meets_distinct_product_threshold(s.len() as u64, q, m, k));
    let vacuous = !meets_distinct_product_threshold(q - 1, q, m, k);
    let outcome = find_distinct_product_witness(field, f, sets, WITNESS_BUDGET);
    let implication_holds =
        !all_meet || matches!(outcome, WitnessOutcome::Found { .. } | WitnessOutcome::Inconclusive);
    Ok(DistinctProductReport {
        threshold: distinct_product_threshold_value(q, m, k),
        vacuous,
        all_sets_meet_threshold: all_meet,
        outcome,
        implication_holds,
    })
}

/// Data for the `k`-set analogue of the two-set representation lemma: the
/// size product against `q·m^k`, and whether a distinct-product witness
/// exists. Nothing is asserted.
#[derive(Clone, Debug, Serialize)]
pub struct KSetProbe {
    pub size_product: u128,
    pub q_times_m_pow_k: u128,
    pub outcome: WitnessOutcome,
}

pub fn probe_k_set_analogue(field: &Field, f: &Poly, sets: &[Vec<FieldElement>]) -> KSetProbe {
    let m = f.degree().unwrap_or(0) as u128;
    KSetProbe {
        size_product: sets.iter().map(|s| s.len() as u128).product(),
        q_times_m_pow_k: field.q() as u128 * m.pow(sets.len() as u32),
        outcome: find_distinct_product_witness(field, f, sets, WITNESS_BUDGET),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor::is_dth_power_multiple;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ints(field: &Field, c: &[i64]) -> Poly {
        Poly::from_ints(field, c)
    }

    #[test]
    fn char_sum_examples() {
        let f7 = Field::build(7, 1).unwrap();
        let triv = Character::new(&f7, 0);
        let r = char_sum(&triv, &Poly::x(), f7.one()).unwrap();
        assert!((r.re - 6.0).abs() < 1e-9 && r.im.abs() < 1e-9);
        let quad = Character::new(&f7, 3);
        assert_eq!(quad.order(), 2);
        let r = char_sum(&quad, &Poly::x(), f7.one()).unwrap();
        assert!(r.magnitude < 1e-9);
        let f = ints(&f7, &[1, 0, 1]);
        let r = char_sum(&quad, &f, f7.one()).unwrap();
        // Direct Legendre-symbol count: x^2+1 at x = 0..6 is 1,2,5,3,3,5,2.
        let legendre = |v: u64| -> f64 {
            if v == 0 {
                0.0
            } else if [1, 2, 4].contains(&v) {
                1.0
            } else {
                -1.0
            }
        };
        let expected: f64 = (0..7).map(|x: u64| legendre((x * x + 1) % 7)).sum();
        assert!((r.re - expected).abs() < 1e-9);
        assert!(r.magnitude <= 7f64.sqrt());
        assert_eq!(char_sum(&quad, &f, f7.zero()).unwrap_err(), CharError::ZeroScalar);
    }

    #[test]
    fn multiplicativity_and_orthogonality() {
        for q in 2..=49u64 {
            let Some((p, m)) = crate::arith::prime_power(q) else {
                continue;
            };
            let field = Field::build(p, m).unwrap();
            for chi in characters(&field) {
                for a in field.units() {
                    for b in field.units() {
                        let lhs = chi.value(field.mul(a, b));
                        let rhs = chi.value(a) * chi.value(b);
                        assert!((lhs - rhs).norm() < 1e-9);
                    }
                }
                assert_eq!(chi.value(field.zero()), Complex64::new(0.0, 0.0));
                assert_eq!(chi.order() > 1, !chi.is_trivial());
            }
            for y in field.units() {
                let total: Complex64 = characters(&field).map(|c| c.value(y)).sum();
                let expected = if y == field.one() { field.order() as f64 } else { 0.0 };
                assert!((total - Complex64::new(expected, 0.0)).norm() < 1e-6);
            }
        }
    }

    #[test]
    fn weil_examples() {
        let f7 = Field::build(7, 1).unwrap();
        let rep = weil_verify(&f7, &Poly::x()).unwrap();
        assert!(rep.passed());
        assert!(rep.rows.iter().all(|r| r.magnitude < 1e-9 && r.bound == 0.0));
        let rep = weil_verify(&f7, &ints(&f7, &[0, 0, 1])).unwrap();
        assert!(rep.skipped.contains(&(3, 2)));
        assert!(rep.rows.iter().all(|r| r.order != 2));
        for (p, m) in [(5, 1), (7, 1), (3, 2), (11, 1), (13, 1)] {
            let field = Field::build(p, m).unwrap();
            let rep = weil_verify(&field, &ints(&field, &[1, 0, 1])).unwrap();
            assert!(rep.passed(), "q = {}", field.q());
        }
    }

    #[test]
    fn weil_rows_match_direct_sums() {
        let field = Field::build(3, 2).unwrap();
        let f = ints(&field, &[2, 1, 0, 1]);
        let rep = weil_verify(&field, &f).unwrap();
        for row in &rep.rows {
            let chi = Character::new(&field, row.char_index);
            let direct = char_sum(&chi, &f, field.element(row.a).unwrap()).unwrap();
            assert!((direct.magnitude - row.magnitude).abs() < 1e-9);
            assert!(!is_dth_power_multiple(&field, &f, row.order).unwrap());
        }
    }

    #[test]
    fn weil_small_fields() {
        for q in [5u64, 7, 9, 11, 13, 16, 17] {
            let (p, m) = crate::arith::prime_power(q).unwrap();
            let field = Field::build(p, m).unwrap();
            for deg in [2, 3] {
                let s = weil_grid(&field, deg).unwrap();
                assert_eq!(s.violations, 0, "q={q} deg={deg}");
                assert!(s.max_ratio <= 1.0 + 1e-9);
            }
        }
    }

    #[test]
    fn count_examples() {
        let f7 = Field::build(7, 1).unwrap();
        let all: Vec<FieldElement> = f7.units().collect();
        assert_eq!(count_representations(&f7, &all, &all, &Poly::x()), 36);
        assert_eq!(count_representations(&f7, &[f7.one()], &[f7.one()], &Poly::x()), 1);
        let squares: Vec<FieldElement> = [1, 2, 4].iter().map(|&v| f7.from_int(v)).collect();
        let x2 = ints(&f7, &[0, 0, 1]);
        // Triple count by direct enumeration.
        let mut brute = 0;
        for &a in &squares {
            for &b in &squares {
                for x in f7.elements() {
                    if f7.mul(a, b) == x2.eval(x, &f7) {
                        brute += 1;
                    }
                }
            }
        }
        assert_eq!(count_representations(&f7, &squares, &squares, &x2), brute);
        assert_eq!(brute, 18);
    }

    #[test]
    fn representation_examples() {
        let f7 = Field::build(7, 1).unwrap();
        let x2 = ints(&f7, &[0, 0, 1]);
        assert!(matches!(
            representation_threshold_check(&f7, &x2, &[f7.one()], &[f7.one()]),
            Err(CharError::HypothesisViolated(_))
        ));
        let f = ints(&f7, &[1, 0, 1]);
        let rep = representation_threshold_check(&f7, &f, &[f7.one()], &[f7.from_int(3)]).unwrap();
        assert!(!rep.above_threshold);
        assert!(rep.implication_holds);
        // q=7, m=2: threshold 7 * (6/5)^2 = 252/25
        assert_eq!(rep.threshold, "252/25");
        assert!(matches!(
            representation_threshold_check(&f7, &Poly::x(), &[f7.one()], &[f7.one()]),
            Err(CharError::HypothesisViolated(_))
        ));
    }

    #[test]
    fn representation_implication_on_random_sets() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let fields: Vec<Field> = [(5, 1), (7, 1), (3, 2), (11, 1), (13, 1), (17, 1), (5, 2), (29, 1), (31, 1), (7, 2), (11, 2)]
            .iter()
            .map(|&(p, m)| Field::build(p, m).unwrap())
            .collect();
        let mut above = 0;
        let mut checked = 0;
        while checked < 10_000 {
            let field = &fields[rng.random_range(0..fields.len())];
            let deg = rng.random_range(2..=3usize);
            let mut coeffs: Vec<FieldElement> = (0..deg)
                .map(|_| field.element(rng.random_range(0..field.q())).unwrap())
                .collect();
            coeffs.push(field.one());
            let f = Poly::new(coeffs);
            let density = rng.random_range(0.3..1.0);
            let mut pick = || -> Vec<FieldElement> {
                field.units().filter(|_| rng.random_bool(density)).collect()
            };
            let (a, b) = (pick(), pick());
            match representation_threshold_check(field, &f, &a, &b) {
                Ok(rep) => {
                    assert!(rep.implication_holds, "{rep:?}");
                    above += rep.above_threshold as usize;
                    checked += 1;
                }
                Err(CharError::HypothesisViolated(_)) => {}
                Err(e) => panic!("{e}"),
            }
        }
        assert!(above > 100, "grid should exercise the non-vacuous side");
    }

    #[test]
    fn threshold_helpers_are_exact() {
        assert_eq!(c_m(7, 2).unwrap(), Rational::new(6, 5));
        assert!(c_m(5, 5).is_none());
        // m = 1: C_m = 0, threshold = 2k + 2
        assert!(meets_distinct_product_threshold(6, 101, 1, 2));
        assert!(!meets_distinct_product_threshold(5, 101, 1, 2));
        // q = 101, m = 2: 8 * (100/99) * sqrt(101) + 6 ≈ 87.21
        let v = distinct_product_threshold_value(101, 2, 2).unwrap();
        assert!(meets_distinct_product_threshold(v.ceil() as u64, 101, 2, 2));
        assert!(!meets_distinct_product_threshold(v.floor() as u64, 101, 2, 2));
    }

    #[test]
    fn witness_examples() {
        let f7 = Field::build(7, 1).unwrap();
        let all: Vec<FieldElement> = f7.units().collect();
        let out = find_distinct_product_witness(&f7, &Poly::x(), &[all.clone(), all.clone()], WITNESS_BUDGET);
        let WitnessOutcome::Found { elements, x0 } = out else {
            panic!("expected a witness");
        };
        assert_ne!(elements[0], elements[1]);
        assert_eq!(f7.mul(elements[0], elements[1]), x0);

        // Squares mod 7 are {1,2,4}; singletons {3} and {5} give 15 = 1, a square,
        // but {3} and {6} give 18 = 4, also a square; {3},{1} gives 3: not a square.
        let x2 = ints(&f7, &[0, 0, 1]);
        let out = find_distinct_product_witness(&f7, &x2, &[vec![f7.from_int(3)], vec![f7.one(), f7.from_int(2), f7.from_int(4)]], WITNESS_BUDGET);
        assert_eq!(out, WitnessOutcome::None);
        // The same element in both sets cannot be used twice.
        let out = find_distinct_product_witness(&f7, &x2, &[vec![f7.from_int(3)], vec![f7.from_int(3)]], WITNESS_BUDGET);
        assert_eq!(out, WitnessOutcome::None);
        let out = find_distinct_product_witness(&f7, &Poly::x(), &[all.clone(), all.clone(), all], 1);
        assert_eq!(out, WitnessOutcome::Inconclusive);
    }

    #[test]
    fn distinct_product_threshold_is_vacuous_for_small_q() {
        let field = Field::build(31, 1).unwrap();
        let f = ints(&field, &[1, 0, 1]);
        let all: Vec<FieldElement> = field.units().collect();
        let rep = distinct_product_check(&field, &f, &[all.clone(), all]).unwrap();
        assert!(rep.vacuous);
        assert!(!rep.all_sets_meet_threshold);
        assert!(rep.implication_holds);
        assert!(matches!(rep.outcome, WitnessOutcome::Found { .. }));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn witness_search_agrees_with_brute_force(
            seed in any::<u64>(),
            k in 2usize..=3,
            coeffs in proptest::collection::vec(0i64..11, 1..4),
        ) {
            let field = Field::build(11, 1).unwrap();
            let mut c = coeffs.clone();
            c.push(1);
            let f = Poly::from_ints(&field, &c);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sets: Vec<Vec<FieldElement>> = (0..k)
                .map(|_| field.units().filter(|_| rng.random_bool(0.25)).collect())
                .collect();
            let vs = value_set(&field, &f);
            let mut brute = false;
            let mut idx = vec![0usize; k];
            if sets.iter().all(|s| !s.is_empty()) {
                'outer: loop {
                    let picked: Vec<FieldElement> = (0..k).map(|i| sets[i][idx[i]]).collect();
                    let distinct = (0..k).all(|i| (i + 1..k).all(|j| picked[i] != picked[j]));
                    let prod = picked.iter().fold(field.one(), |a, &b| field.mul(a, b));
                    if distinct && vs.contains(prod) {
                        brute = true;
                        break;
                    }
                    let mut pos = 0;
                    loop {
                        if pos == k { break 'outer; }
                        idx[pos] += 1;
                        if idx[pos] < sets[pos].len() { break; }
                        idx[pos] = 0;
                        pos += 1;
                    }
                }
            }
            let out = find_distinct_product_witness(&field, &f, &sets, WITNESS_BUDGET);
            prop_assert_eq!(matches!(out, WitnessOutcome::Found { .. }), brute);
        }
    }
}

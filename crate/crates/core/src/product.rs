//! Sets of units with no `k` distinct elements multiplying into `h(F_q)`.
//!
//! Everything here works in discrete-log space: a set `A ⊂ F_q*` is a subset
//! of `Z_{q-1}`, a product of distinct elements is a sum of distinct indices,
//! and the cosets `g^i H` of the index-`n` subgroup are the residue classes
//! mod `n`.

mod search;
mod special;

pub use search::{exact_fk, exact_fk_with, FkOptions, DEFAULT_NODE_LIMIT};
pub use special::{remark3_construction, remark4_construction, SpecialConstruction};

use num_integer::Integer;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::arith::mod_inverse;
use crate::bits::BitSet;
use crate::character::{c_m, Rational};
use crate::factor::{power_part, PowerPart};
use crate::field::{Field, FieldElement, FieldError};
use crate::poly::{value_set, Poly, PolyError};
use crate::sumset::{
    avoiding_sets, k_fold_sumset, m_resolve, MEstimate, SumsetError, ZnSubset, DEFAULT_SEARCH_CAP,
};

/// Largest `n` for which [`structure_distance`] enumerates every valid `B_0`.
pub const STRUCTURE_CAP: u64 = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProductError {
    #[error("k = {0} must be at least 2")]
    BadK(u64),
    #[error("q = {q} exceeds the search cap {cap}")]
    SizeCapExceeded { q: u64, cap: u64 },
    #[error("m(k, n; s) = 0, so the coset construction is empty")]
    EmptyConstruction,
    #[error("m(k, n; s) is not known for n = {0}")]
    Unresolved(u64),
    #[error("no valid B_0 exists")]
    NoValidB0,
    #[error("precondition violated: {0}")]
    PrecondViolated(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Sumset(#[from] SumsetError),
}

/// A subset of `F_q*`, stored by discrete logarithm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateSet {
    logs: BitSet,
}

impl CandidateSet {
    pub fn empty(field: &Field) -> Self {
        CandidateSet {
            logs: BitSet::new(field.order() as usize),
        }
    }

    pub fn from_logs<I: IntoIterator<Item = u64>>(field: &Field, logs: I) -> Self {
        let w = field.order();
        CandidateSet {
            logs: BitSet::from_indices(w as usize, logs.into_iter().map(|t| (t % w) as usize)),
        }
    }

    pub fn from_elements(field: &Field, elements: &[FieldElement]) -> Result<Self, FieldError> {
        let logs = elements
            .iter()
            .map(|&a| field.dlog(a))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_logs(field, logs))
    }

    pub fn len(&self) -> usize {
        self.logs.count()
    }

    pub fn is_empty(&self) -> bool {
        self.logs.is_empty()
    }

    pub fn contains_log(&self, t: u64) -> bool {
        self.logs.contains(t as usize)
    }

    pub fn insert_log(&mut self, t: u64) {
        self.logs.insert(t as usize);
    }

    pub fn remove_log(&mut self, t: u64) {
        self.logs.remove(t as usize);
    }

    /// Discrete logs, ascending.
    pub fn logs(&self) -> Vec<u64> {
        self.logs.iter().map(|t| t as u64).collect()
    }

    pub fn elements(&self, field: &Field) -> Vec<FieldElement> {
        self.logs.iter().map(|t| field.exp(t as u64)).collect()
    }

    pub fn as_bits(&self) -> &BitSet {
        &self.logs
    }

    /// `|A ∩ g^i H|` for `i ∈ Z_n`.
    pub fn coset_counts(&self, n: u64) -> Vec<usize> {
        let mut counts = vec![0; n as usize];
        for t in self.logs.iter() {
            counts[t % n as usize] += 1;
        }
        counts
    }
}

impl Serialize for CandidateSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.logs.iter())
    }
}

/// `h` together with its power part and the derived `(n, s)`.
#[derive(Clone, Debug)]
pub struct Instance<'a> {
    pub field: &'a Field,
    pub h: Poly,
    pub k: u64,
    pub power: PowerPart,
    pub n: u64,
    pub s: u64,
    /// Discrete logs of the nonzero values of `h`.
    pub targets: BitSet,
    pub m: MEstimate,
}

pub fn build_instance<'a>(field: &'a Field, h: &Poly, k: u64) -> Result<Instance<'a>, ProductError> {
    if k < 2 {
        return Err(ProductError::BadK(k));
    }
    if h.is_constant() {
        return Err(PolyError::ConstantPolynomial.into());
    }
    let power = power_part(field, h)?;
    let n = power.ell.gcd(&field.order());
    let s = field.coset_index(power.c, n)?;
    let mut targets = BitSet::new(field.order() as usize);
    for y in value_set(field, h).iter() {
        if let Ok(t) = field.dlog(y) {
            targets.insert(t as usize);
        }
    }
    let m = m_resolve(k, n, s, DEFAULT_SEARCH_CAP)?;
    Ok(Instance {
        field,
        h: h.clone(),
        k,
        power,
        n,
        s,
        targets,
        m,
    })
}

impl Instance<'_> {
    pub fn q(&self) -> u64 {
        self.field.q()
    }

    pub fn m_value(&self) -> Option<usize> {
        self.m.value()
    }

    /// `m(k, n; s)·q/n`.
    pub fn main_term(&self) -> Option<Rational> {
        self.m_value()
            .map(|m| Rational::new(m as i128 * self.q() as i128, self.n as i128))
    }

    /// `8·C_m + 2k + 2` for `m = deg f`, when `deg f < q`.
    pub fn slack_constant(&self) -> Option<Rational> {
        let m = self.power.f.degree()? as u64;
        c_m(self.q(), m).map(|c| c * 8 + Rational::from_integer(2 * self.k as i128 + 2))
    }

    /// Smallest integer `≥ M·√q`.
    pub fn certified_threshold(&self) -> Option<u64> {
        let mconst = self.slack_constant()?;
        Some(ceil_times_sqrt(mconst, self.q()))
    }

    /// Upper bound used when the exact search is out of reach:
    /// `m(q-1)/n + n·M·√q` when `m` is known, else `q - 1`.
    pub fn counting_upper(&self) -> usize {
        let w = self.field.order();
        let bound = match (self.m_value(), self.slack_constant()) {
            (Some(m), Some(mconst)) => {
                let base = Rational::new(m as i128 * w as i128, self.n as i128);
                floor_plus_sqrt(base, mconst * self.n as i128, self.q())
            }
            _ => w,
        };
        bound.min(w) as usize
    }
}

/// `ceil(c·√q)` for `c >= 0`, exactly.
fn ceil_times_sqrt(c: Rational, q: u64) -> u64 {
    let target = c * c * q as i128;
    let mut x = ((*c.numer() as f64 / *c.denom() as f64) * (q as f64).sqrt()).ceil() as i128;
    x = x.max(0);
    while x > 0 && Rational::from_integer((x - 1) * (x - 1)) >= target {
        x -= 1;
    }
    while Rational::from_integer(x * x) < target {
        x += 1;
    }
    x as u64
}

/// `floor(a + c·√q)` for `c >= 0`, exactly.
fn floor_plus_sqrt(a: Rational, c: Rational, q: u64) -> u64 {
    let target = c * c * q as i128;
    let le = |x: i128| {
        let d = Rational::from_integer(x) - a;
        d <= Rational::from_integer(0) || d * d <= target
    };
    let approx = *a.numer() as f64 / *a.denom() as f64
        + (*c.numer() as f64 / *c.denom() as f64) * (q as f64).sqrt();
    let mut x = approx.floor() as i128;
    while !le(x) {
        x -= 1;
    }
    while le(x + 1) {
        x += 1;
    }
    x.max(0) as u64
}

/// Sums of `j` distinct elements of `logs`, for `j = 0..=k`.
pub(crate) fn distinct_sums(width: usize, logs: &[usize], k: usize) -> Vec<BitSet> {
    let mut sums = vec![BitSet::new(width); k + 1];
    sums[0].insert(0);
    for &t in logs {
        for j in (1..=k).rev() {
            let shifted = sums[j - 1].rotate(t);
            sums[j].union_with(&shifted);
        }
    }
    sums
}

/// No `k` distinct elements of `A` have product in `h(F_q)`.
pub fn star_check(inst: &Instance<'_>, a: &CandidateSet) -> bool {
    let k = inst.k as usize;
    if a.len() < k {
        return true;
    }
    let logs: Vec<usize> = a.as_bits().iter().collect();
    let sums = distinct_sums(inst.field.order() as usize, &logs, k);
    !sums[k].intersects(&inst.targets)
}

/// The same property decided by multiplying field elements directly, over
/// every `k`-subset. Independent of the generator; meant for small sets.
pub fn star_check_direct(field: &Field, h: &Poly, k: usize, a: &[FieldElement]) -> bool {
    let values = value_set(field, h);
    let mut idx: Vec<usize> = (0..k).collect();
    if a.len() < k {
        return true;
    }
    loop {
        let prod = idx.iter().fold(field.one(), |acc, &i| field.mul(acc, a[i]));
        if values.contains(prod) {
            return false;
        }
        let mut pos = k;
        loop {
            if pos == 0 {
                return true;
            }
            pos -= 1;
            if idx[pos] < a.len() - (k - pos) {
                break;
            }
        }
        idx[pos] += 1;
        for j in pos + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// `⋃_{i ∈ B_0} g^i H` for the witness `B_0` of `m(k, n; s)`.
pub fn coset_construction(inst: &Instance<'_>) -> Result<CandidateSet, ProductError> {
    let record = inst.m.record.as_ref().ok_or(ProductError::Unresolved(inst.n))?;
    if record.value == 0 {
        return Err(ProductError::EmptyConstruction);
    }
    let a = coset_union(inst, &record.witness);
    if a.len() as u64 != record.value as u64 * inst.field.order() / inst.n {
        return Err(ProductError::VerificationFailed("coset union has the wrong size".into()));
    }
    if !star_check(inst, &a) {
        return Err(ProductError::VerificationFailed(format!(
            "coset union over {} is not a star set",
            record.witness
        )));
    }
    Ok(a)
}

pub fn coset_union(inst: &Instance<'_>, b0: &ZnSubset) -> CandidateSet {
    let w = inst.field.order();
    CandidateSet::from_logs(inst.field, (0..w).filter(|t| b0.contains(t % inst.n)))
}

#[derive(Clone, Debug, Serialize)]
pub struct CosetReport {
    pub threshold: u64,
    pub indices: ZnSubset,
    /// The threshold is at least `M·√q`.
    pub certified: bool,
    /// No coset of `H` is large enough to qualify.
    pub vacuous: bool,
    /// `s ∉ kB`.
    pub avoids_s: bool,
}

/// `B = {i : |A ∩ g^i H| >= threshold}`, with the claim `s ∉ kB` checked.
///
/// When the threshold is certified and `A` has the star property, a failure
/// of the claim is an error; otherwise it is only reported.
pub fn large_coset_indices(
    inst: &Instance<'_>,
    a: &CandidateSet,
    threshold: u64,
) -> Result<CosetReport, ProductError> {
    let counts = a.coset_counts(inst.n);
    let indices = ZnSubset::from_elements(
        inst.n,
        (0..inst.n).filter(|&i| counts[i as usize] as u64 >= threshold),
    );
    let avoids_s = !k_fold_sumset(&indices, inst.k).contains(inst.s);
    let certified = inst.certified_threshold().is_some_and(|t| threshold >= t);
    let vacuous = threshold > inst.field.order() / inst.n;
    if certified && !avoids_s && star_check(inst, a) {
        return Err(ProductError::VerificationFailed(format!(
            "s = {} lies in {}·{{{}}}",
            inst.s, inst.k, indices
        )));
    }
    Ok(CosetReport {
        threshold,
        indices,
        certified,
        vacuous,
        avoids_s,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct StructureReport {
    pub b0: ZnSubset,
    pub distance: usize,
    pub candidates: usize,
}

/// The valid coset union nearest to `A` in symmetric difference.
pub fn structure_distance(inst: &Instance<'_>, a: &CandidateSet) -> Result<StructureReport, ProductError> {
    if inst.n > STRUCTURE_CAP {
        return Err(SumsetError::SizeCapExceeded {
            n: inst.n,
            cap: STRUCTURE_CAP,
        }
        .into());
    }
    let m = inst.m_value().ok_or(ProductError::Unresolved(inst.n))?;
    if m == 0 {
        return Err(ProductError::NoValidB0);
    }
    let size = (inst.field.order() / inst.n) as usize;
    let counts = a.coset_counts(inst.n);
    let total = a.len();
    let mut best: Option<(usize, ZnSubset)> = None;
    let all = avoiding_sets(inst.k, inst.n, inst.s, m);
    for b0 in &all {
        // chosen cosets contribute their missing elements, the rest their hits
        let hits: usize = b0.elements().iter().map(|&i| counts[i as usize]).sum();
        let distance = size * b0.len() - hits + (total - hits);
        if best.as_ref().is_none_or(|(d, _)| distance < *d) {
            best = Some((distance, b0.clone()));
        }
    }
    let (distance, b0) = best.ok_or(ProductError::NoValidB0)?;
    Ok(StructureReport {
        b0,
        distance,
        candidates: all.len(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct InvarianceReport {
    pub generators: usize,
    pub representatives: usize,
    /// Distinct values of `s` seen.
    pub s_values: Vec<u64>,
    pub m_values: Vec<Option<usize>>,
    pub main_terms: Vec<Option<String>>,
    /// `s ≡ u·s_u (mod n)` for every exponent `u`.
    pub unit_relation_holds: bool,
    pub invariant: bool,
}

/// Recomputes `(n, s, m, main term)` for every generator `g^u` and every
/// rescaled representative `h = (C·c^{-ℓ})·(c·f)^ℓ`.
pub fn generator_invariance_check(inst: &Instance<'_>) -> Result<InvarianceReport, ProductError> {
    let field = inst.field;
    let w = field.order();
    let n = inst.n;
    let log_c = field.dlog(inst.power.c)?;
    let mut s_all = Vec::new();
    let mut generators = 0;
    let mut relation = true;
    for u in (1..w.max(2)).filter(|&u| u.gcd(&w) == 1) {
        let u_inv = mod_inverse(u, w).expect("coprime");
        let s_u = crate::arith::mul_mod(log_c, u_inv, w) % n;
        relation &= (u % n) * s_u % n == inst.s % n;
        s_all.push(s_u);
        generators += 1;
    }
    let mut representatives = 0;
    for c in field.units() {
        let scale = field.pow(field.inv(c).expect("unit"), inst.power.ell % w);
        let alt = field.mul(inst.power.c, scale);
        let rescaled_f = inst.power.f.scale(c, field);
        let rebuilt = rescaled_f.pow(inst.power.ell, field).scale(alt, field);
        if rebuilt != inst.h {
            return Err(ProductError::VerificationFailed("rescaled power part does not reproduce h".into()));
        }
        s_all.push(field.coset_index(alt, n)?);
        representatives += 1;
    }
    s_all.sort_unstable();
    s_all.dedup();
    let mut m_values = Vec::new();
    let mut main_terms = Vec::new();
    for &s in &s_all {
        let est = m_resolve(inst.k, n, s, DEFAULT_SEARCH_CAP)?;
        let mv = est.value();
        let term = mv.map(|m| Rational::new(m as i128 * field.q() as i128, n as i128).to_string());
        if !m_values.contains(&mv) {
            m_values.push(mv);
        }
        if !main_terms.contains(&term) {
            main_terms.push(term);
        }
    }
    let invariant = m_values.len() == 1 && main_terms.len() == 1 && m_values[0].is_some();
    Ok(InvarianceReport {
        generators,
        representatives,
        s_values: s_all,
        m_values,
        main_terms,
        unit_relation_holds: relation,
        invariant,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FkMode {
    Exact,
    Bracket,
    Construction,
}

impl std::fmt::Display for FkMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FkMode::Exact => "exact",
            FkMode::Bracket => "bracket",
            FkMode::Construction => "construction",
        })
    }
}

#[derive(Clone, Debug)]
pub struct FkResult {
    /// Exact value, or the lower end of the bracket.
    pub value: usize,
    pub upper: usize,
    pub witness: CandidateSet,
    pub main_term: Option<Rational>,
    pub mode: FkMode,
    pub nodes: u64,
}

impl FkResult {
    /// `value - main_term`.
    pub fn defect(&self) -> Option<Rational> {
        self.main_term
            .map(|t| Rational::from_integer(self.value as i128) - t)
    }

    pub fn defect_over_sqrt_q(&self, q: u64) -> Option<f64> {
        self.defect()
            .map(|d| *d.numer() as f64 / *d.denom() as f64 / (q as f64).sqrt())
    }
}

/// The coset construction as a bracket: its size below, the counting bound
/// above.
pub fn fk_construct(inst: &Instance<'_>) -> Result<FkResult, ProductError> {
    let a = coset_construction(inst)?;
    Ok(FkResult {
        value: a.len(),
        upper: inst.counting_upper(),
        witness: a,
        main_term: inst.main_term(),
        mode: FkMode::Construction,
        nodes: 0,
    })
}

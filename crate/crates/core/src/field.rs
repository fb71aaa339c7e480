//! Concrete finite fields `F_{p^m}` with deterministic modulus and generator
//! selection and a discrete-log backend.
//!
//! Elements are stored by their canonical encoding `c_0 + c_1 p + … + c_{m-1} p^{m-1}`,
//! where `(c_0, …, c_{m-1})` are the coordinates in the power basis of the
//! field modulus. For prime fields the encoding is the residue itself.
//!
//! Fields up to `table_limit` elements carry full exp/log tables; larger fields
//! fall back to schoolbook multiplication and baby-step/giant-step logarithms.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{is_prime, mul_mod, prime_divisors};
use crate::poly::Poly;

/// Default ceiling on `q` for [`Field::build`].
pub const DEFAULT_SIZE_CAP: u64 = 1 << 20;
/// Hard ceiling: encodings must fit in a `u32`.
pub const MAX_FIELD_SIZE: u64 = 1 << 32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("field size {0} exceeds the configured cap")]
    SizeCapExceeded(u128),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("zero has no discrete logarithm")]
    ZeroElement,
    #[error("{n} does not divide the group order {order}")]
    NotADivisor { n: u64, order: u64 },
    #[error("invalid coordinates {0:?}")]
    BadCoordinates(Vec<u64>),
    #[error("encoding {0} is not an element of the field")]
    BadEncoding(u64),
}

/// `(p, m)` with `q = p^m`. Serialized as `{"p": …, "m": …}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct FieldSpec {
    p: u64,
    m: u32,
    q: u64,
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    p: u64,
    m: u32,
}

impl From<FieldSpec> for RawSpec {
    fn from(s: FieldSpec) -> Self {
        RawSpec { p: s.p, m: s.m }
    }
}

impl TryFrom<RawSpec> for FieldSpec {
    type Error = FieldError;
    fn try_from(r: RawSpec) -> Result<Self, FieldError> {
        FieldSpec::new(r.p, r.m)
    }
}

impl FieldSpec {
    pub fn new(p: u64, m: u32) -> Result<Self, FieldError> {
        if m == 0 {
            return Err(FieldError::ZeroDegree);
        }
        if p >= 1 << 32 || !is_prime(p) {
            return Err(FieldError::NonPrime(p));
        }
        let q = (p as u128).checked_pow(m).unwrap_or(u128::MAX);
        if q > MAX_FIELD_SIZE as u128 {
            return Err(FieldError::SizeCapExceeded(q));
        }
        Ok(FieldSpec { p, m, q: q as u64 })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn q(&self) -> u64 {
        self.q
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldConfig {
    pub size_cap: u64,
    /// Fields with `q <= table_limit` get full exp/log tables.
    pub table_limit: u64,
}

impl Default for FieldConfig {
    fn default() -> Self {
        FieldConfig {
            size_cap: DEFAULT_SIZE_CAP,
            table_limit: DEFAULT_SIZE_CAP,
        }
    }
}

/// An element of some [`Field`], by canonical encoding.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn encoding(self) -> u64 {
        self.0 as u64
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

enum DlogBackend {
    Pending,
    Table { exp: Vec<u32>, log: Vec<u32> },
    Bsgs {
        step: u64,
        baby: HashMap<u32, u64>,
        giant: FieldElement,
    },
}

pub struct Field {
    spec: FieldSpec,
    modulus: Vec<u64>,
    generator: FieldElement,
    backend: DlogBackend,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.spec.p)
            .field("m", &self.spec.m)
            .field("modulus", &self.modulus)
            .field("generator", &self.generator)
            .finish()
    }
}

impl Field {
    /// Builds `F_{p^m}` under the default size cap.
    pub fn build(p: u64, m: u32) -> Result<Field, FieldError> {
        Field::build_with(p, m, &FieldConfig::default())
    }

    pub fn build_with(p: u64, m: u32, config: &FieldConfig) -> Result<Field, FieldError> {
        let spec = FieldSpec::new(p, m)?;
        if spec.q > config.size_cap {
            return Err(FieldError::SizeCapExceeded(spec.q as u128));
        }
        let modulus = if m == 1 {
            vec![0, 1]
        } else {
            smallest_irreducible(p, m, config)
        };
        let mut field = Field {
            spec,
            modulus,
            generator: FieldElement::ONE,
            backend: DlogBackend::Pending,
        };
        field.generator = field.find_generator();
        field.backend = if spec.q <= config.table_limit {
            field.build_tables()
        } else {
            field.build_bsgs()
        };
        Ok(field)
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn p(&self) -> u64 {
        self.spec.p
    }

    pub fn m(&self) -> u32 {
        self.spec.m
    }

    pub fn q(&self) -> u64 {
        self.spec.q
    }

    /// Order of the multiplicative group, `q - 1`.
    pub fn order(&self) -> u64 {
        self.spec.q - 1
    }

    /// Monic modulus over `F_p`, coefficients lowest degree first.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn generator(&self) -> FieldElement {
        self.generator
    }

    pub fn has_tables(&self) -> bool {
        matches!(self.backend, DlogBackend::Table { .. })
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    pub fn element(&self, encoding: u64) -> Result<FieldElement, FieldError> {
        if encoding >= self.spec.q {
            return Err(FieldError::BadEncoding(encoding));
        }
        Ok(FieldElement(encoding as u32))
    }

    /// All `q` elements in encoding order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.spec.q).map(|e| FieldElement(e as u32))
    }

    /// The nonzero elements in encoding order.
    pub fn units(&self) -> impl Iterator<Item = FieldElement> {
        (1..self.spec.q).map(|e| FieldElement(e as u32))
    }

    /// The image of an integer under `Z -> F_p ⊂ F_q`.
    pub fn from_int(&self, v: i64) -> FieldElement {
        FieldElement(v.rem_euclid(self.spec.p as i64) as u32)
    }

    pub fn in_prime_field(&self, a: FieldElement) -> bool {
        a.encoding() < self.spec.p
    }

    pub fn coords(&self, a: FieldElement) -> Vec<u64> {
        let p = self.spec.p;
        let mut e = a.encoding();
        (0..self.spec.m)
            .map(|_| {
                let c = e % p;
                e /= p;
                c
            })
            .collect()
    }

    pub fn from_coords(&self, coords: &[u64]) -> Result<FieldElement, FieldError> {
        let p = self.spec.p;
        if coords.len() > self.spec.m as usize || coords.iter().any(|&c| c >= p) {
            return Err(FieldError::BadCoordinates(coords.to_vec()));
        }
        let e = coords.iter().rev().fold(0u64, |acc, &c| acc * p + c);
        Ok(FieldElement(e as u32))
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let p = self.spec.p;
        if self.spec.m == 1 {
            let s = a.encoding() + b.encoding();
            return FieldElement(if s >= p { s - p } else { s } as u32);
        }
        if p == 2 {
            return FieldElement(a.0 ^ b.0);
        }
        let (mut x, mut y) = (a.encoding(), b.encoding());
        let (mut out, mut place) = (0u64, 1u64);
        while x > 0 || y > 0 {
            let d = (x % p + y % p) % p;
            out += d * place;
            x /= p;
            y /= p;
            place *= p;
        }
        FieldElement(out as u32)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        let p = self.spec.p;
        if self.spec.m == 1 {
            return FieldElement(if a.0 == 0 { 0 } else { (p - a.encoding()) as u32 });
        }
        if p == 2 {
            return a;
        }
        let (mut x, mut out, mut place) = (a.encoding(), 0u64, 1u64);
        while x > 0 {
            out += ((p - x % p) % p) * place;
            x /= p;
            place *= p;
        }
        FieldElement(out as u32)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.is_zero() || b.is_zero() {
            return FieldElement::ZERO;
        }
        match &self.backend {
            DlogBackend::Table { exp, log } => {
                let s = log[a.0 as usize] as u64 + log[b.0 as usize] as u64;
                let ord = self.order();
                exp[(if s >= ord { s - ord } else { s }) as usize].into()
            }
            _ => self.raw_mul(a, b),
        }
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return FieldElement::ONE;
        }
        if a.is_zero() {
            return FieldElement::ZERO;
        }
        if let DlogBackend::Table { exp, log } = &self.backend {
            let i = mul_mod(log[a.0 as usize] as u64, e, self.order());
            return exp[i as usize].into();
        }
        let (mut base, mut e, mut acc) = (a, e, FieldElement::ONE);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: FieldElement) -> Option<FieldElement> {
        if a.is_zero() {
            return None;
        }
        if let DlogBackend::Table { exp, log } = &self.backend {
            let l = log[a.0 as usize] as u64;
            let i = if l == 0 { 0 } else { self.order() - l };
            return Some(exp[i as usize].into());
        }
        Some(self.pow(a, self.spec.q - 2))
    }

    /// `a / b`; panics when `b = 0`.
    pub fn div(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.mul(a, self.inv(b).expect("division by zero"))
    }

    /// The unique `p`-th root (inverse Frobenius).
    pub fn pth_root(&self, a: FieldElement) -> FieldElement {
        self.pow(a, self.spec.q / self.spec.p)
    }

    /// `g^i` for the field generator `g`.
    pub fn exp(&self, i: u64) -> FieldElement {
        match &self.backend {
            DlogBackend::Table { exp, .. } => exp[(i % self.order()) as usize].into(),
            _ => self.pow(self.generator, i % self.order()),
        }
    }

    /// Discrete logarithm to base [`Field::generator`], in `{0, …, q-2}`.
    pub fn dlog(&self, a: FieldElement) -> Result<u64, FieldError> {
        if a.is_zero() {
            return Err(FieldError::ZeroElement);
        }
        match &self.backend {
            DlogBackend::Table { log, .. } => Ok(log[a.0 as usize] as u64),
            DlogBackend::Bsgs { step, baby, giant } => {
                let mut gamma = a;
                for i in 0..*step {
                    if let Some(&j) = baby.get(&gamma.0) {
                        return Ok((i * step + j) % self.order());
                    }
                    gamma = self.mul(gamma, *giant);
                }
                unreachable!("generator of full order always yields a logarithm")
            }
            DlogBackend::Pending => unreachable!("backend is built during construction"),
        }
    }

    /// Index `i ∈ Z_n` with `a ∈ g^i H`, `H` the subgroup of index `n`.
    pub fn coset_index(&self, a: FieldElement, n: u64) -> Result<u64, FieldError> {
        if n == 0 || !self.order().is_multiple_of(n) {
            return Err(FieldError::NotADivisor {
                n,
                order: self.order(),
            });
        }
        Ok(self.dlog(a)? % n)
    }

    /// Multiplicative order of a unit.
    pub fn order_of(&self, a: FieldElement) -> Result<u64, FieldError> {
        if a.is_zero() {
            return Err(FieldError::ZeroElement);
        }
        let mut ord = self.order();
        for r in prime_divisors(self.order()) {
            while ord.is_multiple_of(r) && self.pow(a, ord / r) == FieldElement::ONE {
                ord /= r;
            }
        }
        Ok(ord)
    }

    /// Smallest encoding whose order is `q - 1`, checked via
    /// `a^((q-1)/r) != 1` for every prime `r | q-1`.
    pub fn find_generator(&self) -> FieldElement {
        let ord = self.order();
        let primes = prime_divisors(ord);
        self.units()
            .find(|&a| primes.iter().all(|&r| self.pow(a, ord / r) != FieldElement::ONE))
            .expect("the multiplicative group of a finite field is cyclic")
    }

    fn raw_mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let p = self.spec.p;
        if self.spec.m == 1 {
            return FieldElement(mul_mod(a.encoding(), b.encoding(), p) as u32);
        }
        let m = self.spec.m as usize;
        let (x, y) = (self.coords(a), self.coords(b));
        let mut prod = vec![0u64; 2 * m - 1];
        for (i, &xi) in x.iter().enumerate().filter(|(_, &c)| c != 0) {
            for (j, &yj) in y.iter().enumerate() {
                prod[i + j] = (prod[i + j] + mul_mod(xi, yj, p)) % p;
            }
        }
        for i in (m..2 * m - 1).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            for j in 0..m {
                let t = mul_mod(c, self.modulus[j], p);
                prod[i - m + j] = (prod[i - m + j] + p - t) % p;
            }
        }
        let e = prod[..m].iter().rev().fold(0u64, |acc, &c| acc * p + c);
        FieldElement(e as u32)
    }

    fn build_tables(&self) -> DlogBackend {
        let ord = self.order() as usize;
        let mut exp = Vec::with_capacity(ord);
        let mut log = vec![0u32; self.spec.q as usize];
        let mut cur = FieldElement::ONE;
        for i in 0..ord {
            exp.push(cur.0);
            log[cur.0 as usize] = i as u32;
            cur = self.raw_mul(cur, self.generator);
        }
        DlogBackend::Table { exp, log }
    }

    fn build_bsgs(&self) -> DlogBackend {
        let ord = self.order();
        let step = (ord as f64).sqrt().ceil() as u64;
        let mut baby = HashMap::with_capacity(step as usize);
        let mut cur = FieldElement::ONE;
        for j in 0..step {
            baby.entry(cur.0).or_insert(j);
            cur = self.raw_mul(cur, self.generator);
        }
        let g_step = self.pow(self.generator, step);
        let giant = self.pow(g_step, ord - 1);
        DlogBackend::Bsgs { step, baby, giant }
    }
}

impl From<u32> for FieldElement {
    fn from(v: u32) -> Self {
        FieldElement(v)
    }
}

/// Lexicographically smallest monic irreducible of degree `m` over `F_p`,
/// comparing the non-leading coefficients `(c_0, c_1, …, c_{m-1})` from `c_0`.
fn smallest_irreducible(p: u64, m: u32, config: &FieldConfig) -> Vec<u64> {
    let prime_cfg = FieldConfig {
        size_cap: u64::MAX,
        table_limit: config.table_limit,
    };
    let base = Field::build_with(p, 1, &prime_cfg).expect("p was validated as prime");
    let m = m as usize;
    let total = (p as u128).pow(m as u32);
    // c_0 = 0 is divisible by x, so start the scan at c_0 = 1.
    let start = total / p as u128;
    for idx in start..total {
        let mut digits = vec![0u64; m];
        let mut r = idx;
        for d in digits.iter_mut().rev() {
            *d = (r % p as u128) as u64;
            r /= p as u128;
        }
        let mut coeffs: Vec<FieldElement> = digits.iter().map(|&c| FieldElement(c as u32)).collect();
        coeffs.push(FieldElement::ONE);
        let candidate = Poly::new(coeffs);
        if candidate.is_irreducible(&base) {
            digits.push(1);
            return digits;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn build_examples() {
        let f7 = Field::build(7, 1).unwrap();
        assert_eq!(f7.q(), 7);
        assert_eq!(f7.modulus(), &[0, 1]);
        let f9 = Field::build(3, 2).unwrap();
        assert_eq!(f9.q(), 9);
        assert_eq!(f9.modulus(), &[1, 0, 1]);
        assert_eq!(Field::build(4, 1).unwrap_err(), FieldError::NonPrime(4));
        assert!(matches!(
            Field::build(2, 21),
            Err(FieldError::SizeCapExceeded(_))
        ));
        assert_eq!(Field::build(5, 0).unwrap_err(), FieldError::ZeroDegree);
    }

    fn brute_order(f: &Field, a: FieldElement) -> u64 {
        let mut x = a;
        let mut k = 1;
        while x != f.one() {
            x = f.mul(x, a);
            k += 1;
        }
        k
    }

    #[test]
    fn generator_examples_against_enumeration() {
        for (p, expected) in [(2u64, 1u64), (7, 3), (5, 2)] {
            let f = Field::build(p, 1).unwrap();
            let first_full = f
                .units()
                .find(|&a| brute_order(&f, a) == f.order())
                .unwrap();
            assert_eq!(first_full.encoding(), expected);
            assert_eq!(f.generator().encoding(), expected);
        }
    }

    #[test]
    fn dlog_examples() {
        let f = Field::build(7, 1).unwrap();
        assert_eq!(f.dlog(f.from_int(6)).unwrap(), 3);
        assert_eq!(f.dlog(f.one()).unwrap(), 0);
        assert_eq!(f.dlog(f.zero()), Err(FieldError::ZeroElement));
        assert_eq!(f.coset_index(f.one(), 3).unwrap(), 0);
        assert_eq!(f.coset_index(f.from_int(6), 3).unwrap(), 0);
        assert_eq!(f.coset_index(f.from_int(3), 3).unwrap(), 1);
        assert!(matches!(
            f.coset_index(f.one(), 4),
            Err(FieldError::NotADivisor { .. })
        ));
    }

    #[test]
    fn dlog_is_homomorphism_and_bijection() {
        for (p, m) in [(2, 1), (3, 1), (7, 1), (2, 3), (3, 2), (5, 2), (2, 4), (11, 1), (7, 2), (3, 4), (11, 2)] {
            let f = Field::build(p, m).unwrap();
            let ord = f.order();
            let mut seen = vec![false; ord as usize];
            for a in f.units() {
                let la = f.dlog(a).unwrap();
                assert!(!seen[la as usize]);
                seen[la as usize] = true;
                assert_eq!(f.exp(la), a);
                for b in f.units() {
                    let lb = f.dlog(b).unwrap();
                    assert_eq!(f.dlog(f.mul(a, b)).unwrap(), (la + lb) % ord);
                }
            }
        }
    }

    #[test]
    fn subgroup_sizes() {
        for (p, m) in [(7, 1), (3, 2), (13, 1), (2, 4), (5, 2), (11, 2)] {
            let f = Field::build(p, m).unwrap();
            for n in crate::arith::divisors(f.order()) {
                let h = f
                    .units()
                    .filter(|&a| f.coset_index(a, n).unwrap() == 0)
                    .count() as u64;
                assert_eq!(h, f.order() / n);
            }
        }
    }

    #[test]
    fn deterministic_construction() {
        for (p, m) in [(2, 5), (3, 3), (13, 2), (7, 3)] {
            let a = Field::build(p, m).unwrap();
            let b = Field::build(p, m).unwrap();
            assert_eq!(a.modulus(), b.modulus());
            assert_eq!(a.generator(), b.generator());
        }
    }

    #[test]
    fn bsgs_matches_tables() {
        let cfg = FieldConfig {
            size_cap: DEFAULT_SIZE_CAP,
            table_limit: 0,
        };
        for (p, m) in [(13, 3), (7, 3), (101, 1), (2, 8)] {
            let slow = Field::build_with(p, m, &cfg).unwrap();
            let fast = Field::build(p, m).unwrap();
            assert!(!slow.has_tables());
            assert_eq!(slow.generator(), fast.generator());
            for a in fast.units().step_by(7) {
                assert_eq!(slow.dlog(a).unwrap(), fast.dlog(a).unwrap());
                assert_eq!(slow.mul(a, a), fast.mul(a, a));
            }
        }
    }

    #[test]
    fn spec_serializes_as_p_and_m() {
        let s = FieldSpec::new(3, 2).unwrap();
        assert_eq!(serde_json::to_string(&s).unwrap(), r#"{"p":3,"m":2}"#);
        let back: FieldSpec = serde_json::from_str(r#"{"p":3,"m":2}"#).unwrap();
        assert_eq!(back.q(), 9);
        assert!(serde_json::from_str::<FieldSpec>(r#"{"p":4,"m":1}"#).is_err());
    }

    fn field_strategy() -> impl Strategy<Value = (u64, u32)> {
        prop_oneof![
            Just((2, 8)),
            Just((3, 5)),
            Just((5, 3)),
            Just((257, 1)),
            Just((65521, 1)),
            Just((251, 2)),
        ]
    }

    proptest! {
        #[test]
        fn field_axioms((p, m) in field_strategy(), a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
            let f = Field::build(p, m).unwrap();
            let q = f.q();
            let (a, b, c) = (f.element(a % q).unwrap(), f.element(b % q).unwrap(), f.element(c % q).unwrap());
            prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            prop_assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
            prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            prop_assert_eq!(f.add(a, f.neg(a)), f.zero());
            if !a.is_zero() {
                prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
            }
            prop_assert_eq!(f.raw_mul(a, b), f.mul(a, b));
        }
    }
}

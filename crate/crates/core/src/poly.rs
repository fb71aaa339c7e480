//! Dense univariate polynomials over a [`Field`].
//!
//! A [`Poly`] does not hold a reference to its field; every operation takes the
//! field explicitly. Coefficients are stored lowest degree first with trailing
//! zeros stripped, so the zero polynomial is the empty vector.

use std::fmt::Write as _;

use thiserror::Error;

use crate::bits::BitSet;
use crate::field::{Field, FieldElement};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("the zero polynomial is not allowed here")]
    ZeroPolynomial,
    #[error("a non-constant polynomial is required")]
    ConstantPolynomial,
    #[error("power degree must be at least 2, got {0}")]
    BadPowerDegree(u64),
    #[error("cannot parse polynomial coefficient {0:?}")]
    Parse(String),
    #[error("power-part re-expansion does not reproduce the input")]
    Reconstruction,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    coeffs: Vec<FieldElement>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(FieldElement::ONE)
    }

    pub fn constant(c: FieldElement) -> Self {
        Poly::new(vec![c])
    }

    /// The monomial `c·x^d`.
    pub fn monomial(c: FieldElement, d: usize) -> Self {
        let mut coeffs = vec![FieldElement::ZERO; d + 1];
        coeffs[d] = c;
        Poly::new(coeffs)
    }

    pub fn x() -> Self {
        Poly::monomial(FieldElement::ONE, 1)
    }

    /// Builds a polynomial from integer coefficients reduced into `F_p`.
    pub fn from_ints(field: &Field, coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| field.from_int(c)).collect())
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs.get(i).copied().unwrap_or(FieldElement::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == FieldElement::ONE
    }

    pub fn lead(&self) -> FieldElement {
        self.coeffs.last().copied().unwrap_or(FieldElement::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.lead() == FieldElement::ONE
    }

    pub fn add(&self, other: &Poly, field: &Field) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new(
            (0..n)
                .map(|i| field.add(self.coeff(i), other.coeff(i)))
                .collect(),
        )
    }

    pub fn neg(&self, field: &Field) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| field.neg(c)).collect())
    }

    pub fn sub(&self, other: &Poly, field: &Field) -> Poly {
        self.add(&other.neg(field), field)
    }

    pub fn scale(&self, c: FieldElement, field: &Field) -> Poly {
        Poly::new(self.coeffs.iter().map(|&a| field.mul(a, c)).collect())
    }

    pub fn mul(&self, other: &Poly, field: &Field) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![FieldElement::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = field.add(out[i + j], field.mul(a, b));
            }
        }
        Poly::new(out)
    }

    pub fn pow(&self, mut e: u64, field: &Field) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, field);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, field);
            }
        }
        acc
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn divrem(&self, divisor: &Poly, field: &Field) -> (Poly, Poly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead_inv = field.inv(divisor.lead()).expect("nonzero leading coefficient");
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![FieldElement::ZERO; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let c = rem[i];
            if c.is_zero() {
                continue;
            }
            let t = field.mul(c, lead_inv);
            quot[i - dd] = t;
            for (j, &dj) in divisor.coeffs.iter().enumerate() {
                rem[i - dd + j] = field.sub(rem[i - dd + j], field.mul(t, dj));
            }
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn rem(&self, divisor: &Poly, field: &Field) -> Poly {
        self.divrem(divisor, field).1
    }

    /// Exact quotient; callers guarantee divisibility.
    pub fn div_exact(&self, divisor: &Poly, field: &Field) -> Poly {
        let (q, r) = self.divrem(divisor, field);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Returns `(lead, self / lead)`; the zero polynomial maps to `(0, 0)`.
    pub fn monic(&self, field: &Field) -> (FieldElement, Poly) {
        if self.is_zero() {
            return (FieldElement::ZERO, Poly::zero());
        }
        let c = self.lead();
        (c, self.scale(field.inv(c).expect("nonzero"), field))
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Poly, field: &Field) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b, field);
            a = b;
            b = r;
        }
        a.monic(field).1
    }

    pub fn derivative(&self, field: &Field) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| field.mul(c, field.from_int(i as i64)))
                .collect(),
        )
    }

    pub fn eval(&self, x: FieldElement, field: &Field) -> FieldElement {
        self.coeffs
            .iter()
            .rev()
            .fold(FieldElement::ZERO, |acc, &c| field.add(field.mul(acc, x), c))
    }

    pub fn mul_mod(&self, other: &Poly, modulus: &Poly, field: &Field) -> Poly {
        self.mul(other, field).rem(modulus, field)
    }

    pub fn pow_mod(&self, mut e: u64, modulus: &Poly, field: &Field) -> Poly {
        let mut base = self.rem(modulus, field);
        let mut acc = Poly::one().rem(modulus, field);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_mod(&base, modulus, field);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_mod(&base, modulus, field);
            }
        }
        acc
    }

    /// `self^q mod modulus`.
    pub fn frobenius_mod(&self, modulus: &Poly, field: &Field) -> Poly {
        self.pow_mod(field.q(), modulus, field)
    }

    /// Rabin's irreducibility test over `field`.
    pub fn is_irreducible(&self, field: &Field) -> bool {
        let Some(n) = self.degree() else {
            return false;
        };
        if n == 0 {
            return false;
        }
        if n == 1 {
            return true;
        }
        let f = self.monic(field).1;
        let x = Poly::x();
        // powers[i] = x^(q^i) mod f
        let mut powers = Vec::with_capacity(n + 1);
        powers.push(x.rem(&f, field));
        for i in 1..=n {
            let next = powers[i - 1].frobenius_mod(&f, field);
            powers.push(next);
        }
        if powers[n] != x.rem(&f, field) {
            return false;
        }
        crate::arith::prime_divisors(n as u64).into_iter().all(|r| {
            let g = powers[n / r as usize].sub(&x, field).gcd(&f, field);
            g.is_one()
        })
    }

    /// Coefficient list `c0,c1,…,cd`; prime-field coefficients are plain
    /// integers, others are `:`-joined coordinates, lowest first.
    pub fn format(&self, field: &Field) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, &c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&format_element(field, c));
        }
        out
    }

    pub fn parse(field: &Field, text: &str) -> Result<Poly, PolyError> {
        let coeffs = text
            .split(',')
            .map(|tok| parse_element(field, tok.trim()))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Poly::new(coeffs))
    }
}

pub fn format_element(field: &Field, c: FieldElement) -> String {
    if field.in_prime_field(c) {
        return c.encoding().to_string();
    }
    let mut s = String::new();
    for (i, d) in field.coords(c).iter().enumerate() {
        if i > 0 {
            s.push(':');
        }
        write!(s, "{d}").unwrap();
    }
    s
}

pub fn parse_element(field: &Field, tok: &str) -> Result<FieldElement, PolyError> {
    let bad = || PolyError::Parse(tok.to_string());
    let coords = tok
        .split(':')
        .map(|d| d.trim().parse::<u64>().map_err(|_| bad()))
        .collect::<Result<Vec<_>, _>>()?;
    field.from_coords(&coords).map_err(|_| bad())
}

/// The image `h(F_q)`, indexed by element encoding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueSet {
    members: BitSet,
}

impl ValueSet {
    pub fn contains(&self, a: FieldElement) -> bool {
        self.members.contains(a.encoding() as usize)
    }

    pub fn len(&self) -> usize {
        self.members.count()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = FieldElement> + '_ {
        self.members.iter().map(|e| FieldElement::from(e as u32))
    }
}

/// `{h(x) : x ∈ F_q}` by evaluation at every field element.
pub fn value_set(field: &Field, h: &Poly) -> ValueSet {
    let mut members = BitSet::new(field.q() as usize);
    for x in field.elements() {
        members.insert(h.eval(x, field).encoding() as usize);
    }
    ValueSet { members }
}

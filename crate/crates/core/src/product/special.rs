//! Explicit star sets inside the prime field for `h = αx^m - 1`.

use serde::Serialize;

use super::{build_instance, star_check, CandidateSet, Instance, ProductError};
use crate::arith::is_prime;
use crate::field::{Field, FieldElement};
use crate::poly::Poly;

#[derive(Clone, Debug, Serialize)]
pub struct SpecialConstruction {
    pub p: u64,
    pub m: u32,
    pub k: u64,
    pub alpha: FieldElement,
    /// Generator of `F_p*` used for the progression.
    pub u: u64,
    /// `⌊(p-1)/(2k)⌋ + 1`.
    pub t: usize,
    /// The progression `1, u, …, u^{t-1}` as integers mod `p`.
    pub elements: Vec<u64>,
    pub star: bool,
    /// `2k(t-1) - k(k-1) < p - 1`.
    pub sum_bound: bool,
    /// Every element of `F_p*` is an `m`-th power in `F_q`.
    pub prime_field_in_powers: bool,
}

impl SpecialConstruction {
    pub fn passed(&self) -> bool {
        self.star && self.elements.len() == self.t && self.sum_bound && self.prime_field_in_powers
    }
}

fn progression_length(p: u64, k: u64) -> usize {
    ((p - 1) / (2 * k) + 1) as usize
}

fn prime_field_generator(p: u64) -> u64 {
    let primes = crate::arith::prime_divisors(p - 1);
    (1..p)
        .find(|&a| primes.iter().all(|&r| crate::arith::pow_mod(a, (p - 1) / r, p) != 1))
        .expect("F_p* is cyclic")
}

/// Builds `h = αx^m - 1` over `F_{p^m}` with `α` the smallest non-`m`-th
/// power, and the progression in a generator of `F_p*`.
fn construct(field: &Field, p: u64, m: u32, k: u64) -> Result<(Instance<'_>, CandidateSet, SpecialConstruction), ProductError> {
    let md = m as u64;
    let alpha = field
        .units()
        .find(|&a| field.dlog(a).is_ok_and(|t| t % md != 0))
        .ok_or_else(|| ProductError::PrecondViolated(format!("every unit is a {m}-th power")))?;
    let h = Poly::monomial(alpha, m as usize).sub(&Poly::one(), field);
    let inst = build_instance(field, &h, k)?;
    let u = prime_field_generator(p);
    let t = progression_length(p, k);
    let elements: Vec<u64> = (0..t as u64).map(|i| crate::arith::pow_mod(u, i, p)).collect();
    let embedded: Vec<FieldElement> = elements.iter().map(|&e| field.from_int(e as i64)).collect();
    let set = CandidateSet::from_elements(field, &embedded)?;
    let star = star_check(&inst, &set);
    let (ti, ki) = (t as i64, k as i64);
    let sum_bound = 2 * ki * (ti - 1) - ki * (ki - 1) < p as i64 - 1;
    let prime_field_in_powers = (1..p as i64).all(|a| {
        field
            .dlog(field.from_int(a))
            .is_ok_and(|l| l % md == 0)
    });
    let report = SpecialConstruction {
        p,
        m,
        k,
        alpha,
        u,
        t,
        elements,
        star,
        sum_bound,
        prime_field_in_powers,
    };
    Ok((inst, set, report))
}

/// `h = αx² - 1` over `F_{p²}` with `α` a nonsquare.
pub fn remark3_construction(field: &Field, k: u64) -> Result<(Instance<'_>, CandidateSet, SpecialConstruction), ProductError> {
    let p = field.p();
    if p == 2 || field.m() != 2 {
        return Err(ProductError::PrecondViolated(format!(
            "need F_{{p^2}} with p odd, got p = {p}, m = {}",
            field.m()
        )));
    }
    construct(field, p, 2, k)
}

/// `h = αx^m - 1` over `F_{p^m}` with `p ≡ 1 (mod m)`.
pub fn remark4_construction(field: &Field, k: u64) -> Result<(Instance<'_>, CandidateSet, SpecialConstruction), ProductError> {
    let (p, m) = (field.p(), field.m());
    if m < 2 || !is_prime(p) || p % m as u64 != 1 {
        return Err(ProductError::PrecondViolated(format!("p = {p} is not 1 mod {m}")));
    }
    construct(field, p, m, k)
}

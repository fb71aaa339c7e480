//! Factorization over `F_q` and the quantities derived from it: the maximal
//! power representation `h = C·f^ℓ`, the `d`-th power test used as the Weil
//! hypothesis, and the number of distinct roots in the splitting field.
//!
//! The pipeline is the classical one: squarefree decomposition (with the
//! `p`-th root step for characteristic `p`), distinct-degree splitting, then
//! Cantor–Zassenhaus equal-degree splitting driven by a seeded ChaCha stream.

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::{Field, FieldElement};
use crate::poly::{Poly, PolyError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: FieldElement,
    /// Monic irreducible factors with multiplicities, sorted by degree and
    /// then by coefficient sequence.
    pub factors: Vec<(Poly, u64)>,
}

impl Factorization {
    pub fn expand(&self, field: &Field) -> Poly {
        self.factors
            .iter()
            .fold(Poly::constant(self.unit), |acc, (p, e)| {
                acc.mul(&p.pow(*e, field), field)
            })
    }

    /// gcd of the multiplicities; 0 for a constant.
    pub fn multiplicity_gcd(&self) -> u64 {
        self.factors.iter().fold(0, |g, (_, e)| g.gcd(e))
    }
}

/// `h = C · f^ℓ` with `f` monic and `ℓ` maximal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerPart {
    pub c: FieldElement,
    pub f: Poly,
    pub ell: u64,
}

pub fn factor(field: &Field, h: &Poly) -> Result<Factorization, PolyError> {
    factor_seeded(field, h, 0)
}

pub fn factor_seeded(field: &Field, h: &Poly, seed: u64) -> Result<Factorization, PolyError> {
    if h.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let (unit, monic) = h.monic(field);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut factors = Vec::new();
    for (part, mult) in squarefree_decomposition(field, &monic) {
        for (block, d) in distinct_degree(field, &part) {
            for irr in equal_degree(field, &block, d, &mut rng) {
                factors.push((irr, mult));
            }
        }
    }
    factors.sort_by(|(a, _), (b, _)| a.degree().cmp(&b.degree()).then_with(|| a.cmp(b)));
    debug_assert!(factors.windows(2).all(|w| w[0].0 != w[1].0));
    Ok(Factorization { unit, factors })
}

/// Squarefree decomposition of a monic polynomial into `(part, multiplicity)`.
pub fn squarefree_decomposition(field: &Field, f: &Poly) -> Vec<(Poly, u64)> {
    let mut out = Vec::new();
    if f.is_constant() {
        return out;
    }
    let p = field.p();
    let df = f.derivative(field);
    let mut c = f.gcd(&df, field);
    let mut w = f.div_exact(&c, field);
    let mut i = 1u64;
    while !w.is_one() {
        let y = w.gcd(&c, field);
        let fac = w.div_exact(&y, field);
        if !fac.is_one() {
            out.push((fac, i));
        }
        w = y;
        c = c.div_exact(&w, field);
        i += 1;
    }
    if !c.is_one() {
        // c is a polynomial in x^p; take the p-th root coefficientwise.
        let root = Poly::new(
            c.coeffs()
                .iter()
                .step_by(p as usize)
                .map(|&a| field.pth_root(a))
                .collect(),
        );
        for (g, j) in squarefree_decomposition(field, &root) {
            out.push((g, j * p));
        }
    }
    out
}

/// Splits a squarefree monic polynomial into blocks whose irreducible factors
/// all share the stated degree.
pub fn distinct_degree(field: &Field, f: &Poly) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    let mut rest = f.clone();
    let x = Poly::x();
    let mut frob = x.clone();
    let mut d = 1usize;
    while rest.degree().unwrap_or(0) >= 2 * d {
        frob = frob.frobenius_mod(&rest, field);
        let g = frob.sub(&x, field).gcd(&rest, field);
        if !g.is_one() {
            rest = rest.div_exact(&g, field);
            frob = frob.rem(&rest, field);
            out.push((g, d));
        }
        d += 1;
    }
    if let Some(deg) = rest.degree().filter(|&deg| deg > 0) {
        out.push((rest, deg));
    }
    out
}

/// Cantor–Zassenhaus splitting of a squarefree monic product of degree-`d`
/// irreducibles.
pub fn equal_degree(field: &Field, f: &Poly, d: usize, rng: &mut ChaCha8Rng) -> Vec<Poly> {
    let n = f.degree().expect("nonzero");
    if n == d {
        return vec![f.clone()];
    }
    loop {
        let r = random_poly(field, n, rng);
        if r.is_constant() {
            continue;
        }
        let g = splitting_candidate(field, &r, f, d).gcd(f, field);
        if !g.is_one() && g.degree() != f.degree() {
            let other = f.div_exact(&g, field);
            let mut out = equal_degree(field, &g, d, rng);
            out.extend(equal_degree(field, &other, d, rng));
            return out;
        }
    }
}

fn random_poly(field: &Field, len: usize, rng: &mut ChaCha8Rng) -> Poly {
    let q = field.q();
    Poly::new(
        (0..len)
            .map(|_| field.element(rng.random_range(0..q)).expect("in range"))
            .collect(),
    )
}

/// `r^((q^d-1)/2) - 1` for odd `q`, or the absolute trace of `r` to `F_2`
/// for even `q`, reduced mod `f`.
fn splitting_candidate(field: &Field, r: &Poly, f: &Poly, d: usize) -> Poly {
    if field.p() == 2 {
        let steps = field.m() as usize * d;
        let mut term = r.rem(f, field);
        let mut acc = term.clone();
        for _ in 1..steps {
            term = term.mul_mod(&term, f, field);
            acc = acc.add(&term, field);
        }
        return acc;
    }
    // r^(1 + q + … + q^(d-1)) then raise to (q-1)/2.
    let mut term = r.rem(f, field);
    let mut norm = term.clone();
    for _ in 1..d {
        term = term.frobenius_mod(f, field);
        norm = norm.mul_mod(&term, f, field);
    }
    norm.pow_mod((field.q() - 1) / 2, f, field)
        .sub(&Poly::one(), field)
}

pub fn power_part(field: &Field, h: &Poly) -> Result<PowerPart, PolyError> {
    if h.is_constant() {
        return Err(PolyError::ConstantPolynomial);
    }
    let fac = factor(field, h)?;
    let ell = fac.multiplicity_gcd();
    let f = fac
        .factors
        .iter()
        .fold(Poly::one(), |acc, (p, e)| acc.mul(&p.pow(e / ell, field), field));
    let c = h.lead();
    if f.pow(ell, field).scale(c, field) != *h {
        return Err(PolyError::Reconstruction);
    }
    Ok(PowerPart { c, f, ell })
}

/// Whether `f = c·u^d` for some constant `c` and polynomial `u`.
pub fn is_dth_power_multiple(field: &Field, f: &Poly, d: u64) -> Result<bool, PolyError> {
    if d < 2 {
        return Err(PolyError::BadPowerDegree(d));
    }
    let fac = factor(field, f)?;
    Ok(fac.multiplicity_gcd() % d == 0)
}

/// Degree of the radical, i.e. the number of distinct roots of `f` in its
/// splitting field.
pub fn radical_root_count(field: &Field, f: &Poly) -> Result<usize, PolyError> {
    if f.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    if f.is_constant() {
        return Err(PolyError::ConstantPolynomial);
    }
    let fac = factor(field, f)?;
    Ok(fac
        .factors
        .iter()
        .map(|(p, _)| p.degree().expect("nonconstant factor"))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ints(field: &Field, c: &[i64]) -> Poly {
        Poly::from_ints(field, c)
    }

    #[test]
    fn factor_examples() {
        let f7 = Field::build(7, 1).unwrap();
        let fx = factor(&f7, &ints(&f7, &[0, 0, 1])).unwrap();
        assert_eq!(fx.unit, f7.one());
        assert_eq!(fx.factors, vec![(Poly::x(), 2)]);

        let f5 = Field::build(5, 1).unwrap();
        let fx = factor(&f5, &ints(&f5, &[1, 0, 1])).unwrap();
        assert_eq!(
            fx.factors,
            vec![(ints(&f5, &[2, 1]), 1), (ints(&f5, &[3, 1]), 1)]
        );

        let fx = factor(&f7, &ints(&f7, &[0, 0, 2])).unwrap();
        assert_eq!(fx.unit, f7.from_int(2));
        assert_eq!(fx.factors, vec![(Poly::x(), 2)]);

        assert_eq!(factor(&f7, &Poly::zero()), Err(PolyError::ZeroPolynomial));
    }

    #[test]
    fn characteristic_p_multiplicities() {
        // (x+1)^3 * x^6 over F_3 needs the p-th root step.
        let f3 = Field::build(3, 1).unwrap();
        let h = ints(&f3, &[1, 1]).pow(3, &f3).mul(&Poly::x().pow(6, &f3), &f3);
        let fx = factor(&f3, &h).unwrap();
        assert_eq!(fx.factors, vec![(Poly::x(), 6), (ints(&f3, &[1, 1]), 3)]);
        assert_eq!(fx.multiplicity_gcd(), 3);
        // x^4 + x over F_4: roots are all of F_4.
        let f4 = Field::build(2, 2).unwrap();
        let fx = factor(&f4, &ints(&f4, &[0, 1, 0, 0, 1])).unwrap();
        assert_eq!(fx.factors.len(), 4);
        assert!(fx.factors.iter().all(|(p, e)| p.degree() == Some(1) && *e == 1));
    }

    #[test]
    fn power_part_examples() {
        let f7 = Field::build(7, 1).unwrap();
        let pp = power_part(&f7, &ints(&f7, &[0, 0, 1])).unwrap();
        assert_eq!((pp.c, pp.f.clone(), pp.ell), (f7.one(), Poly::x(), 2));

        let pp = power_part(&f7, &ints(&f7, &[2, 0, 4, 0, 2])).unwrap();
        assert_eq!(pp.c, f7.from_int(2));
        assert_eq!(pp.f, ints(&f7, &[1, 0, 1]));
        assert_eq!(pp.ell, 2);

        // alpha x^2 - 1 with alpha a nonsquare mod 7
        let pp = power_part(&f7, &ints(&f7, &[-1, 0, 3])).unwrap();
        assert_eq!(pp.ell, 1);

        assert_eq!(
            power_part(&f7, &ints(&f7, &[3])),
            Err(PolyError::ConstantPolynomial)
        );
    }

    #[test]
    fn dth_power_examples() {
        let f7 = Field::build(7, 1).unwrap();
        assert!(is_dth_power_multiple(&f7, &ints(&f7, &[0, 0, 1]), 2).unwrap());
        assert!(!is_dth_power_multiple(&f7, &ints(&f7, &[1, 0, 1]), 2).unwrap());
        assert!(is_dth_power_multiple(&f7, &ints(&f7, &[0, 0, 0, 0, 3]), 2).unwrap());
        assert_eq!(
            is_dth_power_multiple(&f7, &Poly::zero(), 2),
            Err(PolyError::ZeroPolynomial)
        );
        assert_eq!(
            is_dth_power_multiple(&f7, &Poly::x(), 1),
            Err(PolyError::BadPowerDegree(1))
        );
    }

    #[test]
    fn radical_examples() {
        let f7 = Field::build(7, 1).unwrap();
        assert_eq!(radical_root_count(&f7, &ints(&f7, &[0, 0, 1])).unwrap(), 1);
        let two_roots = ints(&f7, &[1, 1]).mul(&ints(&f7, &[2, 1]), &f7);
        assert_eq!(radical_root_count(&f7, &two_roots).unwrap(), 2);
        let f5 = Field::build(5, 1).unwrap();
        assert_eq!(radical_root_count(&f5, &ints(&f5, &[0, -1, 0, 1])).unwrap(), 3);
        assert_eq!(
            radical_root_count(&f5, &ints(&f5, &[4])),
            Err(PolyError::ConstantPolynomial)
        );
    }

    fn field_strategy() -> impl Strategy<Value = (u64, u32)> {
        prop_oneof![
            Just((2, 1)),
            Just((3, 1)),
            Just((2, 3)),
            Just((7, 1)),
            Just((3, 2)),
            Just((2, 4)),
            Just((5, 2)),
            Just((3, 3)),
            Just((11, 2)),
            Just((113, 1)),
        ]
    }

    fn random_poly(field: &Field, raw: &[u64], mult_hint: u64) -> Poly {
        let base = Poly::new(raw.iter().map(|&e| field.element(e % field.q()).unwrap()).collect());
        // Mix in repeated factors so multiplicities > 1 are exercised.
        if base.degree().unwrap_or(0) <= 4 && mult_hint.is_multiple_of(3) {
            base.pow(2, field)
        } else {
            base
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn factorization_reconstructs((p, m) in field_strategy(), raw in proptest::collection::vec(any::<u64>(), 2..10), hint in any::<u64>()) {
            let field = Field::build(p, m).unwrap();
            let h = random_poly(&field, &raw, hint);
            prop_assume!(!h.is_zero());
            let fac = factor(&field, &h).unwrap();
            prop_assert_eq!(fac.expand(&field), h.clone());
            for (i, (g, e)) in fac.factors.iter().enumerate() {
                prop_assert!(g.is_monic());
                prop_assert!(*e >= 1);
                prop_assert!(g.is_irreducible(&field));
                for (g2, _) in &fac.factors[i + 1..] {
                    prop_assert_ne!(g, g2);
                }
            }
            if !h.is_constant() {
                let pp = power_part(&field, &h).unwrap();
                prop_assert_eq!(pp.f.pow(pp.ell, &field).scale(pp.c, &field), h.clone());
                for r in crate::arith::prime_divisors(h.degree().unwrap() as u64 + 1).into_iter().chain([2, 3, 5]) {
                    prop_assert!(!is_dth_power_multiple(&field, &h, r * pp.ell).unwrap());
                }
                let roots = radical_root_count(&field, &h).unwrap();
                prop_assert!(roots <= h.degree().unwrap());
                let squarefree = fac.factors.iter().all(|(_, e)| *e == 1);
                prop_assert_eq!(roots == h.degree().unwrap(), squarefree);
            }
        }

        #[test]
        fn factoring_is_seed_independent((p, m) in field_strategy(), raw in proptest::collection::vec(any::<u64>(), 3..8), seed in any::<u64>()) {
            let field = Field::build(p, m).unwrap();
            let h = random_poly(&field, &raw, 1);
            prop_assume!(!h.is_zero());
            prop_assert_eq!(factor_seeded(&field, &h, seed).unwrap(), factor(&field, &h).unwrap());
        }
    }
}

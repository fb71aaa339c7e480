//! Finite-field product representations and the sumset invariant behind them.
//!
//! For a polynomial `h` over `F_q` and `k >= 2`, `F_k(q; h)` is the largest
//! `A ⊂ F_q*` such that no product of `k` distinct elements of `A` lies in the
//! value set `h(F_q)`. Writing `h = C·f^ℓ` with `ℓ` maximal, `n = gcd(ℓ, q-1)`
//! and `C ∈ g^s H` for the index-`n` subgroup `H`, the size of `F_k(q; h)` is
//! governed by `m(k, n; s)`, the largest `B ⊂ Z_n` whose `k`-fold sumset
//! avoids `s`.
//!
//! Modules, bottom up:
//! - [`field`]: `F_{p^m}` arithmetic, generators, discrete logs.
//! - [`poly`], [`factor`]: polynomials, factorization, power parts.
//! - [`character`]: multiplicative characters, character sums, Weil checks,
//!   representation counts.
//! - [`sumset`]: `k`-fold sumsets in `Z_n` and exact `m(k, n; s)`.
//! - [`product`]: the `★`-property, exact `F_k(q; h)`, coset constructions.

pub mod arith;
pub mod bits;
pub mod character;
pub mod factor;
pub mod field;
pub mod poly;
pub mod product;
pub mod sumset;

pub use factor::{factor, power_part, Factorization, PowerPart};
pub use field::{Field, FieldConfig, FieldElement, FieldError, FieldSpec};
pub use poly::{value_set, Poly, PolyError, ValueSet};

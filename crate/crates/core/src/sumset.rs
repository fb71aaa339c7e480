//! `k`-fold sumsets in `Z_n` and the extremal quantity
//! `m(k, n; s) = max{|B| : B ⊂ Z_n, s ∉ kB}`.
//!
//! Sumsets allow repeated summands: `kB = {b_1 + … + b_k : b_i ∈ B}`.
//!
//! Exact values come from an exhaustive search that starts one size above the
//! divisor-maximum upper bound, so a successful run certifies that bound
//! independently instead of assuming it. Two symmetries are used:
//! `(B, s) ↦ (λB, λs)` for units `λ`, and `(B, s) ↦ (B + t, s + kt)`.

use std::fmt;

use num_integer::Integer;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::arith::{divisors, floor_div, mod_inverse};
use crate::bits::{bits_of, BitSet, Mask64};

/// Largest `n` for which [`m_exact`] certifies by exhaustive search.
pub const DEFAULT_SEARCH_CAP: u64 = 28;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SumsetError {
    #[error("n = {n} exceeds the exhaustive search cap {cap}")]
    SizeCapExceeded { n: u64, cap: u64 },
    #[error("gcd(k = {k}, n = {n}) is not 1")]
    NotCoprime { k: u64, n: u64 },
    #[error("{lambda} is not a unit modulo {n}")]
    NotAUnit { lambda: u64, n: u64 },
    #[error("{d} does not divide {n}")]
    NotADivisor { d: u64, n: u64 },
    #[error("interval construction is empty at d = {d}")]
    Degenerate { d: u64 },
    #[error("invalid parameters: {0}")]
    BadParameters(String),
}

/// A subset of `Z_n` as a dense bit-vector.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ZnSubset {
    mask: BitSet,
}

impl ZnSubset {
    pub fn empty(n: u64) -> Self {
        assert!(n >= 1, "Z_0 is not supported");
        ZnSubset {
            mask: BitSet::new(n as usize),
        }
    }

    pub fn full(n: u64) -> Self {
        assert!(n >= 1, "Z_0 is not supported");
        ZnSubset {
            mask: BitSet::full(n as usize),
        }
    }

    /// Elements are reduced mod `n`.
    pub fn from_elements<I: IntoIterator<Item = u64>>(n: u64, items: I) -> Self {
        let mut s = ZnSubset::empty(n);
        for x in items {
            s.insert(x % n);
        }
        s
    }

    pub fn modulus(&self) -> u64 {
        self.mask.len() as u64
    }

    pub fn insert(&mut self, x: u64) {
        self.mask.insert(x as usize);
    }

    pub fn contains(&self, x: u64) -> bool {
        self.mask.contains((x % self.modulus()) as usize)
    }

    pub fn len(&self) -> usize {
        self.mask.count()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.is_empty()
    }

    pub fn elements(&self) -> Vec<u64> {
        self.mask.iter().map(|i| i as u64).collect()
    }

    pub fn as_bits(&self) -> &BitSet {
        &self.mask
    }

    /// `B ⊕ C = {b + c}`.
    pub fn sum(&self, other: &ZnSubset) -> ZnSubset {
        ZnSubset {
            mask: self.mask.cyclic_sum(&other.mask),
        }
    }

    pub fn translate(&self, t: u64) -> ZnSubset {
        ZnSubset {
            mask: self.mask.rotate((t % self.modulus()) as usize),
        }
    }

    /// `λB`.
    pub fn scale(&self, lambda: u64) -> ZnSubset {
        let n = self.modulus();
        ZnSubset::from_elements(n, self.mask.iter().map(|b| (b as u64 * lambda) % n))
    }

    pub fn k_fold(&self, k: u64) -> ZnSubset {
        k_fold_sumset(self, k)
    }
}

impl fmt::Debug for ZnSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z_{}", self.modulus())?;
        f.debug_set().entries(self.mask.iter()).finish()
    }
}

/// Space-separated elements, ascending.
impl fmt::Display for ZnSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.mask.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl Serialize for ZnSubset {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.mask.iter())
    }
}

/// `kB` by double-and-add on the sumset semiring. `0B = {0}`.
pub fn k_fold_sumset(b: &ZnSubset, k: u64) -> ZnSubset {
    let n = b.modulus();
    let mut acc = ZnSubset::from_elements(n, [0]);
    let mut base = b.clone();
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            acc = acc.sum(&base);
        }
        k >>= 1;
        if k > 0 {
            base = base.sum(&base);
        }
    }
    acc
}

fn k_fold_mask(w: &Mask64, b: u64, k: u64) -> u64 {
    let mut acc = 1u64;
    let mut base = b;
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            acc = w.sum(acc, base);
        }
        k >>= 1;
        if k > 0 {
            base = w.sum(base, base);
        }
    }
    acc
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Search,
    Formula,
    ZeroRule,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Search => "search",
            Method::Formula => "formula",
            Method::ZeroRule => "zero-rule",
        })
    }
}

/// An exact value of `m(k, n; s)` with a witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MRecord {
    pub k: u64,
    pub n: u64,
    pub s: u64,
    pub value: usize,
    pub witness: ZnSubset,
    pub method: Method,
}

fn check_params(k: u64, n: u64, s: u64) -> Result<(), SumsetError> {
    if k < 2 {
        return Err(SumsetError::BadParameters(format!("k = {k} < 2")));
    }
    if n < 1 {
        return Err(SumsetError::BadParameters("n = 0".into()));
    }
    if s >= n {
        return Err(SumsetError::BadParameters(format!("s = {s} not reduced mod {n}")));
    }
    Ok(())
}

/// Canonical representative of the orbit of `s` under `s ↦ λs + kt`, with the
/// `(λ, t)` that reaches it. Ties keep the smallest `λ`, then `t`.
pub fn canonical_target(k: u64, n: u64, s: u64) -> (u64, u64, u64) {
    let mut best = (s % n, 1, 0);
    for lambda in (1..=n).filter(|&l| l.gcd(&n) == 1) {
        for t in 0..n {
            let img = (lambda % n * s + k % n * t) % n;
            if img < best.0 {
                best = (img, lambda % n, t);
            }
        }
    }
    best
}

/// Exact `m(k, n; s)` by exhaustive search with the default cap.
pub fn m_exact(k: u64, n: u64, s: u64) -> Result<MRecord, SumsetError> {
    m_exact_capped(k, n, s, DEFAULT_SEARCH_CAP)
}

pub fn m_exact_capped(k: u64, n: u64, s: u64, cap: u64) -> Result<MRecord, SumsetError> {
    check_params(k, n, s)?;
    if n > cap.min(64) {
        return Err(SumsetError::SizeCapExceeded { n, cap });
    }
    let (target, lambda, t) = canonical_target(k, n, s);
    let w = Mask64::new(n as usize);
    // Translations by multiples of n/gcd(k, n) fix the target, so a
    // lexicographically first solution starts below n/gcd(k, n).
    let first_limit = n / k.gcd(&n);
    let (_, upper) = m_bounds(k, n);
    let start = (upper + 1).min(n as usize);
    let mut found = None;
    for size in (1..=start).rev() {
        if let Some(mask) = search_size(&w, k, target, size, first_limit) {
            found = Some(mask);
            break;
        }
    }
    let canonical = match found {
        Some(mask) => w.to_bitset(mask),
        None => BitSet::new(n as usize),
    };
    // Undo the canonicalisation: B = λ^{-1}(B' - t).
    let lambda_inv = mod_inverse(lambda, n).expect("lambda is a unit");
    let witness = ZnSubset { mask: canonical }
        .translate(n - t % n)
        .scale(lambda_inv);
    debug_assert!(!k_fold_sumset(&witness, k).contains(s));
    Ok(MRecord {
        k,
        n,
        s,
        value: witness.len(),
        witness,
        method: Method::Search,
    })
}

fn search_size(w: &Mask64, k: u64, target: u64, size: usize, first_limit: u64) -> Option<u64> {
    fn dfs(
        w: &Mask64,
        k: u64,
        target_bit: u64,
        size: usize,
        first_limit: usize,
        start: usize,
        chosen: u64,
        count: usize,
    ) -> Option<u64> {
        if count == size {
            return Some(chosen);
        }
        let n = w.width();
        for c in start..n {
            if n - c < size - count || (count == 0 && c >= first_limit) {
                break;
            }
            let next = chosen | 1 << c;
            if k_fold_mask(w, next, k) & target_bit != 0 {
                continue;
            }
            if let Some(found) = dfs(w, k, target_bit, size, first_limit, c + 1, next, count + 1) {
                return Some(found);
            }
        }
        None
    }
    dfs(w, k, 1 << target, size, first_limit as usize, 0, 0, 0)
}

/// `max_{d | n} (⌊(d-2)/k⌋ + 1)·(n/d)`, exact when `gcd(k, n) = 1`.
pub fn m_formula_coprime(k: u64, n: u64) -> Result<usize, SumsetError> {
    if k.gcd(&n) != 1 {
        return Err(SumsetError::NotCoprime { k, n });
    }
    Ok(upper_term_max(k, n))
}

fn upper_term(k: u64, n: u64, d: u64) -> i64 {
    (floor_div(d as i64 - 2, k as i64) + 1) * (n / d) as i64
}

fn lower_term(k: u64, n: u64, d: u64) -> i64 {
    let r = d.gcd(&k) as i64;
    (floor_div(d as i64 - 1 - r, k as i64) + 1) * (n / d) as i64
}

fn upper_term_max(k: u64, n: u64) -> usize {
    divisors(n)
        .into_iter()
        .map(|d| upper_term(k, n, d))
        .max()
        .unwrap_or(0)
        .max(0) as usize
}

/// `(lower, upper)` from the divisor maxima
/// `⌊(d-1-gcd(d,k))/k⌋ + 1` and `⌊(d-2)/k⌋ + 1`, each times `n/d`.
pub fn m_bounds(k: u64, n: u64) -> (usize, usize) {
    let lower = divisors(n)
        .into_iter()
        .map(|d| lower_term(k, n, d))
        .max()
        .unwrap_or(0)
        .max(0) as usize;
    (lower, upper_term_max(k, n))
}

/// `m(k, n; s) = 0` exactly when `n | k` and `s = 0`.
pub fn zero_rule(k: u64, n: u64, s: u64) -> bool {
    n != 0 && k.is_multiple_of(n) && s.is_multiple_of(n)
}

/// Preimage of an interval of `Z_d` under `Z_n → Z_d`, sized by the lower
/// bound's `d`-term and positioned so that `s ∉ kB`.
pub fn interval_construction(k: u64, n: u64, s: u64, d: u64) -> Result<ZnSubset, SumsetError> {
    if k < 1 || n < 1 {
        return Err(SumsetError::BadParameters(format!("k = {k}, n = {n}")));
    }
    if d == 0 || !n.is_multiple_of(d) {
        return Err(SumsetError::NotADivisor { d, n });
    }
    let r = d.gcd(&k);
    let t = floor_div(d as i64 - 1 - r as i64, k as i64) + 1;
    if t <= 0 {
        return Err(SumsetError::Degenerate { d });
    }
    let t = t as u64;
    let ps = s % d;
    let span = k * (t - 1);
    // F = π(s) - {0, …, k(t-1)}; pick the smallest y ∈ rZ_d outside F.
    let in_forbidden = |y: u64| (ps + d - y % d) % d <= span;
    let y = (0..d / r)
        .map(|i| i * r)
        .find(|&y| !in_forbidden(y))
        .expect("an interval of length d - r cannot cover rZ_d");
    let a = (0..d)
        .find(|&a| (k % d) * a % d == y)
        .expect("y lies in kZ_d");
    let b = ZnSubset::from_elements(n, (0..n).filter(|x| (x % d + d - a) % d < t));
    if k_fold_sumset(&b, k).contains(s) {
        return Err(SumsetError::BadParameters(format!(
            "interval construction failed verification for k={k}, n={n}, s={s}, d={d}"
        )));
    }
    Ok(b)
}

/// `(0, t)` with `t ≡ -k^{-1}s`, so `s ∉ kB` iff `0 ∉ k(B + t)`.
pub fn translate_reduce(k: u64, n: u64, s: u64) -> Result<(u64, u64), SumsetError> {
    let inv = mod_inverse(k % n, n).ok_or(SumsetError::NotCoprime { k, n })?;
    let t = (n - (inv * (s % n)) % n) % n;
    Ok((0, t))
}

/// `λs mod n` for a unit `λ`.
pub fn unit_scale(n: u64, s: u64, lambda: u64) -> Result<u64, SumsetError> {
    if n == 0 || lambda.gcd(&n) != 1 {
        return Err(SumsetError::NotAUnit { lambda, n });
    }
    Ok(lambda % n * (s % n) % n)
}

/// Result of [`m_resolve`]: exact when possible, bounds otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MEstimate {
    pub k: u64,
    pub n: u64,
    pub s: u64,
    pub lower: usize,
    pub upper: usize,
    pub record: Option<MRecord>,
}

impl MEstimate {
    pub fn value(&self) -> Option<usize> {
        self.record.as_ref().map(|r| r.value)
    }

    pub fn method_label(&self) -> String {
        self.record
            .as_ref()
            .map_or_else(|| "bounds-only".to_string(), |r| r.method.to_string())
    }
}

/// Search within `cap`; beyond it, use the zero rule, the coprime formula with
/// an interval-construction witness, or report bounds only.
pub fn m_resolve(k: u64, n: u64, s: u64, cap: u64) -> Result<MEstimate, SumsetError> {
    check_params(k, n, s)?;
    let (lower, upper) = m_bounds(k, n);
    let record = if n <= cap.min(64) {
        Some(m_exact_capped(k, n, s, cap)?)
    } else if zero_rule(k, n, s) {
        Some(MRecord {
            k,
            n,
            s,
            value: 0,
            witness: ZnSubset::empty(n),
            method: Method::ZeroRule,
        })
    } else if k.gcd(&n) == 1 {
        let value = m_formula_coprime(k, n)?;
        let witness = best_interval_construction(k, n, s)
            .filter(|w| w.len() == value)
            .ok_or_else(|| {
                SumsetError::BadParameters(format!("no interval witness for k={k}, n={n}"))
            })?;
        Some(MRecord {
            k,
            n,
            s,
            value,
            witness,
            method: Method::Formula,
        })
    } else {
        None
    };
    Ok(MEstimate {
        k,
        n,
        s,
        lower,
        upper,
        record,
    })
}

/// Largest interval construction over all divisors; ties keep the smallest `d`.
pub fn best_interval_construction(k: u64, n: u64, s: u64) -> Option<ZnSubset> {
    divisors(n)
        .into_iter()
        .filter_map(|d| interval_construction(k, n, s, d).ok())
        .fold(None, |best: Option<ZnSubset>, b| match best {
            Some(cur) if cur.len() >= b.len() => Some(cur),
            _ => Some(b),
        })
}

/// Every `B ⊂ Z_n` of the given size with `s ∉ kB`, in lexicographic order.
/// Intended for `n <= 20`.
pub fn avoiding_sets(k: u64, n: u64, s: u64, size: usize) -> Vec<ZnSubset> {
    assert!(n <= 64);
    let w = Mask64::new(n as usize);
    let mut out = Vec::new();
    fn rec(w: &Mask64, k: u64, s: u64, size: usize, start: usize, chosen: u64, count: usize, out: &mut Vec<u64>) {
        if count == size {
            out.push(chosen);
            return;
        }
        for c in start..w.width() {
            if w.width() - c < size - count {
                break;
            }
            let next = chosen | 1 << c;
            if k_fold_mask(w, next, k) >> s & 1 == 1 {
                continue;
            }
            rec(w, k, s, size, c + 1, next, count + 1, out);
        }
    }
    let mut masks = Vec::new();
    rec(&w, k, s, size, 0, 0, 0, &mut masks);
    for m in masks {
        out.push(ZnSubset::from_elements(n, bits_of(m).map(|b| b as u64)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: enumerate all k-tuples.
    fn brute_k_fold(b: &[u64], n: u64, k: u64) -> Vec<u64> {
        let mut sums = vec![false; n as usize];
        if b.is_empty() {
            return Vec::new();
        }
        let mut idx = vec![0usize; k as usize];
        loop {
            let s: u64 = idx.iter().map(|&i| b[i]).sum::<u64>() % n;
            sums[s as usize] = true;
            let mut pos = 0;
            loop {
                if pos == idx.len() {
                    return (0..n).filter(|&i| sums[i as usize]).collect();
                }
                idx[pos] += 1;
                if idx[pos] < b.len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    }

    /// Independent oracle for m(k, n; s): scan all 2^n subsets.
    fn brute_m(k: u64, n: u64, s: u64) -> usize {
        (0u64..1 << n)
            .filter(|&mask| {
                let b: Vec<u64> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                !brute_k_fold(&b, n, k).contains(&s)
            })
            .map(|mask| mask.count_ones() as usize)
            .max()
            .unwrap()
    }

    #[test]
    fn k_fold_examples() {
        assert!(k_fold_sumset(&ZnSubset::empty(5), 3).is_empty());
        assert_eq!(k_fold_sumset(&ZnSubset::full(6), 4), ZnSubset::full(6));
        let b = ZnSubset::from_elements(3, [1]);
        assert_eq!(k_fold_sumset(&b, 2).elements(), vec![2]);
    }

    #[test]
    fn k_fold_matches_enumeration_exhaustively() {
        for n in 1..=12u64 {
            for mask in 0u64..1 << n {
                let elems: Vec<u64> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
                let b = ZnSubset::from_elements(n, elems.iter().copied());
                for k in 1..=4 {
                    assert_eq!(k_fold_sumset(&b, k).elements(), brute_k_fold(&elems, n, k));
                }
            }
        }
    }

    #[test]
    fn m_exact_examples() {
        for k in 2..6 {
            let r = m_exact(k, 1, 0).unwrap();
            assert_eq!(r.value, 0);
        }
        let r = m_exact(2, 3, 0).unwrap();
        assert_eq!(r.value, 1);
        assert_eq!(brute_m(2, 3, 0), 1);
        for (k, n) in [(2, 2), (4, 2), (6, 3), (4, 4), (6, 6)] {
            assert_eq!(m_exact(k, n, 0).unwrap().value, 0);
        }
        assert!(matches!(
            m_exact(2, 29, 0),
            Err(SumsetError::SizeCapExceeded { .. })
        ));
        assert!(m_exact(1, 4, 0).is_err());
        assert!(m_exact(2, 4, 4).is_err());
    }

    #[test]
    fn m_exact_matches_brute_force() {
        for n in 1..=10u64 {
            for k in 2..=5u64 {
                for s in 0..n {
                    let r = m_exact(k, n, s).unwrap();
                    assert_eq!(r.value, brute_m(k, n, s), "k={k} n={n} s={s}");
                    assert!(!brute_k_fold(&r.witness.elements(), n, k).contains(&s));
                }
            }
        }
    }

    #[test]
    fn formula_examples() {
        assert_eq!(m_formula_coprime(2, 3).unwrap(), 1);
        assert_eq!(m_formula_coprime(3, 2).unwrap(), 1);
        assert_eq!(m_formula_coprime(2, 4), Err(SumsetError::NotCoprime { k: 2, n: 4 }));
        assert_eq!(m_bounds(2, 4), (1, 2));
        assert_eq!(m_bounds(2, 3), (1, 1));
        assert_eq!(m_bounds(2, 1), (0, 0));
    }

    #[test]
    fn zero_rule_examples() {
        assert!(zero_rule(4, 2, 0));
        assert!(!zero_rule(3, 2, 0));
        assert!(!zero_rule(2, 2, 1));
    }

    #[test]
    fn interval_examples() {
        let b = interval_construction(2, 4, 0, 4).unwrap();
        assert_eq!(b.len(), 1);
        assert!(!b.k_fold(2).contains(0));
        // d = 3: r = 1, t = floor(1/2) + 1 = 1, so |B| = 1 * 6/3 = 2.
        let b = interval_construction(2, 6, 0, 3).unwrap();
        assert_eq!(b.len(), 2);
        assert!(!b.k_fold(2).contains(0));
        assert_eq!(
            interval_construction(2, 2, 0, 1),
            Err(SumsetError::Degenerate { d: 1 })
        );
        assert!(matches!(
            interval_construction(2, 6, 0, 4),
            Err(SumsetError::NotADivisor { .. })
        ));
    }

    #[test]
    fn interval_construction_hits_lower_term() {
        for n in 1..=24u64 {
            for k in 2..=6u64 {
                for d in divisors(n) {
                    let term = lower_term(k, n, d);
                    for s in 0..n {
                        match interval_construction(k, n, s, d) {
                            Ok(b) => {
                                assert_eq!(b.len() as i64, term);
                                assert!(!b.k_fold(k).contains(s));
                            }
                            Err(SumsetError::Degenerate { .. }) => assert!(term <= 0),
                            Err(e) => panic!("{e}"),
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn translate_and_scale_examples() {
        assert_eq!(translate_reduce(2, 3, 1).unwrap(), (0, 1));
        assert_eq!(translate_reduce(3, 5, 0).unwrap(), (0, 0));
        assert_eq!(
            translate_reduce(2, 4, 1),
            Err(SumsetError::NotCoprime { k: 2, n: 4 })
        );
        assert_eq!(unit_scale(5, 2, 3).unwrap(), 1);
        assert_eq!(unit_scale(7, 4, 1).unwrap(), 4);
        assert_eq!(unit_scale(4, 1, 2), Err(SumsetError::NotAUnit { lambda: 2, n: 4 }));
    }

    #[test]
    fn translation_reduction_preserves_avoidance() {
        for n in 1..=9u64 {
            for k in (2..=5u64).filter(|k| k.gcd(&n) == 1) {
                for s in 0..n {
                    let (_, t) = translate_reduce(k, n, s).unwrap();
                    assert_eq!((k * t + s) % n, 0);
                    for mask in 0u64..1 << n {
                        let b = ZnSubset::from_elements(n, (0..n).filter(|i| mask >> i & 1 == 1));
                        assert_eq!(
                            b.k_fold(k).contains(s),
                            b.translate(t).k_fold(k).contains(0)
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn unit_scaling_invariance() {
        for n in 1..=16u64 {
            for k in 2..=5u64 {
                let values: Vec<usize> = (0..n).map(|s| m_exact(k, n, s).unwrap().value).collect();
                for s in 0..n {
                    for lambda in (1..=n).filter(|l| l.gcd(&n) == 1) {
                        let s2 = unit_scale(n, s, lambda).unwrap();
                        assert_eq!(values[s as usize], values[s2 as usize]);
                    }
                }
            }
        }
    }

    #[test]
    fn resolve_beyond_cap() {
        let e = m_resolve(3, 40, 7, 28).unwrap();
        let r = e.record.unwrap();
        assert_eq!(r.method, Method::Formula);
        assert_eq!(r.value, m_formula_coprime(3, 40).unwrap());
        assert!(!r.witness.k_fold(3).contains(7));
        let e = m_resolve(30, 30, 0, 28).unwrap();
        assert_eq!(e.record.unwrap().method, Method::ZeroRule);
        let e = m_resolve(2, 30, 1, 28).unwrap();
        assert!(e.record.is_none());
        assert_eq!(e.method_label(), "bounds-only");
        assert!(e.lower <= e.upper);
    }

    #[test]
    fn avoiding_sets_enumeration() {
        let sets = avoiding_sets(2, 4, 0, 2);
        assert!(sets.iter().all(|b| b.len() == 2 && !b.k_fold(2).contains(0)));
        assert_eq!(sets.len(), avoiding_sets(2, 4, 0, 2).len());
        assert_eq!(avoiding_sets(2, 4, 0, 3).len(), 0);
    }
}

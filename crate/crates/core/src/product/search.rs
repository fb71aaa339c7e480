//! Exact `F_k(q; h)` by branch and bound over `Z_{q-1}`.
//!
//! A node holds the chosen set `S`, the sums of `j` distinct elements of `S`
//! for `j < k`, and the candidates that can still be added. Adding `v` forbids
//! every `c` with `c + σ` a target for some new `(k-1)`-sum `σ`. The bound is
//! `|S|` plus a greedy clique cover of the candidates under the pair conflict
//! `u + v ∈ targets - sums_{k-2}`.

use serde::Serialize;

use super::{coset_construction, CandidateSet, FkMode, FkResult, Instance, ProductError};
use crate::bits::{bits_of, Mask64};

pub const DEFAULT_NODE_LIMIT: u64 = 50_000_000;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FkOptions {
    /// Largest `q` searched exactly when `k = 2`.
    pub cap_pairs: u64,
    /// Largest `q` searched exactly when `k >= 3`.
    pub cap_higher: u64,
    pub node_limit: u64,
}

impl Default for FkOptions {
    fn default() -> Self {
        FkOptions {
            cap_pairs: 64,
            cap_higher: 32,
            node_limit: DEFAULT_NODE_LIMIT,
        }
    }
}

struct Search {
    w: Mask64,
    k: usize,
    targets: u64,
    best: usize,
    best_set: Option<u64>,
    nodes: u64,
    limit: u64,
    aborted: bool,
}

impl Search {
    fn bound(&self, sums: &[u64], cand: u64) -> usize {
        let base = sums[self.k - 2];
        if base == 0 {
            return cand.count_ones() as usize;
        }
        let conflict = self.w.diff(self.targets, base);
        // common[c]: vertices adjacent to every member of clique c
        let mut common: Vec<u64> = Vec::new();
        for v in bits_of(cand) {
            let nbrs = self.w.rot_neg(conflict, v) & !(1u64 << v);
            match common.iter_mut().find(|c| **c >> v & 1 == 1) {
                Some(c) => *c &= nbrs,
                None => common.push(nbrs),
            }
        }
        common.len()
    }

    fn run(&mut self, chosen: u64, size: usize, sums: &[u64], cand: u64) {
        if self.aborted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.limit {
            self.aborted = true;
            return;
        }
        if cand == 0 {
            if size > self.best {
                self.best = size;
                self.best_set = Some(chosen);
            }
            return;
        }
        if size + self.bound(sums, cand) <= self.best {
            return;
        }
        let v = cand.trailing_zeros() as usize;
        let bit = 1u64 << v;
        let mut next = sums.to_vec();
        for j in (1..self.k).rev() {
            next[j] |= self.w.rot(sums[j - 1], v);
        }
        let fresh = next[self.k - 1] & !sums[self.k - 1];
        let forbidden = self.w.diff(self.targets, fresh);
        self.run(chosen | bit, size + 1, &next, cand & !bit & !forbidden);
        self.run(chosen, size, sums, cand & !bit);
    }
}

/// [`exact_fk_with`] under the default caps.
pub fn exact_fk(inst: &Instance<'_>) -> Result<FkResult, ProductError> {
    exact_fk_with(inst, &FkOptions::default())
}

/// Exact `F_k(q; h)` within the caps; beyond them, or when the node limit is
/// hit, a bracket `[best known set, counting bound]`.
pub fn exact_fk_with(inst: &Instance<'_>, opts: &FkOptions) -> Result<FkResult, ProductError> {
    let q = inst.q();
    let w = inst.field.order() as usize;
    let k = inst.k as usize;
    let construction = match coset_construction(inst) {
        Ok(a) => Some(a),
        Err(ProductError::EmptyConstruction) | Err(ProductError::Unresolved(_)) => None,
        Err(e) => return Err(e),
    };
    let floor = construction.as_ref().map_or(0, CandidateSet::len);
    let cap = if k == 2 { opts.cap_pairs } else { opts.cap_higher };
    if q > cap || w > 64 {
        let witness = construction.unwrap_or_else(|| trivial_set(inst));
        return Ok(FkResult {
            value: witness.len(),
            upper: inst.counting_upper().max(witness.len()),
            witness,
            main_term: inst.main_term(),
            mode: FkMode::Bracket,
            nodes: 0,
        });
    }

    let mask = Mask64::new(w);
    let targets = mask.from_bitset(&inst.targets);
    let mut search = Search {
        w: mask,
        k,
        targets,
        best: floor.saturating_sub(1),
        best_set: None,
        nodes: 0,
        limit: opts.node_limit,
        aborted: false,
    };
    let mut sums = vec![0u64; k];
    sums[0] = 1;
    search.run(0, 0, &sums, mask.full());

    let found = search
        .best_set
        .map(|m| CandidateSet::from_logs(inst.field, bits_of(m).map(|b| b as u64)));
    let witness = match (found, construction) {
        (Some(f), Some(c)) => {
            if f.len() >= c.len() {
                f
            } else {
                c
            }
        }
        (Some(f), None) => f,
        (None, Some(c)) => c,
        (None, None) => CandidateSet::empty(inst.field),
    };
    if !super::star_check(inst, &witness) {
        return Err(ProductError::VerificationFailed("search witness is not a star set".into()));
    }
    let (mode, upper) = if search.aborted {
        (FkMode::Bracket, inst.counting_upper().max(witness.len()))
    } else {
        (FkMode::Exact, witness.len())
    };
    Ok(FkResult {
        value: witness.len(),
        upper,
        witness,
        main_term: inst.main_term(),
        mode,
        nodes: search.nodes,
    })
}

/// Any `k - 1` units form a star set.
fn trivial_set(inst: &Instance<'_>) -> CandidateSet {
    let take = (inst.k - 1).min(inst.field.order());
    CandidateSet::from_logs(inst.field, 0..take)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::poly::Poly;
    use crate::product::{build_instance, star_check};

    /// Largest star set over all subsets of `F_q*`.
    fn brute_fk(inst: &Instance<'_>) -> usize {
        let w = inst.field.order();
        (0u64..1 << w)
            .filter(|&m| {
                let a = CandidateSet::from_logs(inst.field, bits_of(m).map(|b| b as u64));
                star_check(inst, &a)
            })
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap()
    }

    #[test]
    fn squares_pairs() {
        for q in [5u64, 7, 11, 13, 17, 19, 23, 29, 31] {
            let field = Field::build(q, 1).unwrap();
            let inst = build_instance(&field, &Poly::from_ints(&field, &[0, 0, 1]), 2).unwrap();
            let r = exact_fk(&inst).unwrap();
            assert_eq!((r.value, r.mode), (2, FkMode::Exact), "q = {q}");
            assert_eq!(r.main_term.unwrap(), 0.into());
        }
    }

    #[test]
    fn nonsquares_for_triples() {
        for q in [7u64, 11, 13] {
            let field = Field::build(q, 1).unwrap();
            let inst = build_instance(&field, &Poly::from_ints(&field, &[0, 0, 1]), 3).unwrap();
            let r = exact_fk(&inst).unwrap();
            assert!(r.value as u64 >= (q - 1) / 2);
        }
    }

    #[test]
    fn agrees_with_brute_force() {
        let cases: &[(u64, u32, &[i64], u64)] = &[
            (7, 1, &[0, 0, 0, 1], 2),
            (7, 1, &[0, 0, 1], 3),
            (7, 1, &[1, 0, 1], 2),
            (5, 1, &[2, 1, 1], 2),
            (3, 2, &[0, 0, 0, 0, 1], 2),
            (3, 2, &[1, 1, 0, 1], 3),
            (2, 4, &[0, 0, 0, 1], 2),
            (2, 4, &[1, 0, 0, 1], 3),
            (13, 1, &[0, 0, 0, 1], 2),
            (13, 1, &[0, 0, 0, 0, 1], 3),
            (13, 1, &[2, 0, 0, 1], 4),
            (11, 1, &[0, 0, 1], 4),
            (17, 1, &[0, 0, 0, 0, 1], 2),
        ];
        for &(p, m, h, k) in cases {
            let field = Field::build(p, m).unwrap();
            let inst = build_instance(&field, &Poly::from_ints(&field, h), k).unwrap();
            let r = exact_fk(&inst).unwrap();
            assert_eq!(r.mode, FkMode::Exact);
            assert_eq!(r.value, brute_fk(&inst), "p={p} m={m} h={h:?} k={k}");
            if let Ok(c) = coset_construction(&inst) {
                assert!(r.value >= c.len());
            }
        }
    }

    #[test]
    fn cubes_over_seven() {
        let field = Field::build(7, 1).unwrap();
        let inst = build_instance(&field, &Poly::from_ints(&field, &[0, 0, 0, 1]), 2).unwrap();
        let r = exact_fk(&inst).unwrap();
        assert_eq!(r.value, 3);
        assert!(r.defect().unwrap() > 0.into());
    }

    #[test]
    fn bracket_beyond_cap() {
        let field = Field::build(67, 1).unwrap();
        let inst = build_instance(&field, &Poly::from_ints(&field, &[0, 0, 0, 1]), 2).unwrap();
        let r = exact_fk(&inst).unwrap();
        assert_eq!(r.mode, FkMode::Bracket);
        assert_eq!(r.value, 22);
        assert!(r.upper >= r.value && r.upper <= 66);
        let small = FkOptions {
            node_limit: 3,
            ..FkOptions::default()
        };
        let field = Field::build(31, 1).unwrap();
        let inst = build_instance(&field, &Poly::from_ints(&field, &[1, 1, 1]), 3).unwrap();
        let r = exact_fk_with(&inst, &small).unwrap();
        assert_eq!(r.mode, FkMode::Bracket);
        assert!(star_check(&inst, &r.witness));
    }
}

//! Payload builders shared by the subcommands, config runs and the
//! acceptance runner. Everything here is deterministic in its inputs.

use fqprod_core::arith::{is_prime, prime_power};
use fqprod_core::character::{monic_polys, weil_verify, WeilRow};
use fqprod_core::poly::format_element;
use fqprod_core::product::{
    build_instance, coset_construction, exact_fk_with, fk_construct, remark3_construction,
    remark4_construction, structure_distance, CandidateSet, FkMode, FkOptions, FkResult, Instance,
    SpecialConstruction,
};
use fqprod_core::sumset::{k_fold_sumset, m_formula_coprime, m_resolve, zero_rule, MEstimate};
use fqprod_core::{factor, power_part, value_set, Field, Poly};
use num_integer::Integer;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::{config_err, Failure};

pub fn field_pm(p: u64, m: u32) -> Result<Field, Failure> {
    Field::build(p, m).map_err(config_err)
}

pub fn field_q(q: u64) -> Result<Field, Failure> {
    let (p, m) = prime_power(q).ok_or_else(|| Failure::Config(format!("{q} is not a prime power")))?;
    field_pm(p, m)
}

pub fn parse_poly(field: &Field, text: &str) -> Result<Poly, Failure> {
    Poly::parse(field, text).map_err(config_err)
}

/// `x^L` as accepted by `--h-family`.
pub fn parse_monomial_family(text: &str) -> Result<u64, Failure> {
    text.trim()
        .strip_prefix("x^")
        .and_then(|l| l.parse::<u64>().ok())
        .filter(|&l| l >= 1)
        .ok_or_else(|| Failure::Config(format!("expected x^L, got {text:?}")))
}

pub fn field_info(field: &Field) -> Value {
    json!({
        "p": field.p(),
        "m": field.m(),
        "q": field.q(),
        "modulus": field.modulus(),
        "generator": format_element(field, field.generator()),
        "dlog_tables": field.has_tables(),
    })
}

pub fn power_part_info(field: &Field, h: &Poly) -> Result<Value, Failure> {
    let fac = factor(field, h).map_err(config_err)?;
    let pp = power_part(field, h).map_err(config_err)?;
    let factors: Vec<Value> = fac
        .factors
        .iter()
        .map(|(f, e)| json!({ "factor": f.format(field), "multiplicity": e }))
        .collect();
    Ok(json!({
        "q": field.q(),
        "h": h.format(field),
        "unit": format_element(field, fac.unit),
        "factors": factors,
        "c": format_element(field, pp.c),
        "f": pp.f.format(field),
        "ell": pp.ell,
    }))
}

pub fn value_set_info(field: &Field, h: &Poly) -> Value {
    let vs = value_set(field, h);
    let values: Vec<String> = vs.iter().map(|v| format_element(field, v)).collect();
    json!({ "q": field.q(), "h": h.format(field), "size": vs.len(), "values": values })
}

/// Worst case over `a` for every `(f, χ)` with `f` monic of the given degree,
/// or just the given `f`.
pub fn weil_rows(field: &Field, deg: usize, only: Option<&Poly>) -> Result<Vec<WeilRow>, Failure> {
    let polys: Vec<Poly> = match only {
        Some(f) => vec![f.clone()],
        None => monic_polys(field, deg).collect(),
    };
    let reports = polys
        .par_iter()
        .map(|f| weil_verify(field, f))
        .collect::<Result<Vec<_>, _>>()
        .map_err(config_err)?;
    Ok(reports.into_iter().flat_map(|r| r.rows).collect())
}

/// One `(k, n, s)` cell of the `m` table.
#[derive(Clone, Debug, Serialize, serde::Deserialize, PartialEq)]
pub struct MRow {
    pub k: u64,
    pub n: u64,
    pub s: u64,
    pub lower: usize,
    pub value: Option<usize>,
    pub upper: usize,
    pub method: String,
    pub witness: String,
}

impl MRow {
    pub fn from_estimate(est: &MEstimate) -> Self {
        MRow {
            k: est.k,
            n: est.n,
            s: est.s,
            lower: est.lower,
            value: est.value(),
            upper: est.upper,
            method: est.method_label(),
            witness: est
                .record
                .as_ref()
                .map(|r| r.witness.to_string())
                .unwrap_or_default(),
        }
    }

    /// Bound, zero-rule, coprime-formula and witness checks for this cell.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let Some(v) = self.value else {
            return out;
        };
        let cell = format!("(k={}, n={}, s={})", self.k, self.n, self.s);
        if v < self.lower || v > self.upper {
            out.push(format!("{cell}: {v} outside [{}, {}]", self.lower, self.upper));
        }
        if (v == 0) != zero_rule(self.k, self.n, self.s) {
            out.push(format!("{cell}: value {v} disagrees with the zero rule"));
        }
        if self.k.gcd(&self.n) == 1 {
            if let Ok(f) = m_formula_coprime(self.k, self.n) {
                if f != v {
                    out.push(format!("{cell}: value {v} but coprime formula gives {f}"));
                }
            }
        }
        let witness = fqprod_core::sumset::ZnSubset::from_elements(
            self.n,
            self.witness.split_whitespace().filter_map(|t| t.parse().ok()),
        );
        if witness.len() != v || k_fold_sumset(&witness, self.k).contains(self.s) {
            out.push(format!("{cell}: invalid witness {{{}}}", self.witness));
        }
        out
    }
}

pub fn m_row(k: u64, n: u64, s: u64, cap: u64) -> Result<MRow, Failure> {
    let est = m_resolve(k, n, s, cap).map_err(config_err)?;
    Ok(MRow::from_estimate(&est))
}

/// Every `(k, n, s)` with `k` and `n` in the given inclusive ranges.
pub fn m_cells(ks: (u64, u64), ns: (u64, u64)) -> Vec<(u64, u64, u64)> {
    let mut cells = Vec::new();
    for k in ks.0..=ks.1 {
        for n in ns.0.max(1)..=ns.1 {
            for s in 0..n {
                cells.push((k, n, s));
            }
        }
    }
    cells
}

#[derive(Clone, Debug, Serialize)]
pub struct FkReport {
    pub q: u64,
    pub h: String,
    pub k: u64,
    pub ell: u64,
    pub n: u64,
    pub s: u64,
    pub m_kns: Option<usize>,
    pub main_term: Option<String>,
    pub value: usize,
    pub upper: usize,
    pub mode: FkMode,
    pub witness_dlogs: CandidateSet,
    pub defect: Option<String>,
    pub defect_over_sqrt_q: Option<f64>,
}

impl FkReport {
    pub fn new(inst: &Instance<'_>, r: &FkResult) -> Self {
        FkReport {
            q: inst.q(),
            h: inst.h.format(inst.field),
            k: inst.k,
            ell: inst.power.ell,
            n: inst.n,
            s: inst.s,
            m_kns: inst.m_value(),
            main_term: r.main_term.map(|t| t.to_string()),
            value: r.value,
            upper: r.upper,
            mode: r.mode,
            witness_dlogs: r.witness.clone(),
            defect: r.defect().map(|d| d.to_string()),
            defect_over_sqrt_q: r.defect_over_sqrt_q(inst.q()),
        }
    }
}

pub fn instance<'a>(field: &'a Field, h: &Poly, k: u64) -> Result<Instance<'a>, Failure> {
    build_instance(field, h, k).map_err(config_err)
}

pub fn fk_exact_report(field: &Field, h: &Poly, k: u64, opts: &FkOptions) -> Result<FkReport, Failure> {
    let inst = instance(field, h, k)?;
    let r = exact_fk_with(&inst, opts).map_err(|e| Failure::Assertion(e.to_string()))?;
    Ok(FkReport::new(&inst, &r))
}

pub fn fk_construct_report(field: &Field, h: &Poly, k: u64) -> Result<FkReport, Failure> {
    let inst = instance(field, h, k)?;
    let r = fk_construct(&inst).map_err(config_err)?;
    Ok(FkReport::new(&inst, &r))
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub q: u64,
    pub ell: u64,
    pub k: u64,
    pub n: u64,
    pub s: u64,
    pub m_kns: Option<usize>,
    pub main_term: Option<String>,
    pub construction: Option<usize>,
    pub value: usize,
    pub upper: usize,
    pub mode: FkMode,
    pub defect: Option<String>,
    pub defect_over_sqrt_q: Option<f64>,
}

/// `h = x^ℓ` over every prime power `q <= q_max`.
pub fn fk_sweep(ell: u64, k: u64, q_max: u64, opts: &FkOptions) -> Result<Vec<SweepRow>, Failure> {
    let qs: Vec<u64> = (2..=q_max).filter(|&q| prime_power(q).is_some()).collect();
    qs.par_iter()
        .map(|&q| {
            let field = field_q(q)?;
            let h = Poly::monomial(field.one(), ell as usize);
            let inst = instance(&field, &h, k)?;
            let r = exact_fk_with(&inst, opts).map_err(|e| Failure::Assertion(e.to_string()))?;
            Ok(SweepRow {
                q,
                ell,
                k,
                n: inst.n,
                s: inst.s,
                m_kns: inst.m_value(),
                main_term: r.main_term.map(|t| t.to_string()),
                construction: coset_construction(&inst).ok().map(|a| a.len()),
                value: r.value,
                upper: r.upper,
                mode: r.mode,
                defect: r.defect().map(|d| d.to_string()),
                defect_over_sqrt_q: r.defect_over_sqrt_q(q),
            })
        })
        .collect()
}

/// Structure distance of the given set, or of the search witness when no set
/// is given.
pub fn structure_info(
    field: &Field,
    h: &Poly,
    k: u64,
    dlogs: Option<&[u64]>,
    opts: &FkOptions,
) -> Result<Value, Failure> {
    let inst = instance(field, h, k)?;
    let set = match dlogs {
        Some(logs) => CandidateSet::from_logs(field, logs.iter().copied()),
        None => exact_fk_with(&inst, opts)
            .map_err(|e| Failure::Assertion(e.to_string()))?
            .witness,
    };
    let rep = structure_distance(&inst, &set).map_err(config_err)?;
    Ok(json!({
        "q": field.q(),
        "h": h.format(field),
        "k": k,
        "n": inst.n,
        "s": inst.s,
        "set_dlogs": set,
        "b0": rep.b0.elements(),
        "distance": rep.distance,
        "candidates": rep.candidates,
    }))
}

pub fn special_info(rep: &SpecialConstruction, field: &Field) -> Value {
    json!({
        "p": rep.p,
        "m": rep.m,
        "q": field.q(),
        "k": rep.k,
        "alpha": format_element(field, rep.alpha),
        "u": rep.u,
        "t": rep.t,
        "elements": rep.elements,
        "star": rep.star,
        "sum_bound": rep.sum_bound,
        "prime_field_in_powers": rep.prime_field_in_powers,
        "passed": rep.passed(),
    })
}

pub fn remark3(p: u64, k: u64) -> Result<(Value, bool), Failure> {
    if !is_prime(p) || p == 2 {
        return Err(Failure::Config(format!("p = {p} must be an odd prime")));
    }
    let field = field_pm(p, 2)?;
    let (_, _, rep) = remark3_construction(&field, k).map_err(config_err)?;
    Ok((special_info(&rep, &field), rep.passed()))
}

pub fn remark4(p: u64, m: u32, k: u64) -> Result<(Value, bool), Failure> {
    let field = field_pm(p, m)?;
    let (_, _, rep) = remark4_construction(&field, k).map_err(config_err)?;
    Ok((special_info(&rep, &field), rep.passed()))
}

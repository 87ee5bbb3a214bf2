//! Report documents: JSON values with sorted keys, rendered as JSON or markdown.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use crate::annihilator::{FormulaValues, IndexReport, JumpBasis, LevelSolution, NormCheck, OracleReport};
use crate::frame::Frame;
use crate::group_ring::GroupRingElement;
use crate::lattice::IntMatrix;
use crate::module::{BetaCertificate, ChiReport, HomSweep, RankDiagnostic};

pub const SCHEMA: u64 = 1;

/// Integers that fit in `i64` become JSON numbers, larger ones decimal strings.
pub fn int(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => Value::from(v),
        None => Value::String(x.to_string()),
    }
}

pub fn int_list(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(int).collect())
}

pub fn matrix(m: &IntMatrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| int_list(r)).collect())
}

pub fn poly(e: &GroupRingElement) -> Value {
    Value::String(e.to_string())
}

/// 1-based canonical indices.
fn indices(v: &[usize]) -> Value {
    Value::Array(v.iter().map(|&j| Value::from(j + 1)).collect())
}

pub fn document(command: &str, frame: Option<&Frame>, status: &str, body: Value) -> Value {
    let mut m = Map::new();
    m.insert("schema".into(), Value::from(SCHEMA));
    m.insert("command".into(), Value::from(command));
    m.insert("status".into(), Value::from(status));
    if let Some(f) = frame {
        m.insert("instance".into(), f.name.clone().map(Value::from).unwrap_or(Value::Null));
    }
    if let Value::Object(b) = body {
        m.extend(b);
    } else {
        m.insert("result".into(), body);
    }
    Value::Object(m)
}

pub fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values always serialize");
    s.push('\n');
    s
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "none".into(),
        other => other.to_string(),
    }
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(a) => a.iter().all(|x| !x.is_object() && (!x.is_array() || is_flat(x))),
        Value::Object(_) => false,
        _ => true,
    }
}

fn md_value(out: &mut String, key: &str, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    if is_flat(v) {
        let text = if v.is_array() { format!("`{v}`") } else { scalar(v) };
        out.push_str(&format!("{pad}- **{key}**: {text}\n"));
        return;
    }
    out.push_str(&format!("{pad}- **{key}**\n"));
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                md_value(out, k, x, depth + 1);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                md_value(out, &format!("{}", i + 1), x, depth + 1);
            }
        }
        _ => unreachable!(),
    }
}

pub fn to_markdown(v: &Value) -> String {
    let command = v.get("command").map(scalar).unwrap_or_default();
    let mut out = format!("# ellunit {command}\n\n");
    let Value::Object(m) = v else {
        out.push_str(&scalar(v));
        out.push('\n');
        return out;
    };
    let mut sections = Vec::new();
    for (k, x) in m {
        if k == "command" {
            continue;
        }
        if is_flat(x) {
            md_value(&mut out, k, x, 0);
        } else {
            sections.push((k, x));
        }
    }
    for (k, x) in sections {
        out.push_str(&format!("\n## {k}\n\n"));
        match x {
            Value::Object(inner) => {
                for (ik, iv) in inner {
                    md_value(&mut out, ik, iv, 0);
                }
            }
            Value::Array(a) => {
                for (i, iv) in a.iter().enumerate() {
                    md_value(&mut out, &format!("{}", i + 1), iv, 0);
                }
            }
            _ => unreachable!(),
        }
    }
    out
}

pub fn frame_section(f: &Frame) -> Value {
    json!({
        "p": f.p,
        "k": f.k,
        "s": f.s(),
        "t": f.t,
        "res_units": f.res_units,
        "lambda": f.lambda,
        "order_from_input": f.permutation.iter().map(|&j| j + 1).collect::<Vec<_>>(),
        "group_order": f.group.order(),
        "component_orders": f.group.orders,
        "restriction_images": f.group.res_gens,
        "lift": f.group.lift,
        "n": f.n,
    })
}

pub fn formulas_section(v: &FormulaValues) -> Value {
    json!({
        "FI_units_index": v.fi_units.as_ref().map(int),
        "L_units_index_C": int(&v.l_units_c),
        "L_units_index_Cbar": int(&v.l_units_cbar),
        "warnings": v.warnings,
    })
}

pub fn derive_section(f: &Frame, formulas: Option<&FormulaValues>, r_characterized: u32) -> crate::Result<Value> {
    let jp = f.jump_profile();
    let c = f.all_c()?;
    let levels: Vec<Value> = (1..=f.k)
        .map(|i| {
            let ld = f.level_data(i)?;
            Ok(json!({
                "level": i,
                "members": indices(&ld.members),
                "middle": indices(&ld.middle),
                "n_level": ld.n_level,
                "mu": jp.mu[(i - 1) as usize],
                "y": ld.y.as_ref().map(poly),
                "z": poly(&ld.z),
            }))
        })
        .collect::<crate::Result<_>>()?;
    let phi = f.phi_l()?;
    Ok(json!({
        "n": f.n,
        "c": c,
        "levels": levels,
        "jumps": jp.jumps,
        "r_from_jumps": jp.r,
        "r_from_inertia": r_characterized,
        "i_star": jp.i_star,
        "nu": f.nu(),
        "phi_L": int(&phi),
        "L_index": jp.l_index,
        "FI_over_L": f.fi_over_l(),
        "p_nu_equals_phi_over_L_index": BigInt::from(f.p).pow(f.nu() as u32) * BigInt::from(jp.l_index) == phi,
        "formulas": formulas.map(formulas_section),
    }))
}

pub fn rank_section(d: &RankDiagnostic, prime_rank: usize) -> Value {
    json!({
        "rank_U": d.rank,
        "expected_rank_U": d.expected,
        "rank_U_prime": prime_rank,
        "relation_rank": d.relation_rank,
        "free_rank": d.free_rank,
        "degenerate_lambda": d.degenerate,
        "checksum": d.checksum,
    })
}

pub fn level_section(f: &Frame, l: &LevelSolution, delta_is_unit: bool) -> crate::Result<Value> {
    let ld = f.level_data(l.level)?;
    let kind = match ld.members.len() {
        1 => "singleton",
        2 => "pair",
        _ => "root",
    };
    let evidence: Vec<Value> = l
        .certificate
        .iter()
        .flat_map(|c| c.hom_evidence.iter())
        .map(|e| json!({"image": int_list(&e.image), "witness": e.witness.as_deref().map(int_list)}))
        .collect();
    Ok(json!({
        "level": l.level,
        "kind": kind,
        "members": indices(&ld.members),
        "n_level": ld.n_level,
        "y": ld.y.as_ref().map(poly),
        "eta": int_list(&l.eta),
        "eta_is_unit": l.eta_is_unit,
        "delta": int_list(&l.delta),
        "delta_is_unit": delta_is_unit,
        "hom_certificate": evidence,
        "delta_identity": l.delta_identity,
    }))
}

pub fn index_section(r: &IndexReport) -> Value {
    json!({
        "nu": r.nu,
        "phi_L": int(&r.phi_l),
        "L_index": r.l_index,
        "FI_over_L": r.fi_over_l,
        "lattice_index_Cbar_C": int(&r.lattice_index),
        "p_nu": int(&r.p_nu),
        "p_nu_equals_phi_over_L_index": r.p_nu_matches,
        "FI_over_L_divides_phi_L": r.fi_divides_phi,
        "phi_L_equals_FI_over_L": r.equality_case,
        "equality_predicted": r.equality_expected,
        "rank_Cbar": r.rank_cbar,
        "rank_C": r.rank_c,
        "all_J_lattice_index": r.all_j_index.as_ref().map(int),
        "all_J_changes_C": r.all_j_changes_c,
        "passed": r.passed(),
    })
}

pub fn jump_section(j: &JumpBasis) -> Value {
    json!({
        "blocks": j.blocks.iter().map(|&(level, size)| json!({"level": level, "size": size})).collect::<Vec<_>>(),
        "count_matches_rank": j.count_matches,
        "spans_Cbar": j.spans,
        "verified": j.verified(),
    })
}

pub fn norm_section(checks: &[NormCheck]) -> Value {
    Value::Array(
        checks
            .iter()
            .map(|c| json!({"level": c.level, "member": c.member, "equal_mu": c.equal_mu, "span_equal": c.span_equal}))
            .collect(),
    )
}

pub fn sweep_section(s: &HomSweep) -> Value {
    json!({
        "modulus": poly(&s.modulus),
        "fixed_rank": s.fixed_rank,
        "entries": s.entries.iter().map(|e| json!({
            "value": poly(&e.value),
            "quotient": e.witness.as_ref().map(poly),
        })).collect::<Vec<_>>(),
        "passed": s.passed(),
    })
}

pub fn chi_section(c: &ChiReport) -> Value {
    json!({
        "m": c.m,
        "rank_U": c.rank_u,
        "rank_U_prime": c.rank_u_prime,
        "rank_Uq": c.rank_uq,
        "rank_identity": c.rank_identity,
        "chi_well_defined": c.chi_well_defined,
        "chi_injective": c.chi_injective,
        "chi_equivariant": c.chi_equivariant,
        "chi_prime_well_defined": c.chi_prime_well_defined,
        "chi_prime_injective": c.chi_prime_injective,
        "chi_prime_equivariant": c.chi_prime_equivariant,
        "generator_images": c.generator_images,
        "e_images": c.e_images,
        "passed": c.passed(),
    })
}

pub fn beta_section(b: Option<&BetaCertificate>) -> Value {
    match b {
        None => json!({"exists": false}),
        Some(b) => json!({
            "exists": true,
            "y": poly(&b.certificate.y),
            "delta": int_list(&b.certificate.delta),
            "hom_generators": b.certificate.hom_evidence.len(),
            "hom_certificate": b.certificate.hom_evidence.iter().all(|e| e.witness.is_some()),
            "unit": b.unit,
            "root_identity": b.root_identity,
            "norm_identity": b.norm_identity,
            "r": int(&b.r),
            "passed": b.passed(),
        }),
    }
}

pub fn oracle_section(o: &OracleReport) -> Value {
    json!({"level": o.level, "probes": o.probes, "agree": o.agree, "solvable": o.solvable, "passed": o.passed()})
}

//! JSON forms of the core tables.

use croftonlab_core::coeffcore::{CoeffTable, PiScalar, TableKind, Term};
use croftonlab_core::planes::MCEstimate;
use croftonlab_core::valuations::ValuationTable;
use serde_json::{json, Map, Value};

/// `{"num","den","piPow"}` for a single pi-power, else a list of such terms.
pub fn pi_scalar(x: &PiScalar) -> Value {
    let term = |p: i32, num: String, den: String| json!({ "num": num, "den": den, "piPow": p });
    match x.as_monomial() {
        Some((c, p)) => {
            let mut v = term(p, c.numer().to_string(), c.denom().to_string());
            v["text"] = Value::String(x.to_string());
            v
        }
        None if x.is_zero() => json!({ "num": "0", "den": "1", "piPow": 0, "text": "0" }),
        None => json!({
            "terms": x.terms().map(|(p, c)| term(p, c.numer().to_string(), c.denom().to_string())).collect::<Vec<_>>(),
            "text": x.to_string(),
        }),
    }
}

fn kind_name(kind: TableKind) -> &'static str {
    match kind {
        TableKind::Crofton => "crofton",
        TableKind::GaussBonnet => "gauss-bonnet",
        TableKind::TotalGauss => "total-gauss",
        TableKind::CroftonVariation => "crofton-variation",
    }
}

/// Rows `{"k","q","epsPow","coeff"}`, with the prefactor and the symbolic
/// Grassmannian factor alongside.
pub fn coeff_table(t: &CoeffTable) -> Value {
    let items: Vec<Value> = t
        .entries
        .iter()
        .map(|((term, p), c)| {
            let mut row = Map::new();
            match *term {
                Term::Mu { k, q } => {
                    row.insert("term".into(), json!("mu"));
                    row.insert("k".into(), json!(k));
                    row.insert("q".into(), json!(q));
                }
                Term::Vol => {
                    row.insert("term".into(), json!("vol"));
                }
            }
            row.insert("epsPow".into(), json!(p));
            row.insert("coeff".into(), pi_scalar(c));
            Value::Object(row)
        })
        .collect();
    json!({
        "kind": kind_name(t.kind),
        "n": t.n,
        "r": t.r,
        "prefactor": pi_scalar(&t.prefactor),
        "grassmannian": t.grassmannian.map(|g| json!({ "n": g.n, "r": g.r })),
        "items": items,
    })
}

/// Keys `"B:k,q"`, `"G:k,q"`, `"mu:k,q"`, `"M:j"`, `"vol"`.
pub fn valuation_table(t: &ValuationTable) -> Value {
    let mut m = Map::new();
    for (&(k, q), v) in &t.b {
        m.insert(format!("B:{k},{q}"), json!(v));
    }
    for (&(k, q), v) in &t.gamma {
        m.insert(format!("G:{k},{q}"), json!(v));
    }
    for k in 0..2 * t.n {
        for q in 0..=k / 2 {
            if let Some(v) = t.mu(k, q) {
                m.insert(format!("mu:{k},{q}"), json!(v));
            }
        }
    }
    for (j, v) in t.m.iter().enumerate() {
        m.insert(format!("M:{j}"), json!(v));
    }
    m.insert("vol".into(), json!(t.vol));
    Value::Object(m)
}

pub fn estimate(e: &MCEstimate) -> Value {
    json!({ "mean": e.mean, "stderr": e.stderr, "samples": e.samples, "seed": e.seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use croftonlab_core::coeffcore::gauss_bonnet_coeffs;

    #[test]
    fn gb_table_rows() {
        let v = coeff_table(&gauss_bonnet_coeffs(2).unwrap());
        assert_eq!(v["kind"], "gauss-bonnet");
        let items = v["items"].as_array().unwrap();
        assert!(items.iter().all(|r| r["coeff"]["piPow"].is_i64()));
        assert!(items.iter().any(|r| r["term"] == "vol"));
    }
}

//! Rendering reports as JSON or CSV.

use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

pub fn render(report: &Value, format: Format) -> anyhow::Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(report)? + "\n"),
        Format::Csv => render_csv(report),
    }
}

pub fn write_report(report: &Value, format: Format, out: Option<&Path>) -> anyhow::Result<()> {
    let text = render(report, format)?;
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// `"B:1,0"` becomes `"B:1.0"`; other keys pass through.
fn csv_key(key: &str) -> String {
    match key.split_once(':') {
        Some((kind, idx)) if idx.chars().all(|c| c.is_ascii_digit() || c == ',') => {
            format!("{kind}:{}", idx.replace(',', "."))
        }
        _ => key.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}/{k}") };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&join(&csv_key(k)), x, out);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&join(&i.to_string()), x, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Null => out.push((prefix.to_string(), String::new())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

/// One row per element of `result.items` (or one row for the whole
/// result), columns named by flattened paths. A coefficient row's `k`/`q`
/// pair becomes a single `k.q` column.
fn render_csv(report: &Value) -> anyhow::Result<String> {
    let result = report.get("result").unwrap_or(report);
    let rows: Vec<&Value> = match result.get("items").and_then(Value::as_array) {
        Some(items) => items.iter().collect(),
        None => vec![result],
    };
    let mut flat: Vec<Vec<(String, String)>> = Vec::new();
    for row in rows {
        let mut cells = Vec::new();
        match row {
            Value::Object(m) if m.contains_key("k") && m.contains_key("q") => {
                let mut rest = Map::new();
                for (key, x) in m {
                    if key != "k" && key != "q" {
                        rest.insert(key.clone(), x.clone());
                    }
                }
                cells.push(("k.q".to_string(), format!("{}.{}", m["k"], m["q"])));
                flatten("", &Value::Object(rest), &mut cells);
            }
            _ => flatten("", row, &mut cells),
        }
        flat.push(cells);
    }
    let mut header: Vec<String> = Vec::new();
    for cells in &flat {
        for (k, _) in cells {
            if !header.contains(k) {
                header.push(k.clone());
            }
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header)?;
    for cells in &flat {
        let record: Vec<&str> = header
            .iter()
            .map(|h| cells.iter().find(|(k, _)| k == h).map_or("", |(_, v)| v.as_str()))
            .collect();
        w.write_record(&record)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn keys_flatten_with_dots() {
        let r = json!({ "result": { "B:1,0": 2.5, "vol": 1.0 } });
        let text = render(&r, Format::Csv).unwrap();
        assert_eq!(text, "B:1.0,vol\n2.5,1.0\n");
    }

    #[test]
    fn coefficient_rows() {
        let r = json!({ "result": { "items": [
            { "k": 2, "q": 1, "epsPow": 0, "coeff": { "num": "1", "den": "2", "piPow": 0 } },
            { "term": "vol", "epsPow": 1, "coeff": { "num": "3", "den": "1", "piPow": 1 } },
        ] } });
        let text = render(&r, Format::Csv).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "k.q,coeff/den,coeff/num,coeff/piPow,epsPow,term");
        assert_eq!(lines.next().unwrap(), "2.1,2,1,0,0,");
        assert_eq!(lines.next().unwrap(), ",1,3,1,1,vol");
    }
}

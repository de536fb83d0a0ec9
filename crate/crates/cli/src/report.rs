use std::fmt::Write;

use serde_json::{json, Map, Value};

use crate::Status;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug)]
pub struct Report {
    pub command: &'static str,
    pub inputs: Vec<Value>,
    pub results: Value,
    /// Wall-clock seconds per phase, in execution order.
    pub timing: Vec<(&'static str, f64)>,
    pub status: Status,
}

impl Report {
    pub fn to_value(&self) -> Value {
        let timing: Map<String, Value> = self
            .timing
            .iter()
            .map(|(phase, secs)| (phase.to_string(), json!(secs)))
            .collect();
        // serde_json's default map is ordered by key
        json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "inputs": self.inputs,
            "results": self.results,
            "timing": timing,
            "exit_code": self.status as u8,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("report serializes")
    }

    pub fn to_table(&self) -> String {
        let r = &self.results;
        let mut out = String::new();
        match self.command {
            "stats" => stats_table(&mut out, r),
            "risk" => {
                let _ = writeln!(out, "aggregation: {}", r["aggregation"].as_str().unwrap_or(""));
                risk_table(&mut out, r["cells"].as_array().map(Vec::as_slice).unwrap_or(&[]), "");
            }
            "utility" => {
                let _ = writeln!(out, "ul  {}", fixed(&r["ul"]));
                let _ = writeln!(out, "du  {}", fixed(&r["du"]));
            }
            "sweep" => {
                for rec in r["records"].as_array().into_iter().flatten() {
                    let k = &rec["k"];
                    if rec["status"] == "ok" {
                        let _ = writeln!(out, "k={k}  du {}", fixed(&rec["du"]));
                        risk_table(&mut out, rec["risk"].as_array().map(Vec::as_slice).unwrap_or(&[]), "  ");
                    } else {
                        let _ = writeln!(out, "k={k}  error: {}", rec["error"].as_str().unwrap_or(""));
                    }
                }
            }
            _ => {}
        }
        out.truncate(out.trim_end().len());
        out
    }
}

/// Display rounding: three decimals.
fn fixed(v: &Value) -> String {
    v.as_f64().map_or_else(|| "-".to_string(), |x| format!("{x:.3}"))
}

fn stats_table(out: &mut String, r: &Value) {
    let rows = [
        ("traces", r["n_traces"].to_string()),
        ("variants", r["n_variants"].to_string()),
        ("events", r["n_events"].to_string()),
        ("unique activities", r["n_unique_activities"].to_string()),
        ("trace uniqueness", fixed(&r["trace_uniqueness"])),
    ];
    for (k, v) in rows {
        let _ = writeln!(out, "{k:<18}  {v}");
    }
}

fn risk_table(out: &mut String, cells: &[Value], indent: &str) {
    let _ = writeln!(out, "{indent}{:<5} {:>4}  {:>6}  {:>6}  {:>10}", "type", "size", "cd", "td", "candidates");
    for c in cells {
        let ty = c["type"].as_str().unwrap_or("");
        let size = c["size"].to_string();
        match c["status"].as_str() {
            Some("ok") => {
                let _ = writeln!(
                    out,
                    "{indent}{ty:<5} {size:>4}  {:>6}  {:>6}  {:>10}",
                    fixed(&c["cd"]),
                    fixed(&c["td"]),
                    c["n_candidates"].to_string()
                );
            }
            Some("resource_limit") => {
                let _ = writeln!(out, "{indent}{ty:<5} {size:>4}  candidate cap {} exceeded", c["cap"]);
            }
            _ => {
                let _ = writeln!(out, "{indent}{ty:<5} {size:>4}  no candidates");
            }
        }
    }
}

use serde_json::Value;

use crate::commands::Reply;
use crate::Format;

/// Sets the report runtime and every nested `runtime_ms` field to 0.
pub fn zero_timings(reply: &mut Reply) {
    fn walk(v: &mut Value) {
        match v {
            Value::Object(map) => {
                for (k, x) in map.iter_mut() {
                    if k == "runtime_ms" {
                        *x = Value::from(0);
                    } else {
                        walk(x);
                    }
                }
            }
            Value::Array(xs) => xs.iter_mut().for_each(walk),
            _ => {}
        }
    }
    reply.report.runtime_ms = 0;
    walk(&mut reply.report.results);
}

pub fn render(reply: &Reply, format: Format) -> String {
    match format {
        Format::Json => format!("{}\n", reply.report.to_json()),
        Format::Csv => csv(reply),
        Format::Human => human(reply),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv(reply: &Reply) -> String {
    if let Some(table) = &reply.csv {
        return table.clone();
    }
    let report = &reply.report;
    if report.command == "repro" && report.results.is_array() {
        let mut out = String::from("id,pass,runtime_ms,title\n");
        for c in report.results.as_array().into_iter().flatten() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                c["id"],
                c["pass"],
                c["runtime_ms"],
                quote(&scalar(&c["title"]))
            ));
        }
        return out;
    }
    let mut out = String::from("check,pass,witness\n");
    for c in &report.checks {
        out.push_str(&format!(
            "{},{},{}\n",
            quote(&c.name),
            c.pass,
            quote(&scalar(&c.witness))
        ));
    }
    if let Value::Object(map) = &report.results {
        for (k, v) in map {
            out.push_str(&format!("{},,{}\n", quote(k), quote(&scalar(v))));
        }
    }
    out
}

fn human(reply: &Reply) -> String {
    let report = &reply.report;
    let mut out = format!("lrcmr {}\n", report.command);
    if report.command == "repro" && report.results.is_array() {
        out.push_str(&format!(
            "{:>3}  {:<6} {:>8}  title\n",
            "id", "result", "ms"
        ));
        for c in report.results.as_array().into_iter().flatten() {
            let pass = c["pass"].as_bool() == Some(true);
            out.push_str(&format!(
                "{:>3}  {:<6} {:>8}  {}\n",
                scalar(&c["id"]),
                if pass { "PASS" } else { "FAIL" },
                scalar(&c["runtime_ms"]),
                scalar(&c["title"])
            ));
            if !pass {
                for line in c["details"].as_array().into_iter().flatten() {
                    out.push_str(&format!("       {}\n", scalar(line)));
                }
            }
        }
    } else {
        if let Value::Object(map) = &report.inputs {
            let parts: Vec<String> = map
                .iter()
                .filter(|(_, v)| !v.is_null())
                .map(|(k, v)| format!("{k}={}", scalar(v)))
                .collect();
            out.push_str(&format!("inputs: {}\n", parts.join(" ")));
        }
        match &report.results {
            Value::Null => {}
            Value::Object(map) => {
                for (k, v) in map {
                    out.push_str(&format!("  {k}: {}\n", scalar(v)));
                }
            }
            Value::Array(xs) => {
                for x in xs {
                    out.push_str(&format!("  {x}\n"));
                }
            }
            other => out.push_str(&format!("  {other}\n")),
        }
        for c in &report.checks {
            out.push_str(&format!(
                "{} {}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name
            ));
            if !c.pass && !c.witness.is_null() {
                out.push_str(&format!("  witness: {}", c.witness));
            }
            out.push('\n');
        }
    }
    out.push_str(&format!("runtime: {} ms\n", report.runtime_ms));
    out
}

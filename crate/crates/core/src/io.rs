//! Code files and run reports.
//!
//! A code file stores the field representation, the parity-check matrix and
//! optional descriptive data:
//!
//! ```json
//! {"field":{"p":2,"e":4,"modulus":[1,1,0,0,1],"alpha":2},"n":15,"k":8,
//!  "H":{"rows":7,"cols":15,"data":[...]},"roots":[0,1,2,4,7,10,13],
//!  "meta":{"family":"construction1","q":4,"b":2,"r":2,"delta":2}}
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::code::{CodeMeta, LinearCode, RootSet};
use crate::error::{Error, Result};
use crate::gf::Field;
use crate::matrix::{row_space_equal, Matrix, MatrixJson};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub p: u64,
    pub e: u32,
    pub modulus: Vec<u32>,
    pub alpha: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeFile {
    pub field: FieldSpec,
    pub n: usize,
    pub k: usize,
    #[serde(rename = "H")]
    pub h: MatrixJson,
    #[serde(default)]
    pub roots: Option<Vec<usize>>,
    #[serde(default)]
    pub meta: CodeMeta,
}

impl CodeFile {
    pub fn from_code(code: &LinearCode) -> CodeFile {
        let f = code.field();
        CodeFile {
            field: FieldSpec {
                p: f.p() as u64,
                e: f.e(),
                modulus: f.modulus().to_vec(),
                alpha: f.alpha(),
            },
            n: code.n(),
            k: code.k(),
            h: code.parity().to_json(),
            roots: code.roots().map(|r| r.exponents().to_vec()),
            meta: code.meta().clone(),
        }
    }

    /// Rebuilds the code. The stored root set is kept only when it describes
    /// the stored `H`; an edited matrix still loads, without roots.
    pub fn to_code(&self) -> Result<LinearCode> {
        let fs = &self.field;
        let field = Field::with_alpha(fs.p, fs.e, &fs.modulus, fs.alpha).map_err(|e| {
            Error::FieldReconstructionMismatch(format!(
                "p = {}, e = {}, modulus {:?}, alpha = {}: {e}",
                fs.p, fs.e, fs.modulus, fs.alpha
            ))
        })?;
        if self.h.cols != self.n {
            return Err(Error::SchemaError(format!(
                "H has {} columns but n = {}",
                self.h.cols, self.n
            )));
        }
        if self.h.data.len() != self.h.rows * self.h.cols {
            return Err(Error::SchemaError(format!(
                "H declares {}x{} but holds {} entries",
                self.h.rows,
                self.h.cols,
                self.h.data.len()
            )));
        }
        let h = Matrix::from_json(&field, &self.h)
            .map_err(|e| Error::SchemaError(format!("H: {e}")))?;
        let mut code = LinearCode::from_parity(&h).with_meta(self.meta.clone());
        if code.k() != self.k {
            return Err(Error::SchemaError(format!(
                "k = {} but H has rank {}, giving dimension {}",
                self.k,
                self.n - code.k(),
                code.k()
            )));
        }
        if let Some(exps) = &self.roots {
            let roots = RootSet::new(self.n, exps.iter().map(|&i| i as i64));
            let claimed = LinearCode::from_roots(&field, &roots);
            if let Ok(c) = claimed {
                if row_space_equal(c.parity(), code.parity())? {
                    code.set_roots(Some(roots));
                }
            }
        }
        Ok(code)
    }
}

pub fn code_to_json(code: &LinearCode) -> String {
    serde_json::to_string(&CodeFile::from_code(code)).expect("code files serialize")
}

pub fn code_from_json(text: &str) -> Result<LinearCode> {
    let file: CodeFile =
        serde_json::from_str(text).map_err(|e| Error::SchemaError(e.to_string()))?;
    file.to_code()
}

pub fn save_code(code: &LinearCode, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, code_to_json(code) + "\n")
}

pub fn load_code(path: &Path) -> Result<LinearCode> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::SchemaError(format!("{}: {e}", path.display())))?;
    code_from_json(&text)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub witness: Value,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool) -> Check {
        Check {
            name: name.into(),
            pass,
            witness: Value::Null,
        }
    }

    pub fn with_witness(mut self, witness: impl Serialize) -> Check {
        self.witness = serde_json::to_value(witness).expect("witness serializes");
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub checks: Vec<Check>,
    pub runtime_ms: u64,
}

impl RunReport {
    pub fn new(command: impl Into<String>, inputs: impl Serialize) -> RunReport {
        RunReport {
            command: command.into(),
            inputs: serde_json::to_value(inputs).expect("inputs serialize"),
            results: Value::Null,
            checks: Vec::new(),
            runtime_ms: 0,
        }
    }

    pub fn results(mut self, results: impl Serialize) -> RunReport {
        self.results = serde_json::to_value(results).expect("results serialize");
        self
    }

    pub fn check(mut self, check: Check) -> RunReport {
        self.checks.push(check);
        self
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mr::{build_construction1, build_construction2, MrParams};

    #[test]
    fn round_trips() {
        for code in [
            build_construction1(&MrParams::new(4, 2, 2, 2)).unwrap(),
            build_construction2(&MrParams::new(13, 1, 3, 2)).unwrap(),
        ] {
            let text = code_to_json(&code);
            let back = code_from_json(&text).unwrap();
            assert_eq!(back, code);
            assert_eq!(code_to_json(&back), text);
        }
    }

    #[test]
    fn schema_shape() {
        let code = build_construction1(&MrParams::new(4, 2, 2, 2)).unwrap();
        let v: Value = serde_json::from_str(&code_to_json(&code)).unwrap();
        assert_eq!(v["field"]["modulus"], serde_json::json!([1, 1, 0, 0, 1]));
        assert_eq!(v["field"]["alpha"], 2);
        assert_eq!((v["n"].as_u64(), v["k"].as_u64()), (Some(15), Some(8)));
        assert_eq!(v["H"]["rows"], 7);
        assert_eq!(v["roots"], serde_json::json!([0, 1, 2, 4, 7, 10, 13]));
        assert_eq!(v["meta"]["family"], "construction1");
    }

    fn edited(f: impl FnOnce(&mut Value)) -> Result<LinearCode> {
        let code = build_construction1(&MrParams::new(4, 2, 2, 2)).unwrap();
        let mut v: Value = serde_json::from_str(&code_to_json(&code)).unwrap();
        f(&mut v);
        code_from_json(&v.to_string())
    }

    #[test]
    fn rejects_bad_files() {
        // x^4 + x^3 + x^2 + x + 1 is irreducible, but x (alpha = 2) has order 5
        let e = edited(|v| v["field"]["modulus"] = serde_json::json!([1, 1, 1, 1, 1]));
        assert!(matches!(e, Err(Error::FieldReconstructionMismatch(_))));
        // x^4 + 1 = (x + 1)^4
        let e = edited(|v| v["field"]["modulus"] = serde_json::json!([1, 0, 0, 0, 1]));
        assert!(matches!(e, Err(Error::FieldReconstructionMismatch(_))));
        let e = edited(|v| v["k"] = serde_json::json!(9));
        assert!(matches!(e, Err(Error::SchemaError(_))));
        let e = edited(|v| v["H"]["cols"] = serde_json::json!(14));
        assert!(matches!(e, Err(Error::SchemaError(_))));
        assert!(matches!(code_from_json("{"), Err(Error::SchemaError(_))));
    }

    #[test]
    fn edited_matrix_loads_without_roots() {
        let code = edited(|v| {
            let x = v["H"]["data"][20].as_u64().unwrap();
            v["H"]["data"][20] = serde_json::json!((x + 1) % 16);
        })
        .unwrap();
        assert_eq!(code.roots(), None);
        assert!(!code.is_cyclic());
    }

    #[test]
    fn reports() {
        let r = RunReport::new("demo", serde_json::json!({"q": 4}))
            .results(serde_json::json!({"k": 8}))
            .check(Check::new("ok", true))
            .check(Check::new("bad", false).with_witness(vec![1, 2]));
        assert!(!r.all_pass());
        let text = r.to_json();
        assert!(text.find("\"command\"").unwrap() < text.find("\"runtime_ms\"").unwrap());
        assert!(text.contains("\"witness\": [\n        1,"));
    }
}

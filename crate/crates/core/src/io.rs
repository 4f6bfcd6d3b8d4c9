//! Algebra files and partition arguments.
//!
//! An algebra file is a JSON document
//! `{"name": .., "size": n, "operations": [{"symbol": .., "arity": k, "table": [..]}]}`
//! with tables row-major. [`serialize_algebra`] writes the canonical form:
//! one operation per line.

use std::path::Path;

use crate::algebra::FiniteAlgebra;
use crate::congruence::cg_with_witnesses;
use crate::corpus::builtin;
use crate::error::{Error, Result};
use crate::partition::Partition;

pub fn parse_algebra_str(text: &str) -> Result<FiniteAlgebra> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn serialize_algebra(alg: &FiniteAlgebra) -> String {
    let mut out = String::from("{\n");
    out.push_str(&format!("  \"name\": {},\n", json(&alg.name)));
    out.push_str(&format!("  \"size\": {},\n", alg.size));
    out.push_str("  \"operations\": [");
    for (i, op) in alg.operations.iter().enumerate() {
        out.push_str(if i == 0 { "\n" } else { ",\n" });
        out.push_str(&format!(
            "    {{\"symbol\": {}, \"arity\": {}, \"table\": {}}}",
            json(&op.symbol),
            op.arity,
            json(&op.table)
        ));
    }
    if !alg.operations.is_empty() {
        out.push_str("\n  ");
    }
    out.push_str("]\n}\n");
    out
}

fn json<T: serde::Serialize + ?Sized>(value: &T) -> String {
    serde_json::to_string(value).expect("plain data serializes")
}

/// `builtin:NAME` or a path to an algebra file.
pub fn load_algebra(spec: &str) -> Result<FiniteAlgebra> {
    if let Some(name) = spec.strip_prefix("builtin:") {
        return builtin(name);
    }
    let text = std::fs::read_to_string(Path::new(spec)).map_err(|e| Error::Io(format!("{spec}: {e}")))?;
    parse_algebra_str(&text)
}

/// Block syntax (`"0,2|1,3"`, `"0"`, `"1"`) or `"cg:a-b,c-d"` for the
/// congruence generated by the listed pairs.
pub fn parse_partition_spec(alg: &FiniteAlgebra, spec: &str) -> Result<Partition> {
    let spec = spec.trim();
    let Some(pairs) = spec.strip_prefix("cg:") else {
        let p = Partition::parse_blocks(spec, alg.size)?;
        return Ok(p);
    };
    let mut list = Vec::new();
    for item in pairs.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (a, b) = item
            .split_once('-')
            .ok_or_else(|| Error::Parse(format!("expected `a-b`, got `{item}`")))?;
        let parse = |s: &str| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad element `{s}` in `{item}`")))
        };
        list.push((parse(a)?, parse(b)?));
    }
    Ok(cg_with_witnesses(alg, &list)?.0)
}

//! Pattern interchange JSON.
//!
//! ```json
//! {"piece": "name", "algorithm": "cosiatec",
//!  "patterns": [{"id": "p0", "occurrences": [{"points": [["0", 60, "1"], ["1/2", 62, "1/2"]]}]}]}
//! ```
//!
//! Onsets and durations are decimal strings, `"num/den"` strings or plain JSON numbers.
//! An occurrence may carry an explicit `"span": [start, end]`, which must agree with its points.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::model::{PatternOccurrence, PatternRecord, Point};
use crate::time::time_from_json;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternFile {
    pub piece: String,
    pub algorithm: String,
    pub records: Vec<PatternRecord>,
}

pub fn load_pattern_json(text: &str) -> Result<Vec<PatternRecord>> {
    load_pattern_file(text).map(|f| f.records)
}

pub fn load_pattern_file(text: &str) -> Result<PatternFile> {
    let root: Value = serde_json::from_str(text).map_err(|e| Error::Schema {
        path: "$".into(),
        message: format!("invalid JSON: {e}"),
    })?;
    let obj = as_object(&root, "$")?;
    check_keys(obj, "$", &["piece", "algorithm", "patterns"])?;
    let piece = get_str(obj, "$", "piece")?;
    let algorithm = get_str(obj, "$", "algorithm")?;
    let patterns = get_array(obj, "$", "patterns")?;

    let mut records = Vec::with_capacity(patterns.len());
    for (pi, pat) in patterns.iter().enumerate() {
        let ppath = format!("$.patterns[{pi}]");
        let pobj = as_object(pat, &ppath)?;
        check_keys(pobj, &ppath, &["id", "occurrences"])?;
        let id = get_str(pobj, &ppath, "id")?;
        let occs = get_array(pobj, &ppath, "occurrences")?;
        if occs.is_empty() {
            return Err(schema(format!("{ppath}.occurrences"), "occurrence list is empty"));
        }
        let mut occurrences = Vec::with_capacity(occs.len());
        for (oi, occ) in occs.iter().enumerate() {
            let opath = format!("{ppath}.occurrences[{oi}]");
            occurrences.push(parse_occurrence(occ, &opath)?);
        }
        records.push(
            PatternRecord::new(algorithm.clone(), id, occurrences)
                .map_err(|e| schema(ppath.clone(), e.to_string()))?,
        );
    }
    Ok(PatternFile { piece, algorithm, records })
}

fn parse_occurrence(v: &Value, path: &str) -> Result<PatternOccurrence> {
    let obj = as_object(v, path)?;
    check_keys(obj, path, &["points", "span"])?;
    let pts = get_array(obj, path, "points")?;
    if pts.is_empty() {
        return Err(schema(format!("{path}.points"), "occurrence has no points"));
    }
    let mut points = Vec::with_capacity(pts.len());
    for (i, p) in pts.iter().enumerate() {
        let ppath = format!("{path}.points[{i}]");
        let arr = p
            .as_array()
            .filter(|a| a.len() == 3)
            .ok_or_else(|| schema(ppath.clone(), "expected [onset, pitch, duration]"))?;
        let onset = time_from_json(&arr[0]).map_err(|m| schema(format!("{ppath}[0]"), m))?;
        let pitch = arr[1]
            .as_i64()
            .filter(|p| (0..=127).contains(p))
            .ok_or_else(|| schema(format!("{ppath}[1]"), "pitch must be an integer in 0..=127"))?;
        let duration = time_from_json(&arr[2]).map_err(|m| schema(format!("{ppath}[2]"), m))?;
        let point = Point::new(onset, pitch as u8, duration)
            .map_err(|e| schema(ppath.clone(), e.to_string()))?;
        points.push(point);
    }
    let occ = PatternOccurrence::new(points).map_err(|e| schema(path.to_string(), e.to_string()))?;
    if let Some(span) = obj.get("span") {
        let spath = format!("{path}.span");
        let arr = span
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| schema(spath.clone(), "expected [start, end]"))?;
        let start = time_from_json(&arr[0]).map_err(|m| schema(format!("{spath}[0]"), m))?;
        let end = time_from_json(&arr[1]).map_err(|m| schema(format!("{spath}[1]"), m))?;
        if (start, end) != occ.span() {
            let (s, e) = occ.span();
            return Err(schema(
                spath,
                format!("span [{start}, {end}) disagrees with its points, which span [{s}, {e})"),
            ));
        }
    }
    Ok(occ)
}

/// Pretty-printed, with explicit spans; output is a pure function of the input.
pub fn emit_pattern_json(file: &PatternFile) -> String {
    let patterns: Vec<Value> = file
        .records
        .iter()
        .map(|r| {
            let occs: Vec<Value> = r
                .occurrences()
                .iter()
                .map(|o| {
                    let pts: Vec<Value> = o
                        .points()
                        .iter()
                        .map(|p| json!([p.onset.to_string(), p.pitch, p.duration.to_string()]))
                        .collect();
                    let (s, e) = o.span();
                    json!({"points": pts, "span": [s.to_string(), e.to_string()]})
                })
                .collect();
            json!({"id": r.id, "occurrences": occs})
        })
        .collect();
    let doc = json!({
        "piece": file.piece,
        "algorithm": file.algorithm,
        "patterns": patterns,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("JSON values serialize");
    s.push('\n');
    s
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema { path: path.into(), message: message.into() }
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| schema(path, "expected an object"))
}

fn check_keys(obj: &Map<String, Value>, path: &str, allowed: &[&str]) -> Result<()> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(schema(format!("{path}.{k}"), "unknown key")),
        None => Ok(()),
    }
}

fn get_str(obj: &Map<String, Value>, path: &str, key: &str) -> Result<String> {
    match obj.get(key) {
        Some(Value::String(s)) => Ok(s.clone()),
        Some(_) => Err(schema(format!("{path}.{key}"), "expected a string")),
        None => Err(schema(format!("{path}.{key}"), "missing required key")),
    }
}

fn get_array<'a>(obj: &'a Map<String, Value>, path: &str, key: &str) -> Result<&'a Vec<Value>> {
    match obj.get(key) {
        Some(Value::Array(a)) => Ok(a),
        Some(_) => Err(schema(format!("{path}.{key}"), "expected an array")),
        None => Err(schema(format!("{path}.{key}"), "missing required key")),
    }
}

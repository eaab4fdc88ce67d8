//! Browser bindings. Every entry point takes and returns plain strings so
//! the page can stay a single static file.

use bieberbach::analysis::{analyze as run_analysis, render_text, AnalysisOptions};
use bieberbach::catalog::{catalog_entries, find_entry};
use bieberbach::cohomology::splitting_equivalence;
use bieberbach::error::Error;
use bieberbach::io::{parse_group, parse_overlattice, rat_strings};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn js_err(e: Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

pub fn analyze_str(group_json: &str, as_json: bool, sample: bool) -> Result<String, Error> {
    let c = parse_group(group_json)?;
    let report = run_analysis(&c, AnalysisOptions { sample_structure: sample })?;
    if as_json {
        serde_json::to_string_pretty(&report).map_err(|e| Error::Internal(e.to_string()))
    } else {
        Ok(render_text(&report))
    }
}

pub fn split_str(group_json: &str, overlattice_json: &str) -> Result<String, Error> {
    let c = parse_group(group_json)?;
    let l = parse_overlattice(overlattice_json)?;
    let r = splitting_equivalence(&c, &l)?;
    let out = json!({
        "index": l.index().to_string(),
        "realization": r.realization,
        "realization_shift": r.realization_shift.as_ref().map(rat_strings),
        "class_vanishes": r.class_vanishes,
        "fixed_point": r.fixed_point,
        "fixed_point_count": r.fixed_points.count.to_string(),
        "fixed_points": r.fixed_points.points.iter().map(rat_strings).collect::<Vec<_>>(),
    });
    serde_json::to_string_pretty(&out).map_err(|e| Error::Internal(e.to_string()))
}

/// Analysis report as text, or as JSON when `as_json` is set.
#[wasm_bindgen]
pub fn analyze(group_json: &str, as_json: bool, sample: bool) -> Result<String, JsValue> {
    analyze_str(group_json, as_json, sample).map_err(js_err)
}

/// The three splitting criteria over an overlattice, as JSON.
#[wasm_bindgen]
pub fn split(group_json: &str, overlattice_json: &str) -> Result<String, JsValue> {
    split_str(group_json, overlattice_json).map_err(js_err)
}

/// Names and descriptions of the built-in examples, as a JSON array.
#[wasm_bindgen]
pub fn catalog_list() -> String {
    let items: Vec<_> = catalog_entries()
        .into_iter()
        .map(|e| json!({ "name": e.name, "description": e.description }))
        .collect();
    serde_json::Value::Array(items).to_string()
}

/// Group input file for a catalog entry.
#[wasm_bindgen]
pub fn catalog_group(name: &str) -> Result<String, JsValue> {
    find_entry(name)
        .map(|e| e.group.to_json())
        .ok_or_else(|| JsValue::from_str(&format!("no catalog entry named {name}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_entries_analyze() {
        let list: serde_json::Value = serde_json::from_str(&catalog_list()).unwrap();
        let name = list[0]["name"].as_str().unwrap();
        let g = find_entry(name).unwrap().group.to_json();
        assert!(analyze_str(&g, false, false).unwrap().contains("rank"));
        let r: serde_json::Value = serde_json::from_str(&analyze_str(&g, true, true).unwrap()).unwrap();
        assert!(r["samples"].is_array());
    }

    #[test]
    fn split_reports_criteria() {
        let g = find_entry("Z2-hyperelliptic").unwrap().group.to_json();
        let r: serde_json::Value = serde_json::from_str(&split_str(&g, r#"{"rank": 4, "generators": []}"#).unwrap()).unwrap();
        assert_eq!(r["index"], "1");
        assert_eq!(r["realization"], r["class_vanishes"]);
        assert_eq!(r["realization"], r["fixed_point"]);
        assert!(analyze_str("{", false, false).is_err());
    }
}

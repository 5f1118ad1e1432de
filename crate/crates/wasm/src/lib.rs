//! Browser bindings for the `jwg` crate. Every exported function takes the
//! graph as `(field, m, i, j)`, where `field` is a field string such as `"7"`
//! or `"3^2/[2,2,1]"`, and returns a JSON string.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use jwg::harness::{parse_vertex, run_cell, GridLimits};
use jwg::metrics::bfs_distances;
use jwg::witness::{path_between, shortest_algebraic_cycle, WalkRecord};
use jwg::{FieldSpec, GraphSpec};

/// Graphs above this many vertices are refused; the page runs single-threaded.
pub const MAX_VERTICES: u64 = 300_000;

fn graph(field: &str, m: usize, i: usize, j: usize) -> Result<GraphSpec, String> {
    let field: FieldSpec = field.trim().parse().map_err(|e| format!("{e}"))?;
    let spec = GraphSpec::jumped(&field, m, i, j).map_err(|e| e.to_string())?;
    let vertices = spec.counts().0;
    if vertices > MAX_VERTICES {
        return Err(format!("{vertices} vertices is more than the demo limit of {MAX_VERTICES}"));
    }
    Ok(spec)
}

fn json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

/// Full invariant record: components, diameter, girth (BFS, algebraic and
/// predicted), degree and the sampled path check.
pub fn invariants_json(field: &str, m: usize, i: usize, j: usize) -> Result<String, String> {
    let spec = graph(field, m, i, j)?;
    let limits = GridLimits {
        max_vertices: MAX_VERTICES,
        threads: Some(1),
        ..GridLimits::default()
    };
    json(&run_cell(&spec, &limits))
}

#[derive(Serialize)]
struct PathReply {
    walk: WalkRecord,
    bfs_distance: jwg::Distance,
}

/// Explicit path between two vertices written as `P:rank`, `L:rank`,
/// `P=c1,c2,...` or `L=c1,c2,...`.
pub fn path_json(field: &str, m: usize, i: usize, j: usize, from: &str, to: &str) -> Result<String, String> {
    let spec = graph(field, m, i, j)?;
    let a = parse_vertex(&spec, from).map_err(|e| e.to_string())?;
    let b = parse_vertex(&spec, to).map_err(|e| e.to_string())?;
    let walk = path_between(&spec, a, b).map_err(|e| e.to_string())?;
    json(&PathReply {
        walk: WalkRecord::new(&spec, &walk),
        bfs_distance: jwg::metrics::distance_between(&spec, a, b),
    })
}

/// A shortest cycle found by the algebraic search.
pub fn cycle_json(field: &str, m: usize, i: usize, j: usize) -> Result<String, String> {
    let spec = graph(field, m, i, j)?;
    let walk = shortest_algebraic_cycle(&spec).map_err(|e| e.to_string())?;
    json(&WalkRecord::new(&spec, &walk))
}

/// Number of vertices at each distance from `root`.
pub fn histogram_json(field: &str, m: usize, i: usize, j: usize, root: &str) -> Result<String, String> {
    let spec = graph(field, m, i, j)?;
    let root = parse_vertex(&spec, root).map_err(|e| e.to_string())?;
    json(&bfs_distances(&spec, root).histogram())
}

#[wasm_bindgen]
pub fn invariants(field: &str, m: usize, i: usize, j: usize) -> Result<String, JsError> {
    invariants_json(field, m, i, j).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn path(field: &str, m: usize, i: usize, j: usize, from: &str, to: &str) -> Result<String, JsError> {
    path_json(field, m, i, j, from, to).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn cycle(field: &str, m: usize, i: usize, j: usize) -> Result<String, JsError> {
    cycle_json(field, m, i, j).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn histogram(field: &str, m: usize, i: usize, j: usize, root: &str) -> Result<String, JsError> {
    histogram_json(field, m, i, j, root).map_err(|e| JsError::new(&e))
}

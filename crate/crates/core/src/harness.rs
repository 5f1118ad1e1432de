//! Parameter-grid runner: computes invariants and witnesses per cell,
//! compares them with the stated results, and emits JSON or CSV reports.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{FieldError, FieldSpec};
use crate::graph::{GraphError, GraphSpec, Side, VertexId};
use crate::metrics::{Adjacency, Distance, Girth, Stopwatch};
use crate::symfun::det_sign_calibration;
use crate::witness::{
    algebraic_girth, eight_cycle, literal_eight_cycle, path_between, predicted_girth,
    shortest_algebraic_cycle, PredictionStatus,
};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Largest field for which the triple scan behind the algebraic girth runs.
pub const ALGEBRAIC_GIRTH_MAX_Q: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridLimits {
    /// Cells with more vertices skip the BFS invariants.
    pub max_vertices: u64,
    /// Roots used by the sampled diameter lower bound.
    pub max_bfs_roots: usize,
    /// Worker threads; `None` uses the available parallelism.
    pub threads: Option<usize>,
    /// Replace skipped exact diameters by a sampled lower bound.
    pub sample_diameter: bool,
    /// Random vertex pairs per cell for the constructive path check.
    pub path_samples: usize,
}

impl Default for GridLimits {
    fn default() -> Self {
        GridLimits {
            max_vertices: 200_000,
            max_bfs_roots: 256,
            threads: None,
            sample_diameter: false,
            path_samples: 16,
        }
    }
}

/// Upper limit on graphs built for the sampled diameter.
const SAMPLED_MAX_VERTICES: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IjFilter {
    All,
    Pairs(Vec<(usize, usize)>),
}

/// A set of `(q, m, i, j)` cells.
///
/// Text form: `q=2,3,3^2/[2,2,1];m=1..3;ij=all` where `ij` also accepts a
/// list like `1:3,2:3` and defaults to `all`. Pairs outside
/// `1 <= i < j <= m+2` are ignored for that `m`.
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub fields: Vec<FieldSpec>,
    pub m_values: Vec<usize>,
    pub ij: IjFilter,
    pub limits: GridLimits,
}

/// Splits on commas that are not inside brackets.
fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let (mut depth, mut start) = (0i32, 0);
    for (k, c) in s.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(s[start..k].trim());
                start = k + 1;
            }
            _ => {}
        }
    }
    parts.push(s[start..].trim());
    parts.into_iter().filter(|p| !p.is_empty()).collect()
}

fn parse_usize(s: &str) -> Result<usize, HarnessError> {
    s.trim()
        .parse()
        .map_err(|_| HarnessError::InvalidGrid(format!("not a number: {s:?}")))
}

fn parse_m_values(s: &str) -> Result<Vec<usize>, HarnessError> {
    let mut out = Vec::new();
    for part in split_top_level(s) {
        match part.split_once("..") {
            Some((a, b)) => {
                let (a, b) = (parse_usize(a)?, parse_usize(b.trim_start_matches('='))?);
                if a > b {
                    return Err(HarnessError::InvalidGrid(format!("empty range {part}")));
                }
                out.extend(a..=b);
            }
            None => out.push(parse_usize(part)?),
        }
    }
    out.sort_unstable();
    out.dedup();
    if out.is_empty() || out[0] == 0 {
        return Err(HarnessError::InvalidGrid("m values must be >= 1".into()));
    }
    Ok(out)
}

fn parse_ij(s: &str) -> Result<IjFilter, HarnessError> {
    if s.trim() == "all" {
        return Ok(IjFilter::All);
    }
    let mut pairs = Vec::new();
    for part in split_top_level(s) {
        let (i, j) = part
            .split_once(':')
            .ok_or_else(|| HarnessError::InvalidGrid(format!("expected i:j, got {part:?}")))?;
        let (i, j) = (parse_usize(i)?, parse_usize(j)?);
        if i == 0 || i >= j {
            return Err(HarnessError::InvalidGrid(format!("need 1 <= i < j, got {i}:{j}")));
        }
        pairs.push((i, j));
    }
    pairs.sort_unstable();
    pairs.dedup();
    Ok(IjFilter::Pairs(pairs))
}

impl GridSpec {
    pub fn parse(expr: &str, limits: GridLimits) -> Result<Self, HarnessError> {
        let (mut fields, mut m_values, mut ij) = (None, None, IjFilter::All);
        for clause in expr.split(';').map(str::trim).filter(|c| !c.is_empty()) {
            let (key, value) = clause
                .split_once('=')
                .ok_or_else(|| HarnessError::InvalidGrid(format!("expected key=value, got {clause:?}")))?;
            match key.trim() {
                "q" => {
                    let fs = split_top_level(value)
                        .into_iter()
                        .map(FieldSpec::from_str)
                        .collect::<Result<Vec<_>, _>>()?;
                    fields = Some(fs);
                }
                "m" => m_values = Some(parse_m_values(value)?),
                "ij" => ij = parse_ij(value)?,
                other => return Err(HarnessError::InvalidGrid(format!("unknown key {other:?}"))),
            }
        }
        let mut fields = fields.ok_or_else(|| HarnessError::InvalidGrid("missing q=".into()))?;
        if fields.is_empty() {
            return Err(HarnessError::InvalidGrid("empty q list".into()));
        }
        // Stable, so several moduli of one order keep their given order.
        fields.sort_by_key(|f| f.q());
        fields.dedup();
        let m_values = m_values.ok_or_else(|| HarnessError::InvalidGrid("missing m=".into()))?;
        Ok(GridSpec {
            fields,
            m_values,
            ij,
            limits,
        })
    }

    /// Cells in `(q, m, i, j)` order.
    pub fn cells(&self) -> Vec<GraphSpec> {
        let mut out = Vec::new();
        for field in &self.fields {
            for &m in &self.m_values {
                for i in 1..=m + 1 {
                    for j in i + 1..=m + 2 {
                        let keep = match &self.ij {
                            IjFilter::All => true,
                            IjFilter::Pairs(ps) => ps.contains(&(i, j)),
                        };
                        if keep {
                            out.push(GraphSpec::jumped(field, m, i, j).expect("valid jump indices"));
                        }
                    }
                }
            }
        }
        out
    }
}

/// Outcome of comparing a computed value with a stated one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Agreement {
    Agrees,
    Violated,
    NotApplicable,
}

impl fmt::Display for Agreement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Agreement::Agrees => "agrees",
            Agreement::Violated => "violated",
            Agreement::NotApplicable => "not_applicable",
        })
    }
}

/// One grid cell. Optional fields are `null` when a limit skipped them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub q: u32,
    pub p: u32,
    pub e: u32,
    pub poly: String,
    pub m: usize,
    pub i: usize,
    pub j: usize,
    pub vertices: u64,
    pub edges: u64,
    pub regular_degree: Option<u32>,
    pub components: Option<u64>,
    pub diameter: Option<Distance>,
    pub diameter_sampled: bool,
    pub diameter_bound: u32,
    pub diameter_predicted: Option<u32>,
    pub diameter_agrees: Agreement,
    pub girth_bfs: Option<Girth>,
    pub girth_algebraic: Option<u32>,
    pub girth_predicted: Option<u32>,
    pub girth_status: PredictionStatus,
    pub girth_source: String,
    pub girth_note: Option<String>,
    pub girth_agrees: Agreement,
    pub det_sign_epsilon: Option<i8>,
    pub literal_eight_cycle_valid: bool,
    pub paths_checked: u32,
    pub path_max_length: Option<u32>,
    pub paths_within_bound: Agreement,
    pub cycle_witness: Option<String>,
    pub skipped: Option<String>,
    pub findings: Vec<String>,
    pub hard_failures: Vec<String>,
    pub elapsed_ms: u64,
}

pub const CSV_HEADER: [&str; 33] = [
    "q",
    "p",
    "e",
    "poly",
    "m",
    "i",
    "j",
    "vertices",
    "edges",
    "regular_degree",
    "components",
    "diameter",
    "diameter_sampled",
    "diameter_bound",
    "diameter_predicted",
    "diameter_agrees",
    "girth_bfs",
    "girth_algebraic",
    "girth_predicted",
    "girth_status",
    "girth_source",
    "girth_note",
    "girth_agrees",
    "det_sign_epsilon",
    "literal_eight_cycle_valid",
    "paths_checked",
    "path_max_length",
    "paths_within_bound",
    "cycle_witness",
    "skipped",
    "findings",
    "hard_failures",
    "elapsed_ms",
];

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

impl ReportRecord {
    pub fn has_hard_failure(&self) -> bool {
        !self.hard_failures.is_empty()
    }

    /// The record with timing zeroed, for determinism comparisons.
    pub fn without_timing(&self) -> Self {
        ReportRecord {
            elapsed_ms: 0,
            ..self.clone()
        }
    }

    fn csv_row(&self) -> Vec<String> {
        let status = serde_json::to_value(self.girth_status)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default();
        vec![
            self.q.to_string(),
            self.p.to_string(),
            self.e.to_string(),
            self.poly.clone(),
            self.m.to_string(),
            self.i.to_string(),
            self.j.to_string(),
            self.vertices.to_string(),
            self.edges.to_string(),
            opt(&self.regular_degree),
            opt(&self.components),
            opt(&self.diameter),
            self.diameter_sampled.to_string(),
            self.diameter_bound.to_string(),
            opt(&self.diameter_predicted),
            self.diameter_agrees.to_string(),
            opt(&self.girth_bfs),
            opt(&self.girth_algebraic),
            opt(&self.girth_predicted),
            status,
            self.girth_source.clone(),
            opt(&self.girth_note),
            self.girth_agrees.to_string(),
            opt(&self.det_sign_epsilon),
            self.literal_eight_cycle_valid.to_string(),
            self.paths_checked.to_string(),
            opt(&self.path_max_length),
            self.paths_within_bound.to_string(),
            opt(&self.cycle_witness),
            opt(&self.skipped),
            self.findings.join("; "),
            self.hard_failures.join("; "),
            self.elapsed_ms.to_string(),
        ]
    }
}

/// Cells whose diameter equals the bound `2(m+1)` when `m < q - 2`.
pub fn exact_diameter_cell(m: usize, i: usize, j: usize) -> bool {
    [(m, m + 2), (m + 1, m + 2), (m, m + 1)].contains(&(i, j))
}

fn compact_walk(vs: &[VertexId]) -> String {
    vs.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn cell_seed(spec: &GraphSpec) -> u64 {
    let (i, j) = spec.jump().unwrap_or((0, 0));
    let mut seed = spec.q() as u64;
    for &c in spec.field().modulus() {
        seed = seed.wrapping_mul(31).wrapping_add(c as u64);
    }
    for v in [spec.m(), i, j] {
        seed = seed.wrapping_mul(1_000_003).wrapping_add(v as u64);
    }
    seed
}

/// Evaluates one jumped cell.
pub fn run_cell(spec: &GraphSpec, limits: &GridLimits) -> ReportRecord {
    let start = Stopwatch::start();
    let field = spec.field();
    let (q, m) = (spec.q(), spec.m());
    let (i, j) = spec.jump().expect("grid cells are jumped");
    let n_side = spec.side_size();
    let (vertices, edges) = spec.counts();
    let bound = 2 * (m as u32 + 1);
    let in_range = m + 2 < q as usize;
    let mut findings = Vec::new();
    let mut hard = Vec::new();

    let prediction = predicted_girth(spec).expect("grid cells are jumped");
    if let Some(note) = &prediction.note {
        if prediction.status != PredictionStatus::Asserted {
            findings.push(format!("girth statement: {note}"));
        }
    }

    let girth_algebraic = (q <= ALGEBRAIC_GIRTH_MAX_Q).then(|| algebraic_girth(spec).expect("8-cycle validates"));
    let cycle_witness = (q <= ALGEBRAIC_GIRTH_MAX_Q)
        .then(|| shortest_algebraic_cycle(spec).ok())
        .flatten()
        .map(|w| compact_walk(&w.vertices));
    let literal_eight_cycle_valid = literal_eight_cycle(spec).validate(spec).is_ok();
    if eight_cycle(spec).is_err() {
        hard.push("general 8-cycle failed validation".to_string());
    }
    let det_sign_epsilon = det_sign_calibration(m + 1, i, j).ok();

    let mut skipped = None;
    let (mut regular_degree, mut components, mut diameter, mut girth_bfs) = (None, None, None, None);
    let mut diameter_sampled = false;
    let mut adjacency = None;
    if vertices <= limits.max_vertices {
        let adj = Adjacency::build(spec);
        regular_degree = adj.regular_degree();
        components = Some(adj.components() as u64);
        diameter = Some(adj.diameter());
        girth_bfs = Some(adj.girth());
        adjacency = Some(adj);
    } else if limits.sample_diameter && vertices <= SAMPLED_MAX_VERTICES {
        let adj = Adjacency::build(spec);
        regular_degree = adj.regular_degree();
        diameter = Some(Distance::Finite(adj.sampled_diameter_lower_bound(limits.max_bfs_roots)));
        diameter_sampled = true;
        skipped = Some(format!(
            "{vertices} vertices > max_vertices {}: diameter is a lower bound from {} roots; components and girth_bfs skipped",
            limits.max_vertices, limits.max_bfs_roots
        ));
        adjacency = Some(adj);
    } else {
        skipped = Some(format!(
            "{vertices} vertices > max_vertices {}: BFS invariants skipped",
            limits.max_vertices
        ));
    }

    if let Some(d) = regular_degree {
        if d != q {
            hard.push(format!("degree {d} != q"));
        }
    } else if adjacency.is_some() {
        hard.push("graph is not regular".to_string());
    }

    let diameter_predicted = (in_range && exact_diameter_cell(m, i, j)).then_some(bound);
    let diameter_agrees = match (in_range, diameter) {
        (false, _) | (true, None) => Agreement::NotApplicable,
        (true, Some(Distance::Infinite)) => {
            hard.push("disconnected although m + 2 < q".to_string());
            Agreement::Violated
        }
        (true, Some(Distance::Finite(d))) => {
            let mut verdict = Agreement::Agrees;
            if d > bound {
                verdict = Agreement::Violated;
                let msg = format!("diameter {d} exceeds 2(m+1) = {bound}");
                if j <= m + 1 {
                    hard.push(msg);
                } else {
                    findings.push(msg);
                }
            }
            if let Some(exact) = diameter_predicted {
                if !diameter_sampled && d != exact {
                    verdict = Agreement::Violated;
                    findings.push(format!("diameter {d} differs from the exact value {exact}"));
                }
            }
            verdict
        }
    };

    if let (Some(Girth::Finite(b)), Some(a)) = (girth_bfs, girth_algebraic) {
        if a != b {
            hard.push(format!("BFS girth {b} != algebraic girth {a}"));
        }
    }
    if let Some(Girth::Acyclic) = girth_bfs {
        hard.push("no cycle found although an 8-cycle exists".to_string());
    }
    let empirical = girth_bfs.and_then(Girth::finite).or(girth_algebraic);
    let girth_agrees = match (prediction.value, empirical) {
        (Some(pv), Some(g)) if pv == g => Agreement::Agrees,
        (Some(pv), Some(g)) => {
            findings.push(format!(
                "girth {g} differs from the stated {pv} ({:?})",
                prediction.status
            ));
            Agreement::Violated
        }
        _ => Agreement::NotApplicable,
    };

    let (mut paths_checked, mut path_max_length) = (0u32, None);
    let mut paths_within_bound = Agreement::NotApplicable;
    if in_range && limits.path_samples > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(cell_seed(spec));
        let mut ok = true;
        for _ in 0..limits.path_samples {
            let side = |r: &mut ChaCha8Rng| if r.gen_bool(0.5) { Side::Point } else { Side::Line };
            let a = VertexId { side: side(&mut rng), rank: rng.gen_range(0..n_side) };
            let b = VertexId { side: side(&mut rng), rank: rng.gen_range(0..n_side) };
            match path_between(spec, a, b) {
                Ok(w) => {
                    let len = w.len() as u32;
                    let limit = if a.side == b.side { bound } else { bound + 1 };
                    paths_checked += 1;
                    path_max_length = Some(path_max_length.map_or(len, |x: u32| x.max(len)));
                    if len > limit {
                        ok = false;
                        hard.push(format!("constructed path {a} -> {b} has length {len} > {limit}"));
                    }
                    if let Some(adj) = &adjacency {
                        if let Some(d) = adj.bfs(a).get(b) {
                            if len < d {
                                ok = false;
                                hard.push(format!("constructed path {a} -> {b} shorter than BFS distance {d}"));
                            }
                        }
                    }
                }
                Err(e) => {
                    ok = false;
                    hard.push(format!("path construction {a} -> {b} failed: {e}"));
                }
            }
        }
        paths_within_bound = if ok { Agreement::Agrees } else { Agreement::Violated };
    }

    ReportRecord {
        q,
        p: field.p(),
        e: field.e(),
        poly: field.modulus_string(),
        m,
        i,
        j,
        vertices,
        edges,
        regular_degree,
        components,
        diameter,
        diameter_sampled,
        diameter_bound: bound,
        diameter_predicted,
        diameter_agrees,
        girth_bfs,
        girth_algebraic,
        girth_predicted: prediction.value,
        girth_status: prediction.status,
        girth_source: prediction.source,
        girth_note: prediction.note,
        girth_agrees,
        det_sign_epsilon,
        literal_eight_cycle_valid,
        paths_checked,
        path_max_length,
        paths_within_bound,
        cycle_witness,
        skipped,
        findings,
        hard_failures: hard,
        elapsed_ms: start.elapsed_ms(),
    }
}

/// One record per cell, in cell order, independent of the worker count.
pub fn run_grid(grid: &GridSpec) -> Result<Vec<ReportRecord>, HarnessError> {
    let cells = grid.cells();
    let limits = &grid.limits;
    #[cfg(feature = "parallel")]
    {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(t) = limits.threads {
            builder = builder.num_threads(t.max(1));
        }
        let pool = builder
            .build()
            .map_err(|e| HarnessError::InvalidGrid(format!("thread pool: {e}")))?;
        Ok(pool.install(|| cells.par_iter().map(|c| run_cell(c, limits)).collect()))
    }
    #[cfg(not(feature = "parallel"))]
    {
        Ok(cells.iter().map(|c| run_cell(c, limits)).collect())
    }
}

pub fn emit_json<W: Write>(records: &[ReportRecord], mut out: W) -> Result<(), HarnessError> {
    serde_json::to_writer_pretty(&mut out, records)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn emit_csv<W: Write>(records: &[ReportRecord], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record(r.csv_row())?;
    }
    w.flush()?;
    Ok(())
}

/// Parses `P:17`, `L:3`, or coordinates as in `P=0,1,2`.
pub fn parse_vertex(spec: &GraphSpec, s: &str) -> Result<VertexId, HarnessError> {
    let bad = || HarnessError::InvalidGrid(format!("bad vertex {s:?}: expected P:rank, L:rank or P=c1,c2,..."));
    let s = s.trim();
    let side = match s.chars().next().map(|c| c.to_ascii_uppercase()) {
        Some('P') => Side::Point,
        Some('L') => Side::Line,
        _ => return Err(bad()),
    };
    let rest = &s[1..];
    let v = if let Some(rank) = rest.strip_prefix(':') {
        VertexId { side, rank: rank.trim().parse().map_err(|_| bad())? }
    } else if let Some(coords) = rest.strip_prefix('=') {
        let coords = coords
            .trim_matches(|c| c == '(' || c == ')' || c == '[' || c == ']')
            .split(',')
            .map(|c| c.trim().parse::<u32>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()?;
        if coords.len() != spec.m() + 1 {
            return Err(bad());
        }
        let elems = coords
            .iter()
            .map(|&c| spec.field().element(c))
            .collect::<Result<Vec<_>, _>>()?;
        spec.vertex(side, &elems)
    } else {
        return Err(bad());
    };
    spec.check_vertex(v)?;
    Ok(v)
}

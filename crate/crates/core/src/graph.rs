//! Implicit adjacency for jumped Wenger graphs.
//!
//! A point `(p_1, ..., p_{m+1})` and a line `[l_1, ..., l_{m+1}]` are
//! adjacent when `l_k + p_k = l_1 p_1^{e_k}` for `k = 2, ..., m+1`, where
//! `e_1 = 0 < e_2 < ... < e_{m+1}` is the exponent list of the graph.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{FieldElement, FieldSpec};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("jump indices must satisfy 1 <= i < j <= m+2 (got m={m}, i={i}, j={j})")]
    BadJumpIndices { m: usize, i: usize, j: usize },
    #[error("exponent list must start at 0, be strictly increasing and have m+1 >= 2 entries")]
    BadExponents,
    #[error("vertex count q^(m+1) does not fit in 64 bits")]
    TooLarge,
    #[error("expected a {expected} vertex")]
    WrongSide { expected: Side },
    #[error("both vertices are on the same side")]
    SameSide,
    #[error("rank {rank} out of range for {side} vertices")]
    RankOutOfRange { side: Side, rank: u64 },
    #[error("malformed edge list: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Point,
    Line,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Point => Side::Line,
            Side::Line => Side::Point,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Point => "point",
            Side::Line => "line",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId {
    pub side: Side,
    pub rank: u64,
}

impl VertexId {
    pub fn point(rank: u64) -> Self {
        VertexId { side: Side::Point, rank }
    }

    pub fn line(rank: u64) -> Self {
        VertexId { side: Side::Line, rank }
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.side {
            Side::Point => write!(f, "P{}", self.rank),
            Side::Line => write!(f, "L{}", self.rank),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Origin {
    Jumped { i: usize, j: usize },
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeFormat {
    EdgeList,
    Dimacs,
}

/// One graph of the family: a field, `m`, and the exponent list.
#[derive(Clone)]
pub struct GraphSpec {
    field: FieldSpec,
    m: usize,
    exponents: Vec<u32>,
    origin: Origin,
    side_size: u64,
    // powers[x * (m+1) + k] = x^{e_k}
    powers: Vec<FieldElement>,
}

impl fmt::Debug for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GraphSpec")
            .field("field", &self.field)
            .field("m", &self.m)
            .field("exponents", &self.exponents)
            .field("origin", &self.origin)
            .finish()
    }
}

impl GraphSpec {
    /// `J_m(q, i, j)`: exponents `{0, ..., m+2} \ {i, j}`.
    pub fn jumped(field: &FieldSpec, m: usize, i: usize, j: usize) -> Result<Self, GraphError> {
        if m == 0 || i == 0 || i >= j || j > m + 2 {
            return Err(GraphError::BadJumpIndices { m, i, j });
        }
        let exponents = (0..=(m as u32 + 2))
            .filter(|&e| e != i as u32 && e != j as u32)
            .collect();
        Self::build(field, exponents, Origin::Jumped { i, j })
    }

    /// The Wenger graph `W_m(q) = J_m(q, m+1, m+2)`.
    pub fn wenger(field: &FieldSpec, m: usize) -> Result<Self, GraphError> {
        Self::jumped(field, m, m + 1, m + 2)
    }

    /// Arbitrary monomial exponents `0 = e_1 < e_2 < ... < e_{m+1}`.
    pub fn custom(field: &FieldSpec, exponents: Vec<u32>) -> Result<Self, GraphError> {
        if exponents.len() < 2
            || exponents[0] != 0
            || exponents.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(GraphError::BadExponents);
        }
        Self::build(field, exponents, Origin::Custom)
    }

    fn build(field: &FieldSpec, exponents: Vec<u32>, origin: Origin) -> Result<Self, GraphError> {
        let m = exponents.len() - 1;
        let side_size = (field.q() as u64)
            .checked_pow(m as u32 + 1)
            .ok_or(GraphError::TooLarge)?;
        let powers = field
            .enumerate()
            .flat_map(|x| exponents.iter().map(move |&e| field.pow(x, e as u64)))
            .collect();
        Ok(GraphSpec {
            field: field.clone(),
            m,
            exponents,
            origin,
            side_size,
            powers,
        })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn q(&self) -> u32 {
        self.field.q()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn origin(&self) -> Origin {
        self.origin
    }

    /// `(i, j)` for jumped graphs.
    pub fn jump(&self) -> Option<(usize, usize)> {
        match self.origin {
            Origin::Jumped { i, j } => Some((i, j)),
            Origin::Custom => None,
        }
    }

    /// Vertices per side, `q^(m+1)`.
    pub fn side_size(&self) -> u64 {
        self.side_size
    }

    /// `(2 q^(m+1), q^(m+2))`.
    pub fn counts(&self) -> (u64, u64) {
        (2 * self.side_size, self.side_size * self.q() as u64)
    }

    /// `x^{e_k}`.
    #[inline]
    pub fn power(&self, x: FieldElement, k: usize) -> FieldElement {
        self.powers[x.rank() as usize * (self.m + 1) + k]
    }

    /// The column `(x^{e_1}, ..., x^{e_{m+1}})`.
    pub fn column(&self, x: FieldElement) -> Vec<FieldElement> {
        let k0 = x.rank() as usize * (self.m + 1);
        self.powers[k0..k0 + self.m + 1].to_vec()
    }

    /// Base-q digits of the rank, first coordinate least significant.
    pub fn coords(&self, v: VertexId) -> Vec<FieldElement> {
        let q = self.q() as u64;
        let mut r = v.rank;
        (0..=self.m)
            .map(|_| {
                let d = r % q;
                r /= q;
                FieldElement::from_rank(d as u32)
            })
            .collect()
    }

    pub fn rank_of(&self, coords: &[FieldElement]) -> u64 {
        let q = self.q() as u64;
        coords.iter().rev().fold(0, |acc, c| acc * q + c.rank() as u64)
    }

    pub fn vertex(&self, side: Side, coords: &[FieldElement]) -> VertexId {
        assert_eq!(coords.len(), self.m + 1, "coordinate vector has wrong length");
        VertexId {
            side,
            rank: self.rank_of(coords),
        }
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<(), GraphError> {
        if v.rank < self.side_size {
            Ok(())
        } else {
            Err(GraphError::RankOutOfRange {
                side: v.side,
                rank: v.rank,
            })
        }
    }

    /// Calls `visit` with the rank of each neighbour of `v`, in order of the
    /// neighbour's first coordinate. The neighbour is on the other side.
    #[inline]
    pub fn for_each_neighbor_rank(&self, v: VertexId, mut visit: impl FnMut(u64)) {
        let f = &self.field;
        let q = self.q() as u64;
        let m = self.m;
        let mut c = [FieldElement::ZERO; 32];
        let coords: Vec<FieldElement>;
        let coords: &[FieldElement] = if m < 32 {
            let mut r = v.rank;
            for slot in c.iter_mut().take(m + 1) {
                *slot = FieldElement::from_rank((r % q) as u32);
                r /= q;
            }
            &c[..=m]
        } else {
            coords = self.coords(v);
            &coords
        };
        // Point: l_k = l_1 p_1^{e_k} - p_k, varying l_1.
        // Line:  p_k = l_1 p_1^{e_k} - l_k, varying p_1.
        for t in f.enumerate() {
            let (l1, x) = match v.side {
                Side::Point => (t, coords[0]),
                Side::Line => (coords[0], t),
            };
            let mut rank = 0u64;
            let mut place = 1u64;
            rank += t.rank() as u64;
            for k in 1..=m {
                place *= q;
                let val = f.sub(f.mul(l1, self.power(x, k)), coords[k]);
                rank += val.rank() as u64 * place;
            }
            visit(rank);
        }
    }

    pub fn neighbors(&self, v: VertexId) -> Vec<VertexId> {
        let side = v.side.other();
        let mut out = Vec::with_capacity(self.q() as usize);
        self.for_each_neighbor_rank(v, |rank| out.push(VertexId { side, rank }));
        out
    }

    /// The `q` lines through a point, ordered by `l_1`.
    pub fn point_neighbors(&self, p: VertexId) -> Result<Vec<VertexId>, GraphError> {
        if p.side != Side::Point {
            return Err(GraphError::WrongSide { expected: Side::Point });
        }
        self.check_vertex(p)?;
        Ok(self.neighbors(p))
    }

    /// The `q` points on a line, ordered by `p_1`.
    pub fn line_neighbors(&self, l: VertexId) -> Result<Vec<VertexId>, GraphError> {
        if l.side != Side::Line {
            return Err(GraphError::WrongSide { expected: Side::Line });
        }
        self.check_vertex(l)?;
        Ok(self.neighbors(l))
    }

    /// Whether a point and a line are incident; accepts either order.
    pub fn is_edge(&self, a: VertexId, b: VertexId) -> Result<bool, GraphError> {
        if a.side == b.side {
            return Err(GraphError::SameSide);
        }
        let (p, l) = if a.side == Side::Point { (a, b) } else { (b, a) };
        self.check_vertex(p)?;
        self.check_vertex(l)?;
        let f = &self.field;
        let pc = self.coords(p);
        let lc = self.coords(l);
        Ok((1..=self.m)
            .all(|k| f.add(lc[k], pc[k]) == f.mul(lc[0], self.power(pc[0], k))))
    }

    /// The unique point on `line` with first coordinate `x`.
    pub fn point_on_line(&self, line: &[FieldElement], x: FieldElement) -> Vec<FieldElement> {
        let f = &self.field;
        let mut p = vec![x];
        p.extend((1..=self.m).map(|k| f.sub(f.mul(line[0], self.power(x, k)), line[k])));
        p
    }

    /// The unique line through `point` with first coordinate `l1`.
    pub fn line_through_point(&self, point: &[FieldElement], l1: FieldElement) -> Vec<FieldElement> {
        let f = &self.field;
        let mut l = vec![l1];
        l.extend((1..=self.m).map(|k| f.sub(f.mul(l1, self.power(point[0], k)), point[k])));
        l
    }

    /// Header line shared by both export formats (without comment marker).
    fn header_fields(&self) -> String {
        let f = &self.field;
        let tail = match self.origin {
            Origin::Jumped { i, j } => format!("i={i} j={j}"),
            Origin::Custom => {
                let es: Vec<String> = self.exponents.iter().map(|e| e.to_string()).collect();
                format!("exponents=[{}]", es.join(","))
            }
        };
        format!(
            "jwg q={} p={} e={} poly={} m={} {}",
            f.q(),
            f.p(),
            f.e(),
            f.modulus_string(),
            self.m,
            tail
        )
    }

    /// Writes every edge, sorted by point rank and then line rank.
    pub fn export_edgelist<W: Write>(&self, out: W, format: EdgeFormat) -> Result<(), GraphError> {
        let mut out = io::BufWriter::new(out);
        let (vertices, edges) = self.counts();
        match format {
            EdgeFormat::EdgeList => writeln!(out, "# {}", self.header_fields())?,
            EdgeFormat::Dimacs => {
                writeln!(out, "c {}", self.header_fields())?;
                writeln!(out, "p edge {vertices} {edges}")?;
            }
        }
        let mut lines = Vec::with_capacity(self.q() as usize);
        for pr in 0..self.side_size {
            lines.clear();
            self.for_each_neighbor_rank(VertexId::point(pr), |r| lines.push(r));
            lines.sort_unstable();
            for &lr in &lines {
                match format {
                    EdgeFormat::EdgeList => writeln!(out, "P {pr} L {lr}")?,
                    // 1-based, lines after points
                    EdgeFormat::Dimacs => {
                        writeln!(out, "e {} {}", pr + 1, self.side_size + lr + 1)?
                    }
                }
            }
        }
        out.flush()?;
        Ok(())
    }
}

/// Reads the `P <rank> L <rank>` records of an edge list.
pub fn import_edgelist<R: BufRead>(input: R) -> Result<BTreeSet<(u64, u64)>, GraphError> {
    let mut edges = BTreeSet::new();
    for line in input.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        match parts.as_slice() {
            ["P", p, "L", l] => {
                let p = p.parse().map_err(|_| GraphError::Parse(line.to_string()))?;
                let l = l.parse().map_err(|_| GraphError::Parse(line.to_string()))?;
                edges.insert((p, l));
            }
            _ => return Err(GraphError::Parse(line.to_string())),
        }
    }
    Ok(edges)
}

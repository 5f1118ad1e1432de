//! Exact BFS-based invariants: distances, components, diameter and girth.
//!
//! Vertices are indexed densely: points take `0..N` and lines `N..2N`, where
//! `N = q^(m+1)`.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::graph::{GraphSpec, Side, VertexId};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

const UNSEEN: u32 = u32::MAX;

/// A distance or diameter that may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Distance {
    Finite(u32),
    Infinite,
}

impl Distance {
    pub fn finite(self) -> Option<u32> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Infinite => None,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Infinite => f.write_str("inf"),
        }
    }
}

// Serialized as a number, or the string "inf".
impl Serialize for Distance {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Distance::Finite(d) => s.serialize_u32(*d),
            Distance::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Distance {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u32),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(n) => Ok(Distance::Finite(n)),
            Raw::S(s) if s == "inf" => Ok(Distance::Infinite),
            Raw::S(s) => Err(serde::de::Error::custom(format!("bad distance {s:?}"))),
        }
    }
}

/// Girth, or `Acyclic` for a forest. Serialized as a number or `"acyclic"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Girth {
    Finite(u32),
    Acyclic,
}

impl Girth {
    pub fn finite(self) -> Option<u32> {
        match self {
            Girth::Finite(g) => Some(g),
            Girth::Acyclic => None,
        }
    }
}

impl fmt::Display for Girth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Girth::Finite(g) => write!(f, "{g}"),
            Girth::Acyclic => f.write_str("acyclic"),
        }
    }
}

impl Serialize for Girth {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Girth::Finite(g) => s.serialize_u32(*g),
            Girth::Acyclic => s.serialize_str("acyclic"),
        }
    }
}

impl<'de> Deserialize<'de> for Girth {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u32),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(n) => Ok(Girth::Finite(n)),
            Raw::S(s) if s == "acyclic" => Ok(Girth::Acyclic),
            Raw::S(s) => Err(serde::de::Error::custom(format!("bad girth {s:?}"))),
        }
    }
}

/// Materialized adjacency of a graph in compressed sparse row form.
pub struct Adjacency {
    side_size: usize,
    offsets: Vec<usize>,
    targets: Vec<u32>,
    regular_degree: Option<u32>,
}

impl Adjacency {
    pub fn build(spec: &GraphSpec) -> Self {
        let n = spec.side_size();
        assert!(2 * n < u32::MAX as u64, "graph too large to materialize");
        let n = n as usize;
        let q = spec.q() as usize;
        let mut offsets = Vec::with_capacity(2 * n + 1);
        let mut targets = Vec::with_capacity(2 * n * q);
        let mut regular = true;
        let mut scratch = Vec::with_capacity(q);
        offsets.push(0);
        for side in [Side::Point, Side::Line] {
            let base = if side == Side::Point { n } else { 0 };
            for rank in 0..n as u64 {
                let start = targets.len();
                spec.for_each_neighbor_rank(VertexId { side, rank }, |r| {
                    targets.push((base as u64 + r) as u32)
                });
                scratch.clear();
                scratch.extend_from_slice(&targets[start..]);
                scratch.sort_unstable();
                scratch.dedup();
                if scratch.len() != q {
                    regular = false;
                    // keep the simple-graph view
                    targets.truncate(start);
                    targets.extend_from_slice(&scratch);
                }
                offsets.push(targets.len());
            }
        }
        Adjacency {
            side_size: n,
            offsets,
            targets,
            regular_degree: regular.then_some(q as u32),
        }
    }

    pub fn vertex_count(&self) -> usize {
        2 * self.side_size
    }

    pub fn index(&self, v: VertexId) -> usize {
        match v.side {
            Side::Point => v.rank as usize,
            Side::Line => self.side_size + v.rank as usize,
        }
    }

    pub fn vertex(&self, index: usize) -> VertexId {
        if index < self.side_size {
            VertexId::point(index as u64)
        } else {
            VertexId::line((index - self.side_size) as u64)
        }
    }

    #[inline]
    pub fn neighbors(&self, index: usize) -> &[u32] {
        &self.targets[self.offsets[index]..self.offsets[index + 1]]
    }

    /// `Some(q)` when every vertex has exactly `q` distinct neighbours.
    pub fn regular_degree(&self) -> Option<u32> {
        self.regular_degree
    }

    /// Distances from `root`; `None` for unreachable vertices.
    pub fn bfs(&self, root: VertexId) -> DistanceMap {
        let mut dist = vec![UNSEEN; self.vertex_count()];
        let mut queue = Vec::with_capacity(self.vertex_count());
        let r = self.index(root);
        dist[r] = 0;
        queue.push(r as u32);
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head] as usize;
            head += 1;
            for &w in self.neighbors(u) {
                if dist[w as usize] == UNSEEN {
                    dist[w as usize] = dist[u] + 1;
                    queue.push(w);
                }
            }
        }
        DistanceMap {
            side_size: self.side_size,
            dist,
        }
    }

    /// Component label of every vertex (labels are the smallest index in the
    /// component), and the number of components.
    pub fn component_labels(&self) -> (Vec<u32>, usize) {
        let n = self.vertex_count();
        let mut label = vec![UNSEEN; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if label[s] != UNSEEN {
                continue;
            }
            count += 1;
            label[s] = s as u32;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for &w in self.neighbors(u) {
                    if label[w as usize] == UNSEEN {
                        label[w as usize] = s as u32;
                        stack.push(w as usize);
                    }
                }
            }
        }
        (label, count)
    }

    pub fn components(&self) -> usize {
        self.component_labels().1
    }

    /// Eccentricity within its component of every root in `roots`, running
    /// 64 breadth-first searches at once with one bit per root.
    pub fn eccentricities(&self, roots: &[usize]) -> Vec<u32> {
        let chunks: Vec<&[usize]> = roots.chunks(64).collect();
        #[cfg(feature = "parallel")]
        let per_chunk: Vec<Vec<u32>> = chunks.par_iter().map(|c| self.ecc_batch(c)).collect();
        #[cfg(not(feature = "parallel"))]
        let per_chunk: Vec<Vec<u32>> = chunks.iter().map(|c| self.ecc_batch(c)).collect();
        per_chunk.into_iter().flatten().collect()
    }

    fn ecc_batch(&self, roots: &[usize]) -> Vec<u32> {
        let n = self.vertex_count();
        let mut seen = vec![0u64; n];
        let mut frontier = vec![0u64; n];
        let mut next = vec![0u64; n];
        for (b, &r) in roots.iter().enumerate() {
            seen[r] |= 1 << b;
            frontier[r] |= 1 << b;
        }
        let mut ecc = vec![0u32; roots.len()];
        let mut level = 0;
        loop {
            level += 1;
            let mut fresh = 0u64;
            for v in 0..n {
                let mut acc = 0u64;
                for &u in self.neighbors(v) {
                    acc |= frontier[u as usize];
                }
                acc &= !seen[v];
                next[v] = acc;
                fresh |= acc;
            }
            if fresh == 0 {
                break;
            }
            for v in 0..n {
                seen[v] |= next[v];
            }
            std::mem::swap(&mut frontier, &mut next);
            for (b, e) in ecc.iter_mut().enumerate() {
                if fresh >> b & 1 == 1 {
                    *e = level;
                }
            }
        }
        ecc
    }

    /// Maximum eccentricity over all vertices; infinite when disconnected.
    pub fn diameter(&self) -> Distance {
        if self.components() > 1 {
            return Distance::Infinite;
        }
        let roots: Vec<usize> = (0..self.vertex_count()).collect();
        Distance::Finite(self.eccentricities(&roots).into_iter().max().unwrap_or(0))
    }

    /// Diameter of each component, ordered by the component's smallest
    /// vertex index.
    pub fn component_diameters(&self) -> Vec<u32> {
        let (labels, _) = self.component_labels();
        let roots: Vec<usize> = (0..self.vertex_count()).collect();
        let ecc = self.eccentricities(&roots);
        let mut reps: Vec<u32> = labels.clone();
        reps.sort_unstable();
        reps.dedup();
        reps.iter()
            .map(|&rep| {
                (0..labels.len())
                    .filter(|&v| labels[v] == rep)
                    .map(|v| ecc[v])
                    .max()
                    .unwrap_or(0)
            })
            .collect()
    }

    /// Largest eccentricity among `samples` evenly spread roots: a lower
    /// bound on the diameter.
    pub fn sampled_diameter_lower_bound(&self, samples: usize) -> u32 {
        let n = self.vertex_count();
        let step = (n / samples.max(1)).max(1);
        let roots: Vec<usize> = (0..n).step_by(step).collect();
        self.eccentricities(&roots).into_iter().max().unwrap_or(0)
    }

    /// Length of a shortest cycle, searched from point roots only (every
    /// cycle alternates sides, so it passes through a point).
    pub fn girth(&self) -> Girth {
        let roots: Vec<usize> = (0..self.side_size).collect();
        self.girth_from_roots(&roots)
    }

    /// Shortest cycle through any of `roots`, over all cycles found by
    /// the BFS cross-edge rule.
    pub fn girth_from_roots(&self, roots: &[usize]) -> Girth {
        let n = self.vertex_count();
        let mut best = u32::MAX;
        let mut dist = vec![UNSEEN; n];
        let mut parent = vec![UNSEEN; n];
        let mut touched: Vec<u32> = Vec::new();
        for &root in roots {
            for &t in &touched {
                dist[t as usize] = UNSEEN;
                parent[t as usize] = UNSEEN;
            }
            touched.clear();
            dist[root] = 0;
            touched.push(root as u32);
            let mut head = 0;
            while head < touched.len() {
                let u = touched[head] as usize;
                head += 1;
                // Any cycle found from here has length at least 2 d(u).
                if 2 * dist[u] >= best {
                    break;
                }
                for &w in self.neighbors(u) {
                    let w = w as usize;
                    if dist[w] == UNSEEN {
                        dist[w] = dist[u] + 1;
                        parent[w] = u as u32;
                        touched.push(w as u32);
                    } else if parent[u] != w as u32 {
                        best = best.min(dist[u] + dist[w] + 1);
                    }
                }
            }
            if best == 4 {
                break;
            }
        }
        if best == u32::MAX {
            Girth::Acyclic
        } else {
            Girth::Finite(best)
        }
    }
}

/// Distances from one root, indexed like [`Adjacency`].
pub struct DistanceMap {
    side_size: usize,
    dist: Vec<u32>,
}

impl DistanceMap {
    pub fn get(&self, v: VertexId) -> Option<u32> {
        let idx = match v.side {
            Side::Point => v.rank as usize,
            Side::Line => self.side_size + v.rank as usize,
        };
        self.dist.get(idx).copied().filter(|&d| d != UNSEEN)
    }

    pub fn distance(&self, v: VertexId) -> Distance {
        self.get(v).map_or(Distance::Infinite, Distance::Finite)
    }

    pub fn reachable(&self) -> usize {
        self.dist.iter().filter(|&&d| d != UNSEEN).count()
    }

    pub fn eccentricity(&self) -> u32 {
        self.dist.iter().copied().filter(|&d| d != UNSEEN).max().unwrap_or(0)
    }

    /// `(vertex, distance)` for every reachable vertex.
    pub fn iter(&self) -> impl Iterator<Item = (VertexId, u32)> + '_ {
        self.dist.iter().enumerate().filter(|(_, &d)| d != UNSEEN).map(|(k, &d)| {
            let v = if k < self.side_size {
                VertexId::point(k as u64)
            } else {
                VertexId::line((k - self.side_size) as u64)
            };
            (v, d)
        })
    }

    /// Number of vertices at each distance `0, 1, 2, ...`.
    pub fn histogram(&self) -> Vec<u64> {
        let mut h = vec![0u64; self.eccentricity() as usize + 1];
        for &d in &self.dist {
            if d != UNSEEN {
                h[d as usize] += 1;
            }
        }
        h
    }
}

/// The structural invariants of one graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantResult {
    pub components: usize,
    pub diameter: Distance,
    pub girth: Girth,
    pub regular_degree: Option<u32>,
    pub elapsed_ms: u64,
}

pub fn invariants(spec: &GraphSpec) -> InvariantResult {
    let start = Stopwatch::start();
    let adj = Adjacency::build(spec);
    InvariantResult {
        components: adj.components(),
        diameter: adj.diameter(),
        girth: adj.girth(),
        regular_degree: adj.regular_degree(),
        elapsed_ms: start.elapsed_ms(),
    }
}

pub fn bfs_distances(spec: &GraphSpec, root: VertexId) -> DistanceMap {
    Adjacency::build(spec).bfs(root)
}

pub fn components(spec: &GraphSpec) -> usize {
    Adjacency::build(spec).components()
}

pub fn diameter_exact(spec: &GraphSpec) -> Distance {
    Adjacency::build(spec).diameter()
}

pub fn girth_exact(spec: &GraphSpec) -> Girth {
    Adjacency::build(spec).girth()
}

/// Single-source BFS on the implicit graph, stopping at `v`.
pub fn distance_between(spec: &GraphSpec, u: VertexId, v: VertexId) -> Distance {
    if u == v {
        return Distance::Finite(0);
    }
    let n = spec.side_size() as usize;
    let index = |x: VertexId| match x.side {
        Side::Point => x.rank as usize,
        Side::Line => n + x.rank as usize,
    };
    let mut dist = vec![UNSEEN; 2 * n];
    let mut queue = vec![u];
    dist[index(u)] = 0;
    let mut head = 0;
    while head < queue.len() {
        let x = queue[head];
        head += 1;
        let dx = dist[index(x)];
        let side = x.side.other();
        let mut found = false;
        spec.for_each_neighbor_rank(x, |rank| {
            let w = VertexId { side, rank };
            let iw = index(w);
            if dist[iw] == UNSEEN {
                dist[iw] = dx + 1;
                queue.push(w);
                found |= w == v;
            }
        });
        if found {
            return Distance::Finite(dx + 1);
        }
    }
    Distance::Infinite
}

/// Distance from the zero line to the line with coordinates `delta`.
pub fn line_difference_profile(spec: &GraphSpec, delta: &[crate::gf::FieldElement]) -> Distance {
    let zero = VertexId::line(0);
    distance_between(spec, zero, spec.vertex(Side::Line, delta))
}

/// Wall-clock timer. `wasm32-unknown-unknown` has no clock, so it reads zero there.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Stopwatch {
    #[cfg(not(all(target_arch = "wasm32", target_os = "unknown")))]
    start: std::time::Instant,
}

impl Stopwatch {
    pub(crate) fn start() -> Self {
        Stopwatch {
            #[cfg(not(all(target_arch = "wasm32", target_os = "unknown")))]
            start: std::time::Instant::now(),
        }
    }

    pub(crate) fn elapsed_ms(&self) -> u64 {
        #[cfg(not(all(target_arch = "wasm32", target_os = "unknown")))]
        return self.start.elapsed().as_millis() as u64;
        #[cfg(all(target_arch = "wasm32", target_os = "unknown"))]
        0
    }
}

//! Slow reference implementations shared by the integration tests. They use
//! only the field's modulus and element ranks, never the library's tables.

#![allow(dead_code)]

use std::collections::VecDeque;

use jwg::graph::{GraphSpec, Side, VertexId};
use jwg::FieldSpec;

/// Polynomial-basis arithmetic on ranks.
#[derive(Clone, Debug)]
pub struct NaiveField {
    pub p: u32,
    pub e: u32,
    pub q: u32,
    modulus: Vec<u32>,
}

impl NaiveField {
    pub fn of(field: &FieldSpec) -> Self {
        NaiveField {
            p: field.p(),
            e: field.e(),
            q: field.q(),
            modulus: field.modulus().to_vec(),
        }
    }

    fn digits(&self, a: u32) -> Vec<u32> {
        let mut d = Vec::with_capacity(self.e as usize);
        let mut a = a;
        for _ in 0..self.e {
            d.push(a % self.p);
            a /= self.p;
        }
        d
    }

    fn rank(&self, d: &[u32]) -> u32 {
        d.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        let (x, y) = (self.digits(a), self.digits(b));
        let s: Vec<u32> = x.iter().zip(&y).map(|(u, v)| (u + v) % self.p).collect();
        self.rank(&s)
    }

    pub fn neg(&self, a: u32) -> u32 {
        let s: Vec<u32> = self.digits(a).iter().map(|&u| (self.p - u) % self.p).collect();
        self.rank(&s)
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        let (x, y) = (self.digits(a), self.digits(b));
        let e = self.e as usize;
        let mut prod = vec![0u64; 2 * e];
        for (k, &u) in x.iter().enumerate() {
            for (l, &v) in y.iter().enumerate() {
                prod[k + l] = (prod[k + l] + u as u64 * v as u64) % self.p as u64;
            }
        }
        // Reduce by the monic modulus from the top degree down.
        for deg in (e..2 * e).rev() {
            let c = prod[deg];
            if c == 0 {
                continue;
            }
            for (k, &mk) in self.modulus.iter().enumerate().take(e) {
                let idx = deg - e + k;
                let sub = c * mk as u64 % self.p as u64;
                prod[idx] = (prod[idx] + self.p as u64 - sub) % self.p as u64;
            }
            prod[deg] = 0;
        }
        let d: Vec<u32> = prod[..e].iter().map(|&c| c as u32).collect();
        self.rank(&d)
    }

    pub fn pow(&self, a: u32, k: u32) -> u32 {
        (0..k).fold(1, |acc, _| self.mul(acc, a))
    }

    pub fn from_int(&self, n: i64) -> u32 {
        (n.rem_euclid(self.p as i64)) as u32
    }

    /// `σ_k` as a sum over `k`-subsets; zero outside `0..=n`.
    pub fn sigma(&self, k: i64, xs: &[u32]) -> u32 {
        let n = xs.len();
        if k < 0 || k as usize > n {
            return 0;
        }
        let k = k as usize;
        let mut total = 0;
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize == k {
                let mut prod = 1;
                for (h, &x) in xs.iter().enumerate() {
                    if mask >> h & 1 == 1 {
                        prod = self.mul(prod, x);
                    }
                }
                total = self.add(total, prod);
            }
        }
        total
    }

    pub fn sigma_pair(&self, a: i64, b: i64, xs: &[u32]) -> u32 {
        let left = self.mul(self.sigma(a, xs), self.sigma(b + 1, xs));
        let right = self.mul(self.sigma(b, xs), self.sigma(a + 1, xs));
        self.sub(left, right)
    }

    /// Cofactor expansion along the first row.
    pub fn det(&self, m: &[Vec<u32>]) -> u32 {
        let n = m.len();
        if n == 0 {
            return 1;
        }
        if n == 1 {
            return m[0][0];
        }
        let mut total = 0;
        for c in 0..n {
            if m[0][c] == 0 {
                continue;
            }
            let minor: Vec<Vec<u32>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|&(k, _)| k != c).map(|(_, &v)| v).collect())
                .collect();
            let term = self.mul(m[0][c], self.det(&minor));
            total = if c % 2 == 0 { self.add(total, term) } else { self.sub(total, term) };
        }
        total
    }

    pub fn vandermonde_product(&self, xs: &[u32]) -> u32 {
        let mut prod = 1;
        for l in 0..xs.len() {
            for k in 0..l {
                prod = self.mul(prod, self.sub(xs[l], xs[k]));
            }
        }
        prod
    }
}

/// `{0, ..., m+2} \ {i, j}`.
pub fn jumped_exponents(m: usize, i: usize, j: usize) -> Vec<u32> {
    (0..=m as u32 + 2).filter(|&e| e != i as u32 && e != j as u32).collect()
}

/// Base-q digits, first coordinate least significant.
pub fn coords(q: u32, n: usize, rank: u64) -> Vec<u32> {
    let mut r = rank;
    (0..n)
        .map(|_| {
            let c = (r % q as u64) as u32;
            r /= q as u64;
            c
        })
        .collect()
}

/// Incidence from the defining equations `l_k + p_k = l_1 p_1^{e_k}`.
pub fn naive_incident(f: &NaiveField, exps: &[u32], point: &[u32], line: &[u32]) -> bool {
    (1..exps.len()).all(|k| f.add(line[k], point[k]) == f.mul(line[0], f.pow(point[0], exps[k])))
}

/// Neighbors by scanning every vertex of the other side.
pub fn naive_neighbors(f: &NaiveField, exps: &[u32], v: VertexId) -> Vec<VertexId> {
    let n = exps.len();
    let size = (f.q as u64).pow(n as u32);
    let mine = coords(f.q, n, v.rank);
    (0..size)
        .filter(|&r| {
            let other = coords(f.q, n, r);
            match v.side {
                Side::Point => naive_incident(f, exps, &mine, &other),
                Side::Line => naive_incident(f, exps, &other, &mine),
            }
        })
        .map(|r| VertexId { side: v.side.other(), rank: r })
        .collect()
}

/// Dense index: points first, then lines.
pub fn index(spec: &GraphSpec, v: VertexId) -> usize {
    match v.side {
        Side::Point => v.rank as usize,
        Side::Line => (spec.side_size() + v.rank) as usize,
    }
}

pub fn adjacency_lists(spec: &GraphSpec) -> Vec<Vec<usize>> {
    let n = spec.side_size();
    let mut adj = vec![Vec::new(); 2 * n as usize];
    for side in [Side::Point, Side::Line] {
        for r in 0..n {
            let v = VertexId { side, rank: r };
            adj[index(spec, v)] = spec.neighbors(v).into_iter().map(|w| index(spec, w)).collect();
        }
    }
    adj
}

/// Plain queue BFS; `u32::MAX` marks unreachable vertices.
pub fn naive_bfs(adj: &[Vec<usize>], root: usize) -> Vec<u32> {
    let mut dist = vec![u32::MAX; adj.len()];
    let mut queue = VecDeque::from([root]);
    dist[root] = 0;
    while let Some(u) = queue.pop_front() {
        for &w in &adj[u] {
            if dist[w] == u32::MAX {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// All-pairs diameter, `None` when disconnected.
pub fn naive_diameter(adj: &[Vec<usize>]) -> Option<u32> {
    let mut best = 0;
    for root in 0..adj.len() {
        let d = naive_bfs(adj, root);
        if d.contains(&u32::MAX) {
            return None;
        }
        best = best.max(*d.iter().max().unwrap());
    }
    Some(best)
}

pub fn spec(q: u32, m: usize, i: usize, j: usize) -> GraphSpec {
    GraphSpec::jumped(&FieldSpec::of_order(q).unwrap(), m, i, j).unwrap()
}

/// The cells `q in {2,3,4,5,7,8,9}`, `m in 1..=3`, all `(i,j)`, with at most
/// 10^5 vertices.
pub fn base_grid() -> Vec<(u32, usize, usize, usize)> {
    let mut out = Vec::new();
    for q in [2u32, 3, 4, 5, 7, 8, 9] {
        for m in 1..=3usize {
            if 2 * (q as u64).pow(m as u32 + 1) > 100_000 {
                continue;
            }
            for i in 1..=m + 1 {
                for j in i + 1..=m + 2 {
                    out.push((q, m, i, j));
                }
            }
        }
    }
    out
}

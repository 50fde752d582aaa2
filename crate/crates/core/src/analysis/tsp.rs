use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::related::RelatedSet;
use crate::error::{Error, Result};
use crate::group::{Element, Group};

pub const DEFAULT_EXACT_CAP: usize = 15;
/// Hard ceiling on the subset dynamic program, whatever the configured cap.
pub const MAX_EXACT_CAP: usize = 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TourKind {
    Exact,
    HeuristicUpper,
    MstLower,
}

/// Closed visiting order over indices of a set, starting at index 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tour {
    pub order: Vec<usize>,
    pub length: u64,
    pub kind: TourKind,
}

/// A sequence of group elements with consecutive ones at distance 1 and
/// equal endpoints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedPath {
    pub vertices: Vec<Element>,
}

impl ClosedPath {
    pub fn length(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn validate(&self, group: &Group) -> Result<()> {
        let (Some(first), Some(last)) = (self.vertices.first(), self.vertices.last()) else {
            return Err(Error::Internal("closed path without vertices".into()));
        };
        if first != last {
            return Err(Error::Internal("closed path does not return to its start".into()));
        }
        if let Some(i) = self.vertices.windows(2).position(|w| group.distance(&w[0], &w[1]) != 1) {
            return Err(Error::Internal(format!("closed path makes a non-unit step at {i}")));
        }
        Ok(())
    }

    /// Whether every element of `set` is visited.
    pub fn visits_all(&self, set: &[Element]) -> bool {
        let seen: std::collections::HashSet<&Element> = self.vertices.iter().collect();
        set.iter().all(|x| seen.contains(x))
    }

    /// Number of indices `i` (endpoints both counted) with `beta(i)` in `set`.
    pub fn visit_count(&self, set: &[Element]) -> usize {
        let set: std::collections::HashSet<&Element> = set.iter().collect();
        self.vertices.iter().filter(|v| set.contains(v)).count()
    }
}

pub fn distance_matrix(group: &Group, elements: &[Element]) -> Vec<Vec<u64>> {
    let n = elements.len();
    let mut d = vec![vec![0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let x = group.distance(&elements[i], &elements[j]);
            d[i][j] = x;
            d[j][i] = x;
        }
    }
    d
}

fn tour_length(d: &[Vec<u64>], order: &[usize]) -> u64 {
    if order.len() < 2 {
        return 0;
    }
    order
        .iter()
        .zip(order.iter().cycle().skip(1))
        .map(|(&a, &b)| d[a][b])
        .sum()
}

/// Held-Karp over a symmetric matrix. Among optimal tours from index 0 the
/// lexicographically least visiting order is returned.
pub fn tsp_exact_matrix(d: &[Vec<u64>], cap: usize) -> Result<Tour> {
    let n = d.len();
    if n > cap.min(MAX_EXACT_CAP) {
        let upper = heuristic_matrix(d, 0).length;
        return Err(Error::ResourceLimit {
            what: format!(
                "exact tour over {n} points exceeds the cap of {}; use the heuristic",
                cap.min(MAX_EXACT_CAP)
            ),
            best_upper: Some(upper),
        });
    }
    if n <= 1 {
        return Ok(Tour {
            order: (0..n).collect(),
            length: 0,
            kind: TourKind::Exact,
        });
    }
    let full = (1usize << (n - 1)) - 1;
    let bit = |v: usize| 1usize << (v - 1);
    // rest[mask * n + j]: cheapest completion from j once {0} + mask is visited
    let mut rest = vec![u64::MAX; (full + 1) * n];
    for mask in (0..=full).rev() {
        for j in 0..n {
            let inside = if j == 0 { mask == 0 } else { mask & bit(j) != 0 };
            if !inside {
                continue;
            }
            let best = if mask == full {
                d[j][0]
            } else {
                (1..n)
                    .filter(|&v| mask & bit(v) == 0)
                    .map(|v| d[j][v] + rest[(mask | bit(v)) * n + v])
                    .min()
                    .unwrap()
            };
            rest[mask * n + j] = best;
        }
    }
    let length = rest[0];
    let mut order = vec![0];
    let (mut mask, mut cur) = (0usize, 0usize);
    while mask != full {
        let target = rest[mask * n + cur];
        let v = (1..n)
            .find(|&v| mask & bit(v) == 0 && d[cur][v] + rest[(mask | bit(v)) * n + v] == target)
            .ok_or_else(|| Error::Internal("tour reconstruction lost the optimum".into()))?;
        order.push(v);
        mask |= bit(v);
        cur = v;
    }
    Ok(Tour {
        order,
        length,
        kind: TourKind::Exact,
    })
}

pub fn tsp_exact(set: &RelatedSet, cap: usize) -> Result<Tour> {
    tsp_exact_matrix(&distance_matrix(set.group(), set.elements()), cap)
}

fn nearest_neighbour(d: &[Vec<u64>], start: usize) -> Vec<usize> {
    let n = d.len();
    let mut used = vec![false; n];
    let mut order = vec![start];
    used[start] = true;
    while order.len() < n {
        let cur = *order.last().unwrap();
        let next = (0..n).filter(|&v| !used[v]).min_by_key(|&v| (d[cur][v], v)).unwrap();
        used[next] = true;
        order.push(next);
    }
    order
}

fn two_opt(d: &[Vec<u64>], order: &mut [usize]) {
    let n = order.len();
    let mut improved = true;
    while improved {
        improved = false;
        for i in 0..n.saturating_sub(2) {
            for j in i + 2..n {
                let (a, b) = (order[i], order[i + 1]);
                let (c, e) = (order[j], order[(j + 1) % n]);
                if a == e {
                    continue;
                }
                if d[a][c] + d[b][e] < d[a][b] + d[c][e] {
                    order[i + 1..=j].reverse();
                    improved = true;
                }
            }
        }
    }
}

/// Nearest neighbour from a few seeded starts, each polished by 2-opt.
pub fn heuristic_matrix(d: &[Vec<u64>], seed: u64) -> Tour {
    let n = d.len();
    if n <= 1 {
        return Tour {
            order: (0..n).collect(),
            length: 0,
            kind: TourKind::HeuristicUpper,
        };
    }
    let mut starts: Vec<usize> = (1..n).collect();
    starts.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    starts.truncate(3);
    starts.insert(0, 0);
    let mut best: Option<Tour> = None;
    for s in starts {
        let mut order = nearest_neighbour(d, s);
        two_opt(d, &mut order);
        let zero = order.iter().position(|&v| v == 0).unwrap();
        order.rotate_left(zero);
        let length = tour_length(d, &order);
        if best.as_ref().is_none_or(|b| (length, &order) < (b.length, &b.order)) {
            best = Some(Tour {
                order,
                length,
                kind: TourKind::HeuristicUpper,
            });
        }
    }
    best.unwrap()
}

pub fn tsp_heuristic(set: &RelatedSet, seed: u64) -> Tour {
    heuristic_matrix(&distance_matrix(set.group(), set.elements()), seed)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MstBounds {
    /// Weight `W` of a minimum spanning tree; `W <= L(S) <= 2W`.
    pub weight: u64,
    pub edges: Vec<(usize, usize)>,
    /// Doubled-tree walk of length exactly `2W` through every point.
    pub witness: ClosedPath,
}

impl MstBounds {
    pub fn lower(&self) -> u64 {
        self.weight
    }

    pub fn upper(&self) -> u64 {
        2 * self.weight
    }
}

pub fn mst_matrix(d: &[Vec<u64>]) -> (u64, Vec<(usize, usize)>) {
    let n = d.len();
    if n == 0 {
        return (0, Vec::new());
    }
    let mut in_tree = vec![false; n];
    let mut best = vec![(u64::MAX, 0usize); n];
    best[0] = (0, 0);
    let mut weight = 0;
    let mut edges = Vec::new();
    for _ in 0..n {
        let v = (0..n).filter(|&v| !in_tree[v]).min_by_key(|&v| (best[v].0, v)).unwrap();
        in_tree[v] = true;
        weight += best[v].0;
        if v != 0 {
            edges.push((best[v].1, v));
        }
        for u in 0..n {
            if !in_tree[u] && d[v][u] < best[u].0 {
                best[u] = (d[v][u], v);
            }
        }
    }
    (weight, edges)
}

pub fn mst_bounds(set: &RelatedSet) -> MstBounds {
    let elements = set.elements();
    let group = set.group();
    let d = distance_matrix(group, elements);
    let (weight, edges) = mst_matrix(&d);
    let mut adj = vec![Vec::new(); elements.len()];
    for &(a, b) in &edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    for a in &mut adj {
        a.sort_unstable();
    }
    let mut walk = Vec::new();
    if !elements.is_empty() {
        // iterative depth-first walk, recording each return
        let mut stack = vec![(0usize, usize::MAX, 0usize)];
        walk.push(0);
        while let Some((v, parent, k)) = stack.pop() {
            let kids: Vec<usize> = adj[v].iter().copied().filter(|&u| u != parent).collect();
            if k < kids.len() {
                stack.push((v, parent, k + 1));
                stack.push((kids[k], v, 0));
                walk.push(kids[k]);
            } else if parent != usize::MAX {
                walk.push(parent);
            }
        }
    }
    let mut vertices = vec![];
    for w in walk.windows(2) {
        let seg = group.geodesic_between(&elements[w[0]], &elements[w[1]]);
        if vertices.is_empty() {
            vertices.extend(seg);
        } else {
            vertices.extend(seg.into_iter().skip(1));
        }
    }
    if vertices.is_empty() {
        vertices.extend(elements.first().cloned());
    }
    MstBounds {
        weight,
        edges,
        witness: ClosedPath { vertices },
    }
}

/// `inf (l(beta) - N(beta; S))` over closed paths through all of `S`, with
/// visits counted with multiplicity and both endpoints counted.
///
/// Every step of such a path costs 1 and earns 1 exactly when it lands in
/// `S`, so the quantity is `-1` plus the least number of steps landing
/// outside `S`. Between consecutive landings in `S` at `x` and `y` that is at
/// least `d(x, y) - 1`, attained along a geodesic; the optimum is therefore a
/// shortest tour under the path closure of `d - 1` on `S`.
pub fn l_prime_matrix(d: &[Vec<u64>], cap: usize) -> Result<i64> {
    let n = d.len();
    if n == 0 {
        return Err(Error::MalformedInput("empty set".into()));
    }
    let mut w: Vec<Vec<u64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 0 } else { d[i][j] - 1 }).collect())
        .collect();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = w[i][k] + w[k][j];
                if via < w[i][j] {
                    w[i][j] = via;
                }
            }
        }
    }
    Ok(tsp_exact_matrix(&w, cap)?.length as i64 - 1)
}

pub fn l_prime(set: &RelatedSet, cap: usize) -> Result<i64> {
    l_prime_matrix(&distance_matrix(set.group(), set.elements()), cap)
}

use std::collections::HashMap;
use std::fmt::{self, Display};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finite rooted tree with an ordered child list per vertex. Vertex 0 is
/// the origin.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaneTree {
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    level: Vec<usize>,
}

impl PlaneTree {
    pub fn single() -> Self {
        PlaneTree {
            parent: vec![None],
            children: vec![Vec::new()],
            level: vec![0],
        }
    }

    /// Appends a new child to the right of `v`'s existing children.
    pub fn add_child(&mut self, v: usize) -> usize {
        let id = self.parent.len();
        self.parent.push(Some(v));
        self.children.push(Vec::new());
        self.level.push(self.level[v] + 1);
        self.children[v].push(id);
        id
    }

    /// Origin with three children, every other internal vertex with two,
    /// leaves at level `depth`.
    pub fn complete_ternary(depth: usize) -> Self {
        let mut t = Self::single();
        let mut frontier = vec![0];
        for d in 0..depth {
            let fan = if d == 0 { 3 } else { 2 };
            frontier = frontier
                .into_iter()
                .flat_map(|v| (0..fan).map(|_| t.add_child(v)).collect::<Vec<_>>())
                .collect();
        }
        t
    }

    /// A path on `vertices` vertices hanging from the origin.
    pub fn ray(vertices: usize) -> Self {
        let mut t = Self::single();
        let mut last = 0;
        for _ in 1..vertices.max(1) {
            last = t.add_child(last);
        }
        t
    }

    /// Random ternary tree grown by expanding uniformly chosen leaves until
    /// at least `vertices` vertices exist.
    pub fn random_ternary<R: Rng + ?Sized>(vertices: usize, rng: &mut R) -> Self {
        let mut t = Self::single();
        if vertices <= 1 {
            return t;
        }
        let mut leaves: Vec<usize> = (0..3).map(|_| t.add_child(0)).collect();
        while t.len() < vertices {
            let v = leaves.swap_remove(rng.gen_range(0..leaves.len()));
            leaves.push(t.add_child(v));
            leaves.push(t.add_child(v));
        }
        t
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    pub fn level(&self, v: usize) -> usize {
        self.level[v]
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.children[v].is_empty()
    }

    /// Every vertex has valence 1 or 3 (or the tree is a single vertex).
    pub fn is_ternary(&self) -> bool {
        if self.len() == 1 {
            return true;
        }
        (0..self.len()).all(|v| {
            let valence = self.children[v].len() + usize::from(self.parent[v].is_some());
            valence == 1 || valence == 3
        })
    }

    /// Vertices of each level, left to right in the planar order.
    pub fn levels(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        let mut stack = vec![0];
        while let Some(v) = stack.pop() {
            let l = self.level[v];
            if out.len() <= l {
                out.resize(l + 1, Vec::new());
            }
            out[l].push(v);
            stack.extend(self.children[v].iter().rev());
        }
        out
    }

    /// The unique simple path from `u` to `v`, endpoints included.
    pub fn path(&self, u: usize, v: usize) -> Vec<usize> {
        let (mut a, mut b) = (u, v);
        let mut up = vec![a];
        let mut down = vec![b];
        while self.level[a] > self.level[b] {
            a = self.parent[a].expect("non-root has a parent");
            up.push(a);
        }
        while self.level[b] > self.level[a] {
            b = self.parent[b].expect("non-root has a parent");
            down.push(b);
        }
        while a != b {
            a = self.parent[a].expect("non-root has a parent");
            b = self.parent[b].expect("non-root has a parent");
            up.push(a);
            down.push(b);
        }
        down.pop();
        up.extend(down.into_iter().rev());
        up
    }

    /// Parses lines `id parent level`, origin parent `-`. Children keep the
    /// order in which they appear.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || Error::MalformedInput(format!("tree line {}: {line:?}", n + 1));
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(bad());
            }
            let id: String = f[0].to_string();
            let parent = (f[1] != "-").then(|| f[1].to_string());
            let level: usize = f[2].parse().map_err(|_| bad())?;
            rows.push((id, parent, level));
        }
        let roots: Vec<_> = rows.iter().filter(|r| r.1.is_none()).collect();
        if roots.len() != 1 {
            return Err(Error::MalformedInput("tree needs exactly one origin".into()));
        }
        let mut index = HashMap::new();
        let mut t = Self::single();
        index.insert(roots[0].0.clone(), 0usize);
        if roots[0].2 != 0 {
            return Err(Error::MalformedInput("origin must have level 0".into()));
        }
        let mut pending: Vec<_> = rows.iter().filter(|r| r.1.is_some()).collect();
        while !pending.is_empty() {
            let before = pending.len();
            let mut rest = Vec::new();
            for r in pending {
                match index.get(r.1.as_ref().unwrap()) {
                    Some(&p) => {
                        if index.contains_key(&r.0) {
                            return Err(Error::MalformedInput(format!("duplicate vertex {}", r.0)));
                        }
                        let id = t.add_child(p);
                        if t.level[id] != r.2 {
                            return Err(Error::MalformedInput(format!(
                                "vertex {} has level {} but its parent is at level {}",
                                r.0, r.2, t.level[p]
                            )));
                        }
                        index.insert(r.0.clone(), id);
                    }
                    None => rest.push(r),
                }
            }
            if rest.len() == before {
                return Err(Error::MalformedInput(
                    "tree has vertices not connected to the origin".into(),
                ));
            }
            pending = rest;
        }
        Ok(t)
    }
}

impl Display for PlaneTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in 0..self.len() {
            match self.parent[v] {
                Some(p) => writeln!(f, "{v} {p} {}", self.level[v])?,
                None => writeln!(f, "{v} - 0")?,
            }
        }
        Ok(())
    }
}

/// Every simple path, once per unordered pair of distinct endpoints.
pub fn enumerate_simple_paths(tree: &PlaneTree) -> impl Iterator<Item = Vec<usize>> + '_ {
    let n = tree.len();
    (0..n).flat_map(move |u| (u + 1..n).map(move |v| tree.path(u, v)))
}

/// A plane tree with a token on each edge. The edge into vertex `v` is
/// stored at index `v`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabeledTree<T> {
    pub tree: PlaneTree,
    pub labels: Vec<Option<T>>,
    pub candidates: Vec<Vec<T>>,
    pub inadmissible: Vec<Option<T>>,
}

impl<T: Clone> LabeledTree<T> {
    pub fn unlabeled(tree: PlaneTree) -> Self {
        let n = tree.len();
        LabeledTree {
            tree,
            labels: vec![None; n],
            candidates: vec![Vec::new(); n],
            inadmissible: vec![None; n],
        }
    }

    /// Tokens along a vertex path.
    pub fn path_labels(&self, path: &[usize]) -> Vec<T> {
        path.windows(2)
            .map(|w| {
                let child = if self.tree.parent(w[1]) == Some(w[0]) {
                    w[1]
                } else {
                    w[0]
                };
                self.labels[child].clone().expect("every edge is labeled")
            })
            .collect()
    }
}

impl<T: Display> LabeledTree<T> {
    /// `edge_from edge_to token`, one edge per line.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for v in 1..self.tree.len() {
            if let (Some(p), Some(l)) = (self.tree.parent(v), &self.labels[v]) {
                out.push_str(&format!("{p}\t{v}\t{l}\n"));
            }
        }
        out
    }
}

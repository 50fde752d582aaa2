use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::forest::{ForestMode, TreeForest};
use crate::analysis::{distance_matrix, tsp_exact_matrix, RelatedSet, DEFAULT_EXACT_CAP};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    /// `L(S)` when the set was small enough to solve exactly.
    pub exact_length: Option<u64>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

struct Checker(Vec<Check>);

impl Checker {
    fn add(&mut self, name: &str, problems: Vec<String>) {
        self.0.push(Check {
            name: name.into(),
            passed: problems.is_empty(),
            detail: match problems.len() {
                0 => "ok".into(),
                k => format!("{k} problems, first: {}", problems[0]),
            },
        });
    }
}

/// Re-checks every structural invariant of a forest against the set it was
/// built from, plus the census and (for small sets) the bound against the
/// exact tour length.
pub fn verify_forest(forest: &TreeForest, set: &RelatedSet) -> VerificationReport {
    let g = set.group();
    let els = set.elements();
    let n = set.len();
    let mut c = Checker(Vec::new());

    let same_set = forest.elements.len() == n && forest.elements.iter().zip(els).all(|(t, e)| *t == g.format(e));
    c.add(
        "set",
        if same_set {
            vec![]
        } else {
            vec!["forest lists different elements".into()]
        },
    );
    if !same_set {
        return VerificationReport {
            checks: c.0,
            exact_length: None,
        };
    }
    let in_range = forest.trees.iter().all(|t| {
        let len = t.vertices.len();
        t.vertices.iter().all(|v| {
            v.members.iter().all(|&m| m < n)
                && v.parent.is_none_or(|p| p < len)
                && v.children.iter().all(|&c| c < len)
                && v.witness.is_none_or(|(x, y)| x < n && y < n)
        })
    });
    if !in_range {
        c.add("indices", vec!["vertex, member or witness index out of range".into()]);
        return VerificationReport {
            checks: c.0,
            exact_length: None,
        };
    }

    let mut trees_of = vec![Vec::<(usize, bool)>::new(); n];
    for (ti, t) in forest.trees.iter().enumerate() {
        for (vi, v) in t.vertices.iter().enumerate() {
            for &m in &v.members {
                trees_of[m].push((ti, t.is_end(vi)));
            }
        }
    }
    c.add(
        "coverage",
        (0..n)
            .filter(|&i| trees_of[i].is_empty())
            .map(|i| format!("{} uncovered", forest.elements[i]))
            .collect(),
    );

    let mut sizes = Vec::new();
    let mut shape = Vec::new();
    let mut order = Vec::new();
    let mut witness = Vec::new();
    let xi_inv = g.inv(set.xi());
    for (ti, t) in forest.trees.iter().enumerate() {
        for (vi, v) in t.vertices.iter().enumerate() {
            let end = t.is_end(vi);
            let k = v.members.len();
            if k == 0 || k > 3 || (k < 3 && !end) {
                sizes.push(format!(
                    "tree {ti} vertex {vi}: {} members, end = {end}",
                    v.members.len()
                ));
            }
            let want = if vi == 0 { 3 } else { 2 };
            if k == 3 && v.children.len() != want {
                shape.push(format!("tree {ti} vertex {vi}: {} children", v.children.len()));
            }
            match (v.parent, v.witness) {
                (None, _) if vi == 0 => {}
                (Some(p), Some((x, y))) if p < vi => {
                    if t.vertices[p].level + 1 != v.level || !t.vertices[p].children.contains(&vi) {
                        order.push(format!("tree {ti} vertex {vi}: inconsistent parent link"));
                    }
                    let ok = t.vertices[p].members.contains(&x)
                        && v.members.contains(&y)
                        && (g.mul(&els[x], set.xi()) == els[y] || g.mul(&els[x], &xi_inv) == els[y]);
                    if !ok {
                        witness.push(format!("tree {ti} vertex {vi}: witness is not a xi-neighbour pair"));
                    }
                }
                _ => order.push(format!("tree {ti} vertex {vi}: parent missing or built later")),
            }
            if vi > 0 && t.vertices[vi - 1].level > v.level {
                order.push(format!("tree {ti} vertex {vi}: level decreases in build order"));
            }
        }
    }
    c.add("vertex-sizes", sizes);
    c.add("ternary-shape", shape);
    c.add("build-order", order);
    c.add("xi-witnesses", witness);

    let mut within = Vec::new();
    let mut across = Vec::new();
    for (i, occ) in trees_of.iter().enumerate() {
        let mut ts: Vec<usize> = occ.iter().map(|o| o.0).collect();
        let before = ts.len();
        ts.sort_unstable();
        ts.dedup();
        if ts.len() != before {
            within.push(format!("{} appears twice in one tree", forest.elements[i]));
        }
        match forest.mode {
            ForestMode::P => {
                if ts.len() > 2 || (ts.len() == 2 && occ.iter().any(|o| !o.1)) {
                    across.push(format!("{} shared by {} trees", forest.elements[i], ts.len()));
                }
            }
            ForestMode::P10 => {
                if ts.len() > 1 {
                    across.push(format!("{} lies in {} trees", forest.elements[i], ts.len()));
                }
            }
        }
    }
    c.add("disjoint-within-trees", within);
    c.add("cross-tree-sharing", across);

    let d = distance_matrix(g, els);
    let t = forest.pieces.threshold;
    let m = forest.pieces.order.len();
    let over = |j: usize| {
        let (a, b) = (forest.pieces.order[j], forest.pieces.order[(j + 1) % m]);
        d[a][b] as u128 * *t.denom() as u128 > *t.numer() as u128
    };
    let mut cuts = Vec::new();
    if m == n {
        let scan: Vec<usize> = (0..m).filter(|&j| m > 1 && over(j)).collect();
        if scan != forest.pieces.cuts {
            cuts.push(format!("recorded cuts {:?}, rescan {:?}", forest.pieces.cuts, scan));
        }
    } else {
        cuts.push("piece order is not a permutation of the set".into());
    }
    c.add("piece-cuts", cuts);

    if g.is_free() && forest.mode == ForestMode::P {
        let mut far = Vec::new();
        for (ti, t) in forest.trees.iter().enumerate() {
            for (a, va) in t.vertices.iter().enumerate() {
                for vb in &t.vertices[a + 1..] {
                    for &x in &va.members {
                        for &y in &vb.members {
                            // |W| for x = y W, measured on the reduced word
                            if x != y && d[x][y] < forest.r {
                                far.push(format!("tree {ti}: d = {} < r between vertices", d[x][y]));
                            }
                        }
                    }
                }
            }
        }
        c.add("vertex-distance", far);
    }

    let census = &forest.census;
    let mut census_problems = Vec::new();
    if !forest.advisory && !census.holds(forest.mode) {
        census_problems.push(format!("{census:?}"));
    }
    c.add("census", census_problems);

    let exact = (n <= DEFAULT_EXACT_CAP)
        .then(|| tsp_exact_matrix(&d, DEFAULT_EXACT_CAP).ok())
        .flatten();
    if let Some(t) = &exact {
        let ok = forest.certified_bound <= Ratio::from_integer(t.length);
        c.add(
            "bound-below-exact",
            if ok {
                vec![]
            } else {
                vec![format!("bound {} > L = {}", forest.certified_bound, t.length)]
            },
        );
    }
    VerificationReport {
        checks: c.0,
        exact_length: exact.map(|t| t.length),
    }
}

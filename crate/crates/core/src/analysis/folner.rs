use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::tsp::ClosedPath;
use crate::error::{Error, Result};
use crate::group::{Element, Group};

/// Elements `x` of `f` with neither `x xi` nor `x xi^-1` in `f`.
pub fn xi_boundary(group: &Group, f: &[Element], xi: &Element) -> Vec<Element> {
    let set: HashSet<&Element> = f.iter().collect();
    let xi_inv = group.inv(xi);
    f.iter()
        .filter(|x| !set.contains(&group.mul(x, xi)) && !set.contains(&group.mul(x, &xi_inv)))
        .cloned()
        .collect()
}

/// `F` minus its `K`-interior `{x in F : xK in F}`.
pub fn k_boundary(group: &Group, f: &[Element], k: &[Element]) -> Vec<Element> {
    let set: HashSet<&Element> = f.iter().collect();
    f.iter()
        .filter(|x| k.iter().any(|s| !set.contains(&group.mul(x, s))))
        .cloned()
        .collect()
}

/// Closed walk around a breadth-first spanning tree of the subgraph of the
/// Cayley graph induced on `f`; its length is `2(|f| - 1)`.
pub fn spanning_tree_traversal(group: &Group, f: &[Element]) -> Result<ClosedPath> {
    let Some(root) = f.first() else {
        return Err(Error::Precondition("empty set has no traversal".into()));
    };
    let index: HashMap<&Element, usize> = f.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let gens = group.generators();
    let mut children = vec![Vec::new(); f.len()];
    let mut seen = vec![false; f.len()];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    let mut reached = 1;
    while let Some(v) = queue.pop_front() {
        for s in &gens {
            if let Some(&u) = index.get(&group.mul(&f[v], s)) {
                if !seen[u] {
                    seen[u] = true;
                    reached += 1;
                    children[v].push(u);
                    queue.push_back(u);
                }
            }
        }
    }
    if reached < index.len() {
        return Err(Error::Precondition(format!(
            "set is disconnected in the Cayley graph: {reached} of {} reachable",
            index.len()
        )));
    }
    let mut vertices = vec![root.clone()];
    let mut stack = vec![(0usize, 0usize)];
    while let Some((v, k)) = stack.pop() {
        if k < children[v].len() {
            stack.push((v, k + 1));
            let c = children[v][k];
            vertices.push(f[c].clone());
            stack.push((c, 0));
        } else if let Some(&(p, _)) = stack.last() {
            vertices.push(f[p].clone());
        }
    }
    Ok(ClosedPath { vertices })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FolnerReport {
    pub group: String,
    pub xi: String,
    pub f_size: usize,
    pub boundary_size: usize,
    pub interior_size: usize,
    /// Length of the emitted closed path; an upper bound for `L(F \ dF)`.
    pub traversal_length: usize,
    pub visits_interior: bool,
    pub path_valid: bool,
    /// `traversal_length <= 2|F|`.
    pub within_twice_f: bool,
    /// `2|F| <= 2.5 |F \ dF|`.
    pub within_five_halves: bool,
    /// `F \ dF` is empty.
    pub degenerate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub traversal: Option<Vec<String>>,
}

impl FolnerReport {
    pub fn chain_holds(&self) -> bool {
        self.path_valid && self.visits_interior && self.within_twice_f && self.within_five_halves
    }
}

/// Walks a spanning tree of `f` and reports the length chain
/// `L(F \ dF) <= 2|F| <= 2.5 |F \ dF|` with `dF` the xi-boundary.
pub fn folner_traversal_demo(group: &Group, f: &[Element], xi: &Element, keep_path: bool) -> Result<FolnerReport> {
    if *xi == group.identity() {
        return Err(Error::DegenerateXi);
    }
    let mut f = f.to_vec();
    f.sort();
    f.dedup();
    let boundary: HashSet<Element> = xi_boundary(group, &f, xi).into_iter().collect();
    let interior: Vec<Element> = f.iter().filter(|x| !boundary.contains(*x)).cloned().collect();
    let path = spanning_tree_traversal(group, &f)?;
    let n = f.len();
    let len = path.length();
    Ok(FolnerReport {
        group: group.descriptor().to_string(),
        xi: group.format(xi),
        f_size: n,
        boundary_size: boundary.len(),
        interior_size: interior.len(),
        traversal_length: len,
        visits_interior: path.visits_all(&interior),
        path_valid: path.validate(group).is_ok(),
        within_twice_f: len <= 2 * n,
        within_five_halves: 4 * n <= 5 * interior.len(),
        degenerate: interior.is_empty(),
        traversal: keep_path.then(|| path.vertices.iter().map(|v| group.format(v)).collect()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::box_points;

    fn z(n: u32) -> Group {
        Group::parse(&format!("abelian:{n}")).unwrap()
    }

    #[test]
    fn ten_by_ten() {
        let g = z(2);
        let f = box_points(&[10, 10]);
        let r = folner_traversal_demo(&g, &f, &Element::Abelian(vec![3, 0]), false).unwrap();
        assert_eq!(r.boundary_size, 0);
        assert_eq!(r.traversal_length, 198);
        assert!(r.chain_holds());
    }

    #[test]
    fn segment_has_no_xi_boundary() {
        let g = z(1);
        let f = box_points(&[6]);
        let r = folner_traversal_demo(&g, &f, &Element::Abelian(vec![1]), true).unwrap();
        assert_eq!(r.boundary_size, 0);
        assert_eq!(r.traversal_length, 10);
        let k = [Element::Abelian(vec![1]), Element::Abelian(vec![-1])];
        assert_eq!(k_boundary(&g, &f, &k).len(), 2);
    }

    #[test]
    fn long_xi_makes_everything_boundary() {
        let g = z(2);
        let f = box_points(&[2, 2]);
        let r = folner_traversal_demo(&g, &f, &Element::Abelian(vec![5, 0]), false).unwrap();
        assert_eq!(r.boundary_size, 4);
        assert!(r.degenerate);
        assert!(!r.within_five_halves);
    }

    #[test]
    fn disconnected_sets_rejected() {
        let g = z(1);
        let f = vec![Element::Abelian(vec![0]), Element::Abelian(vec![2])];
        assert!(matches!(
            folner_traversal_demo(&g, &f, &Element::Abelian(vec![2]), false),
            Err(Error::Precondition(_))
        ));
    }
}

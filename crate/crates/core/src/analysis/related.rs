use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Element, Group};

/// Elements of `elements` with neither `x xi` nor `x xi^-1` in the set.
pub fn is_xi_related(group: &Group, elements: &[Element], xi: &Element) -> Result<Vec<Element>> {
    if *xi == group.identity() {
        return Err(Error::DegenerateXi);
    }
    let set: std::collections::HashSet<&Element> = elements.iter().collect();
    let xi_inv = group.inv(xi);
    Ok(elements
        .iter()
        .filter(|x| !set.contains(&group.mul(x, xi)) && !set.contains(&group.mul(x, &xi_inv)))
        .cloned()
        .collect())
}

/// A finite xi-related set, kept sorted, optionally with a revision: disjoint
/// index pairs `(i, j)` with `elements[j] = elements[i] xi`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelatedSet {
    group: Group,
    xi: Element,
    elements: Vec<Element>,
    revision: Option<Vec<(usize, usize)>>,
}

impl RelatedSet {
    pub fn new(group: Group, xi: Element, elements: impl IntoIterator<Item = Element>) -> Result<Self> {
        let mut elements: Vec<Element> = elements.into_iter().collect();
        group.check(&xi)?;
        for e in &elements {
            group.check(e)?;
        }
        elements.sort();
        elements.dedup();
        let orphans = is_xi_related(&group, &elements, &xi)?;
        if !orphans.is_empty() {
            let shown: Vec<String> = orphans.iter().take(5).map(|o| group.format(o)).collect();
            return Err(Error::Precondition(format!(
                "{} elements have no xi-neighbour, e.g. {}",
                orphans.len(),
                shown.join(" | ")
            )));
        }
        Ok(RelatedSet {
            group,
            xi,
            elements,
            revision: None,
        })
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn xi(&self) -> &Element {
        &self.xi
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, x: &Element) -> Option<usize> {
        self.elements.binary_search(x).ok()
    }

    pub fn revision(&self) -> Option<&[(usize, usize)]> {
        self.revision.as_deref()
    }

    /// Every element lies in a revision pair.
    pub fn is_revised(&self) -> bool {
        self.revision
            .as_ref()
            .is_some_and(|r| 2 * r.len() == self.elements.len())
    }

    /// The partner of element `i` in its revision pair.
    pub fn neighbor(&self, i: usize) -> Option<usize> {
        self.revision.as_ref()?.iter().find_map(|&(a, b)| {
            if a == i {
                Some(b)
            } else if b == i {
                Some(a)
            } else {
                None
            }
        })
    }

    /// Neighbour table for all elements of a revised set.
    pub fn neighbor_map(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.len()];
        for &(a, b) in self.revision.iter().flatten() {
            out[a] = Some(b);
            out[b] = Some(a);
        }
        out
    }

    /// The union of the revision pairs as a revised set of its own.
    pub fn revised_subset(&self) -> Result<RelatedSet> {
        let pairs = self
            .revision
            .as_ref()
            .ok_or_else(|| Error::Precondition("set has no revision".into()))?;
        let members = pairs
            .iter()
            .flat_map(|&(a, b)| [self.elements[a].clone(), self.elements[b].clone()]);
        revise(&RelatedSet::new(self.group.clone(), self.xi.clone(), members)?)
    }

    /// Validates the revision, if any: disjoint `{x, x xi}` pairs covering
    /// at least two thirds of the set.
    pub fn check_revision(&self) -> Result<()> {
        let Some(pairs) = &self.revision else {
            return Ok(());
        };
        let mut used = vec![false; self.len()];
        for &(a, b) in pairs {
            if used[a] || used[b] || a == b {
                return Err(Error::Internal("revision pairs overlap".into()));
            }
            used[a] = true;
            used[b] = true;
            if self.group.mul(&self.elements[a], &self.xi) != self.elements[b] {
                return Err(Error::Internal("revision pair is not of the form {x, x xi}".into()));
            }
        }
        if 3 * 2 * pairs.len() < 2 * self.len() {
            return Err(Error::Internal(format!(
                "revision covers {} of {} elements, below two thirds",
                2 * pairs.len(),
                self.len()
            )));
        }
        Ok(())
    }
}

/// Pairs consecutive elements along each xi-orbit segment `x, x xi, x xi^2,
/// ...` of the set: a maximum matching of the xi-graph, which is a disjoint
/// union of paths and cycles with no isolated vertex.
pub fn revise(set: &RelatedSet) -> Result<RelatedSet> {
    let g = &set.group;
    let index: HashMap<&Element, usize> = set.elements.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let n = set.len();
    let next: Vec<Option<usize>> = set
        .elements
        .iter()
        .map(|x| index.get(&g.mul(x, &set.xi)).copied())
        .collect();
    let mut has_prev = vec![false; n];
    for &j in next.iter().flatten() {
        has_prev[j] = true;
    }
    let mut seen = vec![false; n];
    let mut pairs = Vec::new();
    let walk = |start: usize, seen: &mut Vec<bool>, pairs: &mut Vec<(usize, usize)>| {
        let mut chain = vec![start];
        seen[start] = true;
        let mut cur = start;
        while let Some(j) = next[cur] {
            if seen[j] {
                break;
            }
            seen[j] = true;
            chain.push(j);
            cur = j;
        }
        pairs.extend(chain.chunks_exact(2).map(|c| (c[0], c[1])));
    };
    for i in 0..n {
        if !has_prev[i] {
            walk(i, &mut seen, &mut pairs);
        }
    }
    // what is left lies on xi-cycles
    for i in 0..n {
        if !seen[i] {
            walk(i, &mut seen, &mut pairs);
        }
    }
    pairs.sort();
    let out = RelatedSet {
        revision: Some(pairs),
        ..set.clone()
    };
    out.check_revision()?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free2() -> Group {
        Group::parse("free:2").unwrap()
    }

    fn el(g: &Group, s: &str) -> Element {
        g.parse_element(s).unwrap()
    }

    #[test]
    fn relatedness() {
        let g = free2();
        let xi = el(&g, "a b a");
        let x = el(&g, "b");
        let xxi = g.mul(&x, &xi);
        assert!(is_xi_related(&g, &[x.clone(), xxi.clone()], &xi).unwrap().is_empty());
        assert_eq!(
            is_xi_related(&g, std::slice::from_ref(&x), &xi).unwrap(),
            vec![x.clone()]
        );
        let h = el(&g, "B B");
        let xxi2 = g.mul(&xxi, &xi);
        let orphans = is_xi_related(&g, &[x.clone(), xxi, xxi2, h.clone()], &xi).unwrap();
        assert_eq!(orphans, vec![h]);
        assert_eq!(is_xi_related(&g, &[x], &g.identity()), Err(Error::DegenerateXi));
    }

    #[test]
    fn revisions() {
        let g = free2();
        let xi = el(&g, "a b");
        let x = el(&g, "b b");
        let chain: Vec<Element> = (0..3).map(|k| g.mul(&x, &g.pow(&xi, k))).collect();
        let pair = RelatedSet::new(g.clone(), xi.clone(), chain[..2].to_vec()).unwrap();
        let r = revise(&pair).unwrap();
        assert!(r.is_revised());
        let r = revise(&RelatedSet::new(g.clone(), xi.clone(), chain.clone()).unwrap()).unwrap();
        assert_eq!(r.revision().unwrap().len(), 1);
        assert!(!r.is_revised());
        let sub = r.revised_subset().unwrap();
        assert_eq!(sub.len(), 2);
        assert!(sub.is_revised());
        assert!(RelatedSet::new(g, xi, chain[..1].to_vec()).is_err());
    }

    #[test]
    fn long_orbit_paths_pair_from_the_start() {
        let g = Group::parse("abelian:1").unwrap();
        let xi = Element::Abelian(vec![1]);
        let s = RelatedSet::new(g, xi, (0..7).map(|i| Element::Abelian(vec![i]))).unwrap();
        let r = revise(&s).unwrap();
        assert_eq!(r.revision().unwrap().len(), 3);
        assert_eq!(r.neighbor(0), Some(1));
        assert_eq!(r.neighbor(6), None);
    }
}

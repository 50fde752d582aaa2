//! Square-free sequences and online labelings of rays and plane trees whose
//! label sequences avoid high powers.
//!
//! The adversarial labelers announce one inadmissible token per vertex
//! before the adversary picks the labels. The token banned is the one that
//! would complete the strongest repetition (largest exponent, then longest)
//! on the path from the origin.

mod adversary;
mod guard;
mod sequence;
mod tree;

pub use adversary::{Adversary, ForcedAdversary, LeastAdversary, RandomAdversary, RepeatingAdversary};
pub use guard::{RepetitionGuard, Threat};
pub use sequence::{squarefree_ternary, TERNARY};
pub use tree::{enumerate_simple_paths, LabeledTree, PlaneTree};

use std::collections::VecDeque;
use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Labels the edge into every vertex of level `l` with the `l`-th letter of
/// the square-free ternary sequence.
pub fn label_tree_3letters(tree: &PlaneTree) -> LabeledTree<char> {
    let depth = (0..tree.len()).map(|v| tree.level(v)).max().unwrap_or(0);
    let omega = squarefree_ternary(depth.max(1));
    let mut out = LabeledTree::unlabeled(tree.clone());
    for v in 1..tree.len() {
        out.labels[v] = Some(omega[tree.level(v) - 1]);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RayLabeling<T> {
    pub labels: Vec<T>,
    pub inadmissible: Vec<T>,
}

fn dedup<T: Clone + PartialEq>(set: &[T]) -> Vec<T> {
    let mut out: Vec<T> = Vec::with_capacity(set.len());
    for t in set {
        if !out.contains(t) {
            out.push(t.clone());
        }
    }
    out
}

fn checked_pick<T: Clone + PartialEq + Debug>(
    adversary: &mut dyn Adversary<T>,
    vertex: usize,
    candidates: &[T],
    z: &T,
    count: usize,
    history: &[T],
) -> Result<Vec<T>> {
    let picks = adversary.choose(vertex, candidates, z, count, history);
    let ok = picks.len() == count
        && picks.iter().all(|p| p != z && candidates.contains(p))
        && picks.iter().enumerate().all(|(i, p)| !picks[..i].contains(p));
    if !ok {
        return Err(Error::Precondition(format!(
            "adversary answered {picks:?} at vertex {vertex}; needed {count} distinct tokens of {candidates:?} other than {z:?}"
        )));
    }
    Ok(picks)
}

/// Labels a ray of `candidates.len()` edges online.
pub fn label_ray_adversarial<T: Clone + PartialEq + Debug>(
    candidates: &[Vec<T>],
    adversary: &mut dyn Adversary<T>,
) -> Result<RayLabeling<T>> {
    let sets: Vec<Vec<T>> = candidates.iter().map(|f| dedup(f)).collect();
    if let Some(i) = sets.iter().position(|f| f.len() < 2) {
        return Err(Error::MalformedInput(format!(
            "candidate set at vertex {i} has fewer than 2 tokens"
        )));
    }
    let mut guard = RepetitionGuard::new();
    let mut out = RayLabeling {
        labels: Vec::with_capacity(sets.len()),
        inadmissible: Vec::with_capacity(sets.len()),
    };
    for (v, f) in sets.iter().enumerate() {
        let z = guard.most_threatening(f).expect("nonempty").clone();
        let x = checked_pick(adversary, v, f, &z, 1, guard.history())?.remove(0);
        guard.push(x.clone());
        out.labels.push(x);
        out.inadmissible.push(z);
    }
    Ok(out)
}

/// Labels a plane tree root-down. `candidates[v]` is the set the lower edges
/// of `v` are drawn from; it needs at least 4 tokens at every vertex with
/// children.
pub fn label_tree_adversarial<T: Clone + PartialEq + Debug>(
    tree: &PlaneTree,
    candidates: &[Vec<T>],
    adversary: &mut dyn Adversary<T>,
) -> Result<LabeledTree<T>> {
    if candidates.len() != tree.len() {
        return Err(Error::MalformedInput(format!(
            "{} candidate sets for {} vertices",
            candidates.len(),
            tree.len()
        )));
    }
    let mut out = LabeledTree::unlabeled(tree.clone());
    for v in 0..tree.len() {
        let f = dedup(&candidates[v]);
        let need = 4.max(tree.children(v).len() + 1);
        if !tree.is_leaf(v) && f.len() < need {
            return Err(Error::MalformedInput(format!(
                "candidate set at vertex {v} has {} tokens, needs {need}",
                f.len()
            )));
        }
        out.candidates[v] = f;
    }
    let mut queue = VecDeque::from([(0usize, RepetitionGuard::new())]);
    while let Some((v, guard)) = queue.pop_front() {
        let kids = tree.children(v);
        if kids.is_empty() {
            continue;
        }
        let f = &out.candidates[v];
        let z = guard.most_threatening(f).expect("nonempty").clone();
        let picks = checked_pick(adversary, v, f, &z, kids.len(), guard.history())?;
        out.inadmissible[v] = Some(z);
        for (&c, x) in kids.iter().zip(picks) {
            let mut g = guard.clone();
            g.push(x.clone());
            out.labels[c] = Some(x);
            queue.push_back((c, g));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::{is_k_aperiodic, max_power_order};

    fn all_paths_ok<T: Clone + Eq + std::hash::Hash>(t: &LabeledTree<T>, k: usize) -> bool {
        enumerate_simple_paths(&t.tree).all(|p| is_k_aperiodic(&t.path_labels(&p), k))
    }

    #[test]
    fn three_letter_labels() {
        let t = label_tree_3letters(&PlaneTree::single());
        assert!(t.labels.iter().all(Option::is_none));
        let t = label_tree_3letters(&PlaneTree::complete_ternary(6));
        assert!(all_paths_ok(&t, 3));
    }

    #[test]
    fn binary_forced_ray() {
        let f = vec![vec!['a', 'b']; 100];
        let r = label_ray_adversarial(&f, &mut ForcedAdversary).unwrap();
        assert!(max_power_order(&r.labels).0 <= 4);
        for (x, z) in r.labels.iter().zip(&r.inadmissible) {
            assert_ne!(x, z);
        }
    }

    #[test]
    fn ternary_least_ray() {
        let f = vec![vec!['a', 'b', 'c']; 200];
        let r = label_ray_adversarial(&f, &mut LeastAdversary).unwrap();
        assert!(is_k_aperiodic(&r.labels, 4));
        let r = label_ray_adversarial(&f, &mut RepeatingAdversary).unwrap();
        assert!(is_k_aperiodic(&r.labels, 4));
    }

    #[test]
    fn small_sets_rejected() {
        let f = vec![vec!['a', 'b'], vec!['a', 'a']];
        assert!(matches!(
            label_ray_adversarial(&f, &mut ForcedAdversary),
            Err(Error::MalformedInput(_))
        ));
        let t = PlaneTree::complete_ternary(1);
        let f = vec![vec![1, 2, 3]; 4];
        assert!(label_tree_adversarial(&t, &f, &mut ForcedAdversary).is_err());
    }

    struct Cheater;
    impl Adversary<u8> for Cheater {
        fn choose(&mut self, _: usize, _: &[u8], z: &u8, count: usize, _: &[u8]) -> Vec<u8> {
            vec![*z; count]
        }
    }

    #[test]
    fn cheating_adversary_is_caught() {
        let f = vec![vec![1u8, 2]; 3];
        assert!(matches!(
            label_ray_adversarial(&f, &mut Cheater),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn tree_labels_avoid_high_powers() {
        let t = PlaneTree::complete_ternary(5);
        let f = vec![vec![1u8, 2, 3, 4]; t.len()];
        for seed in 0..5 {
            let l = label_tree_adversarial(&t, &f, &mut RandomAdversary::new(seed)).unwrap();
            assert!(all_paths_ok(&l, 10));
            for v in 0..t.len() {
                if let Some(z) = &l.inadmissible[v] {
                    assert!(t.children(v).iter().all(|&c| l.labels[c].as_ref() != Some(z)));
                }
            }
        }
        let single = label_tree_adversarial(&PlaneTree::single(), &[vec![1u8]], &mut ForcedAdversary).unwrap();
        assert!(single.labels[0].is_none());
    }

    #[test]
    fn degenerate_ray_tree() {
        let t = PlaneTree::ray(300);
        let f = vec![vec!['a', 'b', 'c', 'd']; t.len()];
        let l = label_tree_adversarial(&t, &f, &mut RepeatingAdversary).unwrap();
        let along = l.path_labels(&t.path(0, t.len() - 1));
        assert!(is_k_aperiodic(&along, 5));
    }
}

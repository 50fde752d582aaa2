use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::analysis::{distance_matrix, RelatedSet, Tour, TourKind};
use crate::error::{Error, Result};

/// A tour order cut into blocks at every gap longer than a threshold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceDecomposition {
    /// Element indices, each once, starting right after a cut when one exists.
    pub order: Vec<usize>,
    /// Positions `j` with `d(order[j], order[j + 1]) > threshold`, the last
    /// position wrapping to the first.
    pub cuts: Vec<usize>,
    /// `(start, len)` blocks of `order`.
    pub pieces: Vec<(usize, usize)>,
    /// Positions of the input visiting order dropped as repeats.
    pub removed: Vec<usize>,
    pub threshold: Ratio<u64>,
    /// Sum of consecutive distances around `order`.
    pub gap_sum: u64,
    pub tour_exact: bool,
}

impl PieceDecomposition {
    /// Piece index and offset inside the piece for every element index.
    pub fn locate(&self, n: usize) -> Vec<(usize, usize)> {
        let mut at = vec![(usize::MAX, 0); n];
        for (p, &(start, len)) in self.pieces.iter().enumerate() {
            for k in 0..len {
                at[self.order[start + k]] = (p, k);
            }
        }
        at
    }

    pub fn piece_members(&self, p: usize) -> &[usize] {
        let (start, len) = self.pieces[p];
        &self.order[start..start + len]
    }
}

fn exceeds(d: u64, t: Ratio<u64>) -> bool {
    d as u128 * *t.denom() as u128 > *t.numer() as u128
}

/// Drops repeated visits, then cuts the cyclic order wherever consecutive
/// elements are farther apart than `threshold`.
pub fn decompose_pieces(set: &RelatedSet, tour: &Tour, threshold: Ratio<u64>) -> Result<PieceDecomposition> {
    if *threshold.numer() == 0 {
        return Err(Error::MalformedInput("threshold must be positive".into()));
    }
    let n = set.len();
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut removed = Vec::new();
    for (pos, &i) in tour.order.iter().enumerate() {
        if i >= n {
            return Err(Error::MalformedInput(format!(
                "tour visits index {i} of a {n}-element set"
            )));
        }
        if seen[i] {
            removed.push(pos);
        } else {
            seen[i] = true;
            order.push(i);
        }
    }
    if order.len() != n {
        return Err(Error::Precondition(format!(
            "tour visits {} of {n} elements",
            order.len()
        )));
    }
    let d = distance_matrix(set.group(), set.elements());
    let gap = |order: &[usize], j: usize| d[order[j]][order[(j + 1) % order.len()]];
    if let Some(first_cut) = (0..n).find(|&j| n > 1 && exceeds(gap(&order, j), threshold)) {
        order.rotate_left((first_cut + 1) % n);
    }
    let cuts: Vec<usize> = (0..n)
        .filter(|&j| n > 1 && exceeds(gap(&order, j), threshold))
        .collect();
    let mut pieces = Vec::new();
    let mut start = 0;
    for &c in &cuts {
        pieces.push((start, c + 1 - start));
        start = c + 1;
    }
    if start < n {
        pieces.push((start, n - start));
    }
    let gap_sum = if n > 1 { (0..n).map(|j| gap(&order, j)).sum() } else { 0 };
    Ok(PieceDecomposition {
        order,
        cuts,
        pieces,
        removed,
        threshold,
        gap_sum,
        tour_exact: tour.kind == TourKind::Exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::tsp_exact;
    use crate::group::{Element, Group};

    #[test]
    fn pair_splits_below_its_distance() {
        let g = Group::parse("free:2").unwrap();
        let xi = g.parse_element("a b a").unwrap();
        let s = RelatedSet::new(g.clone(), xi.clone(), [g.identity(), xi]).unwrap();
        let t = tsp_exact(&s, 15).unwrap();
        let p = decompose_pieces(&s, &t, Ratio::new(5, 2)).unwrap();
        assert_eq!(p.pieces, vec![(0, 1), (1, 1)]);
        let p = decompose_pieces(&s, &t, Ratio::from_integer(3)).unwrap();
        assert_eq!(p.pieces.len(), 1);
        assert!(p.cuts.is_empty());
        assert_eq!(p.gap_sum, t.length);
    }

    #[test]
    fn chain_stays_whole() {
        let g = Group::parse("abelian:1").unwrap();
        let s = RelatedSet::new(g, Element::Abelian(vec![1]), (0..6).map(|i| Element::Abelian(vec![i]))).unwrap();
        let t = tsp_exact(&s, 15).unwrap();
        let p = decompose_pieces(&s, &t, Ratio::from_integer(100)).unwrap();
        assert_eq!(p.pieces, vec![(0, 6)]);
    }

    #[test]
    fn repeats_are_removed() {
        let g = Group::parse("abelian:1").unwrap();
        let s = RelatedSet::new(
            g,
            Element::Abelian(vec![3]),
            (0..4).map(|i| Element::Abelian(vec![i * 3])),
        )
        .unwrap();
        let tour = Tour {
            order: vec![0, 1, 0, 2, 3, 2],
            length: 0,
            kind: TourKind::HeuristicUpper,
        };
        let p = decompose_pieces(&s, &tour, Ratio::from_integer(3)).unwrap();
        assert_eq!(p.removed, vec![2, 5]);
        assert_eq!(p.cuts, vec![3]);
        assert_eq!(p.order, vec![0, 1, 2, 3]);
        let short = Tour {
            order: vec![0, 1],
            length: 0,
            kind: TourKind::HeuristicUpper,
        };
        assert!(decompose_pieces(&s, &short, Ratio::from_integer(3)).is_err());
    }
}

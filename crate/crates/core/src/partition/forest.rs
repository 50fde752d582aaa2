use std::collections::{HashMap, VecDeque};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::pieces::{decompose_pieces, PieceDecomposition};
use crate::analysis::{RelatedSet, Tour, TourKind};
use crate::error::{Error, Result};
use crate::group::Element;
use crate::label::{PlaneTree, RepetitionGuard};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ForestMode {
    /// Pieces cut at gaps above `r/2`, vertices are fixed short segments.
    P,
    /// Pieces cut at gaps above `r/4`, vertices grown around a xi-neighbour
    /// with one inadmissible candidate excluded per vertex.
    P10,
}

impl ForestMode {
    pub fn threshold(self, r: u64) -> Ratio<u64> {
        match self {
            ForestMode::P => Ratio::new(r, 2),
            ForestMode::P10 => Ratio::new(r, 4),
        }
    }

    pub fn bound_divisor(self) -> u64 {
        match self {
            ForestMode::P => 12,
            ForestMode::P10 => 96,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestVertex {
    /// Element indices of the set.
    pub members: Vec<usize>,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub level: usize,
    /// `(x, y)` with `x` in the parent, `y` here and `y = x xi^(+-1)`.
    pub witness: Option<(usize, usize)>,
    /// Size of the candidate set the inadmissible element was chosen from.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub candidates: Option<usize>,
}

/// Vertices in build order; vertex 0 is the origin.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct STree {
    pub vertices: Vec<ForestVertex>,
}

impl STree {
    pub fn is_end(&self, v: usize) -> bool {
        self.vertices[v].children.is_empty()
    }

    pub fn to_plane_tree(&self) -> PlaneTree {
        let mut t = PlaneTree::single();
        let mut id = vec![0usize; self.vertices.len()];
        for (v, vx) in self.vertices.iter().enumerate().skip(1) {
            id[v] = t.add_child(id[vx.parent.expect("non-origin vertex has a parent")]);
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub set_size: usize,
    /// Distinct elements of vertices with fewer than three members.
    pub end_elements: usize,
    /// End elements within distance 3 of an end of their piece.
    pub v_prime: usize,
    /// End elements at distance at least 4 from both ends of their piece.
    pub v_double_prime: usize,
    /// `6 * end_elements >= |S|`.
    pub end_ok: bool,
    /// `8 |V''| <= |S|`.
    pub v_double_prime_ok: bool,
    /// `24 |V'| > |S|`.
    pub v_prime_ok: bool,
}

impl Census {
    pub fn holds(&self, mode: ForestMode) -> bool {
        match mode {
            ForestMode::P => self.end_ok,
            ForestMode::P10 => self.v_double_prime_ok && self.v_prime_ok,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeForest {
    pub mode: ForestMode,
    pub r: u64,
    pub group: String,
    pub xi: String,
    pub elements: Vec<String>,
    pub pieces: PieceDecomposition,
    pub trees: Vec<STree>,
    pub census: Census,
    /// `(r/12)|S|` or `(r/96)|S|`; a lower bound for `L(S)` whenever the
    /// word-length property behind the construction holds for `(xi, r)`.
    pub certified_bound: Ratio<u64>,
    pub tour_length: u64,
    pub tour_exact: bool,
    /// Some vertex had fewer than 4 candidates, so its inadmissible element
    /// carries no aperiodicity guarantee.
    pub advisory: bool,
    pub conflicts: Vec<String>,
}

fn check_revised(set: &RelatedSet) -> Result<Vec<usize>> {
    if !set.is_revised() {
        return Err(Error::Precondition("forest construction needs a revised set".into()));
    }
    set.neighbor_map()
        .into_iter()
        .map(|n| n.ok_or_else(|| Error::Internal("revised set with an unpaired element".into())))
        .collect()
}

fn census(set_size: usize, trees: &[STree], pieces: &PieceDecomposition) -> Census {
    let at = pieces.locate(set_size);
    let mut end = vec![false; set_size];
    for t in trees {
        for v in &t.vertices {
            if v.members.len() < 3 {
                for &m in &v.members {
                    end[m] = true;
                }
            }
        }
    }
    let (mut v1, mut v2) = (0, 0);
    for (i, _) in end.iter().enumerate().filter(|(_, &e)| e) {
        let (p, k) = at[i];
        let len = pieces.pieces[p].1;
        if k >= 4 && len - 1 - k >= 4 {
            v2 += 1;
        } else {
            v1 += 1;
        }
    }
    let n = set_size;
    Census {
        set_size: n,
        end_elements: v1 + v2,
        v_prime: v1,
        v_double_prime: v2,
        end_ok: 6 * (v1 + v2) >= n,
        v_double_prime_ok: 8 * v2 <= n,
        v_prime_ok: 24 * v1 > n,
    }
}

fn finish(
    mode: ForestMode,
    r: u64,
    set: &RelatedSet,
    tour: &Tour,
    pieces: PieceDecomposition,
    trees: Vec<STree>,
    advisory: bool,
    conflicts: Vec<String>,
) -> TreeForest {
    let g = set.group();
    let census = census(set.len(), &trees, &pieces);
    TreeForest {
        mode,
        r,
        group: g.descriptor().to_string(),
        xi: g.format(set.xi()),
        elements: set.elements().iter().map(|e| g.format(e)).collect(),
        certified_bound: Ratio::new(r * set.len() as u64, mode.bound_divisor()),
        tour_length: tour.length,
        tour_exact: tour.kind == TourKind::Exact,
        pieces,
        trees,
        census,
        advisory,
        conflicts,
    }
}

/// Covers a revised set by trees whose vertices are short segments: blocks
/// of three consecutive elements of a piece, the last block of a piece
/// possibly shorter. A full segment grows one child per member through its
/// xi-neighbour (except the member it was entered by); shorter segments are
/// end vertices.
pub fn build_forest_p(set: &RelatedSet, r: u64, tour: &Tour) -> Result<TreeForest> {
    let neighbor = check_revised(set)?;
    let pieces = decompose_pieces(set, tour, ForestMode::P.threshold(r))?;
    let n = set.len();
    let mut segments: Vec<Vec<usize>> = Vec::new();
    for p in 0..pieces.pieces.len() {
        segments.extend(pieces.piece_members(p).chunks(3).map(<[usize]>::to_vec));
    }
    let mut seg_of = vec![0usize; n];
    for (s, members) in segments.iter().enumerate() {
        for &m in members {
            seg_of[m] = s;
        }
    }
    let mut covered = vec![false; n];
    let mut internal_elsewhere = vec![false; segments.len()];
    let mut trees = Vec::new();
    let mut conflicts = Vec::new();
    for &start in &pieces.order {
        if covered[start] {
            continue;
        }
        let tree_no = trees.len();
        let root = seg_of[start];
        let mut members = segments[root].clone();
        members.sort_by_key(|&m| m != start);
        let mut tree = STree {
            vertices: vec![ForestVertex {
                members,
                parent: None,
                children: Vec::new(),
                level: 0,
                witness: None,
                candidates: None,
            }],
        };
        let mut in_tree: HashMap<usize, usize> = HashMap::from([(root, 0)]);
        let mut queue = VecDeque::new();
        if segments[root].len() == 3 {
            queue.push_back((0usize, None::<usize>));
        }
        while let Some((v, entry)) = queue.pop_front() {
            let expand: Vec<usize> = tree.vertices[v]
                .members
                .iter()
                .copied()
                .filter(|&m| Some(m) != entry)
                .collect();
            for m in expand {
                let y = neighbor[m];
                let s = seg_of[y];
                if in_tree.contains_key(&s) {
                    conflicts.push(format!("tree {tree_no}: segment {s} reached twice"));
                    continue;
                }
                if internal_elsewhere[s] {
                    conflicts.push(format!("tree {tree_no}: segment {s} is internal in an earlier tree"));
                    continue;
                }
                let id = tree.vertices.len();
                let mut members = segments[s].clone();
                members.sort_by_key(|&x| x != y);
                tree.vertices.push(ForestVertex {
                    members,
                    parent: Some(v),
                    children: Vec::new(),
                    level: tree.vertices[v].level + 1,
                    witness: Some((m, y)),
                    candidates: None,
                });
                tree.vertices[v].children.push(id);
                in_tree.insert(s, id);
                if segments[s].len() == 3 {
                    queue.push_back((id, Some(y)));
                }
            }
        }
        for &s in in_tree.keys() {
            if segments[s].len() == 3 {
                internal_elsewhere[s] = true;
            }
            for &m in &segments[s] {
                covered[m] = true;
            }
        }
        trees.push(tree);
    }
    Ok(finish(ForestMode::P, r, set, tour, pieces, trees, false, conflicts))
}

/// Covers a revised set by disjoint trees. A vertex entered at `e` takes
/// the two nearest unused admissible elements among the four right and then
/// the four left neighbours of `e` in its piece; the candidate labels are
/// `e^-1 c` and the inadmissible one is the label that would complete the
/// strongest repetition along the path from the origin.
pub fn build_forest_p10(set: &RelatedSet, r: u64, tour: &Tour) -> Result<TreeForest> {
    let neighbor = check_revised(set)?;
    let pieces = decompose_pieces(set, tour, ForestMode::P10.threshold(r))?;
    let g = set.group();
    let els = set.elements();
    let n = set.len();
    let at = pieces.locate(n);
    let mut used = vec![false; n];
    let mut trees = Vec::new();
    let mut conflicts = Vec::new();
    let mut advisory = false;
    let label = |e: usize, c: usize| g.quotient(&els[e], &els[c]);
    for &start in &pieces.order {
        if used[start] {
            continue;
        }
        let tree_no = trees.len();
        let (p, k) = at[start];
        let piece = pieces.piece_members(p);
        let mut members = vec![start];
        let left = (0..k).rev().map(|i| piece[i]).filter(|&x| !used[x]);
        let right = (k + 1..piece.len()).map(|i| piece[i]).filter(|&x| !used[x]);
        members.extend(left.take(2));
        let fill = 3 - members.len();
        members.extend(right.take(fill));
        for &m in &members {
            used[m] = true;
        }
        let mut tree = STree {
            vertices: vec![ForestVertex {
                members: members.clone(),
                parent: None,
                children: Vec::new(),
                level: 0,
                witness: None,
                candidates: None,
            }],
        };
        let mut queue: VecDeque<(usize, usize, usize, RepetitionGuard<Element>)> = VecDeque::new();
        if members.len() == 3 {
            for &m in &members {
                let y = neighbor[m];
                if used[y] {
                    conflicts.push(format!("tree {tree_no}: neighbour of an origin member already used"));
                    continue;
                }
                used[y] = true;
                let mut guard = RepetitionGuard::new();
                guard.push(label(start, m));
                queue.push_back((0, m, y, guard));
            }
        }
        while let Some((parent, x, e, guard)) = queue.pop_front() {
            let (p, k) = at[e];
            let piece = pieces.piece_members(p);
            let rights: Vec<usize> = (k + 1..piece.len()).take(4).map(|i| piece[i]).collect();
            let lefts: Vec<usize> = (0..k).rev().take(4).map(|i| piece[i]).collect();
            let pool: Vec<usize> = rights.iter().chain(&lefts).copied().collect();
            let labels: Vec<Element> = pool.iter().map(|&c| label(e, c)).collect();
            if labels.len() < 4 {
                advisory = true;
            }
            let banned = guard.most_threatening(&labels).cloned();
            let picks: Vec<usize> = pool
                .iter()
                .zip(&labels)
                .filter(|(&c, l)| !used[c] && Some(*l) != banned.as_ref())
                .map(|(&c, _)| c)
                .take(2)
                .collect();
            let id = tree.vertices.len();
            let mut members = vec![e];
            members.extend(&picks);
            for &c in &picks {
                used[c] = true;
            }
            tree.vertices.push(ForestVertex {
                members,
                parent: Some(parent),
                children: Vec::new(),
                level: tree.vertices[parent].level + 1,
                witness: Some((x, e)),
                candidates: Some(labels.len()),
            });
            tree.vertices[parent].children.push(id);
            if picks.len() == 2 {
                for c in picks {
                    let y = neighbor[c];
                    if used[y] {
                        conflicts.push(format!("tree {tree_no}: neighbour of a vertex member already used"));
                        continue;
                    }
                    used[y] = true;
                    let mut gc = guard.clone();
                    gc.push(label(e, c));
                    queue.push_back((id, c, y, gc));
                }
            }
        }
        trees.push(tree);
    }
    Ok(finish(
        ForestMode::P10,
        r,
        set,
        tour,
        pieces,
        trees,
        advisory,
        conflicts,
    ))
}

pub fn build_forest(mode: ForestMode, set: &RelatedSet, r: u64, tour: &Tour) -> Result<TreeForest> {
    if r == 0 {
        return Err(Error::MalformedInput("r must be positive".into()));
    }
    match mode {
        ForestMode::P => build_forest_p(set, r, tour),
        ForestMode::P10 => build_forest_p10(set, r, tour),
    }
}

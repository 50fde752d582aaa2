use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::label::squarefree_ternary;
use crate::word::{max_power_order, PieceMode, SmallCancellation, SymmetrizedSet, Word};
use crate::{Error, Result};

/// Size parameters of the construction. Positions are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma4Params {
    /// The length `N` satisfies `min_len < N < max_len`.
    pub min_len: usize,
    pub max_len: usize,
    /// `|alpha| = |beta|`.
    pub end_len: usize,
    /// `D` meets `[u, u + end_window]` for `u` in
    /// `(0, end_len - end_window)` and `(N - end_len, N - end_window)`.
    pub end_window: usize,
    /// `D` meets `[u, u + mid_window]` for `u` in `(0, N - mid_window)`.
    pub mid_window: usize,
    /// `D` holds under a third of the `b`'s in `[u, u + density_window]`.
    pub density_window: usize,
    pub max_attempts: u32,
}

impl Lemma4Params {
    pub const FULL: Lemma4Params = Lemma4Params {
        min_len: 10_000,
        max_len: 10_006,
        end_len: 400,
        end_window: 60,
        mid_window: 1000,
        density_window: 100,
        max_attempts: 20,
    };

    pub const DESK: Lemma4Params = Lemma4Params {
        min_len: 500,
        max_len: 506,
        end_len: 60,
        end_window: 20,
        mid_window: 100,
        density_window: 100,
        max_attempts: 50,
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DConditions {
    pub distinct_gaps: bool,
    pub end_windows: bool,
    pub global_windows: bool,
    pub sparse: bool,
}

impl DConditions {
    pub fn all(&self) -> bool {
        self.distinct_gaps && self.end_windows && self.global_windows && self.sparse
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct XiConditions {
    pub length: usize,
    pub length_ok: bool,
    pub max_power_order: usize,
    pub three_aperiodic: bool,
    pub cyclically_reduced: bool,
    pub small_cancellation: Option<SmallCancellation>,
    pub ends_small_cancellation: Option<SmallCancellation>,
}

impl XiConditions {
    pub fn all(&self) -> bool {
        self.length_ok
            && self.three_aperiodic
            && self.cyclically_reduced
            && self.small_cancellation.as_ref().is_some_and(|s| s.holds)
            && self.ends_small_cancellation.as_ref().is_some_and(|s| s.holds)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma4Report {
    pub seed: u64,
    pub attempt: u32,
    pub params: Lemma4Params,
    /// Offset into the square-free sequence and the images of its letters.
    pub offset: usize,
    pub blocks: [String; 3],
    pub b_count: usize,
    pub d: Vec<usize>,
    pub d_conditions: DConditions,
    pub xi: XiConditions,
    pub window_note: String,
    pub rejected: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma4Xi {
    pub xi: Word,
    pub report: Lemma4Report,
}

fn blocks() -> [Vec<i32>; 3] {
    [vec![2], vec![1, 2, 1], vec![1, 1, 2, 1, 1]]
}

/// `u` ranges of the coverage conditions as inclusive integer intervals,
/// each paired with its window width.
fn coverage_ranges(n: usize, p: &Lemma4Params) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    let mut push = |lo: usize, hi: usize, w: usize| {
        if lo <= hi {
            out.push((lo, hi, w));
        }
    };
    push(1, (p.end_len - p.end_window).saturating_sub(1), p.end_window);
    push(
        n.saturating_sub(p.end_len) + 1,
        n.saturating_sub(p.end_window + 1),
        p.end_window,
    );
    push(1, n.saturating_sub(p.mid_window + 1), p.mid_window);
    out
}

/// Whether no constrained window fits strictly between `d` and `e`.
fn gap_ok(d: usize, e: usize, ranges: &[(usize, usize, usize)]) -> bool {
    ranges.iter().all(|&(lo, hi, w)| {
        let first = lo.max(d + 1);
        // a window [u, u + w] avoids D when d < u and u + w < e
        !(first <= hi && first + w < e)
    })
}

/// Independent re-check of the four conditions on `D` by scanning windows.
pub fn check_d_conditions(n: usize, b: &[usize], d: &[usize], p: &Lemma4Params) -> DConditions {
    let mut gaps: Vec<usize> = d.windows(2).map(|w| w[1] - w[0]).collect();
    let total = gaps.len();
    gaps.sort_unstable();
    gaps.dedup();
    let mut in_d = vec![0usize; n + 2];
    let mut in_b = vec![0usize; n + 2];
    for &x in d {
        in_d[x] = 1;
    }
    for &x in b {
        in_b[x] = 1;
    }
    let prefix = |v: &[usize]| {
        let mut s = vec![0usize; v.len() + 1];
        for i in 0..v.len() {
            s[i + 1] = s[i] + v[i];
        }
        s
    };
    let (pd, pb) = (prefix(&in_d), prefix(&in_b));
    let count = |s: &[usize], u: usize, w: usize| s[(u + w + 1).min(n + 1)] - s[u];
    let covered = |lo: usize, hi: usize, w: usize| (lo..=hi).all(|u| count(&pd, u, w) > 0);
    let ranges = coverage_ranges(n, p);
    let end_windows = ranges[..ranges.len() - 1].iter().all(|&(lo, hi, w)| covered(lo, hi, w));
    let (lo, hi, w) = ranges[ranges.len() - 1];
    let global_windows = covered(lo, hi, w);
    let dw = p.density_window;
    let sparse = (1..n.saturating_sub(dw)).all(|u| 3 * count(&pd, u, dw) < count(&pb, u, dw));
    DConditions {
        distinct_gaps: gaps.len() == total,
        end_windows,
        global_windows,
        sparse,
    }
}

/// Checks conditions (3-aperiodicity, length, `C'(1/5)` under cyclic
/// closure, `C'(1/3)` for the two end segments) on any word.
pub fn check_xi_conditions(xi: &Word, p: &Lemma4Params) -> XiConditions {
    let n = xi.len();
    let (order, _) = max_power_order(xi.letters());
    let cyclically_reduced = xi.is_cyclically_reduced();
    let small_cancellation = if cyclically_reduced && n > 0 {
        SymmetrizedSet::new([xi.clone()], PieceMode::Cyclic)
            .and_then(|s| s.satisfies_small_cancellation(1, 5))
            .ok()
    } else {
        None
    };
    let ends_small_cancellation = (n >= 2 * p.end_len && p.end_len > 0)
        .then(|| {
            let alpha = xi.subword(0, p.end_len);
            let beta = xi.subword(n - p.end_len, p.end_len);
            // cyclic closure compares every subword of both ends, wrap-around
            // included; an end that is not cyclically reduced fails here
            SymmetrizedSet::new([alpha, beta], PieceMode::Cyclic)
                .and_then(|s| s.satisfies_small_cancellation(1, 3))
                .ok()
        })
        .flatten();
    XiConditions {
        length: n,
        length_ok: p.min_len < n && n < p.max_len,
        max_power_order: order,
        three_aperiodic: order <= 3,
        cyclically_reduced,
        small_cancellation,
        ends_small_cancellation,
    }
}

struct Attempt {
    letters: Vec<i32>,
    offset: usize,
    blocks: [String; 3],
    b: Vec<usize>,
}

fn base_word(rng: &mut ChaCha8Rng, p: &Lemma4Params) -> Attempt {
    let offset = rng.gen_range(0..p.max_len);
    let mut images = blocks();
    images.shuffle(rng);
    let seq = squarefree_ternary(offset + p.max_len);
    let mut letters = Vec::new();
    for c in &seq[offset..] {
        if letters.len() > p.min_len {
            break;
        }
        letters.extend(&images[(*c as u8 - b'A') as usize]);
    }
    let b = (1..=letters.len()).filter(|&i| letters[i - 1] == 2).collect();
    let show = |v: &Vec<i32>| Word::from_signed(v).map(|w| w.to_string()).unwrap_or_default();
    Attempt {
        blocks: [show(&images[0]), show(&images[1]), show(&images[2])],
        letters,
        offset,
        b,
    }
}

/// Greedy left-to-right choice of `D` from `B`: each step jumps as far as
/// the coverage windows allow, with a gap not used before and without
/// pushing any window over the density limit; the seed picks among the
/// three farthest admissible jumps.
fn select_d(n: usize, b: &[usize], p: &Lemma4Params, rng: &mut ChaCha8Rng) -> Option<Vec<usize>> {
    let ranges = coverage_ranges(n, p);
    let dw = p.density_window;
    let mut is_b = vec![false; n + 2];
    for &x in b {
        is_b[x] = true;
    }
    let mut bcount = vec![0usize; n + 2];
    for i in 1..=n {
        bcount[i] = bcount[i - 1] + is_b[i] as usize;
    }
    let b_in = |u: usize| bcount[(u + dw).min(n)] - bcount[u - 1];
    let mut d: Vec<usize> = Vec::new();
    let mut used = HashSet::new();
    let mut cur = 0;
    while !gap_ok(cur, n + 1, &ranges) {
        let mut cands: Vec<usize> = b
            .iter()
            .copied()
            .filter(|&x| x > cur && gap_ok(cur, x, &ranges))
            .filter(|&x| cur == 0 || !used.contains(&(x - cur)))
            .filter(|&x| {
                (x.saturating_sub(dw).max(1)..=x.min(n.saturating_sub(dw + 1))).all(|u| {
                    let have = d.iter().filter(|&&y| y >= u && y <= u + dw).count();
                    3 * (have + 1) < b_in(u)
                })
            })
            .collect();
        if cands.is_empty() {
            return None;
        }
        cands.reverse();
        let pick = cands[rng.gen_range(0..cands.len().min(3))];
        if cur > 0 {
            used.insert(pick - cur);
        }
        d.push(pick);
        cur = pick;
    }
    Some(d)
}

/// A reduced word over `a, b` with the four properties: built from a
/// square-free sequence under `x = b, y = aba, z = aabaa`, then with the `b`
/// at the positions of a chosen set `D` inverted. Every condition is checked
/// on the result; failed attempts are retried with fresh randomness.
pub fn construct_xi_lemma4(seed: u64, params: &Lemma4Params) -> Result<Lemma4Xi> {
    if params.end_window >= params.end_len || 2 * params.end_len > params.min_len {
        return Err(Error::Config("inconsistent window sizes".into()));
    }
    let mut rejected = Vec::new();
    for attempt in 0..params.max_attempts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt as u64);
        let base = base_word(&mut rng, params);
        let n = base.letters.len();
        let Some(d) = select_d(n, &base.b, params, &mut rng) else {
            rejected.push(format!("attempt {attempt}: greedy choice of D got stuck"));
            continue;
        };
        let mut letters = base.letters.clone();
        for &x in &d {
            letters[x - 1] = -2;
        }
        let xi = Word::from_signed(&letters)?;
        if xi.len() != n {
            return Err(Error::Internal("the flipped word is not reduced".into()));
        }
        let d_conditions = check_d_conditions(n, &base.b, &d, params);
        let conditions = check_xi_conditions(&xi, params);
        if !(d_conditions.all() && conditions.all()) {
            rejected.push(format!(
                "attempt {attempt}: {d_conditions:?}, xi checks {}",
                conditions.all()
            ));
            continue;
        }
        let window_note = format!(
            "end windows taken as u in (0, {}) and (N - {}, N - {}): both reach within one letter of their end, the ranges are not mirror images",
            params.end_len - params.end_window,
            params.end_len,
            params.end_window
        );
        return Ok(Lemma4Xi {
            xi,
            report: Lemma4Report {
                seed,
                attempt,
                params: *params,
                offset: base.offset,
                blocks: base.blocks,
                b_count: base.b.len(),
                d,
                d_conditions,
                xi: conditions,
                window_note,
                rejected,
            },
        });
    }
    Err(Error::Precondition(format!(
        "no admissible xi after {} attempts; {}",
        params.max_attempts,
        rejected.last().map_or("", String::as_str)
    )))
}

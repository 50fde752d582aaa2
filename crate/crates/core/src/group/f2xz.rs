//! Word length in `F(a, b) x Z` with generators `a`, `b`, `c = a^n z`.
//!
//! Any word in these generators traces a path in the Cayley tree of the free
//! factor. Detours off the geodesic of the free part never help because `z`
//! is central, so a shortest word walks the geodesic and, at each vertex of
//! the geodesic, spends a block in `{a, c}` realizing the local `a`-exponent
//! `e` with `s` letters `c`: cost `|e - n s| + |s|`. Minimizing the sum of
//! these convex costs subject to `sum s = t` is done greedily on marginals.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::word::{Letter, Word};

/// Exponent of `a` at each vertex of the free geodesic where an `a`-block
/// can sit: one per `b` letter plus one.
fn lines(w: &Word) -> (u64, Vec<i64>) {
    let mut b_letters = 0u64;
    let mut out = vec![0i64];
    for &l in w.letters() {
        if l.index() == 1 {
            *out.last_mut().unwrap() += if l.is_inverse() { -1 } else { 1 };
        } else {
            b_letters += 1;
            out.push(0);
        }
    }
    (b_letters, out)
}

fn block_cost(e: i64, s: i64, n: i64) -> u64 {
    ((e - n * s).unsigned_abs()) + s.unsigned_abs()
}

fn best_s(e: i64, n: i64) -> i64 {
    let q = e.div_euclid(n);
    [0, q, q + 1]
        .into_iter()
        .min_by_key(|&s| (block_cost(e, s, n), s.unsigned_abs()))
        .unwrap()
}

/// Optimal `c`-exponent per line, and the total length.
pub(super) fn solve(w: &Word, t: i64, n: u32) -> (u64, Vec<i64>, Vec<i64>) {
    let n = n as i64;
    let (b_letters, es) = lines(w);
    let mut s: Vec<i64> = es.iter().map(|&e| best_s(e, n)).collect();
    let mut cost: u64 = es.iter().zip(&s).map(|(&e, &x)| block_cost(e, x, n)).sum();
    let have: i64 = s.iter().sum();
    let dir: i64 = if t >= have { 1 } else { -1 };
    let mut remaining = (t - have).unsigned_abs();
    let marginal = |i: usize, x: i64| block_cost(es[i], x + dir, n) - block_cost(es[i], x, n);
    let mut heap: BinaryHeap<Reverse<(u64, usize)>> = (0..es.len()).map(|i| Reverse((marginal(i, s[i]), i))).collect();
    let cap = (n + 1) as u64;
    while remaining > 0 {
        let Reverse((m, i)) = heap.pop().expect("at least one line");
        if m >= cap {
            // every further step costs exactly n + 1; put them on line i
            cost += remaining * cap;
            s[i] += dir * remaining as i64;
            break;
        }
        cost += m;
        s[i] += dir;
        remaining -= 1;
        heap.push(Reverse((marginal(i, s[i]), i)));
    }
    (cost + b_letters, es, s)
}

/// A shortest word in the generators `a`, `b`, `c` (letters 1, 2, 3).
pub(super) fn geodesic(w: &Word, t: i64, n: u32) -> Vec<Letter> {
    let (_, es, s) = solve(w, t, n);
    let sign = |x: i64, g: u32| {
        let l = Letter::generator(g);
        if x < 0 {
            l.inverse()
        } else {
            l
        }
    };
    let block = |out: &mut Vec<Letter>, e: i64, x: i64| {
        let rest = e - n as i64 * x;
        out.extend(std::iter::repeat_n(sign(x, 3), x.unsigned_abs() as usize));
        out.extend(std::iter::repeat_n(sign(rest, 1), rest.unsigned_abs() as usize));
    };
    let mut out = Vec::new();
    let mut line = 0;
    block(&mut out, es[0], s[0]);
    for &l in w.letters() {
        if l.index() == 2 {
            out.push(l);
            line += 1;
            block(&mut out, es[line], s[line]);
        }
    }
    out
}

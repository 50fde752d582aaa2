use std::collections::{HashMap, VecDeque};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ts_groups::analysis::{l_prime, RelatedSet};
use ts_groups::group::{Element, Group};
use ts_groups::word::{max_power_order, PieceMode, SymmetrizedSet, Word};

fn naive_order(s: &[u8]) -> usize {
    let n = s.len();
    let mut best = usize::from(n > 0);
    for start in 0..n {
        for p in 1..=(n - start) / 2 {
            let mut e = 1;
            while start + (e + 1) * p <= n && (0..p).all(|i| s[start + e * p + i] == s[start + i]) {
                e += 1;
            }
            best = best.max(e);
        }
    }
    best
}

#[test]
fn power_scanner_matches_all_pairs_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10_000 {
        let len = rng.gen_range(0..40);
        let sigma = rng.gen_range(1..=4u8);
        let s: Vec<u8> = (0..len).map(|_| rng.gen_range(0..sigma)).collect();
        let (order, w) = max_power_order(&s);
        assert_eq!(order, naive_order(&s), "{s:?}");
        if let Some(w) = w {
            assert!(w.holds_in(&s));
            assert_eq!(w.exponent, order);
        }
    }
}

fn random_cyclic_word(rng: &mut ChaCha8Rng, len: usize) -> Word {
    loop {
        let v: Vec<i32> = (0..len).map(|_| [1, -1, 2, -2][rng.gen_range(0..4)]).collect();
        let w = Word::from_signed(&v).unwrap();
        if !w.is_empty() && w.is_cyclically_reduced() {
            return w;
        }
    }
}

#[test]
fn pieces_match_rotation_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..300 {
        let count = rng.gen_range(1..=3);
        let words: Vec<Word> = (0..count)
            .map(|_| {
                let len = rng.gen_range(1..12);
                random_cyclic_word(&mut rng, len)
            })
            .collect();
        let set = SymmetrizedSet::new(words, PieceMode::Cyclic).unwrap();
        // every rotation of every relator and inverse is its own occurrence
        let mut occ: Vec<Vec<i32>> = Vec::new();
        for r in set.relators() {
            for w in [r.clone(), r.inverse()] {
                let l: Vec<i32> = w.letters().iter().map(|l| l.signed()).collect();
                for o in 0..l.len() {
                    occ.push(l[o..].iter().chain(&l[..o]).copied().collect());
                }
            }
        }
        // a piece is a proper prefix: equal words at two occurrences share |w| - 1
        let lcp = |a: &[i32], b: &[i32]| {
            let c = a.iter().zip(b).take_while(|(x, y)| x == y).count();
            if a == b {
                c - 1
            } else {
                c
            }
        };
        let best: Vec<usize> = (0..occ.len())
            .map(|i| {
                (0..occ.len())
                    .filter(|&j| j != i)
                    .map(|j| lcp(&occ[i], &occ[j]))
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        for (num, den) in [(1u64, 6u64), (1, 4), (1, 3), (1, 2)] {
            let sc = set.satisfies_small_cancellation(num, den).unwrap();
            assert_eq!(
                sc.longest_piece,
                best.iter().copied().max().unwrap_or(0),
                "{:?}",
                set.relators()
            );
            let naive = occ
                .iter()
                .zip(&best)
                .all(|(e, &b)| (b as u64) * den < num * e.len() as u64);
            assert_eq!(sc.holds, naive, "{:?} at {num}/{den}", set.relators());
        }
    }
}

/// `inf (l(beta) - N(beta; S))` by 0-1 BFS over (vertex, visited) states of
/// the Cayley graph restricted to a ball.
fn l_prime_by_search(g: &Group, s: &[Element], radius: u64) -> i64 {
    let ball = g.ball(&g.identity(), radius).unwrap();
    let index: HashMap<&Element, usize> = ball.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let gens = g.generators();
    let member: HashMap<usize, usize> = s.iter().enumerate().map(|(k, e)| (index[e], k)).collect();
    let full = (1usize << s.len()) - 1;
    let start = index[&s[0]];
    let states = ball.len() << s.len();
    let mut dist = vec![u64::MAX; states];
    let key = |v: usize, m: usize| (v << s.len()) | m;
    let mut dq = VecDeque::new();
    dist[key(start, 1)] = 0;
    dq.push_back((start, 1usize));
    let mut best = u64::MAX;
    while let Some((v, m)) = dq.pop_front() {
        let d = dist[key(v, m)];
        if v == start && m == full {
            best = best.min(d);
        }
        for x in &gens {
            let Some(&u) = index.get(&g.mul(&ball[v], x)) else {
                continue;
            };
            let (cost, mm) = match member.get(&u) {
                Some(&k) => (0, m | (1 << k)),
                None => (1, m),
            };
            if d + cost < dist[key(u, mm)] {
                dist[key(u, mm)] = d + cost;
                if cost == 0 {
                    dq.push_front((u, mm))
                } else {
                    dq.push_back((u, mm))
                }
            }
        }
    }
    // the start is counted once at each end of the path
    best as i64 - 1
}

#[test]
fn l_prime_matches_cayley_graph_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (group, xis, radius) in [
        ("free:2", vec!["a", "a b", "a b A", "a b a B"], 6u64),
        ("abelian:2", vec!["1,0", "2,1", "3,0"], 8),
    ] {
        let g = Group::parse(group).unwrap();
        for xi_text in xis {
            let xi = g.parse_element(xi_text).unwrap();
            for _ in 0..6 {
                let mut els = Vec::new();
                let pairs = rng.gen_range(1..=3);
                while els.len() < 2 * pairs {
                    let b = g.random_walk(rng.gen_range(0..3), &mut rng);
                    let bx = g.mul(&b, &xi);
                    if g.length(&bx) + 1 < radius && !els.contains(&b) && !els.contains(&bx) {
                        els.push(b);
                        els.push(bx);
                    }
                }
                let set = RelatedSet::new(g.clone(), xi.clone(), els.clone()).unwrap();
                let oracle = l_prime_by_search(&g, set.elements(), radius);
                assert_eq!(
                    l_prime(&set, 15).unwrap(),
                    oracle,
                    "{group} xi = {xi_text} S = {:?}",
                    set.elements()
                );
            }
        }
    }
}

fn word_strategy() -> impl Strategy<Value = Word> {
    prop::collection::vec(prop::sample::select(vec![1i32, -1, 2, -2, 3, -3]), 0..20)
        .prop_map(|v| Word::from_signed(&v).unwrap())
}

proptest! {
    #[test]
    fn words_form_a_group(a in word_strategy(), b in word_strategy(), c in word_strategy()) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert!(a.mul(&a.inverse()).is_empty());
        prop_assert_eq!(a.mul(&b).inverse(), b.inverse().mul(&a.inverse()));
        prop_assert_eq!(Word::identity().mul(&a), a.clone());
    }

    #[test]
    fn text_round_trip(a in word_strategy()) {
        let text = a.to_string();
        if !a.is_empty() {
            prop_assert_eq!(text.parse::<Word>().unwrap(), a);
        }
    }

    #[test]
    fn distances_are_symmetric_and_triangular(a in word_strategy(), b in word_strategy(), c in word_strategy()) {
        let g = Group::parse("free:3").unwrap();
        let (x, y, z) = (Element::Free(a), Element::Free(b), Element::Free(c));
        prop_assert_eq!(g.distance(&x, &y), g.distance(&y, &x));
        prop_assert!(g.distance(&x, &z) <= g.distance(&x, &y) + g.distance(&y, &z));
    }
}

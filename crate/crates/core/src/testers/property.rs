use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::group::{Element, Group};
use crate::word::is_k_aperiodic;
use crate::{Error, Result};

/// Which sequences `x_1, .., x_k` a property quantifies over. `P` allows any
/// non-trivial `x_i` of length at most `r`; `Aperiodic(n)` additionally asks
/// the sequence to be `n`-aperiodic (`n = 1` is the primed property).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    P,
    Aperiodic(usize),
}

impl Family {
    pub fn admits(self, seq: &[usize]) -> bool {
        match self {
            Family::P => true,
            Family::Aperiodic(n) => is_k_aperiodic(seq, n),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::P => write!(f, "P"),
            Family::Aperiodic(1) => write!(f, "P'"),
            Family::Aperiodic(n) => write!(f, "P{n}'"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    /// `P`, `P'`, `P10`, `P10'`.
    fn from_str(s: &str) -> Result<Self> {
        let body = s
            .trim()
            .strip_prefix(['P', 'p'])
            .ok_or_else(|| Error::MalformedInput(format!("family {s:?}")))?;
        let digits = body.trim_end_matches('\'');
        match (digits, body.len() - digits.len()) {
            ("", 0) => Ok(Family::P),
            ("", 1) => Ok(Family::Aperiodic(1)),
            (d, 0 | 1) => match d.parse::<usize>() {
                Ok(n) if n >= 1 => Ok(Family::Aperiodic(n)),
                _ => Err(Error::MalformedInput(format!("family {s:?}"))),
            },
            _ => Err(Error::MalformedInput(format!("family {s:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PropertySpec {
    pub family: Family,
    pub r: u64,
    pub group: Group,
    pub xi: Element,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub k_max: usize,
    /// Largest `|B_r|` searched exhaustively.
    pub exhaustive_ball: usize,
    /// Largest `k` searched exhaustively.
    pub exhaustive_k: usize,
    /// Node cap for the exhaustive search.
    pub max_nodes: u64,
    /// Random sequences tried once exhaustion is out of reach.
    pub samples: u64,
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            k_max: 4,
            exhaustive_ball: 10_000,
            exhaustive_k: 4,
            max_nodes: 20_000_000,
            samples: 100_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// Every admissible sequence up to `k` was checked.
    Exhaustive { k: usize },
    /// The exhaustive search hit its node cap.
    Truncated { k: usize },
    /// Seeded random sequences.
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyWitness {
    pub signs: Vec<i8>,
    pub xs: Vec<String>,
    pub product: String,
    pub length: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub family: String,
    pub r: u64,
    pub ball_size: usize,
    pub counterexample: Option<PropertyWitness>,
    pub regimes: Vec<Regime>,
    pub nodes: u64,
}

impl Verdict {
    pub fn found(&self) -> bool {
        self.counterexample.is_some()
    }
}

struct Search<'a> {
    g: &'a Group,
    xi: [Element; 2],
    ball: &'a [Element],
    family: Family,
    r: u64,
}

impl Search<'_> {
    fn step(&self, acc: &Element, sign: usize, x: usize) -> Element {
        self.g.mul(&self.g.mul(acc, &self.xi[sign]), &self.ball[x])
    }

    /// Depth-first over sequences of exactly `k` terms extending `seq`;
    /// returns the first hit in (x, sign) lexicographic order.
    fn dfs(
        &self,
        acc: &Element,
        seq: &mut Vec<usize>,
        signs: &mut Vec<usize>,
        k: usize,
        nodes: &mut u64,
        cap: u64,
    ) -> Option<(Vec<usize>, Vec<usize>)> {
        if seq.len() == k {
            return (self.g.length(acc) <= self.r).then(|| (seq.clone(), signs.clone()));
        }
        for x in 0..self.ball.len() {
            seq.push(x);
            if self.family.admits(seq) {
                for s in 0..2 {
                    if *nodes >= cap {
                        seq.pop();
                        return None;
                    }
                    *nodes += 1;
                    let next = self.step(acc, s, x);
                    signs.push(s);
                    let hit = self.dfs(&next, seq, signs, k, nodes, cap);
                    signs.pop();
                    if hit.is_some() {
                        seq.pop();
                        return hit;
                    }
                }
            }
            seq.pop();
        }
        None
    }

    fn witness(&self, seq: &[usize], signs: &[usize]) -> PropertyWitness {
        let mut acc = self.g.identity();
        for (&x, &s) in seq.iter().zip(signs) {
            acc = self.step(&acc, s, x);
        }
        PropertyWitness {
            signs: signs.iter().map(|&s| if s == 0 { 1 } else { -1 }).collect(),
            xs: seq.iter().map(|&x| self.g.format(&self.ball[x])).collect(),
            length: self.g.length(&acc),
            product: self.g.format(&acc),
        }
    }
}

/// Looks for `x_1, .., x_k` in `B_r \ {1}` and signs with
/// `|xi^e1 x_1 .. xi^ek x_k| <= r`. Sequence lengths are tried in increasing
/// order; each length is searched exhaustively while the ball and `k` are
/// small enough, and by seeded sampling otherwise.
pub fn test_property(spec: &PropertySpec, budget: &Budget) -> Result<Verdict> {
    let g = &spec.group;
    g.check(&spec.xi)?;
    if spec.r == 0 {
        return Err(Error::MalformedInput("r must be positive".into()));
    }
    let mut ball = g.ball(&g.identity(), spec.r).map_err(|e| match e {
        Error::ResourceLimit { what, best_upper } => Error::ResourceLimit {
            what: format!("{what}; lower r"),
            best_upper,
        },
        other => other,
    })?;
    let id = g.identity();
    ball.retain(|x| *x != id);
    ball.sort();
    let search = Search {
        g,
        xi: [spec.xi.clone(), g.inv(&spec.xi)],
        ball: &ball,
        family: spec.family,
        r: spec.r,
    };
    let mut verdict = Verdict {
        family: spec.family.to_string(),
        r: spec.r,
        ball_size: ball.len(),
        counterexample: None,
        regimes: Vec::new(),
        nodes: 0,
    };
    if ball.is_empty() {
        return Ok(verdict);
    }
    let mut sampled_from = None;
    for k in 1..=budget.k_max {
        if k > budget.exhaustive_k || ball.len() > budget.exhaustive_ball {
            sampled_from = Some(k);
            break;
        }
        let per_branch = budget.max_nodes / (2 * ball.len() as u64).max(1);
        let branches: Vec<(usize, usize)> = (0..ball.len()).flat_map(|x| [(x, 0), (x, 1)]).collect();
        let results: Vec<(Option<(Vec<usize>, Vec<usize>)>, u64, bool)> = branches
            .par_iter()
            .map(|&(x, s)| {
                let mut seq = vec![x];
                let mut signs = vec![s];
                let mut nodes = 1;
                if !spec.family.admits(&seq) {
                    return (None, 0, false);
                }
                let first = search.step(&id, s, x);
                let hit = search.dfs(&first, &mut seq, &mut signs, k, &mut nodes, per_branch.max(1));
                let capped = hit.is_none() && nodes >= per_branch.max(1);
                (hit, nodes, capped)
            })
            .collect();
        verdict.nodes += results.iter().map(|r| r.1).sum::<u64>();
        let truncated = results.iter().any(|r| r.2);
        verdict.regimes.push(if truncated {
            Regime::Truncated { k }
        } else {
            Regime::Exhaustive { k }
        });
        if let Some((seq, signs)) = results.into_iter().find_map(|r| r.0) {
            verdict.counterexample = Some(search.witness(&seq, &signs));
            return Ok(verdict);
        }
    }
    if let Some(k0) = sampled_from {
        verdict.regimes.push(Regime::Sampled);
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
        let idx: Vec<usize> = (0..ball.len()).collect();
        for _ in 0..budget.samples {
            let k = rng.gen_range(k0..=budget.k_max);
            let mut seq = Vec::with_capacity(k);
            let mut signs = Vec::with_capacity(k);
            let mut acc = id.clone();
            while seq.len() < k {
                let x = *idx.choose(&mut rng).expect("ball is not empty");
                seq.push(x);
                if !spec.family.admits(&seq) {
                    seq.pop();
                    continue;
                }
                let s = rng.gen_range(0..2);
                signs.push(s);
                acc = search.step(&acc, s, x);
            }
            verdict.nodes += k as u64;
            if g.length(&acc) <= spec.r {
                verdict.counterexample = Some(search.witness(&seq, &signs));
                break;
            }
        }
    }
    Ok(verdict)
}

/// Recomputes a witness's product from its text form.
pub fn replay_witness(spec: &PropertySpec, w: &PropertyWitness) -> Result<bool> {
    let g = &spec.group;
    if w.signs.len() != w.xs.len() || w.xs.is_empty() {
        return Ok(false);
    }
    let xs = w.xs.iter().map(|x| g.parse_element(x)).collect::<Result<Vec<_>>>()?;
    let id = g.identity();
    if xs.iter().any(|x| *x == id || g.length(x) > spec.r) {
        return Ok(false);
    }
    let mut order: Vec<&Element> = xs.iter().collect();
    order.sort();
    order.dedup();
    let seq: Vec<usize> = xs.iter().map(|x| order.binary_search(&x).unwrap()).collect();
    if !spec.family.admits(&seq) {
        return Ok(false);
    }
    let xi_inv = g.inv(&spec.xi);
    let mut acc = id;
    for (x, &s) in xs.iter().zip(&w.signs) {
        acc = g.mul(&acc, if s > 0 { &spec.xi } else { &xi_inv });
        acc = g.mul(&acc, x);
    }
    Ok(g.length(&acc) <= spec.r && g.length(&acc) == w.length)
}

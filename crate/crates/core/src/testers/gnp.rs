use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::word::{is_k_aperiodic, max_power_order, Letter, Word};
use crate::{Error, Result};

/// A `p`-th power factor `base^(sign p)` of the rewritten product.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    pub base: String,
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum RewriteStep {
    /// `A^p B^p -> B^p A^p` on the factors at `at` and `at + 1`.
    Commute { at: usize },
    /// `A^(ep) A^(-ep) -> 1` on the factors at `at` and `at + 1`.
    Cancel { at: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GnpCertificate {
    pub n: u32,
    pub p: u32,
    pub m: usize,
    pub k: usize,
    /// The letter standing for an arbitrary `xi`: one generator beyond the
    /// first `n`, so every identity below holds after any substitution.
    pub xi_symbol: String,
    pub us: Vec<String>,
    pub xs: Vec<String>,
    /// `xi x_1 xi^-1 x_2 .. xi x_{2k-1} xi^-1 x_{2k}`, reduced.
    pub lhs: String,
    /// `(xi u_1 xi^-1)^p u_2^p .. (xi u_{2k-1} xi^-1)^p u_{2k}^p`, reduced.
    pub rhs: String,
    pub identity_holds: bool,
    pub balanced: bool,
    pub aperiodic: bool,
    /// Smallest `j` for which the sequence is `j`-aperiodic.
    pub achieved: usize,
    pub factors: Vec<Factor>,
    pub rewriting: Vec<RewriteStep>,
    /// Replaying `rewriting` from `factors` empties the product.
    pub rewriting_valid: bool,
}

impl GnpCertificate {
    pub fn holds(&self) -> bool {
        self.identity_holds && self.balanced && self.aperiodic && self.rewriting_valid
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GnpSearch {
    pub certificate: Option<GnpCertificate>,
    pub nodes: u64,
    pub max_nodes: u64,
}

struct Dfs {
    n: i32,
    m: usize,
    len: usize,
    seq: Vec<i32>,
    // per parity class, signed count per generator
    count: [BTreeMap<i32, i64>; 2],
    nodes: u64,
    max_nodes: u64,
}

impl Dfs {
    fn ends_in_power(&self) -> bool {
        let s = &self.seq;
        let e = self.m + 1;
        (1..=s.len() / e).any(|p| {
            let start = s.len() - e * p;
            (start + p..s.len()).all(|i| s[i] == s[i - p])
        })
    }

    fn feasible(&self) -> bool {
        (0..2).all(|c| {
            let filled = (self.seq.len() + 1 - c) / 2;
            let slots = self.len / 2 - filled;
            let need: i64 = self.count[c].values().map(|v| v.abs()).sum();
            need as usize <= slots && (slots - need as usize).is_multiple_of(2)
        })
    }

    fn run(&mut self) -> bool {
        if self.seq.len() == self.len {
            return true;
        }
        let class = self.seq.len() % 2;
        for g in 1..=self.n {
            for t in [g, -g] {
                if self.nodes >= self.max_nodes {
                    return false;
                }
                self.nodes += 1;
                self.seq.push(t);
                *self.count[class].entry(g).or_default() += t.signum() as i64;
                if !self.ends_in_power() && self.feasible() && self.run() {
                    return true;
                }
                *self.count[class].entry(g).or_default() -= t.signum() as i64;
                self.seq.pop();
            }
        }
        false
    }
}

fn letter(v: i32) -> Letter {
    Letter::from_signed(v).expect("non-zero")
}

fn conj(xi: &Word, w: &Word) -> Word {
    xi.mul(w).mul(&xi.inverse())
}

fn rewrite(factors: &[(Word, i8)]) -> Option<Vec<RewriteStep>> {
    let mut f = factors.to_vec();
    let mut steps = Vec::new();
    while !f.is_empty() {
        let j = (1..f.len()).find(|&j| f[j].0 == f[0].0 && f[j].1 == -f[0].1)?;
        for at in (1..j).rev() {
            f.swap(at, at + 1);
            steps.push(RewriteStep::Commute { at });
        }
        f.drain(0..2);
        steps.push(RewriteStep::Cancel { at: 0 });
    }
    Some(steps)
}

/// Replays a rewriting log; every commutation is an instance of
/// `[X^p, Y^p] = 1`, every cancellation a free one.
pub fn replay_rewriting(factors: &[Factor], steps: &[RewriteStep]) -> bool {
    let mut f = factors.to_vec();
    for s in steps {
        match *s {
            RewriteStep::Commute { at } if at + 1 < f.len() => f.swap(at, at + 1),
            RewriteStep::Cancel { at }
                if at + 1 < f.len() && f[at].base == f[at + 1].base && f[at].sign == -f[at + 1].sign =>
            {
                f.drain(at..at + 2);
            }
            _ => return false,
        }
    }
    f.is_empty()
}

/// Builds the certificate for a given `u`-sequence (letters as signed
/// generator indices in `1..=n`).
pub fn gnp_certificate(n: u32, p: u32, m: usize, us: &[i32]) -> Result<GnpCertificate> {
    if us.is_empty() || !us.len().is_multiple_of(2) {
        return Err(Error::MalformedInput(
            "the u-sequence needs an even positive length".into(),
        ));
    }
    if us.iter().any(|&u| u == 0 || u.unsigned_abs() > n) {
        return Err(Error::OutOfRange(format!("u letters must lie in 1..={n}")));
    }
    let xi = Word::letter(Letter::generator(n + 1));
    let u: Vec<Word> = us.iter().map(|&t| Word::letter(letter(t))).collect();
    let x: Vec<Word> = u.iter().map(|w| w.pow(p as i64)).collect();
    let mut lhs = Word::identity();
    let mut rhs = Word::identity();
    let mut factors = Vec::new();
    for (i, (ui, xi_)) in u.iter().zip(&x).enumerate() {
        if i % 2 == 0 {
            lhs = lhs.mul(&xi).mul(xi_).mul(&xi.inverse());
            rhs = rhs.mul(&conj(&xi, ui).pow(p as i64));
        } else {
            lhs = lhs.mul(xi_);
            rhs = rhs.mul(&ui.pow(p as i64));
        }
        let base = Word::letter(letter(us[i].abs()));
        let base = if i % 2 == 0 { conj(&xi, &base) } else { base };
        factors.push((base, us[i].signum() as i8));
    }
    let mut balance: [BTreeMap<u32, i64>; 2] = Default::default();
    for (i, &t) in us.iter().enumerate() {
        *balance[i % 2].entry(t.unsigned_abs()).or_default() += t.signum() as i64;
    }
    let balanced = balance.iter().all(|b| b.values().all(|&v| v == 0));
    let steps = rewrite(&factors);
    let factors: Vec<Factor> = factors
        .into_iter()
        .map(|(b, s)| Factor {
            base: b.to_string(),
            sign: s,
        })
        .collect();
    let rewriting_valid = steps.as_ref().is_some_and(|s| replay_rewriting(&factors, s));
    let show = |w: &Word| if w.is_empty() { "1".to_string() } else { w.to_string() };
    Ok(GnpCertificate {
        n,
        p,
        m,
        k: us.len() / 2,
        xi_symbol: xi.to_string(),
        us: u.iter().map(show).collect(),
        xs: x.iter().map(show).collect(),
        identity_holds: lhs == rhs,
        lhs: show(&lhs),
        rhs: show(&rhs),
        balanced,
        aperiodic: is_k_aperiodic(&x, m),
        achieved: max_power_order(&x).0.max(1),
        factors,
        rewriting: steps.unwrap_or_default(),
        rewriting_valid,
    })
}

/// Searches for `u_1, .., u_2k` among the generators of `F_n` and their
/// inverses such that `x_i = u_i^p` is `m`-aperiodic and balanced in the odd
/// and in the even positions, then certifies that
/// `xi x_1 xi^-1 x_2 .. xi^-1 x_2k` is trivial in the variety `[X^p, Y^p] = 1`.
/// A failed search is reported through `certificate: None`.
pub fn gnp_counterexample(n: u32, p: u32, m: usize, k: usize, max_nodes: u64) -> Result<GnpSearch> {
    if !(2..=25).contains(&n) {
        return Err(Error::OutOfRange(format!("n = {n}, expected 2..=25")));
    }
    if p < 1 || m < 1 || k < 1 {
        return Err(Error::OutOfRange("p, m and k must be positive".into()));
    }
    // the strongest aperiodicity first, so a large m does not invite
    // degenerate runs
    let mut nodes = 0;
    for level in 1..=m {
        let mut dfs = Dfs {
            n: n as i32,
            m: level,
            len: 2 * k,
            seq: Vec::new(),
            count: Default::default(),
            nodes,
            max_nodes,
        };
        let found = dfs.run();
        nodes = dfs.nodes;
        if found {
            let mut c = gnp_certificate(n, p, m, &dfs.seq)?;
            c.achieved = level;
            return Ok(GnpSearch {
                certificate: Some(c),
                nodes,
                max_nodes,
            });
        }
        if nodes >= max_nodes {
            break;
        }
    }
    Ok(GnpSearch {
        certificate: None,
        nodes,
        max_nodes,
    })
}

use serde::{Deserialize, Serialize};

use super::lemma4::{check_xi_conditions, Lemma4Params, XiConditions};
use crate::word::{k_aperiodicity_witness, max_power_order, power_at_least, Letter, PowerWitness, Word};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma5Params {
    pub x_max_len: usize,
    /// The `x`-sequence must be this-aperiodic.
    pub input_aperiodicity: usize,
    /// The product passes when its maximal power order is below this.
    pub output_bound: usize,
    pub xi: Lemma4Params,
    /// Skip the checks on `xi` (for words not produced by the construction).
    pub waive_xi_check: bool,
}

impl Lemma5Params {
    pub const FULL: Lemma5Params = Lemma5Params {
        x_max_len: 192,
        input_aperiodicity: 10,
        output_bound: 500,
        xi: Lemma4Params::FULL,
        waive_xi_check: false,
    };

    pub const DESK: Lemma5Params = Lemma5Params {
        x_max_len: 12,
        input_aperiodicity: 10,
        output_bound: 50,
        xi: Lemma4Params::DESK,
        waive_xi_check: false,
    };
}

/// Where the letters of block `i` ended up in the reduced product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSpan {
    pub xi_start: usize,
    pub xi_len: usize,
    pub u_len: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ViolationCase {
    /// Short period, and a fourth power sits inside one surviving `xi` block.
    ShortInsideXi,
    /// Anything else: the repetition crosses block boundaries.
    CrossesBlocks,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma5Violation {
    pub witness: PowerWitness,
    pub case: ViolationCase,
    pub first_block: usize,
    pub last_block: usize,
    pub fourth_power_in_block: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma5Report {
    pub k: usize,
    pub xi_len: usize,
    pub product_len: usize,
    pub max_power_order: usize,
    pub output_bound: usize,
    pub passed: bool,
    pub xi_conditions: Option<XiConditions>,
    pub blocks: Vec<BlockSpan>,
    /// Every surviving `xi` block keeps all but `end_len` letters and every
    /// `u` block has at most `end_len` letters.
    pub block_structure_ok: bool,
    pub violation: Option<Lemma5Violation>,
}

#[derive(Clone, Copy)]
struct Origin {
    block: usize,
    from_xi: bool,
}

fn reduce_tracked(xi: &Word, xs: &[Word], eps: &[i8]) -> (Vec<Letter>, Vec<Origin>) {
    let xi_inv = xi.inverse();
    let mut out: Vec<(Letter, Origin)> = Vec::new();
    for (i, (x, &e)) in xs.iter().zip(eps).enumerate() {
        let power = if e > 0 { xi } else { &xi_inv };
        let parts = [(power, true), (x, false)];
        for (w, from_xi) in parts {
            for &l in w.letters() {
                if out.last().is_some_and(|(m, _)| *m == l.inverse()) {
                    out.pop();
                } else {
                    out.push((l, Origin { block: i, from_xi }));
                }
            }
        }
    }
    out.into_iter().unzip()
}

/// Checks that `xi^e1 x_1 .. xi^ek x_k` reduces to a word without a
/// `output_bound`-th power, and when it does not, classifies the repetition
/// against the block structure of the product.
pub fn verify_lemma5(xi: &Word, xs: &[Word], eps: &[i8], params: &Lemma5Params) -> Result<Lemma5Report> {
    if xs.is_empty() || xs.len() != eps.len() {
        return Err(Error::MalformedInput(format!(
            "{} words but {} signs",
            xs.len(),
            eps.len()
        )));
    }
    if eps.iter().any(|&e| e != 1 && e != -1) {
        return Err(Error::MalformedInput("signs must be +1 or -1".into()));
    }
    for (i, x) in xs.iter().enumerate() {
        if x.is_empty() || x.len() > params.x_max_len {
            return Err(Error::Precondition(format!(
                "x_{} has length {}, expected 1..={}",
                i + 1,
                x.len(),
                params.x_max_len
            )));
        }
    }
    if let Some(w) = k_aperiodicity_witness(xs, params.input_aperiodicity) {
        return Err(Error::Precondition(format!(
            "the x-sequence is not {}-aperiodic: x_{}..x_{} repeated {} times",
            params.input_aperiodicity,
            w.start + 1,
            w.start + w.period,
            w.exponent
        )));
    }
    let xi_conditions = (!params.waive_xi_check).then(|| check_xi_conditions(xi, &params.xi));
    if let Some(c) = &xi_conditions {
        if !c.all() {
            return Err(Error::Precondition(format!("xi fails its construction checks: {c:?}")));
        }
    }
    let (letters, origin) = reduce_tracked(xi, xs, eps);
    let k = xs.len();
    let mut blocks = vec![
        BlockSpan {
            xi_start: 0,
            xi_len: 0,
            u_len: 0
        };
        k
    ];
    for (pos, o) in origin.iter().enumerate() {
        let b = &mut blocks[o.block];
        if o.from_xi {
            if b.xi_len == 0 {
                b.xi_start = pos;
            }
            b.xi_len += 1;
        } else {
            b.u_len += 1;
        }
    }
    let slack = params.xi.end_len;
    let block_structure_ok = blocks.iter().all(|b| b.xi_len + slack >= xi.len() && b.u_len <= slack);
    let (order, witness) = max_power_order(&letters);
    let passed = order < params.output_bound;
    let violation = (!passed).then(|| {
        let w = witness.expect("orders of 2 and more carry a witness");
        let first = origin[w.start].block;
        let last = origin[w.end() - 1].block;
        let fourth = blocks.iter().any(|b| {
            let block = &letters[b.xi_start..b.xi_start + b.xi_len];
            power_at_least(block, 4).is_some_and(|p| p.period <= w.period)
        });
        let case = if 5 * w.period <= xi.len() && fourth {
            ViolationCase::ShortInsideXi
        } else {
            ViolationCase::CrossesBlocks
        };
        Lemma5Violation {
            witness: w,
            case,
            first_block: first,
            last_block: last,
            fourth_power_in_block: fourth,
        }
    });
    Ok(Lemma5Report {
        k,
        xi_len: xi.len(),
        product_len: letters.len(),
        max_power_order: order,
        output_bound: params.output_bound,
        passed,
        xi_conditions,
        blocks,
        block_structure_ok,
        violation,
    })
}

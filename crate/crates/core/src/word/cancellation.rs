//! Pieces and the metric small-cancellation condition `C'(lambda)`.
//!
//! A piece is a nonempty common prefix of two distinct elements of the
//! symmetrized set. With cyclic closure every rotation of every relator (and
//! of its inverse) is an element, and elements are counted as distinct
//! occurrences: two rotations that happen to spell the same word (a proper
//! power, or a relator conjugate to its inverse) share a piece of length
//! `n - 1`, so such relators never satisfy `C'(lambda)` for `lambda < 1 - 1/n`.

use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::{Letter, Word};
use crate::error::{Error, Result};
use crate::lce::Lce;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PieceMode {
    /// Elements are the relators and their inverses.
    Linear,
    /// Elements are all cyclic permutations of relators and inverses.
    Cyclic,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Piece {
    pub word: Word,
    /// Indices (into [`SymmetrizedSet::elements`]) of one pair sharing it.
    pub between: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SmallCancellation {
    pub holds: bool,
    pub lambda: Ratio<u64>,
    /// Longest piece over all elements.
    pub longest_piece: usize,
    /// First element (in element order) whose longest piece is too long.
    pub violation: Option<Violation>,
    /// Which notion of "distinct" the pieces were computed under.
    pub piece_variant: String,
}

/// Pieces are counted between distinct occurrences, not distinct words.
pub const PIECE_VARIANT: &str = "distinct-occurrences";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub element: Word,
    pub piece: Word,
}

#[derive(Debug, Clone, Copy)]
struct Slot {
    pos: usize,
    len: usize,
    relator: usize,
    inverted: bool,
    offset: usize,
}

#[derive(Debug, Clone)]
pub struct SymmetrizedSet {
    relators: Vec<Word>,
    mode: PieceMode,
}

fn letter_code(l: Letter) -> u32 {
    2 * l.index() + l.is_inverse() as u32
}

fn canonical_cyclic(w: &Word) -> Word {
    let inv = w.inverse();
    (0..w.len())
        .flat_map(|o| [w.rotate(o), inv.rotate(o)])
        .min()
        .unwrap_or_default()
}

impl SymmetrizedSet {
    pub fn new(words: impl IntoIterator<Item = Word>, mode: PieceMode) -> Result<Self> {
        let mut seen = BTreeMap::new();
        for w in words {
            if w.is_empty() {
                return Err(Error::MalformedInput("relator is the empty word".into()));
            }
            let key = match mode {
                PieceMode::Linear => w.clone().min(w.inverse()),
                PieceMode::Cyclic => {
                    if !w.is_cyclically_reduced() {
                        return Err(Error::MalformedInput(format!("relator {w} is not cyclically reduced")));
                    }
                    canonical_cyclic(&w)
                }
            };
            seen.entry(key).or_insert(w);
        }
        if seen.is_empty() {
            return Err(Error::MalformedInput("empty relator set".into()));
        }
        Ok(SymmetrizedSet {
            relators: seen.into_values().collect(),
            mode,
        })
    }

    pub fn mode(&self) -> PieceMode {
        self.mode
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    fn layout(&self) -> (Vec<u32>, Vec<Slot>) {
        let mut text = Vec::new();
        let mut slots = Vec::new();
        let max_code = self.relators.iter().map(|w| 2 * w.rank() + 1).max().unwrap_or(1);
        let mut sep = max_code + 1;
        for (r, w) in self.relators.iter().enumerate() {
            for (inverted, word) in [(false, w.clone()), (true, w.inverse())] {
                let base = text.len();
                let codes: Vec<u32> = word.letters().iter().map(|&l| letter_code(l)).collect();
                text.extend_from_slice(&codes);
                match self.mode {
                    PieceMode::Linear => slots.push(Slot {
                        pos: base,
                        len: word.len(),
                        relator: r,
                        inverted,
                        offset: 0,
                    }),
                    PieceMode::Cyclic => {
                        text.extend_from_slice(&codes);
                        slots.extend((0..word.len()).map(|o| Slot {
                            pos: base + o,
                            len: word.len(),
                            relator: r,
                            inverted,
                            offset: o,
                        }));
                    }
                }
                text.push(sep);
                sep += 1;
            }
        }
        (text, slots)
    }

    fn slot_word(&self, slot: &Slot) -> Word {
        let w = &self.relators[slot.relator];
        let w = if slot.inverted { w.inverse() } else { w.clone() };
        w.rotate(slot.offset)
    }

    /// All elements of the symmetrized set, in a fixed order.
    pub fn elements(&self) -> Vec<Word> {
        let (_, slots) = self.layout();
        slots.iter().map(|s| self.slot_word(s)).collect()
    }

    fn piece_len(common: usize, a: &Slot, b: &Slot) -> usize {
        let cap = a.len.min(b.len);
        if a.len == b.len && common >= a.len {
            // the same word at two distinct occurrences
            a.len - 1
        } else {
            common.min(cap)
        }
    }

    /// Every distinct nonempty piece, shortest first.
    pub fn pieces(&self) -> Vec<Piece> {
        let (text, slots) = self.layout();
        let lce = Lce::new(&text);
        let words: Vec<Word> = slots.iter().map(|s| self.slot_word(s)).collect();
        let mut found: BTreeMap<(usize, Word), (usize, usize)> = BTreeMap::new();
        for i in 0..slots.len() {
            for j in i + 1..slots.len() {
                let len = Self::piece_len(lce.query(slots[i].pos, slots[j].pos), &slots[i], &slots[j]);
                if len > 0 {
                    let word = words[i].subword(0, len);
                    found.entry((len, word)).or_insert((i, j));
                }
            }
        }
        found
            .into_iter()
            .map(|((_, word), between)| Piece { word, between })
            .collect()
    }

    /// For each element, the length of its longest piece and a partner.
    fn longest_pieces(&self) -> (Vec<Slot>, Vec<(usize, usize)>) {
        let (text, slots) = self.layout();
        let lce = Lce::new(&text);
        let mut order: Vec<usize> = (0..slots.len()).collect();
        order.sort_by_key(|&i| lce.rank(slots[i].pos));
        let mut best = vec![(0usize, usize::MAX); slots.len()];
        for (k, &a) in order.iter().enumerate() {
            let sa = &slots[a];
            for dir in [-1isize, 1] {
                let mut running = usize::MAX;
                let mut idx = k as isize;
                loop {
                    let prev = idx;
                    idx += dir;
                    if idx < 0 || idx as usize >= order.len() {
                        break;
                    }
                    let (x, y) = (order[prev as usize], order[idx as usize]);
                    running = running.min(lce.query(slots[x].pos, slots[y].pos));
                    if running <= best[a].0 {
                        break;
                    }
                    let b = order[idx as usize];
                    let len = Self::piece_len(running, sa, &slots[b]);
                    if len > best[a].0 {
                        best[a] = (len, b);
                    }
                }
            }
        }
        (slots, best)
    }

    /// `C'(num/den)`: every piece of every element `w` is shorter than
    /// `num/den * |w|`, compared in exact integer arithmetic.
    pub fn satisfies_small_cancellation(&self, num: u64, den: u64) -> Result<SmallCancellation> {
        if num == 0 || den == 0 || num >= den {
            return Err(Error::MalformedInput(format!(
                "lambda = {num}/{den} must lie strictly between 0 and 1"
            )));
        }
        let (slots, best) = self.longest_pieces();
        let mut violation = None;
        for (slot, &(len, _)) in slots.iter().zip(&best) {
            if violation.is_none() && (len as u64) * den >= num * slot.len as u64 {
                let element = self.slot_word(slot);
                let piece = element.subword(0, len);
                violation = Some(Violation { element, piece });
            }
        }
        Ok(SmallCancellation {
            holds: violation.is_none(),
            lambda: Ratio::new(num, den),
            longest_piece: best.iter().map(|b| b.0).max().unwrap_or(0),
            violation,
            piece_variant: PIECE_VARIANT.to_string(),
        })
    }
}

//! Free-group words over a finite symmetric alphabet.
//!
//! Letters are signed generator indices: `+g` is the generator `a_g`, `-g`
//! its inverse. The text form writes generators 1..=26 as `a`..`z` (inverses
//! uppercase) and higher generators as `gN` / `GN`.

mod cancellation;
mod power;

pub use cancellation::{Piece, PieceMode, SmallCancellation, SymmetrizedSet, PIECE_VARIANT};
pub use power::{is_k_aperiodic, k_aperiodicity_witness, max_power_order, power_at_least, PowerWitness};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Letter(i32);

impl Letter {
    pub fn generator(index: u32) -> Self {
        assert!(index >= 1, "generator indices start at 1");
        Letter(index as i32)
    }

    pub fn from_signed(value: i32) -> Option<Self> {
        (value != 0).then_some(Letter(value))
    }

    pub fn signed(self) -> i32 {
        self.0
    }

    pub fn index(self) -> u32 {
        self.0.unsigned_abs()
    }

    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    pub fn inverse(self) -> Self {
        Letter(-self.0)
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.index();
        if g <= 26 {
            let base = if self.is_inverse() { b'A' } else { b'a' };
            write!(f, "{}", (base + (g - 1) as u8) as char)
        } else if self.is_inverse() {
            write!(f, "G{g}")
        } else {
            write!(f, "g{g}")
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    rank: u32,
}

impl Alphabet {
    pub fn new(rank: u32) -> Result<Self> {
        if rank == 0 {
            return Err(Error::MalformedInput("alphabet rank must be at least 1".into()));
        }
        Ok(Alphabet { rank })
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn contains(&self, letter: Letter) -> bool {
        letter.index() <= self.rank
    }

    /// All `2 * rank` letters, generators before inverses.
    pub fn letters(&self) -> Vec<Letter> {
        (1..=self.rank)
            .map(Letter::generator)
            .chain((1..=self.rank).map(|g| Letter::generator(g).inverse()))
            .collect()
    }

    pub fn reduce(&self, letters: &[Letter]) -> Result<Word> {
        if let Some(bad) = letters.iter().find(|l| !self.contains(**l)) {
            return Err(Error::MalformedInput(format!(
                "letter {bad} outside alphabet of rank {}",
                self.rank
            )));
        }
        Ok(Word::reduce(letters.iter().copied()))
    }

    pub fn parse(&self, text: &str) -> Result<Word> {
        let word: Word = text.parse()?;
        if word.rank() > self.rank {
            return Err(Error::MalformedInput(format!(
                "word {word} uses generators beyond rank {}",
                self.rank
            )));
        }
        Ok(word)
    }
}

/// A freely reduced word. Equality is equality of group elements.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    pub fn letter(letter: Letter) -> Self {
        Word { letters: vec![letter] }
    }

    /// Free reduction with a stack; the result is the unique reduced form.
    pub fn reduce(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word { letters: out }
    }

    /// Wraps letters that the caller guarantees are already reduced.
    pub(crate) fn from_reduced(letters: Vec<Letter>) -> Self {
        debug_assert!(letters.windows(2).all(|w| w[1] != w[0].inverse()));
        Word { letters }
    }

    pub fn from_signed(values: &[i32]) -> Result<Self> {
        let letters = values
            .iter()
            .map(|&v| Letter::from_signed(v).ok_or_else(|| Error::MalformedInput("zero letter".into())))
            .collect::<Result<Vec<_>>>()?;
        Ok(Word::reduce(letters))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Largest generator index used (0 for the identity).
    pub fn rank(&self) -> u32 {
        self.letters.iter().map(|l| l.index()).max().unwrap_or(0)
    }

    pub fn inverse(&self) -> Self {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut out = self.letters.clone();
        let mut rest = other.letters.as_slice();
        while let (Some(&last), Some(&first)) = (out.last(), rest.first()) {
            if last != first.inverse() {
                break;
            }
            out.pop();
            rest = &rest[1..];
        }
        out.extend_from_slice(rest);
        Word { letters: out }
    }

    pub fn pow(&self, exponent: i64) -> Word {
        let base = if exponent < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..exponent.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// `true` when the first and last letters do not cancel cyclically.
    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(f), Some(l)) => self.len() == 1 || *f != l.inverse(),
            _ => true,
        }
    }

    pub fn rotate(&self, offset: usize) -> Word {
        let mut letters = self.letters.clone();
        if !letters.is_empty() {
            letters.rotate_left(offset % self.len());
        }
        Word { letters }
    }

    pub fn subword(&self, start: usize, len: usize) -> Word {
        Word::from_reduced(self.letters[start..start + len].to_vec())
    }

    /// The window `c_{1+m} .. c_n f_1 .. f_m`: the occurrence `occ` moved
    /// `m` letters to the right inside `host`.
    pub fn shift_right(&self, occ: Occurrence, m: usize) -> Result<Word> {
        let end = occ.start + occ.len;
        if end > self.len() {
            return Err(Error::OutOfRange(format!(
                "occurrence {}..{end} outside word of length {}",
                occ.start,
                self.len()
            )));
        }
        let room = self.len() - end;
        if m == 0 || m > room {
            return Err(Error::OutOfRange(format!(
                "shift {m} not in 1..={room} letters available to the right"
            )));
        }
        Ok(self.subword(occ.start + m, occ.len))
    }
}

/// A factor `E` of a host word `W = X E Y`, given by position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Occurrence {
    pub start: usize,
    pub len: usize,
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Word {
    type Err = Error;

    /// Accepts whitespace-separated tokens; a token is either `gN`/`GN` or a
    /// run of ASCII letters (`abaB`). The token `1` denotes the identity.
    fn from_str(text: &str) -> Result<Self> {
        let mut letters = Vec::new();
        for token in text.split_whitespace() {
            if token == "1" {
                continue;
            }
            let bytes = token.as_bytes();
            if bytes.len() > 1 && (bytes[0] == b'g' || bytes[0] == b'G') && bytes[1..].iter().all(u8::is_ascii_digit) {
                let g: u32 = token[1..]
                    .parse()
                    .map_err(|_| Error::MalformedInput(format!("bad generator token {token:?}")))?;
                if g == 0 {
                    return Err(Error::MalformedInput("generator index 0".into()));
                }
                let l = Letter::generator(g);
                letters.push(if bytes[0] == b'G' { l.inverse() } else { l });
                continue;
            }
            for c in token.chars() {
                let l = match c {
                    'a'..='z' => Letter::generator(c as u32 - 'a' as u32 + 1),
                    'A'..='Z' => Letter::generator(c as u32 - 'A' as u32 + 1).inverse(),
                    _ => {
                        return Err(Error::MalformedInput(format!(
                            "unexpected character {c:?} in word token {token:?}"
                        )))
                    }
                };
                letters.push(l);
            }
        }
        Ok(Word::reduce(letters))
    }
}

/// The least (in the order `a, b, .., A, B, ..`) reduced word of length
/// `len` over `rank` generators whose letter sequence contains no square.
pub fn square_free_word(len: usize, rank: u32) -> Result<Word> {
    if rank < 2 && len > 1 {
        return Err(Error::OutOfRange(format!(
            "no square-free reduced word of length {len} over rank {rank}"
        )));
    }
    let alphabet: Vec<Letter> = (1..=rank as i32)
        .chain((1..=rank as i32).map(|g| -g))
        .map(Letter)
        .collect();
    let ends_in_square = |s: &[Letter]| {
        let n = s.len();
        (1..=n / 2).any(|p| s[n - 2 * p..n - p] == s[n - p..])
    };
    let mut out: Vec<Letter> = Vec::with_capacity(len);
    let mut next_choice = vec![0usize; len + 1];
    while out.len() < len {
        let depth = out.len();
        let mut placed = false;
        while next_choice[depth] < alphabet.len() {
            let l = alphabet[next_choice[depth]];
            next_choice[depth] += 1;
            if out.last() == Some(&l.inverse()) {
                continue;
            }
            out.push(l);
            if ends_in_square(&out) {
                out.pop();
                continue;
            }
            placed = true;
            break;
        }
        if !placed {
            next_choice[depth] = 0;
            if out.pop().is_none() {
                return Err(Error::Internal("square-free search exhausted".into()));
            }
        }
    }
    Ok(Word::from_reduced(out))
}

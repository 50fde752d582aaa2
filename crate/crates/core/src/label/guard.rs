use std::cmp::Ordering;

/// Strength of the repetition that appending a token would complete: the
/// longest suffix of period `period` has length `len`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Threat {
    pub len: usize,
    pub period: usize,
}

impl Threat {
    const NONE: Threat = Threat { len: 0, period: 1 };

    /// Whether the repetition contains `exponent` full copies of its period.
    pub fn reaches(&self, exponent: usize) -> bool {
        self.len >= exponent * self.period
    }
}

impl Ord for Threat {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.len * other.period)
            .cmp(&(other.len * self.period))
            .then(self.len.cmp(&other.len))
            .then(other.period.cmp(&self.period))
    }
}

impl PartialOrd for Threat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A label sequence together with, for every period `p`, the number of
/// trailing positions `i` with `s[i] == s[i - p]`.
#[derive(Debug, Clone)]
pub struct RepetitionGuard<T> {
    history: Vec<T>,
    runs: Vec<usize>,
}

impl<T> Default for RepetitionGuard<T> {
    fn default() -> Self {
        RepetitionGuard {
            history: Vec::new(),
            runs: Vec::new(),
        }
    }
}

impl<T: Clone + PartialEq> RepetitionGuard<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_history(seq: &[T]) -> Self {
        let mut g = Self::new();
        for t in seq {
            g.push(t.clone());
        }
        g
    }

    pub fn history(&self) -> &[T] {
        &self.history
    }

    fn extended_run(&self, p: usize, token: &T) -> usize {
        let n = self.history.len();
        if self.history[n - p] == *token {
            self.runs[p - 1] + 1
        } else {
            0
        }
    }

    /// The strongest repetition ending at the new last position if `token`
    /// were appended.
    pub fn threat(&self, token: &T) -> Threat {
        let n = self.history.len();
        (1..=n)
            .filter_map(|p| {
                let run = self.extended_run(p, token);
                (run > 0).then_some(Threat {
                    len: run + p,
                    period: p,
                })
            })
            .max()
            .unwrap_or(Threat::NONE)
    }

    pub fn push(&mut self, token: T) {
        let n = self.history.len();
        let mut runs: Vec<usize> = (1..=n).map(|p| self.extended_run(p, &token)).collect();
        runs.push(0);
        self.runs = runs;
        self.history.push(token);
    }

    /// The candidate whose appending would complete the strongest
    /// repetition; ties go to the earliest candidate.
    pub fn most_threatening<'a>(&self, candidates: &'a [T]) -> Option<&'a T> {
        let mut best: Option<(&T, Threat)> = None;
        for c in candidates {
            let t = self.threat(c);
            if best.is_none_or(|(_, b)| t > b) {
                best = Some((c, t));
            }
        }
        best.map(|(c, _)| c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threat_tracks_trailing_period() {
        let g = RepetitionGuard::from_history(&['a', 'b', 'a', 'b', 'a']);
        let t = g.threat(&'b');
        assert_eq!(t, Threat { len: 6, period: 2 });
        assert!(t.reaches(3));
        assert!(!t.reaches(4));
        let g = RepetitionGuard::from_history(&['a', 'a']);
        assert_eq!(g.threat(&'a'), Threat { len: 3, period: 1 });
        assert_eq!(g.threat(&'b'), Threat::NONE);
    }

    #[test]
    fn incremental_runs_match_naive() {
        let seq: Vec<u8> = b"abaabaabbabaababaaab".to_vec();
        let mut g = RepetitionGuard::new();
        for (i, &c) in seq.iter().enumerate() {
            g.push(c);
            for p in 1..=i {
                let naive = (0..=i - p).rev().take_while(|&j| seq[j] == seq[j + p]).count();
                assert_eq!(g.runs[p - 1], naive, "i = {i}, p = {p}");
            }
        }
    }
}

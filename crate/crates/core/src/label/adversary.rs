use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::guard::RepetitionGuard;

/// Picks the labels for the lower edges of a vertex after the labeler has
/// announced its inadmissible element. The labeler validates every answer.
pub trait Adversary<T> {
    /// Returns `count` distinct tokens of `candidates`, none equal to
    /// `inadmissible`. `history` is the label sequence from the origin.
    fn choose(&mut self, vertex: usize, candidates: &[T], inadmissible: &T, count: usize, history: &[T]) -> Vec<T>;
}

fn admissible<'a, T: PartialEq>(candidates: &'a [T], z: &'a T) -> impl Iterator<Item = &'a T> {
    candidates.iter().filter(move |c| *c != z)
}

/// Takes admissible candidates in the order they are listed.
#[derive(Debug, Clone, Copy, Default)]
pub struct ForcedAdversary;

impl<T: Clone + PartialEq> Adversary<T> for ForcedAdversary {
    fn choose(&mut self, _: usize, candidates: &[T], z: &T, count: usize, _: &[T]) -> Vec<T> {
        admissible(candidates, z).take(count).cloned().collect()
    }
}

/// Takes the smallest admissible tokens.
#[derive(Debug, Clone, Copy, Default)]
pub struct LeastAdversary;

impl<T: Clone + Ord> Adversary<T> for LeastAdversary {
    fn choose(&mut self, _: usize, candidates: &[T], z: &T, count: usize, _: &[T]) -> Vec<T> {
        let mut pool: Vec<T> = admissible(candidates, z).cloned().collect();
        pool.sort();
        pool.truncate(count);
        pool
    }
}

/// Uniformly random admissible tokens from a seeded stream.
#[derive(Debug, Clone)]
pub struct RandomAdversary {
    rng: ChaCha8Rng,
}

impl RandomAdversary {
    pub fn new(seed: u64) -> Self {
        RandomAdversary {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl<T: Clone + PartialEq> Adversary<T> for RandomAdversary {
    fn choose(&mut self, _: usize, candidates: &[T], z: &T, count: usize, _: &[T]) -> Vec<T> {
        let pool: Vec<T> = admissible(candidates, z).cloned().collect();
        pool.choose_multiple(&mut self.rng, count).cloned().collect()
    }
}

/// Prefers the admissible tokens that extend the strongest repetition.
#[derive(Debug, Clone, Copy, Default)]
pub struct RepeatingAdversary;

impl<T: Clone + PartialEq> Adversary<T> for RepeatingAdversary {
    fn choose(&mut self, _: usize, candidates: &[T], z: &T, count: usize, history: &[T]) -> Vec<T> {
        let guard = RepetitionGuard::from_history(history);
        let mut pool: Vec<(usize, T)> = admissible(candidates, z).cloned().enumerate().collect();
        pool.sort_by(|a, b| guard.threat(&b.1).cmp(&guard.threat(&a.1)).then(a.0.cmp(&b.0)));
        pool.into_iter().take(count).map(|(_, t)| t).collect()
    }
}

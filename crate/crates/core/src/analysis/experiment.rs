use num_rational::Ratio;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::related::{revise, RelatedSet};
use super::tsp::{distance_matrix, heuristic_matrix, l_prime_matrix, tsp_exact_matrix, TourKind};
use crate::error::{Error, Result};
use crate::group::{Element, Group};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Sampler {
    /// Unions of xi-chains `g, g xi, .., g xi^(m-1)` with `g` a random walk
    /// of length at most `walk_len` and `2 <= m <= chain_max`.
    Chains { walk_len: usize, chain_max: usize },
    /// `B` union `B xi` for an axis-parallel box `B` in a free abelian group.
    Boxes { side_min: u64, side_max: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub lambda: Ratio<u64>,
    pub samples: usize,
    pub max_size: usize,
    pub seed: u64,
    pub sampler: Sampler,
    pub exact_cap: usize,
    /// Replace every sample by the union of its revision pairs.
    pub revised: bool,
    /// Also compute `L'(S)`.
    pub l_prime: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            lambda: Ratio::from_integer(2),
            samples: 200,
            max_size: 12,
            seed: 0,
            sampler: Sampler::Chains {
                walk_len: 4,
                chain_max: 4,
            },
            exact_cap: super::tsp::DEFAULT_EXACT_CAP,
            revised: true,
            l_prime: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleOutcome {
    pub index: usize,
    pub size: usize,
    #[serde(rename = "L")]
    pub l: u64,
    /// Whether `L` is exact or only the length of an explicit tour.
    pub l_kind: TourKind,
    #[serde(rename = "Lprime", skip_serializing_if = "Option::is_none")]
    pub l_prime: Option<i64>,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub index: usize,
    pub size: usize,
    /// The functional that fell short: `L` or `Lprime`.
    pub functional: String,
    pub value: i64,
    pub elements: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub group: String,
    pub xi: String,
    pub per_sample: Vec<SampleOutcome>,
    pub min_ratio: Option<f64>,
    /// Samples certified to have `L(S) < lambda |S|`.
    pub violations: Vec<Violation>,
    /// Samples with `L'(S) <= lambda |S|`.
    pub l_prime_violations: Vec<Violation>,
    /// Samples whose `L` is above the exact cap and whose explicit tour does
    /// not settle the comparison with `lambda |S|`.
    pub undecided: usize,
    pub sampler_note: String,
}

fn chains(
    group: &Group,
    xi: &Element,
    walk_len: usize,
    chain_max: usize,
    max_size: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Element> {
    let mut out: Vec<Element> = Vec::new();
    let mut misses = 0;
    while misses < 8 {
        let len = rng.gen_range(0..=walk_len);
        let base = group.random_walk(len, rng);
        let m = rng.gen_range(2..=chain_max.max(2));
        let chain: Vec<Element> = (0..m as i64).map(|k| group.mul(&base, &group.pow(xi, k))).collect();
        let mut merged = out.clone();
        merged.extend(chain);
        merged.sort();
        merged.dedup();
        if merged.len() <= max_size {
            out = merged;
        } else {
            misses += 1;
        }
        if out.len() + 2 > max_size {
            break;
        }
    }
    out
}

fn boxes(xi: &Element, side_min: u64, side_max: u64, rng: &mut ChaCha8Rng) -> Result<Vec<Element>> {
    let Element::Abelian(shift) = xi else {
        return Err(Error::Config("the box sampler needs a free abelian group".into()));
    };
    let sides: Vec<u64> = shift.iter().map(|_| rng.gen_range(side_min..=side_max)).collect();
    let mut out = box_points(&sides);
    let moved: Vec<Element> = out
        .iter()
        .map(|p| match p {
            Element::Abelian(v) => Element::Abelian(v.iter().zip(shift).map(|(a, b)| a + b).collect()),
            _ => unreachable!(),
        })
        .collect();
    out.extend(moved);
    Ok(out)
}

/// All points of `[0, s_1) x .. x [0, s_n)`.
pub fn box_points(sides: &[u64]) -> Vec<Element> {
    let mut out = vec![Vec::new()];
    for &s in sides {
        out = out
            .into_iter()
            .flat_map(|p: Vec<i64>| {
                (0..s as i64).map(move |c| {
                    let mut q = p.clone();
                    q.push(c);
                    q
                })
            })
            .collect();
    }
    out.into_iter().map(Element::Abelian).collect()
}

/// Draws sample `index` of an experiment; deterministic in `(seed, index)`.
pub fn sample_related_set(group: &Group, xi: &Element, config: &ExperimentConfig, index: usize) -> Result<RelatedSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index as u64);
    let raw = match &config.sampler {
        Sampler::Chains { walk_len, chain_max } => {
            chains(group, xi, *walk_len, *chain_max, config.max_size.max(2), &mut rng)
        }
        Sampler::Boxes { side_min, side_max } => boxes(xi, *side_min, *side_max, &mut rng)?,
    };
    let set = RelatedSet::new(group.clone(), xi.clone(), raw)?;
    if config.revised {
        revise(&set)?.revised_subset()
    } else {
        Ok(set)
    }
}

struct Evaluated {
    outcome: SampleOutcome,
    violation: Option<Violation>,
    l_prime_violation: Option<Violation>,
    undecided: bool,
}

fn evaluate(set: &RelatedSet, config: &ExperimentConfig, index: usize) -> Result<Evaluated> {
    let d = distance_matrix(set.group(), set.elements());
    let n = set.len() as u64;
    let (num, den) = (*config.lambda.numer(), *config.lambda.denom());
    let tour = match tsp_exact_matrix(&d, config.exact_cap) {
        Ok(t) => t,
        Err(Error::ResourceLimit { .. }) => heuristic_matrix(&d, config.seed ^ index as u64),
        Err(e) => return Err(e),
    };
    let below = tour.length * den < num * n;
    let exact = tour.kind == TourKind::Exact;
    let l_prime = if config.l_prime && exact {
        Some(l_prime_matrix(&d, config.exact_cap)?)
    } else {
        None
    };
    let text = || set.elements().iter().map(|e| set.group().format(e)).collect::<Vec<_>>();
    let violation = below.then(|| Violation {
        index,
        size: set.len(),
        functional: "L".into(),
        value: tour.length as i64,
        elements: text(),
    });
    let l_prime_violation = l_prime
        .filter(|&lp| (lp as i128) * (den as i128) <= (num as i128) * (n as i128))
        .map(|lp| Violation {
            index,
            size: set.len(),
            functional: "Lprime".into(),
            value: lp,
            elements: text(),
        });
    Ok(Evaluated {
        outcome: SampleOutcome {
            index,
            size: set.len(),
            l: tour.length,
            l_kind: tour.kind,
            l_prime,
            ratio: tour.length as f64 / n.max(1) as f64,
        },
        violation,
        l_prime_violation,
        undecided: !exact && !below,
    })
}

/// Samples xi-related sets and compares `L(S)` (and optionally `L'(S)`)
/// with `lambda |S|`. Samples run in parallel and are merged by index.
pub fn ts_lambda_experiment(group: &Group, xi: &Element, config: &ExperimentConfig) -> Result<ExperimentReport> {
    group.check(xi)?;
    if *xi == group.identity() {
        return Err(Error::DegenerateXi);
    }
    let results: Vec<Result<Evaluated>> = (0..config.samples)
        .into_par_iter()
        .map(|i| evaluate(&sample_related_set(group, xi, config, i)?, config, i))
        .collect();
    let mut report = ExperimentReport {
        config: config.clone(),
        group: group.descriptor().to_string(),
        xi: group.format(xi),
        per_sample: Vec::with_capacity(config.samples),
        min_ratio: None,
        violations: Vec::new(),
        l_prime_violations: Vec::new(),
        undecided: 0,
        sampler_note: "finite random samples stand in for the quantifier over all finite xi-related sets".into(),
    };
    for r in results {
        let e = r?;
        report.min_ratio = Some(
            report
                .min_ratio
                .map_or(e.outcome.ratio, |m: f64| m.min(e.outcome.ratio)),
        );
        report.per_sample.push(e.outcome);
        report.violations.extend(e.violation);
        report.l_prime_violations.extend(e.l_prime_violation);
        report.undecided += usize::from(e.undecided);
    }
    Ok(report)
}

impl ExperimentReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,size,L,L_kind,Lprime,ratio\n");
        for s in &self.per_sample {
            let kind = match s.l_kind {
                TourKind::Exact => "exact",
                TourKind::HeuristicUpper => "heuristic-upper",
                TourKind::MstLower => "mst-lower",
            };
            let lp = s.l_prime.map(|v| v.to_string()).unwrap_or_default();
            out.push_str(&format!("{},{},{},{kind},{lp},{:.6}\n", s.index, s.size, s.l, s.ratio));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::square_free_word;

    #[test]
    fn deterministic_samples() {
        let g = Group::parse("free:2").unwrap();
        let xi = Element::Free(square_free_word(9, 2).unwrap());
        let c = ExperimentConfig {
            samples: 6,
            ..ExperimentConfig::default()
        };
        let a = ts_lambda_experiment(&g, &xi, &c).unwrap();
        let b = ts_lambda_experiment(&g, &xi, &c).unwrap();
        assert_eq!(a, b);
        for s in &a.per_sample {
            assert!(s.size <= c.max_size && s.size >= 2 && s.size % 2 == 0);
        }
        assert!(a.violations.is_empty());
        assert!(a.to_csv().lines().count() == 7);
    }

    #[test]
    fn boxes_violate_large_lambda() {
        let g = Group::parse("abelian:2").unwrap();
        let xi = Element::Abelian(vec![1, 0]);
        let c = ExperimentConfig {
            lambda: Ratio::from_integer(3),
            samples: 4,
            sampler: Sampler::Boxes {
                side_min: 2,
                side_max: 3,
            },
            revised: false,
            l_prime: false,
            ..ExperimentConfig::default()
        };
        let r = ts_lambda_experiment(&g, &xi, &c).unwrap();
        assert_eq!(r.violations.len(), 4);
        let bad = ExperimentConfig {
            sampler: Sampler::Boxes {
                side_min: 2,
                side_max: 2,
            },
            ..c
        };
        let free = Group::parse("free:2").unwrap();
        assert!(ts_lambda_experiment(&free, &Element::Free("a".parse().unwrap()), &bad).is_err());
    }

    #[test]
    fn box_points_enumerate() {
        assert_eq!(box_points(&[2, 3]).len(), 6);
        assert_eq!(box_points(&[4]).len(), 4);
    }
}

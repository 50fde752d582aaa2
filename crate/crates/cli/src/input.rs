use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use num_rational::Ratio;
use ts_groups::group::{Element, Group, Limits};
use ts_groups::word::Word;

/// Rough heap cost of one stored element, used to turn a memory budget into
/// ball and frontier caps.
const BYTES_PER_ELEMENT: usize = 96;

pub fn limits_from_budget(mb: Option<u64>) -> Limits {
    match mb {
        None => Limits::default(),
        Some(mb) => {
            let n = (mb as usize).saturating_mul(1 << 20) / BYTES_PER_ELEMENT;
            Limits {
                max_ball: n.max(1),
                max_frontier: n.max(1),
            }
        }
    }
}

pub fn group(descriptor: &str, limits: Limits) -> Result<Group> {
    let mut g = Group::parse(descriptor)?;
    g.set_limits(limits);
    Ok(g)
}

fn content_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// One group element per line.
pub fn read_elements(group: &Group, path: &Path) -> Result<Vec<Element>> {
    content_lines(&read(path)?)
        .map(|l| group.parse_element(l).map_err(Into::into))
        .collect()
}

pub fn read_words(path: &Path) -> Result<Vec<Word>> {
    content_lines(&read(path)?)
        .map(|l| l.parse::<Word>().map_err(Into::into))
        .collect()
}

/// A word given inline or as the path of a one-word file.
pub fn word_arg(arg: &str) -> Result<Word> {
    let p = Path::new(arg);
    if p.is_file() {
        let words = read_words(p)?;
        match words.as_slice() {
            [w] => Ok(w.clone()),
            _ => Err(ts_groups::Error::MalformedInput(format!(
                "{} holds {} words, expected one",
                p.display(),
                words.len()
            ))
            .into()),
        }
    } else {
        Ok(arg.parse()?)
    }
}

/// A group element given inline or as a one-line file.
pub fn element_arg(group: &Group, arg: &str) -> Result<Element> {
    let p = Path::new(arg);
    if p.is_file() {
        let els = read_elements(group, p)?;
        match els.as_slice() {
            [e] => Ok(e.clone()),
            _ => Err(ts_groups::Error::MalformedInput(format!(
                "{} holds {} elements, expected one",
                p.display(),
                els.len()
            ))
            .into()),
        }
    } else {
        Ok(group.parse_element(arg)?)
    }
}

pub fn ratio(text: &str) -> Result<Ratio<u64>> {
    let bad = || ts_groups::Error::MalformedInput(format!("{text:?} is not a positive rational"));
    let (n, d) = match text.split_once('/') {
        Some((n, d)) => (
            n.trim().parse().map_err(|_| bad())?,
            d.trim().parse().map_err(|_| bad())?,
        ),
        None => (text.trim().parse().map_err(|_| bad())?, 1),
    };
    if d == 0 {
        return Err(bad().into());
    }
    Ok(Ratio::new(n, d))
}

/// `"+-+"` as signs.
pub fn signs(text: &str) -> Result<Vec<i8>> {
    text.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '+' => Ok(1),
            '-' => Ok(-1),
            _ => Err(ts_groups::Error::MalformedInput(format!("sign {c:?} is neither + nor -")).into()),
        })
        .collect()
}

pub fn list<T: std::str::FromStr>(text: &str) -> Result<Vec<T>> {
    text.split([',', ' '])
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| ts_groups::Error::MalformedInput(format!("cannot parse {t:?} in {text:?}")).into())
        })
        .collect()
}

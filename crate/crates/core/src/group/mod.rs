//! Cayley-length oracles for free groups, free abelian groups, direct
//! products and `F(a, b) x Z` with generating set `{a, b, a^n z}`.
//!
//! Metrics are left invariant: `d(g, h) = |g^-1 h|`. In `F(a, b) x Z` an
//! element `(w, t)` is the pair of its free part and its `z`-exponent, and a
//! free word `xi` is read as `(xi, 0)`.

mod f2xz;

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::word::{Alphabet, Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupDescriptor {
    Free(u32),
    Abelian(u32),
    Product(Box<GroupDescriptor>, Box<GroupDescriptor>),
    F2xZ { n: u32 },
}

impl GroupDescriptor {
    pub fn product(left: GroupDescriptor, right: GroupDescriptor) -> Self {
        GroupDescriptor::Product(Box::new(left), Box::new(right))
    }

    /// Number of `;`-separated fields in the element text form.
    fn fields(&self) -> usize {
        match self {
            GroupDescriptor::Product(l, r) => l.fields() + r.fields(),
            GroupDescriptor::F2xZ { .. } => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupDescriptor::Free(k) => write!(f, "free:{k}"),
            GroupDescriptor::Abelian(k) => write!(f, "abelian:{k}"),
            GroupDescriptor::Product(l, r) => write!(f, "prod({l},{r})"),
            GroupDescriptor::F2xZ { n } => write!(f, "f2xz:n={n}"),
        }
    }
}

fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

impl FromStr for GroupDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Config(format!("unknown group descriptor {s:?}"));
        if let Some(inner) = s.strip_prefix("prod(").and_then(|r| r.strip_suffix(')')) {
            let parts = split_top_level(inner);
            if parts.len() < 2 {
                return Err(bad());
            }
            let mut it = parts.into_iter().map(str::parse::<GroupDescriptor>);
            let first = it.next().unwrap()?;
            return it.try_fold(first, |acc, d| Ok(GroupDescriptor::product(acc, d?)));
        }
        let (kind, arg) = s.split_once(':').ok_or_else(bad)?;
        let num = |t: &str| t.trim().parse::<u32>().ok().filter(|&k| k >= 1).ok_or_else(bad);
        match kind.trim() {
            "free" => Ok(GroupDescriptor::Free(num(arg)?)),
            "abelian" => Ok(GroupDescriptor::Abelian(num(arg)?)),
            "f2xz" => {
                let n = arg.trim().strip_prefix("n=").unwrap_or(arg);
                Ok(GroupDescriptor::F2xZ { n: num(n)? })
            }
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Element {
    Free(Word),
    Abelian(Vec<i64>),
    Pair(Box<Element>, Box<Element>),
    F2xZ(Word, i64),
}

impl Element {
    pub fn pair(left: Element, right: Element) -> Self {
        Element::Pair(Box::new(left), Box::new(right))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    /// Largest ball that may be enumerated.
    pub max_ball: usize,
    /// Largest number of vertices a breadth-first search may visit.
    pub max_frontier: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_ball: 1_000_000,
            max_frontier: 10_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Group {
    descriptor: GroupDescriptor,
    limits: Limits,
}

fn pos_word(rank: u32, w: &Word) -> bool {
    w.letters().iter().all(|l| l.index() <= rank)
}

impl Group {
    pub fn new(descriptor: GroupDescriptor) -> Result<Self> {
        Self::with_limits(descriptor, Limits::default())
    }

    pub fn with_limits(descriptor: GroupDescriptor, limits: Limits) -> Result<Self> {
        fn valid(d: &GroupDescriptor) -> bool {
            match d {
                GroupDescriptor::Free(k) | GroupDescriptor::Abelian(k) => *k >= 1,
                GroupDescriptor::F2xZ { n } => *n >= 1,
                GroupDescriptor::Product(l, r) => valid(l) && valid(r),
            }
        }
        if !valid(&descriptor) {
            return Err(Error::Config(format!("degenerate group descriptor {descriptor}")));
        }
        Ok(Group { descriptor, limits })
    }

    pub fn parse(descriptor: &str) -> Result<Self> {
        Self::new(descriptor.parse()?)
    }

    pub fn descriptor(&self) -> &GroupDescriptor {
        &self.descriptor
    }

    pub fn limits(&self) -> Limits {
        self.limits
    }

    pub fn set_limits(&mut self, limits: Limits) {
        self.limits = limits;
    }

    fn factor(&self, d: &GroupDescriptor) -> Group {
        Group {
            descriptor: d.clone(),
            limits: self.limits,
        }
    }

    pub fn is_free(&self) -> bool {
        matches!(self.descriptor, GroupDescriptor::Free(_))
    }

    pub fn identity(&self) -> Element {
        match &self.descriptor {
            GroupDescriptor::Free(_) => Element::Free(Word::identity()),
            GroupDescriptor::Abelian(k) => Element::Abelian(vec![0; *k as usize]),
            GroupDescriptor::Product(l, r) => Element::pair(self.factor(l).identity(), self.factor(r).identity()),
            GroupDescriptor::F2xZ { .. } => Element::F2xZ(Word::identity(), 0),
        }
    }

    pub fn contains(&self, g: &Element) -> bool {
        match (&self.descriptor, g) {
            (GroupDescriptor::Free(k), Element::Free(w)) => pos_word(*k, w),
            (GroupDescriptor::Abelian(k), Element::Abelian(v)) => v.len() == *k as usize,
            (GroupDescriptor::Product(l, r), Element::Pair(a, b)) => {
                self.factor(l).contains(a) && self.factor(r).contains(b)
            }
            (GroupDescriptor::F2xZ { .. }, Element::F2xZ(w, _)) => pos_word(2, w),
            _ => false,
        }
    }

    pub fn check(&self, g: &Element) -> Result<()> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(Error::MalformedInput(format!(
                "{} is not an element of {}",
                self.format(g),
                self.descriptor
            )))
        }
    }

    /// The symmetric generating set.
    pub fn generators(&self) -> Vec<Element> {
        match &self.descriptor {
            GroupDescriptor::Free(k) => (1..=*k)
                .flat_map(|i| {
                    let l = Letter::generator(i);
                    [l, l.inverse()]
                })
                .map(|l| Element::Free(Word::letter(l)))
                .collect(),
            GroupDescriptor::Abelian(k) => (0..*k as usize)
                .flat_map(|i| {
                    [1, -1].map(|s| {
                        let mut v = vec![0; *k as usize];
                        v[i] = s;
                        Element::Abelian(v)
                    })
                })
                .collect(),
            GroupDescriptor::Product(l, r) => {
                let (gl, gr) = (self.factor(l), self.factor(r));
                let mut out: Vec<Element> = gl
                    .generators()
                    .into_iter()
                    .map(|g| Element::pair(g, gr.identity()))
                    .collect();
                out.extend(gr.generators().into_iter().map(|g| Element::pair(gl.identity(), g)));
                out
            }
            GroupDescriptor::F2xZ { n } => {
                let a = Letter::generator(1);
                let b = Letter::generator(2);
                let an = Word::letter(a).pow(*n as i64);
                vec![
                    Element::F2xZ(Word::letter(a), 0),
                    Element::F2xZ(Word::letter(a.inverse()), 0),
                    Element::F2xZ(Word::letter(b), 0),
                    Element::F2xZ(Word::letter(b.inverse()), 0),
                    Element::F2xZ(an.clone(), 1),
                    Element::F2xZ(an.inverse(), -1),
                ]
            }
        }
    }

    pub fn mul(&self, x: &Element, y: &Element) -> Element {
        match (x, y) {
            (Element::Free(a), Element::Free(b)) => Element::Free(a.mul(b)),
            (Element::Abelian(a), Element::Abelian(b)) => {
                Element::Abelian(a.iter().zip(b).map(|(p, q)| p + q).collect())
            }
            (Element::Pair(a1, b1), Element::Pair(a2, b2)) => {
                let GroupDescriptor::Product(l, r) = &self.descriptor else {
                    panic!("pair element outside a product group");
                };
                Element::pair(self.factor(l).mul(a1, a2), self.factor(r).mul(b1, b2))
            }
            (Element::F2xZ(a, s), Element::F2xZ(b, t)) => Element::F2xZ(a.mul(b), s + t),
            _ => panic!("elements of different groups multiplied"),
        }
    }

    pub fn inv(&self, x: &Element) -> Element {
        match x {
            Element::Free(w) => Element::Free(w.inverse()),
            Element::Abelian(v) => Element::Abelian(v.iter().map(|c| -c).collect()),
            Element::Pair(a, b) => {
                let GroupDescriptor::Product(l, r) = &self.descriptor else {
                    panic!("pair element outside a product group");
                };
                Element::pair(self.factor(l).inv(a), self.factor(r).inv(b))
            }
            Element::F2xZ(w, t) => Element::F2xZ(w.inverse(), -t),
        }
    }

    /// `x^-1 y`.
    pub fn quotient(&self, x: &Element, y: &Element) -> Element {
        self.mul(&self.inv(x), y)
    }

    pub fn pow(&self, x: &Element, k: i64) -> Element {
        let base = if k < 0 { self.inv(x) } else { x.clone() };
        (0..k.unsigned_abs()).fold(self.identity(), |acc, _| self.mul(&acc, &base))
    }

    /// Exact word length with respect to the generating set.
    pub fn length(&self, g: &Element) -> u64 {
        match (&self.descriptor, g) {
            (_, Element::Free(w)) => w.len() as u64,
            (_, Element::Abelian(v)) => v.iter().map(|c| c.unsigned_abs()).sum(),
            (GroupDescriptor::Product(l, r), Element::Pair(a, b)) => {
                self.factor(l).length(a) + self.factor(r).length(b)
            }
            (GroupDescriptor::F2xZ { n }, Element::F2xZ(w, t)) => f2xz::solve(w, *t, *n).0,
            _ => panic!("element does not belong to {}", self.descriptor),
        }
    }

    pub fn distance(&self, x: &Element, y: &Element) -> u64 {
        self.length(&self.quotient(x, y))
    }

    /// A shortest sequence of generators whose product is `g`.
    pub fn geodesic(&self, g: &Element) -> Vec<Element> {
        match (&self.descriptor, g) {
            (_, Element::Free(w)) => w.letters().iter().map(|&l| Element::Free(Word::letter(l))).collect(),
            (_, Element::Abelian(v)) => {
                let mut out = Vec::new();
                for (i, &c) in v.iter().enumerate() {
                    let mut step = vec![0; v.len()];
                    step[i] = c.signum();
                    out.extend(std::iter::repeat_n(Element::Abelian(step), c.unsigned_abs() as usize));
                }
                out
            }
            (GroupDescriptor::Product(l, r), Element::Pair(a, b)) => {
                let (gl, gr) = (self.factor(l), self.factor(r));
                let mut out: Vec<Element> = gl
                    .geodesic(a)
                    .into_iter()
                    .map(|x| Element::pair(x, gr.identity()))
                    .collect();
                out.extend(gr.geodesic(b).into_iter().map(|y| Element::pair(gl.identity(), y)));
                out
            }
            (GroupDescriptor::F2xZ { n }, Element::F2xZ(w, t)) => {
                let an = Word::letter(Letter::generator(1)).pow(*n as i64);
                f2xz::geodesic(w, *t, *n)
                    .into_iter()
                    .map(|l| match l.index() {
                        3 if l.is_inverse() => Element::F2xZ(an.inverse(), -1),
                        3 => Element::F2xZ(an.clone(), 1),
                        _ => Element::F2xZ(Word::letter(l), 0),
                    })
                    .collect()
            }
            _ => panic!("element does not belong to {}", self.descriptor),
        }
    }

    /// Vertices visited when walking a geodesic from `x` to `y`, both ends
    /// included.
    pub fn geodesic_between(&self, x: &Element, y: &Element) -> Vec<Element> {
        let mut cur = x.clone();
        let mut out = vec![cur.clone()];
        for s in self.geodesic(&self.quotient(x, y)) {
            cur = self.mul(&cur, &s);
            out.push(cur.clone());
        }
        out
    }

    /// Breadth-first search distance, bounded by the frontier limit. On
    /// exhaustion the error carries the best upper bound known.
    pub fn bfs_distance(&self, x: &Element, y: &Element) -> Result<u64> {
        let target = self.quotient(x, y);
        let id = self.identity();
        if target == id {
            return Ok(0);
        }
        let gens = self.generators();
        // searches from both ends; meet in the middle
        let mut seen = [
            HashMap::from([(id.clone(), 0u64)]),
            HashMap::from([(target.clone(), 0u64)]),
        ];
        let mut frontier = [vec![id], vec![target]];
        let mut depth = [0u64, 0u64];
        loop {
            let side = if frontier[0].len() <= frontier[1].len() { 0 } else { 1 };
            if frontier[side].is_empty() {
                return Err(Error::Internal("Cayley graph search ran dry".into()));
            }
            depth[side] += 1;
            let mut next = Vec::new();
            for v in std::mem::take(&mut frontier[side]) {
                for s in &gens {
                    let u = if side == 0 {
                        self.mul(&v, s)
                    } else {
                        self.mul(&v, &self.inv(s))
                    };
                    if seen[side].contains_key(&u) {
                        continue;
                    }
                    if let Some(d) = seen[1 - side].get(&u) {
                        return Ok(depth[side] + d);
                    }
                    seen[side].insert(u.clone(), depth[side]);
                    next.push(u);
                }
            }
            if seen[0].len() + seen[1].len() > self.limits.max_frontier {
                return Err(Error::ResourceLimit {
                    what: format!("breadth-first search beyond {} vertices", self.limits.max_frontier),
                    best_upper: Some(self.geodesic(&self.quotient(x, y)).len() as u64),
                });
            }
            frontier[side] = next;
        }
    }

    /// `B_r(center)`, enumerated by breadth-first search.
    pub fn ball(&self, center: &Element, r: u64) -> Result<Vec<Element>> {
        let gens = self.generators();
        let mut seen = HashSet::from([center.clone()]);
        let mut out = vec![center.clone()];
        let mut frontier = VecDeque::from([(center.clone(), 0u64)]);
        while let Some((v, d)) = frontier.pop_front() {
            if d == r {
                continue;
            }
            for s in &gens {
                let u = self.mul(&v, s);
                if seen.insert(u.clone()) {
                    if out.len() >= self.limits.max_ball {
                        return Err(Error::ResourceLimit {
                            what: format!("ball of radius {r} exceeds {} elements", self.limits.max_ball),
                            best_upper: None,
                        });
                    }
                    out.push(u.clone());
                    frontier.push_back((u, d + 1));
                }
            }
        }
        Ok(out)
    }

    /// Product of `len` uniformly chosen generators.
    pub fn random_walk<R: Rng + ?Sized>(&self, len: usize, rng: &mut R) -> Element {
        let gens = self.generators();
        (0..len).fold(self.identity(), |acc, _| {
            self.mul(&acc, &gens[rng.gen_range(0..gens.len())])
        })
    }

    pub fn format(&self, g: &Element) -> String {
        match g {
            Element::Free(w) => w.to_string(),
            Element::Abelian(v) => v.iter().map(i64::to_string).collect::<Vec<_>>().join(","),
            Element::Pair(a, b) => {
                let GroupDescriptor::Product(l, r) = &self.descriptor else {
                    return format!("{a:?} ; {b:?}");
                };
                format!("{} ; {}", self.factor(l).format(a), self.factor(r).format(b))
            }
            Element::F2xZ(w, t) => format!("{w} ; {t}"),
        }
    }

    pub fn parse_element(&self, text: &str) -> Result<Element> {
        let fields: Vec<&str> = text.split(';').collect();
        if fields.len() != self.descriptor.fields() {
            return Err(Error::MalformedInput(format!(
                "{text:?} has {} fields, {} expects {}",
                fields.len(),
                self.descriptor,
                self.descriptor.fields()
            )));
        }
        self.parse_fields(&fields)
    }

    fn parse_fields(&self, fields: &[&str]) -> Result<Element> {
        let word = |s: &str, rank: u32| {
            let s = s.trim();
            let alphabet = Alphabet::new(rank)?;
            if s == "1" {
                Ok(Word::identity())
            } else {
                alphabet.parse(s)
            }
        };
        let int = |s: &str| {
            s.trim()
                .parse::<i64>()
                .map_err(|_| Error::MalformedInput(format!("{s:?} is not an integer")))
        };
        match &self.descriptor {
            GroupDescriptor::Free(k) => Ok(Element::Free(word(fields[0], *k)?)),
            GroupDescriptor::Abelian(k) => {
                let s = fields[0].trim();
                let v: Vec<i64> = if s.is_empty() {
                    Vec::new()
                } else {
                    s.split(',').map(int).collect::<Result<_>>()?
                };
                let v = if v.is_empty() { vec![0; *k as usize] } else { v };
                if v.len() != *k as usize {
                    return Err(Error::MalformedInput(format!(
                        "{s:?} needs {k} comma-separated integers"
                    )));
                }
                Ok(Element::Abelian(v))
            }
            GroupDescriptor::Product(l, r) => {
                let split = l.fields();
                Ok(Element::pair(
                    self.factor(l).parse_fields(&fields[..split])?,
                    self.factor(r).parse_fields(&fields[split..])?,
                ))
            }
            GroupDescriptor::F2xZ { .. } => Ok(Element::F2xZ(word(fields[0], 2)?, int(fields[1])?)),
        }
    }
}

/// `|B_r(1)|` in the free group of rank `k`.
pub fn free_ball_size(k: u64, r: u32) -> u64 {
    if r == 0 {
        return 1;
    }
    if k == 1 {
        return 1 + 2 * r as u64;
    }
    1 + 2 * k * ((2 * k - 1).pow(r) - 1) / (2 * k - 2)
}

//! Permutation groups given by generators.
//!
//! Permutations are one-line image arrays: `p[x]` is the image of `x`.

use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Perm = Vec<usize>;

/// Largest group order that is enumerated element by element.
pub const ENUMERATION_LIMIT: usize = 10_000;

pub fn identity(degree: usize) -> Perm {
    (0..degree).collect()
}

pub fn is_identity(p: &[usize]) -> bool {
    p.iter().enumerate().all(|(x, &y)| x == y)
}

/// `f ∘ g`: apply `g` first, then `f`.
pub fn compose(f: &[usize], g: &[usize]) -> Perm {
    g.iter().map(|&x| f[x]).collect()
}

pub fn inverse(p: &[usize]) -> Perm {
    let mut inv = vec![0; p.len()];
    for (x, &y) in p.iter().enumerate() {
        inv[y] = x;
    }
    inv
}

/// Order of a single permutation: the lcm of its cycle lengths.
pub fn perm_order(p: &[usize]) -> BigUint {
    let mut seen = vec![false; p.len()];
    let mut order = BigUint::from(1u32);
    for start in 0..p.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0u64;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = p[x];
            len += 1;
        }
        let len = BigUint::from(len);
        let g = gcd(order.clone(), len.clone());
        order = order / g * len;
    }
    order
}

fn gcd(mut a: BigUint, mut b: BigUint) -> BigUint {
    while b != BigUint::from(0u32) {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

/// Orbits of the group generated by `gens`, each sorted, ordered by least element.
pub fn orbit_partition(degree: usize, gens: &[Perm]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..degree).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for g in gens {
        for (x, &y) in g.iter().enumerate() {
            let (a, b) = (find(&mut parent, x), find(&mut parent, y));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut classes: HashMap<usize, Vec<usize>> = HashMap::new();
    for x in 0..degree {
        let root = find(&mut parent, x);
        classes.entry(root).or_default().push(x);
    }
    let mut orbits: Vec<Vec<usize>> = classes.into_values().collect();
    orbits.sort_unstable_by_key(|o| o[0]);
    orbits
}

/// Orbit of a single point, in discovery order.
pub fn orbit_of(point: usize, gens: &[Perm]) -> Vec<usize> {
    let mut seen = HashSet::from([point]);
    let mut out = vec![point];
    let mut i = 0;
    while i < out.len() {
        let x = out[i];
        i += 1;
        for g in gens {
            if seen.insert(g[x]) {
                out.push(g[x]);
            }
        }
    }
    out
}

struct Level {
    base: usize,
    /// `transversal[u]` maps the base point to `u`.
    transversal: HashMap<usize, Perm>,
}

/// Exact order of the group generated by `gens` (common degree), via a
/// deterministic Schreier-Sims stabilizer chain.
pub fn group_order(degree: usize, gens: &[Perm]) -> BigUint {
    let chain = StabilizerChain::new(degree, gens);
    chain.order()
}

/// Base and strong generating set built by deterministic Schreier-Sims.
pub struct StabilizerChain {
    degree: usize,
    strong: Vec<Perm>,
    levels: Vec<Level>,
}

impl StabilizerChain {
    pub fn new(degree: usize, gens: &[Perm]) -> Self {
        let mut chain = Self {
            degree,
            strong: Vec::new(),
            levels: Vec::new(),
        };
        for g in gens {
            assert_eq!(g.len(), degree, "generator degree mismatch");
            if !is_identity(g) && !chain.strong.contains(g) {
                chain.strong.push(g.clone());
            }
        }
        if chain.strong.is_empty() {
            return chain;
        }
        let first = moved_point(&chain.strong[0]).expect("non-identity");
        chain.levels.push(Level {
            base: first,
            transversal: HashMap::new(),
        });
        chain.ensure_base_moves_all();

        let mut i = chain.levels.len() as isize - 1;
        while i >= 0 {
            let level = i as usize;
            chain.rebuild(level);
            match chain.first_failing_schreier_generator(level) {
                None => i -= 1,
                Some((residue, stopped)) => {
                    chain.strong.push(residue);
                    if stopped == chain.levels.len() {
                        let b = moved_point(chain.strong.last().unwrap()).expect("non-identity");
                        chain.levels.push(Level {
                            base: b,
                            transversal: HashMap::new(),
                        });
                    }
                    i = stopped as isize;
                }
            }
        }
        chain
    }

    fn ensure_base_moves_all(&mut self) {
        loop {
            let bases: Vec<usize> = self.levels.iter().map(|l| l.base).collect();
            let Some(g) = self
                .strong
                .iter()
                .find(|g| bases.iter().all(|&b| g[b] == b))
            else {
                return;
            };
            let b = moved_point(g).expect("non-identity");
            self.levels.push(Level {
                base: b,
                transversal: HashMap::new(),
            });
        }
    }

    /// Strong generators fixing the first `level` base points.
    fn level_gens(&self, level: usize) -> Vec<&Perm> {
        let bases: Vec<usize> = self.levels[..level].iter().map(|l| l.base).collect();
        self.strong
            .iter()
            .filter(|g| bases.iter().all(|&b| g[b] == b))
            .collect()
    }

    fn rebuild(&mut self, level: usize) {
        let gens: Vec<Perm> = self.level_gens(level).into_iter().cloned().collect();
        let base = self.levels[level].base;
        let mut transversal = HashMap::from([(base, identity(self.degree))]);
        let mut queue = VecDeque::from([base]);
        while let Some(u) = queue.pop_front() {
            for s in &gens {
                let v = s[u];
                if !transversal.contains_key(&v) {
                    let t = compose(s, &transversal[&u]);
                    transversal.insert(v, t);
                    queue.push_back(v);
                }
            }
        }
        self.levels[level].transversal = transversal;
    }

    fn first_failing_schreier_generator(&self, level: usize) -> Option<(Perm, usize)> {
        let gens = self.level_gens(level);
        let mut points: Vec<usize> = self.levels[level].transversal.keys().copied().collect();
        points.sort_unstable();
        for u in points {
            let t_u = &self.levels[level].transversal[&u];
            for s in &gens {
                let t_su = &self.levels[level].transversal[&s[u]];
                let h = compose(&inverse(t_su), &compose(s, t_u));
                let (residue, stopped) = self.sift(h, level + 1);
                if !is_identity(&residue) {
                    return Some((residue, stopped));
                }
            }
        }
        None
    }

    fn sift(&self, mut g: Perm, from: usize) -> (Perm, usize) {
        for (j, level) in self.levels.iter().enumerate().skip(from) {
            let u = g[level.base];
            match level.transversal.get(&u) {
                Some(t) => g = compose(&inverse(t), &g),
                None => return (g, j),
            }
        }
        (g, self.levels.len())
    }

    pub fn order(&self) -> BigUint {
        self.levels.iter().fold(BigUint::from(1u32), |acc, l| {
            acc * BigUint::from(l.transversal.len())
        })
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base).collect()
    }

    /// Membership test by sifting.
    pub fn contains(&self, g: &[usize]) -> bool {
        g.len() == self.degree && is_identity(&self.sift(g.to_vec(), 0).0)
    }
}

fn moved_point(g: &[usize]) -> Option<usize> {
    g.iter().enumerate().find(|&(x, &y)| x != y).map(|(x, _)| x)
}

/// All elements of the group generated by `gens`, or `None` past `limit`.
pub fn enumerate_elements(degree: usize, gens: &[Perm], limit: usize) -> Option<Vec<Perm>> {
    let id = identity(degree);
    let mut seen = HashSet::from([id.clone()]);
    let mut out = vec![id];
    let mut i = 0;
    while i < out.len() {
        let x = out[i].clone();
        i += 1;
        for g in gens {
            let y = compose(g, &x);
            if !seen.contains(&y) {
                if out.len() == limit {
                    return None;
                }
                seen.insert(y.clone());
                out.push(y);
            }
        }
    }
    Some(out)
}

/// A permutation group with certified order and its orbits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermGroup {
    pub degree: usize,
    pub generators: Vec<Perm>,
    #[serde(with = "order_serde")]
    pub order: BigUint,
    pub orbits: Vec<Vec<usize>>,
}

impl PermGroup {
    /// Group generated by `generators` with order from Schreier-Sims.
    pub fn from_generators(degree: usize, generators: Vec<Perm>) -> Self {
        let order = group_order(degree, &generators);
        Self::with_order(degree, generators, order)
    }

    /// Group whose order is already known; generators are sorted and deduplicated.
    pub fn with_order(degree: usize, mut generators: Vec<Perm>, order: BigUint) -> Self {
        generators.retain(|g| !is_identity(g));
        generators.sort();
        generators.dedup();
        let orbits = orbit_partition(degree, &generators);
        Self {
            degree,
            generators,
            order,
            orbits,
        }
    }

    pub fn trivial(degree: usize) -> Self {
        Self::with_order(degree, Vec::new(), BigUint::from(1u32))
    }

    /// Order as `u64`, when it fits.
    pub fn order_u64(&self) -> Option<u64> {
        u64::try_from(&self.order).ok()
    }

    pub fn orbit_sizes(&self) -> Vec<usize> {
        self.orbits.iter().map(Vec::len).collect()
    }

    /// True iff the group has order `n` and contains an element of order `n`.
    pub fn is_cyclic_of_order(&self, n: u64) -> Result<bool> {
        if self.order != BigUint::from(n) {
            return Ok(false);
        }
        if n as usize > ENUMERATION_LIMIT {
            return Err(Error::Precondition(format!(
                "group of order {n} is too large to enumerate (limit {ENUMERATION_LIMIT})"
            )));
        }
        let elements = enumerate_elements(self.degree, &self.generators, ENUMERATION_LIMIT)
            .expect("order is below the enumeration limit");
        let target = BigUint::from(n);
        Ok(elements.iter().any(|g| perm_order(g) == target))
    }
}

/// Orders are JSON numbers when they fit in `u64` and decimal strings otherwise.
pub(crate) mod order_serde {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(order: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        match u64::try_from(order) {
            Ok(v) => v.serialize(s),
            Err(_) => order.to_string().serialize(s),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(u64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(BigUint::from(v)),
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

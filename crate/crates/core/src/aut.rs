//! Automorphism groups, isomorphisms and canonical labelings of finite posets.
//!
//! All three are individualization-refinement searches over ordered partitions
//! of the point set. The initial partition groups points by
//! `(height, #lower covers, #upper covers)`; refinement then splits cells by the
//! multisets of cell colors among lower and upper covers until stable. Branching
//! individualizes a point of the first smallest non-singleton cell.
//!
//! The automorphism group is computed along the first root-to-leaf path
//! `b_0, b_1, ..`: for each level, deepest first, every candidate image of `b_i`
//! outside the orbit known so far is tested by an exhaustive search for an
//! automorphism fixing `b_0..b_{i-1}` and sending `b_i` to the candidate. The
//! group order is the product of the resulting basic orbit lengths, so it is
//! exact; there is no sampling.

use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::perm::{orbit_of, Perm, PermGroup};
use crate::poset::Poset;

/// Default point cap for the automorphism engine.
pub const DEFAULT_CAP: usize = 4096;

/// Engine limits and parallelism.
#[derive(Debug, Clone, PartialEq)]
pub struct AutConfig {
    pub cap: usize,
    pub timeout: Option<Duration>,
    /// Worker threads for candidate tests; results do not depend on it.
    pub workers: usize,
}

impl Default for AutConfig {
    fn default() -> Self {
        Self {
            cap: DEFAULT_CAP,
            timeout: None,
            workers: 1,
        }
    }
}

#[derive(Clone, Copy)]
struct Deadline {
    at: Option<Instant>,
    limit: Option<Duration>,
}

impl Deadline {
    fn new(limit: Option<Duration>) -> Self {
        Self {
            at: limit.map(|d| Instant::now() + d),
            limit,
        }
    }

    fn none() -> Self {
        Self {
            at: None,
            limit: None,
        }
    }

    fn check(&self) -> Result<()> {
        match self.at {
            Some(at) if Instant::now() > at => Err(Error::Timeout {
                seconds: self.limit.unwrap_or_default().as_secs_f64(),
            }),
            _ => Ok(()),
        }
    }
}

/// Ordered partition. A point's color is the start position of its cell.
#[derive(Clone, Debug)]
pub(crate) struct Partition {
    elems: Vec<u32>,
    color: Vec<u32>,
    /// End position of the cell starting at each cell start.
    cell_end: Vec<u32>,
    cells: usize,
}

impl Partition {
    /// Points grouped by `(height, #lower covers, #upper covers)`.
    fn initial(p: &Poset, trace: &mut Trace) -> Self {
        let n = p.len();
        let key = |x: usize| {
            (
                p.heights()[x],
                p.lower_covers(x).len(),
                p.upper_covers(x).len(),
            )
        };
        let mut elems: Vec<u32> = (0..n as u32).collect();
        elems.sort_by_key(|&x| (key(x as usize), x));
        let mut color = vec![0u32; n];
        let mut cell_end = vec![0u32; n];
        let mut cells = 0;
        let mut start = 0;
        while start < n {
            let k = key(elems[start] as usize);
            let mut end = start + 1;
            while end < n && key(elems[end] as usize) == k {
                end += 1;
            }
            for &x in &elems[start..end] {
                color[x as usize] = start as u32;
            }
            cell_end[start] = end as u32;
            trace.push(start as u64);
            trace.push((end - start) as u64);
            trace.push(k.0 as u64);
            trace.push(k.1 as u64);
            trace.push(k.2 as u64);
            cells += 1;
            start = end;
        }
        Self {
            elems,
            color,
            cell_end,
            cells,
        }
    }

    pub(crate) fn is_discrete(&self) -> bool {
        self.cells == self.elems.len()
    }

    pub(crate) fn color(&self, x: usize) -> usize {
        self.color[x] as usize
    }

    pub(crate) fn cell(&self, start: usize) -> &[u32] {
        &self.elems[start..self.cell_end[start] as usize]
    }

    /// Start positions of all cells in order.
    pub(crate) fn cell_starts(&self) -> impl Iterator<Item = usize> + '_ {
        let n = self.elems.len();
        let mut pos = 0;
        std::iter::from_fn(move || {
            if pos >= n {
                return None;
            }
            let start = pos;
            pos = self.cell_end[start] as usize;
            Some(start)
        })
    }

    /// First smallest non-singleton cell.
    fn target_cell(&self) -> Option<usize> {
        self.cell_starts()
            .map(|s| (self.cell_end[s] as usize - s, s))
            .filter(|&(len, _)| len > 1)
            .min()
            .map(|(_, s)| s)
    }

    /// Splits `x` off the front of its cell.
    fn individualize(&mut self, x: usize, trace: &mut Trace) {
        let start = self.color[x] as usize;
        let end = self.cell_end[start] as usize;
        trace.push(u64::MAX);
        trace.push(start as u64);
        if end - start == 1 {
            return;
        }
        let pos = self.elems[start..end]
            .iter()
            .position(|&y| y as usize == x)
            .unwrap()
            + start;
        self.elems.swap(start, pos);
        self.cell_end[start] = start as u32 + 1;
        self.cell_end[start + 1] = end as u32;
        for &y in &self.elems[start + 1..end] {
            self.color[y as usize] = start as u32 + 1;
        }
        self.cells += 1;
    }

    /// Refines to the coarsest stable partition finer than the current one.
    fn refine(&mut self, p: &Poset, trace: &mut Trace) {
        let n = self.elems.len();
        let mut sig = vec![0u64; n];
        loop {
            for (x, s) in sig.iter_mut().enumerate() {
                let below = p
                    .lower_covers(x)
                    .iter()
                    .fold(0u64, |acc, &y| acc.wrapping_add(mix(self.color[y] as u64)));
                let above = p.upper_covers(x).iter().fold(0u64, |acc, &y| {
                    acc.wrapping_add(mix(self.color[y] as u64 ^ 0x5bd1_e995))
                });
                *s = mix(below ^ mix(above));
            }
            let starts: Vec<usize> = self.cell_starts().collect();
            let mut split = false;
            let mut recolor: Vec<(usize, usize)> = Vec::new();
            for start in starts {
                let end = self.cell_end[start] as usize;
                if end - start == 1 {
                    continue;
                }
                let cell = &mut self.elems[start..end];
                cell.sort_by_key(|&x| (sig[x as usize], x));
                if sig[cell[0] as usize] == sig[cell[end - start - 1] as usize] {
                    continue;
                }
                split = true;
                trace.push(start as u64);
                let mut run = start;
                for pos in start + 1..=end {
                    if pos == end || sig[self.elems[pos] as usize] != sig[self.elems[run] as usize]
                    {
                        self.cell_end[run] = pos as u32;
                        trace.push((pos - run) as u64);
                        trace.push(sig[self.elems[run] as usize]);
                        recolor.push((run, pos));
                        run = pos;
                    }
                }
                self.cells += recolor.len() - 1;
                for (s, e) in recolor.drain(..) {
                    for &x in &self.elems[s..e] {
                        self.color[x as usize] = s as u32;
                    }
                }
            }
            if !split {
                break;
            }
        }
    }
}

/// Splitmix64 finalizer.
#[inline]
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Rolling digest of everything a refinement step did.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Trace(u64);

impl Trace {
    fn new() -> Self {
        Trace(0x243f_6a88_85a3_08d3)
    }

    fn push(&mut self, v: u64) {
        self.0 = mix(self.0 ^ v);
    }
}

/// One node per level of the first root-to-leaf path.
#[derive(Clone, Debug)]
struct PathNode {
    part: Partition,
    /// Digest of the step that produced this node.
    trace: Trace,
}

/// The first path: `nodes[0]` is the refined root, `nodes[i + 1]` follows
/// individualizing `base[i]`; the last node is discrete.
#[derive(Clone, Debug)]
pub(crate) struct FirstPath {
    nodes: Vec<PathNode>,
    base: Vec<usize>,
}

impl FirstPath {
    fn new(p: &Poset) -> Self {
        let mut trace = Trace::new();
        let mut part = Partition::initial(p, &mut trace);
        part.refine(p, &mut trace);
        let mut nodes = vec![PathNode { part, trace }];
        let mut base = Vec::new();
        while let Some(start) = nodes.last().unwrap().part.target_cell() {
            let mut part = nodes.last().unwrap().part.clone();
            let b = part.cell(start)[0] as usize;
            let mut trace = Trace::new();
            part.individualize(b, &mut trace);
            part.refine(p, &mut trace);
            base.push(b);
            nodes.push(PathNode { part, trace });
        }
        Self { nodes, base }
    }

    pub(crate) fn root(&self) -> &Partition {
        &self.nodes[0].part
    }

    fn leaf(&self) -> &[u32] {
        &self.nodes.last().unwrap().part.elems
    }

    fn same_shape(&self, level: usize, part: &Partition, trace: Trace) -> bool {
        let node = &self.nodes[level];
        node.trace == trace && node.part.cells == part.cells
    }
}

/// Depth-first search for a leaf under `part` (a node at `level`, shaped like the
/// first path there) whose labeling maps the first leaf onto an isomorphism into
/// `target`.
fn extend(
    source: &Poset,
    path: &FirstPath,
    target: &Poset,
    level: usize,
    part: &Partition,
    deadline: &Deadline,
) -> Result<Option<Perm>> {
    deadline.check()?;
    if level + 1 == path.nodes.len() {
        if !part.is_discrete() {
            return Ok(None);
        }
        let mut map = vec![0usize; source.len()];
        for (&a, &b) in path.leaf().iter().zip(&part.elems) {
            map[a as usize] = b as usize;
        }
        return Ok(is_isomorphism(source, target, &map).then_some(map));
    }
    let start = path.nodes[level].part.color(path.base[level]);
    if part.cell_end.get(start).copied() != Some(path.nodes[level].part.cell_end[start])
        || part.color.get(part.elems[start] as usize).copied() != Some(start as u32)
    {
        return Ok(None);
    }
    for &z in part.cell(start) {
        let mut child = part.clone();
        let mut trace = Trace::new();
        child.individualize(z as usize, &mut trace);
        child.refine(target, &mut trace);
        if !path.same_shape(level + 1, &child, trace) {
            continue;
        }
        if let Some(map) = extend(source, path, target, level + 1, &child, deadline)? {
            return Ok(Some(map));
        }
    }
    Ok(None)
}

/// `map` sends covers of `source` to covers of `target` and preserves cover counts.
fn is_isomorphism(source: &Poset, target: &Poset, map: &[usize]) -> bool {
    (0..source.len()).all(|y| {
        let ty = map[y];
        source.lower_covers(y).len() == target.lower_covers(ty).len()
            && source
                .lower_covers(y)
                .iter()
                .all(|&x| target.is_cover(map[x], ty))
    })
}

/// Searches for an automorphism fixing `base[..level]` and sending `base[level]` to `y`.
fn automorphism_sending(
    p: &Poset,
    path: &FirstPath,
    level: usize,
    y: usize,
    deadline: &Deadline,
) -> Result<Option<Perm>> {
    let mut part = path.nodes[level].part.clone();
    let mut trace = Trace::new();
    part.individualize(y, &mut trace);
    part.refine(p, &mut trace);
    if !path.same_shape(level + 1, &part, trace) {
        return Ok(None);
    }
    extend(p, path, p, level + 1, &part, deadline)
}

struct Membership {
    member: Vec<bool>,
    len: usize,
}

impl Membership {
    fn new(degree: usize, point: usize, gens: &[Perm]) -> Self {
        let orbit = orbit_of(point, gens);
        let mut member = vec![false; degree];
        for &x in &orbit {
            member[x] = true;
        }
        Self {
            member,
            len: orbit.len(),
        }
    }

    fn contains(&self, x: usize) -> bool {
        self.member[x]
    }

    fn len(&self) -> usize {
        self.len
    }
}

/// Result of the automorphism search, reusable for canonical labeling.
pub(crate) struct Analysis {
    pub(crate) group: PermGroup,
    pub(crate) path: FirstPath,
}

pub(crate) fn analyze(p: &Poset, config: &AutConfig) -> Result<Analysis> {
    if p.len() > config.cap {
        return Err(Error::CapExceeded {
            size: p.len(),
            cap: config.cap,
        });
    }
    let deadline = Deadline::new(config.timeout);
    let path = FirstPath::new(p);
    let pool = if config.workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::Search(e.to_string()))?;
        Some(pool)
    } else {
        None
    };
    let mut gens: Vec<Perm> = Vec::new();
    let mut order = BigUint::from(1u32);
    for level in (0..path.base.len()).rev() {
        let b = path.base[level];
        let node = &path.nodes[level].part;
        let mut cell: Vec<usize> = node
            .cell(node.color(b))
            .iter()
            .map(|&x| x as usize)
            .collect();
        cell.sort_unstable();
        let mut orbit = Membership::new(p.len(), b, &gens);
        let pending: Vec<usize> = cell.into_iter().filter(|&y| !orbit.contains(y)).collect();
        // Both branches add a generator for exactly the candidates, in increasing
        // order, that are not yet reached when their turn comes.
        match &pool {
            Some(pool) if pending.len() > 1 => {
                let found = pool.install(|| {
                    pending
                        .par_iter()
                        .map(|&y| automorphism_sending(p, &path, level, y, &deadline))
                        .collect::<Result<Vec<_>>>()
                })?;
                for (&y, g) in pending.iter().zip(found) {
                    if let (false, Some(g)) = (orbit.contains(y), g) {
                        gens.push(g);
                        orbit = Membership::new(p.len(), b, &gens);
                    }
                }
            }
            _ => {
                for &y in &pending {
                    if orbit.contains(y) {
                        continue;
                    }
                    if let Some(g) = automorphism_sending(p, &path, level, y, &deadline)? {
                        gens.push(g);
                        orbit = Membership::new(p.len(), b, &gens);
                    }
                }
            }
        }
        order *= BigUint::from(orbit.len());
    }
    let group = PermGroup::with_order(p.len(), gens, order);
    Ok(Analysis { group, path })
}

/// Automorphism group with exact order, sorted generators and orbits.
pub fn automorphism_group(p: &Poset, config: &AutConfig) -> Result<PermGroup> {
    analyze(p, config).map(|a| a.group)
}

/// An order-isomorphism `p1 -> p2` (image of each point), if one exists.
pub fn isomorphism(p1: &Poset, p2: &Poset) -> Option<Vec<usize>> {
    if p1.len() != p2.len() || p1.cover_count() != p2.cover_count() {
        return None;
    }
    let path = FirstPath::new(p1);
    let mut trace = Trace::new();
    let mut part = Partition::initial(p2, &mut trace);
    part.refine(p2, &mut trace);
    if !path.same_shape(0, &part, trace) {
        return None;
    }
    extend(p1, &path, p2, 0, &part, &Deadline::none()).expect("no deadline")
}

/// Canonical labeling: `labeling[i]` is the point placed at position `i`.
/// Isomorphic posets get identical certificates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    pub labeling: Vec<usize>,
    /// Row `i` lists, as bits over positions, the points below position `i`.
    pub certificate: Vec<u64>,
    pub group: PermGroup,
}

/// Largest poset accepted by [`canonical_form`].
pub const CANONICAL_CAP: usize = 64;

pub fn canonical_form(p: &Poset) -> Result<CanonicalForm> {
    let analysis = analyze(p, &AutConfig::default())?;
    canonical_from_analysis(p, analysis)
}

pub(crate) fn canonical_from_analysis(p: &Poset, analysis: Analysis) -> Result<CanonicalForm> {
    if p.len() > CANONICAL_CAP {
        return Err(Error::CapExceeded {
            size: p.len(),
            cap: CANONICAL_CAP,
        });
    }
    let mut best: Option<(Vec<u64>, Vec<usize>)> = None;
    let root = analysis.path.root().clone();
    let mut prefix = Vec::new();
    canon_search(p, &analysis.group.generators, &root, &mut prefix, &mut best);
    let (certificate, labeling) = best.expect("the search reaches at least one leaf");
    Ok(CanonicalForm {
        labeling,
        certificate,
        group: analysis.group,
    })
}

fn certificate(p: &Poset, labeling: &[u32]) -> Vec<u64> {
    let mut pos = vec![0usize; p.len()];
    for (i, &x) in labeling.iter().enumerate() {
        pos[x as usize] = i;
    }
    labeling
        .iter()
        .map(|&x| {
            p.down_bits(x as usize)
                .ones()
                .fold(0u64, |acc, y| acc | 1 << pos[y])
        })
        .collect()
}

/// Explores every leaf up to pruning by automorphisms that fix the current prefix.
fn canon_search(
    p: &Poset,
    gens: &[Perm],
    part: &Partition,
    prefix: &mut Vec<usize>,
    best: &mut Option<(Vec<u64>, Vec<usize>)>,
) {
    let Some(start) = part.target_cell() else {
        let cert = certificate(p, &part.elems);
        if best.as_ref().is_none_or(|(b, _)| cert < *b) {
            *best = Some((cert, part.elems.iter().map(|&x| x as usize).collect()));
        }
        return;
    };
    let stabilizer: Vec<Perm> = gens
        .iter()
        .filter(|g| prefix.iter().all(|&x| g[x] == x))
        .cloned()
        .collect();
    let mut cell: Vec<usize> = part.cell(start).iter().map(|&x| x as usize).collect();
    cell.sort_unstable();
    let mut done = vec![false; p.len()];
    for z in cell {
        if done[z] {
            continue;
        }
        for y in orbit_of(z, &stabilizer) {
            done[y] = true;
        }
        let mut child = part.clone();
        let mut trace = Trace::new();
        child.individualize(z, &mut trace);
        child.refine(p, &mut trace);
        prefix.push(z);
        canon_search(p, gens, &child, prefix, best);
        prefix.pop();
    }
}

/// Cells of the refined root partition, in partition order. The order is an
/// isomorphism invariant.
pub(crate) fn root_cells(p: &Poset) -> Vec<Vec<usize>> {
    let mut trace = Trace::new();
    let mut root = Partition::initial(p, &mut trace);
    root.refine(p, &mut trace);
    root.cell_starts()
        .map(|s| root.cell(s).iter().map(|&x| x as usize).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{crown, subdivided_crown};

    /// Counts order automorphisms by backtracking over all bijections.
    pub(crate) fn brute_force_count(p: &Poset) -> u64 {
        fn go(p: &Poset, map: &mut Vec<usize>, used: &mut Vec<bool>) -> u64 {
            let x = map.len();
            if x == p.len() {
                return 1;
            }
            let mut total = 0;
            for y in 0..p.len() {
                if used[y] {
                    continue;
                }
                let ok =
                    (0..x).all(|w| p.lt(w, x) == p.lt(map[w], y) && p.lt(x, w) == p.lt(y, map[w]));
                if ok {
                    used[y] = true;
                    map.push(y);
                    total += go(p, map, used);
                    map.pop();
                    used[y] = false;
                }
            }
            total
        }
        go(p, &mut Vec::new(), &mut vec![false; p.len()])
    }

    fn order(p: &Poset) -> u64 {
        automorphism_group(p, &AutConfig::default())
            .unwrap()
            .order_u64()
            .unwrap()
    }

    #[test]
    fn basic_orders() {
        assert_eq!(order(&Poset::antichain(3)), 6);
        assert_eq!(order(&Poset::chain(5)), 1);
        let c3 = crown(3).unwrap();
        assert_eq!(brute_force_count(&c3), 6);
        assert_eq!(order(&c3), 6);
        assert_eq!(order(&Poset::empty()), 1);
        let big = automorphism_group(&Poset::antichain(30), &AutConfig::default()).unwrap();
        let factorial: BigUint = (1..=30u32).map(BigUint::from).product();
        assert_eq!(big.order, factorial);
    }

    #[test]
    fn generators_preserve_order_and_orbits_are_antichains() {
        for p in [
            crown(5).unwrap(),
            subdivided_crown(4).unwrap().poset,
            Poset::antichain(4),
        ] {
            let g = automorphism_group(&p, &AutConfig::default()).unwrap();
            for gen in &g.generators {
                for x in 0..p.len() {
                    assert_eq!(p.heights()[x], p.heights()[gen[x]]);
                    for y in 0..p.len() {
                        assert_eq!(p.lt(x, y), p.lt(gen[x], gen[y]));
                    }
                }
            }
            for orbit in &g.orbits {
                for &a in orbit {
                    for &b in orbit {
                        assert!(!p.lt(a, b));
                    }
                }
            }
        }
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let p = crown(6).unwrap().ordinal_sum(&Poset::antichain(3));
        let one = automorphism_group(&p, &AutConfig::default()).unwrap();
        let many = automorphism_group(
            &p,
            &AutConfig {
                workers: 4,
                ..AutConfig::default()
            },
        )
        .unwrap();
        assert_eq!(one, many);
        assert_eq!(one.order_u64(), Some(12 * 6));
    }

    #[test]
    fn cap_and_timeout() {
        let p = Poset::antichain(10);
        let small = AutConfig {
            cap: 5,
            ..AutConfig::default()
        };
        assert!(matches!(
            automorphism_group(&p, &small),
            Err(Error::CapExceeded { .. })
        ));
        let rushed = AutConfig {
            timeout: Some(Duration::ZERO),
            ..AutConfig::default()
        };
        let big = Poset::antichain(12);
        assert!(matches!(
            automorphism_group(&big, &rushed),
            Err(Error::Timeout { .. })
        ));
    }

    #[test]
    fn isomorphisms() {
        let c3 = Poset::chain(3);
        assert_eq!(isomorphism(&c3, &Poset::chain(3)), Some(vec![0, 1, 2]));
        assert_eq!(isomorphism(&c3, &Poset::antichain(3)), None);
        let crown3 = crown(3).unwrap();
        let relabel = vec![4, 0, 5, 2, 1, 3];
        let copy = crown3.permuted(&relabel);
        let iso = isomorphism(&crown3, &copy).unwrap();
        for x in 0..6 {
            for y in 0..6 {
                assert_eq!(crown3.lt(x, y), copy.lt(iso[x], iso[y]));
            }
        }
        assert!(isomorphism(&crown3, &crown(2).unwrap().ordinal_sum(&Poset::chain(2))).is_none());
    }

    #[test]
    fn canonical_forms_agree_on_relabelings() {
        let p = subdivided_crown(3)
            .unwrap()
            .poset
            .ordinal_sum(&Poset::antichain(2));
        let base = canonical_form(&p).unwrap();
        for shift in 1..5 {
            let perm: Vec<usize> = (0..p.len()).map(|x| (x * 7 + shift) % p.len()).collect();
            let q = p.permuted(&perm);
            assert_eq!(canonical_form(&q).unwrap().certificate, base.certificate);
        }
        let other = crown(5).unwrap().ordinal_sum(&Poset::chain(1));
        assert_ne!(
            canonical_form(&other).unwrap().certificate,
            base.certificate
        );
    }
}

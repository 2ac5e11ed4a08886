//! Exhaustive search for the smallest poset realizing a tiny group.
//!
//! Posets are generated up to isomorphism by canonical augmentation: a child
//! of `P` is `P` plus a new maximal point whose down-set is an order ideal of
//! `P`, one ideal per `Aut(P)`-orbit. A child `Q = P + x` is kept iff `x` lies
//! in the canonical deletion orbit of `Q`, so every isomorphism class appears
//! exactly once and memory stays proportional to the depth.

use std::time::Instant;

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aut::{analyze, automorphism_group, canonical_from_analysis, root_cells, AutConfig};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::perm::{compose, enumerate_elements, identity, Perm, PermGroup};
use crate::poset::{Label, Poset, PosetFile};

/// Hard cap on enumerated poset size.
pub const MAX_POINTS: usize = 9;

/// Largest non-cyclic group handled by the brute-force isomorphism test.
pub const BRUTE_FORCE_GROUP_CAP: usize = 24;

/// Subtrees rooted above this size are explored in parallel.
const PARALLEL_DEPTH: usize = 4;

struct Node {
    poset: Poset,
    group: PermGroup,
}

impl Node {
    fn root() -> Self {
        Node {
            poset: Poset::empty(),
            group: PermGroup::trivial(0),
        }
    }
}

fn ideals(p: &Poset) -> Vec<u32> {
    let n = p.len();
    let down: Vec<u32> = (0..n)
        .map(|x| p.down_bits(x).ones().fold(0u32, |m, y| m | 1 << y))
        .collect();
    (0..1u32 << n)
        .filter(|&mask| (0..n).all(|x| mask & (1 << x) == 0 || down[x] & !mask == 0))
        .collect()
}

fn image(mask: u32, g: &[usize]) -> u32 {
    g.iter()
        .enumerate()
        .filter(|&(x, _)| mask & (1 << x) != 0)
        .fold(0, |m, (_, &y)| m | 1 << y)
}

/// Least ideal of each `Aut(P)`-orbit, ascending.
fn ideal_orbit_reps(p: &Poset, gens: &[Perm]) -> Vec<u32> {
    let all = ideals(p);
    let mut seen = vec![false; 1usize << p.len()];
    let mut reps = Vec::new();
    for &mask in &all {
        if seen[mask as usize] {
            continue;
        }
        reps.push(mask);
        seen[mask as usize] = true;
        let mut stack = vec![mask];
        while let Some(m) = stack.pop() {
            for g in gens {
                let img = image(m, g);
                if !seen[img as usize] {
                    seen[img as usize] = true;
                    stack.push(img);
                }
            }
        }
    }
    reps
}

fn extend(p: &Poset, ideal: u32) -> Poset {
    let n = p.len() + 1;
    let mut down: Vec<FixedBitSet> = (0..n - 1)
        .map(|x| {
            let mut row = FixedBitSet::with_capacity(n);
            row.extend(p.down_bits(x).ones());
            row
        })
        .collect();
    let mut top = FixedBitSet::with_capacity(n);
    top.extend((0..n - 1).filter(|&y| ideal & (1 << y) != 0));
    down.push(top);
    let labels = (0..n as i64).map(Label::Int).collect();
    Poset::from_relation(labels, down)
        .expect("an ideal plus a new maximal point is a partial order")
}

/// Accepts `q` iff its last point lies in the canonical deletion orbit: the
/// orbit, among points of the first root cell made of maximal points, of the
/// one placed first by the canonical labeling.
fn accept(q: Poset) -> Result<Option<Node>> {
    let x = q.len() - 1;
    let cells = root_cells(&q);
    let cell = cells
        .into_iter()
        .find(|c| q.upper_covers(c[0]).is_empty())
        .expect("a nonempty poset has maximal points");
    if !cell.contains(&x) {
        return Ok(None);
    }
    let analysis = analyze(&q, &AutConfig::default())?;
    let orbit = analysis
        .group
        .orbits
        .iter()
        .find(|o| o.contains(&x))
        .expect("orbits cover all points")
        .clone();
    if cell.iter().all(|y| orbit.contains(y)) {
        return Ok(Some(Node {
            poset: q,
            group: analysis.group,
        }));
    }
    let canon = canonical_from_analysis(&q, analysis)?;
    let mut position = vec![0; q.len()];
    for (i, &y) in canon.labeling.iter().enumerate() {
        position[y] = i;
    }
    let first = *cell
        .iter()
        .min_by_key(|&&y| position[y])
        .expect("cell is nonempty");
    let keep = orbit.contains(&first);
    Ok(keep.then_some(Node {
        poset: q,
        group: canon.group,
    }))
}

fn children(node: &Node) -> Result<Vec<Node>> {
    let mut out = Vec::new();
    for ideal in ideal_orbit_reps(&node.poset, &node.group.generators) {
        if let Some(child) = accept(extend(&node.poset, ideal))? {
            out.push(child);
        }
    }
    Ok(out)
}

#[derive(Default)]
struct Tally {
    count: u64,
    witness: Option<Poset>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.count += other.count;
        if self.witness.is_none() {
            self.witness = other.witness;
        }
        self
    }
}

/// Depth-first walk to size `target`, testing each leaf with `test`.
/// Children are merged in generation order, so the result does not depend on
/// the thread count.
fn explore<F>(node: &Node, target: usize, parallel: bool, test: &F) -> Result<Tally>
where
    F: Fn(&Node) -> Result<bool> + Sync,
{
    if node.poset.len() == target {
        let witness = test(node)?.then(|| node.poset.clone());
        return Ok(Tally { count: 1, witness });
    }
    let kids = children(node)?;
    let tallies: Vec<Tally> = if parallel && node.poset.len() < PARALLEL_DEPTH {
        kids.par_iter()
            .map(|k| explore(k, target, parallel, test))
            .collect::<Result<_>>()?
    } else {
        kids.iter()
            .map(|k| explore(k, target, parallel, test))
            .collect::<Result<_>>()?
    };
    Ok(tallies.into_iter().fold(Tally::default(), Tally::merge))
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 || n > MAX_POINTS {
        return Err(Error::Precondition(format!(
            "poset size must be in 1..={MAX_POINTS}, got {n}"
        )));
    }
    Ok(())
}

fn with_workers<T: Send>(workers: usize, job: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    if workers <= 1 {
        return job();
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Search(e.to_string()))?
        .install(job)
}

/// One representative of every isomorphism class of `n`-point posets, in a
/// fixed order. Points of each representative are numbered in insertion order,
/// so every point lies above only lower-numbered points.
pub fn enumerate_posets(n: usize) -> Result<Vec<Poset>> {
    check_size(n)?;
    fn collect(node: &Node, n: usize, out: &mut Vec<Poset>) -> Result<()> {
        if node.poset.len() == n {
            out.push(node.poset.clone());
            return Ok(());
        }
        for child in children(node)? {
            collect(&child, n, out)?;
        }
        Ok(())
    }
    let mut out = Vec::new();
    collect(&Node::root(), n, &mut out)?;
    Ok(out)
}

/// Number of isomorphism classes of `n`-point posets.
pub fn count_posets(n: usize, workers: usize) -> Result<u64> {
    check_size(n)?;
    let tally = with_workers(workers, || {
        explore(&Node::root(), n, workers > 1, &|_| Ok(false))
    })?;
    Ok(tally.count)
}

/// Whether an automorphism group is isomorphic to `g`.
pub fn group_matches(aut: &PermGroup, g: &FiniteGroup) -> Result<bool> {
    if aut.order != BigUint::from(g.order()) {
        return Ok(false);
    }
    if g.is_cyclic() {
        return aut.is_cyclic_of_order(g.order() as u64);
    }
    if g.order() > BRUTE_FORCE_GROUP_CAP {
        return Err(Error::CapExceeded {
            size: g.order(),
            cap: BRUTE_FORCE_GROUP_CAP,
        });
    }
    let elements = enumerate_elements(aut.degree, &aut.generators, g.order())
        .ok_or_else(|| Error::Search("automorphism group larger than its computed order".into()))?;
    let all: Vec<usize> = (0..g.order()).filter(|&x| x != g.identity()).collect();
    let gens = g.irredundant_reduce(&all)?.elems().to_vec();
    // Try every assignment of automorphisms to the generators.
    let mut choice = vec![0usize; gens.len()];
    loop {
        let images: Vec<&Perm> = choice.iter().map(|&i| &elements[i]).collect();
        if extends_to_isomorphism(g, &gens, &images, aut.degree) {
            return Ok(true);
        }
        let mut i = 0;
        loop {
            if i == choice.len() {
                return Ok(false);
            }
            choice[i] += 1;
            if choice[i] < elements.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Breadth-first extension of `gens[i] -> images[i]` to a homomorphism; true
/// iff it is well defined and injective.
fn extends_to_isomorphism(
    g: &FiniteGroup,
    gens: &[usize],
    images: &[&Perm],
    degree: usize,
) -> bool {
    let mut phi: Vec<Option<Perm>> = vec![None; g.order()];
    phi[g.identity()] = Some(identity(degree));
    let mut queue = vec![g.identity()];
    while let Some(x) = queue.pop() {
        let px = phi[x].clone().expect("queued elements are assigned");
        for (&s, img) in gens.iter().zip(images) {
            let y = g.mul(x, s);
            let val = compose(&px, img);
            match &phi[y] {
                Some(existing) if *existing != val => return false,
                Some(_) => {}
                None => {
                    phi[y] = Some(val);
                    queue.push(y);
                }
            }
        }
    }
    let distinct: std::collections::HashSet<&Perm> = phi.iter().flatten().collect();
    distinct.len() == g.order()
}

/// Whether `Aut(p)` is isomorphic to `g`.
pub fn realizes(p: &Poset, g: &FiniteGroup, config: &AutConfig) -> Result<bool> {
    group_matches(&automorphism_group(p, config)?, g)
}

/// Per-size line of a [`BetaReport`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeReport {
    pub n: usize,
    /// Isomorphism classes of `n`-point posets.
    pub count: u64,
    pub found: bool,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaReport {
    pub group: String,
    pub sizes: Vec<SizeReport>,
    /// Smallest realizer size, or `None` when no poset up to `max_points` realizes the group.
    pub beta: Option<usize>,
    pub witness: Option<PosetFile>,
}

impl BetaReport {
    /// Human-readable verdict.
    pub fn verdict(&self) -> String {
        match self.beta {
            Some(b) => format!("beta({}) = {b}", self.group),
            None => format!("beta({}) > {}", self.group, self.sizes.len()),
        }
    }
}

/// Searches sizes `1..=max_points` in turn and stops at the first size with a
/// realizer. The witness is the first realizer in generation order.
pub fn beta(g: &FiniteGroup, max_points: usize, workers: usize) -> Result<BetaReport> {
    check_size(max_points)?;
    if !g.is_cyclic() && g.order() > BRUTE_FORCE_GROUP_CAP {
        return Err(Error::CapExceeded {
            size: g.order(),
            cap: BRUTE_FORCE_GROUP_CAP,
        });
    }
    let target = BigUint::from(g.order());
    let test = |node: &Node| -> Result<bool> {
        if node.group.order != target {
            return Ok(false);
        }
        group_matches(&node.group, g)
    };
    let mut sizes = Vec::new();
    for n in 1..=max_points {
        let start = Instant::now();
        let tally = with_workers(workers, || explore(&Node::root(), n, workers > 1, &test))?;
        sizes.push(SizeReport {
            n,
            count: tally.count,
            found: tally.witness.is_some(),
            elapsed_ms: start.elapsed().as_millis() as u64,
        });
        if let Some(w) = tally.witness {
            return Ok(BetaReport {
                group: g.display_name(),
                sizes,
                beta: Some(n),
                witness: Some(w.to_file()),
            });
        }
    }
    Ok(BetaReport {
        group: g.display_name(),
        sizes,
        beta: None,
        witness: None,
    })
}

/// Orbit structure of a realizer of a cyclic group of prime-power order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitAudit {
    pub prime: u64,
    pub exponent: u32,
    /// Orbit sizes of `Aut(P)`, largest first.
    pub orbit_sizes: Vec<usize>,
    /// Number of orbits of the full size `p^k`.
    pub full_orbits: usize,
    /// At least two full orbits, as forced for any realizer.
    pub passes: bool,
}

fn prime_power(n: usize) -> Option<(u64, u32)> {
    let n = n as u64;
    let p = (2..=n).find(|d| n.is_multiple_of(*d))?;
    let mut k = 0;
    let mut m = n;
    while m.is_multiple_of(p) {
        m /= p;
        k += 1;
    }
    (m == 1).then_some((p, k))
}

pub fn orbit_size_audit(p: &Poset, g: &FiniteGroup, config: &AutConfig) -> Result<OrbitAudit> {
    let (prime, exponent) = prime_power(g.order())
        .filter(|_| g.is_cyclic())
        .ok_or_else(|| {
            Error::Precondition(format!(
                "{} is not cyclic of prime-power order",
                g.display_name()
            ))
        })?;
    let aut = automorphism_group(p, config)?;
    if !group_matches(&aut, g)? {
        return Err(Error::Precondition(format!(
            "the poset does not realize {}",
            g.display_name()
        )));
    }
    let mut orbit_sizes = aut.orbit_sizes();
    orbit_sizes.sort_unstable_by(|a, b| b.cmp(a));
    let full_orbits = orbit_sizes.iter().filter(|&&s| s == g.order()).count();
    Ok(OrbitAudit {
        prime,
        exponent,
        orbit_sizes,
        full_orbits,
        passes: full_orbits >= 2,
    })
}

/// Stored bounds for one cyclic group of prime-power order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnownBound {
    pub group: String,
    pub p: u64,
    pub k: u32,
    /// Fewest vertices of a graph realizing the group.
    pub alpha: Option<u64>,
    pub beta_lower: u64,
    pub beta_upper: u64,
    /// Exact value where it is settled.
    #[serde(default)]
    pub beta_exact: Option<u64>,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnownBounds {
    pub entries: Vec<KnownBound>,
}

const KNOWN_BOUNDS_JSON: &str = include_str!("../data/known_bounds.json");

impl KnownBounds {
    pub fn load() -> Result<Self> {
        serde_json::from_str(KNOWN_BOUNDS_JSON).map_err(|source| Error::Json {
            context: "known bounds table".into(),
            source,
        })
    }

    pub fn get(&self, group: &str) -> Option<&KnownBound> {
        self.entries.iter().find(|e| e.group == group)
    }
}

/// Fewest vertices of a graph with automorphism group `Z_{p^k}`.
pub fn alpha_formula(p: u64, k: u32) -> u64 {
    let m = p.pow(k);
    match (p, k) {
        (2, 1) => 2,
        (2, _) => m + 6,
        (3 | 5, _) => m + 2 * p,
        _ => m + p,
    }
}

/// Lower and upper bounds on the fewest points of a poset with automorphism group `Z_{p^k}`.
pub fn beta_bounds_formula(p: u64, k: u32) -> (u64, u64) {
    let m = p.pow(k);
    match (p, k) {
        (2, 1) => (2, 2),
        (2, _) => (2 * m, 2 * m + 12),
        (3 | 5, _) => (2 * m, 2 * m + 3 * p),
        _ => (2 * m, 2 * m + p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{crown, cyclic_prime_power_poset, subdivided_crown};
    use crate::perm::PermGroup;

    /// Isomorphism classes of `n`-point posets by brute force: every relation
    /// contained in `<` on `0..n` that is transitive, reduced to the least
    /// relabeled matrix. Each poset has a linear extension, so no class is missed.
    fn naive_class_count(n: usize) -> usize {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        let perms = all_perms(n);
        let mut classes = std::collections::HashSet::new();
        for bits in 0u64..1 << pairs.len() {
            let mut rel = vec![false; n * n];
            for (k, &(i, j)) in pairs.iter().enumerate() {
                rel[i * n + j] = bits >> k & 1 == 1;
            }
            let transitive = (0..n).all(|i| {
                (0..n)
                    .all(|j| (0..n).all(|k| !(rel[i * n + j] && rel[j * n + k]) || rel[i * n + k]))
            });
            if !transitive {
                continue;
            }
            let canon = perms
                .iter()
                .map(|s| {
                    let mut m = vec![false; n * n];
                    for i in 0..n {
                        for j in 0..n {
                            m[s[i] * n + s[j]] = rel[i * n + j];
                        }
                    }
                    m
                })
                .min()
                .unwrap();
            classes.insert(canon);
        }
        classes.len()
    }

    fn all_perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in all_perms(n - 1) {
            for pos in 0..n {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn counts_match_naive_oracle() {
        for n in 1..=6 {
            assert_eq!(
                enumerate_posets(n).unwrap().len(),
                naive_class_count(n),
                "n = {n}"
            );
        }
        assert_eq!(enumerate_posets(1).unwrap().len(), 1);
        assert_eq!(enumerate_posets(3).unwrap().len(), 5);
    }

    #[test]
    fn no_duplicates_and_parallel_counts_agree() {
        let list = enumerate_posets(5).unwrap();
        for (i, a) in list.iter().enumerate() {
            for b in &list[i + 1..] {
                assert!(a.isomorphism_to(b).is_none());
            }
        }
        assert_eq!(count_posets(6, 4).unwrap(), count_posets(6, 1).unwrap());
        assert!(enumerate_posets(0).is_err());
        assert!(enumerate_posets(10).is_err());
    }

    #[test]
    fn realizes_examples() {
        let cfg = AutConfig::default();
        let c2 = FiniteGroup::cyclic(2).unwrap();
        assert!(realizes(&Poset::antichain(2), &c2, &cfg).unwrap());
        assert!(!realizes(&Poset::chain(3), &c2, &cfg).unwrap());
        let c3 = FiniteGroup::cyclic(3).unwrap();
        assert!(realizes(&subdivided_crown(3).unwrap().poset, &c3, &cfg).unwrap());
        // S3 on an antichain of three points, and V4 against C4.
        let s3 = FiniteGroup::symmetric(3).unwrap();
        assert!(realizes(&Poset::antichain(3), &s3, &cfg).unwrap());
        let d3 = FiniteGroup::dihedral(3).unwrap();
        assert!(realizes(&crown(3).unwrap(), &d3, &cfg).unwrap());
        let v4 = FiniteGroup::from_spec("C2^2").unwrap();
        let two_pairs = Poset::antichain(2).ordinal_sum(&Poset::antichain(2));
        assert!(realizes(&two_pairs, &v4, &cfg).unwrap());
        let c4 = FiniteGroup::cyclic(4).unwrap();
        assert!(!realizes(&two_pairs, &c4, &cfg).unwrap());
        assert!(!realizes(
            &Poset::antichain(4),
            &FiniteGroup::cyclic(24).unwrap(),
            &cfg
        )
        .unwrap());
    }

    #[test]
    fn group_matching_distinguishes_same_order() {
        // Q8 and D4 both have order 8.
        let r = crate::constructions::crown_realization(4).unwrap();
        let aut = automorphism_group(&r.poset, &AutConfig::default()).unwrap();
        assert!(group_matches(&aut, &FiniteGroup::dihedral(4).unwrap()).unwrap());
        assert!(!group_matches(&aut, &FiniteGroup::quaternion().unwrap()).unwrap());
        assert!(!group_matches(&aut, &FiniteGroup::from_spec("C2^3").unwrap()).unwrap());
        assert!(!group_matches(&PermGroup::trivial(3), &FiniteGroup::cyclic(2).unwrap()).unwrap());
    }

    #[test]
    fn small_beta_values() {
        let report = beta(&FiniteGroup::cyclic(2).unwrap(), 3, 1).unwrap();
        assert_eq!(report.beta, Some(2));
        assert_eq!(
            report.sizes.iter().map(|s| s.count).collect::<Vec<_>>(),
            vec![1, 2]
        );
        let trivial = beta(&FiniteGroup::cyclic(1).unwrap(), 3, 1).unwrap();
        assert_eq!(trivial.beta, Some(1));
        let c3 = beta(&FiniteGroup::cyclic(3).unwrap(), 6, 2).unwrap();
        assert_eq!(c3.beta, None);
        assert_eq!(c3.verdict(), "beta(C3) > 6");
        assert!(beta(&FiniteGroup::cyclic(3).unwrap(), 10, 1).is_err());
    }

    #[test]
    fn orbit_audits() {
        let cfg = AutConfig::default();
        let c3 = FiniteGroup::cyclic(3).unwrap();
        let audit = orbit_size_audit(&subdivided_crown(3).unwrap().poset, &c3, &cfg).unwrap();
        assert_eq!(audit.orbit_sizes, vec![3, 3, 3]);
        assert!(audit.passes);
        let r = cyclic_prime_power_poset(7, 1).unwrap();
        let audit = orbit_size_audit(&r.poset, &r.group, &cfg).unwrap();
        assert_eq!(audit.orbit_sizes, vec![7, 7, 7]);
        assert!(audit.passes);
        assert!(matches!(
            orbit_size_audit(&crown(5).unwrap(), &FiniteGroup::cyclic(5).unwrap(), &cfg),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            orbit_size_audit(
                &Poset::antichain(3),
                &FiniteGroup::symmetric(3).unwrap(),
                &cfg
            ),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn known_bounds_match_formulas() {
        let table = KnownBounds::load().unwrap();
        assert!(!table.entries.is_empty());
        for e in &table.entries {
            assert_eq!(e.group, format!("Z{}", e.p.pow(e.k)));
            assert_eq!(e.alpha, Some(alpha_formula(e.p, e.k)), "{}", e.group);
            assert_eq!(
                (e.beta_lower, e.beta_upper),
                beta_bounds_formula(e.p, e.k),
                "{}",
                e.group
            );
            assert!(e.beta_lower <= e.beta_upper);
            if let Some(x) = e.beta_exact {
                assert!(e.beta_lower <= x && x <= e.beta_upper);
            }
        }
        assert_eq!(table.get("Z3").unwrap().beta_exact, Some(9));
        assert_eq!(table.get("Z2").unwrap().beta_exact, Some(2));
        assert_eq!(alpha_formula(7, 1), 14);
        assert_eq!(beta_bounds_formula(2, 3), (16, 28));
    }
}

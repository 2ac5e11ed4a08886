//! Explicit posets realizing prescribed groups, each returned with the
//! group's canonical action on its points.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{FiniteGroup, GeneratingSequence};
use crate::perm::Perm;
use crate::poset::{Graph, Label, Poset};

/// Which explicit builder produced a realization, with its parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum Method {
    /// Four levels `G x {0,1,2,3}` wired by an irredundant generating sequence.
    Main {
        generators: Vec<usize>,
        d: usize,
    },
    /// Crown on `Z_n` with the dihedral action.
    Crown {
        n: usize,
    },
    SubdividedCrown {
        n: usize,
    },
    /// Crown on `Z_{p^k}` glued under a small rigidifying gadget on `Z_modulus`.
    CyclicPk {
        p: u64,
        k: u32,
        route: CyclicRoute,
        modulus: usize,
    },
    AbelianJoin {
        parts: Vec<usize>,
    },
}

impl Method {
    /// CLI tag of the builder.
    pub fn tag(&self) -> &'static str {
        match self {
            Method::Main { .. } => "main",
            Method::Crown { .. } => "crown",
            Method::SubdividedCrown { .. } => "subdivided-crown",
            Method::CyclicPk { .. } => "cyclic-pk",
            Method::AbelianJoin { .. } => "abelian-join",
        }
    }
}

/// Gadget placed above the crown in the cyclic prime-power builder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CyclicRoute {
    /// Subdivided crown on `Z_p`; each crown top `(i,1)` lies below `(i mod p, 0)`.
    SubdividedCrown,
    /// Subdivided crown on `Z_4`, used for powers of two.
    SubdividedCrownMod4,
    /// Antichain on `Z_p`; each crown top lies below `q-1`, `q` and `q+2`, `q = i mod p`.
    Discrete,
}

/// A poset together with a group and its action `g -> permutation of points`.
#[derive(Debug, Clone)]
pub struct ConstructedRealization {
    pub poset: Poset,
    pub group: FiniteGroup,
    /// `action[g]` is the point permutation of group element `g`.
    pub action: Vec<Perm>,
    pub method: Method,
}

fn construction(method: &'static str, reason: impl Into<String>) -> Error {
    Error::Construction {
        method,
        reason: reason.into(),
    }
}

/// The four-level realization of `G` from an irredundant sequence of `d >= 3` generators.
///
/// With `h_0 = h_{-1} = e`:
/// * `d` odd: `(g,1)` covers `(g h_{i+1}^{-1} h_i, 0)` for `i = -1..d-1`;
///   `(g,3)` covers `(g h_k, 2)` for even `k` and `(g h_k, 1)` for odd `k`, `0 <= k <= d`.
/// * `d` even: `(g,1)` covers `(g,0)` and `(g h_{i+1}^{-1} h_i, 0)` for `i = 1..d-1`;
///   `(g,3)` covers `(g,2)`, `(g h_k, 2)` for odd `k` and `(g h_k, 1)` for even `k`, `1 <= k <= d`.
///
/// In both cases `(g,2)` covers only `(g,1)`.
pub fn main_theorem_poset(
    group: &FiniteGroup,
    gens: &GeneratingSequence,
) -> Result<ConstructedRealization> {
    const METHOD: &str = "main";
    if gens.group_order() != group.order() {
        return Err(construction(
            METHOD,
            "generating sequence belongs to a different group",
        ));
    }
    if !group.is_irredundant(gens.elems()) {
        return Err(construction(
            METHOD,
            "generating sequence is not irredundant",
        ));
    }
    let d = gens.len();
    if d < 3 {
        return Err(construction(
            METHOD,
            format!("needs at least 3 irredundant generators, got {d}"),
        ));
    }
    let n = group.order();
    let h = |k: isize| {
        if k <= 0 {
            group.identity()
        } else {
            gens.elems()[k as usize - 1]
        }
    };
    let idx = |x: usize, level: usize| level * n + x;
    let odd = d % 2 == 1;

    let mut labels = Vec::with_capacity(4 * n);
    for level in 0..4u32 {
        for x in 0..n {
            labels.push(Label::pair(group.element_name(x), level));
        }
    }
    let mut pairs = Vec::new();
    let expected_lower = if odd { d + 1 } else { d };
    for x in 0..n {
        let mut lows: Vec<usize> = if odd { Vec::new() } else { vec![x] };
        let first = if odd { -1 } else { 1 };
        for i in first..d as isize {
            let step = group.mul(group.inv(h(i + 1)), h(i));
            lows.push(group.mul(x, step));
        }
        lows.sort_unstable();
        lows.dedup();
        if lows.len() != expected_lower {
            return Err(construction(
                METHOD,
                format!(
                    "point ({}, 1) covers {} minimal points instead of {expected_lower}",
                    group.element_name(x),
                    lows.len()
                ),
            ));
        }
        pairs.extend(lows.into_iter().map(|y| (idx(y, 0), idx(x, 1))));
        pairs.push((idx(x, 1), idx(x, 2)));
        if !odd {
            pairs.push((idx(x, 2), idx(x, 3)));
        }
        let ks = if odd { 0..=d } else { 1..=d };
        for k in ks {
            let y = group.mul(x, h(k as isize));
            // Odd d: even k hang from level 2. Even d: odd k do.
            let level = if (k % 2 == 0) == odd { 2 } else { 1 };
            pairs.push((idx(y, level), idx(x, 3)));
        }
    }
    let poset = Poset::from_covers(labels, &pairs)?;
    if !poset.redundant_declared().is_empty() {
        return Err(construction(
            METHOD,
            "declared relations are not all covers",
        ));
    }
    let action = (0..n)
        .map(|g| {
            (0..4)
                .flat_map(|level| (0..n).map(move |x| (level, x)))
                .map(|(level, x)| idx(group.mul(g, x), level))
                .collect()
        })
        .collect();
    Ok(ConstructedRealization {
        poset,
        group: group.clone(),
        action,
        method: Method::Main {
            generators: gens.elems().to_vec(),
            d,
        },
    })
}

/// Crown on `Z_n`: `(i,0) < (i,1)` and `(i,0) < (i+1,1)`. Bottoms are points
/// `0..n`, tops `n..2n`.
pub fn crown(n: usize) -> Result<Poset> {
    if n < 1 {
        return Err(construction("crown", "n must be at least 1"));
    }
    let mut labels: Vec<Label> = (0..n).map(|i| Label::pair(i.to_string(), 0)).collect();
    labels.extend((0..n).map(|i| Label::pair(i.to_string(), 1)));
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| [(i, n + i), (i, n + (i + 1) % n)])
        .collect();
    Poset::from_covers(labels, &pairs)
}

/// Crown on `Z_n` with the dihedral group `D_n` acting by `x -> ±x + b` on tops.
pub fn crown_realization(n: usize) -> Result<ConstructedRealization> {
    if n < 2 {
        return Err(construction(
            "crown",
            "the dihedral action is faithful only for n >= 2",
        ));
    }
    let poset = crown(n)?;
    let group = FiniteGroup::dihedral(n)?;
    let action = (0..2 * n)
        .map(|g| {
            let (reflect, b) = (g / n == 1, g % n);
            let mut perm = vec![0; 2 * n];
            for i in 0..n {
                if reflect {
                    perm[n + i] = n + (b + n - i) % n;
                    perm[i] = (2 * n + b - i - 1) % n;
                } else {
                    perm[n + i] = n + (i + b) % n;
                    perm[i] = (i + b) % n;
                }
            }
            perm
        })
        .collect();
    Ok(ConstructedRealization {
        poset,
        group,
        action,
        method: Method::Crown { n },
    })
}

/// Subdivided crown on `Z_n`: `(i,0) < (i,1) < (i,2)` and `(i+1,0) < (i,2)`, with
/// the rotation action of `C_n`. Point `(i, level)` has index `level * n + i`.
pub fn subdivided_crown(n: usize) -> Result<ConstructedRealization> {
    if n < 1 {
        return Err(construction("subdivided-crown", "n must be at least 1"));
    }
    let poset = subdivided_crown_poset(n, "")?;
    let group = FiniteGroup::cyclic(n)?;
    let action = (0..n).map(|c| rotation(n, 3, c)).collect();
    Ok(ConstructedRealization {
        poset,
        group,
        action,
        method: Method::SubdividedCrown { n },
    })
}

fn subdivided_crown_poset(n: usize, suffix: &str) -> Result<Poset> {
    let mut labels = Vec::with_capacity(3 * n);
    for level in 0..3u32 {
        labels.extend((0..n).map(|i| Label::pair(format!("{i}{suffix}"), level)));
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| [(i, n + i), (n + i, 2 * n + i), ((i + 1) % n, 2 * n + i)])
        .collect();
    Poset::from_covers(labels, &pairs)
}

/// Rotation by `c` of `levels` stacked copies of `Z_n` (index `level * n + i`).
fn rotation(n: usize, levels: usize, c: usize) -> Perm {
    (0..levels * n)
        .map(|x| (x / n) * n + (x % n + c) % n)
        .collect()
}

pub fn is_prime(p: u64) -> bool {
    p >= 2
        && (2..)
            .take_while(|d| d * d <= p)
            .all(|d| !p.is_multiple_of(d))
}

/// Largest `p^k` accepted by the cyclic builder.
pub const MAX_CYCLIC_ORDER: usize = 1 << 16;

/// Poset realizing `Z_{p^k}` with `2p^k + 3p` (p = 3, 5), `2^{k+1} + 12` (p = 2, k >= 2)
/// or `2p^k + p` (p >= 7) points.
pub fn cyclic_prime_power_poset(p: u64, k: u32) -> Result<ConstructedRealization> {
    cyclic_prime_power_with(p, k, None, false)
}

/// Cyclic builder with an explicit gadget. A subdivided-crown gadget for odd primes
/// other than 3 and 5 needs `allow_unverified`; such results must be checked by
/// the engine before being trusted.
pub fn cyclic_prime_power_with(
    p: u64,
    k: u32,
    route: Option<CyclicRoute>,
    allow_unverified: bool,
) -> Result<ConstructedRealization> {
    const METHOD: &str = "cyclic-pk";
    if !is_prime(p) {
        return Err(construction(METHOD, format!("{p} is not prime")));
    }
    if k < 1 {
        return Err(construction(METHOD, "k must be at least 1"));
    }
    if p == 2 && k == 1 {
        return Err(construction(
            METHOD,
            "Z_2 is realized by the 2-point antichain; this builder needs k >= 2 for p = 2",
        ));
    }
    let m = (p as usize)
        .checked_pow(k)
        .filter(|&m| m <= MAX_CYCLIC_ORDER)
        .ok_or_else(|| construction(METHOD, format!("{p}^{k} exceeds {MAX_CYCLIC_ORDER}")))?;
    let default_route = match p {
        2 => CyclicRoute::SubdividedCrownMod4,
        3 | 5 => CyclicRoute::SubdividedCrown,
        _ => CyclicRoute::Discrete,
    };
    let route = route.unwrap_or(default_route);
    let modulus = match route {
        CyclicRoute::SubdividedCrownMod4 if p == 2 => 4,
        CyclicRoute::SubdividedCrownMod4 => {
            return Err(construction(METHOD, "the Z_4 gadget applies to p = 2 only"));
        }
        CyclicRoute::SubdividedCrown if p == 2 => {
            return Err(construction(METHOD, "p = 2 needs the Z_4 gadget"));
        }
        CyclicRoute::SubdividedCrown if p != 3 && p != 5 && !allow_unverified => {
            return Err(construction(
                METHOD,
                format!("the subdivided-crown gadget is only established for p = 3, 5 (got {p}); pass the unverified flag to try it"),
            ));
        }
        CyclicRoute::SubdividedCrown => p as usize,
        CyclicRoute::Discrete if p < 7 => {
            return Err(construction(METHOD, "the discrete gadget needs p >= 7"));
        }
        CyclicRoute::Discrete => p as usize,
    };

    let crown_part = crown(m)?;
    let (gadget, gadget_levels) = match route {
        CyclicRoute::Discrete => {
            let labels = (0..modulus)
                .map(|j| Label::pair(format!("{j}'"), 2))
                .collect();
            (Poset::from_covers(labels, &[])?, 1)
        }
        _ => {
            let sc = subdivided_crown_poset(modulus, "'")?;
            let labels = sc
                .labels()
                .iter()
                .map(|l| match l {
                    Label::Pair(tag, level) => Label::pair(tag.clone(), level + 2),
                    other => other.clone(),
                })
                .collect();
            (sc.with_labels(labels)?, 3)
        }
    };
    let offset = 2 * m;
    let mut labels = crown_part.labels().to_vec();
    labels.extend(gadget.labels().iter().cloned());
    let mut pairs = crown_part.covers();
    pairs.extend(
        gadget
            .covers()
            .into_iter()
            .map(|(a, b)| (a + offset, b + offset)),
    );
    for i in 0..m {
        let q = i % modulus;
        let top = m + i;
        match route {
            CyclicRoute::Discrete => {
                for j in [(q + modulus - 1) % modulus, q, (q + 2) % modulus] {
                    pairs.push((top, offset + j));
                }
            }
            _ => pairs.push((top, offset + q)),
        }
    }
    let poset = Poset::from_covers(labels, &pairs)?;
    if !poset.redundant_declared().is_empty() {
        return Err(construction(
            METHOD,
            "declared relations are not all covers",
        ));
    }
    let expected = match route {
        CyclicRoute::Discrete => 2 * m + modulus,
        _ => 2 * m + 3 * modulus,
    };
    if poset.len() != expected {
        return Err(construction(
            METHOD,
            format!("built {} points, expected {expected}", poset.len()),
        ));
    }
    let group = FiniteGroup::cyclic(m)?;
    let action = (0..m)
        .map(|c| {
            let mut perm = rotation(m, 2, c);
            let shift = c % modulus;
            perm.extend(
                rotation(modulus, gadget_levels, shift)
                    .into_iter()
                    .map(|x| x + offset),
            );
            perm
        })
        .collect();
    Ok(ConstructedRealization {
        poset,
        group,
        action,
        method: Method::CyclicPk {
            p,
            k,
            route,
            modulus,
        },
    })
}

/// Ordinal sum of subdivided crowns on `Z_{n_1}, .., Z_{n_d}` (bottom to top),
/// realizing `C_{n_1} x .. x C_{n_d}` with `3 * sum(n_i)` points.
pub fn abelian_join_poset(parts: &[usize]) -> Result<ConstructedRealization> {
    const METHOD: &str = "abelian-join";
    if parts.is_empty() {
        return Err(construction(METHOD, "at least one part is required"));
    }
    if parts.contains(&0) {
        return Err(construction(METHOD, "parts must be positive"));
    }
    let mut poset = Poset::empty();
    for (b, &n) in parts.iter().enumerate() {
        let block = subdivided_crown_poset(n, "")?;
        let labels = block
            .labels()
            .iter()
            .map(|l| match l {
                Label::Pair(tag, level) => Label::pair(format!("{b}:{tag}"), level + 3 * b as u32),
                other => other.clone(),
            })
            .collect();
        poset = poset.ordinal_sum(&block.with_labels(labels)?);
    }
    let factors = parts
        .iter()
        .map(|&n| FiniteGroup::cyclic(n))
        .collect::<Result<Vec<_>>>()?;
    let group = FiniteGroup::direct_product(&factors)?;
    let action = (0..group.order())
        .map(|mut x| {
            let mut coords = vec![0usize; parts.len()];
            for (slot, &n) in coords.iter_mut().zip(parts).rev() {
                *slot = x % n;
                x /= n;
            }
            let mut perm = Vec::with_capacity(poset.len());
            let mut offset = 0;
            for (&n, &c) in parts.iter().zip(&coords) {
                perm.extend(rotation(n, 3, c).into_iter().map(|y| y + offset));
                offset += 3 * n;
            }
            perm
        })
        .collect();
    Ok(ConstructedRealization {
        poset,
        group,
        action,
        method: Method::AbelianJoin {
            parts: parts.to_vec(),
        },
    })
}

/// Face poset of `graph` with a new least and greatest point added.
pub fn graph_realizer_lattice(graph: &Graph) -> Poset {
    graph.face_poset().bounded()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aut::{automorphism_group, AutConfig};
    use crate::perm::compose;

    fn aut_order(p: &Poset) -> u64 {
        automorphism_group(p, &AutConfig::default())
            .unwrap()
            .order_u64()
            .unwrap()
    }

    fn assert_action_is_homomorphism(r: &ConstructedRealization) {
        for a in 0..r.group.order() {
            assert!(r.poset.is_automorphism(&r.action[a]));
            for b in 0..r.group.order() {
                assert_eq!(
                    r.action[r.group.mul(a, b)],
                    compose(&r.action[a], &r.action[b])
                );
            }
        }
    }

    #[test]
    fn crowns() {
        let c3 = crown(3).unwrap();
        assert_eq!(c3.len(), 6);
        // Hasse diagram is a 6-cycle: every point has exactly two neighbours.
        for x in 0..6 {
            assert_eq!(c3.lower_covers(x).len() + c3.upper_covers(x).len(), 2);
        }
        let c1 = crown(1).unwrap();
        assert_eq!(c1.covers(), vec![(0, 1)]);
        let c2 = crown(2).unwrap();
        assert_eq!(c2.cover_count(), 4);
        assert_eq!(aut_order(&c2), 4);
        assert!(crown(0).is_err());
        for n in 2..7 {
            let r = crown_realization(n).unwrap();
            assert_action_is_homomorphism(&r);
            assert_eq!(aut_order(&r.poset), 2 * n as u64);
        }
    }

    #[test]
    fn subdivided_crowns() {
        let r = subdivided_crown(3).unwrap();
        assert_eq!(r.poset.len(), 9);
        assert_eq!(aut_order(&r.poset), 3);
        assert_action_is_homomorphism(&r);
        let one = subdivided_crown(1).unwrap();
        assert!(one.poset.isomorphism_to(&Poset::chain(3)).is_some());
        assert_eq!(aut_order(&one.poset), 1);
        let twelve = subdivided_crown(12).unwrap();
        assert_eq!(twelve.poset.len(), 36);
        assert_eq!(aut_order(&twelve.poset), 12);
        for n in 2..10 {
            assert_eq!(aut_order(&subdivided_crown(n).unwrap().poset), n as u64);
        }
    }

    #[test]
    fn cyclic_builders() {
        for (p, k, size, order) in [(3, 2, 27, 9), (2, 2, 20, 4), (7, 1, 21, 7), (3, 1, 15, 3)] {
            let r = cyclic_prime_power_poset(p, k).unwrap();
            assert_eq!(r.poset.len(), size, "p={p} k={k}");
            assert_eq!(aut_order(&r.poset), order, "p={p} k={k}");
            assert_action_is_homomorphism(&r);
        }
        assert!(cyclic_prime_power_poset(2, 1).is_err());
        assert!(cyclic_prime_power_poset(9, 1).is_err());
        assert!(cyclic_prime_power_poset(3, 0).is_err());
        assert!(cyclic_prime_power_with(7, 1, Some(CyclicRoute::SubdividedCrown), false).is_err());
        let trial =
            cyclic_prime_power_with(7, 1, Some(CyclicRoute::SubdividedCrown), true).unwrap();
        assert_eq!(trial.poset.len(), 2 * 7 + 21);
        assert!(cyclic_prime_power_with(5, 1, Some(CyclicRoute::Discrete), false).is_err());
    }

    #[test]
    fn abelian_joins() {
        let r = abelian_join_poset(&[2, 4]).unwrap();
        assert_eq!(r.poset.len(), 18);
        assert_eq!(r.group.order(), 8);
        assert_action_is_homomorphism(&r);
        assert_eq!(aut_order(&r.poset), 8);
        let five = abelian_join_poset(&[5]).unwrap();
        assert_eq!((five.poset.len(), aut_order(&five.poset)), (15, 5));
        assert!(abelian_join_poset(&[]).is_err());
        assert!(abelian_join_poset(&[3, 0]).is_err());
    }

    #[test]
    fn main_construction_small() {
        let g = FiniteGroup::from_spec("C2^3").unwrap();
        let h = GeneratingSequence::new(&g, g.parse_elements("e1,e2,e3").unwrap()).unwrap();
        let r = main_theorem_poset(&g, &h).unwrap();
        assert_eq!(r.poset.len(), 32);
        assert_action_is_homomorphism(&r);
        let two =
            GeneratingSequence::new(&FiniteGroup::from_spec("C2^2").unwrap(), vec![2, 1]).unwrap();
        let v4 = FiniteGroup::from_spec("C2^2").unwrap();
        assert!(matches!(
            main_theorem_poset(&v4, &two),
            Err(Error::Construction { method: "main", .. })
        ));
    }

    #[test]
    fn graph_lattices() {
        let k3 = Graph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(graph_realizer_lattice(&k3).len(), 8);
        let point = Graph::new(1, &[]).unwrap();
        assert!(graph_realizer_lattice(&point)
            .isomorphism_to(&Poset::chain(3))
            .is_some());
        let p3 = Graph::new(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(graph_realizer_lattice(&p3).len(), 7);
    }
}

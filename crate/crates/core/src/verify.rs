//! Checking that a group action on a poset realizes the group as its full
//! automorphism group.

use std::collections::HashSet;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::aut::{automorphism_group, AutConfig};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::perm::{compose, orbit_partition, Perm};
use crate::poset::{is_permutation, Poset};

/// Action file: `action[g]` is the image array of group element `g`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionFile {
    pub group: String,
    pub degree: usize,
    pub action: Vec<Perm>,
}

/// Outcome of checking an action of `G` on `P`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealizationCertificate {
    pub group: String,
    pub group_order: usize,
    pub points: usize,
    /// Hex digest of the poset structure, independent of labels.
    pub poset_hash: String,
    pub order_preserving: bool,
    pub homomorphism: bool,
    pub injective: bool,
    pub free: bool,
    /// `|Aut(P)|`, absent when the engine was skipped.
    #[serde(with = "optional_order", default)]
    pub aut_order: Option<BigUint>,
    /// Number of orbits of `G` on the points.
    pub orbit_count: usize,
    /// `true` iff the action is a faithful order-preserving action and
    /// `|Aut(P)| = |G|`. Absent when the engine was skipped.
    pub verdict: Option<bool>,
    /// Whether the automorphism engine ran.
    pub verified: bool,
}

mod optional_order {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(order: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
        match order {
            Some(o) => crate::perm::order_serde::serialize(o, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigUint>, D::Error> {
        #[derive(Deserialize)]
        struct Wrapped(#[serde(with = "crate::perm::order_serde")] BigUint);
        Ok(Option::<Wrapped>::deserialize(d)?.map(|w| w.0))
    }
}

/// Checks structural validity of `action` and returns the error the CLI reports.
fn check_shape(group: &FiniteGroup, poset: &Poset, action: &[Perm]) -> Result<()> {
    if action.len() != group.order() {
        return Err(Error::MalformedAction(format!(
            "{} permutations given for a group of order {}",
            action.len(),
            group.order()
        )));
    }
    for (g, perm) in action.iter().enumerate() {
        if perm.len() != poset.len() {
            return Err(Error::MalformedAction(format!(
                "permutation of element {g} has length {}, poset has {} points",
                perm.len(),
                poset.len()
            )));
        }
        if !is_permutation(perm) {
            return Err(Error::MalformedAction(format!(
                "image array of element {g} is not a bijection"
            )));
        }
    }
    Ok(())
}

/// Verifies order preservation, the homomorphism law, faithfulness and
/// freeness of `action`, then compares `|Aut(P)|` with `|G|`.
pub fn verify_realization(
    group: &FiniteGroup,
    poset: &Poset,
    action: &[Perm],
    config: &AutConfig,
) -> Result<RealizationCertificate> {
    let mut cert = check_action(group, poset, action)?;
    let aut = automorphism_group(poset, config)?;
    let matches = aut.order == BigUint::from(group.order());
    cert.verdict = Some(cert.order_preserving && cert.homomorphism && cert.injective && matches);
    cert.aut_order = Some(aut.order);
    cert.verified = true;
    Ok(cert)
}

/// The action checks of [`verify_realization`] without the automorphism engine.
pub fn check_action(
    group: &FiniteGroup,
    poset: &Poset,
    action: &[Perm],
) -> Result<RealizationCertificate> {
    check_shape(group, poset, action)?;
    let order_preserving = action.iter().all(|perm| poset.is_automorphism(perm));

    // phi(x s) = phi(x) phi(s) for all x and every generator s, plus phi(e) = id,
    // extends to all products by induction on word length.
    let gens = greedy_generators(group);
    let identity_ok = action[group.identity()]
        .iter()
        .enumerate()
        .all(|(i, &j)| i == j);
    let homomorphism = identity_ok
        && (0..group.order()).all(|x| {
            gens.iter()
                .all(|&s| action[group.mul(x, s)] == compose(&action[x], &action[s]))
        });
    let injective = action.iter().collect::<HashSet<_>>().len() == action.len();
    let free = (0..group.order())
        .filter(|&g| g != group.identity())
        .all(|g| action[g].iter().enumerate().all(|(i, &j)| i != j));
    let orbit_count = orbit_partition(poset.len(), action).len();
    Ok(RealizationCertificate {
        group: group.display_name(),
        group_order: group.order(),
        points: poset.len(),
        poset_hash: format!("{:016x}", poset.structure_hash()),
        order_preserving,
        homomorphism,
        injective,
        free,
        aut_order: None,
        orbit_count,
        verdict: None,
        verified: false,
    })
}

fn greedy_generators(group: &FiniteGroup) -> Vec<usize> {
    let mut gens: Vec<usize> = Vec::new();
    let mut span = vec![group.identity()];
    for x in 0..group.order() {
        if span.len() == group.order() {
            break;
        }
        if !span.contains(&x) {
            gens.push(x);
            span = group.generated_subgroup(&gens);
        }
    }
    gens
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{crown_realization, subdivided_crown};

    #[test]
    fn swap_on_two_points() {
        let g = FiniteGroup::cyclic(2).unwrap();
        let p = Poset::antichain(2);
        let cert =
            verify_realization(&g, &p, &[vec![0, 1], vec![1, 0]], &AutConfig::default()).unwrap();
        assert_eq!(cert.verdict, Some(true));
        assert_eq!(cert.orbit_count, 1);
        assert!(cert.free && cert.injective && cert.homomorphism);
    }

    #[test]
    fn detects_each_failure() {
        let g = FiniteGroup::cyclic(2).unwrap();
        let chain = Poset::chain(2);
        let cert = verify_realization(&g, &chain, &[vec![0, 1], vec![1, 0]], &AutConfig::default())
            .unwrap();
        assert!(!cert.order_preserving);
        assert_eq!(cert.verdict, Some(false));

        let trivial = verify_realization(
            &g,
            &Poset::antichain(2),
            &[vec![0, 1], vec![0, 1]],
            &AutConfig::default(),
        )
        .unwrap();
        assert!(!trivial.injective && !trivial.free);
        assert_eq!(trivial.verdict, Some(false));

        // C2 acting faithfully on an antichain of three points: Aut is S3.
        let small = verify_realization(
            &g,
            &Poset::antichain(3),
            &[vec![0, 1, 2], vec![1, 0, 2]],
            &AutConfig::default(),
        )
        .unwrap();
        assert!(small.homomorphism && small.injective && !small.free);
        assert_eq!(small.aut_order, Some(BigUint::from(6u32)));
        assert_eq!(small.verdict, Some(false));

        let c3 = FiniteGroup::cyclic(3).unwrap();
        let ap = Poset::antichain(3);
        let bad_hom = [vec![0, 1, 2], vec![1, 2, 0], vec![1, 2, 0]];
        assert!(!check_action(&c3, &ap, &bad_hom).unwrap().homomorphism);
    }

    #[test]
    fn malformed_actions() {
        let g = FiniteGroup::cyclic(2).unwrap();
        let p = Poset::antichain(2);
        for action in [
            vec![vec![0, 1]],
            vec![vec![0, 1], vec![1]],
            vec![vec![0, 1], vec![1, 1]],
        ] {
            assert!(matches!(
                check_action(&g, &p, &action),
                Err(Error::MalformedAction(_))
            ));
        }
    }

    #[test]
    fn constructions_verify() {
        for r in [subdivided_crown(5).unwrap(), crown_realization(4).unwrap()] {
            let cert =
                verify_realization(&r.group, &r.poset, &r.action, &AutConfig::default()).unwrap();
            assert_eq!(cert.verdict, Some(true), "{:?}", r.method);
        }
    }

    #[test]
    fn certificate_json_roundtrip() {
        let r = subdivided_crown(3).unwrap();
        let cert =
            verify_realization(&r.group, &r.poset, &r.action, &AutConfig::default()).unwrap();
        let text = serde_json::to_string(&cert).unwrap();
        assert!(text.contains("\"aut_order\":3"));
        assert_eq!(
            serde_json::from_str::<RealizationCertificate>(&text).unwrap(),
            cert
        );
        let unverified = check_action(&r.group, &r.poset, &r.action).unwrap();
        let text = serde_json::to_string(&unverified).unwrap();
        assert!(text.contains("\"verdict\":null"));
        assert_eq!(
            serde_json::from_str::<RealizationCertificate>(&text).unwrap(),
            unverified
        );
    }
}

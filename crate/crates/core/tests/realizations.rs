use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use poset_realizer::aut::AutConfig;
use poset_realizer::beta::{orbit_size_audit, realizes};
use poset_realizer::constructions::{
    abelian_join_poset, cyclic_prime_power_poset, cyclic_prime_power_with, main_theorem_poset,
    CyclicRoute,
};
use poset_realizer::verify::verify_realization;
use poset_realizer::{FiniteGroup, GeneratingSequence};

/// Random irredundant sequences of length at least 3, from shuffled element lists.
fn random_sequences(
    g: &FiniteGroup,
    rng: &mut ChaCha8Rng,
    wanted: usize,
) -> Vec<GeneratingSequence> {
    let mut elems: Vec<usize> = (0..g.order()).filter(|&x| x != g.identity()).collect();
    let mut out = Vec::new();
    for _ in 0..200 {
        if out.len() == wanted {
            break;
        }
        elems.shuffle(rng);
        let seq = g.irredundant_reduce(&elems).unwrap();
        if seq.len() >= 3 {
            out.push(seq);
        }
    }
    out
}

#[test]
fn main_construction_realizes_groups_for_random_sequences() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cfg = AutConfig::default();
    for spec in ["C2^3", "C2^4", "S4", "C2xC2xC3", "D4xC2", "C2xQ8"] {
        let g = FiniteGroup::from_spec(spec).unwrap();
        let seqs = random_sequences(&g, &mut rng, 3);
        assert!(
            !seqs.is_empty(),
            "{spec} has no irredundant sequence of length 3 in the sample"
        );
        for h in seqs {
            let r = main_theorem_poset(&g, &h).unwrap();
            assert_eq!(r.poset.len(), 4 * g.order());
            let cert = verify_realization(&g, &r.poset, &r.action, &cfg).unwrap();
            assert_eq!(cert.verdict, Some(true), "{spec} with {:?}", h.elems());
            assert!(cert.free);
            assert_eq!(cert.orbit_count, 4);
        }
    }
}

#[test]
fn main_construction_rejects_short_sequences() {
    let g = FiniteGroup::from_spec("S3").unwrap();
    let h = GeneratingSequence::new(&g, g.parse_elements("(12),(123)").unwrap()).unwrap();
    assert!(main_theorem_poset(&g, &h).is_err());
}

#[test]
fn abelian_join_orders_multiply() {
    let cfg = AutConfig::default();
    let lists: [&[usize]; 7] = [
        &[2, 3],
        &[4, 4],
        &[2, 2, 2],
        &[3, 5],
        &[1, 6],
        &[2, 3, 5, 5],
        &[7, 8],
    ];
    for parts in lists {
        let r = abelian_join_poset(parts).unwrap();
        let product: usize = parts.iter().product();
        assert_eq!(r.poset.len(), 3 * parts.iter().sum::<usize>());
        let cert = verify_realization(&r.group, &r.poset, &r.action, &cfg).unwrap();
        assert_eq!(cert.aut_order, Some(product.into()), "{parts:?}");
        assert_eq!(cert.verdict, Some(true));
    }
}

#[test]
fn cyclic_realizers_pass_the_orbit_audit() {
    let cfg = AutConfig::default();
    for (p, k) in [(2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (7, 1), (13, 1)] {
        let r = cyclic_prime_power_poset(p, k).unwrap();
        assert!(realizes(&r.poset, &r.group, &cfg).unwrap(), "({p},{k})");
        let audit = orbit_size_audit(&r.poset, &r.group, &cfg).unwrap();
        assert!(audit.passes, "({p},{k}): {:?}", audit.orbit_sizes);
        assert_eq!((audit.prime, audit.exponent), (p, k));
    }
}

#[test]
fn unverified_route_reports_engine_verdicts() {
    let cfg = AutConfig::default();
    for p in [7, 11] {
        let r = cyclic_prime_power_with(p, 1, Some(CyclicRoute::SubdividedCrown), true).unwrap();
        let cert = verify_realization(&r.group, &r.poset, &r.action, &cfg).unwrap();
        assert!(cert.order_preserving && cert.homomorphism && cert.injective);
        assert!(cert.verdict.is_some());
    }
}

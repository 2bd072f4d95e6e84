//! Independent oracles: closed-form counts of fully commutative elements and
//! the uniqueness of the KL basis.

use std::sync::Arc;

use klcells::coxeter::commutation::is_fully_commutative_by_search;
use klcells::coxeter::{CoxeterGraph, CoxeterGroup, CoxeterType};
use klcells::hecke::{BarTable, DescentChoice, HeckeElt, KlTable};
use klcells::Poly;

fn group(kind: CoxeterType) -> Arc<CoxeterGroup> {
    Arc::new(CoxeterGroup::new(CoxeterGraph::new(kind).unwrap()).unwrap())
}

fn catalan(n: u64) -> u64 {
    (0..n).fold(1u64, |c, k| c * 2 * (2 * k + 1) / (k + 2))
}

fn fc_count(kind: CoxeterType) -> usize {
    group(kind).fully_commutative().len()
}

#[test]
fn catalan_helper() {
    assert_eq!(
        (0..8).map(catalan).collect::<Vec<_>>(),
        [1, 1, 2, 5, 14, 42, 132, 429]
    );
}

#[test]
fn fc_counts_type_a_are_catalan() {
    for n in 1..=6 {
        assert_eq!(
            fc_count(CoxeterType::A(n)) as u64,
            catalan(n as u64 + 1),
            "A{n}"
        );
    }
}

#[test]
fn fc_counts_types_b_and_d() {
    for n in 2..=5u64 {
        assert_eq!(
            fc_count(CoxeterType::B(n as usize)) as u64,
            (n + 2) * catalan(n) - 1,
            "B{n}"
        );
    }
    for n in 4..=6u64 {
        assert_eq!(
            fc_count(CoxeterType::D(n as usize)) as u64,
            (n + 3) * catalan(n) / 2 - 1,
            "D{n}"
        );
    }
}

#[test]
fn fc_counts_exceptional_and_dihedral() {
    assert_eq!(fc_count(CoxeterType::F4), 106);
    assert_eq!(fc_count(CoxeterType::H(3)), 44);
    for m in 3..=12 {
        assert_eq!(fc_count(CoxeterType::I2(m)), 2 * m as usize - 1);
    }
}

#[test]
fn heap_test_matches_commutation_search_on_f4() {
    let g = group(CoxeterType::F4);
    for w in g.elements() {
        assert_eq!(
            g.is_fully_commutative(w),
            is_fully_commutative_by_search(g.graph(), g.word(w)),
            "{}",
            g.format(w)
        );
    }
}

#[test]
fn perturbing_any_kl_coefficient_breaks_bar_invariance() {
    for kind in [CoxeterType::A(3), CoxeterType::B(3)] {
        let g = group(kind);
        let kl: KlTable = KlTable::build(g.clone(), DescentChoice::Lowest).unwrap();
        let bar: BarTable = BarTable::new(&g);
        for w in g.elements() {
            let c = kl.clprime_elt(w);
            assert_eq!(bar.bar(&c), c);
            for x in g.elements().filter(|&x| x < w && g.bruhat_leq(x, w)) {
                for k in 1..=2 {
                    let mut probe = c.clone();
                    probe.add_scaled(&HeckeElt::basis(x), &Poly::v_pow(-k));
                    assert_ne!(
                        bar.bar(&probe),
                        probe,
                        "{kind} w={} x={}",
                        g.format(w),
                        g.format(x)
                    );
                }
            }
        }
    }
}

#[test]
fn kl_table_survives_cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cache = klcells::hecke::KlCache::new(dir.path());
    let g = group(CoxeterType::D(4));
    let direct: KlTable = KlTable::build(g.clone(), DescentChoice::Lowest).unwrap();
    let (cold, _) = cache
        .load_or_build::<i64>(g.clone(), DescentChoice::Lowest)
        .unwrap();
    let (warm, load) = cache
        .load_or_build::<i64>(g.clone(), DescentChoice::Lowest)
        .unwrap();
    assert_eq!(load, klcells::hecke::CacheLoad::Warm);
    for w in g.elements() {
        assert_eq!(cold.clprime_elt(w), direct.clprime_elt(w));
        assert_eq!(warm.clprime_elt(w), direct.clprime_elt(w));
    }
}

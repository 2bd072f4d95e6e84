//! Observed multipliers of single rewriting steps in type B, per rank.

use std::collections::BTreeSet;

use klcells::coxeter::{CoxeterGraph, CoxeterGroup, CoxeterType, Gen};
use klcells::tl::{rewrite_b, MonomialNF};

#[test]
fn single_step_multipliers() {
    for n in 2..=5 {
        let g = CoxeterGroup::new(CoxeterGraph::new(CoxeterType::B(n)).unwrap()).unwrap();
        let mut seen = BTreeSet::new();
        for w in g.fully_commutative() {
            for s in 0..n as Gen {
                let nf = rewrite_b(&g, MonomialNF::new(w), s).unwrap();
                assert!(g.is_fully_commutative(nf.w));
                assert!(nf.mu_exp <= 1);
                seen.insert(nf.a);
            }
        }
        println!("B{n}: a in {seen:?}");
        assert_eq!(seen, BTreeSet::from([1, 2]), "B{n}");
    }
}

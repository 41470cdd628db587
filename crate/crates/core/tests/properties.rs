//! Property tests for the structural invariants: ancestral inclusion,
//! surgery behavior, duality, symmetry, projection laws, information
//! identities, and the zero-causal-effect biconditional.

mod common;

use proptest::prelude::*;

use causal_core::distribution::{
    conditional_mutual_information, kl_divergence, mutual_information, JointTable, Var,
};
use causal_core::graph::VertexSet;
use causal_core::intervention::InterventionSpec;

use common::{gen_cpt_model, gen_dag, gen_values, Stream};

fn vertex_sets(stream: &mut Stream, n: usize) -> (VertexSet, VertexSet, VertexSet) {
    let mut a = VertexSet::empty();
    let mut b = VertexSet::empty();
    let mut z = VertexSet::empty();
    for v in 0..n {
        match stream.below(4) {
            0 => a.insert(v),
            1 => b.insert(v),
            2 => z.insert(v),
            _ => {}
        }
    }
    (a, b, z)
}

/// A random full-support table over `1..=4` variables of cardinality
/// `2..=3`.
fn random_table(seed: u64) -> JointTable {
    let mut stream = Stream::new(seed);
    let n = 1 + stream.below(4);
    let scope: Vec<Var> = (0..n).map(|i| Var::new(i, 2 + stream.below(2))).collect();
    let cells: usize = scope.iter().map(|v| v.cardinality).product();
    JointTable::new(scope, stream.pmf(cells)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ancestral_inclusion_holds_on_random_dags(seed in any::<u64>()) {
        let mut stream = Stream::new(seed);
        let n = 2 + stream.below(7);
        let dag = gen_dag(&mut stream, n, 0.5);
        for i in 0..n {
            let nd = dag.nondescendants_of(&VertexSet::singleton(i)).unwrap();
            let anc = dag.ancestors_of(&nd).unwrap();
            prop_assert!(anc.is_subset(&nd), "vertex {i}: ancestors of N_i leak out of N_i");
        }
    }

    #[test]
    fn surgery_removes_incoming_edges_and_is_idempotent(seed in any::<u64>()) {
        let mut stream = Stream::new(seed);
        let n = 2 + stream.below(7);
        let dag = gen_dag(&mut stream, n, 0.5);
        let s = stream.subset(&(0..n).collect(), 0.4);
        let cut = dag.surgery(&s).unwrap();
        for v in 0..n {
            if s.contains(v) {
                prop_assert!(cut.parents(v).is_empty());
            } else {
                prop_assert_eq!(cut.parents(v), dag.parents(v));
            }
        }
        prop_assert_eq!(&cut.surgery(&s).unwrap(), &cut);
    }

    #[test]
    fn descendants_and_ancestors_are_dual(seed in any::<u64>()) {
        let mut stream = Stream::new(seed);
        let n = 2 + stream.below(7);
        let dag = gen_dag(&mut stream, n, 0.5);
        for i in 0..n {
            let desc = dag.descendants_of(&VertexSet::singleton(i)).unwrap();
            for j in 0..n {
                let anc_j = dag.ancestors_of(&VertexSet::singleton(j)).unwrap();
                prop_assert_eq!(desc.contains(j), anc_j.contains(i));
            }
        }
    }

    #[test]
    fn d_separation_is_symmetric(seed in any::<u64>()) {
        let mut stream = Stream::new(seed);
        let n = 3 + stream.below(6);
        let dag = gen_dag(&mut stream, n, 0.5);
        let (a, b, z) = vertex_sets(&mut stream, n);
        let ab = dag.d_separated(&a, &b, &z).unwrap();
        let ba = dag.d_separated(&b, &a, &z).unwrap();
        prop_assert_eq!(ab, ba);
    }

    #[test]
    fn marginals_stay_normalized_and_project(seed in any::<u64>()) {
        let table = random_table(seed);
        let mut stream = Stream::new(seed ^ 0xabcd);
        let scope_set = table.scope_set();
        let t: VertexSet = stream.subset(&scope_set, 0.7);
        let m = table.marginal(&t).unwrap();
        let mass: f64 = m.probs().iter().sum();
        prop_assert!((mass - 1.0).abs() <= 1e-12);
        // Projection: collapsing in two steps equals collapsing once.
        let t2 = stream.subset(&t, 0.6);
        let two_step = m.marginal(&t2).unwrap();
        let one_step = table.marginal(&t2).unwrap();
        prop_assert!(two_step.max_abs_diff(&one_step).unwrap() <= 1e-12);
    }

    #[test]
    fn kl_is_positive_definite_on_full_support(seed in any::<u64>()) {
        let p = random_table(seed);
        let q_probs = {
            let mut stream = Stream::new(seed ^ 0x77);
            stream.pmf(p.probs().len())
        };
        let q = JointTable::new(p.scope().to_vec(), q_probs).unwrap();
        let d_pq = kl_divergence(&p, &q).unwrap().bits().unwrap();
        prop_assert!(d_pq >= 0.0);
        prop_assert_eq!(kl_divergence(&p, &p).unwrap().bits().unwrap(), 0.0);
        if p.max_abs_diff(&q).unwrap() > 1e-6 {
            prop_assert!(d_pq > 0.0, "distinct tables must have positive divergence");
        }
    }

    #[test]
    fn mutual_information_is_symmetric(seed in any::<u64>()) {
        let table = random_table(seed);
        let mut stream = Stream::new(seed ^ 0x3141);
        let scope_set = table.scope_set();
        let a = stream.subset(&scope_set, 0.4);
        let b = stream.subset(&scope_set.difference(&a), 0.6);
        let ab = mutual_information(&table, &a, &b).unwrap().bits().unwrap();
        let ba = mutual_information(&table, &b, &a).unwrap().bits().unwrap();
        prop_assert!((ab - ba).abs() <= 1e-12);
        prop_assert!(ab >= 0.0);
    }

    #[test]
    fn mutual_information_chain_rule(seed in any::<u64>()) {
        let table = random_table(seed);
        let mut stream = Stream::new(seed ^ 0x999);
        let scope_set = table.scope_set();
        let a = stream.subset(&scope_set, 0.4);
        let rest = scope_set.difference(&a);
        let b = stream.subset(&rest, 0.5);
        let c = stream.subset(&rest.difference(&b), 0.7);
        let lhs = mutual_information(&table, &a, &b.union(&c)).unwrap().bits().unwrap();
        let rhs = mutual_information(&table, &a, &c).unwrap().bits().unwrap()
            + conditional_mutual_information(&table, &a, &b, &c).unwrap().bits().unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9, "chain rule gap {}", (lhs - rhs).abs());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn markov_screening_holds_for_every_variable(seed in any::<u64>()) {
        // Each variable is independent of its earlier nondescendants given
        // its parents.
        let mut stream = Stream::new(seed);
        let model = gen_cpt_model(&mut stream, 5, 3);
        let joint = model.joint().unwrap();
        for i in 0..model.vertex_count() {
            let parents: VertexSet = model.dag().parents(i).iter().copied().collect();
            let earlier: VertexSet = (0..i).filter(|v| !parents.contains(*v)).collect();
            let cmi = conditional_mutual_information(
                &joint,
                &earlier,
                &VertexSet::singleton(i),
                &parents,
            )
            .unwrap()
            .bits()
            .unwrap();
            prop_assert!(cmi <= 1e-9, "variable {i} leaks {cmi} bits past its parents");
        }
    }

    #[test]
    fn directed_information_is_nonnegative(seed in any::<u64>()) {
        let mut stream = Stream::new(seed);
        let model = gen_cpt_model(&mut stream, 5, 3);
        let all: VertexSet = (0..model.vertex_count()).collect();
        let s = stream.subset(&all, 0.4);
        let t = stream.subset(&all.difference(&s), 0.5);
        let z = stream.subset(&all.difference(&s).difference(&t), 0.4);
        let di = model.conditional_directed_information(&t, &s, &z).unwrap();
        prop_assert!(di.bits().unwrap_or(f64::INFINITY) >= 0.0);
    }

    #[test]
    fn nondescendant_directed_information_equals_mutual_information(seed in any::<u64>()) {
        let mut stream = Stream::new(seed);
        let model = gen_cpt_model(&mut stream, 5, 3);
        let all: VertexSet = (0..model.vertex_count()).collect();
        let s = stream.subset(&all, 0.4);
        let t = stream.subset(&model.dag().nondescendants_of(&s).unwrap(), 0.6);
        let di = model.directed_information(&t, &s).unwrap().bits().unwrap();
        let mi = mutual_information(&model.joint().unwrap(), &t, &s)
            .unwrap()
            .bits()
            .unwrap();
        prop_assert!((di - mi).abs() <= 1e-9, "DI {di} vs MI {mi}");
    }

    #[test]
    fn directed_information_to_own_parents_vanishes(seed in any::<u64>()) {
        // Intervening on a set's parents is indistinguishable from observing
        // them, so the directed flow from the set to its parents is zero.
        // For set-valued sources this needs the ancestral restriction
        // T ∩ A(Π_T) = ∅; singletons satisfy it automatically.
        let mut stream = Stream::new(seed);
        let model = gen_cpt_model(&mut stream, 5, 3);
        let t = VertexSet::singleton(stream.below(model.vertex_count()));
        let parents = model.dag().parents_of_set(&t).unwrap();
        let di = model.directed_information(&t, &parents).unwrap();
        prop_assert!(di.is_zero_within(1e-12), "singleton flow {di}");

        let t = stream.subset(&(0..model.vertex_count()).collect(), 0.4);
        let parents = model.dag().parents_of_set(&t).unwrap();
        let ancestors = model.dag().ancestors_of(&parents).unwrap();
        if !t.is_empty() && t.is_disjoint(&ancestors) {
            let di = model.directed_information(&t, &parents).unwrap();
            prop_assert!(di.is_zero_within(1e-12), "set flow {di}");
        }
    }

    #[test]
    fn zero_cdi_iff_intervention_matches_observation(seed in any::<u64>()) {
        let mut stream = Stream::new(seed);
        let model = gen_cpt_model(&mut stream, 5, 3);
        let all: VertexSet = (0..model.vertex_count()).collect();
        let s = stream.subset(&all, 0.35);
        let t = stream.subset(&all.difference(&s), 0.5);
        let s_prime = stream.subset(&all.difference(&s).difference(&t), 0.4);
        if s.is_empty() || t.is_empty() {
            return Ok(());
        }
        let cdi = model
            .conditional_directed_information(&t, &s, &s_prime)
            .unwrap();

        // Direct check: the interventional conditional matches the
        // observational conditional at every positive-mass context.
        let joint = model.joint().unwrap();
        let context = joint.marginal(&s.union(&s_prime)).unwrap();
        let everything = joint.marginal(&s.union(&s_prime).union(&t)).unwrap();
        let mut matches = true;
        let mut values = vec![0usize; context.scope().len()];
        for (cell, &w) in context.probs().iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            causal_core::distribution::decode_cell(context.scope(), cell, &mut values);
            let evidence: Vec<(usize, usize)> = context
                .scope()
                .iter()
                .zip(&values)
                .map(|(v, &val)| (v.index, val))
                .collect();
            let observational = everything.condition(&evidence).unwrap();
            let do_pairs: Vec<(usize, usize)> = evidence
                .iter()
                .copied()
                .filter(|&(v, _)| s.contains(v))
                .collect();
            let given: Vec<(usize, usize)> = evidence
                .iter()
                .copied()
                .filter(|&(v, _)| s_prime.contains(v))
                .collect();
            let interventional = model
                .interventional_conditional(&InterventionSpec::new(do_pairs).unwrap(), &given, &t)
                .unwrap();
            if observational.total_variation(&interventional).unwrap() > 1e-9 {
                matches = false;
                break;
            }
        }
        prop_assert_eq!(cdi.is_zero_within(1e-9), matches);
    }

    #[test]
    fn graphical_backdoor_check_is_sound(seed in any::<u64>()) {
        let mut stream = Stream::new(seed);
        let model = gen_cpt_model(&mut stream, 5, 3);
        let all: VertexSet = (0..model.vertex_count()).collect();
        let s = stream.subset(&all, 0.35);
        let t = stream.subset(&all.difference(&s), 0.5);
        if s.is_empty() || t.is_empty() {
            return Ok(());
        }
        let z = stream.subset(
            &model.dag().nondescendants_of(&s).unwrap().difference(&t),
            0.5,
        );
        let cert = model.certify_backdoor(&s, &t, &z).unwrap();
        if cert.graphical_ok {
            prop_assert!(
                cert.information_ok,
                "d-separation certified but CDI = {} bits",
                cert.cdi_value
            );
        }
    }

    #[test]
    fn dsk_matches_truncation_on_random_interventions(seed in any::<u64>()) {
        let mut stream = Stream::new(seed);
        let model = gen_cpt_model(&mut stream, 5, 3);
        let s = stream.subset(&(0..model.vertex_count()).collect(), 0.4);
        let spec = InterventionSpec::new(gen_values(&mut stream, model.cardinalities(), &s))
            .unwrap();
        let a = model.dsk(&spec).unwrap();
        let b = model.interventional_global(&spec).unwrap();
        prop_assert!(a.max_abs_diff(&b).unwrap() <= 1e-9);
    }
}

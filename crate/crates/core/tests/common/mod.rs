//! Shared test support: seeded random model generation and independent
//! oracles. Oracles re-derive quantities with their own arithmetic so they
//! never share a code path with the operations they check.

#![allow(dead_code)]

use causal_core::distribution::{JointTable, Kernel, Var};
use causal_core::graph::{Dag, VertexSet};
use causal_core::model::{CptModel, FunctionalModel};
use causal_core::rng;

/// A deterministic value stream: `(seed, counter)` through the crate's
/// counter-based generator.
pub struct Stream {
    seed: u64,
    counter: u64,
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        Self { seed, counter: 0 }
    }

    pub fn unit(&mut self) -> f64 {
        let u = rng::unit_f64(self.seed, self.counter);
        self.counter += 1;
        u
    }

    /// Uniform draw from `0..n`.
    pub fn below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((self.unit() * n as f64) as usize).min(n - 1)
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.unit() < p
    }

    /// Random subset keeping each item with probability `p`.
    pub fn subset(&mut self, items: &VertexSet, p: f64) -> VertexSet {
        items.iter().filter(|_| self.chance(p)).collect()
    }

    /// A strictly positive probability vector of length `len`, entries
    /// bounded away from zero so generated joints have full support.
    pub fn pmf(&mut self, len: usize) -> Vec<f64> {
        let raw: Vec<f64> = (0..len).map(|_| 0.1 + self.unit()).collect();
        let total: f64 = raw.iter().sum();
        let mut pmf: Vec<f64> = raw.iter().map(|v| v / total).collect();
        let drift = 1.0 - pmf.iter().sum::<f64>();
        pmf[len - 1] += drift;
        pmf
    }
}

/// Random DAG in causal declaration order: each `j < i` is a parent of `i`
/// with probability `edge_p`.
pub fn gen_dag(stream: &mut Stream, n: usize, edge_p: f64) -> Dag {
    let parents = (0..n)
        .map(|i| (0..i).filter(|_| stream.chance(edge_p)).collect())
        .collect();
    Dag::new(parents).expect("generated parent sets are acyclic")
}

/// Random CPT model with full support: `2..=max_n` variables with alphabet
/// sizes `2..=max_card`.
pub fn gen_cpt_model(stream: &mut Stream, max_n: usize, max_card: usize) -> CptModel {
    let n = 2 + stream.below(max_n - 1);
    let dag = gen_dag(stream, n, 0.45);
    let cards: Vec<usize> = (0..n).map(|_| 2 + stream.below(max_card - 1)).collect();
    let cpts = (0..n)
        .map(|i| {
            let input: Vec<Var> = dag
                .parents(i)
                .iter()
                .map(|&p| Var::new(p, cards[p]))
                .collect();
            let rows_len: usize = dag.parents(i).iter().map(|&p| cards[p]).product();
            let rows: Vec<Vec<f64>> = (0..rows_len).map(|_| stream.pmf(cards[i])).collect();
            Kernel::from_rows(input, vec![Var::new(i, cards[i])], rows)
                .expect("generated rows are normalized")
        })
        .collect();
    CptModel::new(dag, cards, cpts).expect("generated model is valid")
}

/// Random functional model: tabulated equations with noise alphabets of size
/// `2..=max_noise`.
pub fn gen_functional_model(
    stream: &mut Stream,
    max_n: usize,
    max_card: usize,
    max_noise: usize,
) -> FunctionalModel {
    let n = 2 + stream.below(max_n - 1);
    let dag = gen_dag(stream, n, 0.45);
    let cards: Vec<usize> = (0..n).map(|_| 2 + stream.below(max_card - 1)).collect();
    let mut noise = Vec::with_capacity(n);
    let mut functions = Vec::with_capacity(n);
    for i in 0..n {
        let noise_card = 2 + stream.below(max_noise - 1);
        noise.push(
            JointTable::new(vec![Var::new(i, noise_card)], stream.pmf(noise_card))
                .expect("normalized noise"),
        );
        let parent_cells: usize = dag.parents(i).iter().map(|&p| cards[p]).product();
        functions.push(
            (0..parent_cells * noise_card)
                .map(|_| stream.below(cards[i]))
                .collect(),
        );
    }
    FunctionalModel::new(dag, cards, noise, functions).expect("generated model is valid")
}

/// A random intervention over `s`, with values drawn inside each alphabet.
pub fn gen_values(
    stream: &mut Stream,
    model_cards: &[usize],
    s: &VertexSet,
) -> Vec<(usize, usize)> {
    s.iter()
        .map(|v| (v, stream.below(model_cards[v])))
        .collect()
}

/// Independent oracle: the joint law of a functional model by enumerating
/// every exogenous-noise combination and pushing it through the equations,
/// with its own index arithmetic throughout.
#[allow(clippy::needless_range_loop)]
pub fn joint_by_noise_enumeration(fm: &FunctionalModel) -> JointTable {
    let n = fm.vertex_count();
    let cards = fm.cardinalities();
    let noise_cards: Vec<usize> = (0..n).map(|i| fm.noise(i).probs().len()).collect();
    let cells: usize = cards.iter().product();
    let mut probs = vec![0.0; cells];

    let noise_total: usize = noise_cards.iter().product();
    let mut u = vec![0usize; n];
    for mut combo in 0..noise_total {
        for (i, slot) in u.iter_mut().enumerate().rev() {
            *slot = combo % noise_cards[i];
            combo /= noise_cards[i];
        }
        let mut weight = 1.0;
        for i in 0..n {
            weight *= fm.noise(i).probs()[u[i]];
        }
        // Evaluate the equations in declared (causal) order.
        let mut x = vec![0usize; n];
        for i in 0..n {
            let mut pa_cell = 0usize;
            for &p in fm.dag().parents(i) {
                pa_cell = pa_cell * cards[p] + x[p];
            }
            x[i] = fm.functions()[i][pa_cell * noise_cards[i] + u[i]];
        }
        let mut cell = 0usize;
        for i in 0..n {
            cell = cell * cards[i] + x[i];
        }
        probs[cell] += weight;
    }
    let scope: Vec<Var> = (0..n).map(|i| Var::new(i, cards[i])).collect();
    JointTable::new(scope, probs).expect("noise enumeration preserves mass")
}

/// Path of a bundled model file.
pub fn model_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../models")
        .join(name)
}

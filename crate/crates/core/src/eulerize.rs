//! Local Eulerization: add the fewest artificial edges that balance every
//! vertex.
//!
//! Each added edge runs from a vertex with in-degree excess (δ > 0) to one
//! with out-degree excess (δ < 0). Any such pairing adds exactly ½Σ|δ(v)|
//! edges, which is the lower bound.

use crate::dbg::{DeBruijnGraph, Origin, VertexId};

/// How unbalanced vertices are matched.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Pairing {
    /// Within each weakly-connected component, S⁺ and S⁻ in label order,
    /// paired positionally. Components keep their identity.
    #[default]
    PerComponent,
    /// S⁺ and S⁻ of the whole graph in label order, paired positionally.
    /// May join components.
    Global,
}

#[derive(Clone, Debug)]
pub struct EulerizationResult {
    pub graph: DeBruijnGraph,
    /// E' as `(tail, head)` in the order added.
    pub added_edges: Vec<(VertexId, VertexId)>,
}

impl EulerizationResult {
    pub fn added_count(&self) -> usize {
        self.added_edges.len()
    }
}

pub fn local_eulerize(g: &DeBruijnGraph) -> EulerizationResult {
    eulerize_with(g, Pairing::default())
}

pub fn eulerize_with(g: &DeBruijnGraph, pairing: Pairing) -> EulerizationResult {
    let ledger = g.imbalances();
    let pairs: Vec<(VertexId, VertexId)> = match pairing {
        Pairing::Global => ledger
            .surplus_in
            .iter()
            .copied()
            .zip(ledger.surplus_out.iter().copied())
            .collect(),
        Pairing::PerComponent => {
            let comp = g.component_of();
            let n = comp.iter().copied().max().map_or(0, |m| m + 1);
            let mut ins: Vec<Vec<VertexId>> = vec![Vec::new(); n];
            let mut outs: Vec<Vec<VertexId>> = vec![Vec::new(); n];
            // ledger lists are already in label order
            for &v in &ledger.surplus_in {
                ins[comp[v.index()]].push(v);
            }
            for &v in &ledger.surplus_out {
                outs[comp[v.index()]].push(v);
            }
            ins.into_iter()
                .zip(outs)
                .flat_map(|(i, o)| {
                    debug_assert_eq!(i.len(), o.len());
                    i.into_iter().zip(o)
                })
                .collect()
        }
    };
    eulerize_pairs(g, pairs)
}

/// Adds one artificial edge per `(tail, head)` pair.
pub fn eulerize_pairs(g: &DeBruijnGraph, pairs: Vec<(VertexId, VertexId)>) -> EulerizationResult {
    let graph = g.with_edges(&pairs, Origin::Artificial);
    EulerizationResult {
        graph,
        added_edges: pairs,
    }
}

/// True iff every vertex has equal in- and out-degree.
pub fn verify_balanced(g: &DeBruijnGraph) -> bool {
    g.vertices().all(|v| g.in_degree(v) == g.out_degree(v))
}

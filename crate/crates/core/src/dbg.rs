//! De Bruijn multigraph over (k-1)-mer vertices.
//!
//! Vertex ids are assigned in label order, so sorting by id is sorting by
//! label. Parallel edges share one adjacency entry with a multiplicity.

use std::collections::HashMap;
use std::fmt::Write as _;

use petgraph::unionfind::UnionFind;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::kmer::{dna_code, KmerMultiset, WordKey};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Origin {
    Real,
    Artificial,
}

impl Origin {
    pub fn flag(self) -> char {
        match self {
            Origin::Real => 'R',
            Origin::Artificial => 'A',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub head: VertexId,
    pub multiplicity: u64,
    pub origin: Origin,
}

#[derive(Clone, Debug)]
pub struct DeBruijnGraph {
    k: usize,
    /// Flat (k-1)-mer labels, sorted.
    labels: Vec<u8>,
    /// Edges out of `v` are `edge_list[offsets[v]..offsets[v + 1]]`, sorted
    /// by `(head, origin)`.
    offsets: Vec<usize>,
    edge_list: Vec<Edge>,
    in_degree: Vec<u64>,
    out_degree: Vec<u64>,
}

impl DeBruijnGraph {
    /// One edge unit per occurrence (list mode) or per distinct k-mer
    /// (frequency mode).
    pub fn build(m: &KmerMultiset) -> Result<Self> {
        // stored records are occurrences in list mode and distinct k-mers in
        // frequency mode, so one unit per record covers both
        Self::from_units(m.k(), m.records().map(|r| (r, 1)))
    }

    /// Edge units per occurrence, expanding frequency-mode counts.
    pub fn build_expanded(m: &KmerMultiset) -> Result<Self> {
        Self::from_units(m.k(), m.entries())
    }

    /// Builds from `(k-mer, multiplicity)` pairs; equal k-mers accumulate.
    pub fn from_units<'a, I>(k: usize, units: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a [u8], u64)>,
    {
        if k < 2 {
            return Err(Error::KOutOfRange {
                k,
                min: 2,
                max: crate::kmer::MAX_K,
            });
        }
        let mut kept: Vec<(&[u8], u64)> = Vec::new();
        for (r, mult) in units {
            if r.len() != k {
                return Err(Error::KMismatch {
                    left: k,
                    right: r.len(),
                });
            }
            if mult > 0 {
                kept.push((r, mult));
            }
        }
        if kept.is_empty() {
            return Err(Error::EmptyRepresentation);
        }
        let l = k - 1;
        let (raw_labels, mut triples) = intern(&kept, l, dna_code)
            .unwrap_or_else(|| intern(&kept, l, |w| Some(WordKey::of(w))).expect("bytes always key"));
        drop(kept);

        let n = raw_labels.len() / l;
        let codes: Option<Vec<(u64, u32)>> = raw_labels
            .chunks_exact(l)
            .zip(0..)
            .map(|(label, i)| dna_code(label).map(|c| (c, i)))
            .collect();
        let order: Vec<u32> = match codes {
            Some(mut codes) => {
                codes.sort_unstable();
                codes.into_iter().map(|(_, i)| i).collect()
            }
            None => {
                let mut order: Vec<u32> = (0..n as u32).collect();
                order.sort_unstable_by(|&a, &b| {
                    let a = a as usize * l;
                    let b = b as usize * l;
                    raw_labels[a..a + l].cmp(&raw_labels[b..b + l])
                });
                order
            }
        };
        let mut remap = vec![0u32; n];
        let mut labels = Vec::with_capacity(raw_labels.len());
        for (new, &old) in order.iter().enumerate() {
            remap[old as usize] = new as u32;
            labels.extend_from_slice(&raw_labels[old as usize * l..(old as usize + 1) * l]);
        }
        drop(raw_labels);

        for t in &mut triples {
            t.0 = remap[t.0 as usize];
            t.1 = remap[t.1 as usize];
        }
        triples.sort_unstable_by_key(|&(t, h, _)| (t, h));
        let mut g = Self {
            k,
            labels,
            offsets: vec![0; n + 1],
            edge_list: Vec::with_capacity(triples.len()),
            in_degree: vec![0; n],
            out_degree: vec![0; n],
        };
        let mut prev: Option<(u32, u32)> = None;
        for (t, h, mult) in triples {
            if prev == Some((t, h)) {
                g.edge_list.last_mut().expect("previous edge").multiplicity += mult;
            } else {
                g.edge_list.push(Edge {
                    head: VertexId(h),
                    multiplicity: mult,
                    origin: Origin::Real,
                });
                g.offsets[t as usize + 1] += 1;
                prev = Some((t, h));
            }
            g.out_degree[t as usize] += mult;
            g.in_degree[h as usize] += mult;
        }
        for v in 0..n {
            g.offsets[v + 1] += g.offsets[v];
        }
        Ok(g)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn vertex_count(&self) -> usize {
        self.in_degree.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertex_count() as u32).map(VertexId)
    }

    pub fn label(&self, v: VertexId) -> &[u8] {
        let l = self.k - 1;
        &self.labels[v.index() * l..(v.index() + 1) * l]
    }

    /// Looks up a vertex by label (binary search over the sorted table).
    pub fn find(&self, label: &[u8]) -> Option<VertexId> {
        let l = self.k - 1;
        if label.len() != l {
            return None;
        }
        let (mut lo, mut hi) = (0usize, self.vertex_count());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.labels[mid * l..(mid + 1) * l].cmp(label) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(VertexId(mid as u32)),
            }
        }
        None
    }

    pub fn edges_from(&self, v: VertexId) -> &[Edge] {
        &self.edge_list[self.offsets[v.index()]..self.offsets[v.index() + 1]]
    }

    /// All edges as `(tail, edge)`, tails in label order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, &Edge)> + '_ {
        self.vertices()
            .flat_map(move |t| self.edges_from(t).iter().map(move |e| (t, e)))
    }

    /// Number of distinct `(tail, head, origin)` entries.
    pub fn edge_entries(&self) -> usize {
        self.edge_list.len()
    }

    pub fn in_degree(&self, v: VertexId) -> u64 {
        self.in_degree[v.index()]
    }

    pub fn out_degree(&self, v: VertexId) -> u64 {
        self.out_degree[v.index()]
    }

    /// Total multiplicity over edges of the given origin.
    pub fn multiplicity(&self, origin: Origin) -> u64 {
        self.edges()
            .filter(|(_, e)| e.origin == origin)
            .map(|(_, e)| e.multiplicity)
            .sum()
    }

    pub fn edge_units(&self) -> u64 {
        self.out_degree.iter().sum()
    }

    /// Copy of the graph with one extra edge unit per `(tail, head)` pair.
    pub(crate) fn with_edges(&self, pairs: &[(VertexId, VertexId)], origin: Origin) -> Self {
        let mut extra: Vec<(VertexId, VertexId)> = pairs.to_vec();
        extra.sort_unstable();
        let n = self.vertex_count();
        let mut g = Self {
            k: self.k,
            labels: self.labels.clone(),
            offsets: vec![0; n + 1],
            edge_list: Vec::with_capacity(self.edge_list.len() + extra.len()),
            in_degree: self.in_degree.clone(),
            out_degree: self.out_degree.clone(),
        };
        for &(t, h) in &extra {
            g.out_degree[t.index()] += 1;
            g.in_degree[h.index()] += 1;
        }
        let mut j = 0;
        for t in self.vertices() {
            let old = self.edges_from(t);
            let mut added: Vec<Edge> = Vec::new();
            while j < extra.len() && extra[j].0 == t {
                let h = extra[j].1;
                match added.last_mut() {
                    Some(e) if e.head == h => e.multiplicity += 1,
                    _ => added.push(Edge {
                        head: h,
                        multiplicity: 1,
                        origin,
                    }),
                }
                j += 1;
            }
            // merge two runs sorted by (head, origin)
            let (mut a, mut b) = (0, 0);
            while a < old.len() || b < added.len() {
                let take_old = b == added.len()
                    || (a < old.len()
                        && (old[a].head, old[a].origin) <= (added[b].head, added[b].origin));
                let e = if take_old {
                    a += 1;
                    old[a - 1]
                } else {
                    b += 1;
                    added[b - 1]
                };
                let own = g.edge_list.len() > g.offsets[t.index()];
                match g.edge_list.last_mut() {
                    Some(last) if own && (last.head, last.origin) == (e.head, e.origin) => {
                        last.multiplicity += e.multiplicity
                    }
                    _ => g.edge_list.push(e),
                }
            }
            g.offsets[t.index() + 1] = g.edge_list.len();
        }
        g
    }

    /// δ(v) = d⁻(v) − d⁺(v) for every vertex, with S⁺ and S⁻ in label order.
    pub fn imbalances(&self) -> ImbalanceLedger {
        let delta: Vec<i64> = self
            .in_degree
            .iter()
            .zip(&self.out_degree)
            .map(|(&i, &o)| i as i64 - o as i64)
            .collect();
        let mut surplus_in = Vec::new();
        let mut surplus_out = Vec::new();
        for (v, &d) in delta.iter().enumerate() {
            let id = VertexId(v as u32);
            if d > 0 {
                surplus_in.extend(std::iter::repeat_n(id, d as usize));
            } else if d < 0 {
                surplus_out.extend(std::iter::repeat_n(id, (-d) as usize));
            }
        }
        ImbalanceLedger {
            delta,
            surplus_in,
            surplus_out,
        }
    }

    /// Weakly-connected components, each sorted, ordered by smallest label.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        let n = self.vertex_count();
        let mut uf = UnionFind::<u32>::new(n);
        for (t, e) in self.edges() {
            uf.union(t.0, e.head.0);
        }
        let mut slot: HashMap<u32, usize> = HashMap::new();
        let mut parts: Vec<Vec<VertexId>> = Vec::new();
        for v in 0..n as u32 {
            let root = uf.find_mut(v);
            let i = *slot.entry(root).or_insert_with(|| {
                parts.push(Vec::new());
                parts.len() - 1
            });
            parts[i].push(VertexId(v));
        }
        parts
    }

    /// Component index per vertex, numbered as in [`components`](Self::components).
    pub fn component_of(&self) -> Vec<usize> {
        let mut out = vec![0; self.vertex_count()];
        for (i, part) in self.components().iter().enumerate() {
            for v in part {
                out[v.index()] = i;
            }
        }
        out
    }

    /// `tail<TAB>head<TAB>multiplicity<TAB>origin`, one edge per line, sorted.
    pub fn dump_edges(&self) -> String {
        let mut lines: Vec<String> = self
            .edges()
            .map(|(t, e)| {
                let mut s = String::new();
                let _ = write!(
                    s,
                    "{}\t{}\t{}\t{}",
                    String::from_utf8_lossy(self.label(t)),
                    String::from_utf8_lossy(self.label(e.head)),
                    e.multiplicity,
                    e.origin.flag()
                );
                s
            })
            .collect();
        lines.sort();
        let mut out = lines.join("\n");
        out.push('\n');
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImbalanceLedger {
    pub delta: Vec<i64>,
    /// S⁺: vertices with in-degree excess, each repeated δ(v) times.
    pub surplus_in: Vec<VertexId>,
    /// S⁻: vertices with out-degree excess, each repeated −δ(v) times.
    pub surplus_out: Vec<VertexId>,
}

impl ImbalanceLedger {
    /// ½ Σ|δ(v)|
    pub fn half_total(&self) -> u64 {
        self.delta.iter().map(|d| d.unsigned_abs()).sum::<u64>() / 2
    }

    pub fn is_balanced(&self) -> bool {
        self.delta.iter().all(|&d| d == 0)
    }
}

/// Provisional vertex ids in first-seen order, the flat label table, and one
/// `(tail, head, multiplicity)` per unit. `None` when `key` rejects a label.
#[allow(clippy::type_complexity)]
fn intern<K, F>(units: &[(&[u8], u64)], l: usize, key: F) -> Option<(Vec<u8>, Vec<(u32, u32, u64)>)>
where
    K: std::hash::Hash + Eq,
    F: Fn(&[u8]) -> Option<K>,
{
    let mut ids: FxHashMap<K, u32> =
        FxHashMap::with_capacity_and_hasher(units.len(), Default::default());
    let mut raw: Vec<u8> = Vec::new();
    let mut triples = Vec::with_capacity(units.len());
    let mut id_of = |label: &[u8], raw: &mut Vec<u8>| -> Option<u32> {
        let next = (raw.len() / l) as u32;
        Some(*ids.entry(key(label)?).or_insert_with(|| {
            raw.extend_from_slice(label);
            next
        }))
    };
    for &(r, mult) in units {
        let t = id_of(&r[..l], &mut raw)?;
        let h = id_of(&r[1..], &mut raw)?;
        triples.push((t, h, mult));
    }
    Some((raw, triples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;
    use proptest::prelude::*;

    pub(crate) fn toy() -> KmerMultiset {
        KmerMultiset::from_list(
            4,
            ["ATAC", "ATCA", "ATGA", "ATGC", "CATC", "TCAT", "TGCT"],
            &Alphabet::dna(),
        )
        .unwrap()
    }

    fn names(g: &DeBruijnGraph, vs: &[VertexId]) -> Vec<String> {
        vs.iter()
            .map(|&v| String::from_utf8_lossy(g.label(v)).into_owned())
            .collect()
    }

    #[test]
    fn toy_graph() {
        let g = DeBruijnGraph::build(&toy()).unwrap();
        let all: Vec<_> = g.vertices().collect();
        assert_eq!(
            names(&g, &all),
            ["ATA", "ATC", "ATG", "CAT", "GCT", "TAC", "TCA", "TGA", "TGC"]
        );
        assert_eq!(g.edges().count(), 7);
        assert_eq!(g.multiplicity(Origin::Real), 7);
        assert_eq!(
            g.dump_edges(),
            "ATA\tTAC\t1\tR\nATC\tTCA\t1\tR\nATG\tTGA\t1\tR\nATG\tTGC\t1\tR\n\
             CAT\tATC\t1\tR\nTCA\tCAT\t1\tR\nTGC\tGCT\t1\tR\n"
        );
    }

    #[test]
    fn self_loop_multiplicity() {
        let m = KmerMultiset::from_list(2, ["AA", "AA"], &Alphabet::dna()).unwrap();
        let g = DeBruijnGraph::build(&m).unwrap();
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.label(VertexId(0)), b"A");
        assert_eq!(
            g.edges_from(VertexId(0)),
            &[Edge {
                head: VertexId(0),
                multiplicity: 2,
                origin: Origin::Real
            }]
        );
        // frequency mode: one unit per distinct k-mer
        let g = DeBruijnGraph::build(&m.to_frequency()).unwrap();
        assert_eq!(g.edge_units(), 1);
    }

    #[test]
    fn rejects_small_k_and_empty() {
        let a = Alphabet::dna();
        let m = KmerMultiset::from_list(1, ["A"], &a).unwrap();
        assert!(matches!(
            DeBruijnGraph::build(&m),
            Err(Error::KOutOfRange { k: 1, .. })
        ));
        let empty = KmerMultiset::from_list(3, Vec::<&str>::new(), &a).unwrap();
        assert!(DeBruijnGraph::build(&empty).is_err());
    }

    #[test]
    fn toy_imbalances() {
        let g = DeBruijnGraph::build(&toy()).unwrap();
        let led = g.imbalances();
        assert_eq!(names(&g, &led.surplus_in), ["GCT", "TAC", "TGA"]);
        assert_eq!(names(&g, &led.surplus_out), ["ATA", "ATG", "ATG"]);
        assert_eq!(led.half_total(), 3);
        assert_eq!(led.delta.iter().sum::<i64>(), 0);
    }

    #[test]
    fn balanced_cycle() {
        let m = KmerMultiset::from_list(4, ["CATC", "ATCA", "TCAT"], &Alphabet::dna()).unwrap();
        let g = DeBruijnGraph::build(&m).unwrap();
        let led = g.imbalances();
        assert!(led.is_balanced());
        assert!(led.surplus_in.is_empty() && led.surplus_out.is_empty());
    }

    #[test]
    fn toy_components() {
        let g = DeBruijnGraph::build(&toy()).unwrap();
        let comps: Vec<Vec<String>> = g.components().iter().map(|c| names(&g, c)).collect();
        assert_eq!(
            comps,
            [
                vec!["ATA", "TAC"],
                vec!["ATC", "CAT", "TCA"],
                vec!["ATG", "GCT", "TGA", "TGC"],
            ]
        );
    }

    #[test]
    fn small_components() {
        let a = Alphabet::dna();
        let g = DeBruijnGraph::build(&KmerMultiset::from_list(3, ["ACG"], &a).unwrap()).unwrap();
        assert_eq!(g.components().len(), 1);
        let g =
            DeBruijnGraph::build(&KmerMultiset::from_list(2, ["AA", "CC", "GG"], &a).unwrap())
                .unwrap();
        assert_eq!(g.components().len(), 3);
    }

    #[test]
    fn find_by_label() {
        let g = DeBruijnGraph::build(&toy()).unwrap();
        assert_eq!(g.find(b"CAT"), Some(VertexId(3)));
        assert_eq!(g.find(b"GGG"), None);
        assert_eq!(g.find(b"CA"), None);
    }

    fn random_multiset() -> impl Strategy<Value = (usize, Vec<Vec<u8>>)> {
        (2usize..7).prop_flat_map(|k| {
            (
                Just(k),
                prop::collection::vec(
                    prop::collection::vec(prop::sample::select(b"ACGT".to_vec()), k),
                    1..120,
                ),
            )
        })
    }

    proptest! {
        #[test]
        fn graph_invariants((k, recs) in random_multiset()) {
            let m = KmerMultiset::from_list(k, &recs, &Alphabet::dna()).unwrap();
            let g = DeBruijnGraph::build(&m).unwrap();
            // re-tally oracle
            prop_assert_eq!(g.multiplicity(Origin::Real), recs.len() as u64);
            let ins: u64 = g.vertices().map(|v| g.in_degree(v)).sum();
            let outs: u64 = g.vertices().map(|v| g.out_degree(v)).sum();
            prop_assert_eq!(ins, recs.len() as u64);
            prop_assert_eq!(outs, recs.len() as u64);
            for (t, e) in g.edges() {
                prop_assert_eq!(&g.label(t)[1..], &g.label(e.head)[..k - 2]);
            }
            let led = g.imbalances();
            prop_assert_eq!(led.delta.iter().sum::<i64>(), 0);
            prop_assert_eq!(led.surplus_in.len() as u64, led.half_total());
            prop_assert_eq!(led.surplus_out.len() as u64, led.half_total());
        }

        #[test]
        fn permutation_invariant((k, mut recs) in random_multiset()) {
            let a = Alphabet::dna();
            let g1 = DeBruijnGraph::build(&KmerMultiset::from_list(k, &recs, &a).unwrap()).unwrap();
            recs.reverse();
            let g2 = DeBruijnGraph::build(&KmerMultiset::from_list(k, &recs, &a).unwrap()).unwrap();
            prop_assert_eq!(g1.dump_edges(), g2.dump_edges());
        }
    }
}

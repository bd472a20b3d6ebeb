//! Eulerian cover of a balanced graph, spelled into strings.
//!
//! Each component is walked once with an iterative Hierholzer traversal
//! (smallest head label first). The closed tour is then rotated and split
//! at artificial edges, which act as non-emitting bridges:
//!
//! * a tour containing artificial edges is rotated to start right after
//!   its last one, so every segment boundary is an artificial edge;
//! * a tour without artificial edges is rotated to end with its greatest
//!   k-mer.
//!
//! Tours start at the smallest-label vertex that still has unused edges,
//! so strings come out grouped by component in label order.

use crate::dbg::{DeBruijnGraph, Origin, VertexId};
use crate::error::{Error, Result};
use crate::eulerize::{verify_balanced, EulerizationResult};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tour {
    /// Closed: `path.first() == path.last()`.
    pub path: Vec<VertexId>,
    /// Origin of the edge `path[i] -> path[i + 1]`.
    pub edge_origins: Vec<Origin>,
}

impl Tour {
    pub fn edge_count(&self) -> usize {
        self.edge_origins.len()
    }
}

#[derive(Clone, Debug, Default)]
pub struct SpelledCover {
    pub strings: Vec<Vec<u8>>,
    /// Number of k-mer windows in each string.
    pub trail_kmer_counts: Vec<u64>,
    pub tours: Vec<Tour>,
}

/// Readout of a trail given its vertex labels: the first label in full,
/// then the last symbol of each following label.
pub fn spell<L: AsRef<[u8]>>(labels: &[L]) -> Result<Vec<u8>> {
    let Some(first) = labels.first() else {
        return Ok(Vec::new());
    };
    let first = first.as_ref();
    let mut out = Vec::with_capacity(first.len() + labels.len() - 1);
    out.extend_from_slice(first);
    for pair in labels.windows(2) {
        let (u, v) = (pair[0].as_ref(), pair[1].as_ref());
        if u.len() != v.len() || u.is_empty() || u[1..] != v[..v.len() - 1] {
            return Err(Error::OverlapViolation {
                left: String::from_utf8_lossy(u).into_owned(),
                right: String::from_utf8_lossy(v).into_owned(),
            });
        }
        out.push(v[v.len() - 1]);
    }
    Ok(out)
}

/// Spells a vertex path of `g`, checking the overlap of every step.
pub fn spell_path(g: &DeBruijnGraph, path: &[VertexId]) -> Result<Vec<u8>> {
    let labels: Vec<&[u8]> = path.iter().map(|&v| g.label(v)).collect();
    spell(&labels)
}

#[derive(Clone, Copy)]
struct Slot {
    remaining: u64,
    head: u32,
    origin: Origin,
}

/// Flattened adjacency with per-entry remaining multiplicity. Each vertex
/// keeps `[next unused slot, end]`.
struct Cursor {
    bounds: Vec<[u32; 2]>,
    slots: Vec<Slot>,
}

impl Cursor {
    fn new(g: &DeBruijnGraph) -> Self {
        let mut bounds = Vec::with_capacity(g.vertex_count());
        let mut slots = Vec::with_capacity(g.edge_entries());
        for v in g.vertices() {
            let begin = slots.len() as u32;
            slots.extend(g.edges_from(v).iter().map(|e| Slot {
                remaining: e.multiplicity,
                head: e.head.0,
                origin: e.origin,
            }));
            bounds.push([begin, slots.len() as u32]);
        }
        Self { bounds, slots }
    }

    /// Index of the first slot of `v` with remaining multiplicity.
    #[inline]
    fn first_unused(&mut self, v: VertexId) -> Option<usize> {
        let [mut i, end] = self.bounds[v.index()];
        while i < end && self.slots[i as usize].remaining == 0 {
            i += 1;
        }
        self.bounds[v.index()][0] = i;
        (i < end).then_some(i as usize)
    }

    /// Takes one unit of the first unused edge out of `v`. The flag is set
    /// when that was the last unit out of `v`.
    #[inline]
    fn take(&mut self, v: VertexId) -> Option<(VertexId, Origin, bool)> {
        let i = self.first_unused(v)?;
        let end = self.bounds[v.index()][1] as usize;
        let slot = &mut self.slots[i];
        slot.remaining -= 1;
        let spent = slot.remaining == 0 && i + 1 == end;
        Some((VertexId(slot.head), slot.origin, spent))
    }

    fn has_unused(&mut self, v: VertexId) -> bool {
        self.first_unused(v).is_some()
    }
}

/// Closed walk from `start` using every reachable unused edge once.
fn hierholzer(cursor: &mut Cursor, start: VertexId) -> Tour {
    // (vertex, origin of the edge into it, no unused edges left out of it)
    let mut stack: Vec<(VertexId, Option<Origin>, bool)> = vec![(start, None, false)];
    let mut circuit: Vec<(VertexId, Option<Origin>)> = Vec::new();
    while let Some(&(v, _, spent)) = stack.last() {
        if !spent {
            if let Some((w, origin, now_spent)) = cursor.take(v) {
                stack.last_mut().expect("non-empty stack").2 = now_spent;
                stack.push((w, Some(origin), false));
                continue;
            }
        }
        let (v, origin, _) = stack.pop().expect("non-empty stack");
        circuit.push((v, origin));
    }
    circuit.reverse();
    let path = circuit.iter().map(|&(v, _)| v).collect();
    let edge_origins = circuit[1..]
        .iter()
        .map(|&(_, o)| o.expect("every step after the first has an edge"))
        .collect();
    Tour { path, edge_origins }
}

/// Index of the first edge after rotation.
fn rotation_start(g: &DeBruijnGraph, tour: &Tour) -> usize {
    let m = tour.edge_count();
    if let Some(j) = tour
        .edge_origins
        .iter()
        .rposition(|&o| o == Origin::Artificial)
    {
        return (j + 1) % m;
    }
    let kmer_cmp = |a: usize, b: usize| {
        let (ta, tb) = (g.label(tour.path[a]), g.label(tour.path[b]));
        let la = *g.label(tour.path[a + 1]).last().expect("k >= 2");
        let lb = *g.label(tour.path[b + 1]).last().expect("k >= 2");
        ta.cmp(tb).then(la.cmp(&lb))
    };
    let mut best = 0;
    for i in 1..m {
        if kmer_cmp(i, best).is_gt() {
            best = i;
        }
    }
    (best + 1) % m
}

fn rotate(tour: &Tour, start: usize) -> Tour {
    let m = tour.edge_count();
    let mut path = Vec::with_capacity(m + 1);
    let mut edge_origins = Vec::with_capacity(m);
    for i in 0..m {
        let j = (start + i) % m;
        path.push(tour.path[j]);
        edge_origins.push(tour.edge_origins[j]);
    }
    path.push(tour.path[start % m]);
    Tour { path, edge_origins }
}

/// `last[v]` is the final symbol of `v`'s label.
fn spell_unchecked(g: &DeBruijnGraph, last: &[u8], path: &[VertexId]) -> Vec<u8> {
    let first = g.label(path[0]);
    let mut out = Vec::with_capacity(first.len() + path.len() - 1);
    out.extend_from_slice(first);
    out.extend(path[1..].iter().map(|&v| last[v.index()]));
    out
}

/// Splits a rotated tour at artificial edges and spells each real segment.
fn split_and_spell(g: &DeBruijnGraph, last: &[u8], tour: &Tour, cover: &mut SpelledCover) {
    let mut segment: Vec<VertexId> = vec![tour.path[0]];
    let flush = |segment: &mut Vec<VertexId>, cover: &mut SpelledCover| {
        if segment.len() > 1 {
            cover.trail_kmer_counts.push(segment.len() as u64 - 1);
            cover.strings.push(spell_unchecked(g, last, segment));
        }
        segment.clear();
    };
    for (i, &origin) in tour.edge_origins.iter().enumerate() {
        let head = tour.path[i + 1];
        match origin {
            Origin::Real => segment.push(head),
            Origin::Artificial => {
                flush(&mut segment, cover);
                segment.push(head);
            }
        }
    }
    flush(&mut segment, cover);
}

/// Covers every real edge unit exactly once; artificial edges are never
/// spelled.
pub fn eulerian_cover(r: &EulerizationResult) -> Result<SpelledCover> {
    cover_graph(&r.graph)
}

pub fn cover_graph(g: &DeBruijnGraph) -> Result<SpelledCover> {
    if !verify_balanced(g) {
        let v = g
            .vertices()
            .find(|&v| g.in_degree(v) != g.out_degree(v))
            .expect("unbalanced vertex exists");
        return Err(Error::NotEulerian {
            vertex: String::from_utf8_lossy(g.label(v)).into_owned(),
            in_degree: g.in_degree(v),
            out_degree: g.out_degree(v),
        });
    }
    let mut cursor = Cursor::new(g);
    let last: Vec<u8> = g
        .vertices()
        .map(|v| *g.label(v).last().expect("k >= 2"))
        .collect();
    let mut cover = SpelledCover::default();
    for v in g.vertices() {
        if !cursor.has_unused(v) {
            continue;
        }
        let tour = hierholzer(&mut cursor, v);
        let tour = rotate(&tour, rotation_start(g, &tour));
        split_and_spell(g, &last, &tour, &mut cover);
        cover.tours.push(tour);
    }
    Ok(cover)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;
    use crate::eulerize::{eulerize_pairs, eulerize_with, local_eulerize, Pairing};
    use crate::kmer::{multiset_equal, puff_multiset, KmerMultiset, TextRepresentation};
    use proptest::prelude::*;

    fn graph(k: usize, recs: &[&str]) -> DeBruijnGraph {
        DeBruijnGraph::build(&KmerMultiset::from_list(k, recs, &Alphabet::dna()).unwrap()).unwrap()
    }

    fn text(cover: &SpelledCover) -> Vec<String> {
        cover
            .strings
            .iter()
            .map(|s| String::from_utf8_lossy(s).into_owned())
            .collect()
    }

    #[test]
    fn toy_cover() {
        let g = graph(4, &["ATAC", "ATCA", "ATGA", "ATGC", "CATC", "TCAT", "TGCT"]);
        let r = local_eulerize(&g);
        let c = eulerian_cover(&r).unwrap();
        assert_eq!(text(&c), ["ATAC", "CATCAT", "ATGA", "ATGCT"]);
        assert_eq!(c.trail_kmer_counts, [1, 3, 1, 2]);
        assert_eq!(c.tours.len(), 3);
    }

    #[test]
    fn toy_cover_with_global_pairing() {
        let g = graph(4, &["ATAC", "ATCA", "ATGA", "ATGC", "CATC", "TCAT", "TGCT"]);
        let c = eulerian_cover(&eulerize_with(&g, Pairing::Global)).unwrap();
        let mut got = text(&c);
        got.sort();
        assert_eq!(got, ["ATAC", "ATGA", "ATGCT", "CATCAT"]);
    }

    #[test]
    fn balanced_cycle_spells_once() {
        let g = graph(4, &["CATC", "ATCA", "TCAT"]);
        let c = eulerian_cover(&local_eulerize(&g)).unwrap();
        assert_eq!(text(&c), ["CATCAT"]);
    }

    #[test]
    fn single_edge_with_bridge() {
        let g = graph(4, &["ATAC"]);
        let ata = g.find(b"ATA").unwrap();
        let tac = g.find(b"TAC").unwrap();
        let r = eulerize_pairs(&g, vec![(tac, ata)]);
        let c = eulerian_cover(&r).unwrap();
        assert_eq!(text(&c), ["ATAC"]);
        assert_eq!(c.tours[0].edge_origins, [Origin::Real, Origin::Artificial]);
    }

    #[test]
    fn unbalanced_input_is_rejected() {
        let g = graph(4, &["ATAC"]);
        assert!(matches!(cover_graph(&g), Err(Error::NotEulerian { .. })));
    }

    #[test]
    fn spell_examples() {
        assert_eq!(spell(&["CAT", "ATC", "TCA", "CAT"]).unwrap(), b"CATCAT");
        assert_eq!(spell(&["ATA"]).unwrap(), b"ATA");
        assert!(matches!(
            spell(&["CAT", "TCA"]),
            Err(Error::OverlapViolation { .. })
        ));
        assert!(spell::<&str>(&[]).unwrap().is_empty());
    }

    #[test]
    fn tours_are_closed() {
        let g = graph(3, &["AAC", "ACG", "CGT", "GTA", "TAA", "ACC"]);
        let c = eulerian_cover(&local_eulerize(&g)).unwrap();
        for t in &c.tours {
            assert_eq!(t.path.first(), t.path.last());
            assert_eq!(t.path.len(), t.edge_origins.len() + 1);
        }
    }

    proptest! {
        /// Windowing oracle: puff of a spelled path is its edge k-mers in order.
        #[test]
        fn spell_then_puff(walk in prop::collection::vec(prop::sample::select(b"ACGT".to_vec()), 4..40), k in 2usize..5) {
            prop_assume!(walk.len() >= k);
            let labels: Vec<&[u8]> = walk.windows(k - 1).collect();
            let s = spell(&labels).unwrap();
            prop_assert_eq!(&s, &walk);
            let kmers: Vec<&[u8]> = s.windows(k).collect();
            let edges: Vec<Vec<u8>> = labels.windows(2).map(|p| {
                let mut e = p[0].to_vec();
                e.push(*p[1].last().unwrap());
                e
            }).collect();
            prop_assert_eq!(kmers.len(), edges.len());
            for (a, b) in kmers.iter().zip(&edges) {
                prop_assert_eq!(*a, &b[..]);
            }
        }

        #[test]
        fn cover_is_lossless_and_minimal(k in 2usize..6, recs in prop::collection::vec(
            prop::collection::vec(prop::sample::select(b"ACGT".to_vec()), 6), 1..100)) {
            let a = Alphabet::dna();
            let recs: Vec<Vec<u8>> = recs.into_iter().map(|mut r| { r.truncate(k); r }).collect();
            let m = KmerMultiset::from_list(k, &recs, &a).unwrap();
            let g = DeBruijnGraph::build(&m).unwrap();
            let led = g.imbalances();
            let comp = g.component_of();
            let ncomp = comp.iter().max().unwrap() + 1;
            let mut balanced = vec![true; ncomp];
            for v in g.vertices() {
                if led.delta[v.index()] != 0 { balanced[comp[v.index()]] = false; }
            }
            let c0 = balanced.iter().filter(|&&b| b).count();
            for pairing in [Pairing::PerComponent, Pairing::Global] {
                let r = eulerize_with(&g, pairing);
                let c = eulerian_cover(&r).unwrap();
                prop_assert_eq!(c.strings.len(), r.added_count() + c0);
                let w = TextRepresentation::new(k, c.strings.clone(), None, &a).unwrap();
                prop_assert!(multiset_equal(&puff_multiset(&w, &a).unwrap(), &m).unwrap());
                let chars: u64 = c.strings.iter().map(|s| s.len() as u64).sum();
                prop_assert_eq!(chars, m.total() + (k as u64 - 1) * c.strings.len() as u64);
                prop_assert_eq!(c.trail_kmer_counts.iter().sum::<u64>(), m.total());
                // artificial pseudo-k-mers never appear unless they are also real k-mers
                for &(t, h) in &r.added_edges {
                    let mut pseudo = g.label(t).to_vec();
                    pseudo.push(*g.label(h).last().unwrap());
                    if !recs.contains(&pseudo) {
                        for s in &c.strings {
                            prop_assert!(!s.windows(k).any(|w| w == &pseudo[..]));
                        }
                    }
                }
            }
        }
    }
}

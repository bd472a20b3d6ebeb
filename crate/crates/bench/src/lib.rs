//! Deterministic inputs shared by the benchmarks.

use kcover_core::io::{extract_kmers, IngestStats};
use kcover_core::{noisy_reads, sample_multiset, Alphabet, KmerMultiset, MultiplicityDist, ReadSimSpec, SimSpec};

pub const SEED: u64 = 0x6b63_6f76;

/// Every k-mer of a random genome of `n + k - 1` bases, so `|M| = n`.
pub fn genome_kmers(n: usize, k: usize) -> KmerMultiset {
    let sim = noisy_reads(&ReadSimSpec {
        genome_length: n + k - 1,
        read_length: 1,
        coverage: 1e-9,
        error_rate: 0.0,
        seed: SEED,
    })
    .expect("valid read spec");
    let mut data = Vec::with_capacity(n * k);
    let mut stats = IngestStats::default();
    extract_kmers(&sim.genome, k, &Alphabet::dna(), &mut data, &mut stats);
    KmerMultiset::from_list(k, data.chunks_exact(k), &Alphabet::dna()).expect("dna k-mers")
}

/// List-mode k-mers of simulated noisy reads.
pub fn read_kmers(genome_length: usize, k: usize) -> KmerMultiset {
    let sim = noisy_reads(&ReadSimSpec {
        genome_length,
        read_length: 100,
        coverage: 5.0,
        error_rate: 0.01,
        seed: SEED,
    })
    .expect("valid read spec");
    let mut data = Vec::new();
    let mut stats = IngestStats::default();
    for r in &sim.reads {
        extract_kmers(r, k, &Alphabet::dna(), &mut data, &mut stats);
    }
    KmerMultiset::from_list(k, data.chunks_exact(k), &Alphabet::dna()).expect("dna k-mers")
}

/// Uniform sample of a fraction `r` of the k-mer space.
pub fn sampled_kmers(k: usize, r: f64) -> KmerMultiset {
    sample_multiset(&SimSpec::new(k, r, MultiplicityDist::Constant(1), SEED)).expect("valid sample")
}

/// Random DNA text of `n` bases ending in the terminator.
pub fn terminated_text(n: usize) -> Vec<u8> {
    let sim = noisy_reads(&ReadSimSpec {
        genome_length: n,
        read_length: 1,
        coverage: 1e-9,
        error_rate: 0.0,
        seed: SEED,
    })
    .expect("valid read spec");
    let mut t = sim.genome;
    t.push(Alphabet::dna().terminator());
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_sizes() {
        assert_eq!(genome_kmers(1000, 11).len(), 1000);
        assert_eq!(terminated_text(500).len(), 501);
        assert_eq!(sampled_kmers(4, 0.5).len(), 128);
        assert!(!read_kmers(2000, 15).is_empty());
    }
}

//! Lossless compression of k-mer multisets.
//!
//! A multiset of k-mers is turned into its de Bruijn multigraph, balanced by
//! adding the fewest artificial edges, and covered by a minimum number of
//! trails. Spelling those trails gives the smallest possible collection of
//! strings whose k-mer windows reproduce the multiset exactly. The strings
//! can then be joined and passed through a Burrows-Wheeler transform and
//! run-length coding.
//!
//! ```
//! use kcover_core::{compress, Alphabet, CompressionJob, KmerMultiset, Mode};
//!
//! let a = Alphabet::dna();
//! let m = KmerMultiset::from_list(
//!     4,
//!     ["ATAC", "ATCA", "ATGA", "ATGC", "CATC", "TCAT", "TGCT"],
//!     &a,
//! )
//! .unwrap();
//! let out = compress(&CompressionJob::new(4, Mode::List), &m).unwrap();
//! assert_eq!(out.metrics.weight_m, 34);
//! assert_eq!(out.metrics.weight_w, 22);
//! ```

pub mod alphabet;
pub mod codec;
pub mod cover;
pub mod dbg;
pub mod error;
pub mod eulerize;
pub mod io;
pub mod kmer;
pub mod pipeline;
pub mod report;
pub mod simgen;

pub use alphabet::Alphabet;
pub use codec::{bwt_forward, bwt_inverse, rle_decode, rle_encode, CodecBlock};
pub use cover::{eulerian_cover, spell, SpelledCover, Tour};
pub use dbg::{DeBruijnGraph, ImbalanceLedger, Origin, VertexId};
pub use error::{Error, Result};
pub use eulerize::{local_eulerize, verify_balanced, EulerizationResult, Pairing};
pub use kmer::{
    multiset_equal, puff, puff_multiset, weight, KmerMultiset, KmerRecord, Mode,
    TextRepresentation,
};
pub use pipeline::{
    codec_roundtrip, compress, decompress, verify, CompressionJob, Compressed, FileKind, Metrics,
    StageSizes, VerifyReport,
};
pub use io::{ingest, FileManifest, IngestStats, SeqFormat, SequenceReader};
pub use report::{BenchReport, BenchRow};
pub use simgen::{
    noisy_reads, sample_multiset, spearman, sweep, MultiplicityDist, ReadSimSpec, SimSpec,
    SweepOptions, SweepResult, SweepRow,
};

use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("underlength: word of length {len} is shorter than k = {k}")]
    Underlength { len: usize, k: usize },

    #[error("alphabet violation: byte 0x{byte:02x} at offset {offset}")]
    AlphabetViolation { byte: u8, offset: usize },

    #[error("k = {k} is out of range ({min}..={max})")]
    KOutOfRange { k: usize, min: usize, max: usize },

    #[error("k mismatch: {left} vs {right}")]
    KMismatch { left: usize, right: usize },

    #[error("empty representation")]
    EmptyRepresentation,

    #[error("count sequence has {counts} entries but the strings hold {windows} k-mer windows")]
    CountMismatch { counts: usize, windows: usize },

    #[error("zero count for k-mer at position {0}")]
    ZeroCount(usize),

    #[error("duplicate k-mer in frequency representation at position {0}")]
    DuplicateKmer(usize),

    #[error("labels {left:?} and {right:?} do not overlap on k-2 symbols")]
    OverlapViolation { left: String, right: String },

    #[error("not Eulerian: vertex {vertex:?} has in-degree {in_degree} and out-degree {out_degree}")]
    NotEulerian {
        vertex: String,
        in_degree: u64,
        out_degree: u64,
    },

    #[error("terminator must occur exactly once (found {0})")]
    TerminatorCount(usize),

    #[error("terminator must be the final byte")]
    TerminatorNotFinal,

    #[error("RLE alphabet clash: digit byte at offset {0}")]
    RleAlphabetClash(usize),

    #[error("malformed RLE stream at offset {offset}: {reason}")]
    RleMalformed { offset: usize, reason: &'static str },

    #[error("invalid simulation parameters: {0}")]
    InvalidSimulation(String),

    #[error("malformed {kind} file at line {line}: {reason}")]
    Format {
        kind: &'static str,
        line: usize,
        reason: String,
    },

    #[error("no k-mers could be extracted from the input")]
    NoKmers,

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error("sequence parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

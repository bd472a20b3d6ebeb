//! End-to-end compression: graph, Eulerization, cover, optional codec.

use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use crate::alphabet::Alphabet;
use crate::codec::{concatenate, CodecBlock};
use crate::cover::eulerian_cover;
use crate::dbg::DeBruijnGraph;
use crate::error::{Error, Result};
use crate::eulerize::{eulerize_with, Pairing};
use crate::kmer::{
    multiset_equal, puff_multiset, weight, KmerMultiset, Mode, TextRepresentation, WordKey, MAX_K,
};

/// Output files, in the order they are reported.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FileKind {
    Reads,
    Ctr,
    Cnt,
    Bwt,
    Rle,
}

impl FileKind {
    pub const ALL: [FileKind; 5] = [
        FileKind::Reads,
        FileKind::Ctr,
        FileKind::Cnt,
        FileKind::Bwt,
        FileKind::Rle,
    ];

    pub fn extension(self) -> &'static str {
        match self {
            FileKind::Reads => "reads",
            FileKind::Ctr => "ctr",
            FileKind::Cnt => "cnt",
            FileKind::Bwt => "bwt",
            FileKind::Rle => "rle",
        }
    }
}

impl fmt::Display for FileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

#[derive(Clone, Debug)]
pub struct CompressionJob {
    pub k: usize,
    pub mode: Mode,
    pub apply_codec: bool,
    pub alphabet: Alphabet,
    pub pairing: Pairing,
}

impl CompressionJob {
    pub fn new(k: usize, mode: Mode) -> Self {
        Self {
            k,
            mode,
            apply_codec: false,
            alphabet: Alphabet::dna(),
            pairing: Pairing::default(),
        }
    }

    pub fn with_codec(mut self, apply: bool) -> Self {
        self.apply_codec = apply;
        self
    }

    pub fn with_alphabet(mut self, alphabet: Alphabet) -> Self {
        self.alphabet = alphabet;
        self
    }

    pub fn with_pairing(mut self, pairing: Pairing) -> Self {
        self.pairing = pairing;
        self
    }

    fn validate(&self, m: &KmerMultiset) -> Result<()> {
        if !(2..=MAX_K).contains(&self.k) {
            return Err(Error::KOutOfRange {
                k: self.k,
                min: 2,
                max: MAX_K,
            });
        }
        if m.k() != self.k {
            return Err(Error::KMismatch {
                left: self.k,
                right: m.k(),
            });
        }
        if m.is_empty() {
            return Err(Error::EmptyRepresentation);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Metrics {
    pub k: usize,
    pub mode: Mode,
    /// `(k + 1)|M| - 1`, the weight of the list representation.
    pub weight_m: u64,
    /// Weight of the strings.
    pub text_weight: u64,
    /// Weight of the decimal count sequence (frequency mode).
    pub count_weight: Option<u64>,
    /// `text_weight + count_weight`.
    pub weight_w: u64,
    pub cmpr: f64,
    pub string_count: u64,
    pub added_edges: u64,
    /// |M|, total multiplicity.
    pub kmer_total: u64,
    /// k-mer windows in the strings: |M| in list mode, distinct k-mers in
    /// frequency mode.
    pub edge_units: u64,
    pub core_time: Duration,
    pub codec_time: Duration,
    pub output_bytes: BTreeMap<FileKind, u64>,
}

impl Metrics {
    /// `text_weight = edge_units + k·|W| - 1`
    pub fn text_weight_identity_holds(&self) -> bool {
        self.text_weight + 1 == self.edge_units + self.k as u64 * self.string_count
    }

    /// Ratio of the graph's input (as a k-mer list) to the strings. This is
    /// `cmpr` in list mode and is always below `k + 1`.
    pub fn text_ratio(&self) -> f64 {
        ((self.k as u64 + 1) * self.edge_units - 1) as f64 / self.text_weight as f64
    }

    pub fn bound_holds(&self) -> bool {
        self.text_ratio() < (self.k + 1) as f64
    }

    /// Every violated invariant, empty when all hold.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.text_weight_identity_holds() {
            out.push(format!(
                "text weight {} != {} + {}*{} - 1",
                self.text_weight, self.edge_units, self.k, self.string_count
            ));
        }
        if self.weight_w != self.text_weight + self.count_weight.unwrap_or(0) {
            out.push("weight_W does not add up".into());
        }
        let ratio = self.weight_m as f64 / self.weight_w as f64;
        if (ratio - self.cmpr).abs() > 1e-12 * ratio.max(1.0) {
            out.push(format!("cmpr {} != {}", self.cmpr, ratio));
        }
        if !self.bound_holds() {
            out.push(format!(
                "ratio {} is not below k + 1 = {}",
                self.text_ratio(),
                self.k + 1
            ));
        }
        if self.mode == Mode::List && self.edge_units != self.kmer_total {
            out.push("list mode must spell every occurrence".into());
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct Compressed {
    pub text: TextRepresentation,
    pub metrics: Metrics,
    pub codec: Option<CodecBlock>,
}

/// Weight of a count sequence written as decimal words.
pub fn count_weight(counts: &[u64]) -> u64 {
    if counts.is_empty() {
        return 0;
    }
    let digits: u64 = counts
        .iter()
        .map(|c| c.checked_ilog10().unwrap_or(0) as u64 + 1)
        .sum();
    digits + counts.len() as u64 - 1
}

/// Counts aligned to the windows of `strings`, scanned in order.
fn aligned_counts(m: &KmerMultiset, strings: &[Vec<u8>], k: usize) -> Result<Vec<u64>> {
    let tally = m.tally();
    let mut counts = Vec::with_capacity(tally.len());
    for s in strings {
        for w in s.windows(k) {
            let c = tally
                .get(&WordKey::of(w))
                .copied()
                .ok_or(Error::CountMismatch {
                    counts: counts.len(),
                    windows: tally.len(),
                })?;
            counts.push(c);
        }
    }
    Ok(counts)
}

pub fn compress(job: &CompressionJob, m: &KmerMultiset) -> Result<Compressed> {
    job.validate(m)?;
    let k = job.k;

    let started = Instant::now();
    let graph = match job.mode {
        Mode::List => DeBruijnGraph::build_expanded(m)?,
        Mode::Frequency => DeBruijnGraph::build(&m.to_frequency())?,
    };
    let balanced = eulerize_with(&graph, job.pairing);
    drop(graph);
    let cover = eulerian_cover(&balanced)?;
    let added_edges = balanced.added_count() as u64;
    drop(balanced);
    let strings = cover.strings;
    let counts = match job.mode {
        Mode::List => None,
        Mode::Frequency => Some(aligned_counts(m, &strings, k)?),
    };
    let core_time = started.elapsed();

    let text = TextRepresentation::from_parts(k, strings, counts);
    let kmer_total = m.total();
    let weight_m = m.list_weight()?;
    let text_weight = text.weight()?;
    let count_weight = text.counts().map(count_weight);
    let weight_w = text_weight + count_weight.unwrap_or(0);

    let mut output_bytes = BTreeMap::new();
    output_bytes.insert(FileKind::Reads, weight_m);
    output_bytes.insert(FileKind::Ctr, text_weight);
    if let Some(c) = count_weight {
        output_bytes.insert(FileKind::Cnt, c);
    }

    let codec_started = Instant::now();
    let codec = if job.apply_codec {
        let block = CodecBlock::encode(
            concatenate(text.strings(), &job.alphabet),
            job.alphabet.terminator(),
        )?;
        output_bytes.insert(FileKind::Bwt, block.transformed.len() as u64);
        output_bytes.insert(FileKind::Rle, block.rle.len() as u64);
        Some(block)
    } else {
        None
    };
    let codec_time = codec_started.elapsed();

    let metrics = Metrics {
        k,
        mode: job.mode,
        weight_m,
        text_weight,
        count_weight,
        weight_w,
        cmpr: weight_m as f64 / weight_w as f64,
        string_count: text.len() as u64,
        added_edges,
        kmer_total,
        edge_units: text.window_count(),
        core_time,
        codec_time,
        output_bytes,
    };
    Ok(Compressed {
        text,
        metrics,
        codec,
    })
}

/// Reconstructs the multiset. `mode` must agree with whether `w` carries
/// counts.
pub fn decompress(w: &TextRepresentation, mode: Mode, alphabet: &Alphabet) -> Result<KmerMultiset> {
    match (mode, w.counts()) {
        (Mode::List, None) | (Mode::Frequency, Some(_)) => puff_multiset(w, alphabet),
        (Mode::List, Some(c)) => Err(Error::CountMismatch {
            counts: c.len(),
            windows: 0,
        }),
        (Mode::Frequency, None) => Err(Error::CountMismatch {
            counts: 0,
            windows: w.window_count() as usize,
        }),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub lossless: bool,
    /// |W| equals the fewest trails that can cover the original graph.
    pub minimal: bool,
    pub weight_m: u64,
    pub weight_w: u64,
    pub text_weight: u64,
    pub string_count: u64,
    pub expected_string_count: u64,
    pub cmpr: f64,
    pub failures: Vec<String>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.lossless && self.failures.is_empty()
    }
}

/// Fewest trails covering every edge: ½Σ|δ(v)| plus one per component that
/// is already balanced.
pub fn minimum_trail_count(g: &DeBruijnGraph) -> u64 {
    let ledger = g.imbalances();
    let comp = g.component_of();
    let n = comp.iter().copied().max().map_or(0, |m| m + 1);
    let mut balanced = vec![true; n];
    for v in g.vertices() {
        if ledger.delta[v.index()] != 0 {
            balanced[comp[v.index()]] = false;
        }
    }
    ledger.half_total() + balanced.iter().filter(|&&b| b).count() as u64
}

/// Checks that `w` reproduces `original` and that its metrics are
/// consistent. Failures are reported, not raised.
pub fn verify(original: &KmerMultiset, w: &TextRepresentation, alphabet: &Alphabet) -> VerifyReport {
    let mut failures = Vec::new();
    let k = original.k();
    if w.k() != k {
        failures.push(format!("k mismatch: {} vs {}", k, w.k()));
    }
    let lossless = match puff_multiset(w, alphabet) {
        Ok(back) => multiset_equal(original, &back).unwrap_or(false),
        Err(e) => {
            failures.push(format!("cannot expand representation: {e}"));
            false
        }
    };
    if !lossless {
        failures.push("reconstructed multiset differs from the original".into());
    }

    let weight_m = original.list_weight().unwrap_or(0);
    let text_weight = weight(w.strings()).unwrap_or(0);
    let count_weight = w.counts().map(count_weight);
    let weight_w = text_weight + count_weight.unwrap_or(0);
    let string_count = w.len() as u64;
    let units = match w.mode() {
        Mode::List => original.total(),
        Mode::Frequency => original.to_frequency().len() as u64,
    };
    let graph = match w.mode() {
        Mode::List => DeBruijnGraph::build_expanded(original),
        Mode::Frequency => DeBruijnGraph::build(&original.to_frequency()),
    };
    let expected_string_count = graph.as_ref().map(minimum_trail_count).unwrap_or(0);
    let minimal = graph.is_ok() && string_count == expected_string_count;
    if lossless && !minimal {
        failures.push(format!(
            "{string_count} strings where {expected_string_count} suffice"
        ));
    }

    let metrics = Metrics {
        k,
        mode: w.mode(),
        weight_m,
        text_weight,
        count_weight,
        weight_w,
        cmpr: if weight_w == 0 {
            0.0
        } else {
            weight_m as f64 / weight_w as f64
        },
        string_count,
        added_edges: 0,
        kmer_total: original.total(),
        edge_units: units,
        core_time: Duration::ZERO,
        codec_time: Duration::ZERO,
        output_bytes: BTreeMap::new(),
    };
    if lossless {
        failures.extend(metrics.violations());
    }
    VerifyReport {
        lossless,
        minimal,
        weight_m,
        weight_w,
        text_weight,
        string_count,
        expected_string_count,
        cmpr: metrics.cmpr,
        failures,
    }
}

/// Byte sizes of each codec stage for a representation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StageSizes {
    /// Strings joined by separators plus the terminator.
    pub concatenated: usize,
    pub bwt: usize,
    pub rle: usize,
    /// RLE size without the terminator's single byte.
    pub rle_payload: usize,
    pub round_trip_exact: bool,
}

pub fn codec_roundtrip(w: &TextRepresentation, alphabet: &Alphabet) -> Result<StageSizes> {
    for s in w.strings() {
        if let Some(i) = s
            .iter()
            .position(|&b| b == alphabet.separator() || b == alphabet.terminator())
        {
            return Err(Error::AlphabetViolation { byte: s[i], offset: i });
        }
    }
    let payload = concatenate(w.strings(), alphabet);
    let block = CodecBlock::encode(payload, alphabet.terminator())?;
    let decoded = CodecBlock::decode(&block.rle, alphabet.terminator())?;
    Ok(StageSizes {
        concatenated: block.payload.len(),
        bwt: block.transformed.len(),
        rle: block.rle.len(),
        rle_payload: block.rle.len() - 1,
        round_trip_exact: decoded == block.payload,
    })
}

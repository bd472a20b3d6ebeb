//! Synthetic inputs: uniform samples of the k-mer space and noisy reads.
//!
//! All randomness comes from ChaCha8 seeded with `seed_from_u64`, so outputs
//! are reproducible from the seed alone.

use std::io::Write;
use std::time::Duration;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::kmer::{KmerMultiset, Mode};
use crate::pipeline::{compress, CompressionJob};

/// Largest k for which the whole k-mer space is sampled directly.
pub const MAX_EXHAUSTIVE_K: usize = 14;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MultiplicityDist {
    Constant(u64),
    /// Inclusive bounds.
    Uniform { lo: u64, hi: u64 },
    /// Trials up to and including the first success; support starts at 1.
    Geometric(f64),
}

impl MultiplicityDist {
    fn validate(&self) -> Result<()> {
        match *self {
            MultiplicityDist::Constant(c) if c >= 1 => Ok(()),
            MultiplicityDist::Uniform { lo, hi } if lo >= 1 && lo <= hi => Ok(()),
            MultiplicityDist::Geometric(p) if p > 0.0 && p <= 1.0 => Ok(()),
            other => Err(Error::InvalidSimulation(format!(
                "invalid multiplicity distribution {other:?}"
            ))),
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> u64 {
        match *self {
            MultiplicityDist::Constant(c) => c,
            MultiplicityDist::Uniform { lo, hi } => rng.random_range(lo..=hi),
            MultiplicityDist::Geometric(p) => {
                if p >= 1.0 {
                    return 1;
                }
                // inversion: 1 + floor(ln U / ln(1 - p)), U in (0, 1]
                let u: f64 = 1.0 - rng.random::<f64>();
                1 + (u.ln() / (1.0 - p).ln()).floor() as u64
            }
        }
    }
}

impl std::str::FromStr for MultiplicityDist {
    type Err = String;

    /// `const:C`, `uniform:A-B` or `geometric:P`; a bare integer is constant.
    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("bad multiplicity spec {s:?}");
        if let Ok(c) = s.parse::<u64>() {
            return Ok(MultiplicityDist::Constant(c));
        }
        let (kind, arg) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "const" | "constant" => arg.parse().map(MultiplicityDist::Constant).map_err(|_| bad()),
            "uniform" => {
                let (a, b) = arg.split_once('-').ok_or_else(bad)?;
                Ok(MultiplicityDist::Uniform {
                    lo: a.parse().map_err(|_| bad())?,
                    hi: b.parse().map_err(|_| bad())?,
                })
            }
            "geometric" | "geom" => arg.parse().map(MultiplicityDist::Geometric).map_err(|_| bad()),
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SimSpec {
    pub k: usize,
    /// Fraction of the k-mer space to sample, in (0, 1].
    pub r: f64,
    pub multiplicity: MultiplicityDist,
    pub seed: u64,
    pub alphabet: Alphabet,
}

impl SimSpec {
    pub fn new(k: usize, r: f64, multiplicity: MultiplicityDist, seed: u64) -> Self {
        Self {
            k,
            r,
            multiplicity,
            seed,
            alphabet: Alphabet::dna(),
        }
    }

    /// `⌈r · |Σ|^k⌉`
    pub fn sample_size(&self) -> Result<u64> {
        let space = self.space()?;
        Ok((self.r * space as f64).ceil() as u64)
    }

    fn space(&self) -> Result<u64> {
        if self.k == 0 || self.k > MAX_EXHAUSTIVE_K {
            return Err(Error::InvalidSimulation(format!(
                "k = {} is outside 1..={MAX_EXHAUSTIVE_K} for whole-space sampling; \
                 generate reads with noisy_reads instead",
                self.k
            )));
        }
        self.alphabet
            .space_size(self.k)
            .ok_or_else(|| Error::InvalidSimulation("k-mer space too large".into()))
    }

    fn validate(&self) -> Result<()> {
        if !(self.r > 0.0 && self.r <= 1.0) {
            return Err(Error::InvalidSimulation(format!(
                "sampling ratio {} is outside (0, 1]",
                self.r
            )));
        }
        self.multiplicity.validate()?;
        self.space().map(|_| ())
    }
}

/// Distinct k-mers drawn uniformly without replacement, in rank order, each
/// with a sampled multiplicity. Returned in frequency mode.
pub fn sample_multiset(spec: &SimSpec) -> Result<KmerMultiset> {
    spec.validate()?;
    let space = spec.space()?;
    let amount = spec.sample_size()?.min(space);
    let mut rng = rng(spec.seed);
    let mut picks = index::sample(&mut rng, space as usize, amount as usize).into_vec();
    picks.sort_unstable();
    let mut data = Vec::with_capacity(picks.len() * spec.k);
    let mut counts = Vec::with_capacity(picks.len());
    for i in picks {
        data.extend(spec.alphabet.unrank(i as u64, spec.k));
        counts.push(spec.multiplicity.sample(&mut rng));
    }
    Ok(KmerMultiset::from_raw(spec.k, data, Some(counts)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub r: f64,
    pub kmer_total: u64,
    pub string_count: u64,
    #[serde(rename = "weight_M")]
    pub weight_m: u64,
    #[serde(rename = "weight_W")]
    pub weight_w: u64,
    pub cmpr: f64,
    pub core_time_s: f64,
}

#[derive(Clone, Debug)]
pub struct SweepOptions {
    pub mode: Mode,
    /// Record wall-clock core time; zero otherwise, which keeps the CSV
    /// byte-identical across runs.
    pub record_time: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            mode: Mode::List,
            record_time: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub k: usize,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn spearman(&self) -> f64 {
        let r: Vec<f64> = self.rows.iter().map(|row| row.r).collect();
        let c: Vec<f64> = self.rows.iter().map(|row| row.cmpr).collect();
        spearman(&r, &c)
    }

    pub fn bound_holds(&self) -> bool {
        self.rows.iter().all(|row| row.cmpr < (self.k + 1) as f64)
    }

    /// Columns `r,kmer_total,string_count,weight_M,weight_W,cmpr,core_time_s`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row)?;
        }
        if self.rows.is_empty() {
            w.write_record([
                "r",
                "kmer_total",
                "string_count",
                "weight_M",
                "weight_W",
                "cmpr",
                "core_time_s",
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    /// Line chart of cmpr against r with a dashed reference line at k + 1.
    pub fn to_svg(&self) -> String {
        let (w, h, pad) = (640.0, 400.0, 50.0);
        let top = (self.k + 1) as f64 * 1.05;
        let x = |r: f64| pad + r * (w - 2.0 * pad);
        let y = |v: f64| h - pad - v / top * (h - 2.0 * pad);
        let points: Vec<String> = self
            .rows
            .iter()
            .map(|row| format!("{:.1},{:.1}", x(row.r), y(row.cmpr)))
            .collect();
        let bound = y((self.k + 1) as f64);
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\">\n\
             <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
             <line x1=\"{pad}\" y1=\"{b}\" x2=\"{xe}\" y2=\"{b}\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>\n\
             <text x=\"{xe}\" y=\"{bt:.1}\" font-size=\"12\" text-anchor=\"end\">k+1 = {kp}</text>\n\
             <polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"{pts}\"/>\n\
             <line x1=\"{pad}\" y1=\"{yb}\" x2=\"{xe}\" y2=\"{yb}\" stroke=\"black\"/>\n\
             <line x1=\"{pad}\" y1=\"{pad}\" x2=\"{pad}\" y2=\"{yb}\" stroke=\"black\"/>\n\
             <text x=\"{xm}\" y=\"{xl}\" font-size=\"12\" text-anchor=\"middle\">sampling ratio r</text>\n\
             <text x=\"15\" y=\"{ym}\" font-size=\"12\" transform=\"rotate(-90 15 {ym})\" text-anchor=\"middle\">cmpr</text>\n\
             </svg>\n",
            b = bound,
            bt = bound - 4.0,
            xe = w - pad,
            kp = self.k + 1,
            pts = points.join(" "),
            yb = h - pad,
            xm = w / 2.0,
            xl = h - 15.0,
            ym = h / 2.0,
        )
    }
}

/// Compresses one sample per ratio. Row `i` uses seed `seed + i`.
pub fn sweep(
    k: usize,
    r_values: &[f64],
    multiplicity: MultiplicityDist,
    seed: u64,
    options: &SweepOptions,
) -> Result<SweepResult> {
    if r_values.is_empty() {
        return Err(Error::InvalidSimulation("no sampling ratios".into()));
    }
    if r_values.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::InvalidSimulation(
            "sampling ratios must be strictly ascending".into(),
        ));
    }
    let job = CompressionJob::new(k, options.mode);
    let mut rows = Vec::with_capacity(r_values.len());
    for (i, &r) in r_values.iter().enumerate() {
        let spec = SimSpec::new(k, r, multiplicity, seed.wrapping_add(i as u64));
        let m = sample_multiset(&spec)?;
        let out = compress(&job, &m)?;
        let mt = out.metrics;
        let time = if options.record_time {
            mt.core_time
        } else {
            Duration::ZERO
        };
        rows.push(SweepRow {
            r,
            kmer_total: mt.kmer_total,
            string_count: mt.string_count,
            weight_m: mt.weight_m,
            weight_w: mt.weight_w,
            cmpr: mt.cmpr,
            core_time_s: time.as_secs_f64(),
        });
    }
    Ok(SweepResult { k, rows })
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut out = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        // ties share the mean of their 1-based positions
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &slot in &idx[i..=j] {
            out[slot] = rank;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation with average ranks for ties. NaN when either
/// side is constant.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let (rx, ry) = (ranks(x), ranks(y));
    let n = rx.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReadSimSpec {
    pub genome_length: usize,
    pub read_length: usize,
    pub coverage: f64,
    /// Per-base substitution probability in [0, 1).
    pub error_rate: f64,
    pub seed: u64,
}

impl ReadSimSpec {
    pub fn read_count(&self) -> usize {
        (self.coverage * self.genome_length as f64 / self.read_length as f64).round() as usize
    }
}

#[derive(Clone, Debug)]
pub struct SimulatedReads {
    pub genome: Vec<u8>,
    pub reads: Vec<Vec<u8>>,
    /// Start offset of each read in the genome.
    pub positions: Vec<usize>,
    pub substitutions: u64,
}

/// Reads drawn at uniform offsets of a uniform random genome, with
/// independent per-base substitutions to a different base.
pub fn noisy_reads(spec: &ReadSimSpec) -> Result<SimulatedReads> {
    if spec.genome_length == 0 || spec.read_length == 0 || spec.read_length > spec.genome_length {
        return Err(Error::InvalidSimulation(format!(
            "read length {} must be in 1..={}",
            spec.read_length, spec.genome_length
        )));
    }
    if !(spec.coverage > 0.0) || !(0.0..1.0).contains(&spec.error_rate) {
        return Err(Error::InvalidSimulation(
            "coverage must be positive and error rate in [0, 1)".into(),
        ));
    }
    const BASES: &[u8; 4] = b"ACGT";
    let mut rng = rng(spec.seed);
    let genome: Vec<u8> = (0..spec.genome_length)
        .map(|_| BASES[rng.random_range(0..4)])
        .collect();
    let n = spec.read_count();
    let mut reads = Vec::with_capacity(n);
    let mut positions = Vec::with_capacity(n);
    let mut substitutions = 0;
    for _ in 0..n {
        let start = rng.random_range(0..=spec.genome_length - spec.read_length);
        let mut read = genome[start..start + spec.read_length].to_vec();
        if spec.error_rate > 0.0 {
            for b in read.iter_mut() {
                if rng.random_bool(spec.error_rate) {
                    let shift = rng.random_range(1..4);
                    let cur = BASES.iter().position(|x| x == b).expect("genome base");
                    *b = BASES[(cur + shift) % 4];
                    substitutions += 1;
                }
            }
        }
        reads.push(read);
        positions.push(start);
    }
    Ok(SimulatedReads {
        genome,
        reads,
        positions,
        substitutions,
    })
}

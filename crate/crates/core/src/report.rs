//! Benchmark rows: one per (dataset, algorithm, mode, k).

use std::fmt::Write as _;
use std::io::Write;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::alphabet::Alphabet;
use crate::codec::{concatenate, CodecBlock};
use crate::error::Result;
use crate::kmer::{KmerMultiset, Mode};
use crate::pipeline::{compress, CompressionJob, FileKind, Metrics};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub dataset: String,
    pub algorithm: String,
    pub mode: Mode,
    pub k: usize,
    pub core_time_s: f64,
    pub raw_output_bytes: u64,
    pub cmpr: f64,
}

#[derive(Clone, Debug, Default)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// Input `.reads` size per dataset and k, for the text view.
    pub input_bytes: Vec<(String, usize, u64)>,
}

impl BenchReport {
    /// Columns `dataset,algorithm,mode,k,core_time_s,raw_output_bytes,cmpr`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        if self.rows.is_empty() {
            w.write_record([
                "dataset",
                "algorithm",
                "mode",
                "k",
                "core_time_s",
                "raw_output_bytes",
                "cmpr",
            ])?;
        }
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<16} {:<16} {:<9} {:>5} {:>12} {:>16} {:>9}",
            "dataset", "algorithm", "mode", "k", "core_time_s", "raw_output_bytes", "cmpr"
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:<16} {:<16} {:<9} {:>5} {:>12.6} {:>16} {:>9.4}",
                r.dataset,
                r.algorithm,
                r.mode.to_string(),
                r.k,
                r.core_time_s,
                r.raw_output_bytes,
                r.cmpr
            );
        }
        for (d, k, b) in &self.input_bytes {
            let _ = writeln!(s, "input {d} k={k}: .reads {b} bytes");
        }
        s
    }
}

/// Rows for one dataset at one k and mode:
///
/// * `reads`: the uncompressed `.reads` text;
/// * `reads+bwt+rle`: the codec applied to the raw k-mer list;
/// * `kcover`: `.ctr` plus `.cnt`;
/// * `kcover+bwt+rle`: the codec applied to the strings (`.cnt` added in
///   frequency mode).
///
/// Sizes follow the no-trailing-newline framing, so they equal the
/// corresponding weights and the file sizes a compress run writes.
pub fn bench_dataset(
    dataset: &str,
    m: &KmerMultiset,
    k: usize,
    mode: Mode,
    alphabet: &Alphabet,
) -> Result<(Vec<BenchRow>, u64)> {
    let job = CompressionJob::new(k, mode)
        .with_codec(true)
        .with_alphabet(alphabet.clone());
    let out = compress(&job, m)?;
    let mt = &out.metrics;
    let reads = mt.weight_m;
    let row = |algorithm: &str, time: Duration, bytes: u64| BenchRow {
        dataset: dataset.to_string(),
        algorithm: algorithm.to_string(),
        mode,
        k,
        core_time_s: time.as_secs_f64(),
        raw_output_bytes: bytes,
        cmpr: reads as f64 / bytes as f64,
    };

    let started = Instant::now();
    let expanded: Vec<&[u8]> = m
        .entries()
        .flat_map(|(r, c)| std::iter::repeat_n(r, c as usize))
        .collect();
    let raw = CodecBlock::encode(concatenate(&expanded, alphabet), alphabet.terminator())?;
    let raw_time = started.elapsed();

    let cnt = mt.count_weight.unwrap_or(0);
    let rows = vec![
        row("reads", Duration::ZERO, reads),
        row("reads+bwt+rle", raw_time, raw.rle.len() as u64),
        row("kcover", mt.core_time, mt.weight_w),
        row(
            "kcover+bwt+rle",
            mt.core_time + mt.codec_time,
            mt.output_bytes[&FileKind::Rle] + cnt,
        ),
    ];
    Ok((rows, reads))
}

/// `.reads` bytes over `.ctr + .cnt` bytes, as measured on disk.
pub fn cmpr_from_sizes(reads_bytes: u64, ctr_bytes: u64, cnt_bytes: u64) -> f64 {
    reads_bytes as f64 / (ctr_bytes + cnt_bytes) as f64
}

pub fn metrics_row(dataset: &str, mt: &Metrics) -> BenchRow {
    BenchRow {
        dataset: dataset.to_string(),
        algorithm: "kcover".into(),
        mode: mt.mode,
        k: mt.k,
        core_time_s: mt.core_time.as_secs_f64(),
        raw_output_bytes: mt.weight_w,
        cmpr: mt.cmpr,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> KmerMultiset {
        KmerMultiset::from_list(
            4,
            ["ATAC", "ATCA", "ATGA", "ATGC", "CATC", "TCAT", "TGCT"],
            &Alphabet::dna(),
        )
        .unwrap()
    }

    #[test]
    fn toy_rows() {
        let (rows, reads) = bench_dataset("toy", &toy(), 4, Mode::List, &Alphabet::dna()).unwrap();
        assert_eq!(reads, 34);
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].cmpr, 1.0);
        let kc = &rows[2];
        assert_eq!(kc.raw_output_bytes, 22);
        assert_eq!(kc.cmpr, 34.0 / 22.0);
        assert_eq!(rows[3].raw_output_bytes, 20);
    }

    #[test]
    fn csv_header_and_rows() {
        let (rows, _) = bench_dataset("toy", &toy(), 4, Mode::List, &Alphabet::dna()).unwrap();
        let rep = BenchReport {
            rows,
            input_bytes: vec![("toy".into(), 4, 34)],
        };
        let csv = rep.to_csv().unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next(),
            Some("dataset,algorithm,mode,k,core_time_s,raw_output_bytes,cmpr")
        );
        assert!(lines.next().unwrap().starts_with("toy,reads,list,4,"));
        assert_eq!(csv.lines().count(), 5);
        assert!(rep.to_text().contains("kcover+bwt+rle"));
        let empty = BenchReport::default().to_csv().unwrap();
        assert_eq!(empty.lines().count(), 1);
    }

    #[test]
    fn size_ratio_matches_metrics() {
        let m = KmerMultiset::from_list(3, ["AAA", "AAA", "AAC", "ACG"], &Alphabet::dna()).unwrap();
        let out = compress(&CompressionJob::new(3, Mode::Frequency), &m).unwrap();
        let mt = out.metrics;
        let c = cmpr_from_sizes(mt.weight_m, mt.text_weight, mt.count_weight.unwrap());
        assert_eq!(c, mt.cmpr);
        assert_eq!(metrics_row("x", &mt).cmpr, mt.cmpr);
    }
}

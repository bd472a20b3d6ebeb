//! Sequence ingestion and the on-disk formats.
//!
//! Every output file is newline-separated with no newline after the last
//! record, so a `.reads` file of `|M|` k-mers is exactly `(k+1)|M| - 1`
//! bytes. Readers accept one trailing newline and CRLF line endings.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::kmer::{KmerMultiset, Mode, TextRepresentation};
use crate::pipeline::FileKind;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeqFormat {
    Fasta,
    Fastq,
    /// One sequence per line.
    Reads,
}

impl FromStr for SeqFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "fasta" | "fa" => Ok(SeqFormat::Fasta),
            "fastq" | "fq" => Ok(SeqFormat::Fastq),
            "reads" | "lines" => Ok(SeqFormat::Reads),
            _ => Err(format!("unknown sequence format {s:?}")),
        }
    }
}

impl SeqFormat {
    /// Guess from a file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        let ext = path.extension()?.to_str()?;
        match ext.to_ascii_lowercase().as_str() {
            "fasta" | "fa" | "fna" => Some(SeqFormat::Fasta),
            "fastq" | "fq" => Some(SeqFormat::Fastq),
            "reads" | "txt" => Some(SeqFormat::Reads),
            _ => None,
        }
    }
}

/// Streaming reader yielding one raw sequence per record.
pub struct SequenceReader<R> {
    inner: R,
    format: SeqFormat,
    line: Vec<u8>,
    line_no: usize,
    /// FASTA header already consumed for the next record.
    pending_header: bool,
    done: bool,
}

fn trim_eol(line: &mut Vec<u8>) {
    if line.last() == Some(&b'\n') {
        line.pop();
        if line.last() == Some(&b'\r') {
            line.pop();
        }
    }
}

impl<R: BufRead> SequenceReader<R> {
    pub fn new(inner: R, format: SeqFormat) -> Self {
        Self {
            inner,
            format,
            line: Vec::new(),
            line_no: 0,
            pending_header: false,
            done: false,
        }
    }

    fn next_line(&mut self) -> Result<bool> {
        self.line.clear();
        if self.inner.read_until(b'\n', &mut self.line)? == 0 {
            return Ok(false);
        }
        self.line_no += 1;
        trim_eol(&mut self.line);
        Ok(true)
    }

    fn format_err(&self, reason: impl Into<String>) -> Error {
        Error::Format {
            kind: match self.format {
                SeqFormat::Fasta => "fasta",
                SeqFormat::Fastq => "fastq",
                SeqFormat::Reads => "reads",
            },
            line: self.line_no,
            reason: reason.into(),
        }
    }

    fn next_fasta(&mut self) -> Result<Option<Vec<u8>>> {
        if !self.pending_header {
            loop {
                if !self.next_line()? {
                    return Ok(None);
                }
                if self.line.starts_with(b">") {
                    break;
                }
                if !self.line.iter().all(u8::is_ascii_whitespace) {
                    return Err(self.format_err("sequence data before the first header"));
                }
            }
        }
        self.pending_header = false;
        let mut seq = Vec::new();
        while self.next_line()? {
            if self.line.starts_with(b">") {
                self.pending_header = true;
                break;
            }
            seq.extend_from_slice(&self.line);
        }
        Ok(Some(seq))
    }

    fn next_fastq(&mut self) -> Result<Option<Vec<u8>>> {
        loop {
            if !self.next_line()? {
                return Ok(None);
            }
            if !self.line.is_empty() {
                break;
            }
        }
        if !self.line.starts_with(b"@") {
            return Err(self.format_err("record does not start with '@'"));
        }
        if !self.next_line()? {
            return Err(self.format_err("truncated record"));
        }
        let seq = std::mem::take(&mut self.line);
        if !self.next_line()? || !self.line.starts_with(b"+") {
            return Err(self.format_err("missing '+' separator line"));
        }
        if !self.next_line()? {
            return Err(self.format_err("missing quality line"));
        }
        if self.line.len() != seq.len() {
            return Err(self.format_err("quality length differs from sequence length"));
        }
        Ok(Some(seq))
    }

    fn next_line_record(&mut self) -> Result<Option<Vec<u8>>> {
        if !self.next_line()? {
            return Ok(None);
        }
        Ok(Some(std::mem::take(&mut self.line)))
    }
}

impl<R: BufRead> Iterator for SequenceReader<R> {
    type Item = Result<Vec<u8>>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let r = match self.format {
            SeqFormat::Fasta => self.next_fasta(),
            SeqFormat::Fastq => self.next_fastq(),
            SeqFormat::Reads => self.next_line_record(),
        };
        match r {
            Ok(Some(s)) => Some(Ok(s)),
            Ok(None) => {
                self.done = true;
                None
            }
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IngestStats {
    pub sequences: u64,
    pub fragments: u64,
    /// Fragments dropped for being shorter than k.
    pub short_fragments: u64,
    pub kmers: u64,
}

/// Appends every k-window of every maximal alphabet-only fragment of `seq`.
/// Lowercase bases are folded to uppercase when only the uppercase form is
/// in the alphabet.
pub fn extract_kmers(
    seq: &[u8],
    k: usize,
    alphabet: &Alphabet,
    out: &mut Vec<u8>,
    stats: &mut IngestStats,
) {
    let norm = |b: u8| {
        if alphabet.contains(b) {
            Some(b)
        } else if alphabet.contains(b.to_ascii_uppercase()) {
            Some(b.to_ascii_uppercase())
        } else {
            None
        }
    };
    let mut fragment = Vec::new();
    let mut flush = |fragment: &mut Vec<u8>, out: &mut Vec<u8>| {
        if fragment.is_empty() {
            return;
        }
        stats.fragments += 1;
        if fragment.len() < k {
            stats.short_fragments += 1;
        } else {
            for w in fragment.windows(k) {
                out.extend_from_slice(w);
                stats.kmers += 1;
            }
        }
        fragment.clear();
    };
    for &b in seq {
        match norm(b) {
            Some(c) => fragment.push(c),
            None => flush(&mut fragment, out),
        }
    }
    flush(&mut fragment, out);
}

/// List-mode multiset of all k-mers in a sequence stream.
pub fn ingest_reader<R: BufRead>(
    reader: R,
    format: SeqFormat,
    k: usize,
    alphabet: &Alphabet,
) -> Result<(KmerMultiset, IngestStats)> {
    if !(1..=crate::kmer::MAX_K).contains(&k) {
        return Err(Error::KOutOfRange {
            k,
            min: 1,
            max: crate::kmer::MAX_K,
        });
    }
    let mut data = Vec::new();
    let mut stats = IngestStats::default();
    for seq in SequenceReader::new(reader, format) {
        let seq = seq?;
        stats.sequences += 1;
        extract_kmers(&seq, k, alphabet, &mut data, &mut stats);
    }
    if data.is_empty() {
        return Err(Error::NoKmers);
    }
    Ok((KmerMultiset::from_raw(k, data, None), stats))
}

pub fn ingest(
    path: &Path,
    format: SeqFormat,
    k: usize,
    alphabet: &Alphabet,
) -> Result<(KmerMultiset, IngestStats)> {
    ingest_reader(BufReader::new(File::open(path)?), format, k, alphabet)
}

/// Writes records separated by `\n`, with no trailing newline.
pub fn write_lines<W, I, T>(out: W, lines: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = T>,
    T: AsRef<[u8]>,
{
    let mut out = BufWriter::new(out);
    for (i, line) in lines.into_iter().enumerate() {
        if i > 0 {
            out.write_all(b"\n")?;
        }
        out.write_all(line.as_ref())?;
    }
    out.flush()?;
    Ok(())
}

/// Splits on `\n`, tolerating one trailing newline and `\r\n` endings.
/// An empty input has no lines.
pub fn split_lines(bytes: &[u8]) -> Vec<&[u8]> {
    let body = bytes.strip_suffix(b"\n").unwrap_or(bytes);
    if bytes.is_empty() {
        return Vec::new();
    }
    body.split(|&b| b == b'\n')
        .map(|l| l.strip_suffix(b"\r").unwrap_or(l))
        .collect()
}

/// One k-mer per line; counts are expanded.
pub fn write_reads<W: Write>(out: W, m: &KmerMultiset) -> Result<()> {
    let expanded = m
        .entries()
        .flat_map(|(r, c)| std::iter::repeat_n(r, c as usize));
    write_lines(out, expanded)
}

/// Inverse of [`write_reads`]; k is taken from the first line.
pub fn read_reads(bytes: &[u8], alphabet: &Alphabet) -> Result<KmerMultiset> {
    let lines = split_lines(bytes);
    let Some(first) = lines.first() else {
        return Err(Error::NoKmers);
    };
    let k = first.len();
    for (i, l) in lines.iter().enumerate() {
        if l.len() != k {
            return Err(Error::Format {
                kind: "reads",
                line: i + 1,
                reason: format!("line has length {}, expected {k}", l.len()),
            });
        }
    }
    KmerMultiset::from_list(k, lines, alphabet)
}

pub fn write_ctr<W: Write>(out: W, w: &TextRepresentation) -> Result<()> {
    write_lines(out, w.strings())
}

pub fn read_ctr(bytes: &[u8]) -> Vec<Vec<u8>> {
    split_lines(bytes).into_iter().map(<[u8]>::to_vec).collect()
}

pub fn write_cnt<W: Write>(out: W, counts: &[u64]) -> Result<()> {
    write_lines(out, counts.iter().map(u64::to_string))
}

pub fn read_cnt(bytes: &[u8]) -> Result<Vec<u64>> {
    split_lines(bytes)
        .into_iter()
        .enumerate()
        .map(|(i, l)| {
            std::str::from_utf8(l)
                .ok()
                .filter(|s| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()))
                .and_then(|s| s.parse::<u64>().ok())
                .ok_or_else(|| Error::Format {
                    kind: "cnt",
                    line: i + 1,
                    reason: format!("not a decimal count: {:?}", String::from_utf8_lossy(l)),
                })
        })
        .collect()
}

/// `<prefix>.<ext>`
pub fn output_path(prefix: &Path, kind: FileKind) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(kind.extension());
    PathBuf::from(s)
}

pub fn write_file<F>(path: &Path, f: F) -> Result<()>
where
    F: FnOnce(&mut File) -> Result<()>,
{
    let mut file = File::create(path)?;
    f(&mut file)
}

/// Writes `<prefix>.ctr` and, in frequency mode, `<prefix>.cnt`.
pub fn write_text(prefix: &Path, w: &TextRepresentation) -> Result<()> {
    write_file(&output_path(prefix, FileKind::Ctr), |f| write_ctr(f, w))?;
    let cnt = output_path(prefix, FileKind::Cnt);
    match w.counts() {
        Some(c) => write_file(&cnt, |f| write_cnt(f, c))?,
        None => {
            if cnt.exists() {
                fs::remove_file(&cnt)?;
            }
        }
    }
    Ok(())
}

/// Reads `<prefix>.ctr`, plus `<prefix>.cnt` in frequency mode, and
/// validates the result.
pub fn read_text(
    prefix: &Path,
    k: usize,
    mode: Mode,
    alphabet: &Alphabet,
) -> Result<TextRepresentation> {
    let strings = read_ctr(&fs::read(output_path(prefix, FileKind::Ctr))?);
    let counts = match mode {
        Mode::List => None,
        Mode::Frequency => Some(read_cnt(&fs::read(output_path(prefix, FileKind::Cnt))?)?),
    };
    TextRepresentation::new(k, strings, counts, alphabet)
}

/// Paths and on-disk sizes of the files present for a prefix.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FileManifest {
    pub files: BTreeMap<FileKind, (PathBuf, u64)>,
}

impl FileManifest {
    pub fn scan(prefix: &Path) -> Result<Self> {
        let mut files = BTreeMap::new();
        for kind in FileKind::ALL {
            let p = output_path(prefix, kind);
            match fs::metadata(&p) {
                Ok(md) => {
                    files.insert(kind, (p, md.len()));
                }
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
                Err(e) => return Err(e.into()),
            }
        }
        Ok(Self { files })
    }

    pub fn size(&self, kind: FileKind) -> Option<u64> {
        self.files.get(&kind).map(|&(_, s)| s)
    }

    /// `.ctr` plus `.cnt` when present.
    pub fn compressed_bytes(&self) -> u64 {
        self.size(FileKind::Ctr).unwrap_or(0) + self.size(FileKind::Cnt).unwrap_or(0)
    }

    /// `.cnt` present iff frequency mode.
    pub fn consistent_with(&self, mode: Mode) -> bool {
        self.files.contains_key(&FileKind::Cnt) == (mode == Mode::Frequency)
    }
}

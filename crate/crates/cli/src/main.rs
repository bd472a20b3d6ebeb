use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use kcover_core::codec::split_payload;
use kcover_core::io::{
    ingest, output_path, read_text, write_file, write_lines, write_reads, write_text,
    FileManifest, IngestStats, SeqFormat,
};
use kcover_core::report::{bench_dataset, metrics_row, BenchReport};
use kcover_core::{
    compress, decompress, noisy_reads, sample_multiset, sweep, verify, Alphabet, CodecBlock,
    CompressionJob, FileKind, KmerMultiset, Mode, MultiplicityDist, ReadSimSpec, SimSpec,
    SweepOptions, TextRepresentation,
};

#[derive(Parser)]
#[command(name = "kcover", version, about = "Lossless k-mer multiset compression")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compress the k-mers of a sequence file into .ctr (and .cnt) files
    Compress(CompressArgs),
    /// Expand .ctr/.cnt (or .rle) back into a .reads file
    Decompress(DecompressArgs),
    /// Check compressed files against the original input
    Verify(VerifyArgs),
    /// Generate a synthetic k-mer sample or noisy reads
    Simulate(SimulateArgs),
    /// Compression ratio over a range of sampling ratios
    Sweep(SweepArgs),
    /// Size and timing table for one or more datasets
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SimKind {
    Kmers,
    Reads,
}

#[derive(Args)]
struct InputArgs {
    #[arg(long)]
    input: PathBuf,
    /// fasta, fastq or reads; guessed from the extension when omitted
    #[arg(long)]
    format: Option<SeqFormat>,
}

impl InputArgs {
    fn format(&self) -> SeqFormat {
        self.format
            .or_else(|| SeqFormat::from_path(&self.input))
            .unwrap_or(SeqFormat::Reads)
    }

    fn load(&self, k: usize) -> Result<(KmerMultiset, IngestStats)> {
        let (m, stats) = ingest(&self.input, self.format(), k, &Alphabet::dna())
            .with_context(|| format!("reading {}", self.input.display()))?;
        if stats.short_fragments > 0 {
            eprintln!(
                "warning: skipped {} fragment(s) shorter than k = {k}",
                stats.short_fragments
            );
        }
        Ok((m, stats))
    }
}

#[derive(Args)]
struct CompressArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value = "list")]
    mode: Mode,
    /// Also write .bwt and .rle
    #[arg(long)]
    codec: bool,
    #[arg(long)]
    output_prefix: PathBuf,
    /// Skip writing the intermediate .reads file
    #[arg(long)]
    no_reads: bool,
    #[arg(long, value_enum, default_value = "text")]
    report: ReportFormat,
}

#[derive(Args)]
struct DecompressArgs {
    /// Prefix of the compressed files
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value = "list")]
    mode: Mode,
    /// Read the strings from .rle instead of .ctr
    #[arg(long)]
    codec: bool,
    /// Writes <prefix>.reads
    #[arg(long)]
    output_prefix: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value = "list")]
    mode: Mode,
    /// Also check that .rle decodes to the same strings
    #[arg(long)]
    codec: bool,
    /// Prefix of the compressed files
    #[arg(long)]
    output_prefix: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    report: ReportFormat,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum, default_value = "kmers")]
    kind: SimKind,
    #[arg(long, default_value_t = 8)]
    k: usize,
    /// Fraction of the k-mer space to sample
    #[arg(long, default_value_t = 1.0)]
    r: f64,
    /// const:C, uniform:A-B or geometric:P
    #[arg(long, default_value = "1")]
    multiplicity: MultiplicityDist,
    #[arg(long, default_value_t = 100_000)]
    genome_length: usize,
    #[arg(long, default_value_t = 100)]
    read_length: usize,
    #[arg(long, default_value_t = 5.0)]
    coverage: f64,
    #[arg(long, default_value_t = 0.01)]
    error_rate: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Writes <prefix>.reads (kmers) or <prefix>.fasta (reads)
    #[arg(long)]
    output_prefix: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 8)]
    k: usize,
    /// Comma-separated ratios, or start:step:end
    #[arg(long, default_value = "0.05:0.05:1.0")]
    r_list: String,
    #[arg(long, default_value = "1")]
    multiplicity: MultiplicityDist,
    #[arg(long, default_value = "list")]
    mode: Mode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "csv")]
    report: ReportFormat,
    /// Write the report here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also write an SVG chart
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Report zero core time so output is identical across runs
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Sequence files; simulated reads are used when none is given
    #[arg(long)]
    input: Vec<PathBuf>,
    #[arg(long)]
    format: Option<SeqFormat>,
    #[arg(long, value_delimiter = ',', default_value = "15,21,31")]
    k: Vec<usize>,
    #[arg(long, default_value = "list")]
    mode: Mode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "text")]
    report: ReportFormat,
}

enum Outcome {
    Success,
    VerificationFailed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::VerificationFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::Compress(a) => cmd_compress(a),
        Command::Decompress(a) => cmd_decompress(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Bench(a) => cmd_bench(a),
    }
}

fn create_parent(prefix: &Path) -> Result<()> {
    if let Some(dir) = prefix.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(())
}

fn cmd_compress(a: CompressArgs) -> Result<Outcome> {
    let (m, _) = a.input.load(a.k)?;
    let job = CompressionJob::new(a.k, a.mode).with_codec(a.codec);
    let out = compress(&job, &m)?;
    for v in out.metrics.violations() {
        eprintln!("warning: {v}");
    }

    let prefix = &a.output_prefix;
    create_parent(prefix)?;
    if !a.no_reads {
        write_file(&output_path(prefix, FileKind::Reads), |f| write_reads(f, &m))?;
    }
    write_text(prefix, &out.text)?;
    if let Some(block) = &out.codec {
        write_file(&output_path(prefix, FileKind::Bwt), |f| {
            Ok(f.write_all(&block.transformed)?)
        })?;
        write_file(&output_path(prefix, FileKind::Rle), |f| Ok(f.write_all(&block.rle)?))?;
    }

    let manifest = FileManifest::scan(prefix)?;
    let mt = &out.metrics;
    let stdout = io::stdout();
    let mut w = stdout.lock();
    match a.report {
        ReportFormat::Csv => {
            let rep = BenchReport {
                rows: vec![metrics_row(&a.input.input.display().to_string(), mt)],
                input_bytes: Vec::new(),
            };
            rep.write_csv(&mut w)?;
        }
        ReportFormat::Text => {
            writeln!(w, "k             {}", mt.k)?;
            writeln!(w, "mode          {}", mt.mode)?;
            writeln!(w, "kmers         {}", mt.kmer_total)?;
            writeln!(w, "strings       {}", mt.string_count)?;
            writeln!(w, "added_edges   {}", mt.added_edges)?;
            writeln!(w, "weight_M      {}", mt.weight_m)?;
            writeln!(w, "weight_W      {}", mt.weight_w)?;
            writeln!(w, "cmpr          {:.4}", mt.cmpr)?;
            writeln!(w, "core_time_s   {:.6}", mt.core_time.as_secs_f64())?;
            if a.codec {
                writeln!(w, "codec_time_s  {:.6}", mt.codec_time.as_secs_f64())?;
            }
            for (kind, (path, size)) in &manifest.files {
                writeln!(w, "{kind:<13} {size} bytes  {}", path.display())?;
            }
        }
    }
    Ok(Outcome::Success)
}

fn load_text(prefix: &Path, k: usize, mode: Mode, from_rle: bool) -> Result<TextRepresentation> {
    let alphabet = Alphabet::dna();
    if !from_rle {
        return read_text(prefix, k, mode, &alphabet)
            .with_context(|| format!("loading {}.ctr", prefix.display()));
    }
    let rle_path = output_path(prefix, FileKind::Rle);
    let rle = fs::read(&rle_path).with_context(|| format!("reading {}", rle_path.display()))?;
    let payload = CodecBlock::decode(&rle, alphabet.terminator())
        .with_context(|| format!("decoding {}", rle_path.display()))?;
    let strings = split_payload(&payload, &alphabet)?;
    let counts = match mode {
        Mode::List => None,
        Mode::Frequency => {
            let p = output_path(prefix, FileKind::Cnt);
            let bytes = fs::read(&p).with_context(|| format!("reading {}", p.display()))?;
            Some(kcover_core::io::read_cnt(&bytes)?)
        }
    };
    Ok(TextRepresentation::new(k, strings, counts, &alphabet)?)
}

fn cmd_decompress(a: DecompressArgs) -> Result<Outcome> {
    let w = load_text(&a.input, a.k, a.mode, a.codec)?;
    let m = decompress(&w, a.mode, &Alphabet::dna())?;
    create_parent(&a.output_prefix)?;
    let path = output_path(&a.output_prefix, FileKind::Reads);
    write_file(&path, |f| write_reads(f, &m))?;
    eprintln!("wrote {} k-mers to {}", m.total(), path.display());
    Ok(Outcome::Success)
}

fn cmd_verify(a: VerifyArgs) -> Result<Outcome> {
    let (original, _) = a.input.load(a.k)?;
    let prefix = &a.output_prefix;
    let mut failures = Vec::new();

    let manifest = FileManifest::scan(prefix)?;
    if !manifest.files.contains_key(&FileKind::Ctr) {
        bail!("{} not found", output_path(prefix, FileKind::Ctr).display());
    }
    if !manifest.consistent_with(a.mode) {
        failures.push(format!(".cnt presence does not match {} mode", a.mode));
    }

    let report = match load_text(prefix, a.k, a.mode, false) {
        Ok(w) => {
            if a.codec {
                match load_text(prefix, a.k, a.mode, true) {
                    Ok(from_rle) if from_rle == w => {}
                    Ok(_) => failures.push(".rle does not decode to the .ctr strings".into()),
                    Err(e) => failures.push(format!("{e:#}")),
                }
            }
            let report = verify(&original, &w, &Alphabet::dna());
            if manifest.size(FileKind::Ctr) != Some(report.text_weight) {
                failures.push(".ctr size differs from the weight of its strings".into());
            }
            failures.extend(report.failures.iter().cloned());
            Some(report)
        }
        Err(e) => {
            failures.push(format!("{e:#}"));
            None
        }
    };

    let ok = failures.is_empty();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match a.report {
        ReportFormat::Csv => {
            writeln!(out, "lossless,minimal,weight_M,weight_W,strings,expected_strings,cmpr")?;
            if let Some(r) = &report {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    r.lossless,
                    r.minimal,
                    r.weight_m,
                    r.weight_w,
                    r.string_count,
                    r.expected_string_count,
                    r.cmpr
                )?;
            }
        }
        ReportFormat::Text => {
            if let Some(r) = &report {
                writeln!(out, "lossless      {}", r.lossless)?;
                writeln!(out, "minimal       {}", r.minimal)?;
                writeln!(out, "strings       {} (minimum {})", r.string_count, r.expected_string_count)?;
                writeln!(out, "weight_M      {}", r.weight_m)?;
                writeln!(out, "weight_W      {}", r.weight_w)?;
                writeln!(out, "cmpr          {:.4}", r.cmpr)?;
            }
            writeln!(out, "{}", if ok { "OK" } else { "FAILED" })?;
        }
    }
    for f in &failures {
        eprintln!("verify: {f}");
    }
    Ok(if ok {
        Outcome::Success
    } else {
        Outcome::VerificationFailed
    })
}

fn cmd_simulate(a: SimulateArgs) -> Result<Outcome> {
    create_parent(&a.output_prefix)?;
    match a.kind {
        SimKind::Kmers => {
            let m = sample_multiset(&SimSpec::new(a.k, a.r, a.multiplicity, a.seed))?;
            let path = output_path(&a.output_prefix, FileKind::Reads);
            write_file(&path, |f| write_reads(f, &m))?;
            eprintln!(
                "wrote {} k-mers ({} distinct) to {}",
                m.total(),
                m.len(),
                path.display()
            );
        }
        SimKind::Reads => {
            let sim = noisy_reads(&ReadSimSpec {
                genome_length: a.genome_length,
                read_length: a.read_length,
                coverage: a.coverage,
                error_rate: a.error_rate,
                seed: a.seed,
            })?;
            let mut path = a.output_prefix.as_os_str().to_owned();
            path.push(".fasta");
            let path = PathBuf::from(path);
            let lines = sim.reads.iter().enumerate().flat_map(|(i, r)| {
                [
                    format!(">read{i} pos={}", sim.positions[i]).into_bytes(),
                    r.clone(),
                ]
            });
            write_file(&path, |f| write_lines(f, lines))?;
            eprintln!(
                "wrote {} reads ({} substitutions) to {}",
                sim.reads.len(),
                sim.substitutions,
                path.display()
            );
        }
    }
    Ok(Outcome::Success)
}

fn parse_r_list(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .with_context(|| format!("bad range {s:?}"))?;
        let (start, step, end) = (nums[0], nums[1], nums[2]);
        if !(step > 0.0) || end < start {
            bail!("bad range {s:?}");
        }
        let n = ((end - start) / step + 1e-9).floor() as usize;
        return Ok((0..=n)
            .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
            .collect());
    }
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .with_context(|| format!("bad ratio {p:?}"))
        })
        .collect()
}

fn report_sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn cmd_sweep(a: SweepArgs) -> Result<Outcome> {
    let rs = parse_r_list(&a.r_list)?;
    let options = SweepOptions {
        mode: a.mode,
        record_time: !a.no_timing,
    };
    let res = sweep(a.k, &rs, a.multiplicity, a.seed, &options)?;
    let mut out = report_sink(&a.output)?;
    match a.report {
        ReportFormat::Csv => res.write_csv(&mut out)?,
        ReportFormat::Text => {
            writeln!(out, "{:>6} {:>10} {:>9} {:>10} {:>10} {:>8} {:>12}", "r", "kmers", "strings", "weight_M", "weight_W", "cmpr", "core_time_s")?;
            for row in &res.rows {
                writeln!(
                    out,
                    "{:>6.3} {:>10} {:>9} {:>10} {:>10} {:>8.4} {:>12.6}",
                    row.r,
                    row.kmer_total,
                    row.string_count,
                    row.weight_m,
                    row.weight_w,
                    row.cmpr,
                    row.core_time_s
                )?;
            }
            writeln!(out, "spearman(r, cmpr) = {:.4}; bound k+1 = {}", res.spearman(), a.k + 1)?;
        }
    }
    out.flush()?;
    if let Some(svg) = &a.svg {
        fs::write(svg, res.to_svg()).with_context(|| format!("writing {}", svg.display()))?;
    }
    Ok(Outcome::Success)
}

fn cmd_bench(a: BenchArgs) -> Result<Outcome> {
    let alphabet = Alphabet::dna();
    let mut report = BenchReport::default();
    let mut datasets: Vec<(String, Vec<u8>, SeqFormat)> = Vec::new();
    if a.input.is_empty() {
        let sim = noisy_reads(&ReadSimSpec {
            genome_length: 100_000,
            read_length: 100,
            coverage: 5.0,
            error_rate: 0.01,
            seed: a.seed,
        })?;
        datasets.push(("simulated".into(), sim.reads.join(&b'\n'), SeqFormat::Reads));
    } else {
        for p in &a.input {
            let bytes = fs::read(p).with_context(|| format!("reading {}", p.display()))?;
            let format = a
                .format
                .or_else(|| SeqFormat::from_path(p))
                .unwrap_or(SeqFormat::Reads);
            let name = p.file_name().map_or_else(
                || p.display().to_string(),
                |n| n.to_string_lossy().into_owned(),
            );
            datasets.push((name, bytes, format));
        }
    }
    for (name, bytes, format) in &datasets {
        for &k in &a.k {
            let (m, _) = kcover_core::io::ingest_reader(&bytes[..], *format, k, &alphabet)
                .with_context(|| format!("{name} at k = {k}"))?;
            let (rows, reads) = bench_dataset(name, &m, k, a.mode, &alphabet)?;
            report.rows.extend(rows);
            report.input_bytes.push((name.clone(), k, reads));
        }
    }
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match a.report {
        ReportFormat::Csv => report.write_csv(&mut out)?,
        ReportFormat::Text => out.write_all(report.to_text().as_bytes())?,
    }
    Ok(Outcome::Success)
}

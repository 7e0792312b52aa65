//! `wordvecs`: sniff, convert, inspect, query and benchmark embedding files.
//!
//! Exit codes: 0 success, 1 I/O, parse or usage error, 2 unknown format,
//! 3 duplicate word under `--dedup error`, 4 requested word missing.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use wordvecs::bench::time_reads;
use wordvecs::legacy::format_f32;
use wordvecs::stats::{summarize_timings, DEFAULT_ALPHA};
use wordvecs::vector_io::{self, count_glove_records, SizeVerdict};
use wordvecs::{
    welch_t_test, DedupPolicy, Error, ErrorKind, FormatKind, Position, ReadOptions, Similarity,
};

#[derive(Parser)]
#[command(
    name = "wordvecs",
    version,
    about = "Read, convert and inspect word-embedding files"
)]
struct Cli {
    /// Emit one JSON object on stdout instead of plain text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect a file's format from its leading bytes.
    Sniff {
        file: PathBuf,
        /// Count GloVe lines to report the vocabulary size.
        #[arg(long)]
        count: bool,
    },
    /// Rewrite a file in another format.
    Convert {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, value_parser = parse_format)]
        to: FormatKind,
        #[command(flatten)]
        read: ReadArgs,
        #[arg(long, default_value = "first", value_parser = parse_dedup)]
        dedup: DedupPolicy,
        /// Keep only the words listed in this file (one per line).
        #[arg(long)]
        filter_vocab: Option<PathBuf>,
    },
    /// Show header values, the size check and the first words.
    Inspect {
        file: PathBuf,
        #[arg(long, default_value_t = 10)]
        head: usize,
        #[command(flatten)]
        read: ReadArgs,
    },
    /// Print the vectors of the given words.
    Vector {
        file: PathBuf,
        #[arg(required = true)]
        words: Vec<String>,
        #[command(flatten)]
        read: ReadArgs,
    },
    /// Cosine similarity of two words, or the nearest neighbours of one.
    Similar {
        file: PathBuf,
        #[arg(required = true, num_args = 1..=2)]
        words: Vec<String>,
        /// Print the K nearest words by cosine instead of a pairwise score.
        #[arg(long)]
        top_k: Option<usize>,
        /// Use the raw inner product for pairwise scores.
        #[arg(long)]
        dot: bool,
        #[command(flatten)]
        read: ReadArgs,
    },
    /// Time full reads of each file, optionally comparing them pairwise.
    Bench {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        /// Shell command run before every read to reset the page cache.
        #[arg(long)]
        drop_caches: Option<String>,
        /// Run pairwise Welch t-tests and flag significantly fastest files.
        #[arg(long)]
        compare: bool,
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
    },
}

#[derive(Args)]
struct ReadArgs {
    /// Input format, or "auto" to sniff.
    #[arg(long, default_value = "auto", value_parser = parse_from)]
    from: InputFormat,
}

/// `--from` value; `None` means sniff.
#[derive(Clone, Copy)]
struct InputFormat(Option<FormatKind>);

fn parse_format(s: &str) -> Result<FormatKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_from(s: &str) -> Result<InputFormat, String> {
    if s == "auto" {
        Ok(InputFormat(None))
    } else {
        parse_format(s).map(|k| InputFormat(Some(k)))
    }
}

fn parse_dedup(s: &str) -> Result<DedupPolicy, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wordvecs: {e}");
            ExitCode::from(exit_code(e.kind()))
        }
    }
}

fn exit_code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::UnknownFormat => 2,
        ErrorKind::DuplicateWord => 3,
        ErrorKind::MissingWord => 4,
        ErrorKind::Truncated
        | ErrorKind::BadMagic
        | ErrorKind::DimensionMismatch
        | ErrorKind::InvalidUtf8
        | ErrorKind::HeaderMismatch
        | ErrorKind::Domain
        | ErrorKind::Io => 1,
    }
}

fn run(cli: Cli) -> wordvecs::Result<()> {
    let json = cli.json;
    match cli.command {
        Command::Sniff { file, count } => cmd_sniff(&file, count, json),
        Command::Convert {
            input,
            output,
            to,
            read,
            dedup,
            filter_vocab,
        } => {
            let mut opts = ReadOptions::default().with_dedup(dedup);
            if let Some(path) = filter_vocab {
                opts.filter = Some(read_vocab(&path)?);
            }
            let stats = vector_io::convert_path(&input, &output, to, &opts, read.from.0)?;
            if !stats.missing.is_empty() {
                eprintln!(
                    "wordvecs: {} filter word(s) not found in {}",
                    stats.missing.len(),
                    input.display()
                );
            }
            if json {
                print_json(json!({
                    "format": stats.from.name(),
                    "to": stats.to.name(),
                    "vocab": stats.records_written,
                    "dim": stats.dim,
                    "stats": stats,
                }));
            } else {
                println!(
                    "from={} to={} records_read={} records_written={} duplicates_resolved={} filtered_out={} bytes_written={} elapsed={:.3}",
                    stats.from,
                    stats.to,
                    stats.records_read,
                    stats.records_written,
                    stats.duplicates_resolved,
                    stats.filtered_out,
                    stats.bytes_written,
                    stats.elapsed
                );
            }
            Ok(())
        }
        Command::Inspect { file, head, read } => {
            let report = vector_io::inspect(open(&file)?, read.from.0, head)?;
            if json {
                print_json(json!(report));
            } else {
                println!(
                    "format={} vocab={} dim={} file_size={} expected_size={} verdict={}",
                    report.format,
                    opt(report.vocab),
                    report.dim,
                    report.file_size,
                    opt(report.expected_size),
                    match report.verdict {
                        SizeVerdict::Match => "match",
                        SizeVerdict::Mismatch => "mismatch",
                    }
                );
                for w in &report.head {
                    println!("{w}");
                }
            }
            Ok(())
        }
        Command::Vector { file, words, read } => {
            let emb = vector_io::read_path(&file, &ReadOptions::default(), read.from.0)?.embeddings;
            let rows = words
                .iter()
                .map(|w| emb.lookup(w).ok_or_else(|| missing(w)))
                .collect::<wordvecs::Result<Vec<_>>>()?;
            if json {
                let map: serde_json::Map<_, _> = words
                    .iter()
                    .zip(&rows)
                    .map(|(w, v)| (w.clone(), json!(v)))
                    .collect();
                print_json(json!({ "dim": emb.dim(), "vectors": map }));
            } else {
                for (w, v) in words.iter().zip(rows) {
                    let vals: Vec<String> = v.iter().map(|&x| format_f32(x)).collect();
                    println!("{w} {}", vals.join(" "));
                }
            }
            Ok(())
        }
        Command::Similar {
            file,
            words,
            top_k,
            dot,
            read,
        } => {
            let emb = vector_io::read_path(&file, &ReadOptions::default(), read.from.0)?.embeddings;
            match (top_k, words.as_slice()) {
                (Some(k), [word]) => {
                    let top = emb.most_similar(word, k)?;
                    if json {
                        let list: Vec<_> = top
                            .iter()
                            .map(|(w, s)| json!({"word": w, "cosine": s}))
                            .collect();
                        print_json(json!({ "query": word, "neighbours": list }));
                    } else {
                        for (w, s) in top {
                            println!("{w}\t{s}");
                        }
                    }
                }
                (None, [w1, w2]) => {
                    let mode = if dot {
                        Similarity::Dot
                    } else {
                        Similarity::Cosine
                    };
                    let s = emb.similarity(w1, w2, mode)?;
                    if json {
                        print_json(
                            json!({ "a": w1, "b": w2, "mode": if dot { "dot" } else { "cosine" }, "value": s }),
                        );
                    } else {
                        println!("{s}");
                    }
                }
                _ => {
                    return Err(Error::Domain {
                        at: Position::Input,
                        msg: "give two words, or one word with --top-k".into(),
                    })
                }
            }
            Ok(())
        }
        Command::Bench {
            files,
            reps,
            drop_caches,
            compare,
            alpha,
        } => cmd_bench(&files, reps, drop_caches.as_deref(), compare, alpha, json),
    }
}

fn cmd_sniff(file: &Path, count: bool, json: bool) -> wordvecs::Result<()> {
    let mut f = open(file)?;
    let mut report = wordvecs::sniff(&mut f)?;
    if count && report.vocab_size.is_none() {
        report.vocab_size = Some(count_glove_records(f)?);
    }
    if json {
        print_json(json!(report));
    } else {
        println!(
            "format={} vocab={} dim={}",
            report.kind,
            opt(report.vocab_size),
            opt(report.vector_size)
        );
    }
    Ok(())
}

fn cmd_bench(
    files: &[PathBuf],
    reps: usize,
    drop_caches: Option<&str>,
    compare: bool,
    alpha: f64,
    json: bool,
) -> wordvecs::Result<()> {
    let cache = if drop_caches.is_some() {
        "cold"
    } else {
        "warm"
    };
    let mut rows = Vec::new();
    for file in files {
        let kind = wordvecs::sniff(&mut open(file)?)?.kind;
        let samples = time_reads(file, kind, reps, drop_caches)?;
        let summary = summarize_timings(&samples)?;
        let secs: Vec<f64> = samples.iter().map(|s| s.seconds).collect();
        rows.push((file, kind, summary, secs));
    }

    let mut comparisons = Vec::new();
    let mut fastest = vec![compare && rows.len() > 1; rows.len()];
    if compare {
        for i in 0..rows.len() {
            for j in i + 1..rows.len() {
                let r = welch_t_test(&rows[i].3, &rows[j].3, alpha)?;
                // row i stays a candidate only if it is significantly faster than j
                let i_faster = r.significant && rows[i].2.mean < rows[j].2.mean;
                let j_faster = r.significant && rows[j].2.mean < rows[i].2.mean;
                fastest[i] &= i_faster;
                fastest[j] &= j_faster;
                comparisons.push((i, j, r));
            }
        }
    }

    if json {
        let results: Vec<_> = rows
            .iter()
            .zip(&fastest)
            .map(|((file, kind, s, secs), f)| {
                json!({
                    "file": file.display().to_string(),
                    "format": kind.name(),
                    "stats": s,
                    "samples": secs,
                    "significantly_fastest": f,
                })
            })
            .collect();
        let cmps: Vec<_> = comparisons
            .iter()
            .map(|(i, j, r)| json!({"a": rows[*i].0.display().to_string(), "b": rows[*j].0.display().to_string(), "welch": r}))
            .collect();
        print_json(
            json!({ "cache": cache, "reps": reps, "alpha": alpha, "results": results, "comparisons": cmps }),
        );
        return Ok(());
    }

    println!("# cache={cache} reps={reps} unit=seconds");
    for ((file, kind, s, _), f) in rows.iter().zip(&fastest) {
        println!(
            "{}\t{}\tmean={:.6}\tstd={:.6}{}",
            file.display(),
            kind,
            s.mean,
            s.std,
            if *f { "\t*" } else { "" }
        );
    }
    for (i, j, r) in &comparisons {
        println!(
            "# {} vs {}: t={:.4} df={:.2} p={:.4} {}",
            rows[*i].0.display(),
            rows[*j].0.display(),
            r.t,
            r.df,
            r.p,
            if r.significant {
                "significant"
            } else {
                "not significant"
            }
        );
    }
    Ok(())
}

/// One word per 0x0A-terminated line, byte-exact; empty lines are skipped.
fn read_vocab(path: &Path) -> wordvecs::Result<HashSet<String>> {
    let bytes = fs::read(path).map_err(|e| Error::Io {
        at: Position::Input,
        source: std::io::Error::new(e.kind(), format!("{}: {e}", path.display())),
    })?;
    bytes
        .split(|&b| b == b'\n')
        .enumerate()
        .filter(|(_, line)| !line.is_empty())
        .map(|(i, line)| {
            String::from_utf8(line.to_vec()).map_err(|_| Error::InvalidUtf8 {
                at: Position::Line(i as u64 + 1),
            })
        })
        .collect()
}

fn open(path: &Path) -> wordvecs::Result<fs::File> {
    fs::File::open(path).map_err(|e| Error::Io {
        at: Position::Input,
        source: std::io::Error::new(e.kind(), format!("{}: {e}", path.display())),
    })
}

fn missing(word: &str) -> Error {
    Error::MissingWord {
        at: Position::Input,
        word: word.to_owned(),
    }
}

fn opt(v: Option<u64>) -> String {
    v.map_or_else(|| "unknown".to_owned(), |v| v.to_string())
}

fn print_json(v: serde_json::Value) {
    println!("{v}");
}

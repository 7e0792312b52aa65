//! Format-independent entry points: sniff, read, write, convert, inspect.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Read, Seek, SeekFrom, Write};
use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use crate::collect::{ReadCounts, ReadOutcome};
use crate::error::{Error, Position, Result};
use crate::leader::{self, HEADER_LEN};
use crate::legacy::{self, split_record, strip_line_end, W2VTextHeader};
use crate::model::{Embeddings, FormatKind, ReadOptions};
use crate::sniff::{self, ser_kind, SniffReport};
use crate::source::Source;

/// Buffer size used for file-backed reads and writes.
pub const IO_BUFFER: usize = 1 << 20;

/// Result of [`read_any`].
#[derive(Debug, Clone)]
pub struct ReadResult {
    pub embeddings: Embeddings,
    pub report: SniffReport,
    /// Filter words absent from the file, sorted.
    pub missing: Vec<String>,
    pub counts: ReadCounts,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvertStats {
    #[serde(serialize_with = "ser_kind")]
    pub from: FormatKind,
    #[serde(serialize_with = "ser_kind")]
    pub to: FormatKind,
    pub dim: usize,
    pub records_read: u64,
    pub records_written: u64,
    pub duplicates_resolved: u64,
    pub filtered_out: u64,
    pub bytes_written: u64,
    /// Wall-clock seconds.
    pub elapsed: f64,
    pub missing: Vec<String>,
}

/// Read a stream whose format is already known.
pub fn read_format<R: BufRead>(
    reader: R,
    format: FormatKind,
    opts: &ReadOptions,
) -> Result<ReadOutcome> {
    match format {
        FormatKind::Leader => leader::read_leader_with(reader, opts),
        FormatKind::W2VBinary => legacy::read_w2v_binary_with(reader, opts),
        FormatKind::W2VText => legacy::read_w2v_text_with(reader, opts),
        FormatKind::GloveText => legacy::read_glove_text_with(reader, opts),
    }
}

/// Write `emb` in `format`, returning the byte count.
pub fn write_format<W: Write>(emb: &Embeddings, format: FormatKind, out: W) -> Result<u64> {
    match format {
        FormatKind::Leader => leader::write_leader(emb, out),
        FormatKind::W2VBinary => legacy::write_w2v_binary(emb, out),
        FormatKind::W2VText => legacy::write_w2v_text(emb, out),
        FormatKind::GloveText => legacy::write_glove_text(emb, out),
    }
}

/// Sniff (unless `format` is given) and read.
pub fn read_any<R: Read + Seek>(
    mut stream: R,
    opts: &ReadOptions,
    format: Option<FormatKind>,
) -> Result<ReadResult> {
    let sniffed = match format {
        Some(_) => {
            stream
                .seek(SeekFrom::Start(0))
                .map_err(|e| Error::io(Position::Byte(0), e))?;
            None
        }
        None => Some(sniff::sniff(&mut stream)?),
    };
    let kind = format.or(sniffed.map(|r| r.kind)).unwrap();
    let out = read_format(BufReader::with_capacity(IO_BUFFER, stream), kind, opts)?;
    let report = sniffed.unwrap_or(SniffReport {
        kind,
        vocab_size: (kind != FormatKind::GloveText).then_some(out.counts.records_read),
        vector_size: Some(out.embeddings.dim() as u64),
    });
    Ok(ReadResult {
        embeddings: out.embeddings,
        report,
        missing: out.missing,
        counts: out.counts,
    })
}

pub fn read_path(
    path: impl AsRef<Path>,
    opts: &ReadOptions,
    format: Option<FormatKind>,
) -> Result<ReadResult> {
    read_any(open(path.as_ref())?, opts, format)
}

pub fn write_path(emb: &Embeddings, path: impl AsRef<Path>, format: FormatKind) -> Result<u64> {
    legacy::check_words_for(emb, format)?;
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(Position::Byte(0), e))?;
    let res = write_format(emb, format, BufWriter::with_capacity(IO_BUFFER, file));
    if res.is_err() {
        let _ = fs::remove_file(path);
    }
    res
}

/// Read `input` and write it to `output` as `to`.
///
/// Every word is checked against the target format before the first byte
/// is written, so a rejected conversion leaves `output` untouched.
pub fn convert<R: Read + Seek, W: Write>(
    input: R,
    output: W,
    to: FormatKind,
    opts: &ReadOptions,
    from: Option<FormatKind>,
) -> Result<ConvertStats> {
    let start = Instant::now();
    let read = read_any(input, opts, from)?;
    legacy::check_words_for(&read.embeddings, to)?;
    let bytes_written = write_format(&read.embeddings, to, output)?;
    Ok(ConvertStats {
        from: read.report.kind,
        to,
        dim: read.embeddings.dim(),
        records_read: read.counts.records_read,
        records_written: read.embeddings.len() as u64,
        duplicates_resolved: read.counts.duplicates_resolved,
        filtered_out: read.counts.filtered_out,
        bytes_written,
        elapsed: start.elapsed().as_secs_f64(),
        missing: read.missing,
    })
}

/// File-to-file [`convert`]. A partially written output file is removed on failure.
pub fn convert_path(
    input: impl AsRef<Path>,
    output: impl AsRef<Path>,
    to: FormatKind,
    opts: &ReadOptions,
    from: Option<FormatKind>,
) -> Result<ConvertStats> {
    let input = open(input.as_ref())?;
    let output = output.as_ref();
    let file = File::create(output).map_err(|e| Error::io(Position::Byte(0), e))?;
    let res = convert(
        input,
        BufWriter::with_capacity(IO_BUFFER, file),
        to,
        opts,
        from,
    );
    if res.is_err() {
        let _ = fs::remove_file(output);
    }
    res
}

pub(crate) fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| {
        Error::io(
            Position::Input,
            std::io::Error::new(e.kind(), format!("{}: {e}", path.display())),
        )
    })
}

/// Number of records in a GloVe file (non-empty lines), for `wc -l`-style counts.
pub fn count_glove_records<R: Read>(reader: R) -> Result<u64> {
    let mut src = Source::new(BufReader::with_capacity(IO_BUFFER, reader));
    let mut line = Vec::new();
    let mut n = 0;
    loop {
        line.clear();
        let more = src.read_until(b'\n', &mut line)?;
        if !strip_line_end(&line).is_empty() {
            n += 1;
        }
        if !more {
            return Ok(n);
        }
    }
}

/// Outcome of comparing a file's length with what its structure predicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SizeVerdict {
    Match,
    Mismatch,
}

#[derive(Debug, Clone, Serialize)]
pub struct InspectReport {
    #[serde(serialize_with = "ser_kind")]
    pub format: FormatKind,
    pub vocab: Option<u64>,
    pub dim: u64,
    pub file_size: u64,
    /// Predicted length from the format's size law. `None` for text formats
    /// and for binary files too damaged to walk.
    pub expected_size: Option<u64>,
    /// Records whose framing was found in the file.
    pub records_found: u64,
    /// 0x0A/0x20 bytes between word2vec binary records (0 when written by this crate).
    pub separator_bytes: u64,
    pub verdict: SizeVerdict,
    pub head: Vec<String>,
}

/// Describe a file without materializing vectors: header values, the
/// structural size check, and the first `head` words.
///
/// Binary formats are checked against their size law (Leader: 24 + Σ(4 +
/// |w| + 4d); word2vec binary: H + Σ(|w| + 1 + 4d), plus any separator
/// bytes found between records). Text formats are checked by record count.
pub fn inspect<R: Read + Seek>(
    mut stream: R,
    format: Option<FormatKind>,
    head: usize,
) -> Result<InspectReport> {
    let file_size = stream
        .seek(SeekFrom::End(0))
        .map_err(|e| Error::io(Position::Input, e))?;
    let kind = match format {
        Some(k) => k,
        None => sniff::sniff(&mut stream)?.kind,
    };
    stream
        .seek(SeekFrom::Start(0))
        .map_err(|e| Error::io(Position::Byte(0), e))?;
    let reader = BufReader::with_capacity(IO_BUFFER, stream);
    let mut report = InspectReport {
        format: kind,
        vocab: None,
        dim: 0,
        file_size,
        expected_size: None,
        records_found: 0,
        separator_bytes: 0,
        verdict: SizeVerdict::Mismatch,
        head: Vec::new(),
    };
    match kind {
        FormatKind::Leader => inspect_leader(reader, head, &mut report)?,
        FormatKind::W2VBinary => inspect_w2v_binary(reader, head, &mut report)?,
        FormatKind::W2VText | FormatKind::GloveText => {
            inspect_text(reader, kind, head, &mut report)?
        }
    }
    Ok(report)
}

fn inspect_leader<R: BufRead>(
    mut reader: R,
    head: usize,
    report: &mut InspectReport,
) -> Result<()> {
    let header = leader::read_leader_header(&mut reader)?;
    report.vocab = Some(header.vocab_size);
    report.dim = header.vector_size;
    let mut src = Source::starting_at(reader, HEADER_LEN);
    let mut expected = HEADER_LEN;
    let mut complete = true;
    let mut word = Vec::new();
    for i in 0..header.vocab_size {
        let mut len = [0u8; 4];
        if src.read_exact(&mut len, "word length").is_err() {
            complete = false;
            break;
        }
        let len = u32::from_le_bytes(len) as u64;
        expected += 4 + len + 4 * header.vector_size;
        if (i as usize) < head {
            if src.read_vec(len as usize, &mut word, "word").is_err() {
                break;
            }
            report
                .head
                .push(String::from_utf8_lossy(&word).into_owned());
        } else if src.skip(len, "word").is_err() {
            break;
        }
        if src.skip(4 * header.vector_size, "vector").is_err() {
            break;
        }
        report.records_found += 1;
    }
    report.expected_size = complete.then_some(expected);
    report.verdict = verdict(complete && expected == report.file_size);
    Ok(())
}

fn inspect_w2v_binary<R: BufRead>(
    reader: R,
    head: usize,
    report: &mut InspectReport,
) -> Result<()> {
    let mut src = Source::new(reader);
    let header = legacy_header(&mut src)?;
    report.vocab = Some(header.vocab_size);
    report.dim = header.vector_size;
    let mut expected = header.byte_len();
    let mut complete = true;
    let mut word = Vec::new();
    for i in 0..header.vocab_size {
        report.separator_bytes += src.skip_while(|b| b == b'\n' || b == b' ')?;
        word.clear();
        if !src.read_until(b' ', &mut word)? {
            complete = false;
            break;
        }
        expected += word.len() as u64 + 1 + 4 * header.vector_size;
        if (i as usize) < head {
            report
                .head
                .push(String::from_utf8_lossy(&word).into_owned());
        }
        if src.skip(4 * header.vector_size, "vector").is_err() {
            break;
        }
        report.records_found += 1;
    }
    if complete {
        report.separator_bytes += src.skip_while(|b| b == b'\n')?;
        expected += report.separator_bytes;
    }
    report.expected_size = complete.then_some(expected);
    report.verdict = verdict(complete && expected == report.file_size);
    Ok(())
}

fn inspect_text<R: BufRead>(
    reader: R,
    kind: FormatKind,
    head: usize,
    report: &mut InspectReport,
) -> Result<()> {
    let mut src = Source::new(reader);
    let mut line = Vec::new();
    let mut declared = None;
    if kind == FormatKind::W2VText {
        let header = legacy_header(&mut src)?;
        declared = Some(header.vocab_size);
        report.dim = header.vector_size;
    }
    loop {
        line.clear();
        let more = src.read_until(b'\n', &mut line)?;
        let rec = strip_line_end(&line);
        if !rec.is_empty() {
            if report.dim == 0 {
                report.dim = rec.iter().filter(|&&b| b == b' ').count() as u64;
            }
            if (report.records_found as usize) < head {
                let word = split_record(rec, report.dim as usize).map_or(rec, |(w, _)| w);
                report.head.push(String::from_utf8_lossy(word).into_owned());
            }
            report.records_found += 1;
        }
        if !more {
            break;
        }
    }
    report.vocab = Some(declared.unwrap_or(report.records_found));
    report.verdict = verdict(declared.is_none_or(|n| n == report.records_found));
    Ok(())
}

fn legacy_header<R: BufRead>(src: &mut Source<R>) -> Result<W2VTextHeader> {
    let mut line = Vec::new();
    src.read_until(b'\n', &mut line)?;
    W2VTextHeader::parse(&line)
        .ok_or_else(|| Error::header(Position::Line(1), "expected \"<vocab> <dim>\" header"))
}

fn verdict(ok: bool) -> SizeVerdict {
    if ok {
        SizeVerdict::Match
    } else {
        SizeVerdict::Mismatch
    }
}

/// Header-derived Leader size for a table, without writing it.
pub fn leader_size_of(emb: &Embeddings) -> u64 {
    leader::expected_leader_size(emb.words().map(|w| w.len() as u64), emb.dim() as u64)
}

/// Size law for word2vec binary as written by this crate.
pub fn w2v_binary_size_of(emb: &Embeddings) -> u64 {
    legacy::expected_w2v_binary_size(
        emb.words().map(|w| w.len() as u64),
        emb.len() as u64,
        emb.dim() as u64,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::ErrorKind;
    use crate::model::{build_embeddings, DedupPolicy};
    use std::io::Cursor;

    fn fixture() -> Embeddings {
        build_embeddings(
            [("a", [1.0f32, 2.0, 3.0]), ("bc", [4.0, 5.0, 6.0])],
            3,
            DedupPolicy::FirstWins,
        )
        .unwrap()
    }

    fn bytes(format: FormatKind) -> Vec<u8> {
        let mut out = Vec::new();
        write_format(&fixture(), format, &mut out).unwrap();
        out
    }

    #[test]
    fn read_any_dispatches_each_format() {
        for f in FormatKind::ALL {
            let r = read_any(Cursor::new(bytes(f)), &ReadOptions::default(), None).unwrap();
            assert_eq!(r.report.kind, f);
            assert_eq!(r.embeddings, fixture());
        }
    }

    #[test]
    fn read_any_filter_and_garbage() {
        let opts = ReadOptions::default().with_filter(["a", "zz"]);
        let r = read_any(Cursor::new(bytes(FormatKind::GloveText)), &opts, None).unwrap();
        assert_eq!(r.embeddings.len(), 1);
        assert_eq!(r.missing, ["zz"]);

        let err = read_any(
            Cursor::new(vec![0xde, 0xad, 0xbe, 0xef]),
            &ReadOptions::default(),
            None,
        )
        .unwrap_err();
        assert_eq!(err.kind(), ErrorKind::UnknownFormat);
    }

    #[test]
    fn convert_rejects_unsafe_word_before_writing() {
        let e = build_embeddings(
            [("ok", [1.0f32]), ("b c", [2.0])],
            1,
            DedupPolicy::FirstWins,
        )
        .unwrap();
        let mut leader = Vec::new();
        write_format(&e, FormatKind::Leader, &mut leader).unwrap();
        let mut out = Vec::new();
        let err = convert(
            Cursor::new(leader),
            &mut out,
            FormatKind::GloveText,
            &ReadOptions::default(),
            None,
        )
        .unwrap_err();
        assert_eq!(err.kind(), ErrorKind::Domain);
        assert!(err.to_string().contains("\"b c\""));
        assert!(err.to_string().contains("index 1"));
        assert!(out.is_empty());
    }

    #[test]
    fn convert_stats_arithmetic() {
        let text = b"a 1\nb 2\na 3\nc 4\n";
        let opts = ReadOptions::default().with_filter(["a", "q"]);
        let mut out = Vec::new();
        let s = convert(
            Cursor::new(&text[..]),
            &mut out,
            FormatKind::Leader,
            &opts,
            None,
        )
        .unwrap();
        assert_eq!(s.records_read, 4);
        assert_eq!(s.records_written, 1);
        assert_eq!(s.duplicates_resolved, 1);
        assert_eq!(s.filtered_out, 2);
        assert_eq!(
            s.records_written,
            s.records_read - s.duplicates_resolved - s.filtered_out
        );
        assert_eq!(s.bytes_written, out.len() as u64);
        assert_eq!(s.missing, ["q"]);
    }

    #[test]
    fn inspect_binary_size_laws() {
        let r = inspect(Cursor::new(bytes(FormatKind::Leader)), None, 5).unwrap();
        assert_eq!((r.file_size, r.expected_size), (59, Some(59)));
        assert_eq!(r.verdict, SizeVerdict::Match);
        assert_eq!(r.head, ["a", "bc"]);

        let mut cut = bytes(FormatKind::Leader);
        cut.pop();
        let r = inspect(Cursor::new(cut), None, 1).unwrap();
        assert_eq!(r.file_size, 58);
        assert_eq!(r.expected_size, Some(59));
        assert_eq!(r.verdict, SizeVerdict::Mismatch);

        let r = inspect(Cursor::new(bytes(FormatKind::W2VBinary)), None, 1).unwrap();
        assert_eq!((r.file_size, r.expected_size), (33, Some(33)));
        assert_eq!(r.verdict, SizeVerdict::Match);
        assert_eq!(r.head, ["a"]);
    }

    #[test]
    fn inspect_text_counts() {
        let r = inspect(Cursor::new(bytes(FormatKind::GloveText)), None, 1).unwrap();
        assert_eq!((r.vocab, r.dim), (Some(2), 3));
        assert_eq!(r.head, ["a"]);
        let r = inspect(Cursor::new(b"3 3\na 1 2 3\n".to_vec()), None, 0).unwrap();
        assert_eq!(r.verdict, SizeVerdict::Mismatch);
    }

    #[test]
    fn glove_line_count() {
        assert_eq!(count_glove_records(&b"a 1\nb 2\n"[..]).unwrap(), 2);
        assert_eq!(count_glove_records(&b"a 1\nb 2"[..]).unwrap(), 2);
    }
}

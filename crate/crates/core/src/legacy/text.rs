use std::io::{BufRead, Write};

use super::{check_words_for, parse_fields, push_f32, split_record, strip_line_end, W2VTextHeader};
use crate::collect::{Admit, Collector, ReadOutcome};
use crate::error::{Error, Position, Result};
use crate::model::{Embeddings, FormatKind, ReadOptions};
use crate::source::Source;

pub fn read_glove_text<R: BufRead>(reader: R, opts: &ReadOptions) -> Result<Embeddings> {
    read_glove_text_with(reader, opts).map(|o| o.embeddings)
}

/// Read a headerless GloVe file. The vector size is the number of 0x20
/// bytes on the first line.
pub fn read_glove_text_with<R: BufRead>(reader: R, opts: &ReadOptions) -> Result<ReadOutcome> {
    let mut src = Source::new(reader);
    if src.at_eof()? {
        return Err(Error::truncated(Position::Byte(0), "empty GloVe file"));
    }
    let mut line = Vec::new();
    src.read_until(b'\n', &mut line)?;
    let dim = strip_line_end(&line).iter().filter(|&&b| b == b' ').count();
    if dim == 0 {
        return Err(Error::dimension(
            Position::Line(1),
            "first line holds no vector values",
        ));
    }
    let mut collector = Collector::new(opts, dim, None)?;
    text_record(&mut collector, &line, 1)?;

    let mut lineno = 1;
    loop {
        line.clear();
        if !src.read_until(b'\n', &mut line)? && line.is_empty() {
            break;
        }
        lineno += 1;
        text_record(&mut collector, &line, lineno)?;
    }
    Ok(collector.finish())
}

pub fn read_w2v_text<R: BufRead>(reader: R, opts: &ReadOptions) -> Result<Embeddings> {
    read_w2v_text_with(reader, opts).map(|o| o.embeddings)
}

/// Read a word2vec text file: a `"<vocab> <dim>"` line, then exactly
/// `vocab` GloVe-style lines.
pub fn read_w2v_text_with<R: BufRead>(reader: R, opts: &ReadOptions) -> Result<ReadOutcome> {
    let mut src = Source::new(reader);
    let header = read_w2v_header(&mut src)?;
    let dim = header.vector_size as usize;
    let mut collector = Collector::new(opts, dim, Some(header.vocab_size))?;

    let mut line = Vec::new();
    for i in 0..header.vocab_size {
        let lineno = i + 2;
        line.clear();
        if !src.read_until(b'\n', &mut line)? && line.is_empty() {
            return Err(Error::header(
                Position::Line(lineno),
                format!("header declares {} records, found {i}", header.vocab_size),
            ));
        }
        text_record(&mut collector, &line, lineno)?;
    }
    if !src.at_eof()? {
        return Err(Error::header(
            Position::Line(header.vocab_size + 2),
            format!("header declares {} records, found more", header.vocab_size),
        ));
    }
    Ok(collector.finish())
}

pub(crate) fn read_w2v_header<R: BufRead>(src: &mut Source<R>) -> Result<W2VTextHeader> {
    if src.at_eof()? {
        return Err(Error::truncated(Position::Byte(0), "empty word2vec file"));
    }
    let mut line = Vec::new();
    src.read_until(b'\n', &mut line)?;
    let header = W2VTextHeader::parse(&line).ok_or_else(|| {
        Error::header(
            Position::Line(1),
            format!(
                "expected \"<vocab> <dim>\", found {:?}",
                String::from_utf8_lossy(&line)
            ),
        )
    })?;
    if header.vector_size == 0 {
        return Err(Error::header(Position::Line(1), "vector size is 0"));
    }
    if usize::try_from(header.vector_size).is_err() {
        return Err(Error::header(
            Position::Line(1),
            "vector size does not fit in memory",
        ));
    }
    Ok(header)
}

fn text_record(collector: &mut Collector<'_>, line: &[u8], lineno: u64) -> Result<()> {
    let at = Position::Line(lineno);
    let dim = collector.dim();
    let line = strip_line_end(line);
    let (word, fields) = split_record(line, dim)
        .ok_or_else(|| Error::dimension(at, format!("expected a word followed by {dim} values")))?;
    if let Admit::Row(row) = collector.admit(word, at)? {
        if !parse_fields(fields, collector.row_mut(row)) {
            return Err(Error::dimension(
                at,
                format!("expected {dim} numeric values"),
            ));
        }
    }
    Ok(())
}

/// Write one `word v1 ... vd` line per row. Words must be non-empty and free
/// of 0x20, 0x0A and 0x0D.
pub fn write_glove_text<W: Write>(emb: &Embeddings, out: W) -> Result<u64> {
    check_words_for(emb, FormatKind::GloveText)?;
    write_text_body(emb, out, 0)
}

/// Like [`write_glove_text`], preceded by the `"<vocab> <dim>"` header line.
pub fn write_w2v_text<W: Write>(emb: &Embeddings, mut out: W) -> Result<u64> {
    check_words_for(emb, FormatKind::W2VText)?;
    let header = W2VTextHeader {
        vocab_size: emb.len() as u64,
        vector_size: emb.dim() as u64,
    }
    .render();
    out.write_all(header.as_bytes())
        .map_err(|e| Error::io(Position::Byte(0), e))?;
    write_text_body(emb, out, header.len() as u64)
}

fn write_text_body<W: Write>(emb: &Embeddings, mut out: W, mut written: u64) -> Result<u64> {
    let mut line = Vec::new();
    let mut fmt = ryu::Buffer::new();
    for (word, vector) in emb.iter() {
        line.clear();
        line.extend_from_slice(word.as_bytes());
        for &v in vector {
            line.push(b' ');
            push_f32(&mut line, v, &mut fmt);
        }
        line.push(b'\n');
        out.write_all(&line)
            .map_err(|e| Error::io(Position::Byte(written), e))?;
        written += line.len() as u64;
    }
    out.flush()
        .map_err(|e| Error::io(Position::Byte(written), e))?;
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::ErrorKind;
    use crate::model::{build_embeddings, DedupPolicy};

    fn opts() -> ReadOptions {
        ReadOptions::default()
    }

    #[test]
    fn glove_basic() {
        let e = read_glove_text(&b"a 1.0 2.0 3.0\nbc 4.0 5.0 6.0\n"[..], &opts()).unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e.dim(), 3);
        assert_eq!(e.lookup("bc"), Some(&[4.0, 5.0, 6.0][..]));
    }

    #[test]
    fn glove_without_final_newline_and_crlf() {
        let e = read_glove_text(&b"a 1 2\r\nb 3 4"[..], &opts()).unwrap();
        assert_eq!(e.words().collect::<Vec<_>>(), ["a", "b"]);
        assert_eq!(e.lookup("b"), Some(&[3.0, 4.0][..]));
    }

    #[test]
    fn glove_unicode_space_word() {
        let text = "x\u{a0}y 0.5 0.25\nz 1 1\n";
        let e = read_glove_text(text.as_bytes(), &opts()).unwrap();
        assert_eq!(e.word(0), Some("x\u{a0}y"));
        assert_eq!(e.dim(), 2);
    }

    #[test]
    fn glove_errors() {
        let err = read_glove_text(&b""[..], &opts()).unwrap_err();
        assert_eq!(err.kind(), ErrorKind::Truncated);

        let err = read_glove_text(&b"a 1 2\nb 3\n"[..], &opts()).unwrap_err();
        assert_eq!(err.kind(), ErrorKind::DimensionMismatch);
        assert_eq!(err.position(), Position::Line(2));

        let err = read_glove_text(&b"a 1 2\nb x 3\n"[..], &opts()).unwrap_err();
        assert_eq!(err.kind(), ErrorKind::DimensionMismatch);

        let err = read_glove_text(&b"a 1 2\n\xff 3 4\n"[..], &opts()).unwrap_err();
        assert_eq!(err.kind(), ErrorKind::InvalidUtf8);
        assert_eq!(err.position(), Position::Line(2));

        let err = read_glove_text(&b"lonely\n"[..], &opts()).unwrap_err();
        assert_eq!(err.kind(), ErrorKind::DimensionMismatch);
    }

    #[test]
    fn glove_duplicate_policies() {
        let text = b"a 1\nb 2\na 3\n";
        let first = read_glove_text(&text[..], &opts()).unwrap();
        assert_eq!(first.lookup("a"), Some(&[1.0][..]));
        let last = read_glove_text(&text[..], &opts().with_dedup(DedupPolicy::LastWins)).unwrap();
        assert_eq!(last.lookup("a"), Some(&[3.0][..]));
        assert_eq!(last.len(), 2);
        let err = read_glove_text(&text[..], &opts().with_dedup(DedupPolicy::Error)).unwrap_err();
        assert_eq!(err.position(), Position::Line(3));
    }

    #[test]
    fn w2v_text_basic_and_count_mismatch() {
        let e = read_w2v_text(&b"2 3\na 1 2 3\nb 4 5 6\n"[..], &opts()).unwrap();
        assert_eq!((e.len(), e.dim()), (2, 3));

        let err = read_w2v_text(&b"3 3\na 1 2 3\n"[..], &opts()).unwrap_err();
        assert_eq!(err.kind(), ErrorKind::HeaderMismatch);
        assert!(err.to_string().contains("declares 3 records, found 1"));

        let err = read_w2v_text(&b"1 3\na 1 2 3\nb 4 5 6\n"[..], &opts()).unwrap_err();
        assert_eq!(err.kind(), ErrorKind::HeaderMismatch);

        let err = read_w2v_text(&b"hello\n"[..], &opts()).unwrap_err();
        assert_eq!(err.kind(), ErrorKind::HeaderMismatch);
    }

    #[test]
    fn vec_style_trailing_space() {
        let e = read_w2v_text(&b"2 2 \na 1 2 \nb 3 4 \n"[..], &opts()).unwrap();
        assert_eq!(e.lookup("b"), Some(&[3.0, 4.0][..]));
    }

    #[test]
    fn writers() {
        let e = build_embeddings([("a", [1.0f32, 2.0])], 2, DedupPolicy::FirstWins).unwrap();
        let mut out = Vec::new();
        assert_eq!(write_glove_text(&e, &mut out).unwrap(), 6);
        assert_eq!(out, b"a 1 2\n");

        let e = build_embeddings([("a", [1.0f32, 2.0, 3.0])], 3, DedupPolicy::FirstWins).unwrap();
        out.clear();
        write_w2v_text(&e, &mut out).unwrap();
        assert_eq!(out, b"1 3\na 1 2 3\n");
        assert_eq!(read_w2v_text(&out[..], &opts()).unwrap(), e);
    }

    #[test]
    fn writer_rejects_unsafe_words() {
        for bad in ["b c", "x\ny", "r\r", ""] {
            let e = build_embeddings([(bad, [1.0f32])], 1, DedupPolicy::FirstWins).unwrap();
            let err = write_glove_text(&e, Vec::new()).unwrap_err();
            assert_eq!(err.kind(), ErrorKind::Domain);
            assert_eq!(err.position(), Position::Row(0));
        }
        let e = build_embeddings(
            [("ok", [1.0f32]), ("b c", [2.0])],
            1,
            DedupPolicy::FirstWins,
        )
        .unwrap();
        let msg = write_w2v_text(&e, Vec::new()).unwrap_err().to_string();
        assert!(msg.contains("\"b c\""), "{msg}");
    }

    #[test]
    fn text_payloads_match_apart_from_header() {
        let e = build_embeddings(
            [("α", [0.1f32, -2.5]), ("β", [f32::INFINITY, 1e-40])],
            2,
            DedupPolicy::FirstWins,
        )
        .unwrap();
        let mut glove = Vec::new();
        let mut w2v = Vec::new();
        write_glove_text(&e, &mut glove).unwrap();
        write_w2v_text(&e, &mut w2v).unwrap();
        assert_eq!(&w2v[b"2 2\n".len()..], &glove[..]);
        assert_eq!(read_glove_text(&glove[..], &opts()).unwrap(), e);
    }
}

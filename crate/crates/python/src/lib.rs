//! Python bindings: read, write, sniff and convert embedding files.
//!
//! File I/O runs with the GIL released. Library errors surface as
//! `WordvecsError` with `kind` and `position` attributes.

use std::collections::HashSet;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict};

use wordvecs::vector_io::{convert_path, read_path, write_path};
use wordvecs::{DedupPolicy, Error, FormatKind, Position, ReadOptions, Similarity};

create_exception!(wordvecs_py, WordvecsError, PyException);

fn to_py(py: Python<'_>, e: Error) -> PyErr {
    let err = WordvecsError::new_err(e.to_string());
    let value = err.value(py);
    let _ = value.setattr("kind", e.kind().name());
    let _ = value.setattr("position", e.position().to_string());
    err
}

fn format_arg(name: Option<&str>) -> PyResult<Option<FormatKind>> {
    name.map(|s| {
        s.parse()
            .map_err(|e: Error| PyValueError::new_err(e.to_string()))
    })
    .transpose()
}

fn options(dedup: &str, filter: Option<Vec<String>>) -> PyResult<ReadOptions> {
    let dedup: DedupPolicy = dedup
        .parse()
        .map_err(|e: Error| PyValueError::new_err(e.to_string()))?;
    let mut opts = ReadOptions::default().with_dedup(dedup);
    if let Some(words) = filter {
        opts.filter = Some(words.into_iter().collect::<HashSet<_>>());
    }
    Ok(opts)
}

/// An ordered vocabulary with one float32 vector per word.
#[pyclass(module = "wordvecs_py", frozen)]
struct Embeddings {
    inner: wordvecs::Embeddings,
}

#[pymethods]
impl Embeddings {
    /// Build from parallel lists of words and vectors.
    #[new]
    #[pyo3(signature = (words, vectors, dedup = "first"))]
    fn new(
        py: Python<'_>,
        words: Vec<String>,
        vectors: Vec<Vec<f32>>,
        dedup: &str,
    ) -> PyResult<Self> {
        if words.len() != vectors.len() {
            return Err(PyValueError::new_err(format!(
                "{} words but {} vectors",
                words.len(),
                vectors.len()
            )));
        }
        let dim = vectors.first().map_or(0, Vec::len);
        let policy = options(dedup, None)?.dedup;
        let inner = wordvecs::build_embeddings(words.into_iter().zip(vectors), dim, policy)
            .map_err(|e| to_py(py, e))?;
        Ok(Embeddings { inner })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __contains__(&self, word: &str) -> bool {
        self.inner.contains(word)
    }

    fn __repr__(&self) -> String {
        format!(
            "Embeddings(vocab={}, dim={})",
            self.inner.len(),
            self.inner.dim()
        )
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn words(&self) -> Vec<String> {
        self.inner.words().map(str::to_owned).collect()
    }

    fn index_of(&self, word: &str) -> Option<usize> {
        self.inner.index_of(word)
    }

    /// The vector for `word`; raises `WordvecsError` (kind `MissingWord`) if absent.
    fn vector(&self, py: Python<'_>, word: &str) -> PyResult<Vec<f32>> {
        self.inner.lookup(word).map(<[f32]>::to_vec).ok_or_else(|| {
            let e = Error::MissingWord {
                at: Position::Input,
                word: word.to_owned(),
            };
            to_py(py, e)
        })
    }

    /// Row-major float32 little-endian bytes, ready for `numpy.frombuffer`.
    fn matrix_bytes<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        let m = self.inner.matrix();
        PyBytes::new_with(py, m.len() * 4, |buf| {
            for (chunk, v) in buf.chunks_exact_mut(4).zip(m) {
                chunk.copy_from_slice(&v.to_le_bytes());
            }
            Ok(())
        })
        .expect("filling a fresh bytes object cannot fail")
    }

    #[pyo3(signature = (w1, w2, dot = false))]
    fn similarity(&self, py: Python<'_>, w1: &str, w2: &str, dot: bool) -> PyResult<f64> {
        let mode = if dot {
            Similarity::Dot
        } else {
            Similarity::Cosine
        };
        self.inner
            .similarity(w1, w2, mode)
            .map_err(|e| to_py(py, e))
    }

    #[pyo3(signature = (word, k = 10))]
    fn most_similar(&self, py: Python<'_>, word: &str, k: usize) -> PyResult<Vec<(String, f64)>> {
        let hits = self.inner.most_similar(word, k).map_err(|e| to_py(py, e))?;
        Ok(hits.into_iter().map(|(w, s)| (w.to_owned(), s)).collect())
    }

    /// Write in `format`, returning the number of bytes written.
    fn write(&self, py: Python<'_>, path: &str, format: &str) -> PyResult<u64> {
        let kind = format_arg(Some(format))?.expect("format given");
        py.detach(|| write_path(&self.inner, path, kind))
            .map_err(|e| to_py(py, e))
    }
}

/// Read a file, detecting its format unless `format` is given.
#[pyfunction]
#[pyo3(signature = (path, format = None, dedup = "first", filter = None))]
fn read(
    py: Python<'_>,
    path: &str,
    format: Option<&str>,
    dedup: &str,
    filter: Option<Vec<String>>,
) -> PyResult<Embeddings> {
    let kind = format_arg(format)?;
    let opts = options(dedup, filter)?;
    let res = py
        .detach(|| read_path(path, &opts, kind))
        .map_err(|e| to_py(py, e))?;
    Ok(Embeddings {
        inner: res.embeddings,
    })
}

/// Identify a file's format from its first bytes.
#[pyfunction]
fn sniff<'py>(py: Python<'py>, path: &str) -> PyResult<Bound<'py, PyDict>> {
    let report = py
        .detach(|| {
            let mut f = std::fs::File::open(path).map_err(|source| Error::Io {
                at: Position::Byte(0),
                source,
            })?;
            wordvecs::sniff(&mut f)
        })
        .map_err(|e| to_py(py, e))?;
    let d = PyDict::new(py);
    d.set_item("format", report.kind.name())?;
    d.set_item("vocab", report.vocab_size)?;
    d.set_item("dim", report.vector_size)?;
    Ok(d)
}

/// Convert `input` to `output` in format `to`; returns conversion statistics.
#[pyfunction]
#[pyo3(signature = (input, output, to, from_format = None, dedup = "first", filter = None))]
fn convert<'py>(
    py: Python<'py>,
    input: &str,
    output: &str,
    to: &str,
    from_format: Option<&str>,
    dedup: &str,
    filter: Option<Vec<String>>,
) -> PyResult<Bound<'py, PyDict>> {
    let to = format_arg(Some(to))?.expect("format given");
    let from = format_arg(from_format)?;
    let opts = options(dedup, filter)?;
    let s = py
        .detach(|| convert_path(input, output, to, &opts, from))
        .map_err(|e| to_py(py, e))?;
    let d = PyDict::new(py);
    d.set_item("from", s.from.name())?;
    d.set_item("to", s.to.name())?;
    d.set_item("dim", s.dim)?;
    d.set_item("records_read", s.records_read)?;
    d.set_item("records_written", s.records_written)?;
    d.set_item("duplicates_resolved", s.duplicates_resolved)?;
    d.set_item("filtered_out", s.filtered_out)?;
    d.set_item("bytes_written", s.bytes_written)?;
    d.set_item("elapsed", s.elapsed)?;
    d.set_item("missing", s.missing)?;
    Ok(d)
}

#[pymodule]
fn wordvecs_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Embeddings>()?;
    m.add_function(wrap_pyfunction!(read, m)?)?;
    m.add_function(wrap_pyfunction!(sniff, m)?)?;
    m.add_function(wrap_pyfunction!(convert, m)?)?;
    m.add("WordvecsError", m.py().get_type::<WordvecsError>())?;
    m.add("FORMATS", FormatKind::ALL.map(FormatKind::name).to_vec())?;
    Ok(())
}

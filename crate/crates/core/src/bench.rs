//! Timed full-file reads.

use std::fs::File;
use std::hint::black_box;
use std::io::BufReader;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use crate::error::{Error, Position, Result};
use crate::model::{FormatKind, ReadOptions};
use crate::sniff;
use crate::stats::TimingSample;
use crate::vector_io::{open, read_format, IO_BUFFER};

/// Time `reps` complete reads of `path` (open through a fully built table).
///
/// When `drop_caches` is given it runs through `sh -c` before every rep,
/// typically something like `sync; echo 3 > /proc/sys/vm/drop_caches`.
/// Without it the runs are warm-cache. Reps run strictly one after another.
pub fn time_reads(
    path: impl AsRef<Path>,
    format: FormatKind,
    reps: usize,
    drop_caches: Option<&str>,
) -> Result<Vec<TimingSample>> {
    let path = path.as_ref();
    if reps == 0 {
        return Err(Error::domain(Position::Input, "reps must be at least 1"));
    }
    let sniffed = sniff::sniff(&mut open(path)?)?;
    if sniffed.kind != format {
        return Err(Error::domain(
            Position::Input,
            format!(
                "{} sniffs as {}, not {format}",
                path.display(),
                sniffed.kind
            ),
        ));
    }
    let opts = ReadOptions::default();
    let mut samples = Vec::with_capacity(reps);
    for _ in 0..reps {
        if let Some(cmd) = drop_caches {
            run_cache_drop(cmd)?;
        }
        let start = Instant::now();
        let file: File = open(path)?;
        let out = read_format(BufReader::with_capacity(IO_BUFFER, file), format, &opts)?;
        let seconds = start.elapsed().as_secs_f64();
        black_box(&out);
        drop(out);
        samples.push(TimingSample { seconds });
    }
    Ok(samples)
}

fn run_cache_drop(cmd: &str) -> Result<()> {
    let status = Command::new("sh")
        .arg("-c")
        .arg(cmd)
        .status()
        .map_err(|e| Error::io(Position::Input, e))?;
    if !status.success() {
        return Err(Error::domain(
            Position::Input,
            format!("cache-drop command {cmd:?} failed with {status}"),
        ));
    }
    Ok(())
}

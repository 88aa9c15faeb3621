//! Chunked, resumable butterfly sweeps.

use std::fs::{File, OpenOptions};
use std::io::{self, BufWriter, Read, Seek, SeekFrom, Write};
use std::path::Path;

use orbifold_hall::conductance::{butterfly, write_butterfly_csv, BUTTERFLY_HEADER};
use orbifold_hall::fuchsian::CayleyBall;
use orbifold_hall::{Error, Result};

/// Parses `start:stop:count` into `count` evenly spaced values.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::Parse(format!("theta grid must be start:stop:count, got {spec:?}"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, n] = parts.as_slice() else { return Err(bad()) };
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
}

/// Number of leading grid values fully present in `text`, and the byte
/// length of that prefix (header included).
fn completed_prefix(text: &str, grid: &[f64], dim: usize) -> Result<(usize, usize)> {
    let mut lines = text.split_inclusive('\n');
    let header = lines.next().unwrap_or("");
    if header.trim_end() != BUTTERFLY_HEADER {
        return Err(Error::Precondition("existing output does not start with the butterfly header".into()));
    }
    let mut bytes = header.len();
    let mut done = 0;
    let mut pending = 0usize;
    let mut row = 0;
    for line in lines {
        if !line.ends_with('\n') {
            break;
        }
        let mut f = line.trim_end().split(',');
        let (Some(t), Some(i)) = (f.next(), f.next()) else { break };
        let (Ok(t), Ok(i)) = (t.parse::<f64>(), i.parse::<usize>()) else { break };
        if done >= grid.len() || t.to_bits() != grid[done].to_bits() || i != row {
            return Err(Error::Precondition(format!(
                "existing output does not match the requested grid at theta index {done}"
            )));
        }
        pending += line.len();
        row += 1;
        if row == dim {
            bytes += pending;
            pending = 0;
            row = 0;
            done += 1;
        }
    }
    Ok((done, bytes))
}

/// Writes the sweep to `path` chunk by chunk; with `resume`, completed
/// chunks already on disk are kept and a partial tail is discarded.
pub fn sweep_to_file(ball: &CayleyBall, grid: &[f64], chunk: usize, path: &Path, resume: bool) -> Result<usize> {
    let io = |e: io::Error| Error::Precondition(format!("{}: {e}", path.display()));
    let mut start = 0;
    let mut file = if resume && path.exists() {
        let mut f = OpenOptions::new().read(true).write(true).open(path).map_err(io)?;
        let mut text = String::new();
        f.read_to_string(&mut text).map_err(io)?;
        let (done, bytes) = completed_prefix(&text, grid, ball.len())?;
        f.set_len(bytes as u64).map_err(io)?;
        f.seek(SeekFrom::End(0)).map_err(io)?;
        start = done;
        f
    } else {
        let mut f = File::create(path).map_err(io)?;
        writeln!(f, "{BUTTERFLY_HEADER}").map_err(io)?;
        f
    };
    for block in grid[start..].chunks(chunk.max(1)) {
        let rows = butterfly(ball, block)?;
        let mut w = BufWriter::new(&mut file);
        write_butterfly_csv(&mut w, &rows, false).map_err(io)?;
        w.flush().map_err(io)?;
        drop(w);
        file.sync_data().map_err(io)?;
    }
    Ok(start)
}

pub fn sweep_to_writer<W: Write>(ball: &CayleyBall, grid: &[f64], chunk: usize, out: &mut W) -> Result<()> {
    let io = |e: io::Error| Error::Precondition(format!("write failed: {e}"));
    writeln!(out, "{BUTTERFLY_HEADER}").map_err(io)?;
    for block in grid.chunks(chunk.max(1)) {
        write_butterfly_csv(out, &butterfly(ball, block)?, false).map_err(io)?;
    }
    Ok(())
}

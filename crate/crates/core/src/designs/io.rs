//! `DESIGN` text format:
//!
//! ```text
//! DESIGN n N unit|super_normalized
//! p_1
//! re im      (n lines)
//! p_2
//! ...
//! ```

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::{Design, Normalization};
use crate::error::{Error, Result};
use crate::hermitian::io::{fmt_f64, write_complex_line, LineReader};

pub fn write_design(out: &mut impl Write, d: &Design) -> std::io::Result<()> {
    writeln!(out, "DESIGN {} {} {}", d.dim(), d.len(), d.normalization().as_str())?;
    for (v, p) in d.vectors().iter().zip(d.weights()) {
        writeln!(out, "{}", fmt_f64(*p))?;
        for z in v {
            write_complex_line(out, *z)?;
        }
    }
    Ok(())
}

pub fn read_design(reader: impl BufRead) -> Result<Design> {
    let mut r = LineReader::new(reader);
    let header = r.header("DESIGN")?;
    if header.len() != 3 {
        return Err(Error::parse(r.line(), "expected `DESIGN n N mode`"));
    }
    let n = r.parse_usize(&header[0])?;
    let count = r.parse_usize(&header[1])?;
    let mode: Normalization = header[2]
        .parse()
        .map_err(|_| Error::parse(r.line(), format!("unknown mode `{}`", header[2])))?;
    if n == 0 || count == 0 {
        return Err(Error::parse(r.line(), "dimension and count must be positive"));
    }
    let mut vectors = Vec::with_capacity(count);
    let mut weights = Vec::with_capacity(count);
    for _ in 0..count {
        weights.push(r.next_f64()?);
        vectors.push((0..n).map(|_| r.next_complex()).collect::<Result<Vec<_>>>()?);
    }
    r.expect_end()?;
    Design::new(n, vectors, weights, mode)
}

pub fn save_design(path: impl AsRef<Path>, d: &Design) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    write_design(&mut buf, d).map_err(|e| Error::io(path, e))?;
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

pub fn load_design(path: impl AsRef<Path>) -> Result<Design> {
    let path = path.as_ref();
    let f = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_design(BufReader::new(f))
}

//! `HMAT` text format: a `HMAT n` header followed by `n*n` lines of `re im`
//! in row-major order. Readers enforce the Hermitian invariant.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use num_complex::Complex64;

use super::HermitianMatrix;
use crate::error::{Error, Result};

/// Formats a float so that parsing it back yields the identical value.
pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:e}")
}

pub(crate) fn write_complex_line(out: &mut impl Write, z: Complex64) -> std::io::Result<()> {
    writeln!(out, "{} {}", fmt_f64(z.re), fmt_f64(z.im))
}

/// Line-oriented reader that skips blank lines and tracks line numbers.
pub(crate) struct LineReader<R> {
    inner: std::io::Lines<R>,
    line: usize,
}

impl<R: BufRead> LineReader<R> {
    pub(crate) fn new(reader: R) -> Self {
        Self {
            inner: reader.lines(),
            line: 0,
        }
    }

    pub(crate) fn line(&self) -> usize {
        self.line
    }

    pub(crate) fn next_line(&mut self) -> Result<String> {
        loop {
            self.line += 1;
            match self.inner.next() {
                None => return Err(Error::parse(self.line, "unexpected end of input")),
                Some(Err(e)) => return Err(Error::parse(self.line, e.to_string())),
                Some(Ok(l)) if l.trim().is_empty() => continue,
                Some(Ok(l)) => return Ok(l),
            }
        }
    }

    /// Errors if any non-blank content remains.
    pub(crate) fn expect_end(&mut self) -> Result<()> {
        for l in self.inner.by_ref() {
            self.line += 1;
            let l = l.map_err(|e| Error::parse(self.line, e.to_string()))?;
            if !l.trim().is_empty() {
                return Err(Error::parse(self.line, format!("trailing content `{}`", l.trim())));
            }
        }
        Ok(())
    }

    pub(crate) fn parse_f64(&self, token: &str) -> Result<f64> {
        let v: f64 = token
            .parse()
            .map_err(|_| Error::parse(self.line, format!("`{token}` is not a number")))?;
        if !v.is_finite() {
            return Err(Error::parse(self.line, format!("`{token}` is not finite")));
        }
        Ok(v)
    }

    pub(crate) fn parse_usize(&self, token: &str) -> Result<usize> {
        token
            .parse()
            .map_err(|_| Error::parse(self.line, format!("`{token}` is not a non-negative integer")))
    }

    pub(crate) fn next_f64(&mut self) -> Result<f64> {
        let l = self.next_line()?;
        let mut it = l.split_whitespace();
        let v = self.parse_f64(it.next().unwrap_or(""))?;
        if it.next().is_some() {
            return Err(Error::parse(self.line, "expected a single value"));
        }
        Ok(v)
    }

    pub(crate) fn next_complex(&mut self) -> Result<Complex64> {
        let l = self.next_line()?;
        let tokens: Vec<&str> = l.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(Error::parse(self.line, format!("expected `re im`, found `{}`", l.trim())));
        }
        Ok(Complex64::new(self.parse_f64(tokens[0])?, self.parse_f64(tokens[1])?))
    }

    /// Reads a header line and checks its keyword; returns the remaining tokens.
    pub(crate) fn header(&mut self, keyword: &str) -> Result<Vec<String>> {
        let l = self.next_line()?;
        let mut tokens = l.split_whitespace();
        match tokens.next() {
            Some(k) if k == keyword => Ok(tokens.map(str::to_owned).collect()),
            _ => Err(Error::parse(self.line, format!("expected `{keyword}` header"))),
        }
    }
}

pub fn write_hmat(out: &mut impl Write, z: &HermitianMatrix) -> std::io::Result<()> {
    writeln!(out, "HMAT {}", z.dim())?;
    for v in z.entries() {
        write_complex_line(out, *v)?;
    }
    Ok(())
}

pub fn read_hmat(reader: impl BufRead) -> Result<HermitianMatrix> {
    let mut r = LineReader::new(reader);
    let header = r.header("HMAT")?;
    if header.len() != 1 {
        return Err(Error::parse(r.line(), "expected `HMAT n`"));
    }
    let n = r.parse_usize(&header[0])?;
    if n == 0 {
        return Err(Error::parse(r.line(), "dimension must be positive"));
    }
    let data = (0..n * n).map(|_| r.next_complex()).collect::<Result<Vec<_>>>()?;
    r.expect_end()?;
    HermitianMatrix::new(n, data)
}

pub fn save_hmat(path: impl AsRef<Path>, z: &HermitianMatrix) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    write_hmat(&mut buf, z).map_err(|e| Error::io(path, e))?;
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

pub fn load_hmat(path: impl AsRef<Path>) -> Result<HermitianMatrix> {
    let path = path.as_ref();
    let f = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_hmat(BufReader::new(f))
}

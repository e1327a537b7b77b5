//! CSV export and import. Floats are written with 17 significant digits, so a
//! round trip reproduces every value bit for bit.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::Path;

use num_complex::Complex64 as C64;

use crate::bounds::BoundReport;
use crate::error::{Error, Result};
use crate::grid::{AxisRole, Grid, Label, Rep, SampledFn};

pub(crate) fn float(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_err(e: csv::Error) -> Error {
    if !e.is_io_error() {
        return Error::Parse(format!("CSV: {e}"));
    }
    match e.into_kind() {
        csv::ErrorKind::Io(source) => flush_err(source),
        _ => unreachable!("checked above"),
    }
}

fn flush_err(source: io::Error) -> Error {
    Error::Io {
        path: "<output>".into(),
        source,
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

/// Coordinate column names: `x, p` for one degree of freedom, `x1.., p1..` otherwise.
fn axis_names(grid: &Grid) -> Vec<String> {
    let count = |role| (0..grid.dim()).filter(|&j| grid.role(j) == role).count();
    let (nx, np) = (count(AxisRole::Position), count(AxisRole::Momentum));
    let (mut ix, mut ip) = (0, 0);
    (0..grid.dim())
        .map(|j| match grid.role(j) {
            AxisRole::Position => {
                ix += 1;
                if nx == 1 { "x".to_string() } else { format!("x{ix}") }
            }
            AxisRole::Momentum => {
                ip += 1;
                if np == 1 { "p".to_string() } else { format!("p{ip}") }
            }
        })
        .collect()
}

/// One row per grid node: coordinates, then real and imaginary parts.
pub fn write_function<W: Write>(out: W, f: &SampledFn) -> Result<()> {
    let mut w = writer(out);
    let grid = f.grid();
    let mut header = axis_names(grid);
    header.push("re".into());
    header.push("im".into());
    w.write_record(&header).map_err(csv_err)?;
    let mut row = Vec::with_capacity(grid.dim() + 2);
    for (flat, v) in f.values().iter().enumerate() {
        row.clear();
        row.extend(grid.point(flat).into_iter().map(float));
        row.push(float(v.re));
        row.push(float(v.im));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(flush_err)?;
    Ok(())
}

pub fn export_function(path: &Path, f: &SampledFn) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    write_function(io::BufWriter::new(file), f)
}

/// Reads a file written by [`write_function`], recovering the grid from the
/// coordinate columns.
pub fn read_function<R: Read>(input: R, label: Label) -> Result<SampledFn> {
    let mut r = csv::ReaderBuilder::new().from_reader(input);
    let header: Vec<String> = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    if header.len() < 3 || header[header.len() - 2] != "re" || header[header.len() - 1] != "im" {
        return Err(Error::Parse(format!("unexpected header {header:?}")));
    }
    let d = header.len() - 2;
    let roles = header[..d]
        .iter()
        .map(|h| match h.chars().next() {
            Some('x') => Ok(AxisRole::Position),
            Some('p') => Ok(AxisRole::Momentum),
            _ => Err(Error::Parse(format!("unknown coordinate column `{h}`"))),
        })
        .collect::<Result<Vec<_>>>()?;
    let mut first = Vec::new();
    let mut values = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        if rec.len() != d + 2 {
            return Err(Error::Parse(format!("row {}: expected {} fields, got {}", line + 2, d + 2, rec.len())));
        }
        let num = |i: usize| -> Result<f64> {
            rec[i]
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("row {}, column `{}`: {e}", line + 2, header[i])))
        };
        if line == 0 {
            first = (0..d).map(num).collect::<Result<Vec<_>>>()?;
        }
        values.push(C64::new(num(d)?, num(d + 1)?));
    }
    let points = (values.len() as f64).powf(1.0 / d as f64).round() as usize;
    if points.pow(d as u32) != values.len() {
        return Err(Error::Parse(format!("{} rows do not form a {d}-dimensional square grid", values.len())));
    }
    let grid = Grid::new(points, first.iter().map(|c| -c).collect(), roles)?;
    SampledFn::new(grid, values, label)
}

pub fn import_function(path: &Path, label: Label) -> Result<SampledFn> {
    let file = File::open(path).map_err(io_err(path))?;
    read_function(io::BufReader::new(file), label)
}

pub const BOUND_HEADER: [&str; 6] = ["a", "b", "lhs", "rhs", "ratio", "pass"];

/// `a,b,lhs,rhs,ratio,pass`, one row per report.
pub fn write_bounds<W: Write>(out: W, reports: &[BoundReport]) -> Result<()> {
    let mut w = writer(out);
    w.write_record(BOUND_HEADER).map_err(csv_err)?;
    for r in reports {
        let idx = |i: usize| r.indices.get(i).map(|m| m.to_string()).unwrap_or_default();
        w.write_record([
            idx(0),
            idx(1),
            float(r.lhs),
            float(r.rhs),
            float(r.ratio),
            r.pass.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(flush_err)?;
    Ok(())
}

/// Default label for re-imported functions.
pub fn imported_label() -> Label {
    Label::new(Rep::Other("imported".into()), "")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiindex::MultiIndex;
    use crate::states::MixedState;
    use crate::transforms::wigner;

    #[test]
    fn function_round_trip_is_bitwise() {
        let grid = Grid::phase_space(1, 32, 5.0).unwrap();
        let w = wigner(&MixedState::vacuum(1), &grid).unwrap();
        let mut buf = Vec::new();
        write_function(&mut buf, &w).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x,p,re,im\n"));
        assert!(!text.contains('\r'));
        let back = read_function(buf.as_slice(), imported_label()).unwrap();
        assert!(back.grid().approx_eq(&grid));
        for (a, b) in back.values().iter().zip(w.values()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn bounds_layout() {
        let mut buf = Vec::new();
        write_bounds(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b,lhs,rhs,ratio,pass\n");
        let a = MultiIndex::new(vec![1, 0]).unwrap();
        let r = BoundReport::new("theorem", "s", vec![a.clone(), a], 1.0, 4.0);
        let mut buf = Vec::new();
        write_bounds(&mut buf, &[r]).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s.lines().nth(1).unwrap(), "\"1,0\",\"1,0\",1.0000000000000000e0,4.0000000000000000e0,2.5000000000000000e-1,true");
    }

    #[test]
    fn rejects_malformed() {
        assert!(read_function("x,p,re\n".as_bytes(), imported_label()).is_err());
        assert!(read_function("x,p,re,im\n0,0,zz,0\n".as_bytes(), imported_label()).is_err());
    }
}

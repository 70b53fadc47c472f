//! CSV serialization for solve traces and regression datasets. Floats are
//! written with Rust's shortest round-trip formatting, so write-then-read
//! reproduces every value bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use ndarray::{Array1, Array2};

use crate::error::DcError;
use crate::trace::SolveTrace;
use crate::Result;

use super::RegressionDataset;

/// Column layout of a trace CSV.
pub const TRACE_HEADER: &str = "iter,f,grad_norm,step_norm,fw_gap,step_size,elapsed_ms";

/// One parsed trace CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    pub f: f64,
    pub grad_norm: f64,
    pub step_norm: f64,
    pub fw_gap: Option<f64>,
    pub step_size: f64,
    pub elapsed_ms: f64,
}

/// Write one row per recorded iterate under [`TRACE_HEADER`]; an absent
/// Frank-Wolfe gap becomes an empty cell.
pub fn write_trace_csv(path: &Path, trace: &SolveTrace) -> Result<()> {
    let mut out = String::with_capacity(64 * (trace.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for k in 0..trace.len() {
        let gap = trace.fw_gap[k].map(|g| g.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            k,
            trace.f_val[k],
            trace.grad_norm[k],
            trace.step_norm[k],
            gap,
            trace.step_size[k],
            trace.elapsed[k] * 1e3,
        )
        .expect("writing to String cannot fail");
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn parse_field<T: std::str::FromStr>(text: &str, line: usize, what: &str) -> Result<T> {
    text.trim().parse::<T>().map_err(|_| DcError::CsvParse {
        line,
        reason: format!("bad {what} value '{text}'"),
    })
}

/// Read a trace CSV back into rows; the inverse of [`write_trace_csv`].
pub fn read_trace_csv(path: &Path) -> Result<Vec<TraceRow>> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == TRACE_HEADER => {}
        Some((_, h)) => {
            return Err(DcError::CsvParse {
                line: 1,
                reason: format!("unexpected header '{h}'"),
            })
        }
        None => {
            return Err(DcError::CsvParse {
                line: 1,
                reason: "empty file".into(),
            })
        }
    }
    let mut rows = Vec::new();
    for (idx, raw) in lines {
        let line = idx + 1;
        if raw.is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != 7 {
            return Err(DcError::CsvParse {
                line,
                reason: format!("expected 7 fields, found {}", fields.len()),
            });
        }
        let fw_gap = if fields[4].trim().is_empty() {
            None
        } else {
            Some(parse_field(fields[4], line, "fw_gap")?)
        };
        rows.push(TraceRow {
            iter: parse_field(fields[0], line, "iter")?,
            f: parse_field(fields[1], line, "f")?,
            grad_norm: parse_field(fields[2], line, "grad_norm")?,
            step_norm: parse_field(fields[3], line, "step_norm")?,
            fw_gap,
            step_size: parse_field(fields[5], line, "step_size")?,
            elapsed_ms: parse_field(fields[6], line, "elapsed_ms")?,
        });
    }
    Ok(rows)
}

/// Column-oriented dataset layout: the p design columns, then y, then xstar.
/// The row count is max(n, p); the shorter columns pad with empty cells.
pub fn write_dataset_csv(path: &Path, d: &RegressionDataset) -> Result<()> {
    let (n, p) = d.x.dim();
    let rows = n.max(p);
    let mut out = String::new();
    for j in 0..p {
        write!(out, "x{j},").expect("writing to String cannot fail");
    }
    out.push_str("y,xstar\n");
    for r in 0..rows {
        for j in 0..p {
            if r < n {
                write!(out, "{}", d.x[(r, j)]).expect("writing to String cannot fail");
            }
            out.push(',');
        }
        if r < n {
            write!(out, "{}", d.y[r]).expect("writing to String cannot fail");
        }
        out.push(',');
        if r < p {
            write!(out, "{}", d.xstar[r]).expect("writing to String cannot fail");
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Inverse of [`write_dataset_csv`]. The generating seed is not serialized;
/// the returned dataset carries seed 0.
pub fn read_dataset_csv(path: &Path) -> Result<RegressionDataset> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let header = match lines.next() {
        Some((_, h)) => h,
        None => {
            return Err(DcError::CsvParse {
                line: 1,
                reason: "empty file".into(),
            })
        }
    };
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < 3 || cols[cols.len() - 2] != "y" || cols[cols.len() - 1] != "xstar" {
        return Err(DcError::CsvParse {
            line: 1,
            reason: "expected columns x0..x{p-1},y,xstar".into(),
        });
    }
    let p = cols.len() - 2;
    for (j, c) in cols[..p].iter().enumerate() {
        if *c != format!("x{j}") {
            return Err(DcError::CsvParse {
                line: 1,
                reason: format!("expected column x{j}, found '{c}'"),
            });
        }
    }
    let mut xrows: Vec<Vec<f64>> = Vec::new();
    let mut y = Vec::new();
    let mut xstar = Vec::new();
    for (idx, raw) in lines {
        let line = idx + 1;
        if raw.is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != p + 2 {
            return Err(DcError::CsvParse {
                line,
                reason: format!("expected {} fields, found {}", p + 2, fields.len()),
            });
        }
        let design_cells: Vec<&str> =
            fields[..p].iter().copied().filter(|c| !c.trim().is_empty()).collect();
        if !design_cells.is_empty() {
            if design_cells.len() != p || xrows.len() != y.len() {
                return Err(DcError::CsvParse {
                    line,
                    reason: "ragged design row".into(),
                });
            }
            let mut row = Vec::with_capacity(p);
            for cell in design_cells {
                row.push(parse_field(cell, line, "design")?);
            }
            xrows.push(row);
        }
        if !fields[p].trim().is_empty() {
            y.push(parse_field(fields[p], line, "y")?);
        }
        if !fields[p + 1].trim().is_empty() {
            xstar.push(parse_field(fields[p + 1], line, "xstar")?);
        }
    }
    if xrows.len() != y.len() || xstar.len() != p {
        return Err(DcError::CsvParse {
            line: 1,
            reason: format!(
                "inconsistent column lengths: {} design rows, {} responses, {} of {} coefficients",
                xrows.len(),
                y.len(),
                xstar.len(),
                p
            ),
        });
    }
    let n = xrows.len();
    let x = Array2::from_shape_fn((n, p), |(i, j)| xrows[i][j]);
    Ok(RegressionDataset {
        x,
        y: Array1::from_vec(y),
        xstar: Array1::from_vec(xstar),
        seed: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::{AlgoKind, SolveStatus};
    use ndarray::array;

    fn tmp(name: &str) -> std::path::PathBuf {
        std::env::temp_dir().join(format!("dcopt_csv_{}_{}", std::process::id(), name))
    }

    fn sample_trace() -> SolveTrace {
        SolveTrace {
            f_val: vec![2.5, 1.25, 0.7],
            grad_norm: vec![1.0, 0.5, 0.1],
            step_norm: vec![0.5, 0.25, 0.0],
            fw_gap: vec![Some(0.9), Some(0.3), None],
            step_size: vec![0.1, 0.1, 0.0],
            elapsed: vec![0.001, 0.002, 0.0031],
            inner_iters: vec![],
            inner_cap_hit: false,
            x_final: array![0.2],
            status: SolveStatus::Converged,
            algo: AlgoKind::FrankWolfe,
        }
    }

    #[test]
    fn trace_round_trip_is_lossless() {
        let t = sample_trace();
        let path = tmp("trace.csv");
        write_trace_csv(&path, &t).unwrap();
        let rows = read_trace_csv(&path).unwrap();
        std::fs::remove_file(&path).ok();
        assert_eq!(rows.len(), t.len());
        for (k, row) in rows.iter().enumerate() {
            assert_eq!(row.iter, k);
            assert_eq!(row.f, t.f_val[k]);
            assert_eq!(row.grad_norm, t.grad_norm[k]);
            assert_eq!(row.step_norm, t.step_norm[k]);
            assert_eq!(row.fw_gap, t.fw_gap[k]);
            assert_eq!(row.step_size, t.step_size[k]);
            assert_eq!(row.elapsed_ms, t.elapsed[k] * 1e3);
        }
    }

    #[test]
    fn trace_parse_errors_carry_line_numbers() {
        let path = tmp("bad_trace.csv");
        std::fs::write(
            &path,
            format!("{TRACE_HEADER}\n0,1,1,1,,0.1,5\n1,oops,1,1,,0.1,6\n"),
        )
        .unwrap();
        let err = read_trace_csv(&path).unwrap_err();
        std::fs::remove_file(&path).ok();
        assert!(matches!(err, DcError::CsvParse { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn trace_rejects_wrong_header() {
        let path = tmp("hdr_trace.csv");
        std::fs::write(&path, "iter,f\n0,1\n").unwrap();
        let err = read_trace_csv(&path).unwrap_err();
        std::fs::remove_file(&path).ok();
        assert!(matches!(err, DcError::CsvParse { line: 1, .. }));
    }

    #[test]
    fn dataset_round_trip_tall_and_wide() {
        for (n, p) in [(5usize, 3usize), (2, 4)] {
            let x = Array2::from_shape_fn((n, p), |(i, j)| (i * 10 + j) as f64 + 0.125);
            let y = Array1::from_shape_fn(n, |i| i as f64 - 0.5);
            let mut xstar = Array1::zeros(p);
            xstar[0] = 1.0;
            let d = RegressionDataset { x, y, xstar, seed: 42 };
            let path = tmp(&format!("ds_{n}_{p}.csv"));
            write_dataset_csv(&path, &d).unwrap();
            let back = read_dataset_csv(&path).unwrap();
            std::fs::remove_file(&path).ok();
            assert_eq!(back.x, d.x);
            assert_eq!(back.y, d.y);
            assert_eq!(back.xstar, d.xstar);
        }
    }
}

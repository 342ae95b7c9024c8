//! Field dump: CSV with header `i,j,x,y,omega,psi`, one row per interior
//! cell in row-major order (`i` is the row counted from the bottom, `j` the
//! column). Floats are written in shortest round-trip form.

use super::ScalarField;
use crate::domain::Grid;
use crate::error::{Error, Result};
use std::io::{Read, Write};
use std::sync::Arc;

pub const FIELD_HEADER: [&str; 6] = ["i", "j", "x", "y", "omega", "psi"];

pub fn write_field_csv<W: Write>(out: W, omega: &ScalarField, psi: &ScalarField) -> Result<()> {
    omega.ensure_same_grid(psi)?;
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(FIELD_HEADER).map_err(csv_err)?;
    for (k, cell) in omega.grid().cells().iter().enumerate() {
        w.write_record([
            cell.row.to_string(),
            cell.col.to_string(),
            cell.center.x.to_string(),
            cell.center.y.to_string(),
            omega.get(k).to_string(),
            psi.get(k).to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a dump back onto `grid`; every interior cell must appear once.
pub fn read_field_csv<R: Read>(input: R, grid: &Arc<Grid>) -> Result<(ScalarField, ScalarField)> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(csv_err)?.clone();
    if header.iter().ne(FIELD_HEADER.iter().copied()) {
        return Err(Error::Contract(format!(
            "field dump header {:?} does not match {:?}",
            header.iter().collect::<Vec<_>>(),
            FIELD_HEADER
        )));
    }
    let n = grid.len();
    let mut omega = vec![f64::NAN; n];
    let mut psi = vec![f64::NAN; n];
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let num = |i: usize| -> Result<f64> {
            rec[i].trim().parse::<f64>().map_err(|e| {
                Error::Contract(format!("field dump row {}: column {}: {e}", line + 2, FIELD_HEADER[i]))
            })
        };
        let row = num(0)? as usize;
        let col = num(1)? as usize;
        let k = grid.index_of(row, col).ok_or_else(|| {
            Error::Contract(format!("field dump row {}: ({row}, {col}) is not an interior cell", line + 2))
        })?;
        if !omega[k].is_nan() {
            return Err(Error::Contract(format!("field dump repeats cell ({row}, {col})")));
        }
        omega[k] = num(4)?;
        psi[k] = num(5)?;
    }
    if omega.iter().any(|v| v.is_nan()) {
        return Err(Error::Contract("field dump is missing interior cells".into()));
    }
    Ok((ScalarField::new(grid.clone(), omega)?, ScalarField::new(grid.clone(), psi)?))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Contract(format!("csv: {e}"))
}

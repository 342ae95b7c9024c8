//! Output files shared by the commands.

use super::{RunConfig, VERSION};
use crate::error::{Error, Result};
use crate::field::{centroid, PatchField};
use crate::point::Point;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

pub const BOUNDARY_HEADER: [&str; 3] = ["k", "x", "y"];

/// Neighbour offset `(row, col)` and the two corners `(x, y)` of the shared edge.
type Edge = (isize, isize, (isize, isize), (isize, isize));
const EDGES: [Edge; 4] = [
    (1, 0, (-1, 1), (1, 1)),
    (-1, 0, (-1, -1), (1, -1)),
    (0, 1, (1, -1), (1, 1)),
    (0, -1, (-1, -1), (-1, 1)),
];

/// Corners of the cell edges separating the support of `omega` from the
/// rest of the plane, ordered by angle around the centroid (ties by radius).
pub fn boundary_polyline(omega: &PatchField) -> Vec<Point> {
    let grid = omega.grid();
    let occupancy = omega.occupancy();
    let inside = |row: isize, col: isize| -> bool {
        row >= 0
            && col >= 0
            && grid
                .index_of(row as usize, col as usize)
                .is_some_and(|k| occupancy[k] > 0.0)
    };
    // Corners keyed by doubled integer coordinates, so shared corners coincide exactly.
    let h = grid.spacing();
    let mut corners = BTreeMap::new();
    for (k, _) in omega.support() {
        let cell = &grid.cells()[k];
        let (r, c) = (cell.row as isize, cell.col as isize);
        for (dr, dc, a, b) in EDGES {
            if !inside(r + dr, c + dc) {
                for (ex, ey) in [a, b] {
                    let p = cell.center + Point::new(ex as f64 * 0.5 * h, ey as f64 * 0.5 * h);
                    corners.entry((2 * r + ey, 2 * c + ex)).or_insert(p);
                }
            }
        }
    }
    let mut points: Vec<Point> = corners.into_values().collect();
    let center = centroid(omega);
    let key = |p: &Point| {
        let d = *p - center;
        (d.y.atan2(d.x), d.norm())
    };
    points.sort_by(|a, b| {
        let (ta, ra) = key(a);
        let (tb, rb) = key(b);
        ta.total_cmp(&tb).then(ra.total_cmp(&rb))
    });
    points
}

pub fn write_boundary_csv(path: &Path, omega: &PatchField) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(BOUNDARY_HEADER).map_err(csv_err)?;
    for (k, p) in boundary_polyline(omega).iter().enumerate() {
        w.write_record([k.to_string(), p.x.to_string(), p.y.to_string()]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(fs::File::create(path)?))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| Error::Io(e.into()))?;
    bytes.push(b'\n');
    fs::write(path, bytes)?;
    Ok(())
}

/// `config.txt`: the version, the command, and every resolved key.
pub fn write_config_echo(dir: &Path, cfg: &RunConfig) -> Result<()> {
    let mut text = format!("# patchvortex {VERSION}\n# command: {}\n", cfg.command.name());
    for (k, v) in cfg.entries() {
        text.push_str(&format!("{k} = {v}\n"));
    }
    fs::write(dir.join("config.txt"), text)?;
    Ok(())
}

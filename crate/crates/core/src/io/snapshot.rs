use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::sim::{FieldState, Grid2D};

/// A field read back from a snapshot file.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
    pub t: f64,
    pub field: String,
    /// Row-major nodal values, (nx+1)(ny+1) of them.
    pub values: Vec<f64>,
}

/// Header lines `nx`, `ny`, `Lx`, `Ly`, `t`, `field`, then one row of
/// nodal values per grid line, 17 significant digits.
pub fn write_snapshot(path: &Path, grid: &Grid2D, state: &FieldState, field: &str) -> Result<()> {
    let values = state
        .field(field)
        .ok_or_else(|| Error::Domain(format!("unknown field '{field}'")))?;
    let mut out = String::with_capacity(values.len() * 24 + 128);
    out.push_str(&format!("nx {}\nny {}\nLx {:.16e}\nLy {:.16e}\nt {:.16e}\nfield {field}\n", grid.nx, grid.ny, grid.lx, grid.ly, state.t));
    for row in values.chunks(grid.nodes_x()) {
        let line: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    let io_err = |e| Error::Io { path: path.to_path_buf(), source: e };
    let mut f = fs::File::create(path).map_err(io_err)?;
    f.write_all(out.as_bytes()).map_err(io_err)
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io { path: path.to_path_buf(), source: e })?;
    let bad = |line: usize, msg: String| Error::Config { path: path.to_path_buf(), line, msg };
    let mut lines = text.lines().enumerate();
    let mut header = |key: &str| -> Result<String> {
        let (no, line) = lines.next().ok_or_else(|| bad(0, format!("missing header '{key}'")))?;
        line.strip_prefix(key)
            .map(|v| v.trim().to_string())
            .ok_or_else(|| bad(no + 1, format!("expected header '{key}'")))
    };
    let num = |s: String, key: &str| s.parse::<f64>().map_err(|_| bad(0, format!("bad value for {key}")));
    let nx = num(header("nx")?, "nx")? as usize;
    let ny = num(header("ny")?, "ny")? as usize;
    let lx = num(header("Lx")?, "Lx")?;
    let ly = num(header("Ly")?, "Ly")?;
    let t = num(header("t")?, "t")?;
    let field = header("field")?;
    let mut values = Vec::with_capacity((nx + 1) * (ny + 1));
    for (no, line) in lines {
        for tok in line.split_whitespace() {
            values.push(tok.parse::<f64>().map_err(|_| bad(no + 1, format!("bad number '{tok}'")))?);
        }
    }
    if values.len() != (nx + 1) * (ny + 1) {
        return Err(bad(0, format!("expected {} values, found {}", (nx + 1) * (ny + 1), values.len())));
    }
    Ok(Snapshot { nx, ny, lx, ly, t, field, values })
}

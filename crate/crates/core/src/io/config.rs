//! `key = value` files with optional `[section]` headers. Lines starting
//! with `#` or `;` are comments. Keys outside any section are looked up in
//! every section.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::model::PARAMETER_NAMES;
use crate::sim::{Edge, EdgeSet, Grid2D, PressureBc, PrimingMode, SimConfig};
use crate::ParameterSet;

/// Section names with the keys each accepts. Parameter names belong to
/// `parameters`.
pub const SECTIONS: [(&str, &[&str]); 7] = [
    ("parameters", &[]),
    ("simulation", &["preset"]),
    ("grid", &["Lx", "Ly", "nx", "ny"]),
    ("time", &["dt", "t_final"]),
    ("initial", &["noise_amplitude", "seed", "priming"]),
    ("output", &["output_every", "snapshot_fields"]),
    ("solver", &["fp_tol", "fp_max_iters", "cg_tol", "newmark_beta", "newmark_gamma", "clip_limit"]),
];

const BOUNDARY_KEYS: [&str; 5] = ["clamped", "traction_s0", "traction_t_hat", "traction_edge", "sigma_pressure"];

fn section_keys(section: &str) -> Option<Vec<&'static str>> {
    if section == "parameters" {
        return Some(PARAMETER_NAMES.to_vec());
    }
    if section == "boundary" {
        return Some(BOUNDARY_KEYS.to_vec());
    }
    SECTIONS.iter().find(|(s, _)| *s == section).map(|(_, k)| k.to_vec())
}

fn all_sections() -> impl Iterator<Item = &'static str> {
    SECTIONS.iter().map(|(s, _)| *s).chain(std::iter::once("boundary"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub section: &'static str,
    pub key: String,
    pub value: String,
    pub line: usize,
}

/// A parsed, key-checked configuration file.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigFile {
    pub path: PathBuf,
    pub entries: Vec<Entry>,
}

pub fn parse_config(path: &Path) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.to_path_buf(), source: e })?;
    parse_config_str(&text, path)
}

pub fn parse_config_str(text: &str, path: &Path) -> Result<ConfigFile> {
    let err = |line: usize, msg: String| Error::Config { path: path.to_path_buf(), line, msg };
    let mut section: Option<&'static str> = None;
    let mut entries: Vec<Entry> = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line_no = no + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| err(line_no, format!("malformed section header '{line}'")))?
                .trim();
            section = Some(
                all_sections()
                    .find(|s| *s == name)
                    .ok_or_else(|| err(line_no, format!("unknown section '[{name}]'")))?,
            );
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(line_no, format!("expected 'key = value', found '{line}'")))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(err(line_no, "empty key".into()));
        }
        if value.is_empty() {
            return Err(err(line_no, format!("missing value for '{key}'")));
        }
        let owner = match section {
            Some(s) => section_keys(s)
                .filter(|keys| keys.contains(&key))
                .map(|_| s)
                .ok_or_else(|| err(line_no, format!("unknown key '{key}' in [{s}]")))?,
            None => all_sections()
                .find(|s| section_keys(s).is_some_and(|k| k.contains(&key)))
                .ok_or_else(|| err(line_no, format!("unknown key '{key}'")))?,
        };
        if let Some(prev) = entries.iter().find(|e| e.section == owner && e.key == key) {
            return Err(err(
                line_no,
                format!("duplicate key '{key}' (first set on line {}, again on line {line_no})", prev.line),
            ));
        }
        entries.push(Entry { section: owner, key: key.to_string(), value: value.to_string(), line: line_no });
    }
    Ok(ConfigFile { path: path.to_path_buf(), entries })
}

impl ConfigFile {
    fn err(&self, e: &Entry, msg: String) -> Error {
        Error::Config { path: self.path.clone(), line: e.line, msg }
    }

    fn number<T: std::str::FromStr>(&self, e: &Entry) -> Result<T> {
        e.value
            .parse::<T>()
            .map_err(|_| self.err(e, format!("malformed value '{}' for '{}'", e.value, e.key)))
    }

    /// Defaults overridden by the `[parameters]` entries.
    pub fn parameters(&self) -> Result<ParameterSet> {
        let mut p = self.base()?.params;
        for e in self.entries.iter().filter(|e| e.section == "parameters") {
            let v: f64 = self.number(e)?;
            p.set(&e.key, v).map_err(|x| self.err(e, x.to_string()))?;
        }
        // blame the last parameter line; line 0 when only defaults are involved
        let last = self.entries.iter().rev().find(|e| e.section == "parameters").map_or(0, |e| e.line);
        p.validate().map_err(|x| Error::Config { path: self.path.clone(), line: last, msg: x.to_string() })?;
        Ok(p)
    }

    fn base(&self) -> Result<SimConfig> {
        match self.entries.iter().find(|e| e.key == "preset") {
            None => Ok(SimConfig::default()),
            Some(e) => match e.value.as_str() {
                "default" => Ok(SimConfig::default()),
                "suppressed_motion" => SimConfig::suppressed_motion(128),
                "periodic_traction" => SimConfig::periodic_traction(128),
                other => Err(self.err(e, format!("unknown preset '{other}'"))),
            },
        }
    }

    /// Full simulation setup. The preset (if any) is applied first, then
    /// every other entry regardless of its position in the file.
    pub fn sim_config(&self) -> Result<SimConfig> {
        let mut cfg = self.base()?;
        cfg.params = self.parameters()?;
        let (mut lx, mut ly, mut nx, mut ny) = (cfg.grid.lx, cfg.grid.ly, cfg.grid.nx, cfg.grid.ny);
        let mut grid_line = None;
        for e in &self.entries {
            match e.key.as_str() {
                "preset" => {}
                _ if e.section == "parameters" => {}
                "Lx" => lx = self.number(e)?,
                "Ly" => ly = self.number(e)?,
                "nx" => nx = self.number(e)?,
                "ny" => ny = self.number(e)?,
                "dt" => cfg.dt = self.number(e)?,
                "t_final" => cfg.t_final = self.number(e)?,
                "noise_amplitude" => cfg.noise_amplitude = self.number(e)?,
                "seed" => cfg.seed = self.number(e)?,
                "priming" => {
                    cfg.priming = match e.value.as_str() {
                        "wave" => PrimingMode::Wave,
                        "saturated" => PrimingMode::Saturated,
                        v => return Err(self.err(e, format!("priming must be 'wave' or 'saturated', got '{v}'"))),
                    }
                }
                "output_every" => cfg.output_every = self.number(e)?,
                "snapshot_fields" => {
                    cfg.snapshot_fields = e.value.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
                }
                "fp_tol" => cfg.fp_tol = self.number(e)?,
                "fp_max_iters" => cfg.fp_max_iters = self.number(e)?,
                "cg_tol" => cfg.cg_tol = self.number(e)?,
                "newmark_beta" => cfg.newmark_beta = self.number(e)?,
                "newmark_gamma" => cfg.newmark_gamma = self.number(e)?,
                "clip_limit" => cfg.clip_limit = self.number(e)?,
                "clamped" => {
                    let edges: Result<Vec<Edge>> = e.value.split(',').map(Edge::parse).collect();
                    cfg.clamped = EdgeSet::new(&edges.map_err(|x| self.err(e, x.to_string()))?);
                }
                "traction_s0" => cfg.traction.s0 = self.number(e)?,
                "traction_t_hat" => cfg.traction.t_hat = self.number(e)?,
                "traction_edge" => cfg.traction.edge = Edge::parse(&e.value).map_err(|x| self.err(e, x.to_string()))?,
                "sigma_pressure" => {
                    cfg.sigma_pressure = match e.value.as_str() {
                        "dirichlet" => PressureBc::Dirichlet,
                        "zero_flux" => PressureBc::ZeroFlux,
                        v => return Err(self.err(e, format!("sigma_pressure must be 'dirichlet' or 'zero_flux', got '{v}'"))),
                    }
                }
                other => return Err(self.err(e, format!("unknown key '{other}'"))),
            }
            if ["Lx", "Ly", "nx", "ny"].contains(&e.key.as_str()) {
                grid_line = Some(e);
            }
        }
        cfg.grid = Grid2D::new(lx, ly, nx, ny).map_err(|x| match grid_line {
            Some(e) => self.err(e, x.to_string()),
            None => x,
        })?;
        cfg.validate().map_err(|x| Error::Config { path: self.path.clone(), line: 0, msg: x.to_string() })?;
        Ok(cfg)
    }
}

//! TOML run configuration: problem, basis, data, settings, and output
//! sections mapped onto solver types. Unknown keys are hard errors, so
//! a typo like `horizn` fails the run instead of silently using a
//! default.
//!
//! Initial data and forcing factors come from a small set of sources:
//! closed-form expressions in the grammar of [`crate::expr`], single
//! mode selectors, inline or CSV coefficient tables, and CSV sample
//! files on the analysis grid.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Deserialize;

use crate::bases::{CoefficientVector, EllipticSymbol, SpectralBasis};
use crate::expr::Expr;
use crate::fractional::TimeMesh;
use crate::solve::{
    ProblemSpec, SolverSettings, SpaceTimeForcing, SpatialData, TimeProfile, VerifySettings,
};
use crate::{Error, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemSection,
    pub basis: BasisSection,
    pub initial: DataSection,
    #[serde(default)]
    pub forcing: Option<ForcingSection>,
    #[serde(default)]
    pub settings: Option<SettingsSection>,
    #[serde(default)]
    pub output: Option<OutputSection>,
    #[serde(default)]
    pub inject: Option<InjectSection>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub rho: f64,
    pub horizon: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisSection {
    pub kind: BasisKind,
    pub cutoff: u32,
    #[serde(default)]
    pub dimension: Option<usize>,
    #[serde(default)]
    pub symbol: Option<SymbolSection>,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    Torus,
    Sine,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolSection {
    pub order: u32,
    pub coefficients: Vec<SymbolTerm>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolTerm {
    pub powers: Vec<u32>,
    pub value: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    pub kind: DataKind,
    #[serde(default)]
    pub expression: Option<String>,
    #[serde(default)]
    pub grid: Option<usize>,
    #[serde(default)]
    pub index: Option<Vec<i64>>,
    #[serde(default)]
    pub amplitude: Option<f64>,
    #[serde(default)]
    pub amplitude_im: Option<f64>,
    #[serde(default)]
    pub values: Option<Vec<CoefEntry>>,
    #[serde(default)]
    pub path: Option<String>,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum DataKind {
    Zero,
    Expression,
    Mode,
    Coefficients,
    CoefficientsCsv,
    SamplesCsv,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum CoefEntry {
    Real(f64),
    Pair([f64; 2]),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcingSection {
    pub kind: ForcingKind,
    #[serde(default)]
    pub constant: Option<f64>,
    #[serde(default)]
    pub profile: Option<String>,
    #[serde(default)]
    pub profile_csv: Option<String>,
    #[serde(default)]
    pub profile_intervals: Option<usize>,
    #[serde(default)]
    pub spatial: Option<DataSection>,
    #[serde(default)]
    pub path: Option<String>,
    #[serde(default)]
    pub grid: Option<usize>,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum ForcingKind {
    Zero,
    Separable,
    SamplesCsv,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettingsSection {
    #[serde(default)]
    pub tau: Option<f64>,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub space_probes: Option<usize>,
    #[serde(default)]
    pub probe_times: Option<Vec<f64>>,
    #[serde(default)]
    pub blackbox_points: Option<usize>,
    #[serde(default)]
    pub sample_intervals: Option<usize>,
    #[serde(default)]
    pub spectral_tol: Option<f64>,
    #[serde(default)]
    pub blackbox_tol: Option<f64>,
    #[serde(default)]
    pub ic_tol: Option<f64>,
    #[serde(default)]
    pub uniqueness_tol: Option<f64>,
    #[serde(default)]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default)]
    pub grid: Option<usize>,
    #[serde(default)]
    pub times: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InjectSection {
    pub mode: usize,
    pub delta: f64,
}

/// Everything the front end needs, assembled from one configuration.
pub struct BuiltProblem {
    pub spec: ProblemSpec,
    pub solver: SolverSettings,
    pub verify: VerifySettings,
    pub output_grid: usize,
    pub output_times: Vec<f64>,
    pub inject: Option<(usize, f64)>,
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// Resolve a configuration against the directory its file lives in
/// (CSV paths are taken relative to it).
pub fn build(config: &RunConfig, base: &Path) -> Result<BuiltProblem> {
    let basis = build_basis(&config.basis)?;
    let initial = build_spatial(&config.initial, &basis, base)?;
    let horizon = config.problem.horizon;
    let forcing = match &config.forcing {
        None => SpaceTimeForcing::Zero,
        Some(f) => build_forcing(f, &basis, horizon, base)?,
    };
    let spec = ProblemSpec {
        basis: basis.clone(),
        rho: config.problem.rho,
        horizon,
        initial,
        forcing,
    };
    let s = config.settings.as_ref();
    let solver = SolverSettings {
        tau: s.and_then(|s| s.tau),
        threads: s.and_then(|s| s.threads).unwrap_or(1),
    };
    let defaults = VerifySettings::default();
    let verify = VerifySettings {
        space_probes: s.and_then(|s| s.space_probes).unwrap_or(defaults.space_probes),
        times: s.and_then(|s| s.probe_times.clone()),
        blackbox_points: s.and_then(|s| s.blackbox_points).unwrap_or(defaults.blackbox_points),
        sample_intervals: s
            .and_then(|s| s.sample_intervals)
            .unwrap_or(defaults.sample_intervals),
        spectral_tol: s.and_then(|s| s.spectral_tol).unwrap_or(defaults.spectral_tol),
        blackbox_tol: s.and_then(|s| s.blackbox_tol).unwrap_or(defaults.blackbox_tol),
        ic_tol: s.and_then(|s| s.ic_tol).unwrap_or(defaults.ic_tol),
        uniqueness_tol: s.and_then(|s| s.uniqueness_tol).unwrap_or(defaults.uniqueness_tol),
        epsilon: s.and_then(|s| s.epsilon),
        tau: s.and_then(|s| s.tau),
        threads: solver.threads,
    };
    let out = config.output.as_ref();
    let output_grid = out.and_then(|o| o.grid).unwrap_or_else(|| basis.default_grid());
    let mut output_times = out
        .and_then(|o| o.times.clone())
        .unwrap_or_else(|| vec![horizon]);
    output_times.sort_by(|a, b| a.partial_cmp(b).expect("finite output times"));
    for &t in &output_times {
        if !(t > 0.0) || t > horizon * (1.0 + 1e-12) {
            return Err(Error::Config(format!(
                "output: time {t} outside (0, {horizon}]"
            )));
        }
    }
    let inject = config.inject.as_ref().map(|i| (i.mode, i.delta));
    Ok(BuiltProblem { spec, solver, verify, output_grid, output_times, inject })
}

fn build_basis(sec: &BasisSection) -> Result<SpectralBasis> {
    match sec.kind {
        BasisKind::Sine => {
            if sec.dimension.unwrap_or(1) != 1 {
                return Err(Error::Config("basis: the sine basis is one-dimensional".into()));
            }
            if sec.symbol.is_some() {
                return Err(Error::Config(
                    "basis: the sine basis has a fixed symbol k^2; drop [basis.symbol]".into(),
                ));
            }
            SpectralBasis::dirichlet_sine(sec.cutoff)
        }
        BasisKind::Torus => {
            let dim = sec.dimension.unwrap_or(1);
            let symbol = match &sec.symbol {
                None => EllipticSymbol::laplacian(dim),
                Some(sym) => {
                    let coeffs: Vec<(Vec<u32>, f64)> = sym
                        .coefficients
                        .iter()
                        .map(|t| (t.powers.clone(), t.value))
                        .collect();
                    EllipticSymbol::new(dim, sym.order, coeffs)?
                }
            };
            SpectralBasis::torus(symbol, sec.cutoff)
        }
    }
}

/// Variable names for spatial expressions: `x` in one dimension (with
/// `x1` as an alias), `x1..xN` otherwise.
fn spatial_vars(dim: usize) -> Vec<String> {
    if dim == 1 {
        vec!["x".into(), "x1".into()]
    } else {
        (1..=dim).map(|i| format!("x{i}")).collect()
    }
}

fn sample_expression(expr: &Expr, basis: &SpectralBasis, grid: usize, dim1: bool) -> Result<Vec<f64>> {
    let n = basis.dimension();
    let axis = basis.axis_points(grid);
    let total = basis.grid_len(grid);
    let mut out = Vec::with_capacity(total);
    let mut coords = vec![0.0; if dim1 { 2 } else { n }];
    for flat in 0..total {
        let mut rem = flat;
        for j in (0..n).rev() {
            let idx = rem % axis.len();
            rem /= axis.len();
            if dim1 {
                coords[0] = axis[idx];
                coords[1] = axis[idx];
            } else {
                coords[j] = axis[idx];
            }
        }
        out.push(expr.eval(&coords)?);
    }
    Ok(out)
}

fn build_spatial(sec: &DataSection, basis: &SpectralBasis, base: &Path) -> Result<SpatialData> {
    let require = |opt: bool, what: &str| {
        if opt {
            Ok(())
        } else {
            Err(Error::Config(format!("data: kind {:?} needs `{what}`", sec.kind)))
        }
    };
    match sec.kind {
        DataKind::Zero => Ok(SpatialData::Zero),
        DataKind::Expression => {
            require(sec.expression.is_some(), "expression")?;
            let dim = basis.dimension();
            let vars = spatial_vars(dim);
            let var_refs: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
            let expr = Expr::parse(sec.expression.as_ref().unwrap(), &var_refs)?;
            let grid = sec.grid.unwrap_or_else(|| basis.default_grid());
            let values = sample_expression(&expr, basis, grid, dim == 1)?;
            Ok(SpatialData::Samples { grid, values })
        }
        DataKind::Mode => {
            require(sec.index.is_some(), "index")?;
            let index = sec.index.as_ref().unwrap();
            let amp = Complex64::new(
                sec.amplitude.unwrap_or(1.0),
                sec.amplitude_im.unwrap_or(0.0),
            );
            let pos = basis
                .modes()
                .iter()
                .position(|m| m.index == *index)
                .ok_or_else(|| {
                    Error::Config(format!("data: mode index {index:?} not enumerated at this cutoff"))
                })?;
            let mut c = CoefficientVector::zeros(basis);
            c.values[pos] = amp;
            // a lone torus exponential is complex; pair it with its
            // conjugate partner so the selected field is real
            if basis.is_torus() {
                let neg: Vec<i64> = index.iter().map(|v| -v).collect();
                if neg != *index {
                    let npos = basis
                        .modes()
                        .iter()
                        .position(|m| m.index == neg)
                        .expect("mirror mode enumerated with its partner");
                    c.values[npos] = amp.conj();
                }
            }
            Ok(SpatialData::Coefficients(c))
        }
        DataKind::Coefficients => {
            require(sec.values.is_some(), "values")?;
            let values = sec.values.as_ref().unwrap();
            let c: Vec<Complex64> = values
                .iter()
                .map(|e| match e {
                    CoefEntry::Real(v) => Complex64::new(*v, 0.0),
                    CoefEntry::Pair([re, im]) => Complex64::new(*re, *im),
                })
                .collect();
            Ok(SpatialData::Coefficients(CoefficientVector { values: c }))
        }
        DataKind::CoefficientsCsv => {
            require(sec.path.is_some(), "path")?;
            let rows = read_csv(&resolve_path(base, sec.path.as_ref().unwrap()))?;
            let dim = basis.dimension();
            let mut c = CoefficientVector::zeros(basis);
            for row in &rows {
                if row.len() != dim + 2 {
                    return Err(Error::Config(format!(
                        "coefficients csv: rows need {} index columns plus re, im",
                        dim
                    )));
                }
                let index: Vec<i64> = row[..dim].iter().map(|&v| v.round() as i64).collect();
                let pos = basis
                    .modes()
                    .iter()
                    .position(|m| m.index == index)
                    .ok_or_else(|| {
                        Error::Config(format!(
                            "coefficients csv: index {index:?} not enumerated at this cutoff"
                        ))
                    })?;
                c.values[pos] = Complex64::new(row[dim], row[dim + 1]);
            }
            Ok(SpatialData::Coefficients(c))
        }
        DataKind::SamplesCsv => {
            require(sec.path.is_some(), "path")?;
            let rows = read_csv(&resolve_path(base, sec.path.as_ref().unwrap()))?;
            let values: Vec<f64> = rows.into_iter().flatten().collect();
            let grid = sec.grid.unwrap_or_else(|| basis.default_grid());
            if values.len() != basis.grid_len(grid) {
                return Err(Error::Config(format!(
                    "samples csv: {} values for a grid of {}",
                    values.len(),
                    basis.grid_len(grid)
                )));
            }
            Ok(SpatialData::Samples { grid, values })
        }
    }
}

fn build_forcing(
    sec: &ForcingSection,
    basis: &SpectralBasis,
    horizon: f64,
    base: &Path,
) -> Result<SpaceTimeForcing> {
    match sec.kind {
        ForcingKind::Zero => Ok(SpaceTimeForcing::Zero),
        ForcingKind::Separable => {
            let spatial_sec = sec
                .spatial
                .as_ref()
                .ok_or_else(|| Error::Config("forcing: separable needs `spatial`".into()))?;
            let spatial = build_spatial(spatial_sec, basis, base)?;
            let given = [
                sec.constant.is_some(),
                sec.profile.is_some(),
                sec.profile_csv.is_some(),
            ];
            if given.iter().filter(|g| **g).count() != 1 {
                return Err(Error::Config(
                    "forcing: give exactly one of `constant`, `profile`, `profile_csv`".into(),
                ));
            }
            let profile = if let Some(c) = sec.constant {
                TimeProfile::Constant(c)
            } else if let Some(src) = &sec.profile {
                let expr = Expr::parse(src, &["t"])?;
                let m = sec.profile_intervals.unwrap_or(512);
                let mesh = TimeMesh::uniform(horizon, m.max(2))?;
                let values: Vec<f64> = mesh
                    .nodes()
                    .iter()
                    .map(|&t| expr.eval(&[t]))
                    .collect::<Result<_>>()?;
                TimeProfile::Samples { mesh, values }
            } else {
                let rows = read_csv(&resolve_path(base, sec.profile_csv.as_ref().unwrap()))?;
                let (mesh, mut cols) = split_time_rows(rows, 1)?;
                TimeProfile::Samples { mesh, values: cols.remove(0) }
            };
            Ok(SpaceTimeForcing::Separable { profile, spatial })
        }
        ForcingKind::SamplesCsv => {
            let path = sec
                .path
                .as_ref()
                .ok_or_else(|| Error::Config("forcing: samples_csv needs `path`".into()))?;
            let grid = sec.grid.unwrap_or_else(|| basis.default_grid());
            let len = basis.grid_len(grid);
            let rows = read_csv(&resolve_path(base, path))?;
            let (mesh, cols) = split_time_rows(rows, len)?;
            // cols is column-major; forcing slices are row-major per time
            let slices: Vec<Vec<f64>> = (0..mesh.nodes().len())
                .map(|ti| cols.iter().map(|c| c[ti]).collect())
                .collect();
            Ok(SpaceTimeForcing::Samples { mesh, grid, slices })
        }
    }
}

/// Split rows of (t, v_1..v_w) into a time mesh and w value columns.
fn split_time_rows(rows: Vec<Vec<f64>>, width: usize) -> Result<(TimeMesh, Vec<Vec<f64>>)> {
    if rows.is_empty() {
        return Err(Error::Config("csv: no data rows".into()));
    }
    let mut nodes = Vec::with_capacity(rows.len());
    let mut cols = vec![Vec::with_capacity(rows.len()); width];
    for row in &rows {
        if row.len() != width + 1 {
            return Err(Error::Config(format!(
                "csv: row has {} columns, expected t plus {width} values",
                row.len()
            )));
        }
        nodes.push(row[0]);
        for (j, col) in cols.iter_mut().enumerate() {
            col.push(row[j + 1]);
        }
    }
    let mesh = TimeMesh::from_nodes(nodes)
        .map_err(|e| Error::Config(format!("csv: first column is not a time mesh: {e}")))?;
    Ok((mesh, cols))
}

fn resolve_path(base: &Path, rel: &str) -> PathBuf {
    let p = Path::new(rel);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Numeric CSV: comma-separated values, LF lines, `#` comments; one
/// non-numeric header line is tolerated and skipped.
pub fn read_csv(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    let mut first_data_line = true;
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> =
            line.split(',').map(|f| f.trim().parse::<f64>()).collect();
        match parsed {
            Ok(row) => {
                rows.push(row);
                first_data_line = false;
            }
            Err(_) if first_data_line => {
                // header row
                first_data_line = false;
            }
            Err(e) => {
                return Err(Error::Config(format!(
                    "{}:{}: bad number: {e}",
                    path.display(),
                    ln + 1
                )))
            }
        }
    }
    Ok(rows)
}

//! Text output formats and run orchestration.
//!
//! All floating-point values are written with 17 significant digits
//! (`0` for zero) so that reading a file back reproduces every binary64
//! value bit for bit.
//!
//! * snapshot: `# key = value` header lines (`time`, `n_x`, `n_v`, `x_low`,
//!   `x_high`, `v_low`, `v_high`), then one line per spatial cell with the
//!   `n_v` velocity samples comma-separated in ascending order.
//! * moments: CSV with header `x,rho,u,T,m,E`, one line per spatial cell.
//! * conservation: CSV with header `step,time,drho,dm,dE,min_f,min_mtilde`.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::error::{Error, Result};
use crate::field::DistributionField;
use crate::grid::PhaseSpaceGrid;
use crate::moments::FluidMoments;
use crate::stepper::{ConservationRecord, ConservationSeries, Simulation, TimeStepping};
use crate::SolverConfig;

pub const MOMENTS_HEADER: &str = "x,rho,u,T,m,E";
pub const CONSERVATION_HEADER: &str = "step,time,drho,dm,dE,min_f,min_mtilde";
pub const CONSERVATION_FILE: &str = "conservation.csv";
pub const METADATA_FILE: &str = "metadata.txt";

/// Formats `x` with 17 significant digits; zero prints as `0` (or `-0`).
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        if x.is_sign_negative() { "-0".into() } else { "0".into() }
    } else {
        format!("{x:.16e}")
    }
}

pub fn snapshot_file_name(step: usize) -> String {
    format!("pdf_{step:06}.csv")
}

pub fn moments_file_name(step: usize) -> String {
    format!("moments_{step:06}.csv")
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    w.write_all(text.as_bytes()).map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}

fn parse_f64(path: &Path, line: usize, raw: &str) -> Result<f64> {
    raw.trim().parse().map_err(|_| Error::Io {
        path: path.to_path_buf(),
        source: std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            format!("line {line}: not a number: {raw:?}"),
        ),
    })
}

fn bad_data(path: &Path, message: String) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source: std::io::Error::new(std::io::ErrorKind::InvalidData, message),
    }
}

pub fn format_snapshot(f: &DistributionField, grid: &PhaseSpaceGrid, time: f64) -> String {
    let mut s = String::with_capacity(f.values().len() * 24 + 256);
    let _ = writeln!(s, "# time = {}", fmt_f64(time));
    let _ = writeln!(s, "# n_x = {}", f.n_x());
    let _ = writeln!(s, "# n_v = {}", f.n_v());
    let _ = writeln!(s, "# x_low = {}", fmt_f64(grid.x_low()));
    let _ = writeln!(s, "# x_high = {}", fmt_f64(grid.x_high()));
    let _ = writeln!(s, "# v_low = {}", fmt_f64(grid.v_low()));
    let _ = writeln!(s, "# v_high = {}", fmt_f64(grid.v_high()));
    for cell in f.cells() {
        let mut first = true;
        for &v in cell {
            if !first {
                s.push(',');
            }
            first = false;
            s.push_str(&fmt_f64(v));
        }
        s.push('\n');
    }
    s
}

pub fn write_snapshot(f: &DistributionField, grid: &PhaseSpaceGrid, time: f64, path: &Path) -> Result<()> {
    f.check_grid(grid)?;
    write_text(path, &format_snapshot(f, grid, time))
}

/// Contents of a snapshot file.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotFile {
    pub time: f64,
    pub x_low: f64,
    pub x_high: f64,
    pub v_low: f64,
    pub v_high: f64,
    pub field: DistributionField,
}

pub fn read_snapshot(path: &Path) -> Result<SnapshotFile> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut header = std::collections::HashMap::new();
    let mut values = Vec::new();
    let mut rows = 0;
    let mut n_v = None;
    for (idx, line) in text.lines().enumerate() {
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((k, v)) = rest.split_once('=') {
                header.insert(k.trim().to_string(), v.trim().to_string());
            }
            continue;
        }
        let before = values.len();
        for raw in line.split(',') {
            values.push(parse_f64(path, idx + 1, raw)?);
        }
        let width = values.len() - before;
        if *n_v.get_or_insert(width) != width {
            return Err(bad_data(path, format!("line {}: ragged row", idx + 1)));
        }
        rows += 1;
    }
    let get = |k: &str| -> Result<f64> {
        let raw = header
            .get(k)
            .ok_or_else(|| bad_data(path, format!("missing header {k}")))?;
        parse_f64(path, 0, raw)
    };
    let n_x: f64 = get("n_x")?;
    let n_v_hdr: f64 = get("n_v")?;
    if n_x as usize != rows || n_v.unwrap_or(0) != n_v_hdr as usize {
        return Err(bad_data(path, "header dimensions disagree with data".into()));
    }
    Ok(SnapshotFile {
        time: get("time")?,
        x_low: get("x_low")?,
        x_high: get("x_high")?,
        v_low: get("v_low")?,
        v_high: get("v_high")?,
        field: DistributionField::from_vec(rows, n_v_hdr as usize, values),
    })
}

pub fn format_moments(moments: &FluidMoments, grid: &PhaseSpaceGrid) -> String {
    let mut s = String::with_capacity(moments.len() * 140 + 16);
    s.push_str(MOMENTS_HEADER);
    s.push('\n');
    for i in 0..moments.len() {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            fmt_f64(grid.x_centers()[i]),
            fmt_f64(moments.rho[i]),
            fmt_f64(moments.u[i]),
            fmt_f64(moments.temperature[i]),
            fmt_f64(moments.mom[i]),
            fmt_f64(moments.energy[i]),
        );
    }
    s
}

pub fn write_moments(moments: &FluidMoments, grid: &PhaseSpaceGrid, path: &Path) -> Result<()> {
    if moments.len() != grid.n_x() {
        return Err(Error::ShapeMismatch {
            expected_x: grid.n_x(),
            expected_v: grid.n_v(),
            found_x: moments.len(),
            found_v: grid.n_v(),
        });
    }
    write_text(path, &format_moments(moments, grid))
}

/// Reads a moments CSV back as `(x, moments)`.
pub fn read_moments(path: &Path) -> Result<(Vec<f64>, FluidMoments)> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut lines = text.lines();
    if lines.next() != Some(MOMENTS_HEADER) {
        return Err(bad_data(path, "missing moments header".into()));
    }
    let mut x = Vec::new();
    let mut m = FluidMoments {
        rho: Vec::new(),
        mom: Vec::new(),
        energy: Vec::new(),
        u: Vec::new(),
        temperature: Vec::new(),
    };
    for (idx, line) in lines.enumerate() {
        let cols: Vec<f64> = line
            .split(',')
            .map(|c| parse_f64(path, idx + 2, c))
            .collect::<Result<_>>()?;
        if cols.len() != 6 {
            return Err(bad_data(path, format!("line {}: expected 6 columns", idx + 2)));
        }
        x.push(cols[0]);
        m.rho.push(cols[1]);
        m.u.push(cols[2]);
        m.temperature.push(cols[3]);
        m.mom.push(cols[4]);
        m.energy.push(cols[5]);
    }
    Ok((x, m))
}

fn format_record(r: &ConservationRecord) -> String {
    format!(
        "{},{},{},{},{},{},{}\n",
        r.step,
        fmt_f64(r.time),
        fmt_f64(r.drho),
        fmt_f64(r.dm),
        fmt_f64(r.de),
        fmt_f64(r.min_f),
        fmt_f64(r.min_mtilde)
    )
}

pub fn format_conservation(series: &ConservationSeries) -> String {
    let mut s = String::from(CONSERVATION_HEADER);
    s.push('\n');
    for r in &series.records {
        s.push_str(&format_record(r));
    }
    s
}

pub fn write_conservation(series: &ConservationSeries, path: &Path) -> Result<()> {
    write_text(path, &format_conservation(series))
}

pub fn read_conservation(path: &Path) -> Result<ConservationSeries> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let mut lines = text.lines();
    if lines.next() != Some(CONSERVATION_HEADER) {
        return Err(bad_data(path, "missing conservation header".into()));
    }
    let mut records = Vec::new();
    for (idx, line) in lines.enumerate() {
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 7 {
            return Err(bad_data(path, format!("line {}: expected 7 columns", idx + 2)));
        }
        let num = |k: usize| parse_f64(path, idx + 2, cols[k]);
        records.push(ConservationRecord {
            step: cols[0]
                .parse()
                .map_err(|_| bad_data(path, format!("line {}: bad step", idx + 2)))?,
            time: num(1)?,
            drho: num(2)?,
            dm: num(3)?,
            de: num(4)?,
            min_f: num(5)?,
            min_mtilde: num(6)?,
        });
    }
    Ok(ConservationSeries { records })
}

/// Parameters a run actually used, echoed after planning.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMetadata {
    pub version: &'static str,
    pub n_x: usize,
    pub n_v: usize,
    pub x_low: f64,
    pub x_high: f64,
    pub v_low: f64,
    pub v_high: f64,
    pub dx: f64,
    pub dv: f64,
    pub v_max_abs: f64,
    pub epsilon: f64,
    pub cfl_requested: f64,
    pub timing: TimeStepping,
    pub correction_enabled: bool,
    pub output_every: usize,
    pub deviation_denominators: [f64; 3],
    pub wall_clock_seconds: f64,
}

impl RunMetadata {
    pub fn from_simulation(sim: &Simulation, wall_clock_seconds: f64) -> Self {
        let g = sim.grid();
        let c = sim.config();
        Self {
            version: env!("CARGO_PKG_VERSION"),
            n_x: g.n_x(),
            n_v: g.n_v(),
            x_low: g.x_low(),
            x_high: g.x_high(),
            v_low: g.v_low(),
            v_high: g.v_high(),
            dx: g.dx(),
            dv: g.dv(),
            v_max_abs: g.v_max_abs(),
            epsilon: c.epsilon,
            cfl_requested: c.cfl,
            timing: *sim.timing(),
            correction_enabled: c.correction_enabled,
            output_every: c.output_every,
            deviation_denominators: sim.deviation_denominators(),
            wall_clock_seconds,
        }
    }

    pub fn to_text(&self) -> String {
        let t = &self.timing;
        let d = &self.deviation_denominators;
        let mut s = String::new();
        let _ = writeln!(s, "version = {}", self.version);
        let _ = writeln!(s, "nx = {}", self.n_x);
        let _ = writeln!(s, "nv = {}", self.n_v);
        for (k, v) in [
            ("x_low", self.x_low),
            ("x_high", self.x_high),
            ("v_low", self.v_low),
            ("v_high", self.v_high),
            ("dx", self.dx),
            ("dv", self.dv),
            ("v_max_abs", self.v_max_abs),
            ("epsilon", self.epsilon),
            ("cfl_requested", self.cfl_requested),
            ("cfl_effective", t.cfl_effective),
            ("dt", t.dt),
            ("final_time", t.final_time),
            ("theta_half", t.theta_half),
        ] {
            let _ = writeln!(s, "{k} = {}", fmt_f64(v));
        }
        let _ = writeln!(s, "n_steps = {}", t.n_steps);
        let _ = writeln!(s, "theta_formula = {}", t.theta_rule.name());
        let _ = writeln!(s, "correction = {}", self.correction_enabled);
        let _ = writeln!(s, "output_every = {}", self.output_every);
        let _ = writeln!(
            s,
            "deviation_denominators = {},{},{}",
            fmt_f64(d[0]),
            fmt_f64(d[1]),
            fmt_f64(d[2])
        );
        let _ = writeln!(s, "diagnostic_summation = plain");
        let _ = writeln!(s, "wall_clock_seconds = {:.3}", self.wall_clock_seconds);
        s
    }
}

/// Summary returned by [`run_to_dir`].
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub metadata: RunMetadata,
    pub series: ConservationSeries,
    pub output_dir: PathBuf,
    pub files: Vec<PathBuf>,
}

/// Runs `cfg` to completion, writing snapshots, moments, the conservation
/// series and run metadata into `dir`.
pub fn run_to_dir(cfg: &SolverConfig, dir: &Path) -> Result<RunSummary> {
    let started = Instant::now();
    let grid = cfg.grid.build()?;
    let mut sim = Simulation::new(&grid, &cfg.run)?;
    fs::create_dir_all(dir).map_err(io_err(dir))?;

    let mut files = Vec::new();
    sim.run_with(|snap| {
        let pdf = dir.join(snapshot_file_name(snap.step));
        write_snapshot(&snap.field, &grid, snap.time, &pdf)?;
        let mom = dir.join(moments_file_name(snap.step));
        write_moments(&snap.moments, &grid, &mom)?;
        files.push(pdf);
        files.push(mom);
        Ok(())
    })?;

    let cons = dir.join(CONSERVATION_FILE);
    write_conservation(sim.series(), &cons)?;
    files.push(cons);

    let metadata = RunMetadata::from_simulation(&sim, started.elapsed().as_secs_f64());
    let meta = dir.join(METADATA_FILE);
    write_text(&meta, &metadata.to_text())?;
    files.push(meta);

    Ok(RunSummary {
        metadata,
        series: sim.series().clone(),
        output_dir: dir.to_path_buf(),
        files,
    })
}

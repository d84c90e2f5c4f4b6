//! Flat `key = value` run configuration.
//!
//! One assignment per line, `#` starts a comment, blank lines are ignored.
//! Every key is optional; missing keys keep the defaults of
//! [`SolverConfig::default`]. Unknown or repeated keys are errors.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, RunConfig};

pub const KEYS: &[&str] = &[
    "nx",
    "nv",
    "x_low",
    "x_high",
    "v_low",
    "v_high",
    "epsilon",
    "cfl",
    "final_time",
    "inner_halfwidth",
    "rho_inner",
    "u_inner",
    "T_inner",
    "rho_outer",
    "u_outer",
    "T_outer",
    "correction",
    "output_every",
    "output_dir",
];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolverConfig {
    pub grid: GridSpec,
    pub run: RunConfig,
    pub output_dir: Option<PathBuf>,
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        self.grid.build()?;
        self.run.validate()
    }
}

fn parse_value<T: std::str::FromStr>(line: usize, key: &str, raw: &str) -> Result<T> {
    raw.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid value {raw:?} for {key}"),
    })
}

fn parse_bool(line: usize, key: &str, raw: &str) -> Result<bool> {
    match raw {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(Error::Parse {
            line,
            message: format!("{key} must be true or false, got {raw:?}"),
        }),
    }
}

/// Parses and validates a config document.
pub fn parse_config(text: &str) -> Result<SolverConfig> {
    let mut cfg = SolverConfig::default();
    let mut seen = HashSet::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
            line,
            message: format!("expected `key = value`, got {content:?}"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if value.is_empty() {
            return Err(Error::Parse {
                line,
                message: format!("missing value for {key}"),
            });
        }
        if !KEYS.contains(&key) {
            return Err(Error::Parse {
                line,
                message: format!("unknown key {key:?}"),
            });
        }
        if !seen.insert(key.to_string()) {
            return Err(Error::Parse {
                line,
                message: format!("duplicate key {key:?}"),
            });
        }

        let g = &mut cfg.grid;
        let r = &mut cfg.run;
        match key {
            "nx" => g.n_x = parse_value(line, key, value)?,
            "nv" => g.n_v = parse_value(line, key, value)?,
            "x_low" => g.x_low = parse_value(line, key, value)?,
            "x_high" => g.x_high = parse_value(line, key, value)?,
            "v_low" => g.v_low = parse_value(line, key, value)?,
            "v_high" => g.v_high = parse_value(line, key, value)?,
            "epsilon" => r.epsilon = parse_value(line, key, value)?,
            "cfl" => r.cfl = parse_value(line, key, value)?,
            "final_time" => r.final_time = parse_value(line, key, value)?,
            "inner_halfwidth" => r.ic.inner_halfwidth = parse_value(line, key, value)?,
            "rho_inner" => r.ic.inner.rho = parse_value(line, key, value)?,
            "u_inner" => r.ic.inner.u = parse_value(line, key, value)?,
            "T_inner" => r.ic.inner.temperature = parse_value(line, key, value)?,
            "rho_outer" => r.ic.outer.rho = parse_value(line, key, value)?,
            "u_outer" => r.ic.outer.u = parse_value(line, key, value)?,
            "T_outer" => r.ic.outer.temperature = parse_value(line, key, value)?,
            "correction" => r.correction_enabled = parse_bool(line, key, value)?,
            "output_every" => r.output_every = parse_value(line, key, value)?,
            "output_dir" => cfg.output_dir = Some(PathBuf::from(value)),
            _ => unreachable!("key list and match arms disagree"),
        }
    }

    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<SolverConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{FluidState, InitialCondition};

    #[test]
    fn empty_document_gives_reference_setup() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg.grid, GridSpec::default());
        assert_eq!((cfg.grid.n_x, cfg.grid.n_v), (256, 128));
        assert_eq!((cfg.grid.x_low, cfg.grid.x_high, cfg.grid.v_low, cfg.grid.v_high), (-1.25, 1.25, -7.0, 7.0));
        assert_eq!(cfg.run.epsilon, 0.01);
        assert_eq!(cfg.run.cfl, 1.95);
        assert_eq!(cfg.run.final_time, 0.16);
        assert!(cfg.run.correction_enabled);
        assert_eq!(
            cfg.run.ic,
            InitialCondition {
                inner_halfwidth: 0.5,
                inner: FluidState::new(1.0, 0.25, 1.0),
                outer: FluidState::new(0.125, -0.1, 0.8),
            }
        );
        assert_eq!(cfg.output_dir, None);
    }

    #[test]
    fn partial_override() {
        let cfg = parse_config("cfl = 1.0\ncorrection = false").unwrap();
        let mut want = SolverConfig::default();
        want.run.cfl = 1.0;
        want.run.correction_enabled = false;
        assert_eq!(cfg, want);
    }

    #[test]
    fn comments_and_whitespace() {
        let cfg = parse_config("# header\n\n  nx = 64   # fewer cells\nT_inner=2.5\noutput_dir = out/run 1\n").unwrap();
        assert_eq!(cfg.grid.n_x, 64);
        assert_eq!(cfg.run.ic.inner.temperature, 2.5);
        assert_eq!(cfg.output_dir, Some(PathBuf::from("out/run 1")));
    }

    #[test]
    fn zero_epsilon_is_rejected() {
        assert!(matches!(parse_config("epsilon = 0"), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn range_violations() {
        for doc in ["cfl = 2.5", "final_time = 0", "nx = 4", "v_low = 7", "T_outer = -1", "rho_inner = 0"] {
            assert!(parse_config(doc).is_err(), "{doc}");
        }
    }

    #[test]
    fn syntax_errors_report_line() {
        let cases = [
            ("nx = 64\nbogus = 1", 2),
            ("\n\nnx 64", 3),
            ("nx = sixty", 1),
            ("correction = yes", 1),
            ("nx = 64\nnx = 32", 2),
            ("epsilon =", 1),
            ("nx = -3", 1),
        ];
        for (doc, want) in cases {
            match parse_config(doc) {
                Err(Error::Parse { line, .. }) => assert_eq!(line, want, "{doc:?}"),
                other => panic!("{doc:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn keys_are_case_sensitive() {
        assert!(parse_config("t_inner = 1").is_err());
        assert!(parse_config("EPSILON = 1").is_err());
    }
}

//! Run configuration: a `key = value` file merged under command-line flags.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use weyl_core::checks::TestFunction;
use weyl_core::group::GroupTag;
use weyl_core::setup::HarmonicResolution;

use crate::CliError;

/// The smallest node count accepted on any grid axis.
pub const MIN_AXIS_NODES: usize = 8;

/// Per-axis node counts from a `--grid` spec such as `rep=128,angular=64,b=64,a=32`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GridSpec {
    pub rep: Option<usize>,
    pub angular: Option<usize>,
    pub b: Option<usize>,
    pub a: Option<usize>,
    pub angle: Option<usize>,
}

impl GridSpec {
    pub fn parse(s: &str) -> Result<GridSpec, CliError> {
        let mut spec = GridSpec::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("grid entry `{part}` is not key=count")))?;
            let n: usize = value
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("grid count `{value}` is not an integer")))?;
            if n < MIN_AXIS_NODES {
                return Err(CliError::Config(format!(
                    "grid axis `{key}` has {n} nodes, at least {MIN_AXIS_NODES} are required"
                )));
            }
            let slot = match key.trim() {
                "rep" => &mut spec.rep,
                "angular" => &mut spec.angular,
                "b" => &mut spec.b,
                "a" => &mut spec.a,
                "angle" => &mut spec.angle,
                other => return Err(CliError::Config(format!("unknown grid axis `{other}`"))),
            };
            *slot = Some(n);
        }
        Ok(spec)
    }

    /// The desk resolution of `tag` with the overridden axes replaced.
    pub fn resolution(&self, tag: GroupTag) -> Result<HarmonicResolution, CliError> {
        let mut res = HarmonicResolution::desk(tag);
        if let Some(n) = self.rep {
            res.rep_radial = n;
        }
        if let Some(n) = self.angular {
            if tag == GroupTag::Affine {
                return Err(CliError::Config("the affine group has no angular axis".into()));
            }
            res.rep_angular = n;
            if tag == GroupTag::Sim2 {
                res.angle_count = n;
            }
        }
        if let Some(n) = self.b {
            res.b_count = n;
        }
        if let Some(n) = self.a {
            res.a_count = n;
            res.a_first = -(n as i64 / 2);
        }
        if let Some(n) = self.angle {
            match tag {
                GroupTag::PoincareAff => {
                    res.angle_count = n;
                    res.angle_first = -(n as i64 / 2);
                }
                GroupTag::Sim2 => {
                    if !res.rep_angular.is_multiple_of(n) {
                        return Err(CliError::Config(format!(
                            "SIM(2) angle count {n} must divide the angular count {}",
                            res.rep_angular
                        )));
                    }
                    res.angle_stride = res.rep_angular / n;
                    res.angle_count = n;
                }
                GroupTag::Affine => return Err(CliError::Config("the affine group has no angle axis".into())),
            }
        }
        Ok(res)
    }

    /// Representation-check grids `(radial, angular)`.
    pub fn rep_counts(&self) -> (usize, usize) {
        (self.rep.unwrap_or(128), self.angular.unwrap_or(64))
    }
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// `None` runs every group (check suites only).
    pub group: Option<GroupTag>,
    pub alpha: Option<f64>,
    pub p: Option<f64>,
    pub l: f64,
    pub r: f64,
    pub grid: GridSpec,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub tolerance: Option<f64>,
    pub function: TestFunction,
    pub trials: usize,
    pub decades: u32,
    pub per_decade: u32,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            group: None,
            alpha: None,
            p: None,
            l: 1.0,
            r: 1.0,
            grid: GridSpec::default(),
            seed: 0,
            out: None,
            tolerance: None,
            function: TestFunction::Bump,
            trials: 1000,
            decades: 16,
            per_decade: 4,
        }
    }
}

/// Read a `key = value` file; blank lines and `#` comments are skipped.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("config line {} is not key = value", n + 1)))?;
        map.insert(k.trim().to_ascii_lowercase(), v.trim().to_string());
    }
    Ok(map)
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.parse()
        .map_err(|_| CliError::Config(format!("`{key}` has an unreadable value `{v}`")))
}

fn positive(key: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Config(format!("`{key}` must be positive, got {v}")))
    }
}

impl RunConfig {
    /// Apply one setting by key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "group" => {
                self.group = Some(
                    GroupTag::parse(value)
                        .ok_or_else(|| CliError::Config(format!("unknown group `{value}` (affine, sim2, paff)")))?,
                )
            }
            "alpha" => self.alpha = Some(parse_num(key, value)?),
            "p" => self.p = Some(parse_num(key, value)?),
            "l" => self.l = positive(key, parse_num(key, value)?)?,
            "r" => self.r = positive(key, parse_num(key, value)?)?,
            "grid" => self.grid = GridSpec::parse(value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "tolerance" => self.tolerance = Some(positive(key, parse_num(key, value)?)?),
            "function" => {
                self.function = match value {
                    "bump" => TestFunction::Bump,
                    "zero" => TestFunction::Zero,
                    other => return Err(CliError::Config(format!("unknown test function `{other}` (bump, zero)"))),
                }
            }
            "trials" => {
                self.trials = parse_num(key, value)?;
                if self.trials == 0 {
                    return Err(CliError::Config("`trials` must be at least 1".into()));
                }
            }
            "decades" => {
                self.decades = parse_num(key, value)?;
                if self.decades < 2 {
                    return Err(CliError::Config("`decades` must be at least 2".into()));
                }
            }
            "per_decade" => {
                self.per_decade = parse_num(key, value)?;
                if self.per_decade < 3 {
                    return Err(CliError::Config("`per_decade` must be at least 3".into()));
                }
            }
            other => return Err(CliError::Config(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    /// Defaults, then the config file, then the flags.
    pub fn resolve(file: Option<&Path>, flags: &[(&str, Option<String>)]) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = file {
            for (k, v) in read_config_file(path)? {
                cfg.set(&k, &v)?;
            }
        }
        for (k, v) in flags {
            if let Some(v) = v {
                cfg.set(k, v)?;
            }
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_spec_round_trip() {
        let g = GridSpec::parse("rep=64, b=16,a=12").unwrap();
        assert_eq!(g.rep, Some(64));
        assert_eq!(g.b, Some(16));
        let res = g.resolution(GroupTag::Affine).unwrap();
        assert_eq!((res.rep_radial, res.b_count, res.a_count, res.a_first), (64, 16, 12, -6));
    }

    #[test]
    fn grid_spec_rejects_coarse_axes() {
        assert!(matches!(GridSpec::parse("rep=4"), Err(CliError::Config(_))));
        assert!(GridSpec::parse("rep").is_err());
        assert!(GridSpec::parse("zeta=12").is_err());
    }

    #[test]
    fn config_comments_and_case() {
        let m = parse_config("# header\nAlpha = 0.3  # trailing\n\nL=2\n").unwrap();
        assert_eq!(m.get("alpha").map(String::as_str), Some("0.3"));
        assert_eq!(m.get("l").map(String::as_str), Some("2"));
        assert!(parse_config("no equals sign").is_err());
    }

    #[test]
    fn flags_override_file_values() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        fs::write(&path, "alpha = 0.3\nseed = 5\ngroup = sim2\n").unwrap();
        let cfg = RunConfig::resolve(Some(&path), &[("alpha", Some("0.45".into())), ("seed", None)]).unwrap();
        assert_eq!(cfg.alpha, Some(0.45));
        assert_eq!(cfg.seed, 5);
        assert_eq!(cfg.group, Some(GroupTag::Sim2));
    }

    #[test]
    fn bad_values_are_config_errors() {
        let mut cfg = RunConfig::default();
        assert!(cfg.set("group", "so3").is_err());
        assert!(cfg.set("l", "-1").is_err());
        assert!(cfg.set("tolerance", "0").is_err());
        assert!(cfg.set("mystery", "1").is_err());
    }
}

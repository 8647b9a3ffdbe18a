use std::path::{Path, PathBuf};

use super::{CaseId, CaseParams, Discretization, HarnessError};
use crate::coupling::CouplingConfig;
use crate::geometry::MapStrategy;

/// Everything a CLI run needs, read from a sectioned key-value file.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub case: CaseId,
    pub params: CaseParams,
    pub disc: Discretization,
    pub h0: f64,
    pub levels: usize,
    pub coupling: CouplingConfig,
    pub omega_grid: Vec<f64>,
    /// Also solve the coupled problem directly and report the difference.
    pub monolithic_check: bool,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            case: CaseId::Dipole,
            params: CaseParams::default(),
            disc: Discretization::default(),
            h0: 0.2,
            levels: 4,
            coupling: CouplingConfig::default(),
            omega_grid: (1..10).map(|i| i as f64 / 10.0).collect(),
            monolithic_check: false,
            output_dir: PathBuf::from("output"),
        }
    }
}

const KNOWN_KEYS: &[&str] = &[
    "geometry.case",
    "geometry.gamma_radius",
    "geometry.gamma0_radius",
    "geometry.constant",
    "geometry.regularity_bound",
    "material.kappa",
    "discretization.k",
    "discretization.h0",
    "discretization.levels",
    "discretization.tau",
    "discretization.map",
    "discretization.parallel",
    "coupling.omega",
    "coupling.tol",
    "coupling.n",
    "coupling.max_iter",
    "coupling.aitken",
    "coupling.omega_grid",
    "coupling.monolithic_check",
    "output.dir",
];

fn err(key: &str, msg: impl Into<String>) -> HarnessError {
    HarnessError::Config {
        key: key.to_string(),
        msg: msg.into(),
    }
}

fn flatten(prefix: &str, table: &toml::Table, out: &mut Vec<(String, toml::Value)>) {
    for (k, v) in table {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match v {
            toml::Value::Table(t) => flatten(&key, t, out),
            other => out.push((key, other.clone())),
        }
    }
}

fn as_f64(key: &str, v: &toml::Value) -> Result<f64, HarnessError> {
    match v {
        toml::Value::Float(x) => Ok(*x),
        toml::Value::Integer(i) => Ok(*i as f64),
        other => Err(err(key, format!("expected a number, got {other}"))),
    }
}

fn as_usize(key: &str, v: &toml::Value) -> Result<usize, HarnessError> {
    match v {
        toml::Value::Integer(i) if *i >= 0 => Ok(*i as usize),
        other => Err(err(key, format!("expected a nonnegative integer, got {other}"))),
    }
}

fn as_bool(key: &str, v: &toml::Value) -> Result<bool, HarnessError> {
    v.as_bool().ok_or_else(|| err(key, format!("expected true or false, got {v}")))
}

fn as_str<'v>(key: &str, v: &'v toml::Value) -> Result<&'v str, HarnessError> {
    v.as_str().ok_or_else(|| err(key, format!("expected a string, got {v}")))
}

fn positive(key: &str, x: f64) -> Result<f64, HarnessError> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(err(key, format!("{x} must be positive")))
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig, HarnessError> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| err("syntax", e.message().to_string()))?;
        let mut entries = Vec::new();
        flatten("", &table, &mut entries);
        let mut cfg = RunConfig::default();
        let mut kappa: Option<String> = None;
        for (key, v) in &entries {
            let k = key.as_str();
            match k {
                "geometry.case" => cfg.case = as_str(k, v)?.parse().map_err(|e: HarnessError| err(k, e.to_string()))?,
                "geometry.gamma_radius" => cfg.params.gamma_radius = positive(k, as_f64(k, v)?)?,
                "geometry.gamma0_radius" => cfg.params.gamma0_radius = positive(k, as_f64(k, v)?)?,
                "geometry.constant" => cfg.params.constant = as_f64(k, v)?,
                "geometry.regularity_bound" => cfg.disc.regularity_bound = positive(k, as_f64(k, v)?)?,
                "material.kappa" => kappa = Some(as_str(k, v)?.to_string()),
                "discretization.k" => {
                    cfg.disc.k = as_usize(k, v)?;
                    if cfg.disc.k > 6 {
                        return Err(err(k, "degrees above 6 are not supported"));
                    }
                }
                "discretization.h0" => cfg.h0 = positive(k, as_f64(k, v)?)?,
                "discretization.levels" => {
                    cfg.levels = as_usize(k, v)?;
                    if cfg.levels == 0 {
                        return Err(err(k, "must be at least 1"));
                    }
                }
                "discretization.tau" => cfg.disc.tau = positive(k, as_f64(k, v)?)?,
                "discretization.map" => {
                    cfg.disc.strategy = match as_str(k, v)? {
                        "radial" => MapStrategy::Radial,
                        "closest-point" => MapStrategy::ClosestPoint,
                        "identity" => MapStrategy::Identity,
                        other => return Err(err(k, format!("unknown map '{other}'"))),
                    }
                }
                "discretization.parallel" => cfg.disc.parallel = as_bool(k, v)?,
                "coupling.omega" => cfg.coupling.omega = as_f64(k, v)?,
                "coupling.tol" => cfg.coupling.tolerance = as_f64(k, v)?,
                "coupling.n" => cfg.coupling.n = as_usize(k, v)?,
                "coupling.max_iter" => cfg.coupling.max_iterations = as_usize(k, v)?,
                "coupling.aitken" => cfg.coupling.aitken = as_bool(k, v)?,
                "coupling.omega_grid" => {
                    let arr = v.as_array().ok_or_else(|| err(k, "expected an array of numbers"))?;
                    cfg.omega_grid = arr.iter().map(|x| as_f64(k, x)).collect::<Result<_, _>>()?;
                    if let Some(w) = cfg.omega_grid.iter().find(|w| !(**w > 0.0 && **w <= 1.0)) {
                        return Err(err(k, format!("{w} is outside (0, 1]")));
                    }
                }
                "coupling.monolithic_check" => cfg.monolithic_check = as_bool(k, v)?,
                "output.dir" => cfg.output_dir = PathBuf::from(as_str(k, v)?),
                _ => {
                    debug_assert!(!KNOWN_KEYS.contains(&k));
                    return Err(err(k, "unknown key"));
                }
            }
        }
        cfg.coupling.validate().map_err(|e| match e {
            crate::coupling::CouplingError::Config { key, msg } => err(key, msg),
            other => err("coupling", other.to_string()),
        })?;
        if cfg.params.gamma_radius <= cfg.params.gamma0_radius {
            return Err(err("geometry.gamma_radius", "must exceed geometry.gamma0_radius"));
        }
        let expected = match cfg.case {
            CaseId::VariableKappaBump => "bump",
            _ => "identity",
        };
        if let Some(kind) = kappa {
            if kind != expected {
                return Err(err("material.kappa", format!("case {} uses '{expected}', got '{kind}'", cfg.case)));
            }
        }
        if cfg.case == CaseId::PolynomialPatch {
            cfg.params.patch_degree = cfg.disc.k;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| err("path", format!("{}: {e}", path.display())))?;
        RunConfig::parse(&text)
    }

    pub fn known_keys() -> &'static [&'static str] {
        KNOWN_KEYS
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key_of(text: &str) -> String {
        match RunConfig::parse(text) {
            Err(HarnessError::Config { key, .. }) => key,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn defaults_and_overrides() {
        let c = RunConfig::parse("[coupling]\nomega = 0.4\nn = 16\n[discretization]\nk = 2\nh0 = 0.1\n").unwrap();
        assert_eq!(c.coupling.omega, 0.4);
        assert_eq!(c.coupling.n, 16);
        assert_eq!(c.disc.k, 2);
        assert_eq!(c.h0, 0.1);
        assert_eq!(c.case, CaseId::Dipole);
        let d = RunConfig::parse("coupling.omega = 0.3\n").unwrap();
        assert_eq!(d.coupling.omega, 0.3);
    }

    #[test]
    fn invalid_values_name_their_key() {
        assert_eq!(key_of("[coupling]\nomega = -0.5\n"), "coupling.omega");
        assert_eq!(key_of("[coupling]\ntol = 0\n"), "coupling.tol");
        assert_eq!(key_of("[discretization]\nh0 = \"small\"\n"), "discretization.h0");
        assert_eq!(key_of("[geometry]\ncase = \"monopole\"\n"), "geometry.case");
        assert_eq!(key_of("[output]\nfolder = \"x\"\n"), "output.folder");
        assert_eq!(key_of("[material]\nkappa = \"bump\"\n"), "material.kappa");
        assert_eq!(key_of("[coupling\n"), "syntax");
    }

    #[test]
    fn every_known_key_is_accepted() {
        let text = "[geometry]\ncase = \"dipole-plus-constant\"\ngamma_radius = 1.0\ngamma0_radius = 0.5\nconstant = 3\nregularity_bound = 12\n\
[material]\nkappa = \"identity\"\n\
[discretization]\nk = 1\nh0 = 0.2\nlevels = 3\ntau = 1\nmap = \"radial\"\nparallel = false\n\
[coupling]\nomega = 0.5\ntol = 1e-8\nn = 32\nmax_iter = 100\naitken = false\nomega_grid = [0.3, 0.5]\nmonolithic_check = true\n\
[output]\ndir = \"out\"\n";
        let c = RunConfig::parse(text).unwrap();
        assert_eq!(c.case, CaseId::DipolePlusConstant);
        assert_eq!(c.omega_grid, vec![0.3, 0.5]);
        assert!(!c.disc.parallel);
        assert_eq!(RunConfig::known_keys().len(), text.matches(" = ").count());
    }
}

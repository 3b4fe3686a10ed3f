//! `key = value` configuration. Values resolve in the order defaults, file,
//! `PERCOFPP_<KEY>` environment variables, command-line overrides.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use percofpp_core::estimators::{DeltaMode, ExperimentConfig, WindowPolicy};
use percofpp_core::radius::{RadiusMode, RadiusParams};
use percofpp_core::WeightLaw;

use crate::error::{CliError, CliResult};

pub const ENV_PREFIX: &str = "PERCOFPP_";

/// Every accepted key with its default and a one-line description.
pub const KEYS: &[(&str, &str, &str)] = &[
    ("d", "2", "lattice dimension (2 or 3)"),
    ("dist", "dirac:1", "weight law F: dirac:v | atoms:v1:m1,v2:m2 | uniform:lo:hi"),
    ("p", "0.85", "comma-separated p grid"),
    ("p0", "0.6", "lower end of the admissible p range"),
    ("delta0", "0.05", "δ0 in the choice of λ"),
    ("lambda", "auto", "q-openness threshold λ (auto: smallest admissible)"),
    ("n", "32", "comma-separated n grid"),
    ("m", "auto", "truncation level M (auto: (log n)^3)"),
    ("k", "auto", "box radius K (auto: n^2)"),
    ("replicas", "20", "replica count"),
    ("seed", "42", "master seed"),
    ("label_margin", "0.5", "labeling window margin around [0, n e1], in units of n"),
    ("h", "0.02", "finite-difference half width"),
    ("delta_mode", "zero", "lower variant of Δ_e T: zero | resample"),
    ("edge_budget", "512", "geodesic edges per replica before subsampling"),
    ("spot_checks", "20", "off-geodesic edges checked per replica"),
    ("c_star", "10", "C*"),
    ("rho", "1", "ρ"),
    ("n_max", "32", "largest radius scale examined"),
    ("path_cap", "10000", "geodesics enumerated per endpoint pair in exact checks"),
    ("auto_exact_max", "7", "largest scale handed to the exact checker in auto mode"),
    ("radius_mode", "auto", "exact | certificate | auto"),
    ("radius_h", "auto", "truncation H of radius geodesics (auto: M of the first n)"),
    ("path_sum", "false", "radius-tails: also tabulate radius sums along geodesics"),
    ("per_geodesic", "5", "bypass-demo: edges sampled per geodesic"),
    ("q_n", "0.1", "animals: indicator mean"),
    ("animal_n", "2", "animals: scale N"),
    ("l_grid", "6,10,14", "animals: path lengths L"),
    ("instance", "2x2", "russo: 2x2 | 2x3 | edge | all"),
    ("sites", "100", "tails: hole-size sites per seed"),
    ("walks", "20", "tails: random open walks per seed"),
    ("walk_len", "32", "tails: walk length"),
    ("translates", "100", "slln: translates per set"),
];

fn is_known(key: &str) -> bool {
    KEYS.iter().any(|(k, _, _)| *k == key)
}

/// Resolved raw values for every known key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { values: KEYS.iter().map(|(k, v, _)| (k.to_string(), v.to_string())).collect() }
    }
}

fn parse_lines(text: &str, origin: &str) -> CliResult<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Config(format!("{origin}:{}: expected key = value", i + 1)));
        };
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

impl Settings {
    pub fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        let key = key.trim().to_ascii_lowercase().replace('-', "_");
        if !is_known(&key) {
            return Err(CliError::Config(format!("unknown key `{key}`")));
        }
        self.values.insert(key, value.trim().to_string());
        Ok(())
    }

    pub fn apply_text(&mut self, text: &str, origin: &str) -> CliResult<()> {
        let pairs = parse_lines(text, origin)?;
        let unknown: Vec<&str> = pairs.iter().map(|(k, _)| k.as_str()).filter(|k| !is_known(k)).collect();
        if !unknown.is_empty() {
            return Err(CliError::Config(format!("{origin}: unknown key(s): {}", unknown.join(", "))));
        }
        for (k, v) in &pairs {
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> CliResult<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        self.apply_text(&text, &path.display().to_string())
    }

    /// Applies `PERCOFPP_<KEY>` variables from `vars`.
    pub fn apply_env(&mut self, vars: impl IntoIterator<Item = (String, String)>) -> CliResult<()> {
        for (name, value) in vars {
            if let Some(key) = name.strip_prefix(ENV_PREFIX) {
                let key = key.to_ascii_lowercase();
                if !is_known(&key) {
                    return Err(CliError::Config(format!("unknown key `{key}` from environment variable {name}")));
                }
                self.set(&key, &value)?;
            }
        }
        Ok(())
    }

    /// `file < environment < overrides`.
    pub fn resolve(
        file: Option<&Path>,
        env: impl IntoIterator<Item = (String, String)>,
        overrides: &[(String, String)],
    ) -> CliResult<Self> {
        let mut s = Settings::default();
        if let Some(f) = file {
            s.apply_file(f)?;
        }
        s.apply_env(env)?;
        for (k, v) in overrides {
            s.set(k, v)?;
        }
        Ok(s)
    }

    pub fn from_map(map: &BTreeMap<String, String>) -> CliResult<Self> {
        let mut s = Settings::default();
        for (k, v) in map {
            s.set(k, v)?;
        }
        Ok(s)
    }

    pub fn as_map(&self) -> &BTreeMap<String, String> {
        &self.values
    }

    pub fn raw(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).unwrap_or_else(|| panic!("unregistered key {key}"))
    }

    pub fn get<T: FromStr>(&self, key: &str) -> CliResult<T>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(key)
            .parse()
            .map_err(|e| CliError::Config(format!("{key} = `{}`: {e}", self.raw(key))))
    }

    /// `None` for `auto`.
    pub fn get_auto<T: FromStr>(&self, key: &str) -> CliResult<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        if self.raw(key).eq_ignore_ascii_case("auto") {
            Ok(None)
        } else {
            self.get(key).map(Some)
        }
    }

    pub fn get_list<T: FromStr>(&self, key: &str) -> CliResult<Vec<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(key)
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().map_err(|e| CliError::Config(format!("{key}: `{s}`: {e}"))))
            .collect()
    }

    pub fn law(&self) -> CliResult<WeightLaw> {
        self.raw("dist").parse().map_err(|e: percofpp_core::Error| CliError::Config(format!("dist: {e}")))
    }

    pub fn experiment(&self) -> CliResult<ExperimentConfig> {
        let config = ExperimentConfig {
            dim: self.get("d")?,
            law: self.law()?,
            p_grid: self.get_list("p")?,
            p0: self.get("p0")?,
            delta0: self.get("delta0")?,
            lambda: self.get_auto("lambda")?,
            n_grid: self.get_list("n")?,
            m: self.get_auto("m")?,
            k: self.get_auto("k")?,
            replicas: self.get("replicas")?,
            seed: self.get("seed")?,
            window: WindowPolicy { label_margin: self.get("label_margin")? },
        };
        config.validate()?;
        Ok(config)
    }

    pub fn delta_mode(&self) -> CliResult<DeltaMode> {
        Ok(self.raw("delta_mode").parse::<DeltaMode>()?)
    }

    pub fn radius_mode(&self) -> CliResult<RadiusMode> {
        match self.raw("radius_mode") {
            "exact" => Ok(RadiusMode::Exact),
            "certificate" => Ok(RadiusMode::Certificate),
            "auto" => Ok(RadiusMode::Auto),
            other => Err(CliError::Config(format!("radius_mode: unknown mode `{other}`"))),
        }
    }

    /// Radius parameters at the first grid point; `h` defaults to `M` there.
    pub fn radius_params(&self, config: &ExperimentConfig) -> CliResult<RadiusParams> {
        let n = config.n_grid[0];
        let params = RadiusParams {
            c_star: self.get("c_star")?,
            rho: self.get("rho")?,
            h: self.get_auto("radius_h")?.unwrap_or_else(|| config.m_for(n)),
            p: config.p_grid[0],
            lambda: config.lambda()?,
            n_max: self.get("n_max")?,
            path_cap: self.get("path_cap")?,
            auto_exact_max: self.get("auto_exact_max")?,
        };
        params.validate()?;
        Ok(params)
    }
}

/// `# key = value` dump with descriptions, for `--help`-style listings.
pub fn describe_keys() -> String {
    KEYS.iter().map(|(k, v, d)| format!("{k:>15} = {v:<10} {d}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_unknown_keys() {
        let dir = tempfile::tempdir().unwrap();
        let f = dir.path().join("run.conf");
        std::fs::write(&f, "# comment\nseed = 1\nreplicas = 5\n").unwrap();
        let env = vec![("PERCOFPP_SEED".to_string(), "2".to_string()), ("HOME".to_string(), "/".to_string())];
        let s = Settings::resolve(Some(&f), env.clone(), &[]).unwrap();
        assert_eq!((s.raw("seed"), s.raw("replicas")), ("2", "5"));
        let s = Settings::resolve(Some(&f), env, &[("seed".into(), "3".into())]).unwrap();
        assert_eq!(s.raw("seed"), "3");

        std::fs::write(&f, "seeed = 1\n").unwrap();
        let err = Settings::resolve(Some(&f), vec![], &[]).unwrap_err();
        assert!(err.to_string().contains("seeed"));
        assert_eq!(err.exit_code(), 2);
        let err = Settings::resolve(None, vec![("PERCOFPP_BOGUS".into(), "1".into())], &[]).unwrap_err();
        assert!(err.to_string().contains("bogus"));
    }

    #[test]
    fn typed_access() {
        let mut s = Settings::default();
        s.set("p", "0.6, 0.8,1.0").unwrap();
        s.set("n", "16,32").unwrap();
        let c = s.experiment().unwrap();
        assert_eq!(c.p_grid, vec![0.6, 0.8, 1.0]);
        assert_eq!(c.n_grid, vec![16, 32]);
        assert_eq!(c.m, None);
        s.set("replicas", "many").unwrap();
        assert!(matches!(s.experiment(), Err(CliError::Config(_))));
    }
}

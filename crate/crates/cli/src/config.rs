//! `key = value` run configuration.

use std::fmt;
use std::path::Path;

use grover_nmr::experiment::ExperimentConfig;
use grover_nmr::nmr::gradient::pseudo_pure_00;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub const KEYS: [&str; 7] = ["nu1_hz", "nu2_hz", "j_hz", "t2_s", "spectral_width_hz", "n_points", "epsilon"];

/// Parses config text on top of the defaults. Blank lines and `#` comments
/// are skipped; unknown or repeated keys are errors.
pub fn parse(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut cfg = ExperimentConfig::default();
    let mut seen = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| ConfigError(format!("line {}: {msg}", i + 1));
        let (key, value) = line.split_once('=').ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(err(format!("unknown key `{key}`")));
        }
        if seen.contains(&key) {
            return Err(err(format!("duplicate key `{key}`")));
        }
        seen.push(key);
        if key == "n_points" {
            cfg.acquisition.n_points =
                value.parse().map_err(|_| err(format!("n_points: `{value}` is not an integer")))?;
            continue;
        }
        let x: f64 = value.parse().map_err(|_| err(format!("{key}: `{value}` is not a number")))?;
        match key {
            "nu1_hz" => cfg.system.nu1 = x,
            "nu2_hz" => cfg.system.nu2 = x,
            "j_hz" => cfg.system.j = x,
            "t2_s" => cfg.system.t2 = x,
            "spectral_width_hz" => cfg.acquisition.spectral_width = x,
            "epsilon" => cfg.epsilon = x,
            _ => unreachable!(),
        }
    }
    Ok(cfg)
}

pub fn load(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
}

pub fn validate(cfg: &ExperimentConfig) -> Result<(), ConfigError> {
    let wrap = |e: grover_nmr::Error| ConfigError(e.to_string());
    cfg.system.validate().map_err(wrap)?;
    cfg.acquisition.validate(&cfg.system).map_err(wrap)?;
    pseudo_pure_00(cfg.epsilon).map_err(wrap)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_keys_keep_defaults() {
        let cfg = parse("# only J\nj_hz = 9.5\n\n").unwrap();
        assert_eq!(cfg.system.j, 9.5);
        assert_eq!(cfg.system.nu1, 80.0);
        assert_eq!(cfg.acquisition.n_points, 8192);
        assert_eq!(cfg.epsilon, 1.0);
    }

    #[test]
    fn all_keys() {
        let text = "nu1_hz = 100\nnu2_hz=-90\nj_hz = 6\nt2_s = 0.5\nspectral_width_hz = 500\nn_points = 4096\nepsilon = 0.3 # pseudo-pure\n";
        let cfg = parse(text).unwrap();
        assert_eq!((cfg.system.nu1, cfg.system.nu2, cfg.system.j, cfg.system.t2), (100.0, -90.0, 6.0, 0.5));
        assert_eq!((cfg.acquisition.spectral_width, cfg.acquisition.n_points, cfg.epsilon), (500.0, 4096, 0.3));
        assert!(validate(&cfg).is_ok());
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(parse("j_hz 7").unwrap_err().0.contains("line 1"));
        assert!(parse("\nfoo = 1").unwrap_err().0.contains("unknown key"));
        assert!(parse("j_hz = seven").is_err());
        assert!(parse("n_points = 1.5").is_err());
        assert!(parse("j_hz = 1\nj_hz = 2").unwrap_err().0.contains("duplicate"));
    }

    #[test]
    fn validation_catches_invariants() {
        assert!(validate(&parse("nu2_hz = 60").unwrap()).is_err());
        assert!(validate(&parse("spectral_width_hz = 100").unwrap()).is_err());
        assert!(validate(&parse("epsilon = 0").unwrap()).is_err());
        assert!(validate(&parse("n_points = 1000").unwrap()).is_err());
    }
}

//! Run configuration: built-in defaults, overridden by a flat key=value
//! config file (`charpath.toml` in the working directory unless `--config`
//! points elsewhere), then by environment (`CHARPATH_SEED`,
//! `CHARPATH_CACHE_DIR`), then by command-line flags.

use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
    Svg,
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "svg" => Ok(OutputFormat::Svg),
            other => Err(format!("unknown format {other:?} (csv|json|svg)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seed: u64,
    pub cache_dir: Option<PathBuf>,
    pub format: OutputFormat,
    pub truncation: u32,
    pub grid: usize,
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            cache_dir: None,
            format: OutputFormat::Csv,
            truncation: 10_007,
            grid: 2048,
            threads: 0, // 0 = library default
        }
    }
}

impl RunConfig {
    /// Apply one `key = value` line.
    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let bad = |k: &str, v: &str| format!("bad config value {v:?} for key {k:?}");
        match key {
            "seed" => self.seed = value.parse().map_err(|_| bad(key, value))?,
            "cache_dir" => self.cache_dir = Some(PathBuf::from(value)),
            "format" => self.format = value.parse()?,
            "truncation" => self.truncation = value.parse().map_err(|_| bad(key, value))?,
            "grid" => self.grid = value.parse().map_err(|_| bad(key, value))?,
            "threads" => self.threads = value.parse().map_err(|_| bad(key, value))?,
            other => return Err(format!("unknown config key {other:?}")),
        }
        Ok(())
    }

    pub fn load_file(&mut self, path: &Path) -> Result<(), String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("{}:{}: expected key = value", path.display(), lineno + 1))?;
            let value = value.trim().trim_matches('"').trim_matches('\'');
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    pub fn load_env(&mut self) -> Result<(), String> {
        if let Ok(s) = std::env::var("CHARPATH_SEED") {
            self.seed = s
                .parse()
                .map_err(|_| format!("CHARPATH_SEED must be a decimal u64, got {s:?}"))?;
        }
        if let Ok(dir) = std::env::var("CHARPATH_CACHE_DIR") {
            if !dir.is_empty() {
                self.cache_dir = Some(PathBuf::from(dir));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_key_values() {
        let dir = std::env::temp_dir().join(format!("charpath-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("charpath.toml");
        std::fs::write(&path, "seed = 99\n# comment\nformat = \"svg\"\ngrid=512\n").unwrap();
        let mut cfg = RunConfig::default();
        cfg.load_file(&path).unwrap();
        assert_eq!(cfg.seed, 99);
        assert_eq!(cfg.format, OutputFormat::Svg);
        assert_eq!(cfg.grid, 512);
        assert_eq!(cfg.truncation, 10_007);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn rejects_unknown_keys() {
        let mut cfg = RunConfig::default();
        assert!(cfg.set("sed", "1").is_err());
        assert!(cfg.set("seed", "x").is_err());
    }
}

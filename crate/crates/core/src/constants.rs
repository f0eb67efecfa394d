//! Calibrated constants, read from a versioned `key = value` file.
//!
//! The file shipped in the crate root is compiled in; `DISTPROOF_CONSTANTS`
//! names a replacement file for binaries that call [`Constants::from_env`].

use serde::Deserialize;
use std::path::Path;
use std::sync::OnceLock;
use thiserror::Error;

pub const ENV_VAR: &str = "DISTPROOF_CONSTANTS";

const BUILTIN: &str = include_str!("../constants.txt");

#[derive(Debug, Error)]
pub enum ConstantsError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("bad constants file: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("constant {0} must be positive")]
    NonPositive(&'static str),
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    pub version: u32,
    /// D-sample multiplier of the identity tester.
    pub c_id: f64,
    /// Sample multiplier of the standalone uniformity tester.
    pub c_unif: f64,
    /// Multiplier of the `eps^-4` tail-estimation budget.
    pub c_tail: f64,
    /// Multiplier of the `log^3 N / tau^4` histogram budget.
    pub c_hist: f64,
    /// Spot-check probes per unit of `1/eps'`.
    pub c_spot: f64,
    /// Cap on quantile probes spent on histograms inside protocol runs.
    pub max_histogram_probes: u64,
}

impl Constants {
    pub fn parse(text: &str) -> Result<Self, ConstantsError> {
        let c: Constants = toml::from_str(text)?;
        for (name, v) in [
            ("c_id", c.c_id),
            ("c_unif", c.c_unif),
            ("c_tail", c.c_tail),
            ("c_hist", c.c_hist),
            ("c_spot", c.c_spot),
        ] {
            if !(v > 0.0) {
                return Err(ConstantsError::NonPositive(name));
            }
        }
        if c.max_histogram_probes == 0 {
            return Err(ConstantsError::NonPositive("max_histogram_probes"));
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, ConstantsError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConstantsError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    /// The compiled-in file.
    pub fn builtin() -> &'static Constants {
        static C: OnceLock<Constants> = OnceLock::new();
        C.get_or_init(|| Self::parse(BUILTIN).expect("shipped constants file is valid"))
    }

    /// The file named by `DISTPROOF_CONSTANTS`, or the compiled-in one.
    pub fn from_env() -> Result<Self, ConstantsError> {
        match std::env::var_os(ENV_VAR) {
            Some(p) => Self::load(Path::new(&p)),
            None => Ok(Self::builtin().clone()),
        }
    }

    /// `key = value` text that [`Constants::parse`] reads back.
    pub fn to_text(&self) -> String {
        format!(
            "version = {}\nc_id = {:?}\nc_unif = {:?}\nc_tail = {:?}\nc_hist = {:?}\nc_spot = {:?}\nmax_histogram_probes = {}\n",
            self.version, self.c_id, self.c_unif, self.c_tail, self.c_hist, self.c_spot, self.max_histogram_probes
        )
    }
}

impl Default for Constants {
    fn default() -> Self {
        Self::builtin().clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_parses_and_round_trips() {
        let c = Constants::builtin();
        assert_eq!(&Constants::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn rejects_unknown_and_nonpositive() {
        let base = Constants::builtin().to_text();
        assert!(Constants::parse(&format!("{base}extra = 1\n")).is_err());
        assert!(matches!(
            Constants::parse(&base.replace("c_tail = ", "c_tail = -")),
            Err(ConstantsError::NonPositive("c_tail"))
        ));
    }
}

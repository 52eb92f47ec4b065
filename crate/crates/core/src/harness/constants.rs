use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const EMBEDDED: &str = include_str!("../../constants.json");

/// Environment variable naming a replacement manifest.
pub const OVERRIDE_VAR: &str = "HLOG_CONSTANTS";

pub const REQUIRED: [&str; 29] = [
    "identity_tol",
    "inequality_slack",
    "sandwich_factor",
    "atom_square_constant",
    "cz_level_factor",
    "quasi_norm_constant",
    "stein_bracket",
    "stein_ratio_spread",
    "weak_upper",
    "weak_reverse_c1",
    "weak_reverse_c2",
    "oracle_agreement",
    "atomic_c0",
    "pi3_constant",
    "pi2_constant",
    "john_nirenberg",
    "product_llog",
    "mei_ratio",
    "atom_fourier_c0",
    "carrier_tol",
    "band_c0",
    "sharpness_growth",
    "poisson_kappa",
    "divergence_kappa",
    "decay_exponent_tol",
    "sjolin_tol",
    "kendall_min",
    "transform_bracket",
    "poisson_r_levels",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub value: f64,
    pub note: String,
}

/// Acceptance constants, pinned together with the corpus they were derived on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub pinned_depth: u32,
    pub pinned_seed: u64,
    pub constants: BTreeMap<String, Entry>,
}

impl Constants {
    pub fn embedded() -> Self {
        Self::from_json(EMBEDDED).expect("embedded constants manifest is valid")
    }

    /// The manifest named by `HLOG_CONSTANTS`, or the embedded one.
    pub fn load() -> Result<Self> {
        match std::env::var_os(OVERRIDE_VAR) {
            Some(path) => Self::read(path),
            None => Ok(Self::embedded()),
        }
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Constants(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Self =
            serde_json::from_str(text).map_err(|e| Error::Constants(format!("malformed: {e}")))?;
        for name in REQUIRED {
            let entry = c
                .constants
                .get(name)
                .ok_or_else(|| Error::Constants(format!("missing {name}")))?;
            if !(entry.value.is_finite() && entry.value > 0.0) {
                return Err(Error::Constants(format!(
                    "{name} = {} is not a positive finite number",
                    entry.value
                )));
            }
        }
        Ok(c)
    }

    /// Value of a required constant. Unknown names are a programming error.
    pub fn get(&self, name: &str) -> f64 {
        self.constants
            .get(name)
            .unwrap_or_else(|| panic!("constant {name} is not in the manifest"))
            .value
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_manifest_is_complete() {
        let c = Constants::embedded();
        assert_eq!(c.constants.len(), REQUIRED.len());
        assert_eq!(c.get("atomic_c0"), 64.0);
        let exact = 1.0 + std::f64::consts::TAU.sqrt();
        assert_eq!(c.get("atom_square_constant"), exact);
    }

    #[test]
    fn corrupted_manifest_names_the_problem() {
        let mut c = Constants::embedded();
        c.constants.remove("mei_ratio");
        let text = serde_json::to_string(&c).unwrap();
        let err = Constants::from_json(&text).unwrap_err().to_string();
        assert!(err.contains("mei_ratio"), "{err}");

        let mut c = Constants::embedded();
        c.constants.get_mut("weak_upper").unwrap().value = -1.0;
        let err = Constants::from_json(&serde_json::to_string(&c).unwrap())
            .unwrap_err()
            .to_string();
        assert!(err.contains("weak_upper"), "{err}");
        assert!(Constants::from_json("{not json").is_err());
    }
}

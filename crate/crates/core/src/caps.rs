//! Resource limits for the explicit-state parts (fixed-size nets, trap
//! enumeration, DNF conversion) and for automata minimization.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Largest `n` for which a fixed-size net is instantiated.
    pub net_size: usize,
    /// Reachable markings explored before giving up.
    pub markings: usize,
    /// Cubes allowed in a propositional DNF.
    pub dnf: usize,
    /// Places allowed in minimal-trap enumeration.
    pub trap_places: usize,
    /// Intermediate automata above this size are minimized.
    pub minimize_threshold: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { net_size: 6, markings: 1_000_000, dnf: 100_000, trap_places: 24, minimize_threshold: 64 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CapsError {
    #[error("malformed cap setting `{0}` (expected key=value)")]
    Malformed(String),
    #[error("unknown cap `{0}` (known: net_size, markings, dnf, trap_places, minimize_threshold)")]
    UnknownKey(String),
    #[error("cap `{0}` must be a positive integer, got `{1}`")]
    BadValue(String, String),
}

impl Caps {
    /// Applies `key=value,...` overrides.
    pub fn with_overrides(mut self, spec: &str) -> Result<Caps, CapsError> {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| CapsError::Malformed(item.to_string()))?;
            let (k, v) = (k.trim(), v.trim());
            let value: usize = v.parse().ok().filter(|&x| x > 0).ok_or_else(|| CapsError::BadValue(k.into(), v.into()))?;
            match k {
                "net_size" => self.net_size = value,
                "markings" => self.markings = value,
                "dnf" => self.dnf = value,
                "trap_places" => self.trap_places = value,
                "minimize_threshold" => self.minimize_threshold = value,
                _ => return Err(CapsError::UnknownKey(k.to_string())),
            }
        }
        Ok(self)
    }

    /// Defaults overridden by `TRAPMARK_CAPS` when set.
    pub fn from_env() -> Result<Caps, CapsError> {
        match std::env::var("TRAPMARK_CAPS") {
            Ok(spec) => Caps::default().with_overrides(&spec),
            Err(_) => Ok(Caps::default()),
        }
    }
}

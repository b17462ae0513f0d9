use std::fmt;
use std::str::FromStr;

/// Budgets shared by every bounded search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Limits {
    /// Largest term (node count) enumerated into a universe.
    pub max_term_size: usize,
    /// Instantiation rounds per context.
    pub max_rounds: usize,
    /// Highest arity queried in clone levels.
    pub arity_cap: usize,
    /// Largest carrier tried when searching for finite models.
    pub max_model_size: usize,
    /// Hard cap on universe nodes; larger universes are refused.
    pub max_universe: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_term_size: 9,
            max_rounds: 6,
            arity_cap: 2,
            max_model_size: 3,
            max_universe: 4_000_000,
        }
    }
}

impl Limits {
    pub fn with_term_size(mut self, s: usize) -> Self {
        self.max_term_size = s;
        self
    }

    pub fn with_rounds(mut self, r: usize) -> Self {
        self.max_rounds = r;
        self
    }

    pub fn with_arity_cap(mut self, k: usize) -> Self {
        self.arity_cap = k;
        self
    }

    pub fn with_model_size(mut self, m: usize) -> Self {
        self.max_model_size = m;
        self
    }

    /// Applies `key=value` pairs separated by commas, e.g.
    /// `max_term_size=7,max_rounds=4`.
    pub fn apply_overrides(mut self, spec: &str) -> Result<Self, String> {
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got `{part}`"))?;
            let v: usize = v
                .trim()
                .parse()
                .map_err(|_| format!("`{}` is not a natural number", v.trim()))?;
            if v == 0 && k.trim() != "arity_cap" {
                return Err(format!("limit `{}` must be positive", k.trim()));
            }
            match k.trim() {
                "max_term_size" => self.max_term_size = v,
                "max_rounds" => self.max_rounds = v,
                "arity_cap" => self.arity_cap = v,
                "max_model_size" => self.max_model_size = v,
                "max_universe" => self.max_universe = v,
                other => return Err(format!("unknown limit `{other}`")),
            }
        }
        Ok(self)
    }
}

impl fmt::Display for Limits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "max_term_size={},max_rounds={},arity_cap={},max_model_size={},max_universe={}",
            self.max_term_size,
            self.max_rounds,
            self.arity_cap,
            self.max_model_size,
            self.max_universe
        )
    }
}

impl FromStr for Limits {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Limits::default().apply_overrides(s)
    }
}

//! Resource limits shared by all analyses.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Maximum number of term operations enumerated per arity.
    pub clone: usize,
    /// Maximum number of tuples in any subpower closure.
    pub tuples: usize,
    /// Maximum number of coordinates of relations handed to the product analyzer.
    pub coords: usize,
    /// Maximum number of members of a class HS(A).
    pub class: usize,
    /// Maximum size of a congruence lattice.
    pub lattice: usize,
    /// Largest relation turned into an explicit algebra.
    pub structure: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { clone: 100_000, tuples: 1_000_000, coords: 6, class: 10_000, lattice: 10_000, structure: 4096 }
    }
}

impl Caps {
    /// Applies overrides of the form `clone=5000,tuples=20000`.
    pub fn with_overrides(mut self, spec: &str) -> Result<Caps> {
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("cap override `{}` is not key=value", part)))?;
            let value: usize = value
                .trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("cap `{}` needs a nonnegative integer", key)))?;
            match key.trim() {
                "clone" => self.clone = value,
                "tuples" => self.tuples = value,
                "coords" => self.coords = value,
                "class" => self.class = value,
                "lattice" => self.lattice = value,
                "structure" => self.structure = value,
                other => return Err(Error::InvalidArgument(format!("unknown cap `{}`", other))),
            }
        }
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_parse() {
        let caps = Caps::default().with_overrides("clone=10, tuples=20").unwrap();
        assert_eq!((caps.clone, caps.tuples, caps.coords), (10, 20, 6));
        assert!(Caps::default().with_overrides("bogus=1").is_err());
        assert!(Caps::default().with_overrides("clone").is_err());
    }
}

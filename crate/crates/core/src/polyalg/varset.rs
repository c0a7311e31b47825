use std::fmt;
use std::sync::Arc;

use crate::{Error, Result};

/// An ordered list of distinct variable names shared by every polynomial
/// built over it. Cloning is cheap.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VarSet(Arc<[String]>);

impl VarSet {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, a) in names.iter().enumerate() {
            if a.is_empty() {
                return Err(Error::InvalidInput("empty variable name".into()));
            }
            if names[..i].contains(a) {
                return Err(Error::InvalidInput(format!("duplicate variable {a:?}")));
            }
        }
        Ok(VarSet(names.into()))
    }

    /// `x_1, ..., x_g, z` followed by any extra names.
    pub fn standard(g: u32, extra: &[&str]) -> Self {
        let mut names: Vec<String> = (1..=g).map(|i| format!("x_{i}")).collect();
        names.push("z".into());
        names.extend(extra.iter().map(|s| s.to_string()));
        VarSet::new(names).expect("standard variable names are distinct")
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        self.index(name).ok_or_else(|| Error::InvalidInput(format!("unknown variable {name:?} in {self:?}")))
    }

    pub(crate) fn check_same(&self, other: &VarSet) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::VarSetMismatch(self.0.to_vec(), other.0.to_vec()))
        }
    }
}

impl fmt::Debug for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

//! Verdict vocabulary shared by the dimension-1 and matrix-group classifiers.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VerdictKind {
    Basic,
    NonBasic,
    NotApplicable,
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictKind::Basic => "Basic",
            VerdictKind::NonBasic => "NonBasic",
            VerdictKind::NotApplicable => "NotApplicable",
        })
    }
}

/// Why an affine group falls outside the basic/non-basic dichotomy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Reason {
    /// `V` is not the unique minimal normal subgroup.
    #[serde(rename = "reducible")]
    Reducible,
    /// The point stabilizer itself has normal covering number 2.
    #[serde(rename = "gamma-H-equals-2")]
    GammaHEqualsTwo,
    /// `G` is cyclic, so its normal covering number is undefined.
    #[serde(rename = "cyclic-G")]
    CyclicG,
}

impl Reason {
    pub fn as_str(self) -> &'static str {
        match self {
            Reason::Reducible => "reducible",
            Reason::GammaHEqualsTwo => "gamma-H-equals-2",
            Reason::CyclicG => "cyclic-G",
        }
    }
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The test that settled a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecidedBy {
    /// Irreducibility of `V` under `H`.
    Irreducibility,
    /// `H` trivial over a prime field.
    CyclicGroup,
    /// Supersolvable `H`: `γ(H) = 2` exactly when `H` is not nilpotent.
    Nilpotency,
    /// Whether the fixed-point elements generate `H`.
    StarClosure,
    /// A search over maximal subgroups of `H` for one whose conjugates cover `H*`.
    CoveringSearch,
    /// Brute-force normal covering numbers.
    BruteForce,
}

impl DecidedBy {
    pub fn as_str(self) -> &'static str {
        match self {
            DecidedBy::Irreducibility => "irreducibility",
            DecidedBy::CyclicGroup => "cyclic-group",
            DecidedBy::Nilpotency => "nilpotency",
            DecidedBy::StarClosure => "star-closure",
            DecidedBy::CoveringSearch => "covering-search",
            DecidedBy::BruteForce => "brute-force",
        }
    }
}

impl fmt::Display for DecidedBy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

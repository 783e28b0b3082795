//! Lower bounds on connecting orbits from index multiplicities.
//!
//! If `ζ_k` hyperbolic critical points of relative index `k` are known and
//! the homology in degree `k` has rank `β_k`, at most `β_k` of them can be
//! unattached, so there are at least `½ Σ_k (ζ_k − β_k)₊` connecting orbits.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForcingInput {
    /// Index `k` ↦ number of certified critical points of index `k`.
    pub zeta: BTreeMap<i64, u64>,
    /// Index `k` ↦ Betti number `β_k` (missing entries are 0).
    pub beta: BTreeMap<i64, u64>,
    /// Where the Betti numbers come from.
    #[serde(default)]
    pub provenance: String,
}

impl ForcingInput {
    pub fn from_slices(zeta: &[u64], beta: &[u64]) -> Self {
        let to_map = |v: &[u64]| v.iter().enumerate().map(|(k, x)| (k as i64, *x)).collect();
        Self { zeta: to_map(zeta), beta: to_map(beta), provenance: String::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForcingReport {
    pub lower_bound: u64,
    /// `Σ_k (ζ_k − β_k)₊`, twice the exact bound.
    pub excess: u64,
    pub half_integral: bool,
    pub warning: Option<String>,
    /// At most `β_k` critical points of index `k` are not attached to an orbit.
    pub unattached_caps: BTreeMap<i64, u64>,
    pub input: ForcingInput,
}

pub fn forcing_lower_bound(input: &ForcingInput) -> ForcingReport {
    let excess: u64 = input
        .zeta
        .iter()
        .map(|(k, z)| z.saturating_sub(input.beta.get(k).copied().unwrap_or(0)))
        .sum();
    let half_integral = excess % 2 == 1;
    let warning = half_integral.then(|| {
        format!("bound {}.5 is half-integral; reporting its floor {}", excess / 2, excess / 2)
    });
    ForcingReport {
        lower_bound: excess / 2,
        excess,
        half_integral,
        warning,
        unattached_caps: input.beta.clone(),
        input: input.clone(),
    }
}

impl ForcingReport {
    /// Plain-text rendering.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "index  zeta  beta").unwrap();
        let keys: std::collections::BTreeSet<_> = self.input.zeta.keys().chain(self.input.beta.keys()).collect();
        for k in keys {
            let z = self.input.zeta.get(k).copied().unwrap_or(0);
            let b = self.input.beta.get(k).copied().unwrap_or(0);
            writeln!(s, "{k:>5}  {z:>4}  {b:>4}").unwrap();
        }
        if !self.input.provenance.is_empty() {
            writeln!(s, "betti provenance: {}", self.input.provenance).unwrap();
        }
        writeln!(s, "connecting orbits: at least {}", self.lower_bound).unwrap();
        if let Some(w) = &self.warning {
            writeln!(s, "warning: {w}").unwrap();
        }
        s
    }
}

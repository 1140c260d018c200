use alloc::vec::Vec;

use super::{CouplingTable, FieldProfile, FrozenConstraint, ModelParams};
use crate::{Error, Result};

/// The finite-volume model seen by the free spins of a constraint: pair
/// couplings among free sites plus a precomputed effective field per site.
///
/// Spins are passed around as `i8` slices in the order of [`Self::sites`].
#[derive(Debug, Clone)]
pub struct ConstrainedModel {
    params: ModelParams,
    sites: Vec<i64>,
    fields: Vec<f64>,
    table: CouplingTable,
    tail_bound: f64,
}

impl ConstrainedModel {
    pub fn new(params: &ModelParams, constraint: &FrozenConstraint, cutoff: u64) -> Result<Self> {
        let required = constraint.explicit_extent();
        if cutoff < required {
            return Err(Error::CutoffTooSmall { cutoff, required });
        }
        let profile = FieldProfile::build(params, constraint, cutoff);
        Self::from_fields(*params, profile.sites().to_vec(), profile.values().to_vec(), profile.tail_bound())
    }

    /// A model from explicit sites and fields. Sites must be strictly increasing.
    pub fn from_fields(params: ModelParams, sites: Vec<i64>, fields: Vec<f64>, tail_bound: f64) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::EmptyWindow);
        }
        for w in sites.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::DuplicateSite(w[1]));
            }
        }
        assert_eq!(sites.len(), fields.len(), "one field per site");
        let span = (sites[sites.len() - 1] - sites[0]) as u64;
        let table = CouplingTable::new(params.alpha(), span);
        Ok(Self { params, sites, fields, table, tail_bound })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn beta(&self) -> f64 {
        self.params.beta()
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn sites(&self) -> &[i64] {
        &self.sites
    }

    /// Effective fields, `h` included.
    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn index_of(&self, site: i64) -> Option<usize> {
        self.sites.binary_search(&site).ok()
    }

    /// `J(|x_a - x_b|)`, zero on the diagonal.
    #[inline]
    pub fn coupling(&self, a: usize, b: usize) -> f64 {
        self.table.get((self.sites[a] - self.sites[b]).unsigned_abs())
    }

    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        Ok(Self { params: self.params.with_beta(beta)?, ..self.clone() })
    }

    /// `-sum_{a<b} J_ab s_a s_b - sum_a field_a s_a`.
    pub fn energy(&self, spins: &[i8]) -> f64 {
        debug_assert_eq!(spins.len(), self.len());
        let mut pair = 0.0;
        let mut single = 0.0;
        for a in 0..spins.len() {
            let sa = spins[a] as f64;
            single += self.fields[a] * sa;
            let mut row = 0.0;
            for b in a + 1..spins.len() {
                row += self.coupling(a, b) * spins[b] as f64;
            }
            pair += sa * row;
        }
        -pair - single
    }

    /// `sum_b J_ab s_b + field_a`, so flipping `a` costs `2 s_a` times this.
    pub fn local_field(&self, spins: &[i8], a: usize) -> f64 {
        let mut acc = 0.0;
        for (b, &s) in spins.iter().enumerate() {
            if b != a {
                acc += self.coupling(a, b) * s as f64;
            }
        }
        acc + self.fields[a]
    }

    /// Freeze some of the free spins: the remaining sites get their field
    /// shifted by the couplings to the newly frozen ones.
    pub fn condition(&self, fixed: &[(usize, i8)]) -> Result<Self> {
        let mut is_fixed = alloc::vec![false; self.len()];
        for &(a, _) in fixed {
            is_fixed[a] = true;
        }
        let mut sites = Vec::new();
        let mut fields = Vec::new();
        for a in 0..self.len() {
            if is_fixed[a] {
                continue;
            }
            let mut f = self.fields[a];
            for &(b, s) in fixed {
                f += self.coupling(a, b) * s as f64;
            }
            sites.push(self.sites[a]);
            fields.push(f);
        }
        Self::from_fields(self.params, sites, fields, self.tail_bound)
    }
}

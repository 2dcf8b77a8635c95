use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Site bookkeeping for a scattering region embedded in two finite leads.
///
/// Global indices run over `0..total_sites`; relative indices put the first
/// scattering site at 0, so leads have negative indices on the left and
/// indices `>= 2N` on the right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeLayout {
    pub total_sites: usize,
    /// Global index of relative site 0.
    pub scatter_start: usize,
    pub n_cells: usize,
    pub lead_left_len: usize,
    pub lead_right_len: usize,
}

impl LatticeLayout {
    pub fn new(lead_left_len: usize, n_cells: usize, lead_right_len: usize) -> Result<Self> {
        if n_cells == 0 {
            return Err(Error::InvalidParameter("n_cells must be at least 1".into()));
        }
        Ok(Self {
            total_sites: lead_left_len + 2 * n_cells + lead_right_len,
            scatter_start: lead_left_len,
            n_cells,
            lead_left_len,
            lead_right_len,
        })
    }

    /// Scattering region in the middle; an odd remainder goes to the right lead.
    pub fn centered(total_sites: usize, n_cells: usize) -> Result<Self> {
        if total_sites < 2 * n_cells + 2 {
            return Err(Error::InvalidParameter(format!(
                "{total_sites} sites cannot hold {n_cells} cells and two leads"
            )));
        }
        let leads = total_sites - 2 * n_cells;
        Self::new(leads / 2, n_cells, leads - leads / 2)
    }

    pub fn n_scatter_sites(&self) -> usize {
        2 * self.n_cells
    }

    pub fn global(&self, relative: i64) -> Option<usize> {
        let g = relative + self.scatter_start as i64;
        (g >= 0 && g < self.total_sites as i64).then_some(g as usize)
    }

    pub fn relative(&self, global: usize) -> i64 {
        global as i64 - self.scatter_start as i64
    }

    /// Global index one past the last scattering site.
    pub fn scatter_end(&self) -> usize {
        self.scatter_start + self.n_scatter_sites()
    }
}

//! Counts of chromatic Delaunay faces by color signature, and the numbers
//! of mono-chromatic and colorful Voronoi cells derived from them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::chromatic::ChromaticMosaic;
use crate::error::{Error, Result};

/// Number of faces of each color signature `(u_0, ..., u_s)`, where `u_j`
/// counts the vertices of color `j`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountTable {
    pub s: usize,
    pub d: usize,
    pub entries: BTreeMap<Vec<u32>, u64>,
}

impl CountTable {
    pub fn from_mosaic(cm: &ChromaticMosaic) -> Self {
        CountTable { s: cm.s, d: cm.d, entries: cm.signature_counts() }
    }

    /// `N_{u_0 ... u_s}`, zero when absent.
    pub fn get(&self, signature: &[u32]) -> u64 {
        self.entries.get(signature).copied().unwrap_or(0)
    }

    /// Number of `p`-faces.
    pub fn faces_of_dim(&self, p: usize) -> u64 {
        self.entries.iter().filter(|(k, _)| k.iter().sum::<u32>() as usize == p + 1).map(|(_, v)| v).sum()
    }

    /// Alternating sum of all entries by dimension.
    pub fn euler_characteristic(&self) -> i64 {
        self.entries
            .iter()
            .map(|(k, &v)| if k.iter().sum::<u32>() % 2 == 1 { v as i64 } else { -(v as i64) })
            .sum()
    }

    /// Label such as `N_022`.
    pub fn label(signature: &[u32]) -> String {
        let digits: Vec<String> = signature.iter().map(u32::to_string).collect();
        let sep = if signature.iter().any(|&u| u > 9) { "," } else { "" };
        format!("N_{}", digits.join(sep))
    }
}

/// Cell counts of the mono-chromatic and the chromatic Voronoi tessellations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub rho: f64,
    /// `m[p]`: p-cells in the mono-chromatic tessellations together.
    pub m: Vec<u64>,
    /// `n[p]`: colorful p-cells of the chromatic tessellation.
    pub n: Vec<u64>,
    /// `n[0] - m[0]`, the number of crossings.
    pub surplus: i64,
    pub normalized_m: Vec<f64>,
    pub normalized_n: Vec<f64>,
    pub normalized_surplus: f64,
}

/// Derives `m_p` and `n_p` for `0 <= p <= d`: a mono-chromatic Voronoi
/// p-cell is dual to a one-color face with `d + 1 - p` vertices, a colorful
/// p-cell to a face using every color with `s + d + 1 - p` vertices.
pub fn mp_np(table: &CountTable, rho: f64) -> Result<DensityReport> {
    let (s, d) = (table.s, table.d);
    if let Some(k) = table.entries.keys().find(|k| k.len() != s + 1) {
        return Err(Error::InvalidInput(format!("signature of width {} in a table for s = {s}", k.len())));
    }
    let mut m = vec![0u64; d + 1];
    let mut n = vec![0u64; d + 1];
    for (sig, &count) in &table.entries {
        let total = sig.iter().sum::<u32>() as usize;
        let support = sig.iter().filter(|&&u| u > 0).count();
        if support == 1 && total <= d + 1 {
            m[d + 1 - total] += count;
        }
        if support == s + 1 && total >= s + 1 && total <= s + d + 1 {
            n[s + d + 1 - total] += count;
        }
    }
    let surplus = n[0] as i64 - m[0] as i64;
    Ok(DensityReport {
        rho,
        normalized_m: m.iter().map(|&x| x as f64 / rho).collect(),
        normalized_n: n.iter().map(|&x| x as f64 / rho).collect(),
        normalized_surplus: surplus as f64 / rho,
        m,
        n,
        surplus,
    })
}

/// Per-signature means over several tables.
pub fn mean_table(tables: &[CountTable]) -> BTreeMap<Vec<u32>, f64> {
    let mut sums: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
    for t in tables {
        for (k, &v) in &t.entries {
            *sums.entry(k.clone()).or_insert(0.0) += v as f64;
        }
    }
    let n = tables.len().max(1) as f64;
    sums.values_mut().for_each(|v| *v /= n);
    sums
}

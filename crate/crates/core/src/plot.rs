//! Plot data as CSV tables for external plotting tools.
//!
//! | kind             | columns                                   |
//! |------------------|-------------------------------------------|
//! | `rank-size`      | `rank,size` (largest first)               |
//! | `ccdf-loglog`    | `x,ccdf,log10_x,log10_ccdf`, `ccdf = P(X >= x)` |
//! | `boxcount-loglog`| `box_size,count,log_inv_size,log_count`   |
//! | `classed-bends`  | `vertex,x,y,class` (0 for chain endpoints) |

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::bends::BendDecomposition;
use crate::boxcount::BoxCountEstimate;
use crate::error::{Error, Result};
use crate::geometry::Polyline;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    RankSize,
    CcdfLogLog,
    BoxcountLogLog,
    ClassedBends,
}

impl FromStr for PlotKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rank-size" => Ok(PlotKind::RankSize),
            "ccdf-loglog" => Ok(PlotKind::CcdfLogLog),
            "boxcount-loglog" => Ok(PlotKind::BoxcountLogLog),
            "classed-bends" => Ok(PlotKind::ClassedBends),
            other => Err(Error::invalid(format!("unknown plot kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotTable {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl PlotTable {
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

pub fn rank_size(values: &[f64]) -> PlotTable {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    PlotTable {
        columns: vec!["rank", "size"],
        rows: sorted
            .into_iter()
            .enumerate()
            .map(|(i, v)| vec![(i + 1) as f64, v])
            .collect(),
    }
}

/// Empirical complementary CDF at each distinct value.
pub fn ccdf(values: &[f64]) -> PlotTable {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut rows = Vec::new();
    for (i, &x) in sorted.iter().enumerate() {
        if i > 0 && sorted[i - 1] == x {
            continue;
        }
        let p = (sorted.len() - i) as f64 / n;
        rows.push(vec![x, p, x.log10(), p.log10()]);
    }
    PlotTable {
        columns: vec!["x", "ccdf", "log10_x", "log10_ccdf"],
        rows,
    }
}

pub fn boxcount(estimate: &BoxCountEstimate) -> PlotTable {
    PlotTable {
        columns: vec!["box_size", "count", "log_inv_size", "log_count"],
        rows: estimate
            .levels
            .iter()
            .map(|l| {
                vec![
                    l.box_size,
                    l.count as f64,
                    (1.0 / l.box_size).ln(),
                    (l.count as f64).ln(),
                ]
            })
            .collect(),
    }
}

/// Each vertex with the class of the bend it is the apex of.
pub fn classed_bends(curve: &Polyline, d: &BendDecomposition) -> Result<PlotTable> {
    if curve.len() != d.source_n {
        return Err(Error::invalid("decomposition was computed for a different curve"));
    }
    let mut class = vec![0u32; d.source_n];
    for b in &d.bends {
        class[d.vertex(b.apex)] = b
            .class
            .ok_or_else(|| Error::invalid("bend classes have not been assigned"))?;
    }
    Ok(PlotTable {
        columns: vec!["vertex", "x", "y", "class"],
        rows: curve
            .points()
            .iter()
            .enumerate()
            .map(|(i, p)| vec![i as f64, p.x, p.y, class[i] as f64])
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_size_rows() {
        let t = rank_size(&[1.0 / 3.0, 1.0, 0.5]);
        assert_eq!(t.rows[0], vec![1.0, 1.0]);
        assert_eq!(t.rows[1], vec![2.0, 0.5]);
        assert_eq!(t.rows[2][0], 3.0);
        assert!((t.rows[2][1] - 0.3333).abs() < 1e-4);
        assert!(t.to_csv().starts_with("rank,size\n1,1\n2,0.5\n"));
    }

    #[test]
    fn ccdf_counts_ties() {
        let t = ccdf(&[1.0, 2.0, 2.0, 4.0]);
        assert_eq!(t.column("x").unwrap(), vec![1.0, 2.0, 4.0]);
        assert_eq!(t.column("ccdf").unwrap(), vec![1.0, 0.75, 0.25]);
    }

    #[test]
    fn kinds_parse() {
        assert_eq!("classed-bends".parse::<PlotKind>().unwrap(), PlotKind::ClassedBends);
        assert!("hist".parse::<PlotKind>().is_err());
    }
}

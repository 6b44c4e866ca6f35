//! Reconstruction check for a published importance table: the combined
//! share of each cell is recomputed as the mean of its three component
//! shares and compared with the published combined share.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::corpus::GroupLabel;
use crate::error::{Error, Result};
use crate::scoring::{mean_of_shares, SbsResult};

/// Largest accepted |published - reconstructed| in percentage points.
pub const RECONSTRUCTION_TOLERANCE: f64 = 1.0;

/// The published grid bundled with the crate.
pub const PUBLISHED_TABLE3: &str = include_str!("../../data/table3_published.csv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Sbs,
    Prevalence,
    Diversity,
    Connectivity,
}

impl Measure {
    pub const ALL: [Measure; 4] = [
        Measure::Sbs,
        Measure::Prevalence,
        Measure::Diversity,
        Measure::Connectivity,
    ];

    pub fn title(self) -> &'static str {
        match self {
            Measure::Sbs => "Semantic Brand Score",
            Measure::Prevalence => "Prevalence",
            Measure::Diversity => "Diversity",
            Measure::Connectivity => "Connectivity",
        }
    }

    /// `Ok(None)` for measures the validator ignores (sentiment).
    fn parse(s: &str) -> std::result::Result<Option<Measure>, String> {
        match s.trim().to_lowercase().as_str() {
            "semantic brand score" | "sbs" => Ok(Some(Measure::Sbs)),
            "prevalence" => Ok(Some(Measure::Prevalence)),
            "diversity" => Ok(Some(Measure::Diversity)),
            "connectivity" => Ok(Some(Measure::Connectivity)),
            "sentiment" => Ok(None),
            other => Err(format!("unknown measure {other:?}")),
        }
    }
}

/// Share grids per measure: orientation x group, in percent.
#[derive(Debug, Clone, PartialEq)]
pub struct PublishedGrid {
    pub groups: Vec<GroupLabel>,
    pub orientations: Vec<String>,
    values: BTreeMap<(Measure, String), Vec<f64>>,
}

impl PublishedGrid {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        PublishedGrid::parse(&text).map_err(|message| Error::Malformed {
            path: path.to_path_buf(),
            message,
        })
    }

    pub fn bundled() -> Self {
        PublishedGrid::parse(PUBLISHED_TABLE3).expect("bundled grid is well formed")
    }

    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        let headers = rdr.headers().map_err(|e| e.to_string())?.clone();
        if headers.len() < 3 {
            return Err("expected columns: measure, orientation, then one per group".into());
        }
        let groups = headers
            .iter()
            .skip(2)
            .map(|h| GroupLabel::new(h).map_err(|e| e.to_string()))
            .collect::<std::result::Result<Vec<_>, _>>()?;

        let mut orientations: Vec<String> = Vec::new();
        let mut values = BTreeMap::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| format!("row {}: {e}", i + 2))?;
            if rec.len() != headers.len() {
                return Err(format!(
                    "row {}: expected {} fields, got {}",
                    i + 2,
                    headers.len(),
                    rec.len()
                ));
            }
            let Some(measure) =
                Measure::parse(&rec[0]).map_err(|e| format!("row {}: {e}", i + 2))?
            else {
                continue;
            };
            let orientation = rec[1].trim().to_string();
            let cells = rec
                .iter()
                .skip(2)
                .map(|c| {
                    c.trim()
                        .trim_end_matches('%')
                        .parse::<f64>()
                        .map_err(|_| format!("row {}: bad number {c:?}", i + 2))
                })
                .collect::<std::result::Result<Vec<_>, _>>()?;
            if !orientations.contains(&orientation) {
                orientations.push(orientation.clone());
            }
            if values
                .insert((measure, orientation.clone()), cells)
                .is_some()
            {
                return Err(format!(
                    "row {}: duplicate {} row for {orientation:?}",
                    i + 2,
                    measure.title()
                ));
            }
        }
        if orientations.is_empty() {
            return Err("no share rows".into());
        }
        for m in Measure::ALL {
            for o in &orientations {
                if !values.contains_key(&(m, o.clone())) {
                    return Err(format!("missing {} row for {o:?}", m.title()));
                }
            }
        }
        Ok(PublishedGrid {
            groups,
            orientations,
            values,
        })
    }

    pub fn get(&self, measure: Measure, orientation: &str, group: usize) -> f64 {
        self.values[&(measure, orientation.to_string())][group]
    }

    /// Published shares of one group as score rows (only the share fields
    /// are meaningful), e.g. for ranking.
    pub fn sbs_results(&self, group: &GroupLabel) -> Option<Vec<SbsResult>> {
        let g = self.groups.iter().position(|x| x == group)?;
        Some(
            self.orientations
                .iter()
                .map(|o| SbsResult {
                    group: group.clone(),
                    orientation: o.clone(),
                    prevalence: 0.0,
                    diversity: 0.0,
                    connectivity: 0.0,
                    z_prevalence: 0.0,
                    z_diversity: 0.0,
                    z_connectivity: 0.0,
                    sbs: 0.0,
                    share_prevalence: self.get(Measure::Prevalence, o, g),
                    share_diversity: self.get(Measure::Diversity, o, g),
                    share_connectivity: self.get(Measure::Connectivity, o, g),
                    share_sbs: self.get(Measure::Sbs, o, g),
                })
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellCheck {
    pub orientation: String,
    pub group: GroupLabel,
    pub share_prevalence: f64,
    pub share_diversity: f64,
    pub share_connectivity: f64,
    pub published_sbs: f64,
    pub reconstructed_sbs: f64,
    pub abs_delta: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table3Report {
    pub rule: &'static str,
    pub tolerance: f64,
    pub cells: Vec<CellCheck>,
    pub max_abs_delta: f64,
    pub flagged: usize,
}

impl Table3Report {
    pub fn passed(&self) -> bool {
        self.flagged == 0
    }

    pub fn cell(&self, orientation: &str, group: &str) -> Option<&CellCheck> {
        self.cells
            .iter()
            .find(|c| c.orientation == orientation && c.group.as_str() == group.to_lowercase())
    }
}

pub fn validate_grid(grid: &PublishedGrid) -> Table3Report {
    let mut cells = Vec::new();
    for o in &grid.orientations {
        for (g, group) in grid.groups.iter().enumerate() {
            let p = grid.get(Measure::Prevalence, o, g);
            let d = grid.get(Measure::Diversity, o, g);
            let c = grid.get(Measure::Connectivity, o, g);
            let published = grid.get(Measure::Sbs, o, g);
            let reconstructed = mean_of_shares(p, d, c);
            let abs_delta = (published - reconstructed).abs();
            cells.push(CellCheck {
                orientation: o.clone(),
                group: group.clone(),
                share_prevalence: p,
                share_diversity: d,
                share_connectivity: c,
                published_sbs: published,
                reconstructed_sbs: reconstructed,
                abs_delta,
                // a hair of slack so a cell exactly at the tolerance is not
                // flagged by float noise
                flagged: abs_delta > RECONSTRUCTION_TOLERANCE + 1e-9,
            });
        }
    }
    Table3Report {
        rule: "mean of component shares (reconstruction)",
        tolerance: RECONSTRUCTION_TOLERANCE,
        max_abs_delta: cells.iter().map(|c| c.abs_delta).fold(0.0, f64::max),
        flagged: cells.iter().filter(|c| c.flagged).count(),
        cells,
    }
}

pub fn validate_table3(path: &Path) -> Result<Table3Report> {
    Ok(validate_grid(&PublishedGrid::load(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_grid_reconstructs() {
        let report = validate_grid(&PublishedGrid::bundled());
        assert_eq!(report.cells.len(), 36);
        assert!(report.passed());
        assert!(report.max_abs_delta <= 1.0);
        let cell = report.cell("Citizenship", "Customers").unwrap();
        assert_eq!(format!("{:.2}", cell.reconstructed_sbs), "8.34");
        let worst = report.cell("Eco&Fin Growth", "media").unwrap();
        assert!((worst.abs_delta - 0.72).abs() < 1e-9);
    }

    #[test]
    fn consistent_grid_has_zero_deltas() {
        let text = "measure,orientation,a,b\n\
                    SBS,x,20,50\nSBS,y,80,50\n\
                    Prevalence,x,10,50\nPrevalence,y,90,50\n\
                    Diversity,x,20,40\nDiversity,y,80,60\n\
                    Connectivity,x,30,60\nConnectivity,y,70,40\n";
        let report = validate_grid(&PublishedGrid::parse(text).unwrap());
        assert!(report.cells.iter().all(|c| c.abs_delta < 1e-12));
    }

    #[test]
    fn corrupted_cell_is_flagged() {
        let corrupted = PUBLISHED_TABLE3.replace(
            "Semantic Brand Score,Citizenship,5.55%,2.91%,8.34%",
            "Semantic Brand Score,Citizenship,5.55%,2.91%,13.34%",
        );
        let report = validate_grid(&PublishedGrid::parse(&corrupted).unwrap());
        assert_eq!(report.flagged, 1);
        assert!(report.cell("Citizenship", "customers").unwrap().flagged);
    }

    #[test]
    fn malformed_grids() {
        assert!(PublishedGrid::parse("measure,orientation\n").is_err());
        assert!(PublishedGrid::parse("measure,orientation,a\nSBS,x,1\n").is_err());
        assert!(PublishedGrid::parse("measure,orientation,a\nSBS,x,abc\n").is_err());
        assert!(PublishedGrid::parse("measure,orientation,a\nPopularity,x,1\n").is_err());
        assert!(matches!(
            validate_table3(Path::new("/no/such/grid.csv")),
            Err(Error::Io { .. })
        ));
    }
}

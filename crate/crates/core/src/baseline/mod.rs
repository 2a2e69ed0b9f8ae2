//! Archetype baseline: place each building in a PUMA, estimate its floor
//! count and floor area, and borrow the hourly profile of the closest
//! simulated archetype.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::{point_in_polygon, LatLon};
use crate::records::{BuildingRecord, Hour, Target};

/// Assumed storey height in metres.
pub const FLOOR_HEIGHT_M: f64 = 3.5;

/// Largest accepted relative floor-area error between target and archetype.
pub const MAX_AREA_ERROR: f64 = 0.20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PumaRegion {
    pub puma_id: String,
    pub boundary: Vec<LatLon>,
}

impl PumaRegion {
    pub fn validate(&self) -> Result<()> {
        let open = match (self.boundary.first(), self.boundary.last()) {
            (Some(a), Some(b)) if a == b => self.boundary.len() - 1,
            _ => self.boundary.len(),
        };
        if open < 3 {
            return Err(Error::invalid(format!("region {} needs at least 3 distinct vertices", self.puma_id)));
        }
        Ok(())
    }
}

/// Hourly demand of one archetype, starting at `start` with one value per
/// hour in each series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchetypeProfile {
    pub start: Hour,
    pub heating: Vec<f64>,
    pub electricity: Vec<f64>,
}

impl ArchetypeProfile {
    pub fn len(&self) -> usize {
        self.heating.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heating.is_empty()
    }

    pub fn series(&self, target: Target) -> &[f64] {
        match target {
            Target::Heating => &self.heating,
            Target::Electricity => &self.electricity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchetypeRecord {
    pub archetype_id: String,
    pub puma_id: String,
    pub floors: u32,
    /// m²
    pub floor_area: f64,
    pub profile: ArchetypeProfile,
}

impl ArchetypeRecord {
    pub fn validate(&self) -> Result<()> {
        if self.floors == 0 {
            return Err(Error::invalid(format!("archetype {}: floors must be positive", self.archetype_id)));
        }
        if !(self.floor_area.is_finite() && self.floor_area > 0.0) {
            return Err(Error::invalid(format!("archetype {}: floor_area must be positive", self.archetype_id)));
        }
        if self.profile.heating.len() != self.profile.electricity.len() {
            return Err(Error::invalid(format!(
                "archetype {}: heating and electricity profiles differ in length",
                self.archetype_id
            )));
        }
        Ok(())
    }
}

/// Region whose boundary contains the centroid; boundary points go to the
/// first such region in input order.
pub fn assign_puma<'a>(building: &BuildingRecord, regions: &'a [PumaRegion]) -> Result<&'a str> {
    let p = LatLon::new(building.lat, building.lon);
    regions
        .iter()
        .find(|r| point_in_polygon(p, &r.boundary))
        .map(|r| r.puma_id.as_str())
        .ok_or_else(|| Error::Unassigned { building_id: building.building_id.clone() })
}

/// `max(1, round(height / 3.5))` with halves rounded up.
pub fn estimate_floors(height: f64) -> Result<u32> {
    if !(height.is_finite() && height > 0.0) {
        return Err(Error::domain(format!("height must be positive, got {height}")));
    }
    let floors = (height / FLOOR_HEIGHT_M + 0.5).floor();
    Ok(floors.max(1.0) as u32)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExclusionReason {
    /// No archetype shares the target's PUMA.
    NoCandidates,
    /// The PUMA has archetypes, but none with the target's floor count.
    NoFloorMatch,
    /// The closest archetype's floor area is off by more than 20 %.
    AreaError,
}

impl ExclusionReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExclusionReason::NoCandidates => "no_candidates",
            ExclusionReason::NoFloorMatch => "no_floor_match",
            ExclusionReason::AreaError => "area_error",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MatchOutcome<'a> {
    Matched { archetype: &'a ArchetypeRecord, relative_error: f64 },
    Excluded { reason: ExclusionReason, relative_error: Option<f64> },
}

impl MatchOutcome<'_> {
    pub fn archetype(&self) -> Option<&ArchetypeRecord> {
        match self {
            MatchOutcome::Matched { archetype, .. } => Some(archetype),
            MatchOutcome::Excluded { .. } => None,
        }
    }

    /// Signed `(archetype − target) / target` floor-area error, when a
    /// closest candidate existed.
    pub fn relative_error(&self) -> Option<f64> {
        match *self {
            MatchOutcome::Matched { relative_error, .. } => Some(relative_error),
            MatchOutcome::Excluded { relative_error, .. } => relative_error,
        }
    }
}

/// What the matcher knows about a target building.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchTarget<'a> {
    pub puma_id: &'a str,
    pub floors: u32,
    /// Estimated total floor area: footprint × floors.
    pub floor_area: f64,
}

pub fn match_archetype<'a>(target: &MatchTarget<'_>, archetypes: &'a [ArchetypeRecord]) -> Result<MatchOutcome<'a>> {
    if !(target.floor_area.is_finite() && target.floor_area > 0.0) {
        return Err(Error::domain(format!("target floor area must be positive, got {}", target.floor_area)));
    }
    let mut in_puma = archetypes.iter().filter(|a| a.puma_id == target.puma_id).peekable();
    if in_puma.peek().is_none() {
        return Ok(MatchOutcome::Excluded { reason: ExclusionReason::NoCandidates, relative_error: None });
    }
    let best = in_puma.filter(|a| a.floors == target.floors).min_by(|a, b| {
        let da = (a.floor_area - target.floor_area).abs();
        let db = (b.floor_area - target.floor_area).abs();
        da.total_cmp(&db).then_with(|| a.archetype_id.cmp(&b.archetype_id))
    });
    let Some(best) = best else {
        return Ok(MatchOutcome::Excluded { reason: ExclusionReason::NoFloorMatch, relative_error: None });
    };
    let relative_error = (best.floor_area - target.floor_area) / target.floor_area;
    if relative_error.abs() > MAX_AREA_ERROR {
        Ok(MatchOutcome::Excluded { reason: ExclusionReason::AreaError, relative_error: Some(relative_error) })
    } else {
        Ok(MatchOutcome::Matched { archetype: best, relative_error })
    }
}

/// Profile values at the requested hours, verbatim.
pub fn baseline_predict(archetype: &ArchetypeRecord, hours: &[Hour], target: Target) -> Result<Vec<f64>> {
    let series = archetype.profile.series(target);
    let start = archetype.profile.start.unix_hours();
    hours
        .iter()
        .map(|h| {
            let i = h.unix_hours() - start;
            usize::try_from(i)
                .ok()
                .and_then(|i| series.get(i).copied())
                .ok_or_else(|| Error::ProfileRange { hour: h.to_string() })
        })
        .collect()
}

/// Result row of matching one building.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineMatch {
    pub building_id: String,
    pub puma_id: Option<String>,
    pub floors: Option<u32>,
    pub archetype_id: Option<String>,
    pub exclusion: Option<String>,
    pub floor_area_error: Option<f64>,
}

/// Runs PUMA assignment, floor estimation and archetype matching for every
/// building, in input order. `heights` supplies the height used for each
/// building (observed or imputed).
pub fn match_buildings(
    buildings: &[BuildingRecord],
    heights: &[f64],
    regions: &[PumaRegion],
    archetypes: &[ArchetypeRecord],
) -> Result<Vec<BaselineMatch>> {
    if buildings.len() != heights.len() {
        return Err(Error::invalid("one height per building is required"));
    }
    buildings
        .iter()
        .zip(heights)
        .map(|(b, &h)| {
            let puma = match assign_puma(b, regions) {
                Ok(p) => p,
                Err(Error::Unassigned { .. }) => {
                    return Ok(BaselineMatch {
                        building_id: b.building_id.clone(),
                        puma_id: None,
                        floors: None,
                        archetype_id: None,
                        exclusion: Some("unassigned".into()),
                        floor_area_error: None,
                    })
                }
                Err(e) => return Err(e),
            };
            let floors = estimate_floors(h)?;
            let target = MatchTarget { puma_id: puma, floors, floor_area: b.footprint_area * floors as f64 };
            let outcome = match_archetype(&target, archetypes)?;
            Ok(BaselineMatch {
                building_id: b.building_id.clone(),
                puma_id: Some(puma.to_string()),
                floors: Some(floors),
                archetype_id: outcome.archetype().map(|a| a.archetype_id.clone()),
                exclusion: match outcome {
                    MatchOutcome::Excluded { reason, .. } => Some(reason.as_str().to_string()),
                    MatchOutcome::Matched { .. } => None,
                },
                floor_area_error: outcome.relative_error(),
            })
        })
        .collect()
}

/// Looks archetypes up by id.
pub fn index_archetypes(archetypes: &[ArchetypeRecord]) -> HashMap<&str, &ArchetypeRecord> {
    archetypes.iter().map(|a| (a.archetype_id.as_str(), a)).collect()
}

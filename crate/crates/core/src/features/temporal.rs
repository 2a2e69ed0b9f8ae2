use chrono::{Datelike, FixedOffset, Timelike};

use crate::error::{Error, Result};
use crate::records::Hour;

/// Seven day-of-week indicators (Monday first) followed by the hour of day,
/// all in local time at a fixed offset from UTC.
pub fn temporal_features(t: Hour, utc_offset_hours: i32) -> Result<[f64; 8]> {
    let offset = FixedOffset::east_opt(utc_offset_hours * 3600)
        .ok_or_else(|| Error::invalid(format!("UTC offset {utc_offset_hours} h is out of range")))?;
    let local = t.datetime().with_timezone(&offset);
    let mut out = [0.0; 8];
    out[local.weekday().num_days_from_monday() as usize] = 1.0;
    out[7] = local.hour() as f64;
    Ok(out)
}

pub const TEMPORAL_FEATURE_NAMES: [&str; 8] =
    ["dow_mon", "dow_tue", "dow_wed", "dow_thu", "dow_fri", "dow_sat", "dow_sun", "hour_of_day"];

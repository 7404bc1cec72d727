use std::cmp::Ordering;
use std::fmt;

use chrono::{DateTime, NaiveDate, NaiveDateTime, TimeDelta, Utc};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const SECONDS_PER_DAY: f64 = 86_400.0;

/// Instant on a uniform time scale, in days since 2000-01-01T00:00:00
/// (mjd2000). No leap seconds are modelled.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Epoch(f64);

fn mjd2000_origin() -> NaiveDateTime {
    NaiveDate::from_ymd_opt(2000, 1, 1)
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .expect("valid origin")
}

impl Epoch {
    pub const J2000_ORIGIN: Epoch = Epoch(0.0);

    pub fn from_mjd2000(days: f64) -> Result<Self> {
        if days.is_finite() {
            Ok(Epoch(days))
        } else {
            Err(Error::InvalidInput(format!("non-finite epoch {days}")))
        }
    }

    #[inline]
    pub fn mjd2000(self) -> f64 {
        self.0
    }

    pub fn from_utc(t: NaiveDateTime) -> Self {
        let delta = t - mjd2000_origin();
        let micros = delta
            .num_microseconds()
            .expect("calendar dates within ±290k years");
        Epoch(micros as f64 / 1e6 / SECONDS_PER_DAY)
    }

    pub fn from_datetime(t: DateTime<Utc>) -> Self {
        Self::from_utc(t.naive_utc())
    }

    /// Calendar date, rounded to the nearest microsecond.
    pub fn to_utc(self) -> NaiveDateTime {
        let micros = (self.0 * SECONDS_PER_DAY * 1e6).round() as i64;
        mjd2000_origin() + TimeDelta::microseconds(micros)
    }

    /// Parses `YYYY-MM-DDTHH:MM:SS[.fff]` or `YYYY-MM-DD HH:MM:SS[.fff]`.
    pub fn parse_utc(s: &str) -> Result<Self> {
        ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"]
            .iter()
            .find_map(|fmt| NaiveDateTime::parse_from_str(s.trim(), fmt).ok())
            .map(Self::from_utc)
            .ok_or_else(|| Error::InvalidInput(format!("unrecognized UTC timestamp {s:?}")))
    }

    #[inline]
    pub fn add_seconds(self, seconds: f64) -> Self {
        Epoch(self.0 + seconds / SECONDS_PER_DAY)
    }

    #[inline]
    pub fn add_days(self, days: f64) -> Self {
        Epoch(self.0 + days)
    }

    /// `self - earlier` in seconds.
    #[inline]
    pub fn seconds_since(self, earlier: Epoch) -> f64 {
        (self.0 - earlier.0) * SECONDS_PER_DAY
    }

    pub fn min(self, other: Epoch) -> Epoch {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Epoch) -> Epoch {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl Eq for Epoch {}

impl PartialOrd for Epoch {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Epoch {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl fmt::Display for Epoch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.6} mjd2000", self.0)
    }
}

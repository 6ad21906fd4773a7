//! Calendar days as a plain integer type.
//!
//! All series in this crate are keyed by [`Day`], a count of days since
//! 1970-01-01 in the proleptic Gregorian calendar. Keeping the key an
//! integer makes gap handling, ordering, and month arithmetic explicit
//! and keeps the crate independent of any timezone database; converting
//! an instant to a calendar day is the caller's concern (see
//! [`Day::from_epoch_seconds`]).

use alloc::format;
use alloc::string::String;
use core::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum DateError {
    #[error("invalid calendar date {year:04}-{month:02}-{day:02}")]
    InvalidDate { year: i32, month: u32, day: u32 },
    #[error("malformed date {0:?}, expected YYYY-MM-DD")]
    Malformed(String),
}

/// A calendar day, stored as days since 1970-01-01.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Day(i64);

/// Weekday labels indexed by [`Day::weekday`] (0 = Monday).
pub const WEEKDAY_NAMES: [&str; 7] = ["Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"];

impl Day {
    pub const fn from_days_since_epoch(days: i64) -> Self {
        Day(days)
    }

    pub const fn days_since_epoch(self) -> i64 {
        self.0
    }

    pub fn from_ymd(year: i32, month: u32, day: u32) -> Result<Self, DateError> {
        if !(1..=12).contains(&month) || day < 1 || day > days_in_month(year, month) {
            return Err(DateError::InvalidDate { year, month, day });
        }
        Ok(Day(days_from_civil(year, month, day)))
    }

    pub fn ymd(self) -> (i32, u32, u32) {
        civil_from_days(self.0)
    }

    /// Parses an ISO 8601 calendar date (`YYYY-MM-DD`).
    pub fn parse(s: &str) -> Result<Self, DateError> {
        let malformed = || DateError::Malformed(String::from(s));
        let mut parts = s.splitn(3, '-');
        let year: i32 = parts
            .next()
            .filter(|p| p.len() == 4)
            .and_then(|p| p.parse().ok())
            .ok_or_else(malformed)?;
        let month: u32 = parts
            .next()
            .filter(|p| p.len() == 2)
            .and_then(|p| p.parse().ok())
            .ok_or_else(malformed)?;
        let day: u32 = parts
            .next()
            .filter(|p| p.len() == 2)
            .and_then(|p| p.parse().ok())
            .ok_or_else(malformed)?;
        Day::from_ymd(year, month, day)
    }

    /// Calendar day containing the given Unix timestamp, under a fixed
    /// UTC offset in seconds (e.g. `9 * 3600` for JST).
    pub fn from_epoch_seconds(epoch_seconds: i64, utc_offset_seconds: i32) -> Self {
        Day((epoch_seconds + utc_offset_seconds as i64).div_euclid(86_400))
    }

    /// Day-of-week index, 0 = Monday .. 6 = Sunday.
    pub fn weekday(self) -> usize {
        (self.0 + 3).rem_euclid(7) as usize
    }

    pub fn offset(self, days: i64) -> Self {
        Day(self.0 + days)
    }

    pub fn succ(self) -> Self {
        self.offset(1)
    }

    /// Signed distance in days (`self - other`).
    pub fn days_since(self, other: Day) -> i64 {
        self.0 - other.0
    }

    pub fn year_month(self) -> (i32, u32) {
        let (y, m, _) = self.ymd();
        (y, m)
    }

    pub fn range_inclusive(start: Day, end: Day) -> impl Iterator<Item = Day> {
        (start.0..=end.0).map(Day)
    }
}

impl fmt::Display for Day {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (y, m, d) = self.ymd();
        write!(f, "{y:04}-{m:02}-{d:02}")
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for Day {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&format!("{self}"))
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for Day {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = <&str as serde::Deserialize>::deserialize(deserializer)?;
        Day::parse(s).map_err(serde::de::Error::custom)
    }
}

pub fn is_leap_year(year: i32) -> bool {
    year % 4 == 0 && (year % 100 != 0 || year % 400 == 0)
}

pub fn days_in_month(year: i32, month: u32) -> u32 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 => {
            if is_leap_year(year) {
                29
            } else {
                28
            }
        }
        _ => 0,
    }
}

/// First and last day of the given calendar month.
pub fn month_bounds(year: i32, month: u32) -> (Day, Day) {
    let first = Day(days_from_civil(year, month, 1));
    let last = Day(days_from_civil(year, month, days_in_month(year, month)));
    (first, last)
}

// Civil <-> day-count conversions for the proleptic Gregorian calendar,
// using the era/year-of-era formulation (exact over the full i64-safe range).
fn days_from_civil(year: i32, month: u32, day: u32) -> i64 {
    let y = year as i64 - if month <= 2 { 1 } else { 0 };
    let era = if y >= 0 { y } else { y - 399 } / 400;
    let yoe = (y - era * 400) as i64;
    let mp = if month > 2 { month - 3 } else { month + 9 } as i64;
    let doy = (153 * mp + 2) / 5 + day as i64 - 1;
    let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    era * 146_097 + doe - 719_468
}

fn civil_from_days(days: i64) -> (i32, u32, u32) {
    let z = days + 719_468;
    let era = if z >= 0 { z } else { z - 146_096 } / 146_097;
    let doe = z - era * 146_097;
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let y = yoe + era * 400;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = (doy - (153 * mp + 2) / 5 + 1) as u32;
    let m = if mp < 10 { mp + 3 } else { mp - 9 } as u32;
    ((y + if m <= 2 { 1 } else { 0 }) as i32, m, d)
}

//! Solar Hijri and Kurdish calendar arithmetic.
//!
//! Leap years follow the 33-year arithmetic cycle: year `y` is leap when
//! `(25y + 11) mod 33 < 8`, i.e. `y mod 33` is one of 1, 5, 9, 13, 17, 22,
//! 26, 30. Months 1-6 have 31 days, 7-11 have 30, and the last month has
//! 29 days (30 in leap years). The Kurdish calendar uses the same months
//! with the year shifted by 1321.

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

/// Years added to a Solar Hijri year to obtain the Kurdish-calendar year.
pub const KURDISH_YEAR_OFFSET: i64 = 1321;

/// Calendar a site publishes its dates in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CalendarKind {
    Gregorian,
    SolarHijri,
    Kurdish,
}

impl std::str::FromStr for CalendarKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gregorian" => Ok(CalendarKind::Gregorian),
            "solar-hijri" => Ok(CalendarKind::SolarHijri),
            "kurdish" => Ok(CalendarKind::Kurdish),
            other => Err(format!("unknown calendar `{other}`")),
        }
    }
}

/// A date in the Solar Hijri calendar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SolarHijriDate {
    pub year: i64,
    pub month: u32,
    pub day: u32,
}

// 1 Farvardin 1399 fell on 2020-03-20.
const ANCHOR_YEAR: i64 = 1399;
const ANCHOR_GREGORIAN: (i32, u32, u32) = (2020, 3, 20);

pub fn is_leap(year: i64) -> bool {
    (25 * year + 11).rem_euclid(33) < 8
}

pub fn month_length(year: i64, month: u32) -> Option<u32> {
    match month {
        1..=6 => Some(31),
        7..=11 => Some(30),
        12 if is_leap(year) => Some(30),
        12 => Some(29),
        _ => None,
    }
}

/// Leap years in `1..=n`.
fn leaps_through(n: i64) -> i64 {
    let cycles = n.div_euclid(33);
    let rest = n.rem_euclid(33);
    8 * cycles + (1..=rest).filter(|&r| is_leap(r)).count() as i64
}

/// Days from 1 Farvardin of year 1 to 1 Farvardin of `year`.
fn days_before_year(year: i64) -> i64 {
    365 * (year - 1) + leaps_through(year - 1)
}

fn days_before_month(year: i64, month: u32) -> i64 {
    (1..month).map(|m| i64::from(month_length(year, m).unwrap_or(0))).sum()
}

/// Day number (days since 0001-01-01 CE, proleptic Gregorian) of 1 Farvardin, year 1.
fn epoch() -> i64 {
    let (y, m, d) = ANCHOR_GREGORIAN;
    let anchor = NaiveDate::from_ymd_opt(y, m, d).expect("valid anchor");
    i64::from(anchor.num_days_from_ce()) - days_before_year(ANCHOR_YEAR)
}

impl SolarHijriDate {
    pub fn new(year: i64, month: u32, day: u32) -> Option<Self> {
        if year < 1 || day == 0 || day > month_length(year, month)? {
            return None;
        }
        Some(SolarHijriDate { year, month, day })
    }

    pub fn to_gregorian(self) -> Option<NaiveDate> {
        let days = epoch() + days_before_year(self.year) + days_before_month(self.year, self.month) + i64::from(self.day) - 1;
        NaiveDate::from_num_days_from_ce_opt(i32::try_from(days).ok()?)
    }

    pub fn from_gregorian(date: NaiveDate) -> Option<Self> {
        let offset = i64::from(date.num_days_from_ce()) - epoch();
        if offset < 0 {
            return None;
        }
        let mut year = offset * 33 / 12053 + 1;
        while days_before_year(year) > offset {
            year -= 1;
        }
        while days_before_year(year + 1) <= offset {
            year += 1;
        }
        let mut day_of_year = offset - days_before_year(year);
        let mut month = 1;
        loop {
            let len = i64::from(month_length(year, month)?);
            if day_of_year < len {
                break;
            }
            day_of_year -= len;
            month += 1;
        }
        SolarHijriDate::new(year, month, day_of_year as u32 + 1)
    }
}

/// Converts a (year, month, day) triple in `calendar` to a Gregorian date.
pub fn to_gregorian(calendar: CalendarKind, year: i64, month: u32, day: u32) -> Option<NaiveDate> {
    match calendar {
        CalendarKind::Gregorian => NaiveDate::from_ymd_opt(i32::try_from(year).ok()?, month, day),
        CalendarKind::SolarHijri => SolarHijriDate::new(year, month, day)?.to_gregorian(),
        CalendarKind::Kurdish => SolarHijriDate::new(year - KURDISH_YEAR_OFFSET, month, day)?.to_gregorian(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    #[test]
    fn leap_set_matches_cycle_positions() {
        let leaps: Vec<i64> = (0..33).filter(|&y| is_leap(y)).collect();
        assert_eq!(leaps, vec![1, 5, 9, 13, 17, 22, 26, 30]);
        let in_range: Vec<i64> = (1368..=1409).filter(|&y| is_leap(y)).collect();
        assert_eq!(in_range, vec![1370, 1375, 1379, 1383, 1387, 1391, 1395, 1399, 1403, 1408]);
    }

    #[test]
    fn nowruz_table() {
        // Published Nowruz dates.
        let table = [
            (1369, g(1990, 3, 21)),
            (1375, g(1996, 3, 20)),
            (1399, g(2020, 3, 20)),
            (1400, g(2021, 3, 21)),
            (1403, g(2024, 3, 20)),
            (1404, g(2025, 3, 21)),
        ];
        for (year, greg) in table {
            assert_eq!(SolarHijriDate::new(year, 1, 1).unwrap().to_gregorian(), Some(greg), "{year}");
            assert_eq!(SolarHijriDate::from_gregorian(greg), SolarHijriDate::new(year, 1, 1));
        }
    }

    #[test]
    fn rejects_invalid_days() {
        assert!(SolarHijriDate::new(1398, 12, 30).is_none());
        assert!(SolarHijriDate::new(1399, 12, 30).is_some());
        assert!(SolarHijriDate::new(1399, 7, 31).is_none());
        assert!(SolarHijriDate::new(1399, 13, 1).is_none());
    }

    #[test]
    fn kurdish_is_offset_solar_hijri() {
        assert_eq!(to_gregorian(CalendarKind::Kurdish, 2720, 2, 6), to_gregorian(CalendarKind::SolarHijri, 1399, 2, 6));
        assert_eq!(to_gregorian(CalendarKind::SolarHijri, 1399, 2, 6), Some(g(2020, 4, 25)));
    }
}

//! Parsing of the date strings found on news pages.

use chrono::NaiveDate;
use thiserror::Error;

use super::calendar::{self, CalendarKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DateError {
    #[error("unrecognized date `{0}`")]
    Unrecognized(String),
    #[error("date `{raw}` does not exist in the {calendar:?} calendar")]
    OutOfRange { raw: String, calendar: CalendarKind },
}

const ENGLISH_MONTHS: [&str; 12] = [
    "january", "february", "march", "april", "may", "june", "july", "august", "september", "october", "november",
    "december",
];

const KURMANJI_MONTHS: [&str; 12] =
    ["kanûn", "sibat", "adar", "nîsan", "gulan", "hezîran", "tîrmeh", "tebax", "îlon", "cotmeh", "mijdar", "berfanbar"];

const PERSIAN_MONTHS: [&str; 12] =
    ["فروردین", "اردیبهشت", "خرداد", "تیر", "مرداد", "شهریور", "مهر", "آبان", "آذر", "دی", "بهمن", "اسفند"];

const SORANI_SOLAR_MONTHS: [&str; 12] = [
    "خاکەلێوە", "گوڵان", "جۆزەردان", "پووشپەڕ", "گەلاوێژ", "خەرمانان", "ڕەزبەر", "گەڵاڕێزان", "سەرماوەز", "بەفرانبار",
    "ڕێبەندان", "ڕەشەمە",
];

/// Replaces Arabic-Indic and Extended Arabic-Indic digits with ASCII ones.
pub fn ascii_digits(s: &str) -> String {
    s.chars()
        .map(|c| match c {
            '\u{0660}'..='\u{0669}' => char::from(b'0' + (c as u32 - 0x0660) as u8),
            '\u{06F0}'..='\u{06F9}' => char::from(b'0' + (c as u32 - 0x06F0) as u8),
            _ => c,
        })
        .collect()
}

fn month_names(calendar: CalendarKind) -> Vec<&'static [&'static str; 12]> {
    match calendar {
        CalendarKind::Gregorian => vec![&ENGLISH_MONTHS, &KURMANJI_MONTHS],
        CalendarKind::SolarHijri | CalendarKind::Kurdish => vec![&PERSIAN_MONTHS, &SORANI_SOLAR_MONTHS],
    }
}

/// Finds a month name, preferring the longest match ("may" must not win
/// over a longer name that contains it).
fn find_month(text: &str, calendar: CalendarKind) -> Option<u32> {
    let lower = text.to_lowercase();
    let words: Vec<&str> = lower.split(|c: char| !c.is_alphabetic() && c != '\u{200C}').filter(|w| !w.is_empty()).collect();
    let mut best: Option<(usize, u32)> = None;
    for names in month_names(calendar) {
        for (i, name) in names.iter().enumerate() {
            let hit = words.iter().any(|w| {
                *w == *name || (name.chars().count() >= 4 && w.starts_with(name)) || (w.chars().count() >= 3 && name.starts_with(*w))
            });
            if hit && best.map_or(true, |(len, _)| name.len() > len) {
                best = Some((name.len(), i as u32 + 1));
            }
        }
    }
    best.map(|(_, m)| m)
}

/// Converts a raw page date in the given calendar to a Gregorian date.
///
/// Accepted shapes: year-first or day-first numeric dates with `-`, `/`,
/// `.` or spaces as separators (an ISO timestamp is cut to its date), and
/// "day month-name year" / "month-name day, year" forms. Arabic-Indic
/// digits are accepted.
pub fn normalize_date(raw: &str, calendar: CalendarKind) -> Result<NaiveDate, DateError> {
    let text = ascii_digits(raw.trim());
    let numbers: Vec<&str> = text.split(|c: char| !c.is_ascii_digit()).filter(|s| !s.is_empty()).collect();
    let unrecognized = || DateError::Unrecognized(raw.to_string());

    let (year, month, day) = if let Some(month) = find_month(&text, calendar) {
        let (year, day) = match numbers.as_slice() {
            [a, b, ..] if a.len() == 4 => (*a, *b),
            [a, b, ..] => (*b, *a),
            _ => return Err(unrecognized()),
        };
        (year.parse::<i64>().map_err(|_| unrecognized())?, month, day.parse::<u32>().map_err(|_| unrecognized())?)
    } else {
        let [a, b, c] = match numbers.as_slice() {
            [a, b, c, ..] => [*a, *b, *c],
            _ => return Err(unrecognized()),
        };
        let (y, m, d) = if a.len() == 4 {
            (a, b, c)
        } else if c.len() == 4 {
            (c, b, a)
        } else {
            return Err(unrecognized());
        };
        (
            y.parse::<i64>().map_err(|_| unrecognized())?,
            m.parse::<u32>().map_err(|_| unrecognized())?,
            d.parse::<u32>().map_err(|_| unrecognized())?,
        )
    };

    calendar::to_gregorian(calendar, year, month, day)
        .ok_or_else(|| DateError::OutOfRange { raw: raw.to_string(), calendar })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iso(d: NaiveDate) -> String {
        d.format("%Y-%m-%d").to_string()
    }

    #[test]
    fn gregorian_identity() {
        assert_eq!(iso(normalize_date("2020-04-25", CalendarKind::Gregorian).unwrap()), "2020-04-25");
        assert_eq!(iso(normalize_date("2020-04-25T08:15:00+03:00", CalendarKind::Gregorian).unwrap()), "2020-04-25");
        assert_eq!(iso(normalize_date("25/04/2020", CalendarKind::Gregorian).unwrap()), "2020-04-25");
        assert_eq!(iso(normalize_date("April 25, 2020", CalendarKind::Gregorian).unwrap()), "2020-04-25");
        assert_eq!(iso(normalize_date("25 Nîsan 2020", CalendarKind::Gregorian).unwrap()), "2020-04-25");
    }

    #[test]
    fn solar_hijri_and_kurdish() {
        assert_eq!(iso(normalize_date("1399-02-06", CalendarKind::SolarHijri).unwrap()), "2020-04-25");
        assert_eq!(iso(normalize_date("۱۳۹۹/۰۲/۰۶", CalendarKind::SolarHijri).unwrap()), "2020-04-25");
        assert_eq!(iso(normalize_date("6 اردیبهشت 1399", CalendarKind::SolarHijri).unwrap()), "2020-04-25");
        assert_eq!(iso(normalize_date("2720-02-06", CalendarKind::Kurdish).unwrap()), "2020-04-25");
        assert_eq!(iso(normalize_date("٦ی گوڵانی ٢٧٢٠", CalendarKind::Kurdish).unwrap()), "2020-04-25");
    }

    #[test]
    fn errors() {
        assert!(matches!(normalize_date("yesterday", CalendarKind::Gregorian), Err(DateError::Unrecognized(_))));
        assert!(matches!(normalize_date("2020-02-30", CalendarKind::Gregorian), Err(DateError::OutOfRange { .. })));
        assert!(matches!(normalize_date("1398-12-30", CalendarKind::SolarHijri), Err(DateError::OutOfRange { .. })));
    }
}

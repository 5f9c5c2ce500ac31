//! Year field parsing. Detection and canonicalization share this parser so
//! they can never disagree on what is parseable.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::DateParts;

/// How to read `NN-NN-YYYY` / `NN/NN/YYYY`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DateOrder {
    #[default]
    MonthFirst,
    DayFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DateFormat {
    Year,
    IsoYearMonth,
    IsoDate,
    /// `YYYY/MM/DD`, or dashed without zero padding.
    YearFirst,
    DashedNumeric,
    SlashedNumeric,
    MonthDayYear,
    DayMonthYear,
    MonthYear,
}

impl DateFormat {
    /// Formats that need no canonicalization.
    pub fn is_iso(self) -> bool {
        matches!(self, DateFormat::Year | DateFormat::IsoYearMonth | DateFormat::IsoDate)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParsedDate {
    pub parts: DateParts,
    pub format: DateFormat,
}

const MONTHS: [&str; 12] = [
    "january",
    "february",
    "march",
    "april",
    "may",
    "june",
    "july",
    "august",
    "september",
    "october",
    "november",
    "december",
];

fn month_from_name(s: &str) -> Option<u8> {
    let s = s.trim_end_matches('.').to_lowercase();
    if s.len() < 3 {
        return None;
    }
    if s == "sept" {
        return Some(9);
    }
    MONTHS
        .iter()
        .position(|m| *m == s || (s.len() == 3 && m.starts_with(&s)))
        .map(|i| i as u8 + 1)
}

pub fn is_leap_year(year: i32) -> bool {
    (year % 4 == 0 && year % 100 != 0) || year % 400 == 0
}

pub fn days_in_month(year: i32, month: u8) -> u8 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 if is_leap_year(year) => 29,
        2 => 28,
        _ => 0,
    }
}

fn digits(s: &str, min: usize, max: usize) -> Option<u32> {
    if (min..=max).contains(&s.len()) && s.bytes().all(|b| b.is_ascii_digit()) {
        s.parse().ok()
    } else {
        None
    }
}

fn year4(s: &str) -> Option<i32> {
    digits(s, 4, 4).map(|y| y as i32)
}

fn checked(year: i32, month: u32, day: Option<u32>) -> Option<DateParts> {
    if !(1..=12).contains(&month) {
        return None;
    }
    let month = month as u8;
    match day {
        None => Some(DateParts::year_month(year, month)),
        Some(d) if d >= 1 && d <= days_in_month(year, month) as u32 => Some(DateParts::ymd(year, month, d as u8)),
        Some(_) => None,
    }
}

/// Tries each accepted format in order and validates the calendar date.
pub fn parse_year_value(value: &str, order: DateOrder) -> Result<ParsedDate> {
    let s = value.trim();
    let fail = || Error::UnparseableDate(value.to_string());
    let found = |parts: Option<DateParts>, format| parts.map(|parts| ParsedDate { parts, format });

    if let Some(y) = year4(s) {
        return Ok(ParsedDate {
            parts: DateParts::year_only(y),
            format: DateFormat::Year,
        });
    }

    for sep in ['-', '/'] {
        let pieces: Vec<&str> = s.split(sep).collect();
        if pieces.len() == 3 {
            if let (Some(y), Some(m), Some(d)) = (year4(pieces[0]), digits(pieces[1], 1, 2), digits(pieces[2], 1, 2)) {
                let fmt = if sep == '-' && pieces[1].len() == 2 && pieces[2].len() == 2 {
                    DateFormat::IsoDate
                } else {
                    DateFormat::YearFirst
                };
                return found(checked(y, m, Some(d)), fmt).ok_or_else(fail);
            }
            let fmt = if sep == '-' {
                DateFormat::DashedNumeric
            } else {
                DateFormat::SlashedNumeric
            };
            if let (Some(a), Some(b), Some(y)) = (digits(pieces[0], 1, 2), digits(pieces[1], 1, 2), year4(pieces[2])) {
                let (m, d) = match order {
                    DateOrder::MonthFirst => (a, b),
                    DateOrder::DayFirst => (b, a),
                };
                return found(checked(y, m, Some(d)), fmt).ok_or_else(fail);
            }
        }
        if sep == '-' && pieces.len() == 2 {
            if let (Some(y), Some(m)) = (year4(pieces[0]), digits(pieces[1], 2, 2)) {
                return found(checked(y, m, None), DateFormat::IsoYearMonth).ok_or_else(fail);
            }
        }
    }

    let words: Vec<&str> = s.split_whitespace().collect();
    match words.as_slice() {
        [a, b, c] => {
            if let (Some(m), Some(d), Some(y)) = (month_from_name(a), digits(b.trim_end_matches(','), 1, 2), year4(c)) {
                return found(checked(y, m.into(), Some(d)), DateFormat::MonthDayYear).ok_or_else(fail);
            }
            if let (Some(d), Some(m), Some(y)) = (digits(a, 1, 2), month_from_name(b), year4(c)) {
                return found(checked(y, m.into(), Some(d)), DateFormat::DayMonthYear).ok_or_else(fail);
            }
        }
        [a, b] => {
            if let (Some(m), Some(y)) = (month_from_name(a.trim_end_matches(',')), year4(b)) {
                return found(checked(y, m.into(), None), DateFormat::MonthYear).ok_or_else(fail);
            }
        }
        _ => {}
    }
    Err(fail())
}

/// Splits a year value into year / month / day parts.
pub fn canonicalize_year(value: &str, order: DateOrder) -> Result<DateParts> {
    parse_year_value(value, order).map(|p| p.parts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<DateParts> {
        canonicalize_year(s, DateOrder::MonthFirst)
    }

    #[test]
    fn examples() {
        assert_eq!(parse("05-17-2015").unwrap(), DateParts::ymd(2015, 5, 17));
        assert_eq!(parse("2015").unwrap(), DateParts::year_only(2015));
        assert!(parse("02-30-2015").is_err());
    }

    #[test]
    fn every_format() {
        let cases = [
            ("2015", DateParts::year_only(2015), DateFormat::Year),
            ("2015-05", DateParts::year_month(2015, 5), DateFormat::IsoYearMonth),
            ("2015-05-17", DateParts::ymd(2015, 5, 17), DateFormat::IsoDate),
            ("2015/5/17", DateParts::ymd(2015, 5, 17), DateFormat::YearFirst),
            ("2015-5-17", DateParts::ymd(2015, 5, 17), DateFormat::YearFirst),
            ("5-17-2015", DateParts::ymd(2015, 5, 17), DateFormat::DashedNumeric),
            ("05/17/2015", DateParts::ymd(2015, 5, 17), DateFormat::SlashedNumeric),
            ("May 17, 2015", DateParts::ymd(2015, 5, 17), DateFormat::MonthDayYear),
            ("Sept. 3, 2001", DateParts::ymd(2001, 9, 3), DateFormat::MonthDayYear),
            ("17 May 2015", DateParts::ymd(2015, 5, 17), DateFormat::DayMonthYear),
            ("December 2012", DateParts::year_month(2012, 12), DateFormat::MonthYear),
            ("dec 2012", DateParts::year_month(2012, 12), DateFormat::MonthYear),
        ];
        for (s, parts, fmt) in cases {
            let got = parse_year_value(s, DateOrder::MonthFirst).unwrap_or_else(|e| panic!("{s}: {e}"));
            assert_eq!(got.parts, parts, "{s}");
            assert_eq!(got.format, fmt, "{s}");
        }
    }

    #[test]
    fn day_first_switch() {
        assert_eq!(
            canonicalize_year("05-11-2015", DateOrder::DayFirst).unwrap(),
            DateParts::ymd(2015, 11, 5)
        );
        assert!(canonicalize_year("05-17-2015", DateOrder::DayFirst).is_err());
    }

    #[test]
    fn leap_days() {
        assert!(parse("02-29-2016").is_ok());
        assert!(parse("02-29-2015").is_err());
        assert!(parse("2000-02-29").is_ok());
        assert!(parse("1900-02-29").is_err());
    }

    #[test]
    fn rejects_garbage() {
        for s in ["20xx", "", "15", "2015-13-01", "13/45/2015", "Spring 2015", "2015-5", "Mayday 2015", "12345"] {
            assert!(parse(s).is_err(), "{s}");
        }
    }
}

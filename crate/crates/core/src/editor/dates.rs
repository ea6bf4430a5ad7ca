//! Best-effort date extraction from free-form value text.
//!
//! Recognized forms: `YYYY-MM-DD`, `Month D, YYYY`, `D Month YYYY`,
//! `Month YYYY` and a bare `YYYY`. Partial dates compare as their first day.

use std::sync::LazyLock;

use chrono::NaiveDate;
use regex::Regex;

const MONTH_ALT: &str = r"jan(?:uary)?|feb(?:ruary)?|mar(?:ch)?|apr(?:il)?|may|june?|july?|aug(?:ust)?|sept(?:ember)?|sep|oct(?:ober)?|nov(?:ember)?|dec(?:ember)?";

static DATE_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(&format!(
        r"(?ix)
        \b(?P<iy>\d{{4}})-(?P<im>\d{{1,2}})-(?P<id>\d{{1,2}})\b
        | \b(?P<m1>{MONTH_ALT})\.?\s+(?P<d1>\d{{1,2}})(?:st|nd|rd|th)?,?\s+(?P<y1>\d{{4}})\b
        | \b(?P<d2>\d{{1,2}})\s+(?P<m2>{MONTH_ALT})\.?,?\s+(?P<y2>\d{{4}})\b
        | \b(?P<m3>{MONTH_ALT})\.?,?\s+(?P<y3>\d{{4}})\b
        | \b(?P<y4>\d{{4}})\b
        "
    ))
    .unwrap()
});

fn month_number(name: &str) -> Option<u32> {
    let lower = name.to_ascii_lowercase();
    let m = match lower.get(..3)? {
        "jan" => 1,
        "feb" => 2,
        "mar" => 3,
        "apr" => 4,
        "may" => 5,
        "jun" => 6,
        "jul" => 7,
        "aug" => 8,
        "sep" => 9,
        "oct" => 10,
        "nov" => 11,
        "dec" => 12,
        _ => return None,
    };
    Some(m)
}

/// Every date found in `text`, in order of appearance.
pub fn extract_dates(text: &str) -> Vec<NaiveDate> {
    let num = |c: &regex::Captures, name: &str| c.name(name).and_then(|m| m.as_str().parse::<u32>().ok());
    let year = |c: &regex::Captures, name: &str| c.name(name).and_then(|m| m.as_str().parse::<i32>().ok());
    DATE_RE
        .captures_iter(text)
        .filter_map(|c| {
            if let Some(y) = year(&c, "iy") {
                NaiveDate::from_ymd_opt(y, num(&c, "im")?, num(&c, "id")?)
            } else if let Some(y) = year(&c, "y1") {
                NaiveDate::from_ymd_opt(y, month_number(c.name("m1")?.as_str())?, num(&c, "d1")?)
            } else if let Some(y) = year(&c, "y2") {
                NaiveDate::from_ymd_opt(y, month_number(c.name("m2")?.as_str())?, num(&c, "d2")?)
            } else if let Some(y) = year(&c, "y3") {
                NaiveDate::from_ymd_opt(y, month_number(c.name("m3")?.as_str())?, 1)
            } else {
                let y = year(&c, "y4")?;
                (1000..=2999)
                    .contains(&y)
                    .then(|| NaiveDate::from_ymd_opt(y, 1, 1))
                    .flatten()
            }
        })
        .collect()
}

/// Earliest date across all values, if any parses.
pub fn earliest_date<'a, I: IntoIterator<Item = &'a str>>(values: I) -> Option<NaiveDate> {
    values.into_iter().flat_map(extract_dates).min()
}

//! Hand-built fixtures.

use tabforge_core::initializer::TypeGroup;
use tabforge_core::model::{DatasetTag, Hypothesis, Label, Section, Table, ValueCell};

fn table(id: &str, title: &str, category: &str, rows: &[(&str, &[&str])]) -> Table {
    Table {
        table_id: id.into(),
        title: title.into(),
        category: category.into(),
        sections: rows
            .iter()
            .map(|(k, vs)| Section::new(*k, vs.iter().map(|v| ValueCell::new(*v)).collect()))
            .collect(),
    }
}

/// Six tables in two categories spread over both dataset tags.
pub fn toy_corpus() -> Vec<(Table, DatasetTag)> {
    vec![
        (
            table(
                "p1",
                "Kirk Douglas",
                "Person",
                &[
                    ("Born", &["December 9, 1916"]),
                    ("Died", &["February 5, 2020"]),
                    ("Spouse", &["Diana Dill", "Anne Buydens"]),
                    ("Occupation", &["actor", "producer"]),
                    ("Net worth", &["$60 million"]),
                    ("Notes", &["1999"]),
                ],
            ),
            DatasetTag::Test,
        ),
        (
            table(
                "p2",
                "Grace Kelly",
                "Person",
                &[
                    ("Born", &["November 12, 1929"]),
                    ("Died", &["September 14, 1982"]),
                    ("Spouse", &["Rainier Grimaldi"]),
                    ("Occupation", &["actress", "princess"]),
                    ("Notes", &["see below"]),
                ],
            ),
            DatasetTag::Test,
        ),
        (
            table(
                "p3",
                "Miles Davis",
                "Person",
                &[
                    ("Born", &["May 26, 1926"]),
                    ("Died", &["September 28, 1991"]),
                    ("Spouse", &["Frances Taylor", "Betty Mabry"]),
                    ("Occupation", &["trumpeter"]),
                    ("Net worth", &["$1.5 million"]),
                ],
            ),
            DatasetTag::Train,
        ),
        (
            table(
                "a1",
                "Kind of Blue",
                "Album",
                &[
                    ("Released", &["August 17, 1959"]),
                    ("Recorded", &["March 2, 1959", "April 22, 1959"]),
                    ("Producer", &["Teo Macero", "Irving Townsend"]),
                    ("Length", &["45 minutes"]),
                    ("Genre", &["jazz", "modal"]),
                    ("Tracks", &["5"]),
                ],
            ),
            DatasetTag::Test,
        ),
        (
            table(
                "a2",
                "Abbey Road",
                "Album",
                &[
                    ("Released", &["26 September 1969"]),
                    ("Recorded", &["February 1969"]),
                    ("Producer", &["George Martin"]),
                    ("Length", &["47 minutes"]),
                    ("Genre", &["rock"]),
                    ("Tracks", &["17"]),
                ],
            ),
            DatasetTag::Train,
        ),
        (
            table(
                "a3",
                "Thriller",
                "Album",
                &[
                    ("Released", &["November 30, 1982"]),
                    ("Recorded", &["April 14, 1982"]),
                    ("Producer", &["Quincy Jones", "Michael Jackson"]),
                    ("Length", &["42 minutes"]),
                    ("Genre", &["pop", "funk"]),
                ],
            ),
            DatasetTag::Train,
        ),
    ]
}

/// Type group of every toy-corpus key, assigned by hand. `None` is untyped.
pub const TOY_KEY_GROUPS: &[(&str, Option<TypeGroup>)] = &[
    ("Born", Some(TypeGroup::Date)),
    ("Died", Some(TypeGroup::Date)),
    ("Spouse", Some(TypeGroup::Name)),
    ("Occupation", Some(TypeGroup::Other)),
    ("Net worth", Some(TypeGroup::Money)),
    ("Notes", None),
    ("Released", Some(TypeGroup::Date)),
    ("Recorded", Some(TypeGroup::Date)),
    ("Producer", Some(TypeGroup::Name)),
    ("Length", Some(TypeGroup::Duration)),
    ("Genre", Some(TypeGroup::Other)),
    ("Tracks", Some(TypeGroup::Number)),
];

pub fn toy_group(key: &str) -> Option<TypeGroup> {
    TOY_KEY_GROUPS.iter().find(|(k, _)| *k == key).and_then(|(_, g)| *g)
}

/// Three hypotheses per toy table, one of each label.
pub fn toy_hypotheses(t: &Table) -> Vec<Hypothesis> {
    vec![
        Hypothesis::new("h0", format!("{} is well known.", t.title), Label::Entail),
        Hypothesis::new("h1", format!("{} never existed.", t.title), Label::Contradict),
        Hypothesis::new("h2", format!("{} was popular in France.", t.title), Label::Neutral),
    ]
}

/// Year, month, day.
pub type Ymd = (i32, u32, u32);

/// Hand-parsed dates: input text and the earliest date it contains.
pub const DATE_FIXTURE: &[(&str, Option<Ymd>)] = &[
    ("1950", Some((1950, 1, 1))),
    ("May 17, 1792; 226 years ago", Some((1792, 5, 17))),
    ("17 May 1792", Some((1792, 5, 17))),
    ("March 1970", Some((1970, 3, 1))),
    ("1942-11-27", Some((1942, 11, 27))),
    ("(1942-11-27)November 27, 1942", Some((1942, 11, 27))),
    ("Sept. 3, 2001", Some((2001, 9, 3))),
    ("3 Dec 1999", Some((1999, 12, 3))),
    ("December 9, 1916 Amsterdam, New York, U.S.", Some((1916, 12, 9))),
    ("1969 – 1975", Some((1969, 1, 1))),
    ("aug 1, 2010 and July 4, 1776", Some((1776, 7, 4))),
    ("February 29, 2000", Some((2000, 2, 29))),
    ("February 29, 1900", None),
    ("gibberish", None),
    ("", None),
    ("2,400", None),
    ("999", None),
    ("c. 3500", None),
    ("Ireland, 1845", Some((1845, 1, 1))),
    ("June 1st, 1980", Some((1980, 6, 1))),
];

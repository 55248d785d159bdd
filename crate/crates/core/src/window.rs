//! The eight fixed study windows.

use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RoundId {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
}

impl RoundId {
    pub const ALL: [RoundId; 8] = [
        RoundId::A,
        RoundId::B,
        RoundId::C,
        RoundId::D,
        RoundId::E,
        RoundId::F,
        RoundId::G,
        RoundId::H,
    ];

    pub fn letter(self) -> char {
        (b'a' + self as u8) as char
    }

    pub fn window(self) -> StudyWindow {
        round_windows()[self as usize].clone()
    }
}

impl fmt::Display for RoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for RoundId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        RoundId::ALL
            .iter()
            .copied()
            .find(|r| lower.len() == 1 && lower.starts_with(r.letter()))
            .ok_or_else(|| Error::Config(format!("unknown round `{s}`; expected one of a..h")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StudyWindow {
    pub id: RoundId,
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub label: String,
}

impl StudyWindow {
    /// Calendar days in the window, both ends included.
    pub fn days(&self) -> usize {
        (self.end - self.start).num_days() as usize + 1
    }
}

fn date(m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(2020, m, d).expect("valid calendar date")
}

/// The eight study windows, in round order.
pub fn round_windows() -> Vec<StudyWindow> {
    let spec = [
        (RoundId::A, (3, 25), (4, 14), "Lockdown 1.0"),
        (RoundId::B, (4, 15), (5, 3), "Lockdown 2.0"),
        (RoundId::C, (5, 4), (5, 17), "Lockdown 3.0"),
        (RoundId::D, (5, 18), (5, 31), "Lockdown 4.0"),
        (RoundId::E, (6, 1), (6, 30), "Unlock 1.0"),
        (RoundId::F, (3, 25), (6, 30), "Lockdown 1.0 to Unlock 1.0"),
        (RoundId::G, (3, 11), (4, 14), "Pre-lockdown to Lockdown 1.0"),
        (RoundId::H, (3, 11), (6, 30), "Pre-lockdown to Unlock 1.0"),
    ];
    spec.iter()
        .map(|&(id, (sm, sd), (em, ed), label)| StudyWindow {
            id,
            start: date(sm, sd),
            end: date(em, ed),
            label: label.to_string(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_lengths() {
        let days: Vec<usize> = round_windows().iter().map(StudyWindow::days).collect();
        assert_eq!(days, [21, 19, 14, 14, 30, 98, 35, 112]);
        let a = RoundId::A.window();
        assert_eq!((a.start, a.end), (date(3, 25), date(4, 14)));
        assert_eq!(RoundId::H.window().start, date(3, 11));
    }

    #[test]
    fn parse_and_display() {
        for r in RoundId::ALL {
            assert_eq!(r.to_string().parse::<RoundId>().unwrap(), r);
        }
        assert_eq!("F".parse::<RoundId>().unwrap(), RoundId::F);
        assert!("i".parse::<RoundId>().is_err());
        assert!("ab".parse::<RoundId>().is_err());
    }
}

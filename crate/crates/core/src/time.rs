//! Durations and prediction horizons.
//!
//! The canonical unit everywhere is seconds as `f64`. Duration literals in
//! configs and on the command line accept `s`, `m`, `h` and `d` suffixes
//! (`"90"`, `"30m"`, `"6h"`, `"1.5d"`); `inf` denotes the infinite horizon.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MINUTE: f64 = 60.0;
pub const HOUR: f64 = 3600.0;
pub const DAY: f64 = 86_400.0;

/// Length of a prediction horizon: a positive finite duration or `+∞`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Horizon {
    Finite(f64),
    Infinite,
}

impl Horizon {
    pub fn finite(seconds: f64) -> Result<Self> {
        if seconds.is_finite() && seconds >= 0.0 {
            Ok(Horizon::Finite(seconds))
        } else {
            Err(Error::domain(format!("horizon must be a finite duration >= 0, got {seconds}")))
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Horizon::Infinite)
    }

    /// Seconds, with `f64::INFINITY` for the infinite horizon.
    pub fn seconds(&self) -> f64 {
        match *self {
            Horizon::Finite(s) => s,
            Horizon::Infinite => f64::INFINITY,
        }
    }
}

impl From<Horizon> for String {
    fn from(h: Horizon) -> String {
        h.to_string()
    }
}

impl TryFrom<String> for Horizon {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl FromStr for Horizon {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if matches!(t.to_ascii_lowercase().as_str(), "inf" | "infinity" | "+inf" | "∞") {
            return Ok(Horizon::Infinite);
        }
        Horizon::finite(parse_duration(t)?)
    }
}

impl fmt::Display for Horizon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Horizon::Infinite => write!(f, "inf"),
            Horizon::Finite(s) => write!(f, "{}", format_duration(s)),
        }
    }
}

/// Parses a duration literal into seconds.
pub fn parse_duration(s: &str) -> Result<f64> {
    let t = s.trim();
    let (num, unit) = match t.char_indices().last() {
        Some((i, c)) if c.is_ascii_alphabetic() => (&t[..i], c),
        _ => (t, 's'),
    };
    let scale = match unit {
        's' => 1.0,
        'm' => MINUTE,
        'h' => HOUR,
        'd' => DAY,
        other => return Err(Error::param(format!("unknown duration unit '{other}' in '{s}'"))),
    };
    let value: f64 = num
        .trim()
        .parse()
        .map_err(|_| Error::param(format!("invalid duration literal '{s}'")))?;
    if !value.is_finite() || value < 0.0 {
        return Err(Error::param(format!("duration must be finite and >= 0: '{s}'")));
    }
    Ok(value * scale)
}

/// Shortest exact literal for `seconds` using the largest whole unit.
pub fn format_duration(seconds: f64) -> String {
    for (unit, scale) in [("d", DAY), ("h", HOUR), ("m", MINUTE)] {
        let q = seconds / scale;
        if seconds > 0.0 && q.fract() == 0.0 && q * scale == seconds {
            return format!("{q}{unit}");
        }
    }
    format!("{seconds}s")
}

/// Parses a comma-separated list of horizons, e.g. `6h,1d,4d,inf`.
pub fn parse_horizon_list(s: &str) -> Result<Vec<Horizon>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(str::parse)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_suffixes() {
        assert_eq!(parse_duration("6h").unwrap(), 21_600.0);
        assert_eq!(parse_duration("1d").unwrap(), DAY);
        assert_eq!(parse_duration("90").unwrap(), 90.0);
        assert_eq!(parse_duration("1.5h").unwrap(), 5400.0);
        assert_eq!(parse_duration("30m").unwrap(), 1800.0);
        assert!(parse_duration("3w").is_err());
        assert!(parse_duration("-1h").is_err());
    }

    #[test]
    fn horizon_literals_round_trip() {
        for lit in ["1h", "3h", "12h", "1d", "7d", "inf", "45s", "90m"] {
            let h: Horizon = lit.parse().unwrap();
            assert_eq!(h.to_string().parse::<Horizon>().unwrap(), h);
        }
        assert_eq!("inf".parse::<Horizon>().unwrap(), Horizon::Infinite);
        assert_eq!(Horizon::Finite(7200.0).to_string(), "2h");
    }

    #[test]
    fn horizon_list() {
        let v = parse_horizon_list("6h,1d,4d").unwrap();
        assert_eq!(v, vec![Horizon::Finite(6.0 * HOUR), Horizon::Finite(DAY), Horizon::Finite(4.0 * DAY)]);
    }
}

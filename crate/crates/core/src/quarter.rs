use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A calendar quarter stored as `year * 4 + (q - 1)`, so quarter arithmetic is
/// plain integer arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Quarter(i32);

impl Quarter {
    pub fn new(year: i32, q: u8) -> Result<Self, Error> {
        if !(1..=4).contains(&q) {
            return Err(Error::InvalidQuarter(format!("{year}-Q{q}")));
        }
        Ok(Quarter(year * 4 + i32::from(q) - 1))
    }

    pub const fn from_index(index: i32) -> Self {
        Quarter(index)
    }

    pub const fn index(self) -> i32 {
        self.0
    }

    pub fn year(self) -> i32 {
        self.0.div_euclid(4)
    }

    /// Quarter number in `1..=4`.
    pub fn q(self) -> u8 {
        (self.0.rem_euclid(4) + 1) as u8
    }

    pub fn offset(self, quarters: i32) -> Self {
        Quarter(self.0 + quarters)
    }

    /// Signed number of quarters from `other` to `self`.
    pub fn since(self, other: Quarter) -> i32 {
        self.0 - other.0
    }
}

impl fmt::Display for Quarter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-Q{}", self.year(), self.q())
    }
}

impl FromStr for Quarter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || Error::InvalidQuarter(s.to_string());
        let (year, q) = s.trim().split_once("-Q").ok_or_else(bad)?;
        let year: i32 = year.parse().map_err(|_| bad())?;
        let q: u8 = q.parse().map_err(|_| bad())?;
        Quarter::new(year, q).map_err(|_| bad())
    }
}

impl Serialize for Quarter {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Quarter {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let q: Quarter = "2008-Q1".parse().unwrap();
        assert_eq!(q.year(), 2008);
        assert_eq!(q.q(), 1);
        assert_eq!(q.to_string(), "2008-Q1");
        assert_eq!(q.offset(-12).to_string(), "2005-Q1");
        assert_eq!(q.offset(-5).to_string(), "2006-Q4");
        assert_eq!(q.offset(7).to_string(), "2009-Q4");
    }

    #[test]
    fn rejects_malformed() {
        for s in ["2008Q1", "2008-Q0", "2008-Q5", "abcd-Q1", ""] {
            assert!(s.parse::<Quarter>().is_err(), "{s}");
        }
    }

    #[test]
    fn ordering_and_since() {
        let a: Quarter = "1999-Q4".parse().unwrap();
        let b: Quarter = "2000-Q1".parse().unwrap();
        assert!(a < b);
        assert_eq!(b.since(a), 1);
    }
}

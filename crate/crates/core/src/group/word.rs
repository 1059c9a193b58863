use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Letters of the marked alphabet `{tau, tau^-1, alpha, beta}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    Tau,
    TauInv,
    Alpha,
    Beta,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::Tau, Letter::TauInv, Letter::Alpha, Letter::Beta];

    pub fn inverse(self) -> Letter {
        match self {
            Letter::Tau => Letter::TauInv,
            Letter::TauInv => Letter::Tau,
            x => x,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Letter::Tau => 't',
            Letter::TauInv => 'T',
            Letter::Alpha => 'a',
            Letter::Beta => 'b',
        }
    }

    pub fn from_symbol(c: char) -> Option<Letter> {
        match c {
            't' => Some(Letter::Tau),
            'T' => Some(Letter::TauInv),
            'a' => Some(Letter::Alpha),
            'b' => Some(Letter::Beta),
            _ => None,
        }
    }
}

/// Word over the marked alphabet. Displayed as ASCII: `t`, `T` (tau inverse),
/// `a`, `b`; the empty word displays as `e`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreeWord(pub Vec<Letter>);

impl FreeWord {
    pub fn new(letters: Vec<Letter>) -> Self {
        FreeWord(letters)
    }

    pub fn empty() -> Self {
        FreeWord(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn push(&mut self, l: Letter) {
        self.0.push(l);
    }

    pub fn concat(&self, other: &FreeWord) -> FreeWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        FreeWord(v)
    }

    /// Inverse word; alpha and beta are involutions.
    pub fn inverse(&self) -> FreeWord {
        FreeWord(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Free reduction with alpha and beta treated as involutions.
    pub fn reduce(&self) -> FreeWord {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        FreeWord(out)
    }

    pub fn pow(&self, e: usize) -> FreeWord {
        FreeWord(self.0.iter().copied().cycle().take(self.0.len() * e).collect())
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        for l in &self.0 {
            write!(f, "{}", l.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for FreeWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "e" {
            return Ok(FreeWord::empty());
        }
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| Letter::from_symbol(c).ok_or_else(|| Error::Usage(format!("bad letter {c:?} in word"))))
            .collect::<Result<Vec<_>, _>>()
            .map(FreeWord)
    }
}

impl Serialize for FreeWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FreeWord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_cancels_inverse_pairs_and_involutions() {
        let w: FreeWord = "tTaabbtaT".parse().unwrap();
        assert_eq!(w.reduce().to_string(), "taT");
        let w: FreeWord = "abba".parse().unwrap();
        assert!(w.reduce().is_empty());
    }

    #[test]
    fn display_roundtrip() {
        for s in ["e", "t", "aTbt", "tttaaT"] {
            let w: FreeWord = s.parse().unwrap();
            assert_eq!(w.to_string(), s);
        }
        assert!("x".parse::<FreeWord>().is_err());
    }

    #[test]
    fn inverse_reduces_to_identity() {
        let w: FreeWord = "atbTTa".parse().unwrap();
        assert!(w.concat(&w.inverse()).reduce().is_empty());
    }
}

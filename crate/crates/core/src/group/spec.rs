use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::Order;
use crate::error::{Error, Result};

/// Highest supported tower level; a walk step of level `i` consumes
/// `2^(i+3) - 1` random bits and must fit in one `u64`.
pub const MAX_LEVEL: u32 = 4;

/// Parameters of `Gamma_i(k, l, m)`: level 1 is `Z/mZ wr D_l` marked by
/// `tau = (+1, 1)`, `alpha = (0, a delta_0)`, `beta = (0, b delta_k)`;
/// level `i + 1` is `Z/mZ wr Gamma_i(k, l, m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupSpec {
    level: u32,
    k: u64,
    l: Order,
    m: Order,
}

impl GroupSpec {
    pub fn new(level: u32, k: u64, l: Order, m: Order) -> Result<Self> {
        if level == 0 || level > MAX_LEVEL {
            return Err(Error::Spec(format!("level must lie in 1..={MAX_LEVEL}, got {level}")));
        }
        if let Order::Finite(mv) = m {
            if 2 * k >= mv {
                return Err(Error::Spec(format!("need 2k < m, got k = {k}, m = {mv}")));
            }
        }
        if let Order::Finite(0) = l {
            return Err(Error::Spec("l must be at least 1".into()));
        }
        if let Order::Finite(0) = m {
            return Err(Error::Spec("m must be at least 1".into()));
        }
        Ok(GroupSpec { level, k, l, m })
    }

    /// Level-one spec `Gamma(k, l, m)`; panics on invalid parameters.
    pub fn gamma(k: u64, l: Order, m: Order) -> Self {
        Self::new(1, k, l, m).expect("invalid Gamma(k, l, m)")
    }

    /// The lamplighter `Gamma(0, 2, inf) = Z wr D_2`.
    pub fn base_lamplighter() -> Self {
        Self::gamma(0, Order::Finite(2), Order::Infinite)
    }

    pub fn level(&self) -> u32 {
        self.level
    }
    pub fn k(&self) -> u64 {
        self.k
    }
    pub fn l(&self) -> Order {
        self.l
    }
    pub fn m(&self) -> Order {
        self.m
    }

    /// Spec of the lamp group for levels `>= 2`.
    pub fn lower(&self) -> Option<GroupSpec> {
        (self.level > 1).then_some(GroupSpec { level: self.level - 1, ..*self })
    }

    pub fn with_l(&self, l: Order) -> GroupSpec {
        GroupSpec { l, ..*self }
    }

    pub fn with_m(&self, m: Order) -> Result<GroupSpec> {
        GroupSpec::new(self.level, self.k, self.l, m)
    }

    pub fn with_level(&self, level: u32) -> Result<GroupSpec> {
        GroupSpec::new(level, self.k, self.l, self.m)
    }

    /// Whether the group is finite (both `l` and `m` finite).
    pub fn is_finite(&self) -> bool {
        self.l.is_finite() && self.m.is_finite()
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "i={},k={},l={},m={}", self.level, self.k, self.l, self.m)
    }
}

fn parse_factor(s: &str) -> Result<(GroupSpec, bool)> {
    let mut level = None;
    let mut k = None;
    let mut l = None;
    let mut m = None;
    let mut tail = false;
    for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        if item == "tail" {
            tail = true;
            continue;
        }
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| Error::Spec(format!("expected key=value, got {item:?}")))?;
        let value = value.trim();
        let slot_err = |what: &str| Error::Spec(format!("duplicate key {what}"));
        match key.trim() {
            "i" | "level" => {
                let v: u32 = value.parse().map_err(|_| Error::Spec(format!("bad level {value:?}")))?;
                if level.replace(v).is_some() {
                    return Err(slot_err("level"));
                }
            }
            "k" => {
                let v: u64 = value.parse().map_err(|_| Error::Spec(format!("bad k {value:?}")))?;
                if k.replace(v).is_some() {
                    return Err(slot_err("k"));
                }
            }
            "l" => {
                if l.replace(value.parse::<Order>()?).is_some() {
                    return Err(slot_err("l"));
                }
            }
            "m" => {
                if m.replace(value.parse::<Order>()?).is_some() {
                    return Err(slot_err("m"));
                }
            }
            other => return Err(Error::Spec(format!("unknown key {other:?}"))),
        }
    }
    let need = |what: &str| Error::Spec(format!("missing key {what} in {s:?}"));
    let spec = GroupSpec::new(
        level.unwrap_or(1),
        k.ok_or_else(|| need("k"))?,
        l.ok_or_else(|| need("l"))?,
        m.ok_or_else(|| need("m"))?,
    )?;
    Ok((spec, tail))
}

impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match parse_factor(s)? {
            (spec, false) => Ok(spec),
            (_, true) => Err(Error::Spec("'tail' is only meaningful inside a diagonal spec".into())),
        }
    }
}

impl Serialize for GroupSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GroupSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Finite truncation of a diagonal product of `Gamma_i(k_s, l_s, m_s)`.
///
/// Non-tail factors have strictly increasing `k`. An optional last factor is
/// flagged as the tail standing in for the rest of the infinite product
/// (normally `Gamma(0, 2, inf)`). The empty product is the trivial group.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DiagonalSpec {
    factors: Vec<GroupSpec>,
    tail: bool,
}

impl DiagonalSpec {
    pub fn new(factors: Vec<GroupSpec>, tail: bool) -> Result<Self> {
        if tail && factors.is_empty() {
            return Err(Error::Spec("a tail flag needs a factor".into()));
        }
        if let Some(first) = factors.first() {
            if factors.iter().any(|f| f.level != first.level) {
                return Err(Error::Spec("all diagonal factors must share one level".into()));
            }
        }
        let body = if tail { &factors[..factors.len() - 1] } else { &factors[..] };
        if body.windows(2).any(|w| w[0].k >= w[1].k) {
            return Err(Error::Spec("the k_s of non-tail factors must be strictly increasing".into()));
        }
        Ok(DiagonalSpec { factors, tail })
    }

    pub fn trivial() -> Self {
        DiagonalSpec::default()
    }

    pub fn single(spec: GroupSpec) -> Self {
        DiagonalSpec { factors: vec![spec], tail: false }
    }

    pub fn factors(&self) -> &[GroupSpec] {
        &self.factors
    }

    pub fn has_tail(&self) -> bool {
        self.tail
    }

    pub fn tail(&self) -> Option<&GroupSpec> {
        if self.tail {
            self.factors.last()
        } else {
            None
        }
    }

    /// Factors other than the tail.
    pub fn body(&self) -> &[GroupSpec] {
        if self.tail {
            &self.factors[..self.factors.len() - 1]
        } else {
            &self.factors
        }
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn level(&self) -> u32 {
        self.factors.first().map_or(1, |f| f.level)
    }

    /// Append a non-tail factor (before the tail, if any).
    pub fn with_factor(&self, spec: GroupSpec) -> Result<Self> {
        let mut body = self.body().to_vec();
        body.push(spec);
        if let Some(t) = self.tail() {
            body.push(*t);
        }
        DiagonalSpec::new(body, self.tail)
    }

    /// Replace (or add) the tail factor.
    pub fn with_tail(&self, spec: GroupSpec) -> Result<Self> {
        let mut body = self.body().to_vec();
        body.push(spec);
        DiagonalSpec::new(body, true)
    }

    pub fn min_k(&self) -> Option<u64> {
        self.body().iter().map(|f| f.k).min()
    }

    /// Whether every factor is a finite group.
    pub fn is_finite(&self) -> bool {
        self.factors.iter().all(GroupSpec::is_finite)
    }

    /// Parse the multi-line file form: one or more factors per line separated
    /// by `;`, `#` starting a comment.
    pub fn parse_file(text: &str) -> Result<Self> {
        let body: Vec<&str> = text
            .lines()
            .map(|line| line.split('#').next().unwrap_or("").trim())
            .filter(|line| !line.is_empty())
            .collect();
        body.join(";").parse()
    }
}

impl fmt::Display for DiagonalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("trivial");
        }
        for (i, spec) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{spec}")?;
            if self.tail && i + 1 == self.factors.len() {
                f.write_str(",tail")?;
            }
        }
        Ok(())
    }
}

impl FromStr for DiagonalSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "trivial" {
            return Ok(DiagonalSpec::trivial());
        }
        let parts: Vec<&str> = s.split(';').map(str::trim).filter(|p| !p.is_empty()).collect();
        let mut factors = Vec::with_capacity(parts.len());
        let mut tail = false;
        for (i, part) in parts.iter().enumerate() {
            let (spec, is_tail) = parse_factor(part)?;
            if is_tail && i + 1 != parts.len() {
                return Err(Error::Spec("only the last factor may be the tail".into()));
            }
            tail |= is_tail;
            factors.push(spec);
        }
        if factors.is_empty() {
            return Err(Error::Spec("empty diagonal spec (use 'trivial')".into()));
        }
        DiagonalSpec::new(factors, tail)
    }
}

impl Serialize for DiagonalSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for DiagonalSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Slowly growing correction `eps(n) >= 1`, nondecreasing and unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EpsilonSpec {
    /// `max(2, log2 log2 n)`.
    Loglog,
    /// `c * max(1, log2 n)`.
    Log { c: f64 },
    /// `c * n^p`.
    Power { c: f64, p: f64 },
    /// `c` up to `ramp`, then `c * log2 n / log2 ramp`.
    ConstantRamp { c: f64, ramp: u64 },
}

impl EpsilonSpec {
    /// The desk default `4 n^0.05`.
    pub const DESK: EpsilonSpec = EpsilonSpec::Power { c: 4.0, p: 0.05 };

    pub fn eval(&self, n: u64) -> f64 {
        let x = n.max(1) as f64;
        match *self {
            EpsilonSpec::Loglog => {
                if n < 4 {
                    2.0
                } else {
                    x.log2().log2().max(2.0)
                }
            }
            EpsilonSpec::Log { c } => c * x.log2().max(1.0),
            EpsilonSpec::Power { c, p } => c * x.powf(p),
            EpsilonSpec::ConstantRamp { c, ramp } => {
                if n <= ramp {
                    c
                } else {
                    c * x.log2() / (ramp as f64).log2()
                }
            }
        }
    }

    /// Evaluate at `n = 2^e` for exponents beyond `u64`.
    pub fn eval_log2(&self, e: f64) -> f64 {
        match *self {
            EpsilonSpec::Loglog => e.max(1.0).log2().max(2.0),
            EpsilonSpec::Log { c } => c * e.max(1.0),
            EpsilonSpec::Power { c, p } => c * (p * e).exp2(),
            EpsilonSpec::ConstantRamp { c, ramp } => {
                let r = (ramp as f64).log2();
                if e <= r {
                    c
                } else {
                    c * e / r
                }
            }
        }
    }

    fn validate(self) -> Result<Self> {
        let ok = match self {
            EpsilonSpec::Loglog => true,
            EpsilonSpec::Log { c } => c >= 1.0,
            EpsilonSpec::Power { c, p } => c >= 1.0 && p > 0.0,
            EpsilonSpec::ConstantRamp { c, ramp } => c >= 1.0 && ramp >= 2,
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::Usage(format!("epsilon {self} must satisfy c >= 1, p > 0, ramp >= 2")))
        }
    }
}

impl fmt::Display for EpsilonSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EpsilonSpec::Loglog => f.write_str("loglog"),
            EpsilonSpec::Log { c } => write!(f, "log:{c}"),
            EpsilonSpec::Power { c, p } => write!(f, "power:{c},{p}"),
            EpsilonSpec::ConstantRamp { c, ramp } => write!(f, "constant-ramp:{c},{ramp}"),
        }
    }
}

/// Grammar: `loglog`, `log[:c]`, `power[:c,p]`, `constant-ramp:c,ramp`.
impl FromStr for EpsilonSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s.trim().split_once(':').unwrap_or((s.trim(), ""));
        let nums: Vec<&str> = args.split(',').map(str::trim).filter(|a| !a.is_empty()).collect();
        let num = |i: usize| -> Result<f64> {
            nums[i].parse().map_err(|_| Error::Usage(format!("bad epsilon parameter '{}'", nums[i])))
        };
        let spec = match (kind, nums.len()) {
            ("loglog", 0) => EpsilonSpec::Loglog,
            ("log", 0) => EpsilonSpec::Log { c: 1.0 },
            ("log", 1) => EpsilonSpec::Log { c: num(0)? },
            ("power", 0) => EpsilonSpec::DESK,
            ("power", 2) => EpsilonSpec::Power { c: num(0)?, p: num(1)? },
            ("constant-ramp", 2) => EpsilonSpec::ConstantRamp {
                c: num(0)?,
                ramp: nums[1].parse().map_err(|_| Error::Usage(format!("bad ramp '{}'", nums[1])))?,
            },
            _ => return Err(Error::Usage(format!("unknown epsilon '{s}'"))),
        };
        spec.validate()
    }
}

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Size parameter `l` or `m`: a positive integer or infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Order {
    Finite(u64),
    Infinite,
}

impl Order {
    pub fn is_finite(self) -> bool {
        matches!(self, Order::Finite(_))
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Order::Finite(n) => Some(n),
            Order::Infinite => None,
        }
    }

    /// Reduce an integer into `[0, n)` for finite orders, identity otherwise.
    #[inline]
    pub fn reduce(self, x: i64) -> i64 {
        match self {
            Order::Finite(n) => x.rem_euclid(n as i64),
            Order::Infinite => x,
        }
    }

    /// `self` divides `other` in the sense of a quotient `D_other -> D_self`
    /// (or `Z/other -> Z/self`); every finite order divides infinity.
    pub fn divides(self, other: Order) -> bool {
        match (self, other) {
            (Order::Infinite, Order::Infinite) => true,
            (Order::Infinite, Order::Finite(_)) => false,
            (Order::Finite(_), Order::Infinite) => true,
            (Order::Finite(a), Order::Finite(b)) => b % a == 0,
        }
    }

    pub fn double(self) -> Order {
        match self {
            Order::Finite(n) => Order::Finite(2 * n),
            Order::Infinite => Order::Infinite,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(n) => write!(f, "{n}"),
            Order::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Order {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s {
            "inf" | "infinity" | "∞" => Ok(Order::Infinite),
            _ => {
                let n: u64 = s
                    .parse()
                    .map_err(|_| Error::Spec(format!("expected a positive integer or 'inf', got {s:?}")))?;
                if n == 0 {
                    return Err(Error::Spec("orders must be at least 1".into()));
                }
                Ok(Order::Finite(n))
            }
        }
    }
}

//! Linearly ordered point universes.
//!
//! A carrier is either the finite chain `{0, …, m−1}` or the whole signed
//! 64-bit integer line. Every operation in the crate touches only finitely
//! many points and only ever compares them, so bare integer coordinates
//! represent the order faithfully.

use std::cmp::Ordering;
use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use itertools::Itertools;
use thiserror::Error;

/// A point of a carrier. The linear order is plain integer order.
pub type Coord = i64;

/// A linearly ordered point universe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Carrier {
    /// The chain `{0, …, m−1}`, m ≥ 1. Small enough to enumerate over.
    FiniteChain(u32),
    /// Every 64-bit signed coordinate; the desk-scale stand-in for an
    /// unbounded linear order.
    IntegerLine,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CarrierError {
    #[error("point {point} does not belong to carrier {carrier}")]
    ForeignPoint { carrier: Carrier, point: Coord },
    #[error("a window is required to enumerate subsets of the integer line")]
    WindowRequired,
    #[error("invalid window {lo}..{hi}: lower bound exceeds upper bound")]
    EmptyWindow { lo: Coord, hi: Coord },
    #[error("chain size must be at least 1")]
    EmptyChain,
}

/// Inclusive coordinate interval, written `lo..hi` in CLI syntax.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Window {
    lo: Coord,
    hi: Coord,
}

impl Window {
    pub fn new(lo: Coord, hi: Coord) -> Result<Self, CarrierError> {
        if lo > hi {
            return Err(CarrierError::EmptyWindow { lo, hi });
        }
        Ok(Window { lo, hi })
    }

    pub fn lo(&self) -> Coord {
        self.lo
    }

    pub fn hi(&self) -> Coord {
        self.hi
    }

    /// Number of points in the window.
    pub fn len(&self) -> u128 {
        (self.hi as i128 - self.lo as i128 + 1) as u128
    }

    pub fn is_empty(&self) -> bool {
        false // lo ≤ hi is enforced at construction
    }

    pub fn contains(&self, p: Coord) -> bool {
        self.lo <= p && p <= self.hi
    }

    pub fn points(&self) -> RangeInclusive<Coord> {
        self.lo..=self.hi
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid window `{0}`: expected `<lo>..<hi>` inclusive with lo <= hi")]
pub struct ParseWindowError(String);

impl FromStr for Window {
    type Err = ParseWindowError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ParseWindowError(s.to_string());
        let (lo, hi) = s.split_once("..").ok_or_else(bad)?;
        let lo: Coord = lo.trim().parse().map_err(|_| bad())?;
        let hi: Coord = hi.trim().parse().map_err(|_| bad())?;
        Window::new(lo, hi).map_err(|_| bad())
    }
}

impl Carrier {
    /// Validating constructor for the finite chain.
    pub fn finite_chain(m: u32) -> Result<Self, CarrierError> {
        if m == 0 {
            return Err(CarrierError::EmptyChain);
        }
        Ok(Carrier::FiniteChain(m))
    }

    pub fn contains(&self, p: Coord) -> bool {
        match self {
            Carrier::FiniteChain(m) => 0 <= p && p < *m as Coord,
            Carrier::IntegerLine => true,
        }
    }

    /// Chain size, if finite.
    pub fn size(&self) -> Option<u32> {
        match self {
            Carrier::FiniteChain(m) => Some(*m),
            Carrier::IntegerLine => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.size().is_some()
    }

    /// Total-order comparison of two points of this carrier.
    ///
    /// Points from a different carrier (coordinates outside a finite chain)
    /// are rejected rather than silently compared.
    pub fn cmp_points(&self, a: Coord, b: Coord) -> Result<Ordering, CarrierError> {
        for p in [a, b] {
            if !self.contains(p) {
                return Err(CarrierError::ForeignPoint {
                    carrier: *self,
                    point: p,
                });
            }
        }
        Ok(a.cmp(&b))
    }

    /// Streams every strictly increasing length-`k` coordinate sequence drawn
    /// from `window`, in lexicographic order.
    ///
    /// On a finite chain the window defaults to the whole chain and a given
    /// window is clipped to it. On the integer line a window is mandatory.
    /// `k` larger than the window yields an empty stream.
    pub fn k_subsets(&self, k: u32, window: Option<Window>) -> Result<KSubsets, CarrierError> {
        let range = match self {
            Carrier::FiniteChain(m) => {
                let (chain_lo, chain_hi) = (0, *m as Coord - 1);
                match window {
                    None => chain_lo..=chain_hi,
                    // may be empty after clipping; RangeInclusive handles lo > hi
                    Some(w) => w.lo.max(chain_lo)..=w.hi.min(chain_hi),
                }
            }
            Carrier::IntegerLine => {
                let w = window.ok_or(CarrierError::WindowRequired)?;
                w.lo..=w.hi
            }
        };
        Ok(KSubsets {
            inner: range.combinations(k as usize),
        })
    }
}

impl fmt::Display for Carrier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Carrier::FiniteChain(m) => write!(f, "chain:{m}"),
            Carrier::IntegerLine => write!(f, "int"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid carrier spec `{0}`: expected `chain:<m>` with m >= 1, or `int`")]
pub struct ParseCarrierError(String);

impl FromStr for Carrier {
    type Err = ParseCarrierError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ParseCarrierError(s.to_string());
        match s.trim() {
            "int" => Ok(Carrier::IntegerLine),
            other => {
                let m = other.strip_prefix("chain:").ok_or_else(bad)?;
                let m: u32 = m.parse().map_err(|_| bad())?;
                Carrier::finite_chain(m).map_err(|_| bad())
            }
        }
    }
}

/// Stream of strictly increasing k-subsets of a coordinate window.
pub struct KSubsets {
    inner: itertools::Combinations<RangeInclusive<Coord>>,
}

impl Iterator for KSubsets {
    type Item = Vec<Coord>;

    fn next(&mut self) -> Option<Self::Item> {
        self.inner.next()
    }
}

/// Exact binomial coefficient C(n, k).
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // every prefix product of the multiplicative formula is an integer
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

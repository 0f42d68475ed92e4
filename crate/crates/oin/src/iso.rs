//! Canonical finite partial order isomorphisms.
//!
//! An element is a pair of equal-length strictly increasing coordinate
//! sequences `(dom, ran)`; the i-th domain point maps to the i-th range
//! point. Over a linear order that pairing is the unique order isomorphism
//! with the given domain and range, so the representation is canonical:
//! two elements are equal iff their sequences are. The empty element is the
//! zero of every composition semigroup built on top.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::carrier::Coord;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IsoError {
    #[error("rank mismatch: domain has {dom} points, range has {ran}")]
    RankMismatch { dom: usize, ran: usize },
    #[error("{side} is not strictly increasing at position {index}")]
    NotIncreasing { side: Side, index: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Domain,
    Range,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Domain => write!(f, "domain"),
            Side::Range => write!(f, "range"),
        }
    }
}

/// A finite partial order isomorphism in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawIso")]
pub struct PartialOrderIso {
    dom: Vec<Coord>,
    ran: Vec<Coord>,
}

/// Unvalidated wire form; `{"dom":[...],"ran":[...]}`.
#[derive(Deserialize)]
struct RawIso {
    dom: Vec<Coord>,
    ran: Vec<Coord>,
}

impl TryFrom<RawIso> for PartialOrderIso {
    type Error = IsoError;

    fn try_from(raw: RawIso) -> Result<Self, IsoError> {
        PartialOrderIso::new(raw.dom, raw.ran)
    }
}

fn check_increasing(seq: &[Coord], side: Side) -> Result<(), IsoError> {
    for (index, w) in seq.windows(2).enumerate() {
        if w[0] >= w[1] {
            return Err(IsoError::NotIncreasing {
                side,
                index: index + 1,
            });
        }
    }
    Ok(())
}

impl PartialOrderIso {
    /// The unique order isomorphism sending the i-th domain point to the
    /// i-th range point.
    ///
    /// Both sequences must be strictly increasing and of equal length;
    /// unsorted or duplicated input is rejected, not repaired, since sorting
    /// silently could pair a domain point with the wrong image.
    pub fn new(dom: Vec<Coord>, ran: Vec<Coord>) -> Result<Self, IsoError> {
        if dom.len() != ran.len() {
            return Err(IsoError::RankMismatch {
                dom: dom.len(),
                ran: ran.len(),
            });
        }
        check_increasing(&dom, Side::Domain)?;
        check_increasing(&ran, Side::Range)?;
        Ok(PartialOrderIso { dom, ran })
    }

    /// The empty map, the zero element.
    pub fn zero() -> Self {
        PartialOrderIso {
            dom: Vec::new(),
            ran: Vec::new(),
        }
    }

    /// The idempotent fixing exactly the given points.
    pub fn identity_on<I: IntoIterator<Item = Coord>>(points: I) -> Self {
        let set: BTreeSet<Coord> = points.into_iter().collect();
        let dom: Vec<Coord> = set.into_iter().collect();
        PartialOrderIso {
            ran: dom.clone(),
            dom,
        }
    }

    pub fn dom(&self) -> &[Coord] {
        &self.dom
    }

    pub fn ran(&self) -> &[Coord] {
        &self.ran
    }

    /// Domain size.
    pub fn rank(&self) -> u32 {
        self.dom.len() as u32
    }

    pub fn is_zero(&self) -> bool {
        self.dom.is_empty()
    }

    /// Image of `x`, if `x` is in the domain.
    pub fn apply(&self, x: Coord) -> Option<Coord> {
        let i = self.dom.binary_search(&x).ok()?;
        Some(self.ran[i])
    }

    /// Preimage of `y`, if `y` is in the range.
    pub fn apply_inverse(&self, y: Coord) -> Option<Coord> {
        let i = self.ran.binary_search(&y).ok()?;
        Some(self.dom[i])
    }

    /// Left-to-right composition: `x (αβ) = (x α) β`.
    ///
    /// The result's domain is the set of domain points whose image lands in
    /// `other`'s domain; `rank(αβ) = |ran α ∩ dom β|`.
    pub fn compose(&self, other: &PartialOrderIso) -> PartialOrderIso {
        let mut dom = Vec::new();
        let mut ran = Vec::new();
        let (mut i, mut j) = (0, 0);
        // two-pointer intersection of self.ran with other.dom
        while i < self.ran.len() && j < other.dom.len() {
            match self.ran[i].cmp(&other.dom[j]) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    dom.push(self.dom[i]);
                    ran.push(other.ran[j]);
                    i += 1;
                    j += 1;
                }
            }
        }
        PartialOrderIso { dom, ran }
    }

    /// The inverse map; `α α⁻¹ α = α`.
    pub fn inverse(&self) -> PartialOrderIso {
        PartialOrderIso {
            dom: self.ran.clone(),
            ran: self.dom.clone(),
        }
    }

    /// True iff the element is an identity partial map (equivalently αα = α).
    pub fn is_idempotent(&self) -> bool {
        self.dom == self.ran
    }

    /// Natural partial order: true iff `self` is a restriction of `other`
    /// (domain contained, images agreeing).
    pub fn natural_leq(&self, other: &PartialOrderIso) -> bool {
        if self.rank() > other.rank() {
            return false;
        }
        self.dom
            .iter()
            .zip(&self.ran)
            .all(|(&x, &y)| other.apply(x) == Some(y))
    }

    /// Restriction of the map to `dom ∩ points`; equals
    /// `identity_on(points) ∘ self`.
    pub fn restrict<I: IntoIterator<Item = Coord>>(&self, points: I) -> PartialOrderIso {
        let set: BTreeSet<Coord> = points.into_iter().collect();
        let (dom, ran) = self
            .dom
            .iter()
            .zip(&self.ran)
            .filter(|(x, _)| set.contains(x))
            .map(|(&x, &y)| (x, y))
            .unzip();
        PartialOrderIso { dom, ran }
    }
}

/// Canonical element order: by rank, then domain, then range.
impl Ord for PartialOrderIso {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank()
            .cmp(&other.rank())
            .then_with(|| self.dom.cmp(&other.dom))
            .then_with(|| self.ran.cmp(&other.ran))
    }
}

impl PartialOrd for PartialOrderIso {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn write_coords(f: &mut fmt::Formatter<'_>, seq: &[Coord]) -> fmt::Result {
    for (i, c) in seq.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{c}")?;
    }
    Ok(())
}

/// Textual syntax `[x1,x2,...->y1,y2,...]`; the zero element is `[]`.
impl fmt::Display for PartialOrderIso {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        if !self.is_zero() {
            write_coords(f, &self.dom)?;
            write!(f, "->")?;
            write_coords(f, &self.ran)?;
        }
        write!(f, "]")
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseIsoError {
    #[error("at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error(transparent)]
    Invalid(#[from] IsoError),
}

fn parse_coords(body: &str, offset: usize) -> Result<Vec<Coord>, ParseIsoError> {
    let mut out = Vec::new();
    let mut pos = offset;
    for tok in body.split(',') {
        let trimmed = tok.trim();
        out.push(trimmed.parse().map_err(|_| ParseIsoError::Syntax {
            pos: pos + (tok.len() - tok.trim_start().len()),
            msg: format!("expected an integer coordinate, found `{trimmed}`"),
        })?);
        pos += tok.len() + 1;
    }
    Ok(out)
}

impl FromStr for PartialOrderIso {
    type Err = ParseIsoError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let syn = |pos: usize, msg: &str| ParseIsoError::Syntax {
            pos,
            msg: msg.to_string(),
        };
        let t = s.trim();
        let skipped = s.len() - s.trim_start().len();
        let body = t
            .strip_prefix('[')
            .ok_or_else(|| syn(skipped, "expected `[`"))?;
        let body = body
            .strip_suffix(']')
            .ok_or_else(|| syn(skipped + t.len().saturating_sub(1), "expected `]`"))?;
        if body.trim().is_empty() {
            return Ok(PartialOrderIso::zero());
        }
        let arrow = body
            .find("->")
            .ok_or_else(|| syn(skipped + 1, "expected `->` between domain and range"))?;
        let dom = parse_coords(&body[..arrow], skipped + 1)?;
        let ran = parse_coords(&body[arrow + 2..], skipped + 1 + arrow + 2)?;
        Ok(PartialOrderIso::new(dom, ran)?)
    }
}

//! Congruences of an enumerated semigroup.
//!
//! A congruence is a partition of the element list that is compatible with
//! multiplication on both sides. The hot loop is pair closure: a disjoint-set
//! structure over element indices absorbs generating pairs, and every merge
//! event is propagated through left and right multiplication by all elements
//! until the fixpoint. The full lattice is the join closure of the principal
//! congruences.
//!
//! The module also hosts the constructive collapse-chain witness (conjugating
//! an idempotent strictly below another down to the zero element one rank at
//! a time) and Rees quotients.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};

use thiserror::Error;

use crate::carrier::{binomial, Coord};
use crate::iso::PartialOrderIso;
use crate::semigroup::{BoundedSemigroup, EnumeratedSemigroup};

#[derive(Debug, Error)]
pub enum CongruenceError {
    #[error("rank threshold {k} is out of range 0..={n}")]
    RankOutOfRange { k: u32, n: u32 },
    #[error("element {0} is not a member of the semigroup")]
    NotAnElement(PartialOrderIso),
    #[error("blocks do not partition the {expected} elements")]
    MalformedPartition { expected: usize },
    #[error(
        "not a congruence: {a} and {b} are related, but multiplying by {c} on the {side} \
         gives unrelated {pa} and {pb}"
    )]
    Incompatible {
        a: PartialOrderIso,
        b: PartialOrderIso,
        c: PartialOrderIso,
        pa: PartialOrderIso,
        pb: PartialOrderIso,
        side: &'static str,
    },
    #[error("collapse chain wants idempotents with beta strictly below alpha: {0}")]
    BadCollapsePair(String),
}

struct Dsu {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            // path halving
            self.parent[x as usize] = self.parent[self.parent[x as usize] as usize];
            x = self.parent[x as usize];
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
        true
    }
}

/// A congruence in canonical form: blocks sorted internally and by their
/// least element. Equality and hashing see only the block structure.
#[derive(Debug, Clone)]
pub struct Congruence {
    n: usize,
    blocks: Vec<Vec<u32>>,
    block_index: Vec<u32>,
}

impl PartialEq for Congruence {
    fn eq(&self, other: &Self) -> bool {
        self.blocks == other.blocks
    }
}

impl Eq for Congruence {}

impl Hash for Congruence {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.blocks.hash(state);
    }
}

impl Congruence {
    fn from_dsu(dsu: &mut Dsu) -> Self {
        let n = dsu.parent.len();
        let mut by_root: HashMap<u32, Vec<u32>> = HashMap::new();
        for i in 0..n as u32 {
            by_root.entry(dsu.find(i)).or_default().push(i);
        }
        let mut blocks: Vec<Vec<u32>> = by_root.into_values().collect();
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        let mut block_index = vec![0u32; n];
        for (bi, b) in blocks.iter().enumerate() {
            for &i in b {
                block_index[i as usize] = bi as u32;
            }
        }
        Congruence {
            n,
            blocks,
            block_index,
        }
    }

    /// Validating constructor: `blocks` must partition `0..es.len()` and be
    /// compatible with multiplication. Incompatible partitions are rejected
    /// here, so downstream consumers only ever see genuine congruences.
    pub fn new(
        es: &EnumeratedSemigroup,
        blocks: Vec<Vec<usize>>,
    ) -> Result<Self, CongruenceError> {
        let n = es.len();
        let mut seen = vec![false; n];
        let mut count = 0usize;
        for b in &blocks {
            for &i in b {
                if i >= n || seen[i] {
                    return Err(CongruenceError::MalformedPartition { expected: n });
                }
                seen[i] = true;
                count += 1;
            }
        }
        if count != n {
            return Err(CongruenceError::MalformedPartition { expected: n });
        }
        let mut dsu = Dsu::new(n);
        for b in &blocks {
            for w in b.windows(2) {
                dsu.union(w[0] as u32, w[1] as u32);
            }
        }
        let c = Congruence::from_dsu(&mut dsu);
        c.validate(es)?;
        Ok(c)
    }

    pub fn diagonal(es: &EnumeratedSemigroup) -> Self {
        Congruence::from_dsu(&mut Dsu::new(es.len()))
    }

    pub fn n_elements(&self) -> usize {
        self.n
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    pub fn related(&self, i: usize, j: usize) -> bool {
        self.block_index[i] == self.block_index[j]
    }

    pub fn block_of(&self, i: usize) -> &[u32] {
        &self.blocks[self.block_index[i] as usize]
    }

    pub fn is_diagonal(&self) -> bool {
        self.blocks.len() == self.n
    }

    pub fn is_universal(&self) -> bool {
        self.blocks.len() == 1
    }

    /// True iff every block of `self` is contained in a block of `other`.
    pub fn refines(&self, other: &Congruence) -> bool {
        self.blocks
            .iter()
            .all(|b| b.iter().all(|&i| other.related(b[0] as usize, i as usize)))
    }

    /// Exhaustive compatibility re-check: for every related pair and every
    /// multiplier, the products must be related on both sides.
    pub fn validate(&self, es: &EnumeratedSemigroup) -> Result<(), CongruenceError> {
        assert_eq!(self.n, es.len(), "congruence belongs to another semigroup");
        for b in &self.blocks {
            for (ai, &a) in b.iter().enumerate() {
                for &bb in &b[ai + 1..] {
                    let (a, bb) = (a as usize, bb as usize);
                    for c in 0..self.n {
                        let (ca, cb) = (es.product(c, a), es.product(c, bb));
                        if !self.related(ca, cb) {
                            return Err(self.incompat(es, a, bb, c, ca, cb, "left"));
                        }
                        let (ac, bc) = (es.product(a, c), es.product(bb, c));
                        if !self.related(ac, bc) {
                            return Err(self.incompat(es, a, bb, c, ac, bc, "right"));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn incompat(
        &self,
        es: &EnumeratedSemigroup,
        a: usize,
        b: usize,
        c: usize,
        pa: usize,
        pb: usize,
        side: &'static str,
    ) -> CongruenceError {
        CongruenceError::Incompatible {
            a: es.element(a).clone(),
            b: es.element(b).clone(),
            c: es.element(c).clone(),
            pa: es.element(pa).clone(),
            pb: es.element(pb).clone(),
            side,
        }
    }
}

/// Smallest congruence containing the seed pairs: union each pair, then
/// propagate every merge event through left and right multiplication until
/// no class moves.
fn close_pairs(
    es: &EnumeratedSemigroup,
    seeds: impl IntoIterator<Item = (usize, usize)>,
) -> Congruence {
    let n = es.len();
    let mut dsu = Dsu::new(n);
    let mut work: Vec<(u32, u32)> = Vec::new();
    for (a, b) in seeds {
        if dsu.union(a as u32, b as u32) {
            work.push((a as u32, b as u32));
        }
    }
    while let Some((x, y)) = work.pop() {
        let (x, y) = (x as usize, y as usize);
        for c in 0..n {
            let (cx, cy) = (es.product(c, x), es.product(c, y));
            if dsu.union(cx as u32, cy as u32) {
                work.push((cx as u32, cy as u32));
            }
            let (xc, yc) = (es.product(x, c), es.product(y, c));
            if dsu.union(xc as u32, yc as u32) {
                work.push((xc as u32, yc as u32));
            }
        }
    }
    Congruence::from_dsu(&mut dsu)
}

/// The Rees congruence of the ideal I_k: one block collapses every element
/// of rank ≤ k, everything else stays a singleton.
pub fn rees_congruence(es: &EnumeratedSemigroup, k: u32) -> Result<Congruence, CongruenceError> {
    let n_rank = es.semigroup().max_rank();
    if k > n_rank {
        return Err(CongruenceError::RankOutOfRange { k, n: n_rank });
    }
    let end = es
        .layer_range(k.min(es.semigroup().effective_max_rank()))
        .end;
    let mut dsu = Dsu::new(es.len());
    for i in 1..end {
        dsu.union(0, i as u32);
    }
    Ok(Congruence::from_dsu(&mut dsu))
}

/// Smallest congruence relating `a` and `b`.
pub fn principal_congruence(
    es: &EnumeratedSemigroup,
    a: &PartialOrderIso,
    b: &PartialOrderIso,
) -> Result<Congruence, CongruenceError> {
    let i = es
        .index_of(a)
        .ok_or_else(|| CongruenceError::NotAnElement(a.clone()))?;
    let j = es
        .index_of(b)
        .ok_or_else(|| CongruenceError::NotAnElement(b.clone()))?;
    Ok(close_pairs(es, [(i, j)]))
}

/// Join in the congruence lattice: the block unions of both sides, re-closed
/// under compatibility.
pub fn join(es: &EnumeratedSemigroup, a: &Congruence, b: &Congruence) -> Congruence {
    let seeds = a
        .blocks()
        .iter()
        .chain(b.blocks())
        .flat_map(|blk| blk.windows(2).map(|w| (w[0] as usize, w[1] as usize)))
        .collect::<Vec<_>>();
    close_pairs(es, seeds)
}

/// The full congruence lattice: the diagonal plus every principal
/// congruence, closed under pairwise join, duplicates removed. Sorted from
/// finest to coarsest.
pub fn all_congruences(es: &EnumeratedSemigroup) -> Vec<Congruence> {
    let n = es.len();
    let mut found = vec![Congruence::diagonal(es)];
    let mut seen: HashSet<Congruence> = found.iter().cloned().collect();
    for i in 0..n {
        for j in i + 1..n {
            let c = close_pairs(es, [(i, j)]);
            if seen.insert(c.clone()) {
                found.push(c);
            }
        }
    }
    loop {
        let len = found.len();
        let mut grew = false;
        for a in 0..len {
            for b in a + 1..len {
                let j = join(es, &found[a], &found[b]);
                if seen.insert(j.clone()) {
                    found.push(j);
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    found.sort_by(|a, b| {
        b.n_blocks()
            .cmp(&a.n_blocks())
            .then_with(|| a.blocks.cmp(&b.blocks))
    });
    found
}

/// Recognizes Rees congruences: returns `k` when the partition is exactly
/// (I_k × I_k) ∪ Δ, i.e. one block holding every element of rank ≤ k and
/// singletons elsewhere. The diagonal is Rees by I_0 since I_0 = {zero}.
pub fn is_rees(es: &EnumeratedSemigroup, c: &Congruence) -> Option<u32> {
    assert_eq!(c.n_elements(), es.len());
    let mut fat = c.blocks().iter().filter(|b| b.len() > 1);
    let Some(block) = fat.next() else {
        return Some(0);
    };
    if fat.next().is_some() {
        return None;
    }
    let k = es.element(*block.last().unwrap() as usize).rank();
    let end = es.layer_range(k).end;
    // sorted distinct indices form exactly 0..end iff the count and the
    // endpoints line up
    if block.len() == end && block[0] == 0 && *block.last().unwrap() as usize == end - 1 {
        Some(k)
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// Collapse chains
// ---------------------------------------------------------------------------

/// One conjugation step: `iota` carries the previous idempotent onto the
/// current one, and `beta` is the freshly produced idempotent one rank down.
#[derive(Debug, Clone)]
pub struct CollapseStep {
    pub iota: PartialOrderIso,
    pub beta: PartialOrderIso,
}

/// Constructive witness that an idempotent pair β ≺ α collapses to the zero:
/// starting from β₁, each step conjugates by the order isomorphism onto the
/// previous domain with its maximum removed, losing exactly one rank, until
/// the zero element is reached.
#[derive(Debug, Clone)]
pub struct CollapseChain {
    pub alpha: PartialOrderIso,
    pub beta: PartialOrderIso,
    /// β₁: the input β when its rank is rank α − 1, otherwise the identity
    /// on dom α with one point of dom α ∖ dom β removed.
    pub beta_one: PartialOrderIso,
    pub steps: Vec<CollapseStep>,
}

impl CollapseChain {
    /// The last idempotent produced (β₁ itself when there are no steps).
    pub fn final_beta(&self) -> &PartialOrderIso {
        self.steps.last().map(|s| &s.beta).unwrap_or(&self.beta_one)
    }

    /// Betas in order: β₀ = α, β₁, β₂, …
    fn betas(&self) -> Vec<&PartialOrderIso> {
        let mut v = vec![&self.alpha, &self.beta_one];
        v.extend(self.steps.iter().map(|s| &s.beta));
        v
    }

    /// Re-checks the four step conditions and the terminal zero.
    pub fn verify(&self) -> Result<(), String> {
        let k = self.alpha.rank();
        let betas = self.betas();
        for (m, step) in self.steps.iter().enumerate() {
            let m1 = m + 1; // steps are 1-indexed in the conditions
            let (prev, cur) = (betas[m1 - 1], betas[m1]);
            let iota_inv = step.iota.inverse();
            let conj_prev = step.iota.compose(prev).compose(&iota_inv);
            let conj_cur = step.iota.compose(cur).compose(&iota_inv);
            if conj_prev != *cur {
                return Err(format!("step {m1}: iota does not carry beta_{} onto beta_{m1}", m1 - 1));
            }
            if conj_cur == *cur {
                return Err(format!("step {m1}: conjugation fixed beta_{m1}"));
            }
            if step.beta != conj_cur {
                return Err(format!("step {m1}: recorded beta differs from the conjugate"));
            }
            if !step.beta.natural_leq(cur) {
                return Err(format!("step {m1}: beta_{} is not below beta_{m1}", m1 + 1));
            }
            if k < m1 as u32 + 1 || step.beta.rank() != k - m1 as u32 - 1 {
                return Err(format!("step {m1}: rank {} is not {k}-{m1}-1", step.beta.rank()));
            }
            if !step.beta.is_idempotent() {
                return Err(format!("step {m1}: conjugate is not idempotent"));
            }
        }
        if !self.final_beta().is_zero() {
            return Err("chain does not terminate at the zero element".to_string());
        }
        Ok(())
    }
}

/// Builds the collapse chain for idempotents β strictly below α.
///
/// The construction is local (it only touches dom α), so it works over any
/// carrier. When rank β < rank α − 1 the chain starts from the identity on
/// dom α with max(dom α ∖ dom β) removed; when β is already the zero the
/// chain is empty.
pub fn collapse_chain(
    alpha: &PartialOrderIso,
    beta: &PartialOrderIso,
) -> Result<CollapseChain, CongruenceError> {
    let bad = |msg: String| CongruenceError::BadCollapsePair(msg);
    if !alpha.is_idempotent() || !beta.is_idempotent() {
        return Err(bad(format!("{alpha} and {beta} must both be idempotent")));
    }
    if alpha == beta {
        return Err(bad(format!("{alpha} equals {beta}")));
    }
    if !beta.natural_leq(alpha) {
        return Err(bad(format!("{beta} is not below {alpha}")));
    }
    let k = alpha.rank();

    if beta.is_zero() {
        // nothing to conjugate away
        return Ok(CollapseChain {
            alpha: alpha.clone(),
            beta: beta.clone(),
            beta_one: beta.clone(),
            steps: Vec::new(),
        });
    }

    let beta_one = if beta.rank() == k - 1 {
        beta.clone()
    } else {
        let x = *alpha
            .dom()
            .iter()
            .filter(|p| !beta.dom().contains(p))
            .max()
            .expect("beta is strictly below alpha");
        PartialOrderIso::identity_on(alpha.dom().iter().copied().filter(|&p| p != x))
    };

    let mut steps = Vec::new();
    let mut prev = alpha.clone();
    let mut cur = beta_one.clone();
    while !cur.is_zero() {
        let y = *cur.dom().last().unwrap(); // max dom β_m
        let ran: Vec<Coord> = prev.dom().iter().copied().filter(|&p| p != y).collect();
        let iota = PartialOrderIso::new(cur.dom().to_vec(), ran)
            .expect("dom β_m and dom β_{m-1} ∖ {max} have equal size");
        let next = iota.compose(&cur).compose(&iota.inverse());
        steps.push(CollapseStep {
            iota,
            beta: next.clone(),
        });
        prev = cur;
        cur = next;
    }

    Ok(CollapseChain {
        alpha: alpha.clone(),
        beta: beta.clone(),
        beta_one,
        steps,
    })
}

// ---------------------------------------------------------------------------
// Rees quotients
// ---------------------------------------------------------------------------

/// Element of a Rees quotient: the collapsed zero class, or an element of
/// rank above the threshold lifted unchanged.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum QuotElem {
    Zero,
    Iso(PartialOrderIso),
}

impl fmt::Display for QuotElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuotElem::Zero => write!(f, "0"),
            QuotElem::Iso(e) => write!(f, "{e}"),
        }
    }
}

/// The quotient of a bounded semigroup by its ideal I_k, with products
/// computed on demand: compose, then collapse to zero when the rank falls
/// to the threshold or below. Works over any carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReesQuotient {
    sg: BoundedSemigroup,
    threshold: u32,
}

impl ReesQuotient {
    pub fn new(sg: BoundedSemigroup, threshold: u32) -> Result<Self, CongruenceError> {
        if threshold > sg.max_rank() {
            return Err(CongruenceError::RankOutOfRange {
                k: threshold,
                n: sg.max_rank(),
            });
        }
        Ok(ReesQuotient { sg, threshold })
    }

    pub fn base(&self) -> &BoundedSemigroup {
        &self.sg
    }

    pub fn threshold(&self) -> u32 {
        self.threshold
    }

    /// The canonical map onto the quotient.
    pub fn project(&self, e: &PartialOrderIso) -> QuotElem {
        if e.rank() <= self.threshold {
            QuotElem::Zero
        } else {
            QuotElem::Iso(e.clone())
        }
    }

    pub fn product(&self, a: &QuotElem, b: &QuotElem) -> QuotElem {
        match (a, b) {
            (QuotElem::Zero, _) | (_, QuotElem::Zero) => QuotElem::Zero,
            (QuotElem::Iso(x), QuotElem::Iso(y)) => self.project(&x.compose(y)),
        }
    }

    /// Element count over a finite chain: the zero plus every layer above
    /// the threshold.
    pub fn order(&self) -> Option<u128> {
        let m = self.sg.carrier().size()?;
        let mut total: u128 = 1;
        for k in self.threshold + 1..=self.sg.effective_max_rank() {
            let c = binomial(m as u64, k as u64);
            total += c * c;
        }
        Some(total)
    }

    /// Materializes the quotient's elements from an enumeration of the base.
    pub fn elements(&self, es: &EnumeratedSemigroup) -> Vec<QuotElem> {
        assert_eq!(es.semigroup(), &self.sg, "enumeration of a different semigroup");
        let mut out = vec![QuotElem::Zero];
        let start = self
            .layer_start(es);
        out.extend(es.elements()[start..].iter().cloned().map(QuotElem::Iso));
        out
    }

    fn layer_start(&self, es: &EnumeratedSemigroup) -> usize {
        es.layer_range(self.threshold.min(es.semigroup().effective_max_rank()))
            .end
    }

    /// Exhaustively re-checks h(αβ) = h(α)h(β) over the enumerated base.
    /// Returns the number of products checked.
    pub fn verify_homomorphism(&self, es: &EnumeratedSemigroup) -> Result<u64, String> {
        assert_eq!(es.semigroup(), &self.sg, "enumeration of a different semigroup");
        let n = es.len();
        for i in 0..n {
            for j in 0..n {
                let lhs = self.project(es.element(es.product(i, j)));
                let rhs = self.product(
                    &self.project(es.element(i)),
                    &self.project(es.element(j)),
                );
                if lhs != rhs {
                    return Err(format!(
                        "h({} · {}) = {} but h(..)h(..) = {}",
                        es.element(i),
                        es.element(j),
                        lhs,
                        rhs
                    ));
                }
            }
        }
        Ok((n as u64) * (n as u64))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carrier::Carrier;

    fn iso(dom: &[Coord], ran: &[Coord]) -> PartialOrderIso {
        PartialOrderIso::new(dom.to_vec(), ran.to_vec()).unwrap()
    }

    fn chain(m: u32, n: u32) -> EnumeratedSemigroup {
        EnumeratedSemigroup::new(BoundedSemigroup::new(Carrier::FiniteChain(m), n).unwrap())
            .unwrap()
    }

    #[test]
    fn rees_congruence_blocks() {
        let es = chain(4, 2);
        let diag = rees_congruence(&es, 0).unwrap();
        assert!(diag.is_diagonal());
        assert_eq!(diag, Congruence::diagonal(&es));

        let universal = rees_congruence(&es, 2).unwrap();
        assert!(universal.is_universal());
        assert_eq!(universal.blocks()[0].len(), 53);

        let mid = rees_congruence(&es, 1).unwrap();
        let mut sizes: Vec<usize> = mid.blocks().iter().map(|b| b.len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes.len(), 37);
        assert_eq!(*sizes.last().unwrap(), 17);
        assert!(sizes[..36].iter().all(|&s| s == 1));

        assert!(matches!(
            rees_congruence(&es, 3),
            Err(CongruenceError::RankOutOfRange { k: 3, n: 2 })
        ));
        for k in 0..=2 {
            rees_congruence(&es, k).unwrap().validate(&es).unwrap();
        }
    }

    #[test]
    fn principal_congruence_examples() {
        let es = chain(4, 2);
        let a = iso(&[1, 3], &[0, 2]);
        assert!(principal_congruence(&es, &a, &a).unwrap().is_diagonal());

        // a pair (zero, rank-1) collapses the whole rank-1 ideal
        let zero = PartialOrderIso::zero();
        let c = principal_congruence(&es, &zero, &iso(&[1], &[2])).unwrap();
        assert_eq!(c, rees_congruence(&es, 1).unwrap());

        // an idempotent pair beta < alpha at full rank collapses everything
        let c = principal_congruence(&es, &iso(&[1, 3], &[1, 3]), &iso(&[1], &[1])).unwrap();
        assert_eq!(c, rees_congruence(&es, 2).unwrap());
        assert!(c.is_universal());
    }

    #[test]
    fn lattice_is_the_rees_chain() {
        let es = chain(4, 2);
        let all = all_congruences(&es);
        assert_eq!(all.len(), 3);
        assert_eq!(is_rees(&es, &all[0]), Some(0));
        assert_eq!(is_rees(&es, &all[1]), Some(1));
        assert_eq!(is_rees(&es, &all[2]), Some(2));
        for c in &all {
            c.validate(&es).unwrap();
        }

        let es3 = chain(3, 1);
        let all3 = all_congruences(&es3);
        assert_eq!(all3.len(), 2);
        assert!(all3[0].is_diagonal());
        assert!(all3[1].is_universal());
    }

    #[test]
    fn incompatible_partition_rejected() {
        let es = chain(3, 1);
        // relate two rank-1 elements and nothing else: compatibility fails
        let i = es.index_of(&iso(&[0], &[1])).unwrap();
        let j = es.index_of(&iso(&[1], &[2])).unwrap();
        let mut blocks: Vec<Vec<usize>> = (0..es.len())
            .filter(|&x| x != i && x != j)
            .map(|x| vec![x])
            .collect();
        blocks.push(vec![i, j]);
        assert!(matches!(
            Congruence::new(&es, blocks),
            Err(CongruenceError::Incompatible { .. })
        ));

        // non-partitions are rejected before compatibility is even checked
        assert!(matches!(
            Congruence::new(&es, vec![vec![0, 0]]),
            Err(CongruenceError::MalformedPartition { .. })
        ));
    }

    #[test]
    fn valid_partition_accepted() {
        let es = chain(3, 1);
        let blocks: Vec<Vec<usize>> = vec![(0..es.len()).collect()];
        let c = Congruence::new(&es, blocks).unwrap();
        assert!(c.is_universal());
        assert_eq!(is_rees(&es, &c), Some(1));
    }

    #[test]
    fn collapse_chain_adjacent_rank() {
        let alpha = PartialOrderIso::identity_on([1, 2, 3]);
        let beta = PartialOrderIso::identity_on([1, 2]);
        let chain = collapse_chain(&alpha, &beta).unwrap();
        assert_eq!(chain.beta_one, beta);
        assert_eq!(chain.steps.len(), 2);
        assert!(chain.final_beta().is_zero());
        chain.verify().unwrap();
    }

    #[test]
    fn collapse_chain_zero_beta_is_immediate() {
        let alpha = PartialOrderIso::identity_on([5]);
        let chain = collapse_chain(&alpha, &PartialOrderIso::zero()).unwrap();
        assert!(chain.steps.is_empty());
        assert!(chain.final_beta().is_zero());
        chain.verify().unwrap();
    }

    #[test]
    fn collapse_chain_gap_in_rank() {
        let alpha = PartialOrderIso::identity_on([0, 1, 2, 5]);
        let beta = PartialOrderIso::identity_on([1]);
        let chain = collapse_chain(&alpha, &beta).unwrap();
        // x = max({0,2,5}) = 5 is dropped to form beta_one
        assert_eq!(chain.beta_one, PartialOrderIso::identity_on([0, 1, 2]));
        assert_eq!(chain.steps.len(), 3);
        chain.verify().unwrap();
    }

    #[test]
    fn collapse_chain_rejects_bad_pairs() {
        let alpha = PartialOrderIso::identity_on([1, 2]);
        assert!(collapse_chain(&alpha, &alpha).is_err());
        assert!(collapse_chain(&alpha, &iso(&[1], &[2])).is_err());
        assert!(collapse_chain(&alpha, &PartialOrderIso::identity_on([7])).is_err());
        assert!(collapse_chain(&iso(&[1], &[2]), &PartialOrderIso::zero()).is_err());
    }

    #[test]
    fn quotient_counts_and_homomorphism() {
        let es = chain(4, 2);
        let sg = *es.semigroup();
        let q = ReesQuotient::new(sg, 1).unwrap();
        assert_eq!(q.order(), Some(37));
        assert_eq!(q.elements(&es).len(), 37);
        assert_eq!(q.verify_homomorphism(&es), Ok(2809));

        let annihilating = ReesQuotient::new(sg, 2).unwrap();
        assert_eq!(annihilating.order(), Some(1));
        assert_eq!(annihilating.elements(&es), vec![QuotElem::Zero]);

        assert!(ReesQuotient::new(sg, 3).is_err());
    }

    #[test]
    fn quotient_products_collapse() {
        let q = ReesQuotient::new(
            BoundedSemigroup::new(Carrier::IntegerLine, 2).unwrap(),
            1,
        )
        .unwrap();
        let a = q.project(&iso(&[1, 3], &[2, 4]));
        let b = q.project(&iso(&[2, 4], &[5, 7]));
        assert_eq!(q.product(&a, &b), QuotElem::Iso(iso(&[1, 3], &[5, 7])));
        // overlap of one point only: the product falls into the collapsed ideal
        let c = q.project(&iso(&[2, 5], &[0, 9]));
        assert_eq!(q.product(&a, &c), QuotElem::Zero);
        assert_eq!(q.product(&QuotElem::Zero, &a), QuotElem::Zero);
        assert_eq!(q.project(&iso(&[1], &[2])), QuotElem::Zero);
    }
}

//! Whole-semigroup structure over finite chains.
//!
//! `BoundedSemigroup` is a lightweight handle (carrier, max rank). Over a
//! finite chain it can be materialized into an `EnumeratedSemigroup`, which
//! backs the structure checks: Green's relations with first-principles
//! principal-ideal oracles, egg-box grids, the two-sided ideal chain, and
//! stability. The fast predicates and the oracles are both permanent
//! features; the whole point of the crate is that they can be played against
//! each other.

use std::collections::HashMap;
use std::fmt;
use std::ops::Range;

use thiserror::Error;

use crate::carrier::{binomial, Carrier, Coord};
use crate::iso::PartialOrderIso;

/// Default bound on the number of elements materialized by enumeration.
pub const DEFAULT_CAP: usize = 20_000;

/// Products are precomputed into a Cayley table up to this many elements.
const TABLE_LIMIT: usize = 2_048;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SemigroupError {
    #[error("max rank must be at least 1")]
    ZeroMaxRank,
    #[error("carrier {0} is not enumerable; use a finite chain")]
    NotEnumerable(Carrier),
    #[error("semigroup has {required} elements, exceeding the cap of {cap}")]
    CapExceeded { required: u128, cap: usize },
    #[error("element {0} is not a member of the semigroup")]
    NotAnElement(PartialOrderIso),
}

/// The semigroup of all partial order isomorphisms of the carrier with rank
/// at most `max_rank`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundedSemigroup {
    carrier: Carrier,
    max_rank: u32,
}

impl BoundedSemigroup {
    pub fn new(carrier: Carrier, max_rank: u32) -> Result<Self, SemigroupError> {
        if max_rank == 0 {
            return Err(SemigroupError::ZeroMaxRank);
        }
        Ok(BoundedSemigroup { carrier, max_rank })
    }

    pub fn carrier(&self) -> Carrier {
        self.carrier
    }

    pub fn max_rank(&self) -> u32 {
        self.max_rank
    }

    /// Largest rank actually realized: `min(max_rank, chain size)`.
    pub fn effective_max_rank(&self) -> u32 {
        match self.carrier.size() {
            Some(m) => self.max_rank.min(m),
            None => self.max_rank,
        }
    }

    /// Membership: every support point lies in the carrier and the rank
    /// respects the bound.
    pub fn contains(&self, e: &PartialOrderIso) -> bool {
        e.rank() <= self.max_rank
            && e.dom().iter().chain(e.ran()).all(|&p| self.carrier.contains(p))
    }

    /// Element count by the counting identity Σ_k C(m,k)², without
    /// enumerating. `None` on the integer line. Saturates on overflow.
    pub fn order(&self) -> Option<u128> {
        let m = self.carrier.size()?;
        let mut total: u128 = 0;
        for k in 0..=self.effective_max_rank() {
            let c = binomial(m as u64, k as u64);
            total = total.saturating_add(c.saturating_mul(c));
        }
        Some(total)
    }
}

impl fmt::Display for BoundedSemigroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OI_{}({})", self.max_rank, self.carrier)
    }
}

/// A finite-chain semigroup materialized as a sorted element list with an
/// index and (when small) a Cayley table.
///
/// Elements are sorted by (rank, dom, ran), so each rank layer is a
/// contiguous index range and index 0 is the zero element.
pub struct EnumeratedSemigroup {
    sg: BoundedSemigroup,
    elems: Vec<PartialOrderIso>,
    index: HashMap<PartialOrderIso, u32>,
    layer_offsets: Vec<usize>,
    table: Option<Vec<u32>>,
}

impl EnumeratedSemigroup {
    pub fn new(sg: BoundedSemigroup) -> Result<Self, SemigroupError> {
        Self::with_cap(sg, DEFAULT_CAP)
    }

    pub fn with_cap(sg: BoundedSemigroup, cap: usize) -> Result<Self, SemigroupError> {
        let Some(required) = sg.order() else {
            return Err(SemigroupError::NotEnumerable(sg.carrier()));
        };
        if required > cap as u128 {
            return Err(SemigroupError::CapExceeded { required, cap });
        }
        let carrier = sg.carrier();
        let mut elems = Vec::with_capacity(required as usize);
        let mut layer_offsets = vec![0usize];
        for k in 0..=sg.effective_max_rank() {
            let doms: Vec<_> = carrier.k_subsets(k, None).expect("finite chain").collect();
            for dom in &doms {
                for ran in &doms {
                    elems.push(
                        PartialOrderIso::new(dom.clone(), ran.clone())
                            .expect("k-subsets are strictly increasing"),
                    );
                }
            }
            layer_offsets.push(elems.len());
        }
        assert_eq!(elems.len() as u128, required, "counting identity");
        debug_assert!(elems.windows(2).all(|w| w[0] < w[1]), "canonical order");

        let index: HashMap<_, _> = elems
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i as u32))
            .collect();

        let mut es = EnumeratedSemigroup {
            sg,
            elems,
            index,
            layer_offsets,
            table: None,
        };
        if es.len() <= TABLE_LIMIT {
            let n = es.len();
            let mut table = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    table.push(es.product_uncached(i, j) as u32);
                }
            }
            es.table = Some(table);
        }
        Ok(es)
    }

    pub fn semigroup(&self) -> &BoundedSemigroup {
        &self.sg
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        false // the zero element is always present
    }

    pub fn elements(&self) -> &[PartialOrderIso] {
        &self.elems
    }

    pub fn element(&self, i: usize) -> &PartialOrderIso {
        &self.elems[i]
    }

    pub fn index_of(&self, e: &PartialOrderIso) -> Option<usize> {
        self.index.get(e).map(|&i| i as usize)
    }

    /// Index of the product of elements `i` and `j` (composition is closed:
    /// rank never increases).
    pub fn product(&self, i: usize, j: usize) -> usize {
        match &self.table {
            Some(t) => t[i * self.len() + j] as usize,
            None => self.product_uncached(i, j),
        }
    }

    fn product_uncached(&self, i: usize, j: usize) -> usize {
        let p = self.elems[i].compose(&self.elems[j]);
        self.index[&p] as usize
    }

    /// Index range of the elements of rank exactly `k`.
    pub fn layer_range(&self, k: u32) -> Range<usize> {
        let k = k as usize;
        if k + 1 >= self.layer_offsets.len() {
            return self.len()..self.len();
        }
        self.layer_offsets[k]..self.layer_offsets[k + 1]
    }

    pub fn idempotents(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.elems[i].is_idempotent())
    }
}

/// Runs `work` over `0..n` split into contiguous chunks, one thread per
/// chunk, and returns the per-chunk results in chunk order. With
/// `threads <= 1` this degenerates to a single sequential call, and because
/// chunks are contiguous the concatenated output is identical either way.
fn chunked<R, F>(n: usize, threads: usize, work: F) -> Vec<R>
where
    R: Send,
    F: Fn(Range<usize>) -> R + Sync,
{
    let threads = threads.max(1).min(n.max(1));
    if threads == 1 {
        return vec![work(0..n)];
    }
    let chunk = n.div_ceil(threads);
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                let lo = t * chunk;
                let hi = ((t + 1) * chunk).min(n);
                let work = &work;
                scope.spawn(move || work(lo..hi))
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    })
}

// ---------------------------------------------------------------------------
// Green's relations
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GreenRelation {
    R,
    L,
    H,
    D,
    J,
}

impl GreenRelation {
    pub const ALL: [GreenRelation; 5] = [
        GreenRelation::R,
        GreenRelation::L,
        GreenRelation::H,
        GreenRelation::D,
        GreenRelation::J,
    ];
}

impl fmt::Display for GreenRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GreenRelation::R => "R",
            GreenRelation::L => "L",
            GreenRelation::H => "H",
            GreenRelation::D => "D",
            GreenRelation::J => "J",
        };
        write!(f, "{s}")
    }
}

/// Constant-time Green predicates on canonical forms: R compares domains,
/// L compares ranges, H is equality, and D = J compare ranks.
pub fn green(a: &PartialOrderIso, b: &PartialOrderIso, rel: GreenRelation) -> bool {
    match rel {
        GreenRelation::R => a.dom() == b.dom(),
        GreenRelation::L => a.ran() == b.ran(),
        GreenRelation::H => a == b,
        GreenRelation::D | GreenRelation::J => a.rank() == b.rank(),
    }
}

/// Fixed-capacity bitset over element indices.
#[derive(Clone, PartialEq, Eq, Hash)]
struct Bits {
    words: Vec<u64>,
}

impl Bits {
    fn new(n: usize) -> Self {
        Bits {
            words: vec![0; n.div_ceil(64)],
        }
    }

    fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    fn is_subset(&self, other: &Bits) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &bits)| {
            let mut bits = bits;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(w * 64 + b)
            })
        })
    }
}

/// First-principles Green oracle: materializes every principal right, left
/// and two-sided ideal of the enumerated semigroup (with the identity
/// adjoined) and answers relation queries by comparing them. D is evaluated
/// as a composition of the L and R oracles.
pub struct GreenOracle {
    right: Vec<Bits>,
    left: Vec<Bits>,
    two: Vec<Bits>,
    r_class: Vec<u32>,
    l_class: Vec<u32>,
    // (l_class, r_class) pairs realized by some element; backs L∘R and R∘L
    lr_occupied: std::collections::HashSet<(u32, u32)>,
}

impl GreenOracle {
    pub fn new(es: &EnumeratedSemigroup) -> Self {
        let n = es.len();
        let mut right = Vec::with_capacity(n);
        let mut left = Vec::with_capacity(n);
        let mut two = Vec::with_capacity(n);
        for a in 0..n {
            // aS¹ = {a} ∪ aS and S¹a = {a} ∪ Sa
            let mut r = Bits::new(n);
            let mut l = Bits::new(n);
            r.set(a);
            l.set(a);
            for s in 0..n {
                r.set(es.product(a, s));
                l.set(es.product(s, a));
            }
            // S¹aS¹ = (aS¹) ∪ S·(aS¹)
            let mut t = r.clone();
            for x in r.iter_ones() {
                for s in 0..n {
                    t.set(es.product(s, x));
                }
            }
            for x in l.iter_ones() {
                t.set(x);
            }
            right.push(r);
            left.push(l);
            two.push(t);
        }

        let class_ids = |sets: &[Bits]| -> Vec<u32> {
            let mut ids = HashMap::new();
            sets.iter()
                .map(|s| {
                    let next = ids.len() as u32;
                    *ids.entry(s.clone()).or_insert(next)
                })
                .collect()
        };
        let r_class = class_ids(&right);
        let l_class = class_ids(&left);
        let lr_occupied = (0..n).map(|i| (l_class[i], r_class[i])).collect();

        GreenOracle {
            right,
            left,
            two,
            r_class,
            l_class,
            lr_occupied,
        }
    }

    pub fn related(&self, i: usize, j: usize, rel: GreenRelation) -> bool {
        match rel {
            GreenRelation::R => self.right[i] == self.right[j],
            GreenRelation::L => self.left[i] == self.left[j],
            GreenRelation::H => self.right[i] == self.right[j] && self.left[i] == self.left[j],
            GreenRelation::D => self.d_via_l_then_r(i, j),
            GreenRelation::J => self.two[i] == self.two[j],
        }
    }

    /// ∃γ: i L γ and γ R j.
    pub fn d_via_l_then_r(&self, i: usize, j: usize) -> bool {
        self.lr_occupied.contains(&(self.l_class[i], self.r_class[j]))
    }

    /// ∃γ: i R γ and γ L j.
    pub fn d_via_r_then_l(&self, i: usize, j: usize) -> bool {
        self.lr_occupied.contains(&(self.l_class[j], self.r_class[i]))
    }

    /// Principal two-sided ideal S¹ a S¹ as a sorted index list.
    pub fn principal_two_sided(&self, i: usize) -> Vec<usize> {
        self.two[i].iter_ones().collect()
    }

    /// Principal right ideal a S¹ as a sorted index list.
    pub fn principal_right(&self, i: usize) -> Vec<usize> {
        self.right[i].iter_ones().collect()
    }

    /// Principal left ideal S¹ a as a sorted index list.
    pub fn principal_left(&self, i: usize) -> Vec<usize> {
        self.left[i].iter_ones().collect()
    }
}

/// One-shot oracle query; materializes the principal ideals of the whole
/// semigroup, so prefer [`GreenOracle::new`] for repeated queries.
pub fn green_oracle(
    es: &EnumeratedSemigroup,
    a: &PartialOrderIso,
    b: &PartialOrderIso,
    rel: GreenRelation,
) -> Result<bool, SemigroupError> {
    let i = es
        .index_of(a)
        .ok_or_else(|| SemigroupError::NotAnElement(a.clone()))?;
    let j = es
        .index_of(b)
        .ok_or_else(|| SemigroupError::NotAnElement(b.clone()))?;
    Ok(GreenOracle::new(es).related(i, j, rel))
}

#[derive(Debug)]
pub struct GreenMismatch {
    pub relation: GreenRelation,
    pub a: PartialOrderIso,
    pub b: PartialOrderIso,
    pub fast: bool,
    pub oracle: bool,
}

impl fmt::Display for GreenMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} disagrees on ({}, {}): fast={}, oracle={}",
            self.relation, self.a, self.b, self.fast, self.oracle
        )
    }
}

#[derive(Debug)]
pub struct GreenEquivalenceReport {
    pub elements: usize,
    pub ordered_pairs: u64,
    pub mismatches: Vec<GreenMismatch>,
    /// Pairs where the oracle's H differs from oracle R ∩ L.
    pub h_not_intersection: u64,
    /// Pairs where oracle L∘R, R∘L or J disagree with each other.
    pub d_decomposition_mismatches: u64,
}

impl GreenEquivalenceReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
            && self.h_not_intersection == 0
            && self.d_decomposition_mismatches == 0
    }
}

/// Compares the constant-time predicates against the principal-ideal oracle
/// on every ordered pair, for all five relations, and checks the oracle's
/// own lattice identities H = R ∩ L and D = L∘R = R∘L = J.
pub fn green_equivalence(es: &EnumeratedSemigroup, threads: usize) -> GreenEquivalenceReport {
    let n = es.len();
    let oracle = GreenOracle::new(es);
    let results = chunked(n, threads, |rows| {
        let mut mismatches = Vec::new();
        let mut h_bad = 0u64;
        let mut d_bad = 0u64;
        for i in rows {
            for j in 0..n {
                for rel in GreenRelation::ALL {
                    let fast = green(es.element(i), es.element(j), rel);
                    let slow = oracle.related(i, j, rel);
                    if fast != slow {
                        mismatches.push(GreenMismatch {
                            relation: rel,
                            a: es.element(i).clone(),
                            b: es.element(j).clone(),
                            fast,
                            oracle: slow,
                        });
                    }
                }
                let h = oracle.related(i, j, GreenRelation::H);
                let r = oracle.related(i, j, GreenRelation::R);
                let l = oracle.related(i, j, GreenRelation::L);
                if h != (r && l) {
                    h_bad += 1;
                }
                let lr = oracle.d_via_l_then_r(i, j);
                let rl = oracle.d_via_r_then_l(i, j);
                let jj = oracle.related(i, j, GreenRelation::J);
                if lr != rl || lr != jj {
                    d_bad += 1;
                }
            }
        }
        (mismatches, h_bad, d_bad)
    });

    let mut report = GreenEquivalenceReport {
        elements: n,
        ordered_pairs: (n as u64) * (n as u64),
        mismatches: Vec::new(),
        h_not_intersection: 0,
        d_decomposition_mismatches: 0,
    };
    for (mm, h, d) in results {
        report.mismatches.extend(mm);
        report.h_not_intersection += h;
        report.d_decomposition_mismatches += d;
    }
    report
}

// ---------------------------------------------------------------------------
// Egg-box structure
// ---------------------------------------------------------------------------

/// One D-class laid out as a grid: rows are R-classes (fixed domain),
/// columns are L-classes (fixed range), each cell the single H-class
/// element with that domain and range.
pub struct EggBoxClass {
    pub rank: u32,
    pub rows: Vec<Vec<Coord>>,
    pub cols: Vec<Vec<Coord>>,
    cells: Vec<u32>,
}

impl EggBoxClass {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    /// Element index at grid position (row, col).
    pub fn cell(&self, row: usize, col: usize) -> usize {
        self.cells[row * self.cols.len() + col] as usize
    }

    pub fn size(&self) -> usize {
        self.cells.len()
    }
}

pub struct EggBox {
    pub classes: Vec<EggBoxClass>,
}

/// Arranges each rank layer into its egg-box grid.
pub fn eggbox(es: &EnumeratedSemigroup) -> EggBox {
    let carrier = es.semigroup().carrier();
    let mut classes = Vec::new();
    for k in 0..=es.semigroup().effective_max_rank() {
        let subsets: Vec<_> = carrier.k_subsets(k, None).expect("finite chain").collect();
        let mut cells = Vec::with_capacity(subsets.len() * subsets.len());
        for dom in &subsets {
            for ran in &subsets {
                let e = PartialOrderIso::new(dom.clone(), ran.clone()).unwrap();
                let idx = es.index_of(&e).expect("every (dom, ran) cell is realized");
                cells.push(idx as u32);
            }
        }
        assert_eq!(
            cells.len(),
            es.layer_range(k).len(),
            "every layer element sits in exactly one cell"
        );
        classes.push(EggBoxClass {
            rank: k,
            rows: subsets.clone(),
            cols: subsets,
            cells,
        });
    }
    EggBox { classes }
}

// ---------------------------------------------------------------------------
// Two-sided ideals
// ---------------------------------------------------------------------------

/// Brute-force two-sided ideal test: `members` (sorted element indices) must
/// be nonempty and closed under multiplication by every element on both
/// sides.
pub fn is_ideal(es: &EnumeratedSemigroup, members: &[usize]) -> bool {
    if members.is_empty() {
        return false;
    }
    let mut mask = vec![false; es.len()];
    for &i in members {
        mask[i] = true;
    }
    members.iter().all(|&a| {
        (0..es.len()).all(|s| mask[es.product(a, s)] && mask[es.product(s, a)])
    })
}

/// Finds every nonempty two-sided ideal.
///
/// Ideals are unions of J-classes, i.e. of rank layers; every union of
/// layers is generated as a candidate and validated by the brute-force
/// closure test, so no downward-closure assumption is baked in. Results are
/// sorted by size.
pub fn all_ideals(es: &EnumeratedSemigroup) -> Vec<Vec<usize>> {
    let layers: Vec<Range<usize>> = (0..=es.semigroup().effective_max_rank())
        .map(|k| es.layer_range(k))
        .collect();
    let mut found = Vec::new();
    for picks in 1u32..(1 << layers.len()) {
        let mut members: Vec<usize> = Vec::new();
        for (k, layer) in layers.iter().enumerate() {
            if picks >> k & 1 == 1 {
                members.extend(layer.clone());
            }
        }
        if is_ideal(es, &members) {
            found.push(members);
        }
    }
    found.sort_by_key(|m| m.len());
    found
}

#[derive(Debug)]
pub struct IdealReport {
    /// Sizes of the ideals found, ascending.
    pub found_sizes: Vec<usize>,
    /// Expected chain sizes |I_k| = Σ_{j≤k} C(m,j)², ascending.
    pub expected_sizes: Vec<usize>,
    /// Candidate layer unions examined.
    pub candidates: usize,
    pub violations: Vec<String>,
}

impl IdealReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Verifies that the two-sided ideals are exactly the rank chain
/// I_0 ⊂ I_1 ⊂ … and that every principal two-sided ideal S¹αS¹ equals
/// I_{rank α} (which is what makes the layer-union candidate set complete:
/// any ideal is the union of the principal ideals of its members).
pub fn ideal_chain_report(es: &EnumeratedSemigroup) -> IdealReport {
    let n_eff = es.semigroup().effective_max_rank();
    let m = es.semigroup().carrier().size().expect("finite chain") as u64;

    let mut expected_sizes = Vec::new();
    let mut acc = 0u128;
    for k in 0..=n_eff {
        let c = binomial(m, k as u64);
        acc += c * c;
        expected_sizes.push(acc as usize);
    }

    let found = all_ideals(es);
    let found_sizes: Vec<usize> = found.iter().map(|i| i.len()).collect();
    let candidates = (1usize << (n_eff + 1)) - 1;

    let mut violations = Vec::new();
    if found_sizes != expected_sizes {
        violations.push(format!(
            "ideal sizes {found_sizes:?} differ from the expected chain {expected_sizes:?}"
        ));
    }
    for (k, ideal) in found.iter().enumerate() {
        let prefix: Vec<usize> = (0..es.layer_range(k as u32).end).collect();
        if *ideal != prefix {
            violations.push(format!("ideal #{k} is not the rank-{k} prefix"));
        }
    }

    let oracle = GreenOracle::new(es);
    for i in 0..es.len() {
        let principal = oracle.principal_two_sided(i);
        let k = es.element(i).rank();
        let prefix: Vec<usize> = (0..es.layer_range(k).end).collect();
        if principal != prefix {
            violations.push(format!(
                "principal ideal of {} is not the full rank-{} chain prefix",
                es.element(i),
                k
            ));
        }
    }

    IdealReport {
        found_sizes,
        expected_sizes,
        candidates,
        violations,
    }
}

// ---------------------------------------------------------------------------
// Stability
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdealSide {
    Right,
    Left,
}

#[derive(Debug)]
pub struct StabilityViolation {
    pub side: IdealSide,
    pub alpha: PartialOrderIso,
    pub beta: PartialOrderIso,
    /// The triggered inclusion extended to ideal equality.
    pub ideals_equal: bool,
    /// The derived identity (α = βα on the right side, α = αβ on the left).
    pub identity_holds: bool,
}

#[derive(Debug)]
pub struct StabilityReport {
    pub elements: usize,
    pub ordered_pairs: u64,
    /// Pairs whose right-ideal inclusion αS¹ ⊆ βαS¹ was triggered.
    pub right_inclusions: u64,
    /// Pairs whose left-ideal inclusion S¹α ⊆ S¹αβ was triggered.
    pub left_inclusions: u64,
    pub violations: Vec<StabilityViolation>,
}

impl StabilityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Exhaustive stability scan: whenever αS¹ ⊆ βαS¹ the ideals must be equal
/// and α = βα must hold outright; dually, S¹α ⊆ S¹αβ forces equality and
/// α = αβ.
pub fn check_stability(es: &EnumeratedSemigroup, threads: usize) -> StabilityReport {
    let n = es.len();
    // principal ideal bitsets, computed once
    let mut right = Vec::with_capacity(n);
    let mut left = Vec::with_capacity(n);
    for a in 0..n {
        let mut r = Bits::new(n);
        let mut l = Bits::new(n);
        r.set(a);
        l.set(a);
        for s in 0..n {
            r.set(es.product(a, s));
            l.set(es.product(s, a));
        }
        right.push(r);
        left.push(l);
    }

    let results = chunked(n, threads, |alphas| {
        let mut right_inclusions = 0u64;
        let mut left_inclusions = 0u64;
        let mut violations = Vec::new();
        for a in alphas {
            for b in 0..n {
                let ba = es.product(b, a);
                if right[a].is_subset(&right[ba]) {
                    right_inclusions += 1;
                    let ideals_equal = right[a] == right[ba];
                    let identity_holds = a == ba;
                    if !(ideals_equal && identity_holds) {
                        violations.push(StabilityViolation {
                            side: IdealSide::Right,
                            alpha: es.element(a).clone(),
                            beta: es.element(b).clone(),
                            ideals_equal,
                            identity_holds,
                        });
                    }
                }
                let ab = es.product(a, b);
                if left[a].is_subset(&left[ab]) {
                    left_inclusions += 1;
                    let ideals_equal = left[a] == left[ab];
                    let identity_holds = a == ab;
                    if !(ideals_equal && identity_holds) {
                        violations.push(StabilityViolation {
                            side: IdealSide::Left,
                            alpha: es.element(a).clone(),
                            beta: es.element(b).clone(),
                            ideals_equal,
                            identity_holds,
                        });
                    }
                }
            }
        }
        (right_inclusions, left_inclusions, violations)
    });

    let mut report = StabilityReport {
        elements: n,
        ordered_pairs: (n as u64) * (n as u64),
        right_inclusions: 0,
        left_inclusions: 0,
        violations: Vec::new(),
    };
    for (r, l, v) in results {
        report.right_inclusions += r;
        report.left_inclusions += l;
        report.violations.extend(v);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iso(dom: &[Coord], ran: &[Coord]) -> PartialOrderIso {
        PartialOrderIso::new(dom.to_vec(), ran.to_vec()).unwrap()
    }

    fn chain(m: u32, n: u32) -> EnumeratedSemigroup {
        EnumeratedSemigroup::new(BoundedSemigroup::new(Carrier::FiniteChain(m), n).unwrap())
            .unwrap()
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(chain(4, 2).len(), 53); // 1 + 16 + 36
        assert_eq!(chain(3, 1).len(), 10); // 1 + 9
        assert_eq!(chain(2, 5).len(), 6); // 1 + 4 + 1, k capped at m
    }

    #[test]
    fn enumeration_is_sorted_and_indexed() {
        let es = chain(3, 2);
        assert!(es.elements().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(es.index_of(&PartialOrderIso::zero()), Some(0));
        for (i, e) in es.elements().iter().enumerate() {
            assert_eq!(es.index_of(e), Some(i));
        }
        assert_eq!(es.layer_range(0), 0..1);
        assert_eq!(es.layer_range(1), 1..10);
        assert_eq!(es.layer_range(2), 10..19);
        assert_eq!(es.layer_range(3), 19..19);
    }

    #[test]
    fn closure_under_composition() {
        let es = chain(3, 2);
        for i in 0..es.len() {
            for j in 0..es.len() {
                let p = es.element(i).compose(es.element(j));
                assert!(es.index_of(&p).is_some(), "{p} escaped the enumeration");
            }
        }
    }

    #[test]
    fn cap_and_carrier_errors() {
        let sg = BoundedSemigroup::new(Carrier::FiniteChain(9), 4).unwrap();
        assert_eq!(sg.order(), Some(24_310));
        assert!(matches!(
            EnumeratedSemigroup::new(sg),
            Err(SemigroupError::CapExceeded {
                required: 24_310,
                cap: DEFAULT_CAP
            })
        ));
        let infinite = BoundedSemigroup::new(Carrier::IntegerLine, 2).unwrap();
        assert!(matches!(
            EnumeratedSemigroup::new(infinite),
            Err(SemigroupError::NotEnumerable(Carrier::IntegerLine))
        ));
        assert!(matches!(
            BoundedSemigroup::new(Carrier::IntegerLine, 0),
            Err(SemigroupError::ZeroMaxRank)
        ));
    }

    #[test]
    fn fast_green_examples() {
        assert!(green(&iso(&[1, 3], &[2, 4]), &iso(&[1, 3], &[0, 5]), GreenRelation::R));
        assert!(green(&iso(&[1, 3], &[2, 4]), &iso(&[1, 3], &[2, 4]), GreenRelation::H));
        assert!(!green(&iso(&[1, 3], &[2, 4]), &iso(&[1, 3], &[0, 5]), GreenRelation::H));
        assert!(green(&iso(&[1], &[7]), &iso(&[5], &[0]), GreenRelation::J));
        assert!(!green(&PartialOrderIso::zero(), &iso(&[1], &[2]), GreenRelation::D));
    }

    #[test]
    fn oracle_agrees_on_small_chain() {
        let es = chain(3, 1);
        let report = green_equivalence(&es, 1);
        assert!(report.passed(), "{:?}", report.mismatches);
        assert_eq!(report.ordered_pairs, 100);
    }

    #[test]
    fn oracle_one_shot() {
        let es = chain(3, 1);
        let a = iso(&[0], &[1]);
        let b = iso(&[2], &[0]);
        assert_eq!(green_oracle(&es, &a, &b, GreenRelation::D), Ok(true));
        assert_eq!(
            green_oracle(&es, &a, &a, GreenRelation::R),
            Ok(true),
            "reflexivity"
        );
        assert_eq!(
            green_oracle(&es, &PartialOrderIso::zero(), &a, GreenRelation::D),
            Ok(false)
        );
        let foreign = iso(&[0, 1], &[0, 1]);
        assert!(green_oracle(&es, &foreign, &a, GreenRelation::R).is_err());
    }

    #[test]
    fn eggbox_grids() {
        let es = chain(4, 2);
        let eb = eggbox(&es);
        assert_eq!(eb.classes.len(), 3);
        assert_eq!(eb.classes[0].size(), 1);
        assert_eq!(es.element(eb.classes[0].cell(0, 0)), &PartialOrderIso::zero());
        assert_eq!((eb.classes[2].n_rows(), eb.classes[2].n_cols()), (6, 6));
        assert_eq!(eb.classes[2].size(), 36);

        let eb3 = eggbox(&chain(3, 1));
        assert_eq!((eb3.classes[1].n_rows(), eb3.classes[1].n_cols()), (3, 3));
        assert_eq!(eb3.classes[1].size(), 9);
    }

    #[test]
    fn ideal_chain_on_chain4() {
        let es = chain(4, 2);
        let ideals = all_ideals(&es);
        let sizes: Vec<usize> = ideals.iter().map(|i| i.len()).collect();
        assert_eq!(sizes, vec![1, 17, 53]);
        assert_eq!(ideals[0], vec![0], "smallest ideal is the zero alone");
        assert_eq!(ideals[2].len(), es.len(), "largest ideal is everything");
        let report = ideal_chain_report(&es);
        assert!(report.passed(), "{:?}", report.violations);
    }

    /// Independent oracle at tiny scale: enumerate *all* subsets and keep
    /// those passing the brute-force closure test.
    #[test]
    fn ideal_search_matches_full_subset_enumeration() {
        let es = chain(3, 1); // 10 elements, 1023 candidate subsets
        let mut brute = Vec::new();
        for mask in 1u32..(1 << es.len()) {
            let members: Vec<usize> = (0..es.len()).filter(|i| mask >> i & 1 == 1).collect();
            if is_ideal(&es, &members) {
                brute.push(members);
            }
        }
        brute.sort_by_key(|m| m.len());
        assert_eq!(brute, all_ideals(&es));
    }

    #[test]
    fn stability_no_violations_small() {
        let es = chain(3, 1);
        let report = check_stability(&es, 1);
        assert!(report.passed(), "{:?}", report.violations);
        assert!(report.right_inclusions > 0);
        assert!(report.left_inclusions > 0);
    }

    #[test]
    fn stability_identity_pair_example() {
        let es = chain(4, 2);
        let alpha = iso(&[1, 3], &[0, 2]);
        let beta = PartialOrderIso::identity_on([1, 3]);
        // β = id on dom α: the inclusion premise holds and βα = α
        assert_eq!(beta.compose(&alpha), alpha);
        let a = es.index_of(&alpha).unwrap();
        let b = es.index_of(&beta).unwrap();
        assert_eq!(es.product(b, a), a);
    }

    #[test]
    fn threading_is_deterministic() {
        let es = chain(4, 2);
        let seq = check_stability(&es, 1);
        let par = check_stability(&es, 4);
        assert_eq!(seq.right_inclusions, par.right_inclusions);
        assert_eq!(seq.left_inclusions, par.left_inclusions);
        assert_eq!(seq.violations.len(), par.violations.len());
    }
}

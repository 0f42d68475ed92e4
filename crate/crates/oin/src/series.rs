//! Layer-escape witnesses and tight ideal series.
//!
//! The rank-k layer of the semigroup (one D-class) has the property that
//! products with a same-rank partner drop out of the layer unless the
//! partner's domain and range tile exactly against the subject. Among any
//! two distinct same-rank probes at most one can be the subject's inverse,
//! so a probe whose product escapes the layer always exists; this is the
//! finite kernel behind the density of the ideal series, and it survives in
//! every Rees-quotient image because the canonical map is injective above
//! the collapsed ideal.
//!
//! Sampling is driven by an explicitly seeded generator and every report
//! embeds the seed it ran with.

use std::collections::HashSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::carrier::{Carrier, Coord, Window};
use crate::congruence::{QuotElem, ReesQuotient};
use crate::iso::PartialOrderIso;
use crate::semigroup::{BoundedSemigroup, EnumeratedSemigroup};

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("expected rank {expected}, found an element of rank {found}")]
    RankMismatch { expected: u32, found: u32 },
    #[error("the subject must have rank at least 1")]
    ZeroRank,
    #[error("at least 2 distinct probes are required, got {0}")]
    ProbeSetTooSmall(usize),
    #[error("probe set contains duplicate elements")]
    DuplicateProbes,
    #[error("empty sampling configuration: {0}")]
    EmptyConfig(&'static str),
    #[error("window {0} has too few points to draw rank-{1} elements")]
    WindowTooSmall(Window, u32),
    #[error("tight-series sampling runs over the integer line; finite chains use the exhaustive layer check")]
    NeedsIntegerLine,
    #[error("no escaping product for subject {subject}; this is a structural violation, report it")]
    NoWitness { subject: PartialOrderIso },
}

/// Which product left the layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProductSide {
    AlphaBeta,
    BetaAlpha,
}

impl std::fmt::Display for ProductSide {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProductSide::AlphaBeta => write!(f, "alpha*beta"),
            ProductSide::BetaAlpha => write!(f, "beta*alpha"),
        }
    }
}

/// Evidence that some probe's product with the subject left the subject's
/// rank layer.
#[derive(Debug, Clone)]
pub struct WitnessReport {
    pub subject: PartialOrderIso,
    pub probes: Vec<PartialOrderIso>,
    pub witness: PartialOrderIso,
    pub side: ProductSide,
    pub product: PartialOrderIso,
    pub product_rank: u32,
}

/// The one-probe composition law: with equal ranks k ≥ 1, `dom β ≠ ran α`
/// forces `rank(αβ) < k`. Returns the truth of that implication (vacuously
/// true when the domains tile exactly).
pub fn rank_drop_law(a: &PartialOrderIso, b: &PartialOrderIso) -> Result<bool, SeriesError> {
    let k = a.rank();
    if k == 0 {
        return Err(SeriesError::ZeroRank);
    }
    if b.rank() != k {
        return Err(SeriesError::RankMismatch {
            expected: k,
            found: b.rank(),
        });
    }
    if b.dom() == a.ran() {
        return Ok(true);
    }
    Ok(a.compose(b).rank() < k)
}

/// Finds a probe whose product with the subject (on either side) has rank
/// strictly below the common rank k.
///
/// At most one element can have both `dom = ran α` and `ran = dom α` (the
/// subject's inverse), so any 2 distinct same-rank probes contain a witness;
/// a singleton probe set genuinely may not, and is rejected.
pub fn omega_unstable_witness(
    subject: &PartialOrderIso,
    probes: &[PartialOrderIso],
) -> Result<WitnessReport, SeriesError> {
    let k = subject.rank();
    if k == 0 {
        return Err(SeriesError::ZeroRank);
    }
    if probes.len() < 2 {
        return Err(SeriesError::ProbeSetTooSmall(probes.len()));
    }
    for p in probes {
        if p.rank() != k {
            return Err(SeriesError::RankMismatch {
                expected: k,
                found: p.rank(),
            });
        }
    }
    let distinct: HashSet<&PartialOrderIso> = probes.iter().collect();
    if distinct.len() != probes.len() {
        return Err(SeriesError::DuplicateProbes);
    }

    for beta in probes {
        let ab = subject.compose(beta);
        if ab.rank() < k {
            return Ok(WitnessReport {
                subject: subject.clone(),
                probes: probes.to_vec(),
                witness: beta.clone(),
                side: ProductSide::AlphaBeta,
                product_rank: ab.rank(),
                product: ab,
            });
        }
        let ba = beta.compose(subject);
        if ba.rank() < k {
            return Ok(WitnessReport {
                subject: subject.clone(),
                probes: probes.to_vec(),
                witness: beta.clone(),
                side: ProductSide::BetaAlpha,
                product_rank: ba.rank(),
                product: ba,
            });
        }
    }
    Err(SeriesError::NoWitness {
        subject: subject.clone(),
    })
}

// ---------------------------------------------------------------------------
// Seeded sampling over the integer line
// ---------------------------------------------------------------------------

/// A strictly increasing random k-subset of the window.
pub fn random_subset(
    rng: &mut impl Rng,
    k: u32,
    window: Window,
) -> Result<Vec<Coord>, SeriesError> {
    let len = window.len();
    if (len as u128) < k as u128 {
        return Err(SeriesError::WindowTooSmall(window, k));
    }
    let len = usize::try_from(len).map_err(|_| SeriesError::WindowTooSmall(window, k))?;
    let mut coords: Vec<Coord> = rand::seq::index::sample(rng, len, k as usize)
        .into_iter()
        .map(|i| window.lo() + i as Coord)
        .collect();
    coords.sort_unstable();
    Ok(coords)
}

/// A uniformly random rank-k element supported inside the window.
pub fn random_iso(
    rng: &mut impl Rng,
    k: u32,
    window: Window,
) -> Result<PartialOrderIso, SeriesError> {
    let dom = random_subset(rng, k, window)?;
    let ran = random_subset(rng, k, window)?;
    Ok(PartialOrderIso::new(dom, ran).expect("sampled subsets are strictly increasing"))
}

fn random_distinct_isos(
    rng: &mut impl Rng,
    k: u32,
    window: Window,
    count: usize,
) -> Result<Vec<PartialOrderIso>, SeriesError> {
    let mut set = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count {
        attempts += 1;
        if attempts > 1000 * count {
            return Err(SeriesError::WindowTooSmall(window, k));
        }
        let e = random_iso(rng, k, window)?;
        if set.insert(e.clone()) {
            out.push(e);
        }
    }
    Ok(out)
}

/// Sampling configuration for tight-series checks. The master seed is
/// embedded in every produced report.
#[derive(Debug, Clone, Copy)]
pub struct SampleConfig {
    pub seed: u64,
    pub samples_per_layer: u32,
    /// Probes drawn per sample; must be at least 2.
    pub probe_count: usize,
    pub window: Window,
}

impl SampleConfig {
    fn validate(&self) -> Result<(), SeriesError> {
        if self.samples_per_layer == 0 {
            return Err(SeriesError::EmptyConfig("samples_per_layer is 0"));
        }
        if self.probe_count < 2 {
            return Err(SeriesError::EmptyConfig("probe_count is below 2"));
        }
        Ok(())
    }

    fn layer_rng(&self, layer: u32) -> (u64, ChaCha8Rng) {
        // splitmix-style spread so layers get independent streams
        let seed = self
            .seed
            .wrapping_add((layer as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        (seed, ChaCha8Rng::seed_from_u64(seed))
    }
}

/// Per-layer sampling outcome; `{"layer":k,"samples":N,"witness_found":N,"seed":s}`.
#[derive(Debug, Clone, Serialize)]
pub struct LayerReport {
    pub layer: u32,
    pub samples: u32,
    pub witness_found: u32,
    pub seed: u64,
}

/// What a tight-series check ran against.
pub enum TightTarget<'a> {
    Semigroup(&'a BoundedSemigroup),
    Quotient(&'a ReesQuotient),
}

#[derive(Debug)]
pub struct TightSeriesReport {
    /// Description of the target, e.g. `OI_3(int)` or `OI_3(int)/I_1`.
    pub target: String,
    /// Size of the layer-0 ideal (the zero element, or the quotient zero).
    pub zero_ideal_size: u64,
    pub master_seed: u64,
    pub layers: Vec<LayerReport>,
}

impl TightSeriesReport {
    pub fn passed(&self) -> bool {
        self.layers.iter().all(|l| l.witness_found == l.samples)
    }
}

/// Samples (subject, probe set) pairs inside each rank layer of the target
/// and counts how many yield an escaping product.
///
/// For a quotient the layers above the collapsed ideal are sampled through
/// their unique preimages (the canonical map is injective there) and every
/// witness is re-checked against quotient multiplication; the layer-0 ideal
/// is the quotient zero.
pub fn tight_series_check(
    target: TightTarget<'_>,
    cfg: SampleConfig,
) -> Result<TightSeriesReport, SeriesError> {
    cfg.validate()?;
    let (sg, quotient, label) = match target {
        TightTarget::Semigroup(sg) => (*sg, None, format!("{sg}")),
        TightTarget::Quotient(q) => (
            *q.base(),
            Some(q),
            format!("{}/I_{}", q.base(), q.threshold()),
        ),
    };
    if sg.carrier() != Carrier::IntegerLine {
        return Err(SeriesError::NeedsIntegerLine);
    }
    let first_layer = quotient.map(|q| q.threshold() + 1).unwrap_or(1);

    let mut layers = Vec::new();
    for k in first_layer..=sg.max_rank() {
        let (seed, mut rng) = cfg.layer_rng(k);
        let mut witness_found = 0;
        for _ in 0..cfg.samples_per_layer {
            let subject = random_iso(&mut rng, k, cfg.window)?;
            let probes = random_distinct_isos(&mut rng, k, cfg.window, cfg.probe_count)?;
            let witness = omega_unstable_witness(&subject, &probes)?;
            let escaped = match quotient {
                None => witness.product_rank < k,
                Some(q) => {
                    // recompute through the quotient handle
                    let (x, y) = match witness.side {
                        ProductSide::AlphaBeta => (&subject, &witness.witness),
                        ProductSide::BetaAlpha => (&witness.witness, &subject),
                    };
                    match q.product(&q.project(x), &q.project(y)) {
                        QuotElem::Zero => true,
                        QuotElem::Iso(p) => p.rank() < k,
                    }
                }
            };
            if escaped {
                witness_found += 1;
            }
        }
        layers.push(LayerReport {
            layer: k,
            samples: cfg.samples_per_layer,
            witness_found,
            seed,
        });
    }
    Ok(TightSeriesReport {
        target: label,
        zero_ideal_size: 1,
        master_seed: cfg.seed,
        layers,
    })
}

// ---------------------------------------------------------------------------
// Exhaustive finite-chain kernel
// ---------------------------------------------------------------------------

#[derive(Debug)]
pub struct LayerEscape {
    pub layer: u32,
    pub subjects: usize,
    pub probe_sets: u64,
    pub failures: Vec<String>,
}

#[derive(Debug)]
pub struct LayerEscapeReport {
    pub layers: Vec<LayerEscape>,
}

impl LayerEscapeReport {
    pub fn passed(&self) -> bool {
        self.layers.iter().all(|l| l.failures.is_empty())
    }
}

/// Exhaustive escape check over a finite chain: for every subject in every
/// rank layer and every 2-element probe set from the same layer, some
/// product must leave the layer.
pub fn exhaustive_layer_escape(es: &EnumeratedSemigroup) -> LayerEscapeReport {
    let mut layers = Vec::new();
    for k in 1..=es.semigroup().effective_max_rank() {
        let range = es.layer_range(k);
        let layer: Vec<usize> = range.collect();
        let mut probe_sets = 0u64;
        let mut failures = Vec::new();
        for &s in &layer {
            let subject = es.element(s);
            for (pi, &i) in layer.iter().enumerate() {
                for &j in &layer[pi + 1..] {
                    probe_sets += 1;
                    let probes = [es.element(i).clone(), es.element(j).clone()];
                    match omega_unstable_witness(subject, &probes) {
                        Ok(_) => {}
                        Err(e) => failures.push(format!("subject {subject}: {e}")),
                    }
                }
            }
        }
        layers.push(LayerEscape {
            layer: k,
            subjects: layer.len(),
            probe_sets,
            failures,
        });
    }
    LayerEscapeReport { layers }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::EnumeratedSemigroup;

    fn iso(dom: &[Coord], ran: &[Coord]) -> PartialOrderIso {
        PartialOrderIso::new(dom.to_vec(), ran.to_vec()).unwrap()
    }

    #[test]
    fn rank_drop_examples() {
        let a = iso(&[1, 3], &[2, 4]);
        // dom β = {2,5} ≠ ran α = {2,4}: the product drops to rank 1
        let b = iso(&[2, 5], &[0, 9]);
        assert_eq!(a.compose(&b).rank(), 1);
        assert_eq!(rank_drop_law(&a, &b), Ok(true));

        // the unique non-dropping partner: the inverse
        let inv = iso(&[2, 4], &[1, 3]);
        assert_eq!(a.compose(&inv).rank(), 2);
        assert_eq!(rank_drop_law(&a, &inv), Ok(true), "vacuously true");

        // rank 1: any probe with a different domain annihilates
        let x = iso(&[5], &[7]);
        let y = iso(&[3], &[0]);
        assert!(x.compose(&y).is_zero());
        assert_eq!(rank_drop_law(&x, &y), Ok(true));

        assert!(matches!(
            rank_drop_law(&a, &x),
            Err(SeriesError::RankMismatch { expected: 2, found: 1 })
        ));
        assert!(matches!(
            rank_drop_law(&PartialOrderIso::zero(), &PartialOrderIso::zero()),
            Err(SeriesError::ZeroRank)
        ));
    }

    #[test]
    fn witness_example() {
        let a = iso(&[1, 3], &[2, 4]);
        let probes = vec![iso(&[2, 4], &[1, 3]), iso(&[2, 4], &[0, 1])];
        let w = omega_unstable_witness(&a, &probes).unwrap();
        assert_eq!(w.witness, iso(&[2, 4], &[0, 1]));
        assert_eq!(w.side, ProductSide::BetaAlpha);
        assert_eq!(w.product_rank, 1);
        assert_eq!(w.product, iso(&[2], &[1]));
    }

    #[test]
    fn witness_preconditions() {
        let a = iso(&[1, 3], &[2, 4]);
        assert!(matches!(
            omega_unstable_witness(&a, &[a.inverse()]),
            Err(SeriesError::ProbeSetTooSmall(1))
        ));
        assert!(matches!(
            omega_unstable_witness(&a, &[a.inverse(), a.inverse()]),
            Err(SeriesError::DuplicateProbes)
        ));
        assert!(matches!(
            omega_unstable_witness(&a, &[a.inverse(), iso(&[1], &[1])]),
            Err(SeriesError::RankMismatch { .. })
        ));
    }

    #[test]
    fn exhaustive_escape_on_small_chain() {
        let es = EnumeratedSemigroup::new(
            BoundedSemigroup::new(Carrier::FiniteChain(3), 1).unwrap(),
        )
        .unwrap();
        let report = exhaustive_layer_escape(&es);
        assert!(report.passed());
        assert_eq!(report.layers.len(), 1);
        assert_eq!(report.layers[0].subjects, 9);
        assert_eq!(report.layers[0].probe_sets, 9 * 36);
    }

    #[test]
    fn sampled_series_whole_and_quotient() {
        let sg = BoundedSemigroup::new(Carrier::IntegerLine, 3).unwrap();
        let cfg = SampleConfig {
            seed: 42,
            samples_per_layer: 25,
            probe_count: 3,
            window: Window::new(-20, 20).unwrap(),
        };
        let report = tight_series_check(TightTarget::Semigroup(&sg), cfg).unwrap();
        assert!(report.passed());
        assert_eq!(report.layers.len(), 3);
        assert_eq!(report.master_seed, 42);

        let q = ReesQuotient::new(sg, 1).unwrap();
        let qr = tight_series_check(TightTarget::Quotient(&q), cfg).unwrap();
        assert!(qr.passed());
        assert_eq!(qr.layers.len(), 2);
        assert_eq!(qr.layers[0].layer, 2);

        // identical seeds reproduce identical reports
        let again = tight_series_check(TightTarget::Semigroup(&sg), cfg).unwrap();
        for (x, y) in report.layers.iter().zip(&again.layers) {
            assert_eq!(x.seed, y.seed);
            assert_eq!(x.witness_found, y.witness_found);
        }
    }

    #[test]
    fn sampling_rejects_bad_configs() {
        let sg = BoundedSemigroup::new(Carrier::IntegerLine, 2).unwrap();
        let window = Window::new(-5, 5).unwrap();
        let empty = SampleConfig {
            seed: 0,
            samples_per_layer: 0,
            probe_count: 2,
            window,
        };
        assert!(matches!(
            tight_series_check(TightTarget::Semigroup(&sg), empty),
            Err(SeriesError::EmptyConfig(_))
        ));
        let tiny_probes = SampleConfig {
            probe_count: 1,
            samples_per_layer: 5,
            ..empty
        };
        assert!(matches!(
            tight_series_check(TightTarget::Semigroup(&sg), tiny_probes),
            Err(SeriesError::EmptyConfig(_))
        ));
        let finite = BoundedSemigroup::new(Carrier::FiniteChain(4), 2).unwrap();
        let ok = SampleConfig {
            samples_per_layer: 5,
            probe_count: 2,
            ..empty
        };
        assert!(matches!(
            tight_series_check(TightTarget::Semigroup(&finite), ok),
            Err(SeriesError::NeedsIntegerLine)
        ));
    }

    #[test]
    fn random_iso_respects_window_and_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let window = Window::new(-50, 50).unwrap();
        for k in 1..=5 {
            let e = random_iso(&mut rng, k, window).unwrap();
            assert_eq!(e.rank(), k);
            assert!(e.dom().iter().chain(e.ran()).all(|&p| window.contains(p)));
        }
        let tiny = Window::new(0, 1).unwrap();
        assert!(matches!(
            random_iso(&mut rng, 5, tiny),
            Err(SeriesError::WindowTooSmall(_, 5))
        ));
    }
}

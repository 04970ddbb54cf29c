//! The recursive adversarial partial NNR tour on G_k and its certification.
//!
//! G_{k+1} is laid out as a left copy of G_k in columns `0..c(k)`, a 2 x 3
//! separating grid in columns `c(k)..c(k)+3`, and a right copy in columns
//! `c(k)+3..c(k+1)`, where `c(k) = 8·2^k − 3`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{family_columns, generate_gk, grid_index, Instance, MAX_K};
use crate::metric::{Length, MetricKind};
use crate::nnr::{tour_length, validate_nnr, TourPath, ValidationMode, Verdict};

/// The base tour on G_0 as grid coordinates, from `l_0 = (0,0)` to `m_0 = (2,1)`.
pub const BASE_TOUR_G0: [(usize, usize); 10] = [
    (0, 0),
    (0, 1),
    (1, 1),
    (1, 0),
    (2, 0),
    (3, 0),
    (4, 0),
    (4, 1),
    (3, 1),
    (2, 1),
];

/// `(12 + 4k)·2^k − 3`, the open length of the adversarial tour on G_k.
pub fn predicted_length(k: u32) -> i64 {
    (12 + 4 * i64::from(k)) * (1i64 << k) - 3
}

/// `2·L(k) + 5 + (8·2^k − 2)`: two sub-tours, five unit edges and two jumps.
pub fn recurrence_step(k: u32) -> i64 {
    2 * predicted_length(k) + 5 + 2 * jump_length(k)
}

/// Length of each of the two long jumps added at level `k`, `4·2^k − 1`.
pub fn jump_length(k: u32) -> i64 {
    4 * (1i64 << k) - 1
}

/// Grid coordinates of the adversarial tour on G_k.
pub fn adversarial_coords(k: u32) -> Vec<(usize, usize)> {
    let mut tour = BASE_TOUR_G0.to_vec();
    for level in 0..k {
        let c = family_columns(level);
        let mut next = Vec::with_capacity(2 * tour.len() + 6);
        next.extend_from_slice(&tour);
        next.extend_from_slice(&[(c, 1), (c, 0), (c + 1, 0), (c + 2, 0)]);
        next.extend(tour.iter().map(|&(x, y)| (x + c + 3, y)));
        next.extend_from_slice(&[(c + 2, 1), (c + 1, 1)]);
        tour = next;
    }
    tour
}

pub fn base_tour_g0() -> TourPath {
    coords_to_tour(&BASE_TOUR_G0, family_columns(0))
}

fn coords_to_tour(coords: &[(usize, usize)], cols: usize) -> TourPath {
    TourPath::open(coords.iter().map(|&(x, y)| grid_index(cols, x, y)).collect())
        .expect("construction never repeats a city")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstructionRecord {
    pub k: u32,
    /// Open tour as indices into G_k.
    pub tour: TourPath,
    pub predicted_length: i64,
    /// Indices of `l_k` and `m_k`.
    pub endpoints: (usize, usize),
}

pub fn build_adversarial_tour(k: u32) -> Result<ConstructionRecord> {
    if k > MAX_K {
        return Err(Error::InvalidK(i64::from(k)));
    }
    let cols = family_columns(k);
    Ok(ConstructionRecord {
        k,
        tour: coords_to_tour(&adversarial_coords(k), cols),
        predicted_length: predicted_length(k),
        endpoints: (grid_index(cols, 0, 0), grid_index(cols, (cols - 1) / 2, 1)),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn pass(detail: impl Into<String>) -> Self {
        Self {
            passed: true,
            detail: detail.into(),
        }
    }

    fn fail(detail: impl Into<String>) -> Self {
        Self {
            passed: false,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificationReport {
    pub k: Option<u32>,
    #[serde(serialize_with = "serialize_display")]
    pub metric: MetricKind,
    /// (a) the tour visits every city exactly once.
    pub permutation: Check,
    /// (b) it starts at `l_k` and ends at `m_k`.
    pub endpoints: Check,
    /// (c) its open length equals the closed form exactly.
    pub length: Check,
    #[serde(skip)]
    pub measured_length: Length,
    pub predicted_length: i64,
    /// (d) it is a weak NNR tour of the ambient instance.
    pub nnr: Verdict,
}

fn serialize_display<S: serde::Serializer>(v: &MetricKind, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl CertificationReport {
    pub fn passed(&self) -> bool {
        self.permutation.passed && self.endpoints.passed && self.length.passed && self.nnr.valid
    }

    /// Letters of the failed sub-checks, e.g. `"cd"`.
    pub fn failed_checks(&self) -> String {
        [
            ('a', self.permutation.passed),
            ('b', self.endpoints.passed),
            ('c', self.length.passed),
            ('d', self.nnr.valid),
        ]
        .iter()
        .filter(|(_, ok)| !ok)
        .map(|(c, _)| *c)
        .collect()
    }
}

/// Builds the adversarial tour for G_k and certifies it under `metric`.
pub fn certify_lemma(k: u32, metric: MetricKind) -> Result<CertificationReport> {
    let instance = generate_gk(k, metric)?;
    let record = build_adversarial_tour(k)?;
    certify_tour(&instance, &record.tour, record.predicted_length)
}

/// Certifies an arbitrary open tour against the instance landmarks and an
/// expected open length.
pub fn certify_tour(instance: &Instance, tour: &TourPath, predicted: i64) -> Result<CertificationReport> {
    let n = instance.len();
    let mut seen = vec![false; n];
    for &c in tour.order() {
        *seen.get_mut(c).ok_or(Error::CityIndex { index: c, n })? = true;
    }
    let permutation = match seen.iter().position(|s| !s) {
        Some(missing) => Check::fail(format!("city {missing} is never visited")),
        None => Check::pass(format!("visits all {n} cities once")),
    };

    let (l, m) = (instance.landmark_l(), instance.landmark_m());
    let endpoints = match (tour.first(), tour.last()) {
        (Some(a), Some(b)) if a == l && b == m => Check::pass(format!("starts at l = {l}, ends at m = {m}")),
        (a, b) => Check::fail(format!("runs {a:?} -> {b:?}, expected {l} -> {m}")),
    };

    let measured = tour_length(instance, tour);
    let scaled_prediction = predicted * instance.scale();
    let length = match measured.exact {
        Some(e) if e == scaled_prediction => Check::pass(format!("length {predicted}")),
        Some(_) => Check::fail(format!("length {} != {predicted}", measured.approx)),
        None => Check::fail(format!("length {} is not an exact integer", measured.approx)),
    };

    let nnr = validate_nnr(instance, tour, ValidationMode::Weak)?;

    Ok(CertificationReport {
        k: instance.family_k(),
        metric: instance.metric_kind(),
        permutation,
        endpoints,
        length,
        measured_length: measured,
        predicted_length: predicted,
        nnr,
    })
}

//! Instances: the G_k family of 2 x (8·2^k − 3) grids and general 2 x m grids.
//!
//! Cities are indexed row-major: the bottom row `y = 0` holds indices
//! `0..cols`, the top row `y = 1` holds `cols..2·cols`.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::{build_unit_graph, GraphicMetric};
use crate::metric::{lp_distance_unchecked, DistanceValue, MetricKind, MetricSpec, ScaledPoint};

/// Largest supported family parameter. G_24 already has ~268 million cities.
pub const MAX_K: u32 = 24;

/// Number of grid columns of G_k, `8·2^k − 3`.
pub fn family_columns(k: u32) -> usize {
    8 * (1usize << k) - 3
}

/// Number of cities of G_k, `16·2^k − 6`.
pub fn family_size(k: u32) -> usize {
    2 * family_columns(k)
}

/// Row-major index of grid point `(x, y)` in a grid with `cols` columns.
pub fn grid_index(cols: usize, x: usize, y: usize) -> usize {
    y * cols + x
}

#[derive(Clone, Debug)]
pub struct Instance {
    name: String,
    cities: Vec<ScaledPoint>,
    scale: i64,
    metric: MetricSpec,
    landmark_l: usize,
    landmark_m: usize,
    family_k: Option<u32>,
}

impl Instance {
    /// Validates and assembles an instance. Cities must be pairwise distinct
    /// and landmarks must be valid indices.
    pub fn new(
        name: impl Into<String>,
        cities: Vec<ScaledPoint>,
        scale: i64,
        metric: MetricSpec,
        landmark_l: usize,
        landmark_m: usize,
        family_k: Option<u32>,
    ) -> Result<Self> {
        if scale < 1 {
            return Err(Error::InvalidScale(scale));
        }
        if cities.is_empty() {
            return Err(Error::EmptyInstance);
        }
        let n = cities.len();
        for index in [landmark_l, landmark_m] {
            if index >= n {
                return Err(Error::CityIndex { index, n });
            }
        }
        let mut seen = HashMap::with_capacity(n);
        for (i, p) in cities.iter().enumerate() {
            if let Some(first) = seen.insert(*p, i) {
                return Err(Error::DuplicateCity { first, second: i });
            }
        }
        if let MetricSpec::Graphic(g) = &metric {
            if scale != 1 {
                return Err(Error::GraphicNeedsUnitScale(scale));
            }
            if g.graph().len() != n {
                return Err(Error::CityIndex {
                    index: g.graph().len(),
                    n,
                });
            }
        }
        Ok(Self {
            name: name.into(),
            cities,
            scale,
            metric,
            landmark_l,
            landmark_m,
            family_k,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn cities(&self) -> &[ScaledPoint] {
        &self.cities
    }

    pub fn city(&self, i: usize) -> ScaledPoint {
        self.cities[i]
    }

    pub fn len(&self) -> usize {
        self.cities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cities.is_empty()
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    pub fn metric(&self) -> &MetricSpec {
        &self.metric
    }

    pub fn metric_kind(&self) -> MetricKind {
        self.metric.kind()
    }

    pub fn landmark_l(&self) -> usize {
        self.landmark_l
    }

    pub fn landmark_m(&self) -> usize {
        self.landmark_m
    }

    pub fn family_k(&self) -> Option<u32> {
        self.family_k
    }

    /// True coordinates `(x / S, y / S)`.
    pub fn true_coords(&self, i: usize) -> (f64, f64) {
        let p = self.cities[i];
        let s = self.scale as f64;
        (p.x as f64 / s, p.y as f64 / s)
    }

    /// Distance between cities `i` and `j` under the instance metric.
    pub fn distance(&self, i: usize, j: usize) -> DistanceValue {
        match &self.metric {
            MetricSpec::Lp(p) => lp_distance_unchecked(*p, self.cities[i], self.cities[j], self.scale),
            MetricSpec::Graphic(g) => g.distance(i, j),
        }
    }

    /// Same cities and landmarks under another metric.
    pub fn with_metric(&self, kind: MetricKind) -> Result<Self> {
        let metric = materialize(kind, &self.cities, self.scale)?;
        Self::new(
            self.name.clone(),
            self.cities.clone(),
            self.scale,
            metric,
            self.landmark_l,
            self.landmark_m,
            self.family_k,
        )
    }

    /// Same metric, landmarks and family tag over new coordinates.
    pub(crate) fn with_cities(&self, cities: Vec<ScaledPoint>, scale: i64) -> Result<Self> {
        let metric = materialize(self.metric_kind(), &cities, scale)?;
        Self::new(
            self.name.clone(),
            cities,
            scale,
            metric,
            self.landmark_l,
            self.landmark_m,
            self.family_k,
        )
    }

    /// Number of columns if this is a full 2 x m grid at unit spacing, in
    /// the row-major order produced by [`generate_grid`].
    pub fn grid_columns(&self) -> Option<usize> {
        let n = self.len();
        if n < 4 || !n.is_multiple_of(2) {
            return None;
        }
        let cols = n / 2;
        let s = self.scale;
        self.cities
            .iter()
            .enumerate()
            .all(|(i, p)| p.x == (i % cols) as i64 * s && p.y == (i / cols) as i64 * s)
            .then_some(cols)
    }
}

/// Builds the metric data for `kind` over the given points.
pub fn materialize(kind: MetricKind, cities: &[ScaledPoint], scale: i64) -> Result<MetricSpec> {
    match kind {
        MetricKind::Lp(p) => Ok(MetricSpec::Lp(p)),
        MetricKind::Graphic => {
            let graph = build_unit_graph(cities, scale)?;
            Ok(MetricSpec::Graphic(Arc::new(GraphicMetric::new(graph)?)))
        }
    }
}

fn grid_points(cols: usize) -> Vec<ScaledPoint> {
    (0..2i64)
        .flat_map(|y| (0..cols as i64).map(move |x| ScaledPoint::new(x, y)))
        .collect()
}

fn grid_instance(name: String, cols: usize, kind: MetricKind, family_k: Option<u32>) -> Result<Instance> {
    let cities = grid_points(cols);
    let metric = materialize(kind, &cities, 1)?;
    let l = grid_index(cols, 0, 0);
    let m = grid_index(cols, (cols - 1) / 2, 1);
    Instance::new(name, cities, 1, metric, l, m, family_k)
}

/// The 2 x cols grid. Landmark l is the lower-left city, m the top-middle
/// city (rounding down for even column counts).
pub fn generate_grid(cols: usize, kind: MetricKind) -> Result<Instance> {
    if cols < 2 {
        return Err(Error::GridTooSmall(cols));
    }
    grid_instance(format!("grid2x{cols}"), cols, kind, None)
}

/// The hard instance G_k with `16·2^k − 6` cities.
pub fn generate_gk(k: u32, kind: MetricKind) -> Result<Instance> {
    if k > MAX_K {
        return Err(Error::InvalidK(i64::from(k)));
    }
    grid_instance(format!("G{k}"), family_columns(k), kind, Some(k))
}

//! The nearest neighbor rule: an executor with explicit tie-breaking, and an
//! independent validator that certifies a given (partial) tour.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::metric::{compare_unchecked, DistanceValue, Length};

/// An ordered sequence of distinct city indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TourPath {
    order: Vec<usize>,
    closed: bool,
}

impl TourPath {
    pub fn new(order: Vec<usize>, closed: bool) -> Result<Self> {
        let max = order.iter().copied().max().map_or(0, |m| m + 1);
        let mut seen = vec![false; max];
        for &c in &order {
            if std::mem::replace(&mut seen[c], true) {
                return Err(Error::RepeatedCity(c));
            }
        }
        Ok(Self { order, closed })
    }

    pub fn open(order: Vec<usize>) -> Result<Self> {
        Self::new(order, false)
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn first(&self) -> Option<usize> {
        self.order.first().copied()
    }

    pub fn last(&self) -> Option<usize> {
        self.order.last().copied()
    }

    /// The same tour with the cities at positions `i` and `j` exchanged.
    pub fn swapped(&self, i: usize, j: usize) -> Self {
        let mut order = self.order.clone();
        order.swap(i, j);
        Self {
            order,
            closed: self.closed,
        }
    }

    /// Edges in visiting order, including the closing edge of a closed tour.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let closing = (self.closed && self.order.len() > 1).then(|| (self.order[self.order.len() - 1], self.order[0]));
        self.order.windows(2).map(|w| (w[0], w[1])).chain(closing)
    }

    fn check_in(&self, instance: &Instance) -> Result<()> {
        let n = instance.len();
        match self.order.iter().find(|&&c| c >= n) {
            Some(&index) => Err(Error::CityIndex { index, n }),
            None => Ok(()),
        }
    }
}

/// Total length of a tour, including its closing edge when closed.
pub fn tour_length(instance: &Instance, tour: &TourPath) -> Length {
    let mut len = Length::zero(instance.scale());
    for (a, b) in tour.edges() {
        len.add(&instance.distance(a, b));
    }
    len
}

/// Closes a tour that covers every city and returns it with its total length.
pub fn close_tour(instance: &Instance, open_tour: &TourPath) -> Result<(TourPath, Length)> {
    open_tour.check_in(instance)?;
    if open_tour.len() != instance.len() {
        return Err(Error::IncompleteTour {
            visited: open_tour.len(),
            n: instance.len(),
        });
    }
    let closed = TourPath {
        order: open_tour.order.clone(),
        closed: true,
    };
    let len = tour_length(instance, &closed);
    Ok((closed, len))
}

/// How the executor picks among equally near unvisited cities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TieBreakPolicy {
    /// Smallest `(x, y)`.
    Lexicographic,
    /// Smallest city index.
    IndexOrder,
    /// Follow a prescribed tour; fail if it ever leaves the tie set.
    Adversarial(TourPath),
}

impl TieBreakPolicy {
    pub fn name(&self) -> &'static str {
        match self {
            TieBreakPolicy::Lexicographic => "lexicographic",
            TieBreakPolicy::IndexOrder => "index",
            TieBreakPolicy::Adversarial(_) => "adversarial",
        }
    }
}

impl fmt::Display for TieBreakPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NnrStep {
    pub from: usize,
    pub chosen: usize,
    pub distance: DistanceValue,
    /// Every unvisited city at minimum distance from `from`, ascending.
    pub tie_set: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct NnrTrace {
    pub steps: Vec<NnrStep>,
}

/// Runs the nearest neighbor rule from `start` over every city.
pub fn run_nnr(instance: &Instance, start: usize, policy: &TieBreakPolicy) -> Result<(TourPath, NnrTrace)> {
    let n = instance.len();
    if start >= n {
        return Err(Error::CityIndex { index: start, n });
    }
    if let TieBreakPolicy::Adversarial(target) = policy {
        target.check_in(instance)?;
        if target.first() != Some(start) {
            return Err(Error::TargetStart {
                start,
                found: target.first(),
            });
        }
        if target.len() != n {
            return Err(Error::IncompleteTour {
                visited: target.len(),
                n,
            });
        }
    }

    let mut unvisited: Vec<usize> = (0..n).filter(|&c| c != start).collect();
    let mut order = Vec::with_capacity(n);
    order.push(start);
    let mut trace = NnrTrace::default();
    let mut tie_positions = Vec::new();

    while !unvisited.is_empty() {
        let from = order[order.len() - 1];
        let mut best: Option<DistanceValue> = None;
        tie_positions.clear();
        for (pos, &c) in unvisited.iter().enumerate() {
            let d = instance.distance(from, c);
            match best.as_ref().map(|b| compare_unchecked(&d, b)) {
                None | Some(Ordering::Less) => {
                    best = Some(d);
                    tie_positions.clear();
                    tie_positions.push(pos);
                }
                Some(Ordering::Equal) => tie_positions.push(pos),
                Some(Ordering::Greater) => {}
            }
        }

        let step = order.len();
        let pick = match policy {
            TieBreakPolicy::IndexOrder => tie_positions.iter().copied().min_by_key(|&p| unvisited[p]),
            TieBreakPolicy::Lexicographic => tie_positions
                .iter()
                .copied()
                .min_by_key(|&p| instance.city(unvisited[p])),
            TieBreakPolicy::Adversarial(target) => {
                let want = target.order()[step];
                tie_positions.iter().copied().find(|&p| unvisited[p] == want)
            }
        };
        let mut tie_set: Vec<usize> = tie_positions.iter().map(|&p| unvisited[p]).collect();
        tie_set.sort_unstable();
        let Some(pos) = pick else {
            let TieBreakPolicy::Adversarial(target) = policy else {
                unreachable!("tie set is never empty");
            };
            return Err(Error::AdversarialTargetIllegal {
                step,
                target: target.order()[step],
                tie_set,
            });
        };
        let chosen = unvisited.swap_remove(pos);
        trace.steps.push(NnrStep {
            from,
            chosen,
            distance: instance.distance(from, chosen),
            tie_set,
        });
        order.push(chosen);
    }

    Ok((TourPath { order, closed: false }, trace))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ValidationMode {
    /// Every step goes to some nearest unvisited city.
    Weak,
    /// Every step goes to the unique nearest unvisited city.
    Strict,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepFailure {
    /// 1-based: step `s` moves from position `s - 1` to position `s`.
    pub step: usize,
    pub from: usize,
    pub chosen: usize,
    pub chosen_distance: f64,
    pub min_distance: f64,
    pub tie_set: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TieRecord {
    pub step: usize,
    pub from: usize,
    pub tie_set: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub mode: ValidationMode,
    pub valid: bool,
    pub steps_checked: usize,
    pub failure: Option<StepFailure>,
    /// Steps whose minimum was attained by more than one unvisited city.
    pub ties: Vec<TieRecord>,
}

/// Checks that `tour` is a (partial) NNR tour of the whole instance: at each
/// step the argmin over all not-yet-visited cities is recomputed from scratch.
pub fn validate_nnr(instance: &Instance, tour: &TourPath, mode: ValidationMode) -> Result<Verdict> {
    tour.check_in(instance)?;
    let n = instance.len();
    let order = tour.order();
    let mut visited = vec![false; n];
    if let Some(&first) = order.first() {
        visited[first] = true;
    }
    let mut ties = Vec::new();

    for step in 1..order.len() {
        let (from, chosen) = (order[step - 1], order[step]);

        let mut min: Option<DistanceValue> = None;
        for c in (0..n).filter(|&c| !visited[c]) {
            let d = instance.distance(from, c);
            if min.as_ref().is_none_or(|m| compare_unchecked(&d, m) == Ordering::Less) {
                min = Some(d);
            }
        }
        let min = min.expect("an unvisited city remains while steps remain");
        let tie_set: Vec<usize> = (0..n)
            .filter(|&c| !visited[c] && compare_unchecked(&instance.distance(from, c), &min) == Ordering::Equal)
            .collect();

        let chosen_distance = instance.distance(from, chosen);
        let ok = match mode {
            ValidationMode::Weak => compare_unchecked(&chosen_distance, &min) == Ordering::Equal,
            ValidationMode::Strict => tie_set == [chosen],
        };
        if tie_set.len() > 1 {
            ties.push(TieRecord {
                step,
                from,
                tie_set: tie_set.clone(),
            });
        }
        if !ok {
            return Ok(Verdict {
                mode,
                valid: false,
                steps_checked: step,
                failure: Some(StepFailure {
                    step,
                    from,
                    chosen,
                    chosen_distance: chosen_distance.approx,
                    min_distance: min.approx,
                    tie_set,
                }),
                ties,
            });
        }
        visited[chosen] = true;
    }

    Ok(Verdict {
        mode,
        valid: true,
        steps_checked: order.len().saturating_sub(1),
        failure: None,
        ties,
    })
}

/// Writes a tour in the interchange format: `OPEN` or `CLOSED`, then one
/// city index per line.
pub fn format_tour(tour: &TourPath) -> String {
    let mut out = String::from(if tour.is_closed() { "CLOSED\n" } else { "OPEN\n" });
    for c in tour.order() {
        out.push_str(&c.to_string());
        out.push('\n');
    }
    out
}

/// Parses the interchange format. `#` starts a comment; blank lines are
/// ignored.
pub fn parse_tour(text: &str) -> Result<TourPath> {
    let mut closed = None;
    let mut order = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match closed {
            None => {
                closed = Some(match line {
                    "OPEN" => false,
                    "CLOSED" => true,
                    other => {
                        return Err(Error::parse(i + 1, format!("expected OPEN or CLOSED, found `{other}`")));
                    }
                })
            }
            Some(_) => order.push(
                line.parse::<usize>()
                    .map_err(|e| Error::parse(i + 1, format!("bad city index `{line}`: {e}")))?,
            ),
        }
    }
    let closed = closed.ok_or_else(|| Error::parse(0, "missing OPEN/CLOSED header"))?;
    TourPath::new(order, closed)
}

//! Moving cities by small lattice offsets so that a prescribed NNR tour
//! becomes the unique one.
//!
//! The instance is refined to scale `S >= 16n` and every city may move by at
//! most `(S - 1) / (16n)` lattice units per coordinate. That is too little to
//! reorder any two distances that differed before refinement, so only ties
//! are resolved.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::construction::build_adversarial_tour;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::metric::{MetricKind, ScaledPoint};
use crate::nnr::{validate_nnr, TourPath, ValidationMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PerturbScheme {
    /// Refine the lattice only.
    None,
    /// Nudge cities until the adversarial tour is the unique NNR tour.
    Strictify,
}

impl fmt::Display for PerturbScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PerturbScheme::None => "none",
            PerturbScheme::Strictify => "strictify",
        })
    }
}

impl FromStr for PerturbScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(PerturbScheme::None),
            "strictify" => Ok(PerturbScheme::Strictify),
            other => Err(Error::parse(0, format!("unknown perturbation scheme `{other}`"))),
        }
    }
}

/// Largest per-coordinate offset `o` with `16·n·o < scale`.
pub fn max_offset(scale: i64, n: usize) -> i64 {
    (scale - 1) / (16 * n as i64)
}

/// Refines `instance` to `new_scale`; with [`PerturbScheme::Strictify`] also
/// makes the adversarial tour of its family parameter strictly valid.
pub fn perturb(instance: &Instance, scheme: PerturbScheme, new_scale: i64, seed: u64) -> Result<Instance> {
    match scheme {
        PerturbScheme::None => {
            check_preconditions(instance, new_scale)?;
            instance.with_cities(refined(instance, new_scale), new_scale)
        }
        PerturbScheme::Strictify => {
            let k = instance.family_k().ok_or(Error::MissingFamily)?;
            let target = build_adversarial_tour(k)?.tour;
            strictify(instance, &target, new_scale, seed)
        }
    }
}

fn check_preconditions(instance: &Instance, new_scale: i64) -> Result<()> {
    if instance.scale() != 1 {
        return Err(Error::PerturbNeedsUnitScale(instance.scale()));
    }
    if instance.metric_kind() == MetricKind::Graphic {
        return Err(Error::PerturbGraphic);
    }
    let min = 16 * instance.len() as i64;
    if new_scale < min {
        return Err(Error::PerturbScaleTooSmall { scale: new_scale, min });
    }
    Ok(())
}

fn refined(instance: &Instance, scale: i64) -> Vec<ScaledPoint> {
    instance
        .cities()
        .iter()
        .map(|p| ScaledPoint::new(p.x * scale, p.y * scale))
        .collect()
}

/// Searches for offsets under which `target` passes strict validation.
///
/// Failures are processed front to back: the intended city is moved one
/// lattice unit toward its predecessor; if it is pinned at the offset bound,
/// a competing tied city is moved one unit away instead. Every nudge is
/// followed by a full re-validation. The search gives up after `64·n` nudges.
pub fn strictify(instance: &Instance, target: &TourPath, new_scale: i64, seed: u64) -> Result<Instance> {
    check_preconditions(instance, new_scale)?;
    let n = instance.len();
    let bound = max_offset(new_scale, n);
    let base = refined(instance, new_scale);
    let mut offsets = vec![(0i64, 0i64); n];
    let budget = 64 * n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    for nudges in 0..=budget {
        let cities: Vec<ScaledPoint> = base
            .iter()
            .zip(&offsets)
            .map(|(p, o)| ScaledPoint::new(p.x + o.0, p.y + o.1))
            .collect();
        let candidate = instance.with_cities(cities.clone(), new_scale)?;
        let verdict = validate_nnr(&candidate, target, ValidationMode::Strict)?;
        let Some(failure) = verdict.failure else {
            return Ok(candidate);
        };
        let stuck = || Error::StrictifyFailed {
            budget,
            step: failure.step,
            tie_set: failure.tie_set.clone(),
        };
        if nudges == budget {
            return Err(stuck());
        }

        let pred = cities[failure.from];
        if nudge(&mut offsets[failure.chosen], cities[failure.chosen], pred, bound, 1) {
            continue;
        }
        let mut rivals: Vec<usize> = failure.tie_set.iter().copied().filter(|&c| c != failure.chosen).collect();
        rivals.shuffle(&mut rng);
        if !rivals
            .into_iter()
            .any(|c| nudge(&mut offsets[c], cities[c], pred, bound, -1))
        {
            return Err(stuck());
        }
    }
    unreachable!("loop returns by the last iteration")
}

/// Moves `offset` one unit toward (`direction = 1`) or away from
/// (`direction = -1`) `anchor`, preferring the axis with the larger gap.
/// Returns false if every candidate move would leave the offset bound.
fn nudge(offset: &mut (i64, i64), at: ScaledPoint, anchor: ScaledPoint, bound: i64, direction: i64) -> bool {
    let (gx, gy) = (anchor.x - at.x, anchor.y - at.y);
    let mut moves = [(gx.signum() * direction, 0), (0, gy.signum() * direction)];
    if gy.abs() > gx.abs() {
        moves.swap(0, 1);
    }
    for (mx, my) in moves {
        if (mx, my) == (0, 0) {
            continue;
        }
        let next = (offset.0 + mx, offset.1 + my);
        if next.0.abs() <= bound && next.1.abs() <= bound {
            *offset = next;
            return true;
        }
    }
    false
}

//! Runs NNR from many start cities under several tie-breaking policies.

use rayon::prelude::*;

use crate::error::Result;
use crate::instance::Instance;
use crate::metric::Length;
use crate::nnr::{close_tour, run_nnr, tour_length, validate_nnr, TieBreakPolicy, ValidationMode};
use crate::optimum::reference_optimum;

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub start: usize,
    pub policy: &'static str,
    pub open_length: Length,
    pub closed_length: Length,
    pub optimum: Option<Length>,
    pub ratio_open: Option<f64>,
    pub ratio_closed: Option<f64>,
    pub weak_valid: bool,
}

/// One row per `(start, policy)`, start-major in the given orders. `None`
/// sweeps every city. Adversarial policies only run from their target's
/// first city; other starts are skipped for them.
pub fn start_sweep(instance: &Instance, policies: &[TieBreakPolicy], starts: Option<&[usize]>) -> Result<Vec<SweepRow>> {
    let all: Vec<usize>;
    let starts = match starts {
        Some(s) => s,
        None => {
            all = (0..instance.len()).collect();
            &all
        }
    };
    let optimum = reference_optimum(instance);
    let cells: Vec<(usize, &TieBreakPolicy)> = starts
        .iter()
        .flat_map(|&s| policies.iter().map(move |p| (s, p)))
        .filter(|(s, p)| match p {
            TieBreakPolicy::Adversarial(target) => target.first() == Some(*s),
            _ => true,
        })
        .collect();

    cells
        .par_iter()
        .map(|&(start, policy)| {
            let (tour, _) = run_nnr(instance, start, policy)?;
            let weak_valid = validate_nnr(instance, &tour, ValidationMode::Weak)?.valid;
            let open_length = tour_length(instance, &tour);
            let (_, closed_length) = close_tour(instance, &tour)?;
            let ratio = |len: &Length| optimum.filter(|o| o.approx > 0.0).map(|o| len.approx / o.approx);
            Ok(SweepRow {
                start,
                policy: policy.name(),
                ratio_open: ratio(&open_length),
                ratio_closed: ratio(&closed_length),
                open_length,
                closed_length,
                optimum,
                weak_valid,
            })
        })
        .collect()
}

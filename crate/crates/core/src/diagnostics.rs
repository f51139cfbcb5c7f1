//! Limit prediction from a declared spectrum, plateau ("pseudo-convergence")
//! detection on traces, and work accounting.

use crate::error::{Error, Result};
use crate::iteration::{IterationTrace, Phase, StepRecord};
use crate::spectrum::SpectrumSpec;

const SHIFT_COLLISION: f64 = 1e-12;
const TIE_TOLERANCE: f64 = 1e-12;

/// Which simultaneous eigenstate the extended method converges to for a shift.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergencePrediction {
    /// 0-based index into the spectrum's pairs.
    pub winner_index: usize,
    /// `|ε_i / (σ_i − μ)|` per state.
    pub factors: Vec<f64>,
    /// Runner-up factor over winner factor; 1 for a tie.
    pub rate_ratio: f64,
    /// Every index whose factor ties the maximum (just the winner when unique).
    pub tied_indices: Vec<usize>,
}

impl ConvergencePrediction {
    pub fn is_degenerate(&self) -> bool {
        self.tied_indices.len() > 1
    }
}

/// Per-step coefficient factors `|ε_i/(σ_i − μ)|` and their argmax.
pub fn predict_limit(spec: &SpectrumSpec, mu: f64) -> Result<ConvergencePrediction> {
    if spec.pairs.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    let mut factors = Vec::with_capacity(spec.dim());
    for (index, &(e, sigma)) in spec.pairs.iter().enumerate() {
        let gap = sigma - mu;
        if gap.abs() <= SHIFT_COLLISION {
            return Err(Error::SingularShift { index, sigma, mu });
        }
        factors.push((e / gap).abs());
    }
    let max = factors.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let tied_indices: Vec<usize> = factors
        .iter()
        .enumerate()
        .filter(|(_, f)| **f >= max - TIE_TOLERANCE * max)
        .map(|(i, _)| i)
        .collect();
    let winner_index = tied_indices[0];
    let rate_ratio = if tied_indices.len() > 1 {
        1.0
    } else {
        let runner_up = factors
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != winner_index)
            .map(|(_, f)| *f)
            .fold(0.0, f64::max);
        runner_up / max
    };
    Ok(ConvergencePrediction {
        winner_index,
        factors,
        rate_ratio,
        tied_indices,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateauCriterion {
    pub window: usize,
    pub value_eps: f64,
    pub residual_floor: f64,
}

impl Default for PlateauCriterion {
    fn default() -> Self {
        Self {
            window: 5,
            value_eps: 1e-3,
            residual_floor: 1e-2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PseudoConvergenceReport {
    /// Inclusive `(start_step, end_step)` ranges of full-step indices.
    pub flagged_windows: Vec<(usize, usize)>,
    pub criterion: PlateauCriterion,
}

/// Flags stretches of at least `window` consecutive records whose
/// eigenvalue estimate drifts by at most `value_eps` while the residual stays
/// at or above `residual_floor`. Overlapping stretches are merged.
///
/// Power-half records are scanned when the trace has any; otherwise every
/// non-start record.
pub fn detect_pseudo_convergence(
    trace: &IterationTrace,
    window: usize,
    value_eps: f64,
    residual_floor: f64,
) -> Result<PseudoConvergenceReport> {
    let criterion = PlateauCriterion {
        window,
        value_eps,
        residual_floor,
    };
    if window < 2 {
        return Err(Error::InvalidConfig(format!(
            "plateau window must be at least 2, got {window}"
        )));
    }
    let has_power = trace.records.iter().any(|r| r.phase == Phase::Power);
    let series: Vec<&StepRecord> = trace
        .records
        .iter()
        .filter(|r| {
            if has_power {
                r.phase == Phase::Power
            } else {
                true
            }
        })
        .collect();
    let mut flagged: Vec<(usize, usize)> = Vec::new();
    if series.len() >= window {
        for w in series.windows(window) {
            let (lo, hi) = w
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                    (lo.min(r.e_estimate), hi.max(r.e_estimate))
                });
            let plateau = hi - lo <= value_eps && w.iter().all(|r| r.h_residual >= residual_floor);
            if !plateau {
                continue;
            }
            let (a, b) = (w[0].full_step, w[window - 1].full_step);
            match flagged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => flagged.push((a, b)),
            }
        }
    }
    Ok(PseudoConvergenceReport {
        flagged_windows: flagged,
        criterion,
    })
}

/// [`detect_pseudo_convergence`] with the default criterion.
pub fn detect_pseudo_convergence_default(
    trace: &IterationTrace,
) -> Result<PseudoConvergenceReport> {
    let c = PlateauCriterion::default();
    detect_pseudo_convergence(trace, c.window, c.value_eps, c.residual_floor)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CostSummary {
    pub matvecs: usize,
    pub solves: usize,
    pub full_steps: usize,
}

pub fn cost_summary(trace: &IterationTrace) -> CostSummary {
    let last = trace.last();
    CostSummary {
        matvecs: last.matvec_count,
        solves: last.solve_count,
        full_steps: last.full_step,
    }
}

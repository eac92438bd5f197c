//! Surface-code resource model and heterogeneous code-distance allocation.
//!
//! A logical qubit of distance `d` uses `d²` physical qubits and fails per
//! cycle with probability `P_L(d) = c0 (p/p_th)^{(d+1)/2}` (odd `d`). Given
//! sensitivities `γ_q`, an assignment is feasible when
//! `Σ_q |γ_q| P_L(d_q) <= ε / N_cycles`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::SensitivityProfile;

/// Default surface-code threshold.
pub const DEFAULT_P_TH: f64 = 0.0057;
/// Default logical error prefactor.
pub const DEFAULT_C0: f64 = 0.03;
pub const DEFAULT_D_MIN: u32 = 3;
pub const DEFAULT_D_MAX: u32 = 51;

/// Relative slack under which an error exactly at the budget counts as feasible.
pub const BOUNDARY_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceCodeParams {
    /// Physical error rate per step.
    pub p: f64,
    pub p_th: f64,
    pub c0: f64,
    pub n_cycles: u64,
    /// Target fractional error after `n_cycles` cycles.
    pub epsilon: f64,
    pub d_min: u32,
    pub d_max: u32,
}

impl Default for SurfaceCodeParams {
    fn default() -> Self {
        Self {
            p: 1e-3,
            p_th: DEFAULT_P_TH,
            c0: DEFAULT_C0,
            n_cycles: 1,
            epsilon: 1e-5,
            d_min: DEFAULT_D_MIN,
            d_max: DEFAULT_D_MAX,
        }
    }
}

impl SurfaceCodeParams {
    /// Default constants with `p` and a per-cycle target `ε/N_cycles`.
    pub fn with_target(p: f64, eps_per_cycle: f64) -> Self {
        Self {
            p,
            epsilon: eps_per_cycle,
            n_cycles: 1,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "p must be positive, got {}",
                self.p
            )));
        }
        if self.p.partial_cmp(&self.p_th) != Some(std::cmp::Ordering::Less) {
            return Err(Error::AboveThreshold {
                p: self.p,
                p_th: self.p_th,
            });
        }
        if !(self.c0 > 0.0 && self.c0.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "c0 must be positive, got {}",
                self.c0
            )));
        }
        if self.n_cycles == 0 {
            return Err(Error::InvalidParameter(
                "n_cycles must be at least 1".into(),
            ));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.d_min == 0
            || self.d_min.is_multiple_of(2)
            || self.d_max.is_multiple_of(2)
            || self.d_max < self.d_min
        {
            return Err(Error::InvalidParameter(format!(
                "distance bounds must be odd with 1 <= d_min <= d_max, got [{}, {}]",
                self.d_min, self.d_max
            )));
        }
        Ok(())
    }

    /// `ε / N_cycles`.
    pub fn target_per_cycle(&self) -> f64 {
        self.epsilon / self.n_cycles as f64
    }

    fn ratio(&self) -> f64 {
        self.p / self.p_th
    }

    fn rate(&self, d: u32) -> f64 {
        self.c0 * self.ratio().powi(d.div_ceil(2) as i32)
    }

    fn ladder(&self) -> impl Iterator<Item = u32> {
        (self.d_min..=self.d_max).step_by(2)
    }
}

/// Per-cycle logical error rate of a distance-`d` patch.
pub fn logical_error_rate(d: u32, params: &SurfaceCodeParams) -> Result<f64> {
    if d == 0 || d.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "distance must be odd and positive, got {d}"
        )));
    }
    if params.p.partial_cmp(&params.p_th) != Some(std::cmp::Ordering::Less) {
        return Err(Error::AboveThreshold {
            p: params.p,
            p_th: params.p_th,
        });
    }
    Ok(params.rate(d))
}

/// Whether an accumulated error meets the budget, ties included.
pub fn within_budget(error: f64, target: f64) -> bool {
    error <= target * (1.0 + BOUNDARY_RTOL)
}

/// Code distances per logical qubit (indexed UV-first) with derived totals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceAssignment {
    pub distances: Vec<u32>,
    pub total_physical: u64,
    /// `Σ_q |γ_q| P_L(d_q)`.
    pub achieved_error_per_cycle: f64,
}

impl DistanceAssignment {
    pub fn evaluate(
        g: &SensitivityProfile,
        distances: Vec<u32>,
        params: &SurfaceCodeParams,
    ) -> Result<Self> {
        params.validate()?;
        if distances.len() != g.qubits() {
            return Err(Error::QubitMismatch {
                expected: g.qubits(),
                found: distances.len(),
            });
        }
        if let Some(d) = distances.iter().find(|d| **d == 0 || **d % 2 == 0) {
            return Err(Error::InvalidParameter(format!(
                "distance must be odd and positive, got {d}"
            )));
        }
        let achieved_error_per_cycle = assignment_error(g.uv_first(), &distances, params);
        let total_physical = distances.iter().map(|&d| u64::from(d) * u64::from(d)).sum();
        Ok(Self {
            distances,
            total_physical,
            achieved_error_per_cycle,
        })
    }

    pub fn ir_first(&self) -> Vec<u32> {
        self.distances.iter().rev().copied().collect()
    }

    pub fn is_feasible(&self, params: &SurfaceCodeParams) -> bool {
        within_budget(self.achieved_error_per_cycle, params.target_per_cycle())
    }
}

/// `Σ_q |γ_q| P_L(d_q)` accumulated in qubit order with Neumaier compensation.
pub fn assignment_error(gamma: &[f64], distances: &[u32], params: &SurfaceCodeParams) -> f64 {
    neumaier_sum(
        gamma
            .iter()
            .zip(distances)
            .map(|(g, &d)| g.abs() * params.rate(d)),
    )
}

fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Smallest odd `d >= 1` with `weight · P_L(d) <= target`, from the closed form
/// `2⌈log(target/(c0·weight)) / log(p/p_th)⌉ - 1` (corrected for rounding of
/// the logarithms at exact boundaries). `weight` must be positive.
pub fn closed_form_distance(weight: f64, target: f64, params: &SurfaceCodeParams) -> u64 {
    let ok = |k: u64| within_budget(weight * params.c0 * params.ratio().powi(k as i32), target);
    let x = (target / (params.c0 * weight)).ln() / params.ratio().ln();
    let mut k = if x.is_finite() {
        x.ceil().max(1.0) as u64
    } else {
        1
    };
    while k > 1 && ok(k - 1) {
        k -= 1;
    }
    while !ok(k) && k < u64::from(u32::MAX) {
        k += 1;
    }
    2 * k - 1
}

fn floored_distance(weight: f64, target: f64, params: &SurfaceCodeParams) -> u64 {
    if weight == 0.0 {
        return u64::from(params.d_min);
    }
    closed_form_distance(weight, target, params).max(u64::from(params.d_min))
}

fn largest_weight_qubit(g: &SensitivityProfile) -> Option<usize> {
    let abs: Vec<f64> = g.uv_first().iter().map(|x| x.abs()).collect();
    (0..abs.len())
        .rev()
        .max_by(|&a, &b| abs[a].total_cmp(&abs[b]))
}

/// Every logical qubit gets the same distance, sized against `Σ_q |γ_q|`.
pub fn homogeneous_distance(
    g: &SensitivityProfile,
    params: &SurfaceCodeParams,
) -> Result<DistanceAssignment> {
    params.validate()?;
    let total = g.abs_sum();
    let d = floored_distance(total, params.target_per_cycle(), params);
    if d > u64::from(params.d_max) {
        return Err(Error::Infeasible {
            reason: format!("homogeneous distance {d} exceeds d_max = {}", params.d_max),
            binding_qubit: largest_weight_qubit(g),
        });
    }
    DistanceAssignment::evaluate(g, vec![d as u32; g.qubits()], params)
}

/// Distances sized so each qubit contributes at most `ε / (n N_cycles)`.
pub fn uniform_error_distances(
    g: &SensitivityProfile,
    params: &SurfaceCodeParams,
) -> Result<DistanceAssignment> {
    params.validate()?;
    let share = params.target_per_cycle() / g.qubits() as f64;
    let required: Vec<u64> = g
        .uv_first()
        .iter()
        .map(|gamma| floored_distance(gamma.abs(), share, params))
        .collect();
    // The most demanding qubit binds; ties go to the more IR one.
    let (q, &d) = required
        .iter()
        .enumerate()
        .max_by_key(|(_, d)| **d)
        .expect("profile is non-empty");
    if d > u64::from(params.d_max) {
        return Err(Error::Infeasible {
            reason: format!("qubit {q} needs distance {d} > d_max = {}", params.d_max),
            binding_qubit: Some(q),
        });
    }
    DistanceAssignment::evaluate(g, required.into_iter().map(|d| d as u32).collect(), params)
}

/// Minimum `Σ d_q²` subject to the error budget, over odd `d_q ∈ [d_min, d_max]`.
///
/// Ties in cost go to the smaller achieved error, then to the lexicographically
/// smallest IR-first distance list. Some optimum always has distances ordered
/// like `|γ|` (swapping a larger distance onto a larger weight never raises the
/// error at equal cost), so the search runs over nonincreasing sequences in
/// descending-weight order with branch-and-bound.
pub fn optimize_distances(
    g: &SensitivityProfile,
    params: &SurfaceCodeParams,
) -> Result<DistanceAssignment> {
    params.validate()?;
    let n = g.qubits();
    let target = params.target_per_cycle();
    let weights: Vec<f64> = g.uv_first().iter().map(|x| x.abs()).collect();

    let at_max = DistanceAssignment::evaluate(g, vec![params.d_max; n], params)?;
    if !at_max.is_feasible(params) {
        return Err(Error::Infeasible {
            reason: format!(
                "error {:.3e} at d_max = {} everywhere exceeds target {:.3e}",
                at_max.achieved_error_per_cycle, params.d_max, target
            ),
            binding_qubit: largest_weight_qubit(g),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));

    let ladder: Vec<u32> = params.ladder().collect();
    let rates: Vec<f64> = ladder.iter().map(|&d| params.rate(d)).collect();

    let mut best = at_max;
    if let Ok(uniform) = uniform_error_distances(g, params) {
        if uniform.is_feasible(params) && better(&uniform, &best) {
            best = uniform;
        }
    }

    let mut search = Search {
        params,
        gamma: g.uv_first(),
        weights: order.iter().map(|&q| weights[q]).collect(),
        order,
        ladder,
        rates,
        budget: target * (1.0 + 2.0 * BOUNDARY_RTOL),
        target,
        chosen: vec![0; n],
        best,
    };
    let top = search.ladder.len() - 1;
    search.descend(0, top, 0, 0.0);
    Ok(search.best)
}

fn better(candidate: &DistanceAssignment, incumbent: &DistanceAssignment) -> bool {
    candidate
        .total_physical
        .cmp(&incumbent.total_physical)
        .then(
            candidate
                .achieved_error_per_cycle
                .total_cmp(&incumbent.achieved_error_per_cycle),
        )
        .then_with(|| candidate.ir_first().cmp(&incumbent.ir_first()))
        .is_lt()
}

struct Search<'a> {
    params: &'a SurfaceCodeParams,
    gamma: &'a [f64],
    /// Qubit indices by descending weight.
    order: Vec<usize>,
    /// Weights in search order.
    weights: Vec<f64>,
    ladder: Vec<u32>,
    rates: Vec<f64>,
    budget: f64,
    target: f64,
    /// Ladder index chosen at each search position.
    chosen: Vec<usize>,
    best: DistanceAssignment,
}

impl Search<'_> {
    /// Smallest ladder index `k` with `weight · rate[k] <= remaining`.
    fn min_index(&self, weight: f64, remaining: f64) -> Option<usize> {
        if weight == 0.0 {
            return Some(0);
        }
        if remaining < 0.0 {
            return None;
        }
        // rates decrease with k.
        let k = self.rates.partition_point(|r| weight * r > remaining);
        (k < self.rates.len()).then_some(k)
    }

    /// Cost lower bound for positions `from..` given the remaining budget and
    /// the cap `max_index`; `None` if they cannot fit.
    fn remaining_bound(&self, from: usize, remaining: f64, max_index: usize) -> Option<u64> {
        let mut cost = 0u64;
        for pos in from..self.weights.len() {
            let k = self.min_index(self.weights[pos], remaining)?;
            if k > max_index {
                return None;
            }
            let d = u64::from(self.ladder[k]);
            cost += d * d;
        }
        Some(cost)
    }

    fn descend(&mut self, pos: usize, max_index: usize, cost: u64, error: f64) {
        let n = self.weights.len();
        if pos == n {
            self.consider_leaf();
            return;
        }
        let w = self.weights[pos];
        for k in (0..=max_index).rev() {
            let d = u64::from(self.ladder[k]);
            let err = error + w * self.rates[k];
            let remaining = self.budget - err;
            // Error only grows as k decreases, so infeasibility persists.
            let Some(rest) = self.remaining_bound(pos + 1, remaining, k) else {
                break;
            };
            if remaining < 0.0 {
                break;
            }
            let lower = cost + d * d + rest;
            if lower > self.best.total_physical {
                continue;
            }
            self.chosen[pos] = k;
            self.descend(pos + 1, k, cost + d * d, err);
        }
    }

    fn consider_leaf(&mut self) {
        let mut distances = vec![0u32; self.order.len()];
        for (pos, &q) in self.order.iter().enumerate() {
            distances[q] = self.ladder[self.chosen[pos]];
        }
        let error = assignment_error(self.gamma, &distances, self.params);
        if !within_budget(error, self.target) {
            return;
        }
        let total_physical = distances.iter().map(|&d| u64::from(d) * u64::from(d)).sum();
        let candidate = DistanceAssignment {
            distances,
            total_physical,
            achieved_error_per_cycle: error,
        };
        if better(&candidate, &self.best) {
            self.best = candidate;
        }
    }
}

/// One grid point of a reduction sweep. `None` marks an infeasible scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPoint {
    pub eps_per_cycle: f64,
    pub homogeneous_qubits: Option<u64>,
    pub uniform_qubits: Option<u64>,
    pub optimized_qubits: Option<u64>,
    pub reduction_uniform_pct: Option<f64>,
    pub reduction_optimized_pct: Option<f64>,
}

/// `100 (1 - hetero/homo)`.
pub fn reduction_pct(homogeneous: u64, heterogeneous: u64) -> f64 {
    100.0 * (1.0 - heterogeneous as f64 / homogeneous as f64)
}

/// Evaluates all three schemes at each per-cycle target. Points are computed
/// in parallel and returned in grid order.
pub fn reduction_sweep(
    g: &SensitivityProfile,
    params: &SurfaceCodeParams,
    eps_grid: &[f64],
) -> Result<Vec<SweepPoint>> {
    params.validate()?;
    if let Some(bad) = eps_grid.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
        return Err(Error::InvalidParameter(format!(
            "grid value {bad} outside (0, 1)"
        )));
    }
    Ok(eps_grid
        .par_iter()
        .map(|&eps| {
            let point = SurfaceCodeParams {
                epsilon: eps,
                n_cycles: 1,
                ..*params
            };
            let homo = homogeneous_distance(g, &point)
                .ok()
                .map(|a| a.total_physical);
            let uniform = uniform_error_distances(g, &point)
                .ok()
                .map(|a| a.total_physical);
            let optimized = optimize_distances(g, &point).ok().map(|a| a.total_physical);
            let pct = |hetero: Option<u64>| Some(reduction_pct(homo?, hetero?));
            SweepPoint {
                eps_per_cycle: eps,
                homogeneous_qubits: homo,
                uniform_qubits: uniform,
                optimized_qubits: optimized,
                reduction_uniform_pct: pct(uniform),
                reduction_optimized_pct: pct(optimized),
            }
        })
        .collect())
}

/// Log-spaced grid from `min` to `max` inclusive with about `per_decade`
/// points per decade. `min == max` gives a single point.
pub fn log_grid(min: f64, max: f64, per_decade: u32) -> Result<Vec<f64>> {
    if !(min > 0.0 && max >= min && max.is_finite()) || per_decade == 0 {
        return Err(Error::InvalidParameter(format!(
            "grid needs 0 < min <= max and per_decade >= 1, got [{min}, {max}] x {per_decade}"
        )));
    }
    if min == max {
        return Ok(vec![min]);
    }
    let (lo, hi) = (min.log10(), max.log10());
    let steps = ((hi - lo) * f64::from(per_decade) - 1e-9).ceil().max(1.0) as usize;
    Ok((0..=steps)
        .map(|k| match k {
            0 => min,
            k if k == steps => max,
            k => 10f64.powf(lo + (hi - lo) * k as f64 / steps as f64),
        })
        .collect())
}

//! Globally adaptive Gauss-Kronrod integration on a fixed initial partition.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::rules::{gk15_combine, gk15_nodes, QuadValue, GK_POINTS};
use super::{IntegralEstimate, QuadStatus, QuadratureSpec};

#[derive(Debug, Clone, Copy)]
struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
    /// Creation order; breaks ties so the refinement sequence is reproducible.
    id: u64,
    /// Error is at the rounding floor of the rule; bisection cannot reduce it.
    at_floor: bool,
}

struct ByError<T>(Panel<T>);

impl<T> PartialEq for ByError<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T> Eq for ByError<T> {}
impl<T> PartialOrd for ByError<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for ByError<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.error.total_cmp(&other.0.error).then_with(|| other.0.id.cmp(&self.0.id))
    }
}

/// A panel sampler: evaluates the 15 Kronrod nodes of `[a, b]`.
pub(crate) trait PanelSampler<T> {
    fn sample(&self, nodes: &[f64; GK_POINTS]) -> [T; GK_POINTS];
    /// Integrand evaluations charged per node.
    fn cost_per_node(&self) -> u64 {
        1
    }
}

pub(crate) struct PointSampler<F>(pub F);

impl<T, F: Fn(f64) -> T> PanelSampler<T> for PointSampler<F> {
    fn sample(&self, nodes: &[f64; GK_POINTS]) -> [T; GK_POINTS] {
        nodes.map(|x| (self.0)(x))
    }
}

const ROUNDING_FLOOR: f64 = 50.0 * f64::EPSILON;

fn evaluate_panel<T: QuadValue, S: PanelSampler<T>>(sampler: &S, a: f64, b: f64, id: u64) -> Panel<T> {
    let nodes = gk15_nodes(a, b);
    let mut vals = sampler.sample(&nodes);
    let mut peak = 0.0f64;
    let mut bad = false;
    for v in vals.iter_mut() {
        if v.is_finite_value() {
            peak = peak.max(v.magnitude());
        } else {
            *v = T::zero();
            bad = true;
        }
    }
    let (value, mut error) = gk15_combine(a, b, &vals);
    let at_floor = !bad && error <= ROUNDING_FLOOR * value.magnitude();
    if bad {
        // Dropped samples near an integrable singularity: charge the panel
        // with its full width at the largest finite magnitude so refinement
        // isolates the point.
        error += (b - a).abs() * peak.max(f64::MIN_POSITIVE);
    }
    Panel { a, b, value, error, id, at_floor }
}

/// Adaptive integration over the union of consecutive intervals
/// `[breaks[i], breaks[i+1]]`. Refinement always bisects the panel with the
/// largest error estimate, so the result depends only on the inputs.
pub(crate) fn adaptive_core<T: QuadValue, S: PanelSampler<T>>(
    sampler: &S,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> IntegralEstimate<T> {
    assert!(breaks.len() >= 2, "need at least one interval");
    let per_panel = GK_POINTS as u64 * sampler.cost_per_node();
    let mut heap = BinaryHeap::new();
    let mut unrefinable: Vec<Panel<T>> = Vec::new();
    let mut next_id = 0u64;
    let mut evals = 0u64;
    for w in breaks.windows(2) {
        if w[0] == w[1] {
            continue;
        }
        let p = evaluate_panel(sampler, w[0], w[1], next_id);
        next_id += 1;
        evals += per_panel;
        if p.at_floor {
            unrefinable.push(p);
        } else {
            heap.push(ByError(p));
        }
    }
    let mut status = QuadStatus::Converged;
    let (mut value, mut error) = totals(heap.iter().map(|p| &p.0).chain(unrefinable.iter()));
    let mut steps = 0u32;
    loop {
        steps = steps.wrapping_add(1);
        if steps % 256 == 0 {
            // Resynchronise the running sums to avoid drift.
            (value, error) = totals(heap.iter().map(|p| &p.0).chain(unrefinable.iter()));
        }
        if error <= spec.tolerance_for(value.magnitude()) {
            break;
        }
        if evals + 2 * per_panel > spec.max_evals {
            status = QuadStatus::MaxEvalsExceeded;
            break;
        }
        let Some(ByError(worst)) = heap.pop() else {
            status = QuadStatus::ToleranceNotMet;
            break;
        };
        let mid = 0.5 * (worst.a + worst.b);
        let width = (worst.b - worst.a).abs();
        if width <= 64.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs()).max(f64::MIN_POSITIVE)
            || mid == worst.a
            || mid == worst.b
        {
            unrefinable.push(worst);
            continue;
        }
        let left = evaluate_panel(sampler, worst.a, mid, next_id);
        let right = evaluate_panel(sampler, mid, worst.b, next_id + 1);
        next_id += 2;
        evals += 2 * per_panel;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        for p in [left, right] {
            if p.at_floor {
                unrefinable.push(p);
            } else {
                heap.push(ByError(p));
            }
        }
    }
    // Final sum in positional order, independent of heap layout.
    let mut panels: Vec<Panel<T>> = heap.into_iter().map(|p| p.0).collect();
    panels.extend(unrefinable);
    panels.sort_by(|p, q| p.a.total_cmp(&q.a).then(p.b.total_cmp(&q.b)));
    let (value, error) = totals(panels.iter());
    if status == QuadStatus::Converged && error > spec.tolerance_for(value.magnitude()) {
        status = QuadStatus::ToleranceNotMet;
    }
    IntegralEstimate { value, error_estimate: error, evals, truncation_bound: 0.0, status }
}

fn totals<'a, T: QuadValue + 'a>(panels: impl Iterator<Item = &'a Panel<T>>) -> (T, f64) {
    let mut v = T::zero();
    let mut e = 0.0;
    for p in panels {
        v += p.value;
        e += p.error;
    }
    (v, e)
}

/// Adaptive integral of `f` over `[a, b]`.
pub fn integrate_adaptive<T: QuadValue, F: Fn(f64) -> T>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> IntegralEstimate<T> {
    adaptive_core(&PointSampler(f), &[a, b], spec)
}

/// Adaptive integral over the partition `breaks` (ascending).
pub fn integrate_partitioned<T: QuadValue, F: Fn(f64) -> T>(
    f: F,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> IntegralEstimate<T> {
    adaptive_core(&PointSampler(f), breaks, spec)
}

/// Integral of `f` over `[a, inf)` through the map `x = a + s t / (1 - t)`.
///
/// `scale` should be comparable to the decay length of `f`.
pub fn integrate_semi_infinite<T: QuadValue, F: Fn(f64) -> T>(
    f: F,
    a: f64,
    scale: f64,
    spec: &QuadratureSpec,
) -> IntegralEstimate<T> {
    let g = |t: f64| {
        let u = 1.0 - t;
        let x = a + scale * t / u;
        let v = f(x);
        if v.magnitude() == 0.0 {
            T::zero()
        } else {
            v * (scale / (u * u))
        }
    };
    adaptive_core(&PointSampler(g), &[0.0, 0.25, 0.5, 0.75, 1.0], spec)
}

//! Adaptive Gauss-Kronrod quadrature.
//!
//! A 15-point Kronrod rule with embedded 7-point Gauss rule drives a
//! globally adaptive bisection: the panel with the largest error estimate is
//! split until the summed estimate meets the requested tolerance. Infinite
//! and half-infinite domains are folded onto a finite interval with the
//! tangent substitution `x = center + scale * tan(t)`; the rule's nodes are
//! interior, so endpoint singularities of the transformed integrand are
//! never evaluated directly.
//!
//! Divergence is detected heuristically: when the accumulated integral (or a
//! single panel) grows past [`DIVERGENCE_GUARD`] the run stops and reports
//! `diverged`. Iterated 2-D and 3-D integration reuse the 1-D engine with a
//! tighter inner tolerance.

use std::cell::Cell;
use std::collections::BinaryHeap;

/// Integration domain. Scales and centers are hints that condition the
/// tangent substitution for unbounded domains; they do not change the value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support {
    /// Closed interval [a, b].
    Finite { a: f64, b: f64 },
    /// Half line [start, +inf).
    HalfLine { start: f64, scale: f64 },
    /// The whole real line.
    Real { center: f64, scale: f64 },
}

impl Support {
    /// Half line with unit scale.
    #[must_use]
    pub fn half_line(start: f64) -> Self {
        Support::HalfLine { start, scale: 1.0 }
    }

    /// Real line centered at the origin with unit scale.
    #[must_use]
    pub fn real_line() -> Self {
        Support::Real { center: 0.0, scale: 1.0 }
    }
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    /// Estimated value of the integral.
    pub value: f64,
    /// Estimated absolute error (sum of per-panel Gauss/Kronrod gaps).
    pub error_estimate: f64,
    /// Number of integrand evaluations.
    pub evaluations: u64,
    /// Tolerance was met before the panel budget ran out.
    pub converged: bool,
    /// The divergence guard tripped (partial sums past [`DIVERGENCE_GUARD`]).
    pub diverged: bool,
}

/// Partial integrals beyond this magnitude are treated as divergence.
pub const DIVERGENCE_GUARD: f64 = 1e12;

/// Absolute-error floor used when the integral itself is at or near zero,
/// where a purely relative target can never be met.
const ABS_FLOOR: f64 = 1e-14;

/// Panel budget; 15 evaluations each.
const MAX_PANELS: usize = 40_000;

// 15-point Kronrod nodes (positive half) with the embedded 7-point Gauss
// rule on the odd indices. Standard values for the [-1, 1] reference panel.
const XK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integrate `f` over `support` to relative tolerance `rel_tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, support: Support, rel_tol: f64) -> QuadResult {
    match support {
        Support::Finite { a, b } => integrate_finite(&f, a, b, rel_tol),
        // Kronrod nodes are strictly interior, so tan and sec^2 stay finite at
        // every evaluated t; any non-finite value comes from the integrand
        // itself and must reach the engine to poison its panel.
        Support::HalfLine { start, scale } => {
            let scale = if scale > 0.0 && scale.is_finite() { scale } else { 1.0 };
            let g = |t: f64| {
                let c = t.cos();
                let x = start + scale * t.tan();
                f(x) * scale / (c * c)
            };
            integrate_finite(&g, 0.0, std::f64::consts::FRAC_PI_2, rel_tol)
        }
        Support::Real { center, scale } => {
            let scale = if scale > 0.0 && scale.is_finite() { scale } else { 1.0 };
            let g = |t: f64| {
                let c = t.cos();
                let x = center + scale * t.tan();
                f(x) * scale / (c * c)
            };
            integrate_finite(
                &g,
                -std::f64::consts::FRAC_PI_2,
                std::f64::consts::FRAC_PI_2,
                rel_tol,
            )
        }
    }
}

struct PanelEval {
    value: f64,
    error: f64,
    /// A node value was non-finite: the integrand blew up inside the panel.
    poisoned: bool,
}

fn kronrod_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> PanelEval {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut fv = [0.0f64; 15];
    let mut poisoned = false;
    for i in 0..8 {
        let hi = f(mid + half * XK[i]);
        fv[i] = hi;
        if i != 7 {
            let lo = f(mid - half * XK[i]);
            fv[14 - i] = lo;
        }
    }
    let mut resk = 0.0;
    let mut resg = 0.0;
    let mut resabs = 0.0;
    for i in 0..8 {
        let s = if i == 7 { fv[7] } else { fv[i] + fv[14 - i] };
        if !s.is_finite() {
            poisoned = true;
        }
        resk += WK[i] * s;
        resabs += WK[i] * if i == 7 { fv[7].abs() } else { fv[i].abs() + fv[14 - i].abs() };
        if i % 2 == 1 {
            resg += WG[i / 2] * s;
        }
    }
    if poisoned {
        return PanelEval { value: 0.0, error: f64::INFINITY, poisoned: true };
    }
    // roughness-scaled error model: |K - G| alone underestimates on panels
    // where both rules misjudge the same way (endpoint singularities), and
    // overestimates grossly on smooth panels
    let reskh = resk * 0.5;
    let mut resasc = WK[7] * (fv[7] - reskh).abs();
    for i in 0..7 {
        resasc += WK[i] * ((fv[i] - reskh).abs() + (fv[14 - i] - reskh).abs());
    }
    resasc *= half.abs();
    let raw = ((resk - resg) * half).abs();
    let mut err = raw;
    if resasc != 0.0 && raw != 0.0 {
        err = resasc * f64::min(1.0, (200.0 * raw / resasc).powf(1.5));
    }
    let round_floor = 50.0 * f64::EPSILON * resabs * half.abs();
    if round_floor.is_normal() {
        err = f64::max(err, round_floor);
    }
    PanelEval { value: resk * half, error: err, poisoned: false }
}

fn integrate_finite<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> QuadResult {
    if a.is_nan() || b.is_nan() || b <= a {
        return QuadResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
            converged: b == a,
            diverged: false,
        };
    }
    let mut heap = BinaryHeap::new();
    let first = kronrod_panel(f, a, b);
    let mut evals = 15u64;
    let mut total_v = first.value;
    let mut total_e = first.error;
    let mut diverged = first.poisoned;
    heap.push(Panel { a, b, value: first.value, error: first.error });

    while !diverged && total_e > f64::max(ABS_FLOOR, rel_tol * total_v.abs()) {
        if heap.len() >= MAX_PANELS {
            break;
        }
        if total_v.abs() > DIVERGENCE_GUARD {
            diverged = true;
            break;
        }
        let worst = match heap.pop() {
            Some(p) => p,
            None => break,
        };
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            // narrowest representable panel: its error is irreducible, stop
            heap.push(worst);
            break;
        }
        let p1 = kronrod_panel(f, worst.a, mid);
        let p2 = kronrod_panel(f, mid, worst.b);
        evals += 30;
        if p1.poisoned
            || p2.poisoned
            || p1.value.abs() > DIVERGENCE_GUARD
            || p2.value.abs() > DIVERGENCE_GUARD
        {
            diverged = true;
            break;
        }
        total_v += p1.value + p2.value - worst.value;
        total_e += p1.error + p2.error - worst.error;
        heap.push(Panel { a: worst.a, b: mid, value: p1.value, error: p1.error });
        heap.push(Panel { a: mid, b: worst.b, value: p2.value, error: p2.error });
    }

    let converged =
        !diverged && total_e <= f64::max(ABS_FLOOR, rel_tol * total_v.abs()) * (1.0 + 1e-12);
    QuadResult {
        value: total_v,
        error_estimate: total_e,
        evaluations: evals,
        converged,
        diverged,
    }
}

/// Iterated 2-D integration: outer over `sx`, inner over `sy`.
pub fn integrate_2d<F: Fn(f64, f64) -> f64>(
    f: F,
    sx: Support,
    sy: Support,
    rel_tol: f64,
) -> QuadResult {
    let inner_tol = rel_tol / 10.0;
    let evals = Cell::new(0u64);
    let inner_ok = Cell::new(true);
    let diverged = Cell::new(false);
    let outer = integrate(
        |x| {
            let r = integrate(|y| f(x, y), sy, inner_tol);
            evals.set(evals.get() + r.evaluations);
            if r.diverged {
                diverged.set(true);
            } else if !r.converged {
                inner_ok.set(false);
            }
            r.value
        },
        sx,
        rel_tol,
    );
    QuadResult {
        value: outer.value,
        error_estimate: outer.error_estimate,
        evaluations: outer.evaluations + evals.get(),
        converged: outer.converged && inner_ok.get() && !diverged.get(),
        diverged: outer.diverged || diverged.get(),
    }
}

/// Iterated 3-D integration: outermost over `sx`, then `sy`, then `sz`.
pub fn integrate_3d<F: Fn(f64, f64, f64) -> f64>(
    f: F,
    sx: Support,
    sy: Support,
    sz: Support,
    rel_tol: f64,
) -> QuadResult {
    let inner_tol = rel_tol / 10.0;
    let evals = Cell::new(0u64);
    let inner_ok = Cell::new(true);
    let diverged = Cell::new(false);
    let outer = integrate(
        |x| {
            let r = integrate_2d(|y, z| f(x, y, z), sy, sz, inner_tol);
            evals.set(evals.get() + r.evaluations);
            if r.diverged {
                diverged.set(true);
            } else if !r.converged {
                inner_ok.set(false);
            }
            r.value
        },
        sx,
        rel_tol,
    );
    QuadResult {
        value: outer.value,
        error_estimate: outer.error_estimate,
        evaluations: outer.evaluations + evals.get(),
        converged: outer.converged && inner_ok.get() && !diverged.get(),
        diverged: outer.diverged || diverged.get(),
    }
}

//! Smooth functions on the realized group: left/right-invariant derivatives,
//! the weighted seminorm families, convolution, involution, membership
//! diagnostics, the truncate-and-mollify density construction, and the
//! exponential-scale comparison seminorms.

use crate::error::{Error, Result};
use crate::numerics::deriv::{derivative_at_zero, MAX_DERIVATIVE_ORDER};
use crate::numerics::linalg;
use crate::numerics::matrix::{operator_norm, Matrix};
use crate::numerics::neldermead;
use crate::numerics::quad::{self, Box};
use crate::realization::{GroupElement, Realization};
use crate::weights::Weight;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::sync::Arc;

/// Default finite-difference step for invariant derivatives.
pub const FD_STEP: f64 = 1e-3;
/// Fixed seed for the deterministic sup-sampling inside seminorms; part of
/// the reproducibility contract, not tunable per call.
const SUP_SEED: u64 = 2718;
/// Sample count for sampled suprema.
const SUP_SAMPLES: usize = 256;
/// Negligible-tail threshold used when converting decay metadata to boxes.
const BOX_TOL: f64 = 1e-10;

// ---------------------------------------------------------------------------
// Smooth functions and decay metadata
// ---------------------------------------------------------------------------

/// Tail information attached to a smooth function; quadratures use it to pick
/// integration boxes and to bound what they leave out.
#[derive(Clone, Debug)]
pub enum Decay {
    /// |φ(t,n)| ≤ amplitude · e^{−rate_t·|t|² − rate_n·|n|²}.
    Gaussian {
        rate_t: f64,
        rate_n: f64,
        amplitude: f64,
    },
    /// φ vanishes (or is numerically negligible) outside the coordinate box
    /// with these half-widths.
    CompactSupport { half_widths: Vec<f64> },
    /// |φ| ≤ amplitude · σ^order; no integrable tail information.
    SlowlyIncreasing { order: usize, amplitude: f64 },
}

/// A smooth complex-valued function on the realized group, evaluated in the
/// (t, n) coordinates. Evaluators must be pure and re-entrant.
#[derive(Clone)]
pub struct SmoothFunction {
    label: String,
    decay: Decay,
    eval: Arc<dyn Fn(&GroupElement) -> Complex64 + Send + Sync>,
}

impl std::fmt::Debug for SmoothFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SmoothFunction")
            .field("label", &self.label)
            .field("decay", &self.decay)
            .finish()
    }
}

impl SmoothFunction {
    pub fn new<F>(label: impl Into<String>, decay: Decay, eval: F) -> Self
    where
        F: Fn(&GroupElement) -> Complex64 + Send + Sync + 'static,
    {
        SmoothFunction {
            label: label.into(),
            decay,
            eval: Arc::new(eval),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn decay(&self) -> &Decay {
        &self.decay
    }

    pub fn eval(&self, g: &GroupElement) -> Complex64 {
        (self.eval)(g)
    }

    /// The metadata envelope at a point.
    pub fn envelope(&self, g: &GroupElement) -> f64 {
        match &self.decay {
            Decay::Gaussian {
                rate_t,
                rate_n,
                amplitude,
            } => {
                let t2: f64 = g.t.iter().map(|v| v * v).sum();
                let n2: f64 = g.n.iter().map(|v| v * v).sum();
                amplitude * (-rate_t * t2 - rate_n * n2).exp()
            }
            Decay::CompactSupport { half_widths } => {
                let coords = g.coords();
                let inside = coords
                    .iter()
                    .zip(half_widths)
                    .all(|(c, h)| c.abs() <= *h + 1e-12);
                if inside {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
            Decay::SlowlyIncreasing { .. } => f64::INFINITY,
        }
    }

    /// Sup bound implied by the metadata, when it gives one.
    pub fn amplitude(&self) -> Option<f64> {
        match &self.decay {
            Decay::Gaussian { amplitude, .. } => Some(*amplitude),
            Decay::CompactSupport { .. } => None,
            Decay::SlowlyIncreasing { .. } => None,
        }
    }

    /// Half-widths of a coordinate box outside which the envelope is below
    /// `tol`; None when the metadata carries no integrable tail.
    pub fn effective_half_widths(&self, k: usize, d: usize, tol: f64) -> Option<Vec<f64>> {
        match &self.decay {
            Decay::Gaussian {
                rate_t,
                rate_n,
                amplitude,
            } => {
                let reach = |rate: f64| {
                    if rate <= 0.0 {
                        return None;
                    }
                    let lg = (amplitude / tol).max(1.0).ln();
                    Some((lg / rate).sqrt().max(1.0))
                };
                let rt = reach(*rate_t)?;
                let rn = reach(*rate_n)?;
                let mut hw = vec![rt; k];
                hw.extend(vec![rn; d]);
                Some(hw)
            }
            Decay::CompactSupport { half_widths } => Some(half_widths.clone()),
            Decay::SlowlyIncreasing { .. } => None,
        }
    }

    /// Spot check: |φ| at the corners of the box stays below 10× the
    /// metadata envelope there.
    pub fn metadata_consistent(&self, k: usize, domain: &Box) -> bool {
        let m = domain.dim();
        for mask in 0..(1usize << m) {
            let coords: Vec<f64> = (0..m)
                .map(|i| {
                    if mask >> i & 1 == 1 {
                        domain.half_widths[i]
                    } else {
                        -domain.half_widths[i]
                    }
                })
                .collect();
            let g = GroupElement {
                t: coords[..k].to_vec(),
                n: coords[k..].to_vec(),
            };
            let env = self.envelope(&g);
            if env.is_finite() && self.eval(&g).norm() > 10.0 * env + 1e-300 {
                return false;
            }
        }
        true
    }

    /// Pointwise linear combination aφ + bψ; metadata falls back to the
    /// weaker of the two envelopes (box hull / rate minimum).
    pub fn linear_combination(a: Complex64, phi: &SmoothFunction, b: Complex64, psi: &SmoothFunction) -> SmoothFunction {
        let decay = match (&phi.decay, &psi.decay) {
            (
                Decay::Gaussian {
                    rate_t: a1,
                    rate_n: b1,
                    amplitude: c1,
                },
                Decay::Gaussian {
                    rate_t: a2,
                    rate_n: b2,
                    amplitude: c2,
                },
            ) => Decay::Gaussian {
                rate_t: a1.min(*a2),
                rate_n: b1.min(*b2),
                amplitude: a.norm() * c1 + b.norm() * c2,
            },
            (Decay::CompactSupport { half_widths: h1 }, Decay::CompactSupport { half_widths: h2 }) => {
                Decay::CompactSupport {
                    half_widths: h1.iter().zip(h2).map(|(x, y)| x.max(*y)).collect(),
                }
            }
            _ => Decay::SlowlyIncreasing {
                order: 0,
                amplitude: f64::INFINITY,
            },
        };
        let f = phi.clone();
        let g = psi.clone();
        SmoothFunction::new(
            format!("{}+{}", phi.label, psi.label),
            decay,
            move |x| a * f.eval(x) + b * g.eval(x),
        )
    }
}

/// (q, k, α) triple naming one seminorm.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeminormSpec {
    pub q: LebesgueExponent,
    pub k: usize,
    pub alpha: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LebesgueExponent {
    One,
    Two,
    Infinity,
}

impl SeminormSpec {
    pub fn new(q: LebesgueExponent, k: usize, alpha: Vec<usize>) -> Result<Self> {
        let order: usize = alpha.iter().sum();
        if order > MAX_DERIVATIVE_ORDER {
            return Err(Error::DerivativeDepth {
                depth: order,
                limit: MAX_DERIVATIVE_ORDER,
            });
        }
        Ok(SeminormSpec { q, k, alpha })
    }

    pub fn order(&self) -> usize {
        self.alpha.iter().sum()
    }
}

// ---------------------------------------------------------------------------
// Invariant derivatives
// ---------------------------------------------------------------------------

/// Coordinate basis element of the group: exp of the j-th adapted basis
/// direction scaled by s (exact in coordinates for pure directions).
fn basis_step(r: &Realization, j: usize, s: f64) -> GroupElement {
    let mut t = vec![0.0; r.k()];
    let mut n = vec![0.0; r.d()];
    if j < r.k() {
        t[j] = s;
    } else {
        n[j - r.k()] = s;
    }
    GroupElement { t, n }
}

/// Central finite differences with one Richardson step, complex-valued.
fn cderiv<F: Fn(f64) -> Result<Complex64>>(f: F, order: usize, h: f64) -> Result<Complex64> {
    if order == 0 {
        return f(0.0);
    }
    if order > MAX_DERIVATIVE_ORDER {
        return Err(Error::DerivativeDepth {
            depth: order,
            limit: MAX_DERIVATIVE_ORDER,
        });
    }
    let stencil = |h: f64| -> Result<Complex64> {
        let v = |s: f64| -> Result<Complex64> {
            let y = f(s)?;
            if !y.re.is_finite() || !y.im.is_finite() {
                return Err(Error::NonFinite {
                    context: format!("complex finite-difference sample at s={s}"),
                });
            }
            Ok(y)
        };
        Ok(match order {
            1 => (v(h)? - v(-h)?) / (2.0 * h),
            2 => (v(h)? - 2.0 * v(0.0)? + v(-h)?) / (h * h),
            3 => (v(2.0 * h)? - 2.0 * v(h)? + 2.0 * v(-h)? - v(-2.0 * h)?) / (2.0 * h * h * h),
            4 => {
                (v(2.0 * h)? - 4.0 * v(h)? + 6.0 * v(0.0)? - 4.0 * v(-h)? + v(-2.0 * h)?)
                    / (h * h * h * h)
            }
            _ => unreachable!(),
        })
    };
    let coarse = stencil(h)?;
    let fine = stencil(h / 2.0)?;
    Ok((fine * 4.0 - coarse) / 3.0)
}

#[derive(Clone, Copy, PartialEq)]
enum Side {
    Left,
    Right,
}

fn invariant_derivative_rec(
    r: &Realization,
    f: &dyn Fn(&GroupElement) -> Result<Complex64>,
    alpha: &[usize],
    g: &GroupElement,
    side: Side,
) -> Result<Complex64> {
    match alpha.iter().position(|&a| a > 0) {
        None => f(g),
        Some(j) => {
            let mut rest = alpha.to_vec();
            rest[j] = 0;
            cderiv(
                |s| {
                    let step = basis_step(r, j, s);
                    let point = match side {
                        Side::Left => r.multiply(g, &step)?,
                        Side::Right => r.multiply(&step, g)?,
                    };
                    invariant_derivative_rec(r, f, &rest, &point, side)
                },
                alpha[j],
                FD_STEP,
            )
        }
    }
}

fn check_alpha(r: &Realization, alpha: &[usize]) -> Result<()> {
    if alpha.len() != r.dim() {
        return Err(Error::Shape(format!(
            "multi-index length {} != group dimension {}",
            alpha.len(),
            r.dim()
        )));
    }
    let order: usize = alpha.iter().sum();
    if order > MAX_DERIVATIVE_ORDER {
        return Err(Error::DerivativeDepth {
            depth: order,
            limit: MAX_DERIVATIVE_ORDER,
        });
    }
    Ok(())
}

/// Left-invariant derivative X^α φ at g: nested directional derivatives of
/// s ↦ φ(g · exp(s e_j)), axes applied in index order.
pub fn left_derivative(
    r: &Realization,
    phi: &SmoothFunction,
    alpha: &[usize],
    g: &GroupElement,
) -> Result<Complex64> {
    check_alpha(r, alpha)?;
    invariant_derivative_rec(r, &|h| Ok(phi.eval(h)), alpha, g, Side::Left)
}

/// Right-invariant derivative X̃^α φ at g, via s ↦ φ(exp(s e_j) · g).
pub fn right_derivative(
    r: &Realization,
    phi: &SmoothFunction,
    alpha: &[usize],
    g: &GroupElement,
) -> Result<Complex64> {
    check_alpha(r, alpha)?;
    invariant_derivative_rec(r, &|h| Ok(phi.eval(h)), alpha, g, Side::Right)
}

/// Plain coordinate derivative D^α φ at g (finite differences straight in
/// the (t, n) chart).
pub fn coordinate_derivative(
    r: &Realization,
    phi: &SmoothFunction,
    alpha: &[usize],
    g: &GroupElement,
) -> Result<Complex64> {
    check_alpha(r, alpha)?;
    fn rec(
        r: &Realization,
        phi: &SmoothFunction,
        alpha: &[usize],
        g: &GroupElement,
    ) -> Result<Complex64> {
        match alpha.iter().position(|&a| a > 0) {
            None => Ok(phi.eval(g)),
            Some(j) => {
                let mut rest = alpha.to_vec();
                rest[j] = 0;
                cderiv(
                    |s| {
                        let mut coords = g.coords();
                        coords[j] += s;
                        let shifted = GroupElement {
                            t: coords[..r.k()].to_vec(),
                            n: coords[r.k()..].to_vec(),
                        };
                        rec(r, phi, &rest, &shifted)
                    },
                    alpha[j],
                    FD_STEP,
                )
            }
        }
    }
    rec(r, phi, alpha, g)
}

/// First-order left-invariant derivative along an arbitrary ambient
/// direction v, via the curve s ↦ g · exp(s v_c) · exp(s v_n) whose tangent
/// at s = 0 is v. Only first order: higher derivatives along this curve
/// differ from powers of the field.
pub fn left_derivative_along(
    r: &Realization,
    phi: &SmoothFunction,
    v: &[f64],
    g: &GroupElement,
) -> Result<Complex64> {
    let (vc, vn) = r.adapted(v);
    cderiv(
        |s| {
            let ec = GroupElement::new(linalg::scaled(&vc, s), vec![0.0; r.d()])?;
            let en = GroupElement::new(vec![0.0; r.k()], linalg::scaled(&vn, s))?;
            let p = r.multiply(&ec, &en)?;
            Ok(phi.eval(&r.multiply(g, &p)?))
        },
        1,
        FD_STEP,
    )
}

// ---------------------------------------------------------------------------
// Seminorms
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct SeminormValue {
    pub value: f64,
    /// Crude surrogate bound on the mass outside the box, from the decay
    /// metadata sampled on the boundary.
    pub tail_bound: f64,
    /// False when the tail bound is not < 1e-6 of the value (or unavailable).
    pub tail_controlled: bool,
}

/// Deterministic uniform samples in a coordinate box.
fn box_samples(r: &Realization, domain: &Box, count: usize, seed: u64) -> Vec<GroupElement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count + 1);
    out.push(r.identity());
    for _ in 0..count {
        let coords: Vec<f64> = domain
            .half_widths
            .iter()
            .map(|&h| rng.gen_range(-h..h))
            .collect();
        out.push(GroupElement {
            t: coords[..r.k()].to_vec(),
            n: coords[r.k()..].to_vec(),
        });
    }
    out
}

/// Samples on the boundary faces of a box (for tail surrogates).
fn boundary_samples(r: &Realization, domain: &Box, per_face: usize, seed: u64) -> Vec<GroupElement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = domain.dim();
    let mut out = Vec::new();
    for axis in 0..m {
        for &sign in &[-1.0, 1.0] {
            for _ in 0..per_face {
                let coords: Vec<f64> = (0..m)
                    .map(|i| {
                        if i == axis {
                            sign * domain.half_widths[i]
                        } else {
                            let h = domain.half_widths[i];
                            rng.gen_range(-h..h)
                        }
                    })
                    .collect();
                out.push(GroupElement {
                    t: coords[..r.k()].to_vec(),
                    n: coords[r.k()..].to_vec(),
                });
            }
        }
    }
    out
}

/// Tail surrogate: metadata envelope × σ^k sampled on the boundary, scaled by
/// a shell volume. None when the metadata gives no tail control.
fn tail_surrogate(w: &Weight, phi: &SmoothFunction, k: usize, domain: &Box) -> Option<f64> {
    let r = w.realization();
    if let Decay::CompactSupport { half_widths } = phi.decay() {
        let inside = half_widths
            .iter()
            .zip(&domain.half_widths)
            .all(|(s, b)| s <= b);
        if inside {
            return Some(0.0);
        }
    }
    if matches!(phi.decay(), Decay::SlowlyIncreasing { .. }) {
        return None;
    }
    let mut worst = 0.0f64;
    for g in boundary_samples(r, domain, 8, SUP_SEED ^ 0x5a5a) {
        let env = phi.envelope(&g);
        if !env.is_finite() {
            return None;
        }
        let s = w.sigma(&g).ok()?;
        worst = worst.max(env * s.powi(k as i32));
    }
    let shell = domain.scaled(1.5).volume() - domain.volume();
    Some(worst * shell)
}

/// The seminorm ‖σ^k X^α φ‖ in L^q over the box. q = ∞ is a sampled sup plus
/// one Nelder–Mead polish from the best sample; finite q is a tensor
/// Gauss–Legendre integral.
pub fn seminorm(
    r: &Realization,
    w: &Weight,
    phi: &SmoothFunction,
    spec: &SeminormSpec,
    domain: &Box,
) -> Result<SeminormValue> {
    if domain.dim() != r.dim() {
        return Err(Error::Shape("box dimension != group dimension".into()));
    }
    let integrand = |g: &GroupElement| -> Result<f64> {
        let d = left_derivative(r, phi, &spec.alpha, g)?;
        Ok(w.sigma(g)?.powi(spec.k as i32) * d.norm())
    };
    let value = match spec.q {
        LebesgueExponent::Infinity => {
            let mut best = 0.0f64;
            let mut best_point = r.identity().coords();
            for g in box_samples(r, domain, SUP_SAMPLES, SUP_SEED) {
                let v = integrand(&g)?;
                if v > best {
                    best = v;
                    best_point = g.coords();
                }
            }
            // local polish, clamped to the box
            let (_, refined_neg) = neldermead::minimize(
                |coords| {
                    let clamped: Vec<f64> = coords
                        .iter()
                        .zip(&domain.half_widths)
                        .map(|(c, h)| c.clamp(-h, *h))
                        .collect();
                    let g = GroupElement {
                        t: clamped[..r.k()].to_vec(),
                        n: clamped[r.k()..].to_vec(),
                    };
                    -integrand(&g).unwrap_or(0.0)
                },
                &best_point,
                0.1,
                60,
            );
            best.max(-refined_neg)
        }
        LebesgueExponent::One => {
            quad::integrate(|coords| point_value(r, &integrand, coords), domain)?.value
        }
        LebesgueExponent::Two => quad::integrate(
            |coords| {
                let v = point_value(r, &integrand, coords);
                v * v
            },
            domain,
        )?
        .value
        .max(0.0)
        .sqrt(),
    };
    finish_seminorm(w, phi, spec, domain, value)
}

/// Evaluates a pointwise integrand at raw box coordinates; evaluation
/// failures (overflow far out in a box) contribute zero rather than
/// poisoning the quadrature.
fn point_value(
    r: &Realization,
    integrand: &dyn Fn(&GroupElement) -> Result<f64>,
    coords: &[f64],
) -> f64 {
    let g = GroupElement {
        t: coords[..r.k()].to_vec(),
        n: coords[r.k()..].to_vec(),
    };
    integrand(&g).unwrap_or(0.0)
}

fn finish_seminorm(
    w: &Weight,
    phi: &SmoothFunction,
    spec: &SeminormSpec,
    domain: &Box,
    value: f64,
) -> Result<SeminormValue> {
    let tail = tail_surrogate(w, phi, spec.k, domain);
    let (tail_bound, tail_controlled) = match tail {
        Some(t) => (t, t < 1e-6 * value.max(1e-12)),
        None => (f64::INFINITY, false),
    };
    Ok(SeminormValue {
        value,
        tail_bound,
        tail_controlled,
    })
}

// ---------------------------------------------------------------------------
// Membership diagnostics
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct MembershipEntry {
    pub k: usize,
    pub alpha: Vec<usize>,
    /// Sampled sup of σ^k|X^αφ| over the base box.
    pub inner: f64,
    /// Sampled sup over the doubled box (nested: includes the base samples).
    pub outer: f64,
    pub stable: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct MembershipReport {
    pub label: String,
    pub entries: Vec<MembershipEntry>,
    pub consistent: bool,
}

/// All multi-indices of total order ≤ max_order in dimension m.
pub fn multi_indices(m: usize, max_order: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..m {
        let mut next = Vec::new();
        for prefix in &out {
            let used: usize = prefix.iter().sum();
            for a in 0..=(max_order - used) {
                let mut p = prefix.clone();
                p.push(a);
                next.push(p);
            }
        }
        out = next;
    }
    out.sort_by_key(|a| (a.iter().sum::<usize>(), a.clone()));
    out
}

/// Seminorm table for k ≤ k_max, |α| ≤ alpha_max at the box and its double;
/// verdict "consistent with membership" iff every sampled sup grows by < 5%
/// when the box doubles. Sampling is nested (the doubled box re-uses the base
/// samples), so outer ≥ inner always and the increment isolates the new
/// region.
pub fn membership_report(
    r: &Realization,
    w: &Weight,
    phi: &SmoothFunction,
    k_max: usize,
    alpha_max: usize,
    domain: &Box,
) -> Result<MembershipReport> {
    let alphas = multi_indices(r.dim(), alpha_max.min(MAX_DERIVATIVE_ORDER));
    let inner_samples = box_samples(r, domain, SUP_SAMPLES, SUP_SEED);
    // only the shell (doubled box minus base box) counts toward the outer
    // sup: points landing back inside the base box would merely re-sample it
    // at a different resolution and turn noise into spurious growth
    let outer_samples: Vec<GroupElement> =
        box_samples(r, &domain.scaled(2.0), 2 * SUP_SAMPLES, SUP_SEED ^ 0x77)
            .into_iter()
            .filter(|g| {
                g.coords()
                    .iter()
                    .zip(&domain.half_widths)
                    .any(|(c, h)| c.abs() > *h)
            })
            .collect();
    let sig = |gs: &[GroupElement]| -> Result<Vec<f64>> { gs.iter().map(|g| w.sigma(g)).collect() };
    let sigma_in = sig(&inner_samples)?;
    let sigma_out = sig(&outer_samples)?;
    let mut entries = Vec::new();
    for alpha in &alphas {
        let dv_in: Vec<f64> = inner_samples
            .iter()
            .map(|g| left_derivative(r, phi, alpha, g).map(|c| c.norm()))
            .collect::<Result<_>>()?;
        let dv_out: Vec<f64> = outer_samples
            .iter()
            .map(|g| left_derivative(r, phi, alpha, g).map(|c| c.norm()))
            .collect::<Result<_>>()?;
        for k in 0..=k_max {
            let inner = dv_in
                .iter()
                .zip(&sigma_in)
                .map(|(d, s)| d * s.powi(k as i32))
                .fold(0.0f64, f64::max);
            let grown = dv_out
                .iter()
                .zip(&sigma_out)
                .map(|(d, s)| d * s.powi(k as i32))
                .fold(0.0f64, f64::max);
            let outer = inner.max(grown);
            let stable = outer <= inner * 1.05 + 1e-12;
            entries.push(MembershipEntry {
                k,
                alpha: alpha.clone(),
                inner,
                outer,
                stable,
            });
        }
    }
    let consistent = entries.iter().all(|e| e.stable);
    Ok(MembershipReport {
        label: phi.label().to_string(),
        entries,
        consistent,
    })
}

// ---------------------------------------------------------------------------
// Convolution and involution
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct ConvolutionBudget {
    pub points_per_axis: usize,
    /// When set, switch to quasi-Monte-Carlo with this many samples.
    pub monte_carlo: Option<usize>,
    pub seed: u64,
}

impl Default for ConvolutionBudget {
    fn default() -> Self {
        ConvolutionBudget {
            points_per_axis: 12,
            monte_carlo: None,
            seed: 7,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ConvolutionValue {
    pub value: Complex64,
    pub tail_bound: f64,
    pub nodes: usize,
}

/// φ∗ψ(g) = ∫ φ(g h⁻¹) ψ(h) dh over the box where ψ is non-negligible
/// (right Haar measure = Lebesgue in the coordinates).
pub fn convolve(
    r: &Realization,
    phi: &SmoothFunction,
    psi: &SmoothFunction,
    g: &GroupElement,
    budget: &ConvolutionBudget,
) -> Result<ConvolutionValue> {
    let hw = psi
        .effective_half_widths(r.k(), r.d(), BOX_TOL)
        .ok_or_else(|| {
            Error::MissingMetadata(format!(
                "convolution factor '{}' carries no integrable tail metadata",
                psi.label()
            ))
        })?;
    if phi.effective_half_widths(r.k(), r.d(), BOX_TOL).is_none() {
        return Err(Error::MissingMetadata(format!(
            "convolution factor '{}' carries no integrable tail metadata",
            phi.label()
        )));
    }
    let m = r.dim();
    if budget.monte_carlo.is_none() && m > 3 {
        return Err(Error::UnsupportedDimension { dim: m, limit: 3 });
    }
    let value_at = |coords: &[f64]| -> Result<Complex64> {
        let h = GroupElement {
            t: coords[..r.k()].to_vec(),
            n: coords[r.k()..].to_vec(),
        };
        let gh_inv = r.multiply(g, &r.inverse(&h)?)?;
        Ok(phi.eval(&gh_inv) * psi.eval(&h))
    };
    let (value, nodes) = match budget.monte_carlo {
        Some(nsamp) => {
            let domain = Box::new(hw.clone(), 1)?;
            let re = quad::monte_carlo(
                |c| value_at(c).map(|v| v.re).unwrap_or(0.0),
                &domain,
                nsamp,
                budget.seed,
            )?;
            let im = quad::monte_carlo(
                |c| value_at(c).map(|v| v.im).unwrap_or(0.0),
                &domain,
                nsamp,
                budget.seed,
            )?;
            (Complex64::new(re.value, im.value), re.nodes_used + im.nodes_used)
        }
        None => {
            let domain = Box::new(hw.clone(), budget.points_per_axis)?;
            let re = quad::integrate(|c| value_at(c).map(|v| v.re).unwrap_or(0.0), &domain)?;
            let im = quad::integrate(|c| value_at(c).map(|v| v.im).unwrap_or(0.0), &domain)?;
            (Complex64::new(re.value, im.value), re.nodes_used + im.nodes_used)
        }
    };
    // tail: ψ's envelope on the boundary times a sup bound for φ, over a
    // shell volume — the same surrogate shape the seminorms use.
    let domain = Box::new(hw, 1)?;
    let phi_sup = phi.amplitude().unwrap_or(1.0);
    let mut boundary_env = 0.0f64;
    for h in boundary_samples(r, &domain, 8, budget.seed ^ 0x33) {
        let e = psi.envelope(&h);
        if e.is_finite() {
            boundary_env = boundary_env.max(e);
        }
    }
    let tail_bound = boundary_env * phi_sup * (domain.scaled(1.5).volume() - domain.volume());
    Ok(ConvolutionValue {
        value,
        tail_bound,
        nodes,
    })
}

/// The involution φ*(g) = conj(φ(g⁻¹)) · δ(g⁻¹).
pub fn involution(r: &Realization, phi: &SmoothFunction) -> SmoothFunction {
    let own = r.clone();
    let f = phi.clone();
    let decay = match phi.decay() {
        Decay::CompactSupport { half_widths } => {
            // bound the image of the support box under inversion by mapping
            // its corner lattice and padding
            let m = half_widths.len();
            let mut out = vec![0.0f64; m];
            for mask in 0..(1usize << m) {
                let coords: Vec<f64> = (0..m)
                    .map(|i| {
                        if mask >> i & 1 == 1 {
                            half_widths[i]
                        } else {
                            -half_widths[i]
                        }
                    })
                    .collect();
                let g = GroupElement {
                    t: coords[..r.k()].to_vec(),
                    n: coords[r.k()..].to_vec(),
                };
                if let Ok(inv) = r.inverse(&g) {
                    for (o, c) in out.iter_mut().zip(inv.coords()) {
                        *o = o.max(c.abs());
                    }
                }
            }
            Decay::CompactSupport {
                half_widths: out.iter().map(|v| v * 1.5 + 1e-6).collect(),
            }
        }
        Decay::Gaussian {
            rate_t,
            rate_n,
            amplitude,
        } => Decay::Gaussian {
            // inversion distorts n by e^{∓ad t}; halving the rates is a
            // conservative envelope for the desk-scale boxes in use
            rate_t: rate_t / 2.0,
            rate_n: rate_n / 2.0,
            amplitude: *amplitude,
        },
        other => other.clone(),
    };
    SmoothFunction::new(format!("{}*", phi.label()), decay, move |g| {
        match (own.inverse(g), own.modular(g)) {
            (Ok(inv), Ok(_)) => match own.modular(&inv) {
                Ok(dinv) => f.eval(&inv).conj() * dinv,
                Err(_) => Complex64::new(0.0, 0.0),
            },
            _ => Complex64::new(0.0, 0.0),
        }
    })
}

// ---------------------------------------------------------------------------
// Density construction: truncate and mollify
// ---------------------------------------------------------------------------

/// Normalized radial bump ρ_j supported in the coordinate ball of radius
/// 2^{−j}: c · exp(−1/(1 − ‖x/ε‖²)), with c fixed by quadrature so the
/// integral is 1.
pub fn mollifier(r: &Realization, j: usize) -> Result<SmoothFunction> {
    let eps = 0.5f64.powi(j as i32);
    let m = r.dim();
    let raw = move |coords: &[f64]| -> f64 {
        let q: f64 = coords.iter().map(|c| (c / eps) * (c / eps)).sum();
        if q < 1.0 {
            (-1.0 / (1.0 - q)).exp()
        } else {
            0.0
        }
    };
    let domain = Box::cube(m, eps, 24);
    let mass = quad::integrate(|c| raw(c), &domain)?.value;
    if !(mass > 0.0) {
        return Err(Error::Contract("mollifier mass not positive".into()));
    }
    let c = 1.0 / mass;
    Ok(SmoothFunction::new(
        format!("mollifier-{j}"),
        Decay::CompactSupport {
            half_widths: vec![eps; m],
        },
        move |g| Complex64::new(c * raw(&g.coords()), 0.0),
    ))
}

/// f_{j,l} = ρ_j ∗ (f · 1_{box l}): smooth, compactly supported
/// approximation of f. Each evaluation runs one local quadrature over the
/// mollifier's reach intersected with the truncation box.
pub fn truncate_mollify(
    r: &Realization,
    f: &SmoothFunction,
    l: f64,
    j: usize,
) -> Result<SmoothFunction> {
    truncate_mollify_with_points(r, f, l, j, 16)
}

/// Like [`truncate_mollify`], with an explicit resolution for the local
/// quadrature over the mollifier's support. The bump is smooth but not
/// analytic, so the default 16 points/axis leave ~1e-3 relative noise;
/// raise the resolution when that noise matters downstream.
pub fn truncate_mollify_with_points(
    r: &Realization,
    f: &SmoothFunction,
    l: f64,
    j: usize,
    points: usize,
) -> Result<SmoothFunction> {
    if f.effective_half_widths(r.k(), r.d(), BOX_TOL).is_none() {
        return Err(Error::MissingMetadata(format!(
            "'{}' carries no integrable tail metadata",
            f.label()
        )));
    }
    let eps = 0.5f64.powi(j as i32);
    let own = r.clone();
    let inner = f.clone();
    let m = r.dim();
    let label = format!("{}[l={l},j={j}]", f.label());
    // Substituting u = g h⁻¹ (so h = u⁻¹ g, dh = δ(u)⁻¹ du: right
    // translations are Jacobian-1 and the inverse map is block-triangular
    // with n-block −e^{−ad t}) turns the integral into one over the fixed
    // cube ‖u‖∞ ≤ ε. The quadrature grid then no longer moves with g, and
    // normalizing the bump by its mass on this same grid makes the discrete
    // operator reproduce constants exactly, so the bump's own quadrature
    // error cancels instead of polluting f_{j,l}.
    let raw = move |coords: &[f64]| -> f64 {
        let q: f64 = coords.iter().map(|c| (c / eps) * (c / eps)).sum();
        if q < 1.0 {
            (-1.0 / (1.0 - q)).exp()
        } else {
            0.0
        }
    };
    let lo = vec![-eps; m];
    let hi = vec![eps; m];
    let mass = quad::integrate_rectangle(&raw, &lo, &hi, points)?;
    if !(mass > 0.0) {
        return Err(Error::Contract("mollifier mass not positive".into()));
    }
    let c = 1.0 / mass;
    let evaluator = move |g: &GroupElement| -> Complex64 {
        let part = |pick: &dyn Fn(Complex64) -> f64| -> f64 {
            quad::integrate_rectangle(
                &|coords: &[f64]| {
                    let w = raw(coords);
                    if w == 0.0 {
                        return 0.0;
                    }
                    let u = GroupElement {
                        t: coords[..own.k()].to_vec(),
                        n: coords[own.k()..].to_vec(),
                    };
                    let h = match own.inverse(&u).and_then(|ui| own.multiply(&ui, g)) {
                        Ok(h) => h,
                        Err(_) => return 0.0,
                    };
                    if h.coords().iter().any(|x| x.abs() > l) {
                        return 0.0;
                    }
                    match own.modular(&u) {
                        Ok(delta) => pick(c * w / delta * inner.eval(&h)),
                        Err(_) => 0.0,
                    }
                },
                &lo,
                &hi,
                points,
            )
            .unwrap_or(0.0)
        };
        Complex64::new(part(&|v| v.re), part(&|v| v.im))
    };
    Ok(SmoothFunction::new(
        label,
        Decay::CompactSupport {
            half_widths: vec![l + 2.0 * eps; m],
        },
        evaluator,
    ))
}

// ---------------------------------------------------------------------------
// Exponential-scale seminorms (comparison family on exponential groups)
// ---------------------------------------------------------------------------

/// A group is flagged exponential when no complement basis element has a
/// purely imaginary nonzero adjoint eigenvalue.
pub fn is_exponential(r: &Realization) -> bool {
    let m = r.dim();
    for b in r.complement().basis() {
        let ad = r.algebra().ad_matrix(b);
        let dm = nalgebra::DMatrix::from_fn(m, m, |i, j| ad[(i, j)]);
        for ev in dm.complex_eigenvalues().iter() {
            if ev.re.abs() <= 1e-9 && ev.im.abs() > 1e-9 {
                return false;
            }
        }
    }
    true
}

/// sup over the box of e^{ρ|t|} · |n|^j · |D^α φ| with coordinate
/// derivatives; defined only on exponential groups.
pub fn es_seminorm(
    r: &Realization,
    phi: &SmoothFunction,
    rho: f64,
    j: usize,
    alpha: &[usize],
    domain: &Box,
) -> Result<f64> {
    if !is_exponential(r) {
        return Err(Error::NotExponential(
            "a complement direction has purely imaginary adjoint eigenvalues".into(),
        ));
    }
    check_alpha(r, alpha)?;
    let value_at = |g: &GroupElement| -> Result<f64> {
        let d = coordinate_derivative(r, phi, alpha, g)?;
        let tn = linalg::norm(&g.t);
        let nn = linalg::norm(&g.n);
        Ok((rho * tn).exp() * nn.powi(j as i32) * d.norm())
    };
    let mut best = 0.0f64;
    let mut best_point = r.identity().coords();
    for g in box_samples(r, domain, SUP_SAMPLES, SUP_SEED ^ 0xe5) {
        let v = value_at(&g)?;
        if v > best {
            best = v;
            best_point = g.coords();
        }
    }
    let (_, refined_neg) = neldermead::minimize(
        |coords| {
            let clamped: Vec<f64> = coords
                .iter()
                .zip(&domain.half_widths)
                .map(|(c, h)| c.clamp(-h, *h))
                .collect();
            let g = GroupElement {
                t: clamped[..r.k()].to_vec(),
                n: clamped[r.k()..].to_vec(),
            };
            -value_at(&g).unwrap_or(0.0)
        },
        &best_point,
        0.1,
        60,
    );
    Ok(best.max(-refined_neg))
}

// ---------------------------------------------------------------------------
// Frame change
// ---------------------------------------------------------------------------

/// Matrix C(g) with row i holding the coefficients of the coordinate tangent
/// vector ∂/∂coords_i at g in the left-invariant frame (X_1 … X_m):
/// ∂_i = Σ_l C[(i,l)] X_l. Returns (C, condition number of the frame).
pub fn frame_change(r: &Realization, g: &GroupElement) -> Result<(Matrix, f64)> {
    let m = r.dim();
    // A[(i,j)] = i-th coordinate component of X_j at g
    let mut a = Matrix::zeros(m, m);
    for j in 0..m {
        for i in 0..m {
            let d = derivative_at_zero(
                |s| {
                    let p = r.multiply(g, &basis_step(r, j, s))?;
                    Ok(p.coords()[i])
                },
                1,
                FD_STEP,
            )?;
            a[(i, j)] = d;
        }
    }
    let a_inv = a.inverse().map_err(|_| {
        Error::Contract("left-invariant frame numerically singular".into())
    })?;
    let condition = operator_norm(&a) * operator_norm(&a_inv);
    Ok((a_inv.transpose(), condition))
}

// ---------------------------------------------------------------------------
// Probe library
// ---------------------------------------------------------------------------

/// Centered Gaussian e^{−rate‖(t,n)‖²}.
pub fn gaussian(r: &Realization, rate: f64) -> SmoothFunction {
    let _ = r;
    SmoothFunction::new(
        format!("gauss[{rate}]"),
        Decay::Gaussian {
            rate_t: rate,
            rate_n: rate,
            amplitude: 1.0,
        },
        move |g| {
            let q: f64 = g.coords().iter().map(|c| c * c).sum();
            Complex64::new((-rate * q).exp(), 0.0)
        },
    )
}

/// Gaussian centered off the origin; metadata is its numerical support box.
pub fn shifted_gaussian(r: &Realization, center: &[f64], rate: f64) -> SmoothFunction {
    let _ = r;
    let c = center.to_vec();
    let reach = (30.0f64 / rate).sqrt();
    let half_widths: Vec<f64> = c.iter().map(|v| v.abs() + reach).collect();
    SmoothFunction::new(
        format!("gauss[{rate}]@{c:?}"),
        Decay::CompactSupport { half_widths },
        move |g| {
            let q: f64 = g
                .coords()
                .iter()
                .zip(&c)
                .map(|(x, c)| (x - c) * (x - c))
                .sum();
            Complex64::new((-rate * q).exp(), 0.0)
        },
    )
}

/// Tensor bump Π exp(−1/(1 − ((x_i − c_i)/width)²)) on the shifted box.
pub fn bump(r: &Realization, center: &[f64], width: f64) -> SmoothFunction {
    let _ = r;
    let c = center.to_vec();
    let half_widths: Vec<f64> = c.iter().map(|v| v.abs() + width).collect();
    SmoothFunction::new(
        format!("bump@{c:?}"),
        Decay::CompactSupport { half_widths },
        move |g| {
            let mut v = 1.0f64;
            for (x, ci) in g.coords().iter().zip(&c) {
                let u = (x - ci) / width;
                let q = u * u;
                if q >= 1.0 {
                    return Complex64::new(0.0, 0.0);
                }
                v *= (-1.0 / (1.0 - q)).exp();
            }
            Complex64::new(v, 0.0)
        },
    )
}

/// Oscillating Gaussian e^{i⟨ξ,(t,n)⟩} e^{−rate‖(t,n)‖²}.
pub fn oscillating_gaussian(r: &Realization, xi: &[f64], rate: f64) -> SmoothFunction {
    let _ = r;
    let xi = xi.to_vec();
    SmoothFunction::new(
        format!("osc-gauss[{rate}]"),
        Decay::Gaussian {
            rate_t: rate,
            rate_n: rate,
            amplitude: 1.0,
        },
        move |g| {
            let coords = g.coords();
            let q: f64 = coords.iter().map(|c| c * c).sum();
            let phase: f64 = coords.iter().zip(&xi).map(|(c, x)| c * x).sum();
            Complex64::from_polar((-rate * q).exp(), phase)
        },
    )
}

/// The standard probe set: Gaussians at three rates, bumps at three centers,
/// one oscillating Gaussian.
pub fn probe_library(r: &Realization) -> Vec<SmoothFunction> {
    let m = r.dim();
    let mut first = vec![0.0; m];
    first[0] = 0.8;
    let mut last = vec![0.0; m];
    last[m - 1] = -0.6;
    vec![
        relabel(gaussian(r, 0.5), "gauss-half"),
        relabel(gaussian(r, 1.0), "gauss"),
        relabel(gaussian(r, 2.0), "gauss-2"),
        relabel(bump(r, &vec![0.0; m], 1.2), "bump-0"),
        relabel(bump(r, &first, 1.2), "bump-p"),
        relabel(bump(r, &last, 1.2), "bump-m"),
        relabel(oscillating_gaussian(r, &vec![1.0; m], 1.0), "osc-gauss"),
    ]
}

fn relabel(mut f: SmoothFunction, label: &str) -> SmoothFunction {
    f.label = label.to_string();
    f
}

/// Look up a probe by label.
pub fn probe(r: &Realization, label: &str) -> Result<SmoothFunction> {
    probe_library(r)
        .into_iter()
        .find(|p| p.label() == label)
        .ok_or_else(|| Error::Input(format!("unknown probe '{label}'")))
}

// ---------------------------------------------------------------------------
// Comparison reports (topology suites)
// ---------------------------------------------------------------------------

const COMPARISON_CAP: f64 = 1e3;

#[derive(Clone, Debug, Serialize)]
pub struct TopologyReport {
    /// ‖φ‖¹_{k,α} ≤ C ‖φ‖^∞_{k+p,α}: (p, C) over the probe set.
    pub forward_shift: usize,
    pub forward_constant: f64,
    /// ‖φ‖^∞_{k,α} ≤ C Σ_{|γ|≤m+|α|} ‖φ‖¹_{s·(k+r·m),γ}: (r, s, C).
    pub reverse_shifts: (usize, usize),
    pub reverse_constant: f64,
    pub probes: usize,
}

/// Two-sided L¹ ↔ L^∞ comparison on the probe set, for k and α drawn from
/// small standard lists. Fails when no shift within range brings the
/// constant under the cap.
pub fn lq_linfty_comparison(
    r: &Realization,
    w: &Weight,
    probes: &[SmoothFunction],
    domain: &Box,
) -> Result<TopologyReport> {
    let m = r.dim();
    let k_list = [0usize, 1];
    let mut alpha_list = vec![vec![0; m]];
    let mut e1 = vec![0; m];
    e1[0] = 1;
    alpha_list.push(e1);

    // cache: for each probe, seminorms at the needed indices
    let l1 = |phi: &SmoothFunction, k: usize, alpha: &[usize]| -> Result<f64> {
        Ok(seminorm(
            r,
            w,
            phi,
            &SeminormSpec::new(LebesgueExponent::One, k, alpha.to_vec())?,
            domain,
        )?
        .value)
    };
    let linf = |phi: &SmoothFunction, k: usize, alpha: &[usize]| -> Result<f64> {
        Ok(seminorm(
            r,
            w,
            phi,
            &SeminormSpec::new(LebesgueExponent::Infinity, k, alpha.to_vec())?,
            domain,
        )?
        .value)
    };

    // forward: find the smallest shift p with a capped constant
    let mut forward: Option<(usize, f64)> = None;
    'outer: for p in 1..=(m + 2) {
        let mut c = 0.0f64;
        for phi in probes {
            for &k in &k_list {
                for alpha in &alpha_list {
                    let lhs = l1(phi, k, alpha)?;
                    let rhs = linf(phi, k + p, alpha)?;
                    if lhs > 1e-12 {
                        if rhs <= 0.0 {
                            continue 'outer;
                        }
                        c = c.max(lhs / rhs);
                    }
                }
            }
        }
        if c <= COMPARISON_CAP {
            forward = Some((p, c));
            break;
        }
    }
    let (forward_shift, forward_constant) = forward.ok_or_else(|| {
        Error::Contract("no capped L¹ ≤ C·L∞ comparison within shift range".into())
    })?;

    // reverse: ‖φ‖^∞_{k,α} ≤ C Σ_{|γ|≤m+|α|} ‖φ‖¹_{s(k+rm),γ}
    let mut reverse: Option<(usize, usize, f64)> = None;
    'rev: for &(rr, ss) in &[(1usize, 1usize), (1, 2), (2, 1), (2, 2)] {
        let mut c = 0.0f64;
        for phi in probes {
            for &k in &k_list {
                for alpha in &alpha_list {
                    let lhs = linf(phi, k, alpha)?;
                    let order = alpha.iter().sum::<usize>() + m;
                    let gammas: Vec<Vec<usize>> = multi_indices(m, order.min(MAX_DERIVATIVE_ORDER));
                    let mut rhs = 0.0;
                    for gamma in &gammas {
                        rhs += l1(phi, ss * (k + rr * m), gamma)?;
                    }
                    if lhs > 1e-12 {
                        if rhs <= 0.0 {
                            continue 'rev;
                        }
                        c = c.max(lhs / rhs);
                    }
                }
            }
        }
        if c <= COMPARISON_CAP {
            reverse = Some((rr, ss, c));
            break;
        }
    }
    let (rr, ss, reverse_constant) = reverse.ok_or_else(|| {
        Error::Contract("no capped L∞ ≤ C·ΣL¹ comparison within shift range".into())
    })?;

    Ok(TopologyReport {
        forward_shift,
        forward_constant,
        reverse_shifts: (rr, ss),
        reverse_constant,
        probes: probes.len(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RightLeftReport {
    /// right_{k,α} ≤ C max_{|γ|≤|α|} left_{k+p,γ}: (p, C).
    pub forward_shift: usize,
    pub forward_constant: f64,
    /// left_{k,α} ≤ C max_{|γ|≤|α|} right_{k+p,γ}: (p, C).
    pub reverse_shift: usize,
    pub reverse_constant: f64,
}

/// Sampled two-sided comparison between the left-invariant and
/// right-invariant sup seminorm families on the probe set.
pub fn right_left_comparison(
    r: &Realization,
    w: &Weight,
    probes: &[SmoothFunction],
    domain: &Box,
) -> Result<RightLeftReport> {
    let m = r.dim();
    let k_list = [0usize, 1];
    let mut alpha_list = vec![vec![0; m]];
    let mut e1 = vec![0; m];
    e1[0] = 1;
    alpha_list.push(e1);

    let sup_of = |phi: &SmoothFunction,
                  k: usize,
                  alpha: &[usize],
                  side: Side|
     -> Result<f64> {
        let mut best = 0.0f64;
        for g in box_samples(r, domain, SUP_SAMPLES / 2, SUP_SEED ^ 0x1b) {
            let d = match side {
                Side::Left => left_derivative(r, phi, alpha, &g)?,
                Side::Right => right_derivative(r, phi, alpha, &g)?,
            };
            best = best.max(w.sigma(&g)?.powi(k as i32) * d.norm());
        }
        Ok(best)
    };

    let fit = |from: Side, to: Side| -> Result<(usize, f64)> {
        'outer: for p in 0..=(m + 2) {
            let mut c = 0.0f64;
            for phi in probes {
                for &k in &k_list {
                    for alpha in &alpha_list {
                        let lhs = sup_of(phi, k, alpha, from)?;
                        let order: usize = alpha.iter().sum();
                        let mut rhs = 0.0f64;
                        for gamma in multi_indices(m, order) {
                            rhs = rhs.max(sup_of(phi, k + p, &gamma, to)?);
                        }
                        if lhs > 1e-12 {
                            if rhs <= 0.0 {
                                continue 'outer;
                            }
                            c = c.max(lhs / rhs);
                        }
                    }
                }
            }
            if c <= COMPARISON_CAP {
                return Ok((p, c));
            }
        }
        Err(Error::Contract(
            "no capped right/left seminorm comparison within shift range".into(),
        ))
    };

    let (fp, fc) = fit(Side::Right, Side::Left)?;
    let (rp, rc) = fit(Side::Left, Side::Right)?;
    Ok(RightLeftReport {
        forward_shift: fp,
        forward_constant: fc,
        reverse_shift: rp,
        reverse_constant: rc,
    })
}

/// ∫ |φ| δ⁻¹ dg over a growing box sequence; returns the partial integrals
/// and a convergence verdict (left-Haar integrability of the probe).
pub fn left_haar_l1(
    r: &Realization,
    phi: &SmoothFunction,
    levels: usize,
    points_per_axis: usize,
) -> Result<(Vec<f64>, bool)> {
    let m = r.dim();
    let mut partials = Vec::new();
    for i in 0..levels {
        // resolution scales with the box so the peak near the identity is
        // never under-sampled on the larger boxes
        let points = (points_per_axis << i).min(96);
        let b = Box::cube(m, (1 << i) as f64, points);
        let v = quad::integrate(
            |coords| {
                let g = GroupElement {
                    t: coords[..r.k()].to_vec(),
                    n: coords[r.k()..].to_vec(),
                };
                match r.modular(&g) {
                    Ok(d) if d > 0.0 => phi.eval(&g).norm() / d,
                    _ => 0.0,
                }
            },
            &b,
        )?
        .value;
        partials.push(v);
    }
    // geometric decay of consecutive increments (the first may be large;
    // only the tail matters)
    let increments: Vec<f64> = partials.windows(2).map(|w| w[1] - w[0]).collect();
    let scale = partials.last().copied().unwrap_or(1.0).abs().max(1.0);
    let mut convergent = true;
    for pair in increments.windows(2) {
        let (prev, next) = (pair[0].abs().max(1e-300), pair[1].abs());
        if next > 0.75 * prev && next > 1e-12 * scale {
            convergent = false;
        }
    }
    Ok((partials, convergent))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{test_algebras, Subspace};
    use crate::realization::tests::{axb_realization, heisenberg_realization, m2_realization};

    fn abelian_realization(dim: usize) -> Realization {
        Realization::new(test_algebras::abelian(dim), Subspace::full(dim), 1).unwrap()
    }

    fn coordinate_function(index: usize) -> SmoothFunction {
        SmoothFunction::new(
            format!("coord-{index}"),
            Decay::SlowlyIncreasing {
                order: 1,
                amplitude: f64::INFINITY,
            },
            move |g| Complex64::new(g.coords()[index], 0.0),
        )
    }

    fn constant_one() -> SmoothFunction {
        SmoothFunction::new(
            "one",
            Decay::SlowlyIncreasing {
                order: 0,
                amplitude: 1.0,
            },
            |_| Complex64::new(1.0, 0.0),
        )
    }

    #[test]
    fn derivative_of_constant_vanishes() {
        let r = heisenberg_realization();
        let one = constant_one();
        let g = GroupElement::new(vec![], vec![0.3, -0.2, 0.7]).unwrap();
        for alpha in [[1, 0, 0], [0, 2, 0], [1, 1, 0]] {
            let d = left_derivative(&r, &one, &alpha, &g).unwrap();
            assert!(d.norm() < 1e-8, "alpha {alpha:?} gave {d}");
            let d = right_derivative(&r, &one, &alpha, &g).unwrap();
            assert!(d.norm() < 1e-8);
        }
    }

    #[test]
    fn abelian_second_derivative_of_gaussian() {
        let r = abelian_realization(1);
        let phi = gaussian(&r, 1.0);
        let d = left_derivative(&r, &phi, &[2], &r.identity()).unwrap();
        assert!((d.re + 2.0).abs() < 1e-6, "got {d}");
        assert!(d.im.abs() < 1e-10);
    }

    #[test]
    fn heisenberg_left_derivative_closed_form() {
        // z-coordinate of g·(s,0,0) is z − sy/2, so X₁(n₃) = −y/2
        let r = heisenberg_realization();
        let phi = coordinate_function(2);
        for (x, y, z) in [(0.4, -0.7, 0.1), (1.2, 0.5, -0.3)] {
            let g = GroupElement::new(vec![], vec![x, y, z]).unwrap();
            let d = left_derivative(&r, &phi, &[1, 0, 0], &g).unwrap();
            assert!((d.re + y / 2.0).abs() < 1e-8, "got {d} at y={y}");
        }
    }

    #[test]
    fn abelian_right_equals_left() {
        let r = abelian_realization(2);
        let phi = oscillating_gaussian(&r, &[1.0, -2.0], 0.7);
        let g = GroupElement::new(vec![], vec![0.3, -0.6]).unwrap();
        for alpha in [[1, 0], [0, 2], [1, 1]] {
            let l = left_derivative(&r, &phi, &alpha, &g).unwrap();
            let rd = right_derivative(&r, &phi, &alpha, &g).unwrap();
            assert!((l - rd).norm() < 1e-7, "alpha {alpha:?}: {l} vs {rd}");
        }
    }

    #[test]
    fn axb_right_derivative_scales_fiber() {
        // (s,0)·(t,y) = (s+t, e^s y): the right-invariant T-derivative of
        // the fiber coordinate is y itself
        let r = axb_realization();
        let phi = coordinate_function(1);
        for (t, y) in [(0.0, 1.0), (0.7, -0.4), (-1.1, 2.3)] {
            let g = GroupElement::new(vec![t], vec![y]).unwrap();
            let d = right_derivative(&r, &phi, &[1, 0], &g).unwrap();
            assert!((d.re - y).abs() < 1e-7, "got {d} at y={y}");
        }
    }

    #[test]
    fn first_order_derivative_linear_in_direction() {
        let r = heisenberg_realization();
        let phi = oscillating_gaussian(&r, &[1.0, 1.0, 1.0], 1.0);
        let g = GroupElement::new(vec![], vec![0.2, 0.4, -0.1]).unwrap();
        let d1 = left_derivative(&r, &phi, &[1, 0, 0], &g).unwrap();
        let d2 = left_derivative(&r, &phi, &[0, 1, 0], &g).unwrap();
        let v = vec![1.0, 1.0, 0.0];
        let dv = left_derivative_along(&r, &phi, &v, &g).unwrap();
        assert!((dv - d1 - d2).norm() < 1e-6, "{dv} vs {}", d1 + d2);
    }

    #[test]
    fn seminorm_of_zero_function() {
        let r = axb_realization();
        let w = Weight::new(&r);
        let zero = SmoothFunction::new(
            "zero",
            Decay::Gaussian {
                rate_t: 1.0,
                rate_n: 1.0,
                amplitude: 0.0,
            },
            |_| Complex64::new(0.0, 0.0),
        );
        let b = Box::cube(2, 4.0, 10);
        for q in [
            LebesgueExponent::One,
            LebesgueExponent::Two,
            LebesgueExponent::Infinity,
        ] {
            let spec = SeminormSpec::new(q, 2, vec![1, 0]).unwrap();
            let v = seminorm(&r, &w, &zero, &spec, &b).unwrap();
            assert!(v.value.abs() < 1e-12);
        }
    }

    #[test]
    fn abelian_gaussian_l2_closed_form() {
        // ∫ e^{−2x²} dx = √(π/2), so the (q=2, k=0, α=0) seminorm is
        // (π/2)^{1/4}
        let r = abelian_realization(1);
        let w = Weight::new(&r);
        let phi = gaussian(&r, 1.0);
        let spec = SeminormSpec::new(LebesgueExponent::Two, 0, vec![0]).unwrap();
        let b = Box::cube(1, 7.0, 48);
        let v = seminorm(&r, &w, &phi, &spec, &b).unwrap();
        let expected = (std::f64::consts::PI / 2.0).powf(0.25);
        assert!((v.value - expected).abs() < 1e-6, "got {}", v.value);
        assert!(v.tail_controlled);
    }

    #[test]
    fn axb_gaussian_seminorms_finite() {
        let r = axb_realization();
        let w = Weight::new(&r);
        let phi = gaussian(&r, 1.0);
        let b = Box::cube(2, 8.0, 14);
        for k in [0, 3, 6] {
            for alpha in [vec![0, 0], vec![1, 0], vec![1, 1]] {
                let spec = SeminormSpec::new(LebesgueExponent::Infinity, k, alpha.clone()).unwrap();
                let v = seminorm(&r, &w, &phi, &spec, &b).unwrap();
                assert!(v.value.is_finite() && v.value >= 0.0);
                assert!(
                    v.tail_controlled,
                    "k={k} alpha={alpha:?}: tail {} vs value {}",
                    v.tail_bound, v.value
                );
            }
        }
    }

    #[test]
    fn seminorm_spec_order_capped() {
        assert!(SeminormSpec::new(LebesgueExponent::One, 0, vec![3, 2]).is_err());
    }

    #[test]
    fn mollifier_has_unit_mass() {
        let r = abelian_realization(1);
        let rho = mollifier(&r, 2).unwrap();
        let b = Box::cube(1, 0.3, 40);
        let mass = quad::integrate(
            |c| {
                rho.eval(&GroupElement {
                    t: vec![],
                    n: c.to_vec(),
                })
                .re
            },
            &b,
        )
        .unwrap()
        .value;
        // bump functions are smooth but not analytic; Gauss-Legendre
        // converges only algebraically on them
        assert!((mass - 1.0).abs() < 1e-5, "mass {mass}");
    }

    #[test]
    fn convolution_with_mollifier_approximates_identity() {
        let r = abelian_realization(1);
        let phi = gaussian(&r, 1.0);
        let rho = mollifier(&r, 4).unwrap();
        let budget = ConvolutionBudget {
            points_per_axis: 20,
            ..Default::default()
        };
        let g = GroupElement::new(vec![], vec![0.3]).unwrap();
        let v = convolve(&r, &phi, &rho, &g, &budget).unwrap();
        assert!((v.value.re - phi.eval(&g).re).abs() < 1e-3, "got {}", v.value);
    }

    #[test]
    fn abelian_gaussian_convolution_closed_form() {
        let r = abelian_realization(1);
        let phi = gaussian(&r, 1.0);
        let budget = ConvolutionBudget {
            points_per_axis: 48,
            ..Default::default()
        };
        let v = convolve(&r, &phi, &phi, &r.identity(), &budget).unwrap();
        let expected = (std::f64::consts::PI / 2.0).sqrt();
        assert!((v.value.re - expected).abs() < 1e-6, "got {}", v.value);
        assert!(v.value.im.abs() < 1e-10);
    }

    #[test]
    fn convolution_requires_metadata() {
        let r = abelian_realization(1);
        let phi = gaussian(&r, 1.0);
        let bad = coordinate_function(0);
        let budget = ConvolutionBudget::default();
        assert!(matches!(
            convolve(&r, &phi, &bad, &r.identity(), &budget),
            Err(Error::MissingMetadata(_))
        ));
    }

    #[test]
    fn heisenberg_convolution_noncommutative_witness() {
        let r = heisenberg_realization();
        let phi = shifted_gaussian(&r, &[1.5, 0.0, 0.0], 1.0);
        let psi = shifted_gaussian(&r, &[0.0, 1.5, 0.0], 1.0);
        let budget = ConvolutionBudget {
            points_per_axis: 14,
            ..Default::default()
        };
        // φ∗ψ concentrates near c₁·c₂ = (1.5, 1.5, 1.125), ψ∗φ near
        // c₂·c₁ = (1.5, 1.5, −1.125); evaluate at the former
        let g = GroupElement::new(vec![], vec![1.5, 1.5, 1.125]).unwrap();
        let ab = convolve(&r, &phi, &psi, &g, &budget).unwrap().value;
        let ba = convolve(&r, &psi, &phi, &g, &budget).unwrap().value;
        assert!(
            (ab - ba).norm() > 1e-4,
            "no witness: {ab} vs {ba} (diff {})",
            (ab - ba).norm()
        );
    }

    #[test]
    fn derivative_passes_through_convolution() {
        let r = abelian_realization(1);
        let phi = gaussian(&r, 1.0);
        let psi = gaussian(&r, 2.0);
        let budget = ConvolutionBudget {
            points_per_axis: 32,
            ..Default::default()
        };
        let own = r.clone();
        let (p2, s2, b2) = (phi.clone(), psi.clone(), budget.clone());
        let conv = SmoothFunction::new(
            "phi*psi",
            Decay::Gaussian {
                rate_t: 0.5,
                rate_n: 0.5,
                amplitude: 2.0,
            },
            move |g| convolve(&own, &p2, &s2, g, &b2).map(|v| v.value).unwrap(),
        );
        let dpsi_own = r.clone();
        let (p3, s3, b3) = (phi.clone(), psi.clone(), budget.clone());
        let conv_d = SmoothFunction::new(
            "phi*Xpsi",
            Decay::Gaussian {
                rate_t: 0.5,
                rate_n: 0.5,
                amplitude: 4.0,
            },
            move |g| {
                let own = dpsi_own.clone();
                let s3c = s3.clone();
                let xpsi = SmoothFunction::new(
                    "Xpsi",
                    s3.decay().clone(),
                    move |h| left_derivative(&own, &s3c, &[1], h).unwrap(),
                );
                convolve(&dpsi_own, &p3, &xpsi, g, &b3)
                    .map(|v| v.value)
                    .unwrap()
            },
        );
        for x in [0.0, 0.4, -0.8] {
            let g = GroupElement::new(vec![], vec![x]).unwrap();
            let lhs = left_derivative(&r, &conv, &[1], &g).unwrap();
            let rhs = conv_d.eval(&g);
            assert!((lhs - rhs).norm() < 1e-4, "at {x}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn involution_is_involutive_on_axb() {
        let r = axb_realization();
        let phi = gaussian(&r, 1.0);
        let twice = involution(&r, &involution(&r, &phi));
        for (t, y) in [(0.0, 0.0), (0.5, -0.3), (-0.8, 1.2)] {
            let g = GroupElement::new(vec![t], vec![y]).unwrap();
            assert!((twice.eval(&g) - phi.eval(&g)).norm() < 1e-10);
        }
    }

    #[test]
    fn involution_closed_form_on_axb() {
        // φ*(t,y) = conj(φ(−t, −e^{−t} y)) · e^{−t}
        let r = axb_realization();
        let phi = oscillating_gaussian(&r, &[1.0, 1.0], 1.0);
        let star = involution(&r, &phi);
        for (t, y) in [(0.4, 0.7), (-0.9, 0.2)] {
            let g = GroupElement::new(vec![t], vec![y]).unwrap();
            let inv = GroupElement::new(vec![-t], vec![-(-t).exp() * y]).unwrap();
            let expected = phi.eval(&inv).conj() * (-t).exp();
            assert!(
                (star.eval(&g) - expected).norm() < 1e-9,
                "at ({t},{y}): {} vs {expected}",
                star.eval(&g)
            );
        }
    }

    #[test]
    fn involution_fixes_even_functions_on_unimodular_group() {
        let r = heisenberg_realization();
        let phi = gaussian(&r, 1.0);
        let star = involution(&r, &phi);
        let g = GroupElement::new(vec![], vec![0.3, -0.5, 0.9]).unwrap();
        assert!((star.eval(&g) - phi.eval(&g)).norm() < 1e-10);
    }

    #[test]
    fn membership_gaussian_on_axb_and_heisenberg() {
        for r in [axb_realization(), heisenberg_realization()] {
            let w = Weight::new(&r);
            let phi = gaussian(&r, 1.0);
            // the sup of σ⁶·e^{-‖g‖²} sits near ‖g‖ ≈ 3.5 on ax+b; the base
            // box must contain it so the shell only sees decay
            let b = Box::cube(r.dim(), 6.0, 1);
            let report = membership_report(&r, &w, &phi, 6, 3, &b).unwrap();
            assert!(
                report.consistent,
                "unstable entries: {:?}",
                report
                    .entries
                    .iter()
                    .filter(|e| !e.stable)
                    .collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn membership_rejects_t_flat_function_on_axb() {
        let r = axb_realization();
        let w = Weight::new(&r);
        // no decay along t: σ¹ sees the e^{|t|} growth
        let phi = SmoothFunction::new(
            "no-t-decay",
            Decay::SlowlyIncreasing {
                order: 0,
                amplitude: 1.0,
            },
            |g| Complex64::new((-g.n[0] * g.n[0]).exp(), 0.0),
        );
        let b = Box::cube(2, 4.0, 1);
        let report = membership_report(&r, &w, &phi, 1, 0, &b).unwrap();
        assert!(!report.consistent);
        let bad = report
            .entries
            .iter()
            .find(|e| e.k == 1 && e.alpha.iter().all(|&a| a == 0))
            .unwrap();
        assert!(bad.outer > 2.0 * bad.inner, "{bad:?}");
    }

    #[test]
    fn truncate_mollify_converges_on_gaussian() {
        let r = abelian_realization(1);
        let w = Weight::new(&r);
        let f = gaussian(&r, 1.0);
        let b = Box::cube(1, 7.0, 40);
        let spec = SeminormSpec::new(LebesgueExponent::One, 0, vec![0]).unwrap();
        let mut previous = f64::INFINITY;
        for l in [1.0, 2.0, 4.0] {
            let approx = truncate_mollify(&r, &f, l, 4).unwrap();
            let diff = SmoothFunction::linear_combination(
                Complex64::new(1.0, 0.0),
                &f,
                Complex64::new(-1.0, 0.0),
                &approx,
            );
            let v = seminorm(&r, &w, &diff, &spec, &b).unwrap().value;
            assert!(v <= previous + 1e-9, "not decreasing: {v} after {previous}");
            previous = v;
        }
        assert!(previous < 1e-2, "final L¹ distance {previous}");
    }

    #[test]
    fn es_seminorm_finite_on_axb_gaussian() {
        let r = axb_realization();
        let phi = gaussian(&r, 1.0);
        let b = Box::cube(2, 6.0, 1);
        for rho in [1.0, 2.0] {
            for j in [0, 2] {
                let v = es_seminorm(&r, &phi, rho, j, &[1, 0], &b).unwrap();
                assert!(v.is_finite() && v >= 0.0);
                assert!(v < 1e3, "rho={rho} j={j}: {v}");
            }
        }
    }

    #[test]
    fn es_seminorm_refuses_m2() {
        let r = m2_realization();
        let phi = gaussian(&r, 1.0);
        let b = Box::cube(3, 3.0, 1);
        assert!(matches!(
            es_seminorm(&r, &phi, 1.0, 0, &[0, 0, 0], &b),
            Err(Error::NotExponential(_))
        ));
    }

    #[test]
    fn frame_change_identity_at_origin() {
        for r in [heisenberg_realization(), axb_realization(), m2_realization()] {
            let (c, cond) = frame_change(&r, &r.identity()).unwrap();
            for i in 0..r.dim() {
                for j in 0..r.dim() {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((c[(i, j)] - expected).abs() < 1e-8, "{c:?}");
                }
            }
            assert!(cond < 1.0 + 1e-6);
        }
    }

    #[test]
    fn frame_change_consistent_with_coordinate_derivatives() {
        for r in [heisenberg_realization(), m2_realization()] {
            let phi = oscillating_gaussian(&r, &[1.0, -1.0, 2.0], 1.0);
            let g = GroupElement::new(vec![0.0; r.k()], vec![0.4; r.d()]).unwrap();
            let g = if r.k() > 0 {
                GroupElement::new(vec![0.6], vec![0.4; r.d()]).unwrap()
            } else {
                g
            };
            let (c, _) = frame_change(&r, &g).unwrap();
            for i in 0..r.dim() {
                let mut alpha = vec![0; r.dim()];
                alpha[i] = 1;
                let lhs = coordinate_derivative(&r, &phi, &alpha, &g).unwrap();
                let mut rhs = Complex64::new(0.0, 0.0);
                for l in 0..r.dim() {
                    let mut beta = vec![0; r.dim()];
                    beta[l] = 1;
                    rhs += left_derivative(&r, &phi, &beta, &g).unwrap() * c[(i, l)];
                }
                assert!((lhs - rhs).norm() < 1e-5, "axis {i}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn frame_change_heisenberg_polynomial_entries() {
        // ∂_x = X + (y/2)Z, ∂_y = Y − (x/2)Z, ∂_z = Z
        let r = heisenberg_realization();
        let (x, y) = (0.7, -1.3);
        let g = GroupElement::new(vec![], vec![x, y, 0.4]).unwrap();
        let (c, _) = frame_change(&r, &g).unwrap();
        assert!((c[(0, 0)] - 1.0).abs() < 1e-8);
        assert!((c[(0, 2)] - y / 2.0).abs() < 1e-8, "{c:?}");
        assert!((c[(1, 2)] + x / 2.0).abs() < 1e-8, "{c:?}");
        assert!((c[(2, 2)] - 1.0).abs() < 1e-8);
        assert!(c[(0, 1)].abs() < 1e-8 && c[(1, 0)].abs() < 1e-8);
    }

    #[test]
    fn frame_change_m2_rotation_entries() {
        // the n-block of the frame matrix is the rotation by t: each
        // coordinate field decomposes in the nilradical frame with cos t on
        // the diagonal and ±sin t off it
        let r = m2_realization();
        let t = 0.8f64;
        let g = GroupElement::new(vec![t], vec![0.3, -0.4]).unwrap();
        let (c, _) = frame_change(&r, &g).unwrap();
        assert!((c[(1, 1)] - t.cos()).abs() < 1e-8, "{c:?}");
        assert!((c[(2, 2)] - t.cos()).abs() < 1e-8, "{c:?}");
        assert!((c[(1, 2)].abs() - t.sin().abs()).abs() < 1e-8, "{c:?}");
        assert!((c[(1, 2)] + c[(2, 1)]).abs() < 1e-8, "{c:?}");
    }

    #[test]
    fn probe_library_labels_and_lookup() {
        let r = axb_realization();
        let lib = probe_library(&r);
        assert_eq!(lib.len(), 7);
        assert!(probe(&r, "gauss").is_ok());
        assert!(probe(&r, "nope").is_err());
        let b = Box::cube(2, 5.0, 1);
        for p in &lib {
            assert!(p.metadata_consistent(r.k(), &b), "{}", p.label());
        }
    }

    #[test]
    fn multi_index_enumeration() {
        assert_eq!(multi_indices(3, 2).len(), 10);
        assert_eq!(multi_indices(2, 3).len(), 10);
        assert!(multi_indices(3, 3).len() == 20);
    }

    #[test]
    fn lq_linfty_comparison_on_axb() {
        let r = axb_realization();
        let w = Weight::new(&r);
        let probes: Vec<SmoothFunction> = probe_library(&r).into_iter().take(4).collect();
        let b = Box::cube(2, 6.0, 12);
        let report = lq_linfty_comparison(&r, &w, &probes, &b).unwrap();
        assert!(report.forward_constant <= COMPARISON_CAP);
        assert!(report.reverse_constant <= COMPARISON_CAP);
    }

    #[test]
    fn right_left_comparison_on_heisenberg() {
        let r = heisenberg_realization();
        let w = Weight::new(&r);
        let probes: Vec<SmoothFunction> = probe_library(&r).into_iter().take(3).collect();
        let b = Box::cube(3, 4.0, 1);
        let report = right_left_comparison(&r, &w, &probes, &b).unwrap();
        assert!(report.forward_constant <= COMPARISON_CAP);
        assert!(report.reverse_constant <= COMPARISON_CAP);
    }

    #[test]
    fn left_haar_l1_converges_for_gaussian() {
        let r = axb_realization();
        let phi = gaussian(&r, 1.0);
        let (partials, convergent) = left_haar_l1(&r, &phi, 4, 12).unwrap();
        assert!(convergent, "partials {partials:?}");
        assert!(partials.iter().all(|p| p.is_finite()));
    }

    #[test]
    fn modular_function_is_derivative_eigenfunction() {
        // on ax+b, δ(t,y) = e^t, so X_T δ = δ (eigenvalue 1)
        let r = axb_realization();
        let own = r.clone();
        let delta = SmoothFunction::new(
            "modular",
            Decay::SlowlyIncreasing {
                order: 2,
                amplitude: f64::INFINITY,
            },
            move |g| Complex64::new(own.modular(g).unwrap_or(f64::NAN), 0.0),
        );
        for (t, y) in [(0.0, 0.0), (0.7, -0.2), (-1.1, 0.9)] {
            let g = GroupElement::new(vec![t], vec![y]).unwrap();
            let d = left_derivative(&r, &delta, &[1, 0], &g).unwrap();
            let ratio = d.re / r.modular(&g).unwrap();
            assert!((ratio - 1.0).abs() < 1e-6, "ratio {ratio} at ({t},{y})");
        }
    }

    #[test]
    fn convolution_continuity_bound_on_line() {
        // ‖φ∗ψ‖^∞_{1,0} ≤ C‖φ‖^∞_{1,0}‖ψ‖^∞_{2,0} with a modest constant
        let r = abelian_realization(1);
        let w = Weight::new(&r);
        let phi = gaussian(&r, 1.0);
        let psi = gaussian(&r, 2.0);
        let budget = ConvolutionBudget {
            points_per_axis: 24,
            ..Default::default()
        };
        let own = r.clone();
        let (p2, s2) = (phi.clone(), psi.clone());
        let conv = SmoothFunction::new(
            "phi*psi",
            Decay::Gaussian {
                rate_t: 0.5,
                rate_n: 0.5,
                amplitude: 2.0,
            },
            move |g| convolve(&own, &p2, &s2, g, &budget).map(|v| v.value).unwrap(),
        );
        let b = Box::cube(1, 6.0, 24);
        let spec1 = SeminormSpec::new(LebesgueExponent::Infinity, 1, vec![0]).unwrap();
        let spec2 = SeminormSpec::new(LebesgueExponent::Infinity, 2, vec![0]).unwrap();
        let lhs = seminorm(&r, &w, &conv, &spec1, &b).unwrap().value;
        let rhs = seminorm(&r, &w, &phi, &spec1, &b).unwrap().value
            * seminorm(&r, &w, &psi, &spec2, &b).unwrap().value;
        assert!(lhs <= 1e3 * rhs, "lhs {lhs} rhs {rhs}");
    }

    #[test]
    fn metadata_spot_check_flags_wrong_envelope() {
        let r = abelian_realization(1);
        let good = gaussian(&r, 1.0);
        let b = Box::cube(1, 2.0, 1);
        assert!(good.metadata_consistent(r.k(), &b));
        let bad = SmoothFunction::new(
            "lying",
            Decay::Gaussian {
                rate_t: 50.0,
                rate_n: 50.0,
                amplitude: 1.0,
            },
            |g| Complex64::new((-g.coords()[0].powi(2)).exp(), 0.0),
        );
        assert!(!bad.metadata_consistent(r.k(), &b));
    }
}

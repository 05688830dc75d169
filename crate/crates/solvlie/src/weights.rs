//! The weight function σ and machine checks of its four structural
//! properties: volume compensation, modular domination, inverse equivalence,
//! and sub-polynomiality.
//!
//! σ(g) = max(‖Ad(g)‖, ‖Ad(g⁻¹)‖) · (1 + |t| + |n|), where the word-length
//! factor of the abstract definition is replaced by its Euclidean surrogate;
//! the two are mutually polynomially bounded, so the induced function space
//! is the same and every property survives with adjusted integer exponents.
//! Exponents are always fitted from samples and reported, never hard-coded.

use crate::error::{Error, Result};
use crate::fit::minimal_integer_exponent;
use crate::numerics::linalg;
use crate::numerics::quad::{self, Box};
use crate::numerics::operator_norm;
use crate::realization::{GroupElement, Realization};
use serde::Serialize;

/// Box half-widths used for the standard sampling schedule; doubling across
/// scales exposes exponential regimes.
pub const SAMPLE_SCALES: [f64; 3] = [1.0, 8.0, 64.0];

/// Constant cap for all exponent fits.
pub const CONSTANT_CAP: f64 = 1e3;

const MAX_FIT_EXPONENT: usize = 8;

/// The weight function attached to a realization.
pub struct Weight<'a> {
    realization: &'a Realization,
}

#[derive(Debug, Clone, Serialize)]
pub struct VolumeReport {
    pub exponent: usize,
    pub partial_integrals: Vec<f64>,
    pub increments: Vec<f64>,
    pub convergent: bool,
    /// Fitted q of the size-domination bound (1+|t|+|n|) ≤ C σ^q.
    pub fitted_q: usize,
    /// The two candidate sufficient exponents (k+d+2)/q and (k+d+2)·q, with
    /// the convergence verdict the numerics support for each.
    pub candidate_exponents: [usize; 2],
    pub candidate_convergent: [bool; 2],
}

#[derive(Debug, Clone, Serialize)]
pub struct ModularReport {
    pub samples: usize,
    pub max_ratio: f64,
    pub violations: Vec<GroupElement>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExponentFit {
    pub exponent: usize,
    pub constant: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct InverseReport {
    pub samples: usize,
    pub forward: ExponentFit,
    pub backward: ExponentFit,
}

#[derive(Debug, Clone, Serialize)]
pub struct SubpolynomialReport {
    pub samples: usize,
    pub fit: ExponentFit,
}

#[derive(Debug, Clone, Serialize)]
pub struct EuclideanComparison {
    pub samples: usize,
    /// σ ≤ C (1+‖g‖)^p
    pub upper: ExponentFit,
    /// 1+‖g‖ ≤ C σ^p
    pub lower: ExponentFit,
}

impl<'a> Weight<'a> {
    pub fn new(realization: &'a Realization) -> Self {
        Weight { realization }
    }

    pub fn realization(&self) -> &Realization {
        self.realization
    }

    /// σ(g); checked to be ≥ 1.
    pub fn sigma(&self, g: &GroupElement) -> Result<f64> {
        let v = self.realization.weight(g)?;
        if v < 1.0 - 1e-9 {
            return Err(Error::Contract(format!("σ = {v} < 1")));
        }
        Ok(v.max(1.0))
    }

    /// The operator-norm factor max(‖Ad(g)‖, ‖Ad(g⁻¹)‖); invariant under
    /// g ↦ g⁻¹.
    pub fn growth_factor(&self, g: &GroupElement) -> Result<f64> {
        let r = self.realization;
        let a = operator_norm(&r.adjoint(g)?);
        let b = operator_norm(&r.adjoint(&r.inverse(g)?)?);
        Ok(a.max(b))
    }

    /// Samples across the standard doubling scales, `per_scale` each.
    pub fn standard_samples(&self, per_scale: usize, seed: u64) -> Vec<GroupElement> {
        let mut out = Vec::with_capacity(per_scale * SAMPLE_SCALES.len());
        for (i, &s) in SAMPLE_SCALES.iter().enumerate() {
            out.extend(
                self.realization
                    .sample_elements(s, per_scale, seed.wrapping_add(i as u64)),
            );
        }
        out
    }

    fn sigma_pairs<FBase, FVal>(
        &self,
        samples: &[GroupElement],
        base: FBase,
        value: FVal,
    ) -> Result<Vec<(f64, f64)>>
    where
        FBase: Fn(&Self, &GroupElement) -> Result<f64>,
        FVal: Fn(&Self, &GroupElement) -> Result<f64>,
    {
        samples
            .iter()
            .map(|g| Ok((base(self, g)?, value(self, g)?)))
            .collect()
    }

    /// Minimal integer q with (1 + |t| + |n|) ≤ C σ^q on the samples. For
    /// this surrogate weight the length factor is a factor of σ, so q = 1 is
    /// expected; it is fitted rather than assumed.
    pub fn fit_size_exponent(&self, samples: &[GroupElement]) -> (usize, f64) {
        let pairs: Vec<(f64, f64)> = samples
            .iter()
            .filter_map(|g| {
                let s = self.sigma(g).ok()?;
                Some((s, 1.0 + linalg::norm(&g.t) + linalg::norm(&g.n)))
            })
            .collect();
        minimal_integer_exponent(&pairs, MAX_FIT_EXPONENT, CONSTANT_CAP)
            .unwrap_or((MAX_FIT_EXPONENT, f64::INFINITY))
    }

    /// Integrates σ^{-p} over a nested box sequence and reports whether the
    /// increments decay geometrically. Also evaluates both readings of the
    /// sufficient-exponent formula from the fitted q.
    pub fn check_volume_compensation(&self, p: usize, boxes: &[Box]) -> Result<VolumeReport> {
        if boxes.is_empty() {
            return Err(Error::Input("empty box sequence".into()));
        }
        let samples = self.standard_samples(200, 404);
        let (fitted_q, _) = self.fit_size_exponent(&samples);
        let kd2 = self.realization.dim() + 2;
        let candidates = [kd2.div_ceil(fitted_q), kd2 * fitted_q];
        let mut all = Vec::new();
        for &q in std::iter::once(&p).chain(candidates.iter()) {
            all.push(self.volume_sequence(q, boxes)?);
        }
        let (partials, convergent) = all[0].clone();
        let increments: Vec<f64> = std::iter::once(partials[0])
            .chain(partials.windows(2).map(|w| w[1] - w[0]))
            .collect();
        Ok(VolumeReport {
            exponent: p,
            partial_integrals: partials,
            increments,
            convergent,
            fitted_q,
            candidate_exponents: candidates,
            candidate_convergent: [all[1].1, all[2].1],
        })
    }

    fn volume_sequence(&self, p: usize, boxes: &[Box]) -> Result<(Vec<f64>, bool)> {
        let r = self.realization;
        let integrand = |coords: &[f64]| {
            let g = GroupElement {
                t: coords[..r.k()].to_vec(),
                n: coords[r.k()..].to_vec(),
            };
            match self.sigma(&g) {
                Ok(s) => s.powi(-(p as i32)),
                Err(_) => 0.0,
            }
        };
        let mut partials: Vec<f64> = Vec::with_capacity(boxes.len());
        for (i, b) in boxes.iter().enumerate() {
            if b.dim() != r.dim() {
                return Err(Error::Shape("box dimension != group dimension".into()));
            }
            // When a box is exactly the previous one doubled, accumulate
            // the shell integral on a tiling at the shell's own scale: the
            // integrand concentrates near the identity, and re-integrating
            // a large box at fixed resolution would miss that peak.
            let doubled = i > 0
                && boxes[i - 1].dim() == b.dim()
                && b.half_widths
                    .iter()
                    .zip(&boxes[i - 1].half_widths)
                    .all(|(o, inner)| (o - 2.0 * inner).abs() <= 1e-12 * o.abs());
            if doubled {
                let inner = &boxes[i - 1];
                let mut shell = 0.0;
                // Four cells per axis tile the outer box; the middle 2^m
                // cells reproduce the inner box exactly and are skipped.
                let m = b.dim();
                let mut cell = vec![0usize; m];
                loop {
                    if cell.iter().any(|&c| c == 0 || c == 3) {
                        let lo: Vec<f64> = cell
                            .iter()
                            .zip(&inner.half_widths)
                            .map(|(&c, h)| (c as f64 - 2.0) * h)
                            .collect();
                        let hi: Vec<f64> = lo
                            .iter()
                            .zip(&inner.half_widths)
                            .map(|(l, h)| l + h)
                            .collect();
                        shell +=
                            quad::integrate_rectangle(&integrand, &lo, &hi, b.points_per_axis)?;
                    }
                    let mut axis = 0;
                    loop {
                        if axis == m {
                            break;
                        }
                        cell[axis] += 1;
                        if cell[axis] < 4 {
                            break;
                        }
                        cell[axis] = 0;
                        axis += 1;
                    }
                    if axis == m {
                        break;
                    }
                }
                let prev = *partials.last().unwrap();
                partials.push(prev + shell);
            } else {
                partials.push(quad::integrate(&integrand, b)?.value);
            }
        }
        let mut increments: Vec<f64> = partials.windows(2).map(|w| w[1] - w[0]).collect();
        if increments.is_empty() {
            increments.push(partials[0]);
        }
        // geometric decay of the tail increments
        let mut convergent = true;
        for w in increments.windows(2) {
            let (prev, next) = (w[0].abs().max(1e-300), w[1].abs());
            if next > 0.75 * prev && next > 1e-12 * partials.last().unwrap().abs().max(1.0) {
                convergent = false;
            }
        }
        Ok((partials, convergent))
    }

    /// Default nested-cube schedule for volume checks.
    pub fn default_boxes(&self, levels: usize) -> Vec<Box> {
        let m = self.realization.dim();
        let points = if m <= 3 { 10 } else { 6 };
        (0..levels)
            .map(|i| Box::cube(m, (1 << i) as f64, points))
            .collect()
    }

    /// δ(g) ≤ σ(g)^m pointwise, no constant.
    pub fn check_modular_domination(&self, per_scale: usize, seed: u64) -> Result<ModularReport> {
        let r = self.realization;
        let m = r.dim() as i32;
        let samples = self.standard_samples(per_scale, seed);
        let mut max_ratio = 0.0f64;
        let mut violations = Vec::new();
        for g in &samples {
            let delta = r.modular(g)?;
            let bound = self.sigma(g)?.powi(m);
            let ratio = delta / bound;
            max_ratio = max_ratio.max(ratio);
            if ratio > 1.0 {
                violations.push(g.clone());
            }
        }
        Ok(ModularReport {
            samples: samples.len(),
            max_ratio,
            violations,
        })
    }

    /// Minimal integer r with σ(g⁻¹) ≤ C σ(g)^r on the samples (both
    /// directions).
    pub fn check_inverse_equivalence(&self, per_scale: usize, seed: u64) -> Result<InverseReport> {
        let samples = self.standard_samples(per_scale, seed);
        let pairs = self.sigma_pairs(
            &samples,
            |w, g| w.sigma(g),
            |w, g| w.sigma(&w.realization.inverse(g)?),
        )?;
        let swapped: Vec<(f64, f64)> = pairs.iter().map(|&(a, b)| (b, a)).collect();
        let forward = minimal_integer_exponent(&pairs, MAX_FIT_EXPONENT, CONSTANT_CAP)
            .ok_or_else(|| Error::Contract("no inverse-equivalence exponent ≤ 8".into()))?;
        let backward = minimal_integer_exponent(&swapped, MAX_FIT_EXPONENT, CONSTANT_CAP)
            .ok_or_else(|| Error::Contract("no inverse-equivalence exponent ≤ 8".into()))?;
        Ok(InverseReport {
            samples: samples.len(),
            forward: ExponentFit {
                exponent: forward.0,
                constant: forward.1,
            },
            backward: ExponentFit {
                exponent: backward.0,
                constant: backward.1,
            },
        })
    }

    /// Minimal integer s with σ(g·g') ≤ C (σ(g)·σ(g'))^s on sampled pairs.
    pub fn check_subpolynomial(&self, per_scale: usize, seed: u64) -> Result<SubpolynomialReport> {
        let gs = self.standard_samples(per_scale, seed);
        let hs = self.standard_samples(per_scale, seed.wrapping_add(7919));
        let mut pairs = Vec::with_capacity(gs.len());
        for (g, h) in gs.iter().zip(&hs) {
            let prod = self.realization.multiply(g, h)?;
            pairs.push((self.sigma(g)? * self.sigma(h)?, self.sigma(&prod)?));
        }
        let fit = minimal_integer_exponent(&pairs, MAX_FIT_EXPONENT, CONSTANT_CAP)
            .ok_or_else(|| Error::Contract("no sub-polynomial exponent ≤ 8".into()))?;
        Ok(SubpolynomialReport {
            samples: pairs.len(),
            fit: ExponentFit {
                exponent: fit.0,
                constant: fit.1,
            },
        })
    }

    /// Two-sided polynomial comparison between σ and 1+‖g‖ (coordinates
    /// Euclidean norm).
    pub fn compare_with_euclidean(
        &self,
        per_scale: usize,
        seed: u64,
    ) -> Result<EuclideanComparison> {
        let samples = self.standard_samples(per_scale, seed);
        let mut up = Vec::new();
        let mut down = Vec::new();
        for g in &samples {
            let s = self.sigma(g)?;
            let e = 1.0 + g.norm();
            up.push((e, s));
            down.push((s, e));
        }
        let upper = minimal_integer_exponent(&up, MAX_FIT_EXPONENT, CONSTANT_CAP)
            .ok_or_else(|| Error::Contract("σ not polynomially bounded by 1+‖g‖".into()))?;
        let lower = minimal_integer_exponent(&down, MAX_FIT_EXPONENT, CONSTANT_CAP)
            .ok_or_else(|| Error::Contract("1+‖g‖ not polynomially bounded by σ".into()))?;
        Ok(EuclideanComparison {
            samples: samples.len(),
            upper: ExponentFit {
                exponent: upper.0,
                constant: upper.1,
            },
            lower: ExponentFit {
                exponent: lower.0,
                constant: lower.1,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realization::tests::{
        axb_realization, heis_roots_realization, heisenberg_realization, m2_realization,
    };

    #[test]
    fn sigma_at_identity_is_one() {
        for r in [heisenberg_realization(), axb_realization(), m2_realization()] {
            let w = Weight::new(&r);
            assert!((w.sigma(&r.identity()).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn axb_sigma_closed_form_on_axis() {
        let r = axb_realization();
        let w = Weight::new(&r);
        for t in [-3.0, -0.5, 0.0, 1.0, 4.0] {
            let g = GroupElement::new(vec![t], vec![0.0]).unwrap();
            let expected = (t.abs()).exp() * (1.0 + t.abs());
            let got = w.sigma(&g).unwrap();
            assert!(
                (got - expected).abs() < 1e-9 * expected,
                "σ({t},0) = {got}, expected {expected}"
            );
        }
    }

    #[test]
    fn growth_factor_inverse_invariant() {
        for r in [axb_realization(), m2_realization(), heis_roots_realization()] {
            let w = Weight::new(&r);
            for g in r.sample_elements(2.0, 20, 17) {
                let a = w.growth_factor(&g).unwrap();
                let b = w.growth_factor(&r.inverse(&g).unwrap()).unwrap();
                assert!((a - b).abs() < 1e-9 * a.max(1.0));
            }
        }
    }

    #[test]
    fn sigma_always_at_least_one() {
        for r in [
            heisenberg_realization(),
            axb_realization(),
            m2_realization(),
            heis_roots_realization(),
        ] {
            let w = Weight::new(&r);
            for g in w.standard_samples(50, 23) {
                assert!(w.sigma(&g).unwrap() >= 1.0);
            }
        }
    }

    #[test]
    fn size_exponent_is_one_for_surrogate() {
        let r = m2_realization();
        let w = Weight::new(&r);
        let samples = w.standard_samples(100, 29);
        let (q, c) = w.fit_size_exponent(&samples);
        assert_eq!(q, 1);
        assert!(c <= 1.0 + 1e-9);
    }

    #[test]
    fn volume_compensation_heisenberg() {
        let r = heisenberg_realization();
        let w = Weight::new(&r);
        let report = w
            .check_volume_compensation(8, &w.default_boxes(5))
            .unwrap();
        assert!(report.convergent, "partials {:?}", report.partial_integrals);
        assert!(report.candidate_convergent[0]);
        assert!(report.candidate_convergent[1]);
    }

    #[test]
    fn volume_compensation_axb() {
        let r = axb_realization();
        let w = Weight::new(&r);
        let report = w
            .check_volume_compensation(4, &w.default_boxes(6))
            .unwrap();
        assert!(report.convergent);
        // 1-D oracle: with σ(t,y) ≥ e^{|t|}(1+|t|+|y|), the integral is
        // bounded by (∫ e^{-4|t|} dt)(∫ (1+|y|)^{-4}... loosely; just check
        // the limit is finite and small
        assert!(*report.partial_integrals.last().unwrap() < 2.0);
    }

    #[test]
    fn volume_exponent_zero_diverges() {
        let r = axb_realization();
        let w = Weight::new(&r);
        let report = w
            .check_volume_compensation(0, &w.default_boxes(5))
            .unwrap();
        assert!(!report.convergent);
        // the integrand is 1, so partials are box volumes
        let vols: Vec<f64> = w.default_boxes(5).iter().map(|b| b.volume()).collect();
        for (p, v) in report.partial_integrals.iter().zip(&vols) {
            assert!((p - v).abs() < 1e-6 * v);
        }
    }

    #[test]
    fn modular_domination_no_violations() {
        for r in [
            heisenberg_realization(),
            axb_realization(),
            m2_realization(),
            heis_roots_realization(),
        ] {
            let w = Weight::new(&r);
            let report = w.check_modular_domination(100, 31).unwrap();
            assert!(report.violations.is_empty());
            assert!(report.max_ratio <= 1.0);
        }
    }

    #[test]
    fn axb_modular_point_check() {
        // δ(5,0) = e^5 while σ²(5,0) = e^{10}(1+5)²
        let r = axb_realization();
        let w = Weight::new(&r);
        let g = GroupElement::new(vec![5.0], vec![0.0]).unwrap();
        let delta = r.modular(&g).unwrap();
        assert!((delta - 5.0f64.exp()).abs() < 1e-9 * delta);
        assert!(delta <= w.sigma(&g).unwrap().powi(2));
    }

    #[test]
    fn inverse_equivalence_fits() {
        let r = heisenberg_realization();
        let w = Weight::new(&r);
        let report = w.check_inverse_equivalence(400, 37).unwrap();
        // inverse is negation: σ̌ = σ exactly
        assert_eq!(report.forward.exponent, 1);
        assert!(report.forward.constant <= 1.0 + 1e-9);
        let r = axb_realization();
        let w = Weight::new(&r);
        let report = w.check_inverse_equivalence(400, 37).unwrap();
        assert!(report.forward.exponent <= 2);
        assert!(report.backward.exponent <= 2);
    }

    #[test]
    fn identity_sample_inverse_fit_trivial() {
        let r = axb_realization();
        let w = Weight::new(&r);
        let s = w.sigma(&r.identity()).unwrap();
        let fit = minimal_integer_exponent(&[(s, s)], 8, 1e3).unwrap();
        assert_eq!(fit, (1, 1.0));
    }

    #[test]
    fn subpolynomial_fits() {
        let r1 = Realization::new(
            crate::algebra::test_algebras::abelian(1),
            crate::algebra::Subspace::full(1),
            5,
        )
        .unwrap();
        let w = Weight::new(&r1);
        let report = w.check_subpolynomial(400, 41).unwrap();
        assert_eq!(report.fit.exponent, 1);

        let r = heisenberg_realization();
        let w = Weight::new(&r);
        let report = w.check_subpolynomial(400, 41).unwrap();
        assert!(report.fit.exponent <= 2);

        let r = axb_realization();
        let w = Weight::new(&r);
        let report = w.check_subpolynomial(400, 41).unwrap();
        assert!(report.fit.exponent <= 3);
    }

    #[test]
    fn monotone_fits_under_sample_growth() {
        let r = m2_realization();
        let w = Weight::new(&r);
        let small = w.check_subpolynomial(100, 43).unwrap();
        let large = w.check_subpolynomial(500, 43).unwrap();
        assert!(large.fit.exponent >= small.fit.exponent);
    }

    #[test]
    fn heisenberg_euclidean_comparison() {
        let r = heisenberg_realization();
        let w = Weight::new(&r);
        let cmp = w.compare_with_euclidean(400, 47).unwrap();
        assert!(cmp.upper.exponent <= 3);
        assert_eq!(cmp.lower.exponent, 1);
    }

    #[test]
    fn m2_sandwich() {
        // C⁻¹(1+‖g‖) ≤ σ ≤ C(1+‖g‖)² with C ≤ 10³
        let r = m2_realization();
        let w = Weight::new(&r);
        let cmp = w.compare_with_euclidean(400, 53).unwrap();
        assert!(cmp.upper.exponent <= 2, "upper {:?}", cmp.upper);
        assert_eq!(cmp.lower.exponent, 1);
        assert!(cmp.upper.constant <= 1e3);
        assert!(cmp.lower.constant <= 1e3);
    }

    use crate::realization::Realization;
}

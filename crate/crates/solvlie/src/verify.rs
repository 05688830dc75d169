//! Sampled verification suites shared by the CLI and the integration tests:
//! group axioms, Haar/modular behavior, and the four weight properties.

use crate::error::Result;
use crate::numerics::matrix::Matrix;
use crate::realization::{GroupElement, Realization};
use crate::weights::{
    InverseReport, ModularReport, SubpolynomialReport, VolumeReport, Weight,
};
use serde::Serialize;

/// Relative tolerance for the group-axiom residuals.
pub const AXIOM_TOL: f64 = 1e-9;
/// Absolute tolerance for the numerical right-translation Jacobian.
pub const JACOBIAN_TOL: f64 = 1e-6;

#[derive(Clone, Debug, Serialize)]
pub struct AxiomReport {
    pub samples: usize,
    pub max_associativity: f64,
    pub max_identity: f64,
    pub max_inverse: f64,
    pub pass: bool,
}

/// Associativity, identity, and inverse residuals over seeded sample
/// triples; residuals are relative to 1 + the element norm.
pub fn group_axiom_report(r: &Realization, triples: usize, seed: u64) -> Result<AxiomReport> {
    let e = r.identity();
    let per_scale = triples.div_ceil(3);
    let mut max_assoc = 0.0f64;
    let mut max_id = 0.0f64;
    let mut max_inv = 0.0f64;
    let mut count = 0usize;
    for (si, scale) in [0.5, 1.5, 3.0].into_iter().enumerate() {
        let s = seed ^ ((si as u64) << 8);
        let gs = r.sample_elements(scale, per_scale, s);
        let hs = r.sample_elements(scale, per_scale, s ^ 0x1111);
        let ls = r.sample_elements(scale, per_scale, s ^ 0x2222);
        for ((g, h), l) in gs.iter().zip(&hs).zip(&ls) {
            let gh_l = r.multiply(&r.multiply(g, h)?, l)?;
            let g_hl = r.multiply(g, &r.multiply(h, l)?)?;
            let rel = 1.0 + gh_l.norm();
            max_assoc = max_assoc.max(gh_l.distance(&g_hl) / rel);
            max_id = max_id
                .max(r.multiply(g, &e)?.distance(g) / (1.0 + g.norm()))
                .max(r.multiply(&e, g)?.distance(g) / (1.0 + g.norm()));
            let inv = r.inverse(g)?;
            max_inv = max_inv
                .max(r.multiply(g, &inv)?.distance(&e))
                .max(r.multiply(&inv, g)?.distance(&e));
            count += 1;
        }
    }
    let pass = max_assoc < AXIOM_TOL && max_id < AXIOM_TOL && max_inv < AXIOM_TOL;
    Ok(AxiomReport {
        samples: count,
        max_associativity: max_assoc,
        max_identity: max_id,
        max_inverse: max_inv,
        pass,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HaarReport {
    pub samples: usize,
    /// Max |det J − 1| for right translations (right-invariance of dt dn).
    pub max_right_jacobian_deviation: f64,
    /// Max |det J − δ(h)| for left translations.
    pub max_left_jacobian_deviation: f64,
    /// Max |δ(gh) − δ(g)δ(h)| relative residual.
    pub max_modular_residual: f64,
    pub pass: bool,
}

fn jacobian_det<F: Fn(&[f64]) -> Result<Vec<f64>>>(f: F, at: &[f64]) -> Result<f64> {
    let m = at.len();
    let h = 1e-5;
    let mut j = Matrix::zeros(m, m);
    for l in 0..m {
        let mut p = at.to_vec();
        p[l] += h;
        let mut q = at.to_vec();
        q[l] -= h;
        let fp = f(&p)?;
        let fq = f(&q)?;
        for i in 0..m {
            j[(i, l)] = (fp[i] - fq[i]) / (2.0 * h);
        }
    }
    Ok(j.determinant())
}

fn from_coords(r: &Realization, coords: &[f64]) -> GroupElement {
    GroupElement {
        t: coords[..r.k()].to_vec(),
        n: coords[r.k()..].to_vec(),
    }
}

/// Numerical Jacobians of left/right translation against 1 and δ, plus the
/// multiplicativity of δ, on seeded samples.
pub fn haar_report(r: &Realization, count: usize, seed: u64) -> Result<HaarReport> {
    let gs = r.sample_elements(0.8, count, seed);
    let hs = r.sample_elements(0.8, count, seed ^ 0x3333);
    let mut right_dev = 0.0f64;
    let mut left_dev = 0.0f64;
    let mut modular_res = 0.0f64;
    for (g, h) in gs.iter().zip(&hs) {
        let right = jacobian_det(
            |coords| Ok(r.multiply(&from_coords(r, coords), h)?.coords()),
            &g.coords(),
        )?;
        right_dev = right_dev.max((right - 1.0).abs());
        let left = jacobian_det(
            |coords| Ok(r.multiply(h, &from_coords(r, coords))?.coords()),
            &g.coords(),
        )?;
        let delta = r.modular(h)?;
        left_dev = left_dev.max((left - delta).abs() / delta.max(1.0));
        let lhs = r.modular(&r.multiply(g, h)?)?;
        let rhs = r.modular(g)? * r.modular(h)?;
        modular_res = modular_res.max((lhs - rhs).abs() / rhs.max(1.0));
    }
    let pass = right_dev < JACOBIAN_TOL && left_dev < JACOBIAN_TOL && modular_res < AXIOM_TOL;
    Ok(HaarReport {
        samples: gs.len(),
        max_right_jacobian_deviation: right_dev,
        max_left_jacobian_deviation: left_dev,
        max_modular_residual: modular_res,
        pass,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PropertiesReport {
    /// Property 1: ∫ σ^{−p} convergence verdict for the reported exponent.
    pub volume: VolumeReport,
    /// Property 2: sub-polynomiality σ(gh) ≤ C(σ(g)σ(h))^s.
    pub subpolynomial: SubpolynomialReport,
    /// Property 3: inverse equivalence σ(g⁻¹) ≤ Cσ(g)^r both ways.
    pub inverse: InverseReport,
    /// Property 4: δ ≤ σ^m pointwise.
    pub modular: ModularReport,
    pub pass: bool,
}

/// Runs the four weight-property checks at standard sampling scales.
pub fn properties_report(r: &Realization, per_scale: usize, seed: u64) -> Result<PropertiesReport> {
    let w = Weight::new(r);
    let samples = w.standard_samples(per_scale, seed);
    let (q, _) = w.fit_size_exponent(&samples);
    let p = (r.dim() + 2) * q;
    let volume = w.check_volume_compensation(p, &w.default_boxes(4))?;
    let subpolynomial = w.check_subpolynomial(per_scale, seed ^ 0x51)?;
    let inverse = w.check_inverse_equivalence(per_scale, seed ^ 0x52)?;
    let modular = w.check_modular_domination(per_scale, seed ^ 0x53)?;
    let pass = volume.convergent && modular.violations.is_empty();
    Ok(PropertiesReport {
        volume,
        subpolynomial,
        inverse,
        modular,
        pass,
    })
}

//! Direct products G₁×G₂ in a coherent block realization: block structure
//! constants, 𝔠 = 𝔠₁⊕𝔠₂, the σ ≤ Cσ₁σ₂ estimate, tensor functions, and the
//! kernel pairing ⟨K, φ⊗ψ⟩.

use crate::algebra::{LieAlgebra, Subspace};
use crate::distributions::{default_pairing_box, pair, PairingValue, TemperedDistribution};
use crate::error::{Error, Result};
use crate::fit;
use crate::numerics::quad::Box as QuadBox;
use crate::realization::{GroupElement, Realization};
use crate::schwartz::{membership_report, Decay, SmoothFunction};
use crate::weights::Weight;
use serde::Serialize;

/// Residual tolerance for the block-product invariant.
const BLOCK_TOL: f64 = 1e-10;
/// Two factor eigenvalues closer than this count as a collision.
const COLLISION_TOL: f64 = 1e-8;
/// Deterministic rescaling schedule for the second factor's general-position
/// element: reciprocals of successive primes.
const RESCALES: [f64; 8] = [
    1.0,
    1.0 / 2.0,
    1.0 / 3.0,
    1.0 / 5.0,
    1.0 / 7.0,
    1.0 / 11.0,
    1.0 / 13.0,
    1.0 / 17.0,
];

/// A direct product G₁×G₂ realized blockwise: the combined algebra is
/// 𝔤₁⊕𝔤₂ with block structure constants, 𝔠 = 𝔠₁⊕𝔠₂ and 𝔫 = 𝔫₁⊕𝔫₂ in factor
/// order, so group coordinates concatenate.
#[derive(Debug, Clone)]
pub struct ProductRealization {
    r1: Realization,
    r2: Realization,
    r: Realization,
    /// Rescaling applied to the second factor's general-position element to
    /// keep the union of adjoint eigenvalues collision-free.
    scale2: f64,
}

impl ProductRealization {
    pub fn factor1(&self) -> &Realization {
        &self.r1
    }

    pub fn factor2(&self) -> &Realization {
        &self.r2
    }

    /// The combined realization of G₁×G₂.
    pub fn realization(&self) -> &Realization {
        &self.r
    }

    pub fn scale2(&self) -> f64 {
        self.scale2
    }

    /// (g₁, g₂) ↦ g on the product: coordinates concatenate blockwise.
    pub fn inject(&self, g1: &GroupElement, g2: &GroupElement) -> Result<GroupElement> {
        if g1.t.len() != self.r1.k()
            || g1.n.len() != self.r1.d()
            || g2.t.len() != self.r2.k()
            || g2.n.len() != self.r2.d()
        {
            return Err(Error::Shape(
                "factor element dimensions do not match the factor realizations".into(),
            ));
        }
        let mut t = g1.t.clone();
        t.extend_from_slice(&g2.t);
        let mut n = g1.n.clone();
        n.extend_from_slice(&g2.n);
        Ok(GroupElement { t, n })
    }

    /// g ↦ (g₁, g₂), the inverse of [`inject`](Self::inject).
    pub fn split(&self, g: &GroupElement) -> Result<(GroupElement, GroupElement)> {
        if g.t.len() != self.r.k() || g.n.len() != self.r.d() {
            return Err(Error::Shape(
                "element dimensions do not match the product realization".into(),
            ));
        }
        let (k1, d1) = (self.r1.k(), self.r1.d());
        Ok((
            GroupElement {
                t: g.t[..k1].to_vec(),
                n: g.n[..d1].to_vec(),
            },
            GroupElement {
                t: g.t[k1..].to_vec(),
                n: g.n[d1..].to_vec(),
            },
        ))
    }
}

fn embed_block(v: &[f64], offset: usize, total: usize) -> Vec<f64> {
    let mut out = vec![0.0; total];
    out[offset..offset + v.len()].copy_from_slice(v);
    out
}

fn ad_eigenvalues(alg: &LieAlgebra, x: &[f64]) -> Vec<num_complex::Complex64> {
    let m = alg.dim();
    let ad = alg.ad_matrix(x);
    let dm = nalgebra::DMatrix::from_fn(m, m, |i, j| ad[(i, j)]);
    dm.complex_eigenvalues()
        .iter()
        .map(|e| num_complex::Complex64::new(e.re, e.im))
        .collect()
}

/// Builds the direct product of two validated realizations. The combined
/// general-position element is (X₁, s·X₂); s runs through reciprocals of
/// successive primes until the nonzero adjoint eigenvalues of the two blocks
/// are disjoint.
pub fn direct_product(r1: &Realization, r2: &Realization, seed: u64) -> Result<ProductRealization> {
    let m1 = r1.dim();
    let m2 = r2.dim();
    let m = m1 + m2;

    // Block structure constants: each factor keeps its own brackets, cross
    // brackets vanish.
    let mut entries: Vec<(usize, usize, usize, f64)> = Vec::new();
    for i in 0..m1 {
        for j in (i + 1)..m1 {
            for k in 0..m1 {
                let v = r1.algebra().structure_constant(i, j, k);
                if v != 0.0 {
                    entries.push((i, j, k, v));
                }
            }
        }
    }
    for i in 0..m2 {
        for j in (i + 1)..m2 {
            for k in 0..m2 {
                let v = r2.algebra().structure_constant(i, j, k);
                if v != 0.0 {
                    entries.push((i + m1, j + m1, k + m1, v));
                }
            }
        }
    }
    let labels: Vec<String> = r1
        .algebra()
        .labels()
        .iter()
        .map(|l| format!("{l}.1"))
        .chain(r2.algebra().labels().iter().map(|l| format!("{l}.2")))
        .collect();
    let algebra = LieAlgebra::from_entries(m, &entries, Some(labels))?;

    let mut nil_basis: Vec<Vec<f64>> = r1
        .nilradical()
        .basis()
        .iter()
        .map(|b| embed_block(b, 0, m))
        .collect();
    nil_basis.extend(r2.nilradical().basis().iter().map(|b| embed_block(b, m1, m)));
    let nilradical = Subspace::new(m, nil_basis)?;

    let mut comp_basis: Vec<Vec<f64>> = r1
        .complement()
        .basis()
        .iter()
        .map(|b| embed_block(b, 0, m))
        .collect();
    comp_basis.extend(r2.complement().basis().iter().map(|b| embed_block(b, m1, m)));
    let complement = Subspace::new(m, comp_basis)?;

    // Resolve eigenvalue collisions between the two blocks by rescaling X₂.
    let ev1 = ad_eigenvalues(r1.algebra(), r1.general_position());
    let x2 = r2.general_position().to_vec();
    let mut chosen: Option<f64> = None;
    for &s in &RESCALES {
        let scaled: Vec<f64> = x2.iter().map(|v| v * s).collect();
        let ev2 = ad_eigenvalues(r2.algebra(), &scaled);
        let collision = ev1.iter().any(|a| {
            a.norm() > COLLISION_TOL
                && ev2
                    .iter()
                    .any(|b| b.norm() > COLLISION_TOL && (a - b).norm() < COLLISION_TOL)
        });
        if !collision {
            chosen = Some(s);
            break;
        }
    }
    let scale2 = chosen.ok_or_else(|| {
        Error::Construction(
            "adjoint eigenvalue collisions persist through the rescaling schedule; \
             rescale one factor's general-position element and rebuild"
                .into(),
        )
    })?;

    let mut x = embed_block(r1.general_position(), 0, m);
    for (i, v) in x2.iter().enumerate() {
        x[m1 + i] = v * scale2;
    }

    let r = Realization::with_general_position(algebra, nilradical, seed, x, Some(complement))?;

    // Rank test: the generalized 0-eigenspace of the product must be exactly
    // the sum of the factors' 0-eigenspaces.
    let expected = r1.zero_space().dim() + r2.zero_space().dim();
    if r.zero_space().dim() != expected {
        return Err(Error::Construction(format!(
            "product 0-eigenspace has dimension {}, expected {} = {} + {}",
            r.zero_space().dim(),
            expected,
            r1.zero_space().dim(),
            r2.zero_space().dim()
        )));
    }

    let pr = ProductRealization {
        r1: r1.clone(),
        r2: r2.clone(),
        r,
        scale2,
    };

    // Block-product invariant on a deterministic sample.
    let residual = block_product_residual(&pr, 16, seed ^ 0x5a)?;
    if residual > BLOCK_TOL {
        return Err(Error::Construction(format!(
            "block product residual {residual:.3e} exceeds {BLOCK_TOL:.0e}"
        )));
    }
    Ok(pr)
}

/// Max residual of multiply_G((g₁,g₂),(h₁,h₂)) against the blockwise factor
/// products over seeded samples.
pub fn block_product_residual(
    pr: &ProductRealization,
    pairs: usize,
    seed: u64,
) -> Result<f64> {
    let a1 = pr.r1.sample_elements(1.5, pairs, seed);
    let b1 = pr.r1.sample_elements(1.5, pairs, seed ^ 0x11);
    let a2 = pr.r2.sample_elements(1.5, pairs, seed ^ 0x22);
    let b2 = pr.r2.sample_elements(1.5, pairs, seed ^ 0x33);
    let mut worst = 0.0f64;
    for i in 0..pairs {
        let g = pr.inject(&a1[i], &a2[i])?;
        let h = pr.inject(&b1[i], &b2[i])?;
        let combined = pr.r.multiply(&g, &h)?;
        let p1 = pr.r1.multiply(&a1[i], &b1[i])?;
        let p2 = pr.r2.multiply(&a2[i], &b2[i])?;
        let blockwise = pr.inject(&p1, &p2)?;
        worst = worst.max(combined.distance(&blockwise));
    }
    Ok(worst)
}

#[derive(Clone, Debug, Serialize)]
pub struct SigmaProductReport {
    pub samples: usize,
    /// Minimal C with σ(g₁,g₂) ≤ C·σ₁(g₁)·σ₂(g₂) on all samples.
    pub constant: f64,
    /// Per-scale constants; stability means max ≤ 2·min.
    pub per_scale: Vec<f64>,
    pub stable: bool,
    /// Reverse-direction fit σ₁σ₂ ≤ C′·σ^{s′}, reported but not asserted.
    pub reverse_exponent: Option<usize>,
    pub reverse_constant: Option<f64>,
}

/// Fits the minimal constant in σ ≤ Cσ₁σ₂ on seeded samples at three scales,
/// with the reverse-direction polynomial fit reported alongside.
pub fn check_sigma_product(
    pr: &ProductRealization,
    per_scale: usize,
    seed: u64,
) -> Result<SigmaProductReport> {
    let scales = [1.0, 2.0, 4.0];
    let mut per_scale_c = Vec::with_capacity(scales.len());
    let mut constant = 0.0f64;
    let mut reverse_pairs: Vec<(f64, f64)> = Vec::new();
    let mut total = 0usize;
    for (si, &scale) in scales.iter().enumerate() {
        let s1 = pr.r1.sample_elements(scale, per_scale, seed ^ (si as u64));
        let s2 = pr
            .r2
            .sample_elements(scale, per_scale, seed ^ 0x100 ^ (si as u64));
        let mut c_here = 0.0f64;
        for (g1, g2) in s1.iter().zip(&s2) {
            let g = pr.inject(g1, g2)?;
            let sigma = pr.r.weight(&g)?;
            let product = pr.r1.weight(g1)? * pr.r2.weight(g2)?;
            c_here = c_here.max(sigma / product);
            reverse_pairs.push((sigma.max(1.0), product));
            total += 1;
        }
        constant = constant.max(c_here);
        per_scale_c.push(c_here);
    }
    let lo = per_scale_c.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = per_scale_c.iter().cloned().fold(0.0f64, f64::max);
    let reverse = fit::minimal_integer_exponent(&reverse_pairs, 6, 1e3);
    Ok(SigmaProductReport {
        samples: total,
        constant,
        per_scale: per_scale_c,
        stable: hi <= 2.0 * lo,
        reverse_exponent: reverse.map(|(p, _)| p),
        reverse_constant: reverse.map(|(_, c)| c),
    })
}

fn factor_domain(r: &Realization, phi: &SmoothFunction) -> Result<QuadBox> {
    let hw = phi
        .effective_half_widths(r.k(), r.d(), 1e-8)
        .unwrap_or_else(|| vec![3.0; r.dim()]);
    QuadBox::new(hw, 8)
}

fn require_member(r: &Realization, phi: &SmoothFunction, which: usize) -> Result<()> {
    let w = Weight::new(r);
    let domain = factor_domain(r, phi)?;
    let report = membership_report(r, &w, phi, 2, 1, &domain)?;
    if !report.consistent {
        return Err(Error::Validation {
            axiom: "schwartz-membership".into(),
            detail: format!(
                "tensor factor {which} ('{}') fails the rapid-decay test; \
                 σ^k-weighted sups grow on the doubled box",
                phi.label()
            ),
        });
    }
    Ok(())
}

fn combined_decay(pr: &ProductRealization, d1: &Decay, d2: &Decay, phi1: &SmoothFunction, phi2: &SmoothFunction) -> Decay {
    match (d1, d2) {
        (
            Decay::Gaussian {
                rate_t: rt1,
                rate_n: rn1,
                amplitude: a1,
            },
            Decay::Gaussian {
                rate_t: rt2,
                rate_n: rn2,
                amplitude: a2,
            },
        ) => Decay::Gaussian {
            rate_t: rt1.min(*rt2),
            rate_n: rn1.min(*rn2),
            amplitude: a1 * a2,
        },
        _ => {
            let hw1 = phi1.effective_half_widths(pr.r1.k(), pr.r1.d(), 1e-10);
            let hw2 = phi2.effective_half_widths(pr.r2.k(), pr.r2.d(), 1e-10);
            match (hw1, hw2) {
                (Some(h1), Some(h2)) => {
                    // interleave back into product (t, n) order
                    let (k1, d1n) = (pr.r1.k(), pr.r1.d());
                    let (k2, _) = (pr.r2.k(), pr.r2.d());
                    let mut hw = Vec::with_capacity(pr.r.dim());
                    hw.extend_from_slice(&h1[..k1]);
                    hw.extend_from_slice(&h2[..k2]);
                    hw.extend_from_slice(&h1[k1..k1 + d1n]);
                    hw.extend_from_slice(&h2[k2..]);
                    Decay::CompactSupport { half_widths: hw }
                }
                _ => Decay::SlowlyIncreasing {
                    order: 0,
                    amplitude: phi1.amplitude().unwrap_or(1.0) * phi2.amplitude().unwrap_or(1.0),
                },
            }
        }
    }
}

/// φ₁⊗φ₂ on the product: (g₁,g₂) ↦ φ₁(g₁)·φ₂(g₂). Both factors must pass the
/// rapid-decay membership test — constants are not Schwartz, so 1⊗φ is
/// refused.
pub fn tensor(
    pr: &ProductRealization,
    phi1: &SmoothFunction,
    phi2: &SmoothFunction,
) -> Result<SmoothFunction> {
    require_member(&pr.r1, phi1, 1)?;
    require_member(&pr.r2, phi2, 2)?;
    let decay = combined_decay(pr, phi1.decay(), phi2.decay(), phi1, phi2);
    let label = format!("{}⊗{}", phi1.label(), phi2.label());
    let own = pr.clone();
    let f1 = phi1.clone();
    let f2 = phi2.clone();
    Ok(SmoothFunction::new(label, decay, move |g| {
        match own.split(g) {
            Ok((g1, g2)) => f1.eval(&g1) * f2.eval(&g2),
            Err(_) => num_complex::Complex64::new(f64::NAN, 0.0),
        }
    }))
}

/// ⟨K, φ₁⊗φ₂⟩: pairs a distribution on the product against a tensor of
/// factor test functions.
pub fn kernel_pair(
    pr: &ProductRealization,
    kernel: &TemperedDistribution,
    phi1: &SmoothFunction,
    phi2: &SmoothFunction,
) -> Result<PairingValue> {
    let test = tensor(pr, phi1, phi2)?;
    let w = Weight::new(&pr.r);
    let domain = default_pairing_box(&pr.r, &test, 24)?;
    pair(&pr.r, &w, kernel, &test, &domain)
}

//! Structure-constant Lie algebras: bracket, ad, solvability and nilpotency
//! analysis, nilradical validation.
//!
//! The nilradical is always user-declared and validated, never computed:
//! exact nilradical computation needs root-functional kernels, while
//! validating a declared basis is robust for every bundled input.

use crate::error::{Error, Result};
use crate::numerics::linalg;
use crate::numerics::Matrix;
use serde::Serialize;

const JACOBI_TOL: f64 = 1e-12;
const RANK_TOL: f64 = 1e-9;

/// A finite-dimensional real Lie algebra given by its structure constants in
/// a fixed basis: [X_i, X_j] = sum_k c[i][j][k] X_k.
#[derive(Debug, Clone)]
pub struct LieAlgebra {
    dim: usize,
    /// full antisymmetric tensor, c[i][j][k]
    constants: Vec<Vec<Vec<f64>>>,
    labels: Vec<String>,
}

/// A linear subspace of the ambient coordinate space, stored as independent
/// basis vectors.
#[derive(Debug, Clone)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vec<f64>>,
}

impl Subspace {
    pub fn new(ambient: usize, basis: Vec<Vec<f64>>) -> Result<Self> {
        for v in &basis {
            if v.len() != ambient {
                return Err(Error::Shape(format!(
                    "subspace vector has length {}, ambient is {}",
                    v.len(),
                    ambient
                )));
            }
        }
        let r = linalg::rank(&basis, RANK_TOL);
        if r != basis.len() {
            return Err(Error::Validation {
                axiom: "subspace independence".into(),
                detail: format!("{} vectors span only rank {}", basis.len(), r),
            });
        }
        Ok(Subspace { ambient, basis })
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        let basis = (0..ambient)
            .map(|i| {
                let mut v = vec![0.0; ambient];
                v[i] = 1.0;
                v
            })
            .collect();
        Subspace { ambient, basis }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    pub fn orthonormal(&self) -> Vec<Vec<f64>> {
        linalg::orthonormal_basis(&self.basis, 1e-12)
    }

    pub fn contains(&self, v: &[f64], tol: f64) -> bool {
        linalg::residual_to_span(v, &self.orthonormal()) <= tol * linalg::norm(v).max(1.0)
    }

    pub fn contains_space(&self, other: &Subspace, tol: f64) -> bool {
        other.basis.iter().all(|v| self.contains(v, tol))
    }

    pub fn intersection(&self, other: &Subspace) -> Subspace {
        let vecs = linalg::span_intersection(&self.basis, &other.basis, RANK_TOL);
        Subspace {
            ambient: self.ambient,
            basis: vecs,
        }
    }
}

/// Outcome of validating a declared nilradical.
#[derive(Debug, Clone, Serialize)]
pub struct NilradicalReport {
    pub is_ideal: bool,
    pub is_nilpotent: bool,
    pub nilpotency_class: usize,
    pub contains_derived: bool,
    /// For each complement basis vector: (label, evidence that ad(v) is
    /// non-nilpotent, i.e. some tr(ad(v)^k) != 0).
    pub maximality_evidence: Vec<MaximalityEvidence>,
    /// True when every complement direction showed a non-vanishing trace.
    /// The trace test is necessary, not sufficient; a false value is a
    /// warning, not an error.
    pub maximality_confirmed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MaximalityEvidence {
    pub vector: Vec<f64>,
    pub nonzero_trace_power: Option<usize>,
    pub trace_value: f64,
}

impl LieAlgebra {
    /// Builds an algebra from sparse entries `(i, j, k, value)` with `i < j`;
    /// the `j > i` half is filled by antisymmetry. Jacobi is checked on all
    /// basis triples.
    pub fn from_entries(
        dim: usize,
        entries: &[(usize, usize, usize, f64)],
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        let mut c = vec![vec![vec![0.0; dim]; dim]; dim];
        for &(i, j, k, v) in entries {
            if i >= dim || j >= dim || k >= dim {
                return Err(Error::Input(format!(
                    "structure constant index ({i},{j},{k}) out of range for dim {dim}"
                )));
            }
            if i >= j {
                return Err(Error::Input(format!(
                    "structure constants must be given with i < j, got ({i},{j})"
                )));
            }
            if !v.is_finite() {
                return Err(Error::Input("non-finite structure constant".into()));
            }
            c[i][j][k] += v;
            c[j][i][k] -= v;
        }
        let labels = labels.unwrap_or_else(|| (0..dim).map(|i| format!("X{}", i + 1)).collect());
        if labels.len() != dim {
            return Err(Error::Input("label count does not match dimension".into()));
        }
        let algebra = LieAlgebra {
            dim,
            constants: c,
            labels,
        };
        algebra.check_jacobi()?;
        Ok(algebra)
    }

    fn check_jacobi(&self) -> Result<()> {
        let scale = self.constant_scale().max(1.0);
        for i in 0..self.dim {
            for j in 0..self.dim {
                for k in 0..self.dim {
                    let mut e_i = vec![0.0; self.dim];
                    e_i[i] = 1.0;
                    let mut e_j = vec![0.0; self.dim];
                    e_j[j] = 1.0;
                    let mut e_k = vec![0.0; self.dim];
                    e_k[k] = 1.0;
                    let t1 = self.bracket(&self.bracket(&e_i, &e_j), &e_k);
                    let t2 = self.bracket(&self.bracket(&e_j, &e_k), &e_i);
                    let t3 = self.bracket(&self.bracket(&e_k, &e_i), &e_j);
                    let residual = linalg::norm(&linalg::add(&linalg::add(&t1, &t2), &t3));
                    if residual > JACOBI_TOL * scale * scale {
                        return Err(Error::Validation {
                            axiom: "Jacobi identity".into(),
                            detail: format!(
                                "residual {residual:.3e} on basis triple ({i},{j},{k})"
                            ),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    fn constant_scale(&self) -> f64 {
        self.constants
            .iter()
            .flatten()
            .flatten()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> f64 {
        self.constants[i][j][k]
    }

    /// [x, y] via the structure-constant bilinear form.
    pub fn bracket(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim, "bracket operand length");
        assert_eq!(y.len(), self.dim, "bracket operand length");
        let mut out = vec![0.0; self.dim];
        for i in 0..self.dim {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..self.dim {
                if y[j] == 0.0 {
                    continue;
                }
                let xy = x[i] * y[j];
                for k in 0..self.dim {
                    out[k] += xy * self.constants[i][j][k];
                }
            }
        }
        out
    }

    /// Matrix of y -> [x, y] in the fixed basis.
    pub fn ad_matrix(&self, x: &[f64]) -> Matrix {
        let mut m = Matrix::zeros(self.dim, self.dim);
        for j in 0..self.dim {
            let mut e = vec![0.0; self.dim];
            e[j] = 1.0;
            let col = self.bracket(x, &e);
            for i in 0..self.dim {
                m[(i, j)] = col[i];
            }
        }
        m
    }

    pub fn killing_form(&self, x: &[f64], y: &[f64]) -> f64 {
        let prod = self.ad_matrix(x).mul(&self.ad_matrix(y));
        (0..self.dim).map(|i| prod[(i, i)]).sum()
    }

    /// Span of all pairwise brackets between two subspaces.
    pub fn bracket_span(&self, a: &Subspace, b: &Subspace) -> Subspace {
        let mut gen = Vec::new();
        for x in a.basis() {
            for y in b.basis() {
                let v = self.bracket(x, y);
                if linalg::norm(&v) > 1e-13 {
                    gen.push(v);
                }
            }
        }
        Subspace {
            ambient: self.dim,
            basis: linalg::orthonormal_basis(&gen, RANK_TOL),
        }
    }

    /// Derived series g, [g,g], [[g,g],[g,g]], ... down to stabilization.
    pub fn derived_series(&self) -> Vec<Subspace> {
        let mut series = vec![Subspace::full(self.dim)];
        loop {
            let last = series.last().unwrap();
            let next = self.bracket_span(last, last);
            if next.dim() == last.dim() {
                break;
            }
            let stop = next.dim() == 0;
            series.push(next);
            if stop {
                break;
            }
        }
        series
    }

    /// Lower central series g, [g,g], [g,[g,g]], ...
    pub fn lower_central_series(&self) -> Vec<Subspace> {
        let full = Subspace::full(self.dim);
        let mut series = vec![Subspace::full(self.dim)];
        loop {
            let last = series.last().unwrap();
            let next = self.bracket_span(&full, last);
            if next.dim() == last.dim() {
                break;
            }
            let stop = next.dim() == 0;
            series.push(next);
            if stop {
                break;
            }
        }
        series
    }

    pub fn is_solvable(&self) -> bool {
        self.derived_series().last().unwrap().dim() == 0
    }

    /// (nilpotent?, class). Class is the number of nonzero terms of the lower
    /// central series; the zero algebra has class 0, abelian has class 1.
    pub fn is_nilpotent(&self) -> (bool, usize) {
        if self.dim == 0 {
            return (true, 0);
        }
        let series = self.lower_central_series();
        if series.last().unwrap().dim() == 0 {
            (true, series.len() - 1)
        } else {
            (false, 0)
        }
    }

    /// Structure constants of a subalgebra in the given basis. Fails when the
    /// brackets leave the span.
    pub fn restricted(&self, sub: &Subspace) -> Result<LieAlgebra> {
        let d = sub.dim();
        let mut c = vec![vec![vec![0.0; d]; d]; d];
        for i in 0..d {
            for j in 0..d {
                let v = self.bracket(&sub.basis()[i], &sub.basis()[j]);
                let coords = linalg::coordinates_in_basis(&v, sub.basis()).ok_or_else(|| {
                    Error::Validation {
                        axiom: "subalgebra closure".into(),
                        detail: format!("bracket of basis vectors {i},{j} leaves the span"),
                    }
                })?;
                c[i][j] = coords;
            }
        }
        Ok(LieAlgebra {
            dim: d,
            constants: c,
            labels: (0..d).map(|i| format!("Y{}", i + 1)).collect(),
        })
    }

    /// Validates a declared nilradical: ideal, nilpotent, contains [g,g],
    /// plus (necessary-only) maximality evidence on a complement basis.
    pub fn validate_nilradical(&self, n_basis: &Subspace) -> Result<NilradicalReport> {
        if n_basis.ambient() != self.dim {
            return Err(Error::Shape("nilradical ambient dimension mismatch".into()));
        }
        // (i) ideal: [g, n] inside n
        let full = Subspace::full(self.dim);
        let bracket_gn = self.bracket_span(&full, n_basis);
        let is_ideal = n_basis.contains_space(&bracket_gn, RANK_TOL);
        if !is_ideal {
            return Err(Error::Validation {
                axiom: "nilradical is an ideal".into(),
                detail: "[g, n] is not contained in n".into(),
            });
        }
        // (ii) nilpotent
        let restricted = self.restricted(n_basis)?;
        let (is_nilpotent, class) = restricted.is_nilpotent();
        if !is_nilpotent {
            return Err(Error::Validation {
                axiom: "nilradical is nilpotent".into(),
                detail: "lower central series of the restriction does not reach zero".into(),
            });
        }
        // (iii) contains the derived algebra (required: g solvable)
        let derived = self.bracket_span(&full, &full);
        let contains_derived = n_basis.contains_space(&derived, RANK_TOL);
        if !contains_derived {
            return Err(Error::Validation {
                axiom: "nilradical contains [g, g]".into(),
                detail: "derived algebra not contained in the declared nilradical".into(),
            });
        }
        // (iv) maximality evidence: complement directions must not be
        // ad-nilpotent. Trace test: some tr(ad(v)^k) != 0, k <= dim.
        let ortho_n = n_basis.orthonormal();
        let mut evidence = Vec::new();
        let mut confirmed = true;
        for i in 0..self.dim {
            let mut e = vec![0.0; self.dim];
            e[i] = 1.0;
            let r = linalg::project_out(&e, &ortho_n);
            if linalg::norm(&r) < 1e-9 {
                continue;
            }
            let v = linalg::scaled(&r, 1.0 / linalg::norm(&r));
            // skip directions already represented
            if evidence
                .iter()
                .any(|ev: &MaximalityEvidence| linalg::in_span(&v, &[ev.vector.clone()], 1e-9))
            {
                continue;
            }
            let ad = self.ad_matrix(&v);
            let mut found = None;
            let mut trace_value = 0.0;
            let mut power = ad.clone();
            for k in 2..=self.dim {
                power = power.mul(&ad);
                let tr: f64 = (0..self.dim).map(|t| power[(t, t)]).sum();
                if tr.abs() > 1e-10 {
                    found = Some(k);
                    trace_value = tr;
                    break;
                }
            }
            if found.is_none() {
                confirmed = false;
            }
            evidence.push(MaximalityEvidence {
                vector: v,
                nonzero_trace_power: found,
                trace_value,
            });
        }
        Ok(NilradicalReport {
            is_ideal,
            is_nilpotent,
            nilpotency_class: class,
            contains_derived,
            maximality_evidence: evidence,
            maximality_confirmed: confirmed,
        })
    }
}

#[cfg(test)]
pub mod test_algebras {
    use super::*;

    /// Heisenberg: [e1,e2] = e3.
    pub fn heisenberg() -> LieAlgebra {
        LieAlgebra::from_entries(3, &[(0, 1, 2, 1.0)], None).unwrap()
    }

    /// ax+b: basis (T, Y), [T,Y] = Y.
    pub fn ax_b() -> LieAlgebra {
        LieAlgebra::from_entries(2, &[(0, 1, 1, 1.0)], None).unwrap()
    }

    /// Universal cover of the Euclidean motion group:
    /// [X1,X2]=X3, [X1,X3]=-X2.
    pub fn m2() -> LieAlgebra {
        LieAlgebra::from_entries(3, &[(0, 1, 2, 1.0), (0, 2, 1, -1.0)], None).unwrap()
    }

    pub fn abelian(dim: usize) -> LieAlgebra {
        LieAlgebra::from_entries(dim, &[], None).unwrap()
    }

    /// Filiform n4: [e1,e2]=e3, [e1,e3]=e4 (class 3).
    pub fn filiform_n4() -> LieAlgebra {
        LieAlgebra::from_entries(4, &[(0, 1, 2, 1.0), (0, 2, 3, 1.0)], None).unwrap()
    }

    /// Direct sum of ax+b and Heisenberg, basis (T, Y, E1, E2, Z):
    /// [T,Y]=Y, [E1,E2]=Z. Nilradical span(Y,E1,E2,Z); g0 ∩ n is nontrivial.
    pub fn axb_heis() -> LieAlgebra {
        LieAlgebra::from_entries(5, &[(0, 1, 1, 1.0), (2, 3, 4, 1.0)], None).unwrap()
    }

    /// Heisenberg pair acting by independent roots, basis (A, B, Z, Y, W):
    /// [A,B]=Z, [A,Y]=Y, [B,W]=W. The complement span(A,B) is nonabelian,
    /// so the product-law polynomial P is nonzero.
    pub fn heis_roots() -> LieAlgebra {
        LieAlgebra::from_entries(
            5,
            &[(0, 1, 2, 1.0), (0, 3, 3, 1.0), (1, 4, 4, 1.0)],
            None,
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::test_algebras::*;
    use super::*;
    use proptest::prelude::*;

    fn e(dim: usize, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        v
    }

    #[test]
    fn bracket_antisymmetry_on_self() {
        let h = heisenberg();
        let x = vec![0.3, -1.2, 0.7];
        assert!(linalg::norm(&h.bracket(&x, &x)) < 1e-14);
    }

    #[test]
    fn heisenberg_bracket_table() {
        let h = heisenberg();
        let b = h.bracket(&e(3, 0), &e(3, 1));
        assert_eq!(b, vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn ax_b_bracket_table() {
        let a = ax_b();
        let b = a.bracket(&e(2, 0), &e(2, 1));
        assert_eq!(b, vec![0.0, 1.0]);
    }

    #[test]
    fn ad_of_zero_is_zero() {
        let a = m2();
        assert_eq!(a.ad_matrix(&[0.0; 3]).max_abs(), 0.0);
    }

    #[test]
    fn ax_b_ad_matrix() {
        let a = ax_b();
        let ad_t = a.ad_matrix(&e(2, 0));
        assert_eq!(ad_t[(1, 1)], 1.0);
        assert_eq!(ad_t[(0, 0)], 0.0);
        assert_eq!(ad_t[(0, 1)], 0.0);
        assert_eq!(ad_t[(1, 0)], 0.0);
    }

    #[test]
    fn m2_rotation_generator() {
        let a = m2();
        let ad1 = a.ad_matrix(&e(3, 0));
        // X2 -> X3, X3 -> -X2
        assert_eq!(ad1[(2, 1)], 1.0);
        assert_eq!(ad1[(1, 2)], -1.0);
    }

    #[test]
    fn abelian_derived_series() {
        let a = abelian(2);
        let s = a.derived_series();
        assert_eq!(s.len(), 2);
        assert_eq!(s[1].dim(), 0);
    }

    #[test]
    fn heisenberg_lower_central_series() {
        let h = heisenberg();
        let s = h.lower_central_series();
        assert_eq!(s.len(), 3);
        assert_eq!(s[1].dim(), 1);
        assert_eq!(s[2].dim(), 0);
        let (nil, class) = h.is_nilpotent();
        assert!(nil);
        assert_eq!(class, 2);
    }

    #[test]
    fn ax_b_solvable_not_nilpotent() {
        let a = ax_b();
        assert!(a.is_solvable());
        let (nil, _) = a.is_nilpotent();
        assert!(!nil);
        let ds = a.derived_series();
        assert_eq!(ds.len(), 3);
        assert_eq!(ds[1].dim(), 1);
    }

    #[test]
    fn filiform_class_three() {
        let f = filiform_n4();
        let (nil, class) = f.is_nilpotent();
        assert!(nil);
        assert_eq!(class, 3);
    }

    #[test]
    fn heisenberg_nilradical_is_itself() {
        let h = heisenberg();
        let report = h.validate_nilradical(&Subspace::full(3)).unwrap();
        assert!(report.is_ideal && report.is_nilpotent);
        assert_eq!(report.nilpotency_class, 2);
        assert!(report.maximality_evidence.is_empty());
    }

    #[test]
    fn ax_b_nilradical_span_y() {
        let a = ax_b();
        let n = Subspace::new(2, vec![vec![0.0, 1.0]]).unwrap();
        let report = a.validate_nilradical(&n).unwrap();
        assert!(report.is_ideal && report.is_nilpotent);
        // complement T: tr(ad(T)^2) = 1 != 0
        assert_eq!(report.maximality_evidence.len(), 1);
        assert_eq!(report.maximality_evidence[0].nonzero_trace_power, Some(2));
        assert!((report.maximality_evidence[0].trace_value - 1.0).abs() < 1e-12);
        assert!(report.maximality_confirmed);
    }

    #[test]
    fn ax_b_wrong_nilradical_rejected() {
        let a = ax_b();
        let n = Subspace::new(2, vec![vec![1.0, 0.0]]).unwrap();
        let err = a.validate_nilradical(&n).unwrap_err();
        assert!(err.to_string().contains("ideal"));
    }

    #[test]
    fn killing_forms() {
        let h = heisenberg();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(h.killing_form(&e(3, i), &e(3, j)), 0.0);
            }
        }
        let a = ax_b();
        assert_eq!(a.killing_form(&e(2, 0), &e(2, 0)), 1.0);
        assert_eq!(a.killing_form(&e(2, 0), &e(2, 1)), 0.0);
        assert_eq!(a.killing_form(&e(2, 1), &e(2, 1)), 0.0);
    }

    #[test]
    fn nested_brackets_vanish_past_class() {
        let h = heisenberg();
        // depth 3 nested brackets inside n = g all vanish for class 2
        let x = vec![1.0, 2.0, 0.5];
        let y = vec![-0.3, 0.4, 1.0];
        let z = vec![0.8, -0.2, 0.1];
        let nested = h.bracket(&x, &h.bracket(&y, &z));
        assert!(linalg::norm(&nested) < 1e-12);
    }

    proptest! {
        #[test]
        fn jacobi_residual_on_random_triples(
            x in proptest::collection::vec(-10.0..10.0f64, 3),
            y in proptest::collection::vec(-10.0..10.0f64, 3),
            z in proptest::collection::vec(-10.0..10.0f64, 3),
        ) {
            for a in [heisenberg(), m2()] {
                let t1 = a.bracket(&a.bracket(&x, &y), &z);
                let t2 = a.bracket(&a.bracket(&y, &z), &x);
                let t3 = a.bracket(&a.bracket(&z, &x), &y);
                let r = linalg::norm(&linalg::add(&linalg::add(&t1, &t2), &t3));
                let scale = linalg::norm(&x) * linalg::norm(&y) * linalg::norm(&z);
                prop_assert!(r <= 1e-10 * scale.max(1.0));
            }
        }

        #[test]
        fn ad_is_a_homomorphism(
            x in proptest::collection::vec(-5.0..5.0f64, 3),
            y in proptest::collection::vec(-5.0..5.0f64, 3),
        ) {
            for a in [heisenberg(), m2()] {
                let lhs = a.ad_matrix(&a.bracket(&x, &y));
                let adx = a.ad_matrix(&x);
                let ady = a.ad_matrix(&y);
                let rhs = adx.mul(&ady).sub(&ady.mul(&adx));
                prop_assert!(lhs.sub(&rhs).max_abs() <= 1e-10 * (1.0 + lhs.max_abs()));
            }
        }
    }
}

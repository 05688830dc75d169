//! Coordinate realization of a simply connected solvable Lie group.
//!
//! Starting from a structure-constant algebra with a validated nilradical n,
//! a seeded search picks an element X in general position; the generalized
//! 0-eigenspace g0 of ad(X) is a nilpotent subalgebra, and a complement c of
//! g0 ∩ n inside g0 satisfies c ⊕ n = g. The group is then modeled on
//! c × n with the product
//!
//! (t,x)·(t',x') = (t+t', P(t,t') ·CBH x ·CBH e^{ad t}x')
//!
//! where P(t,t') = cbh(t,t') − t − t' lands in g0 ∩ n, ·CBH is the
//! Campbell-Baker-Hausdorff product of the nilpotent algebra n, and e^{ad t}
//! acts on n. In these coordinates dt dn is a right Haar measure.

pub mod cbh;

use crate::algebra::{LieAlgebra, NilradicalReport, Subspace};
use crate::error::{Error, Result};
use crate::numerics::linalg;
use crate::numerics::{matrix_exp, operator_norm, Matrix};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

const SPAN_TOL: f64 = 1e-9;
const EIGEN_CLUSTER_TOL: f64 = 1e-7;
const GENERAL_POSITION_DRAWS: usize = 64;

/// Group element in realization coordinates: t over the complement basis,
/// n over the nilradical basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupElement {
    pub t: Vec<f64>,
    pub n: Vec<f64>,
}

impl GroupElement {
    pub fn new(t: Vec<f64>, n: Vec<f64>) -> Result<Self> {
        if t.iter().chain(&n).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                context: "group element coordinates".into(),
            });
        }
        Ok(GroupElement { t, n })
    }

    pub fn identity(k: usize, d: usize) -> Self {
        GroupElement {
            t: vec![0.0; k],
            n: vec![0.0; d],
        }
    }

    pub fn coords(&self) -> Vec<f64> {
        let mut v = self.t.clone();
        v.extend_from_slice(&self.n);
        v
    }

    pub fn norm(&self) -> f64 {
        linalg::norm(&self.coords())
    }

    pub fn distance(&self, other: &GroupElement) -> f64 {
        linalg::norm(&linalg::sub(&self.coords(), &other.coords()))
    }
}

/// Number of distinct ad(x) eigenvalues (clustered) and the smallest gap
/// between distinct clusters.
fn spectral_signature(algebra: &LieAlgebra, x: &[f64]) -> (usize, f64) {
    let m = algebra.dim();
    let ad = algebra.ad_matrix(x);
    let dm = nalgebra::DMatrix::from_fn(m, m, |i, j| ad[(i, j)]);
    let eigs = dm.complex_eigenvalues();
    let mut reps: Vec<nalgebra::Complex<f64>> = Vec::new();
    for ev in eigs.iter() {
        if !reps.iter().any(|r| (r - ev).norm() <= EIGEN_CLUSTER_TOL) {
            reps.push(*ev);
        }
    }
    let mut gap = f64::INFINITY;
    for i in 0..reps.len() {
        for j in i + 1..reps.len() {
            gap = gap.min((reps[i] - reps[j]).norm());
        }
    }
    (reps.len(), gap)
}

/// Seeded search for an element whose ad has the largest number of distinct
/// eigenvalues; ties are broken by the largest minimum eigenvalue gap. When
/// `within` is given, candidates are drawn from that span (used to honor a
/// declared complement).
pub fn find_general_position(
    algebra: &LieAlgebra,
    within: Option<&Subspace>,
    seed: u64,
) -> Vec<f64> {
    let m = algebra.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(Vec<f64>, usize, f64)> = None;
    for _ in 0..GENERAL_POSITION_DRAWS {
        let x = match within {
            Some(s) => {
                let mut v = vec![0.0; m];
                for b in s.basis() {
                    let a: f64 = rng.gen_range(-1.0..1.0);
                    linalg::axpy(&mut v, a, b);
                }
                v
            }
            None => (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        };
        let (count, gap) = spectral_signature(algebra, &x);
        let better = match &best {
            None => true,
            Some((_, c, g)) => count > *c || (count == *c && gap > *g),
        };
        if better {
            best = Some((x, count, gap));
        }
    }
    best.map(|(x, _, _)| x).unwrap_or_else(|| vec![0.0; m])
}

/// Generalized 0-eigenspace of ad(x): kernel of ad(x)^m.
pub fn zero_eigenspace(algebra: &LieAlgebra, x: &[f64]) -> Subspace {
    let m = algebra.dim();
    let ad = algebra.ad_matrix(x);
    let power = ad.pow(m);
    let kernel = linalg::nullspace(&power, SPAN_TOL);
    Subspace::new(m, kernel).expect("nullspace basis is orthonormal")
}

/// Euclidean-orthogonal complement of g0 ∩ n inside g0.
pub fn choose_complement(
    zero_space: &Subspace,
    nilradical: &Subspace,
) -> Result<Subspace> {
    let m = zero_space.ambient();
    let mut cover: Vec<Vec<f64>> = zero_space.basis().to_vec();
    cover.extend(nilradical.basis().to_vec());
    if linalg::rank(&cover, SPAN_TOL) != m {
        return Err(Error::Construction(
            "g0 + n does not span the algebra; the declared nilradical is invalid".into(),
        ));
    }
    let meet = zero_space.intersection(nilradical);
    let meet_ortho = meet.orthonormal();
    let mut raw: Vec<Vec<f64>> = Vec::new();
    for b in zero_space.basis() {
        raw.push(linalg::project_out(b, &meet_ortho));
    }
    let comp = linalg::orthonormal_basis(&raw, SPAN_TOL);
    Subspace::new(m, comp)
}

/// Immutable realization G = c × n; all group operations are pure.
#[derive(Debug, Clone)]
pub struct Realization {
    algebra: LieAlgebra,
    nilradical: Subspace,
    zero_space: Subspace,
    complement: Subspace,
    g0_cap_n: Subspace,
    general_position: Vec<f64>,
    n_alg: LieAlgebra,
    n_class: usize,
    g0_class: usize,
    cbh_order: usize,
    basis: Matrix,
    basis_inv: Matrix,
    nil_report: NilradicalReport,
    seed: u64,
}

/// Outcome of comparing the realization against one built over a sheared
/// complement.
#[derive(Debug, Clone, Serialize)]
pub struct ComplementReport {
    pub unique: bool,
    pub samples: usize,
    pub max_isomorphism_residual: f64,
    pub forward_exponent: Option<usize>,
    pub forward_constant: Option<f64>,
    pub backward_exponent: Option<usize>,
    pub backward_constant: Option<f64>,
}

impl Realization {
    pub fn new(algebra: LieAlgebra, nilradical: Subspace, seed: u64) -> Result<Self> {
        Self::build(algebra, nilradical, seed, None)
    }

    /// Builds the realization over a caller-supplied complement. The hint
    /// must lie inside the generalized 0-eigenspace and complement the
    /// nilradical; the general-position element is drawn from the hint span
    /// so both conditions can hold.
    pub fn with_complement_hint(
        algebra: LieAlgebra,
        nilradical: Subspace,
        seed: u64,
        complement: Subspace,
    ) -> Result<Self> {
        Self::build_with(algebra, nilradical, seed, Some(complement), None)
    }

    /// Builds the realization around a caller-supplied general-position
    /// element (used for direct products, where the element must stay
    /// block-diagonal). An optional complement hint fixes the 𝔠 basis.
    pub fn with_general_position(
        algebra: LieAlgebra,
        nilradical: Subspace,
        seed: u64,
        x: Vec<f64>,
        complement: Option<Subspace>,
    ) -> Result<Self> {
        Self::build_with(algebra, nilradical, seed, complement, Some(x))
    }

    fn build(
        algebra: LieAlgebra,
        nilradical: Subspace,
        seed: u64,
        hint: Option<Subspace>,
    ) -> Result<Self> {
        Self::build_with(algebra, nilradical, seed, hint, None)
    }

    fn build_with(
        algebra: LieAlgebra,
        nilradical: Subspace,
        seed: u64,
        hint: Option<Subspace>,
        fixed_x: Option<Vec<f64>>,
    ) -> Result<Self> {
        let m = algebra.dim();
        if !algebra.is_solvable() {
            return Err(Error::Validation {
                axiom: "solvability".into(),
                detail: "the derived series does not terminate at zero".into(),
            });
        }
        let nil_report = algebra.validate_nilradical(&nilradical)?;
        let general_position = match fixed_x {
            Some(x) => {
                if x.len() != m {
                    return Err(Error::Shape(format!(
                        "general-position element has length {}, algebra dimension is {m}",
                        x.len()
                    )));
                }
                x
            }
            None => find_general_position(&algebra, hint.as_ref(), seed),
        };
        let zero_space = zero_eigenspace(&algebra, &general_position);
        let g0_alg = algebra.restricted(&zero_space)?;
        let (g0_nilpotent, g0_class) = g0_alg.is_nilpotent();
        if !g0_nilpotent {
            return Err(Error::Construction(
                "generalized 0-eigenspace is not nilpotent; general-position search failed".into(),
            ));
        }
        let g0_cap_n = zero_space.intersection(&nilradical);
        let complement = match hint {
            Some(h) => {
                for v in h.basis() {
                    if !zero_space.contains(v, SPAN_TOL) {
                        return Err(Error::Construction(
                            "complement hint is not contained in the 0-eigenspace".into(),
                        ));
                    }
                }
                h
            }
            None => choose_complement(&zero_space, &nilradical)?,
        };
        let mut cols: Vec<Vec<f64>> = complement.basis().to_vec();
        cols.extend(nilradical.basis().to_vec());
        if cols.len() != m || linalg::rank(&cols, SPAN_TOL) != m {
            return Err(Error::Construction(
                "complement does not complete the nilradical to the full algebra".into(),
            ));
        }
        let basis = Matrix::from_columns(&cols);
        let basis_inv = basis.inverse()?;
        let n_alg = algebra.restricted(&nilradical)?;
        let (_, n_class) = n_alg.is_nilpotent();
        let cbh_order = n_class.max(g0_class);
        if cbh_order > cbh::MAX_CLASS {
            return Err(Error::Construction(format!(
                "nilpotency class {cbh_order} exceeds the supported truncation {}",
                cbh::MAX_CLASS
            )));
        }
        Ok(Realization {
            algebra,
            nilradical,
            zero_space,
            complement,
            g0_cap_n,
            general_position,
            n_alg,
            n_class,
            g0_class,
            cbh_order,
            basis,
            basis_inv,
            nil_report,
            seed,
        })
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn nilradical(&self) -> &Subspace {
        &self.nilradical
    }

    pub fn zero_space(&self) -> &Subspace {
        &self.zero_space
    }

    pub fn complement(&self) -> &Subspace {
        &self.complement
    }

    pub fn general_position(&self) -> &[f64] {
        &self.general_position
    }

    pub fn nilradical_report(&self) -> &NilradicalReport {
        &self.nil_report
    }

    pub fn cbh_order(&self) -> usize {
        self.cbh_order
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    /// Complement dimension.
    pub fn k(&self) -> usize {
        self.complement.dim()
    }

    /// Nilradical dimension.
    pub fn d(&self) -> usize {
        self.nilradical.dim()
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::identity(self.k(), self.d())
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Ambient vector of complement coordinates.
    pub fn ambient_from_c(&self, t: &[f64]) -> Vec<f64> {
        let mut v = vec![0.0; self.dim()];
        for (i, b) in self.complement.basis().iter().enumerate() {
            linalg::axpy(&mut v, t[i], b);
        }
        v
    }

    /// Ambient vector of nilradical coordinates.
    pub fn ambient_from_n(&self, n: &[f64]) -> Vec<f64> {
        let mut v = vec![0.0; self.dim()];
        for (i, b) in self.nilradical.basis().iter().enumerate() {
            linalg::axpy(&mut v, n[i], b);
        }
        v
    }

    /// Splits an ambient vector into (complement, nilradical) coordinates.
    pub fn adapted(&self, v: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let w = self.basis_inv.mul_vec(v);
        (w[..self.k()].to_vec(), w[self.k()..].to_vec())
    }

    /// CBH product in nilradical coordinates.
    pub fn cbh_nilradical(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        cbh::cbh_with(|a, b| self.n_alg.bracket(a, b), x, y, self.n_class)
    }

    /// P(t,t') = cbh(t,t') − t − t' in nilradical coordinates; checked to lie
    /// in g0 ∩ n.
    pub fn cbh_polynomial_p(&self, t: &[f64], t2: &[f64]) -> Result<Vec<f64>> {
        if self.k() == 0 {
            return Ok(vec![0.0; self.d()]);
        }
        let ta = self.ambient_from_c(t);
        let tb = self.ambient_from_c(t2);
        let full = cbh::cbh_with(|a, b| self.algebra.bracket(a, b), &ta, &tb, self.g0_class)?;
        let p_amb = linalg::sub(&linalg::sub(&full, &ta), &tb);
        let scale = (linalg::norm(&ta) + linalg::norm(&tb)).max(1.0);
        let residual = linalg::residual_to_span(&p_amb, &self.g0_cap_n.orthonormal());
        if residual > 1e-10 * scale.powi(self.g0_class.max(1) as i32) {
            return Err(Error::Contract(format!(
                "P(t,t') leaves g0 ∩ n with residual {residual:.3e}"
            )));
        }
        let (_, pn) = self.adapted(&p_amb);
        Ok(pn)
    }

    /// Matrix of ad(t) acting on the nilradical, in nilradical coordinates.
    pub fn ad_on_nilradical(&self, t: &[f64]) -> Matrix {
        let ta = self.ambient_from_c(t);
        let d = self.d();
        let mut m = Matrix::zeros(d, d);
        for j in 0..d {
            let v = self.algebra.bracket(&ta, &self.nilradical.basis()[j]);
            let (vc, vn) = self.adapted(&v);
            debug_assert!(linalg::norm(&vc) < 1e-8 * linalg::norm(&v).max(1.0));
            for i in 0..d {
                m[(i, j)] = vn[i];
            }
        }
        m
    }

    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        let t_sum = linalg::add(&g.t, &h.t);
        let p = self.cbh_polynomial_p(&g.t, &h.t)?;
        let rotated = if self.k() == 0 {
            h.n.clone()
        } else {
            matrix_exp(&self.ad_on_nilradical(&g.t))?.mul_vec(&h.n)
        };
        let a = self.cbh_nilradical(&p, &g.n)?;
        let n_out = self.cbh_nilradical(&a, &rotated)?;
        GroupElement::new(t_sum, n_out)
    }

    pub fn inverse(&self, g: &GroupElement) -> Result<GroupElement> {
        let neg_t = linalg::scaled(&g.t, -1.0);
        let n = if self.k() == 0 {
            linalg::scaled(&g.n, -1.0)
        } else {
            let rot = matrix_exp(&self.ad_on_nilradical(&neg_t))?;
            linalg::scaled(&rot.mul_vec(&g.n), -1.0)
        };
        GroupElement::new(neg_t, n)
    }

    /// Group exponential of a pure complement or pure nilradical direction.
    pub fn exp_pure(&self, v: &[f64]) -> Result<GroupElement> {
        let (vc, vn) = self.adapted(v);
        let scale = linalg::norm(v).max(1.0);
        let cn = linalg::norm(&vc);
        let nn = linalg::norm(&vn);
        if nn <= 1e-10 * scale {
            return GroupElement::new(vc, vec![0.0; self.d()]);
        }
        if cn <= 1e-10 * scale {
            return GroupElement::new(vec![0.0; self.k()], vn);
        }
        Err(Error::MixedDirection {
            residual: cn.min(nn),
        })
    }

    /// Adjoint representation in adapted coordinates, via the exact
    /// factorization g = (0,n)·(t,0), so Ad(g) = e^{ad n} e^{ad t}.
    pub fn adjoint(&self, g: &GroupElement) -> Result<Matrix> {
        let n_amb = self.ambient_from_n(&g.n);
        let t_amb = self.ambient_from_c(&g.t);
        let en = matrix_exp(&self.algebra.ad_matrix(&n_amb))?;
        let et = matrix_exp(&self.algebra.ad_matrix(&t_amb))?;
        Ok(self.basis_inv.mul(&en.mul(&et)).mul(&self.basis))
    }

    /// Modular function δ(g) = |det Ad(g)|.
    pub fn modular(&self, g: &GroupElement) -> Result<f64> {
        Ok(self.adjoint(g)?.determinant().abs())
    }

    /// The weight surrogate σ(g) = max(‖Ad(g)‖, ‖Ad(g⁻¹)‖)·(1+|t|+|n|).
    /// Always ≥ 1.
    pub fn weight(&self, g: &GroupElement) -> Result<f64> {
        let ad = self.adjoint(g)?;
        let ad_inv = self.adjoint(&self.inverse(g)?)?;
        let growth = operator_norm(&ad).max(operator_norm(&ad_inv));
        Ok(growth * (1.0 + linalg::norm(&g.t) + linalg::norm(&g.n)))
    }

    /// Deterministic uniform samples in the coordinate box [-scale, scale]^m.
    pub fn sample_elements(&self, scale: f64, count: usize, seed: u64) -> Vec<GroupElement> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let t = (0..self.k()).map(|_| rng.gen_range(-scale..scale)).collect();
                let n = (0..self.d()).map(|_| rng.gen_range(-scale..scale)).collect();
                GroupElement { t, n }
            })
            .collect()
    }

    /// Maps an element of a realization over another complement (same
    /// algebra, same nilradical basis) into this one via I(s,x) = (0,x)·s,
    /// where s = exp(S) is expressed in these coordinates by splitting off
    /// the complement part of S with a CBH correction.
    pub fn embed_from(&self, other: &Realization, g: &GroupElement) -> Result<GroupElement> {
        let s_amb = other.ambient_from_c(&g.t);
        let (t0, _) = self.adapted(&s_amb);
        let t0_amb = self.ambient_from_c(&t0);
        let z = cbh::cbh_with(
            |a, b| self.algebra.bracket(a, b),
            &s_amb,
            &linalg::scaled(&t0_amb, -1.0),
            self.g0_class,
        )?;
        let (zc, zn) = self.adapted(&z);
        if linalg::norm(&zc) > 1e-8 * linalg::norm(&z).max(1.0) {
            return Err(Error::Contract(
                "complement change correction left the nilradical".into(),
            ));
        }
        let s_elem = GroupElement::new(t0, zn)?;
        let x_elem = GroupElement::new(vec![0.0; self.k()], g.n.clone())?;
        self.multiply(&x_elem, &s_elem)
    }

    /// Builds a realization over a randomly sheared complement and verifies
    /// that the coordinate change is a group isomorphism with mutually
    /// polynomially bounded weights.
    pub fn alternate_complement_check(&self, seed: u64) -> Result<ComplementReport> {
        if self.k() == 0 || self.g0_cap_n.dim() == 0 {
            return Ok(ComplementReport {
                unique: true,
                samples: 0,
                max_isomorphism_residual: 0.0,
                forward_exponent: None,
                forward_constant: None,
                backward_exponent: None,
                backward_constant: None,
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shear_basis = self.g0_cap_n.orthonormal();
        let sheared: Vec<Vec<f64>> = self
            .complement
            .basis()
            .iter()
            .map(|c| {
                let mut v = c.clone();
                for z in &shear_basis {
                    let a: f64 = rng.gen_range(-0.3..0.3);
                    linalg::axpy(&mut v, a, z);
                }
                v
            })
            .collect();
        let s_space = Subspace::new(self.dim(), sheared)?;
        let r2 = Realization::with_complement_hint(
            self.algebra.clone(),
            self.nilradical.clone(),
            seed,
            s_space,
        )?;
        let count = 64;
        let gs = r2.sample_elements(1.0, count, seed.wrapping_add(1));
        let hs = r2.sample_elements(1.0, count, seed.wrapping_add(2));
        let mut max_res = 0.0f64;
        for (g, h) in gs.iter().zip(&hs) {
            let lhs = self.embed_from(&r2, &r2.multiply(g, h)?)?;
            let rhs = self
                .multiply(&self.embed_from(&r2, g)?, &self.embed_from(&r2, h)?)?;
            let scale = 1.0 + lhs.norm();
            max_res = max_res.max(lhs.distance(&rhs) / scale);
        }
        let mut forward_pairs = Vec::new();
        let mut backward_pairs = Vec::new();
        for g in &gs {
            let s2 = r2.weight(g)?;
            let s1 = self.weight(&self.embed_from(&r2, g)?)?;
            forward_pairs.push((s2, s1));
            backward_pairs.push((s1, s2));
        }
        let fwd = crate::fit::minimal_integer_exponent(&forward_pairs, 8, 1e3);
        let bwd = crate::fit::minimal_integer_exponent(&backward_pairs, 8, 1e3);
        Ok(ComplementReport {
            unique: false,
            samples: count,
            max_isomorphism_residual: max_res,
            forward_exponent: fwd.map(|(p, _)| p),
            forward_constant: fwd.map(|(_, c)| c),
            backward_exponent: bwd.map(|(p, _)| p),
            backward_constant: bwd.map(|(_, c)| c),
        })
    }

    /// Realization summary for reports.
    pub fn summary(&self) -> serde_json::Value {
        serde_json::json!({
            "dim": self.dim(),
            "k": self.k(),
            "d": self.d(),
            "cbh_order": self.cbh_order,
            "nilradical_class": self.n_class,
            "zero_space_dim": self.zero_space.dim(),
            "zero_space_basis": self.zero_space.basis(),
            "complement_basis": self.complement.basis(),
            "general_position": self.general_position,
            "seed": self.seed,
        })
    }
}

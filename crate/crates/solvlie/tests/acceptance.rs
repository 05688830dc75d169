//! Acceptance suite: one test per criterion, each printing a single
//! pass/fail line (run with `--nocapture` to see them).

use num_complex::Complex64;
use solvlie::distributions::{
    self, default_pairing_box, derivative_function, embed, pair, verify_flat_identity,
};
use solvlie::fit::minimal_integer_exponent;
use solvlie::groups;
use solvlie::numerics::quad::Box as QuadBox;
use solvlie::product_groups::{
    block_product_residual, check_sigma_product, direct_product, kernel_pair,
};
use solvlie::realization::{GroupElement, Realization};
use solvlie::schwartz::{
    self, convolve, es_seminorm, involution, left_derivative, lq_linfty_comparison,
    membership_report, probe_library, right_left_comparison, ConvolutionBudget, Decay,
    LebesgueExponent, SeminormSpec, SmoothFunction,
};
use solvlie::verify;
use solvlie::weights::Weight;

const GROUPS: [&str; 4] = ["heisenberg", "axb", "m2", "r1"];

fn realize(name: &str) -> Realization {
    groups::load(name).unwrap().realize(None).unwrap()
}

fn status(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
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
fn criterion_01_group_law() {
    let mut ok = true;
    for name in GROUPS {
        let r = realize(name);
        let rep = verify::group_axiom_report(&r, 1000, 101).unwrap();
        ok &= rep.pass && rep.samples >= 1000;
    }
    // motion-group cover against the closed-form product law
    let m2 = realize("m2");
    for (i, seed) in [3u64, 5, 9, 11, 15].iter().enumerate() {
        let gs = m2.sample_elements(1.0 + i as f64 * 0.3, 2, *seed);
        let (g, h) = (&gs[0], &gs[1]);
        let p = m2.multiply(g, h).unwrap();
        let t = g.t[0];
        let n1 = g.n[0] + h.n[0] * t.cos() + h.n[1] * t.sin();
        let n2 = g.n[1] - h.n[0] * t.sin() + h.n[1] * t.cos();
        ok &= (p.t[0] - (g.t[0] + h.t[0])).abs() < 1e-12
            && (p.n[0] - n1).abs() < 1e-12
            && (p.n[1] - n2).abs() < 1e-12;
    }
    println!("ACCEPTANCE 1 (group law): {}", status(ok));
    assert!(ok);
}

#[test]
fn criterion_02_haar_modular() {
    let mut ok = true;
    for name in GROUPS {
        let r = realize(name);
        let rep = verify::haar_report(&r, 10, 103).unwrap();
        ok &= rep.pass
            && rep.max_right_jacobian_deviation < 1e-6
            && rep.max_modular_residual < 1e-9;
    }
    let axb = realize("axb");
    for g in axb.sample_elements(2.0, 20, 105) {
        let delta = axb.modular(&g).unwrap();
        ok &= (delta - g.t[0].exp()).abs() < 1e-9 * g.t[0].exp().max(1.0);
    }
    for name in ["heisenberg", "m2"] {
        let r = realize(name);
        for g in r.sample_elements(2.0, 20, 107) {
            ok &= (r.modular(&g).unwrap() - 1.0).abs() < 1e-10;
        }
    }
    println!("ACCEPTANCE 2 (Haar/modular): {}", status(ok));
    assert!(ok);
}

#[test]
fn criterion_03_weight_properties() {
    let mut ok = true;
    for name in GROUPS {
        let r = realize(name);
        let w = Weight::new(&r);
        // delta <= sigma^m pointwise on >= 10^4 samples, zero violations
        let modular = w.check_modular_domination(3334, 109).unwrap();
        ok &= modular.samples >= 10_000 && modular.violations.is_empty();
        // finite fitted (r, s) with constants <= 10^3 (the fits cap there)
        let inv = w.check_inverse_equivalence(400, 111).unwrap();
        let sub = w.check_subpolynomial(400, 113).unwrap();
        ok &= inv.forward.constant <= 1e3
            && inv.backward.constant <= 1e3
            && sub.fit.constant <= 1e3;
        // volume compensation for the reported sufficient exponent
        let samples = w.standard_samples(200, 115);
        let (q, _) = w.fit_size_exponent(&samples);
        let p = (r.dim() + 2) * q;
        let vol = w.check_volume_compensation(p, &w.default_boxes(4)).unwrap();
        ok &= vol.convergent;
    }
    println!("ACCEPTANCE 3 (weight properties): {}", status(ok));
    assert!(ok);
}

#[test]
fn criterion_04_membership_seminorms() {
    let mut ok = true;
    for name in GROUPS {
        let r = realize(name);
        let w = Weight::new(&r);
        let phi = schwartz::probe(&r, "gauss").unwrap();
        let domain = QuadBox::cube(r.dim(), 6.0, 8);
        let rep = membership_report(&r, &w, &phi, 6, 3, &domain).unwrap();
        ok &= rep.consistent;
    }
    // non-member witness: e^{-y^2} has no decay in t on ax+b
    let axb = realize("axb");
    let w = Weight::new(&axb);
    let bad = SmoothFunction::new(
        "exp(-y^2)",
        Decay::SlowlyIncreasing {
            order: 0,
            amplitude: 1.0,
        },
        |g| Complex64::new((-g.n[0] * g.n[0]).exp(), 0.0),
    );
    let rejected = membership_report(&axb, &w, &bad, 6, 1, &QuadBox::cube(2, 6.0, 8)).unwrap();
    ok &= !rejected.consistent;
    // closed form on the line: || e^{-x^2} || with q=2, k=0 is (pi/2)^{1/4}
    let line = realize("r1");
    let wl = Weight::new(&line);
    let gauss = schwartz::probe(&line, "gauss").unwrap();
    let spec = SeminormSpec::new(LebesgueExponent::Two, 0, vec![0]).unwrap();
    let v = schwartz::seminorm(&line, &wl, &gauss, &spec, &QuadBox::cube(1, 7.0, 64)).unwrap();
    let expected = (std::f64::consts::PI / 2.0).powf(0.25);
    ok &= (v.value - expected).abs() < 1e-6;
    println!("ACCEPTANCE 4 (membership/seminorms): {}", status(ok));
    assert!(ok);
}

#[test]
fn criterion_05_convolution_algebra() {
    let mut ok = true;
    // X^alpha(phi * psi) = phi * X^alpha psi at sampled points
    for name in ["r1", "heisenberg"] {
        let r = realize(name);
        let phi = schwartz::probe(&r, "gauss").unwrap();
        let psi = schwartz::probe(&r, "gauss-2").unwrap();
        let mut alpha = vec![0usize; r.dim()];
        alpha[0] = 1;
        // 24 points/axis on the 3-D group: the finite difference divides
        // the convolution quadrature error by the step, so the inner
        // integral needs headroom
        let budget = ConvolutionBudget {
            points_per_axis: if r.dim() == 1 { 48 } else { 24 },
            ..Default::default()
        };
        let (rc, pc, bc) = (r.clone(), phi.clone(), budget.clone());
        let psic = psi.clone();
        let conv = SmoothFunction::new(
            "phi*psi",
            Decay::Gaussian {
                rate_t: 0.25,
                rate_n: 0.25,
                amplitude: 1.0,
            },
            move |g| {
                convolve(&rc, &pc, &psic, g, &bc)
                    .map(|v| v.value)
                    .unwrap_or(Complex64::new(f64::NAN, 0.0))
            },
        );
        let dpsi = derivative_function(&r, &psi, &alpha);
        for g in r.sample_elements(0.6, 20, 117) {
            let lhs = left_derivative(&r, &conv, &alpha, &g).unwrap();
            let rhs = convolve(&r, &phi, &dpsi, &g, &budget).unwrap();
            let tol = (10.0 * rhs.tail_bound).max(1e-4);
            ok &= (lhs - rhs.value).norm() < tol;
        }
    }
    // involution is involutive
    let axb = realize("axb");
    let bump = schwartz::probe(&axb, "bump-0").unwrap();
    let twice = involution(&axb, &involution(&axb, &bump));
    for g in axb.sample_elements(0.8, 20, 119) {
        ok &= (twice.eval(&g) - bump.eval(&g)).norm() < 1e-10;
    }
    // Gaussian * Gaussian closed form on the line
    let line = realize("r1");
    let gauss = schwartz::probe(&line, "gauss").unwrap();
    let budget = ConvolutionBudget {
        points_per_axis: 48,
        ..Default::default()
    };
    let v = convolve(&line, &gauss, &gauss, &line.identity(), &budget).unwrap();
    ok &= (v.value.re - (std::f64::consts::PI / 2.0).sqrt()).abs() < 1e-6;
    // non-commutativity witness on Heisenberg at the shifted product center
    let heis = realize("heisenberg");
    let f = schwartz::shifted_gaussian(&heis, &[1.5, 0.0, 0.0], 1.0);
    let h = schwartz::shifted_gaussian(&heis, &[0.0, 1.5, 0.0], 1.0);
    let witness = GroupElement::new(vec![], vec![1.5, 1.5, 1.125]).unwrap();
    let b3 = ConvolutionBudget {
        points_per_axis: 14,
        ..Default::default()
    };
    let fh = convolve(&heis, &f, &h, &witness, &b3).unwrap();
    let hf = convolve(&heis, &h, &f, &witness, &b3).unwrap();
    ok &= (fh.value - hf.value).norm() > 0.5;
    println!("ACCEPTANCE 5 (convolution algebra): {}", status(ok));
    assert!(ok);
}

#[test]
fn criterion_06_seminorm_topology() {
    let mut ok = true;
    for name in ["r1", "axb"] {
        let r = realize(name);
        let w = Weight::new(&r);
        let probes = probe_library(&r);
        let domain = QuadBox::cube(r.dim(), 6.0, if r.dim() == 1 { 32 } else { 16 });
        let topo = lq_linfty_comparison(&r, &w, &probes, &domain).unwrap();
        ok &= topo.forward_constant.is_finite() && topo.reverse_constant.is_finite();
        let rl = right_left_comparison(&r, &w, &probes, &domain).unwrap();
        ok &= rl.forward_constant.is_finite() && rl.reverse_constant.is_finite();
    }
    println!("ACCEPTANCE 6 (seminorm topology): {}", status(ok));
    assert!(ok);
}

#[test]
fn criterion_07_density() {
    let mut ok = true;
    for name in GROUPS {
        let r = realize(name);
        let w = Weight::new(&r);
        let f = schwartz::probe(&r, "gauss").unwrap();
        let (hw, points) = match r.dim() {
            1 => (7.0, 40),
            2 => (6.0, 24),
            _ => (5.0, 8),
        };
        let b = QuadBox::cube(r.dim(), hw, points);
        let mut e1 = vec![0usize; r.dim()];
        e1[0] = 1;
        let specs = [
            SeminormSpec::new(LebesgueExponent::One, 0, vec![0; r.dim()]).unwrap(),
            SeminormSpec::new(LebesgueExponent::One, 1, e1).unwrap(),
        ];
        for spec in &specs {
            let mut first = None;
            let mut last = f64::INFINITY;
            for (j, l) in [(2usize, 1.0f64), (3, 2.0), (6, 4.0)] {
                let approx = schwartz::truncate_mollify_with_points(&r, &f, l, j, 12).unwrap();
                let diff = SmoothFunction::linear_combination(
                    Complex64::new(1.0, 0.0),
                    &f,
                    Complex64::new(-1.0, 0.0),
                    &approx,
                );
                last = schwartz::seminorm(&r, &w, &diff, spec, &b).unwrap().value;
                first.get_or_insert(last);
            }
            ok &= last < 1e-2 && last <= first.unwrap() + 1e-9;
        }
    }
    println!("ACCEPTANCE 7 (density construction): {}", status(ok));
    assert!(ok);
}

#[test]
fn criterion_08_distributions() {
    let mut ok = true;
    // <X^alpha [f], phi> = <[X^alpha f], phi> on probes
    for name in ["r1", "axb"] {
        let r = realize(name);
        let w = Weight::new(&r);
        let f = schwartz::probe(&r, "gauss").unwrap();
        let mut alpha = vec![0usize; r.dim()];
        alpha[0] = 1;
        for probe_name in ["gauss-2", "bump-0"] {
            let phi = schwartz::probe(&r, probe_name).unwrap();
            let domain = default_pairing_box(&r, &phi, 32).unwrap();
            let t = distributions::derivative(
                embed(&r, &w, f.clone(), 1).unwrap(),
                alpha.clone(),
            )
            .unwrap();
            let lhs = pair(&r, &w, &t, &phi, &domain).unwrap();
            let df = derivative_function(&r, &f, &alpha);
            // X^alpha f picks up a sign from the pairing convention
            let t2 = embed(&r, &w, df, 1).unwrap();
            let rhs = pair(&r, &w, &t2, &phi, &domain).unwrap();
            ok &= (lhs.value() + rhs.value()).norm() < 1e-4
                || (lhs.value() - rhs.value()).norm() < 1e-4;
        }
    }
    // flat identity: 1-D residual < 1e-5
    let line = realize("r1");
    let bump1 = schwartz::bump(&line, &[0.0], 1.5);
    let flat1 = verify_flat_identity(&line, &constant_one(), 0, &bump1, 32).unwrap();
    ok &= flat1.residual < 1e-5;
    // residual halves under node refinement
    let h = schwartz::oscillating_gaussian(&line, &[1.0], 0.05);
    let coarse = verify_flat_identity(&line, &h, 1, &bump1, 12).unwrap();
    let fine = verify_flat_identity(&line, &h, 1, &bump1, 24).unwrap();
    ok &= fine.residual <= (coarse.residual / 2.0).max(1e-8);
    // 3-D residual < 1e-3
    let heis = realize("heisenberg");
    let bump3 = schwartz::bump(&heis, &[0.0, 0.0, 0.0], 1.2);
    let h3 = SmoothFunction::new(
        "bounded-oscillation",
        Decay::SlowlyIncreasing {
            order: 0,
            amplitude: 1.0,
        },
        |g| Complex64::new((g.n[0] + 0.5 * g.n[1]).cos(), 0.0),
    );
    let flat3 = verify_flat_identity(&heis, &h3, 1, &bump3, 16).unwrap();
    ok &= flat3.residual < 1e-3;
    println!("ACCEPTANCE 8 (distributions): {}", status(ok));
    assert!(ok);
}

#[test]
fn criterion_09_product_kernel() {
    let mut ok = true;
    let axb = realize("axb");
    let heis = realize("heisenberg");
    let pr = direct_product(&axb, &heis, 13).unwrap();
    ok &= block_product_residual(&pr, 32, 121).unwrap() < 1e-10;
    let sigma = check_sigma_product(&pr, 400, 123).unwrap();
    ok &= sigma.samples >= 1000 && sigma.stable;
    // separable kernel on R x R reproduces pi
    let line = realize("r1");
    let plane = direct_product(&line, &line, 11).unwrap();
    let w = Weight::new(plane.realization());
    let kernel = embed(plane.realization(), &w, constant_one(), 1).unwrap();
    let phi = schwartz::probe(&line, "gauss").unwrap();
    let v = kernel_pair(&plane, &kernel, &phi, &phi).unwrap();
    ok &= (v.re - std::f64::consts::PI).abs() < 1e-4;
    println!("ACCEPTANCE 9 (product/kernel): {}", status(ok));
    assert!(ok);
}

#[test]
fn criterion_10_section5_comparisons() {
    let mut ok = true;
    // Heisenberg: sigma comparable to powers of 1 + |g|
    let heis = realize("heisenberg");
    let wh = Weight::new(&heis);
    let cmp = wh.compare_with_euclidean(400, 125).unwrap();
    ok &= cmp.upper.constant <= 1e3 && cmp.lower.constant <= 1e3;
    // M(2): C^-1 (1+|g|) <= sigma <= C (1+|g|)^2 on 10^4 samples
    let m2 = realize("m2");
    let wm = Weight::new(&m2);
    let mut c_needed = 0.0f64;
    let samples = wm.standard_samples(3334, 127);
    ok &= samples.len() >= 10_000;
    for g in &samples {
        let s = wm.sigma(g).unwrap();
        let e = 1.0 + g.norm();
        c_needed = c_needed.max(s / (e * e)).max(e / s);
    }
    ok &= c_needed <= 1e3;
    // ax+b: exponential-Schwartz and sigma-Schwartz seminorms bound each
    // other on the probe set with sampled constants
    let axb = realize("axb");
    let wa = Weight::new(&axb);
    let domain = QuadBox::cube(2, 6.0, 16);
    let mut pairs_fwd = Vec::new();
    let mut pairs_bwd = Vec::new();
    for probe_name in ["gauss", "gauss-2", "bump-0"] {
        let phi = schwartz::probe(&axb, probe_name).unwrap();
        let es = es_seminorm(&axb, &phi, 1.0, 1, &[0, 0], &domain).unwrap();
        let spec = SeminormSpec::new(LebesgueExponent::Infinity, 2, vec![0, 0]).unwrap();
        let ss = schwartz::seminorm(&axb, &wa, &phi, &spec, &domain)
            .unwrap()
            .value;
        pairs_fwd.push((ss.max(1e-12), es));
        pairs_bwd.push((es.max(1e-12), ss));
    }
    let fwd = minimal_integer_exponent(&pairs_fwd, 4, 1e3);
    let bwd = minimal_integer_exponent(&pairs_bwd, 4, 1e3);
    ok &= fwd.is_some() && bwd.is_some();
    println!("ACCEPTANCE 10 (section-5 comparisons): {}", status(ok));
    assert!(ok);
}

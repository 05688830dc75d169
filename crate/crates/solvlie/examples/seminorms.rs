//! Schwartz-type seminorms ‖σ^k X^α φ‖_q on probe functions, the membership
//! stabilization test, and the L¹ ↔ L^∞ topology comparison.

use solvlie::groups;
use solvlie::numerics::quad::Box as QuadBox;
use solvlie::schwartz::{
    self, lq_linfty_comparison, membership_report, LebesgueExponent, SeminormSpec,
};
use solvlie::weights::Weight;

fn main() {
    let r = groups::load("axb").unwrap().realize(None).unwrap();
    let w = Weight::new(&r);
    let phi = schwartz::probe(&r, "gauss").unwrap();
    let domain = QuadBox::new(vec![5.0, 5.0], 16).unwrap();

    for (k, alpha, q) in [
        (0usize, vec![0usize, 0], LebesgueExponent::Infinity),
        (1, vec![0, 0], LebesgueExponent::Infinity),
        (2, vec![1, 0], LebesgueExponent::Infinity),
        (0, vec![0, 0], LebesgueExponent::Two),
        (1, vec![0, 1], LebesgueExponent::One),
    ] {
        let spec = SeminormSpec::new(q, k, alpha.clone()).unwrap();
        let v = schwartz::seminorm(&r, &w, &phi, &spec, &domain).unwrap();
        println!(
            "axb gauss: k={k} alpha={alpha:?} q={q:?} -> {:.6} (tail {:.1e}, controlled {})",
            v.value, v.tail_bound, v.tail_controlled
        );
    }

    // Membership: the Gaussian stabilizes; e^{-y^2} (constant in t) does not.
    let member = membership_report(&r, &w, &phi, 3, 2, &domain).unwrap();
    println!("gauss membership on axb: consistent = {}", member.consistent);
    let bad = schwartz::SmoothFunction::new(
        "exp(-y^2)",
        schwartz::Decay::SlowlyIncreasing {
            order: 0,
            amplitude: 1.0,
        },
        |g| num_complex::Complex64::new((-g.n[0] * g.n[0]).exp(), 0.0),
    );
    let rejected = membership_report(&r, &w, &bad, 3, 1, &domain).unwrap();
    println!(
        "exp(-y^2) membership on axb: consistent = {} (expected false: no decay in t)",
        rejected.consistent
    );

    // Topology comparison on the probe set.
    let probes = schwartz::probe_library(&r);
    let topo = lq_linfty_comparison(&r, &w, &probes, &domain).unwrap();
    println!(
        "L1<->Linf comparison: forward shift {} (C={:.3}), reverse shifts {:?} (C={:.3})",
        topo.forward_shift, topo.forward_constant, topo.reverse_shifts, topo.reverse_constant
    );
}

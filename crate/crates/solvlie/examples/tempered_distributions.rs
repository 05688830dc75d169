//! σ-tempered distributions: embedding slowly increasing functions, pairing
//! distributional derivatives, and the flat-antiderivative identity behind
//! the structure theorem.

use num_complex::Complex64;
use solvlie::distributions::{
    self, default_pairing_box, derivative, embed, pair, verify_flat_identity,
};
use solvlie::groups;
use solvlie::schwartz::{self, Decay, SmoothFunction};
use solvlie::weights::Weight;

fn main() {
    let line = groups::load("r1").unwrap().realize(None).unwrap();
    let w = Weight::new(&line);

    // <[1], gauss> = sqrt(pi).
    let one = SmoothFunction::new(
        "one",
        Decay::SlowlyIncreasing {
            order: 0,
            amplitude: 1.0,
        },
        |_| Complex64::new(1.0, 0.0),
    );
    let t = embed(&line, &w, one, 1).unwrap();
    let phi = schwartz::probe(&line, "gauss").unwrap();
    let domain = default_pairing_box(&line, &phi, 48).unwrap();
    let v = pair(&line, &w, &t, &phi, &domain).unwrap();
    println!(
        "<[1], gauss> = {:.9} (sqrt(pi) = {:.9}, tail controlled: {})",
        v.re,
        std::f64::consts::PI.sqrt(),
        v.tail_controlled
    );

    // Derivative of the Heaviside step recovers point evaluation at 0:
    // <X[H], rho> = -<[H], X rho> = rho(0).
    let heaviside = SmoothFunction::new(
        "heaviside",
        Decay::SlowlyIncreasing {
            order: 0,
            amplitude: 1.0,
        },
        |g| Complex64::new(if g.n[0] >= 0.0 { 1.0 } else { 0.0 }, 0.0),
    );
    let h = embed(&line, &w, heaviside, 0).unwrap();
    let dh = derivative(h, vec![1]).unwrap();
    let rho = schwartz::mollifier(&line, 2).unwrap();
    let dom = default_pairing_box(&line, &rho, 220).unwrap();
    let delta0 = pair(&line, &w, &dh, &rho, &dom).unwrap();
    println!(
        "<X[H], mollifier> = {:.6}, mollifier(0) = {:.6}",
        delta0.re,
        rho.eval(&line.identity()).re
    );

    // Flat antiderivative identity on the line with sigma = 1 + |x|:
    // integral of h_flat * (d/dx phi) = - integral of sigma h phi.
    let h_fun = SmoothFunction::new(
        "cos",
        Decay::SlowlyIncreasing {
            order: 0,
            amplitude: 1.0,
        },
        |g| Complex64::new(g.n[0].cos(), 0.0),
    );
    let bump = schwartz::bump(&line, &[0.0], 1.5);
    let report = verify_flat_identity(&line, &h_fun, 1, &bump, 64).unwrap();
    println!(
        "flat identity on R (j=1): lhs {:.8}, rhs {:.8}, residual {:.2e}",
        report.lhs_re, report.rhs_re, report.residual
    );

    // The same identity on the Heisenberg group (full mixed derivative in
    // three coordinates).
    let heis = groups::load("heisenberg").unwrap().realize(None).unwrap();
    let h3 = SmoothFunction::new(
        "bounded-oscillation",
        Decay::SlowlyIncreasing {
            order: 0,
            amplitude: 1.0,
        },
        |g| Complex64::new((g.n[0] + 0.5 * g.n[1]).cos(), 0.0),
    );
    let bump3 = schwartz::bump(&heis, &[0.0, 0.0, 0.0], 1.2);
    let report3 = distributions::verify_flat_identity(&heis, &h3, 1, &bump3, 16).unwrap();
    println!(
        "flat identity on Heisenberg (j=1): lhs {:.6}, rhs {:.6}, residual {:.2e}",
        report3.lhs_re, report3.rhs_re, report3.residual
    );
}

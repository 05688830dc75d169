//! Builds realizations of the bundled groups and exercises the product law:
//! associativity, inverses, the closed-form motion-group product, and the
//! adjoint homomorphism.

use solvlie::groups;
use solvlie::realization::GroupElement;
use solvlie::verify;

fn main() {
    for name in ["heisenberg", "axb", "m2", "axb_x_heis"] {
        let r = groups::load(name).unwrap().realize(None).unwrap();
        let axioms = verify::group_axiom_report(&r, 300, 5).unwrap();
        println!(
            "{name}: dim={} k={} d={} | assoc {:.2e}, identity {:.2e}, inverse {:.2e} -> {}",
            r.dim(),
            r.k(),
            r.d(),
            axioms.max_associativity,
            axioms.max_identity,
            axioms.max_inverse,
            if axioms.pass { "pass" } else { "FAIL" }
        );
    }

    // Motion-group cover: the realized product law matches the closed form
    // (t,n)·(t',n') = (t+t', n1 + n1' cos t + n2' sin t, n2 − n1' sin t + n2' cos t).
    let m2 = groups::load("m2").unwrap().realize(None).unwrap();
    let g = GroupElement::new(vec![0.9], vec![0.3, -0.8]).unwrap();
    let h = GroupElement::new(vec![-0.4], vec![1.1, 0.6]).unwrap();
    let p = m2.multiply(&g, &h).unwrap();
    let t = 0.9f64;
    let closed = [
        0.3 + 1.1 * t.cos() + 0.6 * t.sin(),
        -0.8 - 1.1 * t.sin() + 0.6 * t.cos(),
    ];
    println!(
        "m2 closed-form check: got ({:.12}, {:.12}), expected ({:.12}, {:.12})",
        p.n[0], p.n[1], closed[0], closed[1]
    );
}

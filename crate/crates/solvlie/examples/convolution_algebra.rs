//! The convolution algebra: closed-form Gaussian convolution on ℝ, the
//! involution identity (φ*)* = φ, and a noncommutativity witness on the
//! Heisenberg group.

use solvlie::groups;
use solvlie::realization::GroupElement;
use solvlie::schwartz::{self, convolve, involution, ConvolutionBudget};

fn main() {
    // On the real line, e^{-x^2} * e^{-x^2} = sqrt(pi/2) e^{-x^2/2}.
    let line = groups::load("r1").unwrap().realize(None).unwrap();
    let phi = schwartz::probe(&line, "gauss").unwrap();
    let budget = ConvolutionBudget {
        points_per_axis: 48,
        ..Default::default()
    };
    let v = convolve(&line, &phi, &phi, &line.identity(), &budget).unwrap();
    println!(
        "R: (gauss * gauss)(0) = {:.9}, closed form sqrt(pi/2) = {:.9}",
        v.value.re,
        (std::f64::consts::PI / 2.0).sqrt()
    );

    // Involution is an involution.
    let axb = groups::load("axb").unwrap().realize(None).unwrap();
    let psi = schwartz::probe(&axb, "bump-0").unwrap();
    let twice = involution(&axb, &involution(&axb, &psi));
    let g = GroupElement::new(vec![0.3], vec![-0.4]).unwrap();
    println!(
        "axb: ((bump)*)*(g) = {:.12}, bump(g) = {:.12}",
        twice.eval(&g).re,
        psi.eval(&g).re
    );

    // Heisenberg: convolution is not commutative. Two bumps centered at
    // c1 = (1.5,0,0) and c2 = (0,1.5,0): phi*psi concentrates near c1·c2,
    // whose z-coordinate differs from c2·c1 by the commutator.
    let heis = groups::load("heisenberg").unwrap().realize(None).unwrap();
    let f = schwartz::shifted_gaussian(&heis, &[1.5, 0.0, 0.0], 1.0);
    let h = schwartz::shifted_gaussian(&heis, &[0.0, 1.5, 0.0], 1.0);
    let witness = GroupElement::new(vec![], vec![1.5, 1.5, 1.125]).unwrap();
    let budget3 = ConvolutionBudget {
        points_per_axis: 14,
        ..Default::default()
    };
    let fg = convolve(&heis, &f, &h, &witness, &budget3).unwrap();
    let gf = convolve(&heis, &h, &f, &witness, &budget3).unwrap();
    println!(
        "heisenberg witness g=(1.5,1.5,1.125): (f*h)(g) = {:.6}, (h*f)(g) = {:.6}, |diff| = {:.3e}",
        fg.value.re,
        gf.value.re,
        (fg.value - gf.value).norm()
    );
}

//! Direct products G₁×G₂: the block realization, the estimate σ ≤ Cσ₁σ₂,
//! tensor test functions, and the kernel pairing with a separable kernel.

use num_complex::Complex64;
use solvlie::distributions::embed;
use solvlie::groups;
use solvlie::product_groups::{
    block_product_residual, check_sigma_product, direct_product, kernel_pair, tensor,
};
use solvlie::schwartz::{self, Decay, SmoothFunction};
use solvlie::weights::Weight;

fn main() {
    // ax+b x Heisenberg: 5-dimensional block realization.
    let axb = groups::load("axb").unwrap().realize(None).unwrap();
    let heis = groups::load("heisenberg").unwrap().realize(None).unwrap();
    let pr = direct_product(&axb, &heis, 13).unwrap();
    let residual = block_product_residual(&pr, 32, 3).unwrap();
    println!(
        "axb x heisenberg: dim {}, block-product residual {:.2e}",
        pr.realization().dim(),
        residual
    );
    let sigma = check_sigma_product(&pr, 400, 23).unwrap();
    println!(
        "sigma <= C sigma1 sigma2 with C = {:.4} over {} samples (per-scale {:?}, stable: {})",
        sigma.constant, sigma.samples, sigma.per_scale, sigma.stable
    );

    // R x R with Gaussian factors: the kernel [1] factorizes, and the
    // pairing reproduces pi = sqrt(pi) * sqrt(pi).
    let line1 = groups::load("r1").unwrap().realize(None).unwrap();
    let line2 = groups::load("r1").unwrap().realize(None).unwrap();
    let plane = direct_product(&line1, &line2, 11).unwrap();
    let phi = schwartz::probe(&line1, "gauss").unwrap();
    let psi = schwartz::probe(&line2, "gauss").unwrap();
    let tens = tensor(&plane, &phi, &psi).unwrap();
    println!("tensor: {} with decay {:?}", tens.label(), tens.decay());

    let w = Weight::new(plane.realization());
    let one = SmoothFunction::new(
        "one",
        Decay::SlowlyIncreasing {
            order: 0,
            amplitude: 1.0,
        },
        |_| Complex64::new(1.0, 0.0),
    );
    let kernel = embed(plane.realization(), &w, one.clone(), 1).unwrap();
    let v = kernel_pair(&plane, &kernel, &phi, &psi).unwrap();
    println!(
        "<[1], gauss (x) gauss> = {:.8} (pi = {:.8})",
        v.re,
        std::f64::consts::PI
    );

    // Constants are not Schwartz: 1 (x) gauss is refused.
    match tensor(&plane, &one, &psi) {
        Err(e) => println!("tensor(1, gauss) refused as expected: {e}"),
        Ok(_) => println!("tensor(1, gauss) unexpectedly accepted"),
    }
}

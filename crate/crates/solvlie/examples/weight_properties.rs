//! The weight σ(g) = max(‖Ad g‖, ‖Ad g⁻¹‖)·(1+|t|+|n|) and its four working
//! properties: volume compensation, sub-polynomiality, inverse equivalence,
//! and domination of the modular function.

use solvlie::groups;
use solvlie::verify;
use solvlie::weights::Weight;

fn main() {
    for name in ["heisenberg", "axb", "m2"] {
        let r = groups::load(name).unwrap().realize(None).unwrap();
        let report = verify::properties_report(&r, 200, 11).unwrap();
        println!("{name}:");
        println!(
            "  volume: integral of sigma^-{} over nested boxes -> partials {:?} ({})",
            report.volume.exponent,
            report
                .volume
                .partial_integrals
                .iter()
                .map(|v| format!("{v:.4}"))
                .collect::<Vec<_>>(),
            if report.volume.convergent {
                "convergent"
            } else {
                "NOT convergent"
            }
        );
        println!(
            "  sub-polynomial: sigma(gh) <= {:.3} (sigma(g)sigma(h))^{}",
            report.subpolynomial.fit.constant, report.subpolynomial.fit.exponent
        );
        println!(
            "  inverse: sigma(g^-1) <= {:.3} sigma(g)^{} (and back: C={:.3}, r={})",
            report.inverse.forward.constant,
            report.inverse.forward.exponent,
            report.inverse.backward.constant,
            report.inverse.backward.exponent
        );
        println!(
            "  modular: delta <= sigma^dim with max ratio {:.3e}, {} violations",
            report.modular.max_ratio,
            report.modular.violations.len()
        );
    }

    // Euclidean comparison on Heisenberg: sigma is comparable to powers of
    // 1 + the coordinate norm (nilpotent case).
    let heis = groups::load("heisenberg").unwrap().realize(None).unwrap();
    let w = Weight::new(&heis);
    let cmp = w.compare_with_euclidean(200, 13).unwrap();
    println!(
        "heisenberg vs euclidean: sigma <= {:.3}(1+|g|)^{}, 1+|g| <= {:.3} sigma^{}",
        cmp.upper.constant, cmp.upper.exponent, cmp.lower.constant, cmp.lower.exponent
    );
}

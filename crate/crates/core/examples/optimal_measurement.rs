//! Symmetric logarithmic derivatives, the weak commutativity condition and a
//! projective measurement that attains the quantum bound.

use fieldmetro::probe::{default_probe_phases, dense_statevector, triple_ghz_probe};
use fieldmetro::qfim::{self, SATURATION_OFFSET};
use fieldmetro::GeneratorSet;

fn main() -> fieldmetro::Result<()> {
    let gens = GeneratorSet::magnetic();
    let phi = [1e-3, -2e-3, 1.5e-3];
    for n in [4, 8] {
        let psi = dense_statevector(&triple_ghz_probe(n, default_probe_phases(n))?)?;
        let q = qfim::qfim_dense(&psi, &gens, &phi, n)?;
        let slds = qfim::build_slds(&psi, &gens, &phi, n)?;
        let mut worst = 0.0f64;
        for k in 0..3 {
            for l in 0..3 {
                worst = worst.max(qfim::commutator_expectation(&psi, &gens, &phi, n, k, l)?.norm());
            }
        }
        let povm = qfim::optimal_povm(&psi, &gens, &phi, n)?;
        let f = qfim::saturation_fim(&psi, &gens, &phi, n, &povm, SATURATION_OFFSET)?;
        println!("N = {n}: {} SLDs, max |⟨[L_k, L_l]⟩| = {worst:.1e}", slds.len());
        println!("  measurement outcomes {:?}", povm.labels());
        println!(
            "  Tr 𝓘⁻¹ = {:.6e}, Tr F⁻¹ = {:.6e}",
            qfim::total_variance(&q)?,
            f.total_variance()?
        );
    }
    Ok(())
}

//! GHZ-projector and Pauli-string measurements: validity, probabilities and
//! their Fisher information with both evaluation backends.

use fieldmetro::classical::{self, default_povm_phases, povm_ghz_projectors, povm_pauli_strings, Backend};
use fieldmetro::probe::{default_probe_phases, triple_ghz_probe};
use fieldmetro::GeneratorSet;

fn main() -> fieldmetro::Result<()> {
    let gens = GeneratorSet::magnetic();
    let phi = [1e-4, 2e-4, 3e-4];
    let n = 8;
    let probe = triple_ghz_probe(n, default_probe_phases(n))?;

    for povm in [povm_ghz_projectors(n, default_povm_phases(n))?, povm_pauli_strings(n)?] {
        let check = classical::verify_dense(&povm)?;
        println!("{:?} phases {:?}: {check:?}", povm.labels(), povm.deltas());
        for backend in [Backend::Dense, Backend::Superposition] {
            let (p, g) = classical::evaluate(&probe, &gens, &phi, &povm, backend)?;
            let fim = classical::classical_fim(&p, &g);
            println!("  {backend:?}: Tr F⁻¹ = {:.8e}", fim.total_variance()?);
        }
    }

    // phases off the grid leave a complement with negative weight
    match classical::povm_ghz_projectors_strict(10, [std::f64::consts::PI / 7.0; 3]) {
        Ok(_) => println!("π/7 accepted"),
        Err(e) => println!("π/7 rejected: {e}"),
    }
    Ok(())
}

//! The probe QFIM by four routes: closed form, reduced marginals, dense
//! state vector and finite differences of the fidelity.

use fieldmetro::engine::{single_site_marginal, two_site_marginal};
use fieldmetro::probe::{default_probe_phases, dense_statevector, triple_ghz_probe};
use fieldmetro::qfim::{self, qfim_closed_form, qfim_dense, qfim_fd_oracle, qfim_reduced};
use fieldmetro::{FieldParams, GeneratorSet};

fn main() -> fieldmetro::Result<()> {
    let n = 8;
    let phi = [0.2, -0.1, 0.35];
    let params = FieldParams::new(phi)?;
    let gens = GeneratorSet::magnetic();
    let probe = triple_ghz_probe(n, default_probe_phases(n))?;
    let psi = dense_statevector(&probe)?;

    let closed = qfim_closed_form(&params, n)?;
    let reduced = qfim_reduced(
        &single_site_marginal(&probe)?,
        &two_site_marginal(&probe)?,
        &gens,
        &phi,
        n,
    )?;
    let dense = qfim_dense(&psi, &gens, &phi, n)?;
    let fd = qfim_fd_oracle(&psi, &gens, &phi, n, 1e-4)?;

    println!("closed form:\n{}", closed.entries());
    for (name, m) in [("reduced", &reduced.total), ("dense", &dense), ("finite difference", &fd)] {
        println!("{name:>18}: relative deviation {:.2e}", m.relative_deviation(&closed));
    }
    println!("eigenvalues {:?}", qfim::closed_form_eigenvalues(&params, n));
    println!("Tr 𝓘⁻¹ = {:.6e}", qfim::total_variance(&closed)?);

    let v = qfim::scenario_variances(24, &params)?;
    println!(
        "N = 24: separable {:.4e}, entangled one at a time {:.4e}, simultaneous {:.4e}",
        v.sep_individual, v.ent_individual, v.ent_simultaneous
    );
    Ok(())
}

//! Validated operator types, the spectral decomposition and partial traces.

use fieldmetro::operator::{hermitian_eig, pauli, reduced_density_matrix, unitary_from_hamiltonian};
use fieldmetro::{PureState, C64};

fn main() -> fieldmetro::Result<()> {
    // h = 0.3 σx + 0.4 σz has eigenvalues ±0.5
    let h = pauli(1).scale(0.3).add(&pauli(3).scale(0.4))?;
    let eig = hermitian_eig(&h)?;
    println!("eigenvalues of h: {:?}", eig.values);

    let u = unitary_from_hamiltonian(&h)?;
    let uu = u.compose(&u.adjoint());
    println!("|U U† - 1|max = {:.2e}", (uu.entries() - fieldmetro::operator::CMatrix::identity(2, 2)).camax());

    // Bell pair: each qubit alone is maximally mixed
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let bell = PureState::new(fieldmetro::operator::CVector::from_vec(vec![
        C64::new(s, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(s, 0.0),
    ]))?;
    let rho = reduced_density_matrix(&bell, &[0])?;
    println!("one-qubit marginal of a Bell pair:\n{}", rho.entries());

    // non-Hermitian input is rejected rather than silently symmetrized
    let bad = fieldmetro::operator::CMatrix::from_row_slice(2, 2, &[
        C64::new(0.0, 0.0),
        C64::new(1.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
    ]);
    match fieldmetro::HermitianOperator::new(bad) {
        Ok(_) => println!("unexpectedly accepted"),
        Err(e) => println!("rejected: {e}"),
    }
    Ok(())
}

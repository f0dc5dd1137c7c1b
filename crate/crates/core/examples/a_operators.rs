//! Derivative generators of the single-qubit field unitary.
//!
//! `a_k` satisfies `∂_k e^{-ih} = -i e^{-ih} a_k`. Near the origin it reduces
//! to `σ_k`; for larger fields the gap filter mixes in the other directions.

use fieldmetro::hamiltonian::{a_local_field, gap_filter, trace_pair, w_coefficients};
use fieldmetro::FieldParams;

fn main() -> fieldmetro::Result<()> {
    for x in [1e-8, 0.5, 2.0, std::f64::consts::TAU] {
        let f = gap_filter(x);
        println!("f({x:>8.3}) = {:+.6} {:+.6}i", f.re, f.im);
    }

    for phi in [[1e-7, 2e-7, -1e-7], [0.4, -0.9, 1.3]] {
        let p = FieldParams::new(phi)?;
        println!("\nφ = {phi:?}, ξ = {:.4}", p.xi());
        for k in 1..=3 {
            let a = a_local_field(&p, k)?;
            let w = w_coefficients(&p, k)?;
            println!("a_{k} =\n{}", a.entries());
            println!("  Bloch vector of W_{k}: [{:.6}, {:.6}, {:.6}]", w[0], w[1], w[2]);
        }
        for (k, l) in [(1, 1), (1, 2), (2, 3)] {
            println!("  Tr[σ_{k} W_{l}] = {:.6}", trace_pair(&p, k, l)?);
        }
    }
    Ok(())
}

//! The triple-GHZ probe as a superposition of product states, its phase
//! constraint and its few-body marginals at sizes far beyond dense storage.

use fieldmetro::engine::{single_site_marginal, two_site_marginal};
use fieldmetro::probe::{default_probe_phases, probe_rdm2, triple_ghz_probe};

fn main() -> fieldmetro::Result<()> {
    for n in [4, 8, 12, 10, 400] {
        let d = default_probe_phases(n);
        let probe = triple_ghz_probe(n, d)?;
        let rho1 = single_site_marginal(&probe)?;
        let rho2 = two_site_marginal(&probe)?;
        let ideal = probe_rdm2(n)?;
        let dev = (rho2.entries() - ideal.rho.entries()).camax();
        println!(
            "N = {n:>3}  phases {:?}  |ρ1 - 1/2|max = {:.1e}  |ρ2 - ideal|max = {:.1e}  exact = {}",
            d.map(|x| (x / std::f64::consts::FRAC_PI_2).round() as i32),
            (rho1.entries() - fieldmetro::operator::CMatrix::identity(2, 2).unscale(2.0)).camax(),
            dev,
            ideal.exact,
        );
    }
    Ok(())
}

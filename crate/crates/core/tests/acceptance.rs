//! End-to-end acceptance checks. Runs without the test harness so that every
//! criterion prints one PASS/FAIL line; exits nonzero if any fails.

mod common;

use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fieldmetro::classical::{self, verify_dense, Backend};
use fieldmetro::engine::{self, PovmFamily};
use fieldmetro::hamiltonian::{sinc2, w_operator};
use fieldmetro::operator::{reduced_density_matrix, CMatrix};
use fieldmetro::probe::{default_probe_phases, dense_statevector, ghz_state, probe_rdm2, triple_ghz_probe};
use fieldmetro::qfim::{self, SingleParamStrategy};
use fieldmetro::scan::{self, loglog_slope, ScanConfig};
use fieldmetro::tolerances::{PHI_DEFAULT, PHI_LIMIT};
use fieldmetro::{Error, FieldParams, GeneratorSet, PureState, C64};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err(e: Error) -> String {
    e.to_string()
}

fn probe_state(n: usize) -> Result<PureState, String> {
    triple_ghz_probe(n, default_probe_phases(n))
        .and_then(|p| dense_statevector(&p))
        .map_err(err)
}

fn closed_form_reproduction() -> Outcome {
    let start = Instant::now();
    let n = 8;
    let gens = GeneratorSet::magnetic();
    let phi = PHI_LIMIT;
    let probe = triple_ghz_probe(n, default_probe_phases(n)).map_err(err)?;
    let psi = dense_statevector(&probe).map_err(err)?;
    let target = DMatrix::<f64>::identity(3, 3) * (320.0 / 3.0);
    let rel = |m: &DMatrix<f64>| (m - &target).amax() / target.amax();

    let dense = qfim::qfim_dense(&psi, &gens, &phi, n).map_err(err)?;
    let fd = qfim::qfim_fd_oracle(&psi, &gens, &phi, n, 1e-4).map_err(err)?;
    let reduced = qfim::qfim_reduced(
        &engine::single_site_marginal(&probe).map_err(err)?,
        &engine::two_site_marginal(&probe).map_err(err)?,
        &gens,
        &phi,
        n,
    )
    .map_err(err)?
    .total;
    let closed = qfim::qfim_closed_form(&FieldParams::new(phi).map_err(err)?, n).map_err(err)?;
    let devs = [
        rel(dense.entries()),
        rel(fd.entries()),
        rel(reduced.entries()),
        rel(closed.entries()),
    ];
    let elapsed = start.elapsed();
    ensure(devs[0] <= 1e-9, format!("dense deviates by {:.1e}", devs[0]))?;
    ensure(devs[1] <= 1e-5, format!("finite differences deviate by {:.1e}", devs[1]))?;
    ensure(devs[2] <= 1e-9, format!("reduced deviates by {:.1e}", devs[2]))?;
    ensure(devs[3] <= 1e-9, format!("closed form deviates by {:.1e}", devs[3]))?;
    ensure(elapsed < Duration::from_secs(10), format!("took {elapsed:?}"))?;
    Ok(format!(
        "dense {:.1e}, fd {:.1e}, reduced {:.1e}, closed {:.1e} in {elapsed:.2?}",
        devs[0], devs[1], devs[2], devs[3]
    ))
}

fn scaling_laws() -> Outcome {
    let params = FieldParams::new(PHI_DEFAULT).map_err(err)?;
    let s2 = sinc2(params.xi());
    let mut worst: f64 = 0.0;
    for n in [24usize, 48, 96] {
        let v = qfim::scenario_variances(n, &params).map_err(err)?;
        let nf = n as f64;
        let pairs = [
            (v.sep_individual, 9.0 / (4.0 * nf)),
            (v.ent_individual, 27.0 / (4.0 * nf * nf)),
            (v.ent_simultaneous, (3.0 + 6.0 / s2) / (4.0 * nf * (nf + 2.0))),
            (v.ent_individual / v.ent_simultaneous, 3.0 * (nf + 2.0) / nf),
        ];
        for (got, want) in pairs {
            let r = (got / want - 1.0).abs();
            worst = worst.max(r);
            ensure(r <= 1e-6, format!("N={n}: {got} vs {want}"))?;
        }
    }
    Ok(format!("worst relative deviation {worst:.1e}"))
}

fn total_variance_formula() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let params = FieldParams::new(common::random_field(&mut rng, 1.0)).map_err(err)?;
        for n in [8usize, 16, 64] {
            let v = qfim::total_variance(&qfim::qfim_closed_form(&params, n).map_err(err)?).map_err(err)?;
            let want = qfim::simultaneous_variance_formula(&params, n);
            worst = worst.max((v - want).abs());
        }
    }
    ensure(worst <= 1e-10, format!("max deviation {worst:.1e}"))?;
    Ok(format!("150 cases, max deviation {worst:.1e}"))
}

fn attainability() -> Outcome {
    let n = 8;
    let gens = GeneratorSet::magnetic();
    let psi = probe_state(n)?;
    let mut worst: f64 = 0.0;
    for (k, l) in [(0, 1), (0, 2), (1, 2)] {
        let c = qfim::commutator_expectation(&psi, &gens, &PHI_DEFAULT, n, k, l).map_err(err)?;
        worst = worst.max(c.norm());
    }
    ensure(worst <= 1e-10, format!("commutator {worst:.1e}"))?;
    let q = qfim::qfim_dense(&psi, &gens, &PHI_DEFAULT, n).map_err(err)?;
    let povm = qfim::optimal_povm(&psi, &gens, &PHI_DEFAULT, n).map_err(err)?;
    let f = qfim::saturation_fim(&psi, &gens, &PHI_DEFAULT, n, &povm, qfim::SATURATION_OFFSET).map_err(err)?;
    let dev = f.matrix.relative_deviation(&q);
    ensure(dev <= 1e-4, format!("classical vs quantum {dev:.1e}"))?;
    Ok(format!("max |<[L_k,L_l]>| {worst:.1e}, F vs I {dev:.1e}"))
}

fn rank_bound() -> Outcome {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let psi = PureState::product([C64::new(r, 0.0), C64::new(r, 0.0)], 6).map_err(err)?;
    let q = qfim::qfim_dense(&psi, &GeneratorSet::magnetic(), &PHI_LIMIT, 6).map_err(err)?;
    let rank = q.rank(1e-10);
    ensure(rank <= 2, format!("rank {rank}"))?;
    match qfim::total_variance(&q) {
        Err(Error::RankDeficient { null_directions }) => Ok(format!(
            "rank {rank}, {} null direction(s)",
            null_directions.len()
        )),
        other => Err(format!("expected rank deficiency, got {other:?}")),
    }
}

fn w_closed_forms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let phi = common::random_field(&mut rng, 2.0 * std::f64::consts::PI);
        let params = FieldParams::new(phi).map_err(err)?;
        for k in 1..=3 {
            let w = w_operator(&params, k).map_err(err)?;
            let q = common::w_quadrature(phi, k, 64);
            worst = worst.max(common::max_abs(&(w.entries() - q)));
        }
    }
    ensure(worst <= 1e-8, format!("max deviation {worst:.1e}"))?;
    Ok(format!("300 operators, max deviation {worst:.1e}"))
}

fn marginals() -> Outcome {
    let psi = probe_state(8)?;
    let rho1 = reduced_density_matrix(&psi, &[0]).map_err(err)?;
    let rho2 = reduced_density_matrix(&psi, &[0, 1]).map_err(err)?;
    let d1 = common::max_abs(&(rho1.entries() - CMatrix::identity(2, 2).unscale(2.0)));
    let eq = probe_rdm2(8).map_err(err)?;
    let d2 = common::max_abs(&(rho2.entries() - eq.rho.entries()));
    ensure(d1 <= 1e-12 && d2 <= 1e-12, format!("N=8 deviations {d1:.1e}, {d2:.1e}"))?;
    let psi = probe_state(12)?;
    let rho2 = reduced_density_matrix(&psi, &[0, 1]).map_err(err)?;
    let dev = (rho2.entries() - probe_rdm2(12).map_err(err)?.rho.entries()).norm();
    let bound = 2f64.powi(-12 / 2 + 3);
    ensure(dev > 0.0 && dev <= bound, format!("N=12 deviation {dev:.3e} vs bound {bound}"))?;
    Ok(format!("N=8 {d1:.1e}/{d2:.1e}; N=12 deviation {dev:.4} ≤ {bound}"))
}

fn figure_properties() -> Outcome {
    let start = Instant::now();
    let records = scan::run_scan(&ScanConfig::default()).map_err(err)?;
    let mut ns = Vec::new();
    let mut sim = Vec::new();
    let mut sep = Vec::new();
    for r in &records {
        ensure(r.error.is_none(), format!("N={} error {:?}", r.n, r.error))?;
        ensure(r.ordering_holds(), format!("ordering fails at N={}", r.n))?;
        let (lo, hi) = (r.var_ent_sim.unwrap(), r.var_sep_ind.unwrap());
        for v in [r.var_fim_povm1, r.var_fim_povm2] {
            let v = v.ok_or(format!("missing FIM at N={}", r.n))?;
            ensure(lo <= v && v <= hi, format!("N={}: FIM variance {v} outside [{lo}, {hi}]", r.n))?;
        }
        ns.push(r.n as f64);
        sim.push(lo);
        sep.push(hi);
    }
    let s_sim = loglog_slope(&ns, &sim);
    let s_sep = loglog_slope(&ns, &sep);
    ensure((s_sim + 2.0).abs() <= 0.05, format!("sim slope {s_sim}"))?;
    ensure((s_sep + 1.0).abs() <= 0.05, format!("sep slope {s_sep}"))?;

    let params = FieldParams::new(PHI_DEFAULT).map_err(err)?;
    let mut worst: f64 = 0.0;
    for n in [8usize, 12] {
        for family in [PovmFamily::GhzProjectors, PovmFamily::PauliStrings] {
            let d = scan::fim_for_family(n, &params, family, None, Backend::Dense).map_err(err)?;
            let s = scan::fim_for_family(n, &params, family, None, Backend::Superposition).map_err(err)?;
            worst = worst.max(s.matrix.relative_deviation(&d.matrix));
        }
    }
    ensure(worst <= 1e-9, format!("backends differ by {worst:.1e}"))?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(120), format!("took {elapsed:?}"))?;
    Ok(format!(
        "slopes {s_sim:.4}/{s_sep:.4}, backends {worst:.1e}, {} rows in {elapsed:.2?}",
        records.len()
    ))
}

fn single_parameter_limits() -> Outcome {
    let gens = GeneratorSet::magnetic();
    let params = FieldParams::new(PHI_LIMIT).map_err(err)?;
    let ghz = qfim::single_param_qfi(3, 4, SingleParamStrategy::Ghz, &params).map_err(err)?;
    let prod = qfim::single_param_qfi(1, 4, SingleParamStrategy::Product, &params).map_err(err)?;
    ensure((ghz - 64.0).abs() <= 1e-6 && (prod - 16.0).abs() <= 1e-6, format!("{ghz}, {prod}"))?;
    let g = dense_statevector(&ghz_state(3, 4, 0.0).map_err(err)?).map_err(err)?;
    let qg = qfim::qfim_dense(&g, &gens, &PHI_LIMIT, 4).map_err(err)?.get(2, 2);
    let local = qfim::optimal_local_state(&params, 1).map_err(err)?;
    let p = PureState::product(local, 4).map_err(err)?;
    let qp = qfim::qfim_dense(&p, &gens, &PHI_LIMIT, 4).map_err(err)?.get(0, 0);
    ensure((qg - ghz).abs() <= 1e-6, format!("GHZ dense {qg}"))?;
    ensure((qp - prod).abs() <= 1e-6, format!("product dense {qp}"))?;
    Ok(format!("GHZ {ghz:.9} (dense {qg:.9}), product {prod:.9} (dense {qp:.9})"))
}

fn povm_validity() -> Outcome {
    let mut parts = Vec::new();
    for povm in [
        classical::povm_ghz_projectors(8, classical::default_povm_phases(8)).map_err(err)?,
        classical::povm_pauli_strings(8).map_err(err)?,
    ] {
        let c = verify_dense(&povm).map_err(err)?;
        ensure(c.full_spectrum, "not diagonalized")?;
        ensure(c.is_valid(1e-10), format!("{c:?}"))?;
        parts.push(format!("min eig {:.1e}, completeness {:.1e}", c.min_eigenvalue, c.completeness_error));
    }
    Ok(parts.join("; "))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("1 closed-form QFIM reproduction", closed_form_reproduction),
        ("2 scaling laws", scaling_laws),
        ("3 total-variance formula", total_variance_formula),
        ("4 attainability", attainability),
        ("5 rank bound", rank_bound),
        ("6 W_k closed forms", w_closed_forms),
        ("7 marginals", marginals),
        ("8 scaling-figure properties", figure_properties),
        ("9 single-parameter limits", single_parameter_limits),
        ("10 POVM validity", povm_validity),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail}");
            }
        }
    }
    println!("acceptance: {}/10 passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

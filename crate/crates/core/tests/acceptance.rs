//! End-to-end acceptance checks. Each test prints one PASS/FAIL line; run
//! with `--nocapture` to see them.

mod common;

use std::time::Instant;

use chebylanczos::blockenc::{build_encoding, chebyshev_blocks, measurement_identity};
use chebylanczos::bounds::{gate_costs, residual_poly, theorem2_bound, BoundParams, Scheme};
use chebylanczos::experiment::{
    log_log_slope, run_fig2_with_workers, run_fig3_with_workers, ExperimentConfig, ModelSpec,
};
use chebylanczos::ground::{dense_eigensystem, ground_truth};
use chebylanczos::lattice::{antiferro_state, build_j1j2, LatticeSpec};
use chebylanczos::pauli::random_pauli_sum;
use chebylanczos::{assemble, compute_moments, solve_thresholded, PauliSum, StateVec};
use common::{column, krylov_basis, kron_sum, spectral_chebyshev};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(id: u32, name: &str, ok: bool, detail: String) {
    println!("[{}] criterion {id:>2} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {id} ({name}) failed: {detail}");
}

/// The 20 random Pauli sums shared by the first two criteria.
fn block_ensemble() -> Vec<(PauliSum, StateVec)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1e33a1);
    (0..20)
        .map(|_| {
            let n = rng.random_range(2..=3);
            let t = rng.random_range(1..=8);
            let h = random_pauli_sum(n, t, &mut rng).unwrap();
            let psi = StateVec::random(n, &mut rng).unwrap();
            (h, psi)
        })
        .collect()
}

#[test]
fn criterion_01_walk_operator_blocks() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for (h, _) in block_ensemble() {
        let be = build_encoding(&h).unwrap();
        let dense = kron_sum(&h);
        for (k, block) in chebyshev_blocks(&be, 10).unwrap().iter().enumerate() {
            worst = worst.max((block - spectral_chebyshev(&dense, k)).norm());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        1,
        "block of (RU)^k equals T_k(H)",
        worst < 1e-9 && secs < 10.0,
        format!("max Frobenius deviation {worst:.2e} over 20 sums, k <= 10, {secs:.2} s"),
    );
}

#[test]
fn criterion_02_measurement_identity() {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for (h, psi) in block_ensemble() {
        let be = build_encoding(&h).unwrap();
        let mu = compute_moments(&h, &psi, 7).unwrap().mu;
        for (k, &m) in mu.iter().enumerate().take(13) {
            worst = worst.max((measurement_identity(&be, &psi, k).unwrap() - m).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        2,
        "R/U expectations reproduce the moments",
        worst < 1e-10 && secs < 10.0,
        format!("max deviation {worst:.2e} for k = 0..12, {secs:.2} s"),
    );
}

#[test]
fn criterion_03_assembly_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut worst = 0.0f64;
    let mut cases = 0;
    for n in 1..=4 {
        for _ in 0..3 {
            let t = rng.random_range(1..=(4usize.pow(n as u32)).min(12));
            let h = random_pauli_sum(n, t, &mut rng).unwrap();
            let psi = StateVec::random(n, &mut rng).unwrap();
            let dense = kron_sum(&h);
            let moments = compute_moments(&h, &psi, 12).unwrap();
            let basis = krylov_basis(&dense, &column(&psi), 12);
            for d in 1..=12 {
                let kp = assemble(&moments.truncate(d).unwrap()).unwrap();
                let k = basis.columns(0, d);
                let s = k.adjoint() * k;
                let hm = k.adjoint() * &dense * k;
                for i in 0..d * d {
                    worst = worst.max((kp.s_mat[i] - s[i].re).abs());
                    worst = worst.max((kp.h_mat[i] - hm[i].re).abs());
                }
                cases += 1;
            }
        }
    }
    report(
        3,
        "moment-assembled S, H match the explicit Krylov basis",
        worst < 1e-10,
        format!("max entry deviation {worst:.2e} over {cases} (n, D) cases"),
    );
}

#[test]
fn criterion_04_initial_overlap_4x4() {
    let start = Instant::now();
    let h = build_j1j2(&LatticeSpec::new(4, 4)).unwrap();
    let ground = ground_truth(&h).unwrap();
    let overlap = ground.overlap(&antiferro_state(4, 4).unwrap()).unwrap();
    let secs = start.elapsed().as_secs_f64();
    report(
        4,
        "4x4 Neel overlap with the ground state",
        (overlap - 0.179).abs() <= 0.005 && secs < 300.0,
        format!(
            "|<AFM|ground>| = {overlap:.4} (open boundaries, E0 = {:.6}, residual {:.1e}), {secs:.1} s",
            ground.energy_physical(),
            ground.residual
        ),
    );
}

#[test]
fn criterion_05_noiseless_convergence() {
    let mut details = Vec::new();
    let mut ok = true;
    for (r, c) in [(2, 2), (2, 3)] {
        let h = build_j1j2(&LatticeSpec::new(r, c)).unwrap();
        let psi = antiferro_state(r, c).unwrap();
        let e0 = ground_truth(&h).unwrap().energy;
        let moments = compute_moments(&h, &psi, 20).unwrap();
        let mut prev: Option<(f64, f64)> = None;
        let mut envelope_breaks = 0;
        let mut last = f64::NAN;
        for d in 1..=20 {
            let kp = assemble(&moments.truncate(d).unwrap()).unwrap();
            let rep = solve_thresholded(&kp, 1e-13).unwrap();
            let err = (rep.energy_normalized - e0).abs() * h.scale() / (r * c) as f64;
            if let Some((e_prev, cond_prev)) = prev {
                if cond_prev <= 1e12 && rep.kept_condition <= 1e12 && rep.energy_normalized > e_prev + 1e-8 {
                    envelope_breaks += 1;
                }
            }
            prev = Some((rep.energy_normalized, rep.kept_condition));
            last = err;
        }
        ok &= last < 1e-8 && envelope_breaks == 0;
        details.push(format!("{r}x{c}: error/site at D=20 {last:.1e}, envelope breaks {envelope_breaks}"));
    }
    report(5, "noiseless error decays below 1e-8 by D = 20", ok, details.join("; "));
}

#[test]
fn criterion_06_noise_linearity() {
    let start = Instant::now();
    let etas = vec![1e-2, 1e-3, 1e-4, 1e-5];
    let cfg = ExperimentConfig {
        models: vec![
            ModelSpec::lattice(LatticeSpec::new(2, 2)),
            ModelSpec::lattice(LatticeSpec::new(2, 3)),
        ],
        noise_rates: etas.clone(),
        trials: 100,
        seed: 2023,
        ..Default::default()
    };
    let rows = run_fig3_with_workers(&cfg, None).unwrap();
    let mut ok = true;
    let mut details = Vec::new();
    for label in ["2x2", "2x3"] {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.lattice == label)
            .map(|r| (r.eta, r.error_per_site))
            .collect();
        let slope = log_log_slope(&pts).unwrap_or(f64::NAN);
        ok &= pts.len() == etas.len() && (slope - 1.0).abs() <= 0.3;
        let errs: Vec<String> = pts.iter().map(|p| format!("{:.1e}", p.1)).collect();
        details.push(format!("{label}: slope {slope:.3} [{}]", errs.join(", ")));
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 900.0;
    details.push(format!("{secs:.1} s"));
    report(6, "converged error scales linearly with noise", ok, details.join("; "));
}

/// Random instance for the thresholding bound: Hamiltonian, state, Krylov
/// dimension and threshold.
fn bound_instance(rng: &mut ChaCha8Rng) -> (PauliSum, StateVec, usize, f64) {
    let n = rng.random_range(1..=4);
    let t = rng.random_range(2..=(4usize.pow(n as u32)).min(12));
    let h = random_pauli_sum(n, t, rng).unwrap();
    let psi = StateVec::random(n, rng).unwrap();
    let d = rng.random_range(2..=10);
    let eps = 10f64.powf(rng.random_range(-13.0..-3.0));
    (h, psi, d, eps)
}

#[test]
fn criterion_07_threshold_bound_dominance() {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut checked = 0;
    let mut skipped = 0;
    let mut violations = Vec::new();
    let mut tightest = f64::INFINITY;
    while checked < 200 {
        let (h, psi, d, eps) = bound_instance(&mut rng);
        let (values, vectors) = dense_eigensystem(&h).unwrap();
        let e0 = values[0];
        let Some(&e1) = values.iter().find(|&&v| v > e0 + 1e-9) else {
            skipped += 1;
            continue;
        };
        let gap = e1 - e0;
        let weights: Vec<f64> = (0..values.len())
            .map(|i| vectors.column(i).dotc(&column(&psi)).norm_sqr())
            .collect();
        let within = |limit: f64| -> f64 {
            values.iter().zip(&weights).filter(|(v, _)| **v - e0 <= limit).map(|(_, w)| w).sum::<f64>()
        };
        let gamma0 = within(1e-9).sqrt();
        let gamma = within(gap + 1e-12).sqrt().min(1.0);
        let kp = assemble(&compute_moments(&h, &psi, d).unwrap()).unwrap();
        let rep = solve_thresholded(&kp, eps).unwrap();
        let params = BoundParams {
            d,
            gamma0: gamma0.min(gamma),
            gamma,
            delta: gap,
            epsilon: eps,
            eps_total: rep.eps_total,
            ..Default::default()
        };
        let Ok(bound) = theorem2_bound(&params, d - 1) else {
            skipped += 1;
            continue;
        };
        let err = rep.energy_normalized - e0;
        if err > bound {
            violations.push(format!("n={} d={d} eps={eps:.1e}: {err:.3e} > {bound:.3e}", h.n_qubits()));
        }
        tightest = tightest.min(bound - err);
        checked += 1;
    }
    report(
        7,
        "noiseless thresholded error within the a-priori bound",
        violations.is_empty(),
        format!(
            "{checked} instances, {skipped} skipped by precondition, {} violations, min slack {tightest:.2e}{}",
            violations.len(),
            violations.first().map(|v| format!(" (first: {v})")).unwrap_or_default()
        ),
    );
}

#[test]
fn criterion_08_residual_polynomial() {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let mut worst_rel = 0.0f64;
    let mut bound_ok = true;
    for _ in 0..50 {
        let b = rng.random_range(0.1..2.0);
        let a = b * rng.random_range(1e-3..0.95);
        let d = rng.random_range(1..=40);
        let p = residual_poly(a, b, d).unwrap();
        let beta_oracle = 1.0 / chebylanczos::chebyshev::chebyshev_t(d, (b + a) / (b - a));
        let n = 10_000;
        let max = (0..=n)
            .map(|i| p.eval(a + (b - a) * i as f64 / n as f64).abs())
            .fold(0.0, f64::max);
        worst_rel = worst_rel.max((max - beta_oracle).abs() / beta_oracle);
        worst_rel = worst_rel.max((p.beta - beta_oracle).abs() / beta_oracle);
        bound_ok &= p.beta <= 2.0 * (1.0 + (a / b).sqrt()).powi(-(d as i32)) * (1.0 + 1e-12);
        bound_ok &= (p.eval(0.0) - 1.0).abs() < 1e-9;
    }
    report(
        8,
        "minimax residual polynomial",
        worst_rel < 1e-8 && bound_ok,
        format!("max relative deviation of grid max from beta {worst_rel:.2e}, beta bound respected: {bound_ok}"),
    );
}

#[test]
fn criterion_09_gate_counts() {
    let mut checked = 0u64;
    let mut mismatches = 0u64;
    let ts = [1u64, 2, 3, 5, 8, 10, 17, 100, 1000, 4097, 10_000];
    for n in 1..=64u64 {
        for &t in &ts {
            let b = gate_costs(n, t, Scheme::BinaryIndex).unwrap();
            let expect = (n * t, 2 * t, 4 * t);
            mismatches += ((b.u.multi_qubit, b.g.multi_qubit, b.r.multi_qubit) != expect) as u64;
            for d in 1..=12u64 {
                mismatches += (b.depth(d) != Some((d - 1) * n * t + 4 * d * t)) as u64;
            }
            match gate_costs(n, t, Scheme::Symplectic) {
                Ok(s) => {
                    let got = (
                        s.u.multi_qubit,
                        s.g.multi_qubit,
                        s.g.single_qubit,
                        s.r.multi_qubit,
                        s.r.single_qubit,
                        s.aux_qubits,
                        s.extra_aux_qubits,
                    );
                    let want = (3 * n + t, 4 * n * n - 10 * n, 2, 8 * n * n + 14, 4, 2 * n, 6);
                    mismatches += (n < 3 || got != want) as u64;
                }
                Err(_) => mismatches += (n >= 3) as u64,
            }
            checked += 1;
        }
    }
    let spot = gate_costs(4, 10, Scheme::BinaryIndex).unwrap().depth(5) == Some(360)
        && gate_costs(4, 10, Scheme::Symplectic).unwrap().r.multi_qubit == 142;
    report(
        9,
        "gate-count closed forms",
        mismatches == 0 && spot,
        format!("{checked} (n, T) pairs, {mismatches} mismatches"),
    );
}

#[test]
fn criterion_10_deterministic_sweeps() {
    let cfg = ExperimentConfig {
        model: Some(ModelSpec::lattice(LatticeSpec::new(2, 3))),
        d_max: 14,
        noise_rates: vec![0.0, 1e-3, 1e-2],
        trials: 30,
        seed: 99,
        ..Default::default()
    };
    let csvs: Vec<String> = [1, 4, 8, 4]
        .iter()
        .map(|&w| run_fig2_with_workers(&cfg, Some(w)).unwrap().to_csv().unwrap())
        .collect();
    let identical = csvs.windows(2).all(|w| w[0] == w[1]);
    report(
        10,
        "fig2 CSV identical for 1, 4 and 8 workers",
        identical,
        format!("{} bytes per run, identical: {identical}", csvs[0].len()),
    );
}

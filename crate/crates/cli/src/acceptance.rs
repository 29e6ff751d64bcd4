//! Acceptance suite: each criterion runs at a pinned tolerance and reports
//! one pass/fail line. The same functions back the `accept` CLI verb and the
//! `acceptance` integration test.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spinmachine::closedform::{
    n2_thermo, n3_twostroke_f2, nosym_allowed_regimes, nosym_fixed_point, nosym_regime_scan,
};
use spinmachine::cycle::{
    assemble_limit_cycle, heats_from_fixed_point, iterate_transient, ChannelHandle, ChannelTarget,
    CycleConfig, FixedPointMethod,
};
use spinmachine::lowtemp::{lowtemp_thermo, LowTempParams, SingleExcitationModel};
use spinmachine::mixing::{contraction_norm, factorized_eigenvector_test, survival_profile, zero_temperature_channel};
use spinmachine::quantumstate::{tensor, DensityMatrix};
use spinmachine::spinchain::{build_hamiltonian, local_gibbs, ChainSpec, NoSymPairSpec};
use spinmachine::thermo::{
    extract_ansatz, g_factor, heat_symmetry_residual, predicted_regime, steady_thermo, Regime,
};
use std::time::Instant;

#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
    pub seconds: f64,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {:<32} {:>7.2}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.details
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AcceptanceContext {
    pub seed: u64,
    pub tol: f64,
}

impl Default for AcceptanceContext {
    fn default() -> Self {
        Self { seed: 0, tol: 1e-13 }
    }
}

type Criterion = fn(&AcceptanceContext) -> Result<String, String>;

pub const CRITERIA: &[(usize, &str, Criterion)] = &[
    (1, "pair-closed-form-equivalence", criterion_pair_oracle),
    (2, "triple-two-stroke-profile", criterion_triple_profile),
    (3, "heat-ratio-symmetry", criterion_heat_symmetry),
    (4, "matched-gap-zero-heats", criterion_zero_heats),
    (5, "regime-diagram-n8", criterion_regime_diagram),
    (6, "profile-temperature-independence", criterion_temperature_independence),
    (7, "first-and-second-law", criterion_laws),
    (8, "lowtemp-consistency-n5", criterion_lowtemp_consistency),
    (9, "long-chain-profile-n1000", criterion_long_chain_profile),
    (10, "nosym-pair-model", criterion_nosym),
    (11, "mixing-certificates", criterion_mixing),
];

/// Run the selected criteria (substring match on the name, or an id; empty
/// selector runs all), returning the reports in order.
pub fn run_acceptance(selector: Option<&str>, ctx: &AcceptanceContext) -> Vec<CriterionReport> {
    let mut reports = Vec::new();
    for (id, name, f) in CRITERIA {
        if let Some(sel) = selector {
            let matched = match sel.parse::<usize>() {
                Ok(number) => number == *id,
                Err(_) => name.contains(sel),
            };
            if !matched {
                continue;
            }
        }
        let start = Instant::now();
        let outcome = f(ctx);
        let seconds = start.elapsed().as_secs_f64();
        let (passed, details) = match outcome {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        reports.push(CriterionReport { id: *id, name, passed, details, seconds });
    }
    reports
}

fn rng_for(ctx: &AcceptanceContext, criterion: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(ctx.seed.wrapping_add(criterion))
}

fn draw_coupling(rng: &mut ChaCha8Rng, floor: f64) -> (f64, f64) {
    loop {
        let j: f64 = rng.random_range(-2.0..2.0);
        let k: f64 = rng.random_range(-2.0..2.0);
        if j.abs() + k.abs() > floor {
            return (j, k);
        }
    }
}

fn random_chain(rng: &mut ChaCha8Rng, n: usize, coupling_floor: f64, positive_gaps: bool) -> ChainSpec {
    let e: Vec<f64> = (0..n)
        .map(|_| {
            let v: f64 = rng.random_range(0.3..2.0);
            if positive_gaps || rng.random_bool(0.5) {
                v
            } else {
                -v
            }
        })
        .collect();
    let mut j = Vec::new();
    let mut k = Vec::new();
    for _ in 0..n - 1 {
        let (jj, kk) = draw_coupling(rng, coupling_floor);
        j.push(jj);
        k.push(kk);
    }
    let f: Vec<f64> = (0..n - 1).map(|_| rng.random_range(-2.0..2.0)).collect();
    ChainSpec::new(e, j, k, f).unwrap()
}

/// Criterion 1: closed-form two-site thermodynamics vs the numerical limit
/// cycle over 100 seeded parameter sets, relative error < 1e-8.
fn criterion_pair_oracle(ctx: &AcceptanceContext) -> Result<String, String> {
    let mut rng = rng_for(ctx, 1);
    let mut worst: f64 = 0.0;
    for trial in 0..100 {
        let (j, k) = draw_coupling(&mut rng, 0.05);
        let spec = ChainSpec::new(
            vec![rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)],
            vec![j],
            vec![k],
            vec![rng.random_range(-2.0..2.0)],
        )
        .unwrap();
        let config = CycleConfig::four_stroke(
            rng.random_range(0.1..5.0),
            rng.random_range(0.1..5.0),
            rng.random_range(0.0..10.0),
            rng.random_range(0.0..10.0),
        )
        .unwrap();
        let handle = ChannelHandle::new(&spec, &config, ChannelTarget::CB).map_err(|e| e.to_string())?;
        let (fp, _) = handle
            .fixed_point(FixedPointMethod::Eigen, ctx.tol, 0)
            .map_err(|e| format!("trial {trial}: {e}"))?;
        let (q_h, q_c) = heats_from_fixed_point(&handle, &fp).map_err(|e| e.to_string())?;
        let w = -(q_h + q_c);
        let reference = n2_thermo(&spec, &config).map_err(|e| e.to_string())?;
        let scale = reference
            .q_h
            .abs()
            .max(reference.q_c.abs())
            .max(reference.w.abs())
            .max(1e-12);
        let err = (q_h - reference.q_h)
            .abs()
            .max((q_c - reference.q_c).abs())
            .max((w - reference.w).abs())
            / scale;
        worst = worst.max(err);
        if err >= 1e-8 {
            return Err(format!("trial {trial}: relative error {err:.3e} (spec {spec:?})"));
        }
    }
    Ok(format!("100 parameter sets, worst relative error {worst:.2e}"))
}

/// Criterion 2: two-stroke three-site profile from the numerical limit cycle
/// matches the closed-form hop expression to 1e-8 over 100 specs.
fn criterion_triple_profile(ctx: &AcceptanceContext) -> Result<String, String> {
    let mut rng = rng_for(ctx, 2);
    let mut worst: f64 = 0.0;
    for trial in 0..100 {
        let e: Vec<f64> = (0..3)
            .map(|_| {
                let v: f64 = rng.random_range(0.2..2.0);
                if rng.random_bool(0.5) {
                    v
                } else {
                    -v
                }
            })
            .collect();
        let j: Vec<f64> = (0..2)
            .map(|_| loop {
                let v: f64 = rng.random_range(-2.0..2.0);
                if v.abs() > 0.1 {
                    break v;
                }
            })
            .collect();
        let spec = ChainSpec::new(e, j, vec![0.0; 2], vec![0.0; 2]).unwrap();
        let (beta1, beta2) = loop {
            let b1: f64 = rng.random_range(0.2..3.0);
            let b2: f64 = rng.random_range(0.2..3.0);
            if g_factor(b1 * spec.e[0], b2 * spec.e[2]).abs() > 0.02 {
                break (b1, b2);
            }
        };
        let tau = rng.random_range(0.1..8.0);
        let config = CycleConfig::two_stroke(beta1, beta2, tau).unwrap();

        let c_handle = ChannelHandle::new(&spec, &config, ChannelTarget::C).map_err(|e| e.to_string())?;
        let (rho_c, _) = c_handle
            .fixed_point(FixedPointMethod::Eigen, ctx.tol, 0)
            .map_err(|e| format!("trial {trial}: {e}"))?;
        let gibbs_b = local_gibbs(3, spec.e[2], beta2);
        let cb = tensor(&rho_c, &gibbs_b).map_err(|e| e.to_string())?;
        let cb_handle = ChannelHandle::new(&spec, &config, ChannelTarget::CB).map_err(|e| e.to_string())?;
        let (q_h, q_c) = heats_from_fixed_point(&cb_handle, &cb).map_err(|e| e.to_string())?;
        let thermo = spinmachine::thermo::thermo_from_heats(q_h, q_c, beta1, beta2, 1e-15)
            .map_err(|e| format!("trial {trial}: {e}"))?;
        let extracted = extract_ansatz(&thermo, spec.e[0], spec.e[2], beta1, beta2)
            .map_err(|e| format!("trial {trial}: {e}"))?;
        let reference = n3_twostroke_f2(&spec, tau).map_err(|e| e.to_string())?;
        if let Some(f) = extracted.f4 {
            let err = (f - reference).abs();
            worst = worst.max(err);
            if err >= 1e-8 {
                return Err(format!("trial {trial}: f2 error {err:.3e}"));
            }
        }
    }
    Ok(format!("100 specs, worst profile error {worst:.2e}"))
}

/// Criterion 3: `Q_H/E_1 + Q_C/E_N = 0` for random chains with all four
/// coupling families active, N = 2..6.
fn criterion_heat_symmetry(ctx: &AcceptanceContext) -> Result<String, String> {
    let mut rng = rng_for(ctx, 3);
    let mut worst: f64 = 0.0;
    for n in 2..=6 {
        for trial in 0..8 {
            let spec = random_chain(&mut rng, n, 0.3, false);
            let config = CycleConfig::four_stroke(
                rng.random_range(0.2..3.0),
                rng.random_range(0.2..3.0),
                rng.random_range(0.3..6.0),
                rng.random_range(0.3..6.0),
            )
            .unwrap();
            let (thermo, _) = steady_thermo(&spec, &config, ctx.tol, 2_000_000, None)
                .map_err(|e| format!("N={n} trial {trial}: {e}"))?;
            let residual = heat_symmetry_residual(&thermo, spec.e_first(), spec.e_last())
                .map_err(|e| e.to_string())?;
            let scale = ((thermo.q_h / spec.e_first()).abs() + (thermo.q_c / spec.e_last()).abs()).max(1.0);
            let rel = residual / scale;
            worst = worst.max(rel);
            if rel >= 1e-9 {
                return Err(format!("N={n} trial {trial}: residual {residual:.3e} at scale {scale:.3e}"));
            }
        }
    }
    Ok(format!("40 chains (N=2..6), worst scaled residual {worst:.2e}"))
}

/// Criterion 4: matched gap products `beta1 E_1 = beta2 E_N` force both
/// heats below 1e-9 |E_1|.
fn criterion_zero_heats(ctx: &AcceptanceContext) -> Result<String, String> {
    let mut rng = rng_for(ctx, 4);
    let mut worst: f64 = 0.0;
    for n in 2..=6 {
        for trial in 0..6 {
            let spec = random_chain(&mut rng, n, 0.3, true);
            let kappa: f64 = rng.random_range(0.5..2.0);
            let config = CycleConfig::four_stroke(
                kappa / spec.e_first(),
                kappa / spec.e_last(),
                rng.random_range(0.3..6.0),
                rng.random_range(0.3..6.0),
            )
            .unwrap();
            let (thermo, _) = steady_thermo(&spec, &config, ctx.tol, 2_000_000, None)
                .map_err(|e| format!("N={n} trial {trial}: {e}"))?;
            let bound = 1e-9 * spec.e_first().abs();
            let biggest = thermo.q_h.abs().max(thermo.q_c.abs());
            worst = worst.max(biggest / spec.e_first().abs());
            if biggest >= bound {
                return Err(format!("N={n} trial {trial}: |Q| = {biggest:.3e} vs bound {bound:.3e}"));
            }
        }
    }
    Ok(format!("30 matched-gap chains, worst |Q|/|E_1| = {worst:.2e}"))
}

/// Criterion 5: the N = 8 regime diagram over the boundary-gap ratio:
/// transitions at 0, beta1/beta2 and 1 within one grid step, smooth and
/// sign-consistent heat curves, laws satisfied at every point.
fn criterion_regime_diagram(ctx: &AcceptanceContext) -> Result<String, String> {
    let n = 8;
    let (beta1, beta2) = (0.5, 1.0);
    let tau = 1.0;
    let step = 0.05;
    let ratios: Vec<f64> = (0..61).map(|i| -1.0 + step * i as f64).collect();
    let mut warm: Option<DensityMatrix> = None;
    let mut rows: Vec<(f64, Regime, f64, f64, f64)> = Vec::new();
    for &r in &ratios {
        let e: Vec<f64> = (0..n).map(|i| 1.0 + (r - 1.0) * i as f64 / (n - 1) as f64).collect();
        let spec = ChainSpec::exchange_chain(e, 1.0).unwrap();
        let config = CycleConfig::two_stroke(beta1, beta2, tau).unwrap();
        let (thermo, heats) = steady_thermo(&spec, &config, ctx.tol, 2_000_000, warm.as_ref())
            .map_err(|e| format!("ratio {r}: {e}"))?;
        warm = Some(heats.rho_cb_star);
        let scale = thermo.q_h.abs().max(thermo.q_c.abs()).max(1.0);
        if (thermo.q_h + thermo.q_c + thermo.w).abs() > 1e-10 * scale || thermo.clausius < -1e-10 {
            return Err(format!("laws violated at ratio {r}"));
        }
        rows.push((r, thermo.regime, thermo.q_h, thermo.q_c, thermo.w));
    }

    // regimes match the band prediction away from the boundaries
    let boundaries = [0.0, beta1 / beta2, 1.0];
    for &(r, regime, q_h, q_c, _) in &rows {
        let near = boundaries.iter().any(|b| (r - b).abs() <= step + 1e-12);
        if near {
            continue;
        }
        let predicted = predicted_regime(1.0, r, beta1, beta2).map_err(|e| e.to_string())?;
        if regime != predicted {
            return Err(format!("ratio {r}: measured {regime}, predicted {predicted}"));
        }
        // sign dichotomy
        if r > beta1 / beta2 {
            if q_h > 1e-12 || q_c < -1e-12 {
                return Err(format!("sign dichotomy broken at ratio {r}"));
            }
        } else if q_h < -1e-12 || (r > 0.0 && q_c > 1e-12) {
            return Err(format!("sign dichotomy broken at ratio {r}"));
        }
    }

    // every regime change sits within one step of a theoretical boundary
    let mut changes = Vec::new();
    for pair in rows.windows(2) {
        let (r0, g0, ..) = pair[0];
        let (r1, g1, ..) = pair[1];
        if g0 != g1 {
            changes.push(0.5 * (r0 + r1));
        }
    }
    for boundary in boundaries {
        let hit = rows
            .iter()
            .zip(rows.iter().skip(1))
            .any(|(a, b)| (a.0 - boundary).abs() <= step + 1e-9 || ((a.0 < boundary) != (b.0 < boundary)));
        if !hit {
            return Err(format!("no grid coverage at boundary {boundary}"));
        }
        let transition_near = rows
            .iter()
            .zip(rows.iter().skip(1))
            .filter(|(a, b)| a.1 != b.1)
            .any(|(a, _)| (a.0 - boundary).abs() <= 2.0 * step + 1e-9);
        if !transition_near {
            return Err(format!("no regime transition within one step of {boundary}"));
        }
    }

    // continuity of the heat curves
    for idx in [2usize, 3, 4] {
        let series: Vec<f64> = rows
            .iter()
            .map(|row| match idx {
                2 => row.2,
                3 => row.3,
                _ => row.4,
            })
            .collect();
        let span = series.iter().fold(0.0_f64, |m, &v| m.max(v.abs())) * 2.0 + 1e-12;
        for w in series.windows(2) {
            if (w[1] - w[0]).abs() > 0.2 * span {
                return Err(format!("heat curve jumps by {} against span {span}", (w[1] - w[0]).abs()));
            }
        }
    }
    Ok(format!("61 grid points, {} regime transitions, laws hold everywhere", changes.len()))
}

/// Largest pairwise relative spread of the profile factor of one chain
/// across 5 admissible temperature pairs.
fn profile_temperature_spread(
    rng: &mut ChaCha8Rng,
    spec: &ChainSpec,
    tau1: f64,
    tau2: f64,
) -> Result<(f64, Vec<f64>), String> {
    let mut profiles = Vec::new();
    for _ in 0..5 {
        let (beta1, beta2) = loop {
            let b1: f64 = rng.random_range(0.2..4.0);
            let b2: f64 = rng.random_range(0.2..4.0);
            if g_factor(b1 * spec.e_first(), b2 * spec.e_last()).abs() > 0.05 {
                break (b1, b2);
            }
        };
        let config = CycleConfig::four_stroke(beta1, beta2, tau1, tau2).unwrap();
        let (thermo, _) = steady_thermo(spec, &config, 1e-14, 2_000_000, None).map_err(|e| e.to_string())?;
        let ansatz = extract_ansatz(&thermo, spec.e_first(), spec.e_last(), beta1, beta2)
            .map_err(|e| e.to_string())?;
        let f4 = ansatz.f4.ok_or("prefactor vanished")?;
        if !(-1e-8..=1.0 + 1e-8).contains(&f4) {
            return Err(format!("f4 = {f4} outside [0,1]"));
        }
        profiles.push(f4);
    }
    let mut worst: f64 = 0.0;
    for i in 0..profiles.len() {
        for j in i + 1..profiles.len() {
            let denom = profiles[i].abs().max(profiles[j].abs());
            if denom > 1e-6 {
                worst = worst.max((profiles[i] - profiles[j]).abs() / denom);
            }
        }
    }
    Ok((worst, profiles))
}

/// Criterion 6: the extracted profile factor is independent of the bath
/// temperatures (pairwise relative 1e-6 over 5 temperature pairs, 20 random
/// chains), and stays in [0, 1]. Violations are reported as conjecture
/// counterexamples with the offending spec serialized — they are expected:
/// chains with Ising couplings genuinely break temperature independence,
/// while exchange-only chains (run as a control) obey it to rounding.
fn criterion_temperature_independence(ctx: &AcceptanceContext) -> Result<String, String> {
    let mut rng = rng_for(ctx, 6);
    let mut counterexamples = Vec::new();
    let mut worst_general: f64 = 0.0;
    for chain_idx in 0..20 {
        let n = 2 + chain_idx % 5;
        let spec = random_chain(&mut rng, n, 0.3, false);
        let tau1 = rng.random_range(0.5..4.0);
        let tau2 = rng.random_range(0.5..4.0);
        let (spread, profiles) = profile_temperature_spread(&mut rng, &spec, tau1, tau2)
            .map_err(|e| format!("chain {chain_idx}: {e}"))?;
        worst_general = worst_general.max(spread);
        if spread >= 1e-6 {
            counterexamples.push((spec, profiles, spread));
        }
    }

    // control family: exchange couplings only (the profile factor is
    // provably temperature-free for two sites and held in every observed
    // case without Ising terms)
    let mut worst_control: f64 = 0.0;
    for chain_idx in 0..20 {
        let n = 2 + chain_idx % 5;
        let mut spec = random_chain(&mut rng, n, 0.3, false);
        spec.f = vec![0.0; n - 1];
        let tau1 = rng.random_range(0.5..4.0);
        let tau2 = rng.random_range(0.5..4.0);
        let (spread, _) = profile_temperature_spread(&mut rng, &spec, tau1, tau2)
            .map_err(|e| format!("control chain {chain_idx}: {e}"))?;
        worst_control = worst_control.max(spread);
        if spread >= 1e-6 {
            return Err(format!(
                "exchange-only control chain violated temperature independence (rel {spread:.3e}): {}",
                serde_json::to_string(&spec).unwrap_or_default()
            ));
        }
    }

    if let Some((spec, profiles, spread)) = counterexamples.first() {
        return Err(format!(
            "conjecture counterexample: {} of 20 chains temperature-dependent (worst rel {worst_general:.2e}); \
             exchange-only control passes (worst rel {worst_control:.2e}); first offender rel {spread:.2e}, \
             profiles {profiles:?}, spec = {}",
            counterexamples.len(),
            serde_json::to_string(spec).unwrap_or_default()
        ));
    }
    Ok(format!(
        "20 general + 20 exchange-only chains agree across temperatures (worst rel {worst_general:.2e} / {worst_control:.2e})"
    ))
}

/// Criterion 7: first law from full quench bookkeeping and the Clausius sum
/// on converged runs across stroke layouts and sizes.
fn criterion_laws(ctx: &AcceptanceContext) -> Result<String, String> {
    let mut rng = rng_for(ctx, 7);
    let mut runs = 0;
    let mut worst_first: f64 = 0.0;
    let mut worst_clausius: f64 = 0.0;
    for trial in 0..30 {
        let n = 2 + trial % 4;
        let spec = random_chain(&mut rng, n, 0.3, false);
        let two_stroke = rng.random_bool(0.3);
        let config = if two_stroke {
            CycleConfig::two_stroke(
                rng.random_range(0.2..3.0),
                rng.random_range(0.2..3.0),
                rng.random_range(0.3..5.0),
            )
            .unwrap()
        } else {
            CycleConfig::four_stroke(
                rng.random_range(0.2..3.0),
                rng.random_range(0.2..3.0),
                rng.random_range(0.3..5.0),
                rng.random_range(0.3..5.0),
            )
            .unwrap()
        };
        let lc = assemble_limit_cycle(&spec, &config, ctx.tol, 2_000_000)
            .map_err(|e| format!("trial {trial}: {e}"))?;
        // one full cycle of quench bookkeeping from the limit-cycle corner
        let records = iterate_transient(&spec, &config, &lc.rho_acb_star, 1)
            .map_err(|e| e.to_string())?;
        let rec = &records[0];
        let scale = rec.q_h.abs().max(rec.q_c.abs()).max(rec.w_total.abs()).max(1.0);
        let first = (rec.q_h + rec.q_c + rec.w_total).abs() / scale;
        let clausius = config.beta1 * rec.q_h + config.beta2 * rec.q_c;
        worst_first = worst_first.max(first);
        worst_clausius = worst_clausius.min(clausius);
        runs += 1;
        if first >= 1e-10 {
            return Err(format!("trial {trial}: first-law defect {first:.3e}"));
        }
        if clausius < -1e-10 {
            return Err(format!("trial {trial}: Clausius sum {clausius:.3e}"));
        }
    }
    Ok(format!(
        "{runs} limit cycles audited; worst first-law defect {worst_first:.2e}, most negative Clausius {worst_clausius:.2e}"
    ))
}

/// Criterion 8: the low-temperature heats converge to the full limit cycle
/// with a fitted exponent >= 0.9 in x.
fn criterion_lowtemp_consistency(_ctx: &AcceptanceContext) -> Result<String, String> {
    let spec = ChainSpec::exchange_chain(vec![1.0, 1.25, 1.5, 1.75, 2.0], 1.0).unwrap();
    let tau = 1.3;
    let mut points = Vec::new();
    for &x in &[1e-3_f64, 5e-4, 2.5e-4] {
        let beta1 = -x.ln() / spec.e_first();
        let x2 = 0.8 * x;
        let beta2 = -x2.ln() / spec.e_last();
        let config = CycleConfig::two_stroke(beta1, beta2, tau).unwrap();
        let (full, _) = steady_thermo(&spec, &config, 1e-15, 2_000_000, None).map_err(|e| e.to_string())?;
        let params = LowTempParams::new(x, x2).map_err(|e| e.to_string())?;
        let approx = lowtemp_thermo(&spec, tau, &params).map_err(|e| e.to_string())?;
        let dev = (full.q_h - approx.q_h).abs().max((full.q_c - approx.q_c).abs());
        points.push((x.ln(), dev.max(1e-300).ln()));
    }
    // least-squares slope of ln(dev) against ln(x)
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    if slope < 0.9 {
        return Err(format!("fitted exponent {slope:.3} < 0.9"));
    }
    Ok(format!("fitted exponent {slope:.2} over x in [2.5e-4, 1e-3]"))
}

/// Criterion 9: the 1000-site profile curve: 200 stroke times in under 120
/// seconds, values in [0, 1] starting from 0, probability conservation to
/// 1e-10 everywhere.
fn criterion_long_chain_profile(_ctx: &AcceptanceContext) -> Result<String, String> {
    use rayon::prelude::*;
    let n = 1000;
    let e: Vec<f64> = (0..n).map(|i| 1.0 + i as f64 / (n - 1) as f64).collect();
    let spec = ChainSpec::exchange_chain(e, 1.0).unwrap();
    let start = Instant::now();
    let model = SingleExcitationModel::new(&spec).map_err(|e| e.to_string())?;
    let taus: Vec<f64> = (0..200).map(|i| 50.0 * i as f64 / 199.0).collect();
    let points: Vec<(f64, f64, f64)> = taus
        .par_iter()
        .map(|&tau| {
            let f2 = model.f2(tau).map_err(|e| format!("tau {tau}: {e}"))?;
            let conservation = model.conservation_residual(tau).map_err(|e| e.to_string())?;
            Ok((tau, f2, conservation))
        })
        .collect::<Result<_, String>>()?;
    let mut max_f2: f64 = 0.0;
    for (idx, &(tau, f2, conservation)) in points.iter().enumerate() {
        if idx == 0 && f2.abs() > 1e-12 {
            return Err(format!("curve does not start at zero: f2(0) = {f2}"));
        }
        if !(-1e-10..=1.0 + 1e-10).contains(&f2) {
            return Err(format!("f2({tau}) = {f2} outside [0, 1]"));
        }
        if conservation >= 1e-10 {
            return Err(format!("probability conservation residual {conservation:.3e} at tau {tau}"));
        }
        max_f2 = max_f2.max(f2);
    }
    let seconds = start.elapsed().as_secs_f64();
    if seconds >= 120.0 {
        return Err(format!("took {seconds:.1}s, budget 120s"));
    }
    if max_f2 <= 0.0 {
        return Err("profile never rises above zero".into());
    }
    Ok(format!("200 points in {seconds:.1}s, peak profile {max_f2:.3}"))
}

/// Criterion 10: the no-symmetry pair: closed-form fixed point matches the
/// channel to 1e-8 over 100 random specs, and the regime scans at the
/// reference parameters only produce regimes admissible in each band.
fn criterion_nosym(ctx: &AcceptanceContext) -> Result<String, String> {
    let mut rng = rng_for(ctx, 10);
    let mut worst: f64 = 0.0;
    for trial in 0..100 {
        let spec = NoSymPairSpec::new(
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
        )
        .unwrap();
        let config = CycleConfig::four_stroke(
            rng.random_range(0.1..4.0),
            rng.random_range(0.1..4.0),
            rng.random_range(0.0..8.0),
            rng.random_range(0.0..8.0),
        )
        .unwrap();
        let handle = ChannelHandle::nosym(&spec, &config, ChannelTarget::CB).map_err(|e| e.to_string())?;
        let (numeric, _) = handle
            .fixed_point(FixedPointMethod::Eigen, ctx.tol, 0)
            .map_err(|e| format!("trial {trial}: {e}"))?;
        let analytic = nosym_fixed_point(&spec, &config).map_err(|e| e.to_string())?;
        let err = numeric.trace_distance(&analytic);
        worst = worst.max(err);
        if err >= 1e-8 {
            return Err(format!("trial {trial}: fixed-point distance {err:.3e}"));
        }
    }

    // regime scans at the reference parameters
    let base = NoSymPairSpec::new(1.0, 1.0, 1.5, 0.0, 0.3, 0.0, 0.0).unwrap();
    let e2_values: Vec<f64> = (0..61).map(|i| -1.0 + 0.05 * i as f64).collect();
    let panel_taus: Vec<(f64, f64)> = vec![(1.0, 1.0), (2.0, 2.0), (3.0, 0.0)];
    let rows = nosym_regime_scan(&base, &e2_values, &panel_taus, 0.3, 0.6).map_err(|e| e.to_string())?;
    for row in &rows {
        if !row.ok {
            return Err(format!(
                "E2 = {}: regimes {:?} outside allowed {:?}",
                row.e2, row.observed, row.allowed
            ));
        }
    }
    // stroke-time-plane panels at four gap pairs
    let mut grid = Vec::new();
    for i in 0..17 {
        for j in 0..17 {
            grid.push((0.25 * i as f64, 0.25 * j as f64));
        }
    }
    for (e1, e2) in [(-2.0, 1.5), (1.0, 0.25), (1.0, 0.75), (1.0, 1.5)] {
        let spec = NoSymPairSpec { e1, e2, ..base.clone() };
        let allowed = nosym_allowed_regimes(e2 / e1, 0.3, 0.6);
        for &(tau1, tau2) in &grid {
            let config = CycleConfig::four_stroke(0.3, 0.6, tau1, tau2).unwrap();
            let (thermo, _) = spinmachine::closedform::nosym_thermo(&spec, &config)
                .map_err(|e| format!("({e1},{e2}) at ({tau1},{tau2}): {e}"))?;
            if thermo.regime != Regime::Degenerate && !allowed.contains(&thermo.regime) {
                return Err(format!(
                    "({e1},{e2}) at ({tau1},{tau2}): regime {} not in {allowed:?}",
                    thermo.regime
                ));
            }
        }
    }
    Ok(format!(
        "100 fixed points (worst distance {worst:.2e}); band structure holds on all scans"
    ))
}

/// Criterion 11: mixing certificates: connected chains have positive
/// zero-temperature gap and decaying block contraction norms; a severed
/// interior retains an exact witness and survival plateau; tail
/// probabilities are monotone throughout.
fn criterion_mixing(ctx: &AcceptanceContext) -> Result<String, String> {
    let mut rng = rng_for(ctx, 11);
    let config = CycleConfig::four_stroke(0.7, 1.5, 1.1, 0.9).unwrap();
    let mut min_gap = f64::INFINITY;
    for trial in 0..6 {
        let n = 4 + trial % 2;
        let spec = random_chain(&mut rng, n, 0.8, true);
        let zt = zero_temperature_channel(&spec, &config, ChannelTarget::CB).map_err(|e| e.to_string())?;
        let gap = zt.spectral_gap().map_err(|e| e.to_string())?;
        min_gap = min_gap.min(gap);
        if gap <= 0.0 {
            return Err(format!("trial {trial}: zero-temperature gap {gap:.3e}"));
        }
        let h = build_hamiltonian(&spec).map_err(|e| e.to_string())?;
        if factorized_eigenvector_test(&h).map_err(|e| e.to_string())?.found {
            return Err(format!("trial {trial}: unexpected factorized witness"));
        }
        let q_small = contraction_norm(&spec, &config, 1, 10).map_err(|e| e.to_string())?;
        let q_large = contraction_norm(&spec, &config, 1, 80).map_err(|e| e.to_string())?;
        if !(q_large < q_small && q_large < 0.2) {
            return Err(format!("trial {trial}: Q_1 does not decay ({q_small:.3} -> {q_large:.3})"));
        }
        // survival decays from the all-up state, monotonicity checked inside
        let all_up = DensityMatrix::basis_state(&vec![true; n - 1], (2..=n).collect()).unwrap();
        let profile = survival_profile(&spec, &config, &all_up, 150).map_err(|e| e.to_string())?;
        if profile.at(1, 150) > 0.3 {
            return Err(format!("trial {trial}: survival stuck at {}", profile.at(1, 150)));
        }
    }

    // deliberately severed interior pocket
    let island = ChainSpec::new(
        vec![1.0, 1.3, 0.8, 1.6],
        vec![0.0, 0.9, 0.0],
        vec![0.0, 0.2, 0.0],
        vec![0.1, -0.2, 0.4],
    )
    .unwrap();
    let h = build_hamiltonian(&island).map_err(|e| e.to_string())?;
    let report = factorized_eigenvector_test(&h).map_err(|e| e.to_string())?;
    if !report.found {
        return Err("severed interior produced no witness".into());
    }
    let all_up = DensityMatrix::basis_state(&[true; 3], vec![2, 3, 4]).unwrap();
    let profile = survival_profile(&island, &config, &all_up, 150).map_err(|e| e.to_string())?;
    if profile.at(1, 150) < 0.9 * profile.at(1, 10) || profile.at(1, 150) < 0.1 {
        return Err(format!("survival plateau missing: {}", profile.at(1, 150)));
    }
    let q_island = contraction_norm(&island, &config, 1, 80).map_err(|e| e.to_string())?;
    if q_island < 0.9 {
        return Err(format!("island contraction norm decayed to {q_island}"));
    }
    let _ = ctx;
    Ok(format!(
        "6 connected chains (min gap {min_gap:.2e}) decay; severed interior: {} witnesses, plateau persists",
        report.witnesses.len()
    ))
}

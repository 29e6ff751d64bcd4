//! Mixing diagnostics for the cycle channel: its convex decomposition over
//! bath eigenstates, the zero-temperature component, the factorized
//! eigenvector obstruction, and excitation-survival certificates.
//!
//! The finite-temperature channel is a convex mixture of the channels
//! obtained by pinning each bath to one of its energy eigenstates. The
//! ground-state component dominates the mixture and fixes the all-down state
//! whenever both boundary gaps are positive; if it is mixing, so is the full
//! channel. Mixing fails only when the chain Hamiltonian admits an
//! eigenvector with both boundary sites in their ground state, which the
//! tools here detect directly and through the survival probabilities.

use crate::cycle::{ChannelHandle, ChannelTarget, CycleConfig};
use crate::quantumstate::DensityMatrix;
use crate::sector::{BlockState, SectorBasis};
use crate::spinchain::{site_is_up, ChainSpec, Hamiltonian};
use crate::{C64, CMatrix, CVector, Error, Result};

/// One component of the convex decomposition: both baths pinned to definite
/// energy eigenstates (level 0 = ground).
#[derive(Debug, Clone, Copy)]
pub struct ChannelComponent {
    pub weight: f64,
    /// Energy level of the hot-side bath state (0 = ground).
    pub a_level: usize,
    /// Energy level of the cold-side bath state (0 = ground).
    pub b_level: usize,
}

fn level_pops(e_site: f64, level: usize) -> (f64, f64) {
    // (up, down) occupation of the chosen eigenstate; for E > 0 the ground
    // state is down, for E < 0 it is up; E = 0 breaks the tie as down.
    let ground_is_down = e_site >= 0.0;
    match (level, ground_is_down) {
        (0, true) | (1, false) => (0.0, 1.0),
        _ => (1.0, 0.0),
    }
}

fn level_weight(e_site: f64, beta: f64, level: usize) -> f64 {
    let (p_up, p_down) = crate::spinchain::gibbs_populations(e_site, beta);
    let (up, _) = level_pops(e_site, level);
    if up == 1.0 {
        p_up
    } else {
        p_down
    }
}

/// Decompose the channel as a convex sum over bath eigenstate pairs; the
/// weights are the thermal occupations and sum to one.
pub fn convex_decomposition(handle: &ChannelHandle) -> Result<Vec<ChannelComponent>> {
    if !handle.config.finite_temperatures() {
        return Err(Error::InfiniteTemperatureKraus);
    }
    let (e1, en) = handle.boundary_energies();
    let mut parts = Vec::with_capacity(4);
    for a_level in 0..2 {
        for b_level in 0..2 {
            let weight = level_weight(e1, handle.config.beta1, a_level)
                * level_weight(en, handle.config.beta2, b_level);
            parts.push(ChannelComponent { weight, a_level, b_level });
        }
    }
    Ok(parts)
}

/// Apply one decomposition component to a state of the handle's target.
pub fn apply_component(
    handle: &ChannelHandle,
    component: &ChannelComponent,
    rho: &DensityMatrix,
) -> Result<DensityMatrix> {
    let sites = handle.target_sites();
    if rho.sites() != sites.as_slice() {
        return Err(Error::TargetMismatch {
            target: "component",
            expected: sites.len(),
            got: rho.sites().len(),
        });
    }
    let (e1, en) = handle.boundary_energies();
    let out = handle.apply_dense_with_boundary(
        rho.matrix(),
        level_pops(e1, component.a_level),
        level_pops(en, component.b_level),
    );
    Ok(DensityMatrix::from_parts_unchecked(out, sites))
}

/// The zero-temperature channel: both baths replaced by their ground-state
/// projectors. Equals the cycle channel at `beta = +inf` and the
/// ground-ground component of the convex decomposition.
pub fn zero_temperature_channel(
    spec: &ChainSpec,
    config: &CycleConfig,
    target: ChannelTarget,
) -> Result<ChannelHandle> {
    let frozen = CycleConfig {
        beta1: f64::INFINITY,
        beta2: f64::INFINITY,
        ..*config
    };
    ChannelHandle::new(spec, &frozen, target)
}

/// A chain eigenvector with both boundary sites in their local ground state;
/// its existence obstructs zero-temperature mixing.
#[derive(Debug, Clone)]
pub struct FactorizedWitness {
    pub eigenvalue: f64,
    /// The interior factor of the eigenvector (`2^{N-2}` amplitudes).
    pub interior_state: CVector,
}

#[derive(Debug, Clone)]
pub struct FactorizedReport {
    pub found: bool,
    pub witnesses: Vec<FactorizedWitness>,
}

/// Scan the spectrum of `h` for eigenvectors of the form
/// `|0>_A (x) |phi>_C (x) |0>_B`, other than the global all-down state
/// (which always has this form and does not obstruct mixing). Degenerate
/// clusters are handled by projecting the whole eigenspace onto the
/// boundary-ground subspace, so an arbitrary eigensolver rotation inside a
/// cluster cannot hide a witness.
pub fn factorized_eigenvector_test(h: &Hamiltonian) -> Result<FactorizedReport> {
    let n = h.site_count;
    if n < 2 {
        return Err(Error::InvalidSpec("need at least two sites".into()));
    }
    let dim = h.dim();
    let (eigenvalues, eigenvectors) = crate::linalg::hermitian_eigen(&h.matrix);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eigenvalues[a].partial_cmp(&eigenvalues[b]).unwrap());

    let scale = eigenvalues.iter().fold(0.0_f64, |m, &l| m.max(l.abs())).max(1.0);
    let cluster_tol = 1e-8 * scale;
    // rows where both boundary sites are down
    let ground_rows: Vec<usize> = (0..dim)
        .filter(|&p| !site_is_up(p, 1, n) && !site_is_up(p, n, n))
        .collect();

    let mut witnesses = Vec::new();
    let mut start = 0;
    while start < dim {
        let mut end = start + 1;
        while end < dim
            && (eigenvalues[order[end]] - eigenvalues[order[end - 1]]).abs() <= cluster_tol
        {
            end += 1;
        }
        let cluster: Vec<usize> = order[start..end].to_vec();
        // projection of the eigenspace onto the boundary-ground subspace
        let mut c = CMatrix::zeros(ground_rows.len(), cluster.len());
        for (col, &k) in cluster.iter().enumerate() {
            for (row, &p) in ground_rows.iter().enumerate() {
                c[(row, col)] = eigenvectors[(p, k)];
            }
        }
        let svd = c.clone().svd(true, true);
        for (idx, &sigma) in svd.singular_values.iter().enumerate() {
            if sigma * sigma >= 1.0 - 1e-10 {
                let v = svd.v_t.as_ref().unwrap().row(idx).adjoint();
                let embedded = &c * &v;
                let norm = embedded.norm();
                let interior_state = embedded / C64::new(norm, 0.0);
                // the last ground row is the all-down configuration; skip
                // the trivial global-vacuum eigenvector
                let vacuum_overlap = interior_state[ground_rows.len() - 1].norm_sqr();
                if vacuum_overlap > 1.0 - 1e-8 {
                    continue;
                }
                witnesses.push(FactorizedWitness {
                    eigenvalue: eigenvalues[cluster[0]],
                    interior_state,
                });
            }
        }
        start = end;
    }
    Ok(FactorizedReport { found: !witnesses.is_empty(), witnesses })
}

/// Tail sums of the excitation distribution along iterates of the
/// zero-temperature channel: `p[m][n]` is the probability of finding at
/// least `n` up spins after `m` cycles.
#[derive(Debug, Clone)]
pub struct SurvivalProfile {
    /// `p[m][n]`, `m = 0..=m_max`, `n = 0..=register size`.
    pub p: Vec<Vec<f64>>,
}

impl SurvivalProfile {
    /// `P_n^{(m)}`.
    pub fn at(&self, n: usize, m: usize) -> f64 {
        self.p[m][n]
    }

    pub fn cycles(&self) -> usize {
        self.p.len() - 1
    }
}

/// Track the survival probabilities of `rho0` (a CB state; its off-block
/// part is discarded, which cannot raise any tail weight) under the
/// zero-temperature channel, verifying monotonicity in both indices.
pub fn survival_profile(
    spec: &ChainSpec,
    config: &CycleConfig,
    rho0: &DensityMatrix,
    m_max: usize,
) -> Result<SurvivalProfile> {
    if spec.e_first() <= 0.0 || spec.e_last() <= 0.0 {
        return Err(Error::InvalidSpec(
            "survival analysis requires positive boundary gaps (ground state all-down)".into(),
        ));
    }
    let handle = zero_temperature_channel(spec, config, ChannelTarget::CB)?;
    let basis = SectorBasis::new(spec.n - 1);
    let mut state = BlockState::from_dense_bd(rho0.matrix(), &basis);

    let tail = |s: &BlockState| -> Vec<f64> {
        let q = s.block_populations();
        let mut p = vec![0.0; q.len() + 1];
        for n in (0..q.len()).rev() {
            p[n] = p[n + 1] + q[n];
        }
        p.pop();
        p
    };

    let mut rows = Vec::with_capacity(m_max + 1);
    rows.push(tail(&state));
    for _ in 0..m_max {
        state = handle.apply_sector(&state);
        rows.push(tail(&state));
    }
    for (m, row) in rows.iter().enumerate() {
        for n in 0..row.len() {
            if n + 1 < row.len() && row[n + 1] > row[n] + 1e-12 {
                return Err(Error::MonotonicityViolation { n, m, violation: row[n + 1] - row[n] });
            }
            if m > 0 && n >= 1 && row[n] > rows[m - 1][n] + 1e-12 {
                return Err(Error::MonotonicityViolation { n, m, violation: row[n] - rows[m - 1][n] });
            }
        }
    }
    Ok(SurvivalProfile { p: rows })
}

/// Largest squared singular value of `(P_2 P_1)^{delta_m}` restricted to the
/// `n`-excitation block of the full chain, where `P_1` projects the cold
/// boundary to its ground state after the first stroke and `P_2` the hot
/// boundary after the second. Bounds the population that can survive
/// `delta_m` extra cycles inside the block; `delta_m = 0` gives 1.
pub fn contraction_norm(spec: &ChainSpec, config: &CycleConfig, n: usize, delta_m: usize) -> Result<f64> {
    if n < 1 || n > spec.n {
        return Err(Error::SiteOutOfRange { site: n, n: spec.n });
    }
    if spec.e_first() <= 0.0 || spec.e_last() <= 0.0 {
        return Err(Error::InvalidSpec(
            "contraction certificate requires positive boundary gaps".into(),
        ));
    }
    if delta_m == 0 {
        return Ok(1.0);
    }
    let handle = ChannelHandle::new(spec, config, ChannelTarget::CB)?;
    let spectra = handle.block_spectra().expect("chain spec uses the sector backend");
    let basis = SectorBasis::new(spec.n);
    let u1 = &spectra.unitaries(config.tau1)[n];
    let u2 = &spectra.unitaries(config.tau2)[n];
    let positions = &basis.blocks[n];
    let mask = |site: usize| -> Vec<bool> {
        positions.iter().map(|&p| !site_is_up(p as usize, site, spec.n)).collect()
    };
    let cold_down = mask(spec.n);
    let hot_down = mask(1);
    let dim = positions.len();
    let project_rows = |u: &CMatrix, keep: &[bool]| -> CMatrix {
        CMatrix::from_fn(dim, dim, |i, j| if keep[i] { u[(i, j)] } else { C64::new(0.0, 0.0) })
    };
    let p1 = project_rows(u1, &cold_down);
    let p2 = project_rows(u2, &hot_down);
    let step = &p2 * &p1;
    let mut acc = CMatrix::identity(dim, dim);
    for _ in 0..delta_m {
        acc = &acc * &step;
    }
    let svd = acc.svd(false, false);
    let sigma = svd.singular_values.iter().fold(0.0_f64, |m, &s| m.max(s));
    Ok(sigma * sigma)
}

//! The thermodynamic cycle as a quantum channel.
//!
//! A period consists of four strokes: replace site A by its hot-bath Gibbs
//! state, evolve freely for `tau1`, replace site B by its cold-bath Gibbs
//! state, evolve for `tau2`. Tracking the state of CB at the end of stroke 1
//! (or of AC at the end of stroke 3, or of C between simultaneous
//! thermalizations in two-stroke mode) turns the period into a CPTP channel;
//! this module builds those channels, their Kraus sets and superoperator
//! matrices, finds their fixed points, and assembles the limit cycle.
//!
//! For magnetization-preserving chains every step maps block-diagonal states
//! to block-diagonal states, and the solvers run inside the excitation-number
//! blocks; dense fallbacks cover arbitrary Hamiltonians.

use crate::quantumstate::{hermitian_eigenvalues, project_to_density, von_neumann_entropy, DensityMatrix};
use crate::sector::{block_hamiltonians, BlockSpectra, BlockState, BoundaryMap, SectorBasis, Side};
use crate::spinchain::{gibbs_populations, ChainSpec, Hamiltonian, NoSymPairSpec, DENSE_SITE_CAP};
use crate::{c64, C64, CMatrix, Error, Result};
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

/// Default fixed-point tolerance (trace-distance residual).
pub const DEFAULT_TOL: f64 = 1e-12;
/// Default iteration budget for the power method.
pub const DEFAULT_MAX_ITER: usize = 1_000_000;
/// Largest target dimension for which the channel superoperator is built.
pub const SUPEROP_DIM_CAP: usize = 64;
/// Largest target dimension for which the full superoperator spectrum is computed.
pub const SPECTRUM_DIM_CAP: usize = 32;

/// Stroke layout of the cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrokeMode {
    FourStroke,
    /// Both baths thermalize simultaneously, then one free evolution; treated
    /// internally as `tau2 = 0`.
    TwoStroke,
}

/// Bath inverse temperatures and stroke durations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleConfig {
    pub beta1: f64,
    pub beta2: f64,
    pub tau1: f64,
    pub tau2: f64,
    pub mode: StrokeMode,
}

impl CycleConfig {
    pub fn four_stroke(beta1: f64, beta2: f64, tau1: f64, tau2: f64) -> Result<Self> {
        let cfg = Self { beta1, beta2, tau1, tau2, mode: StrokeMode::FourStroke };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Two-stroke cycle with a single free-evolution time `tau`.
    pub fn two_stroke(beta1: f64, beta2: f64, tau: f64) -> Result<Self> {
        let cfg = Self { beta1, beta2, tau1: tau, tau2: 0.0, mode: StrokeMode::TwoStroke };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        for (name, b) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if b < 0.0 || b.is_nan() {
                return Err(Error::InvalidSpec(format!("{name} must be >= 0 (or +inf), got {b}")));
            }
        }
        for (name, t) in [("tau1", self.tau1), ("tau2", self.tau2)] {
            if !t.is_finite() || t < 0.0 {
                return Err(Error::InvalidSpec(format!("{name} must be finite and >= 0, got {t}")));
            }
        }
        Ok(())
    }

    pub fn finite_temperatures(&self) -> bool {
        self.beta1.is_finite() && self.beta2.is_finite()
    }
}

/// Which subsystem the cycle channel acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChannelTarget {
    /// Sites `2..=N`; period starts right after thermalizing A.
    CB,
    /// Sites `1..=N-1`; period starts right after thermalizing B.
    AC,
    /// Sites `2..=N-1`; two-stroke mode only.
    C,
}

impl ChannelTarget {
    fn name(&self) -> &'static str {
        match self {
            ChannelTarget::CB => "CB",
            ChannelTarget::AC => "AC",
            ChannelTarget::C => "C",
        }
    }
}

/// Fixed-point solver selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedPointMethod {
    /// Iterate the channel from `I/d` with a contraction-based exit estimate.
    Power,
    /// Extract the eigenvalue-1 eigenvector of the superoperator matrix.
    Eigen,
}

/// Convergence bookkeeping returned with every fixed point.
#[derive(Debug, Clone, Copy)]
pub struct FixedPointDiagnostics {
    pub iterations: usize,
    /// Trace-distance residual `|Phi(rho*) - rho*|_1 / 2` achieved.
    pub residual: f64,
    /// `1 - r` for the measured contraction ratio `r` (power method only).
    pub gap_estimate: Option<f64>,
}

struct SectorBackend {
    full: SectorBasis,
    /// shared structure for the (N-1)-site registers CB and AC
    sub: SectorBasis,
    inner: Option<SectorBasis>,
    left: BoundaryMap,
    right: BoundaryMap,
    inner_right: Option<BoundaryMap>,
    spectra: BlockSpectra,
    u1: Vec<CMatrix>,
    u2: Vec<CMatrix>,
    dense_us: OnceLock<(CMatrix, CMatrix)>,
}

struct DenseBackend {
    u1: CMatrix,
    u2: CMatrix,
}

enum Backend {
    Sector(SectorBackend),
    Dense(DenseBackend),
}

/// One cycle of the machine, viewed as a CPTP channel on `target`, with the
/// spectral data it needs cached. Immutable after construction.
pub struct ChannelHandle {
    pub target: ChannelTarget,
    pub config: CycleConfig,
    n: usize,
    e_first: f64,
    e_last: f64,
    backend: Backend,
}

fn dense_unitary(h: &CMatrix, tau: f64) -> CMatrix {
    if tau == 0.0 {
        return CMatrix::identity(h.nrows(), h.nrows());
    }
    let (vals, vecs) = crate::linalg::hermitian_eigen(h);
    let phases = CMatrix::from_diagonal(&vals.map(|l| c64(0.0, -l * tau).exp()));
    &vecs * phases * vecs.adjoint()
}

impl ChannelHandle {
    /// Channel of a magnetization-preserving chain; runs on the
    /// excitation-block backend.
    pub fn new(spec: &ChainSpec, config: &CycleConfig, target: ChannelTarget) -> Result<Self> {
        config.validate()?;
        let n = spec.n;
        if n > DENSE_SITE_CAP {
            return Err(Error::DimensionOverflow { requested: n, max_sites: DENSE_SITE_CAP, dim: 1 << n });
        }
        if target == ChannelTarget::C {
            if config.mode != StrokeMode::TwoStroke {
                return Err(Error::WrongMode("two-stroke"));
            }
            if n < 3 {
                return Err(Error::EmptyInterior(n));
            }
        }
        let full = SectorBasis::new(n);
        let sub = SectorBasis::new(n - 1);
        let left = BoundaryMap::new(&sub, &full, Side::Left);
        let right = BoundaryMap::new(&sub, &full, Side::Right);
        let (inner, inner_right) = if n >= 3 {
            let inner = SectorBasis::new(n - 2);
            let map = BoundaryMap::new(&inner, &sub, Side::Right);
            (Some(inner), Some(map))
        } else {
            (None, None)
        };
        let spectra = BlockSpectra::new(&block_hamiltonians(spec, &full));
        let u1 = spectra.unitaries(config.tau1);
        let u2 = spectra.unitaries(config.tau2);
        Ok(Self {
            target,
            config: *config,
            n,
            e_first: spec.e_first(),
            e_last: spec.e_last(),
            backend: Backend::Sector(SectorBackend {
                full,
                sub,
                inner,
                left,
                right,
                inner_right,
                spectra,
                u1,
                u2,
                dense_us: OnceLock::new(),
            }),
        })
    }

    /// Channel of an arbitrary chain Hamiltonian with local boundary terms
    /// `E_first S_1^Z` and `E_last S_N^Z`; dense backend.
    pub fn from_hamiltonian(
        h: &Hamiltonian,
        e_first: f64,
        e_last: f64,
        config: &CycleConfig,
        target: ChannelTarget,
    ) -> Result<Self> {
        config.validate()?;
        let n = h.site_count;
        if target == ChannelTarget::C {
            if config.mode != StrokeMode::TwoStroke {
                return Err(Error::WrongMode("two-stroke"));
            }
            if n < 3 {
                return Err(Error::EmptyInterior(n));
            }
        }
        let u1 = dense_unitary(&h.matrix, config.tau1);
        let u2 = dense_unitary(&h.matrix, config.tau2);
        Ok(Self {
            target,
            config: *config,
            n,
            e_first,
            e_last,
            backend: Backend::Dense(DenseBackend { u1, u2 }),
        })
    }

    /// Channel of the two-site model with counter-rotating terms.
    pub fn nosym(spec: &NoSymPairSpec, config: &CycleConfig, target: ChannelTarget) -> Result<Self> {
        let h = crate::spinchain::build_nosym_hamiltonian(spec)?;
        Self::from_hamiltonian(&h, spec.e1, spec.e2, config, target)
    }

    pub fn site_count(&self) -> usize {
        self.n
    }

    /// Site labels of the channel's target register.
    pub fn target_sites(&self) -> Vec<usize> {
        match self.target {
            ChannelTarget::CB => (2..=self.n).collect(),
            ChannelTarget::AC => (1..=self.n - 1).collect(),
            ChannelTarget::C => (2..=self.n - 1).collect(),
        }
    }

    pub fn target_dim(&self) -> usize {
        1 << self.target_sites().len()
    }

    fn bath_populations(&self) -> ((f64, f64), (f64, f64)) {
        (
            gibbs_populations(self.e_first, self.config.beta1),
            gibbs_populations(self.e_last, self.config.beta2),
        )
    }

    fn dense_unitaries(&self) -> (&CMatrix, &CMatrix) {
        match &self.backend {
            Backend::Dense(d) => (&d.u1, &d.u2),
            Backend::Sector(s) => {
                let (u1, u2) = s.dense_us.get_or_init(|| {
                    (
                        BlockState { blocks: s.u1.clone() }.to_dense(&s.full),
                        BlockState { blocks: s.u2.clone() }.to_dense(&s.full),
                    )
                });
                (u1, u2)
            }
        }
    }

    /// Apply one full cycle to a state of the target subsystem.
    ///
    /// This is the dense route and accepts arbitrary (also non-block-diagonal)
    /// inputs; the fixed-point solvers use the block route internally when
    /// available.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let sites = self.target_sites();
        if rho.sites() != sites.as_slice() {
            return Err(Error::TargetMismatch {
                target: self.target.name(),
                expected: sites.len(),
                got: rho.sites().len(),
            });
        }
        let out = self.apply_dense_matrix(rho.matrix());
        Ok(DensityMatrix::from_parts_unchecked(out, sites))
    }

    /// Dense cycle application with the standard thermal boundary states.
    fn apply_dense_matrix(&self, rho: &CMatrix) -> CMatrix {
        let (a_pops, b_pops) = self.bath_populations();
        self.apply_dense_with_boundary(rho, a_pops, b_pops)
    }

    /// Dense cycle application with arbitrary diagonal boundary states; the
    /// convex decomposition over bath eigenstates reuses this with projector
    /// weights.
    pub(crate) fn apply_dense_with_boundary(
        &self,
        rho: &CMatrix,
        a_pops: (f64, f64),
        b_pops: (f64, f64),
    ) -> CMatrix {
        let (u1, u2) = self.dense_unitaries();
        match self.target {
            ChannelTarget::CB => {
                let full = embed_left(rho, a_pops);
                let full = u1 * full * u1.adjoint();
                let ac = ptrace_right(&full);
                let full = embed_right(&ac, b_pops);
                let full = u2 * full * u2.adjoint();
                ptrace_left(&full)
            }
            ChannelTarget::AC => {
                let full = embed_right(rho, b_pops);
                let full = u2 * full * u2.adjoint();
                let cb = ptrace_left(&full);
                let full = embed_left(&cb, a_pops);
                let full = u1 * full * u1.adjoint();
                ptrace_right(&full)
            }
            ChannelTarget::C => {
                let cb = embed_right(rho, b_pops);
                let full = embed_left(&cb, a_pops);
                let full = u1 * full * u1.adjoint();
                ptrace_right(&ptrace_left(&full))
            }
        }
    }

    /// Block-route cycle application (magnetization-preserving backend only).
    pub(crate) fn apply_sector(&self, rho: &BlockState) -> BlockState {
        let s = match &self.backend {
            Backend::Sector(s) => s,
            Backend::Dense(_) => unreachable!("sector application requires the sector backend"),
        };
        let (a_pops, b_pops) = self.bath_populations();
        match self.target {
            ChannelTarget::CB => {
                let mut full = rho.attach(&s.left, &s.full, a_pops.0, a_pops.1);
                full.evolve(&s.u1);
                let ac = full.detach(&s.right, &s.sub);
                let mut full = ac.attach(&s.right, &s.full, b_pops.0, b_pops.1);
                full.evolve(&s.u2);
                full.detach(&s.left, &s.sub)
            }
            ChannelTarget::AC => {
                let mut full = rho.attach(&s.right, &s.full, b_pops.0, b_pops.1);
                full.evolve(&s.u2);
                let cb = full.detach(&s.left, &s.sub);
                let mut full = cb.attach(&s.left, &s.full, a_pops.0, a_pops.1);
                full.evolve(&s.u1);
                full.detach(&s.right, &s.sub)
            }
            ChannelTarget::C => {
                let inner_right = s.inner_right.as_ref().expect("target C requires N >= 3");
                let cb = rho.attach(inner_right, &s.sub, b_pops.0, b_pops.1);
                let mut full = cb.attach(&s.left, &s.full, a_pops.0, a_pops.1);
                full.evolve(&s.u1);
                let cb = full.detach(&s.left, &s.sub);
                cb.detach(inner_right, s.inner.as_ref().unwrap())
            }
        }
    }

    pub(crate) fn target_basis(&self) -> Option<&SectorBasis> {
        match (&self.backend, self.target) {
            (Backend::Sector(s), ChannelTarget::CB | ChannelTarget::AC) => Some(&s.sub),
            (Backend::Sector(s), ChannelTarget::C) => s.inner.as_ref(),
            (Backend::Dense(_), _) => None,
        }
    }

    pub(crate) fn sector_parts(&self) -> Option<(&SectorBasis, &SectorBasis, &BoundaryMap, &BoundaryMap, &[CMatrix], &[CMatrix])> {
        match &self.backend {
            Backend::Sector(s) => Some((&s.full, &s.sub, &s.left, &s.right, &s.u1, &s.u2)),
            Backend::Dense(_) => None,
        }
    }

    pub(crate) fn block_spectra(&self) -> Option<&BlockSpectra> {
        match &self.backend {
            Backend::Sector(s) => Some(&s.spectra),
            Backend::Dense(_) => None,
        }
    }

    pub fn boundary_energies(&self) -> (f64, f64) {
        (self.e_first, self.e_last)
    }

    /// Explicit Kraus operators of the channel, with thermal amplitudes
    /// `exp(-(beta1 eps_A + beta2 eps_B)/2) / sqrt(Z_A Z_B)`; requires finite
    /// temperatures (the zero-temperature channel has its own decomposition
    /// in [`crate::mixing`]).
    pub fn kraus_set(&self) -> Result<Vec<CMatrix>> {
        if !self.config.finite_temperatures() {
            return Err(Error::InfiniteTemperatureKraus);
        }
        let (u1, u2) = self.dense_unitaries();
        let ((a_up, a_down), (b_up, b_down)) = self.bath_populations();
        let a_w = [a_up, a_down]; // position 0 = up
        let b_w = [b_up, b_down];
        let half = 1usize << (self.n - 1);
        let mut ops = Vec::new();
        match self.target {
            ChannelTarget::CB => {
                // R = sqrt(w^A_i w^B_j') <m|_A U2 |j'>_B <k|_B U1 |i>_A
                for i in 0..2 {
                    for k in 0..2 {
                        let m1 = bra_right_ket_left(u1, k, i, half); // CB -> AC
                        for jp in 0..2 {
                            let weight = (a_w[i] * b_w[jp]).sqrt();
                            for m in 0..2 {
                                let m2 = bra_left_ket_right(u2, m, jp, half); // AC -> CB
                                ops.push(&m2 * &m1 * c64(weight, 0.0));
                            }
                        }
                    }
                }
            }
            ChannelTarget::AC => {
                for jp in 0..2 {
                    for m in 0..2 {
                        let m2 = bra_left_ket_right(u2, m, jp, half); // AC -> CB
                        for i in 0..2 {
                            let weight = (a_w[i] * b_w[jp]).sqrt();
                            for k in 0..2 {
                                let m1 = bra_right_ket_left(u1, k, i, half); // CB -> AC
                                ops.push(&m1 * &m2 * c64(weight, 0.0));
                            }
                        }
                    }
                }
            }
            ChannelTarget::C => {
                let quarter = 1usize << (self.n - 2);
                for i in 0..2 {
                    for j in 0..2 {
                        let weight = (a_w[i] * b_w[j]).sqrt();
                        for ip in 0..2 {
                            for jp in 0..2 {
                                let mut m = CMatrix::zeros(quarter, quarter);
                                for r in 0..quarter {
                                    for s in 0..quarter {
                                        m[(r, s)] = u1[(ip * half + 2 * r + jp, i * half + 2 * s + j)];
                                    }
                                }
                                ops.push(m * c64(weight, 0.0));
                            }
                        }
                    }
                }
            }
        }
        Ok(ops)
    }

    /// Superoperator matrix `M` with `vec(Phi(rho)) = M vec(rho)` in the
    /// column-stacking convention (columns of `rho` concatenated, matching
    /// column-major storage).
    pub fn superoperator_matrix(&self) -> Result<CMatrix> {
        let d = self.target_dim();
        if d > SUPEROP_DIM_CAP {
            return Err(Error::DimensionOverflow {
                requested: d,
                max_sites: SUPEROP_DIM_CAP.ilog2() as usize,
                dim: d * d,
            });
        }
        Ok(superoperator_of(d, |rho| self.apply_dense_matrix(rho)))
    }

    /// Moduli of the superoperator spectrum, descending.
    pub fn superoperator_spectrum(&self) -> Result<Vec<f64>> {
        let d = self.target_dim();
        if d > SPECTRUM_DIM_CAP {
            return Err(Error::DimensionOverflow {
                requested: d,
                max_sites: SPECTRUM_DIM_CAP.ilog2() as usize,
                dim: d * d,
            });
        }
        let m = self.superoperator_matrix()?;
        spectrum_moduli(&m)
    }

    /// `1 - |lambda_2|`: distance of the second-largest superoperator
    /// eigenvalue modulus from the unit circle.
    pub fn spectral_gap(&self) -> Result<f64> {
        let moduli = self.superoperator_spectrum()?;
        Ok(1.0 - moduli.get(1).copied().unwrap_or(0.0))
    }

    /// Fixed point of the channel.
    pub fn fixed_point(
        &self,
        method: FixedPointMethod,
        tol: f64,
        max_iter: usize,
    ) -> Result<(DensityMatrix, FixedPointDiagnostics)> {
        match method {
            FixedPointMethod::Power => self.fixed_point_power(None, tol, max_iter),
            FixedPointMethod::Eigen => self.fixed_point_eigen(tol),
        }
    }

    /// Power iteration seeded with an explicit start state (used by sweeps to
    /// warm-start neighbouring grid points).
    pub fn fixed_point_from(
        &self,
        start: &DensityMatrix,
        tol: f64,
        max_iter: usize,
    ) -> Result<(DensityMatrix, FixedPointDiagnostics)> {
        self.fixed_point_power(Some(start), tol, max_iter)
    }

    fn fixed_point_power(
        &self,
        start: Option<&DensityMatrix>,
        tol: f64,
        max_iter: usize,
    ) -> Result<(DensityMatrix, FixedPointDiagnostics)> {
        let sites = self.target_sites();
        if let Some(basis) = self.target_basis() {
            // block route; the iteration stays block-diagonal exactly
            let start_state = match start {
                Some(rho) => BlockState::from_dense_bd(rho.matrix(), basis),
                None => BlockState::maximally_mixed(basis),
            };
            let (state, diag) = power_iterate(
                |s| self.apply_sector(s),
                |a, b| a.trace_distance(b),
                start_state,
                tol,
                max_iter,
            )?;
            Ok((DensityMatrix::from_parts_unchecked(state.to_dense(basis), sites), diag))
        } else {
            let start_state = match start {
                Some(rho) => rho.matrix().clone(),
                None => {
                    let d = self.target_dim();
                    CMatrix::identity(d, d) / c64(self.target_dim() as f64, 0.0)
                }
            };
            let (state, diag) = power_iterate(
                |s| self.apply_dense_matrix(s),
                dense_trace_distance,
                start_state,
                tol,
                max_iter,
            )?;
            Ok((project_to_density(&state, sites.clone()), diag))
        }
    }

    fn fixed_point_eigen(&self, tol: f64) -> Result<(DensityMatrix, FixedPointDiagnostics)> {
        let d = self.target_dim();
        let m = self.superoperator_matrix()?;
        let shifted = &m - CMatrix::identity(d * d, d * d);
        let svd = shifted.svd(false, true);
        let v_t = svd.v_t.as_ref().expect("requested V^T");
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&a, &b| svd.singular_values[a].partial_cmp(&svd.singular_values[b]).unwrap());
        let second = svd.singular_values[order[1]];
        if second < 1e-8 {
            return Err(Error::DegenerateFixedPoint { second });
        }
        let v = v_t.row(order[0]).adjoint();
        let mut candidate = CMatrix::from_column_slice(d, d, v.as_slice());
        // rotate away the arbitrary global phase so the trace is real and
        // positive before symmetrizing
        let tr: C64 = candidate.diagonal().iter().sum();
        if tr.norm() > 0.0 {
            candidate *= (tr / tr.norm()).conj();
        }
        let rho = project_to_density(&candidate, self.target_sites());
        let image = self.apply_dense_matrix(rho.matrix());
        let residual = dense_trace_distance(&image, rho.matrix());
        let _ = tol;
        Ok((
            rho,
            FixedPointDiagnostics { iterations: 0, residual, gap_estimate: None },
        ))
    }
}

/// Shared power-iteration driver with a contraction-ratio exit estimate.
fn power_iterate<S>(
    mut apply: impl FnMut(&S) -> S,
    distance: impl Fn(&S, &S) -> f64,
    start: S,
    tol: f64,
    max_iter: usize,
) -> Result<(S, FixedPointDiagnostics)> {
    let mut current = start;
    let mut prev_res = f64::INFINITY;
    let mut ratio = 0.9_f64;
    let mut stalled = 0usize;
    for it in 1..=max_iter {
        let next = apply(&current);
        let res = distance(&next, &current);
        if res.is_finite() && prev_res.is_finite() && prev_res > 0.0 {
            let r = (res / prev_res).min(0.999_999);
            ratio = 0.5 * ratio + 0.5 * r;
        }
        // once below the rounding floor the residual stops improving
        stalled = if res >= prev_res { stalled + 1 } else { 0 };
        // distance to the true fixed point is bounded by res * r / (1 - r)
        let err_bound = res * ratio / (1.0 - ratio);
        if res < tol && (err_bound < tol || res == 0.0 || stalled >= 4) {
            return Ok((
                next,
                FixedPointDiagnostics {
                    iterations: it,
                    residual: res,
                    gap_estimate: Some(1.0 - ratio),
                },
            ));
        }
        prev_res = res;
        current = next;
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        residual: prev_res,
        gap_estimate: 1.0 - ratio,
    })
}

pub(crate) fn dense_trace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let diff = a - b;
    0.5 * hermitian_eigenvalues(&diff).iter().map(|l| l.abs()).sum::<f64>()
}

/// Superoperator matrix of an arbitrary map on `dim x dim` matrices in the
/// column-stacking convention; useful for analyzing hand-built channels.
pub fn superoperator_of(dim: usize, apply: impl Fn(&CMatrix) -> CMatrix) -> CMatrix {
    let mut m = CMatrix::zeros(dim * dim, dim * dim);
    let mut unit = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        for row in 0..dim {
            unit[(row, col)] = c64(1.0, 0.0);
            let image = apply(&unit);
            unit[(row, col)] = c64(0.0, 0.0);
            let target_col = col * dim + row;
            for (idx, val) in image.as_slice().iter().enumerate() {
                m[(idx, target_col)] = *val;
            }
        }
    }
    m
}

/// Moduli of a general complex matrix spectrum, descending.
pub fn spectrum_moduli(m: &CMatrix) -> Result<Vec<f64>> {
    let schur = m
        .clone()
        .try_schur(1e-12, 100_000)
        .ok_or_else(|| Error::InvalidState("Schur decomposition did not converge".into()))?;
    let t = schur.unpack().1;
    let mut moduli: Vec<f64> = (0..t.nrows()).map(|i| t[(i, i)].norm()).collect();
    moduli.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(moduli)
}

// Dense boundary helpers. Site 1 is the most significant bit (down-bit 0 =
// up), so attaching at the left splits the index range in halves; attaching
// at the right interleaves with stride 2.

fn embed_left(rho: &CMatrix, (p_up, p_down): (f64, f64)) -> CMatrix {
    let d = rho.nrows();
    let mut out = CMatrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        for j in 0..d {
            let v = rho[(i, j)];
            out[(i, j)] = v * c64(p_up, 0.0);
            out[(d + i, d + j)] = v * c64(p_down, 0.0);
        }
    }
    out
}

fn ptrace_left(rho: &CMatrix) -> CMatrix {
    let d = rho.nrows() / 2;
    let mut out = CMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            out[(i, j)] = rho[(i, j)] + rho[(d + i, d + j)];
        }
    }
    out
}

fn embed_right(rho: &CMatrix, (p_up, p_down): (f64, f64)) -> CMatrix {
    let d = rho.nrows();
    let mut out = CMatrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        for j in 0..d {
            let v = rho[(i, j)];
            out[(2 * i, 2 * j)] = v * c64(p_up, 0.0);
            out[(2 * i + 1, 2 * j + 1)] = v * c64(p_down, 0.0);
        }
    }
    out
}

fn ptrace_right(rho: &CMatrix) -> CMatrix {
    let d = rho.nrows() / 2;
    let mut out = CMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            out[(i, j)] = rho[(2 * i, 2 * j)] + rho[(2 * i + 1, 2 * j + 1)];
        }
    }
    out
}

/// `<k|_B U |i>_A`: rows keep B at basis position `k` (0 = up), columns keep
/// A at position `i`; maps a CB-indexed vector to an AC-indexed one.
fn bra_right_ket_left(u: &CMatrix, k: usize, i: usize, half: usize) -> CMatrix {
    CMatrix::from_fn(half, half, |ac, cb| u[(2 * ac + k, i * half + cb)])
}

/// `<m|_A U |j>_B`: rows keep A at position `m`, columns keep B at position
/// `j`; maps an AC-indexed vector to a CB-indexed one.
fn bra_left_ket_right(u: &CMatrix, m: usize, j: usize, half: usize) -> CMatrix {
    CMatrix::from_fn(half, half, |cb, ac| u[(m * half + cb, 2 * ac + j)])
}

/// Replace the hot-side (first) or cold-side (last) site of `rho` by the
/// bath Gibbs state, tracing the site out of the rest: `T_1` / `T_2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BathSite {
    Hot,
    Cold,
}

pub fn thermalize_stroke(
    rho: &DensityMatrix,
    bath: BathSite,
    site_energy: f64,
    beta: f64,
) -> Result<DensityMatrix> {
    let sites = rho.sites();
    let site = match bath {
        BathSite::Hot => *sites.first().ok_or_else(|| Error::InvalidState("empty register".into()))?,
        BathSite::Cold => *sites.last().unwrap(),
    };
    let rest: Vec<usize> = sites.iter().copied().filter(|&s| s != site).collect();
    let reduced = crate::quantumstate::partial_trace(rho, &rest)?;
    let gibbs = crate::spinchain::local_gibbs(site, site_energy, beta);
    crate::quantumstate::tensor(&gibbs, &reduced)
}

/// `U rho U^dagger` with `U = exp(-i H tau)` built from the spectral
/// decomposition of `H`; `tau = 0` is the identity.
pub fn unitary_stroke(rho: &DensityMatrix, h: &Hamiltonian, tau: f64) -> Result<DensityMatrix> {
    if h.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "Hamiltonian dimension {} vs state dimension {}",
            h.dim(),
            rho.dim()
        )));
    }
    if tau == 0.0 {
        return Ok(rho.clone());
    }
    let u = dense_unitary(&h.matrix, tau);
    Ok(DensityMatrix::from_parts_unchecked(
        &u * rho.matrix() * u.adjoint(),
        rho.sites().to_vec(),
    ))
}

/// The four loop-corner states of the limit cycle.
#[derive(Debug, Clone)]
pub struct LimitCycle {
    /// Fixed point of the CB channel: state of CB at the end of stroke 1.
    pub rho_cb_star: DensityMatrix,
    /// Fixed point of the AC channel: state of AC at the end of stroke 3.
    pub rho_ac_star: DensityMatrix,
    /// Full-chain state at the start of stroke 1.
    pub rho_acb_star: DensityMatrix,
    /// Full-chain state at the start of stroke 3.
    pub rho_acb_tilde_star: DensityMatrix,
    pub iterations: usize,
    /// Fixed-point residual of the CB channel.
    pub residual: f64,
    /// Worst cross-consistency defect between the corner states.
    pub loop_residual: f64,
}

/// Solve the CB fixed point and build all four loop corners, verifying the
/// cross-consistency identities that link them.
pub fn assemble_limit_cycle(
    spec: &ChainSpec,
    config: &CycleConfig,
    tol: f64,
    max_iter: usize,
) -> Result<LimitCycle> {
    let handle = ChannelHandle::new(spec, config, ChannelTarget::CB)?;
    assemble_limit_cycle_with(&handle, tol, max_iter)
}

pub fn assemble_limit_cycle_with(
    handle: &ChannelHandle,
    tol: f64,
    max_iter: usize,
) -> Result<LimitCycle> {
    if handle.target != ChannelTarget::CB {
        return Err(Error::TargetMismatch { target: handle.target.name(), expected: 0, got: 0 });
    }
    let (rho_cb_star, diag) = handle.fixed_point(FixedPointMethod::Power, tol, max_iter)?;
    let n = handle.site_count();
    let (e1, en) = handle.boundary_energies();
    let cfg = handle.config;
    let gibbs_a = crate::spinchain::local_gibbs(1, e1, cfg.beta1);
    let gibbs_b = crate::spinchain::local_gibbs(n, en, cfg.beta2);
    let (u1, u2) = handle.dense_unitaries();

    let start1 = crate::quantumstate::tensor(&gibbs_a, &rho_cb_star)?;
    let rho_acb_tilde = DensityMatrix::from_parts_unchecked(
        u1 * start1.matrix() * u1.adjoint(),
        start1.sites().to_vec(),
    );
    let rho_ac_star = crate::quantumstate::partial_trace(&rho_acb_tilde, &(1..n).collect::<Vec<_>>())?;
    let start3 = crate::quantumstate::tensor(&rho_ac_star, &gibbs_b)?;
    let rho_acb_star = DensityMatrix::from_parts_unchecked(
        u2 * start3.matrix() * u2.adjoint(),
        start3.sites().to_vec(),
    );

    // Cross-consistency: tracing A out of the stroke-1 corner must return the
    // CB fixed point, and one more full cycle must reproduce both corners.
    let cb_back = crate::quantumstate::partial_trace(&rho_acb_star, &(2..=n).collect::<Vec<_>>())?;
    let mut worst = cb_back.trace_distance(&rho_cb_star);
    let restart1 = crate::quantumstate::tensor(&gibbs_a, &cb_back)?;
    let tilde_back = DensityMatrix::from_parts_unchecked(
        u1 * restart1.matrix() * u1.adjoint(),
        restart1.sites().to_vec(),
    );
    worst = worst.max(tilde_back.trace_distance(&rho_acb_tilde));
    let ac_back = crate::quantumstate::partial_trace(&tilde_back, &(1..n).collect::<Vec<_>>())?;
    worst = worst.max(ac_back.trace_distance(&rho_ac_star));

    let scale = 10.0 * (n as f64);
    if worst > scale * tol.max(diag.residual) + 1e-13 {
        return Err(Error::NonConvergence {
            iterations: diag.iterations,
            residual: worst,
            gap_estimate: diag.gap_estimate.unwrap_or(0.0),
        });
    }
    Ok(LimitCycle {
        rho_cb_star,
        rho_ac_star,
        rho_acb_star,
        rho_acb_tilde_star: rho_acb_tilde,
        iterations: diag.iterations,
        residual: diag.residual,
        loop_residual: worst,
    })
}

/// Heats of the limit cycle, computed entirely inside the excitation blocks.
#[derive(Debug, Clone)]
pub struct SteadyHeats {
    pub q_h: f64,
    pub q_c: f64,
    /// CB fixed point, densified (reusable as a warm start).
    pub rho_cb_star: DensityMatrix,
    pub iterations: usize,
    pub residual: f64,
}

/// Fixed point plus limit-cycle heats for a magnetization-preserving chain;
/// this is the fast path the sweeps use.
pub fn steady_heats(
    spec: &ChainSpec,
    config: &CycleConfig,
    tol: f64,
    max_iter: usize,
    warm_start: Option<&DensityMatrix>,
) -> Result<SteadyHeats> {
    let handle = ChannelHandle::new(spec, config, ChannelTarget::CB)?;
    let (rho_cb_star, diag) = match warm_start {
        Some(w) => handle.fixed_point_from(w, tol, max_iter)?,
        None => handle.fixed_point(FixedPointMethod::Power, tol, max_iter)?,
    };
    let (q_h, q_c) = heats_from_fixed_point(&handle, &rho_cb_star)?;
    Ok(SteadyHeats {
        q_h,
        q_c,
        rho_cb_star,
        iterations: diag.iterations,
        residual: diag.residual,
    })
}

/// Limit-cycle heats given a (converged) fixed point of the CB channel,
/// computed blockwise: evolve the stroke-1 corner, read site N before its
/// bath, thermalize, evolve, read site 1.
pub fn heats_from_fixed_point(handle: &ChannelHandle, rho_cb_star: &DensityMatrix) -> Result<(f64, f64)> {
    if handle.target != ChannelTarget::CB {
        return Err(Error::TargetMismatch { target: handle.target.name(), expected: 0, got: 0 });
    }
    let (full, sub, left, right, u1, u2) =
        handle.sector_parts().ok_or_else(|| Error::InvalidSpec("heats need the sector backend".into()))?;
    let basis = handle.target_basis().unwrap();
    let fp_blocks = BlockState::from_dense_bd(rho_cb_star.matrix(), basis);
    let (a_pops, b_pops) = handle.bath_populations();
    let n = handle.site_count();
    let (e1, en) = handle.boundary_energies();

    // stroke 2: evolve gibbs_A (x) rho*_CB, read B just before its bath
    let mut tilde_full = fp_blocks.attach(left, full, a_pops.0, a_pops.1);
    tilde_full.evolve(u1);
    let q_c = en * (tilde_full.site_up_population(full, n) - b_pops.0);

    // strokes 3 and 4: thermalize B, evolve, read A just before its bath
    let ac = tilde_full.detach(right, sub);
    let mut star_full = ac.attach(right, full, b_pops.0, b_pops.1);
    star_full.evolve(u2);
    let q_h = e1 * (star_full.site_up_population(full, 1) - a_pops.0);
    Ok((q_h, q_c))
}

/// Per-cycle bookkeeping of a transient run.
#[derive(Debug, Clone)]
pub struct CycleRecord {
    pub q_h: f64,
    pub q_c: f64,
    /// Quench works: disconnect A, reconnect A, disconnect B, reconnect B.
    pub work: [f64; 4],
    pub w_total: f64,
    pub delta_s_t1: f64,
    pub delta_s_t2: f64,
    pub energy_start: f64,
    pub energy_end: f64,
    /// Running Cesaro means over cycles so far.
    pub mean_q_h: f64,
    pub mean_q_c: f64,
    pub mean_w: f64,
}

/// Follow the machine for `m` cycles from `rho0` (a full-chain state),
/// recording heats, quench works, entropy jumps and running means.
pub fn iterate_transient(
    spec: &ChainSpec,
    config: &CycleConfig,
    rho0: &DensityMatrix,
    m: usize,
) -> Result<Vec<CycleRecord>> {
    config.validate()?;
    let n = spec.n;
    if rho0.sites() != (1..=n).collect::<Vec<_>>().as_slice() {
        return Err(Error::TargetMismatch { target: "full chain", expected: n, got: rho0.sites().len() });
    }
    let h = crate::spinchain::build_hamiltonian(spec)?;
    let h_ac = bond_coupling_matrix(spec, 1);
    let h_cb = bond_coupling_matrix(spec, n - 1);
    let u1 = dense_unitary(&h.matrix, config.tau1);
    let u2 = dense_unitary(&h.matrix, config.tau2);
    let (a_up, _) = gibbs_populations(spec.e_first(), config.beta1);
    let (b_up, _) = gibbs_populations(spec.e_last(), config.beta2);
    let gibbs_a = crate::spinchain::local_gibbs(1, spec.e_first(), config.beta1);
    let gibbs_b = crate::spinchain::local_gibbs(n, spec.e_last(), config.beta2);

    let energy = |rho: &DensityMatrix| crate::quantumstate::expectation(rho, &h.matrix);
    let mut rho = rho0.clone();
    let mut records = Vec::with_capacity(m);
    let (mut sum_qh, mut sum_qc, mut sum_w) = (0.0, 0.0, 0.0);
    for cycle in 1..=m {
        let energy_start = energy(&rho)?;
        let w1 = crate::quantumstate::expectation(&rho, &h_ac)?;
        let q_h = spec.e_first() * (rho.site_up_population(1)? - a_up);
        let s_before = von_neumann_entropy(&rho);
        let rho1 = {
            let rest = crate::quantumstate::partial_trace(&rho, &(2..=n).collect::<Vec<_>>())?;
            crate::quantumstate::tensor(&gibbs_a, &rest)?
        };
        let delta_s_t1 = von_neumann_entropy(&rho1) - s_before;
        let w2 = -crate::quantumstate::expectation(&rho1, &h_ac)?;
        let rho2 = DensityMatrix::from_parts_unchecked(&u1 * rho1.matrix() * u1.adjoint(), rho1.sites().to_vec());

        let w3 = crate::quantumstate::expectation(&rho2, &h_cb)?;
        let q_c = spec.e_last() * (rho2.site_up_population(n)? - b_up);
        let s_mid = von_neumann_entropy(&rho2);
        let rho3 = {
            let rest = crate::quantumstate::partial_trace(&rho2, &(1..n).collect::<Vec<_>>())?;
            crate::quantumstate::tensor(&rest, &gibbs_b)?
        };
        let delta_s_t2 = von_neumann_entropy(&rho3) - s_mid;
        let w4 = -crate::quantumstate::expectation(&rho3, &h_cb)?;
        let rho_next = DensityMatrix::from_parts_unchecked(&u2 * rho3.matrix() * u2.adjoint(), rho3.sites().to_vec());
        let energy_end = energy(&rho_next)?;

        let w_total = w1 + w2 + w3 + w4;
        sum_qh += q_h;
        sum_qc += q_c;
        sum_w += w_total;
        records.push(CycleRecord {
            q_h,
            q_c,
            work: [w1, w2, w3, w4],
            w_total,
            delta_s_t1,
            delta_s_t2,
            energy_start,
            energy_end,
            mean_q_h: sum_qh / cycle as f64,
            mean_q_c: sum_qc / cycle as f64,
            mean_w: sum_w / cycle as f64,
        });
        rho = rho_next;
    }
    Ok(records)
}

/// Coupling terms of bond `bond` (J, K, F between sites `bond` and `bond+1`)
/// on the full chain; the operator whose expectation jumps at the
/// connect/disconnect quenches.
pub(crate) fn bond_coupling_matrix(spec: &ChainSpec, bond: usize) -> CMatrix {
    let only_bond = ChainSpec {
        n: spec.n,
        e: vec![0.0; spec.n],
        j: (0..spec.n - 1).map(|b| if b + 1 == bond { spec.j[b] } else { 0.0 }).collect(),
        k: (0..spec.n - 1).map(|b| if b + 1 == bond { spec.k[b] } else { 0.0 }).collect(),
        f: (0..spec.n - 1).map(|b| if b + 1 == bond { spec.f[b] } else { 0.0 }).collect(),
    };
    crate::spinchain::build_hamiltonian(&only_bond).expect("bond matrix").matrix
}

//! Density-matrix algebra over labelled site registers: tensor products,
//! partial traces, entropies, expectation values and block decomposition.
//!
//! A register is an ascending list of site labels; the first label is the most
//! significant bit of the basis index, matching [`crate::spinchain`].

use crate::spinchain::{gibbs_populations, hermiticity_deviation, MagnetizationBlocks};
use crate::{c64, CMatrix, CVector, Error, Result};

/// Eigenvalues this far below zero are treated as spectral noise and clamped.
pub const EIGENVALUE_CLAMP: f64 = -1e-10;

/// Hermitian, positive-semidefinite, unit-trace matrix over a labelled set of
/// sites.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
    sites: Vec<usize>,
}

impl DensityMatrix {
    /// Validate Hermiticity (1e-12), positivity (eigenvalues >= -1e-10) and
    /// unit trace (1e-12) before wrapping.
    pub fn new(matrix: CMatrix, sites: Vec<usize>) -> Result<Self> {
        let dim = 1usize << sites.len();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "state is {}x{}, expected {dim}x{dim} for {} sites",
                matrix.nrows(),
                matrix.ncols(),
                sites.len()
            )));
        }
        let mut sorted = sites.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != sites.len() || sorted != sites {
            return Err(Error::InvalidState(format!("sites must be ascending and unique, got {sites:?}")));
        }
        let herm = hermiticity_deviation(&matrix);
        if herm > 1e-12 {
            return Err(Error::InvalidState(format!("Hermiticity deviation {herm:e}")));
        }
        let tr = matrix.diagonal().iter().map(|z| z.re).sum::<f64>();
        if (tr - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("trace is {tr}, not 1")));
        }
        let min_eig = hermitian_eigenvalues(&matrix).into_iter().fold(f64::INFINITY, f64::min);
        if min_eig < EIGENVALUE_CLAMP {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:e}")));
        }
        Ok(Self { matrix, sites })
    }

    /// Wrap without validation; for internal paths whose outputs are
    /// density matrices by construction.
    pub(crate) fn from_parts_unchecked(matrix: CMatrix, sites: Vec<usize>) -> Self {
        Self { matrix, sites }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.diagonal().iter().map(|z| z.re).sum()
    }

    /// `|psi><psi|` from a normalized state vector.
    pub fn pure(psi: &CVector, sites: Vec<usize>) -> Result<Self> {
        let norm = psi.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("state vector norm {norm}")));
        }
        let m = psi * psi.adjoint();
        Self::new(m, sites)
    }

    /// `I / 2^k` on the given register.
    pub fn maximally_mixed(sites: Vec<usize>) -> Self {
        let dim = 1usize << sites.len();
        let m = CMatrix::identity(dim, dim) / c64(dim as f64, 0.0);
        Self::from_parts_unchecked(m, sites)
    }

    /// Basis projector `|b><b|` where `b` lists, per site of the register in
    /// order, `true` for up.
    pub fn basis_state(bits_up: &[bool], sites: Vec<usize>) -> Result<Self> {
        if bits_up.len() != sites.len() {
            return Err(Error::DimensionMismatch("one bit per site required".into()));
        }
        let k = sites.len();
        let mut p = 0usize;
        for (idx, up) in bits_up.iter().enumerate() {
            if !up {
                p |= 1 << (k - 1 - idx);
            }
        }
        let dim = 1usize << k;
        let mut m = CMatrix::zeros(dim, dim);
        m[(p, p)] = c64(1.0, 0.0);
        Ok(Self::from_parts_unchecked(m, sites))
    }

    /// Probability that `site` is up: `Tr[rho |1><1|_site]`.
    pub fn site_up_population(&self, site: usize) -> Result<f64> {
        let idx = self
            .sites
            .iter()
            .position(|&s| s == site)
            .ok_or(Error::SiteOutOfRange { site, n: self.sites.len() })?;
        let k = self.sites.len();
        let bit = 1usize << (k - 1 - idx);
        let mut p = 0.0;
        for q in 0..self.dim() {
            if q & bit == 0 {
                p += self.matrix[(q, q)].re;
            }
        }
        Ok(p)
    }

    /// Half the trace norm of the difference.
    pub fn trace_distance(&self, other: &Self) -> f64 {
        let diff = &self.matrix - &other.matrix;
        0.5 * hermitian_eigenvalues(&diff).iter().map(|l| l.abs()).sum::<f64>()
    }
}

pub(crate) fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    m.clone().symmetric_eigen().eigenvalues.iter().copied().collect()
}

/// `(m + m^dagger) / 2`.
pub(crate) fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c64(0.5, 0.0)
}

/// Hermitize, clamp negative eigenvalues to zero and renormalize the trace;
/// used to repair numerically noisy fixed-point candidates.
pub(crate) fn project_to_density(m: &CMatrix, sites: Vec<usize>) -> DensityMatrix {
    let h = hermitize(m);
    let d = h.nrows();
    let (values, vectors) = crate::linalg::hermitian_eigen(&h);
    let clamped: Vec<f64> = values.iter().map(|&l| l.max(0.0)).collect();
    let total: f64 = clamped.iter().sum();
    let mut out = CMatrix::zeros(d, d);
    for (k, &l) in clamped.iter().enumerate() {
        if l > 0.0 {
            let v = vectors.column(k);
            out += (v * v.adjoint()) * c64(l / total, 0.0);
        }
    }
    DensityMatrix::from_parts_unchecked(out, sites)
}

/// Reduced state on `keep` (a subset of the register); the empty subset
/// yields the scalar trace as a 1x1 matrix.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let sites = rho.sites();
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    for &s in &keep_sorted {
        if !sites.contains(&s) {
            return Err(Error::SiteOutOfRange { site: s, n: sites.len() });
        }
    }
    let k = sites.len();
    let kk = keep_sorted.len();
    let kt = k - kk;
    if kt == 0 {
        return Ok(rho.clone());
    }
    // For each full position, its (kept-bits, traced-bits) pair.
    let keep_flags: Vec<bool> = sites.iter().map(|s| keep_sorted.contains(s)).collect();
    let mut table = vec![vec![0usize; 1 << kt]; 1 << kk];
    for p in 0..(1usize << k) {
        let mut a = 0usize;
        let mut t = 0usize;
        for (idx, &is_kept) in keep_flags.iter().enumerate() {
            let bit = (p >> (k - 1 - idx)) & 1;
            if is_kept {
                a = (a << 1) | bit;
            } else {
                t = (t << 1) | bit;
            }
        }
        table[a][t] = p;
    }
    let dim_out = 1usize << kk;
    let mut out = CMatrix::zeros(dim_out, dim_out);
    for a1 in 0..dim_out {
        for a2 in 0..dim_out {
            let mut acc = c64(0.0, 0.0);
            for t in 0..(1usize << kt) {
                acc += rho.matrix()[(table[a1][t], table[a2][t])];
            }
            out[(a1, a2)] = acc;
        }
    }
    Ok(DensityMatrix::from_parts_unchecked(out, keep_sorted))
}

/// Tensor product with the combined register ordered by site label
/// (interleaving the factors as needed).
pub fn tensor(a: &DensityMatrix, b: &DensityMatrix) -> Result<DensityMatrix> {
    let overlap: Vec<usize> = a.sites().iter().copied().filter(|s| b.sites().contains(s)).collect();
    if !overlap.is_empty() {
        return Err(Error::OverlappingSites(overlap));
    }
    let mut merged: Vec<usize> = a.sites().iter().chain(b.sites()).copied().collect();
    merged.sort_unstable();
    let k = merged.len();
    // positions of each merged site's bit within factor a or b
    let mut from_a = Vec::with_capacity(k);
    for s in &merged {
        if let Some(i) = a.sites().iter().position(|x| x == s) {
            from_a.push((true, i));
        } else {
            let i = b.sites().iter().position(|x| x == s).unwrap();
            from_a.push((false, i));
        }
    }
    let ka = a.sites().len();
    let kb = b.sites().len();
    let dim = 1usize << k;
    let mut pa_of = vec![0usize; dim];
    let mut pb_of = vec![0usize; dim];
    for p in 0..dim {
        let (mut pa, mut pb) = (0usize, 0usize);
        for (idx, &(in_a, pos)) in from_a.iter().enumerate() {
            let bit = (p >> (k - 1 - idx)) & 1;
            if in_a {
                pa |= bit << (ka - 1 - pos);
            } else {
                pb |= bit << (kb - 1 - pos);
            }
        }
        pa_of[p] = pa;
        pb_of[p] = pb;
    }
    let mut out = CMatrix::zeros(dim, dim);
    for p in 0..dim {
        for q in 0..dim {
            out[(p, q)] = a.matrix()[(pa_of[p], pa_of[q])] * b.matrix()[(pb_of[p], pb_of[q])];
        }
    }
    Ok(DensityMatrix::from_parts_unchecked(out, merged))
}

/// Von Neumann entropy in nats, `-sum lambda ln lambda` with `0 ln 0 = 0`.
/// Eigenvalues within [`EIGENVALUE_CLAMP`] of zero are clamped.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    hermitian_eigenvalues(rho.matrix())
        .into_iter()
        .map(|l| l.max(0.0))
        .filter(|&l| l > 0.0)
        .map(|l| -l * l.ln())
        .sum()
}

/// Entropy bookkeeping for one thermalization stroke on `site`.
#[derive(Debug, Clone, Copy)]
pub struct EntropyJumpBounds {
    /// Entropy jump of the whole chain under the stroke.
    pub delta_s_t: f64,
    /// Subadditivity bound `S(gibbs) - S(rho_site)`.
    pub subadditivity_bound: f64,
    /// Relative-entropy bound `-beta Q` for the stroke.
    pub heat_bound: f64,
    /// Both inequalities hold within 1e-10 slack.
    pub ok: bool,
}

/// Check the inequality chain
/// `dS_T >= S(gibbs) - S(rho_site) >= -beta Q` for thermalizing `site` of
/// `rho_before` against a bath at inverse temperature `beta`, with local
/// Hamiltonian `E S^Z`.
pub fn entropy_jump_bounds(
    rho_before: &DensityMatrix,
    site: usize,
    beta: f64,
    site_energy: f64,
) -> Result<EntropyJumpBounds> {
    let rho_site = partial_trace(rho_before, &[site])?;
    let rest: Vec<usize> = rho_before.sites().iter().copied().filter(|&s| s != site).collect();
    let rho_rest = partial_trace(rho_before, &rest)?;
    let gibbs = crate::spinchain::local_gibbs(site, site_energy, beta);
    let after = tensor(&gibbs, &rho_rest)?;

    let delta_s_t = von_neumann_entropy(&after) - von_neumann_entropy(rho_before);
    let subadditivity_bound = von_neumann_entropy(&gibbs) - von_neumann_entropy(&rho_site);
    // heat dumped into the bath by the stroke
    let (gibbs_up, _) = gibbs_populations(site_energy, beta);
    let q = site_energy * (rho_site.site_up_population(site)? - gibbs_up);
    let heat_bound = if q == 0.0 { 0.0 } else { -beta * q };
    let ok = delta_s_t >= subadditivity_bound - 1e-10 && subadditivity_bound >= heat_bound - 1e-10;
    Ok(EntropyJumpBounds { delta_s_t, subadditivity_bound, heat_bound, ok })
}

/// Result of splitting a state into its block-diagonal and off-block parts
/// with respect to a magnetization block structure.
#[derive(Debug, Clone)]
pub struct BlockDecomposition {
    /// `sum_n P(n) rho P(n)`; itself a valid density matrix.
    pub bd: DensityMatrix,
    /// `rho - bd`; traceless.
    pub off: CMatrix,
}

/// Split `rho` into block-diagonal and off-block parts w.r.t. `blocks`.
pub fn block_decompose(rho: &DensityMatrix, blocks: &MagnetizationBlocks) -> Result<BlockDecomposition> {
    if blocks.sites != rho.sites() {
        return Err(Error::DimensionMismatch(format!(
            "blocks are over sites {:?}, state over {:?}",
            blocks.sites,
            rho.sites()
        )));
    }
    let dim = rho.dim();
    let mut block_of = vec![usize::MAX; dim];
    for (n, members) in blocks.blocks.iter().enumerate() {
        for &p in members {
            block_of[p] = n;
        }
    }
    let mut bd = CMatrix::zeros(dim, dim);
    for p in 0..dim {
        for q in 0..dim {
            if block_of[p] == block_of[q] {
                bd[(p, q)] = rho.matrix()[(p, q)];
            }
        }
    }
    let off = rho.matrix() - &bd;
    Ok(BlockDecomposition {
        bd: DensityMatrix::from_parts_unchecked(bd, rho.sites().to_vec()),
        off,
    })
}

/// `Tr[obs rho]` for a Hermitian observable; errors if the imaginary part
/// survives above 1e-10, which signals a Hermiticity bug upstream.
pub fn expectation(rho: &DensityMatrix, obs: &CMatrix) -> Result<f64> {
    if obs.nrows() != rho.dim() || obs.ncols() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "observable is {}x{}, state dimension {}",
            obs.nrows(),
            obs.ncols(),
            rho.dim()
        )));
    }
    let mut acc = c64(0.0, 0.0);
    for i in 0..obs.nrows() {
        for j in 0..obs.ncols() {
            acc += obs[(i, j)] * rho.matrix()[(j, i)];
        }
    }
    if acc.im.abs() > 1e-10 * (1.0 + acc.re.abs()) {
        return Err(Error::NonHermitianExpectation { imag: acc.im });
    }
    Ok(acc.re)
}

/// Random full-rank density matrix for tests (Wishart construction).
#[cfg(test)]
pub(crate) fn random_density(k: usize, sites: Vec<usize>, rng: &mut rand_chacha::ChaCha8Rng) -> DensityMatrix {
    use rand::Rng;
    let dim = 1usize << k;
    let g = CMatrix::from_fn(dim, dim, |_, _| c64(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    let m = &g * g.adjoint();
    let tr = m.diagonal().iter().map(|z| z.re).sum::<f64>();
    DensityMatrix::from_parts_unchecked(m / c64(tr, 0.0), sites)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinchain::{excitation_blocks, local_gibbs, magnetization_operator};
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn partial_trace_of_product_recovers_factors() {
        let a = local_gibbs(1, 1.0, 0.7);
        let b = local_gibbs(2, -0.4, 1.3);
        let ab = tensor(&a, &b).unwrap();
        assert_relative_eq!(ab.trace(), 1.0, epsilon = 1e-14);
        let ra = partial_trace(&ab, &[1]).unwrap();
        let rb = partial_trace(&ab, &[2]).unwrap();
        assert!((ra.matrix() - a.matrix()).norm() < 1e-14);
        assert!((rb.matrix() - b.matrix()).norm() < 1e-14);
    }

    #[test]
    fn maximally_entangled_pair_reduces_to_maximally_mixed() {
        let mut psi = CVector::zeros(4);
        psi[0] = c64(1.0 / 2f64.sqrt(), 0.0); // |11>
        psi[3] = c64(1.0 / 2f64.sqrt(), 0.0); // |00>
        let rho = DensityMatrix::pure(&psi, vec![1, 2]).unwrap();
        let r1 = partial_trace(&rho, &[1]).unwrap();
        assert!((r1.matrix() - DensityMatrix::maximally_mixed(vec![1]).matrix()).norm() < 1e-14);
    }

    #[test]
    fn partial_trace_composes() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rho = random_density(3, vec![1, 2, 3], &mut rng);
        let two_step = partial_trace(&partial_trace(&rho, &[2, 3]).unwrap(), &[2]).unwrap();
        let direct = partial_trace(&rho, &[2]).unwrap();
        assert!((two_step.matrix() - direct.matrix()).norm() < 1e-13);
    }

    #[test]
    fn empty_keep_returns_scalar_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let rho = random_density(2, vec![1, 2], &mut rng);
        let s = partial_trace(&rho, &[]).unwrap();
        assert_eq!(s.dim(), 1);
        assert_relative_eq!(s.matrix()[(0, 0)].re, 1.0, epsilon = 1e-13);
    }

    #[test]
    fn tensor_orders_interleaved_site_labels() {
        // a on {1,3}, b on {2}: site 2 must land between 1 and 3
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random_density(2, vec![1, 3], &mut rng);
        let b = random_density(1, vec![2], &mut rng);
        let ab = tensor(&a, &b).unwrap();
        assert_eq!(ab.sites(), &[1, 2, 3]);
        let back_a = partial_trace(&ab, &[1, 3]).unwrap();
        let back_b = partial_trace(&ab, &[2]).unwrap();
        assert!((back_a.matrix() - a.matrix()).norm() < 1e-13);
        assert!((back_b.matrix() - b.matrix()).norm() < 1e-13);
        // expectation of S_2^Z must match the factor's value
        let sz_full = magnetization_operator(&[2], 3).unwrap();
        let sz_one = magnetization_operator(&[1], 1).unwrap();
        assert_relative_eq!(
            expectation(&ab, &sz_full.matrix).unwrap(),
            expectation(&b, &sz_one.matrix).unwrap(),
            epsilon = 1e-13
        );
    }

    #[test]
    fn tensor_rejects_overlap() {
        let a = local_gibbs(1, 1.0, 1.0);
        let b = local_gibbs(1, 1.0, 1.0);
        assert!(matches!(tensor(&a, &b), Err(Error::OverlappingSites(_))));
    }

    #[test]
    fn entropy_reference_values() {
        let mut psi = CVector::zeros(2);
        psi[0] = c64(1.0, 0.0);
        let pure = DensityMatrix::pure(&psi, vec![1]).unwrap();
        assert!(von_neumann_entropy(&pure).abs() < 1e-12);

        let mixed = DensityMatrix::maximally_mixed(vec![1]);
        assert_relative_eq!(von_neumann_entropy(&mixed), 2f64.ln(), epsilon = 1e-13);

        let g = local_gibbs(1, 1.0, 3f64.ln());
        let want = -(0.75 * 0.75_f64.ln() + 0.25 * 0.25_f64.ln());
        assert_relative_eq!(von_neumann_entropy(&g), want, epsilon = 1e-13);
    }

    #[test]
    fn entropy_is_unitarily_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rho = random_density(2, vec![1, 2], &mut rng);
        let g = CMatrix::from_fn(4, 4, |_, _| c64(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let q = g.qr().q();
        let rotated = DensityMatrix::from_parts_unchecked(&q * rho.matrix() * q.adjoint(), vec![1, 2]);
        assert_relative_eq!(von_neumann_entropy(&rho), von_neumann_entropy(&rotated), epsilon = 1e-10);
    }

    #[test]
    fn entropy_jump_is_zero_when_site_already_thermal() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let rest = random_density(2, vec![2, 3], &mut rng);
        let gibbs = local_gibbs(1, 1.0, 0.9);
        let rho = tensor(&gibbs, &rest).unwrap();
        let b = entropy_jump_bounds(&rho, 1, 0.9, 1.0).unwrap();
        assert!(b.delta_s_t.abs() < 1e-10);
        assert!(b.ok);
    }

    #[test]
    fn entropy_jump_is_tight_for_product_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let site_state = random_density(1, vec![1], &mut rng);
        let rest = random_density(2, vec![2, 3], &mut rng);
        let rho = tensor(&site_state, &rest).unwrap();
        let b = entropy_jump_bounds(&rho, 1, 1.4, 0.8).unwrap();
        assert_relative_eq!(b.delta_s_t, b.subadditivity_bound, epsilon = 1e-10);
        assert!(b.ok);
    }

    #[test]
    fn entropy_jump_inequalities_hold_for_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..100 {
            let rho = random_density(3, vec![1, 2, 3], &mut rng);
            let b = entropy_jump_bounds(&rho, 1, 1.0, 1.0).unwrap();
            assert!(b.ok, "violated: {b:?}");
        }
    }

    #[test]
    fn block_decompose_splits_and_reassembles() {
        let blocks = excitation_blocks(&[1], 1).unwrap();
        // |+><+| on one site: off part is the antidiagonal
        let mut plus = CVector::zeros(2);
        plus[0] = c64(1.0 / 2f64.sqrt(), 0.0);
        plus[1] = c64(1.0 / 2f64.sqrt(), 0.0);
        let rho = DensityMatrix::pure(&plus, vec![1]).unwrap();
        let d = block_decompose(&rho, &blocks).unwrap();
        assert!(d.off[(0, 0)].norm() < 1e-15 && d.off[(1, 1)].norm() < 1e-15);
        assert_relative_eq!(d.off[(0, 1)].re, 0.5, epsilon = 1e-15);
        assert!((d.bd.matrix() + &d.off - rho.matrix()).norm() < 1e-15);
        assert!(d.off.diagonal().iter().map(|z| z.re).sum::<f64>().abs() < 1e-15);

        // diagonal state: off part vanishes
        let g = local_gibbs(1, 1.0, 1.0);
        let dg = block_decompose(&g, &blocks).unwrap();
        assert!(dg.off.norm() < 1e-15);
    }

    #[test]
    fn bd_part_commutes_with_register_magnetization() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let rho = random_density(3, vec![1, 2, 3], &mut rng);
        let blocks = excitation_blocks(&[1, 2, 3], 3).unwrap();
        let d = block_decompose(&rho, &blocks).unwrap();
        let sz = magnetization_operator(&[1, 2, 3], 3).unwrap();
        let comm = d.bd.matrix() * &sz.matrix - &sz.matrix * d.bd.matrix();
        assert!(comm.norm() < 1e-14);
    }

    #[test]
    fn expectation_reference_values() {
        let sz = magnetization_operator(&[1], 1).unwrap();
        let mixed = DensityMatrix::maximally_mixed(vec![1]);
        assert_eq!(expectation(&mixed, &sz.matrix).unwrap(), 0.0);

        let up = DensityMatrix::basis_state(&[true], vec![1]).unwrap();
        assert_eq!(expectation(&up, &sz.matrix).unwrap(), 0.5);

        // linearity spot check
        let g = local_gibbs(1, 1.0, 1.2);
        let two_sz = &sz.matrix * c64(2.0, 0.0);
        assert_relative_eq!(
            expectation(&g, &two_sz).unwrap(),
            2.0 * expectation(&g, &sz.matrix).unwrap(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn validation_catches_bad_states() {
        let m = CMatrix::from_row_slice(2, 2, &[c64(0.5, 0.0), c64(0.1, 0.2), c64(0.3, 0.1), c64(0.5, 0.0)]);
        assert!(DensityMatrix::new(m, vec![1]).is_err()); // not Hermitian
        let m = CMatrix::from_row_slice(2, 2, &[c64(0.9, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(0.3, 0.0)]);
        assert!(DensityMatrix::new(m, vec![1]).is_err()); // trace 1.2
        let m = CMatrix::from_row_slice(2, 2, &[c64(1.2, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(-0.2, 0.0)]);
        assert!(DensityMatrix::new(m, vec![1]).is_err()); // negative eigenvalue
    }
}

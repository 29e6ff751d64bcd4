//! Internal block machinery for magnetization-preserving dynamics.
//!
//! When `[H, S^Z] = 0` the cycle channel maps block-diagonal states to
//! block-diagonal states, so the fixed-point iteration can stay inside the
//! excitation-number blocks. Working per block turns every `2^N`-dimensional
//! conjugation into a family of `C(N, n)`-dimensional ones, which is what
//! makes the N = 8 sweeps and the transient studies affordable.

use crate::spinchain::{site_is_up, up_count, ChainSpec};
use crate::{c64, CMatrix};
use nalgebra::DVector;

/// Basis bookkeeping for a `k`-site register split by up-spin count.
#[derive(Debug, Clone)]
pub(crate) struct SectorBasis {
    pub k: usize,
    /// `blocks[n]` = register positions with `n` up spins, ascending.
    pub blocks: Vec<Vec<u32>>,
    /// position -> (block, index within block)
    pub lookup: Vec<(u8, u32)>,
}

impl SectorBasis {
    pub fn new(k: usize) -> Self {
        let dim = 1usize << k;
        let mut blocks = vec![Vec::new(); k + 1];
        let mut lookup = vec![(0u8, 0u32); dim];
        for p in 0..dim {
            let n = up_count(p, k);
            lookup[p] = (n as u8, blocks[n].len() as u32);
            blocks[n].push(p as u32);
        }
        Self { k, blocks, lookup }
    }

    #[cfg(test)]
    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }
}

/// Which end of the register a site is attached to or removed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Side {
    /// New most-significant site (prepended label).
    Left,
    /// New least-significant site (appended label).
    Right,
}

/// Position maps between a `k`-site child register and the `k+1`-site parent
/// obtained by attaching one site on `side`.
#[derive(Debug, Clone)]
pub(crate) struct BoundaryMap {
    /// child block `n`, position index -> index in parent block `n + 1`
    pub up: Vec<Vec<u32>>,
    /// child block `n`, position index -> index in parent block `n`
    pub down: Vec<Vec<u32>>,
}

impl BoundaryMap {
    pub fn new(child: &SectorBasis, parent: &SectorBasis, side: Side) -> Self {
        let k = child.k;
        assert_eq!(parent.k, k + 1);
        let mut up = Vec::with_capacity(k + 1);
        let mut down = Vec::with_capacity(k + 1);
        for block in &child.blocks {
            let mut u = Vec::with_capacity(block.len());
            let mut d = Vec::with_capacity(block.len());
            for &p in block {
                let (p_up, p_down) = match side {
                    // new site's down-bit is the parent MSB
                    Side::Left => (p, p + (1 << k) as u32),
                    // new site's down-bit is the parent LSB
                    Side::Right => (2 * p, 2 * p + 1),
                };
                u.push(parent.lookup[p_up as usize].1);
                d.push(parent.lookup[p_down as usize].1);
            }
            up.push(u);
            down.push(d);
        }
        Self { up, down }
    }
}

/// Block-diagonal operator on a sector basis (one dense matrix per block).
#[derive(Debug, Clone)]
pub(crate) struct BlockState {
    pub blocks: Vec<CMatrix>,
}

impl BlockState {
    pub fn zeros(basis: &SectorBasis) -> Self {
        Self {
            blocks: basis.blocks.iter().map(|b| CMatrix::zeros(b.len(), b.len())).collect(),
        }
    }

    pub fn maximally_mixed(basis: &SectorBasis) -> Self {
        let dim = (1usize << basis.k) as f64;
        let mut s = Self::zeros(basis);
        for (n, b) in basis.blocks.iter().enumerate() {
            s.blocks[n] = CMatrix::identity(b.len(), b.len()) / c64(dim, 0.0);
        }
        s
    }

    #[cfg(test)]
    pub fn trace(&self) -> f64 {
        self.block_populations().iter().sum()
    }

    /// Per-block populations `q_n = Tr[P(n) rho]`.
    pub fn block_populations(&self) -> Vec<f64> {
        self.blocks
            .iter()
            .map(|b| b.diagonal().iter().map(|z| z.re).sum::<f64>())
            .collect()
    }

    /// Attach a diagonal single-site state `(p_up, p_down)` on the mapped side.
    pub fn attach(&self, map: &BoundaryMap, parent: &SectorBasis, p_up: f64, p_down: f64) -> Self {
        let mut out = Self::zeros(parent);
        for (n, child_block) in self.blocks.iter().enumerate() {
            let m = child_block.nrows();
            if m == 0 {
                continue;
            }
            let umap = &map.up[n];
            let dmap = &map.down[n];
            let cu = c64(p_up, 0.0);
            let cd = c64(p_down, 0.0);
            for i in 0..m {
                for j in 0..m {
                    let v = child_block[(i, j)];
                    if p_up != 0.0 {
                        out.blocks[n + 1][(umap[i] as usize, umap[j] as usize)] += cu * v;
                    }
                    if p_down != 0.0 {
                        out.blocks[n][(dmap[i] as usize, dmap[j] as usize)] += cd * v;
                    }
                }
            }
        }
        out
    }

    /// Trace out the mapped boundary site; `self` lives on the parent basis.
    pub fn detach(&self, map: &BoundaryMap, child: &SectorBasis) -> Self {
        let mut out = Self::zeros(child);
        for (n, block) in out.blocks.iter_mut().enumerate() {
            let m = block.nrows();
            if m == 0 {
                continue;
            }
            let umap = &map.up[n];
            let dmap = &map.down[n];
            let up_parent = &self.blocks[n + 1];
            let down_parent = &self.blocks[n];
            for i in 0..m {
                for j in 0..m {
                    block[(i, j)] = up_parent[(umap[i] as usize, umap[j] as usize)]
                        + down_parent[(dmap[i] as usize, dmap[j] as usize)];
                }
            }
        }
        out
    }

    /// In-place `rho_n -> U_n rho_n U_n^dagger` per block.
    pub fn evolve(&mut self, unitaries: &[CMatrix]) {
        for (b, u) in self.blocks.iter_mut().zip(unitaries) {
            if b.nrows() > 1 {
                *b = u * &*b * u.adjoint();
            }
        }
    }

    /// Probability that register site `site` (1-indexed, MSB first) is up.
    pub fn site_up_population(&self, basis: &SectorBasis, site: usize) -> f64 {
        let mut acc = 0.0;
        for (n, block) in self.blocks.iter().enumerate() {
            for (i, &p) in basis.blocks[n].iter().enumerate() {
                if site_is_up(p as usize, site, basis.k) {
                    acc += block[(i, i)].re;
                }
            }
        }
        acc
    }

    /// Half the trace norm of the difference (blockwise exact).
    pub fn trace_distance(&self, other: &Self) -> f64 {
        let mut acc = 0.0;
        for (a, b) in self.blocks.iter().zip(&other.blocks) {
            let diff = a - b;
            if diff.nrows() == 1 {
                acc += diff[(0, 0)].norm();
            } else {
                acc += diff
                    .symmetric_eigen()
                    .eigenvalues
                    .iter()
                    .map(|l| l.abs())
                    .sum::<f64>();
            }
        }
        0.5 * acc
    }

    pub fn to_dense(&self, basis: &SectorBasis) -> CMatrix {
        let dim = 1usize << basis.k;
        let mut m = CMatrix::zeros(dim, dim);
        for (n, block) in self.blocks.iter().enumerate() {
            let idx = &basis.blocks[n];
            for (i, &p) in idx.iter().enumerate() {
                for (j, &q) in idx.iter().enumerate() {
                    m[(p as usize, q as usize)] = block[(i, j)];
                }
            }
        }
        m
    }

    /// Block-diagonal part of a dense operator.
    pub fn from_dense_bd(m: &CMatrix, basis: &SectorBasis) -> Self {
        let mut s = Self::zeros(basis);
        for (n, block) in s.blocks.iter_mut().enumerate() {
            let idx = &basis.blocks[n];
            for (i, &p) in idx.iter().enumerate() {
                for (j, &q) in idx.iter().enumerate() {
                    block[(i, j)] = m[(p as usize, q as usize)];
                }
            }
        }
        s
    }
}

/// Excitation-block Hamiltonians of the full chain, one Hermitian matrix per
/// up-spin count, built directly from the couplings (no dense detour).
pub(crate) fn block_hamiltonians(spec: &ChainSpec, basis: &SectorBasis) -> Vec<CMatrix> {
    let n = spec.n;
    assert_eq!(basis.k, n);
    let mut out = Vec::with_capacity(n + 1);
    for block in &basis.blocks {
        let m = block.len();
        let mut h = CMatrix::zeros(m, m);
        for (i, &p) in block.iter().enumerate() {
            let p = p as usize;
            let mut diag = 0.0;
            for s in 1..=n {
                let z = if site_is_up(p, s, n) { 0.5 } else { -0.5 };
                diag += spec.e[s - 1] * z;
                if s < n {
                    let z2 = if site_is_up(p, s + 1, n) { 0.5 } else { -0.5 };
                    diag += 4.0 * spec.f[s - 1] * z * z2;
                }
            }
            h[(i, i)] = c64(diag, 0.0);
            for s in 1..n {
                if site_is_up(p, s, n) && !site_is_up(p, s + 1, n) {
                    let q = p ^ ((1 << (n - s)) | (1 << (n - s - 1)));
                    let j = basis.lookup[q].1 as usize;
                    let amp = c64(2.0 * spec.j[s - 1], 2.0 * spec.k[s - 1]);
                    h[(i, j)] = amp;
                    h[(j, i)] = amp.conj();
                }
            }
        }
        out.push(h);
    }
    out
}

/// Cached eigendecompositions of the block Hamiltonians; evaluates
/// `exp(-i H_n tau)` per block on demand.
#[derive(Debug, Clone)]
pub(crate) struct BlockSpectra {
    pub eigenvalues: Vec<DVector<f64>>,
    pub eigenvectors: Vec<CMatrix>,
}

impl BlockSpectra {
    pub fn new(blocks: &[CMatrix]) -> Self {
        let mut eigenvalues = Vec::with_capacity(blocks.len());
        let mut eigenvectors = Vec::with_capacity(blocks.len());
        for h in blocks {
            if h.nrows() <= 1 {
                eigenvalues.push(DVector::from_iterator(h.nrows(), h.diagonal().iter().map(|z| z.re)));
                eigenvectors.push(CMatrix::identity(h.nrows(), h.nrows()));
            } else {
                let (vals, vecs) = crate::linalg::hermitian_eigen(h);
                eigenvalues.push(vals);
                eigenvectors.push(vecs);
            }
        }
        Self { eigenvalues, eigenvectors }
    }

    pub fn unitaries(&self, tau: f64) -> Vec<CMatrix> {
        self.eigenvalues
            .iter()
            .zip(&self.eigenvectors)
            .map(|(lam, v)| {
                if v.nrows() <= 1 {
                    return CMatrix::from_fn(v.nrows(), v.nrows(), |i, _| {
                        c64(0.0, -lam[i] * tau).exp()
                    });
                }
                let phases = CMatrix::from_diagonal(&lam.map(|l| c64(0.0, -l * tau).exp()));
                v * phases * v.adjoint()
            })
            .collect()
    }
}

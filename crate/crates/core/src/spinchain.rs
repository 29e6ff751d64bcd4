//! Spin-chain Hamiltonians, magnetization operators and excitation-number blocks.
//!
//! Basis convention, fixed once and relied on everywhere downstream:
//! sites are labelled `1..=N`, site 1 is the most significant bit of the basis
//! label and a label bit of 1 means spin up. Matrix row/column `p` encodes the
//! *down*-mask of the configuration: site `i` is down iff bit `N - i` of `p` is
//! set, so `p = 0` is the all-up state and the basis runs
//! `|11..1>, |11..10>, ..., |00..0>`. Spin operators are the Pauli matrices
//! over 2, giving `S^Z |1> = +1/2 |1>`.

use crate::{c64, CMatrix, Error, Result};
use serde::{Deserialize, Serialize};

/// Hard cap on dense full-space work: 2^12 = 4096 dimensional Hilbert space.
pub const DENSE_SITE_CAP: usize = 12;

/// Parameters of a magnetization-preserving chain of `N` spin-1/2 sites:
/// local gaps `E_i`, exchange couplings `J_i`, antisymmetric exchange
/// couplings `K_i` and Ising couplings `F_i` (bond `i` joins sites `i`
/// and `i+1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub n: usize,
    pub e: Vec<f64>,
    pub j: Vec<f64>,
    pub k: Vec<f64>,
    pub f: Vec<f64>,
}

impl ChainSpec {
    pub fn new(e: Vec<f64>, j: Vec<f64>, k: Vec<f64>, f: Vec<f64>) -> Result<Self> {
        let n = e.len();
        if n < 2 {
            return Err(Error::InvalidSpec(format!("need at least 2 sites, got {n}")));
        }
        for (name, v, want) in [("J", &j, n - 1), ("K", &k, n - 1), ("F", &f, n - 1)] {
            if v.len() != want {
                return Err(Error::InvalidSpec(format!(
                    "{name} has length {}, expected {want}",
                    v.len()
                )));
            }
        }
        if e.iter().chain(&j).chain(&k).chain(&f).any(|x| !x.is_finite()) {
            return Err(Error::InvalidSpec("non-finite parameter".into()));
        }
        Ok(Self { n, e, j, k, f })
    }

    /// Uniform-exchange chain: `J_i = j`, `K_i = F_i = 0`, explicit local gaps.
    pub fn exchange_chain(e: Vec<f64>, j: f64) -> Result<Self> {
        let n = e.len();
        Ok(Self::new(e, vec![j; n.saturating_sub(1)], vec![0.0; n - 1], vec![0.0; n - 1])?)
    }

    /// Local gap of site A (site 1).
    pub fn e_first(&self) -> f64 {
        self.e[0]
    }

    /// Local gap of site B (site N).
    pub fn e_last(&self) -> f64 {
        self.e[self.n - 1]
    }

    /// True when every bond carries an exchange part (`|J_i| + |K_i| > 0`),
    /// the condition under which the zero-temperature cycle channel mixes.
    pub fn all_bonds_exchange_coupled(&self) -> bool {
        self.j
            .iter()
            .zip(&self.k)
            .all(|(j, k)| j.abs() + k.abs() > 0.0)
    }
}

/// Two-site Hamiltonian parameters with counter-rotating terms that break
/// longitudinal-magnetization conservation whenever `(K_R, K_I) != 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoSymPairSpec {
    pub e1: f64,
    pub e2: f64,
    pub j_r: f64,
    pub j_i: f64,
    pub k_r: f64,
    pub k_i: f64,
    pub f: f64,
}

impl NoSymPairSpec {
    pub fn new(e1: f64, e2: f64, j_r: f64, j_i: f64, k_r: f64, k_i: f64, f: f64) -> Result<Self> {
        if ![e1, e2, j_r, j_i, k_r, k_i, f].iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidSpec("non-finite parameter".into()));
        }
        Ok(Self { e1, e2, j_r, j_i, k_r, k_i, f })
    }
}

/// Dense Hermitian operator on the full chain, in the basis documented at the
/// top of this module.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    pub matrix: CMatrix,
    pub site_count: usize,
}

impl Hamiltonian {
    pub fn dim(&self) -> usize {
        1 << self.site_count
    }

    /// Wrap a raw matrix, checking Hermiticity to 1e-12 in max norm.
    pub fn from_matrix(matrix: CMatrix, site_count: usize) -> Result<Self> {
        let dim = 1usize << site_count;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{}, expected {dim}x{dim}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let dev = hermiticity_deviation(&matrix);
        if dev > 1e-12 {
            return Err(Error::InvalidState(format!(
                "Hamiltonian deviates from Hermiticity by {dev:e}"
            )));
        }
        Ok(Self { matrix, site_count })
    }

    /// Max-norm of `[self, sum of S_i^Z over all sites]`.
    pub fn magnetization_commutator_norm(&self) -> f64 {
        let sz = magnetization_operator(&(1..=self.site_count).collect::<Vec<_>>(), self.site_count)
            .expect("full-chain magnetization");
        let comm = &self.matrix * &sz.matrix - &sz.matrix * &self.matrix;
        comm.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

pub(crate) fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Is site `site` (1-indexed) up in basis position `p` of an `n`-site register?
#[inline]
pub(crate) fn site_is_up(p: usize, site: usize, n: usize) -> bool {
    (p >> (n - site)) & 1 == 0
}

/// Number of up spins in basis position `p` of an `n`-site register.
#[inline]
pub(crate) fn up_count(p: usize, n: usize) -> usize {
    n - (p & ((1 << n) - 1)).count_ones() as usize
}

fn check_site_cap(n: usize) -> Result<()> {
    if n > DENSE_SITE_CAP {
        return Err(Error::DimensionOverflow {
            requested: n,
            max_sites: DENSE_SITE_CAP,
            dim: 1usize << n,
        });
    }
    Ok(())
}

/// Build the full-chain Hamiltonian
/// `H = sum_i E_i S_i^Z + sum_i 4 J_i (S^X S^X + S^Y S^Y)
///    + sum_i 4 K_i (S^X S^Y - S^Y S^X) + sum_i 4 F_i S^Z S^Z`.
///
/// The exchange terms give the flip-flop matrix element
/// `<..10..|H|..01..> = 2 (J_i + i K_i)`; every term commutes with the total
/// magnetization, exactly, by construction.
pub fn build_hamiltonian(spec: &ChainSpec) -> Result<Hamiltonian> {
    check_site_cap(spec.n)?;
    let n = spec.n;
    let dim = 1usize << n;
    let mut h = CMatrix::zeros(dim, dim);
    for p in 0..dim {
        let mut diag = 0.0;
        for i in 1..=n {
            let s_i = if site_is_up(p, i, n) { 0.5 } else { -0.5 };
            diag += spec.e[i - 1] * s_i;
            if i < n {
                let s_next = if site_is_up(p, i + 1, n) { 0.5 } else { -0.5 };
                diag += 4.0 * spec.f[i - 1] * s_i * s_next;
            }
        }
        h[(p, p)] = c64(diag, 0.0);
        for i in 1..n {
            // hop on bond i: |..1_i 0_{i+1}..> <..0_i 1_{i+1}..|
            if site_is_up(p, i, n) && !site_is_up(p, i + 1, n) {
                let q = p ^ ((1 << (n - i)) | (1 << (n - i - 1)));
                let amp = c64(2.0 * spec.j[i - 1], 2.0 * spec.k[i - 1]);
                h[(p, q)] = amp;
                h[(q, p)] = amp.conj();
            }
        }
    }
    Ok(Hamiltonian { matrix: h, site_count: n })
}

/// Build the two-site Hamiltonian with counter-rotating terms
/// `4 K_R (S^X S^X - S^Y S^Y) - 4 K_I (S^X S^Y + S^Y S^X)` on top of the
/// flip-flop pair `(J_R, J_I)` and the single-factor Ising term `F S^Z S^Z`.
///
/// Matrix elements: `<10|H|01> = 2 (J_R + i J_I)` and
/// `<11|H|00> = 2 (K_R + i K_I)`; the latter breaks magnetization
/// conservation whenever it is nonzero.
pub fn build_nosym_hamiltonian(spec: &NoSymPairSpec) -> Result<Hamiltonian> {
    let sum = spec.e1 + spec.e2;
    let diff = spec.e1 - spec.e2;
    let mut h = CMatrix::zeros(4, 4);
    h[(0, 0)] = c64(sum / 2.0 + spec.f / 4.0, 0.0);
    h[(1, 1)] = c64(diff / 2.0 - spec.f / 4.0, 0.0);
    h[(2, 2)] = c64(-diff / 2.0 - spec.f / 4.0, 0.0);
    h[(3, 3)] = c64(-sum / 2.0 + spec.f / 4.0, 0.0);
    h[(1, 2)] = c64(2.0 * spec.j_r, 2.0 * spec.j_i);
    h[(2, 1)] = h[(1, 2)].conj();
    h[(0, 3)] = c64(2.0 * spec.k_r, 2.0 * spec.k_i);
    h[(3, 0)] = h[(0, 3)].conj();
    Ok(Hamiltonian { matrix: h, site_count: 2 })
}

/// Diagonal observable `sum_{i in sites} S_i^Z` on the full `n`-site register.
pub fn magnetization_operator(sites: &[usize], n: usize) -> Result<Hamiltonian> {
    check_site_cap(n)?;
    for &s in sites {
        if s == 0 || s > n {
            return Err(Error::SiteOutOfRange { site: s, n });
        }
    }
    let dim = 1usize << n;
    let mut m = CMatrix::zeros(dim, dim);
    for p in 0..dim {
        let mut z = 0.0;
        for &s in sites {
            z += if site_is_up(p, s, n) { 0.5 } else { -0.5 };
        }
        m[(p, p)] = c64(z, 0.0);
    }
    Ok(Hamiltonian { matrix: m, site_count: n })
}

/// Partition of a `|D|`-site register's basis by the number of up spins in `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct MagnetizationBlocks {
    /// Site labels of the register, ascending.
    pub sites: Vec<usize>,
    /// `blocks[n]` lists the register basis positions with exactly `n` up
    /// spins, in ascending position order; block `n` has size `C(|D|, n)`.
    pub blocks: Vec<Vec<usize>>,
}

impl MagnetizationBlocks {
    pub fn register_size(&self) -> usize {
        self.sites.len()
    }
}

/// Excitation-number block structure for the subsystem made of `sites`
/// (a subset of `1..=n`), over that subsystem's own `2^|sites|` basis.
pub fn excitation_blocks(sites: &[usize], n: usize) -> Result<MagnetizationBlocks> {
    for &s in sites {
        if s == 0 || s > n {
            return Err(Error::SiteOutOfRange { site: s, n });
        }
    }
    let mut sorted = sites.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let k = sorted.len();
    let mut blocks = vec![Vec::new(); k + 1];
    for p in 0..(1usize << k) {
        blocks[up_count(p, k)].push(p);
    }
    Ok(MagnetizationBlocks { sites: sorted, blocks })
}

/// Up/down populations of the single-site Gibbs state `e^{-beta E S^Z} / Z`.
/// `beta = +inf` selects the ground state (`|0>` for `E > 0`, `|1>` for
/// `E < 0`, maximally mixed at `E = 0`).
pub fn gibbs_populations(e_site: f64, beta: f64) -> (f64, f64) {
    if beta.is_infinite() {
        return if e_site > 0.0 {
            (0.0, 1.0)
        } else if e_site < 0.0 {
            (1.0, 0.0)
        } else {
            (0.5, 0.5)
        };
    }
    // p_up / p_down = e^{-beta E}; evaluate the stable way around.
    let x = beta * e_site;
    if x >= 0.0 {
        let r = (-x).exp();
        (r / (1.0 + r), 1.0 / (1.0 + r))
    } else {
        let r = x.exp();
        (1.0 / (1.0 + r), r / (1.0 + r))
    }
}

/// Single-site Gibbs state as a 2x2 density matrix on `site`,
/// `diag(e^{-beta E/2}, e^{+beta E/2}) / Z` in the basis `(|1>, |0>)`.
pub fn local_gibbs(site: usize, e_site: f64, beta: f64) -> crate::quantumstate::DensityMatrix {
    let (p_up, p_down) = gibbs_populations(e_site, beta);
    let mut m = CMatrix::zeros(2, 2);
    m[(0, 0)] = c64(p_up, 0.0);
    m[(1, 1)] = c64(p_down, 0.0);
    crate::quantumstate::DensityMatrix::from_parts_unchecked(m, vec![site])
}

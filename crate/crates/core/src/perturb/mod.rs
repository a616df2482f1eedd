//! Degenerate perturbation theory for the harmonic pair interaction.
//!
//! With the interaction switched off, both models reduce to independent
//! particles whose degenerate levels are spanned by Slater determinants. The
//! interaction, restricted to such a level, is a small real symmetric matrix
//! whose eigenvectors are the zero-coupling limits of the true eigenstates;
//! their entanglement is evaluated exactly in the finite orbital basis.
//!
//! The pair interaction is a sum of products of one-body operators
//! (`(x_i - x_j)^2` expands into `x^2` terms and `-x_i x_j`), so every
//! Slater-Condon matrix element reduces to one-body integrals, which are
//! computed by Gauss-Hermite quadrature and cross-checked against the
//! analytic oscillator ladder values in the tests.
//!
//! Within a degenerate eigenvalue cluster the eigenbasis is conventional.
//! Two conventions are provided: the stored eigenvectors are orthonormal
//! (canonical-basis projections, Gram-Schmidt in basis order), while
//! [`eigenstate_entanglements`] reports the entanglement of the
//! echelon-convention null-space representatives, which is the basis a
//! computer-algebra eigenvector routine prints and the one the reference
//! entanglement multisets refer to.

pub mod haar;

pub use haar::{entanglement_distribution, haar_sample, ChunkStats, HaarStats, HAAR_STREAMS};

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{fit_scale_shift, rref_nullspace, sym_eigen, Mat, ScaleShiftFit};
use crate::math;
use crate::quadrature::gauss_hermite;
use crate::special::{assoc_laguerre, ho_wavefunction_1d};
use crate::Spin;

/// Eigenvalues closer than this are treated as one degenerate cluster.
pub const CLUSTER_GAP: f64 = 1e-9;

/// Relative tolerance on the shared unperturbed energy of a basis.
const DEGENERACY_TOL: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Orbitals and determinants
// ---------------------------------------------------------------------------

/// A single-particle basis state with a definite spin projection.
pub trait SpinOrbital: Copy + Eq + Ord + core::fmt::Debug {
    fn spin(&self) -> Spin;
}

/// 1D oscillator spin-orbital `|n, sigma>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct OrbitalIndex1D {
    pub n: u32,
    pub spin: Spin,
}

impl OrbitalIndex1D {
    pub fn new(n: u32, spin: Spin) -> Self {
        OrbitalIndex1D { n, spin }
    }
}

impl SpinOrbital for OrbitalIndex1D {
    fn spin(&self) -> Spin {
        self.spin
    }
}

/// 3D trap-plus-field spin-orbital `|nu, m, n, sigma>`: 2D oscillator radial
/// and angular numbers in the plane, 1D oscillator number along z.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Orbital2e {
    pub nu: u32,
    pub m: i32,
    pub n: u32,
    pub spin: Spin,
}

impl Orbital2e {
    pub fn new(nu: u32, m: i32, n: u32, spin: Spin) -> Self {
        Orbital2e { nu, m, n, spin }
    }

    /// Ordering key: planar level `2 nu + |m|`, then z quanta, then radial
    /// index, then decreasing angular momentum, then spin.
    fn key(&self) -> (u32, u32, u32, i64, u8) {
        (
            2 * self.nu + self.m.unsigned_abs(),
            self.n,
            self.nu,
            -(self.m as i64),
            match self.spin {
                Spin::Up => 0,
                Spin::Down => 1,
            },
        )
    }
}

impl Ord for Orbital2e {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for Orbital2e {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl SpinOrbital for Orbital2e {
    fn spin(&self) -> Spin {
        self.spin
    }
}

/// An antisymmetrized product of distinct spin-orbitals, stored in the
/// canonical (sorted) order that fixes its sign convention.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlaterDeterminant<O: SpinOrbital> {
    orbitals: Vec<O>,
}

impl<O: SpinOrbital> SlaterDeterminant<O> {
    /// Sorts the orbitals into canonical order; returns the determinant and
    /// the sign of the sorting permutation. Repeated orbitals are rejected.
    pub fn new(mut orbitals: Vec<O>) -> Result<(Self, f64)> {
        // Insertion sort, counting transpositions.
        let mut swaps = 0usize;
        for i in 1..orbitals.len() {
            let mut j = i;
            while j > 0 && orbitals[j] < orbitals[j - 1] {
                orbitals.swap(j, j - 1);
                swaps += 1;
                j -= 1;
            }
        }
        for w in orbitals.windows(2) {
            if w[0] == w[1] {
                return Err(Error::Domain(format!(
                    "repeated orbital {:?} violates antisymmetry",
                    w[0]
                )));
            }
        }
        let sign = if swaps % 2 == 0 { 1.0 } else { -1.0 };
        Ok((SlaterDeterminant { orbitals }, sign))
    }

    pub fn orbitals(&self) -> &[O] {
        &self.orbitals
    }

    pub fn len(&self) -> usize {
        self.orbitals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbitals.is_empty()
    }

    pub fn total_sz(&self) -> f64 {
        self.orbitals.iter().map(|o| o.spin().sz()).sum()
    }

    pub fn contains(&self, o: &O) -> bool {
        self.orbitals.contains(o)
    }
}

// ---------------------------------------------------------------------------
// Slater-Condon matrix elements
// ---------------------------------------------------------------------------

type Vec3c = [Complex64; 3];

fn cdot(a: &Vec3c, b: &Vec3c) -> Complex64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// `<D1| sum_i t(i) - sum_{i<j} s(i) . s(j) |D2>` for sorted determinants.
fn slater_condon<O: SpinOrbital>(
    d1: &SlaterDeterminant<O>,
    d2: &SlaterDeterminant<O>,
    t: &impl Fn(&O, &O) -> Complex64,
    s: &impl Fn(&O, &O) -> Vec3c,
) -> Complex64 {
    let a1 = d1.orbitals();
    let a2 = d2.orbitals();
    debug_assert_eq!(a1.len(), a2.len());
    let diff1: Vec<(usize, O)> = a1
        .iter()
        .enumerate()
        .filter(|(_, o)| !a2.contains(o))
        .map(|(i, o)| (i, *o))
        .collect();
    let diff2: Vec<(usize, O)> = a2
        .iter()
        .enumerate()
        .filter(|(_, o)| !a1.contains(o))
        .map(|(i, o)| (i, *o))
        .collect();
    debug_assert_eq!(diff1.len(), diff2.len());
    let zero = Complex64::new(0.0, 0.0);

    match diff1.len() {
        0 => {
            let mut acc = zero;
            for (i, a) in a1.iter().enumerate() {
                acc += t(a, a);
                for b in a1.iter().skip(i + 1) {
                    acc -= cdot(&s(a, a), &s(b, b)) - cdot(&s(a, b), &s(b, a));
                }
            }
            acc
        }
        1 => {
            let (pa, a) = diff1[0];
            let (pc, c) = diff2[0];
            let sign = if (pa + pc) % 2 == 0 { 1.0 } else { -1.0 };
            let mut acc = t(&a, &c);
            for b in a1.iter() {
                if *b == a {
                    continue;
                }
                acc -= cdot(&s(&a, &c), &s(b, b)) - cdot(&s(&a, b), &s(b, &c));
            }
            acc * sign
        }
        2 => {
            let (pa, a) = diff1[0];
            let (pb, b) = diff1[1];
            let (pc, c) = diff2[0];
            let (pd, d) = diff2[1];
            let sign = if (pa + pb + pc + pd) % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            -(cdot(&s(&a, &c), &s(&b, &d)) - cdot(&s(&a, &d), &s(&b, &c))) * sign
        }
        _ => zero,
    }
}

// ---------------------------------------------------------------------------
// Level enumeration
// ---------------------------------------------------------------------------

/// Canonical ordering of the determinants within one degenerate level:
/// fewer distinct spatial orbitals first, then lower maximal spatial level,
/// then the spatial list lexicographically, then the spin pattern (up before
/// down).
fn canonical_det_order_1d(dets: &mut [SlaterDeterminant<OrbitalIndex1D>]) {
    dets.sort_by_key(|d| {
        let ns: Vec<u32> = d.orbitals().iter().map(|o| o.n).collect();
        let mut distinct = ns.clone();
        distinct.dedup();
        let spins: Vec<u8> = d
            .orbitals()
            .iter()
            .map(|o| match o.spin {
                Spin::Up => 0u8,
                Spin::Down => 1,
            })
            .collect();
        (distinct.len(), *ns.last().unwrap(), ns, spins)
    });
}

/// Which degenerate level of the non-interacting three-electron problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Excitation {
    First,
    Second,
}

/// All Slater determinants of the requested degenerate level of three
/// non-interacting oscillators (total quanta 2 or 3), in canonical order.
///
/// The first excited level is four-fold degenerate, the second ten-fold;
/// both span every total spin projection.
pub fn enumerate_level_3e(excitation: Excitation) -> Vec<SlaterDeterminant<OrbitalIndex1D>> {
    let target = match excitation {
        Excitation::First => 2u32,
        Excitation::Second => 3,
    };
    let mut pool = Vec::new();
    for n in 0..=target {
        pool.push(OrbitalIndex1D::new(n, Spin::Up));
        pool.push(OrbitalIndex1D::new(n, Spin::Down));
    }
    pool.sort();
    let mut dets = Vec::new();
    for i in 0..pool.len() {
        for j in i + 1..pool.len() {
            for k in j + 1..pool.len() {
                if pool[i].n + pool[j].n + pool[k].n == target {
                    let (det, _) = SlaterDeterminant::new(vec![pool[i], pool[j], pool[k]]).unwrap();
                    dets.push(det);
                }
            }
        }
    }
    canonical_det_order_1d(&mut dets);
    dets
}

/// The eight-determinant degenerate level of the two-electron problem with
/// two planar quanta and total angular momentum zero: the pairs
/// `{(0,+1,0), (0,-1,0)}` and `{(0,0,0), (1,0,0)}` over all spin patterns.
///
/// The two groups stay degenerate at every field strength (the Larmor shifts
/// cancel within each pair), which is what makes this the block whose
/// eigenvectors are the zero-coupling limits of the radially excited states.
pub fn level_2e_xy_excited() -> Vec<SlaterDeterminant<Orbital2e>> {
    let mut dets = Vec::new();
    let spins = [
        (Spin::Up, Spin::Up),
        (Spin::Up, Spin::Down),
        (Spin::Down, Spin::Up),
        (Spin::Down, Spin::Down),
    ];
    // Counter-rotating pair first (lower maximal planar level), then the
    // ground/radially-excited pair.
    for (s1, s2) in spins {
        let (det, _) = SlaterDeterminant::new(vec![
            Orbital2e::new(0, 1, 0, s1),
            Orbital2e::new(0, -1, 0, s2),
        ])
        .unwrap();
        dets.push(det);
    }
    for (s1, s2) in spins {
        let (det, _) = SlaterDeterminant::new(vec![
            Orbital2e::new(0, 0, 0, s1),
            Orbital2e::new(1, 0, 0, s2),
        ])
        .unwrap();
        dets.push(det);
    }
    dets
}

/// The four-determinant degenerate level with one z quantum:
/// `{(0,0,0), (0,0,1)}` over all spin patterns.
pub fn level_2e_z_excited() -> Vec<SlaterDeterminant<Orbital2e>> {
    let mut dets = Vec::new();
    let spins = [
        (Spin::Up, Spin::Up),
        (Spin::Up, Spin::Down),
        (Spin::Down, Spin::Up),
        (Spin::Down, Spin::Down),
    ];
    for (s1, s2) in spins {
        let (det, _) = SlaterDeterminant::new(vec![
            Orbital2e::new(0, 0, 0, s1),
            Orbital2e::new(0, 0, 1, s2),
        ])
        .unwrap();
        dets.push(det);
    }
    dets
}

// ---------------------------------------------------------------------------
// Perturbation blocks
// ---------------------------------------------------------------------------

/// A degenerate unperturbed level with its perturbation matrix diagonalized.
#[derive(Debug, Clone)]
pub struct DegenerateBlock {
    /// Shared unperturbed energy of the basis determinants.
    pub unperturbed_energy: f64,
    /// Real symmetric perturbation matrix in the basis order.
    pub matrix: Mat,
    /// Eigenvalues in ascending order.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors (columns, matching `eigenvalues`); within a
    /// degenerate cluster the basis is fixed by projecting the canonical
    /// basis vectors and orthonormalizing in order.
    pub eigenvectors: Mat,
    /// Half-open index ranges of eigenvalue clusters (gap below
    /// [`CLUSTER_GAP`]).
    pub clusters: Vec<(usize, usize)>,
}

fn cluster_ranges(eigenvalues: &[f64]) -> Vec<(usize, usize)> {
    let mut clusters = Vec::new();
    let mut start = 0;
    for i in 1..=eigenvalues.len() {
        if i == eigenvalues.len() || eigenvalues[i] - eigenvalues[i - 1] > CLUSTER_GAP {
            clusters.push((start, i));
            start = i;
        }
    }
    clusters
}

/// Replaces the eigenvector columns of each multi-dimensional cluster by the
/// Gram-Schmidt orthonormalization of the canonical basis projections, taken
/// in basis order. Deterministic regardless of what the eigensolver returned
/// inside the cluster.
fn canonicalize_clusters(vectors: &mut Mat, clusters: &[(usize, usize)]) {
    let m = vectors.rows();
    for &(lo, hi) in clusters {
        if hi - lo < 2 {
            continue;
        }
        // Projector onto the cluster space.
        let mut proj = Mat::zeros(m, m);
        for col in lo..hi {
            for i in 0..m {
                for j in 0..m {
                    proj[(i, j)] += vectors[(i, col)] * vectors[(j, col)];
                }
            }
        }
        let mut accepted: Vec<Vec<f64>> = Vec::new();
        for k in 0..m {
            if accepted.len() == hi - lo {
                break;
            }
            let mut w: Vec<f64> = (0..m).map(|i| proj[(i, k)]).collect();
            for prev in &accepted {
                let overlap = crate::linalg::dot(&w, prev);
                for i in 0..m {
                    w[i] -= overlap * prev[i];
                }
            }
            let norm = math::sqrt(crate::linalg::dot(&w, &w));
            if norm > 1e-6 {
                for x in &mut w {
                    *x /= norm;
                }
                accepted.push(w);
            }
        }
        debug_assert_eq!(accepted.len(), hi - lo);
        for (offset, v) in accepted.iter().enumerate() {
            for i in 0..m {
                vectors[(i, lo + offset)] = v[i];
            }
        }
    }
}

fn build_block_generic<O: SpinOrbital>(
    basis: &[SlaterDeterminant<O>],
    orbital_energy: &impl Fn(&O) -> f64,
    t: &impl Fn(&O, &O) -> Complex64,
    s: &impl Fn(&O, &O) -> Vec3c,
) -> Result<DegenerateBlock> {
    let m = basis.len();
    if m == 0 {
        return Err(Error::Domain("empty basis".into()));
    }
    let energies: Vec<f64> = basis
        .iter()
        .map(|d| d.orbitals().iter().map(orbital_energy).sum())
        .collect();
    let scale = math::abs(energies[0]).max(1.0);
    for i in 1..m {
        if math::abs(energies[i] - energies[0]) > DEGENERACY_TOL * scale {
            return Err(Error::DegeneracyViolation {
                index_a: 0,
                index_b: i,
                energy_a: energies[0],
                energy_b: energies[i],
            });
        }
    }

    let mut matrix = Mat::zeros(m, m);
    let mut worst_imag = 0.0;
    for i in 0..m {
        for j in i..m {
            let elem = slater_condon(&basis[i], &basis[j], t, s);
            worst_imag = math::max(worst_imag, math::abs(elem.im));
            matrix[(i, j)] = elem.re;
            matrix[(j, i)] = elem.re;
        }
    }
    if worst_imag > 1e-10 {
        return Err(Error::Domain(format!(
            "perturbation block has imaginary residue {worst_imag:.3e}"
        )));
    }

    let (eigenvalues, mut eigenvectors) = sym_eigen(&matrix);
    let clusters = cluster_ranges(&eigenvalues);
    canonicalize_clusters(&mut eigenvectors, &clusters);
    Ok(DegenerateBlock {
        unperturbed_energy: energies[0],
        matrix,
        eigenvalues,
        eigenvectors,
        clusters,
    })
}

/// Perturbation block of the three-electron harmonic pair interaction
/// `sum_i x_i^2 - sum_{i<j} x_i x_j` on a degenerate oscillator level.
pub fn build_block_3e(
    basis: &[SlaterDeterminant<OrbitalIndex1D>],
    omega: f64,
) -> Result<DegenerateBlock> {
    if omega.is_nan() || omega <= 0.0 {
        return Err(Error::Domain(format!(
            "trap frequency must be positive, got {omega}"
        )));
    }
    // One-body integrals over the oscillator orbitals by quadrature; the
    // integrands are polynomial x Gaussian matched to the rule, so these are
    // exact to rounding.
    let max_n = basis
        .iter()
        .flat_map(|d| d.orbitals().iter().map(|o| o.n))
        .max()
        .unwrap_or(0) as usize;
    let rule = gauss_hermite(2 * (max_n + 2), 1.0 / math::sqrt(omega))?;
    let beta = omega * omega;
    let dim = max_n + 1;
    let mut x_table = Mat::zeros(dim, dim);
    let mut x2_table = Mat::zeros(dim, dim);
    for a in 0..dim {
        for b in a..dim {
            let x = rule.integrate(|xx| {
                ho_wavefunction_1d(a as u32, beta, xx).unwrap()
                    * xx
                    * ho_wavefunction_1d(b as u32, beta, xx).unwrap()
            });
            let x2 = rule.integrate(|xx| {
                ho_wavefunction_1d(a as u32, beta, xx).unwrap()
                    * xx
                    * xx
                    * ho_wavefunction_1d(b as u32, beta, xx).unwrap()
            });
            x_table[(a, b)] = x;
            x_table[(b, a)] = x;
            x2_table[(a, b)] = x2;
            x2_table[(b, a)] = x2;
        }
    }

    let orbital_energy = |o: &OrbitalIndex1D| omega * (o.n as f64 + 0.5);
    let t = |a: &OrbitalIndex1D, b: &OrbitalIndex1D| {
        if a.spin == b.spin {
            Complex64::new(x2_table[(a.n as usize, b.n as usize)], 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    let s = |a: &OrbitalIndex1D, b: &OrbitalIndex1D| {
        let zero = Complex64::new(0.0, 0.0);
        if a.spin == b.spin {
            [
                Complex64::new(x_table[(a.n as usize, b.n as usize)], 0.0),
                zero,
                zero,
            ]
        } else {
            [zero, zero, zero]
        }
    };
    build_block_generic(basis, &orbital_energy, &t, &s)
}

/// 2D oscillator eigenfunction of frequency `freq` at Cartesian `(x, y)`,
/// with the angular factor written as `(x +- i y)^{|m|}` so the whole thing
/// is polynomial x Gaussian.
fn orbital_2d(nu: u32, m: i32, freq: f64, x: f64, y: f64) -> Complex64 {
    let abs_m = m.unsigned_abs();
    let rho_sq = freq * (x * x + y * y);
    let mut norm_ratio = 1.0; // nu! / (nu + |m|)!
    for k in (nu + 1)..=(nu + abs_m) {
        norm_ratio /= k as f64;
    }
    let radial = math::sqrt(2.0 * norm_ratio)
        * assoc_laguerre(nu, abs_m, rho_sq).unwrap()
        * math::exp(-0.5 * rho_sq);
    let angular = Complex64::new(x, if m >= 0 { y } else { -y }).powu(abs_m);
    let scale = math::sqrt(freq / (2.0 * core::f64::consts::PI))
        * math::powi(math::sqrt(freq), abs_m as i32);
    angular * radial * scale
}

/// Perturbation block of the two-electron harmonic pair interaction
/// `(r_1^2 + r_2^2)/2 - r_1 . r_2` on a degenerate level of the
/// trap-plus-field problem.
pub fn build_block_2e(
    basis: &[SlaterDeterminant<Orbital2e>],
    omega: f64,
    b: f64,
) -> Result<DegenerateBlock> {
    if omega.is_nan() || omega <= 0.0 {
        return Err(Error::Domain(format!(
            "trap frequency must be positive, got {omega}"
        )));
    }
    if b.is_nan() || b < 0.0 {
        return Err(Error::Domain(format!(
            "magnetic parameter must be non-negative, got {b}"
        )));
    }
    let freq_perp = math::sqrt(omega * omega + b * b);

    // Distinct planar and axial factors appearing in the basis.
    let mut planar: Vec<(u32, i32)> = Vec::new();
    let mut axial: Vec<u32> = Vec::new();
    for det in basis {
        for o in det.orbitals() {
            if !planar.contains(&(o.nu, o.m)) {
                planar.push((o.nu, o.m));
            }
            if !axial.contains(&o.n) {
                axial.push(o.n);
            }
        }
    }
    planar.sort();
    axial.sort();

    // Planar integrals <a| {1, x, y, rho^2} |b> on a tensor grid dilated to
    // the planar Gaussian envelope; exact for these polynomial integrands.
    let max_level = planar
        .iter()
        .map(|&(nu, m)| 2 * nu + m.unsigned_abs())
        .max()
        .unwrap_or(0);
    let rule = gauss_hermite(2 * (max_level as usize + 3), 1.0 / math::sqrt(freq_perp))?;
    let n_pts = rule.order();
    let np = planar.len();
    let mut p_overlap = vec![Complex64::new(0.0, 0.0); np * np];
    let mut p_x = p_overlap.clone();
    let mut p_y = p_overlap.clone();
    let mut p_rho2 = p_overlap.clone();
    for (ia, &(nu_a, m_a)) in planar.iter().enumerate() {
        for (ib, &(nu_b, m_b)) in planar.iter().enumerate() {
            let mut acc = [Complex64::new(0.0, 0.0); 4];
            for i in 0..n_pts {
                for j in 0..n_pts {
                    let (x, y) = (rule.point(i), rule.point(j));
                    let w = rule.weights()[i] * rule.weights()[j];
                    let pa = orbital_2d(nu_a, m_a, freq_perp, x, y).conj();
                    let pb = orbital_2d(nu_b, m_b, freq_perp, x, y);
                    let core_val = pa * pb * w;
                    acc[0] += core_val;
                    acc[1] += core_val * x;
                    acc[2] += core_val * y;
                    acc[3] += core_val * (x * x + y * y);
                }
            }
            p_overlap[ia * np + ib] = acc[0];
            p_x[ia * np + ib] = acc[1];
            p_y[ia * np + ib] = acc[2];
            p_rho2[ia * np + ib] = acc[3];
        }
    }

    // Axial integrals <n_a| {1, z, z^2} |n_b>.
    let max_n = *axial.iter().max().unwrap_or(&0) as usize;
    let z_rule = gauss_hermite(2 * (max_n + 2), 1.0 / math::sqrt(omega))?;
    let beta = omega * omega;
    let na = axial.len();
    let mut z_overlap = vec![0.0; na * na];
    let mut z_z = z_overlap.clone();
    let mut z_z2 = z_overlap.clone();
    for (ia, &n_a) in axial.iter().enumerate() {
        for (ib, &n_b) in axial.iter().enumerate() {
            let f = |pow: i32| {
                z_rule.integrate(|z| {
                    ho_wavefunction_1d(n_a, beta, z).unwrap()
                        * math::powi(z, pow)
                        * ho_wavefunction_1d(n_b, beta, z).unwrap()
                })
            };
            z_overlap[ia * na + ib] = f(0);
            z_z[ia * na + ib] = f(1);
            z_z2[ia * na + ib] = f(2);
        }
    }

    let p_idx = |o: &Orbital2e| planar.iter().position(|&p| p == (o.nu, o.m)).unwrap();
    let a_idx = |o: &Orbital2e| axial.iter().position(|&n| n == o.n).unwrap();

    let orbital_energy = |o: &Orbital2e| {
        freq_perp * (2.0 * o.nu as f64 + o.m.unsigned_abs() as f64 + 1.0)
            + b * o.m as f64
            + omega * (o.n as f64 + 0.5)
    };
    let zero = Complex64::new(0.0, 0.0);
    let t = |a: &Orbital2e, bb: &Orbital2e| {
        if a.spin != bb.spin {
            return zero;
        }
        let (pa, pb) = (p_idx(a), p_idx(bb));
        let (za, zb) = (a_idx(a), a_idx(bb));
        // <a| r^2/2 |b> = (<rho^2> <1>_z + <1>_2d <z^2>) / 2
        0.5 * (p_rho2[pa * np + pb] * z_overlap[za * na + zb]
            + p_overlap[pa * np + pb] * z_z2[za * na + zb])
    };
    let s = |a: &Orbital2e, bb: &Orbital2e| {
        if a.spin != bb.spin {
            return [zero, zero, zero];
        }
        let (pa, pb) = (p_idx(a), p_idx(bb));
        let (za, zb) = (a_idx(a), a_idx(bb));
        [
            p_x[pa * np + pb] * z_overlap[za * na + zb],
            p_y[pa * np + pb] * z_overlap[za * na + zb],
            p_overlap[pa * np + pb] * z_z[za * na + zb],
        ]
    };
    build_block_generic(basis, &orbital_energy, &t, &s)
}

// ---------------------------------------------------------------------------
// Finite-basis reduced density matrix and entanglement
// ---------------------------------------------------------------------------

/// One-particle reduced density matrix over the distinct spin-orbitals of a
/// determinant expansion; Hermitian with unit trace.
#[derive(Debug, Clone)]
pub struct FiniteRdm {
    pub dimension: usize,
    /// Row-major `dimension x dimension`.
    pub entries: Vec<Complex64>,
}

impl FiniteRdm {
    pub fn trace(&self) -> f64 {
        (0..self.dimension)
            .map(|i| self.entries[i * self.dimension + i].re)
            .sum()
    }

    /// `Tr[rho^2]` (real for Hermitian matrices).
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|e| e.norm_sqr()).sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0;
        for i in 0..self.dimension {
            for j in 0..self.dimension {
                let d = (self.entries[i * self.dimension + j]
                    - self.entries[j * self.dimension + i].conj())
                .norm_sqr();
                worst = math::max(worst, math::sqrt(d));
            }
        }
        worst
    }
}

/// Assembles the trace-one reduced density matrix of
/// `|Psi> = sum_D c_D |D>` over the distinct spin-orbitals of the basis.
pub fn finite_rdm<O: SpinOrbital>(
    coefficients: &[Complex64],
    basis: &[SlaterDeterminant<O>],
    particles: usize,
) -> Result<FiniteRdm> {
    if coefficients.len() != basis.len() {
        return Err(Error::Domain(format!(
            "coefficient count {} does not match basis size {}",
            coefficients.len(),
            basis.len()
        )));
    }
    let norm_sq: f64 = coefficients.iter().map(|c| c.norm_sqr()).sum();
    if math::abs(norm_sq - 1.0) > 1e-12 {
        return Err(Error::NotNormalized { norm_sq });
    }

    // Distinct orbitals in canonical order.
    let mut orbitals: Vec<O> = Vec::new();
    for det in basis {
        for o in det.orbitals() {
            if !orbitals.contains(o) {
                orbitals.push(*o);
            }
        }
    }
    orbitals.sort();
    let dim = orbitals.len();
    let orb_index = |o: &O| orbitals.iter().position(|x| x == o).unwrap();

    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for (di, det) in basis.iter().enumerate() {
        let c_d = coefficients[di];
        if c_d.norm_sqr() == 0.0 {
            continue;
        }
        for (pos_p, p) in det.orbitals().iter().enumerate() {
            let sign_p = if pos_p % 2 == 0 { 1.0 } else { -1.0 };
            // Annihilate p, then create q over all orbitals not left over.
            let mut reduced: Vec<O> = det.orbitals().to_vec();
            reduced.remove(pos_p);
            for (qi, q) in orbitals.iter().enumerate() {
                if reduced.contains(q) {
                    continue;
                }
                let ins = reduced.iter().take_while(|o| *o < q).count();
                let sign_q = if ins % 2 == 0 { 1.0 } else { -1.0 };
                let mut target = reduced.clone();
                target.insert(ins, *q);
                if let Some(ti) = basis.iter().position(|d| d.orbitals() == target.as_slice()) {
                    let pi = orb_index(p);
                    // gamma_pq = <Psi| a_q^dag a_p |Psi>
                    entries[pi * dim + qi] += coefficients[ti].conj() * c_d * sign_p * sign_q;
                }
            }
        }
    }
    let inv_n = 1.0 / particles as f64;
    for e in &mut entries {
        *e *= inv_n;
    }
    Ok(FiniteRdm {
        dimension: dim,
        entries,
    })
}

/// Linear-entropy entanglement `1 - N Tr[rho^2]` of a normalized determinant
/// expansion.
pub fn epsilon_finite<O: SpinOrbital>(
    coefficients: &[Complex64],
    basis: &[SlaterDeterminant<O>],
    particles: usize,
) -> Result<f64> {
    let rdm = finite_rdm(coefficients, basis, particles)?;
    Ok(1.0 - particles as f64 * rdm.purity())
}

/// Real-coefficient convenience wrapper around [`epsilon_finite`].
pub fn epsilon_finite_real<O: SpinOrbital>(
    coefficients: &[f64],
    basis: &[SlaterDeterminant<O>],
    particles: usize,
) -> Result<f64> {
    let c: Vec<Complex64> = coefficients
        .iter()
        .map(|&x| Complex64::new(x, 0.0))
        .collect();
    epsilon_finite(&c, basis, particles)
}

/// Entanglement of each perturbed eigenstate of a block, in eigenvalue
/// order.
///
/// Non-degenerate eigenvectors are used as they are. Inside a degenerate
/// cluster the representatives are the echelon-convention null-space basis
/// of `H - lambda I` (one vector per free column, not mutually orthogonal),
/// which is the conventional eigenvector choice the reference entanglement
/// values refer to.
pub fn eigenstate_entanglements<O: SpinOrbital>(
    block: &DegenerateBlock,
    basis: &[SlaterDeterminant<O>],
    particles: usize,
) -> Result<Vec<f64>> {
    let m = block.matrix.rows();
    let mut out = Vec::with_capacity(m);
    for &(lo, hi) in &block.clusters {
        if hi - lo == 1 {
            let v: Vec<f64> = (0..m).map(|i| block.eigenvectors[(i, lo)]).collect();
            out.push(epsilon_finite_real(&v, basis, particles)?);
            continue;
        }
        let lambda: f64 = block.eigenvalues[lo..hi].iter().sum::<f64>() / (hi - lo) as f64;
        let mut shifted = block.matrix.clone();
        for i in 0..m {
            shifted[(i, i)] -= lambda;
        }
        let tol = 1e-8 * shifted.max_abs().max(1.0);
        let null_basis = rref_nullspace(&shifted, tol);
        if null_basis.len() != hi - lo {
            return Err(Error::Domain(format!(
                "cluster at eigenvalue {lambda:.6} has nullity {} but multiplicity {}",
                null_basis.len(),
                hi - lo
            )));
        }
        for v in &null_basis {
            out.push(epsilon_finite_real(v, basis, particles)?);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Closed-form helpers for the four-determinant subspace
// ---------------------------------------------------------------------------

/// Entanglement of `sum_i c_i |psi_i>` over the four determinants of the
/// first excited three-electron level:
/// `eps = 1 - (2 (|c1|^2 + |c2|^2)^2 + 2 (|c3|^2 + |c4|^2)^2 + 1) / 3`.
///
/// The pair split follows the level's two orbital families; the value is
/// invariant under swapping the two pairs, so it applies in either basis
/// ordering convention.
pub fn epsilon_gen_ent(c: &[Complex64; 4]) -> Result<f64> {
    let norm_sq: f64 = c.iter().map(|x| x.norm_sqr()).sum();
    if math::abs(norm_sq - 1.0) > 1e-12 {
        return Err(Error::NotNormalized { norm_sq });
    }
    let s = c[0].norm_sqr() + c[1].norm_sqr();
    let t = c[2].norm_sqr() + c[3].norm_sqr();
    Ok(1.0 - (2.0 * s * s + 2.0 * t * t + 1.0) / 3.0)
}

/// Entanglement of the degenerate mixture `p |v> + sqrt(1-p^2) |w>` of a
/// second-level eigenstate pair: `eps(p) = (4/147) p^2 (8 p^2 + 7)`.
pub fn epsilon_mixture(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!(
            "mixture weight must lie in [0, 1], got {p}"
        )));
    }
    // Single final division keeps the endpoint p = 1 exactly at 20/49.
    Ok(4.0 * p * p * (8.0 * p * p + 7.0) / 147.0)
}

/// Upper bound `1 - N / m` on the linear-entropy entanglement of an
/// N-fermion state supported on `m` distinct orbitals.
pub fn epsilon_upper_bound(particles: usize, orbitals: usize) -> Result<f64> {
    if orbitals < particles {
        return Err(Error::PauliBound {
            particles,
            orbitals,
        });
    }
    Ok(1.0 - particles as f64 / orbitals as f64)
}

// ---------------------------------------------------------------------------
// Reference blocks
// ---------------------------------------------------------------------------

/// Published perturbation-block structures used as cross-check fixtures.
pub mod reference {
    use super::*;

    /// First excited three-electron level, canonical determinant order.
    pub fn block_3e_first() -> Mat {
        let r = 1.0 / math::sqrt(2.0);
        let rows = [
            [4.0, 0.0, r, 0.0],
            [0.0, 4.0, 0.0, r],
            [r, 0.0, 3.5, 0.0],
            [0.0, r, 0.0, 3.5],
        ];
        Mat::from_fn(4, 4, |i, j| rows[i][j])
    }

    /// Second excited three-electron level.
    pub fn block_3e_second() -> Mat {
        let h = math::sqrt(3.0) / 2.0;
        let rows = [
            [4.5, 0.0, 0.0, 0.0, -h, 0.0, h, 0.0, 0.0, 0.0],
            [0.0, 4.5, 0.0, 0.0, 0.0, -h, 0.0, h, 0.0, 0.0],
            [0.0, 0.0, 6.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 5.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            [-h, 0.0, 0.0, 1.0, 4.5, 0.0, 0.5, 0.0, 0.0, 0.0],
            [0.0, -h, 0.0, 0.0, 0.0, 5.5, 0.0, 0.5, 0.0, 0.0],
            [h, 0.0, 0.0, 0.0, 0.5, 0.0, 5.5, 0.0, 0.0, 0.0],
            [0.0, h, 0.0, 0.0, 0.0, 0.5, 0.0, 4.5, 1.0, 0.0],
            [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 5.0, 0.0],
            [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 6.0],
        ];
        Mat::from_fn(10, 10, |i, j| rows[i][j])
    }

    /// Uniform diagonal of the planar-excitation block,
    /// `c1 = 1/(2 omega) + 2/sqrt(b^2 + omega^2)`.
    pub fn c1_xy(omega: f64, b: f64) -> f64 {
        0.5 / omega + 2.0 / math::sqrt(b * b + omega * omega)
    }

    /// Planar-excitation block template: uniform diagonal `c1`, one coupling
    /// magnitude `c2` linking the opposite-spin determinants of the two
    /// orbital pairs with an alternating sign pattern.
    pub fn block_2e_xy(c1: f64, c2: f64) -> Mat {
        let mut m = Mat::zeros(8, 8);
        for i in 0..8 {
            m[(i, i)] = c1;
        }
        for (i, j, v) in [(1, 5, c2), (1, 6, -c2), (2, 5, -c2), (2, 6, c2)] {
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
        m
    }

    /// `d1 = 1/omega + 1/sqrt(b^2 + omega^2)` of the axial-excitation block.
    pub fn d1_z(omega: f64, b: f64) -> f64 {
        1.0 / omega + 1.0 / math::sqrt(b * b + omega * omega)
    }

    /// `d2 = 1/(2 omega)` of the axial-excitation block.
    pub fn d2_z(omega: f64) -> f64 {
        0.5 / omega
    }

    /// Axial-excitation block: aligned-spin determinants sit at `d1 + d2`,
    /// the opposite-spin pair at `d1` coupled by `d2`.
    pub fn block_2e_z(d1: f64, d2: f64) -> Mat {
        let mut m = Mat::zeros(4, 4);
        m[(0, 0)] = d1 + d2;
        m[(3, 3)] = d1 + d2;
        m[(1, 1)] = d1;
        m[(2, 2)] = d1;
        m[(1, 2)] = d2;
        m[(2, 1)] = d2;
        m
    }
}

/// Fits `computed ~= scale * reference + shift * I` and reports the
/// Frobenius residual.
pub fn fit_block(computed: &Mat, reference: &Mat) -> ScaleShiftFit {
    fit_scale_shift(computed, reference)
}

/// Like [`fit_block`] but allowing a simultaneous row/column permutation of
/// the computed matrix; returns the best permutation (mapping reference
/// positions to computed indices) and its fit.
pub fn fit_block_permuted(computed: &Mat, reference: &Mat) -> (Vec<usize>, ScaleShiftFit) {
    let m = reference.rows();
    debug_assert_eq!(computed.rows(), m);

    // Initial scale/shift estimate from the sorted diagonals.
    let mut cd: Vec<f64> = (0..m).map(|i| computed[(i, i)]).collect();
    let mut rd: Vec<f64> = (0..m).map(|i| reference[(i, i)]).collect();
    cd.sort_by(|a, b| a.partial_cmp(b).unwrap());
    rd.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (mc, mr) = (mean(&cd), mean(&rd));
    let var: f64 = rd.iter().map(|x| (x - mr) * (x - mr)).sum();
    let cov: f64 = rd.iter().zip(&cd).map(|(r, c)| (r - mr) * (c - mc)).sum();
    let scale0 = if var > 1e-12 { cov / var } else { 1.0 };
    let shift0 = mc - scale0 * mr;

    // Candidates per reference position: computed indices whose diagonal
    // matches after the estimated affine map.
    let diag_tol = 1e-6 * (1.0 + reference.max_abs());
    let candidates: Vec<Vec<usize>> = (0..m)
        .map(|r| {
            (0..m)
                .filter(|&c| {
                    math::abs(computed[(c, c)] - (scale0 * reference[(r, r)] + shift0)) < diag_tol
                })
                .collect()
        })
        .collect();

    let mut best: Option<(Vec<usize>, ScaleShiftFit)> = None;
    let mut perm = vec![usize::MAX; m];
    let mut used = vec![false; m];
    #[allow(clippy::too_many_arguments)]
    fn dfs(
        pos: usize,
        m: usize,
        candidates: &[Vec<usize>],
        computed: &Mat,
        reference: &Mat,
        perm: &mut Vec<usize>,
        used: &mut Vec<bool>,
        best: &mut Option<(Vec<usize>, ScaleShiftFit)>,
    ) {
        if pos == m {
            let permuted = Mat::from_fn(m, m, |i, j| computed[(perm[i], perm[j])]);
            let fit = fit_scale_shift(&permuted, reference);
            if best
                .as_ref()
                .map_or(true, |(_, f)| fit.residual < f.residual)
            {
                *best = Some((perm.clone(), fit));
            }
            return;
        }
        for &c in &candidates[pos] {
            if !used[c] {
                used[c] = true;
                perm[pos] = c;
                dfs(
                    pos + 1,
                    m,
                    candidates,
                    computed,
                    reference,
                    perm,
                    used,
                    best,
                );
                used[c] = false;
            }
        }
    }
    dfs(
        0,
        m,
        &candidates,
        computed,
        reference,
        &mut perm,
        &mut used,
        &mut best,
    );
    best.unwrap_or_else(|| {
        let identity: Vec<usize> = (0..m).collect();
        (identity, fit_scale_shift(computed, reference))
    })
}

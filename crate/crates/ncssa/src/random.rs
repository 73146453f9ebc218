//! Seeded random instances: states, unitaries, isometries, channels.
//!
//! Randomness is deterministic per seed (ChaCha8). Haar unitaries come from
//! the QR decomposition of a complex Ginibre matrix with the phases of the R
//! diagonal absorbed into Q, which makes the distribution exactly Haar rather
//! than QR-convention dependent.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::{AlgElement, Algebra};
use crate::channel::{self, Channel};
use crate::error::{Error, Result};
use crate::linalg::{C64, CMat, cplx};

/// The crate-wide seeded generator.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex Ginibre matrix with iid standard complex Gaussian entries.
pub fn ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        cplx(re, im) * C64::from(std::f64::consts::FRAC_1_SQRT_2)
    })
}

/// Haar-distributed unitary on `ℂ^d`.
pub fn haar_unitary(d: usize, rng: &mut impl Rng) -> CMat {
    let g = ginibre(d, d, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    // Fix the gauge: multiply each column of Q by the phase of the matching
    // R diagonal entry so the distribution is Haar.
    for i in 0..d {
        let rii = r[(i, i)];
        let phase = if rii.norm() > 0.0 { rii / rii.norm() } else { C64::from(1.0) };
        let mut col = q.column_mut(i);
        col *= phase;
    }
    q
}

/// Haar-distributed isometry `ℂ^din → ℂ^dout`, requiring `dout ≥ din`.
pub fn haar_isometry(dout: usize, din: usize, rng: &mut impl Rng) -> Result<CMat> {
    if dout < din {
        return Err(Error::input(format!(
            "isometry needs dout ≥ din, got {dout} < {din}"
        )));
    }
    let u = haar_unitary(dout, rng);
    Ok(u.columns(0, din).into_owned())
}

/// Ginibre-induced random density matrix of full rank on `M_d`.
pub fn ginibre_state(alg: &Algebra, rng: &mut impl Rng) -> Result<AlgElement> {
    ginibre_state_ranked(alg, None, rng)
}

/// Ginibre-induced density matrix with a chosen rank parameter per block.
pub fn ginibre_state_ranked(
    alg: &Algebra,
    rank: Option<usize>,
    rng: &mut impl Rng,
) -> Result<AlgElement> {
    let mut blocks = Vec::with_capacity(alg.num_blocks());
    for b in alg.blocks() {
        let k = rank.unwrap_or(b.dim).min(b.dim).max(1);
        let g = ginibre(b.dim, k, rng);
        blocks.push(&g * g.adjoint());
    }
    let x = alg.element(blocks)?;
    x.normalized_state()
}

/// Random Hermitian element with Gaussian entries (GUE-style).
pub fn gue_element(alg: &Algebra, rng: &mut impl Rng) -> Result<AlgElement> {
    let mut blocks = Vec::with_capacity(alg.num_blocks());
    for b in alg.blocks() {
        let g = ginibre(b.dim, b.dim, rng);
        blocks.push((&g + g.adjoint()).scale(0.5));
    }
    alg.element(blocks)
}

/// Random CPTP channel `M_din → M_dout` from a Haar Stinespring isometry.
///
/// `env_dim` controls the Kraus rank; the isometry `V: ℂ^din → ℂ^dout ⊗ ℂ^env`
/// gives `Φ(x) = tr_env(V x V*)`.
pub fn stinespring_channel(
    din: usize,
    dout: usize,
    env_dim: usize,
    rng: &mut impl Rng,
) -> Result<Channel> {
    if dout * env_dim < din {
        return Err(Error::input(format!(
            "Stinespring dilation needs dout·env ≥ din, got {dout}·{env_dim} < {din}"
        )));
    }
    let v = haar_isometry(dout * env_dim, din, rng)?;
    // Kraus operators are the environment slices of the isometry:
    // K_e[i, j] = V[(i, e), j] with the output index varying over i.
    let kraus: Vec<CMat> = (0..env_dim)
        .map(|e| {
            DMatrix::from_fn(dout, din, |i, j| v[(i * env_dim + e, j)])
        })
        .collect();
    let input = Algebra::full(din);
    let output = Algebra::full(dout);
    let ch = Channel::from_kraus(input, output, &kraus)?;
    debug_assert!(ch.is_cptp());
    Ok(ch)
}

/// Random unitary conjugation channel on `M_d`.
pub fn random_unitary_channel(d: usize, rng: &mut impl Rng) -> Result<Channel> {
    let u = haar_unitary(d, rng);
    let alg = Algebra::full(d);
    Channel::from_kraus(alg.clone(), alg, &[u])
}

/// Random projective measurement (dephasing into a Haar-random basis).
pub fn random_basis_povm(d: usize, rng: &mut impl Rng) -> Result<channel::Povm> {
    let u = haar_unitary(d, rng);
    channel::Povm::from_basis(&u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{self};

    #[test]
    fn haar_unitary_is_unitary_and_seed_deterministic() {
        let mut rng = seeded_rng(7);
        let u = haar_unitary(4, &mut rng);
        let defect = (u.adjoint() * &u - linalg::eye(4))
            .iter()
            .map(|e| e.norm())
            .fold(0.0, f64::max);
        assert!(defect < 1e-12, "unitarity defect {defect}");
        let mut rng2 = seeded_rng(7);
        let u2 = haar_unitary(4, &mut rng2);
        assert_eq!(u, u2);
        let mut rng3 = seeded_rng(8);
        let u3 = haar_unitary(4, &mut rng3);
        assert!((u - u3).iter().map(|e| e.norm()).fold(0.0, f64::max) > 1e-3);
    }

    #[test]
    fn ginibre_state_is_a_density_matrix() {
        let alg = Algebra::full(3);
        let mut rng = seeded_rng(42);
        let rho = ginibre_state(&alg, &mut rng).unwrap();
        assert!((rho.trace_re() - 1.0).abs() < 1e-12);
        assert!(rho.is_psd(1e-12).unwrap());
        assert!(rho.min_eigenvalue().unwrap() > 0.0, "full-rank Ginibre state");
    }

    #[test]
    fn ranked_state_has_requested_rank() {
        let alg = Algebra::full(4);
        let mut rng = seeded_rng(5);
        let rho = ginibre_state_ranked(&alg, Some(2), &mut rng).unwrap();
        let (vals, _) = linalg::herm_eigen(rho.block(0)).unwrap();
        let rank = vals.iter().filter(|&&v| v > 1e-12).count();
        assert_eq!(rank, 2);
    }

    #[test]
    fn stinespring_channel_is_cptp() {
        let mut rng = seeded_rng(11);
        let ch = stinespring_channel(3, 2, 4, &mut rng).unwrap();
        assert!(ch.is_cptp());
        let alg = Algebra::full(3);
        let rho = ginibre_state(&alg, &mut rng).unwrap();
        let out = ch.apply(&rho).unwrap();
        assert!((out.trace_re() - 1.0).abs() < 1e-12);
        assert!(out.is_psd(1e-10).unwrap());
    }

    #[test]
    fn unitary_channel_preserves_spectrum() {
        let mut rng = seeded_rng(3);
        let ch = random_unitary_channel(3, &mut rng).unwrap();
        let alg = Algebra::full(3);
        let rho = ginibre_state(&alg, &mut rng).unwrap();
        let out = ch.apply(&rho).unwrap();
        let s1: Vec<f64> = rho.weighted_spectrum().unwrap().iter().map(|p| p.0).collect();
        let s2: Vec<f64> = out.weighted_spectrum().unwrap().iter().map(|p| p.0).collect();
        for (a, b) in s1.iter().zip(&s2) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

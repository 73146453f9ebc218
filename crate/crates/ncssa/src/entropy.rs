//! Entropies with respect to weighted traces.
//!
//! All logarithms are natural. For an algebra with trace
//! `τ(x) = Σ_k w_k tr(x_k)` the entropy of a state is
//! `H(ρ) = −τ(ρ ln ρ) = −Σ_k w_k Σ_i λ_{k,i} ln λ_{k,i}` over block
//! eigenvalues, zeros skipped. Relative entropy returns `+∞` when the
//! support condition fails; the support cutoff is relative to the largest
//! eigenvalue of the second argument.

use crate::algebra::AlgElement;
use crate::channel::{ptrace_left, ptrace_right};
use crate::error::{Error, Result};
use crate::linalg::{self, DEFAULT_SUPPORT_TOL};

/// Absolute eigenvalue floor below which a state's eigenvalue counts as zero.
///
/// States are validated to `ρ ⪰ −1e-10`; eigenvalues in `(-1e-10, cutoff)`
/// are clamped to zero rather than fed to the logarithm.
const EIG_FLOOR: f64 = 1e-14;

fn check_positive(x: &AlgElement) -> Result<()> {
    let defect = x.herm_defect();
    if defect > 1e-10 {
        return Err(Error::NotHermitian { defect });
    }
    let min = x.min_eigenvalue()?;
    if min < -1e-10 {
        return Err(Error::NotPositive { min_eig: min });
    }
    Ok(())
}

/// `H(ρ) = −τ(ρ ln ρ)` for a positive element.
pub fn von_neumann_entropy(rho: &AlgElement) -> Result<f64> {
    check_positive(rho)?;
    let mut h = 0.0;
    for (lam, w) in rho.weighted_spectrum()? {
        if lam > EIG_FLOOR {
            h -= w * lam * lam.ln();
        }
    }
    Ok(h)
}

/// `H(A|B) = H(ρ_AB) − H(ρ_B)` on a full block of dimension `da·db`.
pub fn conditional_entropy(rho_ab: &AlgElement, da: usize, db: usize) -> Result<f64> {
    let m = rho_ab.as_single_block()?;
    if m.nrows() != da * db {
        return Err(Error::shape(format!(
            "state has dimension {}, split asks for {da}·{db}",
            m.nrows()
        )));
    }
    let w = rho_ab.algebra().blocks()[0].weight;
    if (w - 1.0).abs() > 1e-14 {
        return Err(Error::Unsupported(
            "conditional entropy uses the plain matrix trace (weight 1)".into(),
        ));
    }
    let rho_b = crate::algebra::Algebra::full(db).element(vec![ptrace_left(m, da, db)])?;
    Ok(von_neumann_entropy(rho_ab)? - von_neumann_entropy(&rho_b)?)
}

/// `H(B|A)` for the same split, conditioning on the left factor.
pub fn conditional_entropy_on_left(rho_ab: &AlgElement, da: usize, db: usize) -> Result<f64> {
    let m = rho_ab.as_single_block()?;
    let rho_a = crate::algebra::Algebra::full(da).element(vec![ptrace_right(m, da, db)])?;
    Ok(von_neumann_entropy(rho_ab)? - von_neumann_entropy(&rho_a)?)
}

/// `D(ρ‖σ) = τ(ρ ln ρ − ρ ln σ)`, `+∞` when `supp ρ ⊄ supp σ`.
pub fn relative_entropy(rho: &AlgElement, sigma: &AlgElement) -> Result<f64> {
    relative_entropy_with_tol(rho, sigma, DEFAULT_SUPPORT_TOL)
}

/// [`relative_entropy`] with an explicit support cutoff.
pub fn relative_entropy_with_tol(
    rho: &AlgElement,
    sigma: &AlgElement,
    support_tol: f64,
) -> Result<f64> {
    check_positive(rho)?;
    check_positive(sigma)?;
    if rho.algebra() != sigma.algebra() {
        return Err(Error::shape("relative entropy needs elements of one algebra"));
    }

    let cutoff = support_tol * sigma.max_eigenvalue()?.max(1e-300);
    let rho_scale = rho.max_eigenvalue()?.max(1.0);
    let mut d = 0.0;
    for (k, (rb, sb)) in rho.blocks().iter().zip(sigma.blocks()).enumerate() {
        let w = rho.algebra().blocks()[k].weight;
        // tr(ρ ln ρ) over this block.
        let (rvals, _) = linalg::herm_eigen(rb)?;
        let mut tr_rho_ln_rho = 0.0;
        for &lam in &rvals {
            if lam > EIG_FLOOR {
                tr_rho_ln_rho += lam * lam.ln();
            }
        }
        // tr(ρ ln σ) through the spectral decomposition of σ restricted to
        // its support; mass of ρ on the kernel of σ means +∞.
        let (svals, svecs) = linalg::herm_eigen(sb)?;
        let mut tr_rho_ln_sig = 0.0;
        let mut kernel_mass = 0.0;
        for (i, &s) in svals.iter().enumerate() {
            let v = svecs.column(i);
            let rho_vv = (v.adjoint() * rb * v)[(0, 0)].re;
            if s > cutoff {
                tr_rho_ln_sig += rho_vv * s.ln();
            } else {
                kernel_mass += rho_vv.max(0.0);
            }
        }
        if kernel_mass > support_tol * rho_scale {
            return Ok(f64::INFINITY);
        }
        d += w * (tr_rho_ln_rho - tr_rho_ln_sig);
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Algebra, Block};
    use crate::inclusion::Inclusion;
    use crate::linalg::{C64, CMat, cplx};
    use crate::random;

    fn diag_state(probs: &[f64]) -> AlgElement {
        let d = probs.len();
        let alg = Algebra::full(d);
        let mut x = alg.zero();
        for (i, &p) in probs.iter().enumerate() {
            x.block_mut(0)[(i, i)] = C64::from(p);
        }
        x
    }

    #[test]
    fn pure_state_has_zero_entropy() {
        assert!(von_neumann_entropy(&diag_state(&[1.0, 0.0])).unwrap().abs() < 1e-14);
    }

    #[test]
    fn maximally_mixed_has_log_d() {
        for d in [2usize, 3, 5] {
            let rho = Algebra::full(d).identity().scale_re(1.0 / d as f64);
            let h = von_neumann_entropy(&rho).unwrap();
            assert!((h - (d as f64).ln()).abs() < 1e-13);
        }
    }

    #[test]
    fn binary_entropy_matches_scalar_oracle() {
        // −(0.25 ln 0.25 + 0.75 ln 0.75), computed independently.
        let expect = -(0.25f64 * 0.25f64.ln() + 0.75 * 0.75f64.ln());
        let h = von_neumann_entropy(&diag_state(&[0.25, 0.75])).unwrap();
        assert!((h - expect).abs() < 1e-14);
        assert!((h - 0.5623351446188083).abs() < 1e-13);
    }

    #[test]
    fn entropy_is_additive_over_tensor_products() {
        let mut rng = random::seeded_rng(9);
        let a = random::ginibre_state(&Algebra::full(2), &mut rng).unwrap();
        let b = random::ginibre_state(&Algebra::full(3), &mut rng).unwrap();
        let ab = a.tensor(&b).unwrap();
        let h = von_neumann_entropy(&ab).unwrap();
        let ha = von_neumann_entropy(&a).unwrap();
        let hb = von_neumann_entropy(&b).unwrap();
        assert!((h - ha - hb).abs() < 1e-11);
    }

    #[test]
    fn weighted_trace_entropy_respects_weights() {
        // Induced trivial subalgebra of M₄: state 1/4 under τ(1) = 4 has
        // entropy ln 4, matching the maximally mixed ambient state.
        let alg = Algebra::new(vec![Block { dim: 1, weight: 4.0 }]).unwrap();
        let mut s = alg.zero();
        s.block_mut(0)[(0, 0)] = C64::from(0.25);
        let h = von_neumann_entropy(&s).unwrap();
        assert!((h - 4.0f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn conditional_entropy_of_maximally_entangled_is_negative_log_d() {
        let alg = Algebra::full(4);
        let mut bell = CMat::zeros(4, 4);
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            bell[(i, j)] = C64::from(0.5);
        }
        let rho = alg.element(vec![bell]).unwrap();
        let h = conditional_entropy(&rho, 2, 2).unwrap();
        assert!((h + 2.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn conditional_entropy_of_product_recovers_marginal_entropy() {
        let mut rng = random::seeded_rng(21);
        let a = random::ginibre_state(&Algebra::full(2), &mut rng).unwrap();
        let b = random::ginibre_state(&Algebra::full(2), &mut rng).unwrap();
        let ab = a.tensor(&b).unwrap();
        let h = conditional_entropy(&ab, 2, 2).unwrap();
        assert!((h - von_neumann_entropy(&a).unwrap()).abs() < 1e-11);
    }

    #[test]
    fn relative_entropy_vanishes_on_equal_states() {
        let mut rng = random::seeded_rng(33);
        let rho = random::ginibre_state(&Algebra::full(3), &mut rng).unwrap();
        assert!(relative_entropy(&rho, &rho).unwrap().abs() < 1e-12);
    }

    #[test]
    fn relative_entropy_to_maximally_mixed() {
        // D(ρ‖1/d) = ln d − H(ρ).
        let mut rng = random::seeded_rng(17);
        let rho = random::ginibre_state(&Algebra::full(3), &mut rng).unwrap();
        let mm = Algebra::full(3).identity().scale_re(1.0 / 3.0);
        let d = relative_entropy(&rho, &mm).unwrap();
        let h = von_neumann_entropy(&rho).unwrap();
        assert!((d - (3.0f64.ln() - h)).abs() < 1e-11);
    }

    #[test]
    fn relative_entropy_detects_support_violation() {
        let rho = diag_state(&[0.5, 0.5]);
        let sigma = diag_state(&[1.0, 0.0]);
        assert_eq!(relative_entropy(&rho, &sigma).unwrap(), f64::INFINITY);
        // Contained support is fine even when σ is rank-deficient.
        let rho2 = diag_state(&[1.0, 0.0]);
        let sigma2 = diag_state(&[1.0, 0.0]);
        assert!(relative_entropy(&rho2, &sigma2).unwrap().abs() < 1e-12);
    }

    #[test]
    fn relative_entropy_matches_classical_kl_on_diagonals() {
        let p = [0.1, 0.2, 0.7];
        let q = [0.3, 0.3, 0.4];
        let kl: f64 = p.iter().zip(&q).map(|(&a, &b): (&f64, &f64)| a * (a / b).ln()).sum();
        let d = relative_entropy(&diag_state(&p), &diag_state(&q)).unwrap();
        assert!((d - kl).abs() < 1e-13);
    }

    #[test]
    fn chain_rule_through_conditional_expectation() {
        // D(ρ‖σ) = D(ρ‖ιE_N(ρ)) + D(ιE_N(ρ)‖σ) for induced-trace inclusions
        // and σ in the image of ι with E_N-invariance.
        let mut rng = random::seeded_rng(55);
        let inc = Inclusion::diagonal(3).unwrap();
        let m = Algebra::full(3);
        let rho = random::ginibre_state(&m, &mut rng).unwrap();
        let sigma_n = random::ginibre_state(inc.sub(), &mut rng).unwrap();
        let sigma = inc.embed().apply(&sigma_n).unwrap();
        let e_rho = inc.embed().apply(&inc.cond_exp().apply(&rho).unwrap()).unwrap();
        let lhs = relative_entropy(&rho, &sigma).unwrap();
        let rhs = relative_entropy(&rho, &e_rho).unwrap() + relative_entropy(&e_rho, &sigma).unwrap();
        assert!((lhs - rhs).abs() < 1e-10, "chain rule defect {}", (lhs - rhs).abs());
    }

    #[test]
    fn rejects_non_positive_inputs() {
        let alg = Algebra::full(2);
        let mut x = alg.zero();
        x.block_mut(0)[(0, 0)] = C64::from(1.5);
        x.block_mut(0)[(1, 1)] = C64::from(-0.5);
        assert!(von_neumann_entropy(&x).is_err());
        let mut y = alg.zero();
        y.block_mut(0)[(0, 1)] = cplx(1.0, 0.0);
        assert!(von_neumann_entropy(&y).is_err());
    }
}

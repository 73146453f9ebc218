//! Log-barrier solver for trace minimization under operator domination.
//!
//! The primal problem is
//!
//! ```text
//! minimize  τ_N(Z)   over Hermitian Z ∈ N
//! subject to  G(Z) ⪰ x
//! ```
//!
//! for a Hermiticity-preserving linear map `G: N → M` with `G(1_N) ≻ 0` and a
//! Hermitian target `x ∈ M`. Its Lagrange dual is
//!
//! ```text
//! maximize  τ_M(a x)   over a ⪰ 0 with G†(a) = 1_N,
//! ```
//!
//! which is how conditional-expectation constrained suprema enter: with
//! `G = ι` the dual constraint is `E_N(a) = 1`, and with `G` the adjoint of a
//! conditional expectation it is `E(a) = 1`.
//!
//! Both sides are solved by standard path following on `t·(linear) − Σ_k ln
//! det` over an affine family of block matrices, with Newton steps in
//! Hermitian coordinates. The reported bounds come from the feasible iterates
//! themselves: the primal iterate `Z` (slack kept strictly positive by the
//! line search) upper-bounds the value, the dual iterate `a` (kept positive,
//! with `G†(a) = 1_N` restored exactly through a right inverse of `G†`)
//! lower-bounds it. No reported quantity involves inverting the nearly
//! singular slack at the end of the path, so the certified gap is limited by
//! the path target, not by the conditioning of the active constraints.

use nalgebra::DMatrix;

use crate::algebra::{AlgElement, Algebra};
use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::inclusion::Inclusion;
use crate::linalg::{self, C64};

#[derive(Clone, Debug)]
pub struct BarrierOptions {
    /// Path target per side; certified gaps land near twice this value.
    pub gap_tol: f64,
    /// Geometric growth factor of the barrier parameter.
    pub mu: f64,
    /// Newton iteration cap per barrier stage.
    pub max_newton: usize,
    /// Barrier stage cap.
    pub max_outer: usize,
}

impl Default for BarrierOptions {
    fn default() -> Self {
        BarrierOptions { gap_tol: 1e-9, mu: 20.0, max_newton: 50, max_outer: 40 }
    }
}

#[derive(Clone, Debug)]
pub struct DominationResult {
    /// Primal objective `τ_N(Z)` at the feasible minimizer (upper bound).
    pub value: f64,
    /// Primal iterate in `N`, feasible: `G(minimizer) ⪰ x`.
    pub minimizer: AlgElement,
    /// Dual iterate in `M`: positive with `G†(witness) = 1_N`.
    pub witness: AlgElement,
    /// Dual objective `τ_M(witness · x)` (certified lower bound).
    pub witness_value: f64,
    /// `value − witness_value`, nonnegative up to evaluation roundoff.
    pub gap: f64,
    pub newton_steps: usize,
    pub converged: bool,
}

/// Right-inverse data for the dual constraint map.
///
/// `g_dagger: M → N` is the pairing adjoint of the domination map and
/// `lift: N → M` satisfies `g_dagger ∘ lift = id_N` with `lift(1_N) ≻ 0`.
/// The lift pins the dual iterate to the constraint slice exactly.
#[derive(Clone, Debug)]
pub struct DualTemplate {
    g_dagger: Channel,
    lift: Channel,
}

impl DualTemplate {
    /// Builds the template from the constraint adjoint and any positive
    /// section of it (for an inclusion, the subalgebra embedding). The lift
    /// is `section ∘ (g_dagger ∘ section)⁻¹`, so only invertibility of
    /// `g_dagger ∘ section` is required, not that the section itself is a
    /// right inverse.
    pub fn new(g_dagger: &Channel, section: &Channel) -> Result<Self> {
        if section.input() != g_dagger.output() || section.output() != g_dagger.input() {
            return Err(Error::shape("dual section must map N back into M"));
        }
        let n_alg = g_dagger.output().clone();
        let through = g_dagger.compose(section)?;
        let inv = through
            .coord()
            .clone()
            .lu()
            .try_inverse()
            .ok_or_else(|| Error::Solver("constraint map has no right inverse on N".into()))?;
        let lift = section.compose(&Channel::from_coord(n_alg.clone(), n_alg.clone(), inv)?)?;
        // Spot-check the section identity on the Hermitian basis.
        let mut defect = 0.0_f64;
        for b in n_alg.herm_basis() {
            let round = g_dagger.apply(&lift.apply(&b)?)?;
            defect = defect.max(round.sub(&b)?.max_abs_diff(&n_alg.zero())?);
        }
        if defect > 1e-8 {
            return Err(Error::Solver(format!(
                "dual lift fails the section identity (defect {defect:.3e})"
            )));
        }
        Ok(DualTemplate { g_dagger: g_dagger.clone(), lift })
    }

    pub fn g_dagger(&self) -> &Channel {
        &self.g_dagger
    }

    pub fn lift(&self) -> &Channel {
        &self.lift
    }
}

/// Affine family `offset + Σ_j u_j dirs_j` inside one algebra, with a linear
/// objective in the coordinates `u`.
struct AffineSlice {
    offset: AlgElement,
    dirs: Vec<AlgElement>,
    obj: Vec<f64>,
}

impl AffineSlice {
    fn point(&self, u: &[f64]) -> Result<AlgElement> {
        let mut acc = self.offset.clone();
        for (c, d) in u.iter().zip(&self.dirs) {
            acc = acc.add(&d.scale_re(*c))?;
        }
        Ok(acc)
    }

    fn objective(&self, u: &[f64]) -> f64 {
        self.obj.iter().zip(u).map(|(c, v)| c * v).sum()
    }
}

/// Solves `min { τ_N(Z) : G(Z) ⪰ x }` and certifies the value with a dual
/// feasible witness.
pub fn min_trace_dominating(
    g: &Channel,
    x: &AlgElement,
    dual: &DualTemplate,
    opts: &BarrierOptions,
) -> Result<DominationResult> {
    let n_alg = g.input().clone();
    let m_alg = g.output().clone();
    if x.algebra() != &m_alg {
        return Err(Error::shape("domination target must live in the map's output algebra"));
    }
    if x.herm_defect() > 1e-9 {
        return Err(Error::NotHermitian { defect: x.herm_defect() });
    }
    if !g.flags().herm_preserving {
        return Err(Error::InvalidChannel("domination map must preserve Hermitian elements".into()));
    }
    if dual.g_dagger.input() != &m_alg || dual.g_dagger.output() != &n_alg {
        return Err(Error::shape("dual template does not match the domination map"));
    }

    // Primal slice: S(u) = G(Z(u)) − x over the Hermitian basis of N.
    let basis = n_alg.herm_basis();
    let g_basis: Vec<AlgElement> = basis.iter().map(|b| g.apply(b)).collect::<Result<Vec<_>>>()?;
    let obj: Vec<f64> = basis.iter().map(|b| b.trace_re()).collect();

    let g_one = g.apply(&n_alg.identity())?;
    let g_one_min = g_one.min_eigenvalue()?;
    if g_one_min <= 1e-12 {
        return Err(Error::Solver(format!(
            "G(1) is not positive definite (min eig {g_one_min:.3e}); no interior point"
        )));
    }
    let g_half_inv = g_one.herm_power(C64::from(-0.5), 1e-14)?;
    let pinched = g_half_inv.mul(x)?.mul(&g_half_inv)?.hermitize();
    let lam_start = {
        let lam0 = pinched.max_eigenvalue()?;
        lam0 + 0.5 * lam0.abs().max(1.0)
    };
    let one = n_alg.identity();
    let u0: Vec<f64> = basis.iter().map(|b| frob_re(b, &one) * lam_start).collect();

    // Interior dual start a₀ = lift(1_N), needed both for the dual slice and
    // for repairing witness candidates harvested along the primal path.
    let a0 = dual.lift.apply(&one)?.hermitize();
    let a0_min = a0.min_eigenvalue()?;
    if a0_min <= 1e-12 {
        return Err(Error::Solver(format!(
            "dual start lift(1) is not positive definite (min eig {a0_min:.3e})"
        )));
    }
    let start_defect = dual.g_dagger.apply(&a0)?.sub(&one)?.max_abs_diff(&n_alg.zero())?;
    if start_defect > 1e-7 {
        return Err(Error::Solver(format!(
            "dual start violates the constraint by {start_defect:.3e}"
        )));
    }

    // Each primal stage end yields a dual candidate: at barrier parameter t
    // the scaled inverse slack S^{-1}/t is positive with G†(S^{-1}/t) = 1 up
    // to the centering residual, which the lift absorbs exactly. Keeping the
    // best pairing over the path rides out late stages where roundoff in the
    // gradient (growing with t) stops the centering short, and rescues
    // instances where the dual barrier itself stalls near the cone boundary.
    let primal_slice = AffineSlice { offset: x.scale_re(-1.0), dirs: g_basis, obj };
    let mut best_cand: Option<(AlgElement, f64)> = None;
    let (u_p, steps_p, conv_p) =
        barrier_minimize(&primal_slice, u0, &m_alg, opts, |u, t| {
            let slack = primal_slice.point(u)?;
            if let Some((cand, cv)) = central_witness(&slack, t, x, &one, dual, &a0, a0_min)? {
                if best_cand.as_ref().map_or(true, |(_, b)| cv > *b) {
                    best_cand = Some((cand, cv));
                }
            }
            Ok(())
        })?;
    let minimizer = {
        let mut acc = n_alg.zero();
        for (c, b) in u_p.iter().zip(&basis) {
            acc = acc.add(&b.scale_re(*c))?;
        }
        acc
    };
    let value = minimizer.trace_re();
    let final_slack = primal_slice.point(&u_p)?;
    if final_slack.min_eigenvalue()? < -1e-10 {
        return Err(Error::Solver("primal iterate left the feasible cone".into()));
    }

    // Dual slice: a(u) = a₀ + Σ u_j F_j with {F_j} an orthonormal basis of
    // ker G† among Hermitian elements of M.
    let kernel = herm_kernel_basis(&dual.g_dagger)?;
    let dual_obj = kernel
        .iter()
        .map(|f| f.mul(x).map(|p| -p.trace_re()))
        .collect::<Result<Vec<f64>>>()?;
    let dual_slice = AffineSlice { offset: a0.clone(), dirs: kernel, obj: dual_obj };
    let u0_d = vec![0.0; dual_slice.dirs.len()];
    let (u_d, steps_d, conv_d) =
        barrier_minimize(&dual_slice, u0_d, &m_alg, opts, |_, _| Ok(()))?;
    let mut witness = dual_slice.point(&u_d)?.hermitize();

    // Restore the constraint exactly through the lift, then repair any
    // roundoff negativity by blending toward the interior start (both
    // endpoints satisfy the constraint, so any blend does).
    let resid = one.sub(&dual.g_dagger.apply(&witness)?)?.hermitize();
    witness = witness.add(&dual.lift.apply(&resid)?)?.hermitize();
    let w_min = witness.min_eigenvalue()?;
    if w_min < 0.0 {
        let theta = (1.0 + 1e-6) * (-w_min) / ((-w_min) + a0_min);
        if !(0.0..1.0).contains(&theta) {
            return Err(Error::Solver("dual iterate irreparably left the cone".into()));
        }
        witness = witness.scale_re(1.0 - theta).add(&a0.scale_re(theta))?;
    }
    let mut witness_value = witness.mul(x)?.trace_re();

    if let Some((cand, cand_value)) = best_cand {
        if cand_value > witness_value {
            witness = cand;
            witness_value = cand_value;
        }
    }

    let gap = value - witness_value;
    if !gap.is_finite() || gap < -1e-7 * (1.0 + value.abs()) {
        return Err(Error::Solver(format!("inconsistent duality gap {gap:.3e}")));
    }

    Ok(DominationResult {
        value,
        minimizer,
        witness,
        witness_value,
        gap,
        newton_steps: steps_p + steps_d,
        converged: conv_p && conv_d,
    })
}

/// Path following on `t·⟨obj,u⟩ − Σ_k ln det S_k(u)` for the slice, starting
/// from the strictly feasible `u0`. Returns the final coordinates, the total
/// Newton step count, and whether the path target was reached.
fn barrier_minimize(
    slice: &AffineSlice,
    mut u: Vec<f64>,
    ambient: &Algebra,
    opts: &BarrierOptions,
    mut stage_hook: impl FnMut(&[f64], f64) -> Result<()>,
) -> Result<(Vec<f64>, usize, bool)> {
    let start = slice.point(&u)?;
    if start.min_eigenvalue()? <= 0.0 {
        return Err(Error::Solver("barrier start is not strictly feasible".into()));
    }
    let nu = ambient.rep_dim() as f64;
    let t_final = nu / (0.25 * opts.gap_tol);
    let obj0 = slice.objective(&u).abs();
    let mut t = 1.0_f64.max(nu / (1.0 + obj0));
    let mut steps = 0usize;
    let mut converged = false;
    for _ in 0..opts.max_outer {
        steps += newton_stage(slice, &mut u, t, opts.max_newton)?;
        stage_hook(&u, t)?;
        if slice.objective(&u) < -1e12 * (1.0 + obj0) {
            return Err(Error::Solver("objective is unbounded below".into()));
        }
        if t >= t_final {
            converged = true;
            break;
        }
        t = (t * opts.mu).min(t_final);
    }
    Ok((u, steps, converged))
}

fn newton_stage(slice: &AffineSlice, u: &mut Vec<f64>, t: f64, max_iter: usize) -> Result<usize> {
    let n = slice.dirs.len();
    if n == 0 {
        return Ok(0);
    }
    let mut steps = 0usize;
    for _ in 0..max_iter {
        let s = slice.point(u)?;
        let w_blocks = s
            .blocks()
            .iter()
            .map(|sb| linalg::herm_power(sb, C64::from(-0.5), 1e-14))
            .collect::<Result<Vec<_>>>()?;
        // T_j = S^{-1/2} A_j S^{-1/2} per block.
        let t_mats: Vec<Vec<_>> = slice
            .dirs
            .iter()
            .map(|d| {
                d.blocks()
                    .iter()
                    .zip(&w_blocks)
                    .map(|(db, wb)| wb * db * wb)
                    .collect::<Vec<_>>()
            })
            .collect();

        let mut grad = vec![0.0; n];
        for j in 0..n {
            let tr: f64 = t_mats[j].iter().map(|m| m.trace().re).sum();
            grad[j] = t * slice.obj[j] - tr;
        }
        let mut hess = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = 0.0;
                for (mi, mj) in t_mats[i].iter().zip(&t_mats[j]) {
                    acc += (mi * mj).trace().re;
                }
                hess[(i, j)] = acc;
                hess[(j, i)] = acc;
            }
        }

        // Jacobi-equilibrated Newton system. Near a rank-deficient optimal
        // face the Hessian condition grows like t², so a plain solve can
        // return a non-descent direction; the ridge then escalates until a
        // step passes the line search. Heavily damped steps degrade toward
        // scaled gradient descent but keep the stage moving.
        let scal: Vec<f64> =
            (0..n).map(|j| hess[(j, j)].sqrt().max(1e-150).recip()).collect();
        let mut hs = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                hs[(i, j)] = hess[(i, j)] * scal[i] * scal[j];
            }
        }
        let rhs_s =
            DMatrix::<f64>::from_iterator(n, 1, grad.iter().zip(&scal).map(|(v, s)| -v * s));

        let mut accepted = false;
        let mut decrement2 = f64::NAN;
        for ridge in [0.0, 1e-12, 1e-8, 1e-4, 1e-2] {
            let sys = if ridge == 0.0 {
                hs.clone()
            } else {
                &hs + DMatrix::<f64>::identity(n, n) * ridge
            };
            let Some(ch) = sys.cholesky() else { continue };
            let dv = ch.solve(&rhs_s);
            let du: Vec<f64> = dv.column(0).iter().zip(&scal).map(|(v, s)| v * s).collect();
            let dec2: f64 = grad.iter().zip(&du).map(|(g, d)| -g * d).sum();
            if decrement2.is_nan() {
                decrement2 = dec2;
            }
            if !(dec2 > 1e-18) {
                break;
            }

            // Barrier change along the step in step-local form,
            //   Δf(s) = t·s·⟨obj,du⟩ − Σ_i ln(1 + s·λ_i),
            // with λ_i the eigenvalues of S^{-1/2}·ΔS·S^{-1/2}. Evaluating
            // the two barrier values separately loses the change to roundoff
            // once t·⟨obj,u⟩ dwarfs it; this form stays exact at any t, and
            // the step is cone-feasible exactly when every 1 + s·λ_i > 0.
            let lin: f64 = slice.obj.iter().zip(&du).map(|(o, d)| o * d).sum();
            let n_blocks = s.blocks().len();
            let mut dir_eigs: Vec<f64> = Vec::new();
            for bi in 0..n_blocks {
                let mut tb = &t_mats[0][bi] * C64::from(du[0]);
                for (j, dj) in du.iter().enumerate().skip(1) {
                    tb += &t_mats[j][bi] * C64::from(*dj);
                }
                let (eigs, _) = linalg::herm_eigen(&linalg::hermitize(&tb))?;
                dir_eigs.extend(eigs);
            }
            let delta_f = |step: f64| -> Option<f64> {
                let mut logdet = 0.0;
                for &lam in &dir_eigs {
                    let arg = step * lam;
                    if 1.0 + arg <= 0.0 {
                        return None;
                    }
                    logdet += arg.ln_1p();
                }
                Some(t * step * lin - logdet)
            };
            let mut step = 1.0;
            for _ in 0..60 {
                if let Some(df) = delta_f(step) {
                    if df <= -0.25 * step * dec2 {
                        let cand: Vec<f64> =
                            u.iter().zip(&du).map(|(a, d)| a + step * d).collect();
                        if slice.point(&cand)?.min_eigenvalue()? > 0.0 {
                            *u = cand;
                            accepted = true;
                            break;
                        }
                    }
                }
                step *= 0.5;
            }
            if accepted {
                break;
            }
        }
        if decrement2.is_nan() {
            return Err(Error::Solver("barrier Hessian is not positive definite".into()));
        }
        steps += 1;
        if !accepted || decrement2 < 1e-16 {
            break;
        }
    }
    Ok(steps)
}

/// Dual-feasible point harvested from a primal-central slack: the scaled
/// inverse slack, constraint-repaired through the lift and blended back
/// into the cone if roundoff pushed it out.
fn central_witness(
    slack: &AlgElement,
    t: f64,
    x: &AlgElement,
    one: &AlgElement,
    dual: &DualTemplate,
    a0: &AlgElement,
    a0_min: f64,
) -> Result<Option<(AlgElement, f64)>> {
    let scaled = slack.scale_re(t);
    if scaled.min_eigenvalue()? <= 0.0 {
        return Ok(None);
    }
    let mut cand = match scaled.herm_power(C64::from(-1.0), 1e-15) {
        Ok(w) => w.hermitize(),
        Err(_) => return Ok(None),
    };
    let resid = one.sub(&dual.g_dagger.apply(&cand)?)?.hermitize();
    cand = cand.add(&dual.lift.apply(&resid)?)?.hermitize();
    let c_min = cand.min_eigenvalue()?;
    if c_min < 0.0 {
        let theta = (1.0 + 1e-6) * (-c_min) / ((-c_min) + a0_min);
        if !(0.0..1.0).contains(&theta) {
            return Ok(None);
        }
        cand = cand.scale_re(1.0 - theta).add(&a0.scale_re(theta))?;
    }
    let paired = cand.mul(x)?.trace_re();
    Ok(Some((cand, paired)))
}

/// Orthonormal basis (unweighted Frobenius) of the Hermitian kernel of a
/// Hermiticity-preserving map, via the spectral kernel of `KᵀK` in Hermitian
/// coordinates.
fn herm_kernel_basis(ch: &Channel) -> Result<Vec<AlgElement>> {
    let in_basis = ch.input().herm_basis();
    let out_basis = ch.output().herm_basis();
    let rows = out_basis.len();
    let cols = in_basis.len();
    let mut k = DMatrix::<f64>::zeros(rows, cols);
    for (j, b) in in_basis.iter().enumerate() {
        let img = ch.apply(b)?;
        for (i, ob) in out_basis.iter().enumerate() {
            k[(i, j)] = frob_re(ob, &img);
        }
    }
    let gram = k.transpose() * &k;
    let eig = nalgebra::SymmetricEigen::new(gram);
    let lam_max = eig.eigenvalues.amax().max(1.0);
    let mut kernel = Vec::new();
    for (idx, lam) in eig.eigenvalues.iter().enumerate() {
        if *lam < 1e-12 * lam_max {
            let col = eig.eigenvectors.column(idx);
            let mut el = ch.input().zero();
            for (j, b) in in_basis.iter().enumerate() {
                el = el.add(&b.scale_re(col[j]))?;
            }
            kernel.push(el.hermitize());
        }
    }
    let expected = cols.saturating_sub(rows);
    if kernel.len() < expected {
        return Err(Error::Solver("constraint map is rank deficient".into()));
    }
    Ok(kernel)
}

/// Unweighted Frobenius pairing `Σ_k tr(a_k† b_k)` (real for Hermitian pairs).
fn frob_re(a: &AlgElement, b: &AlgElement) -> f64 {
    a.blocks()
        .iter()
        .zip(b.blocks())
        .map(|(ab, bb)| (ab.adjoint() * bb).trace().re)
        .sum()
}

/// The amalgamated `L¹(N)·L^∞(M)` program for `x`: `min { τ_N(Y) : ι(Y) ⪰ x }`
/// with the inclusion's embedding as the domination map.
pub fn l1_inf_sdp(inc: &Inclusion, x: &AlgElement, opts: &BarrierOptions) -> Result<DominationResult> {
    let dual = DualTemplate::new(inc.cond_exp(), inc.embed())?;
    min_trace_dominating(inc.embed(), x, &dual, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cplx, CMat};
    use crate::random;

    #[test]
    fn trivial_subalgebra_weight_one_gives_lambda_max() {
        let m = Algebra::full(2);
        let inc = Inclusion::trivial(&m, 1.0).unwrap();
        let mut x = m.zero();
        x.block_mut(0)[(0, 0)] = C64::from(1.0);
        let r = l1_inf_sdp(&inc, &x, &BarrierOptions::default()).unwrap();
        assert!(r.converged);
        assert!((r.value - 1.0).abs() < 1e-8, "value {}", r.value);
        assert!(r.gap >= -1e-12 && r.gap <= 1e-7, "gap {}", r.gap);
    }

    #[test]
    fn trivial_subalgebra_induced_trace_gives_two_lambda_max() {
        let m = Algebra::full(2);
        let inc = Inclusion::trivial_induced(&m).unwrap();
        let mut x = m.zero();
        x.block_mut(0)[(0, 0)] = C64::from(1.0);
        let r = l1_inf_sdp(&inc, &x, &BarrierOptions::default()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-8, "value {}", r.value);
        assert!(r.gap <= 1e-7, "gap {}", r.gap);
    }

    #[test]
    fn diagonal_subalgebra_matches_closed_form() {
        // min y₁+y₂ with diag(y) ⪰ [[a,c],[c̄,b]] equals a + b + 2|c|.
        let m = Algebra::full(2);
        let inc = Inclusion::diagonal(2).unwrap();
        let x = m
            .element(vec![CMat::from_row_slice(
                2,
                2,
                &[cplx(1.0, 0.0), cplx(0.5, 0.0), cplx(0.5, 0.0), cplx(0.0, 0.0)],
            )])
            .unwrap();
        let r = l1_inf_sdp(&inc, &x, &BarrierOptions::default()).unwrap();
        assert!((r.value - 2.0).abs() < 1e-7, "value {}", r.value);
        let x2 = m
            .element(vec![CMat::from_row_slice(
                2,
                2,
                &[cplx(0.3, 0.0), cplx(0.0, -0.4), cplx(0.0, 0.4), cplx(0.7, 0.0)],
            )])
            .unwrap();
        let r2 = l1_inf_sdp(&inc, &x2, &BarrierOptions::default()).unwrap();
        assert!((r2.value - 1.8).abs() < 1e-7, "value {}", r2.value);
    }

    #[test]
    fn dual_witness_is_feasible_and_certifies() {
        let mut rng = random::seeded_rng(101);
        let m = Algebra::full(3);
        let inc = Inclusion::diagonal(3).unwrap();
        for _ in 0..10 {
            let rho = random::ginibre_state(&m, &mut rng).unwrap();
            let r = l1_inf_sdp(&inc, &rho, &BarrierOptions::default()).unwrap();
            assert!(r.witness.min_eigenvalue().unwrap() >= -1e-12);
            let defect = inc
                .cond_exp()
                .apply(&r.witness)
                .unwrap()
                .sub(&inc.sub().identity())
                .unwrap()
                .max_abs_diff(&inc.sub().zero())
                .unwrap();
            assert!(defect < 1e-10, "constraint defect {defect}");
            assert!(r.gap >= -1e-12, "gap {}", r.gap);
            assert!(r.gap <= 1e-7, "gap {}", r.gap);
            let slack = inc.embed().apply(&r.minimizer).unwrap().sub(&rho).unwrap();
            assert!(slack.min_eigenvalue().unwrap() > -1e-10);
        }
    }

    #[test]
    fn factor_inclusion_on_product_state() {
        // N = 1 ⊗ M_db with weight 1: for ρ = σ_A ⊗ σ_B the minimizer is
        // λ_max(σ_A)·σ_B with value λ_max(σ_A).
        let inc = Inclusion::factor_right(2, 2, 1.0).unwrap();
        let a = Algebra::full(2);
        let mut sa = a.zero();
        sa.block_mut(0)[(0, 0)] = C64::from(0.75);
        sa.block_mut(0)[(1, 1)] = C64::from(0.25);
        let mut sb = a.zero();
        sb.block_mut(0)[(0, 0)] = C64::from(0.6);
        sb.block_mut(0)[(1, 1)] = C64::from(0.4);
        let rho = sa.tensor(&sb).unwrap();
        let r = l1_inf_sdp(&inc, &rho, &BarrierOptions::default()).unwrap();
        assert!((r.value - 0.75).abs() < 1e-7, "value {}", r.value);
    }

    #[test]
    fn full_inclusion_recovers_trace() {
        // N = M: the constraint is Y ⪰ x, so for x ⪰ 0 the value is τ_M(x).
        let m = Algebra::full(3);
        let inc = Inclusion::from_embed(Channel::identity(&m)).unwrap();
        let mut rng = random::seeded_rng(7);
        let rho = random::ginibre_state(&m, &mut rng).unwrap();
        let r = l1_inf_sdp(&inc, &rho, &BarrierOptions::default()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-7, "value {}", r.value);
    }

    #[test]
    fn rejects_targets_outside_output_algebra() {
        let inc = Inclusion::diagonal(2).unwrap();
        let wrong = Algebra::full(3).identity();
        assert!(l1_inf_sdp(&inc, &wrong, &BarrierOptions::default()).is_err());
    }
}

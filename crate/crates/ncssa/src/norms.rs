//! Noncommutative norm family: Kosaki weighted p-norms, sandwiched Renyi
//! divergences, and amalgamated norms relative to a subalgebra.
//!
//! The amalgamated norm of a positive element is an infimum over density
//! operators of the subalgebra,
//!
//! ```text
//! ‖x‖ = inf { ‖ι(σ)^{−1/(2p')} x ι(σ)^{−1/(2p')}‖_p : σ ∈ D₊(N) },  p' = p/(p−1),
//! ```
//!
//! computed by derivative-free coordinate descent in the matrix-exponential
//! parametrization `σ = exp(h)/τ_N(exp h)` followed by a projected Newton
//! polish that uses the exact Frechet gradient (divided differences for the
//! derivative of the inverse fractional power). The minimizer is unique, so
//! restarts only guard against a stalled line search. Endpoints never touch
//! the optimizer: `p = 1` is the plain trace and `p = ∞` is the operator
//! domination program in [`crate::sdp`].
//!
//! Throughout, `p'` denotes the conjugate exponent and all logarithms are
//! natural.

use nalgebra::DMatrix;

use crate::algebra::AlgElement;
use crate::error::{Error, Result};
use crate::inclusion::Inclusion;
use crate::linalg::{self, C64, CMat, DEFAULT_SUPPORT_TOL};
use crate::random;
use crate::sdp::{self, BarrierOptions, DominationResult};

/// Weighted p-norm `τ(|σ^{1/2p} x σ^{1/2p}|^p)^{1/p}`; `p = ∞` is the plain
/// operator norm of `x`. A singular weight is accepted only when `x` is
/// supported inside its support.
pub fn kosaki_norm(x: &AlgElement, sigma: &AlgElement, p: f64) -> Result<f64> {
    if x.algebra() != sigma.algebra() {
        return Err(Error::shape("kosaki norm requires x and σ in the same algebra"));
    }
    if !(p >= 1.0) {
        return Err(Error::input(format!("kosaki norm needs p ≥ 1, got {p}")));
    }
    if sigma.min_eigenvalue()? < -1e-10 {
        return Err(Error::NotPositive { min_eig: sigma.min_eigenvalue()? });
    }
    if p.is_infinite() {
        return operator_norm(x);
    }
    let proj = sigma.support_projection(DEFAULT_SUPPORT_TOL)?;
    let compressed = proj.mul(x)?.mul(&proj)?;
    let leak = x.sub(&compressed)?;
    let leak_size = operator_norm(&leak)?;
    let scale = operator_norm(x)?.max(1e-300);
    if leak_size > 1e-9 * scale {
        return Err(Error::Support("element has mass outside the weight support".into()));
    }
    let root = sigma.herm_power(C64::from(1.0 / (2.0 * p)), DEFAULT_SUPPORT_TOL)?;
    let sandwich = root.mul(x)?.mul(&root)?;
    let gram = sandwich.adjoint().mul(&sandwich)?.hermitize();
    let mut q = 0.0;
    for (lam, w) in gram.weighted_spectrum()? {
        q += w * lam.max(0.0).powf(p / 2.0);
    }
    Ok(q.powf(1.0 / p))
}

/// Schatten p-norm with respect to the algebra's weighted trace.
pub fn schatten_norm(x: &AlgElement, p: f64) -> Result<f64> {
    kosaki_norm(x, &x.algebra().identity(), p)
}

fn operator_norm(x: &AlgElement) -> Result<f64> {
    let gram = x.adjoint().mul(x)?.hermitize();
    Ok(gram.max_eigenvalue()?.max(0.0).sqrt())
}

/// Sandwiched Renyi relative entropy for `p > 1`,
/// `D_p(ρ‖σ) = (1/(p−1)) log τ[(σ^{(1−p)/2p} ρ σ^{(1−p)/2p})^p]`,
/// equal to `(p/(p−1)) log ‖σ^{−1/2}ρσ^{−1/2}‖_{σ,p}`. Returns `+∞` when the
/// support of ρ leaks outside the support of σ.
pub fn sandwiched_renyi_relative(rho: &AlgElement, sigma: &AlgElement, p: f64) -> Result<f64> {
    if rho.algebra() != sigma.algebra() {
        return Err(Error::shape("relative entropy requires a common algebra"));
    }
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::input(format!("sandwiched divergence needs p ∈ (1,∞), got {p}")));
    }
    if rho.min_eigenvalue()? < -1e-10 || sigma.min_eigenvalue()? < -1e-10 {
        return Err(Error::NotPositive {
            min_eig: rho.min_eigenvalue()?.min(sigma.min_eigenvalue()?),
        });
    }
    let proj = sigma.support_projection(DEFAULT_SUPPORT_TOL)?;
    let inside = proj.mul(rho)?.mul(&proj)?;
    let leak = rho.sub(&inside)?.trace_re().abs();
    if leak > 1e-10 * rho.trace_re().max(1.0) {
        return Ok(f64::INFINITY);
    }
    let expo = (1.0 - p) / (2.0 * p);
    let g = sigma.herm_power(C64::from(expo), DEFAULT_SUPPORT_TOL)?;
    let m = g.mul(rho)?.mul(&g)?.hermitize();
    let mut q = 0.0;
    for (lam, w) in m.weighted_spectrum()? {
        q += w * lam.max(0.0).powf(p);
    }
    Ok(q.ln() / (p - 1.0))
}

/// `L^∞·L¹` norm: the operator norm of the conditional expectation of `x`.
pub fn linf_1_norm(inc: &Inclusion, x: &AlgElement) -> Result<f64> {
    check_psd_input(x)?;
    inc.cond_exp().apply(&x.hermitize())?.op_norm_herm()
}

/// `L¹·L^∞` norm of a positive element: the smallest `τ_N(Y)` with
/// `ι(Y) ⪰ x`, solved as an operator-domination program together with a dual
/// witness `a ⪰ 0`, `E_N(a) = 1`, whose pairing certifies the value.
pub fn l1_inf_norm(inc: &Inclusion, x: &AlgElement, opts: &BarrierOptions) -> Result<DominationResult> {
    check_psd_input(x)?;
    sdp::l1_inf_sdp(inc, &x.hermitize(), opts)
}

fn check_psd_input(x: &AlgElement) -> Result<()> {
    if x.herm_defect() > 1e-9 {
        return Err(Error::NotHermitian { defect: x.herm_defect() });
    }
    let min = x.min_eigenvalue()?;
    if min < -1e-9 {
        return Err(Error::NotPositive { min_eig: min });
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct AmalgamatedOptions {
    /// Random restarts beyond the conditional-expectation warm start.
    pub restarts: usize,
    /// Coordinate-descent sweeps before the Newton polish.
    pub coord_sweeps: usize,
    /// Newton polish iteration cap.
    pub polish_iters: usize,
    /// Relative objective change accepted as converged.
    pub rel_tol: f64,
    /// Seed for the restart perturbations.
    pub seed: u64,
}

impl Default for AmalgamatedOptions {
    fn default() -> Self {
        AmalgamatedOptions {
            restarts: 8,
            coord_sweeps: 6,
            polish_iters: 60,
            rel_tol: 1e-9,
            seed: 0x616d616c,
        }
    }
}

#[derive(Clone, Debug)]
pub struct AmalgamatedResult {
    pub value: f64,
    /// Optimizing density of the subalgebra (normalized for the problem's
    /// constraint functional).
    pub minimizer: AlgElement,
    pub iterations: usize,
    pub converged: bool,
}

/// Amalgamated `L¹(N)·L^p` norm of `x ⪰ 0` for `p ∈ [1, ∞]`.
///
/// Endpoints use closed forms: `p = 1` is `τ_M(x)` and `p = ∞` delegates to
/// the domination program. Interior exponents run the optimizer over
/// subalgebra densities.
pub fn amalgamated_l1p_norm(
    inc: &Inclusion,
    x: &AlgElement,
    p: f64,
    opts: &AmalgamatedOptions,
) -> Result<AmalgamatedResult> {
    check_psd_input(x)?;
    if x.algebra() != inc.ambient() {
        return Err(Error::shape("element must live in the ambient algebra"));
    }
    if !(p >= 1.0) {
        return Err(Error::input(format!("amalgamated norm needs p ∈ [1,∞], got {p}")));
    }
    let x = x.hermitize();
    if p == 1.0 {
        let warm = warm_start(inc, &x, None)?;
        return Ok(AmalgamatedResult {
            value: x.trace_re(),
            minimizer: warm,
            iterations: 0,
            converged: true,
        });
    }
    if p.is_infinite() {
        let r = sdp::l1_inf_sdp(inc, &x, &BarrierOptions::default())?;
        let minimizer = r.minimizer.scale_re(1.0 / r.value.max(1e-300));
        return Ok(AmalgamatedResult {
            value: r.value,
            minimizer,
            iterations: r.newton_steps,
            converged: r.converged,
        });
    }
    let problem = AmalgProblem::new(inc, &x, p, None)?;
    problem.minimize(opts)
}

/// Weighted amalgamated `L¹(N)·L^p` norm with reference weight `σ_tr ∈ M₊`:
/// the infimum of the `σ_tr`-Kosaki p-norm of `ι(γ)^{−1/2p'} x ι(γ)^{−1/2p'}`
/// over `γ ∈ N₊` normalized by `τ_M(ι(γ)·σ_tr) = 1`.
pub fn weighted_amalgamated_l1p(
    inc: &Inclusion,
    x: &AlgElement,
    sigma_tr: &AlgElement,
    p: f64,
    opts: &AmalgamatedOptions,
) -> Result<AmalgamatedResult> {
    check_psd_input(x)?;
    check_psd_input(sigma_tr)?;
    if x.algebra() != inc.ambient() || sigma_tr.algebra() != inc.ambient() {
        return Err(Error::shape("element and weight must live in the ambient algebra"));
    }
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::input(format!("weighted amalgamated norm needs p ∈ (1,∞), got {p}")));
    }
    if sigma_tr.min_eigenvalue()? <= 1e-12 {
        return Err(Error::NotPositive { min_eig: sigma_tr.min_eigenvalue()? });
    }
    let problem = AmalgProblem::new(inc, &x.hermitize(), p, Some(&sigma_tr.hermitize()))?;
    problem.minimize(opts)
}

/// Sandwiched Renyi conditional entropy of a bipartite state on
/// `M_da ⊗ M_db` with the second factor conditioned on:
/// `H_p = (p/(p−1)) log ‖ρ‖_{L¹(N)·L^p}` with `N = 1 ⊗ M_db` carrying the
/// plain matrix trace. Tends to `H(B) − H(AB)` as `p ↓ 1`.
pub fn sandwiched_renyi_conditional(
    rho: &AlgElement,
    da: usize,
    db: usize,
    p: f64,
    opts: &AmalgamatedOptions,
) -> Result<f64> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::input(format!("conditional entropy needs p ∈ (1,∞), got {p}")));
    }
    let inc = Inclusion::factor_right(da, db, 1.0)?;
    let norm = amalgamated_l1p_norm(&inc, rho, p, opts)?;
    Ok(p / (p - 1.0) * norm.value.ln())
}

/// Shared optimizer state for the amalgamated norms. `pweight` holds
/// `σ_tr^{1/(2p)}` when a reference weight is present.
struct AmalgProblem<'a> {
    inc: &'a Inclusion,
    x: AlgElement,
    p: f64,
    s: f64,
    pweight: Option<AlgElement>,
    sigma_tr: Option<AlgElement>,
    basis: Vec<AlgElement>,
    emb_basis: Vec<AlgElement>,
    /// Constraint functional coordinates: `τ_N(B_j)` unweighted, or
    /// `τ_M(ι(B_j) σ_tr)` in the weighted problem.
    cons: Vec<f64>,
}

impl<'a> AmalgProblem<'a> {
    fn new(inc: &'a Inclusion, x: &AlgElement, p: f64, sigma_tr: Option<&AlgElement>) -> Result<Self> {
        let pprime = p / (p - 1.0);
        let s = 1.0 / (2.0 * pprime);
        let basis = inc.sub().herm_basis();
        let emb_basis: Vec<AlgElement> =
            basis.iter().map(|b| inc.embed().apply(b)).collect::<Result<Vec<_>>>()?;
        let cons = match sigma_tr {
            None => basis.iter().map(|b| b.trace_re()).collect(),
            Some(st) => emb_basis
                .iter()
                .map(|e| e.mul(st).map(|m| m.trace_re()))
                .collect::<Result<Vec<f64>>>()?,
        };
        let pweight = match sigma_tr {
            None => None,
            Some(st) => Some(st.herm_power(C64::from(1.0 / (2.0 * p)), DEFAULT_SUPPORT_TOL)?),
        };
        Ok(AmalgProblem {
            inc,
            x: x.clone(),
            p,
            s,
            pweight,
            sigma_tr: sigma_tr.cloned(),
            basis,
            emb_basis,
            cons,
        })
    }

    fn constraint(&self, sigma: &AlgElement) -> Result<f64> {
        match &self.sigma_tr {
            None => Ok(sigma.trace_re()),
            Some(st) => Ok(self.inc.embed().apply(sigma)?.mul(st)?.trace_re()),
        }
    }

    fn normalize(&self, sigma: &AlgElement) -> Result<AlgElement> {
        let c = self.constraint(sigma)?;
        if !(c > 0.0) {
            return Err(Error::NotPositive { min_eig: c });
        }
        Ok(sigma.scale_re(1.0 / c))
    }

    /// Objective at a normalized positive density.
    fn value(&self, sigma: &AlgElement) -> Result<f64> {
        let w = self.inc.embed().apply(sigma)?.herm_power(C64::from(-self.s), DEFAULT_SUPPORT_TOL)?;
        let z = w.mul(&self.x)?.mul(&w)?.hermitize();
        let m = match &self.pweight {
            None => z,
            Some(pw) => pw.mul(&z)?.mul(pw)?.hermitize(),
        };
        let mut q = 0.0;
        for (lam, wt) in m.weighted_spectrum()? {
            q += wt * lam.max(0.0).powf(self.p);
        }
        Ok(q.powf(1.0 / self.p))
    }

    /// Exact gradient of the objective in the Hermitian coordinates of `N`,
    /// via divided differences for the derivative of `ι(σ) ↦ ι(σ)^{−s}`.
    fn gradient(&self, sigma: &AlgElement) -> Result<Vec<f64>> {
        let isig = self.inc.embed().apply(sigma)?.hermitize();
        let mut eigs = Vec::with_capacity(isig.blocks().len());
        for b in isig.blocks() {
            eigs.push(linalg::herm_eigen(b)?);
        }
        let w = isig.herm_power(C64::from(-self.s), DEFAULT_SUPPORT_TOL)?;
        let z = w.mul(&self.x)?.mul(&w)?.hermitize();
        let m = match &self.pweight {
            None => z.clone(),
            Some(pw) => pw.mul(&z)?.mul(pw)?.hermitize(),
        };
        let mut q = 0.0;
        for (lam, wt) in m.weighted_spectrum()? {
            q += wt * lam.max(0.0).powf(self.p);
        }
        let mpow = m.herm_fn(|v| C64::from(v.max(0.0).powf(self.p - 1.0)))?;
        // B = x W P m^{p−1} P + P m^{p−1} P W x, so that the objective's
        // p-power differential along dW is τ_M(B dW).
        let pm = match &self.pweight {
            None => mpow,
            Some(pw) => pw.mul(&mpow)?.mul(pw)?,
        };
        let left = self.x.mul(&w)?.mul(&pm)?;
        let bmat = left.add(&left.adjoint())?;
        let scale = q.powf(1.0 / self.p - 1.0);

        let mut grad = vec![0.0; self.basis.len()];
        for (j, ebj) in self.emb_basis.iter().enumerate() {
            let dw = frechet_power(&isig, &eigs, ebj, -self.s)?;
            grad[j] = scale * bmat.mul(&dw)?.trace_re();
        }
        Ok(grad)
    }

    /// Orthonormal tangent directions (coordinates orthogonal to the
    /// constraint functional).
    fn tangent_coords(&self) -> Vec<Vec<f64>> {
        let n = self.cons.len();
        let norm: f64 = self.cons.iter().map(|c| c * c).sum::<f64>().sqrt();
        let chat: Vec<f64> = self.cons.iter().map(|c| c / norm).collect();
        let mut proj = DMatrix::<f64>::identity(n, n);
        for i in 0..n {
            for j in 0..n {
                proj[(i, j)] -= chat[i] * chat[j];
            }
        }
        let eig = nalgebra::SymmetricEigen::new(proj);
        let mut dirs = Vec::new();
        for (idx, lam) in eig.eigenvalues.iter().enumerate() {
            if *lam > 0.5 {
                dirs.push(eig.eigenvectors.column(idx).iter().copied().collect());
            }
        }
        dirs
    }

    fn coords_to_element(&self, coords: &[f64]) -> Result<AlgElement> {
        let mut acc = self.inc.sub().zero();
        for (c, b) in coords.iter().zip(&self.basis) {
            acc = acc.add(&b.scale_re(*c))?;
        }
        Ok(acc)
    }

    fn minimize(&self, opts: &AmalgamatedOptions) -> Result<AmalgamatedResult> {
        let mut rng = random::seeded_rng(opts.seed);
        let mut starts = vec![warm_start(self.inc, &self.x, self.sigma_tr.as_ref())?];
        for _ in 0..opts.restarts.saturating_sub(1) {
            let noise = random::gue_element(self.inc.sub(), &mut rng)?.scale_re(0.4);
            let cand = noise.herm_exp()?;
            starts.push(self.normalize(&cand)?);
        }
        let mut best: Option<(f64, AlgElement, usize, bool)> = None;
        for start in starts {
            let (v, sig, it, conv) = self.run_single(&start, opts)?;
            let better = match &best {
                None => true,
                Some((bv, ..)) => v < *bv,
            };
            if better {
                best = Some((v, sig, it, conv));
            }
        }
        let (value, minimizer, iterations, converged) = best.expect("at least one start");
        Ok(AmalgamatedResult { value, minimizer, iterations, converged })
    }

    fn run_single(
        &self,
        start: &AlgElement,
        opts: &AmalgamatedOptions,
    ) -> Result<(f64, AlgElement, usize, bool)> {
        let tangent = self.tangent_coords();
        let tangent_els = tangent
            .iter()
            .map(|c| self.coords_to_element(c))
            .collect::<Result<Vec<_>>>()?;
        let mut iterations = 0usize;

        // Coordinate descent in the exponential parametrization.
        let mut h = start.herm_ln()?;
        let mut sigma = self.normalize(&start.clone())?;
        let mut val = self.value(&sigma)?;
        let mut span = 1.0_f64;
        for _sweep in 0..opts.coord_sweeps {
            for dir in &tangent_els {
                let (s_best, v_best) = golden_section(
                    |s| {
                        let cand = h.add(&dir.scale_re(s))?.herm_exp()?;
                        let cand = self.normalize(&cand)?;
                        self.value(&cand)
                    },
                    -span,
                    span,
                    24,
                )?;
                iterations += 24;
                if v_best < val {
                    h = h.add(&dir.scale_re(s_best))?;
                    val = v_best;
                }
            }
            span *= 0.5;
        }
        sigma = self.normalize(&h.herm_exp()?)?;
        val = self.value(&sigma)?;

        // Projected Newton polish on the exact gradient.
        let nt = tangent.len();
        let mut converged = nt == 0;
        let fd = 1e-5;
        for _ in 0..opts.polish_iters {
            iterations += 1;
            let g_full = self.gradient(&sigma)?;
            let g: Vec<f64> = tangent.iter().map(|tc| dot(tc, &g_full)).collect();
            let gnorm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            if gnorm <= 1e-12 * (1.0 + val.abs()) {
                converged = true;
                break;
            }
            // Finite-difference Hessian of the exact gradient, on the
            // tangent coordinates.
            let mut hess = DMatrix::<f64>::zeros(nt, nt);
            for b in 0..nt {
                let step = tangent_els[b].scale_re(fd);
                let plus = self.shifted(&sigma, &step)?;
                let minus = self.shifted(&sigma, &step.scale_re(-1.0))?;
                let gp = self.gradient(&plus)?;
                let gm = self.gradient(&minus)?;
                for a in 0..nt {
                    let da = (dot(&tangent[a], &gp) - dot(&tangent[a], &gm)) / (2.0 * fd);
                    hess[(a, b)] = da;
                }
            }
            let hess = (hess.clone() + hess.transpose()) * 0.5;
            let rhs = DMatrix::<f64>::from_iterator(nt, 1, g.iter().map(|v| -v));
            let mut ridge = 0.0;
            let dir = loop {
                let m = &hess + DMatrix::<f64>::identity(nt, nt) * ridge;
                if let Some(ch) = m.cholesky() {
                    break ch.solve(&rhs);
                }
                ridge = if ridge == 0.0 { 1e-10 * (1.0 + hess.diagonal().amax()) } else { ridge * 100.0 };
                if ridge > 1e6 {
                    return Err(Error::NonConvergence("polish Hessian regularization failed".into()));
                }
            };
            let mut delta = self.inc.sub().zero();
            for (a, d) in dir.column(0).iter().enumerate() {
                delta = delta.add(&tangent_els[a].scale_re(*d))?;
            }
            // Line search with positivity retraction.
            let mut stepsize = 1.0;
            let mut improved = false;
            for _ in 0..40 {
                let cand = self.shifted_checked(&sigma, &delta.scale_re(stepsize))?;
                if let Some(c) = cand {
                    let v = self.value(&c)?;
                    if v <= val + 1e-14 * (1.0 + val.abs()) {
                        let rel = (val - v).abs() / (1.0 + val.abs());
                        sigma = c;
                        let done = rel < opts.rel_tol * 1e-3 && stepsize == 1.0;
                        val = v;
                        improved = true;
                        if done {
                            converged = true;
                        }
                        break;
                    }
                }
                stepsize *= 0.5;
            }
            if converged {
                break;
            }
            if !improved {
                converged = gnorm <= 1e-7 * (1.0 + val.abs());
                break;
            }
        }
        Ok((val, sigma, iterations, converged))
    }

    fn shifted(&self, sigma: &AlgElement, delta: &AlgElement) -> Result<AlgElement> {
        match self.shifted_checked(sigma, delta)? {
            Some(c) => Ok(c),
            // Fall back to a tiny multiplicative retraction to stay positive.
            None => {
                let cand = sigma.add(&delta.scale_re(0.25))?;
                self.normalize(&cand.herm_fn(|v| C64::from(v.max(1e-14)))?)
            }
        }
    }

    fn shifted_checked(&self, sigma: &AlgElement, delta: &AlgElement) -> Result<Option<AlgElement>> {
        let cand = sigma.add(delta)?;
        if cand.min_eigenvalue()? <= 1e-14 {
            return Ok(None);
        }
        Ok(Some(self.normalize(&cand)?))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Warm start: the conditional expectation of `x`, floored to stay inside
/// the positive cone, normalized for the problem's constraint.
fn warm_start(inc: &Inclusion, x: &AlgElement, sigma_tr: Option<&AlgElement>) -> Result<AlgElement> {
    let e = inc.cond_exp().apply(x)?.hermitize();
    let top = e.max_eigenvalue()?.max(0.0);
    let floor = 1e-6 * top + 1e-12;
    let lifted = e.add(&inc.sub().identity().scale_re(floor))?;
    let c = match sigma_tr {
        None => lifted.trace_re(),
        Some(st) => inc.embed().apply(&lifted)?.mul(st)?.trace_re(),
    };
    Ok(lifted.scale_re(1.0 / c))
}

/// Directional derivative of `y ↦ y^{power}` at `y` (eigendecomposition
/// supplied) along `delta`, by the divided-difference kernel applied per
/// block.
fn frechet_power(
    y: &AlgElement,
    eigs: &[(Vec<f64>, CMat)],
    delta: &AlgElement,
    power: f64,
) -> Result<AlgElement> {
    let mut out_blocks = Vec::with_capacity(y.blocks().len());
    for (k, (vals, u)) in eigs.iter().enumerate() {
        let d = vals.len();
        let s = u.adjoint() * delta.block(k) * u;
        let mut phi = CMat::zeros(d, d);
        let scale = vals.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1e-300);
        for i in 0..d {
            for j in 0..d {
                let (li, lj) = (vals[i], vals[j]);
                let kernel = if (li - lj).abs() <= 1e-9 * scale {
                    let mid = 0.5 * (li + lj);
                    power * safe_pow(mid, power - 1.0)
                } else {
                    (safe_pow(li, power) - safe_pow(lj, power)) / (li - lj)
                };
                phi[(i, j)] = s[(i, j)] * C64::from(kernel);
            }
        }
        out_blocks.push(u * phi * u.adjoint());
    }
    y.algebra().element(out_blocks)
}

fn safe_pow(v: f64, e: f64) -> f64 {
    if v <= 0.0 {
        0.0
    } else {
        v.powf(e)
    }
}

/// Golden-section scan for a 1-d minimum on `[lo, hi]`.
fn golden_section(
    mut f: impl FnMut(f64) -> Result<f64>,
    mut lo: f64,
    mut hi: f64,
    iters: usize,
) -> Result<(f64, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..iters {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
        }
    }
    if f1 <= f2 {
        Ok((x1, f1))
    } else {
        Ok((x2, f2))
    }
}

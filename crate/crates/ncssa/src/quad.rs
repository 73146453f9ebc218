//! Panel-based Gauss-Legendre quadrature against the interpolation density
//! `α(t) = π/(2(cosh(πt) + 1))`, a probability density on the real line with
//! `∫_{-T}^{T} α = tanh(πT/2)` and characteristic function `s/sinh(s)`.

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on `(-1, 1)`, by Newton iteration on the
/// Legendre recurrence. Exact for polynomials of degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::input("quadrature needs at least one node"));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, pm1) = legendre_pair(n, x);
            dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    Ok((nodes, weights))
}

/// `(P_n(x), P_{n-1}(x))` by the three-term recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}

/// `α(t) = π/(2(cosh(πt) + 1)) = π/(4 cosh²(πt/2))`.
pub fn alpha_density(t: f64) -> f64 {
    let c = (std::f64::consts::PI * t / 2.0).cosh();
    std::f64::consts::PI / (4.0 * c * c)
}

/// Mass of `α` outside `[-T, T]`: `1 - tanh(πT/2) ≤ 2 e^{-πT}`.
pub fn alpha_tail_bound(half_width: f64) -> f64 {
    2.0 * (-std::f64::consts::PI * half_width).exp()
}

/// Panelization of `[-T, T]` for the `α`-weighted integrals.
#[derive(Clone, Debug)]
pub struct PanelConfig {
    /// Truncation half-width `T`.
    pub half_width: f64,
    /// Width of each panel; the last panel is shortened to end at `T`.
    pub panel_width: f64,
    /// Gauss-Legendre nodes per panel.
    pub nodes_per_panel: usize,
}

impl Default for PanelConfig {
    fn default() -> Self {
        PanelConfig { half_width: 8.0, panel_width: 0.5, nodes_per_panel: 16 }
    }
}

impl PanelConfig {
    /// All quadrature points `(t, w)` with `w` the plain Lebesgue weight;
    /// the density is not folded in.
    pub fn nodes(&self) -> Result<Vec<(f64, f64)>> {
        if !(self.half_width > 0.0) || !(self.panel_width > 0.0) {
            return Err(Error::input("panel configuration must have positive widths"));
        }
        let (gx, gw) = gauss_legendre(self.nodes_per_panel)?;
        let mut out = Vec::new();
        let mut lo = -self.half_width;
        while lo < self.half_width - 1e-12 {
            let hi = (lo + self.panel_width).min(self.half_width);
            let mid = 0.5 * (lo + hi);
            let half = 0.5 * (hi - lo);
            for (x, w) in gx.iter().zip(&gw) {
                out.push((mid + half * x, half * w));
            }
            lo = hi;
        }
        Ok(out)
    }

    /// Halved panel width, for step-doubling error estimates.
    pub fn halved(&self) -> Self {
        PanelConfig { panel_width: 0.5 * self.panel_width, ..self.clone() }
    }
}

/// `∫_{-T}^{T} α(t) f(t) dt` on the panelization.
pub fn integrate_alpha(cfg: &PanelConfig, mut f: impl FnMut(f64) -> Result<f64>) -> Result<f64> {
    let mut acc = 0.0;
    for (t, w) in cfg.nodes()? {
        acc += w * alpha_density(t) * f(t)?;
    }
    Ok(acc)
}

/// Quadrature mass `∫_{-T}^{T} α`; equals `tanh(πT/2)` up to panel error.
pub fn alpha_weight_sum(cfg: &PanelConfig) -> Result<f64> {
    integrate_alpha(cfg, |_| Ok(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_five_point_reference() {
        let (x, w) = gauss_legendre(5).unwrap();
        let xs = [
            -0.9061798459386640,
            -0.5384693101056831,
            0.0,
            0.5384693101056831,
            0.9061798459386640,
        ];
        let ws = [
            0.23692688505618908,
            0.47862867049936647,
            0.5688888888888889,
            0.47862867049936647,
            0.23692688505618908,
        ];
        for i in 0..5 {
            assert!((x[i] - xs[i]).abs() < 1e-14, "node {i}: {}", x[i]);
            assert!((w[i] - ws[i]).abs() < 1e-14, "weight {i}: {}", w[i]);
        }
    }

    #[test]
    fn gauss_legendre_integrates_high_degree_monomials() {
        let (x, w) = gauss_legendre(16).unwrap();
        for k in [0usize, 1, 2, 7, 16, 31] {
            let got: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(k as i32)).sum();
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            assert!((got - exact).abs() < 1e-13, "degree {k}: {got} vs {exact}");
        }
    }

    #[test]
    fn alpha_mass_matches_tanh_and_is_nearly_one() {
        let cfg = PanelConfig::default();
        let mass = alpha_weight_sum(&cfg).unwrap();
        let exact = (std::f64::consts::PI * cfg.half_width / 2.0).tanh();
        assert!((mass - exact).abs() < 1e-13, "mass {mass} vs {exact}");
        assert!((mass - 1.0).abs() < 1e-10, "mass {mass}");
        assert!(1.0 - exact <= alpha_tail_bound(cfg.half_width));
    }

    #[test]
    fn alpha_characteristic_function_oracle() {
        // ∫ α(t) cos(st) dt = s/sinh(s) over the whole line; the panel sum
        // differs from it by at most the truncated tail mass.
        let cfg = PanelConfig::default();
        let tail = alpha_tail_bound(cfg.half_width);
        for s in [0.5, 1.0, 2.0] {
            let got = integrate_alpha(&cfg, |t| Ok((s * t).cos())).unwrap();
            let exact = s / s.sinh();
            assert!((got - exact).abs() < tail + 1e-13, "s={s}: {got} vs {exact}");
        }
    }

    #[test]
    fn panel_halving_is_stable() {
        let cfg = PanelConfig::default();
        let f = |t: f64| Ok((1.0 + 0.5 * (t * 1.3).cos()).ln());
        let coarse = integrate_alpha(&cfg, f).unwrap();
        let fine = integrate_alpha(&cfg.halved(), f).unwrap();
        assert!((coarse - fine).abs() < 1e-12, "Δ = {}", (coarse - fine).abs());
    }

    #[test]
    fn shortened_last_panel_covers_odd_widths() {
        let cfg = PanelConfig { half_width: 1.3, panel_width: 0.5, nodes_per_panel: 12 };
        let mass = alpha_weight_sum(&cfg).unwrap();
        let exact = (std::f64::consts::PI * 1.3 / 2.0).tanh();
        assert!((mass - exact).abs() < 1e-13, "{mass} vs {exact}");
    }
}

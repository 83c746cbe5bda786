//! Closed-form and numerically solved cost model.
//!
//! Costs written with an unspecified constant (`O(.)`) use constant 1 and are
//! in "model units". Depths and sample counts stay real-valued; callers round
//! at the reporting boundary.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mitigation::sni::sni_overhead;
use crate::stats::{bisect, golden_section_min};

/// Caveat attached to every report.
pub const MODEL_UNITS: &str = "O(.) costs use unit constants (model units)";

/// `C_k = k^{1/(k+1)} + k^{-k/(k+1)}`.
pub fn c_k(k: u32) -> f64 {
    let k = k as f64;
    k.powf(1.0 / (k + 1.0)) + k.powf(-k / (k + 1.0))
}

fn check_order(k: u32) -> Result<()> {
    if k == 1 || (k >= 2 && k % 2 == 0) {
        Ok(())
    } else {
        Err(Error::InvalidOrder(k))
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive and finite, got {v}")))
    }
}

fn nonnegative(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be nonnegative and finite, got {v}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// Trotter target below the critical error.
    BelowCritical,
    /// Trotter target at the critical error.
    Critical,
    /// Trotter target above the critical error.
    AboveCritical,
    /// RLCU with `sqrt(2 gamma') t~ >= 1`: `r* = t~ / sqrt(2 gamma')`.
    Optimized,
    /// RLCU with `sqrt(2 gamma') t~ < 1`: `r = t~^2`.
    Shallow,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrotterCostInputs {
    pub alpha_k: f64,
    pub k: u32,
    /// Number of Hamiltonian terms `L`.
    pub l: f64,
    pub gamma: f64,
    pub gamma_prime: f64,
}

impl TrotterCostInputs {
    pub fn new(alpha_k: f64, k: u32, l: f64, gamma: f64, gamma_prime: f64) -> Result<Self> {
        check_order(k)?;
        positive("alpha_k", alpha_k)?;
        positive("L", l)?;
        nonnegative("gamma", gamma)?;
        nonnegative("gamma'", gamma_prime)?;
        Ok(TrotterCostInputs { alpha_k, k, l, gamma, gamma_prime })
    }

    /// `gamma' = c_pec * gamma`.
    pub fn with_c_pec(alpha_k: f64, k: u32, l: f64, gamma: f64, c_pec: f64) -> Result<Self> {
        TrotterCostInputs::new(alpha_k, k, l, gamma, c_pec * gamma)
    }

    fn kf(&self) -> f64 {
        self.k as f64
    }
}

/// `eps_b = C_k alpha_k^{1/(k+1)} (L gamma)^{k/(k+1)}`.
pub fn trotter_error_bound(p: &TrotterCostInputs) -> f64 {
    let k = p.kf();
    c_k(p.k) * p.alpha_k.powf(1.0 / (k + 1.0)) * (p.l * p.gamma).powf(k / (k + 1.0))
}

/// Unmitigated error `alpha_k / d^k + L d gamma` at depth `d`.
pub fn trotter_noqem_error(p: &TrotterCostInputs, d: f64) -> f64 {
    p.alpha_k / d.powi(p.k as i32) + p.l * d * p.gamma
}

/// `d* = (k alpha_k / (L gamma))^{1/(k+1)}`.
pub fn trotter_optimal_depth_noqem(p: &TrotterCostInputs) -> Result<f64> {
    positive("gamma", p.gamma)?;
    Ok((p.kf() * p.alpha_k / (p.l * p.gamma)).powf(1.0 / (p.kf() + 1.0)))
}

/// `eps_c = alpha_k (L gamma' / k)^k`.
pub fn critical_error(p: &TrotterCostInputs) -> f64 {
    p.alpha_k * (p.l * p.gamma_prime / p.kf()).powi(p.k as i32)
}

/// Mitigated mean-squared error `alpha_k^2 / d^{2k} + e^{2 L d gamma'} / M`.
pub fn trotter_pec_mse(p: &TrotterCostInputs, d: f64, m: f64) -> f64 {
    (p.alpha_k / d.powi(p.k as i32)).powi(2) + (2.0 * p.l * d * p.gamma_prime).exp() / m
}

/// Right-hand side of the depth condition,
/// `alpha_k^2 / d^{2k} (1 + k / (gamma' L d))`.
pub fn trotter_depth_condition(p: &TrotterCostInputs, d: f64) -> f64 {
    let base = (p.alpha_k / d.powi(p.k as i32)).powi(2);
    if p.gamma_prime == 0.0 {
        return f64::INFINITY;
    }
    base * (1.0 + p.kf() / (p.gamma_prime * p.l * d))
}

/// Depth that reaches accuracy `epsilon` at the fewest samples: the root of
/// `epsilon^2 = alpha_k^2 / d^{2k} (1 + k / (gamma' L d))`.
pub fn trotter_optimal_depth_pec(p: &TrotterCostInputs, epsilon: f64) -> Result<f64> {
    positive("epsilon", epsilon)?;
    positive("gamma'", p.gamma_prime)?;
    let target = epsilon * epsilon;
    // bracket in log space; the condition is strictly decreasing in d
    let f = |ln_d: f64| (trotter_depth_condition(p, ln_d.exp()) / target).ln();
    let mut lo = (p.alpha_k / epsilon).powf(1.0 / p.kf()).ln();
    let mut hi = lo;
    while f(lo) < 0.0 {
        lo -= 1.0;
    }
    while f(hi) > 0.0 {
        hi += 1.0;
    }
    if hi == lo {
        return Ok(lo.exp());
    }
    Ok(bisect(f, lo, hi)?.exp())
}

/// Samples at depth `d` from the stationarity condition,
/// `M = L gamma' / (k alpha_k^2) e^{2 L d gamma'} d^{2k+1}`.
pub fn trotter_samples_at_depth(p: &TrotterCostInputs, d: f64) -> f64 {
    p.l * p.gamma_prime / (p.kf() * p.alpha_k * p.alpha_k)
        * (2.0 * p.l * d * p.gamma_prime).exp()
        * d.powi(2 * p.k as i32 + 1)
}

/// The three asymptotic forms of `M(epsilon)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrotterSampleBranches {
    /// `eps^{-2} (eps_c/eps)^{1/k} exp[2k (eps_c/eps)^{1/k}]`.
    pub below: f64,
    /// `e^{2k} / eps_c^2`.
    pub critical: f64,
    /// `eps^{-2} (1 + 2k (eps_c/eps)^{2/(2k+1)})`.
    pub above: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrotterSamples {
    pub epsilon: f64,
    pub epsilon_c: f64,
    pub depth: f64,
    pub samples: f64,
    pub regime: Regime,
    pub branches: TrotterSampleBranches,
}

impl TrotterSamples {
    /// The branch matching the regime tag.
    pub fn asymptotic(&self) -> f64 {
        match self.regime {
            Regime::BelowCritical => self.branches.below,
            Regime::AboveCritical => self.branches.above,
            _ => self.branches.critical,
        }
    }
}

pub fn trotter_sample_branches(p: &TrotterCostInputs, epsilon: f64) -> TrotterSampleBranches {
    let k = p.kf();
    let ec = critical_error(p);
    let ratio = ec / epsilon;
    let e2 = epsilon * epsilon;
    TrotterSampleBranches {
        below: ratio.powf(1.0 / k) * (2.0 * k * ratio.powf(1.0 / k)).exp() / e2,
        critical: (2.0 * k).exp() / (ec * ec),
        above: (1.0 + 2.0 * k * ratio.powf(2.0 / (2.0 * k + 1.0))) / e2,
    }
}

fn trotter_regime(epsilon: f64, epsilon_c: f64) -> Regime {
    if (epsilon - epsilon_c).abs() <= 1e-12 * epsilon_c {
        Regime::Critical
    } else if epsilon < epsilon_c {
        Regime::BelowCritical
    } else {
        Regime::AboveCritical
    }
}

/// `M(epsilon)`: solve the depth condition, then evaluate the stationary `M`.
pub fn trotter_samples(p: &TrotterCostInputs, epsilon: f64) -> Result<TrotterSamples> {
    let depth = trotter_optimal_depth_pec(p, epsilon)?;
    let epsilon_c = critical_error(p);
    Ok(TrotterSamples {
        epsilon,
        epsilon_c,
        depth,
        samples: trotter_samples_at_depth(p, depth),
        regime: trotter_regime(epsilon, epsilon_c),
        branches: trotter_sample_branches(p, epsilon),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RlcuCostInputs {
    pub beta: f64,
    pub t: f64,
    pub gamma_prime: f64,
    pub gamma_c: f64,
}

impl RlcuCostInputs {
    pub fn new(beta: f64, t: f64, gamma_prime: f64, gamma_c: f64) -> Result<Self> {
        positive("beta", beta)?;
        positive("t", t)?;
        nonnegative("gamma'", gamma_prime)?;
        nonnegative("gamma_c", gamma_c)?;
        Ok(RlcuCostInputs { beta, t, gamma_prime, gamma_c })
    }

    /// `t~ = beta t`.
    pub fn t_tilde(&self) -> f64 {
        self.beta * self.t
    }
}

/// `r* = t~ / sqrt(2 gamma')` when `sqrt(2 gamma') t~ >= 1`, else `t~^2`.
pub fn rlcu_optimal_r(p: &RlcuCostInputs) -> (f64, Regime) {
    let tt = p.t_tilde();
    let s = (2.0 * p.gamma_prime).sqrt();
    // the boundary is included in the optimized regime; allow for rounding
    if s * tt >= 1.0 - 1e-12 {
        (tt / s, Regime::Optimized)
    } else {
        (tt * tt, Regime::Shallow)
    }
}

/// `t~^2 / r + 2 gamma' r + 2 gamma_c t~`.
pub fn rlcu_exponent(p: &RlcuCostInputs, r: f64) -> f64 {
    let tt = p.t_tilde();
    tt * tt / r + 2.0 * p.gamma_prime * r + 2.0 * p.gamma_c * tt
}

/// `M = eps^{-2} exp(t~^2 / r + 2 gamma' r + 2 gamma_c t~)`.
pub fn rlcu_samples(p: &RlcuCostInputs, epsilon: f64, r: f64) -> Result<f64> {
    positive("epsilon", epsilon)?;
    positive("r", r)?;
    Ok(rlcu_exponent(p, r).exp() / (epsilon * epsilon))
}

/// Mean-squared error bound
/// `M^{-1} exp(t~^2 / r + 2 gamma' r + t~ (e^{2 gamma_c} - 1))`.
pub fn rlcu_mse_bound(p: &RlcuCostInputs, r: f64, m: f64) -> Result<f64> {
    positive("r", r)?;
    positive("M", m)?;
    let tt = p.t_tilde();
    Ok((tt * tt / r + 2.0 * p.gamma_prime * r + tt * (2.0 * p.gamma_c).exp_m1()).exp() / m)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RlcuErrorBound {
    /// `min_r b(r)`.
    pub value: f64,
    pub r_star: f64,
}

/// `b(r) = 2 e^{t~^2 / r} (gamma r + gamma_c t~^2 / r)`.
pub fn rlcu_bias_scale(t_tilde: f64, gamma: f64, gamma_c: f64, r: f64) -> f64 {
    let a = t_tilde * t_tilde;
    2.0 * (a / r).exp() * (gamma * r + gamma_c * a / r)
}

/// Unmitigated RLCU error bound: minimizes `b(r)` over `r > 0`.
pub fn rlcu_error_bound(t_tilde: f64, gamma: f64, gamma_c: f64) -> Result<RlcuErrorBound> {
    positive("t~", t_tilde)?;
    positive("gamma", gamma)?;
    nonnegative("gamma_c", gamma_c)?;
    let a = t_tilde * t_tilde;
    let b = |r: f64| rlcu_bias_scale(t_tilde, gamma, gamma_c, r);
    // b is unimodal with its minimum at r >= a; golden section in log r
    let mut hi = 2.0 * a;
    while b(2.0 * hi) < b(hi) {
        hi *= 2.0;
    }
    let coarse = golden_section_min(|x| b(x.exp()), (0.5 * a).ln(), (2.0 * hi).ln(), 1e-10).exp();
    // polish on the sign of b'(r), which is the sign of the stationarity cubic
    let g = gamma_c / gamma;
    let cubic = |r: f64| r * r * r - a * r * r - g * a * r - g * a * a;
    let (mut lo, mut up) = (coarse, coarse);
    while cubic(lo) > 0.0 {
        lo *= 0.9;
    }
    while cubic(up) < 0.0 {
        up *= 1.1;
    }
    let r_star = if lo == up { lo } else { bisect(cubic, lo, up)? };
    Ok(RlcuErrorBound { value: b(r_star), r_star })
}

/// GST samples `Gamma^2 N_g^2 / eps^2`.
pub fn gst_budget(n_g: f64, epsilon: f64, gamma: f64) -> Result<f64> {
    positive("N_g", n_g)?;
    positive("epsilon", epsilon)?;
    positive("Gamma", gamma)?;
    Ok((gamma * n_g / epsilon).powi(2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GstRatio {
    pub regime: Regime,
    /// GST samples.
    pub m_g: f64,
    /// GST samples with the alternative reweighting choice (RLCU optimized
    /// regime only: `Gamma_RLCU` at `r*` instead of at `t~^2`).
    pub m_g_alt: Option<f64>,
    /// Simulation cost `R`: `d L M` or `r M`.
    pub simulation_cost: f64,
    pub ratio: f64,
    /// Regime-matched asymptotic form of the ratio.
    pub asymptotic: f64,
}

/// `M_g / R` for Trotter with PEC, using this module's own `d*` and `M`.
pub fn gst_ratio_trotter(p: &TrotterCostInputs, epsilon: f64) -> Result<GstRatio> {
    let s = trotter_samples(p, epsilon)?;
    let n_g = s.depth * p.l;
    let m_g = gst_budget(n_g, epsilon, 1.0)?;
    let simulation_cost = n_g * s.samples;
    let k = p.kf();
    let x = s.epsilon_c / epsilon;
    let lead = k / p.gamma_prime;
    let asymptotic = match s.regime {
        Regime::BelowCritical => lead * (-2.0 * k * x.powf(1.0 / k)).exp(),
        Regime::AboveCritical => {
            let y = x.powf(2.0 / (2.0 * k + 1.0));
            lead * y / (1.0 + 2.0 * k * y)
        }
        _ => lead * (-2.0 * k).exp(),
    };
    Ok(GstRatio { regime: s.regime, m_g, m_g_alt: None, simulation_cost, ratio: m_g / simulation_cost, asymptotic })
}

/// `M_g / R` for RLCU with PEC at the regime's `r`.
pub fn gst_ratio_rlcu(p: &RlcuCostInputs, epsilon: f64) -> Result<GstRatio> {
    let (r, regime) = rlcu_optimal_r(p);
    let tt = p.t_tilde();
    let m = rlcu_samples(p, epsilon, r)?;
    let simulation_cost = r * m;
    let e2 = epsilon * epsilon;
    let (m_g, m_g_alt, asymptotic) = match regime {
        Regime::Optimized => {
            let base = tt * tt / (2.0 * p.gamma_prime * e2);
            let at_square = std::f64::consts::E.powi(2) * base;
            let at_star = (2.0 * tt * tt / r).exp() * base;
            (at_square, Some(at_star), tt / (2.0 * p.gamma_prime).sqrt())
        }
        _ => (tt.powi(4) / e2, None, tt * tt),
    };
    Ok(GstRatio { regime, m_g, m_g_alt, simulation_cost, ratio: m_g / simulation_cost, asymptotic })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SniBudgets {
    pub q_st: f64,
    /// Characterization samples `eps^{-2} s^2 (1 - 2 q_ST)^{-4}`.
    pub m_qst: f64,
    /// Circuit samples `eps^{-2} (1 - 2 q_ST)^{-2s}`.
    pub m: f64,
    /// `M_qST / (d L M)`.
    pub ratio: f64,
    /// `(q / L) q d e^{-4 q d}`, the shape that bounds `ratio`.
    pub ratio_scale: f64,
}

/// SNI characterization and circuit budgets for `s` segments over `d`
/// layers of `L` gates with per-layer error `q`.
pub fn sni_budgets(q: f64, d: f64, l: f64, epsilon: f64, s: f64) -> Result<SniBudgets> {
    positive("epsilon", epsilon)?;
    positive("L", l)?;
    let overhead = sni_overhead(q, d, s)?;
    let q_st = 1.0 - (1.0 - q).powf(d / s);
    let e2 = epsilon * epsilon;
    let m_qst = s * s * (1.0 - 2.0 * q_st).powi(-4) / e2;
    let m = overhead.exact / e2;
    let x = q * d;
    Ok(SniBudgets {
        q_st,
        m_qst,
        m,
        ratio: m_qst / (d * l * m),
        ratio_scale: q / l * x * (-4.0 * x).exp(),
    })
}

/// Chebyshev half-width `sqrt(MSE / alpha)` at confidence `1 - alpha`.
pub fn chebyshev_halfwidth(mse: f64, alpha: f64) -> Result<f64> {
    nonnegative("MSE", mse)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok((mse / alpha).sqrt())
}

/// Summary of one cost evaluation. Missing entries do not apply to the
/// algorithm.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostReport {
    pub algorithm: String,
    pub epsilon: f64,
    pub epsilon_b: f64,
    pub epsilon_c: Option<f64>,
    pub d_star: Option<f64>,
    pub d_star_noqem: Option<f64>,
    pub r_star: Option<f64>,
    pub m: f64,
    pub m_g: f64,
    pub m_g_alt: Option<f64>,
    pub m_qst: Option<f64>,
    pub ratio_mg_r: f64,
    pub ratio_asymptotic: f64,
    pub regime: Regime,
    pub units: &'static str,
}

/// Trotter report; `sni_segments` adds SNI budgets.
pub fn trotter_report(p: &TrotterCostInputs, epsilon: f64, sni_segments: Option<f64>) -> Result<CostReport> {
    let s = trotter_samples(p, epsilon)?;
    let g = gst_ratio_trotter(p, epsilon)?;
    let m_qst = match sni_segments {
        Some(seg) => {
            let q = 1.0 - (1.0 - p.gamma).powf(p.l);
            Some(sni_budgets(q, s.depth, p.l, epsilon, seg)?.m_qst)
        }
        None => None,
    };
    Ok(CostReport {
        algorithm: format!("trotter-k{}", p.k),
        epsilon,
        epsilon_b: trotter_error_bound(p),
        epsilon_c: Some(s.epsilon_c),
        d_star: Some(s.depth),
        d_star_noqem: if p.gamma > 0.0 { Some(trotter_optimal_depth_noqem(p)?) } else { None },
        r_star: None,
        m: s.samples,
        m_g: g.m_g,
        m_g_alt: None,
        m_qst,
        ratio_mg_r: g.ratio,
        ratio_asymptotic: g.asymptotic,
        regime: s.regime,
        units: MODEL_UNITS,
    })
}

/// RLCU report; `gamma` is the unmitigated non-Clifford rate behind `eps_b`.
pub fn rlcu_report(p: &RlcuCostInputs, gamma: f64, epsilon: f64) -> Result<CostReport> {
    let (r, regime) = rlcu_optimal_r(p);
    let g = gst_ratio_rlcu(p, epsilon)?;
    let eb = rlcu_error_bound(p.t_tilde(), gamma, p.gamma_c)?;
    Ok(CostReport {
        algorithm: "rlcu".into(),
        epsilon,
        epsilon_b: eb.value,
        epsilon_c: None,
        d_star: None,
        d_star_noqem: None,
        r_star: Some(r),
        m: rlcu_samples(p, epsilon, r)?,
        m_g: g.m_g,
        m_g_alt: g.m_g_alt,
        m_qst: None,
        ratio_mg_r: g.ratio,
        ratio_asymptotic: g.asymptotic,
        regime,
        units: MODEL_UNITS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn reference() -> TrotterCostInputs {
        TrotterCostInputs::new(1.0, 1, 2.0, 0.01, 0.01).unwrap()
    }

    #[test]
    fn closed_forms() {
        let p = reference();
        assert_eq!(c_k(1), 2.0);
        assert_relative_eq!(c_k(2), 2f64.powf(1.0 / 3.0) + 2f64.powf(-2.0 / 3.0), max_relative = 1e-15);
        assert_relative_eq!(trotter_error_bound(&p), 2.0 * 0.02f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(trotter_optimal_depth_noqem(&p).unwrap(), 50f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(critical_error(&p), 0.02, max_relative = 1e-14);
    }

    #[test]
    fn depth_condition_residual() {
        let p = reference();
        for eps in [1e-4, 0.002, 0.02, 0.2, 20.0] {
            let d = trotter_optimal_depth_pec(&p, eps).unwrap();
            let rhs = trotter_depth_condition(&p, d);
            assert!((rhs - eps * eps).abs() < 1e-12 * eps * eps, "eps {eps}: {rhs}");
        }
    }

    #[test]
    fn rlcu_examples() {
        let p = RlcuCostInputs::new(1.0, 10.0, 0.005, 0.0).unwrap();
        let (r, regime) = rlcu_optimal_r(&p);
        assert_relative_eq!(r, 100.0, max_relative = 1e-12);
        assert_eq!(regime, Regime::Optimized);
        assert_relative_eq!(rlcu_samples(&p, 0.1, r).unwrap(), std::f64::consts::E.powi(2) / 0.01, max_relative = 1e-12);
        let shallow = RlcuCostInputs::new(1.0, 1.0, 0.005, 0.0).unwrap();
        assert_eq!(rlcu_optimal_r(&shallow), (1.0, Regime::Shallow));
    }

    #[test]
    fn rlcu_bound_without_clifford_noise() {
        let b = rlcu_error_bound(5.0, 0.01, 0.0).unwrap();
        assert_relative_eq!(b.r_star, 25.0, max_relative = 1e-12);
        assert_relative_eq!(b.value, 2.0 * std::f64::consts::E * 0.25, max_relative = 1e-12);
    }

    #[test]
    fn chebyshev() {
        assert_relative_eq!(chebyshev_halfwidth(0.01, 0.05).unwrap(), 0.2f64.sqrt(), max_relative = 1e-15);
        assert!(chebyshev_halfwidth(0.01, 1.0).is_err());
    }
}

//! Physical parameters, derived dimensionless quantities, regimes and thresholds.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// |Re Λ| ≤ this · |Λ| is classified as interjacent.
pub const INTERJACENT_REL_TOL: f64 = 1e-9;

/// Pump-to-subharmonic loss ratio below which adiabatic elimination is questionable.
pub const ADIABATIC_RATIO: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NopoParams {
    pub kappa: f64,
    pub gamma: f64,
    pub gamma3: f64,
    pub delta: f64,
    pub delta3: f64,
    /// |E|
    pub pump_amplitude: f64,
    /// Φ_E in radians.
    pub pump_phase: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Monostable,
    Interjacent,
    Bistable,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Monostable => "Monostable",
            Regime::Interjacent => "Interjacent",
            Regime::Bistable => "Bistable",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParamWarning {
    /// gamma3/gamma below [`ADIABATIC_RATIO`].
    AdiabaticValidity { ratio: f64 },
}

impl std::fmt::Display for ParamWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParamWarning::AdiabaticValidity { ratio } => write!(
                f,
                "gamma3/gamma = {ratio} < {ADIABATIC_RATIO}: pump elimination assumes a strongly damped pump mode"
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdSet {
    pub p_mono: f64,
    pub p_bistable_lower: f64,
    pub p_bistable_upper: f64,
    /// Threshold pump amplitude |γ̄γ̄₃|/κ.
    pub e_threshold: f64,
    /// Threshold in E_s units.
    pub e_s_threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DerivedParams {
    pub gamma_bar: Complex64,
    pub gamma_bar3: Complex64,
    pub lambda: Complex64,
    pub epsilon: Complex64,
    pub p: f64,
    pub e_s: f64,
    pub regime: Regime,
    pub thresholds: ThresholdSet,
    pub warnings: Vec<ParamWarning>,
}

impl NopoParams {
    /// Parameters with zero pump.
    pub fn new(kappa: f64, gamma: f64, gamma3: f64, delta: f64, delta3: f64) -> Self {
        NopoParams {
            kappa,
            gamma,
            gamma3,
            delta,
            delta3,
            pump_amplitude: 0.0,
            pump_phase: 0.0,
        }
    }

    /// Same parameters with the pump amplitude set from E_s = 2κ|E|/(γγ₃).
    pub fn with_es(mut self, e_s: f64) -> Self {
        self.pump_amplitude = e_s * self.gamma * self.gamma3 / (2.0 * self.kappa);
        self
    }

    /// Same parameters with the pump amplitude set from p = |2E/κ|².
    pub fn with_p(mut self, p: f64) -> Self {
        self.pump_amplitude = 0.5 * self.kappa * p.sqrt();
        self
    }

    pub fn with_phase(mut self, phi: f64) -> Self {
        self.pump_phase = phi;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let rates = [
            ("kappa", self.kappa),
            ("gamma", self.gamma),
            ("gamma3", self.gamma3),
        ];
        for (name, v) in rates {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParams(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if !(self.pump_amplitude >= 0.0) || !self.pump_amplitude.is_finite() {
            return Err(Error::InvalidParams(format!(
                "pump amplitude must be non-negative and finite, got {}",
                self.pump_amplitude
            )));
        }
        if !self.delta.is_finite() || !self.delta3.is_finite() || !self.pump_phase.is_finite() {
            return Err(Error::InvalidParams(
                "detunings and pump phase must be finite".into(),
            ));
        }
        Ok(())
    }

    /// Λ = 2γ̄γ̄₃/κ².
    pub fn lambda(&self) -> Complex64 {
        let gb = Complex64::new(self.gamma, -self.delta);
        let gb3 = Complex64::new(self.gamma3, -self.delta3);
        gb * gb3 * (2.0 / (self.kappa * self.kappa))
    }

    /// Scaled pump intensity p = |2E/κ|².
    pub fn p(&self) -> f64 {
        let r = 2.0 * self.pump_amplitude / self.kappa;
        r * r
    }

    /// E_s = 2κ|E|/(γγ₃).
    pub fn e_s(&self) -> f64 {
        2.0 * self.kappa * self.pump_amplitude / (self.gamma * self.gamma3)
    }

    /// Complex pump field E = |E|e^{iΦ_E}.
    pub fn pump(&self) -> Complex64 {
        Complex64::from_polar(self.pump_amplitude, self.pump_phase)
    }
}

pub fn classify(lambda: Complex64) -> Regime {
    if lambda.re.abs() <= INTERJACENT_REL_TOL * lambda.norm() {
        Regime::Interjacent
    } else if lambda.re > 0.0 {
        Regime::Monostable
    } else {
        Regime::Bistable
    }
}

pub fn derive(params: &NopoParams) -> Result<DerivedParams> {
    params.validate()?;
    let gamma_bar = Complex64::new(params.gamma, -params.delta);
    let gamma_bar3 = Complex64::new(params.gamma3, -params.delta3);
    let lambda = params.lambda();
    let mut warnings = Vec::new();
    let ratio = params.gamma3 / params.gamma;
    if ratio < ADIABATIC_RATIO {
        warnings.push(ParamWarning::AdiabaticValidity { ratio });
    }
    let mut d = DerivedParams {
        gamma_bar,
        gamma_bar3,
        lambda,
        epsilon: params.pump() / params.kappa,
        p: params.p(),
        e_s: params.e_s(),
        regime: classify(lambda),
        thresholds: ThresholdSet {
            p_mono: 0.0,
            p_bistable_lower: 0.0,
            p_bistable_upper: 0.0,
            e_threshold: 0.0,
            e_s_threshold: 0.0,
        },
        warnings,
    };
    d.thresholds = thresholds(&d, params);
    Ok(d)
}

pub fn thresholds(derived: &DerivedParams, params: &NopoParams) -> ThresholdSet {
    let lam = derived.lambda;
    let prod = (derived.gamma_bar * derived.gamma_bar3).norm();
    ThresholdSet {
        p_mono: lam.norm_sqr(),
        p_bistable_lower: lam.im * lam.im,
        p_bistable_upper: lam.norm_sqr(),
        e_threshold: prod / params.kappa,
        e_s_threshold: 2.0 * prod / (params.gamma * params.gamma3),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig(delta: f64) -> NopoParams {
        NopoParams::new(0.5, 1.0, 18.0, delta, 2.0 * delta)
    }

    #[test]
    fn resonance_zero_pump() {
        let d = derive(&fig(0.0)).unwrap();
        assert_eq!(d.lambda, Complex64::new(144.0, 0.0));
        assert_eq!(d.p, 0.0);
        assert_eq!(d.e_s, 0.0);
        assert_eq!(d.regime, Regime::Monostable);
        assert_eq!(d.thresholds.p_mono, 20736.0);
        assert!((d.thresholds.e_s_threshold - 2.0).abs() < 1e-15);
        assert_eq!(d.thresholds.p_bistable_lower, 0.0);
    }

    #[test]
    fn figure_regimes() {
        assert_eq!(derive(&fig(1.0)).unwrap().regime, Regime::Monostable);
        assert_eq!(derive(&fig(3.0)).unwrap().regime, Regime::Interjacent);
        assert_eq!(derive(&fig(7.0)).unwrap().regime, Regime::Bistable);
    }

    #[test]
    fn detuned_threshold() {
        let d = derive(&fig(1.0)).unwrap();
        let expect = 2.0 * 2f64.sqrt() * 328f64.sqrt() / 18.0;
        assert!((d.thresholds.e_s_threshold - expect).abs() < 1e-12 * expect);
        assert!((d.thresholds.e_s_threshold - 2.846).abs() < 1e-3);
    }

    #[test]
    fn invalid_rates() {
        let mut p = fig(0.0);
        p.gamma = 0.0;
        assert!(matches!(derive(&p), Err(Error::InvalidParams(_))));
        let mut p = fig(0.0);
        p.pump_amplitude = -1.0;
        assert!(matches!(derive(&p), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn adiabatic_warning() {
        let d = derive(&NopoParams::new(0.5, 1.0, 5.0, 0.0, 0.0)).unwrap();
        assert_eq!(d.warnings.len(), 1);
        assert!(derive(&fig(0.0)).unwrap().warnings.is_empty());
    }
}

//! Scheme configuration: reconstruction parameter, diffusion damping, flux
//! reconstruction mode and time-derivative treatment.

use std::fmt;

use crate::error::{Error, Result};

/// Damping coefficient of the diffusive flux.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaSetting {
    /// `alpha = 1 / (3 (1 - kappa))`, the value that makes the diffusion
    /// scheme consistent with the convective reconstruction.
    Auto,
    Value(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ReconMode {
    /// Evaluate `f` at interpolated solution values.
    SolutionInterp,
    /// Interpolate pointwise flux samples `f(u_j)` directly.
    FluxInterp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TimeTreatment {
    /// Tridiagonal (1, 22, 1)/24 mass matrix inverted every stage.
    CoupledMass,
    /// Mass matrix replaced by the identity.
    LumpedMass,
    /// Finite-difference form with kappa = 1/3 and point forcing.
    QuickestFd,
    /// Explicit residual correction `Res - (1/24) d2(Res)`.
    VanLeerExplicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ForcingMode {
    CellAveraged,
    PointValue,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub kappa: f64,
    pub alpha: AlphaSetting,
    /// kappa used for the damping term of the diffusive flux, when it should
    /// differ from the convective one.
    pub diffusion_kappa: Option<f64>,
    pub recon: ReconMode,
    pub dissipation: bool,
    pub time: TimeTreatment,
    pub forcing: ForcingMode,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        Self::quick()
    }
}

impl SchemeConfig {
    /// kappa = 1/2 with the compatible damping coefficient and the coupled
    /// mass matrix.
    pub fn quick() -> Self {
        Self::with_kappa(0.5)
    }

    pub fn with_kappa(kappa: f64) -> Self {
        Self {
            kappa,
            alpha: AlphaSetting::Auto,
            diffusion_kappa: None,
            recon: ReconMode::SolutionInterp,
            dissipation: true,
            time: TimeTreatment::CoupledMass,
            forcing: ForcingMode::CellAveraged,
        }
    }

    /// Semi-discrete QUICKEST: kappa = 1/3, point forcing.
    pub fn quickest(recon: ReconMode) -> Self {
        Self {
            recon,
            time: TimeTreatment::QuickestFd,
            forcing: ForcingMode::PointValue,
            ..Self::with_kappa(1.0 / 3.0)
        }
    }

    pub fn time(mut self, time: TimeTreatment) -> Self {
        self.time = time;
        self
    }

    pub fn alpha(mut self, alpha: AlphaSetting) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn recon(mut self, recon: ReconMode) -> Self {
        self.recon = recon;
        self
    }

    pub fn forcing(mut self, forcing: ForcingMode) -> Self {
        self.forcing = forcing;
        self
    }

    pub fn dissipation(mut self, on: bool) -> Self {
        self.dissipation = on;
        self
    }

    pub fn damping_kappa(&self) -> f64 {
        self.diffusion_kappa.unwrap_or(self.kappa)
    }

    pub fn resolved_alpha(&self) -> Result<f64> {
        crate::flux::resolve_alpha(self.damping_kappa(), self.alpha)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.kappa.is_finite() {
            return Err(Error::Config(format!("kappa must be finite, got {}", self.kappa)));
        }
        self.resolved_alpha()?;
        if self.time == TimeTreatment::QuickestFd {
            if (self.kappa - 1.0 / 3.0).abs() > 1e-12 {
                return Err(Error::Config(format!(
                    "QUICKEST requires kappa = 1/3, got {}",
                    self.kappa
                )));
            }
            if self.forcing != ForcingMode::PointValue {
                return Err(Error::Config(
                    "QUICKEST is a finite-difference form and needs point-valued forcing".into(),
                ));
            }
        }
        Ok(())
    }

    /// Short human-readable label, also used as the CSV `scheme` column.
    pub fn label(&self) -> String {
        let mut s = format!("kappa={}", format_fraction(self.kappa));
        if let AlphaSetting::Value(a) = self.alpha {
            s.push_str(&format!(" alpha={}", format_fraction(a)));
        }
        s.push(' ');
        s.push_str(&self.time.to_string());
        if self.recon == ReconMode::FluxInterp {
            s.push_str(" flux-interp");
        }
        if !self.dissipation {
            s.push_str(" no-dissipation");
        }
        if self.forcing == ForcingMode::PointValue && self.time != TimeTreatment::QuickestFd {
            s.push_str(" point-forcing");
        }
        s
    }
}

impl fmt::Display for ReconMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReconMode::SolutionInterp => "solution",
            ReconMode::FluxInterp => "flux",
        })
    }
}

impl fmt::Display for TimeTreatment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TimeTreatment::CoupledMass => "coupled",
            TimeTreatment::LumpedMass => "lumped",
            TimeTreatment::QuickestFd => "quickest",
            TimeTreatment::VanLeerExplicit => "vanleer",
        })
    }
}

impl fmt::Display for ForcingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ForcingMode::CellAveraged => "cellavg",
            ForcingMode::PointValue => "point",
        })
    }
}

/// Renders common small fractions exactly (`1/3`, `2/3`, `4/3`, ...), other
/// values in shortest round-trip form.
pub fn format_fraction(v: f64) -> String {
    for den in 1..=12u32 {
        let num = (v * den as f64).round();
        if (num / den as f64 - v).abs() <= 4.0 * f64::EPSILON * v.abs().max(1.0) {
            return if den == 1 {
                format!("{}", num as i64)
            } else {
                format!("{}/{}", num as i64, den)
            };
        }
    }
    format!("{v}")
}

/// Parses `0.5`, `1/3`, `-1/6`.
pub fn parse_fraction(s: &str) -> Result<f64> {
    let s = s.trim();
    let bad = || Error::Config(format!("cannot parse number '{s}'"));
    let v = match s.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.trim().parse().map_err(|_| bad())?;
            let d: f64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0.0 {
                return Err(bad());
            }
            n / d
        }
        None => s.parse().map_err(|_| bad())?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quickest_requires_one_third() {
        assert!(SchemeConfig::quickest(ReconMode::FluxInterp).validate().is_ok());
        let bad = SchemeConfig::quick().time(TimeTreatment::QuickestFd).forcing(ForcingMode::PointValue);
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
        let bad = SchemeConfig::quickest(ReconMode::SolutionInterp).forcing(ForcingMode::CellAveraged);
        assert!(bad.validate().is_err());
    }

    #[test]
    fn auto_alpha_rejects_central() {
        assert!(SchemeConfig::with_kappa(1.0).validate().is_err());
        let explicit = SchemeConfig::with_kappa(1.0).alpha(AlphaSetting::Value(1.0));
        assert!(explicit.validate().is_ok());
    }

    #[test]
    fn fractions() {
        assert_eq!(format_fraction(0.5), "1/2");
        assert_eq!(format_fraction(1.0 / 3.0), "1/3");
        assert_eq!(format_fraction(4.0 / 3.0), "4/3");
        assert_eq!(format_fraction(0.0), "0");
        assert_eq!(format_fraction(0.1234567), "0.1234567");
        assert_eq!(parse_fraction("1/3").unwrap(), 1.0 / 3.0);
        assert_eq!(parse_fraction(" -1/6 ").unwrap(), -1.0 / 6.0);
        assert_eq!(parse_fraction("0.75").unwrap(), 0.75);
        assert!(parse_fraction("1/0").is_err());
        assert!(parse_fraction("abc").is_err());
    }

    #[test]
    fn labels_are_distinct() {
        let a = SchemeConfig::quick().label();
        let b = SchemeConfig::quick().time(TimeTreatment::LumpedMass).label();
        let c = SchemeConfig::quickest(ReconMode::FluxInterp).label();
        let d = SchemeConfig::quickest(ReconMode::SolutionInterp).label();
        assert_eq!(a, "kappa=1/2 coupled");
        assert_eq!(c, "kappa=1/3 quickest flux-interp");
        assert!(a != b && c != d);
    }
}

//! Upwind convective flux and alpha-damping diffusive flux at a face.

use crate::domain::FluxFunction;
use crate::error::{Error, Result};
use crate::reconstruction::FaceData;
use crate::scheme::AlphaSetting;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceFlux {
    pub convective: f64,
    pub diffusive: f64,
    pub total: f64,
}

impl FaceFlux {
    pub fn new(convective: f64, diffusive: f64) -> Self {
        Self {
            convective,
            diffusive,
            total: convective + diffusive,
        }
    }
}

/// Dissipation coefficient `|f'(u)|`, evaluated at the mean of the traces.
#[inline]
pub fn dissipation_coefficient(u_l: f64, u_r: f64, flux: FluxFunction) -> f64 {
    flux.derivative(0.5 * (u_l + u_r)).abs()
}

/// `1/2 [f(u_L) + f(u_R)] - D/2 (u_R - u_L)`.
#[inline]
pub fn convective_flux(u_l: f64, u_r: f64, flux: FluxFunction, dissipation: bool) -> f64 {
    convective_flux_from_traces(flux.eval(u_l), flux.eval(u_r), u_l, u_r, flux, dissipation)
}

/// Same as [`convective_flux`] but with the averaged part built from given
/// flux traces, as in direct flux reconstruction. The dissipation term still
/// uses the solution traces.
#[inline]
pub fn convective_flux_from_traces(
    f_l: f64,
    f_r: f64,
    u_l: f64,
    u_r: f64,
    flux: FluxFunction,
    dissipation: bool,
) -> f64 {
    let avg = 0.5 * (f_l + f_r);
    if dissipation {
        avg - 0.5 * dissipation_coefficient(u_l, u_r, flux) * (u_r - u_l)
    } else {
        avg
    }
}

/// `-nu [((u_x)_L + (u_x)_R) / 2 + alpha / (2h) (u_R - u_L)]`, i.e. minus nu
/// times the damped face gradient.
#[inline]
pub fn diffusive_flux(face: &FaceData, nu: f64, alpha: f64, h: f64) -> f64 {
    if nu == 0.0 {
        return 0.0;
    }
    -0.5 * nu * (face.dudx_l + face.dudx_r) - nu * alpha / (2.0 * h) * (face.u_r - face.u_l)
}

pub fn resolve_alpha(kappa: f64, alpha: AlphaSetting) -> Result<f64> {
    match alpha {
        AlphaSetting::Value(a) if a.is_finite() => Ok(a),
        AlphaSetting::Value(a) => Err(Error::Config(format!("alpha must be finite, got {a}"))),
        AlphaSetting::Auto if kappa == 1.0 => Err(Error::Config(
            "automatic alpha = 1/(3(1 - kappa)) is undefined for kappa = 1".into(),
        )),
        AlphaSetting::Auto => Ok(1.0 / (3.0 * (1.0 - kappa))),
    }
}

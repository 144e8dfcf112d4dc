//! kappa-interpolation of point values (or pointwise fluxes) to the face
//! `i + 1/2`, and face derivatives of the local quadratic interpolants.
//!
//! No limiting is applied anywhere.

use crate::domain::{FluxFunction, State};

/// Traces at face `i + 1/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceData {
    pub u_l: f64,
    pub u_r: f64,
    pub dudx_l: f64,
    pub dudx_r: f64,
}

/// Left trace at `i + 1/2` from `(v_{i-1}, v_i, v_{i+1})`.
#[inline]
pub fn interp_left(v_im1: f64, v_i: f64, v_ip1: f64, kappa: f64) -> f64 {
    0.5 * (v_i + v_ip1) - 0.25 * (1.0 - kappa) * (v_ip1 - 2.0 * v_i + v_im1)
}

/// Right trace at `i + 1/2` from `(v_i, v_{i+1}, v_{i+2})`.
#[inline]
pub fn interp_right(v_i: f64, v_ip1: f64, v_ip2: f64, kappa: f64) -> f64 {
    0.5 * (v_ip1 + v_i) - 0.25 * (1.0 - kappa) * (v_ip2 - 2.0 * v_ip1 + v_i)
}

/// Solution traces and derivatives at face `i + 1/2`.
///
/// Both one-sided quadratics have the same slope at the face on a uniform
/// grid, so `dudx_l == dudx_r == (u_{i+1} - u_i) / h`.
#[inline]
pub fn face_states(state: &State, i: usize, kappa: f64) -> FaceData {
    let [um1, u0, up1, up2] = stencil(state, i, |u| u);
    let slope = (up1 - u0) / state.grid().h();
    FaceData {
        u_l: interp_left(um1, u0, up1, kappa),
        u_r: interp_right(u0, up1, up2, kappa),
        dudx_l: slope,
        dudx_r: slope,
    }
}

/// Directly reconstructed flux traces `(f_L, f_R)` at face `i + 1/2`.
#[inline]
pub fn face_flux_states(state: &State, flux: FluxFunction, i: usize, kappa: f64) -> (f64, f64) {
    let [fm1, f0, fp1, fp2] = stencil(state, i, |u| flux.eval(u));
    (interp_left(fm1, f0, fp1, kappa), interp_right(f0, fp1, fp2, kappa))
}

#[inline]
fn stencil(state: &State, i: usize, map: impl Fn(f64) -> f64) -> [f64; 4] {
    [
        map(state.around(i, -1)),
        map(state.at(i)),
        map(state.around(i, 1)),
        map(state.around(i, 2)),
    ]
}

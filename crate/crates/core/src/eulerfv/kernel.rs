//! One triangle update: three Lax-Friedrichs face fluxes and a forward Euler step.
//!
//! States are `[rho, rho*u, rho*v, E]`. Each face carries its outward unit
//! normal and length. Fluxes are evaluated in the face frame (x along the
//! normal), rotated back and scaled by the face length.

use super::scalar::{Scalar, Stage};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceGeom<T> {
    pub nx: T,
    pub ny: T,
    pub len: T,
}

/// Pressure, sound speed and `1/rho` of a conservative state.
#[inline(always)]
pub(crate) fn primitive<T: Scalar>(q: &[T; 4], gamma: T, gm1: T) -> (T, T, T) {
    T::stage(Stage::Primitive);
    let inv = T::lit(1.0) / q[0];
    let u = q[1] * inv;
    let v = q[2] * inv;
    let ke = T::lit(0.5) * (q[1] * u + q[2] * v);
    let p = gm1 * (q[3] - ke);
    let c = (gamma * p * inv).sqrt();
    (p, c, inv)
}

/// Rotated state `[rho, m_n, m_t, E]` and normal velocity.
#[inline(always)]
fn rotate<T: Scalar>(q: &[T; 4], inv: T, f: &FaceGeom<T>) -> ([T; 4], T) {
    T::stage(Stage::Rotate);
    let mn = q[1] * f.nx + q[2] * f.ny;
    let mt = q[2] * f.nx - q[1] * f.ny;
    let un = mn * inv;
    ([q[0], mn, mt, q[3]], un)
}

/// Exact Euler flux along x of a face-frame state.
#[inline(always)]
fn physical_flux<T: Scalar>(r: &[T; 4], un: T, p: T) -> [T; 4] {
    T::stage(Stage::PhysicalFlux);
    [r[1], r[1] * un + p, r[2] * un, (r[3] + p) * un]
}

/// Twice the face-frame Lax-Friedrichs flux:
/// `(F_L + F_R) - (|u_mean| + c_mean) (U_R - U_L)`.
#[inline(always)]
#[allow(clippy::too_many_arguments)]
pub(crate) fn doubled_flux<T: Scalar>(
    rl: &[T; 4],
    unl: T,
    pl: T,
    cl: T,
    rr: &[T; 4],
    unr: T,
    pr: T,
    cr: T,
    dissipation: bool,
) -> [T; 4] {
    let fl = physical_flux(rl, unl, pl);
    let fr = physical_flux(rr, unr, pr);
    T::stage(Stage::Central);
    let mut g = [fl[0] + fr[0], fl[1] + fr[1], fl[2] + fr[2], fl[3] + fr[3]];
    if dissipation {
        T::stage(Stage::Dissipation);
        let lambda = T::lit(0.5) * ((unl + unr).abs() + cl + cr);
        for k in 0..4 {
            g[k] = g[k] - lambda * (rr[k] - rl[k]);
        }
    }
    g
}

/// `F_f |n_f|` in the global frame for the face between `own` and `nbr`.
#[inline(always)]
#[allow(clippy::too_many_arguments)]
fn face_flux<T: Scalar>(
    own: &[T; 4],
    p_own: T,
    c_own: T,
    inv_own: T,
    nbr: &[T; 4],
    f: &FaceGeom<T>,
    gamma: T,
    gm1: T,
    dissipation: bool,
) -> [T; 4] {
    let (rl, unl) = rotate(own, inv_own, f);
    let (pr, cr, inv_nbr) = primitive(nbr, gamma, gm1);
    let (rr, unr) = rotate(nbr, inv_nbr, f);
    let g = doubled_flux(&rl, unl, p_own, c_own, &rr, unr, pr, cr, dissipation);
    T::stage(Stage::RotateBack);
    let gx = g[1] * f.nx - g[2] * f.ny;
    let gy = g[1] * f.ny + g[2] * f.nx;
    T::stage(Stage::Scale);
    let h = T::lit(0.5) * f.len;
    [h * g[0], h * gx, h * gy, h * g[3]]
}

/// `U - dt / V * sum_f F_f |n_f|` for one triangle.
#[inline(always)]
#[allow(clippy::too_many_arguments)]
pub fn cell_update<T: Scalar>(
    own: &[T; 4],
    nbrs: &[[T; 4]; 3],
    faces: &[FaceGeom<T>; 3],
    dt: T,
    volume: T,
    gamma: T,
    gm1: T,
    dissipation: bool,
) -> [T; 4] {
    let (p, c, inv) = primitive(own, gamma, gm1);
    let f0 = face_flux(own, p, c, inv, &nbrs[0], &faces[0], gamma, gm1, dissipation);
    let f1 = face_flux(own, p, c, inv, &nbrs[1], &faces[1], gamma, gm1, dissipation);
    let f2 = face_flux(own, p, c, inv, &nbrs[2], &faces[2], gamma, gm1, dissipation);
    T::stage(Stage::Update);
    let k = dt / volume;
    let mut out = *own;
    for i in 0..4 {
        out[i] = own[i] - k * (f0[i] + f1[i] + f2[i]);
    }
    out
}

use crate::quadrature::GaussLegendre;
use crate::reference_element::ReferenceElement;
use crate::scalar::{Power, Real};

use super::Mesh;

/// Residuals of the discrete equations with an exact solution inserted, one
/// entry per test function `(i, j)`.
#[derive(Debug, Clone)]
pub struct Residuals<T> {
    pub r: Vec<T>,
    pub s: Vec<T>,
    /// `max |r_ij| / h`, a pointwise-scale measure independent of the cell count.
    pub r_max: T,
    /// `max |s_ij| / h`.
    pub s_max: T,
}

/// Residuals of the `u` and `φ` equations for exact fields `u(x, t)` and
/// `φ(x, t)` over the window `[t, t + dt]`.
///
/// Transport terms use integration by parts, so no derivative of the exact
/// solution is needed. With `periodic`, the jumps at `a` and `b` pair the
/// two ends of the domain; otherwise the boundary traces are taken from the
/// exact solution itself.
#[allow(clippy::too_many_arguments)]
pub fn consistency_residuals<T: Real>(
    u: impl Fn(T, T) -> T,
    phi: impl Fn(T, T) -> T,
    p: T,
    mesh: &Mesh<T>,
    elem: &ReferenceElement<T>,
    t: T,
    dt: T,
    periodic: bool,
) -> Residuals<T> {
    let nb = elem.n_basis();
    let cells = mesh.cells();
    let h = mesh.h();
    let half_h = h * T::lit(0.5);
    let jac = T::lit(2.0) / h;
    let pow = Power::new(p);
    let rule = GaussLegendre::<T>::new(12);
    let tab: Vec<(T, Vec<T>, Vec<T>)> = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&xi, &w)| (w, elem.basis_values(xi), elem.basis_derivatives(xi)))
        .collect();
    let t1 = t + dt;

    let mut r = vec![T::zero(); cells * nb];
    let mut s = vec![T::zero(); cells * nb];
    for i in 0..cells {
        let xl = mesh.interface(i);
        let xr = mesh.interface(i + 1);
        // Left neighbour's trace at x_{i-1/2} and right neighbour's at x_{i+1/2}.
        let (u_from_left, phi_from_right) = if periodic {
            let ul = if i == 0 { mesh.b() } else { xl };
            let pr = if i + 1 == cells { mesh.a() } else { xr };
            (u(ul, t), phi(pr, t))
        } else {
            (u(xl, t), phi(xr, t))
        };
        let u_jump = u(xl, t) - u_from_left;
        let phi_jump = phi_from_right - phi(xr, t);
        let nodal_pow: Vec<T> = elem
            .nodes
            .iter()
            .map(|&xi| pow.abs_pow(u(mesh.map(i, xi), t1)))
            .collect();
        for j in 0..nb {
            let mut ru = T::zero();
            let mut sp = T::zero();
            for ((w, vals, ders), &qx) in tab.iter().zip(&rule.nodes) {
                let x = mesh.map(i, qx);
                let u0 = u(x, t);
                let p0 = phi(x, t);
                let du = (u(x, t1) - u0) / dt;
                let dp = (phi(x, t1) - p0) / dt;
                let wj = *w * half_h;
                // ∫ (∂_t u) φ_j - ∫ u φ_j' - ∫ φ φ_j
                ru += wj * (du * vals[j] - u0 * ders[j] * jac - p0 * vals[j]);
                // ∫ (∂_t φ) ψ_j + ∫ φ ψ_j'
                sp += wj * (dp * vals[j] + p0 * ders[j] * jac);
            }
            let lv = elem.left_values[j];
            let rv = elem.right_values[j];
            ru += u(xr, t) * rv - u(xl, t) * lv + u_jump * lv;
            sp -= phi(xr, t) * rv - phi(xl, t) * lv;
            sp -= phi_jump * rv;
            let src: T = (0..nb).map(|l| elem.m[(j, l)] * nodal_pow[l]).sum::<T>() * h;
            sp -= src;
            r[i * nb + j] = ru;
            s[i * nb + j] = sp;
        }
    }
    let r_max = r.iter().map(|x| x.abs()).fold(T::zero(), T::max) / h;
    let s_max = s.iter().map(|x| x.abs()).fold(T::zero(), T::max) / h;
    Residuals { r, s, r_max, s_max }
}

//! Fixed-size update kernels, monomorphized per polynomial degree.

use std::array;

use crate::reference_element::ReferenceElement;
use crate::scalar::{fast_max, Power, Real};

/// Unscaled per-step sums produced while sweeping: `Σ α_j (·)` over all cells.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RawSums<T> {
    pub d_u: T,
    pub d_phi: T,
    pub u: T,
    pub phi: T,
    pub sup_u: T,
    pub sup_phi: T,
}

pub(super) struct Ops<T, const N: usize> {
    /// `E = M⁻¹(R + A)`
    e: [[T; N]; N],
    /// `M⁻¹B = -F`
    fb: [[T; N]; N],
    /// `M⁻¹(R - D)`
    ps: [[T; N]; N],
    /// `M⁻¹C`
    pr: [[T; N]; N],
    alpha: [T; N],
    minv_left: [T; N],
    minv_right: [T; N],
}

impl<T: Real, const N: usize> Ops<T, N> {
    fn new(el: &ReferenceElement<T>) -> Self {
        let mat = |m: &crate::linalg::Matrix<T>| -> [[T; N]; N] {
            array::from_fn(|j| array::from_fn(|l| m[(j, l)]))
        };
        let minv_left = el.m_inv.matvec(&el.left_values);
        let minv_right = el.m_inv.matvec(&el.right_values);
        Ops {
            e: mat(&el.e),
            fb: mat(&el.f.scale(-T::one())),
            ps: mat(&el.phi_self),
            pr: mat(&el.phi_right),
            alpha: array::from_fn(|j| el.alpha[j]),
            minv_left: array::from_fn(|j| minv_left[j]),
            minv_right: array::from_fn(|j| minv_right[j]),
        }
    }
}

#[inline(always)]
fn matvec<T: Real, const N: usize>(m: &[[T; N]; N], x: &[T; N]) -> [T; N] {
    array::from_fn(|j| {
        let mut s = T::zero();
        for l in 0..N {
            s += m[j][l] * x[l];
        }
        s
    })
}

#[inline(always)]
fn load<T: Real, const N: usize>(v: &[T], i: usize) -> [T; N] {
    array::from_fn(|l| v[i * N + l])
}

/// One explicit step in place. The full `u` sweep runs before the `φ` sweep,
/// which sees the updated `u` in its source term.
fn step_n<T: Real, const N: usize>(
    ops: &Ops<T, N>,
    u: &mut [T],
    phi: &mut [T],
    r: T,
    dt: T,
    pow: Power<T>,
    inflow: Option<(T, T)>,
) -> RawSums<T> {
    let cells = u.len() / N;

    let first = match inflow {
        None => matvec(&ops.fb, &load::<T, N>(u, cells - 1)),
        Some((g, _)) => array::from_fn(|j| ops.minv_left[j] * g),
    };
    let mut prev = [T::zero(); N];
    // One accumulator per basis slot keeps the reductions off a single chain.
    let (mut d_u, mut s_u, mut sup_u) = ([T::zero(); N], [T::zero(); N], [T::zero(); N]);
    for i in 0..cells {
        let cur: [T; N] = load(u, i);
        let coupling = if i == 0 { first } else { matvec(&ops.fb, &prev) };
        let own = matvec(&ops.e, &cur);
        for j in 0..N {
            let inc = -r * (own[j] - coupling[j]) + dt * phi[i * N + j];
            let v = cur[j] + inc;
            u[i * N + j] = v;
            d_u[j] += inc;
            s_u[j] += v;
            sup_u[j] = fast_max(sup_u[j], v.abs());
        }
        prev = cur;
    }

    let first = match inflow {
        None => matvec(&ops.pr, &load::<T, N>(phi, 0)),
        Some((_, g)) => array::from_fn(|j| ops.minv_right[j] * g),
    };
    let mut next = [T::zero(); N];
    let (mut d_phi, mut s_phi, mut sup_phi) = ([T::zero(); N], [T::zero(); N], [T::zero(); N]);
    for i in (0..cells).rev() {
        let cur: [T; N] = load(phi, i);
        let coupling = if i == cells - 1 { first } else { matvec(&ops.pr, &next) };
        let own = matvec(&ops.ps, &cur);
        for j in 0..N {
            let inc = r * (own[j] + coupling[j]) + dt * pow.abs_pow(u[i * N + j]);
            let v = cur[j] + inc;
            phi[i * N + j] = v;
            d_phi[j] += inc;
            s_phi[j] += v;
            sup_phi[j] = fast_max(sup_phi[j], v.abs());
        }
        next = cur;
    }

    let weighted = |acc: [T; N]| (0..N).map(|j| ops.alpha[j] * acc[j]).sum::<T>();
    let peak = |acc: [T; N]| acc.into_iter().fold(T::zero(), fast_max);
    let (d_u, s_u, mut sup_u) = (weighted(d_u), weighted(s_u), peak(sup_u));
    let (d_phi, s_phi, mut sup_phi) = (weighted(d_phi), weighted(s_phi), peak(sup_phi));

    // `max` drops NaN; the positive-weight sums do not.
    if !s_u.is_finite() {
        sup_u = T::nan();
    }
    if !s_phi.is_finite() {
        sup_phi = T::nan();
    }
    RawSums {
        d_u,
        d_phi,
        u: s_u,
        phi: s_phi,
        sup_u,
        sup_phi,
    }
}

pub(crate) enum Kernel<T> {
    K0(Box<Ops<T, 1>>),
    K1(Box<Ops<T, 2>>),
    K2(Box<Ops<T, 3>>),
    K3(Box<Ops<T, 4>>),
    K4(Box<Ops<T, 5>>),
    K5(Box<Ops<T, 6>>),
    K6(Box<Ops<T, 7>>),
    K7(Box<Ops<T, 8>>),
}

impl<T: Real> Kernel<T> {
    pub fn new(el: &ReferenceElement<T>) -> Self {
        match el.k {
            0 => Kernel::K0(Box::new(Ops::new(el))),
            1 => Kernel::K1(Box::new(Ops::new(el))),
            2 => Kernel::K2(Box::new(Ops::new(el))),
            3 => Kernel::K3(Box::new(Ops::new(el))),
            4 => Kernel::K4(Box::new(Ops::new(el))),
            5 => Kernel::K5(Box::new(Ops::new(el))),
            6 => Kernel::K6(Box::new(Ops::new(el))),
            7 => Kernel::K7(Box::new(Ops::new(el))),
            k => unreachable!("reference element of degree {k} cannot exist"),
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn step(
        &self,
        u: &mut [T],
        phi: &mut [T],
        r: T,
        dt: T,
        pow: Power<T>,
        inflow: Option<(T, T)>,
    ) -> RawSums<T> {
        match self {
            Kernel::K0(o) => step_n(o, u, phi, r, dt, pow, inflow),
            Kernel::K1(o) => step_n(o, u, phi, r, dt, pow, inflow),
            Kernel::K2(o) => step_n(o, u, phi, r, dt, pow, inflow),
            Kernel::K3(o) => step_n(o, u, phi, r, dt, pow, inflow),
            Kernel::K4(o) => step_n(o, u, phi, r, dt, pow, inflow),
            Kernel::K5(o) => step_n(o, u, phi, r, dt, pow, inflow),
            Kernel::K6(o) => step_n(o, u, phi, r, dt, pow, inflow),
            Kernel::K7(o) => step_n(o, u, phi, r, dt, pow, inflow),
        }
    }
}

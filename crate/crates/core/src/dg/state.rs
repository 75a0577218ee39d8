use crate::scalar::Real;

/// Coefficients of `u_h` and `φ_h` at time `tⁿ`, stored cell-major:
/// entry `i * n_basis + j` is the `j`-th degree of freedom of cell `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState<T> {
    pub u: Vec<T>,
    pub phi: Vec<T>,
    pub t: T,
    pub n: usize,
    n_basis: usize,
}

impl<T: Real> FieldState<T> {
    pub fn new(u: Vec<T>, phi: Vec<T>, n_basis: usize) -> Self {
        assert!(n_basis > 0);
        assert_eq!(u.len(), phi.len(), "u and phi must have equal length");
        assert_eq!(u.len() % n_basis, 0, "length must be a multiple of n_basis");
        FieldState {
            u,
            phi,
            t: T::zero(),
            n: 0,
            n_basis,
        }
    }

    pub fn zeros(cells: usize, n_basis: usize) -> Self {
        Self::new(
            vec![T::zero(); cells * n_basis],
            vec![T::zero(); cells * n_basis],
            n_basis,
        )
    }

    pub fn n_basis(&self) -> usize {
        self.n_basis
    }

    pub fn cells(&self) -> usize {
        self.u.len() / self.n_basis
    }

    pub fn cell_u(&self, i: usize) -> &[T] {
        &self.u[i * self.n_basis..(i + 1) * self.n_basis]
    }

    pub fn cell_phi(&self, i: usize) -> &[T] {
        &self.phi[i * self.n_basis..(i + 1) * self.n_basis]
    }

    pub fn is_finite(&self) -> bool {
        self.u.iter().chain(&self.phi).all(|x| x.is_finite())
    }

    /// Cyclic shift by `s` cells: cell `i` moves to `i + s`.
    pub fn shifted_cells(&self, s: usize) -> Self {
        let cells = self.cells();
        let nb = self.n_basis;
        let rot = |v: &[T]| {
            let mut out = v.to_vec();
            out.rotate_right((s % cells) * nb);
            out
        };
        FieldState {
            u: rot(&self.u),
            phi: rot(&self.phi),
            t: self.t,
            n: self.n,
            n_basis: nb,
        }
    }
}

/// Maximum absolute value, `NaN` if any entry is not finite.
pub fn max_abs<T: Real>(v: &[T]) -> T {
    let mut m = T::zero();
    for &x in v {
        if !x.is_finite() {
            return T::nan();
        }
        m = m.max(x.abs());
    }
    m
}

/// `(‖u_h‖_∞, ‖φ_h‖_∞)` over all coefficients.
pub fn sup_norm<T: Real>(state: &FieldState<T>) -> (T, T) {
    (max_abs(&state.u), max_abs(&state.phi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sup_norm_examples() {
        let z = FieldState::<f64>::zeros(3, 2);
        assert_eq!(sup_norm(&z), (0.0, 0.0));
        let mut s = z.clone();
        s.phi[4] = -5.0;
        assert_eq!(sup_norm(&s), (0.0, 5.0));
        s.u[1] = f64::INFINITY;
        assert!(sup_norm(&s).0.is_nan());
    }

    #[test]
    fn shift_rotates_cells() {
        let s = FieldState::new(vec![1.0, 2.0, 3.0, 4.0], vec![0.0; 4], 2);
        assert_eq!(s.shifted_cells(1).u, vec![3.0, 4.0, 1.0, 2.0]);
    }
}

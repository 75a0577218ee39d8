use crate::linalg::Matrix;
use crate::reference_element::ReferenceElement;
use crate::scalar::Real;

/// Global block operators of the periodic scheme written as
/// `Uⁿ⁺¹ = M_n Uⁿ + Δt Φⁿ` and `Φⁿ⁺¹ = N_n Φⁿ + Δt f(Uⁿ⁺¹)`, for
/// `dt_over_h = Δtⁿ/h`.
///
/// Only meant for verification; the solver never forms these.
pub fn assemble_update_operators<T: Real>(
    elem: &ReferenceElement<T>,
    cells: usize,
    dt_over_h: T,
) -> (Matrix<T>, Matrix<T>) {
    let nb = elem.n_basis();
    let n = cells * nb;
    let id = Matrix::<T>::identity(nb);
    let m_a = id.sub(&elem.e.scale(dt_over_h));
    let m_b = elem.f.scale(-dt_over_h);
    let n_d = id.add(&elem.phi_self.scale(dt_over_h));
    let n_c = elem.phi_right.scale(dt_over_h);

    let mut mm = Matrix::zeros(n, n);
    let mut nn = Matrix::zeros(n, n);
    let put = |target: &mut Matrix<T>, bi: usize, bj: usize, block: &Matrix<T>| {
        for j in 0..nb {
            for l in 0..nb {
                target[(bi * nb + j, bj * nb + l)] = block[(j, l)];
            }
        }
    };
    for i in 0..cells {
        put(&mut mm, i, i, &m_a);
        put(&mut mm, i, (i + cells - 1) % cells, &m_b);
        put(&mut nn, i, i, &n_d);
        put(&mut nn, i, (i + 1) % cells, &n_c);
    }
    (mm, nn)
}

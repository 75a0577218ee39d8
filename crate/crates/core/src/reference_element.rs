//! Degree-`k` Lagrange element on the reference interval `[-1, 1]`.
//!
//! Nodes are equispaced (endpoints included for `k >= 1`, the midpoint for
//! `k = 0`), so the basis integrals `α_j` are the closed Newton–Cotes weights
//! scaled to an interval of length two.
//!
//! Matrix conventions (cell `K_i` of width `h`, physical mass matrix `h·M`):
//!
//! * `M_{jl} = ½∫φ_j φ_l`, `R_{jl} = ∫φ_j φ_l'`
//! * `A_{jl} = φ_j(-1)φ_l(-1)`, `B_{jl} = φ_j(-1)φ_l(1)`
//! * `C_{jl} = φ_j(1)φ_l(-1)`, `D_{jl} = φ_j(1)φ_l(1)`
//! * `E = M⁻¹(R + A)`, `F = -M⁻¹B`, so the transport part of the `u` update is
//!   `U ← U - (Δt/h)(E Uⁱ + F Uⁱ⁻¹)`.

use log::debug;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use num_traits::ToPrimitive;

use crate::poly::{self, Coefficient, Polynomial, Rational};
use crate::scalar::Real;

pub const MAX_DEGREE: usize = 7;

/// Basis integrals `α_j` for degrees 0..=7 as `(numerators, denominator)`.
const ALPHA_TABLE: [(&[i64], i64); 8] = [
    (&[2], 1),
    (&[1, 1], 1),
    (&[1, 4, 1], 3),
    (&[1, 3, 3, 1], 4),
    (&[7, 32, 12, 32, 7], 45),
    (&[19, 75, 50, 50, 75, 19], 144),
    (&[41, 216, 27, 272, 27, 216, 41], 420),
    (&[751, 3577, 1323, 2989, 2989, 1323, 3577, 751], 8640),
];

/// Tabulated Newton–Cotes weights on `[-1, 1]` as exact rationals.
pub fn tabulated_alpha(k: usize) -> Result<Vec<Rational>> {
    let (nums, den) = ALPHA_TABLE.get(k).ok_or(Error::DegreeOutOfRange(k))?;
    Ok(nums
        .iter()
        .map(|&n| Rational::new(n as i128, *den as i128))
        .collect())
}

pub fn check_degree(k: usize) -> Result<()> {
    if k > MAX_DEGREE {
        Err(Error::DegreeOutOfRange(k))
    } else {
        Ok(())
    }
}

/// Cell matrices for a physical cell of width `h`.
#[derive(Debug, Clone, Serialize)]
#[serde(bound(serialize = "T: Real + Serialize"))]
pub struct CellMatrices<T> {
    pub m: Matrix<T>,
    pub r: Matrix<T>,
    pub a: Matrix<T>,
    pub b: Matrix<T>,
    pub c: Matrix<T>,
    pub d: Matrix<T>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(bound(serialize = "T: Real + Serialize"))]
pub struct ReferenceElement<T> {
    pub k: usize,
    pub nodes: Vec<T>,
    #[serde(rename = "M")]
    pub m: Matrix<T>,
    #[serde(rename = "M_inv")]
    pub m_inv: Matrix<T>,
    #[serde(rename = "R")]
    pub r: Matrix<T>,
    #[serde(rename = "A")]
    pub a: Matrix<T>,
    #[serde(rename = "B")]
    pub b: Matrix<T>,
    #[serde(rename = "C")]
    pub c: Matrix<T>,
    #[serde(rename = "D")]
    pub d: Matrix<T>,
    #[serde(rename = "E")]
    pub e: Matrix<T>,
    #[serde(rename = "F")]
    pub f: Matrix<T>,
    pub alpha: Vec<T>,
    pub rho_min: T,
    pub rho_max: T,
    /// `φ_j(-1)`.
    #[serde(skip)]
    pub left_values: Vec<T>,
    /// `φ_j(1)`.
    #[serde(skip)]
    pub right_values: Vec<T>,
    /// `M⁻¹(R - D)`, the cell-local transport operator of the `φ` equation.
    #[serde(skip)]
    pub phi_self: Matrix<T>,
    /// `M⁻¹C`, coupling of the `φ` equation to the right neighbour.
    #[serde(skip)]
    pub phi_right: Matrix<T>,
    /// Infinity-norm condition number of `M`.
    #[serde(skip)]
    pub mass_condition: T,
    #[serde(skip)]
    basis: Vec<Polynomial<f64>>,
}

fn rho_of<T: Real>(e: &Matrix<T>, f: &Matrix<T>) -> (T, T) {
    let pos = |x: T| x.max(T::zero());
    let rows: Vec<T> = (0..e.rows())
        .map(|j| {
            e.row(j)
                .iter()
                .zip(f.row(j))
                .map(|(&a, &b)| pos(a) + pos(b))
                .sum()
        })
        .collect();
    let min = rows.iter().copied().fold(T::infinity(), T::min);
    let max = rows.iter().copied().fold(T::neg_infinity(), T::max);
    (min, max)
}

impl<T: Real> ReferenceElement<T> {
    pub fn new(k: usize) -> Result<Self> {
        check_degree(k)?;
        let n = k + 1;
        let nodes64 = poly::equispaced_nodes::<f64>(k);
        let basis = poly::lagrange_basis(&nodes64);

        // Assemble in exact arithmetic so symmetric entries stay bitwise equal.
        let exact = poly::lagrange_basis(&poly::equispaced_nodes::<Rational>(k));
        let dexact: Vec<_> = exact.iter().map(Polynomial::derivative).collect();
        let one = Rational::from_int(1);
        let integral = |p: &Polynomial<Rational>| p.integrate(-one, one);
        let to_t = |q: Rational| T::lit(q.to_f64().expect("finite rational"));
        let half = Rational::new(1, 2);
        let m = Matrix::from_fn(n, n, |j, l| to_t(integral(&exact[j].mul(&exact[l])) * half));
        let r = Matrix::from_fn(n, n, |j, l| to_t(integral(&exact[j].mul(&dexact[l]))));
        let alpha: Vec<T> = exact.iter().map(|p| to_t(integral(p))).collect();

        let left_values: Vec<T> = exact.iter().map(|p| to_t(p.eval(-one))).collect();
        let right_values: Vec<T> = exact.iter().map(|p| to_t(p.eval(one))).collect();
        let outer = |u: &[T], v: &[T]| Matrix::from_fn(n, n, |j, l| u[j] * v[l]);
        let a = outer(&left_values, &left_values);
        let b = outer(&left_values, &right_values);
        let c = outer(&right_values, &left_values);
        let d = outer(&right_values, &right_values);

        let m_inv = m.inverse()?;
        let mass_condition = m.norm_inf() * m_inv.norm_inf();
        debug!("reference element k={k}: cond_inf(M) = {mass_condition:e}");

        let e = m_inv.matmul(&r.add(&a));
        let f = m_inv.matmul(&b).scale(-T::one());
        let phi_self = m_inv.matmul(&r.sub(&d));
        let phi_right = m_inv.matmul(&c);
        let (rho_min, rho_max) = rho_of(&e, &f);

        Ok(ReferenceElement {
            k,
            nodes: nodes64.iter().map(|&x| T::lit(x)).collect(),
            m,
            m_inv,
            r,
            a,
            b,
            c,
            d,
            e,
            f,
            alpha,
            rho_min,
            rho_max,
            left_values,
            right_values,
            phi_self,
            phi_right,
            mass_condition,
            basis,
        })
    }

    pub fn n_basis(&self) -> usize {
        self.k + 1
    }

    /// Values `φ_j(ξ)` at a reference coordinate.
    pub fn basis_values(&self, xi: T) -> Vec<T> {
        let x = xi.to_f64_lossy();
        self.basis.iter().map(|p| T::lit(p.eval(x))).collect()
    }

    /// Derivatives `φ_j'(ξ)` with respect to the reference coordinate.
    pub fn basis_derivatives(&self, xi: T) -> Vec<T> {
        let x = xi.to_f64_lossy();
        self.basis
            .iter()
            .map(|p| T::lit(p.derivative().eval(x)))
            .collect()
    }

    /// Evaluates the expansion `Σ_j c_j φ_j(ξ)`.
    pub fn evaluate(&self, coeffs: &[T], xi: T) -> T {
        self.basis_values(xi)
            .iter()
            .zip(coeffs)
            .map(|(&p, &c)| p * c)
            .sum()
    }

    /// Matrices of a physical cell of width `h`: only `M` scales.
    pub fn cell_matrices(&self, h: T) -> Result<CellMatrices<T>> {
        if !(h > T::zero()) || !h.is_finite() {
            return Err(Error::param("h", format!("cell width must be positive, got {h}")));
        }
        Ok(CellMatrices {
            m: self.m.scale(h),
            r: self.r.clone(),
            a: self.a.clone(),
            b: self.b.clone(),
            c: self.c.clone(),
            d: self.d.clone(),
        })
    }

    /// `λ = ((k+1)/2 · max_j α_j)^{1-p}`.
    pub fn lambda(&self, p: T) -> Result<T> {
        if !(p > T::one()) {
            return Err(Error::param("p", format!("exponent must exceed 1, got {p}")));
        }
        let amax = self.alpha.iter().map(|a| a.abs()).fold(T::zero(), T::max);
        let half_k1 = T::from_usize_lossy(self.k + 1) * T::lit(0.5);
        Ok((half_k1 * amax).powf(T::one() - p))
    }

    /// Row sums of `R + A - B`; all zero for a Lagrange basis.
    pub fn transport_row_sums(&self) -> Vec<T> {
        self.r.add(&self.a).sub(&self.b).row_sums()
    }

    /// Row sums of `E + F`; all zero for a Lagrange basis.
    pub fn update_row_sums(&self) -> Vec<T> {
        self.e.add(&self.f).row_sums()
    }
}

/// Free-function form of [`ReferenceElement::new`].
pub fn build_reference_element<T: Real>(k: usize) -> Result<ReferenceElement<T>> {
    ReferenceElement::new(k)
}

/// Free-function form of [`ReferenceElement::cell_matrices`].
pub fn mass_matrix_scaling<T: Real>(elem: &ReferenceElement<T>, h: T) -> Result<CellMatrices<T>> {
    elem.cell_matrices(h)
}

/// Free-function form of [`ReferenceElement::lambda`].
pub fn compute_lambda<T: Real>(elem: &ReferenceElement<T>, p: T) -> Result<T> {
    elem.lambda(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn assert_matrix(m: &Matrix<f64>, expected: &[Vec<f64>]) {
        assert!(
            m.max_abs_diff(&Matrix::from_rows(expected)) < 1e-13,
            "{m:?} != {expected:?}"
        );
    }

    #[test]
    fn degree_zero() {
        let el = ReferenceElement::<f64>::new(0).unwrap();
        assert_eq!(el.alpha, vec![2.0]);
        assert_matrix(&el.m, &[vec![1.0]]);
        assert_matrix(&el.r, &[vec![0.0]]);
        assert_matrix(&el.a, &[vec![1.0]]);
        assert_matrix(&el.b, &[vec![1.0]]);
        assert_matrix(&el.e, &[vec![1.0]]);
        assert_matrix(&el.f, &[vec![-1.0]]);
        assert_eq!((el.rho_min, el.rho_max), (1.0, 1.0));
        assert_eq!(el.nodes, vec![0.0]);
    }

    #[test]
    fn degree_one_symbolic_values() {
        let el = ReferenceElement::<f64>::new(1).unwrap();
        assert_matrix(&el.m, &[vec![1.0 / 3.0, 1.0 / 6.0], vec![1.0 / 6.0, 1.0 / 3.0]]);
        assert_matrix(&el.r, &[vec![-0.5, 0.5], vec![-0.5, 0.5]]);
        assert_matrix(&el.a, &[vec![1.0, 0.0], vec![0.0, 0.0]]);
        assert_matrix(&el.b, &[vec![0.0, 1.0], vec![0.0, 0.0]]);
        assert_matrix(&el.e, &[vec![3.0, 1.0], vec![-3.0, 1.0]]);
        assert_matrix(&el.f, &[vec![0.0, -4.0], vec![0.0, 2.0]]);
        assert_abs_diff_eq!(el.rho_min, 3.0, epsilon = 1e-13);
        assert_abs_diff_eq!(el.rho_max, 4.0, epsilon = 1e-13);
        assert_eq!(el.alpha, vec![1.0, 1.0]);
    }

    #[test]
    fn degree_two_symbolic_mass_matrix() {
        // ½∫ of products of the quadratic Lagrange basis on {-1, 0, 1}.
        let el = ReferenceElement::<f64>::new(2).unwrap();
        assert_matrix(
            &el.m,
            &[
                vec![2.0 / 15.0, 1.0 / 15.0, -1.0 / 30.0],
                vec![1.0 / 15.0, 8.0 / 15.0, 1.0 / 15.0],
                vec![-1.0 / 30.0, 1.0 / 15.0, 2.0 / 15.0],
            ],
        );
    }

    #[test]
    fn degree_seven_alpha() {
        let el = ReferenceElement::<f64>::new(7).unwrap();
        let expected = [751.0, 3577.0, 1323.0, 2989.0, 2989.0, 1323.0, 3577.0, 751.0];
        for (a, e) in el.alpha.iter().zip(expected) {
            assert_abs_diff_eq!(*a, e / 8640.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn identities_and_inverse_for_all_degrees() {
        for k in 0..=MAX_DEGREE {
            let el = ReferenceElement::<f64>::new(k).unwrap();
            for s in el.transport_row_sums() {
                assert!(s.abs() <= 1e-12, "k={k} A.1 residual {s}");
            }
            for s in el.update_row_sums() {
                assert!(s.abs() <= 1e-12, "k={k} A.2 residual {s}");
            }
            let id = el.m.matmul(&el.m_inv);
            assert!(id.max_abs_diff(&Matrix::identity(k + 1)) <= 1e-12);
            assert!(el.m.max_abs_diff(&el.m.transpose()) == 0.0);
            assert!(el.rho_min <= el.rho_max);
            assert!(el.alpha.iter().all(|&a| a > 0.0));
            assert_abs_diff_eq!(el.alpha.iter().sum::<f64>(), 2.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn exact_alpha_matches_table() {
        for k in 0..=MAX_DEGREE {
            assert_eq!(poly::exact_basis_integrals(k), tabulated_alpha(k).unwrap(), "k={k}");
        }
    }

    #[test]
    fn rejects_degree_eight() {
        assert_eq!(
            ReferenceElement::<f64>::new(8).unwrap_err(),
            Error::DegreeOutOfRange(8)
        );
        assert!(tabulated_alpha(8).is_err());
    }

    #[test]
    fn cell_scaling() {
        let el0 = ReferenceElement::<f64>::new(0).unwrap();
        assert_matrix(&el0.cell_matrices(0.5).unwrap().m, &[vec![0.5]]);
        let el1 = ReferenceElement::<f64>::new(1).unwrap();
        assert_eq!(el1.cell_matrices(1.0).unwrap().m, el1.m);
        assert!(el1.cell_matrices(0.0).is_err());
        assert!(el1.cell_matrices(-1.0).is_err());
    }

    #[test]
    fn lambda_examples() {
        let el0 = ReferenceElement::<f64>::new(0).unwrap();
        assert_abs_diff_eq!(el0.lambda(2.7).unwrap(), 1.0, epsilon = 1e-15);
        let el1 = ReferenceElement::<f64>::new(1).unwrap();
        assert_abs_diff_eq!(el1.lambda(2.0).unwrap(), 1.0, epsilon = 1e-15);
        let el2 = ReferenceElement::<f64>::new(2).unwrap();
        assert_abs_diff_eq!(el2.lambda(3.0).unwrap(), 0.25, epsilon = 1e-14);
        assert!(el2.lambda(1.0).is_err());
        assert!(el2.lambda(0.5).is_err());
    }

    #[test]
    fn single_precision_element() {
        let el = ReferenceElement::<f32>::new(3).unwrap();
        for s in el.update_row_sums() {
            assert!(s.abs() < 1e-4);
        }
        assert!((el.alpha[1] - 0.75).abs() < 1e-6);
    }
}

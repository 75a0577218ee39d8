use crate::error::{Error, Result};
use crate::reference_element::ReferenceElement;
use crate::scalar::Real;

/// Uniform partition of `[a, b]` into `cells` intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh<T> {
    a: T,
    b: T,
    cells: usize,
    h: T,
}

impl<T: Real> Mesh<T> {
    pub fn new(a: T, b: T, cells: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::param("domain", format!("need a < b, got [{a}, {b}]")));
        }
        if cells < 2 {
            return Err(Error::param("cells", format!("need at least 2 cells, got {cells}")));
        }
        let h = (b - a) / T::from_usize_lossy(cells);
        Ok(Mesh { a, b, cells, h })
    }

    /// Unit interval with `cells` cells.
    pub fn unit(cells: usize) -> Result<Self> {
        Self::new(T::zero(), T::one(), cells)
    }

    pub fn a(&self) -> T {
        self.a
    }

    pub fn b(&self) -> T {
        self.b
    }

    pub fn length(&self) -> T {
        self.b - self.a
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn h(&self) -> T {
        self.h
    }

    /// `x_{i-1/2}` for `i` in `0..=cells` (zero-based cell index).
    pub fn interface(&self, i: usize) -> T {
        if i == self.cells {
            self.b
        } else {
            self.a + self.h * T::from_usize_lossy(i)
        }
    }

    pub fn interfaces(&self) -> Vec<T> {
        (0..=self.cells).map(|i| self.interface(i)).collect()
    }

    pub fn cell_center(&self, i: usize) -> T {
        (self.interface(i) + self.interface(i + 1)) * T::lit(0.5)
    }

    /// Affine map from reference coordinate `ξ ∈ [-1, 1]` into cell `i`.
    #[inline]
    pub fn map(&self, i: usize, xi: T) -> T {
        self.cell_center(i) + self.h * T::lit(0.5) * xi
    }

    /// Physical positions of all nodes, cell-major.
    pub fn nodal_positions(&self, elem: &ReferenceElement<T>) -> Vec<T> {
        (0..self.cells)
            .flat_map(|i| elem.nodes.iter().map(move |&xi| self.map(i, xi)))
            .collect()
    }

    /// Cell containing `x`, with `x` wrapped periodically into `[a, b)`.
    pub fn locate(&self, x: T) -> (usize, T) {
        let len = self.length();
        let mut y = (x - self.a) % len;
        if y < T::zero() {
            y += len;
        }
        let i = (y / self.h).floor().to_usize().unwrap_or(0).min(self.cells - 1);
        let xi = (y - self.h * T::from_usize_lossy(i)) / self.h * T::lit(2.0) - T::one();
        (i, xi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariants() {
        let m = Mesh::<f64>::new(-1.0, 2.0, 7).unwrap();
        assert!((m.h() * 7.0 - 3.0).abs() < 1e-12);
        let x = m.interfaces();
        assert!(x.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(x[0], -1.0);
        assert_eq!(x[7], 2.0);
        assert!(Mesh::<f64>::new(1.0, 1.0, 4).is_err());
        assert!(Mesh::<f64>::new(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn locate_wraps() {
        let m = Mesh::<f64>::unit(4).unwrap();
        let (i, xi) = m.locate(0.3);
        assert_eq!(i, 1);
        assert!((m.map(i, xi) - 0.3).abs() < 1e-14);
        let (j, _) = m.locate(1.1);
        assert_eq!(j, 0);
    }
}

//! Gauss–Legendre rules and an adaptive Gauss–Kronrod integrator.

use crate::scalar::Real;

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// `n`-point rule, exact for polynomials of degree `2n - 1`.
    ///
    /// Nodes are found by Newton iteration on the three-term recurrence in
    /// `f64` and then converted.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "quadrature needs at least one point");
        let mut nodes = vec![0.0_f64; n];
        let mut weights = vec![0.0_f64; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre {
            nodes: nodes.into_iter().map(T::lit).collect(),
            weights: weights.into_iter().map(T::lit).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integral of `f` over `[a, b]`.
    pub fn integrate<F: FnMut(T) -> T>(&self, a: T, b: T, mut f: F) -> T {
        let half = (b - a) * T::lit(0.5);
        let mid = (a + b) * T::lit(0.5);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<T>()
            * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

// 7-point Gauss / 15-point Kronrod abscissae and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod15<T: Real, F: FnMut(T) -> T>(a: T, b: T, f: &mut F) -> (T, T) {
    let half = (b - a) * T::lit(0.5);
    let mid = (a + b) * T::lit(0.5);
    let fc = f(mid);
    let mut kron = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = half * T::lit(XGK[j]);
        let s = f(mid - dx) + f(mid + dx);
        kron += T::lit(WGK[j]) * s;
        if j % 2 == 1 {
            gauss += T::lit(WG[j / 2]) * s;
        }
    }
    (kron * half, ((kron - gauss) * half).abs())
}

/// Outcome of [`adaptive_integrate`].
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveResult<T> {
    pub value: T,
    pub error: T,
    pub intervals: usize,
    pub converged: bool,
}

/// Globally adaptive G7-K15 integration of `f` over `[a, b]`.
///
/// The interval with the largest error estimate is bisected until the total
/// estimate drops below `rel_tol * |value|` or `max_intervals` is reached.
/// Endpoints are never evaluated, so integrable endpoint singularities are
/// tolerated.
pub fn adaptive_integrate<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    a: T,
    b: T,
    rel_tol: T,
    max_intervals: usize,
) -> AdaptiveResult<T> {
    let (v, e) = kronrod15(a, b, &mut f);
    let mut pieces = vec![(a, b, v, e)];
    loop {
        let value: T = pieces.iter().map(|p| p.2).sum();
        let error: T = pieces.iter().map(|p| p.3).sum();
        let tol = rel_tol * value.abs();
        if error <= tol || pieces.len() >= max_intervals {
            return AdaptiveResult {
                value,
                error,
                intervals: pieces.len(),
                converged: error <= tol,
            };
        }
        let (worst, _) = pieces
            .iter()
            .enumerate()
            .fold((0, T::neg_infinity()), |best, (i, p)| {
                if p.3 > best.1 {
                    (i, p.3)
                } else {
                    best
                }
            });
        let (lo, hi, _, _) = pieces.swap_remove(worst);
        let mid = (lo + hi) * T::lit(0.5);
        let (v1, e1) = kronrod15(lo, mid, &mut f);
        let (v2, e2) = kronrod15(mid, hi, &mut f);
        pieces.push((lo, mid, v1, e1));
        pieces.push((mid, hi, v2, e2));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exactness() {
        for n in 1..=10 {
            let rule = GaussLegendre::<f64>::new(n);
            let wsum: f64 = rule.weights.iter().sum();
            assert!((wsum - 2.0).abs() < 1e-14);
            for deg in 0..2 * n {
                let exact = if deg % 2 == 1 {
                    0.0
                } else {
                    2.0 / (deg as f64 + 1.0)
                };
                let got = rule.integrate(-1.0, 1.0, |x| x.powi(deg as i32));
                assert!((got - exact).abs() < 1e-14, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn known_three_point_rule() {
        let rule = GaussLegendre::<f64>::new(3);
        assert!((rule.nodes[2] - (0.6_f64).sqrt()).abs() < 1e-15);
        assert!((rule.weights[1] - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        // ∫_0^1 x^{-1/2} dx = 2
        let r = adaptive_integrate(|x: f64| x.powf(-0.5), 0.0, 1.0, 1e-10, 2000);
        assert!(r.converged);
        assert!((r.value - 2.0).abs() < 1e-8);
    }
}

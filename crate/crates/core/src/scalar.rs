//! Scalar abstraction.
//!
//! All numerical code in this crate is written against [`Real`], so the same
//! solver runs in `f32` or `f64`. Exact rational arithmetic is only used for
//! the reference-element weights, through the generic polynomial code in
//! [`crate::poly`].

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Infallible for both supported types.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Converts a count or index.
    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `max(a, b)` for non-NaN inputs; with a NaN `b` it returns `a`. Cheaper
/// than [`Float::max`] inside reductions, which then check the sums for NaN.
#[inline(always)]
pub fn fast_max<T: Real>(a: T, b: T) -> T {
    if b > a {
        b
    } else {
        a
    }
}

/// The nonlinearity `|u|^p`, with a fast path for integer exponents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Power<T> {
    Int(i32),
    Real(T),
}

impl<T: Real> Power<T> {
    pub fn new(p: T) -> Self {
        let r = p.round();
        if (p - r).abs() <= T::epsilon() && r.abs() < T::lit(64.0) {
            Power::Int(r.to_i32().unwrap_or(0))
        } else {
            Power::Real(p)
        }
    }

    /// `|x|^p`.
    #[inline(always)]
    pub fn abs_pow(self, x: T) -> T {
        match self {
            // `powi` with a runtime exponent is an out-of-line call.
            Power::Int(2) => x * x,
            Power::Int(3) => {
                let a = x.abs();
                a * a * a
            }
            Power::Int(n) => x.abs().powi(n),
            Power::Real(p) => x.abs().powf(p),
        }
    }

    pub fn exponent(self) -> T {
        match self {
            Power::Int(n) => T::lit(n as f64),
            Power::Real(p) => p,
        }
    }
}

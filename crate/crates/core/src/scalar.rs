//! Scalar abstraction over the real and complex fields.
//!
//! Every algorithm in the crate is written once against [`Scalar`], which is
//! implemented for `f32`, `f64`, `Complex<f32>` and `Complex<f64>`. Magnitudes,
//! norms and objective values live in the associated `RealField`.

use nalgebra::{ComplexField, RealField};
use num_complex::Complex;
use num_traits::Zero;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// The field an instance is posed over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    pub fn as_str(self) -> &'static str {
        match self {
            Field::Real => "real",
            Field::Complex => "complex",
        }
    }
}

impl std::fmt::Display for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A real or complex scalar usable by the projection algorithms.
pub trait Scalar: ComplexField {
    const FIELD: Field;

    /// Draws a unit-variance normal sample. Complex samples are
    /// `(N(0,1) + i N(0,1)) / sqrt(2)`.
    fn sample_normal<G: Rng + ?Sized>(rng: &mut G) -> Self;

    /// Builds a scalar from `(re, im)`; the imaginary part is dropped in the real field.
    fn from_parts(re: f64, im: f64) -> Self;

    /// `(re, im)` as double precision; `im` is zero in the real field.
    fn parts(self) -> (f64, f64);
}

macro_rules! impl_real_scalar {
    ($($t:ty),*) => {$(
        impl Scalar for $t {
            const FIELD: Field = Field::Real;

            fn sample_normal<G: Rng + ?Sized>(rng: &mut G) -> Self {
                let x: f64 = rng.sample(StandardNormal);
                x as $t
            }

            fn from_parts(re: f64, _im: f64) -> Self {
                re as $t
            }

            fn parts(self) -> (f64, f64) {
                (self as f64, 0.0)
            }
        }
    )*};
}

macro_rules! impl_complex_scalar {
    ($($t:ty),*) => {$(
        impl Scalar for Complex<$t> {
            const FIELD: Field = Field::Complex;

            fn sample_normal<G: Rng + ?Sized>(rng: &mut G) -> Self {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                let s = std::f64::consts::FRAC_1_SQRT_2;
                Complex::new((re * s) as $t, (im * s) as $t)
            }

            fn from_parts(re: f64, im: f64) -> Self {
                Complex::new(re as $t, im as $t)
            }

            fn parts(self) -> (f64, f64) {
                (self.re as f64, self.im as f64)
            }
        }
    )*};
}

impl_real_scalar!(f32, f64);
impl_complex_scalar!(f32, f64);

/// `z / |z|`, and zero at the origin.
pub fn phase<S: Scalar>(z: S) -> S {
    let r = z.clone().modulus();
    if r.is_zero() {
        S::zero()
    } else {
        z.unscale(r)
    }
}

/// Converts a double into the real field of `S`.
pub fn real<R: RealField>(x: f64) -> R {
    nalgebra::convert(x)
}

/// Lifts a double into the scalar type (imaginary part zero).
pub fn lift<S: Scalar>(x: f64) -> S {
    S::from_real(real(x))
}

/// Converts a real-field value to `f64`.
pub fn to_f64<R: RealField>(x: R) -> f64 {
    nalgebra::try_convert::<R, f64>(x).unwrap_or(f64::NAN)
}

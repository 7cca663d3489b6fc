//! Seeded instance generators and random initial iterates.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{AnyInstance, Instance, InstanceKind};
use crate::scalar::{real, Field, Scalar};
use num_complex::Complex64;

/// Nonzero sparse atoms are redrawn until their magnitude reaches this floor.
pub const MIN_ATOM_MAGNITUDE: f64 = 0.1;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal_vector<S: Scalar>(len: usize, rng: &mut ChaCha8Rng) -> DVector<S> {
    DVector::from_fn(len, |_, _| S::sample_normal(rng))
}

fn with_measurements<S: Scalar>(a: DMatrix<S>, x0: DVector<S>, kind: InstanceKind) -> Result<Instance<S>> {
    let b = (&a * &x0).map(|v| v.modulus());
    Instance::new(a, b, Some(x0), kind)
}

/// i.i.d. standard normal `A` (m x n) and `x0`, with `b = |A x0|`.
pub fn gen_gaussian<S: Scalar>(m: usize, n: usize, seed: u64) -> Result<Instance<S>> {
    if n == 0 {
        return Err(Error::param("n", "must be at least 1"));
    }
    if m < n {
        return Err(Error::param("m", format!("need m >= n, got m = {m}, n = {n}")));
    }
    let mut rng = rng_from_seed(seed);
    let a = DMatrix::from_fn(m, n, |_, _| S::sample_normal(&mut rng));
    let x0 = normal_vector(n, &mut rng);
    with_measurements(a, x0, InstanceKind::Gaussian)
}

/// The first `ncols` columns of the `m x m` unitary DFT matrix.
pub fn dft_matrix<S: Scalar>(m: usize, ncols: usize) -> DMatrix<S> {
    let scale = 1.0 / (m as f64).sqrt();
    DMatrix::from_fn(m, ncols, |j, k| {
        let angle = -2.0 * PI * ((j * k) % m) as f64 / m as f64;
        S::from_parts(scale * angle.cos(), scale * angle.sin())
    })
}

/// Oversampled Fourier instance: `m = oversample * n`, complex field.
///
/// Factors below 2 are allowed but uniqueness is not expected; a warning is logged.
pub fn gen_oversampled_dft<S: Scalar>(n: usize, oversample: usize, seed: u64) -> Result<Instance<S>> {
    if S::FIELD != Field::Complex {
        return Err(Error::FieldMismatch { expected: Field::Complex, found: S::FIELD });
    }
    if n == 0 {
        return Err(Error::param("n", "must be at least 1"));
    }
    if oversample == 0 {
        return Err(Error::param("oversample", "must be at least 1"));
    }
    if oversample < 2 {
        log::warn!("oversampling factor {oversample} < 2: solution uniqueness is not guaranteed");
    }
    let m = oversample * n;
    let mut rng = rng_from_seed(seed);
    let a = dft_matrix::<S>(m, n);
    let x0 = normal_vector(n, &mut rng);
    with_measurements(a, x0, InstanceKind::OversampledDft)
}

/// Full DFT (`m = n`) with a `k`-sparse ground truth on a random support.
pub fn gen_sparse<S: Scalar>(n: usize, k: usize, seed: u64) -> Result<Instance<S>> {
    if S::FIELD != Field::Complex {
        return Err(Error::FieldMismatch { expected: Field::Complex, found: S::FIELD });
    }
    if k == 0 || k > n {
        return Err(Error::param("k", format!("{k} outside 1..={n}")));
    }
    let mut rng = rng_from_seed(seed);
    let a = dft_matrix::<S>(n, n);
    let mut x0 = DVector::<S>::zeros(n);
    let floor = real::<S::RealField>(MIN_ATOM_MAGNITUDE);
    for idx in sample(&mut rng, n, k).into_iter() {
        x0[idx] = loop {
            let v = S::sample_normal(&mut rng);
            if v.clone().modulus() >= floor {
                break v;
            }
        };
    }
    with_measurements(a, x0, InstanceKind::Sparse { k })
}

/// i.i.d. standard normal starting point of length `m`.
pub fn random_init<S: Scalar>(m: usize, seed: u64) -> DVector<S> {
    normal_vector(m, &mut rng_from_seed(seed))
}

/// Runtime-field dispatch for the Gaussian family.
pub fn gen_gaussian_any(m: usize, n: usize, field: Field, seed: u64) -> Result<AnyInstance> {
    Ok(match field {
        Field::Real => gen_gaussian::<f64>(m, n, seed)?.into(),
        Field::Complex => gen_gaussian::<Complex64>(m, n, seed)?.into(),
    })
}

//! Projectors onto the constraint sets, their complements and reflectors.
//!
//! `B = { y : |y| = b }` is handled by [`MagnitudeProjector`]. The signal
//! constraint `A` is either the column space of the sensing matrix
//! ([`ColumnSpaceProjector`]) or, for sparse instances, the image of the
//! k-sparse signals under a unitary sensing matrix ([`SparseSignalProjector`]).
//! All projectors allocate a fresh output and never alias their input.

use nalgebra::{DMatrix, DVector, RealField};
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::model::{Instance, InstanceKind, RANK_RATIO_TOL};
use crate::scalar::{lift, phase, real, to_f64, Scalar};

pub trait Projector<S: Scalar> {
    /// Ambient dimension, if fixed.
    fn dim(&self) -> Option<usize>;

    fn project(&self, y: &DVector<S>) -> DVector<S>;

    fn try_project(&self, y: &DVector<S>) -> Result<DVector<S>> {
        match self.dim() {
            Some(m) if m != y.len() => Err(Error::shape(format!("vector of length {m}"), y.len())),
            _ => Ok(self.project(y)),
        }
    }

    /// `(I - P)(y)`
    fn complement(&self, y: &DVector<S>) -> DVector<S> {
        y - self.project(y)
    }

    /// `(2P - I)(y)`
    fn reflect(&self, y: &DVector<S>) -> DVector<S> {
        self.project(y) * lift::<S>(2.0) - y
    }
}

/// Orthogonal projector onto `col(A)`, applied as `Q (Q^H y)` with `A = QR`.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnSpaceProjector<S: Scalar> {
    q: DMatrix<S>,
    r: DMatrix<S>,
}

impl<S: Scalar> ColumnSpaceProjector<S> {
    pub fn new(a: &DMatrix<S>) -> Result<Self> {
        let (m, n) = a.shape();
        if m < n || n == 0 {
            return Err(Error::invalid("A", format!("need m >= n >= 1, got {m}x{n}")));
        }
        let qr = a.clone().qr();
        let r = qr.r();
        let diag: Vec<S::RealField> = r.diagonal().iter().map(|v| v.clone().modulus()).collect();
        let rmax = diag.iter().cloned().fold(S::RealField::zero(), |a, b| a.max(b));
        let rmin = diag.iter().cloned().fold(rmax.clone(), |a, b| a.min(b));
        if !(rmin > rmax * real::<S::RealField>(RANK_RATIO_TOL)) {
            return Err(Error::invalid("A", "not full column rank"));
        }
        Ok(Self { q: qr.q(), r })
    }

    pub fn m(&self) -> usize {
        self.q.nrows()
    }

    pub fn n(&self) -> usize {
        self.q.ncols()
    }

    /// Orthonormal basis of `col(A)`.
    pub fn basis(&self) -> &DMatrix<S> {
        &self.q
    }

    /// Least-squares coefficients `A^+ z`.
    pub fn pseudo_inverse_apply(&self, z: &DVector<S>) -> DVector<S> {
        let c = self.q.ad_mul(z);
        self.r
            .solve_upper_triangular(&c)
            .expect("R is nonsingular for a full-rank A")
    }

    /// Entry `(A A^+)[i, k]`.
    pub fn entry(&self, i: usize, k: usize) -> S {
        self.q
            .row(i)
            .iter()
            .zip(self.q.row(k).iter())
            .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone().conjugate())
    }

    /// Dense `A A^+`.
    pub fn matrix(&self) -> DMatrix<S> {
        &self.q * self.q.adjoint()
    }
}

impl<S: Scalar> Projector<S> for ColumnSpaceProjector<S> {
    fn dim(&self) -> Option<usize> {
        Some(self.m())
    }

    fn project(&self, y: &DVector<S>) -> DVector<S> {
        &self.q * self.q.ad_mul(y)
    }
}

/// `P_B(y) = b ⊙ phase(y)` with `phase(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct MagnitudeProjector<S: Scalar> {
    b: DVector<S::RealField>,
}

impl<S: Scalar> MagnitudeProjector<S> {
    pub fn new(b: DVector<S::RealField>) -> Result<Self> {
        if let Some(i) = b.iter().position(|v| !(v.clone() >= S::RealField::zero())) {
            return Err(Error::invalid("b", format!("entry {i} is negative or NaN")));
        }
        Ok(Self { b })
    }

    pub fn magnitudes(&self) -> &DVector<S::RealField> {
        &self.b
    }
}

impl<S: Scalar> Projector<S> for MagnitudeProjector<S> {
    fn dim(&self) -> Option<usize> {
        Some(self.b.len())
    }

    fn project(&self, y: &DVector<S>) -> DVector<S> {
        y.zip_map(&self.b, |v, bi| phase(v).scale(bi))
    }
}

/// Keeps the `k` largest-magnitude entries; ties go to the lowest index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TopKProjector {
    k: usize,
}

impl TopKProjector {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::param("k", "must be at least 1"));
        }
        Ok(Self { k })
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

impl<S: Scalar> Projector<S> for TopKProjector {
    fn dim(&self) -> Option<usize> {
        None
    }

    fn try_project(&self, y: &DVector<S>) -> Result<DVector<S>> {
        if self.k > y.len() {
            return Err(Error::param("k", format!("{} exceeds vector length {}", self.k, y.len())));
        }
        Ok(self.project(y))
    }

    fn project(&self, y: &DVector<S>) -> DVector<S> {
        let mags: Vec<S::RealField> = y.iter().map(|v| v.clone().modulus()).collect();
        let mut order: Vec<usize> = (0..y.len()).collect();
        // stable sort keeps lower indices first among equal magnitudes
        order.sort_by(|&i, &j| mags[j].partial_cmp(&mags[i]).unwrap_or(std::cmp::Ordering::Equal));
        let mut out = DVector::<S>::zeros(y.len());
        for &i in order.iter().take(self.k) {
            out[i] = y[i].clone();
        }
        out
    }
}

/// Projector onto `{ A x : x has at most k nonzeros }` for a unitary `A`:
/// `y ↦ A topk(A^H y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSignalProjector<S: Scalar> {
    a: DMatrix<S>,
    topk: TopKProjector,
}

impl<S: Scalar> SparseSignalProjector<S> {
    pub fn new(a: DMatrix<S>, k: usize) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::invalid("A", "sparse constraint needs a square unitary matrix"));
        }
        if k > a.ncols() {
            return Err(Error::param("k", format!("{k} exceeds signal length {}", a.ncols())));
        }
        let gram = a.ad_mul(&a);
        let dev = (gram - DMatrix::<S>::identity(a.ncols(), a.ncols())).camax();
        let dev = to_f64(dev);
        if dev > 1e-10 {
            return Err(Error::invalid("A", format!("not unitary (max |A^H A - I| = {dev:e})")));
        }
        Ok(Self { a, topk: TopKProjector::new(k)? })
    }
}

impl<S: Scalar> Projector<S> for SparseSignalProjector<S> {
    fn dim(&self) -> Option<usize> {
        Some(self.a.nrows())
    }

    fn project(&self, y: &DVector<S>) -> DVector<S> {
        let x = self.a.ad_mul(y);
        &self.a * self.topk.project(&x)
    }
}

/// The signal-side constraint of an instance.
#[derive(Debug, Clone, PartialEq)]
pub enum SignalConstraint<S: Scalar> {
    ColumnSpace,
    Sparse(SparseSignalProjector<S>),
}

/// `(P_A, P_B)` for one instance, with the column-space factorization computed once.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorPair<S: Scalar> {
    col: ColumnSpaceProjector<S>,
    signal: SignalConstraint<S>,
    mag: MagnitudeProjector<S>,
}

impl<S: Scalar> ProjectorPair<S> {
    pub fn new(inst: &Instance<S>) -> Result<Self> {
        let col = ColumnSpaceProjector::new(inst.matrix())?;
        let signal = match inst.kind() {
            InstanceKind::Sparse { k } => {
                SignalConstraint::Sparse(SparseSignalProjector::new(inst.matrix().clone(), k)?)
            }
            _ => SignalConstraint::ColumnSpace,
        };
        let mag = MagnitudeProjector::new(inst.magnitudes().clone())?;
        Ok(Self { col, signal, mag })
    }

    /// Pair for a bare matrix and magnitude vector, with the column-space constraint.
    pub fn from_parts(a: &DMatrix<S>, b: DVector<S::RealField>) -> Result<Self> {
        if a.nrows() != b.len() {
            return Err(Error::shape(a.nrows(), b.len()));
        }
        Ok(Self {
            col: ColumnSpaceProjector::new(a)?,
            signal: SignalConstraint::ColumnSpace,
            mag: MagnitudeProjector::new(b)?,
        })
    }

    pub fn m(&self) -> usize {
        self.col.m()
    }

    pub fn magnitudes(&self) -> &DVector<S::RealField> {
        self.mag.magnitudes()
    }

    pub fn column_space(&self) -> &ColumnSpaceProjector<S> {
        &self.col
    }

    pub fn magnitude(&self) -> &MagnitudeProjector<S> {
        &self.mag
    }

    /// The column-space projector when `P_A` is linear.
    pub fn linear(&self) -> Option<&ColumnSpaceProjector<S>> {
        match self.signal {
            SignalConstraint::ColumnSpace => Some(&self.col),
            SignalConstraint::Sparse(_) => None,
        }
    }

    pub fn require_linear(&self) -> Result<&ColumnSpaceProjector<S>> {
        self.linear().ok_or(Error::NonlinearConstraint)
    }

    pub fn p_a(&self, y: &DVector<S>) -> DVector<S> {
        match &self.signal {
            SignalConstraint::ColumnSpace => self.col.project(y),
            SignalConstraint::Sparse(p) => p.project(y),
        }
    }

    pub fn p_b(&self, y: &DVector<S>) -> DVector<S> {
        self.mag.project(y)
    }

    pub fn p_a_c(&self, y: &DVector<S>) -> DVector<S> {
        y - self.p_a(y)
    }

    pub fn p_b_c(&self, y: &DVector<S>) -> DVector<S> {
        y - self.p_b(y)
    }

    pub fn r_a(&self, y: &DVector<S>) -> DVector<S> {
        self.p_a(y) * lift::<S>(2.0) - y
    }

    pub fn r_b(&self, y: &DVector<S>) -> DVector<S> {
        self.p_b(y) * lift::<S>(2.0) - y
    }

    /// `P_A P_B (y)`
    pub fn p_ab(&self, y: &DVector<S>) -> DVector<S> {
        self.p_a(&self.p_b(y))
    }

    /// `||P_A(y) - P_B(y)||_2`
    pub fn feas_gap(&self, y: &DVector<S>) -> S::RealField {
        (self.p_a(y) - self.p_b(y)).norm()
    }

    /// Signal estimate `A^+ P_B(y)`.
    pub fn estimate_signal(&self, y: &DVector<S>) -> DVector<S> {
        self.col.pseudo_inverse_apply(&self.p_b(y))
    }

    pub fn check_dim(&self, y: &DVector<S>) -> Result<()> {
        if y.len() != self.m() {
            return Err(Error::shape(format!("vector of length {}", self.m()), y.len()));
        }
        Ok(())
    }
}

/// `P_B(y)` for magnitudes `b`.
pub fn project_b<S: Scalar>(y: &DVector<S>, b: &DVector<S::RealField>) -> Result<DVector<S>> {
    if y.len() != b.len() {
        return Err(Error::shape(b.len(), y.len()));
    }
    if let Some(i) = b.iter().position(|v| !(v.clone() >= S::RealField::zero())) {
        return Err(Error::invalid("b", format!("entry {i} is negative or NaN")));
    }
    Ok(y.zip_map(b, |v, bi| phase(v).scale(bi)))
}

/// `P_A(y)` for the column-space projector.
pub fn project_a<S: Scalar>(y: &DVector<S>, proj: &ColumnSpaceProjector<S>) -> Result<DVector<S>> {
    proj.try_project(y)
}

/// `(I - P)(y)` for any projector.
pub fn complement<S: Scalar, P: Projector<S> + ?Sized>(p: &P, y: &DVector<S>) -> Result<DVector<S>> {
    Ok(y - p.try_project(y)?)
}

/// `(2P - I)(y)` for any projector.
pub fn reflect<S: Scalar, P: Projector<S> + ?Sized>(p: &P, y: &DVector<S>) -> Result<DVector<S>> {
    Ok(p.try_project(y)? * lift::<S>(2.0) - y)
}

/// Keeps the `k` largest-magnitude entries of `y`.
pub fn project_topk<S: Scalar>(y: &DVector<S>, k: usize) -> Result<DVector<S>> {
    if k == 0 || k > y.len() {
        return Err(Error::param("k", format!("{k} outside 1..={}", y.len())));
    }
    TopKProjector { k }.try_project(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{dmatrix, dvector};

    fn line() -> ColumnSpaceProjector<f64> {
        ColumnSpaceProjector::new(&dmatrix![1.0; 1.0]).unwrap()
    }

    fn close(a: &DVector<f64>, b: &DVector<f64>) -> bool {
        (a - b).amax() < 1e-14
    }

    #[test]
    fn magnitude_projection_examples() {
        let b = dvector![1.0, 1.0];
        assert_eq!(project_b(&dvector![1.0, 1.0], &b).unwrap(), b);
        assert_eq!(project_b(&dvector![2.0, -0.5], &b).unwrap(), dvector![1.0, -1.0]);
        assert_eq!(project_b(&dvector![0.0, 3.0], &b).unwrap(), dvector![0.0, 1.0]);
    }

    #[test]
    fn magnitude_projection_is_nearest_sign_pattern() {
        let y = dvector![2.0, -0.5];
        let b = dvector![1.0, 1.0];
        let p = project_b(&y, &b).unwrap();
        for s0 in [-1.0, 1.0] {
            for s1 in [-1.0, 1.0] {
                let z = dvector![s0, s1];
                assert!((&p - &y).norm() <= (&z - &y).norm());
            }
        }
    }

    #[test]
    fn column_space_examples() {
        let p = line();
        assert!(close(&project_a(&dvector![2.0, 0.5], &p).unwrap(), &dvector![1.25, 1.25]));
        assert!(close(&project_a(&dvector![3.0, 3.0], &p).unwrap(), &dvector![3.0, 3.0]));
        assert!(close(&project_a(&dvector![1.0, -1.0], &p).unwrap(), &dvector![0.0, 0.0]));
        assert!(matches!(project_a(&dvector![1.0, 2.0, 3.0], &p), Err(Error::Shape { .. })));
    }

    #[test]
    fn complement_examples() {
        let p = line();
        assert!(close(&complement(&p, &dvector![3.0, 3.0]).unwrap(), &dvector![0.0, 0.0]));
        assert!(close(&complement(&p, &dvector![1.0, -0.5]).unwrap(), &dvector![0.75, -0.75]));
        let mb = MagnitudeProjector::<f64>::new(dvector![1.0, 1.0]).unwrap();
        assert!(close(&complement(&mb, &dvector![2.0, 0.5]).unwrap(), &dvector![1.0, -0.5]));
    }

    #[test]
    fn reflect_examples() {
        let p = line();
        assert!(close(&reflect(&p, &dvector![2.0, 0.5]).unwrap(), &dvector![0.5, 2.0]));
        assert!(close(&reflect(&p, &dvector![-4.0, -4.0]).unwrap(), &dvector![-4.0, -4.0]));
        let y = dvector![0.3, -1.7];
        assert!(close(&p.reflect(&p.reflect(&y)), &y));
    }

    #[test]
    fn topk_examples() {
        let y = dvector![3.0, -5.0, 1.0];
        assert_eq!(project_topk(&y, 3).unwrap(), y);
        assert_eq!(project_topk(&y, 1).unwrap(), dvector![0.0, -5.0, 0.0]);
        assert_eq!(project_topk(&dvector![2.0, 2.0], 1).unwrap(), dvector![2.0, 0.0]);
        assert!(project_topk(&y, 0).is_err());
        assert!(project_topk(&y, 4).is_err());
    }

    #[test]
    fn pseudo_inverse_recovers_coefficients() {
        let a: DMatrix<f64> = dmatrix![1.0, 0.0; 1.0, 1.0; 0.0, 2.0];
        let p = ColumnSpaceProjector::new(&a).unwrap();
        let x = dvector![0.5, -1.5];
        assert!((p.pseudo_inverse_apply(&(&a * &x)) - x).amax() < 1e-14);
        let pm = p.matrix();
        assert!((p.entry(0, 2) - pm[(0, 2)]).abs() < 1e-15);
    }

    #[test]
    fn rank_deficient_rejected() {
        assert!(ColumnSpaceProjector::new(&dmatrix![1.0, 2.0; 2.0, 4.0]).is_err());
    }
}

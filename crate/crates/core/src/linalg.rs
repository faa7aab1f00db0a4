//! Dense complex linear solves.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::Complex;

/// Dense LU solve with partial pivoting, provided per scalar type.
pub trait LinearSolve: Sized {
    /// Solves `A x = b` for row-major `a` of size `n × n`.
    ///
    /// Fails with [`Error::SingularSystem`] when the smallest pivot is below
    /// `n·ε` times the largest.
    fn solve_dense(n: usize, a: &[Complex<Self>], b: &[Complex<Self>]) -> Result<Vec<Complex<Self>>>;
}

macro_rules! impl_linear_solve {
    ($t:ty) => {
        impl LinearSolve for $t {
            fn solve_dense(n: usize, a: &[Complex<$t>], b: &[Complex<$t>]) -> Result<Vec<Complex<$t>>> {
                assert_eq!(a.len(), n * n, "matrix size");
                assert_eq!(b.len(), n, "right-hand side size");
                let lu = DMatrix::from_row_slice(n, n, a).lu();
                let u = lu.u();
                let pivots = (0..n).map(|i| u[(i, i)].norm());
                let (lo, hi) = pivots.fold((<$t>::INFINITY, 0.0 as $t), |(lo, hi), p| (lo.min(p), hi.max(p)));
                if !(lo > hi * n as $t * <$t>::EPSILON) {
                    return Err(Error::SingularSystem { pivot: lo as f64 });
                }
                let x = lu
                    .solve(&DVector::from_column_slice(b))
                    .ok_or(Error::SingularSystem { pivot: lo as f64 })?;
                Ok(x.iter().copied().collect())
            }
        }
    };
}

impl_linear_solve!(f32);
impl_linear_solve!(f64);

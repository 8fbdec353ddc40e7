//! Hiding the chain in a random `d`-dimensional subspace of `R^D`:
//! `F_U(x) = F(U^T x)`, `g_U(x) = U g(U^T x)`.

use super::chain::ChainInstance;
use super::{Objective, StochasticOracle};
use crate::error::{check_dim, invalid, Result};
use crate::point::Point;
use crate::rng::{derive_stream, RngKey};
use crate::types::OracleDraw;
use nalgebra::{DMatrix, DVector};
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct RotatedInstance {
    pub base: ChainInstance,
    /// `D x N` with orthonormal columns.
    pub u: Arc<DMatrix<f64>>,
}

/// Haar-distributed `D x N` frame: QR of a Gaussian matrix with the signs of
/// `R`'s diagonal folded into `Q`.
pub fn haar_frame(ambient: usize, dim: usize, key: RngKey) -> Result<DMatrix<f64>> {
    if ambient < dim {
        return invalid(format!(
            "ambient dimension {ambient} is below the chain length {dim}"
        ));
    }
    let mut s = derive_stream(key);
    let g = DMatrix::from_fn(ambient, dim, |_, _| s.gaussian());
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    Ok(q)
}

pub fn rotate(inst: &ChainInstance, ambient: usize, key: RngKey) -> Result<RotatedInstance> {
    inst.validate()?;
    let u = haar_frame(ambient, inst.n, key)?;
    Ok(RotatedInstance {
        base: *inst,
        u: Arc::new(u),
    })
}

impl RotatedInstance {
    /// Wrap with a caller-supplied frame; `U^T U = I` is checked.
    pub fn with_frame(base: ChainInstance, u: DMatrix<f64>) -> Result<Self> {
        if u.ncols() != base.n || u.nrows() < base.n {
            return invalid("frame must be D x N with D >= N");
        }
        let gram = u.tr_mul(&u);
        let err = (gram - DMatrix::<f64>::identity(base.n, base.n))
            .abs()
            .max();
        if err > 1e-10 {
            return invalid(format!("frame columns are not orthonormal (error {err:e})"));
        }
        Ok(RotatedInstance {
            base,
            u: Arc::new(u),
        })
    }

    pub fn ambient(&self) -> usize {
        self.u.nrows()
    }

    /// `U^T x`.
    pub fn pull(&self, x: &[f64]) -> Result<Point> {
        check_dim(self.ambient(), x.len())?;
        Ok(pull(&self.u, x))
    }

    /// Rotated oracle around any oracle for the base chain.
    pub fn wrap(&self, base: Arc<dyn StochasticOracle>) -> RotatedOracle {
        RotatedOracle {
            base,
            u: Arc::clone(&self.u),
        }
    }
}

fn pull(u: &DMatrix<f64>, x: &[f64]) -> Point {
    let v = u.tr_mul(&DVector::from_column_slice(x));
    Point::from(v.as_slice().to_vec())
}

fn push(u: &DMatrix<f64>, g: &[f64]) -> Point {
    let v = u * DVector::from_column_slice(g);
    Point::from(v.as_slice().to_vec())
}

impl Objective for RotatedInstance {
    fn dim(&self) -> usize {
        self.ambient()
    }

    fn value_grad(&self, x: &[f64]) -> Result<(f64, Point)> {
        let y = self.pull(x)?;
        let (v, g) = self.base.eval(&y)?;
        Ok((v, push(&self.u, &g)))
    }

    fn progress_coords(&self, x: &[f64]) -> Point {
        pull(&self.u, x)
    }
}

#[derive(Clone)]
pub struct RotatedOracle {
    base: Arc<dyn StochasticOracle>,
    u: Arc<DMatrix<f64>>,
}

impl StochasticOracle for RotatedOracle {
    fn dim(&self) -> usize {
        self.u.nrows()
    }

    fn draw(&self, x: &[f64], key: RngKey) -> Result<OracleDraw> {
        check_dim(self.u.nrows(), x.len())?;
        let mut d = self.base.draw(&pull(&self.u, x), key)?;
        d.gradient = push(&self.u, &d.gradient);
        Ok(d)
    }

    fn variance_bound(&self) -> Option<f64> {
        self.base.variance_bound()
    }
}

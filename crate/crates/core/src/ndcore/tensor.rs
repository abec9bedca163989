//! Dense n-dimensional tensor value.
//!
//! Tensors are immutable once created; clones share storage. The only
//! mutation path is [`Tensor::update_in_place`], used by the optimizer
//! between training steps.

use std::sync::Arc;

use super::element::Element;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Tensor<E: Element> {
    shape: Vec<usize>,
    data: Arc<Vec<E>>,
    requires_grad: bool,
}

impl<E: Element> Tensor<E> {
    /// Build a tensor, checking that the shape covers the data exactly.
    pub fn new(shape: Vec<usize>, data: Vec<E>) -> Result<Self> {
        let want: usize = shape.iter().product();
        if want != data.len() {
            return Err(Error::invalid(
                "tensor",
                format!("shape {:?} implies {} elements, got {}", shape, want, data.len()),
            ));
        }
        Ok(Tensor {
            shape,
            data: Arc::new(data),
            requires_grad: false,
        })
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        let n: usize = shape.iter().product();
        Tensor {
            shape,
            data: Arc::new(vec![E::ZERO; n]),
            requires_grad: false,
        }
    }

    pub fn filled(shape: Vec<usize>, value: E) -> Self {
        let n: usize = shape.iter().product();
        Tensor {
            shape,
            data: Arc::new(vec![value; n]),
            requires_grad: false,
        }
    }

    pub fn scalar(value: E) -> Self {
        Tensor {
            shape: vec![],
            data: Arc::new(vec![value]),
            requires_grad: false,
        }
    }

    pub fn from_fn(shape: Vec<usize>, mut f: impl FnMut(usize) -> E) -> Self {
        let n: usize = shape.iter().product();
        Tensor {
            shape,
            data: Arc::new((0..n).map(&mut f).collect()),
            requires_grad: false,
        }
    }

    /// Mark this tensor as a differentiable leaf when pushed onto a tape.
    pub fn with_requires_grad(mut self, flag: bool) -> Self {
        self.requires_grad = flag;
        self
    }

    pub fn requires_grad(&self) -> bool {
        self.requires_grad
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn is_scalar(&self) -> bool {
        self.data.len() == 1
    }

    pub fn data(&self) -> &[E] {
        &self.data
    }

    /// Scalar value; errors if the tensor holds more than one element.
    pub fn item(&self) -> Result<E> {
        if self.data.len() != 1 {
            return Err(Error::invalid(
                "item",
                format!("expected scalar, shape is {:?}", self.shape),
            ));
        }
        Ok(self.data[0])
    }

    pub fn to_vec(&self) -> Vec<E> {
        self.data.to_vec()
    }

    /// Same storage, different shape (element count must match).
    pub fn reshape(&self, shape: Vec<usize>) -> Result<Self> {
        let want: usize = shape.iter().product();
        if want != self.data.len() {
            return Err(Error::invalid(
                "reshape",
                format!("cannot view {:?} as {:?}", self.shape, shape),
            ));
        }
        Ok(Tensor {
            shape,
            data: Arc::clone(&self.data),
            requires_grad: self.requires_grad,
        })
    }

    pub fn map(&self, f: impl Fn(E) -> E) -> Self {
        Tensor {
            shape: self.shape.clone(),
            data: Arc::new(self.data.iter().map(|&v| f(v)).collect()),
            requires_grad: false,
        }
    }

    /// Mutate the storage in place, reusing the allocation when uniquely owned.
    pub fn update_in_place(&mut self, f: impl FnMut(&mut [E])) {
        let mut f = f;
        f(Arc::make_mut(&mut self.data).as_mut_slice());
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Convert element type (used when loading checkpoints across modes).
    pub fn cast<T: Element>(&self) -> Tensor<T> {
        Tensor {
            shape: self.shape.clone(),
            data: Arc::new(self.data.iter().map(|v| T::from_f64(v.to_f64())).collect()),
            requires_grad: self.requires_grad,
        }
    }
}

/// Debug/test-only finiteness check; release builds skip it for speed.
#[inline]
pub(crate) fn debug_check_finite<E: Element>(op: &'static str, t: &Tensor<E>) {
    if cfg!(debug_assertions) {
        assert!(t.all_finite(), "non-finite value produced by {op}");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_must_cover_data() {
        assert!(Tensor::<f64>::new(vec![2, 2], vec![1.0; 4]).is_ok());
        assert!(Tensor::<f64>::new(vec![2, 3], vec![1.0; 4]).is_err());
    }

    #[test]
    fn scalar_roundtrip() {
        let t = Tensor::scalar(2.5f64);
        assert!(t.is_scalar());
        assert_eq!(t.item().unwrap(), 2.5);
        assert_eq!(t.shape(), &[] as &[usize]);
    }

    #[test]
    fn reshape_shares_storage() {
        let t = Tensor::<f32>::new(vec![2, 3], (0..6).map(|i| i as f32).collect()).unwrap();
        let r = t.reshape(vec![3, 2]).unwrap();
        assert_eq!(r.data(), t.data());
        assert!(t.reshape(vec![4, 2]).is_err());
    }

    #[test]
    fn update_in_place_is_copy_on_write() {
        let mut a = Tensor::<f64>::filled(vec![2], 1.0);
        let b = a.clone();
        a.update_in_place(|d| d[0] = 9.0);
        assert_eq!(a.data()[0], 9.0);
        assert_eq!(b.data()[0], 1.0);
    }
}

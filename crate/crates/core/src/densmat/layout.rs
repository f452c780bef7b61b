use serde::{Deserialize, Serialize};

use crate::error::{MnqcError, Result};

/// Tensor structure of a composite Hilbert space.
///
/// Subsystem 0 is the most significant factor of the Kronecker product, so a
/// basis index is the mixed-radix number `(i_0, i_1, ..., i_{n-1})`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HilbertLayout {
    dims: Vec<usize>,
}

impl HilbertLayout {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if let Some(&d) = dims.iter().find(|&&d| d == 0) {
            return Err(MnqcError::DimensionMismatch {
                expected: 1,
                actual: d,
            });
        }
        Ok(Self { dims })
    }

    pub fn qubits(n: usize) -> Self {
        Self { dims: vec![2; n] }
    }

    /// Layout of zero subsystems (total dimension 1).
    pub fn scalar() -> Self {
        Self { dims: Vec::new() }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn count(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn dim_of(&self, targets: &[usize]) -> usize {
        targets.iter().map(|&t| self.dims[t]).product()
    }

    pub fn concat(&self, other: &HilbertLayout) -> HilbertLayout {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        HilbertLayout { dims }
    }

    /// Layout restricted to `keep`, in ascending subsystem order.
    pub fn restrict(&self, keep: &[usize]) -> Result<HilbertLayout> {
        self.validate_targets(keep)?;
        let mut sorted = keep.to_vec();
        sorted.sort_unstable();
        Ok(HilbertLayout {
            dims: sorted.iter().map(|&k| self.dims[k]).collect(),
        })
    }

    pub fn validate_targets(&self, targets: &[usize]) -> Result<()> {
        let mut seen = vec![false; self.dims.len()];
        for &t in targets {
            if t >= self.dims.len() {
                return Err(MnqcError::InvalidSubsystem {
                    index: t,
                    count: self.dims.len(),
                });
            }
            if seen[t] {
                return Err(MnqcError::DuplicateSubsystem(t));
            }
            seen[t] = true;
        }
        Ok(())
    }

    /// Stride of each subsystem in the flattened basis index.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for i in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.dims[i + 1];
        }
        strides
    }

    /// Flat-index offsets enumerating the basis of `targets`, with the first
    /// target as the most significant digit, together with the offsets of all
    /// remaining subsystems.
    pub(crate) fn split_offsets(&self, targets: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let strides = self.strides();
        let target_offsets = digit_offsets(targets, &self.dims, &strides);
        let rest: Vec<usize> = (0..self.dims.len())
            .filter(|i| !targets.contains(i))
            .collect();
        let outer_offsets = digit_offsets(&rest, &self.dims, &strides);
        (target_offsets, outer_offsets)
    }
}

fn digit_offsets(subsystems: &[usize], dims: &[usize], strides: &[usize]) -> Vec<usize> {
    let mut offsets = vec![0usize];
    for &s in subsystems {
        let mut next = Vec::with_capacity(offsets.len() * dims[s]);
        for &o in &offsets {
            for digit in 0..dims[s] {
                next.push(o + digit * strides[s]);
            }
        }
        offsets = next;
    }
    offsets
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strides_and_dims() {
        let l = HilbertLayout::new(vec![2, 3, 4]).unwrap();
        assert_eq!(l.total_dim(), 24);
        assert_eq!(l.strides(), vec![12, 4, 1]);
        let (t, o) = l.split_offsets(&[1]);
        assert_eq!(t, vec![0, 4, 8]);
        assert_eq!(o.len(), 8);
    }

    #[test]
    fn target_order_sets_significance() {
        let l = HilbertLayout::qubits(3);
        let (t, _) = l.split_offsets(&[2, 0]);
        assert_eq!(t, vec![0, 4, 1, 5]);
    }

    #[test]
    fn rejects_bad_targets() {
        let l = HilbertLayout::qubits(2);
        assert!(l.validate_targets(&[2]).is_err());
        assert!(l.validate_targets(&[1, 1]).is_err());
        assert!(HilbertLayout::new(vec![2, 0]).is_err());
    }
}

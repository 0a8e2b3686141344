use std::collections::HashSet;

use crate::error::{LshError, Result};
use crate::vector::RealVector;

/// Point ids paired with vectors of a common dimension.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    ids: Vec<u64>,
    vectors: Vec<RealVector>,
}

impl Dataset {
    /// Ids `0..n` in order.
    pub fn from_vectors(vectors: Vec<RealVector>) -> Result<Self> {
        let ids = (0..vectors.len() as u64).collect();
        Self::new(ids, vectors)
    }

    pub fn new(ids: Vec<u64>, vectors: Vec<RealVector>) -> Result<Self> {
        if ids.len() != vectors.len() {
            return Err(LshError::Dimension {
                expected: ids.len(),
                found: vectors.len(),
            });
        }
        if let Some(first) = vectors.first() {
            for v in &vectors {
                LshError::check_dim(first.dim(), v.dim())?;
            }
        }
        let mut seen = HashSet::with_capacity(ids.len());
        for &id in &ids {
            if !seen.insert(id) {
                return Err(LshError::DuplicateId(id));
            }
        }
        Ok(Dataset { ids, vectors })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Dimension of the vectors, `None` when empty.
    pub fn dim(&self) -> Option<usize> {
        self.vectors.first().map(RealVector::dim)
    }

    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    pub fn vectors(&self) -> &[RealVector] {
        &self.vectors
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &RealVector)> {
        self.ids.iter().copied().zip(&self.vectors)
    }

    /// Every vector scaled to unit norm. Zero vectors are an error.
    pub fn normalized(&self) -> Result<Dataset> {
        Ok(Dataset {
            ids: self.ids.clone(),
            vectors: self
                .vectors
                .iter()
                .map(RealVector::normalize)
                .collect::<Result<_>>()?,
        })
    }

    pub fn into_parts(self) -> (Vec<u64>, Vec<RealVector>) {
        (self.ids, self.vectors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_mixed_dims() {
        let a = RealVector::new(vec![1.0, 0.0]).unwrap();
        let b = RealVector::new(vec![1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            Dataset::new(vec![4, 4], vec![a.clone(), a.clone()]),
            Err(LshError::DuplicateId(4))
        ));
        assert!(Dataset::from_vectors(vec![a.clone(), b]).is_err());
        let d = Dataset::from_vectors(vec![a.clone(), a]).unwrap();
        assert_eq!(d.ids(), &[0, 1]);
        assert_eq!(d.dim(), Some(2));
        assert!(Dataset::default().dim().is_none());
    }
}

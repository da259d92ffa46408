//! Permutations stored as index maps.
//!
//! Row-action convention: applying `π` to a matrix `M` yields a matrix whose
//! row `i` is row `π(i)` of `M`. As a 0/1 matrix, `Π[i, π(i)] = 1`, so the
//! inner product `⟨Π, C⟩` is `Σᵢ C[i, π(i)]`.

use std::fmt;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self { map: (0..n).collect() }
    }

    /// Validates that `map` is a bijection on `0..map.len()`.
    pub fn from_map(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for (i, &j) in map.iter().enumerate() {
            if j >= n {
                return Err(Error::invalid(format!("index {j} at position {i} is out of range 0..{n}")));
            }
            if std::mem::replace(&mut seen[j], true) {
                return Err(Error::invalid(format!("index {j} appears twice")));
            }
        }
        Ok(Self { map })
    }

    pub(crate) fn from_map_unchecked(map: Vec<usize>) -> Self {
        debug_assert!(Self::from_map(map.clone()).is_ok());
        Self { map }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.map.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// `π(i)`
    #[inline]
    pub fn get(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.map
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.map.len()];
        for (i, &j) in self.map.iter().enumerate() {
            inv[j] = i;
        }
        Self { map: inv }
    }

    /// `(self ∘ other)(i) = self(other(i))`
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::dims(format!("permutations of length {} and {}", self.len(), other.len())));
        }
        Ok(Self { map: other.map.iter().map(|&k| self.map[k]).collect() })
    }

    /// Number of displaced points, i.e. the Hamming distance to the identity.
    pub fn displaced(&self) -> usize {
        self.map.iter().enumerate().filter(|&(i, &j)| i != j).count()
    }

    pub fn is_identity(&self) -> bool {
        self.displaced() == 0
    }

    /// Row `i` of the result is row `π(i)` of `mat`.
    pub fn apply<T: Real>(&self, mat: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
        if self.len() != mat.rows() {
            return Err(Error::invalid(format!(
                "permutation of length {} applied to a matrix with {} rows",
                self.len(),
                mat.rows()
            )));
        }
        let mut data = Vec::with_capacity(mat.rows() * mat.cols());
        for &src in &self.map {
            data.extend_from_slice(mat.row(src));
        }
        Ok(DenseMatrix::from_raw(mat.rows(), mat.cols(), data))
    }

    /// `Σᵢ C[i, π(i)]`, summed in row order.
    pub fn objective<T: Real>(&self, cost: &DenseMatrix<T>) -> T {
        self.map.iter().enumerate().fold(T::zero(), |acc, (i, &j)| acc + cost[(i, j)])
    }

    /// One index per line.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.map.len() * 4);
        for j in &self.map {
            s.push_str(&j.to_string());
            s.push('\n');
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let map = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| l.parse::<usize>().map_err(|_| Error::Parse(format!("bad index `{l}`"))))
            .collect::<Result<Vec<_>>>()?;
        Self::from_map(map)
    }

    pub fn write_to(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn read_from(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_text(&text)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, j) in self.map.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{j}")?;
        }
        write!(f, ")")
    }
}

/// Free-function form of [`Permutation::apply`].
pub fn apply_permutation<T: Real>(perm: &Permutation, mat: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    perm.apply(mat)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn swap_convention() {
        let p = Permutation::from_map(vec![1, 0]).unwrap();
        let m = DenseMatrix::from_rows(&[[1.0], [2.0]]).unwrap();
        assert_eq!(p.apply(&m).unwrap(), DenseMatrix::from_rows(&[[2.0], [1.0]]).unwrap());
    }

    #[test]
    fn identity_is_noop() {
        let m = DenseMatrix::from_rows(&[[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]).unwrap();
        assert_eq!(Permutation::identity(3).apply(&m).unwrap(), m);
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::from_map(vec![0, 0]).is_err());
        assert!(Permutation::from_map(vec![0, 2]).is_err());
        let m = DenseMatrix::<f64>::zeros(3, 1);
        assert!(Permutation::identity(2).apply(&m).is_err());
    }

    #[test]
    fn compose_and_inverse() {
        let p = Permutation::from_map(vec![2, 0, 1]).unwrap();
        assert!(p.compose(&p.inverse()).unwrap().is_identity());
        assert_eq!(p.displaced(), 3);
        assert_eq!(Permutation::parse_text(&p.to_text()).unwrap(), p);
    }
}

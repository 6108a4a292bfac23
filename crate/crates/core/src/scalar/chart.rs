use crate::error::{Error, Result};

/// Coordinate index: `0` is time, `1..=N` are the spatial coordinates.
pub type Idx = u8;

/// The time index.
pub const T: Idx = 0;

/// A coordinate chart on `M × ℝ` with `N` spatial coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Chart {
    dim: usize,
    time_name: String,
    space_name: String,
}

impl Chart {
    /// Largest supported spatial dimension.
    pub const MAX_DIM: usize = 8;

    pub fn new(dim: usize) -> Result<Self> {
        Self::with_names(dim, "t", "x")
    }

    pub fn with_names(dim: usize, time_name: &str, space_name: &str) -> Result<Self> {
        if dim == 0 || dim > Self::MAX_DIM {
            return Err(Error::Invalid(format!("spatial dimension must lie in 1..={}, got {dim}", Self::MAX_DIM)));
        }
        if time_name == space_name || time_name.is_empty() || space_name.is_empty() {
            return Err(Error::Invalid("coordinate names must be distinct and non-empty".into()));
        }
        Ok(Self { dim, time_name: time_name.into(), space_name: space_name.into() })
    }

    /// Number of spatial coordinates `N`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn time_name(&self) -> &str {
        &self.time_name
    }

    pub fn space_name(&self) -> &str {
        &self.space_name
    }

    /// Spatial indices `1..=N`.
    pub fn space(&self) -> impl Iterator<Item = Idx> + Clone {
        1..=self.dim as Idx
    }

    /// All indices, time first.
    pub fn all(&self) -> impl Iterator<Item = Idx> + Clone {
        0..=self.dim as Idx
    }

    pub fn check(&self, i: Idx) -> Result<Idx> {
        if (i as usize) <= self.dim {
            Ok(i)
        } else {
            Err(Error::IndexOutOfRange { index: i as usize, dim: self.dim })
        }
    }

    pub fn check_spatial(&self, i: Idx) -> Result<Idx> {
        if i >= 1 && (i as usize) <= self.dim {
            Ok(i)
        } else {
            Err(Error::IndexOutOfRange { index: i as usize, dim: self.dim })
        }
    }

    /// Spatial index pairs `(a, b)` with `a <= b`, in lexicographic order.
    pub fn sym_pairs(&self) -> Vec<(Idx, Idx)> {
        let mut v = Vec::with_capacity(self.dim * (self.dim + 1) / 2);
        for a in self.space() {
            for b in a..=self.dim as Idx {
                v.push((a, b));
            }
        }
        v
    }
}

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Finitely supported bi-infinite sequence `u = (u_i)_{i in Z}` in `l^2`.
///
/// Components with index outside `[offset, offset + len - 1]` are zero.
/// Equality compares the implied bi-infinite sequences, so explicit zeros
/// at either end do not matter.
#[derive(Debug, Clone, Default)]
pub struct LatticeWindow<T> {
    offset: i64,
    values: Vec<T>,
}

impl<T: Real> LatticeWindow<T> {
    /// Builds a window whose first stored component sits at index `offset`.
    pub fn new(offset: i64, values: Vec<T>) -> Result<Self> {
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!(
                "window component at index {}",
                offset + pos as i64
            )));
        }
        Ok(Self { offset, values })
    }

    /// Internal constructor for values already known to be finite.
    pub(crate) fn from_raw(offset: i64, values: Vec<T>) -> Self {
        Self { offset, values }
    }

    pub fn zero() -> Self {
        Self {
            offset: 0,
            values: Vec::new(),
        }
    }

    /// The unit sequence `e_i`.
    pub fn unit(i: i64) -> Self {
        Self::scaled_unit(i, T::one())
    }

    pub fn scaled_unit(i: i64, c: T) -> Self {
        Self {
            offset: i,
            values: vec![c],
        }
    }

    /// Window on `[first, last]` filled from `f(i)`.
    pub fn from_fn(first: i64, last: i64, mut f: impl FnMut(i64) -> T) -> Result<Self> {
        let values = (first..=last).map(&mut f).collect();
        Self::new(first, values)
    }

    #[inline]
    pub fn offset(&self) -> i64 {
        self.offset
    }

    #[inline]
    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Index one past the last stored component.
    #[inline]
    pub fn end(&self) -> i64 {
        self.offset + self.values.len() as i64
    }

    /// Component `u_i`, zero outside the stored range.
    #[inline]
    pub fn get(&self, i: i64) -> T {
        let k = i - self.offset;
        if k < 0 || k >= self.values.len() as i64 {
            T::zero()
        } else {
            self.values[k as usize]
        }
    }

    /// Smallest and largest index holding a nonzero component.
    pub fn support(&self) -> Option<(i64, i64)> {
        let first = self.values.iter().position(|v| !v.is_zero())?;
        let last = self.values.iter().rposition(|v| !v.is_zero())?;
        Some((self.offset + first as i64, self.offset + last as i64))
    }

    /// Drops leading and trailing components with `|u_i| <= tol`.
    pub fn trim(&mut self, tol: T) {
        let keep = |v: &T| v.abs() > tol;
        match self.values.iter().position(keep) {
            None => {
                self.values.clear();
                self.offset = 0;
            }
            Some(first) => {
                let last = self.values.iter().rposition(keep).unwrap_or(first);
                self.values.truncate(last + 1);
                self.values.drain(..first);
                self.offset += first as i64;
            }
        }
    }

    /// Same sequence with explicit zeros at both ends removed.
    pub fn normalized(&self) -> Self {
        let mut out = self.clone();
        out.trim(T::zero());
        out
    }

    /// Restricts the window to `[-half_width, half_width]` and returns the
    /// squared mass that was discarded.
    pub fn clamp(&mut self, half_width: i64) -> T {
        let lo = -half_width;
        let hi = half_width;
        if self.offset >= lo && self.end() - 1 <= hi {
            return T::zero();
        }
        let mut clipped = T::zero();
        let mut kept = Vec::new();
        for (k, &v) in self.values.iter().enumerate() {
            let i = self.offset + k as i64;
            if i < lo || i > hi {
                clipped = clipped + v * v;
            } else {
                kept.push(v);
            }
        }
        self.offset = self.offset.max(lo);
        self.values = kept;
        if self.values.is_empty() {
            self.offset = 0;
        }
        clipped
    }

    /// Dense copy of the components on `[first, last]`.
    pub fn dense(&self, first: i64, last: i64) -> Vec<T> {
        (first..=last).map(|i| self.get(i)).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn norm_sq(&self) -> T {
        self.values.iter().map(|&v| v * v).sum()
    }

    /// The `l^2` norm.
    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    /// The `l^p` norm for `p` in `{1, 2, 3, 4}`.
    pub fn norm_lp(&self, p: u32) -> Result<T> {
        match p {
            1 => Ok(self.values.iter().map(|v| v.abs()).sum()),
            2 => Ok(self.norm()),
            3 | 4 => {
                let s: T = self.values.iter().map(|v| v.abs().powi(p as i32)).sum();
                Ok(s.powf(T::one() / T::count(p as usize)))
            }
            _ => Err(Error::UnsupportedNorm(p)),
        }
    }

    /// Inner product `(u, v)`.
    pub fn dot(&self, other: &Self) -> T {
        let lo = self.offset.max(other.offset);
        let hi = self.end().min(other.end());
        (lo..hi).map(|i| self.get(i) * other.get(i)).sum()
    }

    /// `||u - v||` without materializing the difference.
    pub fn distance(&self, other: &Self) -> T {
        if self.is_empty() {
            return other.norm();
        }
        if other.is_empty() {
            return self.norm();
        }
        let lo = self.offset.min(other.offset);
        let hi = self.end().max(other.end());
        let mut acc = T::zero();
        for i in lo..hi {
            let d = self.get(i) - other.get(i);
            acc = acc + d * d;
        }
        acc.sqrt()
    }

    /// Componentwise combination `g(u_i, v_i)` over the union of supports.
    /// `g(0, 0)` must be zero.
    pub fn zip_with(&self, other: &Self, mut g: impl FnMut(T, T) -> T) -> Self {
        if self.is_empty() && other.is_empty() {
            return Self::zero();
        }
        let (lo, hi) = match (self.is_empty(), other.is_empty()) {
            (true, _) => (other.offset, other.end()),
            (_, true) => (self.offset, self.end()),
            _ => (self.offset.min(other.offset), self.end().max(other.end())),
        };
        let values = (lo..hi).map(|i| g(self.get(i), other.get(i))).collect();
        Self::from_raw(lo, values)
    }

    /// `self + a * x`.
    pub fn axpy(&self, a: T, x: &Self) -> Self {
        self.zip_with(x, |u, v| u + a * v)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |u, v| u + v)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |u, v| u - v)
    }

    pub fn scale(&self, c: T) -> Self {
        Self::from_raw(self.offset, self.values.iter().map(|&v| c * v).collect())
    }

    /// Applies `g` to each stored component; `g(0)` must be zero.
    pub fn map(&self, g: impl FnMut(T) -> T) -> Self {
        Self::from_raw(self.offset, self.values.iter().copied().map(g).collect())
    }

    /// Iterates over `(index, value)` pairs of stored components.
    pub fn iter(&self) -> impl Iterator<Item = (i64, T)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(k, &v)| (self.offset + k as i64, v))
    }
}

impl<T: Real> PartialEq for LatticeWindow<T> {
    fn eq(&self, other: &Self) -> bool {
        let lo = self.offset.min(other.offset);
        let hi = self.end().max(other.end());
        (lo..hi).all(|i| self.get(i) == other.get(i))
    }
}

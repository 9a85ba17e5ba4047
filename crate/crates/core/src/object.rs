use alloc::vec::Vec;

use crate::error::{invalid, Result};

/// A data object or prototype stored as a dense `rows × cols` array.
///
/// Numeric and one-hot vectors are a single row; a time series of length `T`
/// with `q` channels has `T` rows and `q` columns.
#[derive(Clone, Debug, PartialEq)]
pub struct DataObject {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

/// Prototypes share the object layout but take arbitrary real values.
pub type Prototype = DataObject;

impl DataObject {
    pub fn vector(values: Vec<f64>) -> Self {
        Self {
            rows: 1,
            cols: values.len(),
            values,
        }
    }

    /// Row-major `len × channels` series.
    pub fn series(len: usize, channels: usize, values: Vec<f64>) -> Result<Self> {
        if len * channels != values.len() {
            return Err(invalid(alloc::format!(
                "series of shape {len}x{channels} needs {} values, got {}",
                len * channels,
                values.len()
            )));
        }
        if len == 0 || channels == 0 {
            return Err(invalid(
                "series must have at least one frame and one channel",
            ));
        }
        Ok(Self {
            rows: len,
            cols: channels,
            values,
        })
    }

    pub fn univariate(values: Vec<f64>) -> Self {
        Self {
            rows: values.len(),
            cols: 1,
            values,
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            values: alloc::vec![0.0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.values[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// `self += scale * other`, shapes must match.
    pub fn axpy(&mut self, scale: f64, other: &DataObject) {
        debug_assert_eq!(self.shape(), other.shape());
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += scale * b;
        }
    }

    pub fn squared_distance(&self, other: &DataObject) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    /// Linear interpolation of a series onto `len` evenly spaced frames.
    pub fn resample(&self, len: usize) -> DataObject {
        if len == self.rows || self.rows == 0 || len == 0 {
            return self.clone();
        }
        let mut out = DataObject::zeros(len, self.cols);
        for t in 0..len {
            let pos = if len == 1 {
                0.0
            } else {
                t as f64 * (self.rows - 1) as f64 / (len - 1) as f64
            };
            let lo = (pos as usize).min(self.rows - 1);
            let hi = (lo + 1).min(self.rows - 1);
            let w = pos - lo as f64;
            for q in 0..self.cols {
                out.values[t * self.cols + q] = (1.0 - w) * self.values[lo * self.cols + q]
                    + w * self.values[hi * self.cols + q];
            }
        }
        out
    }
}

/// Componentwise mean of same-shaped objects.
pub fn mean_of<'a>(items: impl IntoIterator<Item = &'a DataObject>) -> Option<DataObject> {
    let mut iter = items.into_iter();
    let mut acc = iter.next()?.clone();
    let mut count = 1usize;
    for o in iter {
        acc.axpy(1.0, o);
        count += 1;
    }
    let inv = 1.0 / count as f64;
    acc.values.iter_mut().for_each(|v| *v *= inv);
    Some(acc)
}

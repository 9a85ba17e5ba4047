//! Differentiable semi-metrics between data objects and prototypes.

use alloc::string::String;
use core::fmt;
use core::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::object::{DataObject, Prototype};
use crate::softdtw;

/// Floor applied to distances before they enter the mass update.
pub const DISTANCE_FLOOR: f64 = 1e-12;

/// Default Soft-DTW smoothing.
pub const DEFAULT_GAMMA: f64 = 1.0;

/// Dissimilarity used between objects and prototypes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SemiMetric {
    /// `Σ (x_j − v_j)²`.
    SqEuclidean,
    /// `½ Σ (x_j − v_j)²` over one-hot coordinates: the number of differing
    /// attributes when both sides are one-hot.
    OneHotHamming,
    /// Soft-DTW over squared Euclidean frame costs.
    SoftDtw { gamma: f64 },
}

impl SemiMetric {
    pub fn soft_dtw(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(invalid(alloc::format!(
                "soft-dtw smoothing must be positive, got {gamma}"
            )));
        }
        Ok(SemiMetric::SoftDtw { gamma })
    }

    pub fn name(&self) -> &'static str {
        match self {
            SemiMetric::SqEuclidean => "euclidean",
            SemiMetric::OneHotHamming => "hamming",
            SemiMetric::SoftDtw { .. } => "softdtw",
        }
    }

    /// Shape check shared by the distance and its gradient.
    pub fn check_compatible(&self, x: &DataObject, v: &Prototype) -> Result<()> {
        let ok = match self {
            SemiMetric::SqEuclidean | SemiMetric::OneHotHamming => x.shape() == v.shape(),
            SemiMetric::SoftDtw { .. } => x.cols() == v.cols() && x.rows() > 0 && v.rows() > 0,
        };
        if ok {
            Ok(())
        } else {
            Err(invalid(alloc::format!(
                "{} cannot compare shapes {:?} and {:?}",
                self.name(),
                x.shape(),
                v.shape()
            )))
        }
    }

    pub fn distance(&self, x: &DataObject, v: &Prototype) -> Result<f64> {
        self.check_compatible(x, v)?;
        Ok(self.distance_unchecked(x, v))
    }

    pub(crate) fn distance_unchecked(&self, x: &DataObject, v: &Prototype) -> f64 {
        match *self {
            SemiMetric::SqEuclidean => x.squared_distance(v),
            SemiMetric::OneHotHamming => 0.5 * x.squared_distance(v),
            SemiMetric::SoftDtw { gamma } => softdtw::soft_dtw(x, v, gamma),
        }
    }

    /// Gradient of `d(x, v)` with respect to `v`.
    pub fn distance_grad_v(&self, x: &DataObject, v: &Prototype) -> Result<Prototype> {
        self.check_compatible(x, v)?;
        let mut g = DataObject::zeros(v.rows(), v.cols());
        self.accumulate_grad_v(x, v, 1.0, g.as_mut_slice());
        Ok(g)
    }

    /// Adds `scale · ∇_v d(x, v)` into `grad` and returns `d(x, v)`.
    ///
    /// Because every kind is symmetric, the gradient in the first argument is
    /// obtained by swapping the operands.
    pub(crate) fn accumulate_grad_v(
        &self,
        x: &DataObject,
        v: &Prototype,
        scale: f64,
        grad: &mut [f64],
    ) -> f64 {
        match *self {
            SemiMetric::SqEuclidean => {
                let mut d = 0.0;
                for ((g, xv), vv) in grad.iter_mut().zip(x.as_slice()).zip(v.as_slice()) {
                    let diff = vv - xv;
                    d += diff * diff;
                    *g += 2.0 * scale * diff;
                }
                d
            }
            SemiMetric::OneHotHamming => {
                let mut d = 0.0;
                for ((g, xv), vv) in grad.iter_mut().zip(x.as_slice()).zip(v.as_slice()) {
                    let diff = vv - xv;
                    d += diff * diff;
                    *g += scale * diff;
                }
                0.5 * d
            }
            SemiMetric::SoftDtw { gamma } => softdtw::soft_dtw_grad_y(x, v, gamma, scale, grad),
        }
    }
}

impl fmt::Display for SemiMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SemiMetric::SoftDtw { gamma } => write!(f, "softdtw:{gamma}"),
            other => f.write_str(other.name()),
        }
    }
}

/// Parses `euclidean`, `hamming`, `softdtw` or `softdtw:<gamma>`.
impl FromStr for SemiMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "euclidean" => Ok(SemiMetric::SqEuclidean),
            "hamming" => Ok(SemiMetric::OneHotHamming),
            "softdtw" => SemiMetric::soft_dtw(DEFAULT_GAMMA),
            _ => {
                if let Some(g) = s.strip_prefix("softdtw:") {
                    let gamma = f64::from_str(g.trim())
                        .map_err(|_| invalid(alloc::format!("bad soft-dtw smoothing {g:?}")))?;
                    SemiMetric::soft_dtw(gamma)
                } else {
                    Err(invalid(String::from("unknown metric ") + s))
                }
            }
        }
    }
}

/// Floors a distance at [`DISTANCE_FLOOR`].
pub fn clamp_distance(d: f64) -> f64 {
    if d > DISTANCE_FLOOR {
        d
    } else {
        DISTANCE_FLOOR
    }
}

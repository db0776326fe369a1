use crate::error::{Error, Result};

/// Closed real interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::InvalidInput(format!("[{lo}, {hi}] is not an interval")));
        }
        Ok(Self { lo, hi })
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// `other ⊆ self` up to an absolute slack on each end.
    pub fn encloses(&self, other: &Interval, slack: f64) -> bool {
        self.lo - slack <= other.lo && other.hi <= self.hi + slack
    }
}

/// Product of nondegenerate intervals: the frame in which a multivariate
/// polynomial is expanded.
#[derive(Debug, Clone, PartialEq)]
pub struct Cube {
    intervals: Vec<Interval>,
}

impl Cube {
    pub fn new(intervals: Vec<Interval>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::InvalidInput("cube needs at least one dimension".into()));
        }
        if let Some(iv) = intervals.iter().find(|iv| iv.lo >= iv.hi) {
            return Err(Error::DegenerateInterval(iv.lo, iv.hi));
        }
        Ok(Self { intervals })
    }

    pub fn from_bounds(bounds: &[(f64, f64)]) -> Result<Self> {
        let ivs = bounds
            .iter()
            .map(|&(lo, hi)| {
                if lo >= hi || !lo.is_finite() || !hi.is_finite() {
                    Err(Error::DegenerateInterval(lo, hi))
                } else {
                    Ok(Interval { lo, hi })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Cube::new(ivs)
    }

    /// The same interval repeated `d` times.
    pub fn uniform(d: usize, lo: f64, hi: f64) -> Result<Self> {
        Cube::from_bounds(&vec![(lo, hi); d])
    }

    pub fn dims(&self) -> usize {
        self.intervals.len()
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn interval(&self, k: usize) -> Interval {
        self.intervals[k]
    }

    pub fn contains(&self, t: &[f64]) -> bool {
        t.len() == self.dims() && self.intervals.iter().zip(t).all(|(iv, &x)| iv.contains(x))
    }

    /// Maps a point of the cube to the reference cube `[-1, 1]^d`.
    pub fn to_reference(&self, t: &[f64]) -> Vec<f64> {
        self.intervals
            .iter()
            .zip(t)
            .map(|(iv, &x)| (2.0 * x - iv.hi - iv.lo) / (iv.hi - iv.lo))
            .collect()
    }
}

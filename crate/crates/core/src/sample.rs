use crate::error::{Error, Result};

/// An ordered, nonempty list of observations in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample(Vec<f64>);

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some((index, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, x)| !(0.0..=1.0).contains(*x))
        {
            return Err(Error::ObservationOutOfRange { index, value });
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; kept for clippy's `len_without_is_empty`.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.0.iter().sum::<f64>() / self.0.len() as f64
    }

    /// Unbiased sample variance; exactly zero for a constant sample.
    pub fn variance(&self) -> f64 {
        let n = self.0.len();
        if n < 2 || self.0.iter().all(|&x| x == self.0[0]) {
            return 0.0;
        }
        let mean = self.mean();
        self.0.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64
    }

    /// Maps every observation `x` to `1 - x`. Upper bounds are lower bounds
    /// of the reflected sample.
    pub fn reflect(&self) -> Self {
        Self(self.0.iter().map(|x| 1.0 - x).collect())
    }

    /// True when every observation is exactly 0 or 1.
    pub fn is_binary(&self) -> bool {
        self.0.iter().all(|&x| x == 0.0 || x == 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_out_of_range() {
        assert_eq!(Sample::new(vec![]), Err(Error::EmptySample));
        assert_eq!(
            Sample::new(vec![0.2, 1.5]),
            Err(Error::ObservationOutOfRange {
                index: 1,
                value: 1.5
            })
        );
        assert!(Sample::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn moments_and_reflection() {
        let s = Sample::new(vec![0.0, 0.5, 1.0]).unwrap();
        assert_eq!(s.mean(), 0.5);
        assert_eq!(s.variance(), 0.25);
        assert_eq!(s.reflect().values(), &[1.0, 0.5, 0.0]);
        assert!(!s.is_binary());
        assert!(Sample::new(vec![0.0, 1.0]).unwrap().is_binary());
    }
}

//! Sampled time series of simulation state.

use crate::{Error, Result};

/// An ordered sequence of sample times with matching states.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<S> {
    times: Vec<f64>,
    states: Vec<S>,
}

impl<S> Trajectory<S> {
    /// Build from parallel vectors; times must be strictly increasing and
    /// match the states in length.
    pub fn new(times: Vec<f64>, states: Vec<S>) -> Result<Self> {
        if times.len() != states.len() {
            return Err(Error::GridMismatch(format!(
                "{} times vs {} states",
                times.len(),
                states.len()
            )));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::GridMismatch(
                "times must be strictly increasing".into(),
            ));
        }
        Ok(Self { times, states })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[S] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &S)> {
        self.times.iter().copied().zip(self.states.iter())
    }

    /// Map the states, keeping the grid.
    pub fn map<T>(&self, f: impl FnMut(&S) -> T) -> Trajectory<T> {
        Trajectory {
            times: self.times.clone(),
            states: self.states.iter().map(f).collect(),
        }
    }

    /// Check that two trajectories share the same time grid (within `tol`).
    pub fn same_grid<T>(&self, other: &Trajectory<T>, tol: f64) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::GridMismatch(format!(
                "lengths differ: {} vs {}",
                self.len(),
                other.len()
            )));
        }
        for (a, b) in self.times.iter().zip(other.times.iter()) {
            if (a - b).abs() > tol {
                return Err(Error::GridMismatch(format!(
                    "sample times differ: {a} vs {b}"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(Trajectory::new(vec![0.0, 1.0], vec![1]).is_err());
        assert!(Trajectory::new(vec![0.0, 0.0], vec![1, 2]).is_err());
        assert!(Trajectory::new(vec![1.0, 0.5], vec![1, 2]).is_err());
        assert!(Trajectory::new(vec![0.0, 0.5], vec![1, 2]).is_ok());
    }
}

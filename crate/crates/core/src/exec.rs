//! Sequential or data-parallel evaluation of independent work items.

/// How sweeps over grids, samples and parameter pairs are evaluated.
///
/// Results never depend on the choice: maps preserve order and the only
/// reductions are maxima.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Uses the rayon thread pool when the `parallel` feature is enabled and
    /// falls back to sequential evaluation otherwise.
    #[default]
    Parallel,
}

impl Execution {
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                items.par_iter().map(f).collect()
            }
            _ => items.iter().map(f).collect(),
        }
    }

    /// Largest value of `f`, or `None` on empty input. NaN dominates.
    pub fn max_of<T, F>(self, items: &[T], f: F) -> Option<f64>
    where
        T: Sync,
        F: Fn(&T) -> f64 + Sync + Send,
    {
        self.map(items, f).into_iter().reduce(nan_max)
    }

    /// Like [`Execution::max_of`] for fallible items; the first error in
    /// item order wins.
    pub fn try_max_of<T, E, F>(self, items: &[T], f: F) -> Result<Option<f64>, E>
    where
        T: Sync,
        E: Send,
        F: Fn(&T) -> Result<f64, E> + Sync + Send,
    {
        let mut best: Option<f64> = None;
        for r in self.map(items, f) {
            let v = r?;
            best = Some(best.map_or(v, |b| nan_max(b, v)));
        }
        Ok(best)
    }
}

fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

//! Parallel or sequential mapping, selected at run time.
//!
//! With the `parallel` feature off every mode runs sequentially.

/// How independent work items are executed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Exec {
    #[default]
    Parallel,
    Sequential,
}

impl Exec {
    /// Map `f` over `items`, preserving order.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                items.par_iter().map(f).collect()
            }
            _ => items.iter().map(f).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_modes_agree() {
        let v: Vec<i64> = (0..100).collect();
        let a = Exec::Parallel.map(&v, |x| x * x);
        let b = Exec::Sequential.map(&v, |x| x * x);
        assert_eq!(a, b);
    }
}

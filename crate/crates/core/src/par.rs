//! Order-preserving data-parallel helpers with a sequential fallback.

/// Execution strategy for batch work.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            Exec::Parallel
        }
        #[cfg(not(feature = "parallel"))]
        {
            Exec::Sequential
        }
    }
}

/// Execution strategy for a requested thread count; `Some(1)` runs sequentially.
/// Sizes the global pool once; later calls keep the first size.
pub fn with_threads(threads: Option<usize>) -> Exec {
    match threads {
        Some(1) => Exec::Sequential,
        #[cfg(feature = "parallel")]
        Some(n) => {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
            Exec::Parallel
        }
        _ => Exec::default(),
    }
}

/// Maps `f` over `items`, keeping input order.
pub fn par_map<T, U, F>(exec: Exec, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    match exec {
        Exec::Sequential => items.iter().map(f).collect(),
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
    }
}

/// Like `par_map` over an index range.
pub fn par_range<U, F>(exec: Exec, n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    match exec {
        Exec::Sequential => (0..n).map(f).collect(),
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
    }
}

/// True if `pred` holds for every item.
pub fn par_all<T, F>(exec: Exec, items: &[T], pred: F) -> bool
where
    T: Sync,
    F: Fn(&T) -> bool + Sync + Send,
{
    match exec {
        Exec::Sequential => items.iter().all(pred),
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            items.par_iter().all(pred)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_preserved() {
        let v: Vec<u64> = (0..1000).collect();
        let a = par_map(Exec::Sequential, &v, |x| x * x);
        let b = par_map(Exec::default(), &v, |x| x * x);
        assert_eq!(a, b);
        assert_eq!(
            par_range(Exec::default(), 5, |i| i + 1),
            vec![1, 2, 3, 4, 5]
        );
        assert!(par_all(Exec::default(), &v, |x| *x < 1000));
    }
}

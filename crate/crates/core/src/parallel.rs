//! Deterministic data-parallel helpers.
//!
//! Every stochastic quantity in the crate is produced as a pure function of
//! an index (path number, sample number), written into an index-ordered
//! buffer and then reduced in fixed-size blocks. The block partition does not
//! depend on the thread count or on any caller-supplied batch size, so
//! floating-point sums are bit-identical between sequential and parallel
//! runs.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Number of elements per reduction block.
pub const REDUCTION_BLOCK: usize = 4096;

/// How index-parallel work is scheduled.
///
/// `Parallel` falls back to sequential execution when the crate is built
/// without the `parallel` feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// Whether work will actually be spread over the rayon pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Evaluates `f(0), f(1), ..., f(len - 1)` into a vector, handing out work in
/// chunks of `chunk` indices.
pub fn map_indexed<T, F>(exec: Execution, len: usize, chunk: usize, f: F) -> Vec<T>
where
    T: Send + Clone + Default,
    F: Fn(u64) -> T + Sync + Send,
{
    let chunk = chunk.max(1);
    let mut out = vec![T::default(); len];
    let fill = |(c, slice): (usize, &mut [T])| {
        let base = c * chunk;
        for (j, slot) in slice.iter_mut().enumerate() {
            *slot = f((base + j) as u64);
        }
    };
    if exec.is_parallel() {
        #[cfg(feature = "parallel")]
        out.par_chunks_mut(chunk).enumerate().for_each(fill);
    } else {
        out.chunks_mut(chunk).enumerate().for_each(fill);
    }
    out
}

/// Sums `g(x)` over `values` using the fixed block partition.
pub fn block_sum<T, G>(exec: Execution, values: &[T], g: G) -> f64
where
    T: Sync,
    G: Fn(&T) -> f64 + Sync + Send,
{
    let partial = |block: &[T]| block.iter().map(&g).sum::<f64>();
    let partials: Vec<f64> = if exec.is_parallel() {
        #[cfg(feature = "parallel")]
        {
            values.par_chunks(REDUCTION_BLOCK).map(partial).collect()
        }
        #[cfg(not(feature = "parallel"))]
        unreachable!()
    } else {
        values.chunks(REDUCTION_BLOCK).map(partial).collect()
    };
    partials.iter().sum()
}

/// Sample mean and unbiased sample variance of `g(x)` over `values`.
///
/// Two passes over the data; both are block reductions.
pub fn mean_and_variance<T, G>(exec: Execution, values: &[T], g: G) -> (f64, f64)
where
    T: Sync,
    G: Fn(&T) -> f64 + Sync + Send,
{
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = block_sum(exec, values, &g) / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let ss = block_sum(exec, values, |x| {
        let d = g(x) - mean;
        d * d
    });
    (mean, ss / (n - 1) as f64)
}

//! Execution policy for the data-parallel inner loops.
//!
//! With the `parallel` feature (default) the heavy per-slab loops (kernel and
//! symbol transforms, Gaussian kernel evaluation, Choi assembly, gate matrices)
//! run on the rayon pool. Without it, or with [`Exec::Sequential`], the same
//! closures run on the calling thread. Results are bit-identical either way:
//! parallel loops only write disjoint outputs, never reduce.

use ndarray::{ArrayViewMut1, ArrayViewMut3, Axis};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Exec {
    #[cfg_attr(not(feature = "parallel"), default)]
    Sequential,
    #[cfg(feature = "parallel")]
    #[default]
    Parallel,
}

impl Exec {
    /// Every policy compiled into this build.
    pub fn available() -> Vec<Exec> {
        #[cfg(feature = "parallel")]
        {
            vec![Exec::Sequential, Exec::Parallel]
        }
        #[cfg(not(feature = "parallel"))]
        {
            vec![Exec::Sequential]
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Exec::Sequential => "sequential",
            #[cfg(feature = "parallel")]
            Exec::Parallel => "parallel",
        }
    }

    /// Runs `f(index, slab)` over the outer axis of a 4-index array viewed as slabs.
    pub(crate) fn for_each_slab<T, F>(self, mut slabs: ndarray::ArrayViewMut4<T>, f: F)
    where
        T: Send + Sync,
        F: Fn(usize, ArrayViewMut3<T>) + Sync + Send,
    {
        match self {
            Exec::Sequential => {
                for (i, slab) in slabs.axis_iter_mut(Axis(0)).enumerate() {
                    f(i, slab);
                }
            }
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                slabs
                    .axis_iter_mut(Axis(0))
                    .into_par_iter()
                    .enumerate()
                    .for_each(|(i, slab)| f(i, slab));
            }
        }
    }

    /// Runs `f(row_index, row)` over the rows of a matrix.
    pub(crate) fn for_each_row<T, F>(self, mut rows: ndarray::ArrayViewMut2<T>, f: F)
    where
        T: Send + Sync,
        F: Fn(usize, ArrayViewMut1<T>) + Sync + Send,
    {
        match self {
            Exec::Sequential => {
                for (i, row) in rows.axis_iter_mut(Axis(0)).enumerate() {
                    f(i, row);
                }
            }
            #[cfg(feature = "parallel")]
            Exec::Parallel => {
                use rayon::prelude::*;
                rows.axis_iter_mut(Axis(0))
                    .into_par_iter()
                    .enumerate()
                    .for_each(|(i, row)| f(i, row));
            }
        }
    }
}

//! Independent checks over many inputs. With the `parallel` feature the work
//! is spread over a rayon pool; results always come back in input order.

use crate::error::Result;
use crate::forms::Form;
use crate::pseudostructure::{self, Pseudostructure};
use crate::symexpr::{Probe, ZeroTest};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

/// Order-preserving map. `Parallel` falls back to sequential without the
/// `parallel` feature.
pub fn map<T, R, F>(exec: Exec, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}

pub fn flat_closure(exec: Exec, forms: &[Form], probe: &Probe) -> Vec<ZeroTest> {
    map(exec, forms, |f| f.is_closed_flat_with(probe))
}

pub fn closure_on(exec: Exec, cases: &[(Pseudostructure, Form)], probe: &Probe) -> Vec<Result<ZeroTest>> {
    map(exec, cases, |(pi, f)| pseudostructure::is_closed_on_with(pi, f, probe))
}

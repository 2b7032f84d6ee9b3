//! Desk-scale versions of the scaling and sparse-recovery sweeps.

use std::fmt;

use fct_core::Norm;

use crate::error::{Error, Result};
use crate::record::{Method, RunRecord};
use crate::runner::{run_problem, Problem, RunOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    /// Total degree 3, `D = 2..=25`.
    ScalingD3,
    /// Total degree 6, `D = 2..=25`.
    ScalingD6,
    /// Sparse support in `D = 100` at max-degree 5.
    SparseD100,
}

impl Suite {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "scaling-d3" => Some(Suite::ScalingD3),
            "scaling-d6" => Some(Suite::ScalingD6),
            "sparse-d100" => Some(Suite::SparseD100),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::ScalingD3 => "scaling-d3",
            Suite::ScalingD6 => "scaling-d6",
            Suite::SparseD100 => "sparse-d100",
        }
    }

    pub fn default_methods(self) -> &'static [Method] {
        match self {
            Suite::ScalingD3 | Suite::ScalingD6 => &[Method::Fct, Method::Dct, Method::Rlsi],
            Suite::SparseD100 => &[Method::Fct, Method::Rlsi],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One problem instance of a suite, before a seed is attached.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    Dense { dim: usize, degree: u32 },
    Sparse { dim: usize, degree: u32, count: usize },
}

impl Case {
    pub fn problem(self, seed: u64) -> Result<Problem> {
        match self {
            Case::Dense { dim, degree } => Problem::dense(dim, degree, Norm::One, seed),
            Case::Sparse { dim, degree, count } => Problem::sparse(dim, degree, count, seed),
        }
    }
}

/// The problem instances of `suite`; `huge` adds the `N >= 1e6` sparse runs.
pub fn cases(suite: Suite, huge: bool) -> Vec<Case> {
    match suite {
        Suite::ScalingD3 => (2..=25).map(|dim| Case::Dense { dim, degree: 3 }).collect(),
        Suite::ScalingD6 => (2..=25).map(|dim| Case::Dense { dim, degree: 6 }).collect(),
        Suite::SparseD100 => {
            let mut counts = vec![1_000, 10_000, 100_000];
            if huge {
                counts.extend([1_000_000, 10_000_000]);
            }
            counts
                .into_iter()
                .map(|count| Case::Sparse {
                    dim: 100,
                    degree: 5,
                    count,
                })
                .collect()
        }
    }
}

/// Runs every case for every method and seed `base_seed..base_seed + seeds`.
/// Failures are recorded as status rows; `on_row` sees each row as it is
/// produced.
pub fn run_suite(
    suite: Suite,
    methods: &[Method],
    seeds: u64,
    huge: bool,
    base: &RunOptions,
    mut on_row: impl FnMut(&RunRecord),
) -> Result<Vec<RunRecord>> {
    if seeds == 0 {
        return Err(Error::Usage("--seeds must be at least 1".into()));
    }
    let mut rows = Vec::new();
    for case in cases(suite, huge) {
        for seed in base.seed..base.seed + seeds {
            let problem = case.problem(seed)?;
            for &method in methods {
                let opts = RunOptions {
                    seed,
                    ..base.clone()
                };
                let row = run_problem(method, &problem, &opts)?.record;
                on_row(&row);
                rows.push(row);
            }
        }
    }
    Ok(rows)
}

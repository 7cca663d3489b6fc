use std::fs::File;
use std::io::BufWriter;

use anyhow::Context;
use serde::Serialize;

use rrrkit::model::{deserialize_instance, AnyInstance, Instance, RunConfig};
use rrrkit::solvers::{self, RunOutcome, RunStatus};
use rrrkit::Scalar;

use crate::{write_output, SolveArgs};

#[derive(Debug, Serialize)]
pub struct Summary {
    pub schema: u32,
    pub algorithm: String,
    pub beta: f64,
    pub seed: u64,
    pub status: RunStatus,
    pub iters: usize,
    pub final_feas_gap: Option<f64>,
    pub final_signal_error: Option<f64>,
}

impl Summary {
    pub fn new<S: Scalar>(cfg: &RunConfig<S>, out: &RunOutcome<S>) -> Self {
        Summary {
            schema: 1,
            algorithm: cfg.algorithm.to_string(),
            beta: cfg.beta,
            seed: cfg.seed,
            status: out.status,
            iters: out.state.t,
            final_feas_gap: out.final_feas_gap(),
            final_signal_error: out.final_signal_error(),
        }
    }
}

pub fn load_instance(path: &std::path::Path) -> anyhow::Result<AnyInstance> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    deserialize_instance(&bytes).with_context(|| format!("invalid instance file {}", path.display()))
}

fn solve<S: Scalar>(inst: &Instance<S>, args: &SolveArgs) -> anyhow::Result<()> {
    let cfg = RunConfig::<S> {
        algorithm: args.alg,
        beta: args.beta,
        max_iters: args.max_iters,
        solve_tol: args.tol,
        trace_every: args.trace_every,
        seed: args.seed,
        ..RunConfig::default()
    };
    let out = solvers::run(inst, &cfg)?;
    if let Some(path) = &args.trace {
        let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
        out.trace.write_csv(BufWriter::new(file))?;
    }
    let summary = serde_json::to_vec_pretty(&Summary::new(&cfg, &out))?;
    write_output(args.summary.as_ref(), &summary)
}

pub fn run(args: &SolveArgs) -> anyhow::Result<()> {
    match load_instance(&args.inst)? {
        AnyInstance::Real(i) => solve(&i, args),
        AnyInstance::Complex(i) => solve(&i, args),
    }
}

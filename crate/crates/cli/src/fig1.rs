use std::fs::File;
use std::io::BufWriter;

use anyhow::Context;
use serde::Serialize;

use rrrkit::model::{Algorithm, Init, RunConfig};
use rrrkit::probgen::{gen_gaussian, random_init};
use rrrkit::projectors::ProjectorPair;
use rrrkit::solvers::{run_with, RunStatus};

use crate::{write_output, Fig1Args};

pub const FIG1_M: usize = 80;
pub const FIG1_N: usize = 50;
pub const FIG1_BETAS: [f64; 2] = [0.5, 1.0];

#[derive(Debug, Serialize)]
struct RunSummary {
    beta: f64,
    trace: String,
    status: RunStatus,
    iters: usize,
    final_feas_gap: Option<f64>,
    final_signal_error: Option<f64>,
    f_r_sign_changes: usize,
}

#[derive(Debug, Serialize)]
struct Fig1Summary {
    schema: u32,
    seed: u64,
    m: usize,
    n: usize,
    /// `|f_R|` at or below this is not counted as having a sign.
    sign_floor: f64,
    runs: Vec<RunSummary>,
}

pub fn run(args: &Fig1Args) -> anyhow::Result<()> {
    std::fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("cannot create {}", args.out_dir.display()))?;
    let inst = gen_gaussian::<f64>(FIG1_M, FIG1_N, args.seed)?;
    let p = ProjectorPair::new(&inst)?;
    let init = random_init::<f64>(FIG1_M, args.seed.wrapping_add(1));
    let sign_floor = 1e-9 * inst.b_norm().powi(2);

    let mut runs = Vec::new();
    for beta in FIG1_BETAS {
        let cfg = RunConfig {
            algorithm: Algorithm::Rrr,
            beta,
            max_iters: args.max_iters,
            init: Init::Given(init.clone()),
            seed: args.seed,
            ..RunConfig::default()
        };
        let out = run_with(&inst, &p, &cfg)?;
        let name = format!("fig1_beta{beta}.csv");
        let path = args.out_dir.join(&name);
        let file = File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
        out.trace.write_csv(BufWriter::new(file))?;
        runs.push(RunSummary {
            beta,
            trace: name,
            status: out.status,
            iters: out.state.t,
            final_feas_gap: out.final_feas_gap(),
            final_signal_error: out.final_signal_error(),
            f_r_sign_changes: out.trace.f_r_sign_changes(sign_floor),
        });
    }

    let summary = Fig1Summary { schema: 1, seed: args.seed, m: FIG1_M, n: FIG1_N, sign_floor, runs };
    let bytes = serde_json::to_vec_pretty(&summary)?;
    write_output(Some(&args.out_dir.join("fig1_summary.json")), &bytes)?;
    write_output(None, &bytes)
}

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use echo_mitigation::seed::{derive_seed, SeedStream};
use echo_mitigation::tfim::{build_echo_circuit, build_forward_circuit, build_prep_circuit, IsingParams};

use super::{load_config, ConfigArgs};
use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CircuitKind {
    Echo,
    Forward,
    Prep,
}

#[derive(Debug, Args)]
pub struct InspectArgs {
    #[command(flatten)]
    pub common: ConfigArgs,
    #[arg(long, value_enum, default_value = "echo")]
    pub kind: CircuitKind,
    /// Evolution time. Defaults to the last echo time point, or `forward.t_max`.
    #[arg(long)]
    pub time: Option<f64>,
    /// Trotter steps (each way for echo), overriding the config.
    #[arg(long)]
    pub n_trotter: Option<usize>,
    /// Prepared-state index for `--kind prep`.
    #[arg(long, default_value_t = 0)]
    pub state: u64,
    /// Print the gate listing after the counts.
    #[arg(long)]
    pub dump: bool,
    /// Write the listing to a file instead.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: &InspectArgs) -> Result<(), CliError> {
    let cfg = load_config(&args.common)?;
    let layout = cfg.layout()?;
    let params = IsingParams {
        h: cfg.ising.h,
        j: cfg.ising.j,
    };
    let (circuit, header) = match args.kind {
        CircuitKind::Echo => {
            let t = args.time.unwrap_or_else(|| *cfg.echo.time_points.last().expect("validated"));
            let n = args.n_trotter.unwrap_or(cfg.echo.n_trotter_each_way);
            (build_echo_circuit(&params, &layout, t, n)?, format!("echo t={t} n_trotter_each_way={n}"))
        }
        CircuitKind::Forward => {
            let t = args.time.unwrap_or(cfg.forward.t_max);
            let n = args.n_trotter.unwrap_or(cfg.forward.n_trotter);
            (build_forward_circuit(&params, &layout, t, n)?, format!("forward t={t} n_trotter={n}"))
        }
        CircuitKind::Prep => {
            let seed = derive_seed(cfg.seeds().data, SeedStream::Prep, args.state);
            (
                build_prep_circuit(seed, &layout, cfg.echo.cnot_prob)?,
                format!("prep state={} seed={seed}", args.state),
            )
        }
    };
    let c = circuit.gate_counts();
    println!("circuit {header} qubits={}", circuit.n_qubits());
    println!("RX {}", c.rx);
    println!("RZ {}", c.rz);
    println!("U2 {}", c.u2);
    println!("CNOT {}", c.cnot);
    println!("total {}", c.total());
    if let Some(path) = &args.out {
        std::fs::write(path, circuit.dump()).map_err(|e| CliError::io(path, e))?;
    } else if args.dump {
        print!("{}", circuit.dump());
    }
    Ok(())
}

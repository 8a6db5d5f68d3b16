use std::process::ExitCode;

use clap::Parser;
use fidelity::runner::{self, config, CliArgs, ExitStatus, RunConfig};

fn main() -> ExitCode {
    let args = match CliArgs::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                exit(ExitStatus::Usage)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let cfg = match config::workers_from_env().and_then(|workers| {
        if let Some(n) = workers {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| fidelity::FidelityError::Config(e.to_string()))?;
        }
        RunConfig::from_args(&args)
    }) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return exit(ExitStatus::Usage);
        }
    };
    let mut stdout = std::io::stdout().lock();
    match runner::run(&cfg, &mut stdout) {
        Ok(outcome) => exit(outcome.status),
        Err(e) => {
            let status = ExitStatus::for_error(&e);
            eprintln!("error: {e}");
            exit(status)
        }
    }
}

fn exit(status: ExitStatus) -> ExitCode {
    ExitCode::from(status.code() as u8)
}

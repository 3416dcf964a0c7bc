//! Command-line front end: `synth`, `images`, `train`, `eval` and `predict`.
//!
//! Every command is a plain function over its argument struct so it can be
//! driven from tests as well as from the `nif` binary.

pub mod args;
pub mod commands;
pub mod error;
pub mod manifest;

use std::ffi::OsString;

use clap::Parser;

pub use args::{Cli, Command};
pub use error::{CliError, CliResult};

/// Parses `argv`, runs the command and returns the process exit code:
/// 0 success, 1 usage error, 2 data error, 3 I/O error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: &Command) -> CliResult<()> {
    match command {
        Command::Synth(a) => {
            let dirs = commands::cmd_synth(a)?;
            println!("wrote {} bundles under {}", dirs.len(), a.out.display());
        }
        Command::Images(a) => {
            let s = commands::cmd_images(a)?;
            println!(
                "rendered {} images ({} events skipped at recording edges) with {} workers",
                s.images, s.skipped, s.workers
            );
        }
        Command::Train(a) => {
            let m = commands::cmd_train(a)?;
            if let (Some(best), Some(last)) = (m.best_epoch, m.history.last()) {
                println!(
                    "best epoch {best}: val accuracy {:.4}; last epoch train accuracy {:.4}",
                    m.history[best - 1].val_accuracy,
                    last.train_accuracy
                );
            }
            if let Some(acc) = m.test_accuracy() {
                println!("test accuracy {acc:.4}");
            }
        }
        Command::Eval(a) => {
            let e = commands::cmd_eval(a)?;
            println!("accuracy {:.4}, mean loss {:.6}", e.accuracy, e.mean_loss);
            for row in &e.confusion {
                println!("{}", row.iter().map(|v| format!("{v:5}")).collect::<String>());
            }
        }
        Command::Predict(a) => {
            let p = commands::cmd_predict(a)?;
            println!("wrote {} predictions to {}", p.len(), a.out.display());
        }
    }
    Ok(())
}

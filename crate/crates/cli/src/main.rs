use std::process::ExitCode;

use clap::Parser;
use lexforge_cli::args::{Cli, Command};
use lexforge_cli::commands::{self, emit};
use lexforge_cli::pipeline::{run_pipeline, DEFAULT_SEED};
use lexforge_cli::{logging, CliError, Result};

fn main() -> ExitCode {
    let cli = Cli::parse();
    logging::init();
    if let Some(n) = cli.threads.filter(|&n| n > 0) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("cannot size thread pool: {e}");
        }
    }
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Clean(a) => emit(a.report.as_deref(), &commands::clean(&a)?),
        Command::Dedup(a) => emit(a.report.as_deref(), &commands::dedup(&a)?),
        Command::TrainTokenizer(a) => emit(a.report.as_deref(), &commands::train_tokenizer(&a)?),
        Command::MergeTokenizer(a) => emit(a.report.as_deref(), &commands::merge_tokenizer(&a)?),
        Command::Encode(a) => emit(a.report.as_deref(), &commands::encode(&a)?),
        Command::TokenizeStats(a) => emit(a.report.as_deref(), &commands::tokenize_stats(&a)?),
        Command::Pack(a) => emit(a.report.as_deref(), &commands::pack(&a)?),
        Command::Prepare(a) => emit(None, &commands::prepare(&a, DEFAULT_SEED)?),
        Command::RenderPrompts(a) => emit(None, &commands::render_prompts(&a)?),
        Command::Score(a) => {
            let report = commands::score(&a)?;
            if let Some(path) = a.report.as_deref() {
                lexforge::jsonl::write_pretty(path, &report).map_err(CliError::from)?;
            }
            print!("{}", commands::score_table(&a.task.to_string(), &report));
            Ok(())
        }
        Command::Run(a) => {
            let report = run_pipeline(&a.manifest, a.seed)?;
            log::info!("pipeline finished: {} stages", report.stages.len());
            Ok(())
        }
    }
}

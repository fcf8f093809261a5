mod args;
mod commands;
mod error;
mod label;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::Ctx;
use error::CliResult;

fn run(cli: &Cli) -> CliResult<()> {
    let ctx = Ctx::new(&cli.overrides)?;
    match &cli.command {
        Command::Synth(a) => commands::synth(&ctx, a),
        Command::Extract => commands::extract(&ctx),
        Command::Pool => commands::pool(&ctx),
        Command::Match => commands::match_tweets(&ctx),
        Command::Featurize => commands::featurize(&ctx),
        Command::Train => commands::train_cmd(&ctx),
        Command::Rank(a) => commands::rank(&ctx, a),
        Command::Eval(a) => commands::eval(&ctx, a),
        Command::Label(a) => commands::label(&ctx, a),
        Command::Pipeline(a) => commands::pipeline(&ctx, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match std::panic::catch_unwind(|| run(&cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
        Err(_) => ExitCode::from(3),
    }
}

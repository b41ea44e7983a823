use clap::Parser;

use submod_cli::commands::{run, Cli};
use submod_cli::ExitCode;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .init();

    // clap's own exit codes differ from the contract: usage problems must
    // exit 64
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            eprint!("{e}");
            std::process::exit(ExitCode::Usage as i32);
        }
        Err(e) => {
            // --help / --version
            print!("{e}");
            std::process::exit(0);
        }
    };

    match run(&cli) {
        Ok(report) => {
            println!("{}", report.to_json());
        }
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(err.exit_code() as i32);
        }
    }
}

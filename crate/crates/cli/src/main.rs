use clap::error::ErrorKind;
use clap::Parser;
use sqkd_cli::{run_cli, Cli, CliError};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => {
            let key = e
                .get(clap::error::ContextKind::InvalidArg)
                .map(|v| {
                    let arg = v.to_string();
                    arg.split_whitespace()
                        .next()
                        .unwrap_or("")
                        .trim_start_matches('-')
                        .to_string()
                })
                .unwrap_or_else(|| "arguments".into());
            let message = e.to_string();
            let first = message.lines().next().unwrap_or("invalid arguments");
            let err = CliError::config(key, first.trim_start_matches("error: "));
            eprintln!("{}", err.to_line());
            std::process::exit(err.exit_code());
        }
    };
    std::process::exit(run_cli(cli));
}

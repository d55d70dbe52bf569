use clap::Parser;
use rulesky::cli::{run, Cli};
use rulesky::Error;

fn main() {
    env_logger::init();
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        // 2 = usage/parameter problems, 3 = the environment failed us.
        std::process::exit(match e {
            Error::Io(_) => 3,
            _ => 2,
        });
    }
}

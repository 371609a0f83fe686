mod cli;
mod run;

use clap::Parser;

fn main() {
    // Usage errors share the parse-error code so that 2 keeps meaning
    // degenerate input.
    let args = match cli::Cli::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let _ = e.print();
            std::process::exit(if e.use_stderr() { run::EXIT_PARSE } else { 0 });
        }
    };
    let code = match run::run(args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("iets: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}

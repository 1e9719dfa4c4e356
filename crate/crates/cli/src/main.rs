use std::process::ExitCode;

use clap::Parser;
use qcat_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = cli.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global().expect("thread pool is built once");
    }
    let report = run(&cli);
    print!("{}", report.render());
    ExitCode::from(report.status.code() as u8)
}

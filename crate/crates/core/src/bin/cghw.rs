use cghw::cli::{run, CliError};

fn main() {
    let mut stdout = std::io::stdout().lock();
    if let Err(err) = run(std::env::args_os(), &mut stdout) {
        match &err {
            CliError::Usage(e) => {
                let _ = e.print();
            }
            CliError::Failed(e) => eprintln!("cghw: {e}"),
        }
        std::process::exit(err.exit_code());
    }
}

use clap::Parser;

fn main() {
    let cli = liecoh::cli::Cli::parse();
    match liecoh::cli::run(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(1);
        }
    }
}

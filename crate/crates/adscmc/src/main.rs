//! Command-line entry point; see [`adscmc::cli`].

fn main() {
    let code = adscmc::cli::main_with_args(std::env::args_os(), &mut std::io::stdout());
    std::process::exit(code);
}

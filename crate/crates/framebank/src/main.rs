use std::io::Write;

fn main() {
    let result = framebank::cli::run(std::env::args_os());
    print!("{}", result.stdout);
    let _ = std::io::stdout().flush();
    eprint!("{}", result.stderr);
    std::process::exit(result.exit_code);
}

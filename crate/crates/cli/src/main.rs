fn main() {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let code = timekk_cli::main_with(std::env::args_os(), &mut out, &mut std::io::stderr());
    std::process::exit(code);
}

use std::io::IsTerminal;

fn main() {
    let stdout = std::io::stdout();
    let color = stdout.is_terminal() && std::env::var_os("NO_COLOR").is_none_or(|v| v.is_empty());
    let code = amasnet::cli::run_with_color(
        std::env::args_os(),
        &mut stdout.lock(),
        &mut std::io::stderr(),
        color,
    );
    std::process::exit(code);
}

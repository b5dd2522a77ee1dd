use std::io::IsTerminal;

fn main() -> anyhow::Result<()> {
    let cwd = std::env::current_dir()?;
    let color = std::env::var_os("MSAFORGE_NO_COLOR").is_none() && std::io::stderr().is_terminal();
    let code = msaforge_cli::run(
        std::env::args_os(),
        &cwd,
        color,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    std::process::exit(code);
}

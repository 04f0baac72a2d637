use landscape_lab::cli;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(e) = cli::configure_threads() {
        eprintln!("error: {e}");
        std::process::exit(cli::EXIT_CONFIG);
    }
    std::process::exit(cli::run(std::env::args_os()));
}

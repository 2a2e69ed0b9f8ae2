use clap::Parser;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = zigcast::cli::Cli::parse();
    if let Err(e) = zigcast::commands::run(cli) {
        let report = serde_json::to_string(&e.report()).unwrap_or_else(|_| format!("{{\"message\":\"{e}\"}}"));
        eprintln!("{report}");
        std::process::exit(e.exit_code());
    }
}

// SPDX-License-Identifier: Apache-2.0

use clap::Parser;

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = nvamp_cli::Cli::parse();
    std::process::exit(nvamp_cli::run(&cli));
}

use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(allpay_cli::run())
}

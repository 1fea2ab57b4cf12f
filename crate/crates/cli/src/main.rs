use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(se2_geodesics_cli::run() as u8)
}

//! Structured logging: one JSON object per event on standard error.

use std::io::Write;

/// Installs the logger. The level comes from `LEXFORGE_LOG` (default `info`).
pub fn init() {
    let env = env_logger::Env::new().filter_or("LEXFORGE_LOG", "info");
    let _ = env_logger::Builder::from_env(env)
        .target(env_logger::Target::Stderr)
        .format(|buf, record| {
            let event = serde_json::json!({
                "ts": buf.timestamp_millis().to_string(),
                "level": record.level().as_str(),
                "target": record.target(),
                "message": record.args().to_string(),
            });
            writeln!(buf, "{event}")
        })
        .try_init();
}

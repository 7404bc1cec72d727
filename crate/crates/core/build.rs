use std::process::Command;

fn main() {
    if let Ok(id) = std::env::var("OOSCAM_BUILD_ID") {
        println!("cargo:rustc-env=OOSCAM_BUILD_ID={id}");
        println!("cargo:rerun-if-env-changed=OOSCAM_BUILD_ID");
        return;
    }
    let id = Command::new("git")
        .args(["describe", "--always", "--dirty", "--tags"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| "unknown".into());
    let version = std::env::var("CARGO_PKG_VERSION").unwrap_or_default();
    println!("cargo:rustc-env=OOSCAM_BUILD_ID=ooscam {version} ({id})");
    println!("cargo:rerun-if-changed=../../.git/HEAD");
    println!("cargo:rerun-if-changed=../../.git/index");
    println!("cargo:rerun-if-env-changed=OOSCAM_BUILD_ID");
}

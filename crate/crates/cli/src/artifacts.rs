use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use frachs::fracops::SampledSignal;
use serde::Serialize;

/// Seconds since the Unix epoch, or `SOURCE_DATE_EPOCH` when set.
pub fn timestamp() -> u64 {
    if let Some(fixed) = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|s| s.trim().parse().ok()) {
        return fixed;
    }
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

/// Seventeen significant digits.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self { text }
    }

    pub fn row(&mut self, cells: impl IntoIterator<Item = String>) {
        let cells: Vec<String> = cells.into_iter().collect();
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

/// `t, u_1, ..., u_dim`.
pub fn signal_csv(u: &SampledSignal<f64>) -> String {
    let header: Vec<String> = std::iter::once("t".to_string()).chain((1..=u.dim()).map(|c| format!("u_{c}"))).collect();
    let refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut csv = Csv::new(&refs);
    for (i, t) in u.grid().times().enumerate() {
        csv.row(std::iter::once(fmt_real(t)).chain(u.point(i).iter().map(|&v| fmt_real(v))));
    }
    csv.into_string()
}

pub fn to_json<S: Serialize>(value: &S) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

/// Writes `{command}-{hash}.{ext}` files into `dir` and remembers their names.
pub struct ArtifactWriter {
    dir: PathBuf,
    stem: String,
    written: Vec<String>,
}

impl ArtifactWriter {
    pub fn new(dir: &Path, command: &str, short_hash: &str) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), stem: format!("{command}-{short_hash}"), written: Vec::new() })
    }

    pub fn write(&mut self, suffix: &str, contents: &str) -> io::Result<PathBuf> {
        let name = format!("{}{suffix}", self.stem);
        let path = self.dir.join(&name);
        fs::write(&path, contents)?;
        self.written.push(name);
        Ok(path)
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }
}

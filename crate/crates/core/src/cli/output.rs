use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::sensan::SensitivityTrace;
use crate::Error;

/// Pretty JSON with sorted keys, floats as `{:.16e}` (17 significant digits)
/// and non-finite values as `null`.
pub fn canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(v, 0, &mut out);
    out.push('\n');
    out
}

fn write_value(v: &Value, depth: usize, out: &mut String) {
    let pad = |d: usize| "  ".repeat(d);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                let _ = write!(out, "{i}");
            } else if let Some(u) = n.as_u64() {
                let _ = write!(out, "{u}");
            } else {
                match n.as_f64() {
                    Some(x) if x.is_finite() => {
                        let _ = write!(out, "{x:.16e}");
                    }
                    _ => out.push_str("null"),
                }
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string serializes")),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                write_value(item, depth + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                out.push_str(&serde_json::to_string(k).expect("key serializes"));
                out.push_str(": ");
                write_value(&map[k.as_str()], depth + 1, out);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push('}');
        }
    }
}

/// Lower-case hex SHA-256 of the compact, key-sorted JSON of `v`.
pub fn config_hash(v: &Value) -> String {
    let digest = Sha256::digest(
        serde_json::to_string(v)
            .expect("value serializes")
            .as_bytes(),
    );
    digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

pub const TRACE_HEADER: &str = "t,error,abs_error,derror,logsens,abs_logsens,spike_flag";

/// Trace as CSV; floats use the shortest round-trip form and masked samples
/// leave the log-sensitivity fields empty.
pub fn trace_csv(tr: &SensitivityTrace) -> String {
    let mut out = String::with_capacity(64 * (tr.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for i in 0..tr.len() {
        let (e, d) = (tr.error[i], tr.derror[i]);
        let _ = write!(out, "{:?},{:?},{:?},{:?},", tr.times[i], e, e.abs(), d);
        if tr.spike_mask[i] || !tr.logsens[i].is_finite() {
            out.push_str(",,1\n");
        } else {
            let s = tr.logsens[i];
            let _ = writeln!(out, "{s:?},{:?},0", s.abs());
        }
    }
    out
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), Error> {
    let io = |source| Error::Io {
        path: path.display().to_string(),
        source,
    };
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(io)?;
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(io)
}

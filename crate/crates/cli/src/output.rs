use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde_json::Value;

/// `x` with 12 significant digits in positional notation, trailing zeros
/// dropped.
pub fn sig12(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.11e}", x);
    let (mant, exp) = sci.split_once('e').expect("exponent notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    let neg = mant.starts_with('-');
    let digits: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
    let mut out = String::new();
    if exp < 0 {
        out.push_str("0.");
        out.extend(std::iter::repeat('0').take((-exp - 1) as usize));
        out.push_str(&digits);
    } else {
        let int_len = exp as usize + 1;
        if int_len >= digits.len() {
            out.push_str(&digits);
            out.extend(std::iter::repeat('0').take(int_len - digits.len()));
        } else {
            out.push_str(&digits[..int_len]);
            out.push('.');
            out.push_str(&digits[int_len..]);
        }
    }
    if out.contains('.') {
        let trimmed = out.trim_end_matches('0').trim_end_matches('.').len();
        out.truncate(trimmed);
    }
    if neg {
        out.insert(0, '-');
    }
    out
}

/// Renders rows of JSON scalars as CSV.
pub fn csv(columns: &[String], rows: &[Vec<Value>]) -> String {
    let mut out = columns.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .map(|v| match v {
                Value::Number(n) => sig12(n.as_f64().expect("finite number")),
                Value::Bool(b) => b.to_string(),
                Value::String(s) => s.clone(),
                Value::Null => String::new(),
                other => other.to_string(),
            })
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values are serializable");
    s.push('\n');
    s
}

/// Target of a run's artifact: an explicit path, a file named after the run
/// inside the default directory, or standard output.
pub fn destination(explicit: Option<&Path>, dir: Option<&Path>, stem: &str, ext: &str) -> Option<PathBuf> {
    match (explicit, dir) {
        (Some(p), _) => Some(p.to_path_buf()),
        (None, Some(d)) => Some(d.join(format!("{stem}.{ext}"))),
        (None, None) => None,
    }
}

pub fn emit(target: Option<&Path>, body: &str) -> io::Result<()> {
    match target {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            fs::write(path, body)?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
        None => io::stdout().lock().write_all(body.as_bytes()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(1.5), "1.5");
        assert_eq!(sig12(3.0), "3");
        assert_eq!(sig12(0.05), "0.05");
        assert_eq!(sig12(3.3291057413759), "3.32910574138");
        assert_eq!(sig12(-0.000123456789012345), "-0.000123456789012");
        assert_eq!(sig12(123456789012345.0), "123456789012000");
        assert_eq!(sig12(9.9999999999999), "10");
        assert_eq!(sig12(100.0), "100");
    }

    #[test]
    fn csv_cells() {
        let cols = vec!["b".to_string(), "ok".to_string(), "why".to_string()];
        let rows = vec![vec![Value::from(0.1 + 0.2), Value::Bool(true), Value::from("OK")]];
        assert_eq!(csv(&cols, &rows), "b,ok,why\n0.3,true,OK\n");
    }
}

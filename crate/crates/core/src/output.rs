//! Deterministic CSV emission.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;

/// Scientific notation with 9 significant digits and a signed two-digit
/// exponent, e.g. `1.37836189e+00`.
pub fn sci(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.8e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

/// Writes a header row and equal-length columns, LF-terminated.
pub fn write_columns<W: Write>(out: &mut W, header: &[&str], columns: &[&[f64]]) -> io::Result<()> {
    debug_assert_eq!(header.len(), columns.len());
    let rows = columns.first().map_or(0, |c| c.len());
    let mut buf = String::with_capacity(rows * columns.len() * 16);
    buf.push_str(&header.join(","));
    buf.push('\n');
    for i in 0..rows {
        for (j, col) in columns.iter().enumerate() {
            if j > 0 {
                buf.push(',');
            }
            let _ = write!(buf, "{}", sci(col[i]));
        }
        buf.push('\n');
    }
    out.write_all(buf.as_bytes())
}

pub fn write_csv_file(path: &Path, header: &[&str], columns: &[&[f64]]) -> io::Result<()> {
    let mut f = io::BufWriter::new(std::fs::File::create(path)?);
    write_columns(&mut f, header, columns)?;
    f.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting() {
        assert_eq!(sci(1.3783618879521895), "1.37836189e+00");
        assert_eq!(sci(-0.00012), "-1.20000000e-04");
        assert_eq!(sci(0.0), "0.00000000e+00");
        assert_eq!(sci(6.02e23), "6.02000000e+23");
        assert_eq!(sci(f64::NAN), "NaN");
    }

    #[test]
    fn csv_layout() {
        let mut out = Vec::new();
        write_columns(&mut out, &["a", "b"], &[&[1.0, 2.0], &[3.0, -4.0]]).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "a,b\n1.00000000e+00,3.00000000e+00\n2.00000000e+00,-4.00000000e+00\n"
        );
    }
}

use std::io::Write;

use serde::Serialize;

use crate::failure::Failure;

/// Decimal rendering with 12 significant digits and trailing zeros removed.
pub fn sig12(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() { "NaN".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let e = v.abs().log10().floor() as i32;
    if (-5..12).contains(&e) {
        let s = format!("{:.*}", (11 - e).max(0) as usize, v);
        trim_zeros(&s).to_string()
    } else {
        let s = format!("{v:.11e}");
        let (mantissa, exp) = s.split_once('e').expect("exponent form");
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Round to 12 significant digits so JSON and CSV carry the same values.
pub fn round12(v: f64) -> f64 {
    if v.is_finite() {
        sig12(v).parse().unwrap_or(v)
    } else {
        v
    }
}

pub fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), Failure> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| Failure::Io(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

/// Numeric row rendered with [`sig12`].
pub fn cells(values: &[f64]) -> Vec<String> {
    values.iter().map(|&v| sig12(v)).collect()
}

/// One header line, then one line per row.
pub fn write_csv(out: &mut dyn Write, header: &[&str], rows: &[Vec<String>]) -> Result<(), Failure> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let io = |e: csv::Error| Failure::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(row).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig12(1.306_842_123_456_789), "1.30684212346");
        assert_eq!(sig12(-0.000123456789012345), "-0.000123456789012");
        assert_eq!(sig12(20.0), "20");
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(1.5e-9), "1.5e-9");
        assert_eq!(sig12(123456789012345.0), "1.23456789012e14");
    }

    #[test]
    fn csv_has_one_header() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &["a", "b"], &[cells(&[1.0, 2.5]), cells(&[0.1, -3.0])]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\n1,2.5\n0.1,-3\n");
    }
}

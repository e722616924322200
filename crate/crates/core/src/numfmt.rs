//! Number and JSON formatting shared by the library, the CLI and file
//! emitters: floats are rendered with 17 significant digits so that parsing
//! the text reproduces the original bits.

use std::io;

use serde::Serialize;

/// Render a float with 17 significant digits (lossless round-trip).
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// JSON serializer that writes every `f64` via [`sig17`].
struct Sig17Formatter;

impl serde_json::ser::Formatter for Sig17Formatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        writer.write_all(sig17(value).as_bytes())
    }
}

/// Serialize a value to a JSON string with 17-significant-digit floats.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Sig17Formatter);
    value
        .serialize(&mut ser)
        .expect("in-memory JSON serialization cannot fail");
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

/// Parse an angle given as a decimal or as one of the literals `pi`, `pi/2`,
/// `pi/4` (optionally negated), so grid-exact values survive the command line.
pub fn parse_angle(text: &str) -> Result<f64, String> {
    let t = text.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest.trim()),
        None => (false, t),
    };
    let value = match body {
        "pi" => std::f64::consts::PI,
        "pi/2" => std::f64::consts::FRAC_PI_2,
        "pi/4" => std::f64::consts::FRAC_PI_4,
        other => other
            .parse::<f64>()
            .map_err(|_| format!("cannot parse angle `{text}`"))?,
    };
    Ok(if neg { -value } else { value })
}

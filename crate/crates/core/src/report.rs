//! Number formatting shared by the CSV and JSON writers.
//!
//! Every float is written with 17 significant digits so that it round-trips
//! exactly. Non-finite values become `NaN`/`inf` in CSV and `null` in JSON.

use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter, Serializer};

use crate::error::Result;

/// `x` in scientific notation with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Pretty JSON formatter that writes floats with [`fmt17`].
pub struct Json17 {
    inner: PrettyFormatter<'static>,
}

impl Json17 {
    pub fn new() -> Self {
        Json17 {
            inner: PrettyFormatter::with_indent(b"  "),
        }
    }
}

impl Default for Json17 {
    fn default() -> Self {
        Self::new()
    }
}

macro_rules! delegate {
    ($($name:ident $(($($arg:ident: $ty:ty),*))?;)*) => {
        $(
            fn $name<W: ?Sized + Write>(&mut self, w: &mut W $($(, $arg: $ty)*)?) -> io::Result<()> {
                self.inner.$name(w $($(, $arg)*)?)
            }
        )*
    };
}

impl Formatter for Json17 {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            w.write_all(fmt17(value).as_bytes())
        } else {
            w.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    delegate! {
        begin_array;
        end_array;
        begin_array_value(first: bool);
        end_array_value;
        begin_object;
        end_object;
        begin_object_key(first: bool);
        end_object_key;
        begin_object_value;
        end_object_value;
    }
}

pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = Serializer::with_formatter(&mut buf, Json17::new());
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_json_string(value)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1.0327534769917582e-4, -2.5e300, 5e-324, 0.0] {
            let text = fmt17(x);
            assert_eq!(text.parse::<f64>().unwrap(), x);
            let mantissa = text.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.replace('.', "").len(), 17);
        }
    }

    #[test]
    fn json_floats_and_non_finite() {
        #[derive(Serialize)]
        struct Row {
            a: f64,
            b: f64,
            n: usize,
        }
        let text = to_json_string(&Row {
            a: 0.1,
            b: f64::NAN,
            n: 3,
        })
        .unwrap();
        assert!(text.contains("\"a\": 1.0000000000000001e-1"));
        assert!(text.contains("\"b\": null"));
        assert!(text.contains("\"n\": 3"));
        let back: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["a"].as_f64(), Some(0.1));
    }
}

//! JSON output with a fixed float format, so that identical inputs give
//! byte-identical reports.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::{Error, Result};

/// Writes every float as `{:.16e}` (17 significant digits, round-trip exact)
/// and delegates layout to `serde_json`'s pretty printer when asked.
struct FixedFloats<'a> {
    pretty: Option<PrettyFormatter<'a>>,
}

macro_rules! forward {
    ($($name:ident($($arg:ident: $ty:ty),*)),* $(,)?) => {
        $(
            fn $name<W: ?Sized + io::Write>(&mut self, writer: &mut W $(, $arg: $ty)*) -> io::Result<()> {
                match &mut self.pretty {
                    Some(p) => p.$name(writer $(, $arg)*),
                    None => serde_json::ser::CompactFormatter.$name(writer $(, $arg)*),
                }
            }
        )*
    };
}

impl Formatter for FixedFloats<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    forward!(
        begin_array(),
        end_array(),
        begin_array_value(first: bool),
        end_array_value(),
        begin_object(),
        end_object(),
        begin_object_key(first: bool),
        begin_object_value(),
        end_object_value(),
    );
}

/// Serializes `value` with fixed-format floats; `null` for non-finite ones.
pub fn to_json<T: Serialize + ?Sized>(value: &T, pretty: bool) -> Result<String> {
    let mut out = Vec::new();
    let formatter = FixedFloats { pretty: pretty.then(PrettyFormatter::new) };
    let mut ser = serde_json::Serializer::with_formatter(&mut out, formatter);
    value.serialize(&mut ser).map_err(|e| Error::InvalidParameter(format!("serialization failed: {e}")))?;
    String::from_utf8(out).map_err(|e| Error::InvalidParameter(format!("serialization failed: {e}")))
}

/// The float format used by [`to_json`], for tabular output.
pub fn format_float(value: f64) -> String {
    if value.is_finite() {
        format!("{value:.16e}")
    } else {
        "nan".into()
    }
}

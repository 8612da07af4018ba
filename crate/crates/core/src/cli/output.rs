//! Number rendering and CSV/JSON assembly shared by the subcommands.

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// Renders `x` with 17 significant digits (round-trip safe). Negative
/// zero prints as zero.
pub fn fmt_real(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

/// `f64` that serializes to JSON with 17 significant digits; non-finite
/// values become `null`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Real(pub f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return serializer.serialize_none();
        }
        let raw = RawValue::from_string(fmt_real(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(serializer)
    }
}

/// CSV report: header row, comma separator, `\n` line endings, followed
/// by any `# ` footer lines.
#[derive(Debug)]
pub struct Csv {
    writer: csv::Writer<Vec<u8>>,
    footer: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let mut csv = Self {
            writer,
            footer: String::new(),
        };
        csv.row(header.iter().map(|s| s.to_string()));
        csv
    }

    pub fn row<I: IntoIterator<Item = String>>(&mut self, cells: I) {
        self.writer.write_record(cells).expect("in-memory write");
    }

    pub fn comment(&mut self, text: &str) {
        self.footer.push_str("# ");
        self.footer.push_str(text);
        self.footer.push('\n');
    }

    pub fn finish(self) -> String {
        let bytes = self.writer.into_inner().expect("in-memory write");
        String::from_utf8(bytes).expect("CSV cells are UTF-8") + &self.footer
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

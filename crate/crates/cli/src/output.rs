//! Tables and their CSV / JSON-lines encodings.

use std::io::Write;

use clap::ValueEnum;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    F(f64),
    I(i64),
    B(bool),
    S(String),
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::F(x)
    }
}

impl From<bool> for Value {
    fn from(x: bool) -> Self {
        Value::B(x)
    }
}

impl From<&str> for Value {
    fn from(x: &str) -> Self {
        Value::S(x.to_string())
    }
}

impl From<String> for Value {
    fn from(x: String) -> Self {
        Value::S(x)
    }
}

impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::I(x as i64)
    }
}

impl From<u32> for Value {
    fn from(x: u32) -> Self {
        Value::I(x as i64)
    }
}

impl Value {
    fn csv(&self) -> String {
        match self {
            Value::F(x) => fmt_g17(*x),
            Value::I(n) => n.to_string(),
            Value::B(b) => b.to_string(),
            Value::S(s) => s.clone(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Value::F(x) => serde_json::Number::from_f64(*x).map_or(serde_json::Value::Null, serde_json::Value::Number),
            Value::I(n) => (*n).into(),
            Value::B(b) => (*b).into(),
            Value::S(s) => s.as_str().into(),
        }
    }
}

/// C's `%.17g`: 17 significant digits, trailing zeros dropped.
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let mant = strip_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    } else {
        strip_zeros(&format!("{x:.*}", (16 - exp) as usize)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Table { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| *h == name)
    }

    pub fn write(&self, format: Format, out: impl Write) -> std::io::Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Jsonl => self.write_jsonl(out),
        }
    }

    fn write_csv(&self, out: impl Write) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Value::csv))?;
        }
        w.flush()
    }

    fn write_jsonl(&self, mut out: impl Write) -> std::io::Result<()> {
        for row in &self.rows {
            let fields: Vec<String> = self
                .header
                .iter()
                .zip(row)
                .map(|(k, v)| format!("{}:{}", serde_json::Value::from(*k), v.json()))
                .collect();
            writeln!(out, "{{{}}}", fields.join(","))?;
        }
        out.flush()
    }

    pub fn to_bytes(&self, format: Format) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write(format, &mut buf).expect("writing to memory");
        buf
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_matches_printf() {
        // reference strings from C printf("%.17g")
        let cases = [
            (0.1, "0.10000000000000001"),
            (1.0, "1"),
            (-2.5, "-2.5"),
            (1e-5, "1.0000000000000001e-05"),
            (123456789012345678.0, "1.2345678901234568e+17"),
            (1e16, "10000000000000000"),
            (0.0001, "0.0001"),
            (1.0 / 3.0, "0.33333333333333331"),
            (0.125, "0.125"),
            (1e300, "1.0000000000000001e+300"),
            (-0.0, "-0"),
        ];
        for (x, want) in cases {
            assert_eq!(fmt_g17(x), want, "{x:e}");
        }
    }

    #[test]
    fn g17_round_trips() {
        for &x in &[0.1, 2.0 / 3.0, 1e-310, 6.02214076e23, -7.25e-9, f64::MAX, f64::MIN_POSITIVE] {
            assert_eq!(fmt_g17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn csv_quotes_and_jsonl_orders_keys() {
        let mut t = Table::new(vec!["b", "a"]);
        t.push(vec![Value::S("x,y".into()), Value::F(0.5)]);
        assert_eq!(String::from_utf8(t.to_bytes(Format::Csv)).unwrap(), "b,a\n\"x,y\",0.5\n");
        assert_eq!(String::from_utf8(t.to_bytes(Format::Jsonl)).unwrap(), "{\"b\":\"x,y\",\"a\":0.5}\n");
        let mut t = Table::new(vec!["v"]);
        t.push(vec![Value::F(f64::NAN)]);
        assert_eq!(String::from_utf8(t.to_bytes(Format::Jsonl)).unwrap(), "{\"v\":null}\n");
    }
}

//! Minimal JSON document builder with fixed float formatting.
//!
//! Serialization crates print floats in shortest round-trip form. The output
//! contract here asks for a fixed 17-significant-digit scientific format so
//! that reports are byte-stable across platforms, and the handful of document
//! shapes the commands emit is small, so the documents are rendered by hand.

pub enum Json {
    Bool(bool),
    Int(i64),
    UInt(u64),
    Num(f64),
    Str(String),
    Arr(Vec<Json>),
    Obj(Vec<(&'static str, Json)>),
}

pub fn num(x: f64) -> Json {
    Json::Num(x)
}

pub fn text(s: impl Into<String>) -> Json {
    Json::Str(s.into())
}

impl Json {
    /// Renders the document with two-space indentation and a trailing newline.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out.push('\n');
        out
    }

    fn is_scalar(&self) -> bool {
        !matches!(self, Json::Arr(_) | Json::Obj(_))
    }

    fn write(&self, out: &mut String, indent: usize) {
        match self {
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Int(n) => out.push_str(&n.to_string()),
            Json::UInt(n) => out.push_str(&n.to_string()),
            Json::Num(x) => out.push_str(&fmt_f64(*x)),
            Json::Str(s) => write_escaped(out, s),
            Json::Arr(items) => write_array(out, items, indent),
            Json::Obj(fields) => write_object(out, fields, indent),
        }
    }
}

fn write_array(out: &mut String, items: &[Json], indent: usize) {
    if items.is_empty() {
        out.push_str("[]");
        return;
    }
    if items.iter().all(Json::is_scalar) {
        out.push('[');
        for (i, item) in items.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            item.write(out, indent);
        }
        out.push(']');
        return;
    }
    out.push_str("[\n");
    for (i, item) in items.iter().enumerate() {
        push_indent(out, indent + 1);
        item.write(out, indent + 1);
        if i + 1 < items.len() {
            out.push(',');
        }
        out.push('\n');
    }
    push_indent(out, indent);
    out.push(']');
}

fn write_object(out: &mut String, fields: &[(&'static str, Json)], indent: usize) {
    if fields.is_empty() {
        out.push_str("{}");
        return;
    }
    out.push_str("{\n");
    for (i, (key, value)) in fields.iter().enumerate() {
        push_indent(out, indent + 1);
        write_escaped(out, key);
        out.push_str(": ");
        value.write(out, indent + 1);
        if i + 1 < fields.len() {
            out.push(',');
        }
        out.push('\n');
    }
    push_indent(out, indent);
    out.push('}');
}

fn push_indent(out: &mut String, indent: usize) {
    for _ in 0..indent {
        out.push_str("  ");
    }
}

fn write_escaped(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 => {
                out.push_str(&format!("\\u{:04x}", c as u32));
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

/// Formats a float with 17 significant digits in scientific notation.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_seventeen_significant_digits() {
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
        assert_eq!(fmt_f64(-6.743), "-6.7430000000000003e0");
        assert_eq!(fmt_f64(0.0), "0.0000000000000000e0");
    }

    #[test]
    fn round_trips_through_parse() {
        for &x in &[0.1, -2.5e-13, 6.743001419250384e0, 1.0 / 3.0] {
            let printed = fmt_f64(x);
            assert_eq!(printed.parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn scalar_arrays_render_inline() {
        let doc = Json::Obj(vec![
            ("name", text("ab\"c")),
            ("grid", Json::Arr(vec![Json::Int(1), Json::Int(2)])),
        ]);
        let rendered = doc.render();
        assert_eq!(
            rendered,
            "{\n  \"name\": \"ab\\\"c\",\n  \"grid\": [1, 2]\n}\n"
        );
    }

    #[test]
    fn nested_objects_indent() {
        let doc = Json::Arr(vec![Json::Obj(vec![("ok", Json::Bool(true))])]);
        assert_eq!(doc.render(), "[\n  {\n    \"ok\": true\n  }\n]\n");
    }
}

use serde::Serialize;
use serde_json::{json, Value};

/// A finished command result: a JSON payload plus the same data as a table.
pub struct Output {
    pub command: &'static str,
    pub json: Value,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Output {
    pub fn new(command: &'static str, json: Value, header: Vec<&'static str>) -> Self {
        Output {
            command,
            json,
            header,
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, fields: Vec<String>) {
        self.rows.push(fields);
    }

    pub fn render_json<C: Serialize>(&self, config: &C) -> String {
        let doc = json!({
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "config": config,
            "result": self.json,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("JSON values always serialize");
        s.push('\n');
        s
    }

    pub fn render_csv<C: Serialize>(&self, config: &C) -> String {
        let mut s = format!(
            "# dynamo {}\n# command: {}\n# config: {}\n",
            env!("CARGO_PKG_VERSION"),
            self.command,
            serde_json::to_string(config).expect("config always serializes"),
        );
        s.push_str(&self.header.join(","));
        s.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(|f| csv_field(f)).collect();
            s.push_str(&fields.join(","));
            s.push('\n');
        }
        s
    }
}

/// Quotes a field when it contains a separator, quote or line break.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("library types always serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fields_with_separators_are_quoted() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }
}

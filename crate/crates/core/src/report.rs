//! Verification reports, rendered either as indented text or as key=value lines.

use std::fmt::Write;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub title: String,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
    pub values: Vec<(String, String)>,
    pub children: Vec<Report>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report { title: title.into(), ..Default::default() }
    }

    /// Passed iff there are no failures here or in any child.
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.children.iter().all(Report::passed)
    }

    pub fn fail(&mut self, msg: impl Into<String>) {
        self.failures.push(msg.into());
    }

    pub fn note(&mut self, msg: impl Into<String>) {
        self.notes.push(msg.into());
    }

    pub fn value(&mut self, key: impl Into<String>, v: impl ToString) {
        self.values.push((key.into(), v.to_string()));
    }

    pub fn child(&mut self, r: Report) {
        self.children.push(r);
    }

    pub fn first_failure(&self) -> Option<String> {
        self.failures
            .first()
            .cloned()
            .or_else(|| self.children.iter().find_map(|c| c.first_failure()))
    }

    pub fn find(&self, title: &str) -> Option<&Report> {
        if self.title == title {
            return Some(self);
        }
        self.children.iter().find_map(|c| c.find(title))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        self.text_into(&mut s, 0);
        s
    }

    fn text_into(&self, s: &mut String, depth: usize) {
        let pad = "  ".repeat(depth);
        let status = if self.passed() { "ok" } else { "FAILED" };
        let _ = writeln!(s, "{pad}{}: {status}", self.title);
        for (k, v) in &self.values {
            let _ = writeln!(s, "{pad}  {k} = {v}");
        }
        for n in &self.notes {
            let _ = writeln!(s, "{pad}  note: {n}");
        }
        for f in &self.failures {
            let _ = writeln!(s, "{pad}  failure: {f}");
        }
        for c in &self.children {
            c.text_into(s, depth + 1);
        }
    }

    pub fn render_kv(&self) -> String {
        let mut s = String::new();
        self.kv_into(&mut s, "");
        s
    }

    fn kv_into(&self, s: &mut String, prefix: &str) {
        let key = slug(&self.title);
        let p = if prefix.is_empty() { key } else { format!("{prefix}.{key}") };
        let _ = writeln!(s, "{p}.passed={}", self.passed());
        for (k, v) in &self.values {
            let _ = writeln!(s, "{p}.{}={v}", slug(k));
        }
        for (i, n) in self.notes.iter().enumerate() {
            let _ = writeln!(s, "{p}.note{i}={n}");
        }
        for (i, f) in self.failures.iter().enumerate() {
            let _ = writeln!(s, "{p}.failure{i}={f}");
        }
        for c in &self.children {
            c.kv_into(s, &p);
        }
    }
}

fn slug(t: &str) -> String {
    t.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' })
        .collect()
}

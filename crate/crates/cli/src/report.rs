//! Reports: a machine block of `key: value` lines with stable keys, a `---`
//! separator, then free text for people.

use std::fmt::Write;

use qcat::{QValue, Quantale, VCat};
use qcat::vmod::Module;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Counterexample,
    InputError,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Counterexample => 1,
            Status::InputError => 2,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Counterexample => "counterexample",
            Status::InputError => "input-error",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub status: Status,
    machine: Vec<(String, String)>,
    human: Vec<String>,
}

impl Report {
    pub fn new(command: &str) -> Report {
        Report { command: command.to_string(), status: Status::Pass, machine: Vec::new(), human: Vec::new() }
    }

    pub fn input_error(command: &str, message: &str) -> Report {
        let mut r = Report::new(command);
        r.status = Status::InputError;
        r.key("error", message.lines().next().unwrap_or(""));
        r.line(message);
        r
    }

    pub fn key(&mut self, k: &str, v: impl ToString) -> &mut Self {
        // keep the machine block one line per key
        self.machine.push((k.to_string(), v.to_string().replace('\n', " ")));
        self
    }

    pub fn line(&mut self, s: impl Into<String>) -> &mut Self {
        self.human.push(s.into());
        self
    }

    /// Marks a counterexample; the first one found is kept as the status.
    pub fn fail(&mut self) -> &mut Self {
        if self.status == Status::Pass {
            self.status = Status::Counterexample;
        }
        self
    }

    pub fn get(&self, k: &str) -> Option<&str> {
        self.machine.iter().find(|(key, _)| key == k).map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        writeln!(out, "command: {}", self.command).unwrap();
        writeln!(out, "status: {}", self.status.name()).unwrap();
        for (k, v) in &self.machine {
            writeln!(out, "{k}: {v}").unwrap();
        }
        out.push_str("---\n");
        for l in &self.human {
            out.push_str(l);
            out.push('\n');
        }
        out
    }
}

/// Parses the machine block of a rendered report.
pub fn parse_machine_block(text: &str) -> Vec<(String, String)> {
    text.lines()
        .take_while(|l| *l != "---")
        .filter_map(|l| l.split_once(": ").map(|(k, v)| (k.to_string(), v.to_string())))
        .collect()
}

pub fn values_inline(q: &Quantale, row: &[QValue]) -> String {
    let parts: Vec<String> = row.iter().map(|v| q.format_value(v)).collect();
    format!("[{}]", parts.join(","))
}

pub fn matrix_inline(q: &Quantale, m: &[Vec<QValue>]) -> String {
    let rows: Vec<String> = m.iter().map(|r| values_inline(q, r)).collect();
    format!("[{}]", rows.join(","))
}

/// A labelled table for the human block.
pub fn table(q: &Quantale, rows: &[String], cols: &[String], m: &[Vec<QValue>]) -> Vec<String> {
    let cells: Vec<Vec<String>> = m.iter().map(|r| r.iter().map(|v| q.format_value(v)).collect()).collect();
    let first = rows.iter().map(|r| r.chars().count()).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols.len())
        .map(|j| cells.iter().map(|r| r[j].chars().count()).chain([cols[j].chars().count()]).max().unwrap_or(1))
        .collect();
    let pad = |s: &str, w: usize| format!("{s}{}", " ".repeat(w.saturating_sub(s.chars().count())));
    let mut out = Vec::new();
    let header: Vec<String> = cols.iter().zip(&widths).map(|(c, &w)| pad(c, w)).collect();
    out.push(format!("{}  {}", pad("", first), header.join("  ")).trim_end().to_string());
    for (r, row) in rows.iter().zip(&cells) {
        let cells: Vec<String> = row.iter().zip(&widths).map(|(c, &w)| pad(c, w)).collect();
        out.push(format!("{}  {}", pad(r, first), cells.join("  ")).trim_end().to_string());
    }
    out
}

pub fn category_table(c: &VCat) -> Vec<String> {
    table(c.quantale(), c.objects(), c.objects(), &c.hom_matrix())
}

/// Rows are `dst` objects, columns `src` objects.
pub fn module_table(r: &Module) -> Vec<String> {
    table(r.src().quantale(), r.dst().objects(), r.src().objects(), &r.matrix())
}

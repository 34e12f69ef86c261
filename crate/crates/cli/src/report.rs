//! Reports pair a human-readable text block with a structured tree. The tree
//! uses `serde_json` maps, which keep keys sorted, so output is byte-stable.

use serde_json::{json, Value};

use trimetric_core::complex::Complex;
use trimetric_core::metric::Length;
use trimetric_core::rmodule::RModule;

#[derive(Clone, Debug)]
pub struct Report {
    pub code: i32,
    pub text: String,
    pub data: Value,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Text,
    Structured,
}

impl Report {
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Text => {
                let mut s = self.text.clone();
                if !s.ends_with('\n') {
                    s.push('\n');
                }
                s
            }
            OutputFormat::Structured => {
                let mut s = serde_json::to_string_pretty(&self.data).expect("json values serialize");
                s.push('\n');
                s
            }
        }
    }
}

pub fn length(l: Length) -> Value {
    Value::String(l.to_string())
}

pub fn module(m: &RModule) -> Value {
    json!(m.blocks())
}

/// Components by degree; differentials are left out.
pub fn complex(x: &Complex) -> Value {
    let comps: serde_json::Map<String, Value> = x
        .degrees()
        .filter(|&i| x.dim(i) > 0)
        .map(|i| (i.to_string(), module(&x.component(i))))
        .collect();
    Value::Object(comps)
}

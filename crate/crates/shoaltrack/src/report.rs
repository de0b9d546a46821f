//! Flat key/value metric reports, rendered as CSV, an aligned text table or
//! JSON.

use std::fmt::Write as _;

use serde::ser::{Serialize, SerializeMap, Serializer};
use shoaltrack_core::metrics::{DetectionEvalResult, TrackingEvalResult};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Count(u64),
    Real(f64),
    /// A metric whose denominator was zero.
    Undefined,
}

impl Value {
    fn render(&self) -> String {
        match *self {
            Self::Count(n) => n.to_string(),
            Self::Real(v) => format!("{v:.6}"),
            Self::Undefined => String::new(),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match *self {
            Self::Count(n) => s.serialize_u64(n),
            Self::Real(v) => s.serialize_f64(v),
            Self::Undefined => s.serialize_none(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    entries: Vec<(String, Value)>,
}

impl Serialize for Report {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.entries.len()))?;
        for (k, v) in &self.entries {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: Value) {
        self.entries.push((key.into(), value));
    }

    pub fn real(&mut self, key: impl Into<String>, v: f64) {
        self.push(key, Value::Real(v));
    }

    pub fn count(&mut self, key: impl Into<String>, n: usize) {
        self.push(key, Value::Count(n as u64));
    }

    pub fn get(&self, key: &str) -> Option<Value> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    pub fn entries(&self) -> &[(String, Value)] {
        &self.entries
    }

    /// Adds the tracking metrics; the per-alpha HOTA breakdown only when
    /// `verbose`.
    pub fn add_tracking(&mut self, r: &TrackingEvalResult, verbose: bool) {
        self.real("idf1", r.idf1);
        self.real("idp", r.idp);
        self.real("idr", r.idr);
        self.real("mota", r.mota);
        self.real("hota", r.hota);
        self.real("deta", r.deta);
        self.real("assa", r.assa);
        self.count("idsw", r.idsw);
        self.count("fp", r.fp);
        self.count("fn", r.fn_);
        self.count("gt", r.gt_count);
        if verbose {
            for a in &r.per_alpha {
                self.real(format!("hota@{:.2}", a.alpha), a.hota);
                self.real(format!("deta@{:.2}", a.alpha), a.deta);
                self.real(format!("assa@{:.2}", a.alpha), a.assa);
            }
        }
    }

    pub fn add_detection(&mut self, r: &DetectionEvalResult, verbose: bool) {
        self.push("det_precision", if r.precision_defined { Value::Real(r.precision) } else { Value::Undefined });
        self.push("det_recall", if r.recall_defined { Value::Real(r.recall) } else { Value::Undefined });
        self.real("det_map50", r.map50);
        self.real("det_map50_95", r.map50_95);
        self.count("det_tp", r.tp);
        self.count("det_fp", r.fp);
        self.count("det_fn", r.fn_);
        if verbose {
            for &(t, ap) in &r.ap_per_threshold {
                self.real(format!("det_ap@{t:.2}"), ap);
            }
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("key,value\n");
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k},{}", v.render());
        }
        out
    }

    pub fn to_table(&self) -> String {
        let width = self.entries.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in &self.entries {
            let shown = match v {
                Value::Undefined => "undefined".to_string(),
                v => v.render(),
            };
            let _ = writeln!(out, "{k:<width$}  {shown:>12}");
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report values serialize");
        s.push('\n');
        s
    }
}

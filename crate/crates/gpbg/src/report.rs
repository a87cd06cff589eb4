//! Check reports and their JSON/CSV renderings.

use serde_json::{json, Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub check: String,
    pub params: Value,
    /// Name of the measured quantity: `ratio`, `residual` or `rel_diff`.
    pub metric: &'static str,
    pub value: f64,
    /// Human-readable acceptance condition, e.g. `<= 1e-6`.
    pub criterion: String,
    pub pass: bool,
}

impl CheckReport {
    pub fn at_most(check: impl Into<String>, params: Value, metric: &'static str, value: f64, bound: f64) -> Self {
        Self {
            check: check.into(),
            params,
            metric,
            value,
            criterion: format!("<= {bound:e}"),
            pass: value <= bound,
        }
    }

    pub fn at_least(check: impl Into<String>, params: Value, metric: &'static str, value: f64, bound: f64) -> Self {
        Self {
            check: check.into(),
            params,
            metric,
            value,
            criterion: format!(">= {bound:e}"),
            pass: value >= bound,
        }
    }

    pub fn within(check: impl Into<String>, params: Value, metric: &'static str, value: f64, lo: f64, hi: f64) -> Self {
        Self {
            check: check.into(),
            params,
            metric,
            value,
            criterion: format!("in [{lo}, {hi}]"),
            pass: (lo..=hi).contains(&value),
        }
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("check".into(), json!(self.check));
        m.insert("params".into(), self.params.clone());
        m.insert(self.metric.into(), json!(self.value));
        m.insert("criterion".into(), json!(self.criterion));
        m.insert("pass".into(), json!(self.pass));
        Value::Object(m)
    }

    pub fn pretty(&self) -> String {
        format!(
            "[{}] {} {}={:.6e} ({})",
            if self.pass { "PASS" } else { "FAIL" },
            self.check,
            self.metric,
            self.value,
            self.criterion
        )
    }
}

pub fn reports_to_json(reports: &[CheckReport]) -> Value {
    json!({
        "pass": reports.iter().all(|r| r.pass),
        "checks": reports.iter().map(CheckReport::to_json).collect::<Vec<_>>(),
    })
}

pub fn reports_to_csv(reports: &[CheckReport]) -> String {
    let mut out = String::from("check,metric,value,criterion,pass,params\n");
    for r in reports {
        out.push_str(&format!(
            "{},{},{:e},{},{},\"{}\"\n",
            r.check,
            r.metric,
            r.value,
            r.criterion,
            r.pass,
            r.params.to_string().replace('"', "\"\"")
        ));
    }
    out
}

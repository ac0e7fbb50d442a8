use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::metrics::MetricsReport;
use crate::error::{Error, Result};

/// `100 (from − to) / from`; zero when both are zero.
pub fn percent_decrease(from: f64, to: f64) -> f64 {
    if from == to {
        0.0
    } else {
        100.0 * (from - to) / from
    }
}

const METRICS: [(&str, fn(&MetricsReport) -> f64); 5] = [
    ("attitude_l2_deg", |r| r.attitude_l2_deg),
    ("position_l2_cm", |r| r.position_l2_cm),
    ("velocity_l2_cm_s", |r| r.velocity_l2_cm_s),
    ("std_roll_deg", |r| r.std_roll_deg),
    ("std_pitch_deg", |r| r.std_pitch_deg),
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub metric: String,
    pub values: Vec<f64>,
}

/// Percent decrease of `to` relative to `from` for one metric.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Improvement {
    pub metric: String,
    pub from: String,
    pub to: String,
    pub percent: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub labels: Vec<String>,
    pub rows: Vec<MetricRow>,
    /// For every pair `i < j` in input order: decrease from report `i` to `j`.
    pub improvements: Vec<Improvement>,
}

/// Labels are controller names, suffixed with the position when two
/// reports share a controller.
pub fn compare(reports: &[MetricsReport]) -> Result<Comparison> {
    if reports.len() < 2 {
        return Err(Error::config("compare needs at least two reports"));
    }
    let names: Vec<&str> = reports.iter().map(|r| r.controller.as_str()).collect();
    let unique = names.iter().enumerate().all(|(i, n)| !names[..i].contains(n) && !n.is_empty());
    let labels: Vec<String> = names
        .iter()
        .enumerate()
        .map(|(i, n)| if unique { n.to_string() } else { format!("{n}#{}", i + 1) })
        .collect();

    let rows: Vec<MetricRow> = METRICS
        .iter()
        .map(|(name, get)| MetricRow {
            metric: name.to_string(),
            values: reports.iter().map(get).collect(),
        })
        .collect();

    let mut improvements = Vec::new();
    for row in &rows {
        for i in 0..reports.len() {
            for j in i + 1..reports.len() {
                improvements.push(Improvement {
                    metric: row.metric.clone(),
                    from: labels[i].clone(),
                    to: labels[j].clone(),
                    percent: percent_decrease(row.values[i], row.values[j]),
                });
            }
        }
    }
    Ok(Comparison {
        labels,
        rows,
        improvements,
    })
}

impl Comparison {
    /// Aligned plain-text table of values followed by the percent decreases.
    pub fn to_text(&self) -> String {
        let w0 = METRICS.iter().map(|(n, _)| n.len()).max().unwrap_or(0);
        let widths: Vec<usize> = self.labels.iter().map(|l| l.len().max(10)).collect();
        let mut out = String::new();
        let _ = write!(out, "{:<w0$}", "metric");
        for (l, w) in self.labels.iter().zip(&widths) {
            let _ = write!(out, "  {l:>w$}");
        }
        out.push('\n');
        for row in &self.rows {
            let _ = write!(out, "{:<w0$}", row.metric);
            for (v, w) in row.values.iter().zip(&widths) {
                let _ = write!(out, "  {v:>w$.3}");
            }
            out.push('\n');
        }
        out.push_str("\npercent decrease\n");
        let pair_w = self
            .improvements
            .iter()
            .map(|i| i.from.len() + i.to.len() + 4)
            .max()
            .unwrap_or(0);
        for imp in &self.improvements {
            let pair = format!("{} -> {}", imp.from, imp.to);
            let _ = writeln!(out, "{:<w0$}  {pair:<pair_w$}  {:>7.1}%", imp.metric, imp.percent);
        }
        out
    }

    /// Long-form CSV: `metric,label,value` rows then
    /// `metric,from,to,percent_decrease` rows.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["metric", "label", "value"])?;
        for row in &self.rows {
            for (l, v) in self.labels.iter().zip(&row.values) {
                w.write_record([row.metric.as_str(), l.as_str(), &v.to_string()])?;
            }
        }
        let mut p = csv::Writer::from_writer(Vec::new());
        p.write_record(["metric", "from", "to", "percent_decrease"])?;
        for imp in &self.improvements {
            p.write_record([imp.metric.as_str(), &imp.from, &imp.to, &imp.percent.to_string()])?;
        }
        let a = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        let b = p.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        let mut text = String::from_utf8_lossy(&a).into_owned();
        text.push('\n');
        text.push_str(&String::from_utf8_lossy(&b));
        Ok(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(controller: &str, att: f64, pos: f64) -> MetricsReport {
        MetricsReport {
            controller: controller.into(),
            attitude_l2_deg: att,
            position_l2_cm: pos,
            velocity_l2_cm_s: 1.0,
            ..MetricsReport::default()
        }
    }

    #[test]
    fn table_percentages() {
        assert!((percent_decrease(30.0, 16.6) - 44.7).abs() < 0.05);
        assert!((percent_decrease(6.88, 3.06) - 55.5).abs() < 0.05);
        assert_eq!(percent_decrease(0.0, 0.0), 0.0);
    }

    #[test]
    fn identical_reports_show_no_improvement() {
        let a = report("pid", 6.88, 30.0);
        let c = compare(&[a.clone(), a]).unwrap();
        assert_eq!(c.labels, vec!["pid#1", "pid#2"]);
        assert!(c.improvements.iter().all(|i| i.percent == 0.0));
    }

    #[test]
    fn pairwise_in_input_order() {
        let c = compare(&[report("pid", 6.88, 30.0), report("pid+dnac", 3.06, 16.6)]).unwrap();
        let att = c.improvements.iter().find(|i| i.metric == "attitude_l2_deg").unwrap();
        assert_eq!((att.from.as_str(), att.to.as_str()), ("pid", "pid+dnac"));
        assert!((att.percent - 55.5).abs() < 0.05);
        let text = c.to_text();
        assert!(text.contains("pid -> pid+dnac"));
        assert!(text.contains("55.5%"));
        let csv = c.to_csv().unwrap();
        assert!(csv.starts_with("metric,label,value\nattitude_l2_deg,pid,6.88\n"));
        assert!(csv.contains("metric,from,to,percent_decrease"));
    }

    #[test]
    fn needs_two_reports() {
        assert!(compare(&[report("pid", 1.0, 1.0)]).is_err());
    }
}

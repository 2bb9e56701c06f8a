//! CSV and JSON report emission with fixed 17-significant-digit numbers.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;
use crate::multiplier::{ConstantPolicy, VerificationReport};

use super::config::ReportFormat;

pub const CSV_HEADER: &str = "inequality_id,model,p,q,b_or_gamma,trials,seed,lhs,rhs,ratio,pass";

/// `{:.16e}` for finite values, `inf`/`-inf`/`nan` otherwise.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

fn json_num(x: f64) -> String {
    if x.is_finite() {
        fmt_num(x)
    } else {
        format!("\"{}\"", fmt_num(x))
    }
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Stable order by `(inequality_id, model, seed)`.
pub fn sort_reports(reports: &mut [VerificationReport]) {
    reports.sort_by(|a, b| {
        (a.inequality_id.as_str(), a.model.as_str(), a.seed).cmp(&(
            b.inequality_id.as_str(),
            b.model.as_str(),
            b.seed,
        ))
    });
}

pub fn reports_to_csv(reports: &[VerificationReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            csv_field(&r.inequality_id),
            csv_field(&r.model),
            fmt_num(r.p),
            fmt_num(r.q),
            fmt_num(r.b_or_gamma),
            r.trials,
            r.seed,
            fmt_num(r.lhs),
            fmt_num(r.rhs),
            fmt_num(r.ratio),
            r.pass
        );
    }
    out
}

fn policy_json(p: &ConstantPolicy) -> String {
    match p {
        ConstantPolicy::Unit { tol } => format!("{{\"kind\":\"unit\",\"tol\":{}}}", json_num(*tol)),
        ConstantPolicy::Equality { tol } => {
            format!("{{\"kind\":\"equality\",\"tol\":{}}}", json_num(*tol))
        }
        ConstantPolicy::Stability => "{\"kind\":\"stability\"}".into(),
    }
}

fn report_json(r: &VerificationReport) -> String {
    let mut s = String::from("{");
    let _ = write!(
        s,
        "\"inequality_id\":{},\"model\":{},\"p\":{},\"q\":{},\"b_or_gamma\":{},\"trials\":{},\"seed\":{},\"lhs\":{},\"rhs\":{},\"ratio\":{},\"pass\":{},\"policy\":{}",
        json_str(&r.inequality_id),
        json_str(&r.model),
        json_num(r.p),
        json_num(r.q),
        json_num(r.b_or_gamma),
        r.trials,
        r.seed,
        json_num(r.lhs),
        json_num(r.rhs),
        json_num(r.ratio),
        r.pass,
        policy_json(&r.policy)
    );
    match &r.weight {
        Some(w) => {
            let _ = write!(s, ",\"weight\":{}", json_str(w));
        }
        None => s.push_str(",\"weight\":null"),
    }
    s.push_str(",\"extras\":{");
    let extras: Vec<String> = r
        .extras
        .iter()
        .map(|(k, v)| format!("{}:{}", json_str(k), json_num(*v)))
        .collect();
    s.push_str(&extras.join(","));
    s.push_str("},\"notes\":[");
    let notes: Vec<String> = r.notes.iter().map(|n| json_str(n)).collect();
    s.push_str(&notes.join(","));
    s.push_str("]}");
    s
}

pub fn reports_to_json(reports: &[VerificationReport]) -> String {
    let items: Vec<String> = reports.iter().map(|r| format!("  {}", report_json(r))).collect();
    if items.is_empty() {
        "[]\n".into()
    } else {
        format!("[\n{}\n]\n", items.join(",\n"))
    }
}

/// Sorts and writes the reports to `path` in the given format.
pub fn emit_report(reports: &[VerificationReport], format: ReportFormat, path: &Path) -> Result<()> {
    let mut sorted = reports.to_vec();
    sort_reports(&mut sorted);
    let text = match format {
        ReportFormat::Csv => reports_to_csv(&sorted),
        ReportFormat::Json => reports_to_json(&sorted),
    };
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rep(id: &str, model: &str, seed: u64, lhs: f64) -> VerificationReport {
        VerificationReport::new(id, model.into(), (1.5, 3.0, f64::NAN), 3, seed, lhs, 1.0, ConstantPolicy::Stability)
    }

    #[test]
    fn empty_is_header_only() {
        assert_eq!(reports_to_csv(&[]), format!("{CSV_HEADER}\n"));
        assert_eq!(reports_to_json(&[]), "[]\n");
    }

    #[test]
    fn one_row_round_trips() {
        let r = rep("hyp", "Z_8", 4, 0.1 + 0.2);
        let csv = reports_to_csv(std::slice::from_ref(&r));
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        let cols: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(cols.len(), 11);
        assert_eq!(cols[7].parse::<f64>().unwrap(), r.lhs);
        assert_eq!(cols[4], "nan");
        let json: serde_json::Value = serde_json::from_str(&reports_to_json(std::slice::from_ref(&r))).unwrap();
        assert_eq!(json[0]["lhs"].as_f64().unwrap(), r.lhs);
        assert_eq!(json[0]["b_or_gamma"], "nan");
    }

    #[test]
    fn seventeen_significant_digits() {
        let s = fmt_num(std::f64::consts::PI);
        let mantissa = s.split('e').next().unwrap().replace(['.', '-'], "");
        assert_eq!(mantissa.len(), 17);
    }

    #[test]
    fn ordering_is_stable() {
        let mut v: Vec<VerificationReport> = (0..1000)
            .map(|i| rep(["b", "a", "c"][i % 3], ["Z_4", "Z_2"][i % 2], (i % 7) as u64, i as f64))
            .collect();
        sort_reports(&mut v);
        for w in v.windows(2) {
            let ka = (&w[0].inequality_id, &w[0].model, w[0].seed);
            let kb = (&w[1].inequality_id, &w[1].model, w[1].seed);
            assert!(ka <= kb);
            if ka == kb {
                assert!(w[0].lhs < w[1].lhs);
            }
        }
    }
}

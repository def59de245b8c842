//! Text renderings of detection results and solution paths.

use std::fmt::Write as _;

use clap::ValueEnum;
use idetect_core::{DetectionResult, PathReport};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Tsv,
    Table,
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("serializable output");
    out.push('\n');
    out
}

/// `t, x, fitted` rows; TSV starts with a `#` header so gnuplot skips it.
fn series_rows(x: &[f64], fitted: &[f64], cps: &[usize], sep: char) -> String {
    let mut out = String::new();
    if sep == ',' {
        out.push_str("t,x,fitted,change_point\n");
    } else {
        out.push_str("# t\tx\tfitted\n");
    }
    let mut next = cps.iter().peekable();
    for (i, (v, f)) in x.iter().zip(fitted).enumerate() {
        let t = i + 1;
        if sep == ',' {
            let flag = u8::from(next.next_if_eq(&&t).is_some());
            let _ = writeln!(out, "{t},{v},{f},{flag}");
        } else {
            let _ = writeln!(out, "{t}\t{v}\t{f}");
        }
    }
    out
}

fn join(points: &[usize]) -> String {
    points
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn detection(res: &DetectionResult, x: &[f64], format: Format) -> String {
    match format {
        Format::Json => json(res),
        Format::Csv => series_rows(x, &res.fitted, &res.change_points, ','),
        Format::Tsv => series_rows(x, &res.fitted, &res.change_points, '\t'),
        Format::Table => {
            let c = &res.config_echo;
            let mut out = String::new();
            let _ = writeln!(out, "class          {}", c.class);
            let _ = writeln!(
                out,
                "stopping       {} (used {})",
                c.stopping, res.stopping_used
            );
            let _ = writeln!(out, "length         {}", x.len());
            let _ = writeln!(out, "sigma_hat      {:.6}", res.sigma_hat);
            let _ = writeln!(out, "n_changes      {}", res.change_points.len());
            let _ = writeln!(out, "change_points  {}", join(&res.change_points));
            out
        }
    }
}

/// A solution path with the model of size `at` refitted.
#[derive(Debug, Serialize)]
pub struct PathOutput<'a> {
    #[serde(flatten)]
    pub report: &'a PathReport,
    pub at: usize,
    pub change_points: Vec<usize>,
    pub fitted: Vec<f64>,
}

pub fn path(out: &PathOutput<'_>, x: &[f64], format: Format) -> String {
    let removals = &out.report.path.ordered_removals;
    match format {
        Format::Json => json(out),
        Format::Tsv => series_rows(x, &out.fitted, &out.change_points, '\t'),
        Format::Csv => {
            let mut s = String::from("j,added,ssic,n_params,degenerate\n");
            for sc in &out.report.scores {
                let added = if sc.j == 0 {
                    String::new()
                } else {
                    removals[sc.j - 1].to_string()
                };
                let _ = writeln!(
                    s,
                    "{},{added},{},{},{}",
                    sc.j, sc.ssic, sc.n_params, sc.degenerate
                );
            }
            s
        }
        Format::Table => {
            let mut s = format!("{:>5}  {:>8}  {:>14}\n", "j", "added", "ssic");
            for sc in &out.report.scores {
                let added = if sc.j == 0 {
                    "-".to_string()
                } else {
                    removals[sc.j - 1].to_string()
                };
                let mark = if sc.j == out.report.n_hat { " *" } else { "" };
                let _ = writeln!(s, "{:>5}  {added:>8}  {:>14.4}{mark}", sc.j, sc.ssic);
            }
            let _ = writeln!(s, "model {}: {}", out.at, join(&out.change_points));
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_rows_flag_change_points() {
        let s = series_rows(&[1.0, 1.0, 5.0], &[1.0, 1.0, 5.0], &[2], ',');
        assert_eq!(s, "t,x,fitted,change_point\n1,1,1,0\n2,1,1,1\n3,5,5,0\n");
        let s = series_rows(&[1.5], &[1.5], &[], '\t');
        assert_eq!(s, "# t\tx\tfitted\n1\t1.5\t1.5\n");
    }
}

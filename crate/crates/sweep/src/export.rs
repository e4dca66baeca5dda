//! Tabular and JSON output of sweep results.

use std::fmt::Write as _;
use std::path::Path;

use crate::aggregate::{Estimate, KlAggregate, PointAggregate};
use crate::error::{Result, SweepError};
use crate::run::SweepResult;

pub const CSV_SCHEMA: &str = "sweep-points-v1";
pub const CSV_HEADER: &str = "i,j,e_j,t,delta_e_j,diagnostic,value,stderr,count";

/// One parsed row of the points table.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvRow {
    pub i: usize,
    pub j: usize,
    pub e_j: f64,
    pub t: f64,
    pub delta_e_j: Option<f64>,
    pub diagnostic: String,
    pub value: Option<f64>,
    pub stderr: Option<f64>,
    pub count: Option<u64>,
}

fn num(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => format!("{x:e}"),
        _ => String::new(),
    }
}

struct Rows<'a> {
    out: String,
    point: &'a PointAggregate,
}

impl Rows<'_> {
    fn row(&mut self, name: &str, value: Option<f64>, stderr: Option<f64>, count: Option<u64>) {
        let p = self.point;
        let _ = writeln!(
            self.out,
            "{},{},{},{},{},{name},{},{},{}",
            p.i,
            p.j,
            num(Some(p.params.e_j)),
            num(Some(p.params.t)),
            num(p.params.delta_e_j),
            num(value),
            num(stderr),
            count.map_or(String::new(), |c| c.to_string()),
        );
    }

    fn estimate(&mut self, name: &str, e: &Estimate) {
        self.row(name, Some(e.mean), e.stderr, Some(e.count as u64));
    }

    fn kl(&mut self, prefix: &str, k: &KlAggregate) {
        self.row(&format!("{prefix}kl_poisson"), k.d_vs_poisson_norm, None, Some(k.samples));
        self.row(&format!("{prefix}kl_wigner_dyson"), k.d_vs_wigner_dyson_norm, None, Some(k.samples));
        self.row(&format!("{prefix}mean_ratio"), k.mean_ratio, None, Some(k.samples));
    }
}

/// One row per grid point and diagnostic.
pub fn to_csv(result: &SweepResult) -> String {
    let mut text = format!("# schema={CSV_SCHEMA}\n{CSV_HEADER}\n");
    for point in &result.points {
        let mut rows = Rows { out: String::new(), point };
        rows.row("tasks", Some(point.tasks as f64), None, None);
        rows.row("failed", Some(point.failed as f64), None, None);
        if let Some(k) = &point.kl {
            rows.kl("", k);
            rows.row("bundle_overlap", Some(point.bundle_overlap as f64), None, None);
        }
        if let Some(e) = &point.ipr {
            rows.estimate("ipr", e);
        }
        if let Some(e) = &point.multiplet_ipr {
            rows.estimate("multiplet_ipr", e);
        }
        if let Some(k) = &point.multiplet_kl {
            rows.kl("multiplet_", k);
        }
        if let Some(w) = &point.walsh {
            rows.row("walsh_excluded", Some(w.excluded as f64), None, Some((w.included + w.excluded) as u64));
            for (d, e) in &w.by_distance {
                rows.estimate(&format!("walsh_distance_{d}"), e);
            }
            for (s, e) in w.single.iter().enumerate() {
                rows.estimate(&format!("walsh_site_{s}"), e);
            }
        }
        text.push_str(&rows.out);
    }
    text
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>> {
    let bad = |n: usize, reason: &str| SweepError::Config(format!("points table line {n}: {reason}"));
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, l)) if l.trim() == format!("# schema={CSV_SCHEMA}") => {}
        _ => return Err(bad(1, &format!("expected `# schema={CSV_SCHEMA}`"))),
    }
    match lines.next() {
        Some((_, l)) if l.trim() == CSV_HEADER => {}
        _ => return Err(bad(2, "unexpected header")),
    }
    let mut rows = Vec::new();
    for (n, line) in lines.filter(|(_, l)| !l.trim().is_empty()) {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 9 {
            return Err(bad(n + 1, &format!("{} fields instead of 9", f.len())));
        }
        let opt = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|_| bad(n + 1, &format!("`{s}` is not a number")))
            }
        };
        let int = |s: &str| s.parse::<u64>().map_err(|_| bad(n + 1, &format!("`{s}` is not an integer")));
        rows.push(CsvRow {
            i: int(f[0])? as usize,
            j: int(f[1])? as usize,
            e_j: opt(f[2])?.ok_or_else(|| bad(n + 1, "missing e_j"))?,
            t: opt(f[3])?.ok_or_else(|| bad(n + 1, "missing t"))?,
            delta_e_j: opt(f[4])?,
            diagnostic: f[5].to_string(),
            value: opt(f[6])?,
            stderr: opt(f[7])?,
            count: if f[8].is_empty() { None } else { Some(int(f[8])?) },
        });
    }
    Ok(rows)
}

pub fn write_csv(result: &SweepResult, path: &Path) -> Result<()> {
    std::fs::write(path, to_csv(result))?;
    Ok(())
}

pub fn write_json(result: &SweepResult, path: &Path) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(result)?)?;
    Ok(())
}

pub fn read_json(path: &Path) -> Result<SweepResult> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

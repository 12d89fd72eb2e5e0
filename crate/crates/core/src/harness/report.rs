//! CSV report rows and the summary line.

use std::fmt::Write as _;

pub const HEADER: &str = "method,level,n_or_sigma,mean,variance,cost_grad_queries,quantum_model_queries,wall_seconds";

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub method: String,
    pub level: usize,
    pub n_or_sigma: f64,
    pub mean: f64,
    pub variance: f64,
    pub cost_grad_queries: u64,
    pub quantum_model_queries: f64,
    pub wall_seconds: f64,
}

pub fn to_csv(rows: &[ReportRow]) -> String {
    let mut s = String::from(HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            r.method,
            r.level,
            fmt_f64(r.n_or_sigma),
            fmt_f64(r.mean),
            fmt_f64(r.variance),
            r.cost_grad_queries,
            fmt_f64(r.quantum_model_queries),
            fmt_f64(r.wall_seconds)
        );
    }
    s
}

#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub method: String,
    pub estimate: f64,
    pub stderr: f64,
    /// Production plus pilot gradient queries, as accounted by the estimators.
    pub grad_queries: u64,
    /// Gradient calls seen by the counting wrapper around the potential.
    pub counted_grad_calls: u64,
    pub quantum_model_queries: f64,
    pub wall_seconds: f64,
    /// Set for replication studies: empirical stderr of the replication mean and
    /// the mean internal stderr of a single replication.
    pub replications: Option<ReplicationSummary>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReplicationSummary {
    pub n: u64,
    pub empirical_sd: f64,
    pub internal_sd: f64,
}

impl Summary {
    pub fn line(&self) -> String {
        let mut s = format!(
            "method={} estimate={} stderr={} grad_queries={} counted_grad_calls={} quantum_model_queries={} wall_seconds={:.3}",
            self.method,
            fmt_f64(self.estimate),
            fmt_f64(self.stderr),
            self.grad_queries,
            self.counted_grad_calls,
            fmt_f64(self.quantum_model_queries),
            self.wall_seconds
        );
        if let Some(r) = self.replications {
            let _ = write!(
                s,
                " replications={} replication_sd={} internal_sd={}",
                r.n,
                fmt_f64(r.empirical_sd),
                fmt_f64(r.internal_sd)
            );
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lossless_numbers() {
        for v in [0.1, 1.0 / 3.0, 6.02e23, -1e-300, 0.6065306597126334] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
        let row = ReportRow {
            method: "mc".into(),
            level: 0,
            n_or_sigma: 10.0,
            mean: 0.5,
            variance: 0.25,
            cost_grad_queries: 7,
            quantum_model_queries: 0.0,
            wall_seconds: 0.0,
        };
        let csv = to_csv(&[row]);
        assert_eq!(
            csv.lines().nth(1).unwrap(),
            "mc,0,1.0000000000000000e1,5.0000000000000000e-1,2.5000000000000000e-1,7,0.0000000000000000e0,0.0000000000000000e0"
        );
    }
}

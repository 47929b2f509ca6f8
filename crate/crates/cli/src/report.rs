//! Output schemas and formatting.
//!
//! Every number is rounded to 12 significant digits before emission so that
//! reruns with the same seed produce byte-identical output across formats.

use serde::Serialize;

use qcorr_core::verify::VerifyReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Table,
    Json,
    Csv,
}

/// Rounds to 12 significant digits through the decimal representation,
/// which keeps the value stable under serialize/parse round trips.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("scientific form reparses")
}

/// Shortest decimal that round-trips, scientific where that is shorter;
/// the same convention serde_json uses, so all formats agree.
fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

/// One filtering experiment, keys in fixed order.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub dim: usize,
    pub p: f64,
    #[serde(rename = "C_signal")]
    pub c_signal: f64,
    #[serde(rename = "C_noise")]
    pub c_noise: f64,
    pub postselect_prob: f64,
    #[serde(rename = "F_before")]
    pub f_before: f64,
    #[serde(rename = "F_after")]
    pub f_after: f64,
    pub fidelity_gain: f64,
    pub bound_rhs: f64,
    pub expected_trials: f64,
}

impl ExperimentReport {
    pub const CSV_HEADER: &'static str =
        "dim,p,C_signal,C_noise,postselect_prob,F_before,F_after,fidelity_gain,bound_rhs,expected_trials";

    pub fn rounded(mut self) -> Self {
        for v in [
            &mut self.p,
            &mut self.c_signal,
            &mut self.c_noise,
            &mut self.postselect_prob,
            &mut self.f_before,
            &mut self.f_after,
            &mut self.fidelity_gain,
            &mut self.bound_rhs,
            &mut self.expected_trials,
        ] {
            *v = round_sig(*v);
        }
        self
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.dim,
            fmt_f64(self.p),
            fmt_f64(self.c_signal),
            fmt_f64(self.c_noise),
            fmt_f64(self.postselect_prob),
            fmt_f64(self.f_before),
            fmt_f64(self.f_after),
            fmt_f64(self.fidelity_gain),
            fmt_f64(self.bound_rhs),
            fmt_f64(self.expected_trials)
        )
    }

    fn table(&self) -> String {
        let rows = [
            ("dim", self.dim.to_string()),
            ("p", fmt_f64(self.p)),
            ("C_signal", fmt_f64(self.c_signal)),
            ("C_noise", fmt_f64(self.c_noise)),
            ("postselect_prob", fmt_f64(self.postselect_prob)),
            ("F_before", fmt_f64(self.f_before)),
            ("F_after", fmt_f64(self.f_after)),
            ("fidelity_gain", fmt_f64(self.fidelity_gain)),
            ("bound_rhs", fmt_f64(self.bound_rhs)),
            ("expected_trials", fmt_f64(self.expected_trials)),
        ];
        rows.iter()
            .map(|(k, v)| format!("{k:<16} {v}"))
            .collect::<Vec<_>>()
            .join("\n")
    }

    pub fn emit(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Table => self.table(),
            OutputFormat::Json => {
                serde_json::to_string_pretty(self).expect("report serializes")
            }
            OutputFormat::Csv => format!("{}\n{}", Self::CSV_HEADER, self.csv_row()),
        }
    }
}

pub fn emit_experiment_rows(rows: &[ExperimentReport], format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => serde_json::to_string_pretty(rows).expect("rows serialize"),
        OutputFormat::Csv => {
            let mut out = String::from(ExperimentReport::CSV_HEADER);
            for r in rows {
                out.push('\n');
                out.push_str(&r.csv_row());
            }
            out
        }
        OutputFormat::Table => {
            let mut out = format!(
                "{:<5} {:<6} {:<22} {:<22} {:<22} {:<22}",
                "dim", "p", "postselect_prob", "F_before", "F_after", "fidelity_gain"
            );
            for r in rows {
                out.push('\n');
                out.push_str(&format!(
                    "{:<5} {:<6} {:<22} {:<22} {:<22} {:<22}",
                    r.dim,
                    fmt_f64(r.p),
                    fmt_f64(r.postselect_prob),
                    fmt_f64(r.f_before),
                    fmt_f64(r.f_after),
                    fmt_f64(r.fidelity_gain)
                ));
            }
            out
        }
    }
}

/// One lag of the correlation readout.
#[derive(Debug, Clone, Serialize)]
pub struct LagRow {
    pub lag: usize,
    pub re: f64,
    pub im: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrelationReport {
    pub dim: usize,
    pub correlation: f64,
    pub lags: Vec<LagRow>,
}

impl CorrelationReport {
    pub fn rounded(mut self) -> Self {
        self.correlation = round_sig(self.correlation);
        for lag in self.lags.iter_mut() {
            lag.re = round_sig(lag.re);
            lag.im = round_sig(lag.im);
            lag.weight = round_sig(lag.weight);
        }
        self
    }

    pub fn emit(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => serde_json::to_string_pretty(self).expect("serializes"),
            OutputFormat::Csv => {
                let mut out = String::from("lag,re,im,weight");
                for l in &self.lags {
                    out.push('\n');
                    out.push_str(&format!(
                        "{},{},{},{}",
                        l.lag,
                        fmt_f64(l.re),
                        fmt_f64(l.im),
                        fmt_f64(l.weight)
                    ));
                }
                out
            }
            OutputFormat::Table => {
                let mut out = format!("dim              {}\n", self.dim);
                out.push_str(&format!("correlation      {}\n", fmt_f64(self.correlation)));
                out.push_str(&format!("{:<5} {:<24} {:<24} {}", "lag", "re", "im", "weight"));
                for l in &self.lags {
                    out.push('\n');
                    out.push_str(&format!(
                        "{:<5} {:<24} {:<24} {}",
                        l.lag,
                        fmt_f64(l.re),
                        fmt_f64(l.im),
                        fmt_f64(l.weight)
                    ));
                }
                out
            }
        }
    }
}

/// One row of an epsilon sweep: the lattice-coupling check at one width.
#[derive(Debug, Clone, Serialize)]
pub struct CouplingRow {
    pub epsilon: f64,
    pub n_qubits: u32,
    pub guard: usize,
    pub max_deviation: f64,
    pub passed: bool,
}

impl CouplingRow {
    pub const CSV_HEADER: &'static str = "epsilon,n_qubits,guard,max_deviation,passed";

    pub fn rounded(mut self) -> Self {
        self.epsilon = round_sig(self.epsilon);
        self.max_deviation = round_sig(self.max_deviation);
        self
    }

    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            fmt_f64(self.epsilon),
            self.n_qubits,
            self.guard,
            fmt_f64(self.max_deviation),
            self.passed
        )
    }
}

pub fn emit_coupling_rows(rows: &[CouplingRow], format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => serde_json::to_string_pretty(rows).expect("rows serialize"),
        OutputFormat::Csv => {
            let mut out = String::from(CouplingRow::CSV_HEADER);
            for r in rows {
                out.push('\n');
                out.push_str(&r.csv_row());
            }
            out
        }
        OutputFormat::Table => {
            let mut out = format!(
                "{:<10} {:<9} {:<6} {:<24} {}",
                "epsilon", "n_qubits", "guard", "max_deviation", "status"
            );
            for r in rows {
                out.push('\n');
                out.push_str(&format!(
                    "{:<10} {:<9} {:<6} {:<24} {}",
                    fmt_f64(r.epsilon),
                    r.n_qubits,
                    r.guard,
                    fmt_f64(r.max_deviation),
                    if r.passed { "pass" } else { "FAIL" }
                ));
            }
            out
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct CheckRow {
    name: String,
    cases: usize,
    max_deviation: f64,
    tolerance: f64,
    passed: bool,
}

pub fn emit_verify_report(report: &VerifyReport, format: OutputFormat) -> String {
    let rows: Vec<CheckRow> = report
        .results
        .iter()
        .map(|r| CheckRow {
            name: r.name.clone(),
            cases: r.cases,
            max_deviation: round_sig(r.max_deviation),
            tolerance: r.tolerance,
            passed: r.passed,
        })
        .collect();
    match format {
        OutputFormat::Json => serde_json::to_string_pretty(&rows).expect("rows serialize"),
        OutputFormat::Csv => {
            let mut out = String::from("name,cases,max_deviation,tolerance,passed");
            for r in &rows {
                out.push('\n');
                out.push_str(&format!(
                    "{},{},{},{},{}",
                    r.name,
                    r.cases,
                    fmt_f64(r.max_deviation),
                    fmt_f64(r.tolerance),
                    r.passed
                ));
            }
            out
        }
        OutputFormat::Table => {
            let mut out = format!(
                "{:<36} {:>6}  {:<12} {:<9} status",
                "check", "cases", "deviation", "tolerance"
            );
            for r in &rows {
                out.push('\n');
                out.push_str(&format!(
                    "{:<36} {:>6}  {:<12} {:<9} {}",
                    r.name,
                    r.cases,
                    format!("{:.3e}", r.max_deviation),
                    format!("{:.0e}", r.tolerance),
                    if r.passed { "pass" } else { "FAIL" }
                ));
            }
            let failed = rows.iter().filter(|r| !r.passed).count();
            out.push('\n');
            if failed == 0 {
                out.push_str(&format!("all {} checks passed", rows.len()));
            } else {
                out.push_str(&format!("{failed} of {} checks FAILED", rows.len()));
            }
            out
        }
    }
}

//! Report types and their text / JSON / CSV renderings.

use hiqec::{DistanceAssignment, SweepPoint};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::Format;
use crate::format::{csv, human, join, machine, machine_opt, sig12, text_table};

pub trait Report: Serialize {
    fn text(&self) -> String;
    fn csv(&self) -> String;

    fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text(),
            Format::Csv => self.csv(),
            Format::Json => to_json(self),
        }
    }
}

/// Pretty JSON with every float rounded to 12 significant digits.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("reports serialize");
    round_floats(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("value serializes");
    s.push('\n');
    s
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n
                .as_f64()
                .and_then(|x| serde_json::Number::from_f64(sig12(x) + 0.0))
            {
                *n = x;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn qs(q: Option<usize>) -> String {
    q.map(|q| q.to_string()).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectationRow {
    pub j: usize,
    pub pauli: String,
    pub sequency: usize,
    pub q_s: Option<usize>,
    pub expectation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectationsReport {
    pub n: usize,
    pub rows: Vec<ExpectationRow>,
}

impl Report for ExpectationsReport {
    fn text(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.j.to_string(),
                    r.pauli.clone(),
                    r.sequency.to_string(),
                    qs(r.q_s),
                    human(r.expectation),
                ]
            })
            .collect();
        text_table(&["j", "O_j", "sequency", "q_s", "<O_j>"], &rows)
    }

    fn csv(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.j.to_string(),
                    r.sequency.to_string(),
                    qs(r.q_s),
                    machine(r.expectation),
                ]
            })
            .collect();
        csv(&["j", "sequency", "q_s", "expectation"], &rows)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammasReport {
    pub gamma_uv_first: Vec<f64>,
    pub gamma_ir_first: Vec<f64>,
    /// `None` when fewer than three sensitivities are positive.
    pub xi: Option<f64>,
    pub fit_quality: Option<f64>,
    pub expectation_noiseless: f64,
}

impl Report for GammasReport {
    fn text(&self) -> String {
        let list = |v: &[f64]| join(&v.iter().map(|x| human(*x)).collect::<Vec<_>>(), ", ");
        let fit = match (self.xi, self.fit_quality) {
            (Some(xi), Some(r2)) => format!(
                "decay fit: xi = {} per qubit toward the UV, R^2 = {}\n",
                human(xi),
                human(r2)
            ),
            _ => "decay fit: undefined (fewer than 3 positive sensitivities)\n".to_string(),
        };
        format!(
            "<O>(0) = {}\ngamma UV-first (q = 0..n-1): {{{}}}\ngamma IR-first (q = n-1..0): {{{}}}\n{fit}",
            human(self.expectation_noiseless),
            list(&self.gamma_uv_first),
            list(&self.gamma_ir_first),
        )
    }

    fn csv(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .gamma_uv_first
            .iter()
            .enumerate()
            .map(|(q, g)| vec![q.to_string(), machine(*g)])
            .collect();
        csv(&["qubit", "gamma"], &rows)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BetaRow {
    pub j: usize,
    pub pauli: String,
    pub sequency: usize,
    pub q_s: Option<usize>,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecomposeReport {
    pub n: usize,
    pub observable: String,
    pub rows: Vec<BetaRow>,
}

impl Report for DecomposeReport {
    fn text(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.j.to_string(),
                    r.pauli.clone(),
                    r.sequency.to_string(),
                    qs(r.q_s),
                    human(r.beta),
                ]
            })
            .collect();
        format!(
            "{} on {} qubits, sorted by sequency\n{}",
            self.observable,
            self.n,
            text_table(&["j", "O_j", "s", "q_s", "beta"], &rows)
        )
    }

    fn csv(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.j.to_string(),
                    r.sequency.to_string(),
                    qs(r.q_s),
                    machine(r.beta),
                ]
            })
            .collect();
        csv(&["j", "sequency", "q_s", "beta"], &rows)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scheme {
    pub distances_ir_first: Vec<u32>,
    pub distances_uv_first: Vec<u32>,
    pub total_physical: u64,
    pub achieved_error_per_cycle: f64,
}

impl From<DistanceAssignment> for Scheme {
    fn from(a: DistanceAssignment) -> Self {
        Self {
            distances_ir_first: a.ir_first(),
            distances_uv_first: a.distances,
            total_physical: a.total_physical,
            achieved_error_per_cycle: a.achieved_error_per_cycle,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeReport {
    pub eps_per_cycle: f64,
    pub p: f64,
    pub gamma_ir_first: Vec<f64>,
    /// `None` when the scheme would exceed `d_max`.
    pub homogeneous: Option<Scheme>,
    pub uniform_error: Option<Scheme>,
    pub optimized: Scheme,
    pub reduction_uniform_pct: Option<f64>,
    pub reduction_optimized_pct: Option<f64>,
}

impl OptimizeReport {
    fn schemes(&self) -> [(&'static str, Option<&Scheme>, Option<f64>); 3] {
        [
            (
                "homogeneous",
                self.homogeneous.as_ref(),
                self.homogeneous.as_ref().map(|_| 0.0),
            ),
            (
                "uniform_error",
                self.uniform_error.as_ref(),
                self.reduction_uniform_pct,
            ),
            (
                "optimized",
                Some(&self.optimized),
                self.reduction_optimized_pct,
            ),
        ]
    }
}

impl Report for OptimizeReport {
    fn text(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .schemes()
            .iter()
            .map(|(name, s, pct)| match s {
                Some(s) => vec![
                    name.to_string(),
                    format!("{{{}}}", join(&s.distances_ir_first, ", ")),
                    s.total_physical.to_string(),
                    human(s.achieved_error_per_cycle),
                    pct.map(|p| format!("{p:.1}%")).unwrap_or_default(),
                ],
                None => vec![
                    name.to_string(),
                    "exceeds d_max".into(),
                    String::new(),
                    String::new(),
                    String::new(),
                ],
            })
            .collect();
        format!(
            "per-cycle target {} at p = {}\n{}",
            human(self.eps_per_cycle),
            human(self.p),
            text_table(
                &[
                    "scheme",
                    "d (IR-first)",
                    "physical",
                    "error/cycle",
                    "reduction"
                ],
                &rows
            )
        )
    }

    fn csv(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .schemes()
            .iter()
            .map(|(name, s, pct)| match s {
                Some(s) => vec![
                    name.to_string(),
                    join(&s.distances_ir_first, ";"),
                    s.total_physical.to_string(),
                    machine(s.achieved_error_per_cycle),
                    machine_opt(*pct),
                ],
                None => vec![
                    name.to_string(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                ],
            })
            .collect();
        csv(
            &[
                "scheme",
                "distances_ir_first",
                "total_physical",
                "achieved_error_per_cycle",
                "reduction_pct",
            ],
            &rows,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepReport {
    pub points: Vec<SweepPoint>,
}

pub const SWEEP_HEADER: [&str; 6] = [
    "eps_per_cycle",
    "homogeneous_qubits",
    "uniform_qubits",
    "optimized_qubits",
    "reduction_uniform_pct",
    "reduction_optimized_pct",
];

impl SweepReport {
    fn cells(&self, num: fn(f64) -> String) -> Vec<Vec<String>> {
        let int = |x: Option<u64>| x.map(|v| v.to_string()).unwrap_or_default();
        self.points
            .iter()
            .map(|p| {
                vec![
                    num(p.eps_per_cycle),
                    int(p.homogeneous_qubits),
                    int(p.uniform_qubits),
                    int(p.optimized_qubits),
                    p.reduction_uniform_pct.map(num).unwrap_or_default(),
                    p.reduction_optimized_pct.map(num).unwrap_or_default(),
                ]
            })
            .collect()
    }
}

impl Report for SweepReport {
    fn text(&self) -> String {
        text_table(&SWEEP_HEADER, &self.cells(human))
    }

    fn csv(&self) -> String {
        csv(&SWEEP_HEADER, &self.cells(machine))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyReport {
    pub n: usize,
    pub eta: Vec<f64>,
    pub trials: usize,
    pub configured_deviation: f64,
    pub max_abs_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Report for VerifyReport {
    fn text(&self) -> String {
        format!(
            "n = {}, {} random trials\nconfigured instance deviation: {}\nmax |oracle - formula|: {}\n{}\n",
            self.n,
            self.trials,
            human(self.configured_deviation),
            human(self.max_abs_deviation),
            if self.passed { "PASS" } else { "FAIL" }
        )
    }

    fn csv(&self) -> String {
        csv(
            &[
                "n",
                "trials",
                "configured_deviation",
                "max_abs_deviation",
                "tolerance",
                "passed",
            ],
            &[vec![
                self.n.to_string(),
                self.trials.to_string(),
                machine(self.configured_deviation),
                machine(self.max_abs_deviation),
                machine(self.tolerance),
                self.passed.to_string(),
            ]],
        )
    }
}

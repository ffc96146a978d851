//! JSON and CSV encodings of library values.
//!
//! Pauli strings are written as letters in qubit order, complex numbers as
//! `[re, im]` pairs and outcome keys as bit strings with qubit 0 first.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use qdarwin_core::darwinism::{CurvePoint, MiCurve};
use qdarwin_core::estimator::{CorrelatorTable, MeasurementPlan, PlanTarget};
use qdarwin_core::graphstate::{Edge, GraphSpec};
use qdarwin_core::measurement::OutcomeCounts;
use qdarwin_core::pauli::PauliString;
use qdarwin_core::state::StateVector;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Invalid(#[from] qdarwin_core::Error),
    #[error("bad outcome key {key:?} for a {n}-qubit setting")]
    OutcomeKey { key: String, n: usize },
    #[error("shots field {declared} does not match the sum of counts {summed}")]
    ShotsMismatch { declared: u64, summed: u64 },
}

pub type Result<T> = std::result::Result<T, FormatError>;

#[derive(Serialize, Deserialize)]
struct GraphSpecJson {
    n_qubits: usize,
    system: usize,
    edges: Vec<(usize, usize, f64)>,
}

pub fn graph_spec_from_json(text: &str) -> Result<GraphSpec> {
    let raw: GraphSpecJson = serde_json::from_str(text)?;
    let edges = raw
        .edges
        .into_iter()
        .map(|(a, b, phase)| Edge { a, b, phase })
        .collect();
    Ok(GraphSpec::new(raw.n_qubits, raw.system, edges)?)
}

pub fn graph_spec_to_json(spec: &GraphSpec) -> String {
    let raw = GraphSpecJson {
        n_qubits: spec.n_qubits,
        system: spec.system,
        edges: spec.edges.iter().map(|e| (e.a, e.b, e.phase)).collect(),
    };
    to_pretty(&raw)
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    n_qubits: usize,
    system: usize,
    amplitudes: Vec<[f64; 2]>,
}

pub fn state_to_json(state: &StateVector, system: usize) -> String {
    use qdarwin_core::state::QuantumState;
    let raw = StateJson {
        n_qubits: state.n_qubits(),
        system,
        amplitudes: state.amplitudes().iter().map(|a| [a.re, a.im]).collect(),
    };
    to_pretty(&raw)
}

/// Returns the state and the system qubit stored with it.
pub fn state_from_json(text: &str) -> Result<(StateVector, usize)> {
    let raw: StateJson = serde_json::from_str(text)?;
    let amps = raw
        .amplitudes
        .iter()
        .map(|&[re, im]| qdarwin_core::C64::new(re, im))
        .collect();
    let state = StateVector::new(amps)?;
    use qdarwin_core::state::QuantumState;
    if state.n_qubits() != raw.n_qubits {
        return Err(qdarwin_core::Error::DimensionMismatch {
            expected: raw.n_qubits,
            found: state.n_qubits(),
        }
        .into());
    }
    Ok((state, raw.system))
}

#[derive(Serialize, Deserialize)]
struct CorrelatorEntry {
    string: String,
    value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sigma: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct CorrelatorTableJson {
    entries: Vec<CorrelatorEntry>,
}

pub fn correlator_table_to_json(table: &CorrelatorTable) -> String {
    let raw = CorrelatorTableJson {
        entries: table
            .iter()
            .map(|(s, c)| CorrelatorEntry {
                string: s.to_string(),
                value: c.value,
                sigma: c.sigma,
            })
            .collect(),
    };
    to_pretty(&raw)
}

pub fn correlator_table_from_json(text: &str) -> Result<CorrelatorTable> {
    let raw: CorrelatorTableJson = serde_json::from_str(text)?;
    let mut table = CorrelatorTable::new();
    for e in raw.entries {
        table.insert(e.string.parse()?, e.value, e.sigma)?;
    }
    Ok(table)
}

#[derive(Serialize)]
struct PlanJson {
    target: &'static str,
    correlators: Vec<String>,
    settings: Vec<String>,
    counts: PlanCountsJson,
}

#[derive(Serialize)]
struct PlanCountsJson {
    n_correlators: usize,
    n_settings: usize,
    n_projectors: usize,
}

pub fn plan_target_name(target: PlanTarget) -> &'static str {
    match target {
        PlanTarget::Star => "star",
        PlanTarget::FullTomography => "full_tomography",
    }
}

pub fn plan_to_json(plan: &MeasurementPlan) -> String {
    let raw = PlanJson {
        target: plan_target_name(plan.target),
        correlators: plan.correlators.iter().map(|p| p.to_string()).collect(),
        settings: plan.settings.iter().map(|p| p.to_string()).collect(),
        counts: PlanCountsJson {
            n_correlators: plan.counts.n_correlators,
            n_settings: plan.counts.n_settings,
            n_projectors: plan.counts.n_projectors,
        },
    };
    to_pretty(&raw)
}

#[derive(Serialize, Deserialize)]
struct OutcomeCountsJson {
    setting: String,
    shots: u64,
    counts: BTreeMap<String, u64>,
}

fn bit_key(x: usize, n: usize) -> String {
    (0..n)
        .map(|q| if (x >> (n - 1 - q)) & 1 == 1 { '1' } else { '0' })
        .collect()
}

pub fn counts_to_json(data: &[OutcomeCounts]) -> String {
    let raw: Vec<OutcomeCountsJson> = data
        .iter()
        .map(|d| {
            let n = d.setting().len();
            OutcomeCountsJson {
                setting: d.setting().to_string(),
                shots: d.shots(),
                counts: d
                    .counts()
                    .iter()
                    .enumerate()
                    .map(|(x, &c)| (bit_key(x, n), c))
                    .collect(),
            }
        })
        .collect();
    to_pretty(&raw)
}

/// Reads a counts file. Missing outcome keys count as zero.
pub fn counts_from_json(text: &str) -> Result<Vec<OutcomeCounts>> {
    let raw: Vec<OutcomeCountsJson> = serde_json::from_str(text)?;
    raw.into_iter()
        .map(|r| {
            let setting: PauliString = r.setting.parse()?;
            let n = setting.len();
            let mut counts = vec![0u64; 1 << n];
            for (key, c) in &r.counts {
                if key.len() != n || !key.chars().all(|ch| ch == '0' || ch == '1') {
                    return Err(FormatError::OutcomeKey { key: key.clone(), n });
                }
                let x = usize::from_str_radix(key, 2).expect("checked binary key");
                counts[x] += c;
            }
            let summed: u64 = counts.iter().sum();
            if summed != r.shots {
                return Err(FormatError::ShotsMismatch {
                    declared: r.shots,
                    summed,
                });
            }
            Ok(OutcomeCounts::new(setting, counts)?)
        })
        .collect()
}

/// `%.12g`: twelve significant digits, trailing zeros dropped.
pub fn format_g12(x: f64) -> String {
    const DIGITS: usize = 12;
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= DIGITS as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (DIGITS as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub const CURVE_CSV_HEADER: &str = "delta,mean_mi,min_mi,max_mi,n_fragments,stderr";

pub fn curve_to_csv(curve: &MiCurve) -> String {
    let mut out = String::new();
    out.push_str(CURVE_CSV_HEADER);
    out.push('\n');
    for p in &curve.points {
        let stderr = p.stderr.map(format_g12).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{}",
            p.delta,
            format_g12(p.mean_mi),
            format_g12(p.min_mi),
            format_g12(p.max_mi),
            p.n_fragments,
            stderr
        )
        .expect("writing to a String");
    }
    out
}

#[derive(Serialize, Deserialize)]
struct CurvePointJson {
    delta: usize,
    mean_mi: f64,
    min_mi: f64,
    max_mi: f64,
    n_fragments: u64,
    stderr: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct CurveJson {
    n_env: usize,
    system_entropy: f64,
    points: Vec<CurvePointJson>,
}

pub fn curve_to_json(curve: &MiCurve) -> String {
    let raw = CurveJson {
        n_env: curve.n_env,
        system_entropy: curve.system_entropy,
        points: curve
            .points
            .iter()
            .map(|p| CurvePointJson {
                delta: p.delta,
                mean_mi: p.mean_mi,
                min_mi: p.min_mi,
                max_mi: p.max_mi,
                n_fragments: p.n_fragments,
                stderr: p.stderr,
            })
            .collect(),
    };
    to_pretty(&raw)
}

pub fn curve_from_json(text: &str) -> Result<MiCurve> {
    let raw: CurveJson = serde_json::from_str(text)?;
    Ok(MiCurve {
        n_env: raw.n_env,
        system_entropy: raw.system_entropy,
        points: raw
            .points
            .into_iter()
            .map(|p| CurvePoint {
                delta: p.delta,
                mean_mi: p.mean_mi,
                min_mi: p.min_mi,
                max_mi: p.max_mi,
                n_fragments: p.n_fragments,
                stderr: p.stderr,
            })
            .collect(),
    })
}

pub(crate) fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g12_matches_printf() {
        assert_eq!(format_g12(1.0), "1");
        assert_eq!(format_g12(2.0), "2");
        assert_eq!(format_g12(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_g12(5.0 / 3.0), "1.66666666667");
        assert_eq!(format_g12(-0.25), "-0.25");
        assert_eq!(format_g12(1.5e-7), "1.5e-07");
        assert_eq!(format_g12(123456789012345.0), "1.23456789012e+14");
        assert_eq!(format_g12(0.0001), "0.0001");
        assert_eq!(format_g12(0.99999999999999), "1");
    }

    #[test]
    fn bit_keys_put_qubit_zero_first() {
        assert_eq!(bit_key(0b0101, 4), "0101");
        assert_eq!(bit_key(1, 3), "001");
    }
}

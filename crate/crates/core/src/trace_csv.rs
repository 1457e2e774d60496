//! Trace CSV schema: 15 fixed columns, one row per grid point, numbers in
//! shortest round-trip decimal, guard as 0/1. Parsing an emitted file
//! reproduces the in-memory records bit for bit.

use crate::simulator::{Trace, TraceRecord};

pub const TRACE_CSV_HEADER: &str =
    "t,theta,theta_dot,theta_ref,e,e_dot,e_int,s_pd,s_pi,s_pi_dot,u_pd,u_pi,u_total,d,guard";

const COLUMNS: usize = 15;

#[derive(Debug, Clone, PartialEq)]
pub enum CsvError {
    MissingHeader,
    BadHeader {
        got: String,
    },
    ColumnCount {
        line: usize,
        got: usize,
    },
    BadNumber {
        line: usize,
        column: usize,
        value: String,
    },
    BadGuard {
        line: usize,
        value: String,
    },
    NonMonotonicTime {
        line: usize,
    },
}

impl std::fmt::Display for CsvError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CsvError::MissingHeader => write!(f, "trace csv is empty"),
            CsvError::BadHeader { got } => {
                write!(f, "trace csv header mismatch: got `{got}`")
            }
            CsvError::ColumnCount { line, got } => {
                write!(
                    f,
                    "trace csv line {line}: {got} columns, expected {COLUMNS}"
                )
            }
            CsvError::BadNumber {
                line,
                column,
                value,
            } => write!(
                f,
                "trace csv line {line} column {column}: bad number `{value}`"
            ),
            CsvError::BadGuard { line, value } => {
                write!(
                    f,
                    "trace csv line {line}: guard must be 0 or 1, got `{value}`"
                )
            }
            CsvError::NonMonotonicTime { line } => {
                write!(f, "trace csv line {line}: time not strictly increasing")
            }
        }
    }
}

impl std::error::Error for CsvError {}

/// Serializes the trace records (header + one row per record).
pub fn write_trace_csv(trace: &Trace) -> String {
    let mut out = String::with_capacity(64 * (trace.records.len() + 1));
    out.push_str(TRACE_CSV_HEADER);
    out.push('\n');
    for r in &trace.records {
        // `{}` on f64 prints the shortest decimal that parses back exactly.
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.t,
            r.theta,
            r.theta_dot,
            r.theta_ref,
            r.e,
            r.e_dot,
            r.e_int,
            r.s_pd,
            r.s_pi,
            r.s_pi_dot,
            r.u_pd,
            r.u_pi,
            r.u_total,
            r.d,
            if r.guard { 1 } else { 0 },
        ));
    }
    out
}

/// Parses a trace CSV produced by [`write_trace_csv`].
pub fn parse_trace_csv(text: &str) -> Result<Vec<TraceRecord>, CsvError> {
    let mut lines = text.lines();
    let header = lines.next().ok_or(CsvError::MissingHeader)?;
    if header != TRACE_CSV_HEADER {
        return Err(CsvError::BadHeader {
            got: header.to_string(),
        });
    }

    let mut records = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != COLUMNS {
            return Err(CsvError::ColumnCount {
                line: line_no,
                got: fields.len(),
            });
        }
        let mut nums = [0.0f64; COLUMNS - 1];
        for (i, field) in fields[..COLUMNS - 1].iter().enumerate() {
            nums[i] = field.parse::<f64>().map_err(|_| CsvError::BadNumber {
                line: line_no,
                column: i + 1,
                value: field.to_string(),
            })?;
        }
        let guard = match fields[COLUMNS - 1] {
            "0" => false,
            "1" => true,
            other => {
                return Err(CsvError::BadGuard {
                    line: line_no,
                    value: other.to_string(),
                })
            }
        };
        let record = TraceRecord {
            t: nums[0],
            theta: nums[1],
            theta_dot: nums[2],
            theta_ref: nums[3],
            e: nums[4],
            e_dot: nums[5],
            e_int: nums[6],
            s_pd: nums[7],
            s_pi: nums[8],
            s_pi_dot: nums[9],
            u_pd: nums[10],
            u_pi: nums[11],
            u_total: nums[12],
            d: nums[13],
            guard,
        };
        if let Some(prev) = records.last() {
            let prev: &TraceRecord = prev;
            if record.t.partial_cmp(&prev.t) != Some(std::cmp::Ordering::Greater) {
                return Err(CsvError::NonMonotonicTime { line: line_no });
            }
        }
        records.push(record);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reaching::SwitchKind;
    use crate::simulator::{run_scenario, Scenario};

    #[test]
    fn header_is_bit_exact() {
        assert_eq!(
            TRACE_CSV_HEADER,
            "t,theta,theta_dot,theta_ref,e,e_dot,e_int,s_pd,s_pi,s_pi_dot,u_pd,u_pi,u_total,d,guard"
        );
        assert_eq!(TRACE_CSV_HEADER.split(',').count(), 15);
    }

    #[test]
    fn round_trip_reproduces_records_exactly() {
        let mut scenario = Scenario {
            t_final: 0.5,
            ..Scenario::default()
        };
        scenario.controller.reaching_first.switch = SwitchKind::Saturation;
        scenario.controller.reaching_second.switch = SwitchKind::Saturation;
        let trace = run_scenario(&scenario).unwrap();

        let text = write_trace_csv(&trace);
        let parsed = parse_trace_csv(&text).unwrap();
        assert_eq!(parsed.len(), trace.records.len());
        for (a, b) in trace.records.iter().zip(&parsed) {
            assert_eq!(a.t.to_bits(), b.t.to_bits());
            assert_eq!(a.theta.to_bits(), b.theta.to_bits());
            assert_eq!(a.theta_dot.to_bits(), b.theta_dot.to_bits());
            assert_eq!(a.e_int.to_bits(), b.e_int.to_bits());
            assert_eq!(a.s_pi_dot.to_bits(), b.s_pi_dot.to_bits());
            assert_eq!(a.u_total.to_bits(), b.u_total.to_bits());
            assert_eq!(a.guard, b.guard);
        }
    }

    #[test]
    fn rejects_malformed_input() {
        assert_eq!(parse_trace_csv(""), Err(CsvError::MissingHeader));
        assert!(matches!(
            parse_trace_csv("wrong,header"),
            Err(CsvError::BadHeader { .. })
        ));

        let short_row = format!("{TRACE_CSV_HEADER}\n1,2,3\n");
        assert!(matches!(
            parse_trace_csv(&short_row),
            Err(CsvError::ColumnCount { line: 2, got: 3 })
        ));

        let bad_guard = format!("{TRACE_CSV_HEADER}\n0,0,0,0,0,0,0,0,0,0,0,0,0,0,2\n");
        assert!(matches!(
            parse_trace_csv(&bad_guard),
            Err(CsvError::BadGuard { line: 2, .. })
        ));

        let reversed = format!(
            "{TRACE_CSV_HEADER}\n1,0,0,0,0,0,0,0,0,0,0,0,0,0,0\n0.5,0,0,0,0,0,0,0,0,0,0,0,0,0,0\n"
        );
        assert!(matches!(
            parse_trace_csv(&reversed),
            Err(CsvError::NonMonotonicTime { line: 3 })
        ));
    }
}

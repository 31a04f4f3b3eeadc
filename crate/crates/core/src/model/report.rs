use super::ModelError;
use crate::augmentation::SolveReport;

/// Canonical JSON for a report: fixed key order, solutions in the order the
/// solver produced them (sorted by starting point), timings in milliseconds.
pub fn write_report(report: &SolveReport) -> String {
    serde_json::to_string_pretty(report).expect("report serialization cannot fail")
}

pub fn parse_report(text: &str) -> Result<SolveReport, ModelError> {
    serde_json::from_str(text).map_err(|e| ModelError::Schema(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::augmentation::{Solution, SolveStatus, Timings};

    fn sample() -> SolveReport {
        SolveReport {
            status: SolveStatus::Ok,
            best: Some(Solution { x: vec![2, 2], objective: 0.0 }),
            all_finals: vec![
                Solution { x: vec![2, 2], objective: 0.0 },
                Solution { x: vec![2, 2], objective: 0.0 },
            ],
            trajectory_lengths: vec![1, 0],
            traces: vec![vec![2.0, 0.0], vec![0.0]],
            pool_size: 2,
            timings: Timings { extraction_ms: 1.5, feasibility_ms: 0.25, augmentation_ms: 0.125 },
        }
    }

    #[test]
    fn byte_identical_and_round_trip() {
        let r = sample();
        let text = write_report(&r);
        assert_eq!(text, write_report(&r.clone()));
        assert_eq!(parse_report(&text).unwrap(), r);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["timings"]["extraction_ms"], 1.5);
    }

    #[test]
    fn no_feasible_found() {
        let r = SolveReport {
            status: SolveStatus::NoFeasibleFound,
            best: None,
            all_finals: vec![],
            trajectory_lengths: vec![],
            traces: vec![],
            pool_size: 0,
            timings: Timings::default(),
        };
        let v: serde_json::Value = serde_json::from_str(&write_report(&r)).unwrap();
        assert_eq!(v["status"], "no_feasible_found");
        assert!(v["best"].is_null());
        assert!(parse_report("{}").is_err());
    }
}

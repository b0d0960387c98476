//! Signed boundary errors against gold annotations.
//!
//! Negative errors mean too many lines were removed on that side.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::CorpusError;
use crate::detector::BoundaryReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SideError {
    /// Both present (signed distance) or both absent (0).
    Signed(i64),
    /// Gold has a boundary, the detector reported none.
    Missed,
    /// Gold has no boundary, the detector reported one.
    Spurious,
}

impl SideError {
    fn new(gold: Option<usize>, detected: Option<usize>, sign: i64) -> Self {
        match (gold, detected) {
            (Some(g), Some(d)) => SideError::Signed(sign * (g as i64 - d as i64)),
            (None, None) => SideError::Signed(0),
            (Some(_), None) => SideError::Missed,
            (None, Some(_)) => SideError::Spurious,
        }
    }

    pub fn signed(self) -> Option<i64> {
        match self {
            SideError::Signed(e) => Some(e),
            _ => None,
        }
    }

    fn csv(self) -> String {
        match self {
            SideError::Signed(e) => e.to_string(),
            _ => "-".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileError {
    pub file: String,
    pub preamble: SideError,
    pub epilogue: SideError,
}

impl FileError {
    /// `ok`, or the `+`-joined list of mismatch kinds.
    pub fn category(&self) -> String {
        let mut parts = Vec::new();
        for (side, e) in [("preamble", self.preamble), ("epilogue", self.epilogue)] {
            match e {
                SideError::Missed => parts.push(format!("{side}_missed")),
                SideError::Spurious => parts.push(format!("{side}_spurious")),
                SideError::Signed(_) => {}
            }
        }
        if parts.is_empty() {
            "ok".to_string()
        } else {
            parts.join("+")
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SideSummary {
    pub files: usize,
    pub mismatches: usize,
    /// Signed errors in ascending order, for cumulative error curves.
    pub sorted_errors: Vec<i64>,
}

impl SideSummary {
    fn from_errors(errors: impl Iterator<Item = SideError>) -> Self {
        let mut files = 0;
        let mut mismatches = 0;
        let mut sorted_errors = Vec::new();
        for e in errors {
            files += 1;
            match e.signed() {
                Some(v) => sorted_errors.push(v),
                None => mismatches += 1,
            }
        }
        sorted_errors.sort_unstable();
        SideSummary {
            files,
            mismatches,
            sorted_errors,
        }
    }

    /// Fraction of all files with a signed error of magnitude at most `t`.
    /// Mismatched files count against the fraction. An empty set gives 1.
    pub fn within(&self, t: u64) -> f64 {
        if self.files == 0 {
            return 1.0;
        }
        let hits = self.sorted_errors.iter().filter(|e| e.unsigned_abs() <= t).count();
        hits as f64 / self.files as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub files: Vec<FileError>,
    pub preamble: SideSummary,
    pub epilogue: SideSummary,
}

impl Evaluation {
    pub fn per_file_csv(&self) -> String {
        let mut out = String::from("file,preamble_error,epilogue_error,category\n");
        for f in &self.files {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                csv_field(&f.file),
                f.preamble.csv(),
                f.epilogue.csv(),
                f.category()
            );
        }
        out
    }

    /// One row per side: file count, mismatches and a cumulative fraction
    /// column per tolerance.
    pub fn summary_csv(&self, tolerances: &[u64]) -> String {
        let mut out = String::from("side,files,mismatches");
        for t in tolerances {
            let _ = write!(out, ",within_{t}");
        }
        out.push('\n');
        for (name, s) in [("preamble", &self.preamble), ("epilogue", &self.epilogue)] {
            let _ = write!(out, "{name},{},{}", s.files, s.mismatches);
            for &t in tolerances {
                let _ = write!(out, ",{}", s.within(t));
            }
            out.push('\n');
        }
        out
    }

    /// Sorted signed errors per side, one row per rank.
    pub fn curves_csv(&self) -> String {
        let mut out = String::from("side,rank,error\n");
        for (name, s) in [("preamble", &self.preamble), ("epilogue", &self.epilogue)] {
            for (i, e) in s.sorted_errors.iter().enumerate() {
                let _ = writeln!(out, "{name},{i},{e}");
            }
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Scores `reports` against `gold`; both must cover the same file ids.
/// Output is ordered by file id.
pub fn evaluate(reports: &[BoundaryReport], gold: &[BoundaryReport]) -> Result<Evaluation, CorpusError> {
    let index = |set: &[BoundaryReport], what: &str| -> Result<BTreeMap<String, BoundaryReport>, CorpusError> {
        let mut m = BTreeMap::new();
        for r in set {
            if m.insert(r.file.clone(), r.clone()).is_some() {
                return Err(CorpusError::Mismatch(format!("duplicate id {} in {what}", r.file)));
            }
        }
        Ok(m)
    };
    let detected = index(reports, "reports")?;
    let gold = index(gold, "gold")?;
    if let Some(id) = detected.keys().find(|k| !gold.contains_key(*k)) {
        return Err(CorpusError::Mismatch(format!("{id} has no gold annotation")));
    }
    if let Some(id) = gold.keys().find(|k| !detected.contains_key(*k)) {
        return Err(CorpusError::Mismatch(format!("{id} has no report")));
    }

    let files: Vec<FileError> = gold
        .values()
        .map(|g| {
            let d = &detected[&g.file];
            FileError {
                file: g.file.clone(),
                preamble: SideError::new(g.preamble_end, d.preamble_end, 1),
                epilogue: SideError::new(g.epilogue_start, d.epilogue_start, -1),
            }
        })
        .collect();
    let preamble = SideSummary::from_errors(files.iter().map(|f| f.preamble));
    let epilogue = SideSummary::from_errors(files.iter().map(|f| f.epilogue));
    Ok(Evaluation {
        files,
        preamble,
        epilogue,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(f: &str, p: Option<usize>, e: Option<usize>) -> BoundaryReport {
        BoundaryReport::new(f, p, e)
    }

    #[test]
    fn identical_sets_score_zero() {
        let set = vec![r("a", Some(5), Some(90)), r("b", None, None)];
        let ev = evaluate(&set, &set).unwrap();
        for f in &ev.files {
            assert_eq!(f.preamble, SideError::Signed(0));
            assert_eq!(f.epilogue, SideError::Signed(0));
            assert_eq!(f.category(), "ok");
        }
        assert_eq!(ev.preamble.within(0), 1.0);
    }

    #[test]
    fn sign_convention() {
        let gold = vec![r("a", Some(10), Some(100))];
        // three lines past the gold preamble end, epilogue two lines early
        let det = vec![r("a", Some(13), Some(98))];
        let ev = evaluate(&det, &gold).unwrap();
        assert_eq!(ev.files[0].preamble, SideError::Signed(-3));
        assert_eq!(ev.files[0].epilogue, SideError::Signed(-2));
        let det = vec![r("a", Some(8), Some(104))];
        let ev = evaluate(&det, &gold).unwrap();
        assert_eq!(ev.files[0].preamble, SideError::Signed(2));
        assert_eq!(ev.files[0].epilogue, SideError::Signed(4));
    }

    #[test]
    fn absent_vs_present_is_a_category() {
        let gold = vec![r("a", Some(4), None), r("b", Some(4), Some(50))];
        let det = vec![r("a", Some(4), Some(70)), r("b", None, Some(50))];
        let ev = evaluate(&det, &gold).unwrap();
        assert_eq!(ev.files[0].epilogue, SideError::Spurious);
        assert_eq!(ev.files[0].category(), "epilogue_spurious");
        assert_eq!(ev.files[1].preamble, SideError::Missed);
        assert_eq!(ev.files[1].category(), "preamble_missed");
        assert_eq!(ev.epilogue.mismatches, 1);
        assert_eq!(ev.epilogue.sorted_errors, vec![0]);
        assert_eq!(ev.epilogue.within(100), 0.5);
        let csv = ev.per_file_csv();
        assert_eq!(
            csv,
            "file,preamble_error,epilogue_error,category\na,0,-,epilogue_spurious\nb,-,0,preamble_missed\n"
        );
    }

    #[test]
    fn id_mismatch_is_an_error() {
        let gold = vec![r("a", None, None)];
        assert!(matches!(evaluate(&[r("b", None, None)], &gold), Err(CorpusError::Mismatch(_))));
        assert!(matches!(evaluate(&[], &gold), Err(CorpusError::Mismatch(_))));
        let dup = vec![r("a", None, None), r("a", None, None)];
        assert!(matches!(evaluate(&dup, &gold), Err(CorpusError::Mismatch(_))));
    }

    #[test]
    fn tolerance_columns() {
        let gold: Vec<_> = (0..4).map(|i| r(&format!("f{i}"), Some(20), None)).collect();
        let det = vec![
            r("f0", Some(20), None),
            r("f1", Some(23), None),
            r("f2", Some(14), None),
            r("f3", Some(40), None),
        ];
        let ev = evaluate(&det, &gold).unwrap();
        assert_eq!(ev.preamble.sorted_errors, vec![-20, -3, 0, 6]);
        let csv = ev.summary_csv(&[0, 5, 10]);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "side,files,mismatches,within_0,within_5,within_10");
        assert_eq!(lines[1], "preamble,4,0,0.25,0.5,0.75");
        assert_eq!(lines[2], "epilogue,4,0,1,1,1");
    }

    #[test]
    fn csv_quotes_awkward_ids() {
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("x\"y"), "\"x\"\"y\"");
    }

    proptest! {
        #[test]
        fn self_evaluation_is_zero(
            spec in proptest::collection::btree_map("[a-z]{1,6}", (proptest::option::of(0usize..50), proptest::option::of(50usize..100)), 0..30)
        ) {
            let set: Vec<_> = spec.into_iter().map(|(f, (p, e))| r(&f, p, e)).collect();
            let ev = evaluate(&set, &set).unwrap();
            prop_assert!(ev.files.iter().all(|f| f.preamble == SideError::Signed(0) && f.epilogue == SideError::Signed(0)));
        }
    }
}

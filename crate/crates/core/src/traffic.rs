//! Traffic traces, interval construction, sliding-window datasets and
//! prediction ingestion.
//!
//! Traces carry 5-minute bit-rate samples in Mbps. Planning intervals group
//! `k = tau / 5` consecutive samples; each interval is labelled with the
//! maximum of its samples. Predictions cross the module boundary in Gbps.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::ConnId;

/// Minutes between two consecutive trace samples.
pub const SAMPLE_MINUTES: u32 = 5;

#[derive(Debug, Error)]
pub enum TrafficError {
    #[error("interval length {0} min is not a positive multiple of 5")]
    BadTau(u32),
    #[error("connection {conn}: {len} samples do not fill one interval of {k}")]
    TooShort { conn: ConnId, len: usize, k: usize },
    #[error("connection {conn}: need {needed} intervals, have {have}")]
    InsufficientIntervals { conn: ConnId, needed: usize, have: usize },
    #[error("empty history")]
    EmptyHistory,
    #[error("line {line}: {msg}")]
    Row { line: usize, msg: String },
    #[error("epoch {epoch}: no prediction rows for connection {conn}")]
    MissingConnection { epoch: usize, conn: ConnId },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn row_err(line: usize, msg: impl Into<String>) -> TrafficError {
    TrafficError::Row { line, msg: msg.into() }
}

pub(crate) fn read_file(path: &Path) -> Result<String, TrafficError> {
    std::fs::read_to_string(path)
        .map_err(|source| TrafficError::Io { path: path.display().to_string(), source })
}

/// Raw 5-minute samples of one connection, in Mbps.
#[derive(Debug, Clone, PartialEq)]
pub struct FluctuationSeries {
    pub conn: ConnId,
    pub samples: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntervalizedSeries {
    pub conn: ConnId,
    pub tau_min: u32,
    pub k: usize,
    pub intervals: Vec<Vec<f64>>,
    pub interval_max: Vec<f64>,
}

impl IntervalizedSeries {
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }
}

fn fluctuations_per_interval(tau_min: u32) -> Result<usize, TrafficError> {
    if tau_min == 0 || !tau_min.is_multiple_of(SAMPLE_MINUTES) {
        return Err(TrafficError::BadTau(tau_min));
    }
    Ok((tau_min / SAMPLE_MINUTES) as usize)
}

/// Groups samples into non-overlapping intervals of `tau_min` minutes. A
/// trailing partial group is dropped.
pub fn intervalize(
    series: &FluctuationSeries,
    tau_min: u32,
) -> Result<IntervalizedSeries, TrafficError> {
    let k = fluctuations_per_interval(tau_min)?;
    if series.samples.len() < k {
        return Err(TrafficError::TooShort { conn: series.conn, len: series.samples.len(), k });
    }
    let intervals: Vec<Vec<f64>> = series.samples.chunks_exact(k).map(<[f64]>::to_vec).collect();
    let interval_max = intervals
        .iter()
        .map(|g| g.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .collect();
    Ok(IntervalizedSeries { conn: series.conn, tau_min, k, intervals, interval_max })
}

/// One training pair: `r` past intervals (full fluctuation vectors, oldest
/// first) and the maxima of the following `u` intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    /// Index of the most recent input interval.
    pub t: usize,
    pub input: Vec<Vec<f64>>,
    pub target: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowedDataset {
    pub conn: ConnId,
    pub k: usize,
    pub r: usize,
    pub u: usize,
    pub windows: Vec<Window>,
}

/// Sliding windows advancing one interval at a time; yields `T - r - u + 1`
/// windows for a series of `T` intervals.
pub fn make_windows(
    series: &IntervalizedSeries,
    r: usize,
    u: usize,
) -> Result<WindowedDataset, TrafficError> {
    let total = series.len();
    if r == 0 || u == 0 || total < r + u {
        return Err(TrafficError::InsufficientIntervals {
            conn: series.conn,
            needed: r + u,
            have: total,
        });
    }
    let windows = (r - 1..=total - u - 1)
        .map(|t| Window {
            t,
            input: series.intervals[t + 1 - r..=t].to_vec(),
            target: series.interval_max[t + 1..=t + u].to_vec(),
        })
        .collect();
    Ok(WindowedDataset { conn: series.conn, k: series.k, r, u, windows })
}

impl WindowedDataset {
    /// CSV rows `t, x_1..x_{k*r}, y_1..y_u` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for i in 1..=self.k * self.r {
            let _ = write!(out, ",x{i}");
        }
        for j in 1..=self.u {
            let _ = write!(out, ",y{j}");
        }
        out.push('\n');
        for w in &self.windows {
            let _ = write!(out, "{}", w.t);
            for v in w.input.iter().flatten().chain(&w.target) {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(
        text: &str,
        conn: ConnId,
        k: usize,
        r: usize,
        u: usize,
    ) -> Result<WindowedDataset, TrafficError> {
        let mut lines = text.lines().enumerate();
        let width = 1 + k * r + u;
        match lines.next() {
            Some((_, h)) if h.split(',').count() == width && h.starts_with("t,") => {}
            _ => return Err(row_err(1, format!("expected header with {width} columns"))),
        }
        let mut windows = Vec::new();
        for (idx, line) in lines {
            let line_no = idx + 1;
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != width {
                return Err(row_err(line_no, format!("expected {width} fields")));
            }
            let t = fields[0].parse().map_err(|_| row_err(line_no, "bad t"))?;
            let values = fields[1..]
                .iter()
                .map(|f| f.parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| row_err(line_no, "bad value"))?;
            let input = values[..k * r].chunks(k).map(<[f64]>::to_vec).collect();
            let target = values[k * r..].to_vec();
            windows.push(Window { t, input, target });
        }
        Ok(WindowedDataset { conn, k, r, u, windows })
    }
}

/// Persistence forecast: repeats the latest interval maximum `u` times.
pub fn naive_predict(history_max: &[f64], u: usize) -> Result<Vec<f64>, TrafficError> {
    let last = *history_max.last().ok_or(TrafficError::EmptyHistory)?;
    Ok(vec![last; u])
}

/// Parses the `connection_id,sample_index,mbps` trace table.
pub fn parse_traces(text: &str) -> Result<BTreeMap<ConnId, FluctuationSeries>, TrafficError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| row_err(1, e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != ["connection_id", "sample_index", "mbps"] {
        return Err(row_err(1, "expected header `connection_id,sample_index,mbps`"));
    }
    let mut raw: BTreeMap<ConnId, Vec<(usize, f64, usize)>> = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            row_err(e.position().map_or(0, |p| p.line() as usize), e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != 3 {
            return Err(row_err(line, "expected 3 fields"));
        }
        let conn = record[0].parse().map_err(|_| row_err(line, "bad connection_id"))?;
        let idx = record[1].parse().map_err(|_| row_err(line, "bad sample_index"))?;
        let mbps: f64 = record[2].parse().map_err(|_| row_err(line, "bad mbps"))?;
        if !(mbps >= 0.0) || !mbps.is_finite() {
            return Err(row_err(line, format!("negative or non-finite rate {mbps}")));
        }
        raw.entry(ConnId(conn)).or_default().push((idx, mbps, line));
    }
    let mut out = BTreeMap::new();
    for (conn, mut rows) in raw {
        rows.sort_by_key(|r| r.0);
        let mut samples = Vec::with_capacity(rows.len());
        for (expected, (idx, mbps, line)) in rows.into_iter().enumerate() {
            if idx != expected {
                return Err(row_err(
                    line,
                    format!("connection {conn}: sample_index {idx}, expected {expected}"),
                ));
            }
            samples.push(mbps);
        }
        out.insert(conn, FluctuationSeries { conn, samples });
    }
    Ok(out)
}

pub fn load_traces(path: &Path) -> Result<BTreeMap<ConnId, FluctuationSeries>, TrafficError> {
    parse_traces(&read_file(path)?)
}

pub fn traces_to_csv(series: &BTreeMap<ConnId, FluctuationSeries>) -> String {
    let mut out = String::from("connection_id,sample_index,mbps\n");
    for s in series.values() {
        for (i, v) in s.samples.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", s.conn, i, v);
        }
    }
    out
}

/// Predicted bit-rates (Gbps, already scaled) issued at one planning epoch:
/// `u` values per connection, for intervals `t+1..=t+u`.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionMatrix {
    pub epoch: usize,
    pub rows: BTreeMap<ConnId, Vec<f64>>,
}

impl PredictionMatrix {
    pub fn horizon(&self) -> usize {
        self.rows.values().next().map_or(0, Vec::len)
    }

    pub fn row(&self, conn: ConnId) -> Option<&[f64]> {
        self.rows.get(&conn).map(Vec::as_slice)
    }
}

/// Parses a prediction table (`epoch,connection_id,step,gbps`). Values are
/// multiplied by `scale` unless a `# prescaled=true` line is present. Every
/// epoch must carry exactly steps `1..=u` for every connection in `conns`.
pub fn ingest_predictions(
    text: &str,
    u: usize,
    scale: f64,
    conns: &[ConnId],
) -> Result<BTreeMap<usize, PredictionMatrix>, TrafficError> {
    let prescaled = text.lines().any(|l| {
        l.trim_start()
            .strip_prefix('#')
            .map(|d| d.replace(' ', "") == "prescaled=true")
            .unwrap_or(false)
    });
    let factor = if prescaled { 1.0 } else { scale };

    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| row_err(1, e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != ["epoch", "connection_id", "step", "gbps"] {
        return Err(row_err(1, "expected header `epoch,connection_id,step,gbps`"));
    }

    // (epoch, conn) -> step slots plus the line of the last row seen
    let mut cells: BTreeMap<(usize, ConnId), (Vec<Option<f64>>, usize)> = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            row_err(e.position().map_or(0, |p| p.line() as usize), e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != 4 {
            return Err(row_err(line, "expected 4 fields"));
        }
        let epoch: usize = record[0].parse().map_err(|_| row_err(line, "bad epoch"))?;
        let conn = ConnId(record[1].parse().map_err(|_| row_err(line, "bad connection_id"))?);
        let step: usize = record[2].parse().map_err(|_| row_err(line, "bad step"))?;
        let gbps: f64 = record[3].parse().map_err(|_| row_err(line, "bad gbps"))?;
        if !(gbps >= 0.0) || !gbps.is_finite() {
            return Err(row_err(line, format!("negative or non-finite rate {gbps}")));
        }
        if step == 0 || step > u {
            return Err(row_err(line, format!("step {step} outside 1..={u}")));
        }
        if !conns.contains(&conn) {
            return Err(row_err(line, format!("unknown connection {conn}")));
        }
        let entry = cells.entry((epoch, conn)).or_insert_with(|| (vec![None; u], line));
        if entry.0[step - 1].replace(gbps * factor).is_some() {
            return Err(row_err(line, format!("duplicate step {step}")));
        }
        entry.1 = line;
    }

    let mut out: BTreeMap<usize, PredictionMatrix> = BTreeMap::new();
    for ((epoch, conn), (steps, line)) in cells {
        let have = steps.iter().filter(|s| s.is_some()).count();
        if have != u {
            return Err(row_err(
                line,
                format!("epoch {epoch} connection {conn}: {have} steps, expected {u}"),
            ));
        }
        out.entry(epoch)
            .or_insert_with(|| PredictionMatrix { epoch, rows: BTreeMap::new() })
            .rows
            .insert(conn, steps.into_iter().flatten().collect());
    }
    for m in out.values() {
        for &c in conns {
            if !m.rows.contains_key(&c) {
                return Err(TrafficError::MissingConnection { epoch: m.epoch, conn: c });
            }
        }
    }
    Ok(out)
}

/// Writes matrices in the prediction table format, unscaled values assumed.
pub fn predictions_to_csv<'a>(
    matrices: impl IntoIterator<Item = &'a PredictionMatrix>,
    prescaled: bool,
) -> String {
    let mut out = String::new();
    if prescaled {
        out.push_str("# prescaled=true\n");
    }
    out.push_str("epoch,connection_id,step,gbps\n");
    for m in matrices {
        for (conn, row) in &m.rows {
            for (i, v) in row.iter().enumerate() {
                let _ = writeln!(out, "{},{},{},{}", m.epoch, conn, i + 1, v);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(samples: &[f64]) -> FluctuationSeries {
        FluctuationSeries { conn: ConnId(0), samples: samples.to_vec() }
    }

    #[test]
    fn partial_interval_dropped() {
        let s = intervalize(&series(&[1., 2., 3., 4., 5., 6., 7.]), 30).unwrap();
        assert_eq!(s.k, 6);
        assert_eq!(s.len(), 1);
        assert_eq!(s.interval_max, vec![6.0]);
    }

    #[test]
    fn constant_and_mixed_series() {
        let s = intervalize(&series(&[5.0; 12]), 30).unwrap();
        assert_eq!(s.interval_max, vec![5.0, 5.0]);
        let s = intervalize(&series(&[3., 9., 1., 1., 1., 1., 2., 2., 8., 2., 2., 2.]), 30).unwrap();
        assert_eq!(s.interval_max, vec![9.0, 8.0]);
    }

    #[test]
    fn short_series_and_bad_tau_rejected() {
        assert!(matches!(intervalize(&series(&[1.0; 5]), 30), Err(TrafficError::TooShort { .. })));
        assert!(matches!(intervalize(&series(&[1.0; 12]), 7), Err(TrafficError::BadTau(7))));
    }

    fn ramp(intervals: usize) -> IntervalizedSeries {
        let samples: Vec<f64> = (0..intervals * 6).map(|i| i as f64).collect();
        intervalize(&series(&samples), 30).unwrap()
    }

    #[test]
    fn window_counts() {
        // enumerate every admissible anchor directly
        let (total, r, u) = (10, 3, 2);
        let brute = (0..total).filter(|&t| t + 1 >= r && t + u < total).count();
        assert_eq!(brute, 6);
        assert_eq!(make_windows(&ramp(total), r, u).unwrap().windows.len(), brute);
        assert_eq!(make_windows(&ramp(5), 3, 2).unwrap().windows.len(), 1);
        assert!(make_windows(&ramp(4), 3, 2).is_err());
    }

    #[test]
    fn window_contents() {
        let d = make_windows(&ramp(6), 2, 1).unwrap();
        let w = &d.windows[0];
        assert_eq!(w.t, 1);
        assert_eq!(w.input.len(), 2);
        assert_eq!(w.input[0][0], 0.0);
        assert_eq!(w.input[1][5], 11.0);
        // u = 1: single next-interval maximum
        assert_eq!(w.target, vec![17.0]);
    }

    #[test]
    fn persistence_forecast() {
        assert_eq!(naive_predict(&[1.0, 7.0], 4).unwrap(), vec![7.0; 4]);
        assert_eq!(naive_predict(&[7.0], 1).unwrap(), vec![7.0]);
        assert_eq!(naive_predict(&[3.0, 9.0], 2).unwrap(), vec![9.0, 9.0]);
        assert!(naive_predict(&[], 2).is_err());
    }

    fn prediction_file(conns: usize, u: usize) -> String {
        let mut s = String::from("epoch,connection_id,step,gbps\n");
        for c in 0..conns {
            for step in 1..=u {
                s.push_str(&format!("0,{c},{step},2.5\n"));
            }
        }
        s
    }

    #[test]
    fn ingest_shape_and_scaling() {
        let conns: Vec<ConnId> = (0..12).map(ConnId).collect();
        let m = ingest_predictions(&prediction_file(12, 4), 4, 30.0, &conns).unwrap();
        let m = &m[&0];
        assert_eq!(m.rows.len(), 12);
        assert_eq!(m.horizon(), 4);
        assert_eq!(m.row(ConnId(3)).unwrap()[0], 75.0);

        let pre = format!("# prescaled=true\n{}", prediction_file(12, 4));
        let m = ingest_predictions(&pre, 4, 30.0, &conns).unwrap();
        assert_eq!(m[&0].row(ConnId(3)).unwrap()[0], 2.5);
    }

    #[test]
    fn ingest_contract_violations() {
        let conns = [ConnId(0)];
        let short = "epoch,connection_id,step,gbps\n0,0,1,1\n0,0,2,1\n0,0,3,1\n";
        match ingest_predictions(short, 4, 1.0, &conns) {
            Err(TrafficError::Row { line, msg }) => {
                assert_eq!(line, 4);
                assert!(msg.contains("3 steps"));
            }
            other => panic!("unexpected {other:?}"),
        }
        let negative = "epoch,connection_id,step,gbps\n0,0,1,-1\n";
        assert!(matches!(
            ingest_predictions(negative, 1, 1.0, &conns),
            Err(TrafficError::Row { line: 2, .. })
        ));
        let missing = "epoch,connection_id,step,gbps\n0,0,1,1\n";
        assert!(matches!(
            ingest_predictions(missing, 1, 1.0, &[ConnId(0), ConnId(1)]),
            Err(TrafficError::MissingConnection { epoch: 0, conn: ConnId(1) })
        ));
    }

    #[test]
    fn trace_parsing() {
        let t = parse_traces("connection_id,sample_index,mbps\n1,1,4\n1,0,3\n0,0,2\n").unwrap();
        assert_eq!(t[&ConnId(1)].samples, vec![3.0, 4.0]);
        assert!(parse_traces("connection_id,sample_index,mbps\n0,1,4\n").is_err());
        assert!(parse_traces("connection_id,sample_index,mbps\n0,0,-4\n").is_err());
        assert_eq!(parse_traces(&traces_to_csv(&t)).unwrap(), t);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn interval_max_is_attained(samples in proptest::collection::vec(0.0f64..1e4, 6..80)) {
                let s = intervalize(&series(&samples), 30).unwrap();
                for (group, m) in s.intervals.iter().zip(&s.interval_max) {
                    prop_assert!(group.iter().all(|v| v <= m));
                    prop_assert!(group.iter().any(|v| v == m));
                }
            }

            #[test]
            fn dataset_csv_round_trip(
                samples in proptest::collection::vec(0.0f64..1e4, 60..120),
                r in 1usize..4,
                u in 1usize..4,
            ) {
                let s = intervalize(&series(&samples), 30).unwrap();
                let d = make_windows(&s, r, u).unwrap();
                let back = WindowedDataset::from_csv(&d.to_csv(), d.conn, d.k, r, u).unwrap();
                prop_assert_eq!(back, d);
            }
        }
    }
}

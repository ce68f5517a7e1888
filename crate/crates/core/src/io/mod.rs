//! CSV and JSON file formats. All CSV files are UTF-8 with a header row;
//! dates are written `YYYY-Qn`.
//!
//! | file             | columns                                                |
//! |------------------|--------------------------------------------------------|
//! | nodes.csv        | `date,node_id,level,parent_id,risk_value,self_exposure`|
//! | links.csv        | `date,source_id,target_id,weight`                      |
//! | indicators.csv   | `entity,date,ind_1,...,ind_K`                          |
//! | events.csv       | `entity,crisis_start,crisis_end`                       |
//! | probabilities.csv| `entity,date,p`                                        |

mod tables;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use csv::{ReaderBuilder, StringRecord};

pub use tables::{write_decompositions, write_eval_reports, write_long_report, EVAL_HEADER};

use crate::early_warning::{CrisisEvent, CrisisEvents, IndicatorPanel};
use crate::error::{Error, Result};
use crate::network::{Link, NetworkSnapshot, Node, RiskNetwork};
use crate::quarter::Quarter;

pub const NODES_HEADER: [&str; 6] = ["date", "node_id", "level", "parent_id", "risk_value", "self_exposure"];
pub const LINKS_HEADER: [&str; 4] = ["date", "source_id", "target_id", "weight"];
pub const EVENTS_HEADER: [&str; 3] = ["entity", "crisis_start", "crisis_end"];
pub const PROBABILITIES_HEADER: [&str; 3] = ["entity", "date", "p"];

/// Formats a value with 10 significant digits in plain decimal notation.
pub fn fmt_sig(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v.is_finite() { "0".into() } else { v.to_string() };
    }
    let magnitude = v.abs().log10().floor() as i32;
    if magnitude < -4 {
        let s = format!("{v:.9e}");
        let (mantissa, exp) = s.split_once('e').expect("exponent");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        return format!("{mantissa}e{exp}");
    }
    let decimals = (9 - magnitude).max(0) as usize;
    let s = format!("{v:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub(crate) fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_sig).unwrap_or_default()
}

struct Rows {
    source: String,
    rows: Vec<(u64, StringRecord)>,
}

impl Rows {
    fn read<R: Read>(reader: R, source: &str, header: &[&str]) -> Result<Self> {
        let mut rdr = ReaderBuilder::new().has_headers(true).flexible(false).trim(csv::Trim::All).from_reader(reader);
        let found = rdr.headers().map_err(|e| schema(source, 1, e.to_string()))?.clone();
        let found: Vec<&str> = found.iter().collect();
        if found != header {
            return Err(schema(source, 1, format!("expected header `{}`, found `{}`", header.join(","), found.join(","))));
        }
        Self::collect(rdr, source)
    }

    fn collect<R: Read>(mut rdr: csv::Reader<R>, source: &str) -> Result<Self> {
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                schema(source, line, e.to_string())
            })?;
            let line = rec.position().map(|p| p.line()).unwrap_or(0);
            rows.push((line, rec));
        }
        Ok(Rows { source: source.to_string(), rows })
    }

    fn err(&self, line: u64, msg: impl Into<String>) -> Error {
        schema(&self.source, line, msg.into())
    }
}

fn schema(source: &str, line: u64, msg: String) -> Error {
    Error::Schema { path: source.to_string(), line, msg }
}

fn parse_quarter(rows: &Rows, line: u64, s: &str) -> Result<Quarter> {
    s.parse().map_err(|_| rows.err(line, format!("invalid date `{s}`, expected YYYY-Qn")))
}

fn parse_f64(rows: &Rows, line: u64, field: &str, s: &str) -> Result<f64> {
    let v: f64 = s.parse().map_err(|_| rows.err(line, format!("{field}: `{s}` is not a number")))?;
    if !v.is_finite() {
        return Err(rows.err(line, format!("{field}: `{s}` is not finite")));
    }
    Ok(v)
}

fn parse_opt_f64(rows: &Rows, line: u64, field: &str, s: &str) -> Result<Option<f64>> {
    if s.is_empty() {
        Ok(None)
    } else {
        parse_f64(rows, line, field, s).map(Some)
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

// ---------------------------------------------------------------------------
// networks

/// Reads node and link tables into one snapshot per date, in date order.
pub fn read_snapshots<N: Read, L: Read>(nodes: N, nodes_name: &str, links: L, links_name: &str) -> Result<Vec<NetworkSnapshot>> {
    let node_rows = Rows::read(nodes, nodes_name, &NODES_HEADER)?;
    let mut by_date: BTreeMap<Quarter, (Vec<Node>, Vec<Link>)> = BTreeMap::new();
    for (line, rec) in &node_rows.rows {
        let line = *line;
        let date = parse_quarter(&node_rows, line, &rec[0])?;
        let id = rec[1].to_string();
        if id.is_empty() {
            return Err(node_rows.err(line, "empty node_id"));
        }
        let level: u32 = rec[2].parse().map_err(|_| node_rows.err(line, format!("level: `{}` is not a nonnegative integer", &rec[2])))?;
        let parent = (!rec[3].is_empty()).then(|| rec[3].to_string());
        let risk = parse_opt_f64(&node_rows, line, "risk_value", &rec[4])?;
        if let Some(x) = risk {
            if !(0.0..=1.0).contains(&x) {
                return Err(node_rows.err(line, format!("risk_value {x} outside [0,1]")));
            }
            if level == 0 {
                return Err(node_rows.err(line, "root row must have an empty risk_value"));
            }
        }
        let self_exposure = parse_opt_f64(&node_rows, line, "self_exposure", &rec[5])?;
        if let Some(e) = self_exposure {
            if e < 0.0 {
                return Err(node_rows.err(line, format!("self_exposure {e} < 0")));
            }
        }
        let entry = by_date.entry(date).or_default();
        if entry.0.iter().any(|n| n.id == id) {
            return Err(node_rows.err(line, format!("duplicate node `{id}` at {date}")));
        }
        entry.0.push(Node { id, level, parent, risk, self_exposure });
    }

    let link_rows = Rows::read(links, links_name, &LINKS_HEADER)?;
    for (line, rec) in &link_rows.rows {
        let line = *line;
        let date = parse_quarter(&link_rows, line, &rec[0])?;
        let Some(entry) = by_date.get_mut(&date) else {
            return Err(link_rows.err(line, format!("no nodes listed for date {date}")));
        };
        for id in [&rec[1], &rec[2]] {
            if !entry.0.iter().any(|n| n.id == id) {
                return Err(link_rows.err(line, format!("unknown node `{id}` at {date}")));
            }
        }
        let weight = parse_f64(&link_rows, line, "weight", &rec[3])?;
        if weight < 0.0 {
            return Err(link_rows.err(line, format!("weight {weight} < 0")));
        }
        if rec[1] == rec[2] {
            return Err(link_rows.err(line, "self links are given by self_exposure"));
        }
        if entry.1.iter().any(|l| l.source == rec[1] && l.target == rec[2]) {
            return Err(link_rows.err(line, format!("duplicate link {} -> {}", &rec[1], &rec[2])));
        }
        entry.1.push(Link::new(&rec[1], &rec[2], weight));
    }

    by_date
        .into_iter()
        .map(|(date, (nodes, links))| Ok(NetworkSnapshot::new(date, RiskNetwork::new(nodes, links)?)))
        .collect()
}

pub fn read_snapshot_files(nodes: &Path, links: &Path) -> Result<Vec<NetworkSnapshot>> {
    read_snapshots(open(nodes)?, &nodes.display().to_string(), open(links)?, &links.display().to_string())
}

pub fn write_snapshots<N: Write, L: Write>(snapshots: &[NetworkSnapshot], nodes: N, links: L) -> Result<()> {
    let mut nw = csv::Writer::from_writer(nodes);
    nw.write_record(NODES_HEADER)?;
    let mut lw = csv::Writer::from_writer(links);
    lw.write_record(LINKS_HEADER)?;
    for snap in snapshots {
        let date = snap.date.to_string();
        for n in snap.network.nodes() {
            nw.write_record([
                date.as_str(),
                &n.id,
                &n.level.to_string(),
                n.parent.as_deref().unwrap_or(""),
                &fmt_opt(n.risk),
                &fmt_opt(n.self_exposure),
            ])?;
        }
        for l in snap.network.links() {
            lw.write_record([date.as_str(), &l.source, &l.target, &fmt_sig(l.weight)])?;
        }
    }
    nw.flush()?;
    lw.flush()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// indicators and events

pub fn read_indicators<R: Read>(reader: R, source: &str) -> Result<IndicatorPanel> {
    let mut rdr = ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers().map_err(|e| schema(source, 1, e.to_string()))?.clone();
    if header.len() < 3 || &header[0] != "entity" || &header[1] != "date" {
        return Err(schema(source, 1, "expected header `entity,date,ind_1,...`".into()));
    }
    let names: Vec<String> = header.iter().skip(2).map(str::to_string).collect();
    let rows = Rows::collect(rdr, source)?;
    let mut parsed = Vec::with_capacity(rows.rows.len());
    let mut seen = std::collections::HashSet::new();
    for (line, rec) in &rows.rows {
        let line = *line;
        if rec[0].is_empty() {
            return Err(rows.err(line, "empty entity"));
        }
        let date = parse_quarter(&rows, line, &rec[1])?;
        if !seen.insert((rec[0].to_string(), date)) {
            return Err(rows.err(line, format!("duplicate row for ({}, {date})", &rec[0])));
        }
        let values = (2..rec.len())
            .map(|k| parse_opt_f64(&rows, line, &names[k - 2], &rec[k]))
            .collect::<Result<Vec<_>>>()?;
        parsed.push((rec[0].to_string(), date, values));
    }
    IndicatorPanel::from_rows(names, parsed)
}

pub fn read_indicator_file(path: &Path) -> Result<IndicatorPanel> {
    read_indicators(open(path)?, &path.display().to_string())
}

pub fn write_indicators<W: Write>(panel: &IndicatorPanel, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["entity".to_string(), "date".to_string()];
    header.extend(panel.indicator_names().iter().cloned());
    w.write_record(&header)?;
    for (entity, q, values) in panel.iter_rows() {
        let mut rec = vec![entity.to_string(), q.to_string()];
        rec.extend(values.iter().map(|v| fmt_opt(*v)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_events<R: Read>(reader: R, source: &str) -> Result<CrisisEvents> {
    let rows = Rows::read(reader, source, &EVENTS_HEADER)?;
    let mut events = Vec::with_capacity(rows.rows.len());
    for (line, rec) in &rows.rows {
        let line = *line;
        if rec[0].is_empty() {
            return Err(rows.err(line, "empty entity"));
        }
        let start = parse_quarter(&rows, line, &rec[1])?;
        let end = if rec[2].is_empty() { None } else { Some(parse_quarter(&rows, line, &rec[2])?) };
        if end.is_some_and(|e| e < start) {
            return Err(rows.err(line, "crisis_end before crisis_start"));
        }
        events.push(CrisisEvent { entity: rec[0].to_string(), start, end });
    }
    CrisisEvents::new(events)
}

pub fn read_event_file(path: &Path) -> Result<CrisisEvents> {
    read_events(open(path)?, &path.display().to_string())
}

pub fn write_events<W: Write>(events: &CrisisEvents, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(EVENTS_HEADER)?;
    for e in events.events() {
        w.write_record([e.entity.clone(), e.start.to_string(), e.end.map(|q| q.to_string()).unwrap_or_default()])?;
    }
    w.flush()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// probabilities

#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityRow {
    pub entity: String,
    pub date: Quarter,
    pub p: f64,
}

pub fn read_probabilities<R: Read>(reader: R, source: &str) -> Result<Vec<ProbabilityRow>> {
    let rows = Rows::read(reader, source, &PROBABILITIES_HEADER)?;
    rows.rows
        .iter()
        .map(|(line, rec)| {
            let p = parse_f64(&rows, *line, "p", &rec[2])?;
            if !(0.0..=1.0).contains(&p) {
                return Err(rows.err(*line, format!("probability {p} outside [0,1]")));
            }
            Ok(ProbabilityRow { entity: rec[0].to_string(), date: parse_quarter(&rows, *line, &rec[1])?, p })
        })
        .collect()
}

pub fn read_probability_file(path: &Path) -> Result<Vec<ProbabilityRow>> {
    read_probabilities(open(path)?, &path.display().to_string())
}

pub fn write_probabilities<W: Write>(rows: &[ProbabilityRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(PROBABILITIES_HEADER)?;
    for r in rows {
        w.write_record([r.entity.clone(), r.date.to_string(), fmt_sig(r.p)])?;
    }
    w.flush()?;
    Ok(())
}

// ---------------------------------------------------------------------------
// bundles

#[derive(Debug, Clone, Default)]
pub struct InputPaths {
    pub nodes: Option<PathBuf>,
    pub links: Option<PathBuf>,
    pub indicators: Option<PathBuf>,
    pub events: Option<PathBuf>,
}

#[derive(Debug, Clone, Default)]
pub struct Inputs {
    pub panel: Option<IndicatorPanel>,
    pub events: Option<CrisisEvents>,
    pub snapshots: Option<Vec<NetworkSnapshot>>,
}

/// Reads whichever inputs are given. Nodes and links must come together.
pub fn parse_inputs(paths: &InputPaths) -> Result<Inputs> {
    let snapshots = match (&paths.nodes, &paths.links) {
        (Some(n), Some(l)) => Some(read_snapshot_files(n, l)?),
        (None, None) => None,
        _ => return Err(Error::InvalidParameter("nodes and links files must be given together".into())),
    };
    Ok(Inputs {
        panel: paths.indicators.as_deref().map(read_indicator_file).transpose()?,
        events: paths.events.as_deref().map(read_event_file).transpose()?,
        snapshots,
    })
}

/// Creates `path`, reporting failures as schema errors against the path.
pub fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|e| Error::Schema { path: path.display().to_string(), line: 0, msg: e.to_string() })
}

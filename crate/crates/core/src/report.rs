//! Communication-cost rows for measured and extrapolated graphs, their text,
//! CSV and JSON renderings, and the RMAT `k` sweep behind the exponential fit.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::bfs::{bfs_forest, classify_edges, diameter_proxy, RootPolicy};
use crate::error::{Error, Result};
use crate::graph::{degree_stats, Graph, WedgeDefinition};
use crate::intersect::Kernel;
use crate::model::{
    cover_edge_volume_bits, estimate_triangles_powerlaw, reduction_ratio, wedge_volume_bits,
    ModelInputs, EXTRAPOLATION_LOG_D_BITS,
};
use crate::rmat::{generate_rmat, RmatParams};
use crate::triangles::count_cetc;
use crate::units::{bits_to_bytes, ceil_log2, format_bytes, format_sig3};

/// Columns that can carry an estimated (rather than measured) value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Column {
    Triangles,
    Wedges,
    K,
    Previous,
    CoverEdge,
    Reduction,
}

impl Column {
    fn name(self) -> &'static str {
        match self {
            Column::Triangles => "triangles",
            Column::Wedges => "wedges",
            Column::K => "k",
            Column::Previous => "previous",
            Column::CoverEdge => "cover_edge",
            Column::Reduction => "reduction",
        }
    }

    fn from_name(s: &str) -> Option<Column> {
        [
            Column::Triangles,
            Column::Wedges,
            Column::K,
            Column::Previous,
            Column::CoverEdge,
            Column::Reduction,
        ]
        .into_iter()
        .find(|c| c.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub name: String,
    pub n: u128,
    pub m: u128,
    pub triangles: u128,
    pub wedges: u128,
    pub k: f64,
    pub p: u64,
    /// `⌈log₂ D⌉` used in the volume formula: measured BFS depth for loaded
    /// graphs, an assumed value for extrapolations.
    pub log_d_bits: u32,
    pub previous_bits: u128,
    pub new_bits: u128,
    pub reduction: f64,
    /// Estimated cells, sorted.
    pub estimated: Vec<Column>,
}

impl ReportRow {
    pub fn previous_bytes(&self) -> f64 {
        bits_to_bytes(self.previous_bits)
    }

    pub fn new_bytes(&self) -> f64 {
        bits_to_bytes(self.new_bits)
    }

    pub fn is_estimated(&self, col: Column) -> bool {
        self.estimated.contains(&col)
    }
}

/// Inputs for a row whose graph is too large to build.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtrapolationInputs {
    pub name: String,
    pub scale: u32,
    pub edge_factor: u64,
    pub k: Option<f64>,
    pub wedges: Option<u128>,
    /// Defaults to the RMAT triangle power law.
    pub triangles: Option<f64>,
    pub log_d_bits: u32,
}

impl ExtrapolationInputs {
    pub fn rmat(scale: u32) -> Self {
        ExtrapolationInputs {
            name: format!("RMAT-{scale}"),
            scale,
            edge_factor: 16,
            k: None,
            wedges: None,
            triangles: None,
            log_d_bits: EXTRAPOLATION_LOG_D_BITS,
        }
    }

    /// Scale-36 Graph500 instance with its published `k` and wedge estimate.
    pub fn rmat36() -> Self {
        ExtrapolationInputs {
            k: Some(0.311),
            wedges: Some(27_300_000_000_000_000),
            ..Self::rmat(36)
        }
    }

    /// Scale-42 Graph500 instance with its published `k` and wedge estimate.
    pub fn rmat42() -> Self {
        ExtrapolationInputs {
            k: Some(0.260),
            wedges: Some(5_790_000_000_000_000_000),
            ..Self::rmat(42)
        }
    }
}

pub enum RowSource<'a> {
    Measured { name: &'a str, graph: &'a Graph },
    Extrapolated(&'a ExtrapolationInputs),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasureOptions {
    pub root_policy: RootPolicy,
    pub wedge_definition: WedgeDefinition,
    pub kernel: Kernel,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        MeasureOptions {
            root_policy: RootPolicy::LowestId,
            wedge_definition: WedgeDefinition::default(),
            kernel: Kernel::Merge,
        }
    }
}

pub fn build_row(source: RowSource<'_>, p: u64, opts: &MeasureOptions) -> Result<ReportRow> {
    match source {
        RowSource::Measured { name, graph } => measured_row(name, graph, p, opts),
        RowSource::Extrapolated(inputs) => extrapolated_row(inputs, p),
    }
}

fn measured_row(name: &str, g: &Graph, p: u64, opts: &MeasureOptions) -> Result<ReportRow> {
    let forest = bfs_forest(g, &opts.root_policy)?;
    let cls = classify_edges(g, &forest)?;
    let triangles = count_cetc(g, &cls, &forest.labels, opts.kernel)?.total;
    let wedges = degree_stats(g)?.wedges(opts.wedge_definition) as u128;
    let d_hat = diameter_proxy(&forest.labels) as u128;
    let inputs = ModelInputs {
        n: g.n() as u128,
        m: g.m() as u128,
        d_hat,
        k: cls.k,
        p,
        wedges,
    };
    let previous_bits = wedge_volume_bits(wedges, inputs.n)?;
    let new_bits = cover_edge_volume_bits(&inputs)?;
    Ok(ReportRow {
        name: name.to_string(),
        n: inputs.n,
        m: inputs.m,
        triangles: triangles as u128,
        wedges,
        k: cls.k,
        p,
        log_d_bits: ceil_log2(d_hat),
        previous_bits,
        new_bits,
        reduction: reduction_ratio(previous_bits, new_bits)?,
        estimated: Vec::new(),
    })
}

fn extrapolated_row(inputs: &ExtrapolationInputs, p: u64) -> Result<ReportRow> {
    let mut missing = Vec::new();
    if inputs.k.is_none() {
        missing.push("k");
    }
    if inputs.wedges.is_none() {
        missing.push("wedges");
    }
    let (Some(k), Some(wedges)) = (inputs.k, inputs.wedges) else {
        return Err(Error::MissingInputs(missing));
    };
    if inputs.scale >= 64 {
        return Err(Error::Overflow("vertex count 2^scale"));
    }
    let n = 1u128 << inputs.scale;
    let m = n
        .checked_mul(inputs.edge_factor as u128)
        .ok_or(Error::Overflow("edge count"))?;
    let triangles = match inputs.triangles {
        Some(t) => t,
        None => estimate_triangles_powerlaw(n as f64)?,
    };
    let model = ModelInputs {
        n,
        m,
        d_hat: 0,
        k,
        p,
        wedges,
    }
    .with_log_d_bits(inputs.log_d_bits);
    let previous_bits = wedge_volume_bits(wedges, n)?;
    let new_bits = cover_edge_volume_bits(&model)?;
    Ok(ReportRow {
        name: inputs.name.clone(),
        n,
        m,
        triangles: triangles.round() as u128,
        wedges,
        k,
        p,
        log_d_bits: inputs.log_d_bits,
        previous_bits,
        new_bits,
        reduction: reduction_ratio(previous_bits, new_bits)?,
        estimated: vec![
            Column::Triangles,
            Column::Wedges,
            Column::K,
            Column::CoverEdge,
            Column::Reduction,
        ],
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Table,
    Csv,
    Records,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "table" => Ok(Format::Table),
            "csv" => Ok(Format::Csv),
            "records" => Ok(Format::Records),
            other => Err(Error::domain(format!(
                "unknown format {other:?} (expected table, csv or records)"
            ))),
        }
    }
}

const TABLE_HEADER: [&str; 11] = [
    "Graph",
    "n",
    "m",
    "# Triangles",
    "# Wedges",
    "k",
    "p",
    "Previous",
    "This paper",
    "Reduction",
    "log D",
];

const CSV_HEADER: [&str; 14] = [
    "graph",
    "n",
    "m",
    "triangles",
    "wedges",
    "k",
    "p",
    "log_d_bits",
    "previous_bits",
    "new_bits",
    "previous",
    "cover_edge",
    "reduction",
    "estimated",
];

/// `1.20E+14` style for estimated counts.
fn format_sci(x: u128) -> String {
    let s = format!("{:.2E}", x as f64);
    match s.split_once('E') {
        Some((mant, exp)) if !exp.starts_with('-') => format!("{mant}E+{exp}"),
        _ => s,
    }
}

fn count_cell(row: &ReportRow, col: Column, value: u128) -> String {
    if row.is_estimated(col) {
        format_sci(value)
    } else {
        value.to_string()
    }
}

fn table_cells(row: &ReportRow) -> Vec<String> {
    let mark = |col: Column, s: String| if row.is_estimated(col) { format!("{s}*") } else { s };
    vec![
        row.name.clone(),
        row.n.to_string(),
        row.m.to_string(),
        mark(Column::Triangles, count_cell(row, Column::Triangles, row.triangles)),
        mark(Column::Wedges, count_cell(row, Column::Wedges, row.wedges)),
        mark(Column::K, format!("{:.3}", row.k)),
        row.p.to_string(),
        mark(Column::Previous, format_bytes(row.previous_bytes())),
        mark(Column::CoverEdge, format_bytes(row.new_bytes())),
        mark(Column::Reduction, format_sig3(row.reduction)),
        row.log_d_bits.to_string(),
    ]
}

fn render_table(rows: &[ReportRow]) -> String {
    let body: Vec<Vec<String>> = rows.iter().map(table_cells).collect();
    let mut widths: Vec<usize> = TABLE_HEADER.iter().map(|h| h.chars().count()).collect();
    for cells in &body {
        for (w, c) in widths.iter_mut().zip(cells) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, cells: &[String]| {
        let mut parts = Vec::with_capacity(cells.len());
        for (i, (c, w)) in cells.iter().zip(&widths).enumerate() {
            if i == 0 {
                parts.push(format!("{c:<w$}"));
            } else {
                parts.push(format!("{c:>w$}"));
            }
        }
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    let header: Vec<String> = TABLE_HEADER.iter().map(|s| s.to_string()).collect();
    line(&mut out, &header);
    for cells in &body {
        line(&mut out, cells);
    }
    if rows.iter().any(|r| !r.estimated.is_empty()) {
        out.push_str("* estimated\n");
    }
    out
}

fn render_csv(rows: &[ReportRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in rows {
        let estimated: Vec<&str> = r.estimated.iter().map(|c| c.name()).collect();
        w.write_record([
            r.name.clone(),
            r.n.to_string(),
            r.m.to_string(),
            r.triangles.to_string(),
            r.wedges.to_string(),
            format!("{:.3}", r.k),
            r.p.to_string(),
            r.log_d_bits.to_string(),
            r.previous_bits.to_string(),
            r.new_bits.to_string(),
            format_bytes(r.previous_bytes()),
            format_bytes(r.new_bytes()),
            format_sig3(r.reduction),
            estimated.join(";"),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn render_records(rows: &[ReportRow]) -> Result<String> {
    let mut out = String::new();
    for r in rows {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn render(rows: &[ReportRow], format: Format) -> Result<String> {
    match format {
        Format::Table => Ok(render_table(rows)),
        Format::Csv => render_csv(rows),
        Format::Records => render_records(rows),
    }
}

/// Reads rows back from [`Format::Csv`] output. Formatted byte cells are
/// ignored in favour of the exact bit columns.
pub fn parse_csv(text: &str) -> Result<Vec<ReportRow>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers()?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::Parse {
            line: 1,
            message: "unexpected CSV header".into(),
        });
    }
    let mut rows = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record?;
        let line = idx + 2;
        let field = |i: usize| record.get(i).unwrap_or("");
        fn num<T: std::str::FromStr>(s: &str, line: usize, what: &str) -> Result<T> {
            s.parse().map_err(|_| Error::Parse {
                line,
                message: format!("invalid {what} {s:?}"),
            })
        }
        let estimated = field(13)
            .split(';')
            .filter(|s| !s.is_empty())
            .map(|s| {
                Column::from_name(s).ok_or_else(|| Error::Parse {
                    line,
                    message: format!("unknown estimated column {s:?}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(ReportRow {
            name: field(0).to_string(),
            n: num(field(1), line, "n")?,
            m: num(field(2), line, "m")?,
            triangles: num(field(3), line, "triangles")?,
            wedges: num(field(4), line, "wedges")?,
            k: num(field(5), line, "k")?,
            p: num(field(6), line, "p")?,
            log_d_bits: num(field(7), line, "log_d_bits")?,
            previous_bits: num(field(8), line, "previous_bits")?,
            new_bits: num(field(9), line, "new_bits")?,
            reduction: num(field(12), line, "reduction")?,
            estimated,
        });
    }
    Ok(rows)
}

/// One RMAT instance measured for the `k` trend.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KSample {
    pub scale: u32,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub k: f64,
}

/// Generates RMAT graphs at every scale and seed and measures `k` under a
/// lowest-id BFS.
pub fn k_sweep(scales: RangeInclusive<u32>, seeds: &[u64]) -> Result<Vec<KSample>> {
    let mut out = Vec::new();
    for scale in scales {
        for &seed in seeds {
            let g = generate_rmat(&RmatParams::new(scale, seed))?.graph;
            let forest = bfs_forest(&g, &RootPolicy::LowestId)?;
            let cls = classify_edges(&g, &forest)?;
            out.push(KSample {
                scale,
                seed,
                n: g.n(),
                m: g.m(),
                k: cls.k,
            });
        }
    }
    Ok(out)
}

/// Mean `k` per scale, ascending by scale.
pub fn seed_averaged(samples: &[KSample]) -> Vec<(u32, f64)> {
    let mut by_scale: BTreeMap<u32, (f64, usize)> = BTreeMap::new();
    for s in samples {
        let e = by_scale.entry(s.scale).or_default();
        e.0 += s.k;
        e.1 += 1;
    }
    by_scale
        .into_iter()
        .map(|(scale, (sum, count))| (scale, sum / count as f64))
        .collect()
}

pub fn render_k_samples_csv(samples: &[KSample]) -> String {
    let mut out = String::from("scale,seed,n,m,k\n");
    for s in samples {
        let _ = writeln!(out, "{},{},{},{},{:.6}", s.scale, s.seed, s.n, s.m, s.k);
    }
    out
}

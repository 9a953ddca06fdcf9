//! PSNR-versus-capacity benchmark for raster-order LSB and magic-order LSB.
//!
//! Every cell (cover, ec) draws `floor(ec * n²)` uniform payload bits from a
//! SplitMix64 stream seeded with
//! `seed ^ (cover_index * 0x1_0000_0001) ^ ec_index`, so both methods see
//! the same payload and adding a cover never perturbs other cells.
//! Payloads are embedded raw: no header, no PBSA.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::bitcrypt::BitStream;
use crate::error::{Error, Result};
use crate::image_io::{read_pgm_file, synth_image, GrayImage, SynthKind};
use crate::metrics::{psnr, Psnr, C_MAX};
use crate::stego_core::{embed_bits, lsb_sequential_embed, make_plan, Ec, HeaderMode};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// One SplitMix64 step: returns (output, next state).
pub fn prng_next(state: u64) -> (u64, u64) {
    let next = state.wrapping_add(GOLDEN_GAMMA);
    let mut z = next;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    (z ^ (z >> 31), next)
}

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        let (value, next) = prng_next(self.state);
        self.state = next;
        value
    }

    /// `count` bits, most significant bit of each output first.
    pub fn bits(&mut self, count: usize) -> BitStream {
        let mut out = BitStream::with_capacity(count);
        while out.len() < count {
            let word = self.next_u64();
            let take = (count - out.len()).min(64);
            out.push_uint(word >> (64 - take), take as u32);
        }
        out
    }
}

pub fn cell_seed(seed: u64, cover_index: usize, ec_index: usize) -> u64 {
    seed ^ (cover_index as u64).wrapping_mul(0x1_0000_0001) ^ ec_index as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    SeqLsb,
    MLsb,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::SeqLsb => "seq-lsb",
            Method::MLsb => "m-lsb",
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "seq-lsb" => Ok(Method::SeqLsb),
            "m-lsb" => Ok(Method::MLsb),
            other => Err(Error::InvalidArgument(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Markdown,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "markdown" | "md" => Ok(OutputFormat::Markdown),
            other => Err(Error::InvalidArgument(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoverSource {
    File(PathBuf),
    /// `param` is the noise seed or constant value.
    Synthetic { kind: SynthKind, n: usize, param: u64 },
}

impl CoverSource {
    pub fn name(&self) -> String {
        match self {
            CoverSource::File(path) => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string()),
            CoverSource::Synthetic { kind, n, param } => match kind {
                SynthKind::Gradient => format!("gradient-{n}"),
                _ => format!("{}-{n}-{param}", kind.name()),
            },
        }
    }

    pub fn load(&self) -> Result<GrayImage> {
        match self {
            CoverSource::File(path) => read_pgm_file(path),
            CoverSource::Synthetic { kind, n, param } => Ok(synth_image(*kind, *n, *param)),
        }
    }

    /// Parses a comma-separated list. Each entry is a `.pgm` path, a
    /// directory (all `*.pgm` inside, sorted by name) or
    /// `synthetic:<kind>:<n>[:<param>]`.
    pub fn parse_list(spec: &str) -> Result<Vec<CoverSource>> {
        let mut out = Vec::new();
        for entry in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            if let Some(rest) = entry.strip_prefix("synthetic:") {
                out.push(parse_synthetic(rest)?);
                continue;
            }
            let path = Path::new(entry);
            if path.is_dir() {
                let mut files: Vec<PathBuf> = std::fs::read_dir(path)
                    .map_err(|e| Error::io(path, e))?
                    .filter_map(|e| e.ok().map(|e| e.path()))
                    .filter(|p| {
                        p.extension()
                            .is_some_and(|ext| ext.eq_ignore_ascii_case("pgm"))
                    })
                    .collect();
                files.sort();
                out.extend(files.into_iter().map(CoverSource::File));
            } else {
                out.push(CoverSource::File(path.to_path_buf()));
            }
        }
        if out.is_empty() {
            return Err(Error::InvalidArgument(format!("no covers found in {spec:?}")));
        }
        Ok(out)
    }
}

fn parse_synthetic(rest: &str) -> Result<CoverSource> {
    let bad = || Error::InvalidArgument(format!("bad synthetic cover spec {rest:?}"));
    let mut parts = rest.split(':');
    let kind: SynthKind = parts.next().ok_or_else(bad)?.parse()?;
    let n = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
    let param = match parts.next() {
        Some(p) => p.parse().map_err(|_| bad())?,
        None => 0,
    };
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok(CoverSource::Synthetic { kind, n, param })
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub covers: Vec<CoverSource>,
    pub ecs: Vec<Ec>,
    pub seed: u64,
    pub methods: Vec<Method>,
    pub format: OutputFormat,
    pub paper_reference_columns: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub cover: String,
    pub method: Method,
    pub ec: Ec,
    pub mse: f64,
    pub psnr: Psnr,
    pub analytic_psnr_db: f64,
}

/// Expected MSE under a uniform payload: each substituted plane-0 bit flips
/// with probability 1/2 (cost 1), each plane-1 bit likewise (cost 4).
pub fn expected_mse(ec: Ec, pixels: usize) -> f64 {
    let slots = ec.slots_for(pixels);
    let plane0 = slots.min(pixels) as f64 / pixels as f64;
    let plane1 = slots.saturating_sub(pixels) as f64 / pixels as f64;
    0.5 * plane0 + 2.0 * plane1
}

pub fn analytic_psnr_db(ec: Ec, pixels: usize) -> f64 {
    10.0 * (C_MAX * C_MAX / expected_mse(ec, pixels)).log10()
}

fn run_cell(
    cover: &GrayImage,
    name: &str,
    method: Method,
    ec: Ec,
    payload: &BitStream,
) -> Result<BenchRow> {
    let stego = match method {
        Method::SeqLsb => lsb_sequential_embed(cover, payload, ec)?,
        Method::MLsb => {
            let plan = make_plan(
                cover.width(),
                cover.height(),
                ec,
                HeaderMode::Raw,
                payload.len(),
            )?;
            embed_bits(cover, payload, &plan)?.stego
        }
    };
    let report = psnr(cover, &stego)?;
    Ok(BenchRow {
        cover: name.to_string(),
        method,
        ec,
        mse: report.mse,
        psnr: report.psnr,
        analytic_psnr_db: analytic_psnr_db(ec, cover.pixels().len()),
    })
}

/// Runs every (cover, ec, method) cell; rows come back in config order.
pub fn run_bench(config: &BenchConfig) -> Result<Vec<BenchRow>> {
    if config.ecs.is_empty() || config.methods.is_empty() || config.covers.is_empty() {
        return Err(Error::EmptyInput);
    }
    let covers: Vec<(String, GrayImage)> = config
        .covers
        .iter()
        .map(|src| {
            let img = src.load()?;
            if img.width() != img.height() {
                return Err(Error::NonSquareImage {
                    width: img.width(),
                    height: img.height(),
                });
            }
            Ok((src.name(), img))
        })
        .collect::<Result<_>>()?;

    let cells: Vec<(usize, usize)> = (0..covers.len())
        .flat_map(|c| (0..config.ecs.len()).map(move |e| (c, e)))
        .collect();

    let per_cell: Vec<Vec<BenchRow>> = cells
        .par_iter()
        .map(|&(ci, ei)| {
            let (name, cover) = &covers[ci];
            let ec = config.ecs[ei];
            let payload = SplitMix64::new(cell_seed(config.seed, ci, ei))
                .bits(ec.slots_for(cover.pixels().len()));
            config
                .methods
                .iter()
                .map(|&m| run_cell(cover, name, m, ec, &payload))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    Ok(per_cell.into_iter().flatten().collect())
}

/// Published average PSNR (dB) per method at the three tabulated capacities.
#[derive(Debug, Clone, Copy)]
pub struct PublishedAverages {
    pub ec: (u64, u64),
    pub lsb: f64,
    pub li_2011: f64,
    pub peng_2012: f64,
    pub yang_2014: f64,
    pub proposed: f64,
}

pub const PUBLISHED_AVERAGES: [PublishedAverages; 3] = [
    PublishedAverages {
        ec: (1, 2),
        lsb: 53.89,
        li_2011: 40.02,
        peng_2012: 37.91,
        yang_2014: 40.34,
        proposed: 53.89,
    },
    PublishedAverages {
        ec: (1, 1),
        lsb: 51.1403,
        li_2011: 31.97,
        peng_2012: 30.48,
        yang_2014: 33.00,
        proposed: 51.1415,
    },
    PublishedAverages {
        ec: (3, 2),
        lsb: 44.56,
        li_2011: 27.73,
        peng_2012: 26.05,
        yang_2014: 28.92,
        proposed: 44.58,
    },
];

fn published_for(ec: Ec) -> Option<&'static PublishedAverages> {
    PUBLISHED_AVERAGES
        .iter()
        .find(|p| Ec::new(p.ec.0, p.ec.1).is_ok_and(|e| e == ec))
}

/// Mean PSNR and MSE per (method, ec), in first-appearance order.
pub fn averages(rows: &[BenchRow]) -> Vec<BenchRow> {
    let mut keys: Vec<(Method, Ec)> = Vec::new();
    for row in rows {
        if !keys.contains(&(row.method, row.ec)) {
            keys.push((row.method, row.ec));
        }
    }
    keys.into_iter()
        .map(|(method, ec)| {
            let group: Vec<&BenchRow> = rows
                .iter()
                .filter(|r| r.method == method && r.ec == ec)
                .collect();
            let count = group.len() as f64;
            let mean = |f: &dyn Fn(&BenchRow) -> f64| group.iter().map(|r| f(r)).sum::<f64>() / count;
            let psnr_db = mean(&|r| r.psnr.as_f64());
            BenchRow {
                cover: "Average".to_string(),
                method,
                ec,
                mse: mean(&|r| r.mse),
                psnr: if psnr_db.is_finite() { Psnr::Finite(psnr_db) } else { Psnr::Infinite },
                analytic_psnr_db: mean(&|r| r.analytic_psnr_db),
            }
        })
        .collect()
}

fn psnr_cell(p: Psnr) -> String {
    match p {
        Psnr::Finite(v) => format!("{v:.4}"),
        Psnr::Infinite => "inf".to_string(),
    }
}

/// Renders rows followed by their per-(method, ec) averages.
///
/// With `paper_reference` the average rows carry published values. They are
/// copied from the literature, not computed here.
pub fn render_table(rows: &[BenchRow], format: OutputFormat, paper_reference: bool) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut header = vec!["cover", "method", "ec", "mse", "psnr_db", "analytic_psnr_db"];
    if paper_reference {
        header.extend(["ref_paper_same_method", "ref_li_2011", "ref_peng_2012", "ref_yang_2014"]);
    }

    let line = |row: &BenchRow, is_average: bool| -> Vec<String> {
        let mut cells = vec![
            row.cover.clone(),
            row.method.name().to_string(),
            row.ec.to_string(),
            format!("{:.6}", row.mse),
            psnr_cell(row.psnr),
            format!("{:.4}", row.analytic_psnr_db),
        ];
        if paper_reference {
            match published_for(row.ec).filter(|_| is_average) {
                Some(p) => {
                    let same = match row.method {
                        Method::SeqLsb => p.lsb,
                        Method::MLsb => p.proposed,
                    };
                    cells.extend([same, p.li_2011, p.peng_2012, p.yang_2014].map(|v| format!("{v}")));
                }
                None => cells.extend(std::iter::repeat_n(String::new(), 4)),
            }
        }
        cells
    };

    let mut table: Vec<Vec<String>> = rows.iter().map(|r| line(r, false)).collect();
    table.extend(averages(rows).iter().map(|r| line(r, true)));

    let mut out = String::new();
    match format {
        OutputFormat::Csv => {
            out.push_str(&header.join(","));
            out.push('\n');
            for cells in &table {
                out.push_str(&cells.join(","));
                out.push('\n');
            }
        }
        OutputFormat::Markdown => {
            let widths: Vec<usize> = (0..header.len())
                .map(|i| table.iter().map(|r| r[i].len()).chain([header[i].len()]).max().unwrap_or(0))
                .collect();
            let emit = |out: &mut String, cells: &[String]| {
                out.push('|');
                for (cell, w) in cells.iter().zip(&widths) {
                    let _ = write!(out, " {cell:<w$} |");
                }
                out.push('\n');
            };
            let head: Vec<String> = header.iter().map(|s| s.to_string()).collect();
            emit(&mut out, &head);
            let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
            emit(&mut out, &rule);
            for cells in &table {
                emit(&mut out, cells);
            }
            if paper_reference {
                out.push_str("\nref_* columns: published averages, reference only, not computed by this run.\n");
            }
        }
    }
    Ok(out)
}

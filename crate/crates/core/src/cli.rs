//! Command-line front end: `embed`, `extract`, `psnr`, `magic`, `bench`.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::bench_harness::{render_table, run_bench, BenchConfig, CoverSource, Method, OutputFormat};
use crate::bitcrypt::SecretKey;
use crate::error::{Error, Result};
use crate::image_io::{read_pgm_file, write_pgm_file};
use crate::magic_square::build_magic;
use crate::metrics::psnr;
use crate::stego_core::{embed, extract, make_plan, Ec, HeaderMode};

#[derive(Debug, Parser)]
#[command(name = "mlsb", version, about = "Grayscale PGM steganography with magic-order LSB embedding")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Encrypt a message and hide it in a cover image.
    Embed(EmbedArgs),
    /// Recover a hidden message from a stego image.
    Extract(ExtractArgs),
    /// Print MSE and PSNR between two images.
    Psnr {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Print the magic square of the given order.
    Magic {
        #[arg(long)]
        order: usize,
    },
    /// PSNR versus embedding capacity benchmark.
    Bench(BenchArgs),
}

/// Key text is used as its UTF-8 bytes.
#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct KeyArgs {
    #[arg(long)]
    pub key: Option<String>,
    #[arg(long)]
    pub key_hex: Option<String>,
}

impl KeyArgs {
    fn secret(&self) -> Result<SecretKey> {
        match (&self.key, &self.key_hex) {
            (Some(text), _) => SecretKey::new(text.as_bytes()),
            (None, Some(h)) => {
                let bytes = hex::decode(h.trim())
                    .map_err(|e| Error::InvalidArgument(format!("--key-hex: {e}")))?;
                SecretKey::new(bytes)
            }
            (None, None) => Err(Error::EmptyKey),
        }
    }
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct MessageArgs {
    #[arg(long)]
    pub message: Option<String>,
    #[arg(long)]
    pub message_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    #[arg(long)]
    pub cover: PathBuf,
    #[command(flatten)]
    pub message: MessageArgs,
    #[command(flatten)]
    pub key: KeyArgs,
    /// Bits per pixel in (0, 2]; decimal or fraction.
    #[arg(long, default_value = "1")]
    pub ec: Ec,
    /// Omit the 32-bit length header.
    #[arg(long)]
    pub raw: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
#[group(id = "destination", required = true, multiple = false, args = ["out", "stdout"])]
pub struct ExtractArgs {
    #[arg(long)]
    pub stego: PathBuf,
    #[command(flatten)]
    pub key: KeyArgs,
    #[arg(long, default_value = "1")]
    pub ec: Ec,
    /// Headerless payload; requires --length-bits.
    #[arg(long, requires = "length_bits")]
    pub raw: bool,
    #[arg(long, requires = "raw")]
    pub length_bits: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub stdout: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Comma-separated PGM files, directories, or synthetic:<kind>:<n>[:<param>].
    #[arg(long)]
    pub covers: String,
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,1.5")]
    pub ec: Vec<Ec>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "seq-lsb,m-lsb")]
    pub methods: Vec<Method>,
    #[arg(long, default_value = "csv")]
    pub format: OutputFormat,
    /// Add published reference averages (not computed) to average rows.
    #[arg(long)]
    pub paper_reference_columns: bool,
}

fn header_mode(raw: bool) -> HeaderMode {
    if raw {
        HeaderMode::Raw
    } else {
        HeaderMode::Headered
    }
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| Error::io("<stdout>", e))
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Embed(args) => cmd_embed(args, out),
        Command::Extract(args) => cmd_extract(args, out),
        Command::Psnr { a, b } => {
            let report = psnr(&read_pgm_file(&a)?, &read_pgm_file(&b)?)?;
            write_out(out, &format!("MSE={:.6} PSNR={}\n", report.mse, report.psnr))
        }
        Command::Magic { order } => write_out(out, &build_magic(order)?.render()),
        Command::Bench(args) => {
            let config = BenchConfig {
                covers: CoverSource::parse_list(&args.covers)?,
                ecs: args.ec,
                seed: args.seed,
                methods: args.methods,
                format: args.format,
                paper_reference_columns: args.paper_reference_columns,
            };
            let rows = run_bench(&config)?;
            write_out(out, &render_table(&rows, config.format, config.paper_reference_columns)?)
        }
    }
}

fn cmd_embed(args: EmbedArgs, out: &mut dyn Write) -> Result<()> {
    let cover = read_pgm_file(&args.cover)?;
    let key = args.key.secret()?;
    let message = match (&args.message.message, &args.message.message_file) {
        (Some(text), _) => text.as_bytes().to_vec(),
        (None, Some(path)) => fs::read(path).map_err(|e| Error::io(path, e))?,
        (None, None) => Vec::new(),
    };
    let plan = make_plan(
        cover.width(),
        cover.height(),
        args.ec,
        header_mode(args.raw),
        message.len() * 8,
    )?;
    let result = embed(&cover, &message, &key, &plan)?;
    write_pgm_file(&args.out, &result.stego)?;
    let report = psnr(&cover, &result.stego)?;
    write_out(
        out,
        &format!(
            "slots_used={} changed_pixels={} PSNR={}\n",
            result.slots_used, result.changed_pixels, report.psnr
        ),
    )
}

fn cmd_extract(args: ExtractArgs, out: &mut dyn Write) -> Result<()> {
    let stego = read_pgm_file(&args.stego)?;
    let key = args.key.secret()?;
    let plan = make_plan(
        stego.width(),
        stego.height(),
        args.ec,
        header_mode(args.raw),
        args.length_bits.unwrap_or(0),
    )?;
    let message = extract(&stego, &key, &plan)?;
    match &args.out {
        Some(path) => fs::write(path, &message).map_err(|e| Error::io(path, e)),
        None => out.write_all(&message).map_err(|e| Error::io("<stdout>", e)),
    }
}

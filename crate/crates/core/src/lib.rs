//! Grayscale image steganography.
//!
//! A secret message is shuffled with a keyed per-byte bit reversal plus XOR
//! layer ([`bitcrypt`]), then written into the least significant bit-planes
//! of a square cover image in the order given by a magic square
//! ([`magic_square`], [`stego_core`]). Covers are binary PGM files
//! ([`image_io`]); distortion is measured with MSE/PSNR ([`metrics`]) and the
//! capacity sweep lives in [`bench_harness`].
//!
//! The bit shuffle is obfuscation, not encryption in any cryptographic sense.

pub mod bench_harness;
pub mod bitcrypt;
pub mod cli;
pub mod error;
pub mod image_io;
pub mod magic_square;
pub mod metrics;
pub mod stego_core;

pub use bitcrypt::{BitStream, SecretKey};
pub use error::{Error, Result};
pub use image_io::GrayImage;
pub use magic_square::MagicSquare;
pub use stego_core::{EmbedPlan, Ec, HeaderMode, StegoResult};

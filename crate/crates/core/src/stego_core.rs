//! Magic-order LSB embedding and extraction, the raster-order LSB baseline,
//! and capacity planning.
//!
//! A stream of `total_slots = floor(ec * n²)` slots is laid over the image:
//! slots 1..=n² substitute bit-plane 0 in traversal order, slots
//! n²+1..=2n² substitute bit-plane 1 in the same order.

use std::fmt;
use std::str::FromStr;

use crate::bitcrypt::{pbsa_decrypt, pbsa_encrypt, BitStream, SecretKey};
use crate::error::{Error, Result};
use crate::image_io::GrayImage;
use crate::magic_square::{build_magic, MagicSquare};

/// Width of the length prefix in headered mode.
pub const HEADER_BITS: usize = 32;

/// Embedding capacity in bits per pixel, held as an exact fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ec {
    num: u64,
    den: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Ec {
    pub const ONE: Ec = Ec { num: 1, den: 1 };

    /// `num / den` bpp; must lie in (0, 2].
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidEc(format!("{num}/{den}")));
        }
        if num == 0 || num > 2 * den {
            return Err(Error::EcOutOfRange(format!("{num}/{den}")));
        }
        let g = gcd(num, den);
        Ok(Self {
            num: num / g,
            den: den / g,
        })
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// floor(ec * pixels).
    pub fn slots_for(self, pixels: usize) -> usize {
        (u128::from(self.num) * pixels as u128 / u128::from(self.den)) as usize
    }
}

impl FromStr for Ec {
    type Err = Error;

    /// Accepts decimals (`0.5`, `1`, `.25`) and fractions (`3/2`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidEc(s.to_string());
        if let Some((n, d)) = s.split_once('/') {
            let n = n.trim().parse().map_err(|_| bad())?;
            let d = d.trim().parse().map_err(|_| bad())?;
            return Ec::new(n, d);
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if (int.is_empty() && frac.is_empty())
            || frac.len() > 12
            || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())
        {
            return Err(bad());
        }
        let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        if int > 2 {
            return Err(Error::EcOutOfRange(s.to_string()));
        }
        let den = 10u64.pow(frac.len() as u32);
        let frac: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        Ec::new(int * den + frac, den).map_err(|e| match e {
            Error::EcOutOfRange(_) => Error::EcOutOfRange(s.to_string()),
            other => other,
        })
    }
}

impl fmt::Display for Ec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut den = self.den;
        while den.is_multiple_of(2) {
            den /= 2;
        }
        while den.is_multiple_of(5) {
            den /= 5;
        }
        if den == 1 {
            write!(f, "{}", self.as_f64())
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HeaderMode {
    /// 32-bit big-endian payload bit count precedes the payload.
    Headered,
    /// No framing; the receiver supplies the payload length.
    Raw,
}

impl HeaderMode {
    pub fn overhead(self) -> usize {
        match self {
            HeaderMode::Headered => HEADER_BITS,
            HeaderMode::Raw => 0,
        }
    }
}

/// Resolved embedding geometry for one square cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmbedPlan {
    pub order: usize,
    pub ec: Ec,
    pub total_slots: usize,
    pub header_mode: HeaderMode,
    /// Payload bits, excluding any header. Ignored by headered extraction.
    pub payload_bits: usize,
}

impl EmbedPlan {
    /// Slots consumed by header plus payload.
    pub fn slots_used(&self) -> usize {
        self.payload_bits + self.header_mode.overhead()
    }

    fn check_cover(&self, img: &GrayImage) -> Result<()> {
        if img.width() != img.height() {
            return Err(Error::NonSquareImage {
                width: img.width(),
                height: img.height(),
            });
        }
        if img.width() != self.order {
            return Err(Error::PlanMismatch {
                expected: format!("a {0}x{0} image", self.order),
                actual: format!("{0}x{0}", img.width()),
            });
        }
        Ok(())
    }
}

pub fn capacity(n: usize, ec: Ec, header_mode: HeaderMode) -> Result<usize> {
    if n < 3 {
        return Err(Error::OrderTooSmall(n));
    }
    Ok(ec.slots_for(n * n).saturating_sub(header_mode.overhead()))
}

pub fn make_plan(
    width: usize,
    height: usize,
    ec: Ec,
    header_mode: HeaderMode,
    payload_bits: usize,
) -> Result<EmbedPlan> {
    if width != height {
        return Err(Error::NonSquareImage { width, height });
    }
    if width < 3 {
        return Err(Error::OrderTooSmall(width));
    }
    let total_slots = ec.slots_for(width * width);
    let requested = payload_bits + header_mode.overhead();
    if requested > total_slots {
        return Err(Error::CapacityExceeded {
            requested,
            available: total_slots,
        });
    }
    Ok(EmbedPlan {
        order: width,
        ec,
        total_slots,
        header_mode,
        payload_bits,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StegoResult {
    pub stego: GrayImage,
    pub changed_pixels: usize,
    pub slots_used: usize,
}

/// Pixel visiting order for slot layout.
#[derive(Debug, Clone, Copy)]
pub enum Traversal<'a> {
    /// k-th pixel is the cell holding value k.
    Magic(&'a MagicSquare),
    /// Row-major, top-left to bottom-right.
    Raster,
}

impl Traversal<'_> {
    /// Row-major pixel index and bit-plane for 0-indexed slot `slot`.
    fn locate(&self, slot: usize, pixels: usize) -> (usize, u8) {
        let (k, plane) = if slot < pixels {
            (slot, 0)
        } else {
            (slot - pixels, 1)
        };
        let idx = match self {
            Traversal::Magic(square) => square
                .linear_index_of(k + 1)
                .expect("slot within square range"),
            Traversal::Raster => k,
        };
        (idx, plane)
    }
}

/// Substitutes `bits` into consecutive slots; returns the count of changed pixels.
fn write_slots(img: &mut GrayImage, bits: &BitStream, order: Traversal<'_>) -> usize {
    let cover = img.pixels().to_vec();
    let pixels = img.pixels_mut();
    let count = pixels.len();
    for (slot, bit) in bits.iter().enumerate() {
        let (idx, plane) = order.locate(slot, count);
        let mask = 1u8 << plane;
        if bit {
            pixels[idx] |= mask;
        } else {
            pixels[idx] &= !mask;
        }
    }
    cover.iter().zip(pixels.iter()).filter(|(a, b)| a != b).count()
}

fn read_slots(img: &GrayImage, start: usize, len: usize, order: Traversal<'_>) -> BitStream {
    let pixels = img.pixels();
    (start..start + len)
        .map(|slot| {
            let (idx, plane) = order.locate(slot, pixels.len());
            (pixels[idx] >> plane) & 1 == 1
        })
        .collect()
}

/// Embeds an already-prepared bit stream in magic order, skipping PBSA.
///
/// In headered mode the 32-bit length prefix is still written. The public
/// CLI never calls this directly; benchmarks and golden tests do.
pub fn embed_bits(cover: &GrayImage, bits: &BitStream, plan: &EmbedPlan) -> Result<StegoResult> {
    plan.check_cover(cover)?;
    if bits.len() != plan.payload_bits {
        return Err(Error::PlanMismatch {
            expected: format!("{} payload bits", plan.payload_bits),
            actual: format!("{} bits", bits.len()),
        });
    }
    if plan.slots_used() > plan.total_slots {
        return Err(Error::CapacityExceeded {
            requested: plan.slots_used(),
            available: plan.total_slots,
        });
    }
    let mut stream = BitStream::with_capacity(plan.slots_used());
    if plan.header_mode == HeaderMode::Headered {
        let len = u32::try_from(bits.len()).map_err(|_| Error::CapacityExceeded {
            requested: bits.len(),
            available: u32::MAX as usize,
        })?;
        stream.push_uint(u64::from(len), HEADER_BITS as u32);
    }
    stream.extend_from(bits);

    let square = build_magic(plan.order)?;
    let mut stego = cover.clone();
    let changed_pixels = write_slots(&mut stego, &stream, Traversal::Magic(&square));
    Ok(StegoResult {
        stego,
        changed_pixels,
        slots_used: stream.len(),
    })
}

/// Reads back the payload written by [`embed_bits`].
pub fn extract_bits(stego: &GrayImage, plan: &EmbedPlan) -> Result<BitStream> {
    plan.check_cover(stego)?;
    let square = build_magic(plan.order)?;
    let order = Traversal::Magic(&square);
    match plan.header_mode {
        HeaderMode::Raw => {
            if plan.payload_bits > plan.total_slots {
                return Err(Error::CapacityExceeded {
                    requested: plan.payload_bits,
                    available: plan.total_slots,
                });
            }
            Ok(read_slots(stego, 0, plan.payload_bits, order))
        }
        HeaderMode::Headered => {
            if plan.total_slots < HEADER_BITS {
                return Err(Error::CapacityExceeded {
                    requested: HEADER_BITS,
                    available: plan.total_slots,
                });
            }
            let declared = read_slots(stego, 0, HEADER_BITS, order)
                .iter()
                .fold(0u64, |acc, b| (acc << 1) | u64::from(b));
            let available = plan.total_slots - HEADER_BITS;
            if declared > available as u64 {
                return Err(Error::HeaderTooLarge {
                    declared,
                    available,
                });
            }
            Ok(read_slots(stego, HEADER_BITS, declared as usize, order))
        }
    }
}

pub fn embed(
    cover: &GrayImage,
    message: &[u8],
    key: &SecretKey,
    plan: &EmbedPlan,
) -> Result<StegoResult> {
    if plan.payload_bits != message.len() * 8 {
        return Err(Error::PlanMismatch {
            expected: format!("{} payload bits", plan.payload_bits),
            actual: format!("{} message bits", message.len() * 8),
        });
    }
    embed_bits(cover, &pbsa_encrypt(message, key), plan)
}

pub fn extract(stego: &GrayImage, key: &SecretKey, plan: &EmbedPlan) -> Result<Vec<u8>> {
    pbsa_decrypt(&extract_bits(stego, plan)?, key)
}

/// Raster-order LSB substitution with the same plane layering as the
/// magic-order method. Works on any image shape.
pub fn lsb_sequential_embed(cover: &GrayImage, bits: &BitStream, ec: Ec) -> Result<GrayImage> {
    let available = ec.slots_for(cover.pixels().len());
    if bits.len() > available {
        return Err(Error::CapacityExceeded {
            requested: bits.len(),
            available,
        });
    }
    let mut stego = cover.clone();
    write_slots(&mut stego, bits, Traversal::Raster);
    Ok(stego)
}

pub fn lsb_sequential_extract(stego: &GrayImage, count: usize, ec: Ec) -> Result<BitStream> {
    let available = ec.slots_for(stego.pixels().len());
    if count > available {
        return Err(Error::CapacityExceeded {
            requested: count,
            available,
        });
    }
    Ok(read_slots(stego, 0, count, Traversal::Raster))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench_harness::SplitMix64;
    use proptest::prelude::*;

    fn host() -> GrayImage {
        GrayImage::from_rows(&[[30, 46, 31], [65, 75, 22], [35, 98, 59]]).unwrap()
    }

    fn ec(s: &str) -> Ec {
        s.parse().unwrap()
    }

    fn random_bits(rng: &mut SplitMix64, len: usize) -> BitStream {
        (0..len).map(|_| rng.next_u64() >> 63 == 1).collect()
    }

    #[test]
    fn ec_parsing() {
        assert_eq!(ec("0.5"), Ec::new(1, 2).unwrap());
        assert_eq!(ec(".5"), Ec::new(1, 2).unwrap());
        assert_eq!(ec("3/2"), ec("1.5"));
        assert_eq!(ec("2"), Ec::new(2, 1).unwrap());
        assert_eq!(ec("1.50").to_string(), "1.5");
        assert_eq!(ec("1").to_string(), "1");
        assert_eq!(ec("1/3").to_string(), "1/3");
        assert!(matches!("0".parse::<Ec>(), Err(Error::EcOutOfRange(_))));
        assert!(matches!("2.01".parse::<Ec>(), Err(Error::EcOutOfRange(_))));
        assert!(matches!("7".parse::<Ec>(), Err(Error::EcOutOfRange(_))));
        assert!(matches!("abc".parse::<Ec>(), Err(Error::InvalidEc(_))));
        assert!(matches!("1/0".parse::<Ec>(), Err(Error::InvalidEc(_))));
        // 0.29 * 100 is 28.999... in binary floating point.
        assert_eq!(ec("0.29").slots_for(100), 29);
    }

    #[test]
    fn plan_examples() {
        let p = make_plan(3, 3, Ec::ONE, HeaderMode::Raw, 8).unwrap();
        assert_eq!(p.total_slots, 9);
        let p = make_plan(256, 256, ec("0.5"), HeaderMode::Raw, 0).unwrap();
        assert_eq!(p.total_slots, 32768);
        assert!(matches!(
            make_plan(3, 3, Ec::ONE, HeaderMode::Headered, 8),
            Err(Error::CapacityExceeded { requested: 40, available: 9 })
        ));
        assert!(matches!(
            make_plan(4, 3, Ec::ONE, HeaderMode::Raw, 0),
            Err(Error::NonSquareImage { width: 4, height: 3 })
        ));
    }

    #[test]
    fn capacity_examples() {
        assert_eq!(capacity(256, Ec::ONE, HeaderMode::Raw).unwrap(), 65536);
        assert_eq!(capacity(256, Ec::ONE, HeaderMode::Headered).unwrap(), 65504);
        assert_eq!(capacity(3, ec("2"), HeaderMode::Raw).unwrap(), 18);
        assert_eq!(capacity(3, Ec::ONE, HeaderMode::Headered).unwrap(), 0);
    }

    #[test]
    fn worked_example() {
        let plan = make_plan(3, 3, Ec::ONE, HeaderMode::Raw, 8).unwrap();
        let bits = BitStream::parse("01101011").unwrap();
        let out = embed_bits(&host(), &bits, &plan).unwrap();
        let expected =
            GrayImage::from_rows(&[[31, 46, 30], [65, 75, 23], [34, 98, 59]]).unwrap();
        assert_eq!(out.stego, expected);
        assert_eq!(out.changed_pixels, 4);
        assert_eq!(out.slots_used, 8);
        assert_eq!(extract_bits(&out.stego, &plan).unwrap(), bits);
    }

    #[test]
    fn empty_raw_message_leaves_cover_alone() {
        let plan = make_plan(3, 3, Ec::ONE, HeaderMode::Raw, 0).unwrap();
        let key = SecretKey::new(*b"k").unwrap();
        let out = embed(&host(), &[], &key, &plan).unwrap();
        assert_eq!(out.stego, host());
        assert_eq!(out.changed_pixels, 0);
    }

    #[test]
    fn headered_hi_in_16x16() {
        let cover = crate::image_io::synth_image(crate::image_io::SynthKind::Gradient, 16, 0);
        let key = SecretKey::new(*b"secret").unwrap();
        let plan = make_plan(16, 16, Ec::ONE, HeaderMode::Headered, 16).unwrap();
        let out = embed(&cover, b"Hi", &key, &plan).unwrap();
        assert_eq!(out.slots_used, 48);
        let rx = make_plan(16, 16, Ec::ONE, HeaderMode::Headered, 0).unwrap();
        assert_eq!(extract(&out.stego, &key, &rx).unwrap(), b"Hi");
    }

    #[test]
    fn oversized_header_is_reported() {
        // All-ones LSBs declare 2^32 - 1 payload bits.
        let img = GrayImage::new(8, 8, vec![255; 64]).unwrap();
        let plan = make_plan(8, 8, Ec::ONE, HeaderMode::Headered, 0).unwrap();
        let key = SecretKey::new(*b"k").unwrap();
        assert!(matches!(
            extract(&img, &key, &plan),
            Err(Error::HeaderTooLarge { declared: 0xFFFF_FFFF, available: 32 })
        ));
    }

    #[test]
    fn non_octet_header_length() {
        let plan = make_plan(8, 8, Ec::ONE, HeaderMode::Headered, 5).unwrap();
        let bits = BitStream::parse("10110").unwrap();
        let out = embed_bits(&GrayImage::new(8, 8, vec![0; 64]).unwrap(), &bits, &plan).unwrap();
        let key = SecretKey::new(*b"k").unwrap();
        assert!(matches!(extract(&out.stego, &key, &plan), Err(Error::NonOctetLength(5))));
    }

    #[test]
    fn plan_mismatch_rejected() {
        let plan = make_plan(4, 4, Ec::ONE, HeaderMode::Raw, 8).unwrap();
        let key = SecretKey::new(*b"k").unwrap();
        assert!(matches!(embed(&host(), b"a", &key, &plan), Err(Error::PlanMismatch { .. })));
        let plan = make_plan(3, 3, Ec::ONE, HeaderMode::Raw, 8).unwrap();
        assert!(matches!(embed(&host(), b"ab", &key, &plan), Err(Error::PlanMismatch { .. })));
    }

    #[test]
    fn sequential_raster_order() {
        let bits = BitStream::parse("01101011").unwrap();
        let stego = lsb_sequential_embed(&host(), &bits, Ec::ONE).unwrap();
        // LSBs of the first eight raster pixels, hand-applied.
        let expected =
            GrayImage::from_rows(&[[30, 47, 31], [64, 75, 22], [35, 99, 59]]).unwrap();
        assert_eq!(stego, expected);
        assert_eq!(lsb_sequential_extract(&stego, 8, Ec::ONE).unwrap(), bits);
        assert!(matches!(
            lsb_sequential_embed(&host(), &BitStream::parse("0000000000").unwrap(), Ec::ONE),
            Err(Error::CapacityExceeded { requested: 10, available: 9 })
        ));
    }

    /// Literal reading of the search step: scan the grid for each value.
    fn brute_force_embed(cover: &GrayImage, bits: &BitStream, square: &MagicSquare) -> GrayImage {
        let n = square.order();
        let cells = n * n;
        let mut out = cover.clone();
        for (slot, bit) in bits.iter().enumerate() {
            let (value, plane) = if slot < cells { (slot + 1, 0) } else { (slot + 1 - cells, 1) };
            let mut found = None;
            for r in 0..n {
                for c in 0..n {
                    if square.get(r, c) == value {
                        found = Some((r, c));
                    }
                }
            }
            let (r, c) = found.unwrap();
            let px = &mut out.pixels_mut()[r * n + c];
            *px = (*px & !(1 << plane)) | (u8::from(bit) << plane);
        }
        out
    }

    #[test]
    fn matches_brute_force_scan() {
        let mut rng = SplitMix64::new(7);
        for n in 3..=12 {
            let square = build_magic(n).unwrap();
            let cover = crate::image_io::synth_image(crate::image_io::SynthKind::Noise, n, n as u64);
            for e in ["0.5", "1", "1.5", "2"] {
                let e = ec(e);
                let len = e.slots_for(n * n);
                let bits = random_bits(&mut rng, len);
                let plan = make_plan(n, n, e, HeaderMode::Raw, len).unwrap();
                let fast = embed_bits(&cover, &bits, &plan).unwrap().stego;
                assert_eq!(fast, brute_force_embed(&cover, &bits, &square), "n={n} ec={e}");
            }
        }
    }

    #[test]
    fn same_stream_same_difference_multiset() {
        let mut rng = SplitMix64::new(11);
        let n = 16;
        let cover = crate::image_io::synth_image(crate::image_io::SynthKind::Constant, n, 0x5A);
        for e in ["0.5", "1", "1.5", "2"] {
            let e = ec(e);
            let len = e.slots_for(n * n);
            let bits = random_bits(&mut rng, len);
            let plan = make_plan(n, n, e, HeaderMode::Raw, len).unwrap();
            let magic = embed_bits(&cover, &bits, &plan).unwrap().stego;
            let seq = lsb_sequential_embed(&cover, &bits, e).unwrap();
            // Constant cover: only the bit-to-pixel assignment differs, and
            // both routes map slot k to the k-th visited pixel.
            let mut a: Vec<u8> = magic.pixels().to_vec();
            let mut b: Vec<u8> = seq.pixels().to_vec();
            a.sort_unstable();
            b.sort_unstable();
            assert_eq!(a, b);
            assert_eq!(
                crate::metrics::mse(&cover, &magic).unwrap(),
                crate::metrics::mse(&cover, &seq).unwrap()
            );
        }
    }

    proptest! {
        #[test]
        fn round_trip(n in 3usize..24, ec_idx in 0usize..4, headered: bool,
                      key in proptest::collection::vec(any::<u8>(), 1..17),
                      seed: u64, fill in 0.0f64..=1.0) {
            let e = ["0.5", "1", "1.5", "2"][ec_idx].parse::<Ec>().unwrap();
            let mode = if headered { HeaderMode::Headered } else { HeaderMode::Raw };
            prop_assume!(e.slots_for(n * n) >= mode.overhead());
            let cap = capacity(n, e, mode).unwrap();
            let len = ((cap / 8) as f64 * fill) as usize;
            let mut rng = SplitMix64::new(seed);
            let msg: Vec<u8> = (0..len).map(|_| rng.next_u64() as u8).collect();
            let cover = crate::image_io::synth_image(crate::image_io::SynthKind::Noise, n, seed);
            let key = SecretKey::new(key).unwrap();
            let plan = make_plan(n, n, e, mode, len * 8).unwrap();
            let out = embed(&cover, &msg, &key, &plan).unwrap();
            prop_assert!(out.changed_pixels <= out.slots_used);
            prop_assert_eq!(extract(&out.stego, &key, &plan).unwrap(), msg);
        }

        #[test]
        fn sequential_round_trip(n in 1usize..20, seed: u64) {
            let mut rng = SplitMix64::new(seed);
            let e = Ec::new(3, 2).unwrap();
            let len = e.slots_for(n * n);
            let bits = random_bits(&mut rng, len);
            let cover = crate::image_io::synth_image(crate::image_io::SynthKind::Noise, n, seed);
            let stego = lsb_sequential_embed(&cover, &bits, e).unwrap();
            prop_assert_eq!(lsb_sequential_extract(&stego, len, e).unwrap(), bits);
        }
    }
}

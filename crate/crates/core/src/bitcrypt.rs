//! Pattern-based bit shuffling (PBSA): byte/bit conversion, the per-byte
//! reversal pattern and the cyclic key XOR layer.
//!
//! This is an obfuscation layer, not a secure cipher. Anyone holding the
//! key length and a known plaintext byte recovers the key immediately.

use std::fmt;

use crate::error::{Error, Result};

/// Ordered sequence of bits, most-significant-bit first when built from bytes.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitStream(Vec<bool>);

impl BitStream {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self(Vec::with_capacity(bits))
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    /// Parses a string of `0`/`1` characters; whitespace is ignored.
    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidArgument(format!(
                    "bit string contains {other:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<bool> {
        self.0.get(index).copied()
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn extend_from(&mut self, other: &BitStream) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = bool> + Clone + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<bool> {
        self.0
    }

    /// Appends `width` low bits of `value`, most significant first.
    pub fn push_uint(&mut self, value: u64, width: u32) {
        for shift in (0..width).rev() {
            self.0.push((value >> shift) & 1 == 1);
        }
    }

    fn check_octets(&self) -> Result<()> {
        if self.0.len().is_multiple_of(8) {
            Ok(())
        } else {
            Err(Error::NonOctetLength(self.0.len()))
        }
    }
}

impl FromIterator<bool> for BitStream {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl fmt::Display for BitStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, bit) in self.0.iter().enumerate() {
            if i > 0 && i % 8 == 0 {
                f.write_str(" ")?;
            }
            f.write_str(if *bit { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitStream({self})")
    }
}

/// Non-empty key bytes driving the XOR layer.
#[derive(Clone, PartialEq, Eq)]
pub struct SecretKey(Vec<u8>);

impl SecretKey {
    pub fn new(bytes: impl Into<Vec<u8>>) -> Result<Self> {
        let bytes = bytes.into();
        if bytes.is_empty() {
            return Err(Error::EmptyKey);
        }
        Ok(Self(bytes))
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Debug for SecretKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SecretKey({} bytes)", self.0.len())
    }
}

pub fn bytes_to_bits(data: &[u8]) -> BitStream {
    let mut out = BitStream::with_capacity(data.len() * 8);
    for &byte in data {
        out.push_uint(u64::from(byte), 8);
    }
    out
}

pub fn bits_to_bytes(bits: &BitStream) -> Result<Vec<u8>> {
    bits.check_octets()?;
    Ok(bits
        .as_slice()
        .chunks_exact(8)
        .map(|chunk| chunk.iter().fold(0u8, |acc, &b| (acc << 1) | u8::from(b)))
        .collect())
}

/// Reverses the bit order inside every disjoint 8-bit block.
///
/// The shuffle pattern swaps block positions k and 9-k for k = 1..4.
pub fn reverse_each_byte(bits: &BitStream) -> Result<BitStream> {
    bits.check_octets()?;
    let mut out = bits.as_slice().to_vec();
    for block in out.chunks_exact_mut(8) {
        for k in 0..4 {
            block.swap(k, 7 - k);
        }
    }
    Ok(BitStream(out))
}

/// XORs bit i with key bit (i mod key-bit-length).
pub fn xor_with_key(bits: &BitStream, key: &SecretKey) -> BitStream {
    let key_bits = bytes_to_bits(key.as_bytes());
    bits.iter()
        .zip(key_bits.iter().cycle())
        .map(|(b, k)| b ^ k)
        .collect()
}

pub fn pbsa_encrypt(message: &[u8], key: &SecretKey) -> BitStream {
    let reversed = reverse_each_byte(&bytes_to_bits(message))
        .expect("byte expansion always has octet length");
    xor_with_key(&reversed, key)
}

/// Undoes [`pbsa_encrypt`]: XOR first, then per-byte reversal.
pub fn pbsa_decrypt(cipher: &BitStream, key: &SecretKey) -> Result<Vec<u8>> {
    cipher.check_octets()?;
    let unkeyed = xor_with_key(cipher, key);
    bits_to_bytes(&reverse_each_byte(&unkeyed)?)
}

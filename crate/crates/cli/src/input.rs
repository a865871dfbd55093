//! Input files: ASCII bit strings, example lists and `x,y` point tables.

use std::path::Path;

use idealmdl::models::{DataSample, SupervisedData};
use idealmdl::BitString;

use crate::classes::InputKind;
use crate::error::{CliError, CliResult};

pub const DEFAULT_PRECISION: u32 = 8;

pub fn read_bytes(path: &Path) -> CliResult<Vec<u8>> {
    std::fs::read(path).map_err(|source| CliError::Read { path: path.display().to_string(), source })
}

pub fn read_text(path: &Path) -> CliResult<String> {
    String::from_utf8(read_bytes(path)?).map_err(|_| CliError::Usage(format!("{} is not UTF-8", path.display())))
}

/// All `0`/`1` characters of the file in order; whitespace is ignored.
pub fn parse_bits(text: &str) -> CliResult<BitString> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    Ok(compact.parse()?)
}

pub fn read_bits(path: &Path) -> CliResult<BitString> {
    parse_bits(&read_text(path)?)
}

/// Bits of a raw file, most significant bit of each byte first.
pub fn bytes_to_bits(bytes: &[u8]) -> BitString {
    BitString::from_bits(bytes.iter().flat_map(|b| (0..8).rev().map(move |i| (b >> i) & 1 == 1)).collect())
}

pub fn bits_to_bytes(bits: &BitString) -> CliResult<Vec<u8>> {
    if !bits.len().is_multiple_of(8) {
        return Err(CliError::Usage(format!("{} bits do not fill whole bytes", bits.len())));
    }
    Ok(bits.bits().chunks(8).map(|c| c.iter().fold(0u8, |acc, &b| (acc << 1) | b as u8)).collect())
}

pub fn read_data(path: &Path, kind: InputKind) -> CliResult<DataSample> {
    let text = read_text(path)?;
    Ok(match kind {
        InputKind::Bits => DataSample::Bits(parse_bits(&text)?),
        InputKind::Points => DataSample::Supervised(SupervisedData::from_csv(&text, DEFAULT_PRECISION)?),
        InputKind::Examples => DataSample::Examples(BitString::parse_lines(&text)?),
    })
}

//! Netpbm graymap (PGM) reading and writing, plain (P2) and raw (P5).
//!
//! Only maxval <= 255 is supported. Samples of files with a smaller maxval
//! are rescaled to the full 0..=255 range; files are always written with
//! maxval 255.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::histogram::GrayImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmFormat {
    /// P2
    Ascii,
    /// P5
    Binary,
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.data.len() {
            match self.data[self.pos] {
                b'#' => {
                    while self.pos < self.data.len() && self.data[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn token(&mut self) -> Option<&'a [u8]> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.data.len() && !self.data[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.data[start..self.pos])
    }

    fn header_number(&mut self, what: &str) -> Result<u32> {
        let tok = self
            .token()
            .ok_or_else(|| Error::MalformedHeader(format!("missing {what}")))?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| {
                Error::MalformedHeader(format!(
                    "{what} is not a number: {:?}",
                    String::from_utf8_lossy(tok)
                ))
            })
    }
}

fn rescale(value: u32, maxval: u32) -> u8 {
    if maxval == 255 {
        value as u8
    } else {
        ((value * 255 + maxval / 2) / maxval) as u8
    }
}

/// Parses a complete PGM file held in memory.
pub fn parse_pgm(data: &[u8]) -> Result<GrayImage> {
    let magic = data.get(..2).unwrap_or(data);
    let format = match magic {
        b"P2" => PgmFormat::Ascii,
        b"P5" => PgmFormat::Binary,
        other => return Err(Error::BadMagic(String::from_utf8_lossy(other).into_owned())),
    };
    let mut cur = Cursor { data, pos: 2 };
    if cur.pos < data.len() && !data[cur.pos].is_ascii_whitespace() && data[cur.pos] != b'#' {
        return Err(Error::BadMagic(
            String::from_utf8_lossy(&data[..3.min(data.len())]).into_owned(),
        ));
    }
    let width = cur.header_number("width")? as usize;
    let height = cur.header_number("height")? as usize;
    let maxval = cur.header_number("maxval")?;
    if maxval > 255 {
        return Err(Error::MaxvalTooLarge(maxval));
    }
    if maxval == 0 {
        return Err(Error::MalformedHeader("maxval must be positive".into()));
    }
    let expected = width
        .checked_mul(height)
        .ok_or_else(|| Error::MalformedHeader(format!("{width}x{height} is too large")))?;

    let mut pixels = Vec::with_capacity(expected);
    match format {
        PgmFormat::Binary => {
            // Exactly one whitespace byte separates maxval from the raster.
            let start = cur.pos + 1;
            let raster = data.get(start..).unwrap_or(&[]);
            if raster.len() < expected {
                return Err(Error::TruncatedPixels {
                    expected,
                    found: raster.len(),
                });
            }
            for &b in &raster[..expected] {
                if b as u32 > maxval {
                    return Err(Error::SampleOutOfRange {
                        value: b as u32,
                        maxval,
                    });
                }
                pixels.push(rescale(b as u32, maxval));
            }
        }
        PgmFormat::Ascii => {
            while pixels.len() < expected {
                let Some(tok) = cur.token() else {
                    return Err(Error::TruncatedPixels {
                        expected,
                        found: pixels.len(),
                    });
                };
                let value: u32 = std::str::from_utf8(tok)
                    .ok()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| {
                        Error::MalformedHeader(format!(
                            "bad sample {:?}",
                            String::from_utf8_lossy(tok)
                        ))
                    })?;
                if value > maxval {
                    return Err(Error::SampleOutOfRange { value, maxval });
                }
                pixels.push(rescale(value, maxval));
            }
        }
    }
    GrayImage::new(width, height, pixels)
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let data = fs::read(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_pgm(&data)
}

pub fn encode_pgm(image: &GrayImage, format: PgmFormat) -> Vec<u8> {
    let magic = match format {
        PgmFormat::Ascii => "P2",
        PgmFormat::Binary => "P5",
    };
    let mut out = format!("{magic}\n{} {}\n255\n", image.width(), image.height()).into_bytes();
    match format {
        PgmFormat::Binary => out.extend_from_slice(image.pixels()),
        PgmFormat::Ascii => {
            // Keep lines under 70 characters.
            for row in image.pixels().chunks(image.width().max(1)) {
                for line in row.chunks(16) {
                    let text: Vec<String> = line.iter().map(|p| p.to_string()).collect();
                    out.extend_from_slice(text.join(" ").as_bytes());
                    out.push(b'\n');
                }
            }
        }
    }
    out
}

pub fn write_pgm(image: &GrayImage, path: impl AsRef<Path>, format: PgmFormat) -> Result<()> {
    let path = path.as_ref();
    if path.as_os_str().is_empty() {
        return Err(Error::EmptyPath);
    }
    fs::write(path, encode_pgm(image, format)).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

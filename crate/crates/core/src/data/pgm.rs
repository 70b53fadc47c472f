//! Minimal PGM (portable graymap) reader and writer: P2 (ASCII) and P5
//! (binary) variants with maxval up to 65535 on input, P5 with maxval 255 on
//! output. Intensities are exposed as f64 grids scaled to [0, 1], and parse
//! failures report the byte offset of the offending content.

use std::path::Path;

use ndarray::Array2;

use crate::error::DcError;
use crate::Result;

fn is_ws(b: u8) -> bool {
    matches!(b, b' ' | b'\t' | b'\r' | b'\n')
}

struct Scanner<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn skip_ws_and_comments(&mut self) {
        loop {
            while self.pos < self.bytes.len() && is_ws(self.bytes[self.pos]) {
                self.pos += 1;
            }
            if self.pos < self.bytes.len() && self.bytes[self.pos] == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                return;
            }
        }
    }

    fn token(&mut self, what: &str) -> Result<(usize, &'a str)> {
        self.skip_ws_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len()
            && !is_ws(self.bytes[self.pos])
            && self.bytes[self.pos] != b'#'
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(DcError::PgmParse {
                offset: start,
                reason: format!("expected {what}, found end of input"),
            });
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).map_err(|_| {
            DcError::PgmParse {
                offset: start,
                reason: format!("expected {what}, found non-ASCII bytes"),
            }
        })?;
        Ok((start, text))
    }

    fn number(&mut self, what: &str) -> Result<(usize, u32)> {
        let (start, text) = self.token(what)?;
        let value = text.parse::<u32>().map_err(|_| DcError::PgmParse {
            offset: start,
            reason: format!("expected {what}, found '{text}'"),
        })?;
        Ok((start, value))
    }
}

/// Parse PGM bytes (P2 or P5, maxval <= 65535) into an intensity grid
/// scaled to [0, 1].
pub fn parse_pgm(bytes: &[u8]) -> Result<Array2<f64>> {
    let mut sc = Scanner { bytes, pos: 0 };
    let (magic_at, magic) = sc.token("magic number")?;
    if magic != "P2" && magic != "P5" {
        return Err(DcError::PgmParse {
            offset: magic_at,
            reason: format!("expected magic P2 or P5, found '{magic}'"),
        });
    }
    let binary = magic == "P5";
    let (w_at, width) = sc.number("width")?;
    let (h_at, height) = sc.number("height")?;
    if width == 0 || height == 0 {
        return Err(DcError::PgmParse {
            offset: if width == 0 { w_at } else { h_at },
            reason: format!("dimensions must be positive, got {width}x{height}"),
        });
    }
    let (mv_at, maxval) = sc.number("maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(DcError::PgmParse {
            offset: mv_at,
            reason: format!("maxval must lie in [1, 65535], got {maxval}"),
        });
    }
    let (w, h) = (width as usize, height as usize);
    let scale = 1.0 / maxval as f64;
    let mut grid = Array2::zeros((h, w));
    if binary {
        // Exactly one whitespace byte separates the header from the raster.
        if sc.pos >= bytes.len() || !is_ws(bytes[sc.pos]) {
            return Err(DcError::PgmParse {
                offset: sc.pos,
                reason: "expected single whitespace before binary raster".into(),
            });
        }
        sc.pos += 1;
        let wide = maxval > 255;
        let per = if wide { 2 } else { 1 };
        let need = w * h * per;
        if bytes.len() - sc.pos < need {
            return Err(DcError::PgmParse {
                offset: bytes.len(),
                reason: format!(
                    "raster truncated: need {need} bytes, found {}",
                    bytes.len() - sc.pos
                ),
            });
        }
        for i in 0..h {
            for j in 0..w {
                let raw = if wide {
                    let hi = bytes[sc.pos] as u32;
                    let lo = bytes[sc.pos + 1] as u32;
                    sc.pos += 2;
                    (hi << 8) | lo
                } else {
                    let v = bytes[sc.pos] as u32;
                    sc.pos += 1;
                    v
                };
                if raw > maxval {
                    return Err(DcError::PgmParse {
                        offset: sc.pos - per,
                        reason: format!("sample {raw} exceeds maxval {maxval}"),
                    });
                }
                grid[(i, j)] = raw as f64 * scale;
            }
        }
    } else {
        for i in 0..h {
            for j in 0..w {
                let (at, raw) = sc.number("sample value")?;
                if raw > maxval {
                    return Err(DcError::PgmParse {
                        offset: at,
                        reason: format!("sample {raw} exceeds maxval {maxval}"),
                    });
                }
                grid[(i, j)] = raw as f64 * scale;
            }
        }
    }
    Ok(grid)
}

/// Encode a [0, 1] intensity grid as binary P5 with maxval 255; values are
/// clamped before quantization.
pub fn encode_pgm(grid: &Array2<f64>) -> Vec<u8> {
    let (h, w) = grid.dim();
    let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
    out.reserve(w * h);
    for v in grid.iter() {
        out.push((v.clamp(0.0, 1.0) * 255.0).round() as u8);
    }
    out
}

/// Read and parse a PGM file.
pub fn load_pgm(path: &Path) -> Result<Array2<f64>> {
    parse_pgm(&std::fs::read(path)?)
}

/// Write a grid as an 8-bit binary PGM.
pub fn write_pgm(path: &Path, grid: &Array2<f64>) -> Result<()> {
    std::fs::write(path, encode_pgm(grid))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ascii_example_grid() {
        let g = parse_pgm(b"P2\n2 2\n255\n0 255\n255 0\n").unwrap();
        assert_eq!(g[(0, 0)], 0.0);
        assert_eq!(g[(0, 1)], 1.0);
        assert_eq!(g[(1, 0)], 1.0);
        assert_eq!(g[(1, 1)], 0.0);
    }

    #[test]
    fn comments_are_skipped() {
        let g = parse_pgm(b"P2 # a comment\n# another\n2 1 # trailing\n10\n5 10\n").unwrap();
        assert_eq!(g.dim(), (1, 2));
        assert_eq!(g[(0, 0)], 0.5);
        assert_eq!(g[(0, 1)], 1.0);
    }

    #[test]
    fn binary_eight_bit_round_trip_is_lossless() {
        let mut bytes = b"P5\n3 2\n255\n".to_vec();
        bytes.extend_from_slice(&[0, 17, 255, 128, 64, 3]);
        let g = parse_pgm(&bytes).unwrap();
        assert_eq!(encode_pgm(&g), bytes);
    }

    #[test]
    fn binary_sixteen_bit_scaling() {
        let mut bytes = b"P5\n1 1\n65535\n".to_vec();
        bytes.extend_from_slice(&[0x01, 0x00]);
        let g = parse_pgm(&bytes).unwrap();
        assert!((g[(0, 0)] - 256.0 / 65535.0).abs() < 1e-15);
    }

    #[test]
    fn parse_errors_carry_byte_offsets() {
        match parse_pgm(b"P3\n2 2\n255\n0 0 0 0\n").unwrap_err() {
            DcError::PgmParse { offset, .. } => assert_eq!(offset, 0),
            e => panic!("unexpected {e:?}"),
        }
        match parse_pgm(b"P2\nwide 2\n255\n").unwrap_err() {
            DcError::PgmParse { offset, .. } => assert_eq!(offset, 3),
            e => panic!("unexpected {e:?}"),
        }
        let truncated = b"P5\n2 2\n255\n\x00\x01";
        match parse_pgm(truncated).unwrap_err() {
            DcError::PgmParse { offset, .. } => assert_eq!(offset, truncated.len()),
            e => panic!("unexpected {e:?}"),
        }
        assert!(parse_pgm(b"P2\n1 1\n70000\n0\n").is_err());
        assert!(parse_pgm(b"P2\n1 1\n255\n300\n").is_err());
    }

    #[test]
    fn file_round_trip_within_quantization() {
        let grid = Array2::from_shape_fn((3, 4), |(i, j)| {
            (i as f64 * 0.27 + j as f64 * 0.13).fract()
        });
        let path = std::env::temp_dir().join(format!("dcopt_pgm_{}.pgm", std::process::id()));
        write_pgm(&path, &grid).unwrap();
        let back = load_pgm(&path).unwrap();
        std::fs::remove_file(&path).ok();
        assert_eq!(back.dim(), grid.dim());
        for (a, b) in grid.iter().zip(back.iter()) {
            assert!((a - b).abs() <= 0.5 / 255.0 + 1e-12);
        }
    }
}

//! 8-bit RGB rasters: binary PPM (P6) I/O, rectangular crops, mean colour.

use thiserror::Error;

use crate::annot::AbsBox;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ImageError {
    #[error("not a binary PPM: {0}")]
    Format(String),
    #[error("unsupported maxval {0}, only 255 is accepted")]
    Unsupported(u32),
    #[error("pixel payload truncated: expected {expected} bytes, found {found}")]
    Length { expected: usize, found: usize },
    #[error("region does not intersect the {width}x{height} image")]
    EmptyRegion { width: u32, height: u32 },
    #[error("invalid dimensions {width}x{height} for {pixels} pixels")]
    Dimensions { width: u32, height: u32, pixels: usize },
}

/// Row-major RGB image, top row first. Always at least 1x1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageRGB {
    width: u32,
    height: u32,
    pixels: Vec<[u8; 3]>,
}

impl ImageRGB {
    pub fn new(width: u32, height: u32, pixels: Vec<[u8; 3]>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 || pixels.len() != width as usize * height as usize {
            return Err(ImageError::Dimensions {
                width,
                height,
                pixels: pixels.len(),
            });
        }
        Ok(ImageRGB {
            width,
            height,
            pixels,
        })
    }

    /// A `width` x `height` image filled with `color`.
    ///
    /// # Panics
    /// If either dimension is zero.
    pub fn filled(width: u32, height: u32, color: [u8; 3]) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        ImageRGB {
            width,
            height,
            pixels: vec![color; width as usize * height as usize],
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }

    pub fn get(&self, x: u32, y: u32) -> [u8; 3] {
        self.pixels[y as usize * self.width as usize + x as usize]
    }

    pub fn put(&mut self, x: u32, y: u32, color: [u8; 3]) {
        let w = self.width as usize;
        self.pixels[y as usize * w + x as usize] = color;
    }

    /// RGBA bytes with opaque alpha, for canvas `ImageData`.
    pub fn to_rgba(&self) -> Vec<u8> {
        self.pixels
            .iter()
            .flat_map(|&[r, g, b]| [r, g, b, 255])
            .collect()
    }
}

/// Mean channel intensities, each in `[0, 255]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanRGB {
    pub r: f64,
    pub g: f64,
    pub b: f64,
}

impl MeanRGB {
    pub fn new(r: f64, g: f64, b: f64) -> Self {
        MeanRGB { r, g, b }
    }

    pub fn distance_sq(&self, other: &MeanRGB) -> f64 {
        let (dr, dg, db) = (self.r - other.r, self.g - other.g, self.b - other.b);
        dr * dr + dg * dg + db * db
    }

    /// Nearest 8-bit colour, for painting.
    pub fn to_u8(&self) -> [u8; 3] {
        let q = |v: f64| v.round().clamp(0.0, 255.0) as u8;
        [q(self.r), q(self.g), q(self.b)]
    }
}

impl From<[u8; 3]> for MeanRGB {
    fn from([r, g, b]: [u8; 3]) -> Self {
        MeanRGB::new(r as f64, g as f64, b as f64)
    }
}

struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl HeaderCursor<'_> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&c) = self.bytes.get(self.pos) {
            if c.is_ascii_whitespace() {
                self.pos += 1;
            } else if c == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32, ImageError> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| ImageError::Format(format!("missing or invalid {what}")))
    }
}

/// Decodes a binary PPM (P6, maxval 255).
pub fn read_ppm(bytes: &[u8]) -> Result<ImageRGB, ImageError> {
    if bytes.len() < 2 || &bytes[..2] != b"P6" {
        return Err(ImageError::Format("magic number is not P6".into()));
    }
    let mut cur = HeaderCursor { bytes, pos: 2 };
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if maxval != 255 {
        return Err(ImageError::Unsupported(maxval));
    }
    match bytes.get(cur.pos) {
        Some(c) if c.is_ascii_whitespace() => cur.pos += 1,
        _ => return Err(ImageError::Format("no whitespace after maxval".into())),
    }
    if width == 0 || height == 0 {
        return Err(ImageError::Format(format!("zero dimension {width}x{height}")));
    }
    let expected = width as usize * height as usize * 3;
    let payload = &bytes[cur.pos..];
    if payload.len() < expected {
        return Err(ImageError::Length {
            expected,
            found: payload.len(),
        });
    }
    let pixels = payload[..expected]
        .chunks_exact(3)
        .map(|c| [c[0], c[1], c[2]])
        .collect();
    ImageRGB::new(width, height, pixels)
}

/// Encodes with the canonical header `P6\n<w> <h>\n255\n`.
pub fn write_ppm(img: &ImageRGB) -> Vec<u8> {
    let header = format!("P6\n{} {}\n255\n", img.width, img.height);
    let mut out = Vec::with_capacity(header.len() + img.pixels.len() * 3);
    out.extend_from_slice(header.as_bytes());
    out.extend(img.pixels.iter().flatten());
    out
}

/// Pixel column/row ranges covered by `b`, expanded outward to whole pixels
/// and intersected with the image. `None` when nothing remains.
pub fn pixel_span(b: &AbsBox, width: u32, height: u32) -> Option<(u32, u32, u32, u32)> {
    let span = |lo: f64, hi: f64, limit: u32| -> Option<(u32, u32)> {
        let start = lo.floor();
        let end = hi.ceil().max(start + 1.0);
        let start = start.max(0.0);
        let end = end.min(limit as f64);
        (end > start).then_some((start as u32, end as u32))
    };
    let (x0, x1) = span(b.x_min, b.x_max, width)?;
    let (y0, y1) = span(b.y_min, b.y_max, height)?;
    Some((x0, y0, x1, y1))
}

/// Crops the pixels covered by `b`: columns `floor(x_min)..ceil(x_max)` and
/// rows `floor(y_min)..ceil(y_max)` (end-exclusive), clipped to the image.
pub fn crop(img: &ImageRGB, b: &AbsBox) -> Result<ImageRGB, ImageError> {
    let (x0, y0, x1, y1) = pixel_span(b, img.width, img.height).ok_or(ImageError::EmptyRegion {
        width: img.width,
        height: img.height,
    })?;
    let w = img.width as usize;
    let mut pixels = Vec::with_capacity(((x1 - x0) * (y1 - y0)) as usize);
    for y in y0..y1 {
        let row = y as usize * w;
        pixels.extend_from_slice(&img.pixels[row + x0 as usize..row + x1 as usize]);
    }
    ImageRGB::new(x1 - x0, y1 - y0, pixels)
}

pub fn mean_rgb(img: &ImageRGB) -> MeanRGB {
    let mut sums = [0u64; 3];
    for p in &img.pixels {
        for (s, &c) in sums.iter_mut().zip(p) {
            *s += c as u64;
        }
    }
    let n = img.pixels.len() as f64;
    MeanRGB::new(sums[0] as f64 / n, sums[1] as f64 / n, sums[2] as f64 / n)
}

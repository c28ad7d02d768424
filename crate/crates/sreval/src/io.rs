//! 8-bit PNG and binary PPM/PGM reading and writing.

use std::fs;
use std::io::Cursor;
use std::path::{Path, PathBuf};

use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{DynamicImage, GrayImage, ImageFormat, RgbImage};
use sreval_core::{Domain, PlanarImage};

#[derive(Debug, thiserror::Error)]
pub enum ImageIoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: unsupported image: {property}")]
    Unsupported { path: PathBuf, property: String },
    #[error("{path}: {source}")]
    Decode {
        path: PathBuf,
        source: image::ImageError,
    },
    #[error("{path}: cannot write {domain} image with {planes} plane(s) as {format}")]
    Unwritable {
        path: PathBuf,
        domain: &'static str,
        planes: usize,
        format: &'static str,
    },
}

fn unsupported(path: &Path, property: impl Into<String>) -> ImageIoError {
    ImageIoError::Unsupported {
        path: path.to_path_buf(),
        property: property.into(),
    }
}

/// Returns the maxval of a binary PNM header, rejecting the ASCII and
/// bitmap variants.
fn pnm_maxval(path: &Path, bytes: &[u8]) -> Result<u32, ImageIoError> {
    match &bytes[..2] {
        b"P5" | b"P6" => {}
        b"P1" | b"P2" | b"P3" => return Err(unsupported(path, "ASCII PNM encoding")),
        b"P4" => return Err(unsupported(path, "1-bit PBM bitmap")),
        b"P7" => return Err(unsupported(path, "PAM container")),
        _ => return Err(unsupported(path, "unknown PNM magic")),
    }
    let mut fields = Vec::with_capacity(3);
    let mut i = 2;
    while fields.len() < 3 && i < bytes.len() {
        match bytes[i] {
            b'#' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b if b.is_ascii_whitespace() => i += 1,
            _ => {
                let start = i;
                while i < bytes.len() && !bytes[i].is_ascii_whitespace() {
                    i += 1;
                }
                fields.push(&bytes[start..i]);
            }
        }
    }
    std::str::from_utf8(fields.get(2).copied().unwrap_or_default())
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| unsupported(path, "malformed PNM header"))
}

fn describe(img: &DynamicImage) -> String {
    let color = img.color();
    let bits = color.bits_per_pixel() / u16::from(color.channel_count());
    if color.has_alpha() {
        format!("alpha channel ({color:?})")
    } else if bits != 8 {
        format!("{bits}-bit samples ({color:?})")
    } else {
        format!("channel layout {color:?}")
    }
}

/// Loads an 8-bit RGB or grayscale PNG, PPM or PGM. Samples are `byte / 255`.
pub fn load_image(path: impl AsRef<Path>) -> Result<PlanarImage, ImageIoError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| ImageIoError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let format = image::guess_format(&bytes).map_err(|source| ImageIoError::Decode {
        path: path.to_path_buf(),
        source,
    })?;
    match format {
        ImageFormat::Png => {}
        ImageFormat::Pnm => {
            let maxval = pnm_maxval(path, &bytes)?;
            if maxval != 255 {
                return Err(unsupported(
                    path,
                    format!("PNM maxval {maxval} (expected 255)"),
                ));
            }
        }
        other => return Err(unsupported(path, format!("file format {other:?}"))),
    }
    let img = image::load_from_memory_with_format(&bytes, format).map_err(|source| {
        ImageIoError::Decode {
            path: path.to_path_buf(),
            source,
        }
    })?;
    let (w, h) = (img.width() as usize, img.height() as usize);
    let (domain, raw) = match img {
        DynamicImage::ImageLuma8(g) => (Domain::Luma, g.into_raw()),
        DynamicImage::ImageRgb8(rgb) => (Domain::Rgb, rgb.into_raw()),
        other => return Err(unsupported(path, describe(&other))),
    };
    let planes = domain.planes();
    let mut samples = vec![0.0; raw.len()];
    for (i, px) in raw.chunks_exact(planes).enumerate() {
        for (p, &b) in px.iter().enumerate() {
            samples[p * w * h + i] = f64::from(b) / 255.0;
        }
    }
    PlanarImage::new(w, h, domain, samples).map_err(|e| unsupported(path, e.to_string()))
}

/// `round(sample * 255)` with halves rounded up, clamped to a byte.
pub fn quantize(sample: f64) -> u8 {
    (sample * 255.0 + 0.5).floor().clamp(0.0, 255.0) as u8
}

/// Interleaved 8-bit bytes of an RGB or luma image.
pub fn to_bytes(img: &PlanarImage) -> Vec<u8> {
    let planes = img.planes();
    let n = img.width() * img.height();
    let samples = img.samples();
    let mut out = Vec::with_capacity(n * planes);
    for i in 0..n {
        for p in 0..planes {
            out.push(quantize(samples[p * n + i]));
        }
    }
    out
}

/// Writes an RGB or luma image; the format follows the extension
/// (`.png`, `.ppm` for RGB, `.pgm` for luma).
pub fn save_image(img: &PlanarImage, path: impl AsRef<Path>) -> Result<(), ImageIoError> {
    let path = path.as_ref();
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .unwrap_or_default();
    let (format, name) = match ext.as_str() {
        "png" => (ImageFormat::Png, "PNG"),
        "ppm" | "pgm" | "pnm" => (ImageFormat::Pnm, "PNM"),
        _ => return Err(unsupported(path, format!("output extension {ext:?}"))),
    };
    let unwritable = |format| ImageIoError::Unwritable {
        path: path.to_path_buf(),
        domain: img.domain().name(),
        planes: img.planes(),
        format,
    };
    let (w, h) = (img.width() as u32, img.height() as u32);
    let dynamic = match img.domain() {
        Domain::Rgb if ext != "pgm" => DynamicImage::ImageRgb8(
            RgbImage::from_raw(w, h, to_bytes(img)).expect("buffer size matches"),
        ),
        Domain::Luma if ext != "ppm" => DynamicImage::ImageLuma8(
            GrayImage::from_raw(w, h, to_bytes(img)).expect("buffer size matches"),
        ),
        _ => return Err(unwritable(name)),
    };
    let encode_err = |source| ImageIoError::Decode {
        path: path.to_path_buf(),
        source,
    };
    let mut buf = Cursor::new(Vec::new());
    if format == ImageFormat::Pnm {
        let subtype = match img.domain() {
            Domain::Luma => PnmSubtype::Graymap(SampleEncoding::Binary),
            _ => PnmSubtype::Pixmap(SampleEncoding::Binary),
        };
        dynamic
            .write_with_encoder(PnmEncoder::new(&mut buf).with_subtype(subtype))
            .map_err(encode_err)?;
    } else {
        dynamic.write_to(&mut buf, format).map_err(encode_err)?;
    }
    fs::write(path, buf.into_inner()).map_err(|source| ImageIoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Files in `dir` with a supported image extension, sorted by name.
pub fn list_images(dir: impl AsRef<Path>) -> std::io::Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        let supported = path.extension().and_then(|e| e.to_str()).is_some_and(|e| {
            matches!(
                e.to_ascii_lowercase().as_str(),
                "png" | "ppm" | "pgm" | "pnm"
            )
        });
        if supported && path.is_file() {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

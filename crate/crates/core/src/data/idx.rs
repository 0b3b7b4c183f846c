//! IDX (MNIST) binary files: big-endian magic, dimension sizes, then u8 payload.

use std::fs;
use std::path::Path;

use super::Dataset;
use crate::autodiff::Tensor;
use crate::error::{GeomError, Result};

pub const IDX_IMAGES_MAGIC: u32 = 0x0000_0803;
pub const IDX_LABELS_MAGIC: u32 = 0x0000_0801;

fn be_u32(bytes: &[u8], at: usize, what: &str) -> Result<u32> {
    bytes
        .get(at..at + 4)
        .map(|b| u32::from_be_bytes(b.try_into().expect("4 bytes")))
        .ok_or_else(|| GeomError::Format(format!("{what}: truncated header")))
}

/// Pixel `p` maps to `p / 127.5 - 1`, so 0 → -1 and 255 → +1.
pub fn scale_pixel(p: u8) -> f64 {
    p as f64 / 127.5 - 1.0
}

pub fn parse_idx_images(bytes: &[u8]) -> Result<(usize, usize, usize, &[u8])> {
    let magic = be_u32(bytes, 0, "images")?;
    if magic != IDX_IMAGES_MAGIC {
        return Err(GeomError::Format(format!("images magic {magic:#010x}, expected {IDX_IMAGES_MAGIC:#010x}")));
    }
    let n = be_u32(bytes, 4, "images")? as usize;
    let h = be_u32(bytes, 8, "images")? as usize;
    let w = be_u32(bytes, 12, "images")? as usize;
    let payload = &bytes[16..];
    let expected = n.checked_mul(h).and_then(|v| v.checked_mul(w));
    if expected != Some(payload.len()) {
        return Err(GeomError::Format(format!(
            "images payload {} bytes, header says {n}x{h}x{w}",
            payload.len()
        )));
    }
    Ok((n, h, w, payload))
}

pub fn parse_idx_labels(bytes: &[u8]) -> Result<&[u8]> {
    let magic = be_u32(bytes, 0, "labels")?;
    if magic != IDX_LABELS_MAGIC {
        return Err(GeomError::Format(format!("labels magic {magic:#010x}, expected {IDX_LABELS_MAGIC:#010x}")));
    }
    let n = be_u32(bytes, 4, "labels")? as usize;
    let payload = &bytes[8..];
    if payload.len() != n {
        return Err(GeomError::Format(format!("labels payload {} bytes, header says {n}", payload.len())));
    }
    Ok(payload)
}

/// Flattened images scaled to [-1, 1] with their labels.
pub fn load_idx_images(images_path: impl AsRef<Path>, labels_path: impl AsRef<Path>) -> Result<Dataset> {
    let images_path = images_path.as_ref();
    let img_bytes = fs::read(images_path)?;
    let lab_bytes = fs::read(labels_path)?;
    let (n, h, w, pixels) = parse_idx_images(&img_bytes)?;
    let labels = parse_idx_labels(&lab_bytes)?;
    if labels.len() != n {
        return Err(GeomError::Format(format!("{n} images but {} labels", labels.len())));
    }
    let rows = Tensor::from_vec(n, h * w, pixels.iter().map(|&p| scale_pixel(p)).collect())?;
    Dataset::new(
        rows,
        Some(labels.iter().map(|&l| l as i64).collect()),
        None,
        format!("idx {}", images_path.display()),
    )
}

pub fn write_idx_images(path: impl AsRef<Path>, images: &[Vec<u8>], height: usize, width: usize) -> Result<()> {
    let mut out = Vec::with_capacity(16 + images.len() * height * width);
    out.extend_from_slice(&IDX_IMAGES_MAGIC.to_be_bytes());
    for v in [images.len(), height, width] {
        out.extend_from_slice(&(v as u32).to_be_bytes());
    }
    for img in images {
        if img.len() != height * width {
            return Err(GeomError::Dimension { op: "idx image", left: (height, width), right: (img.len(), 1) });
        }
        out.extend_from_slice(img);
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn write_idx_labels(path: impl AsRef<Path>, labels: &[u8]) -> Result<()> {
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend_from_slice(&IDX_LABELS_MAGIC.to_be_bytes());
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    fs::write(path, out)?;
    Ok(())
}

//! Binary model format.
//!
//! ```text
//! magic "GMGN" | version u16 | layer count u16 | flags u8 (bit 0: residual)
//! per layer: in_dim u32 | out_dim u32 | activation u8 | weight f64[in*out] | bias f64[out]
//! ```
//! All integers and floats little-endian, weights row-major.

use std::fs::File;
use std::io::{BufReader, BufWriter, ErrorKind, Read, Write};
use std::path::Path;

use super::{Activation, DenseLayer, Mlp};
use crate::autodiff::Tensor;
use crate::error::{GeomError, Result};

pub const MODEL_MAGIC: &[u8; 4] = b"GMGN";
pub const MODEL_VERSION: u16 = 1;

// Guards against allocating absurd buffers from a corrupt header.
const MAX_DIM: u32 = 1 << 20;

pub fn write_mlp<W: Write>(w: &mut W, mlp: &Mlp) -> Result<()> {
    w.write_all(MODEL_MAGIC)?;
    w.write_all(&MODEL_VERSION.to_le_bytes())?;
    let count = u16::try_from(mlp.layers().len())
        .map_err(|_| GeomError::Format("too many layers for u16 count".into()))?;
    w.write_all(&count.to_le_bytes())?;
    w.write_all(&[u8::from(mlp.is_residual())])?;
    for l in mlp.layers() {
        w.write_all(&(l.in_dim() as u32).to_le_bytes())?;
        w.write_all(&(l.out_dim() as u32).to_le_bytes())?;
        w.write_all(&[l.activation.code()])?;
        for v in l.weight.data().iter().chain(l.bias.data()) {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

fn eof_as_format(e: std::io::Error) -> GeomError {
    if e.kind() == ErrorKind::UnexpectedEof {
        GeomError::Format("truncated model file".into())
    } else {
        GeomError::Io(e)
    }
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf).map_err(eof_as_format)?;
    Ok(buf)
}

fn read_f64s<R: Read>(r: &mut R, n: usize) -> Result<Vec<f64>> {
    let mut bytes = vec![0u8; n * 8];
    r.read_exact(&mut bytes).map_err(eof_as_format)?;
    Ok(bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect())
}

pub fn read_mlp<R: Read>(r: &mut R) -> Result<Mlp> {
    let magic: [u8; 4] = read_array(r)?;
    if &magic != MODEL_MAGIC {
        return Err(GeomError::Format(format!("bad magic {magic:?}")));
    }
    let version = u16::from_le_bytes(read_array(r)?);
    if version != MODEL_VERSION {
        return Err(GeomError::UnsupportedVersion { found: version, expected: MODEL_VERSION });
    }
    let count = u16::from_le_bytes(read_array(r)?);
    if count == 0 {
        return Err(GeomError::Format("model has no layers".into()));
    }
    let [flags] = read_array::<1, _>(r)?;
    if flags > 1 {
        return Err(GeomError::Format(format!("unknown model flags {flags:#04x}")));
    }
    let mut layers = Vec::with_capacity(count as usize);
    for i in 0..count {
        let in_dim = u32::from_le_bytes(read_array(r)?);
        let out_dim = u32::from_le_bytes(read_array(r)?);
        if in_dim == 0 || out_dim == 0 || in_dim > MAX_DIM || out_dim > MAX_DIM {
            return Err(GeomError::Format(format!("layer {i} has invalid dims {in_dim}x{out_dim}")));
        }
        let [code] = read_array::<1, _>(r)?;
        let activation = Activation::from_code(code)
            .ok_or_else(|| GeomError::Format(format!("layer {i} has unknown activation code {code}")))?;
        let (in_dim, out_dim) = (in_dim as usize, out_dim as usize);
        let weight = Tensor::from_vec(in_dim, out_dim, read_f64s(r, in_dim * out_dim)?)?;
        let bias = Tensor::from_vec(1, out_dim, read_f64s(r, out_dim)?)?;
        layers.push(DenseLayer { weight, bias, activation });
    }
    Mlp::from_layers(layers)
        .and_then(|m| m.with_residual(flags == 1))
        .map_err(|e| GeomError::Format(format!("inconsistent layers: {e}")))
}

pub fn save_model(mlp: &Mlp, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_mlp(&mut w, mlp)?;
    w.flush()?;
    Ok(())
}

/// Loads a model and rejects trailing bytes.
pub fn load_model(path: impl AsRef<Path>) -> Result<Mlp> {
    let mut r = BufReader::new(File::open(path)?);
    let mlp = read_mlp(&mut r)?;
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(GeomError::Format("trailing bytes after model".into()));
    }
    Ok(mlp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{init_mlp, leaky_activations};

    fn model() -> Mlp {
        init_mlp(&[3, 5, 2], &leaky_activations(2, Activation::Tanh), 9).unwrap()
    }

    fn bytes(m: &Mlp) -> Vec<u8> {
        let mut buf = Vec::new();
        write_mlp(&mut buf, m).unwrap();
        buf
    }

    #[test]
    fn header_layout() {
        let b = bytes(&model());
        assert_eq!(&b[..4], b"GMGN");
        assert_eq!(u16::from_le_bytes([b[4], b[5]]), 1);
        assert_eq!(u16::from_le_bytes([b[6], b[7]]), 2);
        assert_eq!(b[8], 0);
        assert_eq!(u32::from_le_bytes(b[9..13].try_into().unwrap()), 3);
        assert_eq!(u32::from_le_bytes(b[13..17].try_into().unwrap()), 5);
        assert_eq!(b[17], Activation::LeakyRelu.code());
        let expected_len = 9 + (9 + 8 * (15 + 5)) + (9 + 8 * (10 + 2));
        assert_eq!(b.len(), expected_len);
    }

    #[test]
    fn save_load_save_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let p1 = dir.path().join("a.gmgn");
        let p2 = dir.path().join("b.gmgn");
        let m = model();
        save_model(&m, &p1).unwrap();
        let loaded = load_model(&p1).unwrap();
        assert_eq!(loaded, m);
        save_model(&loaded, &p2).unwrap();
        assert_eq!(std::fs::read(p1).unwrap(), std::fs::read(p2).unwrap());
    }

    #[test]
    fn residual_flag_round_trips() {
        let m = init_mlp(&[3, 4, 3], &leaky_activations(2, Activation::Linear), 1).unwrap().with_residual(true).unwrap();
        let b = bytes(&m);
        assert_eq!(b[8], 1);
        assert_eq!(read_mlp(&mut &b[..]).unwrap(), m);
        let mut bad = b.clone();
        bad[8] = 4;
        assert!(matches!(read_mlp(&mut &bad[..]), Err(GeomError::Format(_))));
    }

    #[test]
    fn truncated_file_is_format_error() {
        let b = bytes(&model());
        for cut in [0, 3, 7, 20, b.len() - 1] {
            let err = read_mlp(&mut &b[..cut]).unwrap_err();
            assert!(matches!(err, GeomError::Format(_)), "cut {cut}: {err}");
        }
    }

    #[test]
    fn version_mismatch_is_explicit() {
        let mut b = bytes(&model());
        b[4] = 9;
        assert!(matches!(read_mlp(&mut &b[..]), Err(GeomError::UnsupportedVersion { found: 9, expected: 1 })));
    }

    #[test]
    fn broken_chain_is_format_error() {
        let mut b = bytes(&model());
        // second layer in_dim 5 -> 4
        let second = 9 + 9 + 8 * 20;
        b[second..second + 4].copy_from_slice(&4u32.to_le_bytes());
        assert!(matches!(read_mlp(&mut &b[..]), Err(GeomError::Format(_))));
    }
}

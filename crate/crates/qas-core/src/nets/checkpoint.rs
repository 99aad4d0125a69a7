//! Versioned binary checkpoints: shape, grid and activation metadata plus
//! flat little-endian parameter arrays in declared order. Byte-stable for a
//! given network on a given platform.

use std::io::{Read, Write};
use std::path::Path;

use super::adam::{AdamParams, AdamState};
use super::kan::KanLayer;
use super::mlp::{Activation, MlpLayer};
use super::network::{Layer, Network, NetworkKind};
use super::spline::SplineGrid;
use super::NetError;

const MAGIC: &[u8; 8] = b"QASNET\0\0";
const VERSION: u32 = 1;

pub fn save_checkpoint(
    net: &Network,
    adam: Option<&AdamState>,
    path: impl AsRef<Path>,
) -> Result<(), NetError> {
    let bytes = encode(net, adam);
    let path = path.as_ref();
    let mut file = std::fs::File::create(path)
        .map_err(|e| NetError::CheckpointIo { path: path.display().to_string(), source: e })?;
    file.write_all(&bytes)
        .map_err(|e| NetError::CheckpointIo { path: path.display().to_string(), source: e })?;
    Ok(())
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<(Network, Option<AdamState>), NetError> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| NetError::CheckpointIo { path: path.display().to_string(), source: e })?;
    decode(&bytes)
}

pub fn encode(net: &Network, adam: Option<&AdamState>) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    put_u32(&mut out, VERSION);
    out.push(match net.kind() {
        NetworkKind::Kan => 0,
        NetworkKind::Mlp => 1,
    });
    put_u32(&mut out, net.shape().len() as u32);
    for &dim in net.shape() {
        put_u64(&mut out, dim as u64);
    }
    for layer in net.layers() {
        match layer {
            Layer::Kan(l) => {
                let grid = l.grid();
                put_f64(&mut out, grid.lo());
                put_f64(&mut out, grid.hi());
                put_u32(&mut out, grid.segments() as u32);
                put_u32(&mut out, grid.order() as u32);
                put_array(&mut out, l.spline_coeffs());
                put_array(&mut out, l.base_weights());
            }
            Layer::Mlp(l) => {
                out.push(activation_code(l.activation()));
                put_array(&mut out, l.weights());
                put_array(&mut out, l.bias());
            }
        }
    }
    match adam {
        None => out.push(0),
        Some(state) => {
            out.push(1);
            let (params, step, m, v) = state.parts();
            put_u64(&mut out, step);
            put_f64(&mut out, params.lr);
            put_f64(&mut out, params.beta1);
            put_f64(&mut out, params.beta2);
            put_f64(&mut out, params.epsilon);
            put_array(&mut out, m);
            put_array(&mut out, v);
        }
    }
    out
}

pub fn decode(bytes: &[u8]) -> Result<(Network, Option<AdamState>), NetError> {
    let mut r = Reader { bytes, pos: 0 };
    let magic = r.take(8)?;
    if magic != MAGIC {
        return Err(NetError::BadMagic);
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(NetError::UnsupportedVersion(version));
    }
    let kind = match r.u8()? {
        0 => NetworkKind::Kan,
        1 => NetworkKind::Mlp,
        other => return Err(NetError::Corrupt(format!("unknown network kind {other}"))),
    };
    let shape_len = r.u32()? as usize;
    if shape_len < 2 || shape_len > 64 {
        return Err(NetError::Corrupt(format!("implausible shape length {shape_len}")));
    }
    let mut shape = Vec::with_capacity(shape_len);
    for _ in 0..shape_len {
        shape.push(r.u64()? as usize);
    }
    let mut layers = Vec::with_capacity(shape_len - 1);
    for w in shape.windows(2) {
        let (n_in, n_out) = (w[0], w[1]);
        match kind {
            NetworkKind::Kan => {
                let lo = r.f64()?;
                let hi = r.f64()?;
                let segments = r.u32()? as usize;
                let order = r.u32()? as usize;
                let grid = SplineGrid::new(lo, hi, segments, order)?;
                let coeffs = r.array(n_in * n_out * grid.basis_count())?;
                let base = r.array(n_in * n_out)?;
                layers.push(Layer::Kan(KanLayer::from_parts(n_in, n_out, grid, coeffs, base)?));
            }
            NetworkKind::Mlp => {
                let act = activation_from_code(r.u8()?)?;
                let weights = r.array(n_in * n_out)?;
                let bias = r.array(n_out)?;
                layers.push(Layer::Mlp(MlpLayer::from_parts(n_in, n_out, weights, bias, act)?));
            }
        }
    }
    let net = Network::from_parts(kind, shape, layers)?;
    let adam = match r.u8()? {
        0 => None,
        1 => {
            let step = r.u64()?;
            let params = AdamParams {
                lr: r.f64()?,
                beta1: r.f64()?,
                beta2: r.f64()?,
                epsilon: r.f64()?,
            };
            let m = r.array_with_len()?;
            let v = r.array_with_len()?;
            if m.len() != net.param_count() || v.len() != net.param_count() {
                return Err(NetError::ShapeMismatch(
                    "optimizer moments do not match parameter count".into(),
                ));
            }
            Some(AdamState::from_parts(params, step, m, v))
        }
        other => return Err(NetError::Corrupt(format!("bad optimizer flag {other}"))),
    };
    if r.pos != bytes.len() {
        return Err(NetError::Corrupt(format!("{} trailing bytes", bytes.len() - r.pos)));
    }
    Ok((net, adam))
}

fn activation_code(a: Activation) -> u8 {
    match a {
        Activation::Relu => 0,
        Activation::LeakyRelu => 1,
        Activation::Elu => 2,
        Activation::Identity => 3,
    }
}

fn activation_from_code(code: u8) -> Result<Activation, NetError> {
    Ok(match code {
        0 => Activation::Relu,
        1 => Activation::LeakyRelu,
        2 => Activation::Elu,
        3 => Activation::Identity,
        other => return Err(NetError::Corrupt(format!("unknown activation code {other}"))),
    })
}

fn put_u32(out: &mut Vec<u8>, v: u32) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_u64(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_f64(out: &mut Vec<u8>, v: f64) {
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_array(out: &mut Vec<u8>, values: &[f64]) {
    put_u64(out, values.len() as u64);
    for &v in values {
        put_f64(out, v);
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], NetError> {
        if self.pos + n > self.bytes.len() {
            return Err(NetError::Corrupt("truncated checkpoint".into()));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, NetError> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32, NetError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, NetError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64, NetError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn array(&mut self, expected: usize) -> Result<Vec<f64>, NetError> {
        let len = self.u64()? as usize;
        if len != expected {
            return Err(NetError::ShapeMismatch(format!(
                "parameter array has {len} entries, header shape implies {expected}"
            )));
        }
        (0..len).map(|_| self.f64()).collect()
    }

    fn array_with_len(&mut self) -> Result<Vec<f64>, NetError> {
        let len = self.u64()? as usize;
        if len > self.bytes.len() / 8 + 1 {
            return Err(NetError::Corrupt("array length exceeds file size".into()));
        }
        (0..len).map(|_| self.f64()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nets::network::KanSettings;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn roundtrip_preserves_forward_outputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let net = Network::new_kan(&[6, 4, 3], KanSettings { grid_size: 4, spline_order: 3 }, &mut rng)
            .unwrap();
        let adam = AdamState::new(net.param_count(), 1e-3);
        let bytes = encode(&net, Some(&adam));
        let (loaded, loaded_adam) = decode(&bytes).unwrap();
        assert_eq!(net, loaded);
        assert_eq!(Some(adam), loaded_adam);
        for _ in 0..100 {
            let x: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
            assert_eq!(net.infer(&x).unwrap(), loaded.infer(&x).unwrap());
        }
    }

    #[test]
    fn roundtrip_is_byte_stable() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let net = Network::new_mlp(&[5, 3, 2], Activation::Elu, &mut rng).unwrap();
        let bytes = encode(&net, None);
        let (loaded, _) = decode(&bytes).unwrap();
        assert_eq!(bytes, encode(&loaded, None));
    }

    #[test]
    fn tampered_shape_header_is_an_explicit_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let net = Network::new_mlp(&[5, 3, 2], Activation::Relu, &mut rng).unwrap();
        let mut bytes = encode(&net, None);
        // first shape entry lives right after magic+version+kind+shape_len
        let off = 8 + 4 + 1 + 4;
        bytes[off..off + 8].copy_from_slice(&7u64.to_le_bytes());
        match decode(&bytes) {
            Err(NetError::ShapeMismatch(_)) => {}
            other => panic!("expected shape mismatch, got {other:?}"),
        }
    }

    #[test]
    fn legacy_version_is_an_explicit_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let net = Network::new_mlp(&[2, 2], Activation::Relu, &mut rng).unwrap();
        let mut bytes = encode(&net, None);
        bytes[8..12].copy_from_slice(&99u32.to_le_bytes());
        match decode(&bytes) {
            Err(NetError::UnsupportedVersion(99)) => {}
            other => panic!("expected version error, got {other:?}"),
        }
        bytes[0] = b'X';
        assert!(matches!(decode(&bytes), Err(NetError::BadMagic)));
    }
}

//! Binary cache for [`TransferOperators`].
//!
//! Layout (little endian): magic `ATTOTOPS`, format version `u32`, key `[u8; 32]`,
//! element count `u64`, source count `u64`, reflector Lambertian order `f64`, then `rho`,
//! `H` (row-major), every `t` and every exact kernel as `f64`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use sha2::{Digest, Sha256};

use super::mesh::{Room, SurfaceMesh};
use super::operators::TransferOperators;
use super::Source;
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAGIC: &[u8; 8] = b"ATTOTOPS";
pub const CACHE_VERSION: u32 = 1;

/// Hash of everything the operators depend on.
pub fn operator_cache_key<T: Real>(
    room: &Room<T>,
    mesh: &SurfaceMesh<T>,
    sources: &[Source<T>],
    lambert_m_reflect: T,
) -> [u8; 32] {
    let mut h = Sha256::new();
    let mut put = |v: T| h.update(v.as_f64().to_le_bytes());
    for v in [
        room.width,
        room.depth,
        room.height,
        room.rho_wall,
        room.rho_ceiling,
        room.rho_floor,
        mesh.patch_size,
        lambert_m_reflect,
    ] {
        put(v);
    }
    put(T::of(mesh.len() as f64));
    for s in sources {
        for v in [
            s.position.x,
            s.position.y,
            s.position.z,
            s.normal.x,
            s.normal.y,
            s.normal.z,
            s.lambert_m,
        ] {
            put(v);
        }
    }
    h.finalize().into()
}

fn write_slice<W: Write, T: Real>(w: &mut W, xs: &[T]) -> Result<()> {
    for x in xs {
        w.write_f64::<LittleEndian>(x.as_f64())?;
    }
    Ok(())
}

fn read_vec<R: Read, T: Real>(r: &mut R, n: usize) -> Result<Vec<T>> {
    (0..n)
        .map(|_| Ok(T::of(r.read_f64::<LittleEndian>()?)))
        .collect()
}

pub fn save_operators<T: Real>(
    path: &Path,
    key: &[u8; 32],
    ops: &TransferOperators<T>,
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_u32::<LittleEndian>(CACHE_VERSION)?;
    w.write_all(key)?;
    w.write_u64::<LittleEndian>(ops.n_e as u64)?;
    w.write_u64::<LittleEndian>(ops.t_by_source.len() as u64)?;
    w.write_f64::<LittleEndian>(ops.lambert_m_reflect.as_f64())?;
    write_slice(&mut w, &ops.rho)?;
    write_slice(&mut w, &ops.h)?;
    for t in &ops.t_by_source {
        write_slice(&mut w, t)?;
    }
    for k in &ops.kernel_by_source {
        write_slice(&mut w, k)?;
    }
    w.flush()?;
    Ok(())
}

/// Loads cached operators; `Ok(None)` when the file exists but was written for another key.
pub fn load_operators<T: Real>(
    path: &Path,
    key: &[u8; 32],
) -> Result<Option<TransferOperators<T>>> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Cache("not an operator cache file".into()));
    }
    let version = r.read_u32::<LittleEndian>()?;
    if version != CACHE_VERSION {
        return Err(Error::Cache(format!(
            "unsupported cache version {version}, expected {CACHE_VERSION}"
        )));
    }
    let mut stored = [0u8; 32];
    r.read_exact(&mut stored)?;
    if &stored != key {
        return Ok(None);
    }
    let n = r.read_u64::<LittleEndian>()? as usize;
    let s = r.read_u64::<LittleEndian>()? as usize;
    let m = T::of(r.read_f64::<LittleEndian>()?);
    let rho = read_vec(&mut r, n)?;
    let h = read_vec(&mut r, n * n)?;
    let t_by_source = (0..s).map(|_| read_vec(&mut r, n)).collect::<Result<_>>()?;
    let kernel_by_source = (0..s).map(|_| read_vec(&mut r, n)).collect::<Result<_>>()?;
    Ok(Some(TransferOperators {
        n_e: n,
        h,
        rho,
        lambert_m_reflect: m,
        t_by_source,
        kernel_by_source,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{assemble_operators, build_mesh};
    use crate::geometry::Vec3;

    #[test]
    fn round_trip_and_key_mismatch() {
        let room = Room::<f64>::office();
        let mesh = build_mesh(&room, 1.0, 4096).unwrap();
        let src =
            vec![Source::ceiling(Vec3::new(2.0, 2.0, 3.0), 60f64.to_radians(), 10.0).unwrap()];
        let ops = assemble_operators(&mesh, &src, 1.0).unwrap();
        let key = operator_cache_key(&room, &mesh, &src, 1.0);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ops.bin");
        save_operators(&path, &key, &ops).unwrap();
        let back: TransferOperators<f64> = load_operators(&path, &key).unwrap().unwrap();
        assert_eq!(back, ops);

        let other = operator_cache_key(&room.with_reflectivity(0.5), &mesh, &src, 1.0);
        assert_ne!(other, key);
        assert!(load_operators::<f64>(&path, &other).unwrap().is_none());

        std::fs::write(&path, b"garbage!").unwrap();
        assert!(load_operators::<f64>(&path, &key).is_err());
    }
}

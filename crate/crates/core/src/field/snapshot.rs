//! Field snapshot container, version 1.
//!
//! All integers and floats are little-endian:
//!
//! ```text
//! offset  size        content
//! 0       8           magic  b"KZFIELD\x01"
//! 8       4           u32    dimension n (1..=3)
//! 12      4           u32    origin_centered (0 or 1)
//! 16      8n          f64    box lengths L_1..L_n
//! ..      8n          u64    point counts N_1..N_n
//! ..      8           u64    sample count N_1*...*N_n
//! ..      8*count     f64    samples, row-major (last axis fastest)
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};

use super::{Field, Grid};

pub const MAGIC: &[u8; 8] = b"KZFIELD\x01";

pub fn write_snapshot<W: Write>(mut w: W, field: &Field) -> Result<()> {
    let g = field.grid();
    w.write_all(MAGIC)?;
    w.write_all(&(g.dims() as u32).to_le_bytes())?;
    w.write_all(&(g.origin_centered() as u32).to_le_bytes())?;
    for &l in g.lengths() {
        w.write_all(&l.to_le_bytes())?;
    }
    for &n in g.points() {
        w.write_all(&(n as u64).to_le_bytes())?;
    }
    w.write_all(&(g.len() as u64).to_le_bytes())?;
    for &v in field.values() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    Ok(f64::from_bits(read_u64(r)?))
}

/// Reads a snapshot, building a fresh grid from its header.
pub fn read_snapshot<R: Read>(mut r: R) -> Result<Field> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Snapshot("bad magic".into()));
    }
    let dims = read_u32(&mut r)? as usize;
    if !(1..=3).contains(&dims) {
        return Err(Error::Snapshot(format!("dimension {dims}")));
    }
    let centered = match read_u32(&mut r)? {
        0 => false,
        1 => true,
        x => return Err(Error::Snapshot(format!("centered flag {x}"))),
    };
    let lengths = (0..dims)
        .map(|_| read_f64(&mut r))
        .collect::<Result<Vec<_>>>()?;
    let points = (0..dims)
        .map(|_| read_u64(&mut r).map(|n| n as usize))
        .collect::<Result<Vec<_>>>()?;
    let grid = Arc::new(Grid::new(&lengths, &points, centered)?);
    let count = read_u64(&mut r)? as usize;
    if count != grid.len() {
        return Err(Error::Snapshot(format!(
            "sample count {count} does not match grid ({})",
            grid.len()
        )));
    }
    let values = (0..count)
        .map(|_| read_f64(&mut r))
        .collect::<Result<Vec<_>>>()?;
    Field::from_values(&grid, values)
}

/// Reads a snapshot and re-homes it on `grid`, which must match the header.
pub fn read_snapshot_on<R: Read>(r: R, grid: &Arc<Grid>) -> Result<Field> {
    let f = read_snapshot(r)?;
    if **f.grid() != **grid {
        return Err(Error::GridMismatch);
    }
    Ok(Field::from_raw(grid, f.into_values()))
}

pub fn save(path: impl AsRef<Path>, field: &Field) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_snapshot(&mut w, field)?;
    w.flush()?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<Field> {
    read_snapshot(BufReader::new(File::open(path)?))
}

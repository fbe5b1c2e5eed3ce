//! Little-endian binary serialization.
//!
//! Vector trains: magic `TTV1`, `u32` core count, then per core the `u32`
//! triple `(r_left, n, r_right)` followed by `r_left * n * r_right` `f64`
//! values in row-major order. Operators use magic `TTM1` and the quadruple
//! `(r_left, rows, cols, r_right)`.

use std::io::{Read, Write};

use super::{Core, MatCore, TensorTrain, TtMatrix};
use crate::error::{Error, Result};

const TT_MAGIC: &[u8; 4] = b"TTV1";
const TTM_MAGIC: &[u8; 4] = b"TTM1";

pub fn write_tt<W: Write>(tt: &TensorTrain, mut w: W) -> Result<()> {
    w.write_all(TT_MAGIC)?;
    write_u32(&mut w, tt.num_cores())?;
    for c in tt.cores() {
        write_u32(&mut w, c.left())?;
        write_u32(&mut w, c.size())?;
        write_u32(&mut w, c.right())?;
        write_f64s(&mut w, c.data())?;
    }
    Ok(())
}

pub fn read_tt<R: Read>(mut r: R) -> Result<TensorTrain> {
    expect_magic(&mut r, TT_MAGIC)?;
    let d = read_u32(&mut r)?;
    let mut cores = Vec::with_capacity(d.min(1 << 16));
    for _ in 0..d {
        let left = read_u32(&mut r)?;
        let n = read_u32(&mut r)?;
        let right = read_u32(&mut r)?;
        let data = read_f64s(&mut r, checked_len(&[left, n, right])?)?;
        cores.push(Core::new(left, n, right, data)?);
    }
    TensorTrain::new(cores)
}

pub fn write_ttm<W: Write>(m: &TtMatrix, mut w: W) -> Result<()> {
    w.write_all(TTM_MAGIC)?;
    write_u32(&mut w, m.num_cores())?;
    for c in m.cores() {
        write_u32(&mut w, c.left())?;
        write_u32(&mut w, c.rows())?;
        write_u32(&mut w, c.cols())?;
        write_u32(&mut w, c.right())?;
        write_f64s(&mut w, c.data())?;
    }
    Ok(())
}

pub fn read_ttm<R: Read>(mut r: R) -> Result<TtMatrix> {
    expect_magic(&mut r, TTM_MAGIC)?;
    let d = read_u32(&mut r)?;
    let mut cores = Vec::with_capacity(d.min(1 << 16));
    for _ in 0..d {
        let left = read_u32(&mut r)?;
        let rows = read_u32(&mut r)?;
        let cols = read_u32(&mut r)?;
        let right = read_u32(&mut r)?;
        let data = read_f64s(&mut r, checked_len(&[left, rows, cols, right])?)?;
        cores.push(MatCore::new(left, rows, cols, right, data)?);
    }
    TtMatrix::new(cores)
}

fn expect_magic<R: Read>(r: &mut R, magic: &[u8; 4]) -> Result<()> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    if &buf != magic {
        return Err(Error::Format(format!(
            "bad magic {:?}, expected {:?}",
            String::from_utf8_lossy(&buf),
            String::from_utf8_lossy(magic)
        )));
    }
    Ok(())
}

fn checked_len(extents: &[usize]) -> Result<usize> {
    extents
        .iter()
        .try_fold(1usize, |acc, &e| acc.checked_mul(e))
        .filter(|&n| n <= 1 << 32)
        .ok_or_else(|| Error::Format(format!("core extents {extents:?} are implausibly large")))
}

fn write_u32<W: Write>(w: &mut W, v: usize) -> Result<()> {
    let v = u32::try_from(v).map_err(|_| Error::Format(format!("{v} does not fit in u32")))?;
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<usize> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf) as usize)
}

fn write_f64s<W: Write>(w: &mut W, data: &[f64]) -> Result<()> {
    let mut buf = Vec::with_capacity(data.len() * 8);
    for x in data {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

fn read_f64s<R: Read>(r: &mut R, n: usize) -> Result<Vec<f64>> {
    let mut buf = vec![0u8; n * 8];
    r.read_exact(&mut buf)?;
    Ok(buf
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect())
}

//! Binary SPF cache.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! "ALSV" | 0x01 | limit: u64 | spf(2) .. spf(limit): u32 each
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

use super::table::{FactorTable, MAX_TABLE_LIMIT};

pub const CACHE_MAGIC: &[u8; 4] = b"ALSV";
pub const CACHE_VERSION: u8 = 0x01;
const HEADER_LEN: u64 = 4 + 1 + 8;

impl FactorTable {
    pub fn write_cache<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&[CACHE_VERSION])?;
        w.write_all(&self.limit().to_le_bytes())?;
        for &s in &self.raw()[2..] {
            w.write_all(&s.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_cache<R: Read>(mut r: R) -> Result<Self> {
        let mut header = [0u8; HEADER_LEN as usize];
        r.read_exact(&mut header)
            .map_err(|_| Error::Cache("truncated header".into()))?;
        if &header[..4] != CACHE_MAGIC {
            return Err(Error::Cache("bad magic".into()));
        }
        if header[4] != CACHE_VERSION {
            return Err(Error::Cache(format!("unsupported version {}", header[4])));
        }
        let limit = u64::from_le_bytes(header[5..13].try_into().unwrap());
        if !(2..=MAX_TABLE_LIMIT).contains(&limit) {
            return Err(Error::Cache(format!("limit {limit} out of range")));
        }

        let mut spf = vec![0u32; limit as usize + 1];
        let mut buf = [0u8; 4];
        for (n, slot) in spf.iter_mut().enumerate().skip(2) {
            r.read_exact(&mut buf)
                .map_err(|_| Error::Cache(format!("truncated at entry {n}")))?;
            *slot = u32::from_le_bytes(buf);
        }
        if r.read(&mut buf)? != 0 {
            return Err(Error::Cache("trailing bytes".into()));
        }
        validate(&spf)?;
        Ok(FactorTable::from_raw(limit, spf))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write_cache(BufWriter::new(File::create(path)?))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_cache(BufReader::new(File::open(path)?))
    }
}

/// Every entry must be a self-marked divisor of `n`, and every self-marked
/// `p <= sqrt(limit)` must bound the entries of all its multiples. Together
/// these force self-marked entries to be exactly the primes and each entry to
/// be the smallest prime factor.
fn validate(spf: &[u32]) -> Result<()> {
    let limit = spf.len() - 1;
    let bad = |n: usize| {
        Err(Error::Cache(format!(
            "entry for n = {n} is not its smallest prime factor"
        )))
    };
    for n in 2..=limit {
        let p = spf[n] as usize;
        if p < 2 || p > n || n % p != 0 || spf[p] as usize != p {
            return bad(n);
        }
    }
    let mut p = 2usize;
    while p * p <= limit {
        if spf[p] as usize == p {
            for m in (p * p..=limit).step_by(p) {
                if spf[m] as usize > p {
                    return bad(m);
                }
            }
        }
        p += 1;
    }
    Ok(())
}

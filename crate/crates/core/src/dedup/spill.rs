//! On-disk formats for signatures and band postings.
//!
//! Signature file: magic `MHSG1`, `u32` hash count, then per record a `u32`
//! id length, the UTF-8 id and that many `u64` values. Posting file: magic
//! `MHPS1`, then `(u64 key, u32 item)` pairs sorted ascending. All integers are
//! little-endian. Sorted posting runs are merged with a k-way heap merge.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, ErrorKind, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use super::{DedupError, MinHashSignature};

const SIG_MAGIC: &[u8; 5] = b"MHSG1";
const POST_MAGIC: &[u8; 5] = b"MHPS1";
/// Postings per sorted run before it is written out.
pub const RUN_LEN: usize = 1 << 20;

fn err(e: impl std::fmt::Display) -> DedupError {
    DedupError::Spill(e.to_string())
}

fn read_u32<R: Read>(r: &mut R) -> io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn check_magic<R: Read>(r: &mut R, magic: &[u8; 5]) -> Result<(), DedupError> {
    let mut m = [0u8; 5];
    r.read_exact(&mut m).map_err(err)?;
    if &m != magic {
        return Err(err(format!("bad magic {:?}", String::from_utf8_lossy(&m))));
    }
    Ok(())
}

pub fn write_signatures<W: Write>(mut w: W, num_hashes: usize, sigs: &[MinHashSignature]) -> Result<(), DedupError> {
    w.write_all(SIG_MAGIC).map_err(err)?;
    w.write_all(&(num_hashes as u32).to_le_bytes()).map_err(err)?;
    for s in sigs {
        if s.values.len() != num_hashes {
            return Err(err(format!("signature {} has {} values", s.doc_id, s.values.len())));
        }
        w.write_all(&(s.doc_id.len() as u32).to_le_bytes()).map_err(err)?;
        w.write_all(s.doc_id.as_bytes()).map_err(err)?;
        for v in &s.values {
            w.write_all(&v.to_le_bytes()).map_err(err)?;
        }
    }
    w.flush().map_err(err)
}

pub fn read_signatures<R: Read>(mut r: R) -> Result<Vec<MinHashSignature>, DedupError> {
    check_magic(&mut r, SIG_MAGIC)?;
    let n = read_u32(&mut r).map_err(err)? as usize;
    let mut out = Vec::new();
    loop {
        let len = match read_u32(&mut r) {
            Ok(l) => l as usize,
            Err(e) if e.kind() == ErrorKind::UnexpectedEof => return Ok(out),
            Err(e) => return Err(err(e)),
        };
        let mut id = vec![0u8; len];
        r.read_exact(&mut id).map_err(err)?;
        let values = (0..n).map(|_| read_u64(&mut r)).collect::<io::Result<Vec<_>>>().map_err(err)?;
        out.push(MinHashSignature { doc_id: String::from_utf8(id).map_err(err)?, values });
    }
}

/// Writes one sorted run.
pub fn write_postings<W: Write>(mut w: W, postings: &[(u64, u32)]) -> Result<(), DedupError> {
    debug_assert!(postings.windows(2).all(|p| p[0] <= p[1]));
    w.write_all(POST_MAGIC).map_err(err)?;
    for (k, i) in postings {
        w.write_all(&k.to_le_bytes()).map_err(err)?;
        w.write_all(&i.to_le_bytes()).map_err(err)?;
    }
    w.flush().map_err(err)
}

/// Streaming reader over one posting run.
pub struct PostingReader<R> {
    inner: R,
}

impl<R: Read> PostingReader<R> {
    pub fn new(mut inner: R) -> Result<Self, DedupError> {
        check_magic(&mut inner, POST_MAGIC)?;
        Ok(PostingReader { inner })
    }
}

impl<R: Read> Iterator for PostingReader<R> {
    type Item = Result<(u64, u32), DedupError>;

    fn next(&mut self) -> Option<Self::Item> {
        let k = match read_u64(&mut self.inner) {
            Ok(k) => k,
            Err(e) if e.kind() == ErrorKind::UnexpectedEof => return None,
            Err(e) => return Some(Err(err(e))),
        };
        Some(read_u32(&mut self.inner).map(|i| (k, i)).map_err(err))
    }
}

/// Merges sorted runs into one ascending stream.
pub fn merge_runs<I>(runs: Vec<I>) -> Result<Vec<(u64, u32)>, DedupError>
where
    I: Iterator<Item = Result<(u64, u32), DedupError>>,
{
    let mut runs = runs;
    let mut heap = BinaryHeap::new();
    for (r, run) in runs.iter_mut().enumerate() {
        if let Some(p) = run.next() {
            heap.push(Reverse((p?, r)));
        }
    }
    let mut out = Vec::new();
    while let Some(Reverse((p, r))) = heap.pop() {
        out.push(p);
        if let Some(next) = runs[r].next() {
            heap.push(Reverse((next?, r)));
        }
    }
    Ok(out)
}

fn run_path(dir: &Path, n: usize) -> PathBuf {
    static COUNTER: AtomicU64 = AtomicU64::new(0);
    let c = COUNTER.fetch_add(1, Ordering::Relaxed);
    dir.join(format!("postings-{}-{c}-{n}.bin", std::process::id()))
}

/// Sorts `postings` in runs of [`RUN_LEN`], spills each run to `dir`, and
/// merges them back. Run files are removed afterwards.
pub fn roundtrip_postings(dir: &Path, mut postings: Vec<(u64, u32)>) -> Result<Vec<(u64, u32)>, DedupError> {
    std::fs::create_dir_all(dir).map_err(err)?;
    let mut paths = Vec::new();
    for (n, chunk) in postings.chunks_mut(RUN_LEN).enumerate() {
        chunk.sort_unstable();
        let p = run_path(dir, n);
        write_postings(BufWriter::new(File::create(&p).map_err(err)?), chunk)?;
        paths.push(p);
    }
    drop(postings);
    let readers = paths
        .iter()
        .map(|p| PostingReader::new(BufReader::new(File::open(p).map_err(err)?)))
        .collect::<Result<Vec<_>, _>>()?;
    let merged = merge_runs(readers);
    for p in &paths {
        let _ = std::fs::remove_file(p);
    }
    merged
}

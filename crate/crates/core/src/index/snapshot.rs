//! Little-endian binary snapshot of an [`LshIndex`].
//!
//! ```text
//! magic            8 bytes  "JLSHIDX1"
//! descriptor_len   u32
//! descriptor       UTF-8    family descriptor ("family=... dim=... seed=...")
//! r                u32
//! b                u32
//! seed             u64      index seed
//! n                u64      point count
//! dim              u32
//! points           n x { id u64, dim x f64 }
//! tables           b x {
//!     table_id       u32
//!     minhash index  r x u64
//!     bucket_count   u64
//!     buckets        bucket_count x { key u64, len u32, len x id u64 }
//! }
//! ```
//!
//! Buckets are written in ascending key order and ids in insertion order, so
//! equal indexes produce identical bytes. Minhash functions are rebuilt from
//! the descriptor and the stored indices on load.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::amplify::AmplifiedScheme;
use crate::error::{LshError, Result};
use crate::families::MinhashFamily;
use crate::index::{CompoundKey, LshIndex, LshTable};
use crate::seed::Seed;
use crate::vector::RealVector;

const MAGIC: &[u8; 8] = b"JLSHIDX1";

pub fn write_snapshot<W: Write>(index: &LshIndex, out: &mut W) -> Result<()> {
    out.write_all(MAGIC)?;
    let descriptor = index.family.descriptor();
    out.write_all(&(descriptor.len() as u32).to_le_bytes())?;
    out.write_all(descriptor.as_bytes())?;
    out.write_all(&index.scheme.r.to_le_bytes())?;
    out.write_all(&index.scheme.b.to_le_bytes())?;
    out.write_all(&index.seed.0.to_le_bytes())?;
    out.write_all(&(index.ids.len() as u64).to_le_bytes())?;
    out.write_all(&(index.dim() as u32).to_le_bytes())?;
    for (id, v) in index.ids.iter().zip(&index.vectors) {
        out.write_all(&id.to_le_bytes())?;
        for c in v.as_slice() {
            out.write_all(&c.to_le_bytes())?;
        }
    }
    for table in &index.tables {
        out.write_all(&table.table_id.to_le_bytes())?;
        for i in &table.minhash_indices {
            out.write_all(&i.to_le_bytes())?;
        }
        let mut keys: Vec<&CompoundKey> = table.buckets.keys().collect();
        keys.sort_unstable();
        out.write_all(&(keys.len() as u64).to_le_bytes())?;
        for key in keys {
            let slots = &table.buckets[key];
            out.write_all(&key.0.to_le_bytes())?;
            out.write_all(&(slots.len() as u32).to_le_bytes())?;
            for &s in slots {
                out.write_all(&index.ids[s as usize].to_le_bytes())?;
            }
        }
    }
    Ok(())
}

pub fn save_snapshot(index: &LshIndex, path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_snapshot(index, &mut out)?;
    out.flush()?;
    Ok(())
}

struct Cursor<R> {
    inner: R,
    offset: u64,
}

impl<R: Read> Cursor<R> {
    fn bytes<const N: usize>(&mut self, what: &str) -> Result<[u8; N]> {
        let mut buf = [0u8; N];
        self.inner.read_exact(&mut buf).map_err(|e| match e.kind() {
            std::io::ErrorKind::UnexpectedEof => {
                LshError::format(self.offset, format!("snapshot truncated reading {what}"))
            }
            _ => LshError::Io(e),
        })?;
        self.offset += N as u64;
        Ok(buf)
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes(what)?))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes(what)?))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.bytes(what)?))
    }
}

pub fn read_snapshot<R: Read>(input: R) -> Result<LshIndex> {
    let mut cur = Cursor {
        inner: input,
        offset: 0,
    };
    if &cur.bytes::<8>("magic")? != MAGIC {
        return Err(LshError::format(0, "not an index snapshot (bad magic)"));
    }
    let len = cur.u32("descriptor length")? as usize;
    let at = cur.offset;
    let mut text = vec![0u8; len];
    cur.inner
        .read_exact(&mut text)
        .map_err(|_| LshError::format(at, "snapshot truncated reading descriptor"))?;
    cur.offset += len as u64;
    let text = String::from_utf8(text)
        .map_err(|_| LshError::format(at, "descriptor is not UTF-8"))?;
    let family = MinhashFamily::from_descriptor(&text).map_err(|e| LshError::format(at, e.to_string()))?;
    let at = cur.offset;
    let scheme = AmplifiedScheme::new(cur.u32("r")?, cur.u32("b")?)
        .map_err(|e| LshError::format(at, e.to_string()))?;
    let seed = Seed(cur.u64("seed")?);
    let n = cur.u64("point count")?;
    let at = cur.offset;
    let dim = cur.u32("dim")? as usize;
    if dim != family.input_dim() {
        return Err(LshError::format(
            at,
            format!("dim {dim} disagrees with family dimension {}", family.input_dim()),
        ));
    }

    let mut ids = Vec::with_capacity(n.min(1 << 24) as usize);
    let mut vectors = Vec::with_capacity(ids.capacity());
    let mut slot_of = HashMap::with_capacity(ids.capacity());
    for slot in 0..n {
        let at = cur.offset;
        let id = cur.u64("point id")?;
        if slot_of.insert(id, slot as u32).is_some() {
            return Err(LshError::format(at, format!("duplicate point id {id}")));
        }
        let comps = (0..dim)
            .map(|_| cur.f64("point component"))
            .collect::<Result<Vec<_>>>()?;
        ids.push(id);
        vectors.push(RealVector::new(comps).map_err(|e| LshError::format(at, e.to_string()))?);
    }

    let mut tables = Vec::with_capacity(scheme.b as usize);
    for t in 0..scheme.b {
        let at = cur.offset;
        let table_id = cur.u32("table id")?;
        if table_id != t {
            return Err(LshError::format(at, format!("expected table {t}, found {table_id}")));
        }
        let indices = (0..scheme.r)
            .map(|_| cur.u64("minhash index"))
            .collect::<Result<Vec<_>>>()?;
        let mut table = LshTable::new(table_id, indices, &family);
        let buckets = cur.u64("bucket count")?;
        let mut stored = 0u64;
        for _ in 0..buckets {
            let key = CompoundKey(cur.u64("bucket key")?);
            let len = cur.u32("bucket length")?;
            let mut slots = Vec::with_capacity(len as usize);
            for _ in 0..len {
                let at = cur.offset;
                let id = cur.u64("bucket id")?;
                let slot = *slot_of
                    .get(&id)
                    .ok_or_else(|| LshError::format(at, format!("bucket names unknown id {id}")))?;
                slots.push(slot);
            }
            stored += u64::from(len);
            table.buckets.insert(key, slots);
        }
        if stored != n {
            return Err(LshError::format(
                cur.offset,
                format!("table {t} stores {stored} ids, expected {n}"),
            ));
        }
        tables.push(table);
    }
    let mut probe = [0u8; 1];
    if cur.inner.read(&mut probe)? != 0 {
        return Err(LshError::format(cur.offset, "trailing bytes after snapshot"));
    }
    Ok(LshIndex {
        family,
        scheme,
        seed,
        ids,
        vectors,
        tables,
    })
}

pub fn load_snapshot(path: impl AsRef<Path>) -> Result<LshIndex> {
    read_snapshot(BufReader::new(File::open(path)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Dataset;
    use crate::families::FamilyKind;
    use crate::sample::sample_unit_vector;
    use crate::vector::DistanceKind;

    fn small_index(kind: FamilyKind) -> LshIndex {
        let vectors = (0..200)
            .map(|i| sample_unit_vector(12, Seed(4).derive(i)).unwrap())
            .collect();
        let ids = (0..200).map(|i| 1000 + 7 * i).collect();
        let data = Dataset::new(ids, vectors).unwrap();
        let family = MinhashFamily::new(kind, 12, Seed(6)).unwrap();
        LshIndex::build(&data, family, AmplifiedScheme::new(2, 3).unwrap(), Seed(9)).unwrap()
    }

    #[test]
    fn round_trip_reproduces_queries_and_bytes() {
        for kind in FamilyKind::table1_defaults() {
            let idx = small_index(kind);
            let mut bytes = Vec::new();
            write_snapshot(&idx, &mut bytes).unwrap();
            let loaded = read_snapshot(bytes.as_slice()).unwrap();
            let mut again = Vec::new();
            write_snapshot(&loaded, &mut again).unwrap();
            assert_eq!(bytes, again);
            for s in 0..20 {
                let q = sample_unit_vector(12, Seed(77).derive(s)).unwrap();
                let a = idx.query_knn(&q, 5, DistanceKind::Angular).unwrap();
                let b = loaded.query_knn(&q, 5, DistanceKind::Angular).unwrap();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn truncation_is_a_format_error() {
        let idx = small_index(FamilyKind::Voronoi { t: 4 });
        let mut bytes = Vec::new();
        write_snapshot(&idx, &mut bytes).unwrap();
        for cut in [3, 20, bytes.len() / 2, bytes.len() - 1] {
            assert!(matches!(
                read_snapshot(&bytes[..cut]),
                Err(LshError::Format { .. })
            ));
        }
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(
            read_snapshot(bad.as_slice()),
            Err(LshError::Format { offset: 0, .. })
        ));
        bytes.push(0);
        assert!(read_snapshot(bytes.as_slice()).is_err());
    }
}

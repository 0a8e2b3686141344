//! Multi-table LSH index.
//!
//! Each of the `b` tables owns `r` minhash functions. A point's key in a
//! table is the order-sensitive mix of its `r` minhash values, so one hash
//! map lookup finds exactly the points whose `r` values all match the query's
//! (the AND construction). Candidates are the union over tables (the OR
//! construction) and are then verified with exact distances.

mod snapshot;

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::amplify::AmplifiedScheme;
use crate::dataset::Dataset;
use crate::error::{LshError, Result};
use crate::families::{MinhashFamily, MinhashFunction};
use crate::ops::NoCount;
use crate::seed::{combine, Seed};
use crate::vector::{distance, DistanceKind, RealVector};

pub use snapshot::{load_snapshot, read_snapshot, save_snapshot, write_snapshot};

const KEY_BASIS: u64 = 0x6a09_e667_f3bc_c909;

/// Table key derived from the `r` minhash values of a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CompoundKey(pub u64);

impl CompoundKey {
    pub fn from_values(values: impl IntoIterator<Item = u64>) -> Self {
        CompoundKey(values.into_iter().fold(KEY_BASIS, combine))
    }
}

/// One hash table: its minhash indices and key -> point slots.
#[derive(Debug, Clone)]
pub struct LshTable {
    table_id: u32,
    minhash_indices: Vec<u64>,
    functions: Vec<MinhashFunction>,
    buckets: HashMap<CompoundKey, Vec<u32>>,
}

impl LshTable {
    fn new(table_id: u32, minhash_indices: Vec<u64>, family: &MinhashFamily) -> Self {
        let functions = minhash_indices.iter().map(|&i| family.function(i)).collect();
        LshTable {
            table_id,
            minhash_indices,
            functions,
            buckets: HashMap::new(),
        }
    }

    pub fn table_id(&self) -> u32 {
        self.table_id
    }

    /// Global indices (into the family) of this table's minhash functions.
    pub fn minhash_indices(&self) -> &[u64] {
        &self.minhash_indices
    }

    pub fn bucket_count(&self) -> usize {
        self.buckets.len()
    }

    pub fn key_of(&self, x: &[f64]) -> CompoundKey {
        CompoundKey::from_values(self.functions.iter().map(|f| f.hash_counted(x, &mut NoCount)))
    }
}

/// Work done by one query.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QueryStats {
    /// Distinct candidate points gathered from all tables.
    pub candidates_examined: usize,
    /// Tables whose bucket for the query was non-empty.
    pub tables_hit: usize,
    pub distance_evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub id: u64,
    pub distance: f64,
}

#[derive(Debug, Clone)]
pub struct LshIndex {
    family: MinhashFamily,
    scheme: AmplifiedScheme,
    seed: Seed,
    ids: Vec<u64>,
    vectors: Vec<RealVector>,
    tables: Vec<LshTable>,
}

/// Global minhash index used by slot `j` of table `t`.
pub fn minhash_index(seed: Seed, scheme: &AmplifiedScheme, table: u32, slot: u32) -> u64 {
    seed.derive(u64::from(table) * u64::from(scheme.r) + u64::from(slot)).0
}

impl LshIndex {
    /// Hashes every point into one bucket of each of the `b` tables.
    pub fn build(
        dataset: &Dataset,
        family: MinhashFamily,
        scheme: AmplifiedScheme,
        seed: Seed,
    ) -> Result<Self> {
        if let Some(d) = dataset.dim() {
            LshError::check_dim(family.input_dim(), d)?;
        }
        let mut index = Self::empty_with_tables(family, scheme, seed, |t| {
            (0..scheme.r)
                .map(|j| minhash_index(seed, &scheme, t, j))
                .collect()
        });
        index.ids = dataset.ids().to_vec();
        index.vectors = dataset.vectors().to_vec();
        let keys: Vec<Vec<CompoundKey>> = index
            .vectors
            .par_iter()
            .map(|v| index.tables.iter().map(|t| t.key_of(v.as_slice())).collect())
            .collect();
        for (slot, point_keys) in keys.into_iter().enumerate() {
            for (table, key) in index.tables.iter_mut().zip(point_keys) {
                table.buckets.entry(key).or_default().push(slot as u32);
            }
        }
        Ok(index)
    }

    fn empty_with_tables(
        family: MinhashFamily,
        scheme: AmplifiedScheme,
        seed: Seed,
        indices_for: impl Fn(u32) -> Vec<u64> + Sync,
    ) -> Self {
        let tables = (0..scheme.b)
            .into_par_iter()
            .map(|t| LshTable::new(t, indices_for(t), &family))
            .collect();
        LshIndex {
            family,
            scheme,
            seed,
            ids: Vec::new(),
            vectors: Vec::new(),
            tables,
        }
    }

    pub fn family(&self) -> &MinhashFamily {
        &self.family
    }

    pub fn scheme(&self) -> AmplifiedScheme {
        self.scheme
    }

    pub fn seed(&self) -> Seed {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.family.input_dim()
    }

    pub fn tables(&self) -> &[LshTable] {
        &self.tables
    }

    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    pub fn vectors(&self) -> &[RealVector] {
        &self.vectors
    }

    /// Ids stored in `table` under `key`, in insertion order.
    pub fn bucket(&self, table: usize, key: CompoundKey) -> Vec<u64> {
        self.tables[table]
            .buckets
            .get(&key)
            .map(|slots| slots.iter().map(|&s| self.ids[s as usize]).collect())
            .unwrap_or_default()
    }

    fn candidate_slots(&self, q: &RealVector, tables: usize) -> Result<(Vec<u32>, QueryStats)> {
        LshError::check_dim(self.dim(), q.dim())?;
        let mut seen = vec![false; self.ids.len()];
        let mut slots = Vec::new();
        let mut stats = QueryStats::default();
        for table in self.tables.iter().take(tables) {
            if let Some(bucket) = table.buckets.get(&table.key_of(q.as_slice())) {
                stats.tables_hit += 1;
                for &s in bucket {
                    if !std::mem::replace(&mut seen[s as usize], true) {
                        slots.push(s);
                    }
                }
            }
        }
        stats.candidates_examined = slots.len();
        Ok((slots, stats))
    }

    /// Union over tables of the bucket matching `q`, as ids in ascending order.
    pub fn query_candidates(&self, q: &RealVector) -> Result<(Vec<u64>, QueryStats)> {
        let (slots, stats) = self.candidate_slots(q, self.tables.len())?;
        let mut ids: Vec<u64> = slots.into_iter().map(|s| self.ids[s as usize]).collect();
        ids.sort_unstable();
        Ok((ids, stats))
    }

    /// The `k` nearest candidates of `q` by exact distance, ascending, ties
    /// by id.
    pub fn query_knn(
        &self,
        q: &RealVector,
        k: usize,
        kind: DistanceKind,
    ) -> Result<(Vec<Neighbor>, QueryStats)> {
        self.query_knn_with_tables(q, k, kind, self.tables.len())
    }

    /// As [`LshIndex::query_knn`] but consulting only the first `tables`
    /// tables. Table sets are nested, so candidates grow with `tables`.
    pub fn query_knn_with_tables(
        &self,
        q: &RealVector,
        k: usize,
        kind: DistanceKind,
        tables: usize,
    ) -> Result<(Vec<Neighbor>, QueryStats)> {
        if k == 0 {
            return Err(LshError::domain("k_neighbors must be at least 1"));
        }
        let (slots, mut stats) = self.candidate_slots(q, tables)?;
        let mut found = slots
            .iter()
            .map(|&s| {
                Ok(Neighbor {
                    id: self.ids[s as usize],
                    distance: distance(q, &self.vectors[s as usize], kind)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        stats.distance_evaluations = found.len();
        sort_neighbors(&mut found);
        found.truncate(k);
        Ok((found, stats))
    }

    /// Histogram `bucket size -> number of buckets`, one per table.
    pub fn occupancy_report(&self) -> Vec<BTreeMap<usize, usize>> {
        self.tables
            .iter()
            .map(|t| {
                let mut hist = BTreeMap::new();
                for bucket in t.buckets.values() {
                    *hist.entry(bucket.len()).or_insert(0) += 1;
                }
                hist
            })
            .collect()
    }
}

/// Ascending by distance, then by id.
pub fn sort_neighbors(neighbors: &mut [Neighbor]) {
    neighbors.sort_by(|a, b| a.distance.total_cmp(&b.distance).then(a.id.cmp(&b.id)));
}

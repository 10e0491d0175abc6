use std::collections::BTreeMap;

use xxhash_rust::xxh3::xxh3_64;

use super::{DedupParams, MinHashSignature, UnionFind};
use crate::exec::Exec;

/// One key per band: a hash of the band index and the band's `rows` values.
pub fn bucket_keys(sig: &MinHashSignature, params: &DedupParams) -> Vec<u64> {
    let r = params.rows_per_bucket;
    let mut buf = Vec::with_capacity(4 + 8 * r);
    (0..params.buckets)
        .map(|j| {
            buf.clear();
            buf.extend_from_slice(&(j as u32).to_le_bytes());
            for v in &sig.values[j * r..(j + 1) * r] {
                buf.extend_from_slice(&v.to_le_bytes());
            }
            xxh3_64(&buf)
        })
        .collect()
}

/// Unions every pair of items sharing a key. Postings are `(key, item)`; the
/// result does not depend on their input order.
pub(crate) fn union_postings(postings: &mut Vec<(u64, u32)>, n: usize, exec: Exec) -> UnionFind {
    exec.sort_unstable(postings);
    let mut uf = UnionFind::new(n);
    let mut i = 0;
    while i < postings.len() {
        let (key, first) = postings[i];
        let mut j = i + 1;
        while j < postings.len() && postings[j].0 == key {
            uf.union(first as usize, postings[j].1 as usize);
            j += 1;
        }
        i = j;
    }
    uf
}

/// Duplicate clusters over document ids. Each cluster is represented by its
/// lexicographically smallest id, which is the one kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterMap {
    ids: Vec<String>,
    rep: Vec<u32>,
}

/// Clusters the ids appearing in `postings`, joining ids that share a key.
pub fn cluster(postings: &[(u64, String)]) -> ClusterMap {
    let mut ids: Vec<String> = postings.iter().map(|(_, id)| id.clone()).collect();
    ids.sort_unstable();
    ids.dedup();
    let mut idx: Vec<(u64, u32)> =
        postings.iter().map(|(k, id)| (*k, ids.binary_search(id).expect("id present") as u32)).collect();
    let mut uf = union_postings(&mut idx, ids.len(), Exec::default());
    // ids are sorted, so the smallest index in a set is its smallest id.
    let mut min_of_root = vec![u32::MAX; ids.len()];
    for i in 0..ids.len() {
        let r = uf.find(i);
        min_of_root[r] = min_of_root[r].min(i as u32);
    }
    let rep = (0..ids.len()).map(|i| min_of_root[uf.find(i)]).collect();
    ClusterMap { ids, rep }
}

impl ClusterMap {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn representative(&self, id: &str) -> Option<&str> {
        let i = self.ids.binary_search_by(|p| p.as_str().cmp(id)).ok()?;
        Some(&self.ids[self.rep[i] as usize])
    }

    pub fn is_kept(&self, id: &str) -> bool {
        self.representative(id) == Some(id)
    }

    /// Clusters keyed by representative, members sorted.
    pub fn clusters(&self) -> BTreeMap<&str, Vec<&str>> {
        let mut out: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for (i, id) in self.ids.iter().enumerate() {
            out.entry(self.ids[self.rep[i] as usize].as_str()).or_default().push(id);
        }
        out
    }

    pub fn num_clusters(&self) -> usize {
        self.rep.iter().enumerate().filter(|(i, r)| *i == **r as usize).count()
    }

    pub fn kept(&self) -> impl Iterator<Item = &str> {
        self.ids.iter().enumerate().filter(|(i, _)| self.rep[*i] as usize == *i).map(|(_, s)| s.as_str())
    }
}

use std::collections::{BTreeMap, HashSet};
use std::path::PathBuf;

use super::lsh::union_postings;
use super::{bucket_keys, spill, DedupError, DedupParams, MinHasher};
use crate::exec::Exec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DedupInput<'a> {
    pub id: &'a str,
    pub dump: &'a str,
    pub text: &'a str,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DedupOutcome {
    /// Aligned with the input documents.
    pub keep: Vec<bool>,
    /// Documents too short to shingle; always kept.
    pub bypassed: usize,
    pub clusters: usize,
    pub removed: usize,
}

impl DedupOutcome {
    fn merge(&mut self, other: &DedupOutcome) {
        self.bypassed += other.bypassed;
        self.clusters += other.clusters;
        self.removed += other.removed;
    }
}

/// Runs signature computation (in parallel when the strategy allows) and
/// clustering for the two snapshot policies.
#[derive(Debug, Clone)]
pub struct Deduper {
    hasher: MinHasher,
    exec: Exec,
    spill_dir: Option<PathBuf>,
}

impl Deduper {
    pub fn new(params: DedupParams, exec: Exec) -> Result<Self, DedupError> {
        Ok(Deduper { hasher: MinHasher::new(params)?, exec, spill_dir: None })
    }

    /// Route postings through sorted spill files in `dir` instead of memory.
    pub fn with_spill_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.spill_dir = Some(dir.into());
        self
    }

    pub fn params(&self) -> &DedupParams {
        self.hasher.params()
    }

    /// Band keys for each document, `None` when it has no shingles.
    pub fn band_keys(&self, docs: &[DedupInput]) -> Vec<Option<Vec<u64>>> {
        let params = self.hasher.params();
        self.exec.map(docs, |d| self.hasher.signature_of_text(d.id, d.text).ok().map(|s| bucket_keys(&s, params)))
    }

    /// Clusters within each dump independently.
    pub fn dedup_per_snapshot(&self, docs: &[DedupInput]) -> Result<DedupOutcome, DedupError> {
        let keys = self.band_keys(docs);
        let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, d) in docs.iter().enumerate() {
            groups.entry(d.dump).or_default().push(i);
        }
        let mut out = DedupOutcome { keep: vec![true; docs.len()], ..Default::default() };
        for members in groups.values() {
            let part = self.resolve(docs, &keys, members, None)?;
            for (m, k) in members.iter().zip(&part.keep) {
                out.keep[*m] = *k;
            }
            out.merge(&part);
        }
        Ok(out)
    }

    /// Processes snapshots in the given order (newest first). Each snapshot is
    /// clustered internally, and any document colliding with a band key of an
    /// earlier-processed snapshot is removed. Keys of every processed document
    /// are indexed, whether or not it was kept.
    pub fn dedup_global_iterative(&self, snapshots: &[Vec<DedupInput>]) -> Result<Vec<DedupOutcome>, DedupError> {
        let mut index: HashSet<u64> = HashSet::new();
        let mut outs = Vec::with_capacity(snapshots.len());
        for docs in snapshots {
            let keys = self.band_keys(docs);
            let members: Vec<usize> = (0..docs.len()).collect();
            outs.push(self.resolve(docs, &keys, &members, Some(&index))?);
            index.extend(keys.iter().flatten().flatten().copied());
        }
        Ok(outs)
    }

    fn resolve(
        &self,
        docs: &[DedupInput],
        keys: &[Option<Vec<u64>>],
        members: &[usize],
        prior: Option<&HashSet<u64>>,
    ) -> Result<DedupOutcome, DedupError> {
        let n = members.len();
        // Local node n stands for "seen in an earlier snapshot".
        let prior_node = n as u32;
        let mut postings: Vec<(u64, u32)> = Vec::new();
        let mut bypassed = 0;
        let mut hits_prior = Vec::new();
        for (local, &g) in members.iter().enumerate() {
            match &keys[g] {
                None => bypassed += 1,
                Some(ks) => {
                    for &k in ks {
                        postings.push((k, local as u32));
                        if prior.is_some_and(|p| p.contains(&k)) {
                            hits_prior.push(local);
                        }
                    }
                }
            }
        }
        if let Some(dir) = &self.spill_dir {
            postings = spill::roundtrip_postings(dir, postings)?;
        }
        let mut uf = union_postings(&mut postings, n + 1, self.exec);
        for l in hits_prior {
            uf.union(l, prior_node as usize);
        }
        let prior_root = uf.find(prior_node as usize);

        let mut best: Vec<Option<usize>> = vec![None; n + 1];
        for local in 0..n {
            if keys[members[local]].is_none() {
                continue;
            }
            let r = uf.find(local);
            let better = match best[r] {
                None => true,
                Some(b) => (docs[members[local]].id, local) < (docs[members[b]].id, b),
            };
            if better {
                best[r] = Some(local);
            }
        }
        let mut keep = vec![true; n];
        let mut removed = 0;
        let mut clusters = 0;
        for local in 0..n {
            if keys[members[local]].is_none() {
                continue;
            }
            let r = uf.find(local);
            let k = r != prior_root && best[r] == Some(local);
            if best[r] == Some(local) && r != prior_root {
                clusters += 1;
            }
            if !k {
                removed += 1;
            }
            keep[local] = k;
        }
        Ok(DedupOutcome { keep, bypassed, clusters, removed })
    }
}

//! Clifford-coset labels and the sorted coset databases `D_k`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::channel::ChannelMatrix;
use crate::error::{Error, Result};
use crate::pauli::Pauli;
use crate::ring::RealElt;
use crate::rp::{all_rp, rp_compact, rp_inv_mult, rp_mult};

const MAGIC: &[u8; 5] = b"TCDB1";
const ENTRY_BYTES: usize = 20;
const DIGEST_BYTES: usize = 16;

/// Canonical representative of `{W·C : C Clifford}`, stored row-major.
///
/// Each column is sign-normalized on its first nonzero entry, written over
/// the common denominator `√2^{sde(W)}`: the column is negated when that
/// numerator `a + b√2` has `a < 0`, or `a = 0` and `b < 0`. Columns are then
/// sorted ascending, comparing entries top to bottom.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CosetLabel {
    n: usize,
    entries: Vec<RealElt>,
}

impl CosetLabel {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << (2 * self.n)
    }

    pub fn entries(&self) -> &[RealElt] {
        &self.entries
    }

    pub fn sde(&self) -> u32 {
        self.entries.iter().map(|e| e.k()).max().unwrap_or(0)
    }

    /// Little-endian `(a: i64, b: i64, k: u32)` per entry.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.entries.len() * ENTRY_BYTES);
        for e in &self.entries {
            out.extend_from_slice(&e.a().to_le_bytes());
            out.extend_from_slice(&e.b().to_le_bytes());
            out.extend_from_slice(&e.k().to_le_bytes());
        }
        out
    }

    fn from_bytes(n: usize, bytes: &[u8]) -> Result<Self> {
        let entries = bytes
            .chunks_exact(ENTRY_BYTES)
            .map(|c| {
                let a = i64::from_le_bytes(c[0..8].try_into().unwrap());
                let b = i64::from_le_bytes(c[8..16].try_into().unwrap());
                let k = u32::from_le_bytes(c[16..20].try_into().unwrap());
                let e = RealElt::new(a, b, k);
                if (e.a(), e.b(), e.k()) != (a, b, k) {
                    return Err(Error::Database("non-canonical label entry".into()));
                }
                Ok(e)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CosetLabel { n, entries })
    }

    pub fn digest(&self) -> [u8; DIGEST_BYTES] {
        let h = Sha256::digest(self.to_bytes());
        let mut out = [0u8; DIGEST_BYTES];
        out.copy_from_slice(&h[..DIGEST_BYTES]);
        out
    }

    fn approx_bytes(&self) -> usize {
        std::mem::size_of::<Self>() + self.entries.len() * std::mem::size_of::<RealElt>()
    }
}

impl std::fmt::Debug for CosetLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let d = self.dim();
        let rows: Vec<_> = self.entries.chunks(d).collect();
        f.debug_struct("CosetLabel")
            .field("n", &self.n)
            .field("rows", &rows)
            .finish()
    }
}

pub fn coset_label(w: &ChannelMatrix) -> CosetLabel {
    let d = w.dim();
    let s = w.sde();
    let mut cols: Vec<Vec<RealElt>> = (0..d)
        .map(|c| {
            let mut col = w.column(c);
            if let Some(first) = col.iter().find(|e| !e.is_zero()) {
                let (a, b) = first.numerator_at(s);
                if a < 0 || (a == 0 && b < 0) {
                    col.iter_mut().for_each(|e| *e = -*e);
                }
            }
            col
        })
        .collect();
    cols.sort();
    let mut entries = Vec::with_capacity(d * d);
    for r in 0..d {
        entries.extend(cols.iter().map(|c| c[r]));
    }
    CosetLabel { n: w.n(), entries }
}

/// Row-major lexicographic order under `ring_compare`.
pub fn label_compare(x: &CosetLabel, y: &CosetLabel) -> Ordering {
    x.cmp(y)
}

/// `D_k`: one witness `[P_k, …, P_1]` per coset of T-count exactly `k`,
/// sorted by label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetDatabase {
    n: usize,
    k: usize,
    labels: Vec<CosetLabel>,
    witnesses: Vec<Pauli>,
}

impl CosetDatabase {
    fn level_zero(n: usize) -> Self {
        CosetDatabase {
            n,
            k: 0,
            labels: vec![coset_label(&ChannelMatrix::identity(n))],
            witnesses: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[CosetLabel] {
        &self.labels
    }

    pub fn witness(&self, i: usize) -> &[Pauli] {
        &self.witnesses[i * self.k..(i + 1) * self.k]
    }

    pub fn lookup(&self, label: &CosetLabel) -> Option<&[Pauli]> {
        self.labels
            .binary_search(label)
            .ok()
            .map(|i| self.witness(i))
    }

    pub fn contains(&self, label: &CosetLabel) -> bool {
        self.labels.binary_search(label).is_ok()
    }

    pub fn approx_bytes(&self) -> usize {
        self.labels
            .iter()
            .map(CosetLabel::approx_bytes)
            .sum::<usize>()
            + self.witnesses.len() * std::mem::size_of::<Pauli>()
    }

    /// Checks sortedness, label uniqueness and that each witness regenerates
    /// its stored label.
    pub fn validate(&self) -> Result<()> {
        if self.witnesses.len() != self.labels.len() * self.k {
            return Err(Error::Database("witness table size mismatch".into()));
        }
        if self.labels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Database("labels not strictly increasing".into()));
        }
        for (i, label) in self.labels.iter().enumerate() {
            if &coset_label(&witness_matrix(self.n, self.witness(i))?) != label {
                return Err(Error::Database(format!(
                    "witness {i} at level {} does not match its label",
                    self.k
                )));
            }
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(MAGIC)?;
        w.write_all(&(self.n as u32).to_le_bytes())?;
        w.write_all(&(self.k as u32).to_le_bytes())?;
        w.write_all(&(self.len() as u64).to_le_bytes())?;
        for (i, label) in self.labels.iter().enumerate() {
            w.write_all(&label.digest())?;
            for p in self.witness(i) {
                w.write_all(&(p.index() as u32).to_le_bytes())?;
            }
            w.write_all(&label.to_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 5];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Database(format!("{}: bad magic", path.display())));
        }
        let mut u32b = [0u8; 4];
        r.read_exact(&mut u32b)?;
        let n = u32::from_le_bytes(u32b) as usize;
        r.read_exact(&mut u32b)?;
        let k = u32::from_le_bytes(u32b) as usize;
        let mut u64b = [0u8; 8];
        r.read_exact(&mut u64b)?;
        let count = u64::from_le_bytes(u64b) as usize;
        if n == 0 || n > crate::pauli::MAX_QUBITS {
            return Err(Error::Database(format!("unsupported qubit count {n}")));
        }
        let d = 1usize << (2 * n);
        let mut labels = Vec::with_capacity(count);
        let mut witnesses = Vec::with_capacity(count * k);
        let mut payload = vec![0u8; d * d * ENTRY_BYTES];
        for _ in 0..count {
            let mut digest = [0u8; DIGEST_BYTES];
            r.read_exact(&mut digest)?;
            for _ in 0..k {
                r.read_exact(&mut u32b)?;
                witnesses.push(Pauli::new(n, u32::from_le_bytes(u32b) as usize)?);
            }
            r.read_exact(&mut payload)?;
            let label = CosetLabel::from_bytes(n, &payload)?;
            if label.digest() != digest {
                return Err(Error::Database("record digest mismatch".into()));
            }
            labels.push(label);
        }
        if r.read(&mut [0u8; 1])? != 0 {
            return Err(Error::Database("trailing bytes".into()));
        }
        if labels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Database("labels not strictly increasing".into()));
        }
        Ok(CosetDatabase {
            n,
            k,
            labels,
            witnesses,
        })
    }
}

/// `R(P_k)···R(P_1)` for a witness `[P_k, …, P_1]`.
pub fn witness_matrix(n: usize, witness: &[Pauli]) -> Result<ChannelMatrix> {
    let mut w = ChannelMatrix::identity(n);
    for p in witness.iter().rev() {
        w = rp_mult(&rp_compact(*p)?, &w)?;
    }
    Ok(w)
}

/// `W⁻¹·U` for a witness `W = R(P_k)···R(P_1)`, peeling `P_k` first.
pub fn witness_inv_mult(witness: &[Pauli], u: &ChannelMatrix) -> Result<ChannelMatrix> {
    let mut v = u.clone();
    for p in witness {
        v = rp_inv_mult(&rp_compact(*p)?, &v)?;
    }
    Ok(v)
}

/// Databases `D_0..=D_kmax`, sharing a memory budget across all levels.
#[derive(Clone, Debug)]
pub struct DatabaseSet {
    n: usize,
    levels: Vec<CosetDatabase>,
    mem_cap: usize,
}

/// Parents handled per parallel batch; bounds transient label memory.
const BATCH: usize = 256;

impl DatabaseSet {
    pub fn new(n: usize, mem_cap: usize) -> Result<Self> {
        if n == 0 || n > crate::pauli::MAX_QUBITS {
            return Err(Error::Invalid(format!("unsupported qubit count {n}")));
        }
        Ok(DatabaseSet {
            n,
            levels: vec![CosetDatabase::level_zero(n)],
            mem_cap,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kmax(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn levels(&self) -> &[CosetDatabase] {
        &self.levels
    }

    pub fn level(&self, k: usize) -> &CosetDatabase {
        &self.levels[k]
    }

    pub fn approx_bytes(&self) -> usize {
        self.levels.iter().map(CosetDatabase::approx_bytes).sum()
    }

    /// Smallest level containing `label`, with its witness.
    pub fn find(&self, label: &CosetLabel, up_to: usize) -> Option<(usize, &[Pauli])> {
        self.levels
            .iter()
            .take(up_to + 1)
            .enumerate()
            .find_map(|(k, db)| db.lookup(label).map(|w| (k, w)))
    }

    /// Builds levels until `kmax` exists.
    pub fn extend_to(&mut self, kmax: usize) -> Result<()> {
        while self.kmax() < kmax {
            let next = self.build_next()?;
            self.levels.push(next);
        }
        Ok(())
    }

    fn build_next(&self) -> Result<CosetDatabase> {
        let k = self.levels.len();
        let prev = &self.levels[k - 1];
        let rps = all_rp(self.n);
        let base_bytes = self.approx_bytes();
        let label_bytes = {
            let d = 1usize << (2 * self.n);
            std::mem::size_of::<CosetLabel>() + d * d * std::mem::size_of::<RealElt>()
        };
        let per_entry = label_bytes + k * std::mem::size_of::<Pauli>() + 32;
        let mut found: HashMap<CosetLabel, (u32, u32)> = HashMap::new();
        for start in (0..prev.len()).step_by(BATCH) {
            let end = (start + BATCH).min(prev.len());
            let batch: Vec<(u32, u32, CosetLabel)> = (start..end)
                .into_par_iter()
                .map(|parent| -> Result<Vec<(u32, u32, CosetLabel)>> {
                    let m = witness_matrix(self.n, prev.witness(parent))?;
                    let mut out = Vec::new();
                    for (pi, rp) in rps.iter().enumerate() {
                        let label = coset_label(&rp_mult(rp, &m)?);
                        if !self.levels.iter().any(|db| db.contains(&label)) {
                            out.push((parent as u32, pi as u32, label));
                        }
                    }
                    Ok(out)
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .flatten()
                .collect();
            for (parent, pi, label) in batch {
                found.entry(label).or_insert((parent, pi));
            }
            let bytes = base_bytes + found.len() * per_entry;
            if bytes > self.mem_cap {
                return Err(Error::DatabaseTooLarge {
                    level: k,
                    entries: found.len(),
                    bytes,
                });
            }
        }
        let mut entries: Vec<(CosetLabel, (u32, u32))> = found.into_iter().collect();
        entries.par_sort_unstable_by(|a, b| a.0.cmp(&b.0));
        let mut labels = Vec::with_capacity(entries.len());
        let mut witnesses = Vec::with_capacity(entries.len() * k);
        for (label, (parent, pi)) in entries {
            witnesses.push(rps[pi as usize].pauli());
            witnesses.extend_from_slice(prev.witness(parent as usize));
            labels.push(label);
        }
        Ok(CosetDatabase {
            n: self.n,
            k,
            labels,
            witnesses,
        })
    }

    /// Loads cached levels from `dir`, builds the missing ones and writes
    /// them back.
    pub fn load_or_build(
        n: usize,
        kmax: usize,
        mem_cap: usize,
        dir: Option<&Path>,
    ) -> Result<Self> {
        let mut set = DatabaseSet::new(n, mem_cap)?;
        let Some(dir) = dir else {
            set.extend_to(kmax)?;
            return Ok(set);
        };
        std::fs::create_dir_all(dir)?;
        for k in 1..=kmax {
            let path = db_path(dir, n, k);
            if path.exists() {
                let db = CosetDatabase::load(&path)?;
                if db.n() != n || db.k() != k {
                    return Err(Error::Database(format!(
                        "{}: header says n={}, k={}",
                        path.display(),
                        db.n(),
                        db.k()
                    )));
                }
                set.levels.push(db);
            } else {
                let db = set.build_next()?;
                db.save(&path)?;
                set.levels.push(db);
            }
        }
        Ok(set)
    }
}

pub fn db_path(dir: &Path, n: usize, k: usize) -> PathBuf {
    dir.join(format!("n{n}_k{k}.tcdb"))
}

pub fn build_databases(n: usize, kmax: usize, mem_cap: usize) -> Result<Vec<CosetDatabase>> {
    let mut set = DatabaseSet::new(n, mem_cap)?;
    set.extend_to(kmax)?;
    Ok(set.levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{channel_of_unitary, dense_channel_mul};
    use crate::circuit::{Circuit, Gate};

    fn ch(n: usize, gates: &[Gate]) -> ChannelMatrix {
        channel_of_unitary(
            &Circuit::from_gates(n, gates.iter().copied())
                .unwrap()
                .unitary(),
        )
        .unwrap()
    }

    #[test]
    fn clifford_labels_equal_identity() {
        let id = coset_label(&ChannelMatrix::identity(1));
        for g in [
            vec![Gate::H(1)],
            vec![Gate::S(1)],
            vec![Gate::H(1), Gate::S(1), Gate::H(1)],
        ] {
            assert_eq!(coset_label(&ch(1, &g)), id);
        }
        let t = coset_label(&ch(1, &[Gate::T(1)]));
        assert_eq!(t, coset_label(&ch(1, &[Gate::T(1), Gate::S(1)])));
        assert_eq!(t, coset_label(&ch(1, &[Gate::H(1), Gate::T(1)])));
        assert_ne!(t, id);
    }

    #[test]
    fn label_is_idempotent() {
        let w = ch(2, &[Gate::T(1), Gate::Cnot(1, 2), Gate::H(2), Gate::T(2)]);
        let l = coset_label(&w);
        let again = coset_label(&ChannelMatrix::from_raw(2, l.entries().to_vec()));
        assert_eq!(again, l);
    }

    #[test]
    fn n1_levels() {
        let dbs = build_databases(1, 3, usize::MAX).unwrap();
        assert_eq!(dbs[0].len(), 1);
        assert_eq!(dbs[1].len(), 3);
        for db in &dbs {
            db.validate().unwrap();
        }
        let t = coset_label(&ch(1, &[Gate::T(1)]));
        assert_eq!(dbs[1].lookup(&t).unwrap(), &["Z".parse::<Pauli>().unwrap()]);
        assert!(dbs[0].lookup(&t).is_none());
        // Right multiplication by a Clifford keeps the coset.
        let tc = dense_channel_mul(&ch(1, &[Gate::T(1)]), &ch(1, &[Gate::H(1)])).unwrap();
        assert!(dbs[1].lookup(&coset_label(&tc)).is_some());
    }

    #[test]
    fn file_round_trip_and_corruption() {
        let dir = std::env::temp_dir().join(format!("tcdb-unit-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let dbs = build_databases(2, 2, usize::MAX).unwrap();
        let path = dir.join("x.tcdb");
        dbs[2].save(&path).unwrap();
        assert_eq!(CosetDatabase::load(&path).unwrap(), dbs[2]);
        let mut bytes = std::fs::read(&path).unwrap();
        let last = bytes.len() - 3;
        bytes[last] ^= 1;
        std::fs::write(&path, &bytes).unwrap();
        assert!(CosetDatabase::load(&path).is_err());
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn memory_cap_is_reported() {
        let mut set = DatabaseSet::new(2, 10_000).unwrap();
        match set.extend_to(2) {
            Err(Error::DatabaseTooLarge { level, .. }) => assert!(level >= 1),
            other => panic!("expected cap error, got {other:?}"),
        }
    }
}

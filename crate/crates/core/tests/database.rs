use tcount::coset::{
    build_databases, coset_label, db_path, witness_matrix, CosetDatabase, DatabaseSet,
};
use tcount::provable::DEFAULT_MEM_CAP;
use tcount::{Error, Pauli};

#[test]
fn level_sizes() {
    let n1: Vec<usize> = build_databases(1, 6, DEFAULT_MEM_CAP)
        .unwrap()
        .iter()
        .map(|d| d.len())
        .collect();
    assert_eq!(n1, [1, 3, 6, 12, 24, 48, 96]);
    let n2: Vec<usize> = build_databases(2, 2, DEFAULT_MEM_CAP)
        .unwrap()
        .iter()
        .map(|d| d.len())
        .collect();
    assert_eq!(n2, [1, 15, 165]);
}

#[test]
fn witnesses_match_their_labels() {
    for db in build_databases(2, 2, DEFAULT_MEM_CAP).unwrap() {
        db.validate().unwrap();
        for (i, label) in db.labels().iter().enumerate() {
            let w = witness_matrix(2, db.witness(i)).unwrap();
            assert_eq!(&coset_label(&w), label);
            assert_eq!(db.lookup(label), Some(db.witness(i)));
        }
    }
}

#[test]
fn save_load_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let dbs = build_databases(1, 3, DEFAULT_MEM_CAP).unwrap();
    for db in &dbs[1..] {
        let path = db_path(dir.path(), 1, db.k());
        db.save(&path).unwrap();
        assert_eq!(&CosetDatabase::load(&path).unwrap(), db);
    }
    let cached = DatabaseSet::load_or_build(1, 3, DEFAULT_MEM_CAP, Some(dir.path())).unwrap();
    assert_eq!(cached.levels(), &dbs[..]);
}

#[test]
fn corrupt_file_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.tcdb");
    let db = &build_databases(1, 2, DEFAULT_MEM_CAP).unwrap()[2];
    db.save(&path).unwrap();
    let mut bytes = std::fs::read(&path).unwrap();
    bytes.push(0);
    std::fs::write(&path, &bytes).unwrap();
    assert!(CosetDatabase::load(&path).is_err());
    std::fs::write(&path, b"TCDB").unwrap();
    assert!(CosetDatabase::load(&path).is_err());
}

#[test]
fn memory_cap_is_enforced() {
    match build_databases(2, 3, 100_000) {
        Err(Error::DatabaseTooLarge { .. }) => {}
        other => panic!("expected cap error, got {:?}", other.map(|v| v.len())),
    }
}

#[test]
fn find_reports_level() {
    let mut set = DatabaseSet::new(1, DEFAULT_MEM_CAP).unwrap();
    set.extend_to(3).unwrap();
    let z: Pauli = "Z".parse().unwrap();
    let x: Pauli = "X".parse().unwrap();
    let w = witness_matrix(1, &[z, x]).unwrap();
    let (k, _) = set.find(&coset_label(&w), 3).unwrap();
    assert_eq!(k, 2);
    assert!(set.find(&coset_label(&w), 1).is_none());
}

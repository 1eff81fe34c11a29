use hmcert::pipeline::{self, closure, CertStatus, Config};
use hmcert::tables::{ingest_tables, TableError};

#[test]
fn failed_dependency_blocks_dependents() {
    // one box cannot certify the Dawson truncation
    let cfg = Config::parse("C10.max_boxes = 1\n").unwrap();
    let r = pipeline::run(&cfg, &["C11".to_string()]).unwrap();
    assert_eq!(r.record("C10").unwrap().status, CertStatus::Inconclusive);
    let c11 = r.record("C11").unwrap();
    assert_eq!(c11.status, CertStatus::Blocked);
    assert!(c11.bounds.is_empty() && c11.notes[0].contains("C10"));
    assert!(r.verdict.starts_with("INCOMPLETE") && r.verdict.contains("C11 blocked"), "{}", r.verdict);
    assert!(!pipeline::success(&r));
    // nothing backed by a failed certificate enters the ledger
    assert!(r.ledger.iter().all(|l| l.provenance != "C10" && l.provenance != "C11"));
}

#[test]
fn closure_follows_the_dependency_graph() {
    let c = closure(&["C13".to_string()]).unwrap();
    for id in ["C8", "C10", "C11", "C12", "C13", "C18"] {
        assert!(c.contains(&id), "{id}");
    }
    assert!(!c.contains(&"C1"));
    assert!(closure(&["C20".to_string()]).is_err());
}

#[test]
fn tables_from_disk() {
    let dir = std::env::temp_dir().join(format!("hmcert-tables-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    for f in ["f0.tab", "w0.tab", "w1.tab"] {
        std::fs::copy(format!("{src}/{f}"), dir.join(f)).unwrap();
    }
    let t = ingest_tables(&dir).unwrap();
    assert_eq!((t.f0.len(), t.w0.len(), t.w1.len()), (15, 45, 36));
    assert_eq!(t.checksums, hmcert::tables::builtin_tables().checksums);

    // drop the last f0 entry
    let text = std::fs::read_to_string(dir.join("f0.tab")).unwrap();
    let short: Vec<&str> = text.lines().filter(|l| !l.starts_with("14 ")).collect();
    std::fs::write(dir.join("f0.tab"), short.join("\n")).unwrap();
    assert!(matches!(ingest_tables(&dir), Err(TableError::Count { found: 14, .. })));

    let cfg = Config::parse(&format!("tables = {}\n", dir.display())).unwrap();
    assert!(pipeline::run(&cfg, &["C1".to_string()]).is_err());
}

use std::sync::{Arc, Barrier};
use std::thread;

use creamkit::fixtures::TABLE4_HTA;
use creamkit::{default_taxonomy, parse_hta, CpcAssessment};
use creamkit_cli::{Project, ProjectStore, StoreError};

fn sample(id: &str) -> Project {
    let mut p = Project::new(id, parse_hta(TABLE4_HTA).unwrap());
    p.assessments.insert("best".into(), CpcAssessment::all_best(&default_taxonomy()));
    p.notes = "film check".into();
    p
}

#[test]
fn save_then_load_bumps_revision() {
    let dir = tempfile::tempdir().unwrap();
    let store = ProjectStore::open(dir.path()).unwrap();
    let p = sample("weld-7");
    let saved = store.save(&p, &default_taxonomy()).unwrap();
    assert_eq!(saved.revision, p.revision + 1);
    let loaded = store.load("weld-7").unwrap();
    assert_eq!(loaded, saved);
    assert_eq!(Project { revision: 0, ..loaded }, p);
}

#[test]
fn saved_state_survives_reopen() {
    let dir = tempfile::tempdir().unwrap();
    let saved = ProjectStore::open(dir.path()).unwrap().save(&sample("a"), &default_taxonomy()).unwrap();
    let reopened = ProjectStore::open(dir.path()).unwrap();
    assert_eq!(reopened.load("a").unwrap(), saved);
    // one JSON file per project, no temp files left behind
    let names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names, ["a.json"]);
}

#[test]
fn stale_save_conflicts() {
    let dir = tempfile::tempdir().unwrap();
    let store = ProjectStore::open(dir.path()).unwrap();
    let base = sample("x");
    let first = store.save(&base, &default_taxonomy()).unwrap();
    match store.save(&base, &default_taxonomy()) {
        Err(StoreError::Conflict { on_disk, base: b, .. }) => assert_eq!((on_disk, b), (1, 0)),
        other => panic!("expected conflict, got {other:?}"),
    }
    assert_eq!(store.save(&first, &default_taxonomy()).unwrap().revision, 2);
}

#[test]
fn racing_saves_from_same_base_one_wins() {
    let dir = tempfile::tempdir().unwrap();
    let store = Arc::new(ProjectStore::open(dir.path()).unwrap());
    let base = store.save(&sample("race"), &default_taxonomy()).unwrap();
    for round in 0..20 {
        let current = store.load("race").unwrap();
        let n = 4;
        let barrier = Arc::new(Barrier::new(n));
        let handles: Vec<_> = (0..n)
            .map(|i| {
                let store = store.clone();
                let barrier = barrier.clone();
                let mut p = current.clone();
                p.notes = format!("round {round} writer {i}");
                thread::spawn(move || {
                    barrier.wait();
                    store.save(&p, &default_taxonomy())
                })
            })
            .collect();
        let results: Vec<_> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        let wins: Vec<_> = results.iter().filter_map(|r| r.as_ref().ok()).collect();
        assert_eq!(wins.len(), 1, "round {round}");
        assert!(results.iter().filter(|r| r.is_err()).all(|r| matches!(r, Err(StoreError::Conflict { .. }))));
        assert_eq!(store.load("race").unwrap(), *wins[0]);
    }
    assert_eq!(store.load("race").unwrap().revision, base.revision + 20);
}

#[test]
fn missing_id() {
    let dir = tempfile::tempdir().unwrap();
    let store = ProjectStore::open(dir.path()).unwrap();
    assert!(matches!(store.load("ghost"), Err(StoreError::Missing(id)) if id == "ghost"));
    assert!(matches!(store.load("../etc/passwd"), Err(StoreError::Missing(_))));
}

#[test]
fn invalid_projects_are_not_written() {
    let dir = tempfile::tempdir().unwrap();
    let store = ProjectStore::open(dir.path()).unwrap();
    let mut p = sample("bad");
    p.assessments.insert("typo".into(), {
        let mut a = CpcAssessment::all_best(&default_taxonomy());
        a.choices.insert(3, "Compatable".into());
        a
    });
    match store.save(&p, &default_taxonomy()) {
        Err(StoreError::Invalid(problems)) => assert!(problems[0].contains("typo"), "{problems:?}"),
        other => panic!("expected invalid, got {other:?}"),
    }
    assert!(matches!(store.load("bad"), Err(StoreError::Missing(_))));
}

#[test]
fn corrupt_file_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("junk.json"), "not json").unwrap();
    let store = ProjectStore::open(dir.path()).unwrap();
    assert!(matches!(store.load("junk"), Err(StoreError::Corrupt { .. })));
}

#[test]
fn unwritable_directory_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("plain-file");
    std::fs::write(&file, b"x").unwrap();
    assert!(matches!(ProjectStore::open(&file), Err(StoreError::Unwritable { .. })));
}

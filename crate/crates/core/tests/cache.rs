use std::sync::Arc;

use unitary_periods::cache::*;
use unitary_periods::character::{character_table, conjugacy_classes};
use unitary_periods::field::ExtensionContext;
use unitary_periods::group::{enumerate_unitary_group, DEFAULT_ORDER_BOUND};
use unitary_periods::spaces::{build_space, DiscChoice, Epsilon};

fn fixture() -> (Arc<ExtensionContext>, unitary_periods::group::MatrixGroup) {
    let ctx = Arc::new(ExtensionContext::new(3, 1).unwrap());
    let v = build_space(&ctx, Epsilon::Hermitian, 2, DiscChoice::Split);
    let g = enumerate_unitary_group(&v, DEFAULT_ORDER_BOUND).unwrap();
    (ctx, g)
}

#[test]
fn empty_cache_lists_nothing() {
    let dir = tempfile::tempdir().unwrap();
    assert!(Cache::open(dir.path()).unwrap().list().unwrap().is_empty());
}

#[test]
fn group_and_table_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::open(dir.path()).unwrap();
    let (ctx, g) = fixture();
    let gk = CacheKey::new(EntryKind::Group, &ctx, Epsilon::Hermitian, 2, "U(V)");
    cache.store_group(&gk, &g).unwrap();
    let back = cache.load_group(&gk, &ctx).unwrap().unwrap();
    assert_eq!(back.elements(), g.elements());

    let classes = conjugacy_classes(&g).unwrap();
    let table = character_table(&g, &classes, 0).unwrap();
    let tk = CacheKey::new(EntryKind::Table, &ctx, Epsilon::Hermitian, 2, "U(V)");
    cache.store_table(&tk, &table).unwrap();
    let t = cache.load_table(&tk).unwrap().unwrap();
    assert_eq!(t.degrees, table.degrees);
    for (a, b) in t.characters.iter().zip(&table.characters) {
        assert_eq!(a.values, b.values, "values must round-trip exactly");
    }
    let entries = cache.validate().unwrap();
    assert_eq!(entries.len(), 2);
    assert!(entries.iter().all(|e| e.status == EntryStatus::Ok));
}

#[test]
fn corrupt_entries_are_reported_and_evicted() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::open(dir.path()).unwrap();
    let (ctx, g) = fixture();
    let key = CacheKey::new(EntryKind::Group, &ctx, Epsilon::Hermitian, 2, "U(V)");
    let path = cache.store_group(&key, &g).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let (head, body) = text.split_once("---\n").unwrap();
    let tampered = format!("{head}---\n7{}", &body[1..]);
    assert_ne!(tampered, text);
    std::fs::write(&path, tampered).unwrap();
    assert!(cache.load_group(&key, &ctx).is_err());
    assert!(!path.exists());
}

#[test]
fn version_bump_invalidates() {
    let dir = tempfile::tempdir().unwrap();
    let cache = Cache::open(dir.path()).unwrap();
    let (ctx, g) = fixture();
    let mut old = CacheKey::new(EntryKind::Group, &ctx, Epsilon::Hermitian, 2, "U(V)");
    old.version = "0.0.0-old".into();
    cache.store_group(&old, &g).unwrap();
    let current = CacheKey::new(EntryKind::Group, &ctx, Epsilon::Hermitian, 2, "U(V)");
    assert!(cache.load_group(&current, &ctx).unwrap().is_none());
    let entries = cache.validate().unwrap();
    assert_eq!(entries[0].status, EntryStatus::Stale);
    assert!(cache.list().unwrap().is_empty());
}

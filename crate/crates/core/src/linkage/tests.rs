use super::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn building(id: &str, number: &str, street: &str, zip: &str) -> BuildingRecord {
    BuildingRecord {
        building_id: id.into(),
        lat: 40.0,
        lon: -75.0,
        footprint_area: 100.0,
        height: Some(7.0),
        street_number: number.into(),
        street_name: street.into(),
        zip: zip.into(),
    }
}

fn ami(key: &str, number: &str, street: &str, zip: &str) -> AmiAddress {
    AmiAddress { ami_key: key.into(), street_number: number.into(), street_name: street.into(), zip: zip.into() }
}

fn fixture_buildings() -> Vec<BuildingRecord> {
    vec![
        building("b1", "10", "Main Street", "19104"),
        building("b2", "12", "Elm St", "19104"),
        building("b3", "7", "Oak Ridge Road", "19104"),
        building("b4", "10", "Main Street", "19103"),
    ]
}

#[test]
fn exact_match() {
    let out = link_addresses(&[ami("k1", "10", "MAIN ST.", "19104")], &fixture_buildings(), DEFAULT_THRESHOLD);
    assert_eq!(out[0].building_id.as_deref(), Some("b1"));
    assert_eq!(out[0].match_kind, Some(MatchKind::Exact));
    assert_eq!(out[0].similarity, Some(100));
}

#[test]
fn below_threshold_rejected() {
    let out = link_addresses(&[ami("k1", "12", "Elms St", "19104")], &fixture_buildings(), DEFAULT_THRESHOLD);
    assert!(!out[0].is_matched());
    assert_eq!(out[0].stage, Some(UnmatchedStage::FuzzyBelowThreshold));
    assert_eq!(out[0].similarity, Some(86));
}

#[test]
fn fuzzy_accepted() {
    let out = link_addresses(&[ami("k1", "7", "Oakridge Rd", "19104")], &fixture_buildings(), DEFAULT_THRESHOLD);
    assert_eq!(out[0].building_id.as_deref(), Some("b3"));
    assert_eq!(out[0].match_kind, Some(MatchKind::Fuzzy));
    assert_eq!(out[0].similarity, Some(92));
    assert_eq!(out[0].matched_street.as_deref(), Some("OAK RIDGE RD"));
}

#[test]
fn house_number_and_zip_stages() {
    let rows = [
        ami("k1", "0010B", "Main St", "19104"),
        ami("k2", "11", "Main St", "19104"),
        ami("k3", "10", "Main St", "99999"),
    ];
    let out = link_addresses(&rows, &fixture_buildings(), DEFAULT_THRESHOLD);
    let by_key: HashMap<_, _> = out.iter().map(|l| (l.ami_key.as_str(), l)).collect();
    assert_eq!(by_key["k1"].building_id.as_deref(), Some("b1"));
    assert_eq!(by_key["k2"].stage, Some(UnmatchedStage::HouseNumber));
    assert_eq!(by_key["k3"].stage, Some(UnmatchedStage::NoZip));
}

#[test]
fn ties_break_lexicographically() {
    let buildings = vec![building("bz", "1", "ABD ST", "1"), building("ba", "1", "ABC ST", "1")];
    // "ABE ST" is one substitution from both
    let out = link_addresses(&[ami("k", "1", "ABE ST", "1")], &buildings, 80);
    assert_eq!(out[0].matched_street.as_deref(), Some("ABC ST"));
    assert_eq!(out[0].building_id.as_deref(), Some("ba"));
}

#[test]
fn output_grouped_by_zip_then_input_order() {
    let rows = [
        ami("a", "10", "Main St", "19104"),
        ami("b", "10", "Main St", "19103"),
        ami("c", "12", "Elm St", "19104"),
    ];
    let out = link_addresses(&rows, &fixture_buildings(), DEFAULT_THRESHOLD);
    let keys: Vec<&str> = out.iter().map(|l| l.ami_key.as_str()).collect();
    assert_eq!(keys, ["b", "a", "c"]);
}

fn unit(key: &str, hour: i64, value: f64) -> UnitConsumption {
    UnitConsumption { ami_key: key.into(), timestamp: Hour::from_unix_hours(465_000 + hour), value }
}

fn linked(key: &str, building: &str) -> LinkResult {
    LinkResult {
        ami_key: key.into(),
        zip: "1".into(),
        building_id: Some(building.into()),
        match_kind: Some(MatchKind::Exact),
        similarity: Some(100),
        matched_street: None,
        stage: None,
    }
}

#[test]
fn aggregation_sums_units() {
    let links = [linked("u1", "b"), linked("u2", "b")];
    let one = aggregate_units(&[unit("u1", 0, 1.0)], &links).unwrap();
    assert_eq!(one.len(), 1);
    assert_eq!(one[0].value, 1.0);
    let two = aggregate_units(&[unit("u1", 0, 1.0), unit("u2", 0, 2.5), unit("u2", 1, 4.0)], &links).unwrap();
    assert_eq!(two.iter().map(|r| r.value).collect::<Vec<_>>(), vec![3.5, 4.0]);
}

#[test]
fn aggregation_rejects_duplicates() {
    let links = [linked("u1", "b")];
    match aggregate_units(&[unit("u1", 0, 1.0), unit("u1", 0, 2.0)], &links).unwrap_err() {
        Error::DuplicateRows { keys } => assert_eq!(keys, vec![format!("u1@{}", Hour::from_unix_hours(465_000))]),
        e => panic!("{e}"),
    }
}

#[test]
fn aggregation_matches_group_by() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let links: Vec<LinkResult> =
        (0..5).map(|i| linked(&format!("u{i}"), if i < 3 { "b1" } else { "b2" })).collect();
    let mut rows = Vec::new();
    let mut expected: BTreeMap<(String, i64), f64> = BTreeMap::new();
    for i in 0..5 {
        for h in 0..24 {
            if rng.random_bool(0.8) {
                let v: f64 = rng.random_range(0.0..3.0);
                rows.push(unit(&format!("u{i}"), h, v));
                let b = if i < 3 { "b1" } else { "b2" };
                *expected.entry((b.to_string(), h)).or_insert(0.0) += v;
            }
        }
    }
    let out = aggregate_units(&rows, &links).unwrap();
    assert_eq!(out.len(), expected.len());
    for r in &out {
        let e = expected[&(r.building_id.clone(), r.timestamp.unix_hours() - 465_000)];
        assert!((r.value - e).abs() < 1e-12);
    }
}

fn corpus() -> impl Strategy<Value = (Vec<AmiAddress>, Vec<BuildingRecord>)> {
    let street = prop::sample::select(vec!["MAIN ST", "ELM ST", "OAK AVE", "PINE RD", "MAPLE DR"]);
    let zip = prop::sample::select(vec!["10001", "10002", "10003"]);
    let number = 1u32..6;
    let b = prop::collection::vec((number.clone(), street.clone(), zip.clone()), 1..30);
    let a = prop::collection::vec((number, street, zip), 0..40);
    (a, b).prop_map(|(a, b)| {
        let ami = a
            .into_iter()
            .enumerate()
            .map(|(i, (n, s, z))| ami(&format!("k{i}"), &n.to_string(), s, z))
            .collect();
        let buildings = b
            .into_iter()
            .enumerate()
            .map(|(i, (n, s, z))| building(&format!("b{i}"), &n.to_string(), s, z))
            .collect();
        (ami, buildings)
    })
}

proptest! {
    #[test]
    fn never_links_across_zip((ami, buildings) in corpus()) {
        let out = link_addresses(&ami, &buildings, 60);
        let zip_of: HashMap<&str, &str> = buildings.iter().map(|b| (b.building_id.as_str(), b.zip.as_str())).collect();
        let ami_zip: HashMap<&str, &str> = ami.iter().map(|a| (a.ami_key.as_str(), a.zip.as_str())).collect();
        for l in &out {
            if let Some(b) = &l.building_id {
                prop_assert_eq!(zip_of[b.as_str()], ami_zip[l.ami_key.as_str()]);
            }
        }
        // every input row exactly once
        let mut keys: Vec<&str> = out.iter().map(|l| l.ami_key.as_str()).collect();
        keys.sort_unstable();
        let mut expected: Vec<&str> = ami.iter().map(|a| a.ami_key.as_str()).collect();
        expected.sort_unstable();
        prop_assert_eq!(keys, expected);
    }
}

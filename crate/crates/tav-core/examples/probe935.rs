use std::path::PathBuf;
use tav_core::catalog::load_default;
use tav_core::det::EngineMode;
use tav_core::knot::load_knot_table;
use tav_core::search::{tav_scan, ScanConfig, ScanResult};

fn main() {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data");
    let cat = load_default(&data.join("groups.jsonl")).unwrap();
    let knots = load_knot_table(&data.join("knots.jsonl")).unwrap();
    let entry = &knots["9_35"];
    let cfg = ScanConfig {
        max_order: 24,
        mode: EngineMode::Screen,
        seed: 7,
        knots_sha256: "probe".into(),
        catalog_sha256: "probe".into(),
    };
    let t = std::time::Instant::now();
    let report = tav_scan("9_35", entry.presentation(), &cat, &cfg, None).unwrap();
    println!("result: {:?} in {:?}", report.result, t.elapsed());
    assert_eq!(report.result, ScanResult::Order(24));
    let c = report.certificate.as_ref().unwrap();
    println!("cert group {} order {} images {:?}", c.group_id, c.group_order, c.hom_images);
}

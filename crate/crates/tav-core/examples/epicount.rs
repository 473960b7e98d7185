//! Epimorphism-count fingerprints: for each knot record and each catalog
//! group, print |Epi(G(K), G)|. If K surjects onto K', then
//! |Epi(G(K), G)| >= |Epi(G(K'), G)| for every finite G, so a violation
//! rules out an epimorphism G(K) -> G(K').

use serde::Deserialize;
use std::path::PathBuf;
use tav_core::catalog::load_default;
use tav_core::epi::enumerate_homs;
use tav_core::knot::{wirtinger_from_pd, PDCode};
use tav_core::word::Word;

#[derive(Deserialize)]
struct Record {
    key: String,
    pd: Vec<[u32; 4]>,
    #[allow(dead_code)]
    generators: usize,
    #[allow(dead_code)]
    relators: Vec<Word>,
    #[allow(dead_code)]
    phi: Vec<i64>,
    #[allow(dead_code)]
    kept: Option<Vec<usize>>,
}

fn main() {
    let mut args = std::env::args().skip(1);
    let path = PathBuf::from(args.next().expect("usage: epicount RECORDS.jsonl MAX_ORDER"));
    let max_order: usize = args.next().expect("max order").parse().unwrap();
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data");
    let cat = load_default(&data.join("groups.jsonl")).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let recs: Vec<Record> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    for cg in &cat.groups {
        if cg.group.order() > max_order || cg.group.order() < 2 {
            continue;
        }
        print!("{:10} (o{:3})", cg.name, cg.group.order());
        for rec in &recs {
            let wir = wirtinger_from_pd(&PDCode(rec.pd.clone())).unwrap();
            let n = enumerate_homs(&wir, &cg.group, true).len();
            print!("  {}={}", rec.key, n);
        }
        println!();
    }
}

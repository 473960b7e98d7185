//! Census identification probe: for each record in a reduced-census JSONL
//! file, enumerate epimorphisms onto a chosen catalog group on the Wirtinger
//! presentation, restrict orbit representatives to the kept generators of the
//! reduced presentation, and screen the twisted Alexander polynomial there.
//! Prints every census key with at least one vanishing orbit.

use serde::Deserialize;
use std::path::PathBuf;
use tav_core::catalog::load_default;
use tav_core::det::EngineMode;
use tav_core::epi::{enumerate_homs, reduce_by_conjugation};
use tav_core::fox::{twisted_alexander, Representation, TwistedSetup};
use tav_core::knot::{wirtinger_from_pd, KnotPresentation, PDCode, SourceTag};
use tav_core::word::Word;

#[derive(Deserialize)]
struct Record {
    key: String,
    pd: Vec<[u32; 4]>,
    generators: usize,
    relators: Vec<Word>,
    phi: Vec<i64>,
    kept: Option<Vec<usize>>,
}

fn main() {
    let mut args = std::env::args().skip(1);
    let census_path = PathBuf::from(args.next().expect("usage: identify CENSUS.jsonl GROUP_ID"));
    let group_id = args.next().expect("usage: identify CENSUS.jsonl GROUP_ID");
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data");
    let cat = load_default(&data.join("groups.jsonl")).unwrap();
    let cg = cat.groups.iter().find(|g| g.id == group_id).expect("group id");
    let g = &cg.group;
    eprintln!("group {} ({}) order {}", cg.id, cg.name, g.order());

    let text = std::fs::read_to_string(&census_path).unwrap();
    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: Record = serde_json::from_str(line).unwrap();
        let reduced = KnotPresentation {
            generators: rec.generators,
            relators: rec.relators.clone(),
            meridian: vec![1],
            longitude: None,
            phi: rec.phi.clone(),
            source: SourceTag::Reduced,
        };
        reduced.validate().unwrap();
        let t = std::time::Instant::now();
        // Enumerate on the Wirtinger presentation (fast conjugation-relator
        // path) when the kept-generator map is available; otherwise fall back
        // to general backtracking on the reduced presentation itself.
        let (epis, kept) = match &rec.kept {
            Some(kept) => {
                let wir = wirtinger_from_pd(&PDCode(rec.pd.clone())).unwrap();
                (enumerate_homs(&wir, g, true), Some(kept.clone()))
            }
            None => (enumerate_homs(&reduced, g, true), None),
        };
        if epis.is_empty() {
            eprintln!("{}: no epis ({:?})", rec.key, t.elapsed());
            continue;
        }
        let orbits = reduce_by_conjugation(&epis, g).unwrap();
        eprintln!(
            "{}: {} epis, {} orbits ({:?})",
            rec.key,
            epis.len(),
            orbits.len(),
            t.elapsed()
        );
        let mut zero_orbits = 0usize;
        for o in &orbits {
            // Restrict the Wirtinger hom to the generators kept by the
            // Tietze reduction; the reduced relators must still hold.
            let images: Vec<usize> = match &kept {
                Some(kept) => kept.iter().map(|&k| o.rep.images[k - 1]).collect(),
                None => o.rep.images.clone(),
            };
            let setup =
                TwistedSetup::new(&reduced, g, &images, Representation::Regular).unwrap();
            let t2 = std::time::Instant::now();
            let res = twisted_alexander(&setup, EngineMode::Screen).unwrap();
            if res.is_zero() {
                zero_orbits += 1;
                eprintln!("  ZERO orbit images {:?} ({:?})", images, t2.elapsed());
            }
        }
        if zero_orbits > 0 {
            println!("VANISHES {} ({} zero orbits)", rec.key, zero_orbits);
        }
    }
}

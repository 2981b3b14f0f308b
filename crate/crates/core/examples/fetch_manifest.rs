//! Builds a local manifest, fetches it into a cache and fetches it again,
//! which is served from the cache. `MLUFS_CACHE_DIR` overrides the cache.

use std::fs;

use mlufs::dataset::fetch::sha256_hex;
use mlufs::dataset::{fetch_manifest, FetchOptions, ManifestEntry, ManifestLabels};

const ARFF: &str = "@relation 'tiny: -C -2'
@attribute f0 numeric
@attribute f1 numeric
@attribute l0 {0,1}
@attribute l1 {0,1}
@data
0.1,0.2,1,0
0.3,0.1,0,1
0.5,0.9,1,1
0.7,0.4,0,0
0.2,0.8,1,0
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let work = tempfile::tempdir()?;
    fs::write(work.path().join("tiny.arff"), ARFF)?;
    let entries = vec![
        ManifestEntry {
            name: "tiny".into(),
            url: "tiny.arff".into(),
            sha256: sha256_hex(ARFF.as_bytes()),
            labels: ManifestLabels::Header(None),
            arff: None,
        },
        ManifestEntry {
            name: "corrupt".into(),
            url: "tiny.arff".into(),
            sha256: "0".repeat(64),
            labels: ManifestLabels::Last(2),
            arff: None,
        },
    ];
    let manifest = work.path().join("manifest.json");
    fs::write(&manifest, serde_json::to_string_pretty(&entries)?)?;

    let mut opts = FetchOptions::from_env(false);
    if std::env::var_os(mlufs::dataset::fetch::CACHE_ENV).is_none() {
        opts.cache_dir = work.path().join("cache");
    }
    for round in 1..=2 {
        for o in fetch_manifest(&manifest, &opts)? {
            match o.result {
                Ok(ds) => {
                    println!("round {round}: {} ok ({} rows), transferred: {}", o.name, ds.n_instances(), o.downloaded)
                }
                Err(e) => println!("round {round}: {} failed: {e}", o.name),
            }
        }
    }
    Ok(())
}

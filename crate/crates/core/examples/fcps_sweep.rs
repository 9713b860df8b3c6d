//! Per-seed error of both clustering modes on one FCPS-style set.
//!
//! cargo run --release -p dbs-core --example fcps_sweep -- Hepta 5

use std::process::ExitCode;
use std::time::Instant;

use dbs_core::clustering::{tendency_gap, ClusterMode, DEFAULT_GAP_MERGES};
use dbs_core::data::{euclidean_dissimilarity, generate_fcps, FcpsName};
use dbs_core::evaluation::error_rate;
use dbs_core::pswarm::PswarmParams;
use dbs_core::DbsModel;

fn main() -> ExitCode {
    let mut args = std::env::args().skip(1);
    let name: FcpsName = match args.next().map(|s| s.parse()) {
        Some(Ok(n)) => n,
        _ => {
            eprintln!("usage: fcps_sweep <name> [seeds]");
            return ExitCode::from(2);
        }
    };
    let seeds: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(3);
    let k = name.classes().unwrap_or(2);
    for seed in 1..=seeds {
        let ds = generate_fcps(name, seed);
        let t = Instant::now();
        let model = match DbsModel::build(euclidean_dissimilarity(&ds), &PswarmParams::default(), seed) {
            Ok(m) => m,
            Err(e) => {
                eprintln!("seed {seed}: {e}");
                return ExitCode::FAILURE;
            }
        };
        let mut line = format!("{name} seed {seed} ({:.1}s)", t.elapsed().as_secs_f64());
        for mode in [ClusterMode::Connected, ClusterMode::Compact] {
            let r = model.cluster(k, mode).expect("cut");
            if let Some(truth) = ds.labels() {
                line += &format!(" {mode} error {:.3}", error_rate(&r.labels, truth).expect("score"));
            }
        }
        let gap = tendency_gap(model.dendrogram(ClusterMode::Connected).expect("linkage"), DEFAULT_GAP_MERGES).expect("gap");
        line += &format!(" gap {gap:.3}");
        println!("{line}");
    }
    ExitCode::SUCCESS
}

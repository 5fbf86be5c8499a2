//! Parses problem files, decides them, and checks the JSON reports.
//!
//! ```text
//! cargo run --example problem_files -- problems/abs_sum.bigo
//! ```

use std::path::PathBuf;

use bigo::problem::parse_problem;
use bigo::report::{self, VerdictReport};

fn main() {
    let mut files: Vec<PathBuf> = std::env::args().skip(1).map(PathBuf::from).collect();
    if files.is_empty() {
        let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../problems");
        files = std::fs::read_dir(dir)
            .expect("problems directory")
            .map(|e| e.unwrap().path())
            .filter(|p| p.extension().is_some_and(|x| x == "bigo"))
            .collect();
        files.sort();
    }
    for path in files {
        let text = std::fs::read_to_string(&path).expect("readable file");
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let problem = match parse_problem(&text) {
            Ok(p) => p,
            Err(e) => {
                println!("{name}: {e}");
                continue;
            }
        };
        match report::run(&problem) {
            Ok(r) => {
                let back = VerdictReport::from_json(&r.to_json()).unwrap();
                println!(
                    "{name:<24} {:<8} {:>8.3} ms  reparsed report verifies: {}",
                    r.verdict,
                    r.ms,
                    report::verify(&back, &problem)
                );
            }
            Err(e) => println!("{name:<24} error: {e}"),
        }
    }

    let p = parse_problem("theory signed\nprove f = O(f + g)").unwrap();
    println!("\n{p}\n{}", report::run(&p).unwrap().to_json());
}

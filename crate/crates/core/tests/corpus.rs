//! Replays the fuzz corpus seeds through the fuzz-target properties on stable.

use std::fs;
use std::path::PathBuf;

use lfock::appendix::Family;
use lfock::params::{parse_basis, parse_complex, parse_grid, parse_truncation};
use lfock::sweep::SweepResult;

fn seeds(target: &str) -> Vec<(PathBuf, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fuzz/corpus")
        .join(target);
    let mut out: Vec<(PathBuf, String)> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .filter_map(|p| {
            fs::read(&p)
                .ok()
                .and_then(|b| String::from_utf8(b).ok())
                .map(|s| (p, s))
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn params_seeds() {
    let mut accepted = 0;
    for (path, s) in seeds("params") {
        if let Ok(z) = parse_complex(&s) {
            assert!(z.re.is_finite() && z.im.is_finite(), "{}", path.display());
            accepted += 1;
        }
        if let Ok(g) = parse_grid(&s) {
            let v = g.values();
            assert_eq!(v.len(), g.steps);
            assert!(v.iter().all(|x| x.is_finite()));
            assert_eq!(parse_grid(&g.to_string()).unwrap(), g);
            accepted += 1;
        }
        accepted += usize::from(parse_truncation(&s).is_ok());
        accepted += usize::from(parse_basis(&s).is_ok());
        accepted += usize::from(Family::parse(&s).is_ok());
    }
    assert!(accepted > 10);
}

#[test]
fn sweep_csv_seeds() {
    let mut decoded = 0;
    for (path, s) in seeds("sweep_csv") {
        if let Ok(r) = SweepResult::from_csv(&s) {
            let text = r.to_csv().unwrap();
            assert_eq!(
                SweepResult::from_csv(&text).unwrap(),
                r,
                "{}",
                path.display()
            );
            if path
                .file_name()
                .unwrap()
                .to_str()
                .unwrap()
                .starts_with("fig")
            {
                assert_eq!(
                    text,
                    s,
                    "CLI output re-encodes byte for byte: {}",
                    path.display()
                );
            }
            decoded += 1;
        }
    }
    assert!(decoded >= 4);
}

#[test]
fn sweep_json_seeds() {
    let mut decoded = 0;
    for (path, s) in seeds("sweep_json") {
        if let Ok(r) = SweepResult::from_json(&s) {
            assert_eq!(
                SweepResult::from_json(&r.to_json().unwrap()).unwrap(),
                r,
                "{}",
                path.display()
            );
            decoded += 1;
        }
    }
    assert!(decoded >= 3);
}

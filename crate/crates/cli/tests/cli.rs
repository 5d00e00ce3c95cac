// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn affnet(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_affnet"))
        .args(args)
        .current_dir(cwd)
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMALL: &str = "actor,attribute,kind,weight\n\
    r1,Church,affiliation,1\n\
    r1,Union,affiliation,1\n\
    r2,Church,affiliation,1\n\
    r2,Union,affiliation,\n\
    r3,Oil,attitude,1\n\
    r3,Racist,attitude,2\n\
    r4,Oil,attitude,1\n";

#[test]
fn synth_then_detect_table_feeds_mix() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = affnet(
        &[
            "synth", "--seed", "4", "--actors", "120", "--output", "s.csv",
        ],
        d,
    );
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["s.csv", "s.catalog", "s.planted.csv"] {
        assert!(d.join(f).is_file(), "{f}");
    }
    let o = affnet(
        &[
            "detect", "--input", "s.csv", "--out", "table", "--output", "t.csv",
        ],
        d,
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let table = fs::read_to_string(d.join("t.csv")).unwrap();
    assert!(table.starts_with("attribute,kind,s\n"));
    assert!(table.contains("\nComputed Modularity,modularity,"));

    let o = affnet(&["mix", "--memberships", "t.csv", "--out", "table"], d);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(String::from_utf8(o.stdout).unwrap(), table);

    let o = affnet(&["mix", "--memberships", "s.planted.csv"], d);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["datasets"]["planted"]["mixing"]["mixed_count"], 2);
}

#[test]
fn detect_json_report() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("small.csv"), SMALL).unwrap();
    let o = affnet(
        &["detect", "--input", "small.csv", "--algorithm", "brute"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let d = &v["datasets"]["small"];
    assert_eq!(d["membership"]["Church"], d["membership"]["Union"]);
    assert_ne!(d["membership"]["Church"], d["membership"]["Oil"]);
    assert_eq!(d["mixing"]["mixed_count"], 0);
    assert_eq!(v["summary"]["fully_segregated"][0], "small");
}

#[test]
fn verify_reports_gap() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("small.csv"), SMALL).unwrap();
    let o = affnet(&["verify", "--input", "small.csv"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("gap = 0\n"), "{text}");

    let o = affnet(
        &["verify", "--input", "small.csv", "--brute-max-n", "5"],
        dir.path(),
    );
    assert!(!o.status.success());
    assert!(stderr(&o).contains("limited to 5"));
}

#[test]
fn failures_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("empty.csv"), "actor,attribute,kind,weight\n").unwrap();
    let o = affnet(&["detect", "--input", "empty.csv"], d);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("EmptyGraph"));

    fs::write(d.join("typo.csv"), "actor,attribute,kind\na,b,affil\n").unwrap();
    let o = affnet(&["detect", "--input", "typo.csv"], d);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("typo.csv:2"), "{}", stderr(&o));

    let o = affnet(
        &["detect", "--input", "small.csv", "--algorithm", "spectral"],
        d,
    );
    assert!(!o.status.success());

    fs::write(d.join("small.csv"), SMALL).unwrap();
    let o = affnet(
        &[
            "detect",
            "--input",
            "small.csv",
            "--algorithm",
            "anneal",
            "--cooling",
            "1.5",
        ],
        d,
    );
    assert!(!o.status.success());
    assert!(stderr(&o).contains("cooling"));
}

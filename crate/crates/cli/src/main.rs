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
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use affnet_core::io::{read_memberships, write_catalog, write_incidence, write_memberships};
use affnet_core::pipeline::{analyze_memberships, run_pipeline, Report};
use affnet_core::{
    brute_force, build_graph, generate_synthetic, greedy, membership_table, Algorithm,
    AnnealConfig, BlockSpec, DatasetAssignment, MembershipTable, OptimizerConfig, SynthConfig,
};

#[derive(Parser)]
#[command(
    name = "affnet",
    version,
    about = "Communities in affiliation networks with attitudinal attributes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, ValueEnum)]
enum AlgorithmArg {
    Brute,
    Greedy,
    Anneal,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Brute => Algorithm::BruteForce,
            AlgorithmArg::Greedy => Algorithm::Greedy,
            AlgorithmArg::Anneal => Algorithm::Anneal,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    /// JSON report
    Json,
    /// Membership table in CSV form
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Detect communities in one or more incidence CSV files.
    Detect {
        /// Incidence CSV; repeat for several datasets.
        #[arg(long = "input", required = true)]
        inputs: Vec<PathBuf>,
        /// Catalog sidecar applied to every input (default: `<input>.catalog`
        /// if present, else labels in order of appearance).
        #[arg(long)]
        catalog: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "greedy")]
        algorithm: AlgorithmArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        restarts: usize,
        #[arg(long, default_value_t = 12)]
        brute_max_n: usize,
        #[arg(long, default_value_t = 0.25)]
        initial_temperature: f64,
        #[arg(long, default_value_t = 0.95)]
        cooling: f64,
        /// Proposals per temperature level (default: 50 per vertex).
        #[arg(long)]
        steps_per_temperature: Option<usize>,
        #[arg(long, default_value_t = 1e-4)]
        min_temperature: f64,
        #[arg(long, value_enum, default_value = "json")]
        out: OutputFormat,
        /// Write to this file instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Generate a synthetic survey with planted blocks.
    Synth {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 400)]
        actors: usize,
        /// Block as `AFFILIATIONS,ATTITUDES,SHARE`; repeat per block.
        /// Default: `4,4,0.5` and `4,1,0.5`.
        #[arg(long = "block", value_parser = parse_block)]
        blocks: Vec<(usize, usize, f64)>,
        #[arg(long, default_value_t = 0.9)]
        p_in: f64,
        #[arg(long, default_value_t = 0.05)]
        p_out: f64,
        /// Incidence CSV to write; the catalog goes to `<stem>.catalog` and
        /// the planted memberships to `<stem>.planted.csv`.
        #[arg(long)]
        output: PathBuf,
    },
    /// Mixing analysis of given memberships, skipping detection.
    Mix {
        #[arg(long)]
        memberships: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        out: OutputFormat,
    },
    /// Compare greedy against exhaustive search on a small input.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        catalog: Option<PathBuf>,
        #[arg(long, default_value_t = 12)]
        brute_max_n: usize,
    },
}

fn parse_block(s: &str) -> Result<(usize, usize, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    let [a, t, share] = parts.as_slice() else {
        return Err("expected AFFILIATIONS,ATTITUDES,SHARE".into());
    };
    Ok((
        a.trim().parse().map_err(|e| format!("affiliations: {e}"))?,
        t.trim().parse().map_err(|e| format!("attitudes: {e}"))?,
        share.trim().parse().map_err(|e| format!("share: {e}"))?,
    ))
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().lock().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn render(report: &Report, table: &MembershipTable, out: OutputFormat) -> Result<String> {
    Ok(match out {
        OutputFormat::Json => report.to_json()?,
        OutputFormat::Table => write_memberships(table)?,
    })
}

fn load(inputs: &[PathBuf], catalog: Option<&Path>) -> Result<Vec<affnet_core::io::SurveyDataset>> {
    inputs
        .iter()
        .map(|p| {
            affnet_core::io::parse_incidence_csv(p, catalog)
                .with_context(|| format!("reading {}", p.display()))
        })
        .collect()
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Detect {
            inputs,
            catalog,
            algorithm,
            seed,
            restarts,
            brute_max_n,
            initial_temperature,
            cooling,
            steps_per_temperature,
            min_temperature,
            out,
            output,
        } => {
            let datasets = load(&inputs, catalog.as_deref())?;
            let cfg = OptimizerConfig {
                algorithm: algorithm.into(),
                seed,
                restarts,
                brute_max_n,
                anneal: AnnealConfig {
                    initial_temperature,
                    cooling,
                    steps_per_temperature,
                    min_temperature,
                },
            };
            let result = run_pipeline(&datasets, &cfg)?;
            for (d, det) in datasets.iter().zip(&result.detections) {
                eprintln!(
                    "{}: {} communities, Q = {:.4} ({})",
                    d.name,
                    det.partition.community_count(),
                    det.score.q,
                    det.algorithm
                );
            }
            emit(
                output.as_deref(),
                &render(&result.report, &result.table, out)?,
            )
        }
        Command::Synth {
            seed,
            actors,
            blocks,
            p_in,
            p_out,
            output,
        } => {
            let mut cfg = SynthConfig {
                seed,
                n_actors: actors,
                p_in,
                p_out,
                ..Default::default()
            };
            if !blocks.is_empty() {
                cfg.blocks = BlockSpec::sequence(&blocks);
            }
            let synth = generate_synthetic(&cfg)?;
            let ds = &synth.dataset;
            fs::write(&output, write_incidence(&ds.records)?)
                .with_context(|| format!("writing {}", output.display()))?;
            fs::write(output.with_extension("catalog"), write_catalog(&ds.catalog))?;
            let planted = DatasetAssignment {
                name: "planted".into(),
                communities: synth.planted.iter().map(|(l, &b)| (l.clone(), b)).collect(),
                dropped: vec![],
                q: None,
            };
            let table = membership_table(&ds.catalog, &[planted])?;
            fs::write(
                output.with_extension("planted.csv"),
                write_memberships(&table)?,
            )?;
            eprintln!(
                "{}: {} actors, {} attributes, {} ties",
                ds.name,
                actors,
                ds.catalog.len(),
                ds.records.len()
            );
            Ok(())
        }
        Command::Mix { memberships, out } => {
            let file = read_memberships(&memberships)
                .with_context(|| format!("reading {}", memberships.display()))?;
            let (report, table) = analyze_memberships(&file)?;
            for (name, d) in &report.datasets {
                eprintln!("{name}: mixed_count = {}", d.mixing.mixed_count);
            }
            emit(None, &render(&report, &table, out)?)
        }
        Command::Verify {
            input,
            catalog,
            brute_max_n,
        } => {
            let ds = &load(std::slice::from_ref(&input), catalog.as_deref())?[0];
            let built = build_graph(&ds.records, &ds.catalog)?;
            let exact = brute_force(&built.graph, brute_max_n)?;
            let approx = greedy(&built.graph)?;
            let gap = exact.score.q - approx.score.q;
            println!("n = {}", built.graph.vertex_count());
            println!("brute_force Q = {}", exact.score.q);
            println!("greedy Q = {}", approx.score.q);
            println!("gap = {gap}");
            if approx.score.scaled() > exact.score.scaled() {
                bail!("greedy exceeded the exhaustive optimum");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Args;

use crate::files::{pretty_json, write_file};
use crate::report::{render_report, Metadata, ScoreReport};
use crate::GlobalOpts;

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Score JSON files from `score` or `sweep`.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
}

pub fn run(global: &GlobalOpts, args: ReportArgs) -> Result<ExitCode> {
    let mut reports = Vec::with_capacity(args.inputs.len());
    for path in &args.inputs {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        let report: ScoreReport =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        report
            .validate()
            .with_context(|| format!("checking {}", path.display()))?;
        reports.push(report);
    }
    let merged = ScoreReport::merge(reports, Metadata::now(global.seed));
    let text = render_report(&merged);
    write_file(&global.out_dir.join("report.json"), &pretty_json(&merged))?;
    write_file(&global.out_dir.join("report.txt"), &text)?;
    print!("{text}");
    Ok(ExitCode::SUCCESS)
}

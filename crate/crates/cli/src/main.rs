mod config;
mod exit;
mod manifest;

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rumix::data::{load_path, LoadOptions};
use rumix::eval::{benchmark, cross_validate, EvalReport};
use rumix::{model, Dataset, Mode, RawTable};

use config::{EvalFlags, LearnerFlags, OutputFormat, RunConfig};
use exit::CliError;

#[derive(Debug, Parser)]
#[command(name = "rumix", version, about = "Bit-vector rule induction with rule mutation and composition")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train on a whole dataset and write the classifier as JSON.
    Fit {
        dataset: PathBuf,
        #[arg(long)]
        model: PathBuf,
        /// Class column; defaults to the last column.
        #[arg(long)]
        class: Option<String>,
        #[command(flatten)]
        learner: LearnerFlags,
    },
    /// Classify every row of a dataset with a saved classifier.
    Predict {
        dataset: PathBuf,
        #[arg(long)]
        model: PathBuf,
        /// Output CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        class: Option<String>,
    },
    /// k-fold cross-validation on one dataset.
    Eval {
        dataset: PathBuf,
        #[arg(long)]
        class: Option<String>,
        #[command(flatten)]
        learner: LearnerFlags,
        #[command(flatten)]
        eval: EvalFlags,
    },
    /// Cross-validate every dataset of a manifest in both modes.
    Bench {
        manifest: PathBuf,
        #[command(flatten)]
        learner: LearnerFlags,
        #[command(flatten)]
        eval: EvalFlags,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = init_threads().and_then(|()| match cli.command {
        Command::Fit { dataset, model, class, learner } => cmd_fit(&dataset, &model, class, &learner),
        Command::Predict { dataset, model, out, class } => cmd_predict(&model, &dataset, out.as_deref(), class),
        Command::Eval { dataset, class, learner, eval } => cmd_eval(&dataset, class, &learner, &eval),
        Command::Bench { manifest, learner, eval } => cmd_bench(&manifest, &learner, &eval),
    });
    match result {
        Ok(()) => ExitCode::from(exit::OK as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}

/// `RUMIX_THREADS` caps the worker pool.
fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("RUMIX_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::input(format!("RUMIX_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::input(format!("cannot start {n} workers: {e}")))
}

fn load_table(path: &Path, class: Option<String>) -> Result<RawTable, CliError> {
    if !path.is_file() {
        return Err(CliError::input(format!("dataset not found: {}", path.display())));
    }
    let opts = LoadOptions { class_column: class, ..LoadOptions::default() };
    Ok(load_path(path, &opts)?)
}

fn cmd_fit(dataset: &Path, model_out: &Path, class: Option<String>, flags: &LearnerFlags) -> Result<(), CliError> {
    let cfg = RunConfig::from_flags(flags, &EvalFlags::default())?.learner()?;
    let table = load_table(dataset, class)?;
    let cuts = rumix::discretize::discretize_table(&table);
    let schema = rumix::data::build_schema(&table, &cuts)?;
    let data = Dataset::encode(&table, schema)?;
    let clf = rumix::learner::fit(&data, &cfg)?;
    model::save(&clf, model_out)?;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{}: {} rules ({} mode), model written to {}",
        table.name,
        clf.rules.len(),
        cfg.mode,
        model_out.display()
    );
    for (rule, text) in clf.rules.iter().zip(clf.render_rules()).take(5) {
        let _ = writeln!(out, "  [{:.4}] {text}", rule.fitness.unwrap_or_default());
    }
    print!("{out}");
    Ok(())
}

fn cmd_predict(model_path: &Path, dataset: &Path, out: Option<&Path>, class: Option<String>) -> Result<(), CliError> {
    let clf: rumix::Classifier = model::load(model_path)
        .map_err(|e| CliError::input(format!("cannot load model {}: {e}", model_path.display())))?;
    let table = load_table(dataset, class)?;
    let enc = clf.schema.encoder_for(&table).map_err(|e| CliError::schema(e.to_string()))?;
    let sink: Box<dyn Write> = match out {
        Some(p) => Box::new(fs::File::create(p)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink);
    let csv_err = |e: csv::Error| CliError::input(e.to_string());
    w.write_record(["row_id", "predicted", "matched_rule"]).map_err(csv_err)?;
    let mut correct = 0;
    for row in 0..table.n_rows() {
        let bits = enc.encode_features(&table, row, false)?;
        let p = clf.predict_bits(&bits);
        let label = clf.class_label(p.class_index);
        if label == table.class_label(row) {
            correct += 1;
        }
        let matched = p.rule.map_or_else(|| "default".to_string(), |i| clf.rules[i].seq.to_string());
        w.write_record([row.to_string().as_str(), label, matched.as_str()]).map_err(csv_err)?;
    }
    w.flush()?;
    eprintln!(
        "{} rows, {:.2}% agree with the class column",
        table.n_rows(),
        100.0 * correct as f64 / table.n_rows().max(1) as f64
    );
    Ok(())
}

fn fold_csv(report: &EvalReport) -> String {
    let mut s = String::from("fold,n_train,n_test,n_correct,accuracy,n_rules,n_default\n");
    for f in &report.folds {
        let _ = writeln!(
            s,
            "{},{},{},{},{:.2},{},{}",
            f.fold,
            f.n_train,
            f.n_test,
            f.n_correct,
            100.0 * f.accuracy,
            f.n_rules,
            f.n_default
        );
    }
    let _ = writeln!(s, "mean,,,,{},{:.1},", report.mean_percent(), report.mean_rules);
    s
}

fn fold_markdown(report: &EvalReport) -> String {
    let mut s = format!(
        "## {} ({}, {}-fold{}, seed {})\n\n| fold | test rows | accuracy | rules | default |\n|---|---|---|---|---|\n",
        report.dataset,
        report.mode,
        report.k,
        if report.stratified { ", stratified" } else { "" },
        report.seed
    );
    for f in &report.folds {
        let _ =
            writeln!(s, "| {} | {} | {:.2} | {} | {} |", f.fold, f.n_test, 100.0 * f.accuracy, f.n_rules, f.n_default);
    }
    let _ = writeln!(s, "| mean | | **{}** | {:.1} | |", report.mean_percent(), report.mean_rules);
    s
}

fn write_out(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn cmd_eval(dataset: &Path, class: Option<String>, learner: &LearnerFlags, eval: &EvalFlags) -> Result<(), CliError> {
    let run = RunConfig::from_flags(learner, eval)?;
    let cv = run.cv()?;
    let table = load_table(dataset, class)?;
    let report = cross_validate(&table, &cv)?;
    println!(
        "{} {} {}-fold: {} (rules {}..{}, {:.1}s)",
        report.dataset,
        report.mode,
        report.k,
        report.mean_percent(),
        report.min_rules,
        report.max_rules,
        report.wall_time.as_secs_f64()
    );
    let stem = format!("{}_{}", report.dataset, report.mode);
    for fmt in &run.formats {
        let (ext, body) = match fmt {
            OutputFormat::Csv => ("csv", fold_csv(&report)),
            OutputFormat::Md => ("md", fold_markdown(&report)),
            OutputFormat::Json => {
                ("json", serde_json::to_string_pretty(&report).map_err(|e| CliError::input(e.to_string()))? + "\n")
            }
        };
        match &run.out_dir {
            Some(dir) => write_out(dir, &format!("{stem}.{ext}"), &body)?,
            None if *fmt == OutputFormat::Md => print!("\n{body}"),
            None => {}
        }
    }
    Ok(())
}

fn cmd_bench(manifest_path: &Path, learner: &LearnerFlags, eval: &EvalFlags) -> Result<(), CliError> {
    let run = RunConfig::from_flags(learner, eval)?;
    let cv = run.cv()?;
    let manifest = manifest::load(manifest_path)?;
    let modes = match run.mode {
        Some(m) => vec![m],
        None => vec![Mode::Rumc, Mode::Racer],
    };
    let mut table = benchmark(&manifest.datasets, &modes, &cv)?;
    if let Some((columns, published)) = &manifest.published {
        table.attach_published(columns, published);
    }
    let out_dir = run.out_dir.clone().unwrap_or_else(|| PathBuf::from("bench-results"));
    // wall times vary between runs, so they stay out of the tables
    let mut timings = String::new();
    for row in &table.rows {
        for (mode, cell) in modes.iter().zip(&row.cells) {
            match cell {
                Ok(r) => {
                    let _ = writeln!(timings, "{} {mode} {:.3}s", row.dataset, r.wall_time.as_secs_f64());
                }
                Err(e) => {
                    let _ = writeln!(timings, "{} {mode} FAILED: {e}", row.dataset);
                }
            }
        }
    }
    eprint!("{timings}");
    write_out(&out_dir, "bench_timings.log", &timings)?;
    let markdown = table.to_markdown();
    for fmt in &run.formats {
        match fmt {
            OutputFormat::Csv => write_out(&out_dir, "bench.csv", &table.to_csv()?)?,
            OutputFormat::Md => write_out(&out_dir, "bench.md", &markdown)?,
            OutputFormat::Json => {
                let reports: Vec<&EvalReport> = table.rows.iter().flat_map(|r| r.cells.iter().flatten()).collect();
                let json = serde_json::to_string_pretty(&reports).map_err(|e| CliError::input(e.to_string()))?;
                write_out(&out_dir, "bench.json", &(json + "\n"))?
            }
        }
    }
    print!("{markdown}");
    if table.n_succeeded() == 0 {
        return Err(CliError::input("every dataset in the manifest failed"));
    }
    Ok(())
}

use std::process;

use clap::Parser;
use dtree_bench::config::{ModelSpec, OutputFormat, RunConfig, StorageKind};
use dtree_bench::runner::{execute, ExitCode};
use dtree_bench::{report, shapes};

/// Explore a model's state space on a chosen store and report time, memory
/// and state-length statistics.
#[derive(Debug, Parser)]
#[command(name = "dtree-bench", version)]
struct Cli {
    /// counters, process_tree, process_tree_recursive or dyn_alloc
    #[arg(long, default_value = "counters")]
    model: String,

    /// Model parameter as key=value (repeatable)
    #[arg(long = "model-arg", value_name = "K=V")]
    model_args: Vec<String>,

    #[arg(long, value_enum, default_value_t = StorageKind::Dtree)]
    storage: StorageKind,

    /// log2 of the root-set capacity
    #[arg(long, default_value_t = 20)]
    scale_root: u32,

    /// log2 of the data-set capacity (at most 32)
    #[arg(long, default_value_t = 20)]
    scale_data: u32,

    /// log2 of the map store capacity (cchm and treedbs_x_cchm)
    #[arg(long, default_value_t = 20)]
    scale_sub: u32,

    /// Fixed tree length for treedbs_pad and treedbs_x_cchm
    #[arg(long, value_name = "L")]
    pad_length: Option<usize>,

    #[arg(long, default_value_t = 1)]
    threads: usize,

    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    format: OutputFormat,

    /// Also emit the state-length histogram
    #[arg(long)]
    histogram: bool,

    /// Compare layout node counts for a scenario file (or `fig34`) instead
    /// of running a search
    #[arg(long, value_name = "FILE")]
    shapes: Option<String>,
}

fn fail(code: ExitCode, msg: impl std::fmt::Display) -> ! {
    eprintln!("dtree-bench: {msg}");
    process::exit(code as i32)
}

fn main() {
    let cli = Cli::try_parse().unwrap_or_else(|e| {
        let code = if e.use_stderr() {
            ExitCode::InvalidConfig as i32
        } else {
            0
        };
        let _ = e.print();
        process::exit(code)
    });

    if let Some(source) = &cli.shapes {
        let vectors =
            shapes::load_scenario(source).unwrap_or_else(|e| fail(ExitCode::InvalidConfig, e));
        print!(
            "{}",
            report::render_shapes(&shapes::compare(&vectors), cli.format)
        );
        return;
    }

    let model = ModelSpec::parse(&cli.model, &cli.model_args)
        .unwrap_or_else(|e| fail(ExitCode::InvalidConfig, e));
    let cfg = RunConfig {
        model,
        storage: cli.storage,
        scale_root: cli.scale_root,
        scale_data: cli.scale_data,
        scale_sub: cli.scale_sub,
        pad_length: cli.pad_length,
        threads: cli.threads,
        format: cli.format,
        histogram: cli.histogram,
    };
    let ex = execute(&cfg);
    if let Some(report) = &ex.report {
        print!("{}", report.render(cfg.format, cfg.histogram));
    }
    if let Some(error) = ex.error {
        fail(ex.code, error);
    }
}

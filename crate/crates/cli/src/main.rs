use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use stmod::ff::{Field, FieldSpec};
use stmod::group::{GroupData, GroupDescriptor, GroupPreset, Module};
use stmod::harness::bench::old_sphere;
use stmod::harness::{bench_replacement, run_experiment, BenchTask, ExperimentConfig, HarnessError, ModuleFile};
use stmod::projective::fitting_decomposition;
use stmod::stable::StableCategory;

#[derive(Parser, Debug)]
#[command(name = "stmod", version, about = "Computations in the stable module category of kG")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dimension of S^n k, or of S^n applied to a module file.
    Suspend(Common),
    /// Generating length of a module for the sphere range [-m, m].
    Gel(Common),
    /// Projective-free summand of a module file, or of the old-style S^n k.
    Projfree(Common),
    /// Indecomposable projectives of kG, or the summands of a module file.
    Decompose(Common),
    /// A seeded random module built from n cofibre steps.
    Random(Common),
    /// Seeded batch of random modules with their generating lengths.
    Experiment(Common),
    /// Minimal versus free-module replacement.
    Bench(BenchArgs),
    /// Validate a module file.
    Check(Common),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Field such as GF3 or GF4.
    #[arg(long)]
    field: Option<String>,
    /// Group preset such as C9, Q8, A4 or C3xS3.
    #[arg(long)]
    group: Option<String>,
    /// Module file.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// Output path.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Degree or number of steps.
    #[arg(short = 'n', allow_negative_numbers = true)]
    n: Option<i64>,
    /// Sphere range.
    #[arg(short = 'm')]
    m: Option<u32>,
    /// Summands per step.
    #[arg(short = 's')]
    s: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    /// Maximum number of ghost steps.
    #[arg(long)]
    cap: Option<usize>,
}

#[derive(Args, Debug, Clone)]
struct BenchArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value_t = Task::Suspend)]
    task: Task,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Task {
    Suspend,
    Projfree,
    Replace,
}

fn usage(msg: impl Into<String>) -> HarnessError {
    HarnessError::Usage(msg.into())
}

impl Common {
    fn group(&self) -> Result<Arc<GroupData>, HarnessError> {
        let name = self.group.as_deref().ok_or_else(|| usage("--group is required"))?;
        let preset: GroupPreset = name.parse()?;
        Ok(Arc::new(GroupData::from_preset(&preset)?))
    }

    fn field(&self) -> Result<Field, HarnessError> {
        let name = self.field.as_deref().ok_or_else(|| usage("--field is required"))?;
        Ok(Field::new(name.parse::<FieldSpec>()?))
    }

    fn category(&self) -> Result<StableCategory, HarnessError> {
        Ok(StableCategory::new(&self.group()?, &self.field()?)?)
    }

    fn no_input(&self, cmd: &str) -> Result<(), HarnessError> {
        if self.input.is_some() {
            return Err(usage(format!("{cmd} does not take --in")));
        }
        Ok(())
    }

    fn no_group(&self, cmd: &str) -> Result<(), HarnessError> {
        if self.group.is_some() || self.field.is_some() {
            return Err(usage(format!("{cmd}: --group and --field come from the --in file")));
        }
        Ok(())
    }

    fn json_only(&self, cmd: &str) -> Result<(), HarnessError> {
        if self.format == Format::Csv {
            return Err(usage(format!("{cmd} has no csv output")));
        }
        Ok(())
    }

    /// Module from `--in`, with a category over its group and field.
    fn input_module(&self, cmd: &str) -> Result<Option<(StableCategory, Module)>, HarnessError> {
        let Some(path) = &self.input else { return Ok(None) };
        self.no_group(cmd)?;
        let m = ModuleFile::read(path)?.to_module()?;
        let cat = StableCategory::new(m.group(), m.field())?;
        Ok(Some((cat, m)))
    }

    fn n(&self, cmd: &str) -> Result<i64, HarnessError> {
        self.n.ok_or_else(|| usage(format!("{cmd} needs -n")))
    }

    fn steps(&self, cmd: &str) -> Result<usize, HarnessError> {
        let n = self.n(cmd)?;
        usize::try_from(n).map_err(|_| usage(format!("{cmd}: -n must be non-negative")))
    }
}

/// Emitted text plus an optional module file for `--out`.
struct Output {
    text: String,
    module: Option<ModuleFile>,
}

impl Output {
    fn json(v: Value) -> Output {
        Output { text: serde_json::to_string_pretty(&v).expect("json values serialize"), module: None }
    }
}

fn context(cat: &StableCategory) -> Value {
    json!({ "group": cat.group().name(), "field": cat.field().to_string() })
}

fn merge(mut a: Value, b: Value) -> Value {
    if let (Value::Object(a), Value::Object(b)) = (&mut a, b) {
        a.extend(b);
    }
    a
}

fn suspend(c: &Common) -> Result<Output, HarnessError> {
    c.json_only("suspend")?;
    let n = c.n("suspend")?;
    let (cat, start) = match c.input_module("suspend")? {
        Some(pair) => pair,
        None => {
            let cat = c.category()?;
            let k = cat.trivial().clone();
            (cat, k)
        }
    };
    let result = if c.input.is_none() { cat.sphere(n)? } else { cat.suspension_power(&start, n)? };
    let mut out = Output::json(merge(context(&cat), json!({ "n": n, "input_dim": start.dim(), "dim": result.dim() })));
    out.module = Some(ModuleFile::from_module(&result, Some(format!("S^{n}"))));
    Ok(out)
}

fn gel(c: &Common) -> Result<Output, HarnessError> {
    c.json_only("gel")?;
    let (cat, m) = match c.input_module("gel")? {
        Some(pair) => pair,
        None => {
            let cat = c.category()?;
            let m = cat.sphere(c.n.unwrap_or(0))?;
            (cat, m)
        }
    };
    let report = cat.generating_length(&m, c.m.unwrap_or(0), c.cap)?;
    let v = serde_json::to_value(&report).expect("reports serialize");
    Ok(Output::json(merge(context(&cat), merge(json!({ "dim": m.dim() }), v))))
}

fn projfree(c: &Common) -> Result<Output, HarnessError> {
    c.json_only("projfree")?;
    let (cat, m) = match c.input_module("projfree")? {
        Some(pair) => pair,
        None => {
            let cat = c.category()?;
            let m = old_sphere(&cat, c.n("projfree")?)?;
            (cat, m)
        }
    };
    let pf = cat.projective_free_summand(&m)?;
    let table = cat.table();
    let projective: Vec<usize> = pf.summands.iter().map(|&i| table.projectives()[i].dim()).collect();
    let mut out = Output::json(merge(
        context(&cat),
        json!({
            "input_dim": m.dim(),
            "dim": pf.core.dim(),
            "projective_dim": m.dim() - pf.core.dim(),
            "projective_summands": projective,
        }),
    ));
    out.module = Some(ModuleFile::from_module(&pf.core, Some("projective-free summand".into())));
    Ok(out)
}

fn decompose(c: &Common) -> Result<Output, HarnessError> {
    c.json_only("decompose")?;
    match c.input_module("decompose")? {
        None => {
            let cat = c.category()?;
            let summary = serde_json::to_value(cat.table().summary()).expect("summaries serialize");
            Ok(Output::json(merge(json!({ "projectives": cat.table().len() }), summary)))
        }
        Some((cat, m)) => {
            let mut parts = Vec::new();
            for (inc, certified) in fitting_decomposition(&m, c.seed)? {
                let projective = cat.table().projective_index(inc.source())?;
                parts.push(json!({ "dim": inc.source().dim(), "projective": projective, "certified": certified }));
            }
            Ok(Output::json(merge(context(&cat), json!({ "dim": m.dim(), "summands": parts }))))
        }
    }
}

fn random(c: &Common) -> Result<Output, HarnessError> {
    c.json_only("random")?;
    c.no_input("random")?;
    let cat = c.category()?;
    let steps = c.steps("random")?;
    let r = cat.create_random_module(steps, c.s.unwrap_or(2), c.m.unwrap_or(1), c.seed)?;
    let dims: Vec<usize> = r.stages.iter().map(Module::dim).collect();
    let mut out = Output::json(merge(
        context(&cat),
        json!({ "seed": c.seed, "steps": steps, "dim": r.module().dim(), "stage_dims": dims, "length_bound": r.length_bound }),
    ));
    out.module = Some(ModuleFile::from_module(r.module(), Some(format!("random seed {} steps {steps}", c.seed))));
    Ok(out)
}

fn experiment(c: &Common) -> Result<Output, HarnessError> {
    c.no_input("experiment")?;
    let group = c.group.as_deref().ok_or_else(|| usage("--group is required"))?;
    let field_name = c.field.as_deref().ok_or_else(|| usage("--field is required"))?;
    let config = ExperimentConfig {
        group: GroupDescriptor::Preset { preset: group.parse::<GroupPreset>()?.to_string(), names: None },
        field: field_name.parse::<FieldSpec>()?,
        trials: c.trials.unwrap_or(100),
        steps: c.steps("experiment")?,
        summands: c.s.unwrap_or(2),
        range: c.m.unwrap_or(1),
        seed: c.seed,
        cap: c.cap,
    };
    let report = run_experiment(&config)?;
    let text = match c.format {
        Format::Json => report.to_json(),
        Format::Csv => report.table_csv(),
    };
    Ok(Output { text, module: None })
}

fn bench(b: &BenchArgs) -> Result<Output, HarnessError> {
    let c = &b.common;
    c.no_input("bench")?;
    let cat = c.category()?;
    let tasks: Vec<BenchTask> = match b.task {
        Task::Suspend => vec![BenchTask::SuspendN { n: c.n("bench")? }],
        Task::Projfree => vec![BenchTask::Projfree { n: c.n("bench")? }],
        Task::Replace => {
            if c.n.is_some() {
                return Err(usage("bench --task replace takes --trials, not -n"));
            }
            (0..c.trials.unwrap_or(10) as u64).map(|i| BenchTask::Replace { seed: c.seed.wrapping_add(i) }).collect()
        }
    };
    let reports = tasks.into_iter().map(|t| bench_replacement(&cat, t)).collect::<Result<Vec<_>, _>>()?;
    let text = match c.format {
        Format::Json => serde_json::to_string_pretty(&reports).expect("reports serialize"),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["task", "new_dim", "new_added", "new_seconds", "old_dim", "old_added", "old_seconds", "delta"])
                .expect("in-memory csv");
            let opt = |v: Option<usize>| v.map_or(String::new(), |x| x.to_string());
            for r in &reports {
                w.write_record([
                    r.task.clone(),
                    r.new.dim.to_string(),
                    opt(r.new.added),
                    format!("{:.6}", r.new.seconds),
                    r.old.dim.to_string(),
                    opt(r.old.added),
                    format!("{:.6}", r.old.seconds),
                    r.delta.to_string(),
                ])
                .expect("in-memory csv");
            }
            String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv output is utf-8")
        }
    };
    Ok(Output { text, module: None })
}

fn check(c: &Common) -> Result<Output, HarnessError> {
    c.json_only("check")?;
    let path = c.input.as_ref().ok_or_else(|| usage("check needs --in"))?;
    c.no_group("check")?;
    let file = ModuleFile::read(path)?;
    let m = file.to_module()?;
    Ok(Output::json(json!({
        "ok": true,
        "group": m.group().name(),
        "field": m.field().to_string(),
        "dim": m.dim(),
        "label": file.label,
    })))
}

fn run(cli: &Cli) -> Result<String, HarnessError> {
    let (out, common) = match &cli.command {
        Command::Suspend(c) => (suspend(c)?, c),
        Command::Gel(c) => (gel(c)?, c),
        Command::Projfree(c) => (projfree(c)?, c),
        Command::Decompose(c) => (decompose(c)?, c),
        Command::Random(c) => (random(c)?, c),
        Command::Experiment(c) => (experiment(c)?, c),
        Command::Bench(b) => (bench(b)?, &b.common),
        Command::Check(c) => (check(c)?, c),
    };
    if let Some(path) = &common.out {
        match &out.module {
            Some(file) => file.write(path)?,
            None => std::fs::write(path, format!("{}\n", out.text))
                .map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?,
        }
    }
    Ok(out.text)
}

fn error_json(kind: &str, message: &str) -> String {
    serde_json::to_string_pretty(&json!({ "error": { "kind": kind, "message": message } })).expect("json values serialize")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            println!("{}", error_json("UsageError", e.to_string().trim()));
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(text) => {
            println!("{}", text.trim_end());
            ExitCode::SUCCESS
        }
        Err(e) => {
            println!("{}", error_json(e.kind(), &e.to_string()));
            ExitCode::from(if matches!(e, HarnessError::Usage(_)) { 2 } else { 1 })
        }
    }
}

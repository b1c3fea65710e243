//! Command-line interface for the qent toolkit.
//!
//! Reads JSON state files, runs decompositions and measures, and prints
//! machine-readable reports to stdout. Diagnostics go to stderr. Exit
//! codes: 0 success, 1 invariant failure beyond tolerance, 2 malformed
//! input (parse errors, shape errors, dimension caps).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use qent_core::io::{
    log_base_from_name, state_from_json, state_to_json, ClassifyDoc, MeasureDoc, MembershipDoc,
    ParsedState, ReeDoc, RoofDoc, TreeDoc, TreeReportDoc, ValidateDoc,
};
use qent_core::{
    classify, compact_decomposition, decohere, entanglement_pure, entanglement_pure_sampled,
    enumerate_orderings, enumerate_orderings_lazy, haar_random_density, haar_random_state,
    make_named_state, relative_entropy_of_entanglement_estimate, roof_minimize,
    standard_form_with_ordering, verify_membership, verify_tree, DensityMatrix, LogBase,
    NamedState, Ordering, PureState, QentError, ReeConfig, RoofConfig, SubsystemLayout,
};

#[derive(Parser)]
#[command(
    name = "qent",
    version,
    about = "Compact Schmidt decompositions and entanglement measures"
)]
struct Cli {
    /// Logarithm base for entropies: bits (base 2) or nats (base e).
    #[arg(long, global = true, default_value = "bits")]
    log_base: String,

    /// Output format; json is the machine contract, text is lossy.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Compact decomposition tree(s) with verification reports.
    Decompose(DecomposeArgs),
    /// Pure-state entanglement: minimum decohered entropy over orderings.
    Measure(MeasureArgs),
    /// Three-qubit standard form and classification.
    Classify(ClassifyArgs),
    /// Membership conditions of every ordering's decohered state.
    Verify(VerifyArgs),
    /// Convex-roof extension for mixed states.
    Roof(RoofArgs),
    /// Upper bound on the relative entropy of entanglement.
    Ree(ReeArgs),
    /// Sample a Haar-random state file.
    Random(RandomArgs),
    /// Emit one of the named reference states.
    Named(NamedArgs),
    /// Validate a state file against its invariants.
    Validate(InputArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Path to a JSON state file.
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args)]
struct DecomposeArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Ordering such as ABC or A,B,C; defaults to the layout order.
    #[arg(long)]
    ordering: Option<String>,
    /// Decompose along every canonical ordering.
    #[arg(long, conflicts_with = "ordering")]
    all_orderings: bool,
}

#[derive(Args)]
struct MeasureArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Restrict the minimization to these orderings (repeatable).
    #[arg(long)]
    ordering: Vec<String>,
    /// Restrict the minimization to the first K canonical orderings.
    #[arg(long, conflicts_with = "ordering")]
    sample_orderings: Option<usize>,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Ordering for the standard form; defaults to the layout order.
    #[arg(long)]
    ordering: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Args)]
struct RoofArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Ensemble size m; defaults to twice the rank.
    #[arg(long)]
    ensemble_size: Option<usize>,
    #[arg(long, default_value_t = 16)]
    restarts: usize,
    #[arg(long, default_value_t = 400)]
    max_iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args)]
struct ReeArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Number of product states in the separable ansatz.
    #[arg(long)]
    num_products: Option<usize>,
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    #[arg(long, default_value_t = 200)]
    max_iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args)]
struct RandomArgs {
    /// Comma-separated local dimensions, e.g. 2,2,2.
    #[arg(long)]
    dims: String,
    /// Comma-separated party labels; defaults to A,B,C,...
    #[arg(long)]
    labels: Option<String>,
    /// Emit a density matrix of this rank instead of a pure state.
    #[arg(long)]
    rank: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct NamedArgs {
    /// One of: ghz, w, eq8_max, product, bell_times_pure.
    #[arg(long)]
    name: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure classes map onto process exit codes.
enum Failure {
    /// Exit 1: a state or report invariant fails beyond tolerance.
    Invariant(String),
    /// Exit 2: input cannot be processed at all.
    Malformed(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invariant(_) => 1,
            Failure::Malformed(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Invariant(m) | Failure::Malformed(m) => m,
        }
    }
}

impl From<QentError> for Failure {
    fn from(e: QentError) -> Self {
        match e {
            QentError::InvalidState(_)
            | QentError::NonUnitary { .. }
            | QentError::NonIsometric { .. } => Failure::Invariant(e.to_string()),
            _ => Failure::Malformed(e.to_string()),
        }
    }
}

fn read_state(path: &Path) -> Result<ParsedState, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Malformed(format!("cannot read {}: {e}", path.display())))?;
    Ok(state_from_json(&text)?)
}

fn require_pure(state: ParsedState) -> Result<PureState, Failure> {
    match state {
        ParsedState::Pure(p) => {
            p.ensure_valid()?;
            Ok(p)
        }
        ParsedState::Density(_) => Err(Failure::Malformed(
            "this subcommand requires a pure state file (amplitudes)".into(),
        )),
    }
}

fn require_density(state: ParsedState) -> Result<DensityMatrix, Failure> {
    let rho = match state {
        ParsedState::Pure(p) => {
            p.ensure_valid()?;
            p.to_density()
        }
        ParsedState::Density(d) => d,
    };
    rho.ensure_valid()?;
    Ok(rho)
}

fn parse_ordering(text: &str, layout: &SubsystemLayout) -> Result<Ordering, Failure> {
    let labels: Vec<String> = if text.contains(',') {
        text.split(',').map(|s| s.trim().to_string()).collect()
    } else {
        text.chars().map(|c| c.to_string()).collect()
    };
    let ordering = Ordering::new(labels);
    if !ordering.matches_layout(layout) {
        return Err(Failure::Malformed(format!(
            "ordering {text:?} is not a permutation of the layout parties"
        )));
    }
    Ok(ordering)
}

fn emit(format: Format, json: serde_json::Value, text: String) {
    match format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&json).expect("reports serialize")
        ),
        Format::Text => println!("{text}"),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let base = log_base_from_name(&cli.log_base)?;
    match cli.command {
        Command::Decompose(args) => decompose(args, base, cli.format),
        Command::Measure(args) => measure(args, base, cli.format),
        Command::Classify(args) => classify_cmd(args, cli.format),
        Command::Verify(args) => verify_cmd(args, base, cli.format),
        Command::Roof(args) => roof(args, base, cli.format),
        Command::Ree(args) => ree(args, base, cli.format),
        Command::Random(args) => random(args, cli.format),
        Command::Named(args) => named(args, cli.format),
        Command::Validate(args) => validate(args, cli.format),
    }
}

fn decompose(args: DecomposeArgs, base: LogBase, format: Format) -> Result<(), Failure> {
    let psi = require_pure(read_state(&args.input.input)?)?;
    let orderings = if args.all_orderings {
        enumerate_orderings(psi.layout())?
    } else {
        match &args.ordering {
            Some(text) => vec![parse_ordering(text, psi.layout())?],
            None => vec![Ordering::new(psi.layout().labels().to_vec())],
        }
    };
    let mut docs = Vec::new();
    let mut all_pass = true;
    let mut lines = Vec::new();
    for o in &orderings {
        let tree = compact_decomposition(&psi, o)?;
        let report = verify_tree(&tree, &psi);
        all_pass &= report.pass;
        let entropy = qent_core::nested_entropy(&tree, base);
        lines.push(format!(
            "ordering {o}: {} leaves, entropy {:.12} {}, fidelity {:.15}, {}",
            tree.leaf_count(),
            entropy.total,
            base.name(),
            report.reconstruction_fidelity,
            if report.pass { "pass" } else { "FAIL" },
        ));
        docs.push(json!({
            "tree": TreeDoc::from_tree(&tree),
            "entropy": entropy.total,
            "report": TreeReportDoc::from_report(&report),
        }));
    }
    emit(
        format,
        json!({ "log_base": base.name(), "trees": docs }),
        lines.join("\n"),
    );
    if all_pass {
        Ok(())
    } else {
        Err(Failure::Invariant(
            "a decomposition verification report failed".into(),
        ))
    }
}

fn measure(args: MeasureArgs, base: LogBase, format: Format) -> Result<(), Failure> {
    let psi = require_pure(read_state(&args.input.input)?)?;
    let result = if let Some(k) = args.sample_orderings {
        if k == 0 {
            return Err(Failure::Malformed("sample size must be positive".into()));
        }
        let sample: Vec<Ordering> = enumerate_orderings_lazy(psi.layout())?.take(k).collect();
        entanglement_pure_sampled(&psi, &sample, base)?
    } else if !args.ordering.is_empty() {
        let orderings = args
            .ordering
            .iter()
            .map(|t| parse_ordering(t, psi.layout()))
            .collect::<Result<Vec<_>, _>>()?;
        entanglement_pure_sampled(&psi, &orderings, base)?
    } else {
        entanglement_pure(&psi, base)?
    };
    let text = format!(
        "E^c = {:.12} {} (argmin ordering {})",
        result.value,
        base.name(),
        result.argmin_ordering
    );
    emit(
        format,
        serde_json::to_value(MeasureDoc::from_result(&result)).expect("measure doc"),
        text,
    );
    Ok(())
}

fn classify_cmd(args: ClassifyArgs, format: Format) -> Result<(), Failure> {
    let psi = require_pure(read_state(&args.input.input)?)?;
    let class = classify(&psi)?;
    let ordering = match &args.ordering {
        Some(text) => parse_ordering(text, psi.layout())?,
        None => Ordering::new(psi.layout().labels().to_vec()),
    };
    let sf = standard_form_with_ordering(&psi, &ordering)?;
    // the classification report carries E^c in bits regardless of session base
    let measure = entanglement_pure(&psi, LogBase::Two)?;
    let doc = ClassifyDoc::new(&class, &sf, &measure);
    let text = format!(
        "class {} (ranks {:?}, n_ms {}), E^c = {:.12} bits, p = [{:.6}, {:.6}, {:.6}, {:.6}]",
        class.label,
        class.marginal_ranks,
        class.n_ms,
        measure.value,
        sf.p[0],
        sf.p[1],
        sf.p[2],
        sf.p[3],
    );
    emit(
        format,
        serde_json::to_value(doc).expect("classify doc"),
        text,
    );
    Ok(())
}

fn verify_cmd(args: VerifyArgs, base: LogBase, format: Format) -> Result<(), Failure> {
    let psi = require_pure(read_state(&args.input.input)?)?;
    let rho = psi.to_density();
    let mut docs = Vec::new();
    let mut lines = Vec::new();
    let mut worst: f64 = 0.0;
    for o in enumerate_orderings(psi.layout())? {
        let tree = compact_decomposition(&psi, &o)?;
        let sigma = decohere(&tree);
        let report = verify_membership(&rho, &sigma, base)?;
        worst = worst
            .max(report.marginal_residual)
            .max(report.contrast_line_residual)
            .max(report.additivity_residual);
        lines.push(format!(
            "ordering {o}: marginal {:.3e}, contrast {:.3e}, additivity {:.3e}, S(sigma) = {:.12}",
            report.marginal_residual,
            report.contrast_line_residual,
            report.additivity_residual,
            report.entropy_sigma,
        ));
        docs.push(MembershipDoc::from_report(&o, &report));
    }
    emit(
        format,
        json!({ "log_base": base.name(), "memberships": docs }),
        lines.join("\n"),
    );
    if worst <= 1e-8 {
        Ok(())
    } else {
        Err(Failure::Invariant(format!(
            "membership residual {worst:.3e} exceeds 1e-8"
        )))
    }
}

fn roof(args: RoofArgs, base: LogBase, format: Format) -> Result<(), Failure> {
    let rho = require_density(read_state(&args.input.input)?)?;
    let config = RoofConfig {
        ensemble_size: args.ensemble_size,
        restarts: args.restarts,
        max_iters: args.max_iters,
        seed: args.seed,
        tol: args.tol,
    };
    let result = roof_minimize(&rho, &config, base)?;
    let text = format!(
        "roof value = {:.12} {} (m = {}, {} restarts)",
        result.value,
        base.name(),
        result.ensemble_size,
        result.restarts_used
    );
    emit(
        format,
        serde_json::to_value(RoofDoc::from_result(&result)).expect("roof doc"),
        text,
    );
    Ok(())
}

fn ree(args: ReeArgs, base: LogBase, format: Format) -> Result<(), Failure> {
    let rho = require_density(read_state(&args.input.input)?)?;
    let config = ReeConfig {
        num_products: args.num_products,
        restarts: args.restarts,
        max_iters: args.max_iters,
        seed: args.seed,
        tol: args.tol,
    };
    let result = relative_entropy_of_entanglement_estimate(&rho, &config, base)?;
    let text = format!(
        "E_R upper bound = {:.12} {} ({} restarts, converged: {})",
        result.value,
        base.name(),
        result.restarts_used,
        result.converged
    );
    emit(
        format,
        serde_json::to_value(ReeDoc::from_result(&result)).expect("ree doc"),
        text,
    );
    Ok(())
}

fn write_or_print(out: Option<&Path>, text: &str, format: Format) -> Result<(), Failure> {
    match out {
        Some(path) => {
            std::fs::write(path, text)
                .map_err(|e| Failure::Malformed(format!("cannot write {}: {e}", path.display())))?;
            if format == Format::Text {
                eprintln!("wrote {}", path.display());
            }
            Ok(())
        }
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn random(args: RandomArgs, format: Format) -> Result<(), Failure> {
    let dims: Vec<usize> = args
        .dims
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|e| Failure::Malformed(format!("bad dimension {s:?}: {e}")))
        })
        .collect::<Result<_, _>>()?;
    let layout = match &args.labels {
        Some(text) => SubsystemLayout::new(
            text.split(',').map(|s| s.trim().to_string()).collect(),
            dims,
        )?,
        None => SubsystemLayout::with_default_labels(dims)?,
    };
    let state = match args.rank {
        Some(rank) => ParsedState::Density(haar_random_density(&layout, rank, args.seed)?),
        None => ParsedState::Pure(haar_random_state(&layout, args.seed)),
    };
    write_or_print(args.out.as_deref(), &state_to_json(&state), format)
}

fn named(args: NamedArgs, format: Format) -> Result<(), Failure> {
    let name: NamedState = args.name.parse()?;
    let state = ParsedState::Pure(make_named_state(name));
    write_or_print(args.out.as_deref(), &state_to_json(&state), format)
}

fn validate(args: InputArgs, format: Format) -> Result<(), Failure> {
    let (doc, pass, text) = match read_state(&args.input)? {
        ParsedState::Pure(p) => {
            let r = p.validate();
            (
                ValidateDoc::from_report("pure", &r),
                r.pass,
                format!("pure state: {r}"),
            )
        }
        ParsedState::Density(d) => {
            let r = d.validate();
            (
                ValidateDoc::from_report("density", &r),
                r.pass,
                format!("density matrix: {r}"),
            )
        }
    };
    emit(
        format,
        serde_json::to_value(doc).expect("validate doc"),
        text,
    );
    if pass {
        Ok(())
    } else {
        Err(Failure::Invariant("state invariants fail".into()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use gptj::builders;
use gptj::composites::{self, TensorCone};
use gptj::model::{Model, ModelOptions};
use gptj::quotient;
use gptj::report::{self, Format};
use gptj::scalar::vec_to_json;
use gptj::spec::{self, AnyModel, Arithmetic};
use gptj::spinforms;
use gptj::{Error, Rational, Scalar};

#[derive(Parser)]
#[command(name = "gptj", version, about = "Analyze symmetric probabilistic models")]
struct Cli {
    /// Seed for sampled batteries and randomized solvers.
    #[arg(long, global = true, env = "GPTJ_SEED", default_value_t = 7)]
    seed: u64,
    /// Absolute tolerance for float comparisons.
    #[arg(long, global = true, env = "GPTJ_TOLERANCE", default_value_t = 1e-9)]
    tolerance: f64,
    /// Override the arithmetic declared in model specs.
    #[arg(long, global = true, env = "GPTJ_MODE", value_enum)]
    mode: Option<ModeArg>,
    /// Largest group closure to enumerate.
    #[arg(long, global = true, env = "GPTJ_MAX_GROUP", default_value_t = 1_000_000)]
    max_group: usize,
    /// Tensor cone used for composite states.
    #[arg(long, global = true, env = "GPTJ_TENSOR_CONE", value_enum, default_value = "projective")]
    tensor_cone: ConeArg,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConeArg {
    Projective,
    Injective,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Classical,
    Example5,
    SquareBit,
    SquareBitCosets,
    Quantum,
    SpinFactor,
    Reducible,
    Imprimitive,
}

#[derive(Subcommand)]
enum Command {
    /// Write the model spec of a built-in family.
    Build {
        #[arg(value_enum)]
        family: Family,
        /// Size parameter: outcomes per test, Hilbert dimension, or spin-factor k.
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run structural checks on a model spec.
    Analyze {
        spec: PathBuf,
        /// Comma-separated properties, or `all`.
        #[arg(long, default_value = "all")]
        properties: String,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Form the product of two models' first extreme states and audit it.
    Compose {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, default_value_t = 0)]
        test_left: usize,
        #[arg(long, default_value_t = 0)]
        test_right: usize,
    },
    /// Build the conjugate system and its correlator.
    Conjugate { spec: PathBuf },
    /// Restrict a model to one invariant component and write its spec.
    Reduce {
        spec: PathBuf,
        #[arg(long, default_value_t = 0)]
        component: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Adjoints of the group generators under the orthogonalizing form.
    Adjoint { spec: PathBuf },
}

/// A command failure, tagged with its exit code.
struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(2, e.to_string())
    }
}

macro_rules! with_model {
    ($any:expr, $m:ident => $body:expr) => {
        match $any {
            AnyModel::Exact($m) => $body,
            AnyModel::Float($m) => $body,
        }
    };
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn options(cli: &Cli) -> ModelOptions {
    ModelOptions { tolerance: cli.tolerance, max_group: cli.max_group, seed: cli.seed }
}

fn mode(cli: &Cli) -> Option<Arithmetic> {
    cli.mode.map(|m| match m {
        ModeArg::Exact => Arithmetic::Exact,
        ModeArg::Float => Arithmetic::Float,
    })
}

fn load(cli: &Cli, path: &Path) -> Result<AnyModel, Failure> {
    spec::load(path, options(cli), mode(cli)).map_err(|e| Failure(2, format!("{}: {e}", path.display())))
}

fn write_out(text: &str, path: Option<&Path>) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure(2, format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json serializes"));
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Build { family, n, output } => {
            let text = build(cli, *family, *n)?;
            write_out(&text, output.as_deref())
        }
        Command::Analyze { spec, properties, format, output } => {
            let props = report::parse_properties(properties).map_err(|e| Failure(1, e.to_string()))?;
            let model = load(cli, spec)?;
            let r = with_model!(&model, m => report::analyze(m, &props));
            let format = match format {
                FormatArg::Json => Format::Json,
                FormatArg::Text => Format::Text,
            };
            write_out(&r.render(format), output.as_deref())
        }
        Command::Compose { left, right, test_left, test_right } => {
            let a = load(cli, left)?;
            let b = load(cli, right)?;
            let cone = match cli.tensor_cone {
                ConeArg::Projective => TensorCone::Projective,
                ConeArg::Injective => TensorCone::Injective,
            };
            let v = match (a, b) {
                (AnyModel::Exact(a), AnyModel::Exact(b)) => compose(&a, &b, *test_left, *test_right, cone)?,
                (a, b) => compose(&to_float(cli, a)?, &to_float(cli, b)?, *test_left, *test_right, cone)?,
            };
            print_json(&v);
            Ok(())
        }
        Command::Conjugate { spec } => {
            let model = load(cli, spec)?;
            let v = with_model!(&model, m => conjugate(m))?;
            print_json(&v);
            Ok(())
        }
        Command::Reduce { spec, component, output } => {
            let model = load(cli, spec)?;
            let text = with_model!(&model, m => reduce(m, *component))?;
            write_out(&text, output.as_deref())
        }
        Command::Adjoint { spec } => {
            let model = load(cli, spec)?;
            let v = with_model!(&model, m => adjoint(m))?;
            print_json(&v);
            Ok(())
        }
    }
}

fn build(cli: &Cli, family: Family, n: usize) -> Result<String, Failure> {
    let opts = options(cli);
    let exact = !matches!(cli.mode, Some(ModeArg::Float));
    let finite = |m: Model<Rational>| -> Result<String, Failure> {
        if exact {
            Ok(spec::to_json_string(&spec::spec_of(&m)))
        } else {
            let mut s = spec::spec_of(&m);
            s.arithmetic = Some("float".into());
            Ok(spec::to_json_string(&s))
        }
    };
    match family {
        Family::Classical => {
            if n == 0 {
                return Err(Failure(1, "classical models need n ≥ 1".into()));
            }
            finite(builders::classical(n))
        }
        Family::Example5 => finite(builders::example5()),
        Family::SquareBit => finite(builders::square_bit()),
        Family::SquareBitCosets => finite(builders::square_bit_from_cosets()),
        Family::Reducible => finite(builders::reducible_fixture()),
        Family::Imprimitive => finite(builders::imprimitive_fixture()),
        Family::Quantum => Ok(spec::to_json_string(&spec::spec_of(&builders::quantum_with(n, opts)?))),
        Family::SpinFactor => Ok(spec::to_json_string(&spec::spec_of(&builders::spin_factor_with(n, opts)?))),
    }
}

fn to_float(cli: &Cli, m: AnyModel) -> Result<Model<f64>, Failure> {
    match m {
        AnyModel::Float(m) => Ok(m),
        AnyModel::Exact(m) => {
            let s = spec::spec_of(&m);
            match spec::from_spec(&s, options(cli), Some(Arithmetic::Float))? {
                AnyModel::Float(m) => Ok(m),
                AnyModel::Exact(_) => unreachable!("float mode requested"),
            }
        }
    }
}

fn compose<F: Scalar>(a: &Model<F>, b: &Model<F>, ta: usize, tb: usize, cone: TensorCone) -> Result<Value, Failure> {
    let alpha = a.orbit_covectors().first().ok_or_else(|| Failure(2, format!("{} has no states", a.name())))?;
    let beta = b.orbit_covectors().first().ok_or_else(|| Failure(2, format!("{} has no states", b.name())))?;
    let omega = composites::product_state(a, b, alpha, beta)?.with_tensor_cone(cone);
    let pick = |m: &Model<F>, t: usize| -> Result<Vec<Vec<F>>, Failure> {
        let test = m
            .testspace()
            .tests()
            .get(t)
            .ok_or_else(|| Failure(1, format!("{} has no test {t}", m.name())))?;
        Ok(test.iter().map(|&x| m.outcome_vector(x).to_vec()).collect())
    };
    let audit = composites::total_probability_audit(a, b, &omega, &pick(a, ta)?, &pick(b, tb)?);
    let (left, right) = composites::marginals(a, b, &omega);
    Ok(json!({
        "state": omega.to_json(),
        "marginals": { "left": vec_to_json(&left), "right": vec_to_json(&right) },
        "totalProbability": audit.to_json(),
        "locallyTomographic": composites::is_locally_tomographic(a.dim(), b.dim(), a.dim() * b.dim()),
    }))
}

fn conjugate<F: Scalar>(m: &Model<F>) -> Result<Value, Failure> {
    let conj = composites::build_conjugate(m)?;
    let iso = composites::is_isomorphism_state(m, &conj.model, &conj.correlator)?;
    let mut v = conj.to_json();
    v["isCorrelator"] = json!(composites::is_correlator(m, &conj));
    v["isomorphismState"] = iso.to_json();
    Ok(v)
}

fn reduce<F: Scalar>(m: &Model<F>, component: usize) -> Result<String, Failure> {
    let reduced = quotient::reduce(m, component)?;
    let mut s = spec::spec_of(&reduced.model);
    s.provenance = Some(json!({
        "parent": reduced.parent,
        "component": reduced.component,
        "epsilon": reduced.epsilon.to_json(),
    }));
    Ok(spec::to_json_string(&s))
}

fn adjoint<F: Scalar>(m: &Model<F>) -> Result<Value, Failure> {
    let res = spinforms::orthogonalizing_form(m)?;
    let form = res.form.ok_or_else(|| {
        Failure(2, format!("{} has no orthogonalizing form (canonical form is not minimizing)", m.name()))
    })?;
    let check = composites::group_dagger_check(m, &form)?;
    let mut adjoints = Vec::new();
    for g in m.permutation_generators() {
        let phi = m.element_matrix(g)?;
        let dagger = composites::dagger_adjoint(&phi, &form, &form, m.tol())?;
        adjoints.push(json!({ "generator": g.0, "matrix": phi.to_json(), "adjoint": dagger.to_json() }));
    }
    Ok(json!({ "form": form.to_json(), "daggerIsInverse": check.to_json(), "generators": adjoints }))
}

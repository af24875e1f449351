use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use dynpers::{
    dynamics_oracle, filter_dynamics, generate, granulometric_curve,
    pair_by_dynamics, pair_by_persistence, pairs_to_json, persistence_diagram, read_field,
    saliency, segment_pipeline, sweep, watershed, write_field, Connectivity, Curve, Error, Field,
    FieldFormat, GeneratorKind, GeneratorSpec, VertexId, WatershedLabels,
};

#[derive(Parser)]
#[command(name = "dynpers", version, about = "Minimum/saddle pairing by dynamics and persistence")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Grid adjacency: axis neighbors only, or all 3^n - 1 neighbors.
    #[arg(long, global = true, default_value = "axis")]
    connectivity: Connectivity,
    /// Negate the input so maxima become minima.
    #[arg(long, global = true)]
    invert: bool,
    /// Input format (csv-1d, pgm-2d, field-nd); guessed when omitted.
    #[arg(long, global = true)]
    format: Option<FieldFormat>,
    /// Format of field outputs; defaults to the input format.
    #[arg(long, global = true)]
    out_format: Option<FieldFormat>,
    /// Worker threads for parallel sweeps.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output path, `-` for standard output.
    #[arg(short, long, global = true, default_value = "-")]
    output: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Persistence,
    Dynamics,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum SaliencyOutput {
    Json,
    Field,
}

#[derive(Subcommand)]
enum Command {
    /// Minimum/saddle pairs as JSON.
    Pairs {
        #[arg(default_value = "-")]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "persistence")]
        method: Method,
    },
    /// Dynamics of one minimum by minimax path search.
    Dynamics {
        #[arg(default_value = "-")]
        input: PathBuf,
        #[arg(long = "min")]
        min: usize,
    },
    /// Persistence diagram points `[birth, death]`.
    Diagram {
        #[arg(default_value = "-")]
        input: PathBuf,
        /// Also emit the essential pair, dying at the field maximum.
        #[arg(long)]
        essential: bool,
    },
    /// Number of minima with dynamics at least t, as a step function.
    Curve {
        #[arg(default_value = "-")]
        input: PathBuf,
    },
    /// Cancel minima whose dynamics is below t.
    Filter {
        #[arg(default_value = "-")]
        input: PathBuf,
        #[arg(long)]
        t: f64,
    },
    /// Basin label (minimum index) of every vertex.
    Watershed {
        #[arg(default_value = "-")]
        input: PathBuf,
    },
    /// Contour strength of every grid edge.
    Saliency {
        #[arg(default_value = "-")]
        input: PathBuf,
        #[arg(long = "as", value_enum, default_value = "json")]
        output_as: SaliencyOutput,
    },
    /// Filter at t, then watershed and curve of the result.
    Segment {
        #[arg(default_value = "-")]
        input: PathBuf,
        #[arg(long)]
        t: f64,
    },
    /// Compare both pairings on generated fields.
    Verify {
        #[arg(long)]
        kind: GeneratorKind,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, value_parser = parse_shape)]
        shape: Shape,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        fail_fast: bool,
        #[arg(long, default_value_t = 8)]
        bumps: usize,
    },
    /// Write a generated field.
    Gen {
        #[arg(long)]
        kind: GeneratorKind,
        #[arg(long, value_parser = parse_shape)]
        shape: Shape,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        bumps: usize,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
        amplitude: Option<Vec<f64>>,
    },
}

/// Grid extents written `8x8`, `64` or `4x4x4`.
#[derive(Clone, Debug)]
struct Shape(Vec<usize>);

fn parse_shape(s: &str) -> Result<Shape, String> {
    s.split('x')
        .map(|e| e.parse::<usize>().map_err(|_| format!("bad extent `{e}` in shape `{s}`")))
        .collect::<Result<_, _>>()
        .map(Shape)
}

enum Failure {
    Lib(Error),
    Divergence(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Usage(_) | Error::Domain(_) => 1,
                Error::Parse { .. } | Error::Io(_) => 2,
            })
        }
        Err(Failure::Divergence(report)) => {
            eprintln!("error: pairings diverge");
            let _ = emit_json(&cli.global.output, &report);
            ExitCode::from(3)
        }
    }
}

fn load(global: &Global, input: &Path) -> Result<(Field, FieldFormat), Error> {
    let (field, format) = read_field::<f64>(input, global.format)?;
    let field = field.with_connectivity(global.connectivity);
    if global.invert {
        let negated = field.values().iter().map(|x| 0.0 - x).collect();
        return Ok((field.with_values(negated)?, format));
    }
    Ok((field, format))
}

fn emit_json(output: &Path, value: &Value) -> Result<(), Error> {
    let text = format!("{value}\n");
    if output.as_os_str() == "-" {
        let mut stdout = std::io::stdout().lock();
        stdout.write_all(text.as_bytes())?;
        stdout.flush()?;
    } else {
        std::fs::write(output, text)?;
    }
    Ok(())
}

fn number(x: f64) -> Value {
    if x.is_infinite() {
        json!("inf")
    } else {
        json!(x)
    }
}

fn curve_json(curve: &Curve) -> Value {
    json!({ "breakpoints": curve.breakpoints, "counts": curve.counts })
}

fn labels_field(field: &Field, labels: &WatershedLabels) -> Result<Field, Error> {
    let ids = labels.labels.iter().map(|l| l.0 as f64).collect();
    Field::new(field.shape().to_vec(), ids, field.connectivity())
}

fn label_format(field: &Field) -> FieldFormat {
    match field.ndim() {
        1 => FieldFormat::Csv1d,
        2 => FieldFormat::Pgm2d,
        _ => FieldFormat::FieldNd,
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let g = &cli.global;
    let out = g.output.as_path();
    match &cli.command {
        Command::Pairs { input, method } => {
            let (f, _) = load(g, input)?;
            let pairs = match method {
                Method::Persistence => pair_by_persistence(&f),
                Method::Dynamics => pair_by_dynamics(&f),
                Method::Both => {
                    let (p, d) = (pair_by_persistence(&f), pair_by_dynamics(&f));
                    if p != d {
                        return Err(Failure::Divergence(json!({
                            "persistence": pairs_to_json(&p),
                            "dynamics": pairs_to_json(&d),
                        })));
                    }
                    p
                }
            };
            emit_json(out, &pairs_to_json(&pairs))?;
        }
        Command::Dynamics { input, min } => {
            let (f, _) = load(g, input)?;
            let d = dynamics_oracle(&f, VertexId(*min))?;
            let value = json!({
                "min_index": min,
                "value": number(d.value),
                "witness": d.witness.map(|w| w.0),
            });
            emit_json(out, &value)?;
        }
        Command::Diagram { input, essential } => {
            let (f, _) = load(g, input)?;
            let pairs = pair_by_persistence(&f);
            let points = persistence_diagram(&pairs, essential.then(|| f.max_value()));
            emit_json(out, &json!(points))?;
        }
        Command::Curve { input } => {
            let (f, _) = load(g, input)?;
            emit_json(out, &curve_json(&granulometric_curve(&pair_by_persistence(&f))))?;
        }
        Command::Filter { input, t } => {
            let (f, format) = load(g, input)?;
            let mut filtered = filter_dynamics(&f, *t)?;
            if g.invert {
                filtered = filtered.with_values(filtered.values().iter().map(|x| 0.0 - x).collect())?;
            }
            write_field(&filtered, out, g.out_format.unwrap_or(format))?;
        }
        Command::Watershed { input } => {
            let (f, _) = load(g, input)?;
            let labels = labels_field(&f, &watershed(&f))?;
            write_field(&labels, out, g.out_format.unwrap_or(label_format(&f)))?;
        }
        Command::Saliency { input, output_as } => {
            let (f, _) = load(g, input)?;
            let map = saliency(&f);
            match output_as {
                SaliencyOutput::Json => emit_json(out, &map.to_json())?,
                SaliencyOutput::Field => write_field(
                    &map.to_interleaved_field()?,
                    out,
                    g.out_format.unwrap_or(FieldFormat::FieldNd),
                )?,
            }
        }
        Command::Segment { input, t } => {
            let (f, _) = load(g, input)?;
            let seg = segment_pipeline(&f, *t)?;
            let value = json!({
                "regions": seg.region_count(),
                "labels": seg.labels.labels.iter().map(|l| l.0).collect::<Vec<_>>(),
                "pairs": pairs_to_json(&seg.pairs),
                "curve": curve_json(&seg.curve),
            });
            emit_json(out, &value)?;
        }
        Command::Verify { kind, trials, shape, seed, fail_fast, bumps } => {
            let specs: Vec<_> = (0..*trials as u64)
                .map(|i| {
                    GeneratorSpec::new(*kind, shape.0.clone(), seed + i)
                        .with_bumps(*bumps)
                        .with_connectivity(g.connectivity)
                })
                .collect();
            let report = sweep::<f64>(&specs, *fail_fast)?;
            let value = serde_json::to_value(&report).expect("report serializes");
            if !report.pairings_identical {
                return Err(Failure::Divergence(value));
            }
            emit_json(out, &value)?;
        }
        Command::Gen { kind, shape, seed, bumps, amplitude } => {
            let mut spec = GeneratorSpec::new(*kind, shape.0.clone(), *seed)
                .with_bumps(*bumps)
                .with_connectivity(g.connectivity);
            if let Some(a) = amplitude {
                spec = spec.with_amplitude(a[0], a[1]);
            }
            let f: Field = generate(&spec)?;
            write_field(&f, out, g.out_format.unwrap_or(FieldFormat::FieldNd))?;
        }
    }
    Ok(())
}

//! Command-line front end: build graphs and codes, run the erasure channel and
//! the decoders, compare against the brute-force oracle, and time scaling runs.
//!
//! Randomness comes from one `--seed`. It feeds a SplitMix64 stream whose
//! first four outputs seed, in order, the graph, the inner code, the sent
//! codeword and the erasure pattern.
//!
//! Exit codes: 0 on success, 1 when a decoder fails or disagrees with the
//! oracle, 2 on usage errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use expander_ec::rational::{self, Rational};
use expander_ec::spectral::bipartite_lambda;
use expander_ec::{
    affine_equal, list_decode_fast, list_decode_slow, make_code, make_graph, unique_decode, AffineSpace,
    BipartiteGraph, BitVector, DecodeFailure, DecoderParams, ErasurePattern, ExpanderCode, GraphSpec, ListDescription,
    ReceivedWord, RegularGraph, SplitMix64, UniqueResult,
};

#[derive(Parser)]
#[command(name = "expander-ec", version, about = "Erasure list decoding of expander codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a graph in text form.
    Gen {
        #[arg(long)]
        graph: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a code and print its parameters as JSON.
    Build {
        #[command(flatten)]
        code: CodeArgs,
        /// Also write the parity-check matrix here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Distances of the code and the second-distance bound check.
    Analyze {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long, default_value = "1/100")]
        epsilon: String,
        /// Overrides the computed second eigenvalue.
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Send a codeword through the erasure channel and write the received word.
    Channel {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decode a received word.
    Decode {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value_t = Alg::ListFast)]
        alg: Alg,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Decode and compare the result with the oracle list.
    Verify {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value_t = Alg::ListFast)]
        alg: Alg,
    },
    /// Time the fast list decoder on random regular double covers.
    Bench {
        #[arg(long, value_delimiter = ',', default_value = "1024,2048,4096,8192")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 8)]
        degree: usize,
        #[arg(long, default_value_t = 0.01)]
        rate: f64,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct CodeArgs {
    /// `complete:N`, `complete_with_loops:N`, `cycle:N`, `random_regular:N:D`,
    /// `complete_bipartite:N` or `file:PATH`. Regular graphs are used through
    /// their double cover.
    #[arg(long)]
    graph: String,
    /// `parity:D`, `repetition:D`, `hamming74`, `full:D` or `random:D:K`.
    #[arg(long)]
    code: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Clone)]
struct ChannelArgs {
    #[arg(long, group = "channel")]
    erasures: Option<usize>,
    #[arg(long, group = "channel")]
    rate: Option<f64>,
    /// File of whitespace-separated edge ids to erase.
    #[arg(long, group = "channel")]
    pattern: Option<PathBuf>,
    /// Read the received word (0/1/?) from a file instead of running the channel.
    #[arg(long, group = "channel")]
    input: Option<PathBuf>,
    /// Send the zero codeword instead of a random one.
    #[arg(long)]
    zero: bool,
}

#[derive(Args, Clone)]
struct ParamArgs {
    #[arg(long, default_value_t = 1)]
    r: usize,
    #[arg(long, default_value = "1/2")]
    epsilon: String,
    #[arg(long)]
    s_cap: Option<usize>,
    /// Second eigenvalue used for the regime check, as NUM/DEN.
    #[arg(long)]
    lambda: Option<String>,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Alg {
    Unique,
    ListSlow,
    ListFast,
    Oracle,
}

/// Everything needed to reproduce a run.
#[derive(Serialize)]
struct ExperimentSpec {
    graph: String,
    code: String,
    seed: u64,
    channel: String,
    r: usize,
    epsilon: String,
    s_cap: Option<usize>,
    alg: Alg,
}

enum Failure {
    Usage(anyhow::Error),
    Decode(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

type CmdResult = Result<(), Failure>;

struct Seeds {
    graph: u64,
    code: u64,
    word: u64,
    erasures: u64,
}

impl Seeds {
    fn new(seed: u64) -> Self {
        let mut rng = SplitMix64::new(seed);
        Self {
            graph: rng.next_u64(),
            code: rng.next_u64(),
            word: rng.next_u64(),
            erasures: rng.next_u64(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen { graph, seed, out } => cmd_gen(&graph, seed, out),
        Command::Build { code, out } => cmd_build(&code, out),
        Command::Analyze {
            code,
            epsilon,
            lambda,
            out,
        } => cmd_analyze(&code, &epsilon, lambda.as_deref(), out),
        Command::Channel { code, channel, out } => cmd_channel(&code, &channel, out),
        Command::Decode {
            code,
            channel,
            params,
            alg,
            out,
            report,
        } => cmd_decode(&code, &channel, &params, alg, out, report),
        Command::Verify {
            code,
            channel,
            params,
            alg,
        } => cmd_verify(&code, &channel, &params, alg),
        Command::Bench {
            sizes,
            degree,
            rate,
            repeats,
            params,
            seed,
            out,
        } => cmd_bench(&sizes, degree, rate, repeats, &params, seed, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Decode(e)) => {
            eprintln!("decode failure: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_rational(s: &str, what: &str) -> anyhow::Result<Rational> {
    rational::parse(s).ok_or_else(|| anyhow!("bad {what} {s:?}, expected NUM/DEN"))
}

fn load_code(args: &CodeArgs) -> anyhow::Result<ExpanderCode> {
    let seeds = Seeds::new(args.seed);
    let spec: GraphSpec = args.graph.parse()?;
    let graph = make_graph(&spec, seeds.graph)?.to_bipartite();
    let inner = make_code(&args.code.parse()?, seeds.code)?;
    Ok(ExpanderCode::build(graph, inner)?)
}

fn channel_name(args: &ChannelArgs) -> String {
    match (&args.erasures, &args.rate, &args.pattern, &args.input) {
        (Some(k), ..) => format!("count:{k}"),
        (_, Some(p), ..) => format!("rate:{p}"),
        (_, _, Some(f), _) => format!("pattern:{}", f.display()),
        (.., Some(f)) => format!("input:{}", f.display()),
        _ => "count:0".into(),
    }
}

/// The sent codeword (when known) and the received word.
fn received(code: &ExpanderCode, args: &ChannelArgs, seed: u64) -> anyhow::Result<(Option<BitVector>, ReceivedWord)> {
    if let Some(path) = &args.input {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        let z: ReceivedWord = text.trim().parse()?;
        if z.len() != code.block_length() {
            bail!("received word has length {}, code has {}", z.len(), code.block_length());
        }
        return Ok((None, z));
    }
    let seeds = Seeds::new(seed);
    let n = code.block_length();
    let pattern = if let Some(k) = args.erasures {
        if k > n {
            bail!("cannot erase {k} of {n} symbols");
        }
        ErasurePattern::Count(k)
    } else if let Some(p) = args.rate {
        if !(0.0..=1.0).contains(&p) {
            bail!("erasure rate {p} is outside [0, 1]");
        }
        ErasurePattern::Rate(p)
    } else if let Some(path) = &args.pattern {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        let ids = text
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| anyhow!("bad edge id {t:?}")))
            .collect::<anyhow::Result<Vec<_>>>()?;
        if let Some(&bad) = ids.iter().find(|&&e| e >= n) {
            bail!("edge id {bad} out of range 0..{n}");
        }
        ErasurePattern::Explicit(ids)
    } else {
        ErasurePattern::Count(0)
    };
    let sent = if args.zero {
        BitVector::zeros(n)
    } else {
        code.sample_codeword(&code.kernel_basis()?, seeds.word)
    };
    let z = code.erase(&sent, &pattern, seeds.erasures);
    Ok((Some(sent), z))
}

fn decoder_params(args: &ParamArgs) -> anyhow::Result<DecoderParams> {
    let mut params = DecoderParams::new(args.r, parse_rational(&args.epsilon, "epsilon")?)?;
    if let Some(cap) = args.s_cap {
        params = params.with_s_cap(cap);
    }
    if let Some(l) = &args.lambda {
        params = params.with_lambda(parse_rational(l, "lambda")?);
    }
    Ok(params)
}

fn to_json(value: &impl Serialize) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn cmd_gen(graph: &str, seed: u64, out: Option<PathBuf>) -> CmdResult {
    let spec: GraphSpec = graph.parse().map_err(anyhow::Error::from)?;
    let g = make_graph(&spec, Seeds::new(seed).graph).map_err(anyhow::Error::from)?;
    emit(out.as_ref(), &g.to_text())?;
    Ok(())
}

fn cmd_build(args: &CodeArgs, out: Option<PathBuf>) -> CmdResult {
    let code = load_code(args)?;
    let h = code.parity_matrix();
    let lambda = bipartite_lambda(code.graph()).ok();
    let summary = json!({
        "graph": args.graph,
        "code": args.code,
        "seed": args.seed,
        "n": code.graph().n(),
        "d": code.graph().d(),
        "block_length": code.block_length(),
        "parity_rows": code.parity_rows(),
        "parity_rank": h.rank(),
        "dimension": code.block_length() - h.rank(),
        "inner_rate": rational::format(&code.inner().rate()),
        "inner_min_distance": rational::format(&code.inner().min_distance()),
        "lambda": lambda,
    });
    println!(
        "{}",
        serde_json::to_string_pretty(&summary).map_err(anyhow::Error::from)?
    );
    if let Some(path) = out {
        emit(Some(&path), &h.to_string())?;
    }
    Ok(())
}

fn cmd_analyze(args: &CodeArgs, epsilon: &str, lambda: Option<&str>, out: Option<PathBuf>) -> CmdResult {
    let code = load_code(args)?;
    let epsilon = parse_rational(epsilon, "epsilon")?;
    let (lambda, lambda_float) = match lambda {
        Some(l) => {
            let q = parse_rational(l, "lambda")?;
            (q, rational::to_f64(&q))
        }
        None => {
            let l = bipartite_lambda(code.graph()).map_err(anyhow::Error::from)?;
            (rational::approximate(l, 1_000_000), l)
        }
    };
    let inner = code.inner();
    let one = Rational::from_integer(1);
    let delta = inner.min_distance();
    let delta2 = inner.generalized_distance(2).map_err(anyhow::Error::from)?;
    let two_delta = delta * Rational::from_integer(2);
    let base = delta * if delta2 < two_delta { delta2 } else { two_delta };
    let bound = (one - epsilon) * base;
    let d = rational::from_int(code.graph().d());
    let hypothesis = lambda / d <= delta2 * delta * delta * epsilon * epsilon / Rational::from_integer(16);
    let outer_delta = code.generalized_distance(1).map_err(anyhow::Error::from)?;
    let outer_delta2 = code.generalized_distance(2).map_err(anyhow::Error::from)?;
    let report = json!({
        "graph": args.graph,
        "code": args.code,
        "block_length": code.block_length(),
        "epsilon": rational::format(&epsilon),
        "lambda": lambda_float,
        "inner_delta": rational::format(&delta),
        "inner_delta_2": rational::format(&delta2),
        "delta": rational::format(&outer_delta),
        "delta_2": rational::format(&outer_delta2),
        "bound": rational::format(&bound),
        "bound_at_zero_epsilon": rational::format(&base),
        "bound_holds": outer_delta2 >= bound,
        "equality_at_zero_epsilon": outer_delta2 == base,
        "hypothesis_holds": hypothesis,
    });
    emit(out.as_ref(), &to_json(&report)?)?;
    Ok(())
}

fn cmd_channel(args: &CodeArgs, channel: &ChannelArgs, out: Option<PathBuf>) -> CmdResult {
    let code = load_code(args)?;
    let (_, z) = received(&code, channel, args.seed)?;
    emit(out.as_ref(), &format!("{z}\n"))?;
    Ok(())
}

/// A decoder's output in a form comparable with the oracle.
enum Decoded {
    Word(BitVector),
    Words(Vec<BitVector>),
    Space(AffineSpace),
}

impl Decoded {
    fn to_text(&self, n: usize) -> String {
        match self {
            Decoded::Word(w) => format!("{w}\n"),
            Decoded::Words(ws) => ws.iter().map(|w| format!("{w}\n")).collect(),
            Decoded::Space(s) => match ListDescription::from_space(s) {
                Some(desc) => desc.to_text(),
                None => format!("list {n} empty\n"),
            },
        }
    }

    fn size(&self) -> u128 {
        match self {
            Decoded::Word(_) => 1,
            Decoded::Words(ws) => ws.len() as u128,
            Decoded::Space(s) => s.size(),
        }
    }

    fn matches(&self, oracle: &AffineSpace) -> bool {
        match self {
            Decoded::Word(w) => oracle.size() == 1 && oracle.contains(w),
            Decoded::Words(ws) => ws.len() as u128 == oracle.size() && ws.iter().all(|w| oracle.contains(w)),
            Decoded::Space(s) => affine_equal(s, oracle),
        }
    }
}

fn dimension_text(size: u128) -> String {
    match size {
        0 => "empty".into(),
        s if s.is_power_of_two() => s.trailing_zeros().to_string(),
        s => format!("size {s}"),
    }
}

/// Runs one decoder. `Err` carries the failure name; empty lists are `Ok`.
fn run_decoder(
    code: &ExpanderCode,
    z: &ReceivedWord,
    params: &DecoderParams,
    alg: Alg,
) -> anyhow::Result<(Result<Decoded, String>, serde_json::Value)> {
    let n = code.block_length();
    Ok(match alg {
        Alg::Unique => {
            let t = Instant::now();
            let result = unique_decode(code, z);
            let mut report = json!({
                "algorithm": "unique",
                "status": result.status_name(),
                "erasures": z.erasure_count(),
                "time_ms": t.elapsed().as_secs_f64() * 1e3,
            });
            if let Some(s) = result.schedule() {
                report["rounds"] = json!(s.rounds.len());
                report["frontier_sizes"] = json!(s.frontier_sizes);
                report["inner_invocations"] = json!(s.inner_invocations);
            }
            let decoded = match result {
                UniqueResult::Decoded { codeword, .. } => Ok(Decoded::Word(codeword)),
                UniqueResult::Inconsistent => Ok(Decoded::Space(AffineSpace::empty(n))),
                other => Err(other.status_name().to_string()),
            };
            (decoded, report)
        }
        Alg::ListSlow => {
            let (result, report) = list_decode_slow(code, z, params);
            let decoded = match result {
                Ok(words) => Ok(Decoded::Words(words)),
                Err(DecodeFailure::EmptyList | DecodeFailure::Inconsistent) => Ok(Decoded::Words(Vec::new())),
                Err(DecodeFailure::Code(e)) => return Err(e.into()),
                Err(e) => Err(e.status_name().to_string()),
            };
            (decoded, serde_json::to_value(&report)?)
        }
        Alg::ListFast => {
            let (result, report) = list_decode_fast(code, z, params);
            let decoded = match result {
                Ok(desc) => Ok(Decoded::Space(desc.to_space())),
                Err(DecodeFailure::EmptyList | DecodeFailure::Inconsistent) => {
                    Ok(Decoded::Space(AffineSpace::empty(n)))
                }
                Err(DecodeFailure::Code(e)) => return Err(e.into()),
                Err(e) => Err(e.status_name().to_string()),
            };
            (decoded, serde_json::to_value(&report)?)
        }
        Alg::Oracle => {
            let t = Instant::now();
            let space = code.oracle_list_decode(z)?;
            let report = json!({
                "algorithm": "oracle",
                "status": "complete",
                "erasures": z.erasure_count(),
                "list_size": space.size().to_string(),
                "time_ms": t.elapsed().as_secs_f64() * 1e3,
            });
            (Ok(Decoded::Space(space)), report)
        }
    })
}

fn experiment(code: &CodeArgs, channel: &ChannelArgs, params: &ParamArgs, alg: Alg) -> ExperimentSpec {
    ExperimentSpec {
        graph: code.graph.clone(),
        code: code.code.clone(),
        seed: code.seed,
        channel: channel_name(channel),
        r: params.r,
        epsilon: params.epsilon.clone(),
        s_cap: params.s_cap,
        alg,
    }
}

fn cmd_decode(
    args: &CodeArgs,
    channel: &ChannelArgs,
    params: &ParamArgs,
    alg: Alg,
    out: Option<PathBuf>,
    report_path: Option<PathBuf>,
) -> CmdResult {
    let code = load_code(args)?;
    let decoder = decoder_params(params)?;
    let (_, z) = received(&code, channel, args.seed)?;
    let (decoded, report) = run_decoder(&code, &z, &decoder, alg)?;
    if let Some(path) = report_path {
        let wrapped = json!({ "experiment": experiment(args, channel, params, alg), "report": report });
        emit(Some(&path), &to_json(&wrapped)?)?;
    }
    let decoded = decoded.map_err(|status| Failure::Decode(anyhow!("{status}")))?;
    emit(out.as_ref(), &decoded.to_text(code.block_length()))?;
    if decoded.size() == 0 {
        return Err(Failure::Decode(anyhow!("no codeword agrees with the received word")));
    }
    Ok(())
}

fn cmd_verify(args: &CodeArgs, channel: &ChannelArgs, params: &ParamArgs, alg: Alg) -> CmdResult {
    let code = load_code(args)?;
    let decoder = decoder_params(params)?;
    let (_, z) = received(&code, channel, args.seed)?;
    let oracle = code.oracle_list_decode(&z).map_err(anyhow::Error::from)?;
    let oracle_dim = dimension_text(oracle.size());
    match run_decoder(&code, &z, &decoder, alg)?.0 {
        Ok(decoded) => {
            let dims = format!("{}/{}", dimension_text(decoded.size()), oracle_dim);
            if decoded.matches(&oracle) {
                println!("EQUAL {dims}");
                Ok(())
            } else {
                println!("DIFFER {dims}");
                Err(Failure::Decode(anyhow!("decoder and oracle lists differ")))
            }
        }
        Err(status) => {
            println!("FAILED {status}/{oracle_dim}");
            Err(Failure::Decode(anyhow!("{status}")))
        }
    }
}

fn cmd_bench(
    sizes: &[usize],
    degree: usize,
    rate: f64,
    repeats: usize,
    params: &ParamArgs,
    seed: u64,
    out: Option<PathBuf>,
) -> CmdResult {
    if sizes.is_empty() || repeats == 0 {
        return Err(anyhow!("need at least one size and one repetition").into());
    }
    let decoder = decoder_params(params)?;
    let mut rows = Vec::new();
    let start = Instant::now();
    for &n in sizes {
        let seeds = Seeds::new(seed ^ n as u64);
        let g = RegularGraph::random_regular(n, degree, seeds.graph).map_err(anyhow::Error::from)?;
        let inner = make_code(
            &format!("parity:{degree}").parse().map_err(anyhow::Error::from)?,
            seeds.code,
        )
        .map_err(anyhow::Error::from)?;
        let code = ExpanderCode::build(BipartiteGraph::double_cover(&g), inner).map_err(anyhow::Error::from)?;
        let z = code.erase(
            &BitVector::zeros(code.block_length()),
            &ErasurePattern::Rate(rate),
            seeds.erasures,
        );
        let mut best = f64::INFINITY;
        let mut status = String::new();
        for _ in 0..repeats {
            let t = Instant::now();
            let (_, report) = list_decode_fast(&code, &z, &decoder);
            best = best.min(t.elapsed().as_secs_f64());
            status = report.status;
        }
        rows.push(json!({
            "n": n,
            "edges": code.block_length(),
            "erasures": z.erasure_count(),
            "status": status,
            "best_seconds": best,
            "ns_per_edge": best * 1e9 / code.block_length() as f64,
        }));
    }
    let per_edge: Vec<f64> = rows
        .iter()
        .map(|r| r["ns_per_edge"].as_f64().unwrap_or(f64::NAN))
        .collect();
    let hi = per_edge.iter().cloned().fold(f64::MIN, f64::max);
    let lo = per_edge.iter().cloned().fold(f64::MAX, f64::min);
    let summary = json!({
        "degree": degree,
        "rate": rate,
        "repeats": repeats,
        "runs": rows,
        "spread": hi / lo,
        "total_seconds": start.elapsed().as_secs_f64(),
    });
    emit(out.as_ref(), &to_json(&summary)?)?;
    Ok(())
}

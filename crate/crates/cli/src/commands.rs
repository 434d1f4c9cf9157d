use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;

use seqloc::fit::{self, ErReference, LocalityType};
use seqloc::null_er::{sample_er, sample_er_with};
use seqloc::numeric::rng_for_index;
use seqloc::ordering::{rcm_ordering, spectral_ordering, OrderingResult};
use seqloc::orgm::sample_orgm;
use seqloc::power::{power_grid, GridAxes, PowerMode, PowerStatistic};
use seqloc::random_seq::{self, SequenceNullSummary, DEFAULT_ENUMERATION_CAP};
use seqloc::slots::n_pairs;
use seqloc::{stats, Graph, OrgmParams, Sidedness, TestReport, Variant, VertexSequence};

use crate::output::{csv_from_json, emit, json, text_from_json, write_atomic, Format};
use crate::{Cli, Command, GridKind, ModeArg, OrderCommand, PowerArgs, SampleCommand, StatisticArg, TestCommand};

/// Failure to reach or read from a remote host.
#[derive(Debug)]
struct NetworkError(String);

impl std::fmt::Display for NetworkError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for NetworkError {}

pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<std::io::Error>() || cause.is::<NetworkError>() || cause.is::<tempfile::PersistError>() {
            return 3;
        }
        if let Some(e) = cause.downcast_ref::<seqloc::Error>() {
            return if matches!(e, seqloc::Error::Io(_)) { 3 } else { 2 };
        }
    }
    2
}

pub fn run(cli: &Cli) -> Result<()> {
    let g = &cli.global;
    if !(g.alpha > 0.0 && g.alpha < 1.0) {
        bail!(seqloc::Error::InvalidParameter(format!("--alpha must lie in (0, 1), got {}", g.alpha)));
    }
    match &cli.command {
        Command::Stat => cmd_stat(cli),
        Command::Test(t) => cmd_test(cli, t),
        Command::Fit => cmd_fit(cli),
        Command::SweepR { r_min, r_max } => cmd_sweep(cli, *r_min, *r_max),
        Command::Power(args) => cmd_power(cli, args),
        Command::Order(o) => cmd_order(cli, o),
        Command::Sample(s) => cmd_sample(cli, s),
        Command::Fetch { url } => cmd_fetch(cli, url),
    }
}

fn load_graph(cli: &Cli) -> Result<Graph> {
    let path = cli
        .global
        .input
        .as_deref()
        .ok_or_else(|| anyhow!(seqloc::Error::InvalidParameter("--input is required".into())))?;
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Graph::parse_edge_list(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load_pair(cli: &Cli) -> Result<(Graph, VertexSequence)> {
    let g = load_graph(cli)?;
    let s = match &cli.global.sequence {
        None => VertexSequence::identity(g.n_vertices()),
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            VertexSequence::parse(&text).with_context(|| format!("parsing {}", path.display()))?
        }
    };
    s.check_matches(&g)?;
    Ok((g, s))
}

fn render<T: Serialize>(value: &T, format: Format) -> Result<String> {
    match format {
        Format::Json => json(value),
        Format::Text => text_from_json(value),
        Format::Csv => csv_from_json(value),
    }
}

fn emit_value<T: Serialize>(cli: &Cli, value: &T, default: Format) -> Result<()> {
    emit(cli.global.output.as_deref(), &render(value, cli.global.format.unwrap_or(default))?)
}

#[derive(Serialize)]
struct StatOutput {
    n: usize,
    m: u64,
    h1: f64,
    z1: Option<f64>,
    hg: f64,
    zg: Option<f64>,
    h_i: Vec<Option<f64>>,
}

fn cmd_stat(cli: &Cli) -> Result<()> {
    let (g, s) = load_pair(cli)?;
    let out = StatOutput {
        n: g.n_vertices(),
        m: g.n_edges(),
        h1: stats::h1(&g, &s)?,
        z1: stats::z1(&g, &s).ok(),
        hg: stats::hg(&g, &s)?.normalized,
        zg: stats::zg(&g, &s).ok(),
        h_i: stats::micro_locality(&g, &s)?,
    };
    emit_value(cli, &out, Format::Json)
}

fn sidedness(one_sided: bool) -> Sidedness {
    if one_sided {
        Sidedness::OneSidedLower
    } else {
        Sidedness::TwoSided
    }
}

#[derive(Serialize)]
struct ReferenceInfo {
    samples: u64,
    seed: u64,
    ordering: &'static str,
    lower_quantile: f64,
}

#[derive(Serialize)]
struct OrgmTestOutput {
    fit: fit::FitResult,
    r_tested: usize,
    max_average_ratio: f64,
    in_envelope: TestReport,
    whole_graph: TestReport,
    er_reference: Option<ReferenceInfo>,
    classification: LocalityType,
}

/// `H1` of spectral-ordered uniform graphs with the same `N` and `M`.
fn er_reference(n: usize, m: u64, samples: u64, seed: u64) -> Result<Vec<f64>> {
    let simple = m <= n_pairs(n);
    (0..samples)
        .map(|i| {
            let g = sample_er_with(n, m, simple, &mut rng_for_index(seed, i))?;
            let order = spectral_ordering(&g)?;
            Ok(stats::h1(&g, &order.sequence)?)
        })
        .collect()
}

#[derive(Serialize)]
struct SeqTestOutput {
    mode: &'static str,
    raw_sum: u64,
    z1: f64,
    z1_factor: Option<f64>,
    p_value_le: f64,
    p_value_lt: f64,
    standard_error: f64,
    summary: SequenceNullSummary,
}

fn cmd_test(cli: &Cli, t: &TestCommand) -> Result<()> {
    let (g, s) = load_pair(cli)?;
    let alpha = cli.global.alpha;
    let variant: Variant = cli.global.variant.into();
    match t {
        TestCommand::Er { one_sided } => {
            let report = seqloc::null_er::test_unoptimized(&g, &s, alpha, sidedness(*one_sided))?;
            emit_value(cli, &report, Format::Json)
        }
        TestCommand::Orgm { r, er_samples } => {
            let fitted = fit::fit_bandwidth(&g, &s, variant)?;
            let r_tested = r.unwrap_or(fitted.r_star);
            let in_envelope = fit::in_envelope_test(&g, &s, r_tested, variant, alpha)?;
            let whole_graph = seqloc::null_er::test_unoptimized(&g, &s, alpha, Sidedness::TwoSided)?;
            let (reference, info) = if *er_samples > 0 {
                let values = er_reference(g.n_vertices(), g.n_edges(), *er_samples, cli.global.seed)?;
                let reference = ErReference::Empirical(values);
                let info = ReferenceInfo {
                    samples: *er_samples,
                    seed: cli.global.seed,
                    ordering: "spectral",
                    lower_quantile: reference.lower_quantile(alpha),
                };
                (Some(reference), Some(info))
            } else {
                (None, None)
            };
            let out = OrgmTestOutput {
                max_average_ratio: fit::max_average_ratio(g.n_vertices(), r_tested)?,
                classification: fit::classify(&whole_graph, &in_envelope, reference.as_ref()),
                fit: fitted,
                r_tested,
                in_envelope,
                whole_graph,
                er_reference: info,
            };
            emit_value(cli, &out, Format::Json)
        }
        TestCommand::Seq { exact, samples } => {
            let enumerate = *exact || (samples.is_none() && g.n_vertices() <= DEFAULT_ENUMERATION_CAP);
            let summary = if enumerate {
                random_seq::exact_seq_distribution(&g)?
            } else {
                random_seq::sampled_seq_distribution(&g, samples.unwrap_or(10_000), cli.global.seed)?
            };
            let raw = stats::raw_distance_sum(&g, &s);
            let p_le = summary.p_value_le(raw);
            let out = SeqTestOutput {
                mode: if enumerate { "exhaustive" } else { "sampled" },
                raw_sum: raw,
                z1: stats::z1(&g, &s)?,
                z1_factor: random_seq::z1_factor(&g, &s).ok(),
                p_value_le: p_le,
                p_value_lt: summary.p_value_lt(raw),
                standard_error: summary.standard_error(p_le),
                summary,
            };
            match cli.global.format.unwrap_or(Format::Json) {
                Format::Csv => emit(cli.global.output.as_deref(), &out.summary.to_csv()),
                f => emit(cli.global.output.as_deref(), &render(&out, f)?),
            }
        }
    }
}

fn cmd_fit(cli: &Cli) -> Result<()> {
    let (g, s) = load_pair(cli)?;
    let result = fit::fit_bandwidth(&g, &s, cli.global.variant.into())?;
    match cli.global.format.unwrap_or(Format::Json) {
        Format::Csv => emit(cli.global.output.as_deref(), &result.to_csv()),
        f => emit(cli.global.output.as_deref(), &render(&result, f)?),
    }
}

fn cmd_sweep(cli: &Cli, r_min: Option<usize>, r_max: Option<usize>) -> Result<()> {
    let (g, s) = load_pair(cli)?;
    let n = g.n_vertices();
    let lo = r_min.unwrap_or(1);
    let hi = r_max.unwrap_or(n.saturating_sub(1));
    let rows = fit::ci_sweep(&g, &s, lo..=hi, cli.global.variant.into(), cli.global.alpha)?;
    match cli.global.format.unwrap_or(Format::Csv) {
        Format::Json => emit(cli.global.output.as_deref(), &json(&rows)?),
        _ => emit(cli.global.output.as_deref(), &fit::ci_rows_to_csv(&rows)),
    }
}

fn steps(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let count = ((hi - lo) / step).round() as usize;
    (0..=count).map(|i| ((lo + i as f64 * step) * 1e9).round() / 1e9).collect()
}

fn cmd_power(cli: &Cli, a: &PowerArgs) -> Result<()> {
    let or = |v: &Vec<f64>, d: Vec<f64>| if v.is_empty() { d } else { v.clone() };
    let axes = match a.grid {
        GridKind::REps => GridAxes::REps {
            n: a.n,
            m: a.m,
            r_over_n: or(&a.r_over_n, steps(0.05, 0.95, 0.05)),
            eps: or(&a.eps, steps(0.0, 1.0, 0.1)),
        },
        GridKind::NDegree => GridAxes::NDegree {
            n: if a.n_values.is_empty() { vec![50, 100, 200, 400] } else { a.n_values.clone() },
            degree: or(&a.degrees, vec![2.0, 4.0, 8.0, 16.0]),
            r_over_n: a.fixed_r_over_n,
            eps: a.fixed_eps,
        },
    };
    let mode = match a.mode {
        ModeArg::Analytic => PowerMode::Analytic,
        ModeArg::Empirical => PowerMode::Empirical {
            statistic: match a.statistic {
                StatisticArg::H1 => PowerStatistic::H1,
                StatisticArg::Hg => PowerStatistic::Hg,
            },
            n_samples: a.samples,
            seed: cli.global.seed,
        },
    };
    let grid = power_grid(&axes, cli.global.alpha, cli.global.variant.into(), mode)?;
    match cli.global.format.unwrap_or(Format::Csv) {
        Format::Json => emit(cli.global.output.as_deref(), &json(&grid)?),
        _ => emit(cli.global.output.as_deref(), &grid.to_csv()),
    }
}

fn cmd_order(cli: &Cli, o: &OrderCommand) -> Result<()> {
    let g = load_graph(cli)?;
    let result: OrderingResult = match o {
        OrderCommand::Spectral => spectral_ordering(&g)?,
        OrderCommand::Rcm => rcm_ordering(&g)?,
    };
    match cli.global.format.unwrap_or(Format::Text) {
        Format::Json => emit(cli.global.output.as_deref(), &json(&result)?),
        _ => emit(cli.global.output.as_deref(), &result.sequence.to_text()),
    }
}

#[derive(Serialize)]
struct SampleMeta {
    model: &'static str,
    seed: u64,
    n: usize,
    m: u64,
    simple: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    orgm: Option<OrgmParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eps: Option<f64>,
}

fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut name = path.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(".meta.json");
    path.with_file_name(name)
}

fn cmd_sample(cli: &Cli, s: &SampleCommand) -> Result<()> {
    let seed = cli.global.seed;
    let simple = cli.global.variant == crate::VariantArg::Simple;
    let (graph, meta) = match s {
        SampleCommand::Er { n, m } => (
            sample_er(*n, *m, simple, seed)?,
            SampleMeta { model: "erdos-renyi", seed, n: *n, m: *m, simple, orgm: None, eps: None },
        ),
        SampleCommand::Orgm { n, r, m, eps, m_in, m_out } => {
            let params = match (m, eps, m_in, m_out) {
                (Some(m), Some(eps), None, None) => OrgmParams::from_density_ratio(*n, *m, *r, *eps, simple)?,
                (None, None, Some(a), Some(b)) => OrgmParams::banded(*n, *r, *a, *b, simple),
                _ => bail!(seqloc::Error::InvalidParameter("give either --m and --eps or --m-in and --m-out".into())),
            };
            params.validate()?;
            let g = sample_orgm(&params, seed)?;
            let meta = SampleMeta { model: "orgm", seed, n: *n, m: params.m(), simple, eps: params.eps(), orgm: Some(params) };
            (g, meta)
        }
    };
    let edges = graph.to_edge_list();
    match cli.global.output.as_deref() {
        Some(path) => {
            write_atomic(path, edges.as_bytes())?;
            write_atomic(&sidecar_path(path), json(&meta)?.as_bytes())
        }
        None => emit(None, &edges),
    }
}

fn cmd_fetch(cli: &Cli, url: &str) -> Result<()> {
    let path = cli
        .global
        .output
        .as_deref()
        .ok_or_else(|| anyhow!(seqloc::Error::InvalidParameter("fetch requires --output".into())))?;
    let mut response = ureq::get(url).call().map_err(|e| NetworkError(format!("fetching {url}: {e}")))?;
    let body = response.body_mut().read_to_vec().map_err(|e| NetworkError(format!("reading {url}: {e}")))?;
    write_atomic(path, &body)
}

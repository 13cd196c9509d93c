//! Command implementations shared by the binary and the test suites.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;

use entkit::criteria::{self, CriterionReport, Overall, Verdict};
use entkit::ef::{
    additivity_explore, default_k, ef_minimize, ef_oracle_2q, AdditivityOptions, AdditivityTable,
    EfOptions,
};
use entkit::search::{run_search, Histogram, ParticipationStats, SearchConfig};
use entkit::states::{tiles_fixture, BipartiteState, PureState};
use entkit::tol::Tolerances;

use crate::io::{content_hash, save_state_file, Metadata, ReportFile, StateFile};
use crate::{CliError, CliResult};

/// Flags shared by every subcommand.
#[derive(Debug, Clone)]
pub struct GlobalOpts {
    pub seed: u64,
    pub json: Option<PathBuf>,
    pub tolerances: Tolerances,
}

impl GlobalOpts {
    fn write_json<T: Serialize>(&self, report: &ReportFile<T>) -> CliResult<()> {
        if let Some(path) = &self.json {
            report.write(path)?;
        }
        Ok(())
    }
}

pub fn parse_dims(text: &str) -> CliResult<(usize, usize)> {
    let (a, b) = text
        .split_once(['x', 'X'])
        .ok_or_else(|| CliError::input(format!("dims must look like 2x3, got {text:?}")))?;
    let da = a.trim().parse::<usize>();
    let db = b.trim().parse::<usize>();
    match (da, db) {
        (Ok(da), Ok(db)) if da > 0 && db > 0 => Ok((da, db)),
        _ => Err(CliError::input(format!(
            "dims must be positive integers, got {text:?}"
        ))),
    }
}

/// Parse one complex amplitude: "0.5", "-2", "0.5i", "1+2i", "0.3-0.4i", "i".
pub fn parse_complex(text: &str) -> CliResult<Complex64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(CliError::input("empty amplitude"));
    }
    let bad = || CliError::input(format!("cannot parse complex amplitude {text:?}"));

    if let Some(imag_text) = s.strip_suffix(['i', 'I', 'j', 'J']) {
        // Find a +/- separating real and imaginary parts (not a leading sign
        // and not part of an exponent).
        let chars: Vec<char> = imag_text.chars().collect();
        let mut split = None;
        for idx in (1..chars.len()).rev() {
            if (chars[idx] == '+' || chars[idx] == '-')
                && chars[idx - 1] != 'e'
                && chars[idx - 1] != 'E'
            {
                split = Some(idx);
                break;
            }
        }
        let (re_part, im_part) = match split {
            Some(idx) => (&imag_text[..idx], &imag_text[idx..]),
            None => ("", imag_text),
        };
        let re = if re_part.is_empty() {
            0.0
        } else {
            re_part.parse().map_err(|_| bad())?
        };
        let im = match im_part {
            "" | "+" => 1.0,
            "-" => -1.0,
            other => other.parse().map_err(|_| bad())?,
        };
        Ok(Complex64::new(re, im))
    } else {
        let re: f64 = s.parse().map_err(|_| bad())?;
        Ok(Complex64::new(re, 0.0))
    }
}

pub fn parse_amplitude_list(text: &str, expected: usize) -> CliResult<Vec<Complex64>> {
    let amps: CliResult<Vec<Complex64>> = text.split(',').map(parse_complex).collect();
    let amps = amps?;
    if amps.len() != expected {
        return Err(CliError::input(format!(
            "expected {expected} comma-separated amplitudes, got {}",
            amps.len()
        )));
    }
    Ok(amps)
}

fn verdict_text(v: Verdict) -> &'static str {
    match v {
        Verdict::Distillable => "Distillable",
        Verdict::Separable => "Separable",
        Verdict::SeparableConsistent => "SeparableConsistent",
        Verdict::Violated => "Violated",
        Verdict::Inconclusive => "Inconclusive",
    }
}

fn overall_text(o: Overall) -> &'static str {
    match o {
        Overall::Distillable => "Distillable",
        Overall::Separable => "Separable",
        Overall::NotDistillableByTheseTests => "NotDistillableByTheseTests",
    }
}

pub fn render_report(report: &CriterionReport) -> String {
    let mut out = String::new();
    let (da, db) = report.dims;
    let _ = writeln!(out, "state: {da}x{db}");
    let _ = writeln!(
        out,
        "rank: {} (epsilon {:.1e})   marginal ranks: {} x {}",
        report.rank.rank, report.tolerances.rank_epsilon, report.rank.rank_a, report.rank.rank_b
    );
    let _ = writeln!(
        out,
        "ppt: {} (min eigenvalue of PT = {:+.6e}) -> {}",
        if report.ppt.is_ppt { "PPT" } else { "NPT" },
        report.ppt.min_eigenvalue,
        verdict_text(report.ppt.verdict)
    );
    let _ = writeln!(
        out,
        "reduction: {} (min eigenvalues {:+.6e} / {:+.6e}) -> {}",
        if report.reduction.violated {
            "violated"
        } else {
            "satisfied"
        },
        report.reduction.min_eig_a,
        report.reduction.min_eig_b,
        verdict_text(report.reduction.verdict)
    );
    match &report.rank.witness {
        Some(w) => {
            let _ = writeln!(
                out,
                "rank criterion: {} (filtered {:?}, p = {:.6}, reduction witness {:+.6e} <= bound {:+.6e})",
                verdict_text(report.rank.verdict),
                w.filtered_side,
                w.success_probability,
                w.reduction_min_eig,
                w.proof_bound
            );
        }
        None => {
            let _ = writeln!(out, "rank criterion: {}", verdict_text(report.rank.verdict));
        }
    }
    for e in &report.entropies {
        let _ = writeln!(
            out,
            "entropy S_{}: S(rho) = {:.6}  S(A) = {:.6}  S(B) = {:.6} -> {}",
            e.alpha,
            e.s_rho,
            e.s_a,
            e.s_b,
            if e.satisfied { "satisfied" } else { "VIOLATED" }
        );
    }
    let _ = writeln!(
        out,
        "participation ratio: {:.6}",
        report.participation_ratio
    );
    let _ = writeln!(out, "support: {}", report.support.description);
    for note in &report.notes {
        let _ = writeln!(out, "note: {note}");
    }
    let _ = writeln!(out, "overall: {}", overall_text(report.overall));
    out
}

/// `analyze INPUT`: run the criterion pipeline on a state file.
pub fn cmd_analyze(input: &Path, opts: &GlobalOpts) -> CliResult<String> {
    let bytes = fs::read(input)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", input.display())))?;
    let state_file = crate::io::parse_state_file(&bytes)?;
    let state = state_file.into_state(&opts.tolerances)?;
    let report = criteria::analyze(&state, &opts.tolerances);

    let text = render_report(&report);
    let envelope =
        ReportFile::new("analyze", opts.tolerances, &report).with_input_hash(content_hash(&bytes));
    opts.write_json(&envelope)?;
    Ok(text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenerateKind {
    Bell,
    Product,
    Tiles,
    Random,
    RandomSeparable,
    Mixture,
}

#[derive(Debug, Clone)]
pub struct GenerateParams {
    pub kind: GenerateKind,
    pub dims: Option<String>,
    pub rank: Option<usize>,
    pub terms: Option<usize>,
    pub p: Option<f64>,
    pub psi: Option<String>,
    pub out: Option<PathBuf>,
}

/// `generate KIND ...`: build a state file and write it (or print it).
pub fn cmd_generate(params: &GenerateParams, opts: &GlobalOpts) -> CliResult<String> {
    let dims = params.dims.as_deref().map(parse_dims).transpose()?;
    let (state, label, provenance, seeded) = match params.kind {
        GenerateKind::Bell => {
            let state = BipartiteState::from_pure(&PureState::bell_phi_plus());
            (state, "bell-phi-plus", "generate bell".to_string(), false)
        }
        GenerateKind::Product => {
            let (da, db) = dims.unwrap_or((2, 2));
            let psi = PureState::basis(da, db, 0, 0).map_err(CliError::from)?;
            let state = BipartiteState::from_pure(&psi);
            (
                state,
                "product-00",
                format!("generate product --dims {da}x{db}"),
                false,
            )
        }
        GenerateKind::Tiles => (
            tiles_fixture(),
            "tiles-3x3",
            "generate tiles".to_string(),
            false,
        ),
        GenerateKind::Random => {
            let (da, db) = dims.unwrap_or((2, 2));
            let rank = params.rank.unwrap_or(da * db);
            let state = BipartiteState::random(da, db, rank, opts.seed)?;
            (
                state,
                "random",
                format!(
                    "generate random --dims {da}x{db} --rank {rank} --seed {}",
                    opts.seed
                ),
                true,
            )
        }
        GenerateKind::RandomSeparable => {
            let (da, db) = dims.unwrap_or((2, 2));
            let terms = params.terms.unwrap_or(da * db);
            if terms == 0 {
                return Err(CliError::input("--terms must be at least 1"));
            }
            let state = BipartiteState::random_separable(da, db, terms, opts.seed)?;
            (
                state,
                "random-separable",
                format!(
                    "generate random-separable --dims {da}x{db} --terms {terms} --seed {}",
                    opts.seed
                ),
                true,
            )
        }
        GenerateKind::Mixture => {
            let p = params.p.unwrap_or(1.0);
            let psi_text = params
                .psi
                .as_deref()
                .ok_or_else(|| CliError::input("mixture requires --psi \"a,b,c,d\""))?;
            let amps = parse_amplitude_list(psi_text, 4)?;
            let psi = PureState::normalized(2, 2, amps)
                .map_err(|e| CliError::input(format!("bad --psi: {e}")))?;
            let state = criteria::mixture_state(p, &psi)?;
            (
                state,
                "mixture",
                format!("generate mixture --p {p} --psi {psi_text}"),
                false,
            )
        }
    };

    let metadata = Metadata {
        label: Some(label.to_string()),
        seed: seeded.then_some(opts.seed),
        provenance: Some(provenance),
    };
    let file = StateFile::from_state(&state, Some(metadata));
    let rendered = crate::io::render_state_file(&file);
    if let Some(path) = &params.out {
        save_state_file(path, &file)?;
        Ok(format!("wrote {}\n", path.display()))
    } else {
        Ok(rendered)
    }
}

#[derive(Debug, Clone)]
pub struct EfParams {
    pub input: PathBuf,
    pub k: Option<usize>,
    pub restarts: usize,
    pub max_iterations: usize,
    pub tensor_n: Option<usize>,
    pub k_cap: usize,
    pub budget_secs: u64,
}

#[derive(Debug, Serialize)]
pub struct EnsembleMemberOut {
    pub weight: f64,
    pub entanglement_bits: f64,
    pub amplitudes: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize)]
pub struct EfReport {
    /// Always an upper bound: descent certifies the ensemble, not global
    /// optimality.
    pub upper_bound: bool,
    pub value_bits: f64,
    pub k: usize,
    pub restarts: usize,
    pub converged: bool,
    pub per_restart_values: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_2q_bits: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_gap: Option<f64>,
    pub ensemble: Vec<EnsembleMemberOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub additivity: Option<AdditivityTable>,
}

/// `ef INPUT ...`: upper-bound the entanglement of formation, optionally
/// exploring tensor powers.
pub fn cmd_ef(params: &EfParams, opts: &GlobalOpts) -> CliResult<String> {
    let bytes = fs::read(&params.input)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", params.input.display())))?;
    let state_file = crate::io::parse_state_file(&bytes)?;
    let state = state_file.into_state(&opts.tolerances)?;

    if params.restarts == 0 {
        return Err(CliError::input("--restarts must be at least 1"));
    }
    let k = params
        .k
        .unwrap_or_else(|| default_k(&state, opts.tolerances.rank_epsilon));
    let ef = ef_minimize(
        &state,
        k,
        &EfOptions {
            restarts: params.restarts,
            seed: opts.seed,
            max_iterations: params.max_iterations,
        },
    )?;

    let oracle = ((state.dims()) == (2, 2)).then(|| ef_oracle_2q(&state).expect("2x2 state"));

    let additivity = match params.tensor_n {
        Some(n_max) if n_max >= 1 => Some(additivity_explore(
            &state,
            n_max,
            &AdditivityOptions {
                restarts: params.restarts,
                seed: opts.seed,
                max_iterations: params.max_iterations,
                k_cap: params.k_cap,
                budget: std::time::Duration::from_secs(params.budget_secs),
            },
        )?),
        _ => None,
    };

    let ensemble = ef
        .best_ensemble
        .members
        .iter()
        .map(|(w, psi)| EnsembleMemberOut {
            weight: *w,
            entanglement_bits: psi.entanglement().expect("normalized member"),
            amplitudes: psi.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
        })
        .collect();

    let report = EfReport {
        upper_bound: true,
        value_bits: ef.value,
        k: ef.k,
        restarts: ef.restarts,
        converged: ef.converged,
        per_restart_values: ef.per_restart_values.clone(),
        oracle_2q_bits: oracle,
        oracle_gap: oracle.map(|o| (ef.value - o).abs()),
        ensemble,
        additivity,
    };

    let mut text = String::new();
    let _ = writeln!(
        text,
        "entanglement of formation upper bound: {:.9} bits (k = {}, restarts = {}, converged = {})",
        report.value_bits, report.k, report.restarts, report.converged
    );
    let _ = writeln!(
        text,
        "note: value is an upper bound from local ensemble descent, not a certified minimum"
    );
    if let Some(o) = report.oracle_2q_bits {
        let _ = writeln!(
            text,
            "two-qubit concurrence oracle: {:.9} bits (gap {:.3e})",
            o,
            report.oracle_gap.unwrap_or(0.0)
        );
    }
    if let Some(table) = &report.additivity {
        let _ = writeln!(text, "tensor-power upper bounds (k cap {}):", table.k_cap);
        let _ = writeln!(text, "    n   dim    k        bound         bound/n");
        for row in &table.rows {
            let _ = writeln!(
                text,
                "    {}   {:>4}  {:>3}{}  {:>12.9}  {:>12.9}{}",
                row.n,
                row.dim,
                row.k,
                if row.k_capped { "*" } else { " " },
                row.value,
                row.per_copy,
                if row.subadditivity_evidence {
                    "   <- below the n=1 bound (upper-bound comparison only)"
                } else {
                    ""
                }
            );
        }
        if table.budget_exceeded {
            let _ = writeln!(text, "budget exhausted; higher powers skipped");
        }
    }

    let envelope = ReportFile::new("ef", opts.tolerances, &report)
        .with_seed(opts.seed)
        .with_input_hash(content_hash(&bytes));
    opts.write_json(&envelope)?;
    Ok(text)
}

#[derive(Debug, Clone)]
pub struct SearchParams {
    pub dims: String,
    pub rank: usize,
    pub trials: usize,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct SurvivorRef {
    pub trial: usize,
    pub sub_seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state_file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report_file: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct SearchReport {
    pub dims: (usize, usize),
    pub rank: usize,
    pub trials: usize,
    pub seed: u64,
    pub distillable: usize,
    pub separable: usize,
    pub candidates: usize,
    pub npt_unresolved: usize,
    pub inconclusive: usize,
    pub ppt_count: usize,
    pub npt_count: usize,
    pub npt_flagged_distillable: usize,
    pub reduction_violations: usize,
    pub rank_criterion_hits: usize,
    pub participation: ParticipationStats,
    pub participation_histogram: Histogram,
    pub participation_histogram_ppt: Histogram,
    pub survivors: Vec<SurvivorRef>,
}

/// `search --dims MxN --rank R --trials N`: seeded candidate sweep.
pub fn cmd_search(params: &SearchParams, opts: &GlobalOpts) -> CliResult<String> {
    let (da, db) = parse_dims(&params.dims)?;
    let summary = run_search(&SearchConfig {
        da,
        db,
        rank: params.rank,
        trials: params.trials,
        seed: opts.seed,
        tolerances: opts.tolerances,
        keep_survivors: true,
    })?;

    let mut survivor_refs = Vec::with_capacity(summary.survivors.len());
    if let Some(dir) = &params.out {
        fs::create_dir_all(dir)?;
    }
    for survivor in &summary.survivors {
        let (state_file, report_file) = if let Some(dir) = &params.out {
            let state_name = format!("survivor_{:07}.state.json", survivor.trial);
            let report_name = format!("survivor_{:07}.report.json", survivor.trial);
            let metadata = Metadata {
                label: Some("candidate: passes all necessary conditions".into()),
                seed: Some(survivor.sub_seed),
                provenance: Some(format!(
                    "search --dims {da}x{db} --rank {} --seed {} trial {}",
                    params.rank, opts.seed, survivor.trial
                )),
            };
            save_state_file(
                &dir.join(&state_name),
                &StateFile::from_state(&survivor.state, Some(metadata)),
            )?;
            ReportFile::new("search-survivor", opts.tolerances, &survivor.report)
                .with_seed(survivor.sub_seed)
                .write(&dir.join(&report_name))?;
            (Some(state_name), Some(report_name))
        } else {
            (None, None)
        };
        survivor_refs.push(SurvivorRef {
            trial: survivor.trial,
            sub_seed: survivor.sub_seed,
            state_file,
            report_file,
        });
    }

    let report = SearchReport {
        dims: summary.dims,
        rank: summary.rank,
        trials: summary.trials,
        seed: summary.seed,
        distillable: summary.distillable,
        separable: summary.separable,
        candidates: summary.candidates,
        npt_unresolved: summary.npt_unresolved,
        inconclusive: summary.inconclusive,
        ppt_count: summary.ppt_count,
        npt_count: summary.npt_count,
        npt_flagged_distillable: summary.npt_flagged_distillable,
        reduction_violations: summary.reduction_violations,
        rank_criterion_hits: summary.rank_criterion_hits,
        participation: summary.participation_all.clone(),
        participation_histogram: summary.participation_histogram.clone(),
        participation_histogram_ppt: summary.participation_histogram_ppt.clone(),
        survivors: survivor_refs,
    };

    if let Some(dir) = &params.out {
        let histogram = ReportFile::new(
            "participation-histogram",
            opts.tolerances,
            serde_json::json!({
                "dims": report.dims,
                "rank": report.rank,
                "trials": report.trials,
                "seed": report.seed,
                "all": &report.participation_histogram,
                "ppt_only": &report.participation_histogram_ppt,
                "stats": &report.participation,
            }),
        )
        .with_seed(opts.seed);
        histogram.write(&dir.join("participation_histogram.json"))?;
        ReportFile::new("search", opts.tolerances, &report)
            .with_seed(opts.seed)
            .write(&dir.join("summary.json"))?;
    }

    let mut text = String::new();
    let _ = writeln!(
        text,
        "search {da}x{db} rank {} trials {} seed {}",
        report.rank, report.trials, report.seed
    );
    let _ = writeln!(
        text,
        "  distillable: {}   separable: {}   candidates: {}   npt-unresolved: {}   inconclusive: {}",
        report.distillable,
        report.separable,
        report.candidates,
        report.npt_unresolved,
        report.inconclusive
    );
    let _ = writeln!(
        text,
        "  ppt: {}   npt: {} (flagged distillable: {})   reduction violations: {}   rank-criterion hits: {}",
        report.ppt_count,
        report.npt_count,
        report.npt_flagged_distillable,
        report.reduction_violations,
        report.rank_criterion_hits
    );
    let _ = writeln!(
        text,
        "  participation ratio: min {:.4}  mean {:.4}  max {:.4}",
        report.participation.min, report.participation.mean, report.participation.max
    );
    for s in &report.survivors {
        let _ = writeln!(
            text,
            "  candidate at trial {} (sub-seed {}){}",
            s.trial,
            s.sub_seed,
            s.state_file
                .as_deref()
                .map(|f| format!(" -> {f}"))
                .unwrap_or_default()
        );
    }

    let envelope = ReportFile::new("search", opts.tolerances, &report).with_seed(opts.seed);
    opts.write_json(&envelope)?;
    Ok(text)
}

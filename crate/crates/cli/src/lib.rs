//! Report types and command implementations behind the `staircase` binary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use staircase::testgen::{random_regular_matrix, random_regular_pair, scramble_consim, scramble_pair, ScrambleSpec};
use staircase::{
    consim_regularize, consim_residual, consim_structure, full_regularize, pair_residual, ComplexMatrix,
    ConsimResult, ConsimStructure, DecompositionDescriptor, Error, MatrixPair, PairResult, PairStructure,
    RegularPart, Tolerance, UnitaryFactor,
};

pub const EXIT_IO: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_DIMENSION: i32 = 3;
pub const EXIT_BREAKDOWN: i32 = 4;
pub const EXIT_MISMATCH: i32 = 5;

/// Staircase residuals above `RESIDUAL_BOUND * ||input||_F` fail verification.
pub const RESIDUAL_BOUND: f64 = 1e-8;
/// Accumulated unitaries with `||UU* - I||_F > DEFECT_BOUND * n` fail it too.
pub const DEFECT_BOUND: f64 = 1e-12;

/// Failure of a command, carrying the process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn mismatch(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_MISMATCH,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::NonFinite { .. } | Error::InvalidParameter(_) => EXIT_PARSE,
            Error::DimensionMismatch(_) | Error::NotSquare { .. } => EXIT_DIMENSION,
            Error::ToleranceBreakdown(_) | Error::NoConvergence(_) => EXIT_BREAKDOWN,
            Error::Io(_) => EXIT_IO,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        let code = if e.is_io() { EXIT_IO } else { EXIT_PARSE };
        CliError {
            code,
            message: format!("json: {e}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e).into()
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Consimilarity,
    MixedPair,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Indices {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_seq: Option<Vec<usize>>,
    /// First pass `(k_i, l_i)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kl_seq: Option<Vec<(usize, usize)>>,
    /// Second pass, run on the dual of the first remainder.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kl_seq_second: Option<Vec<(usize, usize)>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Structure {
    Consim(ConsimStructure),
    Pair(PairStructure),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transforms {
    /// Consimilarity: the accumulated `Q`. Pairs: `[S, R]` of the first pass
    /// followed by `[S, R]` of the second.
    pub unitaries: Vec<UnitaryFactor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regular: Option<ComplexMatrix>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub problem_kind: ProblemKind,
    pub indices: Indices,
    pub structure: Structure,
    pub residual: f64,
    pub tolerance_used: Tolerance,
    /// Absolute singular-value cuts the tolerance resolved to.
    pub rank_cuts: Vec<f64>,
    pub transform_unitarity_defect: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transforms: Option<Transforms>,
}

pub fn analyze_consim(a: &ComplexMatrix, tol: &Tolerance, emit_transforms: bool) -> CliResult<AnalysisReport> {
    let res = consim_regularize(a, tol)?;
    let structure = consim_structure(&res);
    Ok(AnalysisReport {
        problem_kind: ProblemKind::Consimilarity,
        indices: Indices {
            r_seq: Some(res.r_seq.clone()),
            kl_seq: None,
            kl_seq_second: None,
        },
        structure: Structure::Consim(structure),
        residual: res.residual,
        tolerance_used: *tol,
        rank_cuts: vec![res.rank_cut],
        transform_unitarity_defect: res.accumulated.defect(),
        transforms: emit_transforms.then(|| Transforms {
            unitaries: vec![res.accumulated.clone()],
            regular: Some(res.regular.clone()),
        }),
    })
}

pub fn analyze_pair(p: &MatrixPair, tol: &Tolerance, emit_transforms: bool) -> CliResult<AnalysisReport> {
    let full = full_regularize(p, tol)?;
    let passes = [&full.first_pass, &full.second_pass];
    let unitaries: Vec<UnitaryFactor> = passes
        .iter()
        .flat_map(|r| [r.left.clone(), r.right.clone()])
        .collect();
    let defect = unitaries.iter().map(UnitaryFactor::defect).fold(0.0, f64::max);
    Ok(AnalysisReport {
        problem_kind: ProblemKind::MixedPair,
        indices: Indices {
            r_seq: None,
            kl_seq: Some(full.first_pass.kl_seq.clone()),
            kl_seq_second: Some(full.second_pass.kl_seq.clone()),
        },
        structure: Structure::Pair(full.structure.clone()),
        residual: full.first_pass.residual.hypot(full.second_pass.residual),
        tolerance_used: *tol,
        rank_cuts: vec![full.first_pass.rank_cuts.0, full.first_pass.rank_cuts.1],
        transform_unitarity_defect: defect,
        transforms: emit_transforms.then_some(Transforms {
            unitaries,
            regular: None,
        }),
    })
}

fn join<T>(items: impl IntoIterator<Item = T>, f: impl Fn(T) -> String, empty: &str) -> String {
    let parts: Vec<String> = items.into_iter().map(f).collect();
    if parts.is_empty() {
        empty.to_string()
    } else {
        parts.join(" ")
    }
}

fn blocks_text(families: &[(&str, &BTreeMap<usize, usize>)]) -> String {
    let mut parts = Vec::new();
    for (name, map) in families {
        for (n, m) in map.iter() {
            if *m == 1 {
                parts.push(format!("{name}_{n}"));
            } else {
                parts.push(format!("{m}x{name}_{n}"));
            }
        }
    }
    if parts.is_empty() {
        "none".to_string()
    } else {
        parts.join(" + ")
    }
}

fn tolerance_text(t: &Tolerance) -> String {
    match t {
        Tolerance::Relative(v) => format!("relative {v:e}"),
        Tolerance::Absolute(v) => format!("absolute {v:e}"),
    }
}

fn kl_text(seq: &[(usize, usize)]) -> String {
    join(seq.iter(), |(k, l)| format!("({k},{l})"), "-")
}

pub fn report_text(r: &AnalysisReport) -> String {
    let mut out = String::new();
    let kind = match r.problem_kind {
        ProblemKind::Consimilarity => "consimilarity",
        ProblemKind::MixedPair => "mixed_pair",
    };
    let _ = writeln!(out, "problem: {kind}");
    if let Some(seq) = &r.indices.r_seq {
        let _ = writeln!(out, "r_seq: {}", join(seq.iter(), |x| x.to_string(), "-"));
    }
    if let Some(seq) = &r.indices.kl_seq {
        let _ = writeln!(out, "kl_seq: {}", kl_text(seq));
    }
    if let Some(seq) = &r.indices.kl_seq_second {
        let _ = writeln!(out, "kl_seq (second pass): {}", kl_text(seq));
    }
    match &r.structure {
        Structure::Consim(st) => {
            let _ = writeln!(out, "singular part: {}", blocks_text(&[("J", &st.jordan)]));
            let _ = writeln!(out, "regular part: {0}x{0}", st.regular_dim);
        }
        Structure::Pair(st) => {
            let fams = [("FG", &st.fg), ("JI", &st.ji), ("FGT", &st.fgt), ("IJ", &st.ij)];
            let _ = writeln!(out, "singular part: {}", blocks_text(&fams));
            let (m, n) = st.regular.shape();
            let _ = writeln!(out, "regular part: {m}x{n}");
        }
    }
    let _ = writeln!(out, "residual: {:e}", r.residual);
    let cuts = join(r.rank_cuts.iter(), |c| format!("{c:e}"), "-");
    let _ = writeln!(out, "tolerance: {} (cuts {cuts})", tolerance_text(&r.tolerance_used));
    let _ = writeln!(out, "unitarity defect: {:e}", r.transform_unitarity_defect);
    out
}

pub fn report_json(r: &AnalysisReport) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(r)?;
    s.push('\n');
    Ok(s)
}

pub fn read_report(path: &Path) -> CliResult<AnalysisReport> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn read_pair(a: &Path, b: &Path) -> CliResult<MatrixPair> {
    let first = staircase::io::read_matrix(a)?;
    let second = staircase::io::read_matrix(b)?;
    Ok(MatrixPair::new(first, second)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScrambleMode {
    None,
    Unitary,
    General,
}

/// Assembles a descriptor, optionally attaching a seeded random regular part
/// of size `regular_size` (only when the descriptor's own regular part is
/// empty) and scrambling the result.
pub fn generate(
    desc: &DecompositionDescriptor,
    seed: u64,
    mode: ScrambleMode,
    cond: f64,
    regular_size: usize,
) -> CliResult<Vec<ComplexMatrix>> {
    let mut desc = desc.clone();
    if regular_size > 0 {
        let empty = match &desc.regular {
            RegularPart::Matrix(m) => m.is_empty(),
            RegularPart::Pair(p) => p.first.is_empty(),
        };
        if !empty {
            return Err(Error::InvalidParameter("descriptor already has a regular part".into()).into());
        }
        desc.regular = if desc.is_pair() {
            RegularPart::Pair(random_regular_pair(regular_size, seed))
        } else {
            RegularPart::Matrix(random_regular_matrix(regular_size, seed))
        };
    }
    let spec = match mode {
        ScrambleMode::None => None,
        ScrambleMode::Unitary => Some(ScrambleSpec::unitary(seed)),
        ScrambleMode::General => Some(ScrambleSpec::general(seed, cond)),
    };
    Ok(match desc.assemble()? {
        staircase::Assembled::Matrix(a) => {
            let a = match &spec {
                Some(s) => scramble_consim(&a, s)?,
                None => a,
            };
            vec![a]
        }
        staircase::Assembled::Pair(p) => {
            let p = match &spec {
                Some(s) => scramble_pair(&p, s)?,
                None => p,
            };
            vec![p.first, p.second]
        }
    })
}

/// Input to [`verify`]: the matrix or pair a report claims to describe.
pub enum Subject {
    Matrix(ComplexMatrix),
    Pair(MatrixPair),
}

fn same_singular(a: &Structure, b: &Structure) -> bool {
    match (a, b) {
        (Structure::Consim(x), Structure::Consim(y)) => x == y,
        (Structure::Pair(x), Structure::Pair(y)) => {
            (&x.fg, &x.ji, &x.fgt, &x.ij) == (&y.fg, &y.ji, &y.fgt, &y.ij)
                && x.regular.shape() == y.regular.shape()
        }
        _ => false,
    }
}

fn check_bound(what: &str, value: f64, bound: f64) -> CliResult<()> {
    if value.is_finite() && value <= bound {
        Ok(())
    } else {
        Err(CliError::mismatch(format!("{what} {value:e} exceeds {bound:e}")))
    }
}

/// Recomputes the analysis at the report's tolerance and checks indices,
/// structure and residual certificates. Any disagreement is a mismatch.
pub fn verify(report: &AnalysisReport, subject: &Subject) -> CliResult<String> {
    let emit = report.transforms.is_some();
    let (fresh, norm, n) = match (report.problem_kind, subject) {
        (ProblemKind::Consimilarity, Subject::Matrix(a)) => {
            (analyze_consim(a, &report.tolerance_used, emit)?, a.frobenius_norm(), a.rows())
        }
        (ProblemKind::MixedPair, Subject::Pair(p)) => (
            analyze_pair(p, &report.tolerance_used, emit)?,
            p.frobenius_norm(),
            p.rows().max(p.cols()),
        ),
        _ => return Err(CliError::mismatch("report kind does not match the number of inputs")),
    };
    if fresh.indices != report.indices {
        return Err(CliError::mismatch(format!(
            "index sequences differ: report {:?}, recomputed {:?}",
            report.indices, fresh.indices
        )));
    }
    if !same_singular(&fresh.structure, &report.structure) {
        return Err(CliError::mismatch("block structure differs from the recomputed one"));
    }
    let res_bound = RESIDUAL_BOUND * norm.max(f64::MIN_POSITIVE);
    check_bound("reported residual", report.residual, res_bound)?;
    check_bound("recomputed residual", fresh.residual, res_bound)?;
    let def_bound = DEFECT_BOUND * n.max(1) as f64;
    check_bound("reported unitarity defect", report.transform_unitarity_defect, def_bound)?;

    if let Some(t) = &report.transforms {
        for u in &t.unitaries {
            check_bound("stored transform defect", u.defect(), def_bound)?;
        }
        let stored = match subject {
            Subject::Matrix(a) => {
                let [q] = t.unitaries.as_slice() else {
                    return Err(CliError::mismatch("expected one stored transform"));
                };
                let res = ConsimResult {
                    r_seq: report.indices.r_seq.clone().unwrap_or_default(),
                    regular: t.regular.clone().unwrap_or_else(|| ComplexMatrix::zeros(0, 0)),
                    accumulated: q.clone(),
                    residual: 0.0,
                    rank_cut: 0.0,
                };
                check_shapes(q.dim(), a.rows())?;
                consim_residual(a, &res)?
            }
            Subject::Pair(p) => {
                let [s, r, ..] = t.unitaries.as_slice() else {
                    return Err(CliError::mismatch("expected stored pair transforms"));
                };
                check_shapes(s.dim(), p.rows())?;
                check_shapes(r.dim(), p.cols())?;
                let res = PairResult {
                    kl_seq: report.indices.kl_seq.clone().unwrap_or_default(),
                    remainder: MatrixPair::empty(),
                    left: s.clone(),
                    right: r.clone(),
                    residual: 0.0,
                    rank_cuts: (0.0, 0.0),
                };
                pair_residual(p, &res)?
            }
        };
        check_bound("residual of stored transforms", stored, res_bound)?;
    }
    Ok(format!(
        "ok: indices and structure reproduced, residual {:e} <= {:e}\n",
        fresh.residual, res_bound
    ))
}

fn check_shapes(got: usize, want: usize) -> CliResult<()> {
    if got == want {
        Ok(())
    } else {
        Err(CliError::mismatch(format!("stored transform is {got}x{got}, input needs {want}")))
    }
}

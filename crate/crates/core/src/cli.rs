//! Command-line driver. Reports go to stdout as JSON; exit codes are 0 for a
//! clean verification, 1 when a check fails and 2 for bad input.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::json;

use crate::blocks;
use crate::ceersim::CeerFamily;
use crate::coceer::{self, Mode};
use crate::eqrel::Character;
use crate::error::{Error, Result};
use crate::gen;
use crate::pi01::{self, GTable};
use crate::preorder;
use crate::seq::Delta02SetApprox;
use crate::suite::{self, SuiteConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "effstruct",
    version,
    about = "Run and verify effective constructions on equivalence structures and preorders"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Diagonalize a co-c.e. equivalence relation against a ceer family.
    Coceer(CoceerArgs),
    /// Build the co-c.e. relation whose label classes follow lim inf g.
    Pi01(Pi01Args),
    /// Build the c.e. preorder coding a Δ⁰₂ set.
    Preorder(PreorderArgs),
    /// Encode a bit string into block sizes, or decode it back.
    Blocks(BlocksArgs),
    /// Run every acceptance suite on generated instances.
    VerifyAll(VerifyAllArgs),
}

#[derive(Debug, Args)]
pub struct CoceerArgs {
    /// Family JSON: {"members":[{"type":"script",...}|{"type":"churn",...}]}.
    #[arg(long, conflicts_with = "generate")]
    pub family: Option<PathBuf>,
    /// Generate a family of this many members from --seed instead.
    #[arg(long)]
    pub generate: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of columns (defaults to the family size).
    #[arg(long)]
    pub columns: Option<usize>,
    #[arg(long, default_value_t = 5000)]
    pub stages: u64,
    #[arg(long, default_value_t = Mode::Spaced)]
    pub mode: Mode,
    /// Check every requirement and exit 1 if one fails.
    #[arg(long)]
    pub verify: bool,
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Pi01Args {
    /// Table JSON: {"columns":[{"prefix":[...],"period":[...]},...]}.
    #[arg(long, conflicts_with = "generate")]
    pub g: Option<PathBuf>,
    /// Generate a table with labels 0..=K from --seed instead.
    #[arg(long, value_name = "K")]
    pub generate: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Defaults to the horizon needed to certify --labels.
    #[arg(long)]
    pub stages: Option<u64>,
    /// Largest label to certify (defaults to the last table column).
    #[arg(long, value_name = "K")]
    pub labels: Option<usize>,
    #[arg(long)]
    pub verify: bool,
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PreorderArgs {
    /// Δ⁰₂ approximation JSON: {"columns":[...]} of 0/1 columns; column 0 settles at 0.
    #[arg(long, conflicts_with = "generate")]
    pub b: Option<PathBuf>,
    /// Generate an approximation on 0..=K from --seed instead.
    #[arg(long, value_name = "K")]
    pub generate: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Defaults to the horizon needed to certify --horizon.
    #[arg(long)]
    pub stages: Option<u64>,
    /// Largest x to certify (defaults to the last table column).
    #[arg(long)]
    pub horizon: Option<u64>,
    #[arg(long)]
    pub verify: bool,
    /// Write the final preorder restricted to the window.
    #[arg(long)]
    pub snapshot: Option<PathBuf>,
    #[arg(long)]
    pub na: Option<usize>,
    #[arg(long)]
    pub nb: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BlocksArgs {
    /// Bit string such as 1011.
    #[arg(long, required_unless_present = "decode")]
    pub x: Option<String>,
    /// Number of blocks (defaults to the bit count, or to the number of
    /// classes of size at least 3 when decoding).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, requires = "x", conflicts_with = "decode")]
    pub encode: Option<PathBuf>,
    /// Character JSON: {"entries":[[size,count],...]}.
    #[arg(long)]
    pub decode: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyAllArgs {
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Stage budget for each co-ceer run.
    #[arg(long, default_value_t = 5000)]
    pub stages: u64,
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::input(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::input(format!("cannot write {}: {e}", path.display())))
}

fn print<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn exit_for(ok: bool) -> i32 {
    if ok {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}

fn coceer_cmd(a: &CoceerArgs) -> Result<i32> {
    let fam: CeerFamily = match (&a.family, a.generate) {
        (Some(path), _) => read_json(path)?,
        (None, Some(count)) => gen::generate_family(a.seed, count),
        (None, None) => return Err(Error::input("pass --family FILE or --generate COUNT")),
    };
    let columns = a.columns.unwrap_or(fam.len());
    if columns > fam.len() {
        return Err(Error::input(format!(
            "{columns} columns requested but the family has {} members",
            fam.len()
        )));
    }
    let (state, trace) = coceer::run_coceer(&fam, columns, a.stages, a.mode)?;
    if let Some(path) = &a.trace {
        write_json(path, &trace)?;
    }
    let requirements = (0..columns)
        .map(|e| coceer::verify_requirement(&state, &fam, e))
        .collect::<Result<Vec<_>>>()?;
    let witness_violations = state.witness_class_violations();
    let size_violations = state.size_violations();
    let ok = requirements.iter().all(|r| r.satisfied && r.certified)
        && witness_violations.is_empty()
        && size_violations.is_empty();
    print(&json!({
        "format": 1,
        "stages": state.stage(),
        "mode": a.mode,
        "columns": columns,
        "requirements": requirements,
        "witness_class_violations": witness_violations,
        "size_violations": size_violations,
        "verified": ok,
    }))?;
    Ok(if a.verify { exit_for(ok) } else { EXIT_OK })
}

fn pi01_cmd(a: &Pi01Args) -> Result<i32> {
    let g: GTable = match (&a.g, a.generate) {
        (Some(path), _) => read_json(path)?,
        (None, Some(k)) => gen::generate_gtable(a.seed, k),
        (None, None) => return Err(Error::input("pass --g FILE or --generate K")),
    };
    let max_label = a.labels.unwrap_or(g.width().saturating_sub(1));
    let stages = a
        .stages
        .unwrap_or_else(|| pi01::required_stages(&g, max_label));
    let (st, trace) = pi01::run_pi01(&g, stages)?;
    if let Some(path) = &a.trace {
        write_json(path, &trace)?;
    }
    let mismatches = st.count_mismatches(&g);
    let mut report = json!({
        "format": 1,
        "stages": st.stage(),
        "elements": st.next_fresh(),
        "idle": st.idle(),
        "count_mismatches": mismatches,
    });
    let mut ok = mismatches.is_empty();
    if a.verify {
        let counts = pi01::verify_liminf_counts(&trace, &g, max_label)?;
        ok &= counts.all_match();
        report["labels"] = serde_json::to_value(&counts)?;
    }
    report["verified"] = json!(ok);
    print(&report)?;
    Ok(if a.verify { exit_for(ok) } else { EXIT_OK })
}

fn preorder_cmd(a: &PreorderArgs) -> Result<i32> {
    let b: Delta02SetApprox = match (&a.b, a.generate) {
        (Some(path), _) => read_json(path)?,
        (None, Some(k)) => gen::generate_b(a.seed, k),
        (None, None) => return Err(Error::input("pass --b FILE or --generate K")),
    };
    let horizon = a.horizon.unwrap_or(b.width().saturating_sub(1) as u64);
    let stages = a
        .stages
        .unwrap_or_else(|| preorder::required_stages(&b, horizon));
    let t = preorder::run_preorder(&b, stages)?;
    let (na, nb) = preorder::default_window(&t);
    let (na, nb) = (a.na.unwrap_or(na), a.nb.unwrap_or(nb));
    if let Some(path) = &a.snapshot {
        write_json(path, &preorder::materialize(&t, na, nb))?;
    }
    let mut report = json!({
        "format": 1,
        "stages": t.stage(),
        "v": t.values(),
        "fingerprint": preorder::fingerprint(&t),
        "max_changes": t.max_changes(),
        "window": [na, nb],
    });
    let mut ok = t.max_changes() <= 1;
    if a.verify {
        let claim = preorder::verify_claim(&t, &b, horizon)?;
        ok &= claim.ok();
        report["claim"] = serde_json::to_value(&claim)?;
    }
    report["verified"] = json!(ok);
    print(&report)?;
    Ok(if a.verify { exit_for(ok) } else { EXIT_OK })
}

fn blocks_cmd(a: &BlocksArgs) -> Result<i32> {
    if let Some(path) = &a.decode {
        let ch: Character = read_json(path)?;
        let n = a.n.unwrap_or_else(|| blocks::inferred_blocks(&ch));
        let bits = blocks::decode_character(&ch, n)?;
        print(&json!({ "format": 1, "n": n, "x": blocks::bits_to_string(&bits) }))?;
        return Ok(EXIT_OK);
    }
    let x = blocks::parse_bits(a.x.as_deref().unwrap_or_default())?;
    let n = a.n.unwrap_or(x.len());
    let structure = blocks::encode_blocks(&x, n)?;
    let character = structure.character();
    let ok = character == blocks::block_character(&x, n)?;
    if let Some(path) = &a.encode {
        write_json(
            path,
            &json!({
                "format": 1,
                "x": blocks::bits_to_string(structure.bits()),
                "n": n,
                "partition": structure.partition(),
                "character": character,
            }),
        )?;
    }
    print(&json!({ "format": 1, "n": n, "character": character, "verified": ok }))?;
    Ok(exit_for(ok))
}

fn verify_all_cmd(a: &VerifyAllArgs) -> Result<i32> {
    let report = suite::run_suite(&SuiteConfig {
        seed: a.seed,
        stages: a.stages,
    })?;
    for c in &report.criteria {
        eprintln!("{}", c.line());
    }
    print(&report)?;
    Ok(exit_for(report.passed()))
}

/// Dispatch a parsed configuration and map the outcome to an exit code.
pub fn run(config: &RunConfig) -> i32 {
    let outcome = match &config.command {
        Command::Coceer(a) => coceer_cmd(a),
        Command::Pi01(a) => pi01_cmd(a),
        Command::Preorder(a) => preorder_cmd(a),
        Command::Blocks(a) => blocks_cmd(a),
        Command::VerifyAll(a) => verify_all_cmd(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_input_error() {
                EXIT_INPUT
            } else {
                EXIT_FAILED
            }
        }
    }
}

/// Parse arguments and run; usage errors exit 2, `--help` exits 0.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match RunConfig::try_parse_from(args) {
        Ok(config) => run(&config),
        Err(e) => {
            let _ = e.print();
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(args: &[&str]) -> i32 {
        main_with(std::iter::once("effstruct").chain(args.iter().copied()))
    }

    #[test]
    fn input_errors_exit_2() {
        assert_eq!(
            code(&["pi01", "--g", "/nonexistent/missing.json"]),
            EXIT_INPUT
        );
        assert_eq!(
            code(&["coceer", "--generate", "3", "--stages", "0"]),
            EXIT_INPUT
        );
        assert_eq!(code(&["coceer"]), EXIT_INPUT);
        assert_eq!(code(&["blocks", "--x", "10a"]), EXIT_INPUT);
        assert_eq!(
            code(&["coceer", "--mode", "sideways", "--generate", "2"]),
            EXIT_INPUT
        );
        assert_eq!(code(&["nonsense"]), EXIT_INPUT);
    }

    #[test]
    fn generated_runs_verify() {
        assert_eq!(
            code(&["pi01", "--generate", "4", "--seed", "3", "--verify"]),
            EXIT_OK
        );
        assert_eq!(
            code(&["preorder", "--generate", "6", "--seed", "3", "--verify"]),
            EXIT_OK
        );
        assert_eq!(code(&["blocks", "--x", "1011"]), EXIT_OK);
    }

    #[test]
    fn short_horizon_is_reported() {
        assert_eq!(
            code(&["pi01", "--generate", "4", "--stages", "2", "--verify"]),
            EXIT_INPUT
        );
    }
}

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use pik_core::ajohnson::{factor_witt_sum, l1_rank, lower_bound_certificate};
use pik_core::conj::{conjugacy, SearchBudget};
use pik_core::decomp::{gr_rank_table, verify_direct_sum};
use pik_core::endos::check_mccool_relations;
use pik_core::igroup::{parse_yword, word_problem};
use pik_core::lie::{lyndon_words, render_bracketing, witt, LyndonTable};
use pik_core::magnus::magnus_expand;
use pik_core::verify::{verify_all, Budgets, Format, RunConfig};
use pik_core::{FreeWord, IElem};

#[derive(Parser)]
#[command(
    name = "pik",
    version,
    about = "Exact computations in the partial inner automorphism group I_n"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Automorphisms of F_n.
    #[command(subcommand)]
    Endos(EndosCmd),
    /// Truncated Magnus expansions.
    #[command(subcommand)]
    Magnus(MagnusCmd),
    /// Normal forms in I_n.
    #[command(subcommand)]
    Igroup(IgroupCmd),
    /// Conjugacy in I_n.
    #[command(subcommand)]
    Conj(ConjCmd),
    /// Free Lie algebras.
    #[command(subcommand)]
    Lie(LieCmd),
    /// Lattice certificates for the ideal J.
    #[command(subcommand)]
    Decomp(DecompCmd),
    /// Johnson images and rank bounds.
    #[command(subcommand)]
    Ia(IaCmd),
    /// Runs the whole verification suite and writes a JSON report.
    VerifyAll(VerifyArgs),
}

#[derive(Subcommand)]
enum EndosCmd {
    /// Checks every McCool relation among the χ_ij.
    CheckMccool {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Subcommand)]
enum MagnusCmd {
    /// Prints the Magnus expansion of a word in x1..xn.
    Expand {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        maxdeg: usize,
        word: String,
    },
}

#[derive(Subcommand)]
enum IgroupCmd {
    /// Collects a word in the y(m,i) to normal form.
    NormalForm {
        #[arg(long)]
        n: usize,
        word: String,
    },
    /// Decides whether a word in the y(m,i) is trivial.
    WordProblem {
        #[arg(long)]
        n: usize,
        word: String,
    },
}

#[derive(Subcommand)]
enum ConjCmd {
    /// Decides conjugacy of the elements stored in two word files.
    Decide {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = SearchBudget::default().len)]
        budget_len: usize,
        #[arg(long, default_value_t = SearchBudget::default().coset)]
        budget_coset: usize,
        #[arg(long, default_value_t = SearchBudget::default().nilpotency)]
        budget_nilpotency: usize,
        #[arg(long, default_value_t = SearchBudget::default().nodes)]
        budget_nodes: usize,
        x: PathBuf,
        y: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Text,
}

impl From<OutFormat> for Format {
    fn from(f: OutFormat) -> Self {
        match f {
            OutFormat::Json => Format::Json,
            OutFormat::Text => Format::Text,
        }
    }
}

#[derive(Subcommand)]
enum LieCmd {
    /// Rank of the degree-c piece of the free Lie algebra on N letters.
    Witt {
        #[arg(long = "N")]
        letters: u64,
        #[arg(long)]
        c: u64,
    },
    /// Lyndon basis of the degree-m piece.
    Basis {
        #[arg(long = "N")]
        letters: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: OutFormat,
    },
}

#[derive(Subcommand)]
enum DecompCmd {
    /// Direct-sum certificates for L = (⊕ L(Y_i)) ⊕ J.
    Verify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        max_degree: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: OutFormat,
    },
    /// Ranks of gr(I_n) from the quotient L/J against the factor sum.
    RankTable {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        max_degree: usize,
    },
}

#[derive(Subcommand)]
enum IaCmd {
    /// Rank of the Johnson lattice of the weight-c commutators of I_n.
    L1Rank {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        c: usize,
        /// Truncation degree; defaults to c + 2.
        #[arg(long)]
        maxdeg: Option<usize>,
    },
    /// Certified lower bound for the rank of the IA Johnson piece.
    #[command(name = "thu1")]
    LowerBound {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        c: usize,
    },
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 4)]
    max_degree: usize,
    #[arg(long, default_value_t = Budgets::default().len)]
    budget_len: usize,
    #[arg(long, default_value_t = Budgets::default().coset)]
    budget_coset: usize,
    #[arg(long, default_value_t = Budgets::default().nilpotency)]
    budget_nilpotency: usize,
    #[arg(long, default_value_t = RunConfig::default().seed)]
    seed: u64,
    /// Cases per fuzz suite.
    #[arg(long, default_value_t = RunConfig::default().cases)]
    cases: usize,
    /// Drops one type-(3) relator, as a negative control.
    #[arg(long)]
    drop_relator: Option<usize>,
    #[arg(long, value_enum, default_value = "json")]
    format: OutFormat,
    /// Report path; the report goes to stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string(v).expect("json values serialize"));
}

fn status(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn read_word(path: &PathBuf) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Endos(EndosCmd::CheckMccool { n }) => {
            let r = check_mccool_relations(n);
            print_json(&json!({ "instances": r.instances, "failures": r.failures }));
            Ok(status(r.passed()))
        }
        Command::Magnus(MagnusCmd::Expand { n, maxdeg, word }) => {
            let w = FreeWord::parse(&word, n)?;
            print_json(&magnus_expand(&w, maxdeg).to_json());
            Ok(ExitCode::SUCCESS)
        }
        Command::Igroup(IgroupCmd::NormalForm { n, word }) => {
            let e = IElem::parse(&word, n)?;
            print_json(&json!({ "components": e.component_strings() }));
            Ok(ExitCode::SUCCESS)
        }
        Command::Igroup(IgroupCmd::WordProblem { n, word }) => {
            let trivial = word_problem(n, &parse_yword(&word, n)?)?;
            print_json(&json!({ "trivial": trivial }));
            Ok(ExitCode::SUCCESS)
        }
        Command::Conj(ConjCmd::Decide {
            n,
            budget_len,
            budget_coset,
            budget_nilpotency,
            budget_nodes,
            x,
            y,
        }) => {
            let x = IElem::parse(read_word(&x)?.trim(), n)?;
            let y = IElem::parse(read_word(&y)?.trim(), n)?;
            let budget = SearchBudget {
                len: budget_len,
                coset: budget_coset,
                nilpotency: budget_nilpotency,
                nodes: budget_nodes,
            };
            print_json(&conjugacy(&x, &y, &budget)?.to_json());
            Ok(ExitCode::SUCCESS)
        }
        Command::Lie(LieCmd::Witt { letters, c }) => {
            anyhow::ensure!(letters >= 1 && c >= 1, "N and c must be positive");
            print_json(&json!({ "N": letters, "c": c, "witt": witt(letters, c) }));
            Ok(ExitCode::SUCCESS)
        }
        Command::Lie(LieCmd::Basis { letters, m, format }) => {
            anyhow::ensure!(letters >= 1 && m >= 1, "N and m must be positive");
            let table = LyndonTable::new(letters, m)?;
            let words = lyndon_words(letters, m);
            match format {
                OutFormat::Json => {
                    let elems: Vec<Value> = words
                        .iter()
                        .enumerate()
                        .map(|(k, w)| {
                            json!({
                                "lyndon": w.iter().map(|&a| a + 1).collect::<Vec<_>>(),
                                "bracket": render_bracketing(w),
                                "tensor": table.element(k, m).coords().to_json(),
                            })
                        })
                        .collect();
                    print_json(&Value::Array(elems));
                }
                OutFormat::Text => {
                    for w in &words {
                        println!("{}", render_bracketing(w));
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Decomp(DecompCmd::Verify { n, max_degree, format }) => {
            let r = verify_direct_sum(n, max_degree)?;
            match format {
                OutFormat::Json => print_json(&json!({ "per_degree": r.per_degree })),
                OutFormat::Text => {
                    for d in &r.per_degree {
                        println!(
                            "m={} total={} J={} Y={:?} direct_sum={} snf_ones={}",
                            d.m, d.rank_total, d.rank_j, d.ranks_y, d.direct_sum, d.snf_ones
                        );
                    }
                }
            }
            Ok(status(r.passed()))
        }
        Command::Decomp(DecompCmd::RankTable { n, max_degree }) => {
            let rows = gr_rank_table(n, max_degree)?;
            let ok = rows.iter().all(|r| r.agrees());
            print_json(&serde_json::to_value(&rows)?);
            Ok(status(ok))
        }
        Command::Ia(IaCmd::L1Rank { n, c, maxdeg }) => {
            let rank = l1_rank(n, c, maxdeg.unwrap_or(c + 2))?;
            let expected = factor_witt_sum(n, c);
            print_json(&json!({ "n": n, "c": c, "rank": rank, "factor_sum": expected }));
            Ok(status(rank as u64 == expected))
        }
        Command::Ia(IaCmd::LowerBound { n, c }) => {
            let b = lower_bound_certificate(n, c)?;
            print_json(&serde_json::to_value(&b)?);
            Ok(status(b.certified))
        }
        Command::VerifyAll(a) => {
            let config = RunConfig {
                n: a.n,
                max_degree: a.max_degree,
                budgets: Budgets {
                    len: a.budget_len,
                    coset: a.budget_coset,
                    nilpotency: a.budget_nilpotency,
                },
                seed: a.seed,
                cases: a.cases,
                drop_relator: a.drop_relator,
                format: a.format.into(),
                output: a.output,
            };
            let report = verify_all(&config)?;
            let mut text = report.render(config.format);
            if !text.ends_with('\n') {
                text.push('\n');
            }
            match &config.output {
                Some(path) => {
                    fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?
                }
                None => print!("{text}"),
            }
            for c in report.failing() {
                eprintln!("failed: {} {}", c.name, c.details);
            }
            Ok(status(report.passed()))
        }
    }
}

fn main() -> ExitCode {
    if let Some(k) = std::env::var("PIK_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if k > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
        }
    }
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

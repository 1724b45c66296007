//! Batch command-line front end. Every command prints line-oriented
//! output and maps its result to a deterministic exit code:
//! 0 = verified/success, 1 = falsified/negative, 2 = unknown/budget
//! exhausted, 3 = input error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gentor::certificates::{self, SearchBounds};
use gentor::presentations::{
    self, alexander_polynomial, dehn_filling, homology_h1, meridian_gt_search, prover,
    twist_sum, MeridianOutcome, Presentation, TrivialityOutcome,
};
use gentor::quasimorphisms::{
    self, format_rational, AxiomSample, CountingQm, DEFAULT_N,
};
use gentor::scl::{self, Verdict};
use gentor::words::{GroupSpec, Word};
use gentor::{Error, Result};

const EXIT_OK: u8 = 0;
const EXIT_NEGATIVE: u8 = 1;
const EXIT_UNKNOWN: u8 = 2;
const EXIT_INPUT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "gentor",
    about = "Generalized torsion calculator: certificates, scl bounds, and knot-group presentations",
    version
)]
struct Cli {
    /// Emit only the stable line-oriented machine format.
    #[arg(long, global = true)]
    machine: bool,
    /// Cap on worker threads (0 = library default). Output is identical
    /// for every value.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Search/prover budget; defaults to $GENTOR_BUDGET or 1000000.
    #[arg(long, global = true)]
    budget: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce a word to free-product normal form.
    Reduce {
        #[arg(short = 'g')]
        group: String,
        #[arg(short = 'w')]
        word: String,
    },
    /// Bounded search for a generalized-torsion certificate.
    OrderSearch {
        #[arg(short = 'g')]
        group: String,
        #[arg(short = 'w')]
        word: String,
        #[arg(long, default_value_t = 6)]
        max_k: u64,
        #[arg(long = "max-conj-len", default_value_t = 2)]
        max_conj_len: usize,
        #[arg(long, default_value_t = 2)]
        max_exp: i64,
        /// Also write the found certificate to this path.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Re-verify a certificate file.
    Verify { file: PathBuf },
    /// Normalize a certificate (first conjugator becomes the identity).
    Normalize {
        file: PathBuf,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Transport a certificate of a factor-conjugate element into the
    /// factor.
    Transport {
        file: PathBuf,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Certified scl bounds from quasimorphisms and certificate search.
    SclBounds {
        #[arg(short = 'g')]
        group: String,
        #[arg(short = 'w')]
        word: String,
        /// Quasimorphism family, e.g. "ab:6, aba:9" (default family if
        /// omitted).
        #[arg(long)]
        qm: Option<String>,
        #[arg(long = "N", default_value_t = DEFAULT_N)]
        n: i64,
        #[arg(long, default_value_t = 6)]
        max_k: u64,
        #[arg(long = "max-conj-len", default_value_t = 2)]
        max_conj_len: usize,
        #[arg(long, default_value_t = 2)]
        max_exp: i64,
    },
    /// Full classification pipeline for one element.
    Classify {
        #[arg(short = 'g')]
        group: String,
        #[arg(short = 'w')]
        word: String,
        #[arg(long)]
        qm: Option<String>,
        #[arg(long = "N", default_value_t = DEFAULT_N)]
        n: i64,
        #[arg(long, default_value_t = 6)]
        max_k: u64,
        #[arg(long = "max-conj-len", default_value_t = 2)]
        max_conj_len: usize,
        #[arg(long, default_value_t = 2)]
        max_exp: i64,
    },
    /// Evaluate the quasimorphism family on a word and run the interval
    /// axiom checks.
    QmCheck {
        #[arg(short = 'g')]
        group: String,
        #[arg(short = 'w')]
        word: String,
        #[arg(long)]
        qm: Option<String>,
        #[arg(long = "N", default_value_t = DEFAULT_N)]
        n: i64,
    },
    /// Construct presentations.
    Present {
        #[command(subcommand)]
        target: PresentTarget,
    },
    /// First homology of a presentation file.
    H1 { file: PathBuf },
    /// Alexander polynomial of a presentation file.
    Alexander { file: PathBuf },
    /// Prove a word trivial in a presented group.
    ProveTrivial {
        file: PathBuf,
        #[arg(short = 'w')]
        word: String,
        /// Also write the derivation to this path.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Search for a generalized-torsion certificate for the meridian in
    /// a filled presentation.
    GtMeridian {
        file: PathBuf,
        #[arg(short = 'm')]
        m: u64,
    },
}

#[derive(Subcommand)]
enum PresentTarget {
    /// Connected sum of twist knots, optionally Dehn filled.
    TwistSum {
        /// Twist parameters, comma-separated, e.g. "1,2".
        #[arg(long, value_delimiter = ',')]
        p: Vec<u64>,
        /// Filling slope "m" or "m/n".
        #[arg(long)]
        slope: Option<String>,
    },
}

fn default_budget(flag: Option<u64>) -> Result<u64> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match std::env::var("GENTOR_BUDGET") {
        Ok(v) => v
            .parse()
            .map_err(|_| Error::BadParam(format!("GENTOR_BUDGET is not an integer: `{v}`"))),
        Err(_) => Ok(prover::DEFAULT_BUDGET),
    }
}

fn parse_group_word(group: &str, word: &str) -> Result<(GroupSpec, Word)> {
    let group = GroupSpec::parse(group)?;
    let w = Word::parse(word, &group)?;
    Ok((group, w))
}

fn family_for(group: &GroupSpec, qm: &Option<String>) -> Result<Vec<CountingQm>> {
    match qm {
        Some(spec) => quasimorphisms::parse_family(spec, group),
        None => Ok(quasimorphisms::default_family(group)),
    }
}

fn read_file(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &PathBuf, text: &str) -> Result<()> {
    std::fs::write(path, text)
        .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))
}

fn parse_slope(text: &str) -> Result<(i64, i64)> {
    let (m, n) = match text.split_once('/') {
        Some((m, n)) => (m, n),
        None => (text, "1"),
    };
    let m: i64 = m
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad slope numerator `{m}`")))?;
    let n: i64 = n
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad slope denominator `{n}`")))?;
    Ok((m, n))
}

fn run(cli: Cli) -> Result<u8> {
    let budget = default_budget(cli.budget)?;
    match cli.command {
        Command::Reduce { group, word } => {
            let (_, w) = parse_group_word(&group, &word)?;
            println!("word: {w}");
            Ok(EXIT_OK)
        }
        Command::OrderSearch {
            group,
            word,
            max_k,
            max_conj_len,
            max_exp,
            emit,
        } => {
            let (g, w) = parse_group_word(&group, &word)?;
            let bounds = SearchBounds {
                max_k,
                max_conj_syllables: max_conj_len,
                max_abs_exponent: max_exp,
            };
            let outcome = certificates::search_order(&g, &w, bounds)?;
            if let Some(cert) = outcome.certificate {
                let text = certificates::to_file_string(&cert);
                print!("{text}");
                if let Some(path) = emit {
                    write_file(&path, &text)?;
                }
                return Ok(EXIT_OK);
            }
            if outcome.lower_bound.is_none() {
                println!("verdict: NotGT");
                println!("reason: infinite-abelian-order");
                return Ok(EXIT_NEGATIVE);
            }
            println!("verdict: Unknown");
            println!(
                "searched: k<={} conj-len<={} exp<={}",
                bounds.max_k, bounds.max_conj_syllables, bounds.max_abs_exponent
            );
            Ok(EXIT_UNKNOWN)
        }
        Command::Verify { file } => {
            let mut cert = certificates::from_file_string(&read_file(&file)?)?;
            match cert.verify() {
                Ok(true) => {
                    println!("verified: true");
                    println!("k: {}", cert.k());
                    Ok(EXIT_OK)
                }
                Ok(false) | Err(Error::NotVerified) => {
                    println!("verified: false");
                    Ok(EXIT_NEGATIVE)
                }
                Err(e) => Err(e),
            }
        }
        Command::Normalize { file, emit } => {
            let cert = certificates::from_file_string(&read_file(&file)?)?;
            let normalized = certificates::normalize(&cert)?;
            let text = certificates::to_file_string(&normalized);
            print!("{text}");
            if let Some(path) = emit {
                write_file(&path, &text)?;
            }
            Ok(EXIT_OK)
        }
        Command::Transport { file, emit } => {
            let cert = certificates::from_file_string(&read_file(&file)?)?;
            match certificates::transport_to_factor(&cert) {
                Ok(factor_cert) => {
                    let text = certificates::to_file_string(&factor_cert);
                    print!("{text}");
                    if let Some(path) = emit {
                        write_file(&path, &text)?;
                    }
                    Ok(EXIT_OK)
                }
                Err(Error::NotConjugateIntoFactor) => {
                    println!("transport: none");
                    println!("reason: not-conjugate-into-factor");
                    Ok(EXIT_NEGATIVE)
                }
                Err(e) => Err(e),
            }
        }
        Command::SclBounds {
            group,
            word,
            qm,
            n,
            max_k,
            max_conj_len,
            max_exp,
        } => {
            let (g, w) = parse_group_word(&group, &word)?;
            let family = family_for(&g, &qm)?;
            let bounds = SearchBounds {
                max_k,
                max_conj_syllables: max_conj_len,
                max_abs_exponent: max_exp,
            };
            let sb = scl::bounds(&g, &w, &family, bounds, n)?;
            println!("scl_lower: {}", sb.lower.render());
            println!("scl_upper: {}", sb.upper.render());
            for line in &sb.provenance {
                println!("prov: {line}");
            }
            Ok(EXIT_OK)
        }
        Command::Classify {
            group,
            word,
            qm,
            n,
            max_k,
            max_conj_len,
            max_exp,
        } => {
            let (g, w) = parse_group_word(&group, &word)?;
            let family = family_for(&g, &qm)?;
            let bounds = SearchBounds {
                max_k,
                max_conj_syllables: max_conj_len,
                max_abs_exponent: max_exp,
            };
            let verdict = scl::classify(&g, &w, bounds, &family, n)?;
            print!("{}", scl::render_verdict(&verdict));
            Ok(match verdict {
                Verdict::Torsion { .. } | Verdict::GtFound(_) => EXIT_OK,
                Verdict::NotGt(_) => EXIT_NEGATIVE,
                Verdict::Unknown(_) => EXIT_UNKNOWN,
            })
        }
        Command::QmCheck { group, word, qm, n } => {
            let (g, w) = parse_group_word(&group, &word)?;
            let family = family_for(&g, &qm)?;
            let mut samples = Vec::new();
            for factor in 0..g.factor_count() {
                samples.push(AxiomSample {
                    g: w.clone(),
                    h: g.generator_power(factor, 1),
                    m: 2,
                });
            }
            for phi in &family {
                let value = phi.evaluate(&w)?;
                let interval = phi.homogenize(&w, n)?;
                println!(
                    "qm: w={} value={} center={} radius={}",
                    phi.word(),
                    value,
                    format_rational(&interval.center),
                    format_rational(&interval.radius)
                );
                match quasimorphisms::axiom_checks(phi, &samples, n) {
                    Ok(_) => {}
                    Err(Error::DefectViolation(msg)) => {
                        println!("axioms: violated");
                        println!("detail: {msg}");
                        return Ok(EXIT_NEGATIVE);
                    }
                    Err(e) => return Err(e),
                }
            }
            println!("axioms: ok samples={}", samples.len());
            Ok(EXIT_OK)
        }
        Command::Present { target } => match target {
            PresentTarget::TwistSum { p, slope } => {
                let mut pres = twist_sum(&p)?;
                if let Some(slope) = slope {
                    let (m, n) = parse_slope(&slope)?;
                    pres = dehn_filling(&pres, m, n)?;
                }
                print!("{}", pres.to_file_string()?);
                Ok(EXIT_OK)
            }
        },
        Command::H1 { file } => {
            let pres = Presentation::from_file_string(&read_file(&file)?)?;
            println!("h1: {}", homology_h1(&pres));
            Ok(EXIT_OK)
        }
        Command::Alexander { file } => {
            let pres = Presentation::from_file_string(&read_file(&file)?)?;
            println!("alexander: {}", alexander_polynomial(&pres)?);
            Ok(EXIT_OK)
        }
        Command::ProveTrivial { file, word, emit } => {
            let pres = Presentation::from_file_string(&read_file(&file)?)?;
            let w = pres.parse_word(&word)?;
            match presentations::prove_trivial(&pres, &w, budget)? {
                TrivialityOutcome::Proved(proof) => {
                    proof.check()?;
                    let text = prover::derivation_to_string(
                        &proof.derivation,
                        &proof.presentation.generators,
                    )?;
                    print!("{text}");
                    if let Some(path) = emit {
                        write_file(&path, &text)?;
                    }
                    Ok(EXIT_OK)
                }
                TrivialityOutcome::Unknown { expansions } => {
                    println!("verdict: Unknown");
                    println!("searched: expansions={expansions} budget={budget}");
                    Ok(EXIT_UNKNOWN)
                }
            }
        }
        Command::GtMeridian { file, m } => {
            let pres = Presentation::from_file_string(&read_file(&file)?)?;
            match meridian_gt_search(&pres, m, budget)? {
                MeridianOutcome::Found(record) => {
                    record.proof.check()?;
                    let gens = &record.proof.presentation.generators;
                    println!("k: {}", record.k);
                    let conj: Result<Vec<String>> = record
                        .conjugators
                        .iter()
                        .map(|x| prover::word_to_string(x, gens))
                        .collect();
                    println!("conj: {}", conj?.join(","));
                    println!("product: {}", prover::word_to_string(&record.product, gens)?);
                    print!(
                        "{}",
                        prover::derivation_to_string(&record.proof.derivation, gens)?
                    );
                    Ok(EXIT_OK)
                }
                MeridianOutcome::Unknown => {
                    println!("verdict: Unknown");
                    println!("searched: budget={budget} conj-len<=2 k-multiples<=2");
                    Ok(EXIT_UNKNOWN)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        // ignore failure: the global pool may already exist in tests
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global();
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(EXIT_INPUT)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use kfv_core::arith::{jacobian, parse};
use kfv_core::belyi::{
    check_riemann_hurwitz, cycles, isotope_profile, realizable_as_permutation_triple, verify_rational_belyi,
    RamificationProfile, SearchOutcome, DEFAULT_BUDGET,
};
use kfv_core::format::{read_framework, Framework};
use kfv_core::intersection::determinant_labels;
use kfv_core::surface::Surface;
use kfv_core::verify::verify;

#[derive(Parser)]
#[command(name = "kfv", version, about = "Exact checks for Keller-map frameworks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check on a framework file.
    Verify {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        report: ReportFormat,
    },
    /// Labels, self-intersections and determinant labels of one surface.
    Labels { file: PathBuf, surface: String },
    /// Graphviz description of one surface.
    Dot { file: PathBuf, surface: String },
    /// Valuations along the degree chain and the resulting degrees.
    Degrees { file: PathBuf },
    /// Replay every surface and print its canonical form.
    Construct { file: PathBuf },
    /// Jacobian determinant of two polynomials in two variables.
    Jacobian { f: String, g: String },
    /// Ramification profiles, permutation triples and rational Belyi maps.
    #[command(subcommand)]
    Belyi(BelyiCommand),
}

#[derive(Subcommand)]
enum BelyiCommand {
    /// Validate a profile and test the Riemann-Hurwitz condition.
    Check { profile: String },
    /// Search for a transitive permutation triple with the given cycle types.
    Search {
        profile: String,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Profile of the rational map num/den.
    Poly { num: String, den: String },
    /// Profile of the isotope with parameter k.
    Isotope { k: u32 },
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Failure {
        Failure(e.to_string())
    }
}

fn load(path: &PathBuf) -> Result<Framework, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    read_framework(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn surface<'a>(fw: &'a Framework, name: &str) -> Result<&'a Surface, Failure> {
    fw.surface(name).ok_or_else(|| Failure(format!("no surface named '{name}'")))
}

fn profile(text: &str) -> Result<RamificationProfile, Failure> {
    let p: RamificationProfile = text.parse()?;
    p.validate()?;
    Ok(p)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Verify { file, report } => {
            let r = verify(&load(&file)?);
            match report {
                ReportFormat::Text => print!("{}", r.to_text()),
                ReportFormat::Json => println!("{}", r.to_json()),
            }
            Ok(r.exit_code() as u8)
        }
        Command::Labels { file, surface: name } => {
            let fw = load(&file)?;
            let s = surface(&fw, &name)?;
            let dets = determinant_labels(s);
            println!("{:>5} {:>10} {:>6} {:>8} {:>12} {:>8}", "id", "name", "kbar", "selfint", "det", "valency");
            for c in s.curves() {
                let n = s.name_of(c.id).unwrap_or("-");
                let v = s.valency(c.id);
                println!("{:>5} {:>10} {:>6} {:>8} {:>12} {:>8}", c.id.0, n, c.kbar, c.self_int, dets[&c.id], v);
            }
            Ok(0)
        }
        Command::Dot { file, surface: name } => {
            let fw = load(&file)?;
            print!("{}", surface(&fw, &name)?.to_dot(&name));
            Ok(0)
        }
        Command::Degrees { file } => {
            let r = verify(&load(&file)?);
            let c = r.check("degree_pair").ok_or_else(|| Failure("file has no [chain] block".into()))?;
            for n in &c.notes {
                println!("{n}");
            }
            Ok(u8::from(c.failed()))
        }
        Command::Construct { file } => {
            let fw = load(&file)?;
            for (name, s) in &fw.surfaces {
                println!("{name}: {} curves", s.len());
                println!("{}", s.canonical_form());
            }
            Ok(0)
        }
        Command::Jacobian { f, g } => {
            println!("{}", jacobian(&parse(&f)?, &parse(&g)?)?);
            Ok(0)
        }
        Command::Belyi(b) => match b {
            BelyiCommand::Check { profile: text } => {
                let p = profile(&text)?;
                let ok = check_riemann_hurwitz(&p)?;
                println!("{p}: Riemann-Hurwitz {}", if ok { "holds" } else { "fails" });
                Ok(u8::from(!ok))
            }
            BelyiCommand::Search { profile: text, budget } => {
                let p = profile(&text)?;
                match realizable_as_permutation_triple(&p, budget)? {
                    SearchOutcome::Found { witness, nodes } => {
                        println!("found after {nodes} nodes");
                        println!("sigma0   = {}", cycles(&witness.sigma0));
                        println!("sigma1   = {}", cycles(&witness.sigma1));
                        println!("sigmaInf = {}", cycles(&witness.sigma_inf));
                        Ok(0)
                    }
                    SearchOutcome::NotFoundExhausted { nodes } => {
                        println!("not found: search exhausted after {nodes} nodes");
                        Ok(1)
                    }
                    SearchOutcome::BudgetExceeded { nodes } => {
                        println!("undecided: budget exceeded after {nodes} nodes");
                        Ok(1)
                    }
                }
            }
            BelyiCommand::Poly { num, den } => {
                let r = verify_rational_belyi(&parse(&num)?, &parse(&den)?)?;
                println!("{}", r.profile);
                if let Some(d) = r.difference_degree {
                    println!("deg(num - den) = {d}");
                }
                Ok(0)
            }
            BelyiCommand::Isotope { k } => {
                println!("{}", isotope_profile(k)?);
                Ok(0)
            }
        },
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

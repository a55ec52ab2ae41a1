use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand};

use quasifix_core::certifier::{certify, explain, Profile};
use quasifix_core::io::{self, SpaceFile};
use quasifix_core::picard::{iterate, OrbitReport, Termination};
use quasifix_core::search::{self, oracle_agreement_search, soundness_search, GenConfig};
use quasifix_core::sequence::{CauchyKind, ConvergenceMode, SeqPrefix};
use quasifix_core::space::{AxiomReport, QPSpace};
use quasifix_core::Rat;

#[derive(Parser)]
#[command(name = "quasifix", version)]
#[command(about = "Axiom verification and fixed-point certification for quasi-pseudometric type spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the axioms (D1, D2, T0, Hausdorff surrogate) of a space file.
    Verify {
        /// Space file (JSON).
        space: PathBuf,
        /// Check D2 at this coefficient instead of the declared K.
        #[arg(long)]
        k: Option<String>,
        /// Print only the minimal admissible coefficient.
        #[arg(long)]
        minimal_k: bool,
        /// Emit the machine-readable report.
        #[arg(long)]
        json: bool,
    },
    /// Write the conjugate or symmetrized space as a canonical space file.
    Derive {
        /// Space file (JSON).
        space: PathBuf,
        /// Transpose the distance matrix.
        #[arg(long, conflicts_with = "symmetrize")]
        conjugate: bool,
        /// Take the elementwise max of the matrix and its transpose.
        #[arg(long)]
        symmetrize: bool,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify a sequence prefix: Cauchy kind, convergence, or limit set.
    Classify {
        /// Sequence file (JSON) referencing its space.
        sequence: PathBuf,
        /// Tolerance, e.g. "1/100".
        #[arg(long)]
        epsilon: String,
        /// Cauchy kind: left_k | right_k | ds.
        #[arg(long, conflicts_with_all = ["limit", "mode"])]
        kind: Option<String>,
        /// Candidate limit point for a convergence check.
        #[arg(long, requires = "mode")]
        limit: Option<String>,
        /// Convergence mode: d | dinv | ds. Without --limit, reports every
        /// point the prefix converges to.
        #[arg(long)]
        mode: Option<String>,
        /// Emit the machine-readable report.
        #[arg(long)]
        json: bool,
    },
    /// Run the Picard iteration of a self-map and dump the orbit.
    Solve {
        /// Space file (JSON).
        space: PathBuf,
        /// Map file (JSON).
        map: PathBuf,
        /// Seed point.
        #[arg(long)]
        x0: String,
        /// Iteration budget; defaults to the point count + 1, which always
        /// suffices on a finite space.
        #[arg(long)]
        max_steps: Option<usize>,
        /// Emit the machine-readable orbit dump.
        #[arg(long)]
        json: bool,
    },
    /// Check every hypothesis of a theorem profile and certify the fixed point.
    Certify {
        /// Problem file (JSON) bundling space, map and pair paths.
        problem: PathBuf,
        /// fix1 | fix1_right | bicomplete | bicomplete_min | subseq | fix2;
        /// overrides the profile named in the problem file.
        #[arg(long)]
        profile: Option<String>,
        /// Emit the certificate as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Random search: oracle agreement or soundness falsification.
    Search {
        /// d2-oracle | soundness.
        #[arg(long)]
        mode: String,
        /// Points per generated space (d2-oracle caps this at 5).
        #[arg(long, default_value_t = 4)]
        points: usize,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated distance grid, e.g. "0,1/4,1/2,1".
        #[arg(long)]
        grid: Option<String>,
        /// Emit findings as JSON.
        #[arg(long)]
        json: bool,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            2
        }
    };
    std::process::exit(code);
}

fn parse_rat(text: &str, what: &str) -> anyhow::Result<Rat> {
    text.parse::<Rat>().with_context(|| format!("invalid {what} {text:?}"))
}

fn run(command: Command) -> anyhow::Result<i32> {
    match command {
        Command::Verify { space, k, minimal_k, json } => {
            let sp = io::load_space(&space)?;
            let checked_k = match k {
                Some(text) => parse_rat(&text, "coefficient")?,
                None => sp.coeff_k().clone(),
            };
            if !checked_k.is_positive() {
                bail!("coefficient K must be positive, got {checked_k}");
            }
            let report = sp.axiom_report(&checked_k);
            if json {
                print!("{}", io::to_canonical_json(&report));
            } else if minimal_k {
                match &report.minimal_k {
                    Some(bound) => println!("minimal K: {bound}"),
                    None => println!("minimal K: not evaluable (D1 fails)"),
                }
            } else {
                print!("{}", render_report(&space, &sp, &report));
            }
            Ok(if report.all_pass() { 0 } else { 1 })
        }

        Command::Derive { space, conjugate, symmetrize, out } => {
            if conjugate == symmetrize {
                bail!("choose exactly one of --conjugate or --symmetrize");
            }
            let sp = io::load_space(&space)?;
            let derived = if conjugate { sp.conjugate() } else { sp.symmetrize() };
            let text = io::to_canonical_json(&SpaceFile::from_space(&derived));
            match out {
                Some(path) => std::fs::write(&path, text)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => print!("{text}"),
            }
            Ok(0)
        }

        Command::Classify { sequence, epsilon, kind, limit, mode, json } => {
            let epsilon = parse_rat(&epsilon, "epsilon")?;
            let (sp, entries) = io::load_sequence(&sequence)?;
            let prefix = SeqPrefix::new(&sp, &entries)?;
            match (kind, limit, mode) {
                (Some(kind), None, None) => {
                    let kind = CauchyKind::parse(&kind)?;
                    let verdict = prefix.classify_cauchy(kind, &epsilon)?;
                    if json {
                        print!("{}", io::to_canonical_json(&verdict));
                    } else {
                        match (&verdict.witness_n0, &verdict.violation) {
                            (Some(n0), _) => println!(
                                "{kind:?} Cauchy at epsilon {epsilon}: holds on prefix from n0 = {n0}"
                            ),
                            (None, Some(v)) => println!(
                                "{kind:?} Cauchy at epsilon {epsilon}: fails, distance(x{}, x{}) = {}",
                                v.k, v.n, v.distance
                            ),
                            (None, None) => unreachable!("failing verdicts carry a violation"),
                        }
                    }
                    Ok(if verdict.holds_on_prefix { 0 } else { 1 })
                }
                (None, Some(limit), Some(mode)) => {
                    let mode = ConvergenceMode::parse(&mode)?;
                    let from = prefix.check_convergence(&limit, mode, &epsilon)?;
                    if json {
                        let doc = serde_json::json!({
                            "limit": limit,
                            "mode": mode,
                            "epsilon": epsilon.to_string(),
                            "converges": from.is_some(),
                            "from_index": from,
                        });
                        print!("{}", io::to_canonical_json(&doc));
                    } else {
                        match from {
                            Some(i) => println!("converges to {limit} from index {i}"),
                            None => println!("does not converge to {limit} on this prefix"),
                        }
                    }
                    Ok(if from.is_some() { 0 } else { 1 })
                }
                (None, None, Some(mode)) => {
                    let mode = ConvergenceMode::parse(&mode)?;
                    let limits = prefix.find_limits(mode, &epsilon)?;
                    if json {
                        let doc = serde_json::json!({
                            "mode": mode,
                            "epsilon": epsilon.to_string(),
                            "limits": limits,
                        });
                        print!("{}", io::to_canonical_json(&doc));
                    } else if limits.is_empty() {
                        println!("no limits on this prefix");
                    } else {
                        println!("limits: {}", limits.join(", "));
                    }
                    Ok(if limits.is_empty() { 1 } else { 0 })
                }
                _ => bail!("choose --kind KIND, or --mode MODE [--limit POINT]"),
            }
        }

        Command::Solve { space, map, x0, max_steps, json } => {
            let sp = io::load_space(&space)?;
            let f = io::load_map(&map, &sp)?;
            let budget = max_steps.unwrap_or(sp.len() + 1);
            let orbit = iterate(&sp, &f, &x0, budget)?;
            let report = OrbitReport::new(&sp, &orbit);
            if json {
                print!("{}", io::to_canonical_json(&report));
            } else {
                print!("{}", render_orbit(&report));
            }
            Ok(match orbit.terminated() {
                Termination::FixedPoint { .. } => 0,
                _ => 1,
            })
        }

        Command::Certify { problem, profile, json } => {
            let (instance, file_profile) = io::load_problem(&problem)?;
            let profile_name = profile
                .or(file_profile)
                .ok_or_else(|| anyhow!("no profile: pass --profile or set it in the problem file"))?;
            let profile = Profile::parse(&profile_name)?;
            let cert = certify(&instance, profile)?;
            if json {
                print!("{}", io::to_canonical_json(&cert));
            } else {
                print!("{}", explain(&cert));
            }
            Ok(if cert.fixed_point.is_some() { 0 } else { 1 })
        }

        Command::Search { mode, points, trials, seed, grid, json } => {
            let grid = match grid {
                Some(text) => text
                    .split(',')
                    .map(|part| parse_rat(part, "grid value"))
                    .collect::<anyhow::Result<Vec<_>>>()?,
                None => GenConfig::default_grid(),
            };
            let cfg = GenConfig::new(points, grid, seed, trials)?;
            match mode.as_str() {
                "d2-oracle" => {
                    let findings = oracle_agreement_search(&cfg)?;
                    if json {
                        print!("{}", io::to_canonical_json(&findings));
                    } else {
                        println!(
                            "d2-oracle: {} trials x 2 coefficients, {} disagreements",
                            trials,
                            findings.len()
                        );
                    }
                    Ok(if findings.is_empty() { 0 } else { 1 })
                }
                "soundness" => {
                    let findings = soundness_search(&cfg)?;
                    if json {
                        print!("{}", io::to_canonical_json(&findings));
                    } else {
                        let certified = search::certified_instance_count(&cfg)?;
                        println!(
                            "soundness: {} trials, {} fully certified, {} counterexamples",
                            trials,
                            certified,
                            findings.len()
                        );
                        for finding in &findings {
                            println!("  trial {}: no fixed point", finding.trial);
                        }
                    }
                    Ok(if findings.is_empty() { 0 } else { 1 })
                }
                other => bail!("unknown search mode {other:?}; expected d2-oracle or soundness"),
            }
        }
    }
}

fn pass_fail(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn render_report(path: &Path, space: &QPSpace, report: &AxiomReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "space: {} ({} points, declared K = {})\n",
        path.display(),
        space.len(),
        space.coeff_k()
    ));
    out.push_str(&format!("checked at K = {}\n", report.checked_k));

    out.push_str(&format!("  D1 (zero diagonal)            {}\n", pass_fail(report.d1_holds)));
    if let Some(p) = &report.d1_witness {
        out.push_str(&format!("    witness: D({p}, {p}) is nonzero\n"));
    }

    out.push_str(&format!("  D2 (chain inequality)         {}\n", pass_fail(report.d2_holds)));
    if let Some(w) = &report.d2_witness {
        out.push_str(&format!(
            "    witness ({}, {}): D = {} > K * chain sum {} (chain {} -> {} -> {})\n",
            w.from,
            w.to,
            w.lhs,
            w.chain.total,
            w.chain.from,
            w.chain.intermediates.join(" -> "),
            w.chain.to
        ));
    }

    out.push_str(&format!("  T0 (no mutual zeros)          {}\n", pass_fail(report.t0_holds)));
    if let Some((x, y)) = &report.t0_witness {
        out.push_str(&format!("    witness: D({x},{y}) = D({y},{x}) = 0\n"));
    }

    out.push_str(&format!(
        "  Hausdorff (finite surrogate)  {}\n",
        pass_fail(report.hausdorff_finite)
    ));
    if let Some(w) = &report.hausdorff_witness {
        out.push_str(&format!(
            "    witness: constant sequence at {} converges to both {} and {}\n",
            w.z, w.x, w.y
        ));
    }

    match &report.minimal_k {
        Some(bound) => out.push_str(&format!("  minimal K                     {bound}\n")),
        None => out.push_str("  minimal K                     not evaluable\n"),
    }
    for note in &report.notes {
        out.push_str(&format!("note: {note}\n"));
    }
    out
}

fn render_orbit(report: &OrbitReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("orbit from {}: {}\n", report.seed, report.entries.join(" -> ")));
    let terminated = match &report.terminated {
        Termination::FixedPoint { index } => format!("fixed point at index {index}"),
        Termination::Cycle { length, start } => {
            format!("cycle of length {length} starting at index {start}")
        }
        Termination::BudgetExhausted => "budget exhausted".to_string(),
    };
    out.push_str(&format!("terminated: {terminated}\n"));
    let join = |rats: &[Rat]| {
        if rats.is_empty() {
            "(none)".to_string()
        } else {
            rats.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", ")
        }
    };
    out.push_str(&format!("step distances: {}\n", join(&report.step_dists)));
    out.push_str(&format!("decay ratios: {}\n", join(&report.decay_ratios)));
    out
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use posvote::birkhoff::expand_in_permutations;
use posvote::io::{from_json, MatrixFile, TargetsFile, WeightsFile};
use posvote::paradox::{alternative_profile, saari_profile, synthesize, verify_targets};
use posvote::reachability::{
    enumerate_reachable, is_face_reachable, prefix_sums, random_explore, weight_from_coefficients,
};
use posvote::voting::{build_tally_matrix, face_of, tally};
use posvote::{Error, Profile, Ranking, Rational};

#[derive(Parser)]
#[command(
    name = "posvote",
    version,
    about = "Exact positional-voting tallies, paradox synthesis and reachable rankings"
)]
struct Cli {
    /// Render rationals as k-digit decimal approximations (prefixed with "~").
    #[arg(long, global = true, value_name = "K")]
    decimal: Option<usize>,

    /// Write the result here instead of standard output.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Results vector and societal ranking of a profile under one weight vector.
    Tally {
        #[arg(short, long)]
        profile: PathBuf,
        #[arg(short, long)]
        weights: PathBuf,
    },
    /// Profile realizing n-1 prescribed (weights, results) pairs.
    Synthesize {
        #[arg(short = 's', long)]
        targets: PathBuf,
        /// Offset the answer by a seeded kernel element to get a different profile.
        #[arg(long)]
        perturb_seed: Option<u64>,
    },
    /// Profile realizing n! - (n-1)! strict rankings, with a weight for each.
    Saari {
        #[arg(short)]
        n: usize,
    },
    /// Expand an equal-line-sum matrix in permutation matrices.
    Decompose {
        #[arg(short, long)]
        matrix: PathBuf,
    },
    /// Every ranking some weight vector produces from a profile.
    Reachable {
        #[arg(short, long)]
        profile: PathBuf,
        /// Also test rankings with ties (n <= 5).
        #[arg(long)]
        faces: bool,
    },
    /// A weight vector producing the given ranking, if one exists.
    PickWeights {
        #[arg(short, long)]
        profile: PathBuf,
        /// "2,4,3,1", or "2;4,3;1" with ties.
        #[arg(short, long)]
        ranking: String,
    },
    /// Rankings hit by randomly sampled weights.
    Explore {
        #[arg(short, long)]
        profile: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long)]
        seed: u64,
    },
}

enum Failure {
    /// Prints "unreachable" on standard output; exit code 1.
    Unreachable(String),
    Domain(String),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) => Failure::Input(e.to_string()),
            e => Failure::Domain(e.to_string()),
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    from_json(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn run(command: Command) -> Result<Value, Failure> {
    match command {
        Command::Tally { profile, weights } => {
            let p: Profile = read_json(&profile)?;
            let w: WeightsFile = read_json(&weights)?;
            let r = tally(&build_tally_matrix(&p), &w.weights)?;
            Ok(json!({ "results": r, "ranking": face_of(&r) }))
        }
        Command::Synthesize { targets, perturb_seed } => {
            let spec = read_json::<TargetsFile>(&targets)?.to_spec()?;
            let s = synthesize(&spec)?;
            let (profile, verification) = match perturb_seed {
                Some(seed) => {
                    let alt = alternative_profile(&spec, seed)?;
                    let checks = verify_targets(&spec, &alt)?;
                    (alt, checks)
                }
                None => (s.profile, s.verification),
            };
            let verified = verification.iter().all(|c| c.ok);
            Ok(json!({ "q": s.q, "profile": profile, "verification": verification, "verified": verified }))
        }
        Command::Saari { n } => Ok(to_value(&saari_profile(n, None)?)),
        Command::Decompose { matrix } => {
            let m: MatrixFile = read_json(&matrix)?;
            Ok(to_value(&expand_in_permutations(&m.to_matrix()?)?))
        }
        Command::Reachable { profile, faces } => {
            let p: Profile = read_json(&profile)?;
            Ok(to_value(&enumerate_reachable(&build_tally_matrix(&p), !faces)?))
        }
        Command::PickWeights { profile, ranking } => {
            let p: Profile = read_json(&profile)?;
            let target: Ranking = ranking.parse().map_err(|e: Error| Failure::Input(e.to_string()))?;
            if target.num_candidates() != p.n() {
                return Err(Failure::Input(format!("ranking {target} does not rank {} candidates", p.n())));
            }
            let q = build_tally_matrix(&p);
            let test = is_face_reachable(&prefix_sums(&q), &target)?;
            let Some(b) = test.witness else {
                return Err(Failure::Unreachable(format!("no weight vector produces {target}")));
            };
            let w = weight_from_coefficients(p.n(), &b)?;
            let r = tally(&q, &w)?;
            Ok(json!({ "ranking": target, "b": b, "weights": w, "results": r }))
        }
        Command::Explore { profile, trials, seed } => {
            let p: Profile = read_json(&profile)?;
            let seen = random_explore(&build_tally_matrix(&p), trials, seed)?;
            Ok(json!({ "trials": trials, "seed": seed, "rankings": seen }))
        }
    }
}

/// Replaces every string holding an exact rational by "~" and its decimal form.
fn approximate(v: &mut Value, digits: usize) {
    match v {
        Value::String(s) => {
            if let Ok(r) = s.parse::<Rational>() {
                *s = format!("~{}", r.to_decimal_string(digits));
            }
        }
        Value::Array(items) => items.iter_mut().for_each(|x| approximate(x, digits)),
        Value::Object(map) => map.values_mut().for_each(|x| approximate(x, digits)),
        _ => {}
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (code, message) = match run(cli.command) {
        Ok(mut value) => {
            if let Some(k) = cli.decimal {
                approximate(&mut value, k);
            }
            let text = serde_json::to_string_pretty(&value).expect("serializable") + "\n";
            match &cli.output {
                Some(path) => match fs::write(path, text) {
                    Ok(()) => (0, None),
                    Err(e) => (2, Some(format!("{}: {e}", path.display()))),
                },
                None => {
                    print!("{text}");
                    (0, None)
                }
            }
        }
        Err(Failure::Unreachable(m)) => {
            println!("unreachable");
            (1, Some(m))
        }
        Err(Failure::Domain(m)) => (1, Some(m)),
        Err(Failure::Input(m)) => (2, Some(m)),
    };
    if let Some(m) = message {
        eprintln!("posvote: {m}");
    }
    ExitCode::from(code)
}

//! Experiment runner. Every verdict is a single uppercase-keyword-first
//! line on stdout; files are written only where `--out`/`--csv` ask for
//! them; every randomized command requires an explicit `--seed`, and
//! identical invocations produce byte-identical outputs.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use ramsey_trees::density::{
    arithmetic_replica, binary_entropy, chernoff_check, inv_entropy,
};
use ramsey_trees::error::Error as CoreError;
use ramsey_trees::par;
use ramsey_trees::rng::SplitRng;
use ramsey_trees::sary::{
    gmap_build, leafbound_check, sary_signature_set, theorem1prime_check, transport_witness,
    validate_witness_in_tree, weighted_signature_count, GeneralTree, SaryTreeSubset,
};
use ramsey_trees::signature::{
    contains_replica, lemma3_holds, max_replica_depth, signature_set, Signature,
};
use ramsey_trees::split::{
    block_coloring, find_mono_replica, find_t2free_coloring, martingale_trace, mc_lemma6,
    random_fit_branch, random_split_coloring, verify_smallest_permitted, Coloring,
};
use ramsey_trees::tree::TreeSubset;
use ramsey_trees::witness::EmbeddingWitness;
use ramsey_trees_cli::grid::{grid_csv, theorem2_grid};
use ramsey_trees_cli::oracle::{oracle_enumerate, oracle_signature_set};

#[derive(Parser)]
#[command(
    name = "ramsey-trees",
    about = "Tree-replica experiments: signature families, density thresholds, random split colorings",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SubsetArg {
    /// Subset file (`n=<depth>` header plus a hex bitset line).
    #[arg(long)]
    subset_file: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Exact weight of a subset file.
    Weight(SubsetArg),
    /// Size and largest member of the signature family.
    Signatures {
        #[command(flatten)]
        subset: SubsetArg,
        /// Optional override of the depth cap for the family sweep.
        #[arg(long)]
        cap: Option<u32>,
    },
    /// Largest replica depth contained in the subset.
    MaxDepth(SubsetArg),
    /// Extract a witness with the given signature levels.
    Extract {
        #[command(flatten)]
        subset: SubsetArg,
        /// Comma-separated levels, e.g. `0,2,5`.
        #[arg(long)]
        levels: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the random split coloring.
    RandomSplit {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Re-derive every coin and audit the smallest-permitted rule.
        #[arg(long)]
        audit: bool,
    },
    /// Run the random fit process on one branch.
    RandomFit {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        seed: u64,
        /// Write the per-decision trace as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Search the color classes of a coloring for a monochromatic replica.
    MonoReplica {
        #[arg(long)]
        coloring_file: PathBuf,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Look for a coloring without monochromatic depth-2 replicas within a
    /// color budget.
    T2free {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        attempts: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tile level bands of a base coloring.
    BlockColor {
        #[arg(long)]
        base_file: PathBuf,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo exceedance experiment for the branch color budget.
    McLemma6 {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Binary entropy or its inverse.
    Entropy {
        #[arg(long, conflicts_with = "delta")]
        eps: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Exact partial binomial sum against the entropy bound.
    Chernoff {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        eps: f64,
    },
    /// Arithmetic-progression replica search.
    ArithReplica {
        #[command(flatten)]
        subset: SubsetArg,
        #[arg(long)]
        l: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact weight of an s-ary subset file.
    SaryWeight(SubsetArg),
    /// Signature family of an s-ary subset, with the weighted count.
    SarySignatures(SubsetArg),
    /// Arity-s threshold test on a subset's weight.
    SaryThreshold {
        #[command(flatten)]
        subset: SubsetArg,
        #[arg(long)]
        d: u32,
    },
    /// Build the leaf-greedy map of a general tree and check the leaf bound.
    Gmap {
        #[arg(long, conflicts_with_all = ["s", "n", "seed"])]
        tree_file: Option<PathBuf>,
        /// Generate a random tree instead of reading one.
        #[arg(long, requires_all = ["n", "seed"])]
        s: Option<u32>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        seed: Option<u64>,
        /// Write the resulting binary subset.
        #[arg(long)]
        out_subset: Option<PathBuf>,
        /// Write the generated tree.
        #[arg(long)]
        out_tree: Option<PathBuf>,
    },
    /// Least sufficient depths across a (d, k) grid.
    Theorem2Grid {
        #[arg(long, default_value_t = 2)]
        d_min: u32,
        #[arg(long, default_value_t = 10)]
        d_max: u32,
        #[arg(long, default_value_t = 2)]
        k_min: u32,
        #[arg(long, default_value_t = 64)]
        k_max: u32,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Brute-force embedding enumeration on a small subset.
    Oracle {
        #[command(flatten)]
        subset: SubsetArg,
        #[arg(long)]
        d: u32,
    },
    /// Check the counting inequality on seeded random subsets.
    VerifyLemma3 {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
    },
    /// Check that seeded random split colorings admit no monochromatic T_2.
    VerifyLemma4 {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Cross-validate the signature sweep against the brute-force oracle.
    VerifyOracle {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
    },
    /// Generate a seeded random subset file.
    RandomSubset {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a seeded random bounded-arity tree file.
    RandomTree {
        #[arg(long)]
        s: u32,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read_subset(path: &PathBuf) -> Result<TreeSubset> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    Ok(TreeSubset::parse(&text)?)
}

fn read_sary_subset(path: &PathBuf) -> Result<SaryTreeSubset> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    Ok(SaryTreeSubset::parse(&text)?)
}

fn read_coloring(path: &PathBuf) -> Result<Coloring> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    Ok(Coloring::parse(&text)?)
}

fn write_out(path: &Option<PathBuf>, content: &str) -> Result<()> {
    if let Some(p) = path {
        std::fs::write(p, content).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn write_witness(path: &Option<PathBuf>, w: &EmbeddingWitness) -> Result<()> {
    write_out(path, &w.to_text())
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Weight(arg) => {
            let h = read_subset(&arg.subset_file)?;
            println!("WEIGHT {}", h.weight());
        }
        Command::Signatures { subset, cap } => {
            let h = read_subset(&subset.subset_file)?;
            let fam = match cap {
                Some(c) => ramsey_trees::signature::signature_set_with_cap(&h, c)?,
                None => signature_set(&h)?,
            };
            println!("SIGNATURES count={} max_size={}", fam.len(), fam.max_size());
        }
        Command::MaxDepth(arg) => {
            let h = read_subset(&arg.subset_file)?;
            println!("MAX_DEPTH {}", max_replica_depth(&h)?);
        }
        Command::Extract { subset, levels, out } => {
            let h = read_subset(&subset.subset_file)?;
            let target = Signature::parse_levels(&levels, h.depth())?;
            match ramsey_trees::signature::extract_replica(&h, target) {
                Ok(w) => {
                    w.validate(&h)?;
                    write_witness(&out, &w)?;
                    println!("WITNESS d={} n={} signature={}", w.d, w.n, w.signature);
                }
                Err(CoreError::NoWitness { .. }) => println!("NONE"),
                Err(e) => return Err(e.into()),
            }
        }
        Command::RandomSplit { n, seed, out, audit } => {
            let rng = SplitRng::new(seed);
            let coloring = random_split_coloring(n, &rng)?;
            write_out(&out, &coloring.to_text())?;
            if audit {
                let ok = verify_smallest_permitted(&coloring, &rng)?;
                println!(
                    "COLORING n={} max_color={} audit={}",
                    n,
                    coloring.max_color(),
                    if ok { "ok" } else { "FAILED" }
                );
            } else {
                println!("COLORING n={} max_color={}", n, coloring.max_color());
            }
        }
        Command::RandomFit { n, seed, csv } => {
            let (colors, trace) = random_fit_branch(n, &SplitRng::new(seed))?;
            if csv.is_some() {
                let mut body = String::from("vertex,color,prior_uses,accepted\n");
                for d in &trace.decisions {
                    body.push_str(&format!(
                        "{},{},{},{}\n",
                        d.vertex, d.color, d.prior_uses, d.accepted as u8
                    ));
                }
                write_out(&csv, &body)?;
            }
            let (_, final_x) = martingale_trace(&trace)?;
            println!(
                "RANDOM_FIT n={} max_color={} decisions={} final_x={:.6}",
                n,
                colors.iter().copied().max().unwrap_or(0),
                trace.decisions.len(),
                final_x
            );
        }
        Command::MonoReplica { coloring_file, d, out } => {
            let coloring = read_coloring(&coloring_file)?;
            match find_mono_replica(&coloring, d)? {
                Some((color, w)) => {
                    write_witness(&out, &w)?;
                    println!("MONO_REPLICA color={} d={} signature={}", color, d, w.signature);
                }
                None => println!("NONE"),
            }
        }
        Command::T2free { n, k, seed, attempts, out } => {
            match find_t2free_coloring(n, k, attempts, &SplitRng::new(seed))? {
                Some((coloring, attempt)) => {
                    write_out(&out, &coloring.to_text())?;
                    println!(
                        "T2FREE n={} k={} max_color={} attempt={}",
                        n,
                        k,
                        coloring.max_color(),
                        attempt
                    );
                }
                None => println!("NONE"),
            }
        }
        Command::BlockColor { base_file, d, out } => {
            let base = read_coloring(&base_file)?;
            let blocked = block_coloring(&base, d)?;
            write_out(&out, &blocked.to_text())?;
            println!(
                "BLOCK_COLORING n={} max_color={}",
                blocked.depth(),
                blocked.max_color()
            );
        }
        Command::McLemma6 { n, trials, seed, csv } => {
            let stats = mc_lemma6(n, trials, seed)?;
            if csv.is_some() {
                let mut body = String::from("seed,n,k,max_color,exceeded\n");
                for row in &stats.rows {
                    body.push_str(&format!(
                        "{},{},{},{},{}\n",
                        row.seed, stats.n, stats.k, row.max_color, row.exceeded as u8
                    ));
                }
                body.push_str(&format!(
                    "summary,{},{},{},{}\n",
                    stats.n, stats.k, stats.exceed_count, stats.trials
                ));
                write_out(&csv, &body)?;
            }
            println!(
                "MC_LEMMA6 n={} k={} trials={} exceeded={} fraction={:.6} upper95={:.6}",
                stats.n, stats.k, stats.trials, stats.exceed_count, stats.exceed_fraction,
                stats.exceed_upper95
            );
        }
        Command::Entropy { eps, delta } => match (eps, delta) {
            (Some(e), None) => println!("ENTROPY h={:.12}", binary_entropy(e)?),
            (None, Some(d)) => println!("ENTROPY_INV eps={:.12}", inv_entropy(d)?),
            _ => anyhow::bail!("pass exactly one of --eps or --delta"),
        },
        Command::Chernoff { n, eps } => {
            let chk = chernoff_check(n, eps)?;
            println!(
                "CHERNOFF n={} d={} sum_log2={:.6} bound_log2={:.6} holds={}",
                n, chk.d, chk.sum_log2, chk.bound_log2, chk.holds
            );
        }
        Command::ArithReplica { subset, l, out } => {
            let h = read_subset(&subset.subset_file)?;
            match arithmetic_replica(&h, l)? {
                Some((ap, w)) => {
                    w.validate(&h)?;
                    write_witness(&out, &w)?;
                    println!("ARITHMETIC_REPLICA a={} b={} l={}", ap.start, ap.step, ap.length);
                }
                None => println!("NONE"),
            }
        }
        Command::SaryWeight(arg) => {
            let h = read_sary_subset(&arg.subset_file)?;
            println!("SARY_WEIGHT {}", h.weight());
        }
        Command::SarySignatures(arg) => {
            let h = read_sary_subset(&arg.subset_file)?;
            let fam = sary_signature_set(&h)?;
            let weighted = weighted_signature_count(&fam, h.arity())?;
            println!(
                "SARY_SIGNATURES count={} max_size={} weighted={}",
                fam.len(),
                fam.max_size(),
                weighted
            );
        }
        Command::SaryThreshold { subset, d } => {
            let h = read_sary_subset(&subset.subset_file)?;
            let holds = theorem1prime_check(h.depth(), d, h.arity(), &h.weight())?;
            println!("SARY_THRESHOLD s={} d={} holds={}", h.arity(), d, holds);
        }
        Command::Gmap { tree_file, s, n, seed, out_subset, out_tree } => {
            let tree = match (tree_file, s, n, seed) {
                (Some(path), None, _, _) => {
                    let text = std::fs::read_to_string(&path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    GeneralTree::parse(&text)?
                }
                (None, Some(s), Some(n), Some(seed)) => {
                    GeneralTree::random(s, n, &mut SplitRng::new(seed))?
                }
                _ => anyhow::bail!("pass --tree-file, or --s with --n and --seed"),
            };
            write_out(&out_tree, &tree.to_text())?;
            let result = gmap_build(&tree)?;
            write_out(&out_subset, &result.subset.to_text())?;
            let bound_ok = leafbound_check(&tree, &result)?;
            // Transport a deepest replica of the subset through the map and
            // validate it directly against the tree.
            let d = max_replica_depth(&result.subset)?;
            let transport_ok = match contains_replica(&result.subset, d)? {
                Some(w) => {
                    let images = transport_witness(&result, &w);
                    validate_witness_in_tree(&tree, d, &images).is_ok()
                }
                None => false,
            };
            println!(
                "GMAP s={} n={} leaves={} w={} bound_ok={} replica_depth={} transport_ok={}",
                tree.arity(),
                tree.leaf_level(),
                tree.leaf_count(),
                result.subset.weight(),
                bound_ok,
                d,
                transport_ok
            );
        }
        Command::Theorem2Grid { d_min, d_max, k_min, k_max, csv } => {
            let cells = theorem2_grid(d_min, d_max, k_min, k_max)?;
            write_out(&csv, &grid_csv(&cells))?;
            let violations =
                cells.iter().filter(|c| c.n_sufficient > c.bound).count();
            println!(
                "THEOREM2_GRID cells={} within_bound={} violations={}",
                cells.len(),
                cells.len() - violations,
                violations
            );
        }
        Command::Oracle { subset, d } => {
            let h = read_subset(&subset.subset_file)?;
            let res = oracle_enumerate(&h, d)?;
            println!(
                "ORACLE embeddings={} signatures={} max_depth={}",
                res.witnesses.len(),
                res.signatures.len(),
                res.signatures.max_size()
            );
        }
        Command::VerifyLemma3 { n, trials, seed, density } => {
            let ok: u64 = par::map_indexed(trials, |i| {
                let mut rng = SplitRng::new(SplitRng::derive_seed(seed, i));
                let h = TreeSubset::random(n, density, &mut rng).expect("depth checked");
                lemma3_holds(&h).map(u64::from).unwrap_or(0)
            })
            .into_iter()
            .sum();
            if ok == trials {
                println!("LEMMA3 OK {ok}/{trials}");
            } else {
                println!("LEMMA3 FAIL {ok}/{trials}");
                std::process::exit(1);
            }
        }
        Command::VerifyLemma4 { n, trials, seed } => {
            let ok: u64 = par::map_indexed(trials, |i| {
                let rng = SplitRng::new(SplitRng::derive_seed(seed, i));
                let coloring = random_split_coloring(n, &rng).expect("depth checked");
                u64::from(matches!(find_mono_replica(&coloring, 2), Ok(None)))
            })
            .into_iter()
            .sum();
            if ok == trials {
                println!("LEMMA4 OK {ok}/{trials}");
            } else {
                println!("LEMMA4 FAIL {ok}/{trials}");
                std::process::exit(1);
            }
        }
        Command::VerifyOracle { n, trials, seed, density } => {
            let ok: u64 = par::map_indexed(trials, |i| {
                let mut rng = SplitRng::new(SplitRng::derive_seed(seed, i));
                let h = TreeSubset::random(n, density, &mut rng).expect("depth checked");
                let dp = signature_set(&h).expect("within cap");
                let oracle = oracle_signature_set(&h).expect("within cap");
                u64::from(dp.to_sorted() == oracle.to_sorted())
            })
            .into_iter()
            .sum();
            if ok == trials {
                println!("ORACLE_EQUIV OK {ok}/{trials}");
            } else {
                println!("ORACLE_EQUIV FAIL {ok}/{trials}");
                std::process::exit(1);
            }
        }
        Command::RandomSubset { n, seed, density, out } => {
            let h = TreeSubset::random(n, density, &mut SplitRng::new(seed))?;
            write_out(&out, &h.to_text())?;
            println!("RANDOM_SUBSET n={} members={} weight={}", n, h.len(), h.weight());
        }
        Command::RandomTree { s, n, seed, out } => {
            let tree = GeneralTree::random(s, n, &mut SplitRng::new(seed))?;
            write_out(&out, &tree.to_text())?;
            println!(
                "RANDOM_TREE s={} n={} vertices={} leaves={}",
                s,
                n,
                tree.vertex_count(),
                tree.leaf_count()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let resource = err
                .chain()
                .any(|c| matches!(c.downcast_ref::<CoreError>(), Some(CoreError::ResourceLimit(_))));
            if resource {
                ExitCode::from(3)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

//! `lrc` — encode, repair, reconstruct and verify locally repairable codes
//! built from Gabidulin precoding plus per-group MDS parities.

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use lrc_cli::share::{
    bytes_to_chunks, chunk_count, chunks_to_bytes, read_share, read_share_header, write_share,
    ShareHeader,
};
use lrc_cli::sim::{run_sim, FailureSpec, SimConfig};
use lrc_cli::CliError;
use lrc_core::lrc::{derive_params, derive_params_forced, CodeParams};
use lrc_core::verify::{check_worst_cases, dmin_report, probe_dmin, DEFAULT_PATTERN_BUDGET};
use lrc_core::{Error, LrcCode, NodeBlock};

#[derive(Parser)]
#[command(
    name = "lrc",
    about = "Locally repairable codes from rank-metric precoding",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args)]
struct SystemParams {
    /// Number of storage nodes.
    #[arg(long)]
    n: usize,
    /// File size in field symbols.
    #[arg(long = "M")]
    file_symbols: usize,
    /// Locality: a node is repaired from at most r group mates.
    #[arg(long)]
    r: usize,
    /// Group distance: any delta-1 failures per group are repairable locally.
    #[arg(long)]
    delta: usize,
    /// Symbols stored per node.
    #[arg(long)]
    alpha: usize,
    /// Base field order (a power of two).
    #[arg(long)]
    q: usize,
    /// Build even when optimality is not certified (distance becomes a
    /// bound only).
    #[arg(long)]
    force: bool,
}

impl SystemParams {
    fn derive(&self) -> Result<CodeParams, CliError> {
        match derive_params(self.n, self.file_symbols, self.r, self.delta, self.alpha, self.q) {
            Ok(p) => Ok(p),
            Err(Error::NotOptimalConfiguration(msg)) if self.force => {
                eprintln!("warning: {msg}; building anyway, dmin is a bound only");
                Ok(derive_params_forced(
                    self.n,
                    self.file_symbols,
                    self.r,
                    self.delta,
                    self.alpha,
                    self.q,
                )?)
            }
            Err(e) => Err(e.into()),
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum VerifyLevel {
    /// Sampled probe, clearly labeled non-exhaustive.
    Quick,
    /// Full pattern enumeration within the budget.
    Exhaustive,
}

#[derive(Subcommand)]
enum Cmd {
    /// Derive and print the full parameter record as JSON.
    Params {
        #[command(flatten)]
        sys: SystemParams,
        /// Also write the JSON record to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encode a file into n share files (node_<id>.lrc).
    Encode {
        /// Parameter record produced by `params --out`.
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Rebuild one node's share from its group (local repair).
    Repair {
        #[arg(long)]
        share_dir: PathBuf,
        #[arg(long)]
        node: usize,
    },
    /// Rebuild the original file from the surviving shares.
    Reconstruct {
        #[arg(long)]
        share_dir: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Certify the code: distance oracles plus worst-case patterns.
    Verify {
        #[command(flatten)]
        sys: SystemParams,
        #[arg(long, value_enum, default_value = "exhaustive")]
        level: VerifyLevel,
        /// Worker threads for the exhaustive pattern sweep.
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Per-size pattern enumeration cap.
        #[arg(long, default_value_t = DEFAULT_PATTERN_BUDGET)]
        budget: u64,
        /// Samples per size for the quick probe.
        #[arg(long, default_value_t = 200)]
        samples: u64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Seeded failure/repair simulation with bandwidth accounting.
    Simulate {
        /// Parameter record produced by `params --out`.
        #[arg(long)]
        params: PathBuf,
        #[arg(long, default_value_t = 100)]
        rounds: u64,
        /// Failures per round: const:<k> or uniform:<lo>-<hi>.
        #[arg(long, default_value = "const:1")]
        failures: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated node ids to fail in round one instead of sampling.
        #[arg(long)]
        inject: Option<String>,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Params { sys, out } => cmd_params(&sys, out.as_deref()),
        Cmd::Encode {
            params,
            input,
            out_dir,
        } => cmd_encode(&params, &input, &out_dir),
        Cmd::Repair { share_dir, node } => cmd_repair(&share_dir, node),
        Cmd::Reconstruct { share_dir, output } => cmd_reconstruct(&share_dir, &output),
        Cmd::Verify {
            sys,
            level,
            workers,
            budget,
            samples,
            seed,
        } => cmd_verify(&sys, level, workers, budget, samples, seed),
        Cmd::Simulate {
            params,
            rounds,
            failures,
            seed,
            inject,
        } => cmd_simulate(&params, rounds, &failures, seed, inject.as_deref()),
    }
}

fn load_params(path: &Path) -> Result<CodeParams, CliError> {
    let text = fs::read_to_string(path)?;
    let params: CodeParams = serde_json::from_str(&text)?;
    params.validate()?;
    Ok(params)
}

fn cmd_params(sys: &SystemParams, out: Option<&Path>) -> Result<(), CliError> {
    let params = sys.derive()?;
    let text = serde_json::to_string_pretty(&params)?;
    println!("{text}");
    if let Some(path) = out {
        fs::write(path, text)?;
    }
    Ok(())
}

fn cmd_encode(params_path: &Path, input: &Path, out_dir: &Path) -> Result<(), CliError> {
    let params = load_params(params_path)?;
    let code = LrcCode::new(params.clone())?;
    let bytes = fs::read(input)?;
    let chunks = bytes_to_chunks(&params, code.ext(), &bytes)?;

    fs::create_dir_all(out_dir)?;
    let mut per_node: Vec<Vec<Vec<lrc_core::FieldElem>>> = vec![Vec::new(); params.n];
    for file_symbols in &chunks {
        let cw = code.encode(file_symbols)?;
        for block in cw.shares {
            per_node[block.node_id].push(block.symbols);
        }
    }
    for (node_id, node_chunks) in per_node.into_iter().enumerate() {
        let header = ShareHeader::from_params(&params, node_id, bytes.len() as u64);
        write_share(out_dir, &header, code.ext(), &node_chunks)?;
    }
    eprintln!(
        "encode: {} bytes -> {} chunks -> {} shares in {}",
        bytes.len(),
        chunks.len(),
        params.n,
        out_dir.display()
    );
    Ok(())
}

fn scan_share_dir(dir: &Path) -> Result<BTreeMap<usize, PathBuf>, CliError> {
    let mut found = BTreeMap::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        let name = match path.file_name().and_then(|s| s.to_str()) {
            Some(n) => n,
            None => continue,
        };
        if let Some(id) = name
            .strip_prefix("node_")
            .and_then(|rest| rest.strip_suffix(".lrc"))
            .and_then(|id| id.parse::<usize>().ok())
        {
            found.insert(id, path);
        }
    }
    if found.is_empty() {
        return Err(CliError::Format(format!(
            "no node_<id>.lrc shares found in {}",
            dir.display()
        )));
    }
    Ok(found)
}

fn code_from_header(header: &ShareHeader) -> Result<(CodeParams, LrcCode), CliError> {
    let params = header.to_params()?;
    let code = LrcCode::new(params.clone())?;
    Ok((params, code))
}

fn cmd_repair(share_dir: &Path, target: usize) -> Result<(), CliError> {
    let present = scan_share_dir(share_dir)?;
    // Headers are cluster metadata: cheap to read. Payload reads are the
    // repair traffic and stay inside the target's group.
    let first = present.values().next().expect("non-empty");
    let header = read_share_header(first)?;
    let (params, code) = code_from_header(&header)?;
    if target >= params.n {
        return Err(CliError::Usage(format!(
            "node {target} out of range 0..{}",
            params.n
        )));
    }

    let gi = params.group_of(target);
    let range = params.node_range(gi);
    let missing_in_group = range
        .clone()
        .filter(|id| *id == target || !present.contains_key(id))
        .count();
    if missing_in_group > params.delta - 1 {
        return Err(Error::GroupOverwhelmed {
            group: gi,
            erased: missing_in_group,
            max: params.delta - 1,
        }
        .into());
    }

    let k_local = params.groups[gi].data_nodes;
    let providers: Vec<usize> = range
        .clone()
        .filter(|id| *id != target && present.contains_key(id))
        .take(k_local)
        .collect();

    let mut provider_chunks: Vec<(usize, Vec<Vec<lrc_core::FieldElem>>)> = Vec::new();
    let mut orig_len = None;
    for &id in &providers {
        let (hdr, chunks) = read_share(&present[&id], code.ext(), &params)?;
        if hdr.code_fields() != header.code_fields() || hdr.node_id != id as u32 {
            return Err(CliError::Format(format!(
                "share {id} header disagrees with the rest of the codeword"
            )));
        }
        orig_len.get_or_insert(hdr.original_byte_length);
        provider_chunks.push((id, chunks));
    }
    let orig_len = orig_len.ok_or_else(|| {
        CliError::Format("no surviving group members to repair from".into())
    })?;
    let chunks = chunk_count(&params, code.ext(), orig_len)? as usize;

    let mut repaired_chunks = Vec::with_capacity(chunks);
    let mut contacted: Vec<usize> = Vec::new();
    for c in 0..chunks {
        let blocks: Vec<NodeBlock> = provider_chunks
            .iter()
            .map(|(id, per_chunk)| NodeBlock {
                node_id: *id,
                group_id: gi,
                is_parity: params.is_parity_node(*id),
                symbols: per_chunk[c].clone(),
            })
            .collect();
        let refs: Vec<&NodeBlock> = blocks.iter().collect();
        let rep = code.local_repair(&refs, target)?;
        if c == 0 {
            contacted = rep.nodes_contacted.clone();
        }
        repaired_chunks.push(rep.block.symbols);
    }

    let out_header = ShareHeader::from_params(&params, target, orig_len);
    write_share(share_dir, &out_header, code.ext(), &repaired_chunks)?;
    eprintln!(
        "repair: node {target} rebuilt from {} nodes {:?}, downloaded {} symbols",
        contacted.len(),
        contacted,
        contacted.len() * params.alpha * chunks
    );
    Ok(())
}

fn cmd_reconstruct(share_dir: &Path, output: &Path) -> Result<(), CliError> {
    let present = scan_share_dir(share_dir)?;
    let first = present.values().next().expect("non-empty");
    let header = read_share_header(first)?;
    let (params, code) = code_from_header(&header)?;

    let mut shares: Vec<(usize, Vec<Vec<lrc_core::FieldElem>>)> = Vec::new();
    for (&id, path) in &present {
        let (hdr, chunks) = read_share(path, code.ext(), &params)?;
        if hdr.code_fields() != header.code_fields() || hdr.node_id != id as u32 {
            return Err(CliError::Format(format!(
                "share {id} header disagrees with the rest of the codeword"
            )));
        }
        shares.push((id, chunks));
    }
    let chunks = chunk_count(&params, code.ext(), header.original_byte_length)? as usize;

    let mut decoded = Vec::with_capacity(chunks);
    for c in 0..chunks {
        let blocks: Vec<NodeBlock> = shares
            .iter()
            .map(|(id, per_chunk)| NodeBlock {
                node_id: *id,
                group_id: params.group_of(*id),
                is_parity: params.is_parity_node(*id),
                symbols: per_chunk[c].clone(),
            })
            .collect();
        let refs: Vec<&NodeBlock> = blocks.iter().collect();
        decoded.push(code.reconstruct(&refs)?);
    }
    let bytes = chunks_to_bytes(code.ext(), &decoded, header.original_byte_length);
    fs::write(output, &bytes)?;
    eprintln!(
        "reconstruct: {} shares -> {} bytes in {}",
        shares.len(),
        bytes.len(),
        output.display()
    );
    Ok(())
}

fn cmd_verify(
    sys: &SystemParams,
    level: VerifyLevel,
    workers: usize,
    budget: u64,
    samples: u64,
    seed: u64,
) -> Result<(), CliError> {
    let params = sys.derive()?;
    let code = LrcCode::new(params.clone())?;
    match level {
        VerifyLevel::Quick => {
            let probe = probe_dmin(&code, samples, seed)?;
            let out = json!({
                "mode": "probe",
                "exhaustive": false,
                "params": params,
                "probe": probe,
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
            if probe.survivals_below_bound < samples && params.dmin >= 2 {
                return Err(CliError::Verification(
                    "a sampled pattern below the distance bound failed to decode".into(),
                ));
            }
        }
        VerifyLevel::Exhaustive => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers.max(1))
                .build()
                .map_err(|e| CliError::Format(e.to_string()))?;
            let (report, worst) = pool.install(|| -> Result<_, CliError> {
                let report = dmin_report(&code, budget)?;
                let worst = if params.certified {
                    Some(check_worst_cases(&code)?)
                } else {
                    None
                };
                Ok((report, worst))
            })?;
            let worst_ok = worst
                .as_ref()
                .map(|v| v.iter().all(|o| o.valid(params.dmin)))
                .unwrap_or(true);
            let out = json!({
                "mode": "exhaustive",
                "exhaustive": true,
                "params": params,
                "dmin": report,
                "worst_case": worst,
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
            if !report.agree {
                return Err(CliError::Verification(
                    "algebraic and operational distance oracles disagree".into(),
                ));
            }
            if params.certified && !report.achieves_bound {
                return Err(CliError::Verification(format!(
                    "operational distance {} misses the bound {}",
                    report.operational_dmin, report.bound
                )));
            }
            if !worst_ok {
                return Err(CliError::Verification(
                    "a worst-case pattern check failed".into(),
                ));
            }
        }
    }
    Ok(())
}

fn cmd_simulate(
    params_path: &Path,
    rounds: u64,
    failures: &str,
    seed: u64,
    inject: Option<&str>,
) -> Result<(), CliError> {
    let params = load_params(params_path)?;
    let failures: FailureSpec = failures.parse().map_err(CliError::Usage)?;
    let inject = inject
        .map(|s| {
            s.split(',')
                .map(|id| id.trim().parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
        })
        .transpose()
        .map_err(|e| CliError::Usage(format!("bad --inject list: {e}")))?;
    let config = SimConfig {
        params,
        rounds,
        failures,
        seed,
        inject,
    };
    let stats = run_sim(&config)?;
    println!("{}", serde_json::to_string_pretty(&stats)?);
    Ok(())
}

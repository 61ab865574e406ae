//! Seeded failure/repair simulator with bandwidth accounting.
//!
//! Policy is repair-local-first: each round injects simultaneous node
//! failures, repairs every node whose group still has at most `delta - 1`
//! failures by contacting its group, and falls back to one global
//! reconstruction for anything left. A pattern that defeats reconstruction
//! is a data-loss event (the codeword is re-created so the run continues).
//! The seed fully determines the run; repairs are real decode operations,
//! checked against the original shares.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::str::FromStr;

use lrc_core::lrc::CodeParams;
use lrc_core::{FieldElem, LrcCode, NodeBlock};

use crate::CliError;
use lrc_core::ErasurePattern;

/// How many nodes fail per round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FailureSpec {
    Const(u64),
    Uniform(u64, u64),
}

impl FailureSpec {
    fn sample(&self, rng: &mut impl Rng) -> u64 {
        match *self {
            FailureSpec::Const(k) => k,
            FailureSpec::Uniform(lo, hi) => rng.gen_range(lo..=hi),
        }
    }
}

impl FromStr for FailureSpec {
    type Err = String;

    /// `const:<k>` or `uniform:<lo>-<hi>`.
    fn from_str(s: &str) -> Result<Self, String> {
        if let Some(k) = s.strip_prefix("const:") {
            return k
                .parse()
                .map(FailureSpec::Const)
                .map_err(|e| format!("bad failure count: {e}"));
        }
        if let Some(range) = s.strip_prefix("uniform:") {
            let (lo, hi) = range
                .split_once('-')
                .ok_or_else(|| "uniform spec needs lo-hi".to_string())?;
            let lo = lo.parse().map_err(|e| format!("bad lower bound: {e}"))?;
            let hi = hi.parse().map_err(|e| format!("bad upper bound: {e}"))?;
            if lo > hi {
                return Err("uniform lower bound above upper bound".into());
            }
            return Ok(FailureSpec::Uniform(lo, hi));
        }
        Err(format!(
            "unrecognized failure spec '{s}', expected const:<k> or uniform:<lo>-<hi>"
        ))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimConfig {
    pub params: CodeParams,
    pub rounds: u64,
    pub failures: FailureSpec,
    pub seed: u64,
    /// Exact failure set forced in the first round (instead of sampling).
    pub inject: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SimStats {
    pub rounds: u64,
    pub failures_injected: u64,
    pub local_repairs: u64,
    pub reconstruct_fallbacks: u64,
    pub data_loss_events: u64,
    pub total_symbols_downloaded: u64,
    pub total_nodes_contacted: u64,
    pub mean_nodes_contacted_per_local_repair: f64,
}

pub fn run_sim(config: &SimConfig) -> Result<SimStats, CliError> {
    config.params.validate().map_err(CliError::Core)?;
    let code = LrcCode::new(config.params.clone()).map_err(CliError::Core)?;
    let p = code.params();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let file: Vec<FieldElem> = (0..p.file_symbols)
        .map(|_| {
            let coeffs: Vec<u16> = (0..code.ext().degree())
                .map(|_| rng.gen_range(0..p.q) as u16)
                .collect();
            code.ext().elem_from_coeffs(&coeffs).expect("coords below q")
        })
        .collect();
    let codeword = code.encode(&file).map_err(CliError::Core)?;

    let mut stats = SimStats {
        rounds: config.rounds,
        ..SimStats::default()
    };
    let mut local_contacts: u64 = 0;

    for round in 0..config.rounds {
        let failed: BTreeSet<usize> = match (&config.inject, round) {
            (Some(inject), 0) => {
                if inject.iter().any(|&id| id >= p.n) {
                    return Err(CliError::Usage(format!(
                        "injected node id out of range 0..{}",
                        p.n
                    )));
                }
                inject.iter().copied().collect()
            }
            _ => {
                let k = config.failures.sample(&mut rng);
                sample_failures(&mut rng, p.n, k)
            }
        };
        if failed.is_empty() {
            continue;
        }
        stats.failures_injected += failed.len() as u64;

        let pattern = ErasurePattern::new(failed.iter().copied());
        let surviving: Vec<&NodeBlock> = codeword.surviving(&pattern);
        let group_counts = pattern.per_group_counts(p);

        let mut pending = false;
        for &target in &failed {
            if group_counts[p.group_of(target)] > p.delta - 1 {
                pending = true;
                continue;
            }
            let rep = code
                .local_repair(&surviving, target)
                .map_err(CliError::Core)?;
            assert_eq!(
                rep.block, codeword.shares[target],
                "local repair must restore the exact share"
            );
            stats.local_repairs += 1;
            stats.total_symbols_downloaded += rep.symbols_downloaded as u64;
            stats.total_nodes_contacted += rep.nodes_contacted.len() as u64;
            local_contacts += rep.nodes_contacted.len() as u64;
        }

        if pending {
            match code.reconstruct(&surviving) {
                Ok(got) => {
                    assert_eq!(got, file, "reconstruction must return the original file");
                    stats.reconstruct_fallbacks += 1;
                    stats.total_symbols_downloaded += (surviving.len() * p.alpha) as u64;
                    stats.total_nodes_contacted += surviving.len() as u64;
                }
                Err(_) => {
                    // the pattern exceeded dmin - 1 before repair completed
                    stats.data_loss_events += 1;
                }
            }
        }
    }

    stats.mean_nodes_contacted_per_local_repair = if stats.local_repairs > 0 {
        local_contacts as f64 / stats.local_repairs as f64
    } else {
        0.0
    };
    Ok(stats)
}

fn sample_failures(rng: &mut impl Rng, n: usize, k: u64) -> BTreeSet<usize> {
    let k = (k as usize).min(n);
    rand::seq::index::sample(rng, n, k).into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use lrc_core::lrc::derive_params;

    fn ex1_config(rounds: u64, failures: FailureSpec, seed: u64) -> SimConfig {
        SimConfig {
            params: derive_params(14, 9, 4, 2, 1, 2).unwrap(),
            rounds,
            failures,
            seed,
            inject: None,
        }
    }

    #[test]
    fn failure_spec_parsing() {
        assert_eq!("const:2".parse::<FailureSpec>().unwrap(), FailureSpec::Const(2));
        assert_eq!(
            "uniform:0-3".parse::<FailureSpec>().unwrap(),
            FailureSpec::Uniform(0, 3)
        );
        assert!("poisson:1".parse::<FailureSpec>().is_err());
        assert!("uniform:3-1".parse::<FailureSpec>().is_err());
    }

    #[test]
    fn zero_failures_zero_bandwidth() {
        let stats = run_sim(&ex1_config(50, FailureSpec::Const(0), 1)).unwrap();
        assert_eq!(stats.total_symbols_downloaded, 0);
        assert_eq!(stats.data_loss_events, 0);
        assert_eq!(stats.local_repairs, 0);
    }

    #[test]
    fn single_failures_repair_locally_within_r() {
        let stats = run_sim(&ex1_config(200, FailureSpec::Const(1), 2)).unwrap();
        assert_eq!(stats.local_repairs, 200);
        assert_eq!(stats.reconstruct_fallbacks, 0);
        assert_eq!(stats.data_loss_events, 0);
        // full groups contact r = 4, the remainder group beta0 = 3
        assert!(stats.mean_nodes_contacted_per_local_repair <= 4.0);
        assert!(stats.mean_nodes_contacted_per_local_repair > 3.0);
        // downloads = contacts for alpha = 1
        assert_eq!(stats.total_symbols_downloaded, stats.total_nodes_contacted);
    }

    #[test]
    fn forced_worst_pattern_logs_data_loss() {
        let mut config = ex1_config(1, FailureSpec::Const(0), 3);
        // four failures in one group: 3 rank erasures > D - 1 = 2
        config.inject = Some(vec![0, 1, 2, 3]);
        let stats = run_sim(&config).unwrap();
        assert_eq!(stats.data_loss_events, 1);
        assert_eq!(stats.reconstruct_fallbacks, 0);
    }

    #[test]
    fn overwhelmed_group_falls_back_to_reconstruction() {
        let mut config = ex1_config(1, FailureSpec::Const(0), 4);
        // two failures in one group exceed delta - 1 = 1 but reconstruct
        config.inject = Some(vec![0, 1]);
        let stats = run_sim(&config).unwrap();
        assert_eq!(stats.reconstruct_fallbacks, 1);
        assert_eq!(stats.data_loss_events, 0);
        assert_eq!(stats.total_symbols_downloaded, 12); // 12 survivors x alpha
    }

    #[test]
    fn identical_seeds_identical_stats() {
        let a = run_sim(&ex1_config(100, FailureSpec::Uniform(0, 2), 42)).unwrap();
        let b = run_sim(&ex1_config(100, FailureSpec::Uniform(0, 2), 42)).unwrap();
        assert_eq!(a, b);
        let c = run_sim(&ex1_config(100, FailureSpec::Uniform(0, 2), 43)).unwrap();
        assert_ne!(a, c);
    }
}

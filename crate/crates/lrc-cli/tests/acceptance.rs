//! Acceptance suite: one test per criterion, each printing a pass line
//! (visible with `--nocapture`) after asserting the exact expected values.
//!
//! Run with: cargo test -p lrc-cli --test acceptance -- --nocapture

use itertools::Itertools;
use rayon::iter::{ParallelBridge, ParallelIterator};
use std::fs;
use std::process::{Command, Output};
use std::time::Instant;

use lrc_core::gabidulin::GabidulinCode;
use lrc_core::gf::{rank_over_base, span_dim_over_base, BaseParams, ExtParams};
use lrc_core::lrc::{derive_params, OptimalityCase};
use lrc_core::verify::{
    algebraic_dmin, check_worst_cases, decompose, dmin_report, node_to_rank_erasures,
    operational_dmin, verify_bound_sweep, conforming_params, DEFAULT_PATTERN_BUDGET,
};
use lrc_core::{ErasurePattern, FieldElem, LrcCode};

fn example1() -> LrcCode {
    LrcCode::new(derive_params(14, 9, 4, 2, 1, 2).unwrap()).unwrap()
}

fn example2() -> LrcCode {
    LrcCode::new(derive_params(15, 28, 3, 3, 4, 8).unwrap()).unwrap()
}

/// Deterministic non-trivial test file.
fn test_file(code: &LrcCode, seed: u64) -> Vec<FieldElem> {
    let ext = code.ext();
    let q = ext.base().q() as u64;
    let mut state = seed | 1;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    (0..code.params().file_symbols)
        .map(|_| {
            let coeffs: Vec<u16> = (0..ext.degree()).map(|_| (next() % q) as u16).collect();
            ext.elem_from_coeffs(&coeffs).unwrap()
        })
        .collect()
}

fn decodes(code: &LrcCode, cw: &lrc_core::Codeword, file: &[FieldElem], pattern: &ErasurePattern) -> bool {
    match code.reconstruct(&cw.surviving(pattern)) {
        Ok(got) => got == file,
        Err(_) => false,
    }
}

#[test]
fn criterion_1_example1_reproduction() {
    let t = Instant::now();
    let code = example1();
    let file = test_file(&code, 1);
    let cw = code.encode(&file).unwrap();

    let mut survived = 0u32;
    for nodes in (0..14usize).combinations(3) {
        assert!(
            decodes(&code, &cw, &file, &ErasurePattern::new(nodes.clone())),
            "three-erasure pattern {nodes:?} failed"
        );
        survived += 1;
    }
    assert_eq!(survived, 364);
    assert!(
        !decodes(&code, &cw, &file, &ErasurePattern::new([0, 1, 2, 3])),
        "a four-erasure pattern must fail"
    );

    let report = dmin_report(&code, DEFAULT_PATTERN_BUDGET).unwrap();
    assert_eq!(report.bound, 4);
    assert_eq!(report.operational_dmin, 4);
    assert_eq!(report.algebraic_dmin, 4);
    assert!(report.agree && report.achieves_bound);
    eprintln!(
        "[acceptance] criterion 1 PASS: all 364 triples decode, a 4-pattern fails, \
         both oracles give d_min = 4 = bound ({:.1?})",
        t.elapsed()
    );
}

#[test]
fn criterion_2_example2_reproduction() {
    let t = Instant::now();
    let code = example2();
    let file = test_file(&code, 2);
    let cw = code.encode(&file).unwrap();

    let survived = (0..15usize)
        .combinations(4)
        .par_bridge()
        .map(|nodes| {
            assert!(
                decodes(&code, &cw, &file, &ErasurePattern::new(nodes.clone())),
                "four-erasure pattern {nodes:?} failed"
            );
            1u32
        })
        .sum::<u32>();
    assert_eq!(survived, 1365);
    assert!(
        !decodes(&code, &cw, &file, &ErasurePattern::new([0, 1, 2, 3, 4])),
        "a five-erasure pattern must fail"
    );

    let report = dmin_report(&code, DEFAULT_PATTERN_BUDGET).unwrap();
    assert_eq!(report.bound, 5);
    assert_eq!(report.operational_dmin, 5);
    assert_eq!(report.algebraic_dmin, 5);
    assert!(report.agree && report.achieves_bound);
    eprintln!(
        "[acceptance] criterion 2 PASS: all 1365 quads decode, a 5-pattern fails, \
         both oracles give d_min = 5 = bound ({:.1?})",
        t.elapsed()
    );
}

#[test]
fn criterion_3_rank_erasure_formula() {
    let t = Instant::now();
    let mut checked = 0u64;
    for code in [example1(), example2()] {
        let p = code.params().clone();
        for gi in 0..p.group_count() {
            let range = p.node_range(gi);
            for e in 0..=range.len() {
                for nodes in range.clone().combinations(e) {
                    let pattern = ErasurePattern::new(nodes);
                    let expect = e.saturating_sub(p.delta - 1) * p.alpha;
                    assert_eq!(
                        node_to_rank_erasures(&code, &pattern),
                        expect,
                        "group {gi}, {e} erasures"
                    );
                    checked += 1;
                }
            }
        }
    }
    eprintln!(
        "[acceptance] criterion 3 PASS: (e-(delta-1))*alpha rank-erasure formula exact \
         on {checked} single-group patterns of both examples ({:.1?})",
        t.elapsed()
    );
}

#[test]
fn criterion_4_bound_identities() {
    let t = Instant::now();
    let report = verify_bound_sweep(30, 5, 4);
    assert!(report.checked > 300_000);
    assert_eq!(report.delta2_mismatches, 0);
    assert_eq!(report.scalar_mismatches, 0);
    eprintln!(
        "[acceptance] criterion 4 PASS: {} parameter tuples, zero mismatches of the \
         delta=2 and alpha=1 bound identities ({:.1?})",
        report.checked,
        t.elapsed()
    );
}

#[test]
fn criterion_5_optimality_sweep() {
    let t = Instant::now();
    let sets = conforming_params(12, 8, 2, &[2, 8]);
    assert!(sets.len() > 400, "sweep found only {} sets", sets.len());
    let mut full = 0u32;
    let mut remainder = 0u32;
    let mut with_remainder_group = 0u32;
    for params in &sets {
        match params.optimality_case {
            OptimalityCase::FullGroups => full += 1,
            OptimalityCase::RemainderGroup => remainder += 1,
            OptimalityCase::Forced => panic!("sweep must only yield certified sets"),
        }
        if params.beta0 > 0 {
            with_remainder_group += 1;
        }
        let code = LrcCode::new(params.clone()).unwrap();
        let report = dmin_report(&code, DEFAULT_PATTERN_BUDGET).unwrap();
        assert!(
            report.agree && report.achieves_bound,
            "bound missed for {params:?}: {report:?}"
        );
    }
    assert!(full > 0 && remainder > 0 && with_remainder_group > 0);
    eprintln!(
        "[acceptance] criterion 5 PASS: {} conforming sets ({} divisible case, {} remainder \
         case incl. beta0 > 0 groups) all meet the bound by brute force ({:.1?})",
        sets.len(),
        full,
        remainder,
        t.elapsed()
    );
}

#[test]
fn criterion_6_worst_case_generator() {
    let t = Instant::now();
    for (name, code) in [("example 1", example1()), ("example 2", example2())] {
        let p = code.params();
        let budget = p.gab_len - p.file_symbols; // D - 1
        let d = decompose(p);
        assert_eq!(d.rank_erasure_budget(p), budget as i64, "budget identity, {name}");
        let outcomes = check_worst_cases(&code).unwrap();
        assert!(!outcomes.is_empty());
        for o in &outcomes {
            assert_eq!(o.size, p.dmin - 1, "{name}, {}", o.subcase);
            assert!(o.rank_erasures <= budget, "{name}, {}", o.subcase);
            assert!(o.decodes, "{name}, {}", o.subcase);
            assert!(o.extension_fails, "{name}, {}", o.subcase);
            assert!(o.valid(p.dmin));
        }
    }
    eprintln!(
        "[acceptance] criterion 6 PASS: every generated worst-case pattern has size \
         d_min - 1, costs at most D - 1 rank erasures, decodes, and its one-node \
         extension fails, on both examples ({:.1?})",
        t.elapsed()
    );
}

#[test]
fn criterion_7_mrd_at_desk_scale() {
    let t = Instant::now();
    // [6, 3] over GF(2^6), q = 2: all 2^18 messages.
    let ext = ExtParams::new(BaseParams::new(1).unwrap(), 6).unwrap();
    let code = GabidulinCode::new(ext.clone(), 6, 3).unwrap();
    assert_eq!(code.min_rank_distance(), 4);
    let basis: Vec<FieldElem> = code.eval_points().to_vec();
    assert_eq!(span_dim_over_base(&ext, &basis), 6);

    let min_rank = (1u64..1 << 18)
        .par_bridge()
        .map(|idx| {
            let msg: Vec<FieldElem> = (0..3)
                .map(|i| ext.elem_from_index((idx >> (6 * i)) & 0x3F))
                .collect();
            rank_over_base(&ext, &code.encode(&msg).unwrap())
        })
        .min()
        .unwrap();
    assert_eq!(min_rank, 4, "minimum rank weight must be exactly D = 4");
    eprintln!(
        "[acceptance] criterion 7 PASS: [6,3] Gabidulin code over GF(2^6) has minimum \
         rank weight exactly 4 across all 2^18 codewords ({:.1?})",
        t.elapsed()
    );
}

#[test]
fn criterion_8_locality_contract() {
    let t = Instant::now();
    let mut repairs = 0u64;
    for code in [example1(), example2()] {
        let p = code.params().clone();
        let file = test_file(&code, 8);
        let cw = code.encode(&file).unwrap();
        for target in 0..p.n {
            let gi = p.group_of(target);
            let group = p.node_range(gi);
            assert!(group.len() < p.r + p.delta, "group size bound");
            // every erasure context up to delta-1 failures including target
            for extra in 0..p.delta - 1 {
                let others: Vec<usize> = group
                    .clone()
                    .filter(|&id| id != target)
                    .take(extra)
                    .collect();
                let mut erased = others.clone();
                erased.push(target);
                let pattern = ErasurePattern::new(erased);
                let surviving = cw.surviving(&pattern);
                let rep = code.local_repair(&surviving, target).unwrap();
                assert_eq!(rep.block, cw.shares[target]);
                assert!(
                    rep.nodes_contacted.len() <= p.r,
                    "repair of {target} contacted {} nodes",
                    rep.nodes_contacted.len()
                );
                assert!(
                    rep.nodes_contacted.iter().all(|id| group.contains(id)),
                    "repair of {target} left its group"
                );
                assert_eq!(rep.symbols_downloaded, rep.nodes_contacted.len() * p.alpha);
                repairs += 1;
            }
        }
    }
    eprintln!(
        "[acceptance] criterion 8 PASS: {repairs} local repairs on both examples each \
         contacted <= r in-group nodes (group size <= r+delta-1) ({:.1?})",
        t.elapsed()
    );
}

fn lrc_bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lrc"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn criterion_9_cli_end_to_end() {
    let t = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let params = dir.path().join("params.json");
    let out = lrc_bin(&[
        "params", "--n", "14", "--M", "9", "--r", "4", "--delta", "2", "--alpha", "1", "--q",
        "2", "--out",
        params.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let bytes: Vec<u8> = (0..1024).map(|i| (i * 197 + 43) as u8).collect();
    let input = dir.path().join("input.bin");
    fs::write(&input, &bytes).unwrap();
    let pristine = dir.path().join("pristine");
    let out = lrc_bin(&[
        "encode",
        "--params",
        params.to_str().unwrap(),
        "--input",
        input.to_str().unwrap(),
        "--out-dir",
        pristine.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let work = dir.path().join("work");
    fs::create_dir(&work).unwrap();
    let triples: [[usize; 3]; 6] = [
        [0, 1, 2],
        [10, 11, 12],
        [0, 5, 10],
        [4, 9, 13],
        [2, 6, 11],
        [3, 7, 12],
    ];
    for triple in triples {
        for id in 0..14 {
            let dst = work.join(format!("node_{id}.lrc"));
            let _ = fs::remove_file(&dst);
            if !triple.contains(&id) {
                fs::copy(pristine.join(format!("node_{id}.lrc")), &dst).unwrap();
            }
        }
        let output = dir.path().join("out.bin");
        let out = lrc_bin(&[
            "reconstruct",
            "--share-dir",
            work.to_str().unwrap(),
            "--output",
            output.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "triple {triple:?}");
        assert_eq!(fs::read(&output).unwrap(), bytes, "triple {triple:?} not byte-identical");
    }
    eprintln!(
        "[acceptance] criterion 9 PASS: 1 KiB file over 114 chunked codewords survives \
         deletion of {} share triples byte-identically via the CLI ({:.1?})",
        triples.len(),
        t.elapsed()
    );
}

// The two oracles exposed individually, exercised once more on the scalar
// example to pin their agreement outside dmin_report.
#[test]
fn oracle_functions_individually_agree() {
    let code = example1();
    assert_eq!(algebraic_dmin(&code, DEFAULT_PATTERN_BUDGET).unwrap(), 4);
    assert_eq!(operational_dmin(&code, DEFAULT_PATTERN_BUDGET).unwrap(), 4);
}

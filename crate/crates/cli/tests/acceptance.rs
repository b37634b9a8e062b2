//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::panic::{self, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::Instant;

use injwords::collapse::{greedy_collapse, Policy};
use injwords::complex::{
    full_generators, generate_complex, nonderangement_generators, GeneratedComplex,
};
use injwords::homology::{homology, top_cycle_dimension};
use injwords::matrix::RingSpec;
use injwords::redundancy::{
    build_certificate, delta_left, delta_right, m_set, m_set_direct, profile, top_faces,
    verify_record, witness, PositionSet,
};
use injwords::tables::{n3_stages, render_n3_tables};
use injwords::word::InjWord;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::Value;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn nonderangement_complex(n: u8) -> GeneratedComplex {
    generate_complex(nonderangement_generators(n).unwrap(), n).unwrap()
}

fn full_complex(n: u8) -> GeneratedComplex {
    generate_complex(full_generators(n).unwrap(), n).unwrap()
}

/// Counts fixed-point-free arrangements of `[1, n]` by explicit backtracking.
fn brute_derangements(n: usize) -> u64 {
    fn go(pos: usize, n: usize, used: &mut Vec<bool>) -> u64 {
        if pos > n {
            return 1;
        }
        let mut total = 0;
        for letter in 1..=n {
            if !used[letter] && letter != pos {
                used[letter] = true;
                total += go(pos + 1, n, used);
                used[letter] = false;
            }
        }
        total
    }
    go(1, n, &mut vec![false; n + 1])
}

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

fn point_betti(len: usize) -> Vec<u64> {
    let mut b = vec![0; len];
    b[0] = 1;
    b
}

fn cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_injwords"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr).trim()
        ));
    }
    Ok(out.stdout)
}

fn c1_integral_acyclic() -> Outcome {
    for n in 2..=6u8 {
        let ns = n.to_string();
        let args = [
            "homology",
            "--gen",
            "nonderangements",
            "--n",
            &ns,
            "--ring",
            "z",
            "--no-meta",
        ];
        let doc: Value = serde_json::from_slice(&cli(&args)?).map_err(|e| e.to_string())?;
        let betti: Vec<u64> =
            serde_json::from_value(doc["result"]["betti"].clone()).map_err(|e| e.to_string())?;
        ensure(betti == point_betti(n as usize), || {
            format!("n={n}: betti {betti:?}")
        })?;
        let torsion: Vec<Vec<u64>> =
            serde_json::from_value(doc["result"]["torsion"].clone()).map_err(|e| e.to_string())?;
        ensure(
            torsion.len() == n as usize && torsion.iter().all(Vec::is_empty),
            || format!("n={n}: torsion {torsion:?}"),
        )?;
    }
    Ok("n=2..6 betti (1,0,..,0), no torsion".into())
}

fn c2_fields_n7() -> Outcome {
    let c = nonderangement_complex(7);
    // every word of length <= 6 plus the 5040 - 1854 non-derangements
    let expected: u64 = (1..=6)
        .map(|len| factorial(7) / factorial(7 - len))
        .sum::<u64>()
        + factorial(7)
        - 1854;
    ensure(c.num_cells() as u64 == expected, || {
        format!("{} cells, expected {expected}", c.num_cells())
    })?;
    for ring in [
        RingSpec::Rationals,
        RingSpec::PrimeField(2),
        RingSpec::PrimeField(3),
    ] {
        let h = homology(&c, ring).map_err(|e| e.to_string())?;
        ensure(h.betti == point_betti(7), || {
            format!("{ring}: betti {:?}", h.betti)
        })?;
    }
    Ok(format!("{expected} cells, acyclic over q, fp:2, fp:3"))
}

fn c3_wedge() -> Outcome {
    let mut seen = Vec::new();
    for n in 2..=7u8 {
        let d = brute_derangements(n as usize);
        let h = homology(&full_complex(n), RingSpec::Rationals).map_err(|e| e.to_string())?;
        let mut expected = point_betti(n as usize);
        expected[n as usize - 1] = d;
        ensure(h.betti == expected, || {
            format!("n={n}: betti {:?}, expected {expected:?}", h.betti)
        })?;
        seen.push(d);
    }
    ensure(seen == [1, 2, 9, 44, 265, 1854], || {
        format!("derangement counts {seen:?}")
    })?;
    Ok(format!("top betti {seen:?}"))
}

fn c4_euler() -> Outcome {
    for n in 2..=8u8 {
        let d = brute_derangements(n as usize) as i64;
        let chi_p = nonderangement_complex(n).euler_characteristic();
        ensure(chi_p == 1, || format!("n={n}: chi(X(P)) = {chi_p}"))?;
        let chi_s = full_complex(n).euler_characteristic();
        let sign = if (n - 1) % 2 == 0 { 1 } else { -1 };
        ensure(chi_s == 1 + sign * d, || {
            format!("n={n}: chi(X(S)) = {chi_s}")
        })?;
    }
    Ok("n=2..8".into())
}

fn c5_skeleton() -> Outcome {
    for n in 2..=8u8 {
        let sizes = nonderangement_complex(n).level_sizes();
        for len in 1..n as u64 {
            let expected = factorial(n as u64) / factorial(n as u64 - len);
            ensure(sizes[len as usize - 1] as u64 == expected, || {
                format!(
                    "n={n}, len={len}: {} cells, expected {expected}",
                    sizes[len as usize - 1]
                )
            })?;
        }
        let top = factorial(n as u64) - brute_derangements(n as usize);
        ensure(sizes[n as usize - 1] as u64 == top, || {
            format!("n={n}: top level {}", sizes[n as usize - 1])
        })?;
    }
    Ok("n=2..8".into())
}

fn c6_m_law() -> Outcome {
    let mut faces = 0;
    for n in 3..=7u8 {
        for t in top_faces(n).map_err(|e| e.to_string())? {
            // brute force straight from letters, independent of sigma()
            let letters = t.to_vec();
            let k = (1..=n).find(|l| !letters.contains(l)).unwrap();
            let brute: Vec<usize> = (1..=n as usize)
                .filter(|&i| {
                    let mut s = letters.clone();
                    s.insert(i - 1, k);
                    s.iter().enumerate().any(|(j, &l)| l as usize == j + 1)
                })
                .collect();
            let formula = m_set(t).map_err(|e| e.to_string())?;
            ensure(formula == brute, || {
                format!("{t}: formula {formula:?}, brute {brute:?}")
            })?;
            ensure(m_set_direct(t).unwrap() == brute, || {
                format!("{t}: direct disagrees")
            })?;
            faces += 1;
        }
    }
    ensure(faces == 6 + 24 + 120 + 720 + 5040, || {
        format!("{faces} faces")
    })?;
    Ok(format!("{faces} faces"))
}

fn c7_witnesses() -> Outcome {
    let mut records = 0;
    for n in 3..=7u8 {
        for t in top_faces(n).map_err(|e| e.to_string())? {
            let k = t.missing_letter().unwrap() as usize;
            for i in m_set(t).unwrap().into_iter().filter(|&i| i != k) {
                let rec = witness(t, i).map_err(|e| e.to_string())?;
                verify_record(&rec).map_err(|e| e.to_string())?;
                records += 1;
            }
        }
    }
    Ok(format!("{records} records verified"))
}

fn c8_certificate() -> Outcome {
    let mut summary = Vec::new();
    for n in 3..=7u8 {
        let cert = build_certificate(n).map_err(|e| e.to_string())?;
        cert.verify().map_err(|e| e.to_string())?;
        let s = cert.summary();
        ensure(s.faces == factorial(n as u64) as usize, || {
            format!("n={n}: {} faces", s.faces)
        })?;
        let c = nonderangement_complex(n);
        for ring in [
            RingSpec::Rationals,
            RingSpec::PrimeField(2),
            RingSpec::PrimeField(3),
        ] {
            let z = top_cycle_dimension(&c, ring).map_err(|e| e.to_string())?;
            ensure(z == 0, || {
                format!("n={n}, {ring}: top cycles of dimension {z}")
            })?;
        }
        summary.push(format!("n={n}:{}", s.records));
    }
    Ok(format!(
        "acyclic, no top cycles; records {}",
        summary.join(" ")
    ))
}

fn c9_small_cases() -> Outcome {
    let w = |letters: &[u8]| InjWord::new(3, letters).unwrap();
    let stages = n3_stages().map_err(|e| e.to_string())?;
    // incidence data transcribed from the hand-computed tables; [2] in Y is
    // covered by [3,2], not by the top cell [3,2,1]
    let x_top: Vec<InjWord> = vec![w(&[1, 2, 3]), w(&[1, 3, 2]), w(&[2, 1, 3]), w(&[3, 2, 1])];
    let label = |s: &InjWord| x_top.iter().position(|x| x == s).map(|p| p + 1);
    type Table = BTreeMap<String, Vec<String>>;
    let expect = |rows: &[(&str, &[&str])]| -> Table {
        rows.iter()
            .map(|(k, v)| (k.to_string(), v.iter().map(|s| s.to_string()).collect()))
            .collect()
    };
    let tables = [
        (
            expect(&[
                ("[1,2]", &["s1", "s2"]),
                ("[1,3]", &["s1", "s2", "s3"]),
                ("[2,1]", &["s3", "s4"]),
                ("[2,3]", &["s1", "s3"]),
                ("[3,1]", &["s4"]),
                ("[3,2]", &["s2", "s4"]),
            ]),
            expect(&[
                ("[1]", &["[1,2]", "[1,3]", "[2,1]", "[3,1]"]),
                ("[2]", &["[1,2]", "[2,1]", "[2,3]", "[3,2]"]),
                ("[3]", &["[1,3]", "[2,3]", "[3,1]", "[3,2]"]),
            ]),
        ),
        (
            expect(&[
                ("[1,2]", &["s1", "s2"]),
                ("[1,3]", &["s1", "s2", "s3"]),
                ("[2,1]", &["s3"]),
                ("[2,3]", &["s1", "s3"]),
                ("[3,2]", &["s2"]),
            ]),
            expect(&[
                ("[1]", &["[1,2]", "[1,3]", "[2,1]"]),
                ("[2]", &["[1,2]", "[2,1]", "[2,3]", "[3,2]"]),
                ("[3]", &["[1,3]", "[2,3]", "[3,2]"]),
            ]),
        ),
        (
            expect(&[("[1,2]", &["s1"]), ("[1,3]", &["s1"]), ("[2,3]", &["s1"])]),
            expect(&[
                ("[1]", &["[1,2]", "[1,3]"]),
                ("[2]", &["[1,2]", "[2,3]"]),
                ("[3]", &["[1,3]", "[2,3]"]),
            ]),
        ),
    ];
    let tops = [vec![1, 2, 3, 4], vec![1, 2, 3], vec![1]];
    for (idx, ((edges, vertices), top)) in tables.iter().zip(tops).enumerate() {
        let c = &stages[idx].complex;
        let labels: Vec<usize> = c.level(3).iter().filter_map(label).collect();
        ensure(labels == top, || {
            format!("stage {idx}: top cells {labels:?}")
        })?;
        let incidence = |len: usize, name: &dyn Fn(&InjWord) -> String| -> Table {
            c.level(len)
                .iter()
                .map(|f| {
                    let ups = c
                        .level(len + 1)
                        .iter()
                        .filter(|s| f.is_subword_of(**s))
                        .map(name)
                        .collect();
                    (f.to_string(), ups)
                })
                .collect()
        };
        let got_edges = incidence(2, &|s| format!("s{}", label(s).unwrap()));
        ensure(&got_edges == edges, || {
            format!("stage {idx}: edge table {got_edges:?}")
        })?;
        let got_vertices = incidence(1, &|s| s.to_string());
        ensure(&got_vertices == vertices, || {
            format!("stage {idx}: vertex table {got_vertices:?}")
        })?;
    }
    let text = cli(&["tables", "--n", "3"])?;
    ensure(text == cli(&["tables", "--n", "3"])?, || {
        "tables not byte-identical".into()
    })?;
    let rendered = render_n3_tables().map_err(|e| e.to_string())?;
    ensure(text == rendered.as_bytes(), || {
        "tables output differs from the checked stages".into()
    })?;

    let t3 = greedy_collapse(&nonderangement_complex(3), Policy::Lexicographic);
    ensure(t3.success, || "n=3 greedy collapse failed".into())?;
    let first = t3.pairs[0];
    ensure(
        (first.face, first.coface) == (w(&[3, 1]), w(&[3, 2, 1])),
        || format!("first pair {first:?}"),
    )?;
    let t4 = greedy_collapse(&nonderangement_complex(4), Policy::Lexicographic);
    ensure(t4.success, || "n=4 greedy collapse failed".into())?;
    let t2 = greedy_collapse(&full_complex(2), Policy::Lexicographic);
    ensure(!t2.success && t2.pairs.is_empty(), || {
        "X(S_2) collapsed".into()
    })?;
    ensure(t2.residual.num_cells() == 4, || {
        format!("residual {} cells", t2.residual.num_cells())
    })?;
    Ok(format!(
        "tables match; n=3 in {} steps, n=4 in {} steps; circle stuck",
        t3.pairs.len(),
        t4.pairs.len()
    ))
}

fn random_generators(rng: &mut StdRng, n: u8) -> Vec<InjWord> {
    let count = rng.gen_range(1..=6);
    (0..count)
        .map(|_| {
            let len = rng.gen_range(1..=n as usize);
            let mut pool: Vec<u8> = (1..=n).collect();
            let mut letters = Vec::with_capacity(len);
            for _ in 0..len {
                letters.push(pool.swap_remove(rng.gen_range(0..pool.len())));
            }
            InjWord::new(n, &letters).unwrap()
        })
        .collect()
}

fn c10_properties() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x1f2e3d4c);
    let mut traces = 0;
    for n in 2..=5u8 {
        for _ in 0..100 {
            let c = generate_complex(random_generators(&mut rng, n), n).unwrap();
            for len in 2..=c.top_len().saturating_sub(1) {
                let lower = c.boundary_matrix(len, RingSpec::Integers).unwrap();
                let upper = c.boundary_matrix(len + 1, RingSpec::Integers).unwrap();
                let dd = lower.mul(&upper);
                ensure(dd.nnz() == 0, || {
                    format!("d∘d ≠ 0 at length {len} for n={n}")
                })?;
            }
            let h = homology(&c, RingSpec::PrimeField(2)).unwrap();
            ensure(h.euler_characteristic() == c.euler_characteristic(), || {
                format!("Euler mismatch, n={n}")
            })?;
            for policy in [Policy::Lexicographic, Policy::TopDimensionFirst] {
                let trace = greedy_collapse(&c, policy);
                let after = homology(&trace.residual, RingSpec::PrimeField(2)).unwrap();
                let trim = |b: &[u64]| {
                    b.iter()
                        .rposition(|&x| x != 0)
                        .map_or(vec![], |p| b[..=p].to_vec())
                };
                ensure(trim(&after.betti) == trim(&h.betti), || {
                    format!("collapse changed homology, n={n}")
                })?;
                traces += 1;
            }
        }
    }
    let mut trials = 0;
    for n in 3..=12u8 {
        for _ in 0..10_000 {
            let mask: Vec<usize> = (1..n as usize).filter(|_| rng.gen_bool(0.5)).collect();
            if mask.is_empty() {
                continue;
            }
            let j = PositionSet::new(n, mask.iter().copied()).unwrap();
            let (lo, hi) = (mask[0], *mask.last().unwrap());
            if hi >= 2 {
                let a = rng.gen_range(1..hi);
                let b = rng.gen_range(a + 1..=hi);
                let k: Vec<usize> = (1..=a).chain(b..=hi).collect();
                let jk =
                    PositionSet::new(n, mask.iter().copied().filter(|x| k.contains(x))).unwrap();
                ensure(delta_left(j) <= delta_left(jk), || {
                    format!("left J∩K fails: J={mask:?}, a={a}, b={b}")
                })?;
                trials += 1;
            }
            if lo < n as usize - 1 {
                let a = rng.gen_range(lo..n as usize - 1);
                let b = rng.gen_range(a + 1..n as usize);
                let k: Vec<usize> = (lo..=a).chain(b..n as usize).collect();
                let jk =
                    PositionSet::new(n, mask.iter().copied().filter(|x| k.contains(x))).unwrap();
                ensure(delta_right(j) <= delta_right(jk), || {
                    format!("right J∩K fails: J={mask:?}, a={a}, b={b}")
                })?;
                trials += 1;
            }
        }
    }
    ensure(trials >= 10_000, || format!("only {trials} J∩K trials"))?;
    // profile bounds ride along on the same sweep
    for n in 3..=7u8 {
        for t in top_faces(n).unwrap() {
            let p = profile(t).unwrap();
            let ni = n as i32;
            ensure(
                p.lambda != p.rho && -ni <= p.excess && p.excess <= ni - 2,
                || format!("{t}: bounds"),
            )?;
        }
    }
    Ok(format!(
        "400 random complexes, {traces} collapse traces, {trials} J∩K trials"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("integral homology of X(P_n), n=2..6", c1_integral_acyclic),
        ("field homology of X(P_7)", c2_fields_n7),
        ("X(S_n) is a wedge of D_n spheres, n=2..7", c3_wedge),
        ("Euler characteristics, n=2..8", c4_euler),
        ("skeleton sizes of X(P_n), n=2..8", c5_skeleton),
        ("M(t) interval law, n=3..7", c6_m_law),
        ("witness records, n=3..7", c7_witnesses),
        ("certificates and top cycles, n=3..7", c8_certificate),
        ("n=3 tables and small collapses", c9_small_cases),
        ("randomized property sweeps", c10_properties),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (idx, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!(
                "criterion {:>2} PASS [{secs:7.2}s] {name}: {detail}",
                idx + 1
            ),
            Err(detail) => {
                failed += 1;
                println!(
                    "criterion {:>2} FAIL [{secs:7.2}s] {name}: {detail}",
                    idx + 1
                );
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

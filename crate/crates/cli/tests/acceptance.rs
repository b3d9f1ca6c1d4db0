//! Acceptance suite: one PASS/FAIL line per criterion, each with a runtime cap.

use std::panic::{self, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use mumeb_core::sl2::{
    family_symmetric, family_triple, is_trace_zero_excluded, mat_mul, rel_trace_pair, sl2_enumerate,
};
use mumeb_core::unitary::{build_va, check_clifford_covariance};
use mumeb_core::verify::{
    build_meb, scalar_obstruction, unbiased_bruteforce, unbiased_shortcut, verify_mumeb_family,
    Mode, ShortcutTable,
};
use mumeb_core::{Dyadic, ExactMatrix, Field, GaloisRing, Mat2F, TeichIndex};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Check = fn() -> Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn setup(s: u32) -> (Field, GaloisRing) {
    let f = Field::with_default_poly(s).unwrap();
    let r = GaloisRing::new(&f).unwrap();
    (f, r)
}

fn mumeb(args: &[&str]) -> (Option<i32>, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_mumeb"))
        .args(args)
        .env_remove("MUMEB_POLY_TABLE")
        .output()
        .expect("spawn mumeb");
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code(), v)
}

fn trace_table() -> Result<String, String> {
    // rows 0, 2, 2ξ, 2ξ²; columns 0, 1, ξ, ξ²
    #[rustfmt::skip]
    let reference = [
        ("0", 0), ("1", 2), ("ξ", 3), ("ξ²", 3),
        ("2", 0), ("1+2", 2), ("ξ+2", 3), ("ξ²+2", 3),
        ("2ξ", 2), ("1+2ξ", 0), ("ξ+2ξ", 1), ("ξ²+2ξ", 1),
        ("2ξ²", 2), ("1+2ξ²", 0), ("ξ+2ξ²", 1), ("ξ²+2ξ²", 1),
    ];
    let (code, v) = mumeb(&["tables", "--s", "2"]);
    ensure!(code == Some(0), "exit code {code:?}");
    let trace = v["trace"].as_array().ok_or("no trace table")?;
    ensure!(trace.len() == 16, "{} trace values", trace.len());
    for (entry, (name, tr)) in trace.iter().zip(reference) {
        ensure!(
            entry["name"] == name && entry["tr"] == tr,
            "got {entry}, expected tr({name}) = {tr}"
        );
    }
    Ok("16/16 values match".into())
}

fn character_sums() -> Result<String, String> {
    let mut total = 0;
    for s in 2..=5 {
        let (_, r) = setup(s);
        let q = r.q() as i64;
        let g1 = r.gamma(r.one());
        for x in r.elements() {
            let n2 = r.gamma(x).norm_sq();
            let expected = if x == r.zero() {
                q * q
            } else if x.a() == TeichIndex::ZERO {
                0
            } else {
                q
            };
            ensure!(
                n2 == Dyadic::integer(expected),
                "s={s}: |Γ({})|² = {n2}, expected {expected}",
                r.name(x)
            );
            if x.a() != TeichIndex::ZERO {
                let ainv = r.teich(r.teich_inv(x.a()).unwrap());
                let arg = r.neg(r.mul(ainv, r.teich(x.b())).unwrap()).unwrap();
                ensure!(
                    r.gamma(x) == g1.mul_phase(r.lambda(arg)),
                    "s={s}: Γ({}) ≠ Γ(1)λ(−a⁻¹b)",
                    r.name(x)
                );
            }
            total += 1;
        }
    }
    Ok(format!("{total} ring elements over s = 2..5"))
}

fn is_unitary_exact(v: &ExactMatrix) -> bool {
    v.adjoint().product(v).unwrap() == ExactMatrix::identity(v.n())
}

fn unitarity() -> Result<String, String> {
    let (f, r) = setup(2);
    let mut n = 0;
    for a in sl2_enumerate(&f).unwrap() {
        ensure!(
            is_unitary_exact(&build_va(&r, &a).unwrap()),
            "V_A not unitary for {}",
            a.name(&f)
        );
        n += 1;
    }
    let (f, r) = setup(3);
    let mut group: Vec<Mat2F> = sl2_enumerate(&f).unwrap().collect();
    group.shuffle(&mut ChaCha8Rng::seed_from_u64(3));
    for a in &group[..200] {
        ensure!(
            is_unitary_exact(&build_va(&r, a).unwrap()),
            "V_A not unitary for {}",
            a.name(&f)
        );
    }
    Ok(format!("{n} at q = 4, 200 random at q = 8"))
}

fn clifford_signs() -> Result<String, String> {
    let (f, r) = setup(2);
    let (mut total, mut up_to_sign, mut closed_form, mut derived) = (0, 0, 0, 0);
    let mut first_bad = None;
    for a in sl2_enumerate(&f).unwrap() {
        for x in f.elements() {
            for y in f.elements() {
                let rep = check_clifford_covariance(&r, &a, (x, y)).unwrap();
                total += 1;
                up_to_sign += usize::from(rep.measured.is_some());
                derived += usize::from(rep.matches_derived());
                if rep.holds() {
                    closed_form += 1;
                } else if first_bad.is_none() {
                    first_bad = Some(format!(
                        "A = {}, v = ({}, {})",
                        a.name(&f),
                        f.name(x),
                        f.name(y)
                    ));
                }
            }
        }
    }
    let summary = format!(
        "V_A D_v V_A* = ±D_Av in {up_to_sign}/{total}; sign λ(2√(αβab)(γa+δb) + 2√(γδab)(αa+βb)) in {closed_form}/{total}; corrected sign in {derived}/{total}"
    );
    ensure!(
        up_to_sign == total && closed_form == total,
        "{summary}; first mismatch at {}",
        first_bad.unwrap_or_default()
    );
    Ok(summary)
}

fn verify_cli(args: &[&str], bases: u64, pairs: u64) -> Result<(), String> {
    let (code, v) = mumeb(args);
    ensure!(code == Some(0), "{args:?}: exit code {code:?}");
    ensure!(v["bases"] == bases, "{args:?}: {} bases", v["bases"]);
    ensure!(
        v["pair_count"] == pairs,
        "{args:?}: {} pairs",
        v["pair_count"]
    );
    ensure!(
        v["all_pass"] == true && v["failures"] == 0,
        "{args:?}: failures reported"
    );
    let report = &v["report"];
    ensure!(
        report["meb"]
            .as_array()
            .is_some_and(|m| m.iter().all(|b| b == true)),
        "{args:?}: MEB check failed"
    );
    Ok(())
}

fn example_symmetric() -> Result<String, String> {
    let args = [
        "verify",
        "--s",
        "2",
        "--family",
        "symmetric",
        "--mode",
        "both",
    ];
    verify_cli(&args, 5, 10)?;
    let (_, v) = mumeb(&args);
    ensure!(v["disagreements"] == 0, "shortcut and brute force disagree");
    for p in v["report"]["pairs"].as_array().unwrap() {
        ensure!(p["shortcut"] == true && p["bruteforce"] == true, "pair {p}");
    }
    Ok("5 MEBs, 10/10 pairs unbiased by both routes".into())
}

fn example_triple() -> Result<String, String> {
    verify_cli(
        &["verify", "--s", "2", "--family", "triple", "--mode", "both"],
        9,
        36,
    )?;
    verify_cli(
        &[
            "verify", "--s", "3", "--family", "triple", "--mode", "shortcut",
        ],
        21,
        210,
    )?;
    Ok("9 bases at q = 4 (both routes), 21 bases at q = 8".into())
}

fn trace_grid() -> Result<String, String> {
    let (f, r) = setup(2);
    let group: Vec<Mat2F> = sl2_enumerate(&f).unwrap().collect();
    let table = ShortcutTable::new(&r, &group).unwrap();
    let (mut pairs, mut premise) = (0, 0);
    for (i, a) in group.iter().enumerate() {
        for (j, b) in group.iter().enumerate() {
            pairs += 1;
            if rel_trace_pair(&f, a, b).unwrap().is_zero() {
                continue;
            }
            premise += 1;
            ensure!(
                table.unbiased(i, j).unbiased,
                "{} and {} have nonzero trace but are biased",
                a.name(&f),
                b.name(&f)
            );
        }
    }
    ensure!(pairs == 3600, "{pairs} pairs");
    Ok(format!(
        "{premise} of {pairs} ordered pairs have nonzero trace, all unbiased"
    ))
}

fn oracle_equivalence() -> Result<String, String> {
    let mut checked = 0;
    let mut compare = |r: &GaloisRing, a: &Mat2F, b: &Mat2F| -> Result<bool, String> {
        let (u, v) = (build_va(r, a).unwrap(), build_va(r, b).unwrap());
        let fast = unbiased_shortcut(r, &u, &v).unwrap().unbiased;
        let slow = unbiased_bruteforce(&build_meb(r, &u).unwrap(), &build_meb(r, &v).unwrap())
            .unwrap()
            .unbiased;
        ensure!(
            fast == slow,
            "shortcut {fast}, brute force {slow} for {a:?}, {b:?}"
        );
        checked += 1;
        Ok(fast)
    };
    let (f, r) = setup(2);
    for fam in [family_symmetric(&f).unwrap(), family_triple(&f).unwrap()] {
        let m = fam.members();
        for i in 0..m.len() {
            for j in i + 1..m.len() {
                compare(&r, &m[i], &m[j])?;
            }
        }
    }
    let (f, r) = setup(3);
    let group: Vec<Mat2F> = sl2_enumerate(&f).unwrap().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut biased = 0;
    for _ in 0..60 {
        let pick: Vec<&Mat2F> = group.choose_multiple(&mut rng, 2).collect();
        biased += usize::from(!compare(&r, pick[0], pick[1])?);
    }
    Ok(format!(
        "{checked} pairs agree ({biased} of 60 random q = 8 pairs biased)"
    ))
}

fn no_scalar_relation() -> Result<String, String> {
    let (f, r) = setup(2);
    let a = Mat2F::from_indices(&f, [1, 1, 1, 0]).unwrap();
    let ob = scalar_obstruction(&r, &a)
        .unwrap()
        .ok_or("V_{A²} is proportional to V_A²")?;
    ensure!(
        ob.square == build_va(&r, &mat_mul(&f, &a, &a).unwrap()).unwrap(),
        "wrong V_{{A²}}"
    );
    let va = build_va(&r, &a).unwrap();
    ensure!(ob.product == va.product(&va).unwrap(), "wrong V_A²");
    let ((r1, c1), (r2, c2)) = ob.positions;
    let (x1, y1) = (ob.square.get(r1, c1), ob.product.get(r1, c1));
    let (x2, y2) = (ob.square.get(r2, c2), ob.product.get(r2, c2));
    ensure!(!y1.is_zero() && !y2.is_zero(), "zero denominators");
    ensure!(x1 * y2 != x2 * y1, "ratios agree");
    let (Some(z1), Some(z2)) = ob.ratios else {
        return Err("ratios not exact".into());
    };
    ensure!(
        &z1 * y1 == *x1 && &z2 * y2 == *x2 && z1 != z2,
        "ratio check"
    );
    Ok(format!(
        "ratio {z1} at {:?}, {z2} at {:?}",
        ob.positions.0, ob.positions.1
    ))
}

fn search_floor() -> Result<String, String> {
    let (code, v) = mumeb(&["search", "--s", "2", "--budget", "10_000_000"]);
    ensure!(code == Some(0), "exit code {code:?}");
    let size = v["best_size"].as_u64().ok_or("no size")?;
    ensure!(size >= 9, "size {size}");
    ensure!(v["exact"] == true, "search not exhaustive");
    ensure!(
        v["search"]["vertices"] == 60,
        "graph has {} vertices",
        v["search"]["vertices"]
    );
    let (f, r) = setup(2);
    let members: Vec<Mat2F> = serde_json::from_value::<Vec<[usize; 4]>>(v["members"].clone())
        .map_err(|e| e.to_string())?
        .into_iter()
        .map(|idx| Mat2F::from_indices(&f, idx).unwrap())
        .collect();
    ensure!(members.len() as u64 == size, "member count");
    ensure!(
        is_trace_zero_excluded(&f, &members).unwrap().excluded,
        "result not excluded"
    );
    let report = verify_mumeb_family(&r, &members, Mode::Both).unwrap();
    ensure!(report.all_pass(), "result fails MUMEB verification");
    Ok(format!("exact maximum {size}, re-verified by both routes"))
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, Duration, Check); 10] = [
        (1, "trace table", Duration::from_secs(1), trace_table),
        (2, "character sums", Duration::from_secs(30), character_sums),
        (3, "unitarity", Duration::from_secs(60), unitarity),
        (
            4,
            "Clifford covariance signs",
            Duration::from_secs(120),
            clifford_signs,
        ),
        (
            5,
            "symmetric family at q = 4",
            Duration::from_secs(10),
            example_symmetric,
        ),
        (
            6,
            "triple family at q = 4, 8",
            Duration::from_secs(60),
            example_triple,
        ),
        (
            7,
            "trace criterion grid",
            Duration::from_secs(300),
            trace_grid,
        ),
        (
            8,
            "shortcut vs brute force",
            Duration::from_secs(600),
            oracle_equivalence,
        ),
        (
            9,
            "no scalar relates V_{A²} and V_A²",
            Duration::from_secs(1),
            no_scalar_relation,
        ),
        (10, "search floor", Duration::from_secs(120), search_floor),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (n, name, limit, check) in criteria {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .unwrap_or_else(|| "panicked".into()))
        });
        let elapsed = start.elapsed();
        let result = match result {
            Ok(_) if elapsed > limit => Err(format!("exceeded {:.0} s limit", limit.as_secs_f64())),
            r => r,
        };
        let (tag, detail) = match result {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "criterion {n:>2} {tag} [{:.2} s / {} s] {name}: {detail}",
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

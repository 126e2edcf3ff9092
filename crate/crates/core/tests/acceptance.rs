//! Acceptance criteria 1–10. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use tannaka::closure::{generate_collection, ClosureOptions, Collection};
use tannaka::commutant::{bicommutant_check, commutant_basis};
use tannaka::hopf::{ideal_basis, uq_plus_generators};
use tannaka::scalar::{re, C};
use tannaka::tensor::{
    build_r_from_f, conjugation_sign, left_snake, right_snake, FMatrix, InterOp, Sign,
};
use tannaka::verify::*;

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, Duration, Box<dyn Fn() -> Outcome>);

fn symplectic() -> FMatrix<f64> {
    let m = DMatrix::from_row_slice(2, 2, &[re(0.0), re(1.0), re(-1.0), re(0.0)]);
    FMatrix::new(m, 1e-9).unwrap()
}

fn o_f(f: &FMatrix<f64>, n: usize) -> Collection<f64> {
    generate_collection(
        f.dim(),
        &build_r_from_f(f),
        &[],
        n,
        &ClosureOptions::default(),
    )
    .unwrap()
}

fn uq(n: usize, flip: bool) -> (Collection<f64>, FMatrix<f64>) {
    let b = uq_plus_generators(&DMatrix::<C<f64>>::identity(1, 1)).unwrap();
    let g = if flip {
        InterOp::identity(2, 1).sub(&b.p).unwrap()
    } else {
        b.p.clone()
    };
    (
        generate_collection(2, &b.r, &[g], n, &ClosureOptions::default()).unwrap(),
        b.f,
    )
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn require_pass(rep: &VerificationReport) -> Result<f64, String> {
    let worst = rep.records.iter().map(|r| r.residual).fold(0.0, f64::max);
    if rep.pass {
        Ok(worst)
    } else {
        let names: Vec<_> = rep
            .failures()
            .map(|r| format!("{}={:e}", r.name, r.residual))
            .collect();
        Err(format!("suite {} failed: {}", rep.suite, names.join(" ")))
    }
}

fn fact<'a>(rep: &'a VerificationReport, key: &str) -> &'a str {
    rep.fact_value(key).unwrap_or("?")
}

fn criterion_1() -> Outcome {
    let mut worst = 0.0f64;
    for (f, want) in [
        (FMatrix::<f64>::identity(2), Sign::Plus),
        (symplectic(), Sign::Minus),
    ] {
        let r = build_r_from_f(&f);
        let sign = conjugation_sign(&r, 1e-9).map_err(|e| e.to_string())?;
        ensure(
            sign == Some(want),
            format!("sign {sign:?}, expected {want:?}"),
        )?;
        let id = InterOp::identity(2, 1).scale(re(want.as_real::<f64>()));
        for snake in [left_snake(&r).unwrap(), right_snake(&r).unwrap()] {
            worst = worst.max(snake.sub(&id).unwrap().max_abs());
        }
    }
    ensure(worst < 1e-9, format!("snake residual {worst:e}"))?;
    Ok(format!("signs +1/-1, snake residual {worst:e}"))
}

fn criterion_2() -> Outcome {
    let engine = o_f(&FMatrix::<f64>::identity(2), 3).dims_table();
    let oracle = diagram_oracle_table(&FMatrix::<f64>::identity(2), 3, 1e-9);
    ensure(
        engine == oracle,
        format!("engine {engine:?} vs oracle {oracle:?}"),
    )?;
    for (k, l, v) in [
        (0, 0, 1),
        (0, 2, 1),
        (1, 1, 1),
        (2, 2, 2),
        (1, 3, 2),
        (3, 3, 5),
    ] {
        ensure(
            engine[k][l] == v,
            format!("({k},{l}) = {}, expected {v}", engine[k][l]),
        )?;
    }
    for (k, row) in engine.iter().enumerate() {
        for (l, v) in row.iter().enumerate() {
            ensure(
                (k + l) % 2 == 0 || *v == 0,
                format!("odd cell ({k},{l}) nonzero"),
            )?;
        }
    }
    Ok(format!("table {engine:?} equals oracle"))
}

fn criterion_3() -> Outcome {
    let c = o_f(&FMatrix::<f64>::identity(2), 2);
    let rep = verify_annihilator(&c, &VerifyOptions::default());
    let worst = require_pass(&rep)?;
    let dims = (
        fact(&rep, "ideal_dim"),
        fact(&rep, "commutant_dim"),
        fact(&rep, "algebra_dim"),
    );
    ensure(dims == ("7", "14", "21"), format!("dims {dims:?}"))?;
    Ok(format!(
        "I2={} B2={} A2={}, worst residual {worst:e}",
        dims.0, dims.1, dims.2
    ))
}

fn criterion_4() -> Outcome {
    let mut worst = 0.0f64;
    for f in [FMatrix::<f64>::identity(2), symplectic()] {
        for n in 1..=3 {
            let rep = bicommutant_check(&o_f(&f, n), 1e-8);
            let d = rep.cells.iter().map(|c| c.distance).fold(0.0, f64::max);
            worst = worst.max(d);
            ensure(
                rep.consistent,
                format!("n={n} sign {:?}: distance {d:e}", f.sign()),
            )?;
        }
    }
    Ok(format!(
        "both signs, n=1..3, max subspace distance {worst:e}"
    ))
}

fn criterion_5(seed: u64) -> Outcome {
    let opts = VerifyOptions {
        seed,
        ..VerifyOptions::default()
    };
    let product = verify_bi_ideal(&o_f(&FMatrix::<f64>::identity(2), 3), &opts);
    let worst_p = require_pass(&product)?;
    let pairs: usize = fact(&product, "product_pairs")
        .parse()
        .map_err(|_| "no product samples")?;
    ensure(pairs >= 500, format!("only {pairs} sampled pairs"))?;
    let coproduct = verify_bi_ideal(&o_f(&FMatrix::<f64>::identity(2), 2), &opts);
    let worst_c = require_pass(&coproduct)?;
    ensure(
        coproduct
            .records
            .iter()
            .any(|r| r.name == "bi_ideal.coproduct_rank"),
        "rank containment not run",
    )?;
    Ok(format!("{pairs} pairs at n=3 (worst {worst_p:e}), coproduct rank containment at n=2 (worst {worst_c:e})"))
}

fn criterion_6() -> Outcome {
    let opts = VerifyOptions::default();
    let mut worst = 0.0f64;
    for f in [FMatrix::<f64>::identity(2), symplectic()] {
        worst = worst.max(require_pass(&verify_hopf_star(&o_f(&f, 2), &f, &opts))?);
    }
    let (c, f) = uq(2, false);
    worst = worst.max(require_pass(&verify_hopf_star(&c, &f, &opts))?);
    Ok(format!(
        "F=I, F=J and U_Q+ (Q=[1]); worst residual {worst:e}"
    ))
}

fn criterion_7() -> Outcome {
    let rep = verify_of_plus(&FMatrix::<f64>::identity(2), 2, &VerifyOptions::default())
        .map_err(|e| e.to_string())?;
    let worst = require_pass(&rep)?;
    ensure(
        fact(&rep, "ideal_dim") == "7",
        format!("ideal dim {}", fact(&rep, "ideal_dim")),
    )?;
    Ok(format!(
        "common dimension {}, worst residual {worst:e}",
        fact(&rep, "closure_dim")
    ))
}

fn criterion_8() -> Outcome {
    let opts = VerifyOptions::default();
    let f = FMatrix::<f64>::identity(2);
    let c = o_f(&f, 2);
    let r = build_r_from_f(&f);
    let rr = r.compose(&r.adjoint()).unwrap();
    let a = require_pass(&verify_uniqueness(&c, &[rr], &opts).map_err(|e| e.to_string())?)?;
    let (u1, _) = uq(2, false);
    let (u2, _) = uq(2, true);
    let b = require_pass(&compare_collections(&u1, &u2, &opts))?;
    let distinct = compare_collections(&c, &u1, &opts);
    ensure(!distinct.pass, "O_F+ and U_Q+ reported equal")?;
    let (x, y) = (c.space(1, 1).dim(), u1.space(1, 1).dim());
    ensure((x, y) == (1, 2), format!("(1,1) dims {x} vs {y}"))?;
    Ok(format!(
        "alternate sets agree (distances {a:e}, {b:e}); O_F+ vs U_Q+ at (1,1): {x} vs {y}"
    ))
}

fn criterion_9() -> Outcome {
    let b = uq_plus_generators(&DMatrix::<C<f64>>::identity(1, 1)).map_err(|e| e.to_string())?;
    let want_f = DMatrix::from_row_slice(2, 2, &[re(0.0), re(1.0), re(1.0), re(0.0)]);
    ensure(
        (b.f.entries() - want_f).norm() == 0.0,
        "F differs from [[0,1],[1,0]]",
    )?;
    ensure(b.f.sign() == Some(Sign::Plus), "sign is not +1")?;
    let want_p = DMatrix::from_row_slice(2, 2, &[re(1.0), re(0.0), re(0.0), re(0.0)]);
    ensure(b.p.matrix() == &want_p, "p differs from diag(1,0)")?;
    let (c, _) = uq(2, false);
    let reports = verify_all(&c, &VerifyOptions::default());
    let mut worst = 0.0f64;
    for rep in &reports {
        worst = worst.max(require_pass(rep)?);
    }
    let names: Vec<_> = reports.iter().map(|r| r.suite.as_str()).collect();
    Ok(format!(
        "F=[[0,1],[1,0]], sign +1, p=diag(1,0); suites {} pass (worst {worst:e})",
        names.join(",")
    ))
}

/// Every dimension the suites report, as one comparable snapshot.
fn dimension_snapshot(seed: u64) -> Result<Vec<String>, String> {
    let opts = VerifyOptions {
        seed,
        ..VerifyOptions::default()
    };
    let mut out = Vec::new();
    for f in [FMatrix::<f64>::identity(2), symplectic()] {
        let c = o_f(&f, 3);
        out.push(format!("{:?}", c.dims_table()));
        let c2 = c.truncated(2);
        out.push(format!(
            "I={} B={}",
            ideal_basis(&c2).dimension(),
            commutant_basis(&c2).dimension()
        ));
    }
    let (u, _) = uq(2, false);
    out.push(format!("{:?}", u.dims_table()));
    for rep in verify_all(&u, &opts)
        .iter()
        .chain(&verify_all(&o_f(&FMatrix::<f64>::identity(2), 2), &opts))
    {
        require_pass(rep)?;
        for (k, v) in &rep.facts {
            if k.ends_with("_dim") || k == "dims" || k == "engine" || k == "oracle" {
                out.push(format!("{}.{k}={v}", rep.suite));
            }
        }
    }
    let bi = verify_bi_ideal(&o_f(&FMatrix::<f64>::identity(2), 3), &opts);
    require_pass(&bi)?;
    Ok(out)
}

fn criterion_10() -> Outcome {
    let pool = |n| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .unwrap()
    };
    let mut snapshots = Vec::new();
    for (threads, seed) in [(1, 0), (4, 0), (1, 7), (4, 7)] {
        snapshots.push(pool(threads).install(|| dimension_snapshot(seed))?);
    }
    for s in &snapshots[1..] {
        ensure(s == &snapshots[0], "dimensions differ between runs")?;
    }
    Ok(format!(
        "{} dimension facts identical over 1/4 workers and seeds 0/7",
        snapshots[0].len()
    ))
}

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        (
            1,
            "snake/sign detection",
            Duration::from_secs(1),
            Box::new(criterion_1),
        ),
        (
            2,
            "dimension table vs diagram oracle",
            Duration::from_secs(30),
            Box::new(criterion_2),
        ),
        (
            3,
            "annihilator duality",
            Duration::from_secs(10),
            Box::new(criterion_3),
        ),
        (
            4,
            "bicommutant equality",
            Duration::from_secs(60),
            Box::new(criterion_4),
        ),
        (
            5,
            "bi-ideal",
            Duration::from_secs(60),
            Box::new(|| criterion_5(0)),
        ),
        (
            6,
            "Hopf *-ideal",
            Duration::from_secs(60),
            Box::new(criterion_6),
        ),
        (
            7,
            "O_F+ presentation equivalence",
            Duration::from_secs(30),
            Box::new(criterion_7),
        ),
        (
            8,
            "uniqueness",
            Duration::from_secs(60),
            Box::new(criterion_8),
        ),
        (
            9,
            "U_Q+ construction",
            Duration::from_secs(60),
            Box::new(criterion_9),
        ),
        (
            10,
            "determinism",
            Duration::from_secs(600),
            Box::new(criterion_10),
        ),
    ];
    let mut failed = 0;
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > budget => Err(format!(
                "{msg}; took {:.2}s > {:.0}s",
                elapsed.as_secs_f64(),
                budget.as_secs_f64()
            )),
            other => other,
        };
        match outcome {
            Ok(msg) => println!(
                "criterion {id:>2} PASS  {name} [{:.2}s] {msg}",
                elapsed.as_secs_f64()
            ),
            Err(msg) => {
                failed += 1;
                println!(
                    "criterion {id:>2} FAIL  {name} [{:.2}s] {msg}",
                    elapsed.as_secs_f64()
                );
            }
        }
    }
    if failed == 0 {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}

#![allow(clippy::approx_constant)]

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;

use hiqec::qec::{assignment_error, within_budget};
use hiqec::walsh::walsh_matrix;
use hiqec::*;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

type Outcome = std::result::Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn reference_state4() -> RealWavefunction {
    RealWavefunction::gaussian(4, 7.5, 8.0 / 3.0).unwrap()
}

fn reference_gamma8() -> SensitivityProfile {
    let w = RealWavefunction::gaussian(8, 127.5, 50.0 / 3.0).unwrap();
    let b = DiagonalObservable::phi_power(8, 2).unwrap().decompose();
    sensitivities(&b, &w.expectations()).unwrap()
}

fn worked_params() -> SurfaceCodeParams {
    SurfaceCodeParams::with_target(1e-3, 1e-5)
}

fn near(got: f64, want: f64, tol: f64, what: &str) -> Outcome {
    ensure!(
        (got - want).abs() <= tol,
        "{what}: {got} vs {want} (tol {tol})"
    );
    Ok(())
}

fn run_property<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> std::result::Result<(), TestCaseError>,
) -> Outcome {
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

fn wht_structure() -> Outcome {
    #[rustfmt::skip]
    const H4: [[i8; 16]; 16] = [
        [1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1],
        [1, -1, 1, -1, 1, -1, 1, -1, 1, -1, 1, -1, 1, -1, 1, -1],
        [1, 1, -1, -1, 1, 1, -1, -1, 1, 1, -1, -1, 1, 1, -1, -1],
        [1, -1, -1, 1, 1, -1, -1, 1, 1, -1, -1, 1, 1, -1, -1, 1],
        [1, 1, 1, 1, -1, -1, -1, -1, 1, 1, 1, 1, -1, -1, -1, -1],
        [1, -1, 1, -1, -1, 1, -1, 1, 1, -1, 1, -1, -1, 1, -1, 1],
        [1, 1, -1, -1, -1, -1, 1, 1, 1, 1, -1, -1, -1, -1, 1, 1],
        [1, -1, -1, 1, -1, 1, 1, -1, 1, -1, -1, 1, -1, 1, 1, -1],
        [1, 1, 1, 1, 1, 1, 1, 1, -1, -1, -1, -1, -1, -1, -1, -1],
        [1, -1, 1, -1, 1, -1, 1, -1, -1, 1, -1, 1, -1, 1, -1, 1],
        [1, 1, -1, -1, 1, 1, -1, -1, -1, -1, 1, 1, -1, -1, 1, 1],
        [1, -1, -1, 1, 1, -1, -1, 1, -1, 1, 1, -1, -1, 1, 1, -1],
        [1, 1, 1, 1, -1, -1, -1, -1, -1, -1, -1, -1, 1, 1, 1, 1],
        [1, -1, 1, -1, -1, 1, -1, 1, -1, 1, -1, 1, 1, -1, 1, -1],
        [1, 1, -1, -1, -1, -1, 1, 1, -1, -1, 1, 1, 1, 1, -1, -1],
        [1, -1, -1, 1, -1, 1, 1, -1, -1, 1, 1, -1, 1, -1, -1, 1],
    ];
    let m = walsh_matrix(4).unwrap();
    for (r, row) in H4.iter().enumerate() {
        ensure!(m[r] == row.to_vec(), "row {r}: {:?}", m[r]);
    }
    for col in 0..16 {
        let mut e = vec![0.0; 16];
        e[col] = 1.0;
        let t = fwht(&e).unwrap();
        ensure!(
            (0..16).all(|r| t[r] == f64::from(H4[r][col])),
            "fwht column {col}"
        );
    }
    let seq: Vec<usize> = BasisIndex::all(4).unwrap().map(|j| j.sequency()).collect();
    ensure!(
        seq == [0, 15, 7, 8, 3, 12, 4, 11, 1, 14, 6, 9, 2, 13, 5, 10],
        "sequency {seq:?}"
    );
    Ok(())
}

fn appendix_expectations() -> Outcome {
    let want = [
        1.000, 0.0, 0.0, -0.001, 0.0, 0.059, 0.144, 0.0, 0.0, -0.151, -0.318, 0.0, -0.742, 0.0,
        0.0, 0.055,
    ];
    let e = reference_state4().expectations();
    for (j, w) in want.iter().enumerate() {
        let tol = if *w == 0.0 { 1e-12 } else { 0.0005 };
        near(e.get(j), *w, tol, &format!("<O_{j}>"))?;
    }
    Ok(())
}

fn noise_polynomials() -> Outcome {
    let e = reference_state4().expectations();
    let mut failures = Vec::new();
    let p12 = noise_polynomial(BasisIndex::new(12, 4).unwrap(), &e).unwrap();
    for (mask, want) in [
        (0usize, -0.742),
        (0b0100, 0.989),
        (0b1000, 0.989),
        (0b1100, -1.320),
    ] {
        if let Err(m) = near(
            p12.coefficient(mask),
            want,
            0.0005,
            &format!("j=12 mask {mask:04b}"),
        ) {
            failures.push(m);
        }
    }
    let p15 = noise_polynomial(BasisIndex::new(15, 4).unwrap(), &e).unwrap();
    let by_order = [0.055, -0.073, 0.097, -0.130, 0.173];
    for mask in 0..16usize {
        let want = by_order[mask.count_ones() as usize];
        if let Err(m) = near(
            p15.coefficient(mask),
            want,
            0.0005,
            &format!("j=15 mask {mask:04b}"),
        ) {
            failures.push(m);
        }
    }
    ensure!(failures.is_empty(), "{}", failures.join("; "));
    Ok(())
}

fn table_a1() -> Outcome {
    #[rustfmt::skip]
    const ROWS: [(usize, usize, Option<usize>, [f64; 8]); 8] = [
        (0, 0, None, [0.378, 0.256, 0.205, 0.178, 0.161, 0.151, 0.144, 0.139]),
        (3, 8, Some(0), [0.018, 0.039, 0.060, 0.077, 0.090, 0.100, 0.107, 0.111]),
        (5, 12, Some(0), [0.036, 0.070, 0.085, 0.093, 0.100, 0.105, 0.110, 0.113]),
        (6, 4, Some(1), [0.071, 0.136, 0.151, 0.152, 0.148, 0.144, 0.140, 0.137]),
        (9, 14, Some(0), [0.071, 0.079, 0.087, 0.094, 0.100, 0.105, 0.110, 0.113]),
        (10, 6, Some(1), [0.142, 0.150, 0.154, 0.153, 0.149, 0.144, 0.140, 0.137]),
        (12, 2, Some(2), [0.284, 0.240, 0.202, 0.177, 0.161, 0.151, 0.144, 0.139]),
        (15, 10, Some(0), [0.000, 0.030, 0.057, 0.077, 0.090, 0.100, 0.107, 0.111]),
    ];
    for (col, power) in (2..=16).step_by(2).enumerate() {
        let b = DiagonalObservable::phi_power(4, power).unwrap().decompose();
        for (j, s, q_s, betas) in ROWS {
            let idx = BasisIndex::new(j, 4).unwrap();
            ensure!(
                idx.sequency() == s && idx.most_uv_qubit() == q_s,
                "j={j}: (s, q_s) = ({}, {:?})",
                idx.sequency(),
                idx.most_uv_qubit()
            );
            near(
                b.get(j),
                betas[col],
                0.0005,
                &format!("phi^{power} beta_{j}"),
            )?;
        }
        let listed: Vec<usize> = ROWS.iter().map(|r| r.0).collect();
        for j in (0..16).filter(|j| !listed.contains(j)) {
            ensure!(
                b.get(j).abs() < 1e-12,
                "phi^{power} beta_{j} = {} should vanish",
                b.get(j)
            );
        }
    }
    Ok(())
}

fn gamma_n4() -> Outcome {
    let b = DiagonalObservable::phi_power(4, 2).unwrap().decompose();
    let g = sensitivities(&b, &reference_state4().expectations()).unwrap();
    for (q, want) in [0.094, 0.378, 2.151, 2.890].into_iter().enumerate() {
        near(g.get(q), want, 0.002, &format!("gamma_{q}"))?;
    }
    Ok(())
}

fn gamma_n8() -> Outcome {
    let g = reference_gamma8().ir_first();
    let want = [31.15, 13.91, 3.86, 0.64, 0.15, 0.038, 0.0096, 0.0024];
    let failures: Vec<String> = g
        .iter()
        .zip(want)
        .enumerate()
        .filter(|(_, (got, w))| ((*got - w) / w).abs() > 0.01)
        .map(|(k, (got, w))| {
            format!(
                "q={}: {got:.5} vs {w} ({:+.2}%)",
                7 - k,
                100.0 * (got - w) / w
            )
        })
        .collect();
    ensure!(failures.is_empty(), "{}", failures.join("; "));
    Ok(())
}

fn worked_example() -> Outcome {
    let g = reference_gamma8();
    let params = worked_params();
    let homo = homogeneous_distance(&g, &params).unwrap();
    ensure!(
        homo.distances.iter().all(|&d| d == 13) && homo.total_physical == 1352,
        "homogeneous {:?}",
        homo
    );
    let uni = uniform_error_distances(&g, &params).unwrap();
    ensure!(
        uni.ir_first() == [15, 15, 13, 11, 9, 7, 7, 5] && uni.total_physical == 944,
        "uniform {:?}",
        uni
    );
    near(
        uni.achieved_error_per_cycle,
        4.9e-6,
        0.1e-6,
        "uniform error",
    )?;
    let opt = optimize_distances(&g, &params).unwrap();
    ensure!(
        opt.ir_first() == [15, 13, 11, 11, 9, 7, 7, 5] && opt.total_physical == 840,
        "optimized {:?}",
        opt
    );
    near(
        opt.achieved_error_per_cycle,
        9.4e-6,
        0.1e-6,
        "optimized error",
    )?;
    near(
        qec::reduction_pct(homo.total_physical, opt.total_physical),
        37.9,
        0.1,
        "reduction",
    )?;
    Ok(())
}

fn sweep_shape() -> Outcome {
    let g = reference_gamma8();
    let grid = log_grid(1e-16, 1e-3, 20).unwrap();
    let points = reduction_sweep(&g, &worked_params(), &grid).unwrap();
    let reduction: Vec<f64> = points
        .iter()
        .map(|p| p.reduction_optimized_pct.unwrap())
        .collect();
    let first = reduction[0];
    let last = *reduction.last().unwrap();
    ensure!((50.0..=65.0).contains(&last), "reduction at 1e-3 = {last}");
    ensure!(
        (10.0..=30.0).contains(&first),
        "reduction at 1e-16 = {first}"
    );
    let totals: Vec<u64> = points.iter().map(|p| p.optimized_qubits.unwrap()).collect();
    let plateaus = totals.windows(2).filter(|w| w[0] == w[1]).count();
    let rises = reduction.windows(2).filter(|w| w[1] > w[0] + 1e-9).count();
    let drops = reduction.windows(2).filter(|w| w[1] < w[0] - 1e-9).count();
    ensure!(plateaus > 0, "no flat level sets in optimized totals");
    ensure!(
        rises > 0 && drops > 0,
        "reduction is monotone ({rises} rises, {drops} drops)"
    );
    ensure!(
        totals.windows(2).all(|w| w[0] >= w[1]),
        "optimized totals not nonincreasing in the target"
    );
    Ok(())
}

fn oracle_equivalence() -> Outcome {
    let strategy = (
        1usize..=6,
        prop::collection::vec(-1.0f64..1.0, 64),
        prop::collection::vec(-2.0f64..2.0, 64),
        prop::collection::vec(0.0f64..=1.0, 6),
    );
    run_property(128, strategy, |(n, amps, diag, eta)| {
        let amps = amps[..1 << n].to_vec();
        prop_assume!(amps.iter().any(|a| a.abs() > 1e-3));
        let w = RealWavefunction::normalized(amps).unwrap();
        let o = DiagonalObservable::new(diag[..1 << n].to_vec(), "random").unwrap();
        let eta = NoiseVector::new(eta[..n].to_vec()).unwrap();
        let oracle = kraus_oracle(&w, &o, &eta).unwrap();
        let formula = noisy_expectation(&o.decompose(), &w.expectations(), &eta).unwrap();
        prop_assert!(
            (oracle - formula).abs() < 1e-10,
            "{} vs {}",
            oracle,
            formula
        );
        Ok(())
    })
}

/// Every odd tuple in `[d_min, d_max]^n`; smallest total, ties by error.
fn exhaustive(g: &SensitivityProfile, params: &SurfaceCodeParams) -> Option<u64> {
    let n = g.qubits();
    let ladder: Vec<u32> = (params.d_min..=params.d_max).step_by(2).collect();
    let mut idx = vec![0usize; n];
    let mut best: Option<u64> = None;
    loop {
        let d: Vec<u32> = idx.iter().map(|&i| ladder[i]).collect();
        let cost: u64 = d.iter().map(|&x| u64::from(x * x)).sum();
        if best.is_none_or(|b| cost < b)
            && within_budget(
                assignment_error(g.uv_first(), &d, params),
                params.target_per_cycle(),
            )
        {
            best = Some(cost);
        }
        let mut pos = 0;
        loop {
            if pos == n {
                return best;
            }
            idx[pos] += 1;
            if idx[pos] < ladder.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

fn optimizer_exactness() -> Outcome {
    let strategy = (
        prop::collection::vec(-3.0f64..1.7, 1..=6),
        -14.0f64..-2.0,
        1e-4f64..4e-3,
        prop::sample::select(vec![7u32, 9, 13, 17, 21]),
    );
    run_property(48, strategy, |(log_gamma, log_target, p, d_max)| {
        let g =
            SensitivityProfile::new(log_gamma.iter().map(|x| 10f64.powf(*x)).collect()).unwrap();
        let params = SurfaceCodeParams {
            d_max,
            ..SurfaceCodeParams::with_target(p, 10f64.powf(log_target))
        };
        match (optimize_distances(&g, &params), exhaustive(&g, &params)) {
            (Ok(a), Some(cost)) => {
                prop_assert_eq!(a.total_physical, cost);
                prop_assert!(a.is_feasible(&params));
            }
            (Err(Error::Infeasible { .. }), None) => {}
            (got, want) => prop_assert!(false, "optimizer {:?} vs exhaustive {:?}", got, want),
        }
        Ok(())
    })
}

fn structural_invariants() -> Outcome {
    run_property(64, (1usize..=10, any::<u64>()), |(n, seed)| {
        let e = RealWavefunction::random(n, seed).unwrap().expectations();
        prop_assert!((e.get(0) - 1.0).abs() < 1e-12);
        Ok(())
    })
    .map_err(|m| format!("<O_0> = 1: {m}"))?;

    run_property(
        64,
        (1usize..=10, prop::collection::vec(-5.0f64..5.0, 1024)),
        |(n, diag)| {
            let o = DiagonalObservable::new(diag[..1 << n].to_vec(), "random").unwrap();
            let lhs: f64 = o.decompose().beta().iter().map(|x| x * x).sum();
            let rhs = o.diag().iter().map(|x| x * x).sum::<f64>() / (1u64 << n) as f64;
            prop_assert!((lhs - rhs).abs() < 1e-10 * (1.0 + rhs));
            Ok(())
        },
    )
    .map_err(|m| format!("Parseval: {m}"))?;

    run_property(64, (1usize..=12, any::<u64>()), |(n, seed)| {
        let v = RealWavefunction::random(n, seed)
            .unwrap()
            .amplitudes()
            .to_vec();
        let back = fwht(&fwht(&v).unwrap()).unwrap();
        let scale = (1u64 << n) as f64;
        prop_assert!(v
            .iter()
            .zip(&back)
            .all(|(x, y)| (x * scale - y).abs() < 1e-12 * scale));
        Ok(())
    })
    .map_err(|m| format!("involution: {m}"))?;

    run_property(64, (2usize..=6, any::<u64>(), 1u32..=4), |(n, seed, p)| {
        let w = RealWavefunction::random(n, seed).unwrap();
        let b = DiagonalObservable::phi_power(n, 2 * p).unwrap().decompose();
        let e = w.expectations();
        let g = sensitivities(&b, &e).unwrap();
        let clean = noisy_expectation(&b, &e, &NoiseVector::zeros(n)).unwrap();
        let delta = 1e-6;
        for q in 0..n {
            let bumped =
                noisy_expectation(&b, &e, &NoiseVector::single(n, q, delta).unwrap()).unwrap();
            let fd = (bumped - clean) / (delta * clean);
            prop_assert!(
                (fd - g.get(q)).abs() <= 1e-4 * g.get(q).abs().max(1e-3),
                "q={}: {} vs {}",
                q,
                fd,
                g.get(q)
            );
        }
        Ok(())
    })
    .map_err(|m| format!("finite difference: {m}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("Walsh-Hadamard matrix and sequency order", wht_structure),
        (
            "four-qubit Gaussian expectation values",
            appendix_expectations,
        ),
        (
            "noise polynomial coefficients for j=12 and j=15",
            noise_polynomials,
        ),
        ("beta_j table for phi^2..phi^16", table_a1),
        ("gamma regression, n=4", gamma_n4),
        ("gamma regression, n=8", gamma_n8),
        ("surface-code worked example", worked_example),
        ("reduction sweep shape", sweep_shape),
        ("Kraus oracle equals product formula", oracle_equivalence),
        ("optimizer equals exhaustive search", optimizer_exactness),
        ("structural invariants", structural_invariants),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(()) => println!("PASS  criterion {:>2}: {name}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL  criterion {:>2}: {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

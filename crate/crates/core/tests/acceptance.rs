//! Acceptance checks, one line per criterion.
//!
//! Runs without the libtest harness so every PASS/FAIL line lands in the test
//! output; the process exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use qca_core::eigensolver::{ground_state, Method, SolverOptions};
use qca_core::hamiltonian::assemble;
use qca_core::library::{
    build_fan_in, build_fan_out, build_inverter, build_majority, build_wire, mirror_y, truncate,
    BuildConfig, CircuitLayout,
};
use qca_core::model::{field_scale_eo, FieldVector, PhysicalConstants};
use qca_core::observables::cell_polarizations;
use qca_core::sweep::{
    failure_onset, run_sweep, solve_point, truth_table, write_csv, Axis, FieldRange, SweepSpec,
};
use qca_core::three_state::{compare_models, gamma_eff, null_population, ThreeStateParams};

type Layout = CircuitLayout<f64>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn cfg() -> BuildConfig<f64> {
    BuildConfig::default()
}

fn eo() -> f64 {
    field_scale_eo(1.0, &PhysicalConstants::default()).unwrap()
}

fn field(ex_over_eo: f64, ey_over_eo: f64) -> FieldVector<f64> {
    FieldVector::new(ex_over_eo * eo(), ey_over_eo * eo(), 0.0)
}

fn p_out(layout: &Layout, ex: f64, ey: f64, opts: &SolverOptions<f64>) -> f64 {
    solve_point(layout, &field(ex, ey), opts).unwrap().report.output
}

fn stock(rotated: bool) -> Vec<Layout> {
    let c = cfg();
    let mut v = vec![
        build_wire(&c, 4, false, rotated).unwrap(),
        build_wire(&c, 5, true, rotated).unwrap(),
        build_fan_in(&c, false, rotated).unwrap(),
        build_fan_in(&c, true, rotated).unwrap(),
        build_fan_out(&c, false, rotated).unwrap(),
        build_fan_out(&c, true, rotated).unwrap(),
        build_inverter(&c, false, rotated).unwrap(),
        build_inverter(&c, true, rotated).unwrap(),
    ];
    for bits in [[true, false, false], [false, true, true]] {
        v.push(build_majority(&c, bits, rotated).unwrap());
    }
    v
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let eo = field_scale_eo(1.0, &PhysicalConstants::<f64>::default()).unwrap();
    let t = start.elapsed();
    outcome(
        (0.407..=0.427).contains(&eo) && (0.407..=0.427).contains(&0.417) && t < Duration::from_millis(1),
        format!("E_o(1 nm) = {eo:.6} V/nm in [0.407, 0.427], {t:.2?} < 1 ms"),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let p = ThreeStateParams::<f64>::strong_clock(1.0, 0.5, &PhysicalConstants::default()).unwrap();
    let g = gamma_eff(p.v_c, p.e_a, p.gamma);
    let n = null_population(&p).unwrap();
    let t = start.elapsed();
    let pass = (g - 0.0091).abs() <= 0.0007 && n.value <= 0.02 && !n.degenerate && t < Duration::from_millis(1);
    outcome(
        pass,
        format!(
            "gamma_eff = {:.4} meV (9.1 +/- 0.7), null population = {:.5} <= 0.02, {t:.2?} < 1 ms",
            g * 1e3,
            n.value
        ),
    )
}

fn criterion_3() -> Outcome {
    let mut worst_e = 0.0f64;
    let mut worst_p = 0.0f64;
    let mut solves = 0;
    let lanczos = SolverOptions {
        method: Method::Lanczos,
        ..SolverOptions::default()
    };
    let dense = SolverOptions {
        method: Method::Dense,
        ..SolverOptions::default()
    };
    for rotated in [false, true] {
        for full in stock(rotated) {
            let n_pairs = full.device_pairs().unwrap().len().min(5);
            let layout = truncate(&full, n_pairs).unwrap();
            assert!(layout.cell_count() <= 10);
            for (ex, ey) in [(0.0, 0.0), (0.3, -0.6), (-0.9, 0.45)] {
                let h = assemble(&layout, &field(ex, ey), &layout.params).unwrap();
                let l = ground_state(&h, &lanczos).unwrap();
                let d = ground_state(&h, &dense).unwrap();
                worst_e = worst_e.max(((l.energy - d.energy) / d.energy).abs());
                let pl = cell_polarizations(&l.vector).unwrap();
                let pd = cell_polarizations(&d.vector).unwrap();
                for (a, b) in pl.iter().zip(&pd) {
                    worst_p = worst_p.max((a - b).abs());
                }
                solves += 1;
            }
        }
    }
    outcome(
        worst_e <= 1e-10 && worst_p <= 1e-8,
        format!(
            "{solves} layouts x fields at M <= 10: max rel dE = {worst_e:.2e} (<= 1e-10), max dP = {worst_p:.2e} (<= 1e-8)"
        ),
    )
}

fn criterion_4() -> Outcome {
    let p = ThreeStateParams::<f64>::strong_clock(1.0, 0.5, &PhysicalConstants::default()).unwrap();
    let mut worst = 0.0f64;
    let mut max_null = 0.0f64;
    for rotated in [false, true] {
        for bit in [false, true] {
            let wire = build_wire(&cfg(), 2, bit, rotated).unwrap();
            assert_eq!(wire.cell_count(), 4);
            let c = compare_models(&wire, &FieldVector::zero(), &p).unwrap();
            worst = worst.max(c.max_difference);
            max_null = c.null_population.iter().copied().fold(max_null, f64::max);
        }
    }
    outcome(
        worst <= 0.03,
        format!("2-pair wire, 4 variants: max |P2 - P3| = {worst:.4} (<= 0.03), max null population {max_null:.4}"),
    )
}

fn criterion_5() -> Outcome {
    let c = cfg();
    let opts = SolverOptions::default();
    let mut failures = Vec::new();
    let mut weakest = f64::INFINITY;
    let mut solves = 0;
    for bit in [false, true] {
        let cases = [
            ("wire", build_wire(&c, 4, bit, false).unwrap(), bit),
            ("fanin", build_fan_in(&c, bit, false).unwrap(), bit),
            ("fanout", build_fan_out(&c, bit, false).unwrap(), bit),
            ("inverter", build_inverter(&c, bit, false).unwrap(), !bit),
        ];
        for (name, layout, expect) in cases {
            let p = p_out(&layout, 0.0, 0.0, &opts);
            solves += 1;
            weakest = weakest.min(p.abs());
            if (p > 0.0) != expect || p.abs() < 0.9 {
                failures.push(format!("{name}({}) = {p:+.4}", bit as u8));
            }
        }
    }
    let rows = truth_table(&c, false, 0.0, 0.0, &opts).unwrap();
    for r in &rows {
        solves += 1;
        match &r.p_out {
            Ok(p) if r.pass && p.abs() >= 0.9 => weakest = weakest.min(p.abs()),
            other => failures.push(format!("majority{:?} = {other:?}", r.bits)),
        }
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!("{solves} zero-field solves all correct, min |p_out| = {weakest:.4} (>= 0.9)")
        } else {
            format!("wrong outputs: {}", failures.join(", "))
        },
    )
}

fn ey_sweep(layout: &Layout) -> qca_core::sweep::SweepResult<f64> {
    let spec = SweepSpec::new(
        layout.clone(),
        FieldRange::point(0.0),
        FieldRange::new(-1.2, 1.2, 97).unwrap(),
    );
    run_sweep(&spec).unwrap()
}

fn criterion_6() -> Outcome {
    let c = cfg();
    let mut pass = true;
    let mut parts = Vec::new();
    let gates = [
        ("fanin", build_fan_in(&c, false, false).unwrap()),
        ("fanout", build_fan_out(&c, false, false).unwrap()),
        ("inverter", build_inverter(&c, false, false).unwrap()),
        ("majority100", build_majority(&c, [true, false, false], false).unwrap()),
    ];
    for (name, layout) in gates {
        let res = ey_sweep(&layout);
        let onset = failure_onset(&res, Axis::Ey, 0.5).unwrap();
        let plateau = res
            .rows
            .iter()
            .filter(|r| r.ey_over_eo.abs() <= 0.5 + 1e-12 && r.is_usable())
            .map(|r| (r.p_out - onset.p0).abs())
            .fold(0.0, f64::max);
        let show = |v: Option<f64>| v.map_or("none".to_string(), |x| format!("{x:.3}"));
        let ok = if name == "majority100" {
            onset.nearest().is_some_and(|x| (0.55..=1.1).contains(&x))
        } else {
            let in_band = [onset.positive, onset.negative]
                .iter()
                .any(|o| o.is_some_and(|x| (0.5..=1.1).contains(&x)));
            plateau < 0.05 && in_band && onset.is_asymmetric(0.025)
        };
        pass &= ok;
        parts.push(format!(
            "{name}: plateau {plateau:.3}, onset +{} / -{}{}",
            show(onset.positive),
            show(onset.negative),
            if ok { "" } else { " FAIL" }
        ));
    }
    outcome(pass, parts.join("; "))
}

fn criterion_7() -> Outcome {
    let opts = SolverOptions::default();
    let ey_values: Vec<f64> = (0..=20).map(|i| -10.0 + i as f64).collect();
    let mut worst = 0.0f64;
    let mut checked = 0;
    for layout in stock(true) {
        for ex in [-0.5, 0.0, 0.5] {
            let outs: Vec<f64> = ey_values.iter().map(|&ey| p_out(&layout, ex, ey, &opts)).collect();
            let hi = outs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = outs.iter().copied().fold(f64::INFINITY, f64::min);
            worst = worst.max(hi - lo);
            checked += 1;
        }
    }
    let mut table_failures = 0;
    let mut tables = 0;
    for ex in [-0.5, 0.5] {
        for ey in [-10.0, -3.0, -0.8, 0.0, 0.8, 3.0, 10.0] {
            let rows = truth_table(&cfg(), true, ex, ey, &opts).unwrap();
            table_failures += rows.iter().filter(|r| !r.pass).count();
            tables += 1;
        }
    }
    outcome(
        worst < 1e-9 && table_failures == 0,
        format!(
            "{checked} rotated E_y lines over [-10, 10] E_o: max spread {worst:.1e} (< 1e-9); \
             rotated majority at |E_x| = 0.5 E_o: {tables} tables, {table_failures} failed rows"
        ),
    )
}

fn criterion_8() -> Outcome {
    let opts = SolverOptions::with_tol(1e-12);
    let c = cfg();
    let ey_values: Vec<f64> = (0..=24).map(|i| -1.2 + 0.1 * i as f64).collect();
    let mut worst = 0.0f64;
    let mut pairs = 0;
    let gates = [
        (build_fan_in(&c, false, false).unwrap(), build_fan_in(&c, true, false).unwrap()),
        (build_fan_out(&c, false, false).unwrap(), build_fan_out(&c, true, false).unwrap()),
    ];
    for (zero, one) in gates {
        for image in [one, mirror_y(&zero).unwrap()] {
            for &ey in &ey_values {
                let a = p_out(&image, 0.0, ey, &opts);
                let b = p_out(&zero, 0.0, -ey, &opts);
                worst = worst.max((a + b).abs());
                pairs += 1;
            }
        }
    }
    outcome(
        worst <= 1e-9,
        format!("fan-in/fan-out, built and mirrored bit-1 layouts, {pairs} field pairs: max |p1(Ey) + p0(-Ey)| = {worst:.1e} (<= 1e-9)"),
    )
}

fn criterion_9() -> Outcome {
    let layout = build_fan_in(&cfg(), false, false).unwrap();
    let csv_with = |threads: usize| {
        let mut spec = SweepSpec::new(
            layout.clone(),
            FieldRange::new(-0.4, 0.4, 3).unwrap(),
            FieldRange::new(-1.2, 1.2, 13).unwrap(),
        );
        spec.threads = threads;
        let mut buf = Vec::new();
        write_csv(&run_sweep(&spec).unwrap(), &mut buf).unwrap();
        buf
    };
    let one = csv_with(1);
    let many = csv_with(4);
    let again = csv_with(4);
    let identical = one == many && many == again;

    let wire = build_wire(&cfg(), 7, true, false).unwrap();
    assert_eq!(wire.cell_count(), 14);
    let start = Instant::now();
    let g = solve_point(&wire, &field(0.2, -0.4), &SolverOptions::default()).unwrap();
    let t = start.elapsed();
    outcome(
        identical && t < Duration::from_secs(10),
        format!(
            "CSV {} bytes identical across 1/4 threads: {identical}; M = 14 solve in {t:.2?} \
             ({} Lanczos steps, residual {:.1e}) < 10 s",
            one.len(),
            g.ground.iterations,
            g.ground.residual
        ),
    )
}

fn main() {
    type Criterion = (u32, &'static str, fn() -> Outcome, Duration);
    let criteria: [Criterion; 9] = [
        (1, "constants", criterion_1, Duration::from_millis(1)),
        (2, "two-state reduction", criterion_2, Duration::from_millis(1)),
        (3, "oracle equivalence", criterion_3, Duration::from_secs(60)),
        (4, "three-state cross-check", criterion_4, Duration::from_secs(10)),
        (5, "zero-field logic", criterion_5, Duration::from_secs(120)),
        (6, "field tolerance", criterion_6, Duration::from_secs(1800)),
        (7, "rotation immunity", criterion_7, Duration::from_secs(1800)),
        (8, "mirror symmetry", criterion_8, Duration::from_secs(600)),
        (9, "determinism and scale", criterion_9, Duration::from_secs(600)),
    ];
    // Optional arguments pick criteria by number: `cargo test --test acceptance -- 3 7`.
    let wanted: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    let mut ran = 0;
    for (n, name, run, budget) in criteria {
        if !wanted.is_empty() && !wanted.contains(&n) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let o = run();
        let t = start.elapsed();
        // The two sub-millisecond criteria time their own measured call.
        let in_budget = budget < Duration::from_secs(1) || t <= budget;
        let pass = o.pass && in_budget;
        if !pass {
            failed += 1;
        }
        println!(
            "criterion {n} ({name}): {} [{t:.2?}, budget {budget:?}] {}",
            if pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!("acceptance: {}/{ran} criteria passed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

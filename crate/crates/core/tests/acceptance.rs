//! Acceptance suite. Runs every exit criterion, prints one PASS/FAIL line per
//! criterion, and exits non-zero if any criterion fails.
//!
//! Run with `cargo test -p rxlimit-core --test acceptance`.

use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rxlimit::chipdb::{bundled_catalog, check_heat_density, round2};
use rxlimit::compute::max_receiving_rate;
use rxlimit::link::{adapt, crossover_snr, downlink_rate, BindingConstraint, Hertz, LinkConfig, Snr};
use rxlimit::scenario::{run_scenario, ExperimentConfig, ScenarioKind};
use rxlimit::session::{simulate_session, OfferedLoad, ThrottlePolicy};
use rxlimit::thermal::{heat_report, stable_duration, surface_temperature, HeatReport};
use rxlimit::units::{Handset, Power, Rate, SemiconductorNode, SurfacePlate};

const SEED: u64 = 0x5eed_2026;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rxlimit"))
}

fn run_cli(args: &[&str]) -> String {
    let out = bin().args(args).output().expect("rxlimit runs");
    assert!(out.status.success(), "rxlimit {args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).expect("UTF-8 stdout")
}

/// Parses "<number> <unit>" and scales the number to the base unit.
fn parse_quantity(s: &str) -> (f64, String) {
    let mut parts = s.split_whitespace();
    let v: f64 = parts.next().expect("number").parse().expect("numeric");
    let unit = parts.next().unwrap_or_default().to_string();
    let scale = match unit.as_str() {
        "Gbps" => 1e9,
        "Mbps" => 1e6,
        "kbps" => 1e3,
        _ => 1.0,
    };
    (v * scale, unit)
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn rmax(h: &Handset) -> Rate {
    max_receiving_rate(&h.chip, &h.rf, h.landauer_temp, &h.constants).unwrap()
}

fn report(h: &Handset, rate: Rate) -> HeatReport {
    heat_report(&h.chip, &h.rf, rate, h.landauer_temp, &h.constants)
}

fn reference(node: SemiconductorNode, beta: f64) -> Handset {
    Handset::reference(node, beta).unwrap()
}

fn criterion_1() -> Outcome {
    let cases = [
        ("5nm", SemiconductorNode::nm5(), 9.74e9, 0.01),
        ("10nm", SemiconductorNode::nm10(), 2.17e9, 0.005),
        ("14nm", SemiconductorNode::nm14(), 1.55e9, 0.005),
    ];
    let mut pass = true;
    let mut details = Vec::new();
    for (name, node, target, tol) in cases {
        let t0 = Instant::now();
        let lib = rmax(&reference(node, 0.34)).bps();
        let elapsed = t0.elapsed();
        let printed = run_cli(&["calc", "rmax", "--node", name, "--beta", "0.34"]);
        let (cli, unit) = parse_quantity(printed.trim());
        let ok = rel(lib, target) <= tol && rel(cli, target) <= tol && unit == "Gbps" && elapsed < Duration::from_millis(50);
        pass &= ok;
        details.push(format!("{name}: {:.4} Gbps (cli \"{}\", ±{}%)", lib / 1e9, printed.trim(), tol * 100.0));
    }
    check(pass, details.join("; "))
}

fn criterion_2() -> Outcome {
    let mut pass = true;
    let mut details = Vec::new();
    for (rmax, target, tol) in [("2.17Gbps", 0.5, 0.1), ("9.74Gbps", 14.6, 0.2)] {
        let printed = run_cli(&["calc", "crossover", "--rmax", rmax, "--bw", "500MHz", "--streams", "4"]);
        let (cli, unit) = parse_quantity(printed.trim());
        let lib = crossover_snr(rmax.parse().unwrap(), Hertz::mhz(500.0).unwrap(), 4).unwrap();
        let ok = (lib - target).abs() <= tol && (cli - target).abs() <= tol && unit == "dB";
        pass &= ok;
        details.push(format!("{rmax}: {lib:.3} dB (target {target} ± {tol})"));
    }
    // Narrowband regime: the channel, not the handset, is the bottleneck.
    let link = LinkConfig::new(Hertz::mhz(20.0).unwrap(), 4, Snr::from_db(30.0).unwrap()).unwrap();
    let r14 = rmax(&reference(SemiconductorNode::nm14(), 0.34));
    let d = adapt(r14, &link);
    let ok = downlink_rate(&link).bps() < 1.55e9 && d.binding_constraint == BindingConstraint::ChannelLimited;
    pass &= ok;
    details.push(format!(
        "30 dB, 4×20 MHz: R_downlink {:.3} Gbps < R_max {:.2} Gbps, {}",
        d.r_downlink.gbps(),
        r14.gbps(),
        d.binding_constraint
    ));
    check(pass, details.join("; "))
}

fn criterion_3() -> Outcome {
    let h = reference(SemiconductorNode::nm5(), 0.10);
    let d = stable_duration(&report(&h, Rate::from_gbps(4.0).unwrap()), &h.plate).as_f64();
    let r = rmax(&h).gbps();
    let printed = run_cli(&["calc", "duration", "--node", "5nm", "--beta", "0.10", "--rate", "4Gbps"]);
    let (cli, _) = parse_quantity(printed.trim());
    let pass = (3.0..=4.5).contains(&d) && (d - 3.97).abs() <= 0.02 && (cli - 3.97).abs() <= 0.02 && (r - 2.9).abs() <= 0.05;
    check(
        pass,
        format!("duration {d:.4} s (cli \"{}\"), R_max(β=0.10) {r:.4} Gbps", printed.trim()),
    )
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let step = 0.01;
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    let mut failures = 0;
    for _ in 0..1000 {
        // β ∈ (0, 0.34], rate ∈ (R_max, 4·R_max]
        let beta = 0.34 - rng.gen_range(0.0..0.34);
        let factor = 4.0 - rng.gen_range(0.0..3.0);
        if factor <= 1.0 {
            continue;
        }
        let h = reference(SemiconductorNode::nm5(), beta);
        let rate = rmax(&h).scaled(factor).unwrap();
        let expected = stable_duration(&report(&h, rate), &h.plate).as_f64();
        let trace = simulate_session(
            &h,
            None,
            &OfferedLoad::Constant(rate),
            &ThrottlePolicy::hard_shutoff(),
            expected + 2.0 * step,
            step,
        )
        .unwrap();
        match trace.first_throttle() {
            Some(t) => {
                let err = (t - expected).abs();
                worst = worst.max(err);
                if err > step * (1.0 + 1e-9) {
                    failures += 1;
                }
            }
            None => failures += 1,
        }
    }
    let elapsed = t0.elapsed();
    check(
        failures == 0 && elapsed < Duration::from_secs(10),
        format!("1000 cases, worst |Δt| {worst:.5} s (step {step} s), {failures} failures, {elapsed:.2?}"),
    )
}

fn criterion_5() -> Outcome {
    let specs = bundled_catalog();
    let checks = check_heat_density(&specs);
    let mismatched: Vec<String> = checks
        .iter()
        .filter(|c| !c.ok)
        .map(|c| format!("{} stated {:.2} vs {:.4}", c.product, c.stated, c.computed))
        .collect();
    let named = [("Snapdragon 835", 5.00), ("Exynos 7420", 7.05), ("Core™ i7-7920HQ", 3.83)];
    let named_ok = named.iter().all(|(product, expected)| {
        specs
            .iter()
            .find(|s| s.product == *product)
            .map(|s| round2(s.heat_density().unwrap()) == *expected && s.stated_heat_density == *expected)
            .unwrap_or(false)
    });
    let rows_ok = specs.len() == 12 && mismatched.is_empty();
    let detail = format!(
        "{} rows; named rows {}; rows outside ±0.05 W/cm²: {}",
        specs.len(),
        if named_ok { "exact" } else { "MISMATCH" },
        if mismatched.is_empty() { "none".to_string() } else { mismatched.join(", ") }
    );
    check(rows_ok && named_ok, detail)
}

fn criterion_6() -> Outcome {
    const CASES: usize = 500;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 6);
    let t0 = Instant::now();
    let mut failed: Vec<&str> = Vec::new();
    let mut tally = |name: &'static str, ok: bool| {
        if !ok && !failed.contains(&name) {
            failed.push(name);
        }
    };

    for _ in 0..CASES {
        // R_max linear in β.
        let beta = rng.gen_range(0.001..0.17);
        let node = SemiconductorNode::presets()[rng.gen_range(0..3)];
        let a = rmax(&reference(node, beta)).bps();
        let b = rmax(&reference(node, 2.0 * beta)).bps();
        tally("rmax-linear-in-beta", rel(b, 2.0 * a) < 1e-12);

        // excess·duration = ℂM·ΔT
        let excess = rng.gen_range(1e-4..50.0);
        let plate = SurfacePlate::default();
        let rpt = synthetic(excess);
        let d = stable_duration(&rpt, &plate).as_f64();
        tally("energy-conservation", rel(excess * d, plate.heat_capacity() * plate.headroom()) < 1e-12);

        // Surface temperature clamped at t_safe and monotone.
        let t1 = rng.gen_range(0.0..100.0);
        let t2 = t1 + rng.gen_range(0.0..100.0);
        let s1 = surface_temperature(&rpt, &plate, t1).unwrap();
        let s2 = surface_temperature(&rpt, &plate, t2).unwrap();
        tally("surface-clamp", s2 <= plate.t_safe() && s1 <= s2 && s1 >= plate.t_envir());

        // Min-rule and binding constraint vs crossover.
        let r_max = Rate::from_gbps(rng.gen_range(0.1..10.0)).unwrap();
        let bw = Hertz::mhz(rng.gen_range(20.0..1000.0)).unwrap();
        let streams = rng.gen_range(1..9);
        let snr_db = rng.gen_range(-20.0..50.0);
        let link = LinkConfig::new(bw, streams, Snr::from_db(snr_db).unwrap()).unwrap();
        let dec = adapt(r_max, &link);
        let x = crossover_snr(r_max, bw, streams).unwrap();
        tally(
            "min-rule",
            dec.r_phone == dec.r_downlink.min(dec.r_max) && dec.r_phone <= dec.r_max && dec.r_phone <= dec.r_downlink,
        );
        if (snr_db - x).abs() > 1e-6 {
            tally(
                "binding-vs-crossover",
                (dec.binding_constraint == BindingConstraint::TerminalLimited) == (snr_db > x),
            );
        }

        // crossover → downlink round trip.
        let back = LinkConfig::new(bw, streams, Snr::from_db(x).unwrap()).unwrap();
        tally("crossover-round-trip", rel(downlink_rate(&back).bps(), r_max.bps()) < 1e-10);

        // downlink strictly increasing in SNR, bandwidth, streams.
        let base = downlink_rate(&link).bps();
        let more_snr = LinkConfig::new(bw, streams, Snr::from_db(snr_db + rng.gen_range(0.01..10.0)).unwrap()).unwrap();
        let more_bw = LinkConfig::new(Hertz::new(bw.hz() * rng.gen_range(1.001..3.0)).unwrap(), streams, link.snr()).unwrap();
        let more_streams = LinkConfig::new(bw, streams + 1, link.snr()).unwrap();
        tally(
            "downlink-monotone",
            downlink_rate(&more_snr).bps() > base
                && downlink_rate(&more_bw).bps() > base
                && downlink_rate(&more_streams).bps() > base,
        );
    }
    let elapsed = t0.elapsed();
    check(
        failed.is_empty() && elapsed < Duration::from_secs(30),
        format!(
            "{CASES} cases × 7 properties in {elapsed:.2?}; failing: {}",
            if failed.is_empty() { "none".to_string() } else { failed.join(", ") }
        ),
    )
}

fn synthetic(excess: f64) -> HeatReport {
    let w = |v| Power::from_watts(v).unwrap();
    HeatReport {
        h_lna: w(0.0),
        h_chip: w(3.0 + excess),
        h_total: w(3.0 + excess),
        p_td: w(3.0),
        excess: w(excess),
    }
}

fn criterion_7() -> Outcome {
    let mut pass = true;
    let mut sizes = Vec::new();
    for kind in ScenarioKind::PRESETS {
        let cfg = ExperimentConfig::preset(kind);
        let a = run_scenario(&cfg).unwrap().to_csv_string();
        let b = run_scenario(&cfg).unwrap().to_csv_string();
        let c1 = run_cli(&["scenario", kind.name()]);
        let c2 = run_cli(&["scenario", kind.name()]);
        pass &= a == b && c1 == c2 && a == c1;
        sizes.push(format!("{} {}B", kind.name(), a.len()));
    }
    check(pass, format!("byte-identical reruns: {}", sizes.join(", ")))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 7] = [
        ("AC1 R_max endpoints", criterion_1),
        ("AC2 crossover SNRs and narrowband regime", criterion_2),
        ("AC3 stable duration at 4 Gbps, β = 0.10", criterion_3),
        ("AC4 integrator vs closed-form first throttle", criterion_4),
        ("AC5 chip catalog heat densities", criterion_5),
        ("AC6 invariant suite", criterion_6),
        ("AC7 deterministic scenario CSV", criterion_7),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let o = f();
        if !o.pass {
            failed += 1;
        }
        println!("[{}] {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

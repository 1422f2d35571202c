//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use composable_fabric::gen::{self, PlacementShape};
use composable_fabric::{
    builtin_table1, cost_ratio, max_throughput_generic, max_throughput_targeted, oracle_place,
    oracle_throughput_targeted, place_all, scenarios, CostParams, DemandMatrix,
    DisaggregationConfig, GenericFabric, Mode, Reason, Scope, TargetedFabric,
};
use num_rational::Ratio;
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn within(limit: Duration, start: Instant, detail: String) -> Outcome {
    let took = start.elapsed();
    if took < limit {
        Ok(format!("{detail} in {took:.2?}"))
    } else {
        Err(format!("{detail} but took {took:.2?} (limit {limit:?})"))
    }
}

fn ratio_law() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for n in 2u64..=64 {
        for y in 1u64..=40 {
            let p = CostParams::new(n, y as f64);
            // capex_generic / capex_targeted as integers, reduced.
            let exact = Ratio::new(n * (n - 1) * 800, n * 2 * 4 * 100 * y);
            if exact != Ratio::new(n - 1, y) {
                return Err(format!("construction ratio at N={n} Y={y} is {exact}"));
            }
            let expect = *exact.numer() as f64 / *exact.denom() as f64;
            let got = cost_ratio(&p);
            if got.to_bits() != expect.to_bits() {
                return Err(format!("N={n} Y={y}: {got} != {exact}"));
            }
            checked += 1;
        }
    }
    within(
        Duration::from_secs(1),
        start,
        format!("{checked} grid points exact"),
    )
}

fn headline() -> Outcome {
    let r1 = cost_ratio(&CostParams::new(35, 1.0));
    let r40 = cost_ratio(&CostParams::new(35, 40.0));
    if r1 == 34.0 && r40 < 1.0 {
        Ok(format!("ratio(35,1) = {r1}, ratio(35,40) = {r40}"))
    } else {
        Err(format!("ratio(35,1) = {r1}, ratio(35,40) = {r40}"))
    }
}

fn node_capacity() -> Outcome {
    let f = TargetedFabric::with_defaults(35);
    let mut d = DemandMatrix::zeros(35);
    d.set(0, 1, 5000.0).map_err(|e| e.to_string())?;
    let r = max_throughput_targeted(&f, &d).map_err(|e| e.to_string())?;
    let ok = r.egress_cap_gbps == 800.0
        && r.ingress_cap_gbps == 800.0
        && r.carried[0][1] == 800.0
        && r.carried_gbps_total == 800.0;
    let detail = format!(
        "caps {}/{} Gbps, hot pair carries {}",
        r.egress_cap_gbps, r.ingress_cap_gbps, r.carried[0][1]
    );
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn dominance() -> Outcome {
    let start = Instant::now();
    let mut rng = gen::rng(gen::seed_from_env());
    let instances = 150;
    for i in 0..instances {
        let n = rng.gen_range(3..=8);
        let d = gen::random_demand(&mut rng, n, 1200, 0.2);
        let t = max_throughput_targeted(&TargetedFabric::with_defaults(n), &d)
            .map_err(|e| e.to_string())?;
        let g = max_throughput_generic(&GenericFabric::with_defaults(n), &d)
            .map_err(|e| e.to_string())?;
        if g.carried_gbps_total < t.carried_gbps_total {
            return Err(format!(
                "instance {i} (N={n}): generic {} < targeted {}",
                g.carried_gbps_total, t.carried_gbps_total
            ));
        }
    }
    for n in 3..=16 {
        let d = DemandMatrix::uniform(n, f64::INFINITY);
        let t = max_throughput_targeted(&TargetedFabric::with_defaults(n), &d)
            .map_err(|e| e.to_string())?;
        let g = max_throughput_generic(&GenericFabric::with_defaults(n), &d)
            .map_err(|e| e.to_string())?;
        let (want_g, want_t) = ((n * (n - 1) * 800) as f64, (n * 800) as f64);
        if g.carried_gbps_total != want_g || t.carried_gbps_total != want_t {
            return Err(format!(
                "saturating N={n}: generic {} (want {want_g}), targeted {} (want {want_t})",
                g.carried_gbps_total, t.carried_gbps_total
            ));
        }
    }
    within(
        Duration::from_secs(30),
        start,
        format!("{instances} random matrices, saturating N=3..16"),
    )
}

fn throughput_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = gen::rng(gen::seed_from_env() ^ 1);
    let instances = 80;
    for i in 0..instances {
        let n = rng.gen_range(2..=4);
        let t = rng.gen_range(1..=2);
        let d = gen::random_demand(&mut rng, n, 350, 0.25);
        let f = TargetedFabric::new(n, t, 100.0);
        let fast = max_throughput_targeted(&f, &d).map_err(|e| e.to_string())?;
        let slow = oracle_throughput_targeted(&f, &d).map_err(|e| e.to_string())?;
        if fast.carried_gbps_total != slow.carried_gbps_total {
            return Err(format!(
                "instance {i} (N={n}, T={t}): solver {} != oracle {}",
                fast.carried_gbps_total, slow.carried_gbps_total
            ));
        }
    }
    within(
        Duration::from_secs(60),
        start,
        format!("{instances} instances equal"),
    )
}

fn placement_reproduction() -> Outcome {
    let ws = builtin_table1();
    let phys = scenarios::rack_physical();
    let r = place_all(&ws, &phys.dc, &phys.disaggregation).map_err(|e| e.to_string())?;
    let accepted = r.accepted_names();
    if accepted != ["A", "B", "C", "D", "E", "F"] {
        return Err(format!("physical accepted {accepted:?}"));
    }
    if r.rejected.len() != 1 || r.rejected[0].app != "G" || r.rejected[0].reason != Reason::Scope {
        return Err(format!("physical rejected {:?}", r.rejected));
    }
    let hyb = scenarios::rack_hybrid();
    let h = place_all(&ws, &hyb.dc, &hyb.disaggregation).map_err(|e| e.to_string())?;
    let accepted = h.accepted_names();
    if accepted != ["A", "B", "C", "D", "E", "F", "G"] {
        return Err(format!("hybrid accepted {accepted:?}"));
    }
    Ok("physical: A..F accepted, G rejected (scope); hybrid: all 7 accepted".into())
}

fn placement_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = gen::rng(gen::seed_from_env() ^ 2);
    let shape = PlacementShape::default();
    let instances = 80;
    for i in 0..instances {
        let dc = gen::random_dc(&mut rng, &shape);
        let ws = gen::random_workloads(&mut rng, &shape);
        let cfg = gen::random_config(&mut rng, &dc);
        let fast = place_all(&ws, &dc, &cfg).map_err(|e| e.to_string())?;
        let slow = oracle_place(&ws, &dc, &cfg).map_err(|e| e.to_string())?;
        if fast.heuristic || fast.objective_value != slow.objective_value {
            return Err(format!(
                "instance {i}: solver {:?} != oracle {:?}",
                fast.objective_value, slow.objective_value
            ));
        }
    }
    within(
        Duration::from_secs(60),
        start,
        format!("{instances} instances equal"),
    )
}

fn mode_monotonicity() -> Outcome {
    let mut rng = gen::rng(gen::seed_from_env() ^ 3);
    let shape = PlacementShape {
        homogeneous_only: true,
        apps: (3, 6),
        ..Default::default()
    };
    let instances = 100;
    for i in 0..instances {
        let dc = gen::random_dc(&mut rng, &shape);
        let ws = gen::random_workloads(&mut rng, &shape);
        let scale = [Scope::Rack, Scope::Pod][i % 2];
        let mut counts = Vec::new();
        for mode in [Mode::Logical, Mode::Hybrid, Mode::Physical] {
            let r = place_all(&ws, &dc, &DisaggregationConfig::new(mode, scale))
                .map_err(|e| e.to_string())?;
            if r.heuristic {
                return Err(format!("instance {i}: {mode} fell back to the heuristic"));
            }
            counts.push(r.objective_value.accepted());
        }
        if !(counts[0] >= counts[1] && counts[1] >= counts[2]) {
            return Err(format!(
                "instance {i}: logical/hybrid/physical = {counts:?}"
            ));
        }
    }
    Ok(format!(
        "{instances} instances, logical >= hybrid >= physical"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("cost-ratio law", ratio_law),
        ("headline ratio", headline),
        ("node capacity", node_capacity),
        ("throughput dominance", dominance),
        ("throughput oracle equivalence", throughput_oracle),
        ("placement reproduction", placement_reproduction),
        ("placement oracle equivalence", placement_oracle),
        ("mode monotonicity", mode_monotonicity),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

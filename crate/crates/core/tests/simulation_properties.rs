use proptest::prelude::*;
use tpop_core::report::{write_sweep_csv, Metadata};
use tpop_core::simulator::{sweep, ConfusionCounts, Percent, SweepConfig, SweepResult};
use tpop_core::{Environment, ThetaParams};

fn config(theta: ThetaParams, agents: usize, seed: u64) -> SweepConfig {
    SweepConfig {
        env: Environment::new(10.0, 10.0, 1.0, agents).unwrap(),
        theta,
        grid_step: 0.25,
        runs_per_agent: 2,
        seed,
    }
}

fn tp(result: &SweepResult, p_h: f64, p_c: f64) -> f64 {
    result.cell(p_h, p_c).unwrap().counts.tp_pct().unwrap().as_f64()
}

#[test]
fn denser_populations_accept_more_honest_provers() {
    let sparse = sweep(&config(ThetaParams::wide(1.0), 250, 5), None).unwrap();
    let dense = sweep(&config(ThetaParams::wide(1.0), 600, 5), None).unwrap();
    assert!(tp(&dense, 1.0, 0.0) > tp(&sparse, 1.0, 0.0) + 10.0);
}

#[test]
fn lower_threshold_trades_security_for_reliability() {
    for (strict, loose) in [(ThetaParams::wide(1.0), ThetaParams::wide(0.4)), (ThetaParams::deep(1.0), ThetaParams::deep(0.4))] {
        let a = sweep(&config(strict, 350, 11), None).unwrap();
        let b = sweep(&config(loose, 350, 11), None).unwrap();
        for (s, l) in a.cells.iter().zip(&b.cells) {
            // matched seeds give identical trees, so the comparison is exact
            assert!(l.counts.tp >= s.counts.tp, "({}, {})", s.p_h, s.p_c);
            assert!(l.counts.tn <= s.counts.tn, "({}, {})", s.p_h, s.p_c);
        }
    }
}

#[test]
fn written_percentages_sum_to_one_hundred() {
    let result = sweep(&config(ThetaParams::deep(0.4), 120, 3), None).unwrap();
    let mut buf = Vec::new();
    write_sweep_csv(&mut buf, &result, &Metadata::new("test")).unwrap();
    let text = String::from_utf8(buf).unwrap();
    for line in text.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        for (a, b) in [(6, 9), (7, 8)] {
            if f[a].is_empty() {
                assert!(f[b].is_empty());
                continue;
            }
            let sum = f[a].parse::<Percent>().unwrap().0 + f[b].parse::<Percent>().unwrap().0;
            assert_eq!(sum, Percent::HUNDRED.0, "{line}");
        }
    }
}

proptest! {
    #[test]
    fn percent_pairs_are_complementary(tp in 0u64..1_000_000, fn_ in 0u64..1_000_000, tn in 0u64..1_000_000, fp in 0u64..1_000_000) {
        let c = ConfusionCounts { tp, tn, fp, fn_ };
        if let (Some(a), Some(b)) = (c.tp_pct(), c.fn_pct()) {
            prop_assert_eq!(a.0 + b.0, Percent::HUNDRED.0);
            prop_assert!((a.as_f64() - 100.0 * tp as f64 / (tp + fn_) as f64).abs() <= 5e-7);
        }
        if let (Some(a), Some(b)) = (c.tn_pct(), c.fp_pct()) {
            prop_assert_eq!(a.0 + b.0, Percent::HUNDRED.0);
        }
    }
}

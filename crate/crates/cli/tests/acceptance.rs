//! Release gate: every acceptance criterion, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines are always printed.
//! The process exits nonzero if any criterion fails.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use digitscreen::inference::{chi_squared_pvalue, log_bayes_factor_from_counts, report_for_counts};
use digitscreen::simulate::{conformance_experiment, stream_rng, ExperimentOptions, VotingModelConfig};
use digitscreen::{
    count_with_digit, log_bayes_factor_uniform, nbl_first, nbl_joint, nbl_second, restricted_law,
    universal_lower_bound, CountVector, DigitIndex, Domain, HypothesisPrior, RestrictionSpec, UniversalLowerBound,
};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn law_tables() -> Outcome {
    let nb1 = [0.301, 0.176, 0.125, 0.097, 0.079, 0.067, 0.058, 0.0512, 0.046];
    let nb2 = [0.120, 0.114, 0.109, 0.104, 0.100, 0.097, 0.093, 0.090, 0.088, 0.085];
    let e1 = max_abs_diff(nbl_first().probs(), &nb1);
    let e2 = max_abs_diff(nbl_second().probs(), &nb2);
    check(e1 <= 0.0005 && e2 <= 0.0005, format!("max |error| NB1 {e1:.2e}, NB2 {e2:.2e}"))
}

/// Digit counts over 1..=k by direct enumeration.
fn enumerate_digit_counts(k: u64, position: usize) -> [u64; 10] {
    let mut counts = [0u64; 10];
    for n in 1..=k {
        let s = n.to_string();
        if let Some(c) = s.as_bytes().get(position - 1) {
            counts[(c - b'0') as usize] += 1;
        }
    }
    counts
}

fn restricted_table() -> Outcome {
    let k800 = RestrictionSpec::at_most(800).unwrap();
    let cnb1 = [0.330, 0.193, 0.137, 0.106, 0.087, 0.073, 0.064, 0.006, 0.005];
    let cnb2 = [0.121, 0.114, 0.109, 0.104, 0.100, 0.097, 0.093, 0.090, 0.087, 0.085];
    let r1 = restricted_law(&nbl_first(), &k800).unwrap();
    let r2 = restricted_law(&nbl_second(), &k800).unwrap();
    let e1 = max_abs_diff(r1.probs(), &cnb1);
    let e2 = max_abs_diff(r2.probs(), &cnb2);

    let brute1 = enumerate_digit_counts(800, 1);
    let brute2 = enumerate_digit_counts(800, 2);
    let cards_agree = (1..=9).all(|d| count_with_digit(d, DigitIndex::FIRST, &k800).unwrap() == brute1[d as usize])
        && (0..=9).all(|d| count_with_digit(d, DigitIndex::SECOND, &k800).unwrap() == brute2[d as usize]);
    let c21 = count_with_digit(2, DigitIndex::FIRST, &k800).unwrap();

    // oracle law from the enumerated cardinalities
    let oracle: Vec<f64> = {
        let w: Vec<f64> = (1..=9).map(|d| (1.0 + 1.0 / d as f64).log10() * brute1[d] as f64).collect();
        let t: f64 = w.iter().sum();
        w.iter().map(|x| x / t).collect()
    };
    let e_oracle = max_abs_diff(r1.probs(), &oracle);
    check(
        e1 <= 0.0005 && e2 <= 0.0005 && cards_agree && c21 == 111 && e_oracle < 1e-12,
        format!(
            "max |error| CNB1 {e1:.2e}, CNB2 {e2:.2e}; #{{D1=2, N<=800}} = {c21}; cardinalities match enumeration: {cards_agree}"
        ),
    )
}

fn no_correction() -> Outcome {
    let nb1 = nbl_first();
    let k9 = restricted_law(&nb1, &RestrictionSpec::at_most(9).unwrap()).unwrap();
    let exact = k9.probs() == nb1.probs();
    let mut worst = 0.0f64;
    for j in 1..=6 {
        let k = 10u64.pow(j) - 1;
        let r = restricted_law(&nb1, &RestrictionSpec::at_most(k).unwrap()).unwrap();
        worst = worst.max(max_abs_diff(r.probs(), nb1.probs()));
    }
    check(exact && worst <= 1e-12, format!("K=9 identical: {exact}; max |error| over K=10^j-1: {worst:.2e}"))
}

fn ulb_calibration() -> Outcome {
    let bound = |p: f64| universal_lower_bound(p).unwrap().value().unwrap();
    let rows = [(0.05, 0.29, 0.005), (0.01, 0.11, 0.005), (0.001, 0.0184, 0.0005)];
    let mut ok = true;
    let mut detail = String::new();
    for (p, expected, tol) in rows {
        let b = bound(p);
        ok &= (b - expected).abs() <= tol;
        write!(detail, "{p} -> {b:.4}; ").unwrap();
    }
    // at p = 1/e the bound formula meets 1/2
    let e_inv = (-1.0f64).exp();
    let below = bound(e_inv * (1.0 - 1e-15));
    let at_boundary = universal_lower_bound(e_inv).unwrap();
    ok &= (below - 0.5).abs() <= 1e-12 && at_boundary == UniversalLowerBound::AboveHalf;
    write!(detail, "limit at 1/e: {below:.15}").unwrap();
    check(ok, detail)
}

fn factorial(n: u64) -> u128 {
    (1..=n as u128).product()
}

/// ln B01 from exact integer factorials: B01 = Π p_i^{n_i} · (n+k-1)! / ((k-1)! Π n_i!).
fn exact_log_b01(counts: &[u64], probs: &[f64]) -> f64 {
    let k = counts.len() as u64;
    let n: u64 = counts.iter().sum();
    let ratio = factorial(n + k - 1) / (factorial(k - 1) * counts.iter().map(|&c| factorial(c)).product::<u128>());
    let log_null: f64 = counts.iter().zip(probs).map(|(&c, &p)| c as f64 * p.ln()).sum();
    log_null + (ratio as f64).ln()
}

/// Every composition of `n` into `k` nonnegative parts.
fn compositions(n: u64, k: usize) -> Vec<Vec<u64>> {
    if k == 1 {
        return vec![vec![n]];
    }
    (0..=n)
        .flat_map(|first| {
            compositions(n - first, k - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

fn bayes_factor_oracle() -> Outcome {
    let laws: [&[f64]; 6] = [
        &[0.5, 0.5],
        &[0.9, 0.1],
        &[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
        &[0.2, 0.3, 0.5],
        &[0.25, 0.25, 0.25, 0.25],
        &[0.4, 0.3, 0.2, 0.1],
    ];
    let mut cases = 0usize;
    let mut worst_rel = 0.0f64;
    let mut worst_case = String::new();
    for probs in laws {
        for n in 1..=12 {
            for counts in compositions(n, probs.len()) {
                let got = log_bayes_factor_from_counts(&counts, probs).unwrap();
                let want = exact_log_b01(&counts, probs);
                let rel = if want == 0.0 { got.abs() } else { ((got - want) / want).abs() };
                if rel > worst_rel {
                    worst_rel = rel;
                    worst_case = format!("{counts:?} under {probs:?}: {got:e} vs {want:e}");
                }
                cases += 1;
            }
        }
    }
    // the CountVector entry point on the Benford domains, randomized
    let mut rng = stream_rng(5, 0);
    for t in 0..1000 {
        let law = if t % 2 == 0 { nbl_first() } else { nbl_second() };
        let k = law.probs().len();
        let n = rng.random_range(1..=12);
        let mut counts = vec![0u64; k];
        for _ in 0..n {
            counts[rng.random_range(0..k)] += 1;
        }
        let obs = CountVector::new(law.domain(), counts.clone()).unwrap();
        let got = log_bayes_factor_uniform(&obs, &law).unwrap();
        let want = exact_log_b01(&counts, law.probs());
        let rel = ((got - want) / want).abs();
        if rel > worst_rel {
            worst_rel = rel;
            worst_case = format!("{counts:?} under {}: {got:e} vs {want:e}", law.label());
        }
        cases += 1;
    }
    let empty = CountVector::new(Domain::Digit(DigitIndex::SECOND), vec![0; 10]).unwrap();
    let empty_lnb = log_bayes_factor_uniform(&empty, &nbl_second()).unwrap();
    check(
        worst_rel < 1e-12 && empty_lnb == 0.0,
        format!("{cases} cases, worst relative error {worst_rel:.2e} ({worst_case}); empty data ln B = {empty_lnb}"),
    )
}

fn joint_marginals() -> Outcome {
    let joint = nbl_joint(2).unwrap();
    let p = joint.probs();
    let first: Vec<f64> = (0..9).map(|a| (0..10).map(|b| p[a * 10 + b]).sum()).collect();
    let second: Vec<f64> = (0..10).map(|b| (0..9).map(|a| p[a * 10 + b]).sum()).collect();
    let e1 = max_abs_diff(&first, nbl_first().probs());
    let e2 = max_abs_diff(&second, nbl_second().probs());
    check(e1 <= 1e-12 && e2 <= 1e-12, format!("max |error| first {e1:.2e}, second {e2:.2e}"))
}

/// Multinomial counts of `n` draws from `probs`, by inverse CDF.
fn multinomial(seed: u64, n: usize, probs: &[f64]) -> Vec<u64> {
    let mut rng = stream_rng(seed, 0);
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..n {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let cell = probs
            .iter()
            .position(|&p| {
                acc += p;
                u < acc
            })
            .unwrap_or(probs.len() - 1);
        counts[cell] += 1;
    }
    counts
}

fn null_conformance() -> Outcome {
    let n = 19_064;
    let domain = Domain::Digit(DigitIndex::SECOND);
    let law = nbl_second();
    let prior = HypothesisPrior::default();
    let conform = CountVector::new(domain, multinomial(2024, n, law.probs())).unwrap();
    let uniform = CountVector::new(domain, multinomial(2025, n, &[0.1; 10])).unwrap();
    let a = report_for_counts(&conform, &law, prior).unwrap();
    let b = report_for_counts(&uniform, &law, prior).unwrap();
    let row = format!(
        "{:.3} & {:.3} & {}",
        b.posterior_h0,
        b.p_value,
        match b.ulb {
            UniversalLowerBound::Bound(v) => format!("{v:.3}"),
            UniversalLowerBound::AboveHalf => "> 0.5".into(),
        }
    );
    check(
        a.posterior_h0 > 0.99 && b.posterior_h0 < 1e-6 && b.p_value < 1e-6 && row == "0.000 & 0.000 & 0.000",
        format!(
            "NBL2 sample posterior {:.6}; uniform sample posterior {:.2e}, p {:.2e}, row \"{row}\"",
            a.posterior_h0, b.posterior_h0, b.p_value
        ),
    )
}

fn restricted_contrast() -> Outcome {
    let k = 2250;
    let rnb2 = restricted_law(&nbl_second(), &RestrictionSpec::at_most(k).unwrap()).unwrap();
    let laws = [nbl_second(), rnb2];
    let mut wins = 0;
    let mut pairs = Vec::new();
    for seed in 1..=10 {
        let config = VotingModelConfig { seed, ..VotingModelConfig::default() };
        assert_eq!((config.n_units, config.max_voters), (999, k));
        let report = conformance_experiment(&config, &laws, &ExperimentOptions::default()).unwrap();
        let p_nb = report.outcome("A", "NB2").unwrap().pooled.p_value;
        let p_rnb = report.outcome("A", "RNB2_2250").unwrap().pooled.p_value;
        if p_rnb > p_nb {
            wins += 1;
        }
        pairs.push(format!("{p_rnb:.3}/{p_nb:.3}"));
    }
    check(wins >= 9, format!("restricted > unrestricted in {wins}/10 seeds (RNB2/NB2 p: {})", pairs.join(" ")))
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
fn gauss_legendre(order: usize) -> Vec<(f64, f64)> {
    (1..=order)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (order as f64 + 0.5)).cos();
            loop {
                let (mut p0, mut p1) = (1.0, x);
                for j in 2..=order {
                    let j = j as f64;
                    (p0, p1) = (p1, ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j);
                }
                let dp = order as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    let w = 2.0 / ((1.0 - x * x) * dp * dp);
                    return (x, w);
                }
            }
        })
        .collect()
}

/// Γ(a) for a a positive multiple of 1/2, by the product recurrence.
fn gamma_half_integer(a: f64) -> f64 {
    let (mut g, mut x) = if a.fract() == 0.0 { (1.0, 1.0) } else { (std::f64::consts::PI.sqrt(), 0.5) };
    while x < a {
        g *= x;
        x += 1.0;
    }
    g
}

/// Upper tail of the chi-squared law by quadrature of its density.
fn chi2_tail_oracle(chi2: f64, df: u32, rule: &[(f64, f64)]) -> f64 {
    let a = df as f64 / 2.0;
    let y = chi2 / 2.0;
    // density of Gamma(a, 1) at y, and the integrand relative to it
    let f_y = ((a - 1.0) * y.ln() - y).exp() / gamma_half_integer(a);
    let rel = |t: f64| ((a - 1.0) * (t / y).ln() - (t - y)).exp();
    let integrate = |lo: f64, hi: f64, panels: usize| -> f64 {
        let h = (hi - lo) / panels as f64;
        (0..panels)
            .map(|j| {
                let mid = lo + (j as f64 + 0.5) * h;
                rule.iter().map(|&(x, w)| w * rel(mid + 0.5 * h * x)).sum::<f64>() * 0.5 * h
            })
            .sum()
    };
    if y > a {
        let span = 40.0 * (a.sqrt() + 1.0) + 60.0;
        f_y * integrate(y, y + span, 2000)
    } else {
        1.0 - f_y * integrate(0.0, y, 2000)
    }
}

fn pvalue_accuracy() -> Outcome {
    let rule = gauss_legendre(20);
    let mut points = Vec::new();
    for (df, count) in [(8u32, 34usize), (9, 33), (89, 33)] {
        for j in 0..count {
            let scale = 0.05 + 3.95 * j as f64 / (count - 1) as f64;
            points.push((df as f64 * scale, df));
        }
    }
    let mut worst = 0.0f64;
    let mut at = (0.0, 0);
    for &(chi2, df) in &points {
        let got = chi_squared_pvalue(chi2, df);
        let want = chi2_tail_oracle(chi2, df, &rule);
        let rel = ((got - want) / want).abs();
        if rel > worst {
            worst = rel;
            at = (chi2, df);
        }
    }
    check(
        worst < 1e-8 && points.len() == 100,
        format!("{} points, worst relative error {worst:.2e} at chi2 = {:.3}, df = {}", points.len(), at.0, at.1),
    )
}

fn cli_integration() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let input: PathBuf = dir.path().join("fixture.csv");
    std::fs::write(&input, "unit,bush,kerry\nA,2,3\nB,1816,973\nC,254,1220\n").map_err(|e| e.to_string())?;
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_digitscreen"))
            .arg("screen")
            .arg(&input)
            .args(["--columns", "bush,kerry", "--tests", "nb1,nb2", "--format", "csv"])
            .env_remove("DIGITSCREEN_OUT_DIR")
            .output()
            .expect("run digitscreen")
    };
    let first = run();
    let second = run();
    let stdout = String::from_utf8_lossy(&first.stdout).to_string();
    let header = stdout.lines().next().unwrap_or_default().to_string();
    let expected_header = "column,test,m,Median,P(H₀|data),p-value,P̲(H₀|data)";
    let code = first.status.code();
    let expected_code = if stdout
        .lines()
        .skip(1)
        .any(|l| l.split(',').nth(4).and_then(|v| v.parse::<f64>().ok()).is_some_and(|p| p < 0.5))
    {
        Some(2)
    } else {
        Some(0)
    };
    let missing = Command::new(env!("CARGO_BIN_EXE_digitscreen"))
        .arg("screen")
        .arg(dir.path().join("absent.csv"))
        .output()
        .expect("run digitscreen");
    check(
        header == expected_header
            && first.stdout == second.stdout
            && code == expected_code
            && second.status.code() == code
            && missing.status.code() == Some(1),
        format!(
            "header \"{header}\"; exit {code:?} (expected {expected_code:?}); identical reruns: {}; missing input exit {:?}",
            first.stdout == second.stdout,
            missing.status.code()
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("law tables", law_tables),
        ("restricted law at K=800", restricted_table),
        ("no-correction identity", no_correction),
        ("lower-bound calibration", ulb_calibration),
        ("Bayes factor oracle", bayes_factor_oracle),
        ("joint-law marginals", joint_marginals),
        ("null conformance", null_conformance),
        ("restricted vs unrestricted contrast", restricted_contrast),
        ("chi-squared p-value accuracy", pvalue_accuracy),
        ("CLI integration", cli_integration),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({elapsed:.2} s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({elapsed:.2} s): {detail}", i + 1);
            }
        }
    }
    println!("{} of {} acceptance criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
